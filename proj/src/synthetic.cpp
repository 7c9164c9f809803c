#include "respira/synthetic.hpp"

#include "respira/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace respira {

namespace {

struct Layout {
    std::size_t lead = 0;
    std::size_t body = 0;
    std::size_t total = 0;
};

Layout layout(const SyntheticCorpusOptions& o) {
    Layout l;
    l.lead = static_cast<std::size_t>(o.silence_seconds * o.sample_rate);
    l.body = static_cast<std::size_t>(o.clip_seconds * o.sample_rate);
    l.total = l.body + 2 * l.lead;
    return l;
}

// Raised-cosine burst envelope: a few bursts with gaps, each 80-200 ms long.
std::vector<double> burst_envelope(Rng& rng, std::size_t n, int sr) {
    std::vector<double> env(n, 0.0);
    std::size_t pos = static_cast<std::size_t>(0.02 * sr);
    while (pos < n) {
        const auto len = static_cast<std::size_t>((0.08 + 0.12 * rng.uniform()) * sr);
        const double gain = 0.5 + 0.4 * rng.uniform();
        for (std::size_t i = 0; i < len && pos + i < n; ++i) {
            const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / len);
            env[pos + i] = gain * w;
        }
        pos += len + static_cast<std::size_t>((0.05 + 0.15 * rng.uniform()) * sr);
    }
    return env;
}

void add_floor(Rng& rng, std::vector<double>& x) {
    for (auto& v : x) {
        v += 1e-4 * rng.normal();
    }
}

} // namespace

AudioClip synthesize_tonal_clip(std::uint64_t seed, double f0, const SyntheticCorpusOptions& options) {
    const Layout l = layout(options);
    Rng rng(seed);
    AudioClip clip{std::vector<double>(l.total, 0.0), options.sample_rate};
    const auto env = burst_envelope(rng, l.body, options.sample_rate);
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    for (std::size_t i = 0; i < l.body; ++i) {
        const double t = static_cast<double>(i) / options.sample_rate;
        double s = 0.0;
        for (int h = 1; h <= 3; ++h) {
            s += std::sin(2.0 * std::numbers::pi * h * f0 * t + h * phase) / h;
        }
        clip.samples[l.lead + i] = 0.5 * env[i] * s + 0.01 * env[i] * rng.normal();
    }
    add_floor(rng, clip.samples);
    return clip;
}

AudioClip synthesize_noise_clip(std::uint64_t seed, const SyntheticCorpusOptions& options) {
    const Layout l = layout(options);
    Rng rng(seed);
    AudioClip clip{std::vector<double>(l.total, 0.0), options.sample_rate};
    const auto env = burst_envelope(rng, l.body, options.sample_rate);
    for (std::size_t i = 0; i < l.body; ++i) {
        clip.samples[l.lead + i] = 0.3 * env[i] * rng.normal();
    }
    add_floor(rng, clip.samples);
    for (auto& v : clip.samples) {
        v = std::clamp(v, -1.0, 1.0);
    }
    return clip;
}

Manifest write_synthetic_corpus(const std::filesystem::path& dir, const SyntheticCorpusOptions& options) {
    std::filesystem::create_directories(dir / "audio");
    Manifest manifest;
    manifest.base_dir = dir;
    for (std::size_t s = 0; s < options.subjects; ++s) {
        char subject[32];
        std::snprintf(subject, sizeof subject, "S%03zu", s);
        const bool tonal = s % 2 == 0;
        Rng subject_rng(derive_seed(options.seed, "synthetic-subject", {s}));
        const double f0 = 150.0 + 250.0 * subject_rng.uniform();
        for (std::size_t c = 0; c < options.clips_per_subject; ++c) {
            const std::uint64_t seed = derive_seed(options.seed, "synthetic-clip", {s, c});
            const AudioClip clip = tonal ? synthesize_tonal_clip(seed, f0 * (0.97 + 0.06 * subject_rng.uniform()), options)
                                         : synthesize_noise_clip(seed, options);
            SampleRecord r;
            r.sample_id = std::string(subject) + "_c" + std::to_string(c);
            r.subject_id = subject;
            r.session_id = "s" + std::to_string(c);
            r.label = tonal ? HealthLabel::Covid : HealthLabel::Healthy;
            r.modality = RecordingType::Cough;
            r.path = "audio/" + r.sample_id + ".wav";
            r.dataset = "synthetic";
            write_wav(dir / r.path, clip);
            manifest.records.push_back(std::move(r));
        }
    }
    write_manifest(dir / "manifest.csv", manifest);
    return manifest;
}

} // namespace respira
