#include "respira/acoustic_features.hpp"

#include "respira/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace respira {

// --- registry ---------------------------------------------------------------------

namespace {

std::string two_digit(std::size_t i) {
    return (i < 10 ? "0" : "") + std::to_string(i);
}

std::vector<std::string> build_series_names() {
    std::vector<std::string> names = {"rms", "centroid", "rolloff", "zcr"};
    for (const char* prefix : {"mfcc_", "dmfcc_", "ddmfcc_"}) {
        for (std::size_t i = 0; i < kMfccCount; ++i) {
            names.push_back(prefix + two_digit(i));
        }
    }
    return names;
}

std::vector<std::string> build_feature_names() {
    std::vector<std::string> names = {"duration", "onset", "tempo", "period"};
    for (const auto& series : descriptor_series_names()) {
        for (auto stat : SummaryStatistics::names()) {
            names.push_back(series + "_" + std::string(stat));
        }
    }
    return names;
}

} // namespace

const std::vector<std::string>& descriptor_series_names() {
    static const std::vector<std::string> kNames = build_series_names();
    return kNames;
}

const std::vector<std::string>& acoustic_feature_names() {
    static const std::vector<std::string> kNames = build_feature_names();
    return kNames;
}

std::size_t acoustic_feature_index(std::string_view name) {
    static const std::unordered_map<std::string, std::size_t> kIndex = [] {
        std::unordered_map<std::string, std::size_t> m;
        const auto& names = acoustic_feature_names();
        for (std::size_t i = 0; i < names.size(); ++i) {
            m.emplace(names[i], i);
        }
        return m;
    }();
    auto it = kIndex.find(std::string(name));
    if (it == kIndex.end()) {
        throw std::out_of_range("unknown acoustic feature: " + std::string(name));
    }
    return it->second;
}

std::vector<std::size_t> acoustic_indices_scalar_subset() {
    return {acoustic_feature_index("period"), acoustic_feature_index("tempo"), acoustic_feature_index("duration")};
}

std::vector<std::size_t> acoustic_indices_without_deltas() {
    std::vector<std::size_t> out;
    const auto& names = acoustic_feature_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i].rfind("dmfcc_", 0) != 0 && names[i].rfind("ddmfcc_", 0) != 0) {
            out.push_back(i);
        }
    }
    return out;
}

// --- scalars --------------------------------------------------------------------------

double duration(const AudioClip& clip) {
    if (clip.samples.empty() || clip.sample_rate <= 0) {
        throw std::invalid_argument("duration: empty clip");
    }
    return static_cast<double>(clip.samples.size()) / clip.sample_rate;
}

std::vector<double> onset_envelope(const MelSpectrogram& mel, double top_db) {
    std::vector<double> env(mel.n_frames, 0.0);
    if (mel.n_frames == 0 || mel.n_mels == 0) {
        return env;
    }
    const double peak = *std::max_element(mel.energies.begin(), mel.energies.end());
    if (!(peak > 0.0)) {
        return env;
    }
    const double floor = peak * std::pow(10.0, -top_db / 10.0);
    std::vector<double> prev(mel.n_mels), cur(mel.n_mels);
    auto to_db = [&](std::size_t f, std::vector<double>& out) {
        auto frame = mel.frame(f);
        for (std::size_t b = 0; b < mel.n_mels; ++b) {
            out[b] = 10.0 * std::log10(std::max(frame[b], floor));
        }
    };
    to_db(0, prev);
    for (std::size_t f = 1; f < mel.n_frames; ++f) {
        to_db(f, cur);
        double flux = 0.0;
        for (std::size_t b = 0; b < mel.n_mels; ++b) {
            flux += std::max(0.0, cur[b] - prev[b]);
        }
        env[f] = flux;
        std::swap(prev, cur);
    }
    return env;
}

std::vector<std::size_t> pick_onsets(std::span<const double> envelope, double frame_rate, const AcousticConfig& config) {
    std::vector<std::size_t> peaks;
    if (envelope.empty()) {
        return peaks;
    }
    const double env_max = *std::max_element(envelope.begin(), envelope.end());
    if (!(env_max > 0.0)) {
        return peaks;
    }
    const auto n = static_cast<long long>(envelope.size());
    const auto max_w = static_cast<long long>(std::lround(config.onset_max_window_s * frame_rate));
    const auto mean_w = static_cast<long long>(std::lround(config.onset_mean_window_s * frame_rate));
    const double delta = config.onset_delta * env_max;
    for (long long t = 0; t < n; ++t) {
        const double v = envelope[static_cast<std::size_t>(t)];
        if (!(v > 0.0)) {
            continue;
        }
        bool strict_max = true;
        for (long long j = std::max(0LL, t - max_w); j <= std::min(n - 1, t + max_w) && strict_max; ++j) {
            if (j != t && envelope[static_cast<std::size_t>(j)] >= v) {
                strict_max = false;
            }
        }
        if (!strict_max) {
            continue;
        }
        const long long a = std::max(0LL, t - mean_w);
        const long long b = std::min(n - 1, t + mean_w);
        double sum = 0.0;
        for (long long j = a; j <= b; ++j) {
            sum += envelope[static_cast<std::size_t>(j)];
        }
        const double local_mean = sum / static_cast<double>(b - a + 1);
        if (v > local_mean + delta) {
            peaks.push_back(static_cast<std::size_t>(t));
        }
    }
    return peaks;
}

namespace {

struct SpectralAnalysis {
    FrameSequence frames;
    Spectrogram spec;
    MelSpectrogram mel;
};

SpectralAnalysis analyse(const AudioClip& clip, const AnalysisConfig& cfg) {
    SpectralAnalysis a;
    a.frames = frame_signal(clip, cfg.frame_length, cfg.hop_length, cfg.center);
    a.spec = stft(a.frames, cfg.fft_size);
    a.mel = mel_spectrogram(a.spec, cfg.n_mels, 0.0, clip.sample_rate / 2.0);
    return a;
}

double frame_rate_of(const AudioClip& clip, const AnalysisConfig& cfg) {
    return static_cast<double>(clip.sample_rate) / static_cast<double>(cfg.hop_length);
}

} // namespace

std::size_t onset_count(const AudioClip& clip, const AcousticConfig& config) {
    validate_clip(clip);
    const auto a = analyse(clip, config.analysis);
    const auto env = onset_envelope(a.mel, config.onset_top_db);
    return pick_onsets(env, frame_rate_of(clip, config.analysis), config).size();
}

TempoEstimate estimate_tempo(std::span<const double> envelope, double frame_rate, const AcousticConfig& config) {
    TempoEstimate fallback{config.tempo_prior_bpm, true};
    const auto n = static_cast<long long>(envelope.size());
    if (n < 4 || !(frame_rate > 0.0)) {
        return fallback;
    }
    const double env_max = *std::max_element(envelope.begin(), envelope.end());
    if (!(env_max > 0.0)) {
        return fallback;
    }
    auto autocorr = [&](long long lag) {
        double acc = 0.0;
        for (long long t = 0; t + lag < n; ++t) {
            acc += envelope[static_cast<std::size_t>(t)] * envelope[static_cast<std::size_t>(t + lag)];
        }
        return acc;
    };
    auto weighted = [&](long long lag) {
        const double bpm = 60.0 * frame_rate / static_cast<double>(lag);
        const double z = std::log2(bpm / config.tempo_prior_bpm) / config.tempo_prior_octaves;
        return autocorr(lag) * std::exp(-0.5 * z * z);
    };
    const long long lag_min = std::max(1LL, static_cast<long long>(std::floor(60.0 * frame_rate / config.tempo_max_bpm)));
    const long long lag_max = std::min(n - 2, static_cast<long long>(std::ceil(60.0 * frame_rate / config.tempo_min_bpm)));
    if (lag_min > lag_max) {
        return fallback;
    }
    long long best = -1;
    double best_value = 0.0;
    for (long long lag = lag_min; lag <= lag_max; ++lag) {
        const double w = weighted(lag);
        if (w > best_value) {
            best_value = w;
            best = lag;
        }
    }
    if (best < 0) {
        return fallback;
    }
    double refined = static_cast<double>(best);
    if (best - 1 >= 1 && best + 1 <= n - 1) {
        const double left = weighted(best - 1);
        const double right = weighted(best + 1);
        const double denom = left - 2.0 * best_value + right;
        if (denom < 0.0) {
            refined += std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
        }
    }
    return {60.0 * frame_rate / refined, false};
}

TempoEstimate tempo(const AudioClip& clip, const AcousticConfig& config) {
    validate_clip(clip);
    const auto a = analyse(clip, config.analysis);
    const auto env = onset_envelope(a.mel, config.onset_top_db);
    return estimate_tempo(env, frame_rate_of(clip, config.analysis), config);
}

double dominant_period(const AudioClip& clip) {
    validate_clip(clip);
    const std::size_t n = clip.samples.size();
    if (n < 2) {
        return 0.0;
    }
    const auto spectrum = fft::dft(clip.samples);
    const std::size_t last = n / 2;
    std::vector<double> mags(last + 1);
    double overall = 0.0;
    for (std::size_t k = 0; k <= last; ++k) {
        mags[k] = std::abs(spectrum[k]);
        overall = std::max(overall, mags[k]);
    }
    double best = 0.0;
    for (std::size_t k = 1; k <= last; ++k) {
        best = std::max(best, mags[k]);
    }
    const double tol = 1e-9 * overall;
    std::size_t chosen = 1;
    for (std::size_t k = 1; k <= last; ++k) {
        if (mags[k] >= best - tol) {
            chosen = k;
            break;
        }
    }
    return static_cast<double>(chosen) * clip.sample_rate / static_cast<double>(n);
}

// --- frame descriptors ------------------------------------------------------------------

DescriptorSeries rms_energy_series(const Spectrogram& spec) {
    DescriptorSeries s{"rms", std::vector<double>(spec.n_frames, 0.0)};
    for (std::size_t f = 0; f < spec.n_frames; ++f) {
        double acc = 0.0;
        for (double m : spec.frame(f)) {
            acc += m * m;
        }
        s.values[f] = std::sqrt(acc / static_cast<double>(spec.n_bins));
    }
    return s;
}

DescriptorSeries spectral_centroid_series(const Spectrogram& spec) {
    DescriptorSeries s{"centroid", std::vector<double>(spec.n_frames, 0.0)};
    for (std::size_t f = 0; f < spec.n_frames; ++f) {
        auto mags = spec.frame(f);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < spec.n_bins; ++k) {
            num += spec.bin_frequencies[k] * mags[k];
            den += mags[k];
        }
        s.values[f] = den > 0.0 ? num / den : 0.0;
    }
    return s;
}

DescriptorSeries rolloff_series(const Spectrogram& spec, double fraction) {
    DescriptorSeries s{"rolloff", std::vector<double>(spec.n_frames, 0.0)};
    for (std::size_t f = 0; f < spec.n_frames; ++f) {
        auto mags = spec.frame(f);
        double total = 0.0;
        for (double m : mags) {
            total += m * m;
        }
        if (!(total > 0.0)) {
            continue;
        }
        const double target = fraction * total;
        double cumulative = 0.0;
        for (std::size_t k = 0; k < spec.n_bins; ++k) {
            cumulative += mags[k] * mags[k];
            if (cumulative >= target) {
                s.values[f] = spec.bin_frequencies[k];
                break;
            }
        }
    }
    return s;
}

DescriptorSeries zcr_series(const FrameSequence& frames) {
    DescriptorSeries s{"zcr", std::vector<double>(frames.n_frames, 0.0)};
    for (std::size_t f = 0; f < frames.n_frames; ++f) {
        auto x = frames.frame(f);
        std::size_t crossings = 0;
        for (std::size_t i = 1; i < x.size(); ++i) {
            if ((x[i - 1] >= 0.0) != (x[i] >= 0.0)) {
                ++crossings;
            }
        }
        s.values[f] = x.empty() ? 0.0 : static_cast<double>(crossings) / static_cast<double>(x.size());
    }
    return s;
}

MelSpectrogram power_to_db(const MelSpectrogram& mel, double floor) {
    MelSpectrogram out = mel;
    for (double& e : out.energies) {
        e = 10.0 * std::log10(std::max(e, floor));
    }
    return out;
}

std::vector<DescriptorSeries> mfcc_series(const MelSpectrogram& log_mel, std::size_t n_coeffs) {
    const std::size_t bands = log_mel.n_mels;
    if (bands == 0) {
        throw std::invalid_argument("mfcc_series: no mel bands");
    }
    n_coeffs = std::min(n_coeffs, bands);
    std::vector<double> basis(n_coeffs * bands);
    for (std::size_t k = 0; k < n_coeffs; ++k) {
        const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(bands));
        for (std::size_t b = 0; b < bands; ++b) {
            basis[k * bands + b] =
                scale * std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(b) + 0.5) /
                                 static_cast<double>(bands));
        }
    }
    std::vector<DescriptorSeries> out(n_coeffs);
    for (std::size_t k = 0; k < n_coeffs; ++k) {
        out[k].name = "mfcc_" + two_digit(k);
        out[k].values.assign(log_mel.n_frames, 0.0);
    }
    for (std::size_t f = 0; f < log_mel.n_frames; ++f) {
        auto x = log_mel.frame(f);
        for (std::size_t k = 0; k < n_coeffs; ++k) {
            double acc = 0.0;
            const double* row = basis.data() + k * bands;
            for (std::size_t b = 0; b < bands; ++b) {
                acc += row[b] * x[b];
            }
            out[k].values[f] = acc;
        }
    }
    return out;
}

namespace {

std::vector<double> regression_delta(const std::vector<double>& x, std::size_t width) {
    const auto n = static_cast<long long>(x.size());
    const auto half = static_cast<long long>(width / 2);
    double denom = 0.0;
    for (long long k = 1; k <= half; ++k) {
        denom += static_cast<double>(k * k);
    }
    denom *= 2.0;
    std::vector<double> d(x.size(), 0.0);
    if (half == 0 || n == 0) {
        return d;
    }
    auto at = [&](long long i) { return x[static_cast<std::size_t>(std::clamp(i, 0LL, n - 1))]; };
    for (long long t = 0; t < n; ++t) {
        double acc = 0.0;
        for (long long k = 1; k <= half; ++k) {
            acc += static_cast<double>(k) * (at(t + k) - at(t - k));
        }
        d[static_cast<std::size_t>(t)] = acc / denom;
    }
    return d;
}

} // namespace

std::vector<DescriptorSeries> delta(const std::vector<DescriptorSeries>& block, int order, std::size_t width) {
    if (order != 1 && order != 2) {
        throw std::invalid_argument("delta: order must be 1 or 2");
    }
    if (width < 3 || width % 2 == 0) {
        throw std::invalid_argument("delta: width must be odd and >= 3");
    }
    std::vector<DescriptorSeries> out;
    out.reserve(block.size());
    for (const auto& s : block) {
        std::vector<double> d = regression_delta(s.values, width);
        if (order == 2) {
            d = regression_delta(d, width);
        }
        out.push_back({(order == 1 ? "d" : "dd") + s.name, std::move(d)});
    }
    return out;
}

AcousticFeatureVector acoustic_feature_vector(const AudioClip& clip, const AcousticConfig& config) {
    validate_clip(clip);
    const auto a = analyse(clip, config.analysis);
    const double frame_rate = frame_rate_of(clip, config.analysis);
    const auto envelope = onset_envelope(a.mel, config.onset_top_db);

    AcousticFeatureVector v;
    v.values.reserve(kAcousticFeatureCount);
    v.values.push_back(duration(clip));
    v.values.push_back(static_cast<double>(pick_onsets(envelope, frame_rate, config).size()));
    v.values.push_back(estimate_tempo(envelope, frame_rate, config).bpm);
    v.values.push_back(dominant_period(clip));

    std::vector<DescriptorSeries> series;
    series.reserve(kDescriptorSeriesCount);
    series.push_back(rms_energy_series(a.spec));
    series.push_back(spectral_centroid_series(a.spec));
    series.push_back(rolloff_series(a.spec, config.rolloff_fraction));
    series.push_back(zcr_series(a.frames));
    auto mfcc = mfcc_series(power_to_db(a.mel, config.log_floor), kMfccCount);
    auto d1 = delta(mfcc, 1, config.delta_width);
    auto d2 = delta(mfcc, 2, config.delta_width);
    for (auto* block : {&mfcc, &d1, &d2}) {
        for (auto& s : *block) {
            series.push_back(std::move(s));
        }
    }
    for (const auto& s : series) {
        for (double stat : summarize(s).values()) {
            v.values.push_back(stat);
        }
    }
    if (v.values.size() != kAcousticFeatureCount) {
        throw std::logic_error("acoustic feature layout mismatch");
    }
    return v;
}

} // namespace respira
