#pragma once

#include "respira/audio_io.hpp"
#include "respira/classifiers.hpp"
#include "respira/random.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>

namespace respira::test {

inline AudioClip sine(double freq, int sr, double seconds, double amp = 0.5, double phase = 0.0) {
    AudioClip c;
    c.sample_rate = sr;
    c.samples.resize(static_cast<std::size_t>(seconds * sr));
    for (std::size_t i = 0; i < c.samples.size(); ++i) {
        c.samples[i] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / sr + phase);
    }
    return c;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        Rng rng(std::hash<std::string>{}(tag) ^ reinterpret_cast<std::uintptr_t>(this));
        path_ = std::filesystem::temp_directory_path() / ("respira_" + tag + "_" + std::to_string(rng.next() % 1000000007));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Two Gaussian blobs centred at -sep and +sep on every axis.
inline void blobs(std::size_t n, Eigen::Index d, double sep, std::uint64_t seed, Matrix& x, Labels& y) {
    Rng rng(seed);
    x.resize(static_cast<Eigen::Index>(n), d);
    y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = i % 2 == 0 ? 1 : -1;
        for (Eigen::Index j = 0; j < d; ++j) {
            x(static_cast<Eigen::Index>(i), j) = y[i] * sep + rng.normal();
        }
    }
}

} // namespace respira::test

#include "respira/dataset.hpp"
#include "respira/feature_store.hpp"

namespace respira::test {

/// Manifest plus feature rows where covid samples are shifted along a few
/// random directions; no audio involved.
struct FeatureFixture {
    Manifest manifest;
    FeatureStore store;
};

inline FeatureFixture feature_fixture(std::size_t subjects, std::size_t per_subject, double shift,
                                      std::uint64_t seed, bool with_breath = false) {
    FeatureFixture f;
    Rng rng(seed);
    for (std::size_t s = 0; s < subjects; ++s) {
        const bool covid = s % 2 == 0;
        for (std::size_t k = 0; k < per_subject; ++k) {
            for (int mod = 0; mod < (with_breath ? 2 : 1); ++mod) {
                SampleRecord r;
                r.subject_id = "P" + std::to_string(s);
                r.sample_id = r.subject_id + (mod ? "_b" : "_c") + std::to_string(k);
                r.session_id = "k" + std::to_string(k);
                r.label = covid ? HealthLabel::Covid : HealthLabel::Healthy;
                r.modality = mod ? RecordingType::Breath : RecordingType::Cough;
                r.path = r.sample_id + ".wav";
                r.dataset = "fixture";
                std::vector<double> a(477), e(1024);
                for (std::size_t j = 0; j < a.size(); ++j) {
                    a[j] = rng.normal() + (covid && j % 7 == 0 ? shift : 0.0);
                }
                for (std::size_t j = 0; j < e.size(); ++j) {
                    e[j] = rng.normal() + (covid && j % 11 == 0 ? shift : 0.0);
                }
                f.store.set_acoustic(r.sample_id, std::move(a));
                f.store.set_embedding(r.sample_id, std::move(e));
                f.manifest.records.push_back(std::move(r));
            }
        }
    }
    return f;
}

} // namespace respira::test
