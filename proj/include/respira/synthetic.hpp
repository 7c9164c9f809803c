#pragma once

#include "respira/audio_io.hpp"
#include "respira/dataset.hpp"

#include <cstdint>
#include <filesystem>

namespace respira {

/// Two-class toy corpus: covid subjects produce tonal bursts around a
/// per-subject pitch, healthy subjects produce broadband noise bursts. Every
/// clip is padded with near-silence on both ends.
struct SyntheticCorpusOptions {
    std::size_t subjects = 40;
    std::size_t clips_per_subject = 3;
    int sample_rate = 44100;
    double clip_seconds = 1.5;
    double silence_seconds = 0.25;
    std::uint64_t seed = 0;
};

AudioClip synthesize_tonal_clip(std::uint64_t seed, double f0, const SyntheticCorpusOptions& options);
AudioClip synthesize_noise_clip(std::uint64_t seed, const SyntheticCorpusOptions& options);

/// Writes <dir>/audio/*.wav and <dir>/manifest.csv (relative paths) and
/// returns the manifest. Subjects alternate between the two classes.
Manifest write_synthetic_corpus(const std::filesystem::path& dir, const SyntheticCorpusOptions& options = {});

} // namespace respira
