#pragma once

#include "respira/acoustic_features.hpp"
#include "respira/dataset.hpp"
#include "respira/deep_embeddings.hpp"
#include "respira/feature_store.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace respira {

inline constexpr int kAcousticSampleRate = 22050;

/// "stub:<seed>" or "sidecar:<dir>".
struct RunnerSpec {
    enum class Kind { Stub, Sidecar } kind = Kind::Stub;
    std::uint64_t seed = 0;
    std::filesystem::path sidecar_dir;

    static RunnerSpec parse(std::string_view text);
    std::string to_string() const;
};

struct ExtractionOptions {
    bool acoustic = true;
    bool embeddings = true;
    RunnerSpec runner;
    bool force = false;
    std::size_t jobs = 1;
    double trim_top_db = 60.0;
};

struct ExtractionFailure {
    std::string sample_id;
    std::string stage; // "acoustic" or "embedding"
    std::string message;
};

struct ExtractionReport {
    std::size_t acoustic_computed = 0;
    std::size_t embeddings_computed = 0;
    std::size_t reused = 0;
    std::vector<ExtractionFailure> failures;
};

/// Resample to 22.05 kHz, trim silence, compute the 477 acoustic features.
AcousticFeatureVector extract_acoustic(const AudioClip& clip, double trim_top_db = 60.0);

/// Resample to 48 kHz, trim silence, embed every window and aggregate.
AggregatedEmbedding extract_embedding(const AudioClip& clip, const EmbeddingRunner& runner,
                                      double trim_top_db = 60.0);

/// Fills missing rows of the store under out_dir (all rows with force) and
/// rewrites the tables in manifest order. Per-sample failures are collected,
/// not thrown. Tables are left untouched when nothing new was computed.
ExtractionReport extract_features(const Manifest& manifest, const std::filesystem::path& out_dir,
                                  const ExtractionOptions& options);

} // namespace respira
