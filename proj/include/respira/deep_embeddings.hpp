#pragma once

#include "respira/audio_io.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace respira {

inline constexpr std::size_t kEmbeddingWidth = 512;
inline constexpr std::size_t kAggregatedEmbeddingWidth = 2 * kEmbeddingWidth;

/// One 512-d embedding per analysis window, row-major.
struct EmbeddingMatrix {
    std::string sample_id;
    std::size_t rows = 0;
    std::vector<double> values;
    double window_seconds = 1.0;
    double hop_seconds = 0.1;

    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * kEmbeddingWidth, kEmbeddingWidth};
    }
};

/// 512 per-dimension means followed by 512 population standard deviations.
struct AggregatedEmbedding {
    std::vector<double> values;
};

/// Maps one mel window (n_mels x frames energies) to 512 reals. Implementations
/// must be deterministic and safe to call concurrently.
class EmbeddingRunner {
public:
    virtual ~EmbeddingRunner() = default;
    virtual std::vector<double> run(const MelSpectrogram& window) const = 0;
};

/// Preprocessing of the embedding path. Mel frames use a 512-sample Hann
/// frame and 242-sample hop, zero-padded to a 2048-point FFT.
struct EmbeddingConfig {
    int sample_rate = 48000;
    std::size_t n_mels = 256;
    std::size_t frame_length = 512;
    std::size_t hop_length = 242;
    std::size_t fft_size = 2048;
    double window_seconds = 1.0;
    double hop_seconds = 0.1;
};

/// Windows at offsets 0, hop, 2*hop ... while the window fits; clips shorter
/// than one window count as one (zero-padded) window.
std::size_t embedding_window_count(std::size_t n_samples, const EmbeddingConfig& config = {});

/// Mel spectrogram of every window, in window order.
std::vector<MelSpectrogram> embedding_mel_windows(const AudioClip& clip, const EmbeddingConfig& config = {});

/// Runs the runner over every window of a clip already at config.sample_rate.
EmbeddingMatrix embed_windows(const AudioClip& clip, const EmbeddingRunner& runner,
                              const EmbeddingConfig& config = {}, std::string sample_id = {});

/// Throws on an empty matrix.
AggregatedEmbedding aggregate_embeddings(const EmbeddingMatrix& matrix);

// --- sidecar files ------------------------------------------------------------
//
// <sample_id>.l3emb:
//   "L3EMB1\n"
//   zero or more "# comment\n" lines
//   "rows=<n> cols=512 dtype=f32le\n"
//   n * 512 little-endian float32, row-major
//
// <sample_id>.l3emb.csv: one window per line, 512 comma-separated values.

inline constexpr const char* kSidecarExtension = ".l3emb";
inline constexpr const char* kSidecarCsvExtension = ".l3emb.csv";

/// Parses either sidecar flavour (chosen by extension). sample_id is the file
/// name with the sidecar extension removed.
EmbeddingMatrix load_precomputed(const std::filesystem::path& path);

/// Writes the binary flavour. Values are narrowed to float32.
void write_precomputed(const std::filesystem::path& path, const EmbeddingMatrix& matrix,
                       const std::vector<std::string>& comments = {});

/// Locates <dir>/<sample_id>.l3emb or .l3emb.csv; empty path if neither exists.
std::filesystem::path find_sidecar(const std::filesystem::path& dir, const std::string& sample_id);

/// Deterministic stand-in for the pretrained network: L2-normalise the
/// flattened window, apply a seeded sparse random projection to 512
/// dimensions, then max(0, x).
class StubRunner final : public EmbeddingRunner {
public:
    explicit StubRunner(std::uint64_t seed, std::size_t taps_per_output = 256);

    std::vector<double> run(const MelSpectrogram& window) const override;

    /// The linear projection alone, without normalisation or activation.
    std::vector<double> project(std::span<const double> flat) const;

    std::uint64_t seed() const { return seed_; }

private:
    struct Projection {
        std::vector<std::uint32_t> index; // 512 * taps
        std::vector<double> weight;       // 512 * taps
        std::size_t taps = 0;
    };
    std::shared_ptr<const Projection> projection_for(std::size_t input_size) const;

    std::uint64_t seed_;
    std::size_t taps_;
    mutable std::mutex mutex_;
    mutable std::map<std::size_t, std::shared_ptr<const Projection>> cache_;
};

} // namespace respira
