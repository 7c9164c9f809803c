#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace respira {

/// Mono PCM waveform, amplitudes nominally in [-1, 1].
struct AudioClip {
    std::vector<double> samples;
    int sample_rate = 0;

    double duration_seconds() const {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

/// Throws std::invalid_argument unless the clip is non-empty, has a positive
/// rate and finite samples.
void validate_clip(const AudioClip& clip);

/// Row-major n_frames x frame_length matrix of analysis frames.
struct FrameSequence {
    std::vector<double> data;
    std::size_t n_frames = 0;
    std::size_t frame_length = 0;
    std::size_t hop_length = 0;
    int sample_rate = 0;
    bool centered = false;

    std::span<const double> frame(std::size_t i) const {
        return {data.data() + i * frame_length, frame_length};
    }
};

/// Magnitude spectrogram stored frame-major: value(bin, frame) lives at
/// frame * n_bins + bin.
struct Spectrogram {
    std::vector<double> magnitudes;
    std::size_t n_bins = 0;
    std::size_t n_frames = 0;
    std::size_t fft_size = 0;
    int sample_rate = 0;
    std::vector<double> bin_frequencies;
    std::vector<double> frame_times;

    double at(std::size_t bin, std::size_t frame) const { return magnitudes[frame * n_bins + bin]; }
    std::span<const double> frame(std::size_t i) const {
        return {magnitudes.data() + i * n_bins, n_bins};
    }
};

/// Mel band energies, frame-major like Spectrogram.
struct MelSpectrogram {
    std::vector<double> energies;
    std::size_t n_mels = 0;
    std::size_t n_frames = 0;
    double fmin = 0.0;
    double fmax = 0.0;

    double at(std::size_t band, std::size_t frame) const { return energies[frame * n_mels + band]; }
    std::span<const double> frame(std::size_t i) const {
        return {energies.data() + i * n_mels, n_mels};
    }
};

/// Analysis parameters shared by the feature extractors.
struct AnalysisConfig {
    std::size_t frame_length = 2048;
    std::size_t hop_length = 512;
    std::size_t fft_size = 2048;
    bool center = true;
    std::size_t n_mels = 128;
    double trim_top_db = 60.0;
};

// --- WAV -------------------------------------------------------------------

enum class WavEncoding { Pcm8, Pcm16, Pcm24, Pcm32, Float32 };

/// Reads RIFF/WAVE PCM (8/16/24/32-bit integer or 32-bit float, including
/// WAVE_FORMAT_EXTENSIBLE). Channels are averaged to mono.
AudioClip load_wav(const std::filesystem::path& path);

/// Writes interleaved channels (channels.size() >= 1, equal lengths).
void write_wav(const std::filesystem::path& path, std::span<const std::vector<double>> channels,
               int sample_rate, WavEncoding encoding = WavEncoding::Pcm16);

void write_wav(const std::filesystem::path& path, const AudioClip& clip,
               WavEncoding encoding = WavEncoding::Pcm16);

// --- signal transforms ------------------------------------------------------

/// Band-limited (Kaiser-windowed sinc, polyphase) rational resampling.
/// Output length is round(len * target / source).
AudioClip resample(const AudioClip& clip, int target_rate);

struct TrimResult {
    AudioClip clip;
    std::size_t start = 0; // first kept sample in the source clip
    std::size_t end = 0;   // one past the last kept sample
    bool all_silent = false;
};

/// Drops leading and trailing regions whose frame RMS is more than `top_db`
/// below the loudest frame. Boundaries are refined to the first/last sample
/// inside the boundary frames that reaches the threshold amplitude. An
/// all-silent clip is returned unchanged with all_silent set.
TrimResult trim_silence(const AudioClip& clip, double top_db = 60.0,
                        std::size_t frame_length = 2048, std::size_t hop_length = 512);

/// Number of frames produced by frame_signal for the given geometry.
std::size_t frame_count(std::size_t length, std::size_t frame_length, std::size_t hop_length,
                        bool center);

/// Slices the clip into frames. With centering the signal is reflection-padded
/// by frame_length/2 on both ends.
FrameSequence frame_signal(const AudioClip& clip, std::size_t frame_length, std::size_t hop_length,
                           bool center = true);

/// Periodic Hann window.
std::vector<double> hann_window(std::size_t length);

/// Hann-windowed magnitude spectrum of every frame. fft_size must be a power
/// of two >= frame_length; shorter frames are centred in the FFT buffer.
Spectrogram stft(const FrameSequence& frames, std::size_t fft_size);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Slaney-style triangular filterbank with area normalisation, stored sparsely.
class MelFilterbank {
public:
    MelFilterbank(std::size_t n_mels, std::size_t fft_size, int sample_rate, double fmin, double fmax);

    std::size_t n_mels() const { return rows_.size(); }
    std::size_t n_bins() const { return n_bins_; }
    double fmin() const { return fmin_; }
    double fmax() const { return fmax_; }

    /// Dense row of the filterbank (weight per FFT bin).
    std::vector<double> dense_row(std::size_t band) const;
    std::size_t row_start(std::size_t band) const { return rows_[band].start; }
    std::size_t row_size(std::size_t band) const { return rows_[band].weights.size(); }

    /// energies[band] = sum_bin w[band][bin] * power[bin]
    void apply(std::span<const double> power, std::span<double> energies) const;

private:
    struct Row {
        std::size_t start = 0;
        std::vector<double> weights;
    };
    std::vector<Row> rows_;
    std::size_t n_bins_ = 0;
    double fmin_ = 0.0;
    double fmax_ = 0.0;
};

/// Mel energies of the power spectrogram (magnitude squared).
MelSpectrogram mel_spectrogram(const Spectrogram& spec, std::size_t n_mels, double fmin, double fmax);
MelSpectrogram mel_spectrogram(const Spectrogram& spec, const MelFilterbank& bank);

} // namespace respira
