#pragma once

#include "respira/audio_io.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace respira {

/// Per-frame descriptor time series.
struct DescriptorSeries {
    std::string name;
    std::vector<double> values;
};

/// The eleven summary statistics computed for every descriptor series.
struct SummaryStatistics {
    double mean = 0.0;
    double median = 0.0;
    double rms = 0.0;
    double max = 0.0;
    double min = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    double std = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;

    static constexpr std::size_t kCount = 11;
    static const std::array<std::string_view, kCount>& names();
    std::array<double, kCount> values() const;
};

/// Population moments, linearly interpolated quartiles, biased skewness
/// (m3/m2^1.5) and excess kurtosis (m4/m2^2 - 3). A constant series reports
/// std = skewness = kurtosis = 0. Throws on an empty series.
SummaryStatistics summarize(std::span<const double> values);
inline SummaryStatistics summarize(const DescriptorSeries& series) { return summarize(series.values); }

inline constexpr std::size_t kAcousticScalarCount = 4;
inline constexpr std::size_t kMfccCount = 13;
inline constexpr std::size_t kDescriptorSeriesCount = 4 + 3 * kMfccCount;
inline constexpr std::size_t kAcousticFeatureCount =
    kAcousticScalarCount + kDescriptorSeriesCount * SummaryStatistics::kCount; // 477

/// Ordered feature registry: duration, onset, tempo, period, then
/// "<series>_<stat>" for rms, centroid, rolloff, zcr, mfcc_00..12,
/// dmfcc_00..12, ddmfcc_00..12.
const std::vector<std::string>& acoustic_feature_names();
std::size_t acoustic_feature_index(std::string_view name);
const std::vector<std::string>& descriptor_series_names();

/// Registry indices of {period, tempo, duration}.
std::vector<std::size_t> acoustic_indices_scalar_subset();
/// Registry indices of every feature except the delta and delta-delta MFCC blocks.
std::vector<std::size_t> acoustic_indices_without_deltas();

struct AcousticFeatureVector {
    std::vector<double> values;

    double operator[](std::string_view name) const { return values.at(acoustic_feature_index(name)); }
};

struct AcousticConfig {
    AnalysisConfig analysis;
    double rolloff_fraction = 0.85;
    std::size_t delta_width = 9;
    double log_floor = 1e-10;
    // onset peak picking
    double onset_top_db = 80.0;
    double onset_delta = 0.07;
    double onset_mean_window_s = 0.3;
    double onset_max_window_s = 0.05;
    // tempo
    double tempo_prior_bpm = 120.0;
    double tempo_prior_octaves = 1.0;
    double tempo_min_bpm = 30.0;
    double tempo_max_bpm = 300.0;
};

// --- segment-level scalars ------------------------------------------------------

/// Length in seconds; throws on an empty clip.
double duration(const AudioClip& clip);

/// Half-wave rectified first difference of the dB mel energies, summed over
/// bands. Levels are floored at onset_top_db below the spectrogram maximum so
/// the envelope is invariant to global gain.
std::vector<double> onset_envelope(const MelSpectrogram& mel, double top_db = 80.0);

/// Frame indices of picked onset peaks.
std::vector<std::size_t> pick_onsets(std::span<const double> envelope, double frame_rate,
                                     const AcousticConfig& config = {});

std::size_t onset_count(const AudioClip& clip, const AcousticConfig& config = {});

struct TempoEstimate {
    double bpm = 120.0;
    bool degenerate = false; // flat envelope, prior centre returned
};

/// Autocorrelation of the onset envelope weighted by a log-normal prior on
/// BPM, peak refined by parabolic interpolation.
TempoEstimate estimate_tempo(std::span<const double> envelope, double frame_rate, const AcousticConfig& config = {});
TempoEstimate tempo(const AudioClip& clip, const AcousticConfig& config = {});

/// Frequency (Hz) of the largest full-signal DFT magnitude, DC excluded.
/// Near-ties (within 1e-9 of the largest magnitude) go to the lowest bin.
double dominant_period(const AudioClip& clip);

// --- frame-level descriptors ------------------------------------------------------

DescriptorSeries rms_energy_series(const Spectrogram& spec);
DescriptorSeries spectral_centroid_series(const Spectrogram& spec);
DescriptorSeries rolloff_series(const Spectrogram& spec, double fraction = 0.85);
DescriptorSeries zcr_series(const FrameSequence& frames);

/// 10*log10(max(energy, floor)) per band and frame.
MelSpectrogram power_to_db(const MelSpectrogram& mel, double floor = 1e-10);

/// First n_coeffs orthonormal DCT-II coefficients of each log-mel frame.
std::vector<DescriptorSeries> mfcc_series(const MelSpectrogram& log_mel, std::size_t n_coeffs = kMfccCount);

/// Regression delta over `width` frames with edge replication; order 2 applies
/// the filter twice.
std::vector<DescriptorSeries> delta(const std::vector<DescriptorSeries>& block, int order, std::size_t width = 9);

/// Full 477-value vector for a resampled, silence-trimmed clip.
AcousticFeatureVector acoustic_feature_vector(const AudioClip& clip, const AcousticConfig& config = {});

} // namespace respira
