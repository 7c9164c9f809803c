#include "respira/audio_io.hpp"

#include "respira/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace respira {

void validate_clip(const AudioClip& clip) {
    if (clip.samples.empty()) {
        throw std::invalid_argument("audio clip is empty");
    }
    if (clip.sample_rate <= 0) {
        throw std::invalid_argument("audio clip has a non-positive sample rate");
    }
    for (double x : clip.samples) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument("audio clip contains non-finite samples");
        }
    }
}

// --- resampling --------------------------------------------------------------

namespace {

constexpr double kZeroCrossings = 32.0;
constexpr double kKaiserBeta = 8.6;
constexpr std::size_t kMaxPolyphaseTable = 4096;

double sinc(double x) {
    if (std::abs(x) < 1e-12) {
        return 1.0;
    }
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

struct SincKernel {
    double cutoff;     // fraction of the input Nyquist band kept
    double half_width; // in input samples
    double norm;

    SincKernel(double c)
        : cutoff(c), half_width(kZeroCrossings / c), norm(1.0 / std::cyl_bessel_i(0.0, kKaiserBeta)) {}

    double operator()(double x) const {
        const double r = x / half_width;
        if (r <= -1.0 || r >= 1.0) {
            return 0.0;
        }
        const double window = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - r * r)) * norm;
        return cutoff * sinc(cutoff * x) * window;
    }
};

} // namespace

AudioClip resample(const AudioClip& clip, int target_rate) {
    if (target_rate <= 0) {
        throw std::invalid_argument("resample: target rate must be positive");
    }
    if (clip.sample_rate <= 0) {
        throw std::invalid_argument("resample: source rate must be positive");
    }
    if (clip.sample_rate == target_rate) {
        return clip;
    }
    const long long g = std::gcd(static_cast<long long>(clip.sample_rate), static_cast<long long>(target_rate));
    const long long up = target_rate / g;
    const long long down = clip.sample_rate / g;
    const long long n_in = static_cast<long long>(clip.samples.size());
    const long long n_out = (n_in * up + down / 2) / down;

    const SincKernel kernel(std::min(1.0, static_cast<double>(up) / static_cast<double>(down)));
    const long long reach = static_cast<long long>(std::ceil(kernel.half_width));
    const long long taps = 2 * reach;

    // taps for phase p: coefficient i multiplies input base - reach + 1 + i
    std::vector<double> table;
    const bool use_table = static_cast<std::size_t>(up) <= kMaxPolyphaseTable;
    if (use_table) {
        table.resize(static_cast<std::size_t>(up * taps));
        for (long long p = 0; p < up; ++p) {
            const double frac = static_cast<double>(p) / static_cast<double>(up);
            for (long long i = 0; i < taps; ++i) {
                table[static_cast<std::size_t>(p * taps + i)] = kernel(frac + static_cast<double>(reach - 1 - i));
            }
        }
    }

    AudioClip out;
    out.sample_rate = target_rate;
    out.samples.assign(static_cast<std::size_t>(n_out), 0.0);
    for (long long n = 0; n < n_out; ++n) {
        const long long pos = n * down;
        const long long base = pos / up;
        const long long phase = pos % up;
        const double frac = static_cast<double>(phase) / static_cast<double>(up);
        const long long first = base - reach + 1;
        const long long lo = std::max(0LL, first);
        const long long hi = std::min(n_in - 1, base + reach);
        double acc = 0.0;
        for (long long j = lo; j <= hi; ++j) {
            const long long i = j - first;
            const double w = use_table ? table[static_cast<std::size_t>(phase * taps + i)]
                                       : kernel(frac + static_cast<double>(base - j));
            acc += w * clip.samples[static_cast<std::size_t>(j)];
        }
        out.samples[static_cast<std::size_t>(n)] = acc;
    }
    return out;
}

// --- silence trimming --------------------------------------------------------

TrimResult trim_silence(const AudioClip& clip, double top_db, std::size_t frame_length, std::size_t hop_length) {
    if (!(top_db > 0.0)) {
        throw std::invalid_argument("trim_silence: top_db must be positive");
    }
    if (frame_length == 0 || hop_length == 0) {
        throw std::invalid_argument("trim_silence: frame and hop must be positive");
    }
    TrimResult result;
    result.clip = clip;
    result.start = 0;
    result.end = clip.samples.size();
    const std::size_t n = clip.samples.size();
    if (n == 0) {
        result.all_silent = true;
        return result;
    }

    // centred frames with zero padding; frame i covers [i*hop - half, i*hop - half + frame)
    const long long half = static_cast<long long>(frame_length / 2);
    const std::size_t n_frames = 1 + n / hop_length;
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        prefix[i + 1] = prefix[i] + clip.samples[i] * clip.samples[i];
    }
    auto span_of = [&](std::size_t f) {
        const long long a = static_cast<long long>(f * hop_length) - half;
        const long long b = a + static_cast<long long>(frame_length);
        return std::pair<std::size_t, std::size_t>{
            static_cast<std::size_t>(std::clamp<long long>(a, 0, static_cast<long long>(n))),
            static_cast<std::size_t>(std::clamp<long long>(b, 0, static_cast<long long>(n)))};
    };
    std::vector<double> rms(n_frames);
    double peak = 0.0;
    for (std::size_t f = 0; f < n_frames; ++f) {
        auto [a, b] = span_of(f);
        const double energy = std::max(0.0, prefix[b] - prefix[a]);
        rms[f] = std::sqrt(energy / static_cast<double>(frame_length));
        peak = std::max(peak, rms[f]);
    }
    if (peak <= 0.0) {
        result.all_silent = true;
        return result;
    }
    const double threshold = peak * std::pow(10.0, -top_db / 20.0);
    std::size_t first = n_frames, last = 0;
    for (std::size_t f = 0; f < n_frames; ++f) {
        if (rms[f] >= threshold) {
            first = std::min(first, f);
            last = f;
        }
    }

    auto [a0, b0] = span_of(first);
    std::size_t start = a0;
    while (start < b0 && std::abs(clip.samples[start]) < threshold) {
        ++start;
    }
    auto [a1, b1] = span_of(last);
    std::size_t end = b1;
    while (end > a1 && std::abs(clip.samples[end - 1]) < threshold) {
        --end;
    }
    if (start >= end) {
        // cannot happen for a frame whose RMS reaches the threshold, kept for safety
        start = a0;
        end = b1;
    }
    result.start = start;
    result.end = end;
    result.clip.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(start),
                               clip.samples.begin() + static_cast<std::ptrdiff_t>(end));
    return result;
}

// --- framing -------------------------------------------------------------------

std::size_t frame_count(std::size_t length, std::size_t frame_length, std::size_t hop_length, bool center) {
    if (frame_length == 0 || hop_length == 0) {
        throw std::invalid_argument("frame and hop lengths must be >= 1");
    }
    const std::size_t padded = length + (center ? 2 * (frame_length / 2) : 0);
    if (padded < frame_length) {
        return 1;
    }
    return 1 + (padded - frame_length) / hop_length;
}

namespace {

std::size_t reflect_index(long long i, std::size_t n) {
    if (n == 1) {
        return 0;
    }
    const long long period = 2 * (static_cast<long long>(n) - 1);
    i %= period;
    if (i < 0) {
        i += period;
    }
    if (i >= static_cast<long long>(n)) {
        i = period - i;
    }
    return static_cast<std::size_t>(i);
}

} // namespace

FrameSequence frame_signal(const AudioClip& clip, std::size_t frame_length, std::size_t hop_length, bool center) {
    if (clip.samples.empty()) {
        throw std::invalid_argument("frame_signal: empty clip");
    }
    FrameSequence seq;
    seq.n_frames = frame_count(clip.samples.size(), frame_length, hop_length, center);
    seq.frame_length = frame_length;
    seq.hop_length = hop_length;
    seq.sample_rate = clip.sample_rate;
    seq.centered = center;
    seq.data.assign(seq.n_frames * frame_length, 0.0);

    const std::size_t n = clip.samples.size();
    const long long pad = center ? static_cast<long long>(frame_length / 2) : 0;
    for (std::size_t f = 0; f < seq.n_frames; ++f) {
        double* dst = seq.data.data() + f * frame_length;
        const long long origin = static_cast<long long>(f * hop_length) - pad;
        for (std::size_t k = 0; k < frame_length; ++k) {
            const long long idx = origin + static_cast<long long>(k);
            if (idx >= 0 && idx < static_cast<long long>(n)) {
                dst[k] = clip.samples[static_cast<std::size_t>(idx)];
            } else if (center) {
                dst[k] = clip.samples[reflect_index(idx, n)];
            }
        }
    }
    return seq;
}

std::vector<double> hann_window(std::size_t length) {
    std::vector<double> w(length, 1.0);
    if (length <= 1) {
        return w;
    }
    for (std::size_t i = 0; i < length; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(length));
    }
    return w;
}

Spectrogram stft(const FrameSequence& frames, std::size_t fft_size) {
    if (!fft::is_power_of_two(fft_size) || fft_size < 2) {
        throw std::invalid_argument("stft: fft_size must be a power of two");
    }
    if (fft_size < frames.frame_length) {
        throw std::invalid_argument("stft: fft_size must be >= frame_length");
    }
    Spectrogram spec;
    spec.fft_size = fft_size;
    spec.n_bins = fft_size / 2 + 1;
    spec.n_frames = frames.n_frames;
    spec.sample_rate = frames.sample_rate;
    spec.magnitudes.assign(spec.n_bins * spec.n_frames, 0.0);
    spec.bin_frequencies.resize(spec.n_bins);
    for (std::size_t k = 0; k < spec.n_bins; ++k) {
        spec.bin_frequencies[k] = static_cast<double>(k) * frames.sample_rate / static_cast<double>(fft_size);
    }
    spec.frame_times.resize(spec.n_frames);
    const double offset = frames.centered ? 0.0 : static_cast<double>(frames.frame_length / 2);
    for (std::size_t f = 0; f < spec.n_frames; ++f) {
        spec.frame_times[f] = frames.sample_rate > 0
                                  ? (static_cast<double>(f * frames.hop_length) + offset) / frames.sample_rate
                                  : 0.0;
    }

    const fft::RealPlan plan(fft_size);
    const std::vector<double> window = hann_window(frames.frame_length);
    const std::size_t lead = (fft_size - frames.frame_length) / 2;
    std::vector<double> buffer(fft_size, 0.0);
    std::vector<fft::cplx> bins(spec.n_bins);
    for (std::size_t f = 0; f < spec.n_frames; ++f) {
        auto frame = frames.frame(f);
        for (std::size_t k = 0; k < frames.frame_length; ++k) {
            buffer[lead + k] = frame[k] * window[k];
        }
        plan.forward(buffer, bins);
        double* dst = spec.magnitudes.data() + f * spec.n_bins;
        for (std::size_t k = 0; k < spec.n_bins; ++k) {
            dst[k] = std::abs(bins[k]);
        }
    }
    return spec;
}

// --- mel -----------------------------------------------------------------------

namespace {
constexpr double kMelBreakHz = 1000.0;
constexpr double kMelBreak = 15.0;
constexpr double kHzPerMel = 200.0 / 3.0;
const double kMelLogStep = std::log(6.4) / 27.0;
} // namespace

double hz_to_mel(double hz) {
    if (hz < kMelBreakHz) {
        return hz / kHzPerMel;
    }
    return kMelBreak + std::log(hz / kMelBreakHz) / kMelLogStep;
}

double mel_to_hz(double mel) {
    if (mel < kMelBreak) {
        return mel * kHzPerMel;
    }
    return kMelBreakHz * std::exp((mel - kMelBreak) * kMelLogStep);
}

MelFilterbank::MelFilterbank(std::size_t n_mels, std::size_t fft_size, int sample_rate, double fmin, double fmax)
    : n_bins_(fft_size / 2 + 1), fmin_(fmin), fmax_(fmax) {
    if (n_mels == 0) {
        throw std::invalid_argument("mel filterbank: n_mels must be >= 1");
    }
    if (sample_rate <= 0 || fft_size < 2) {
        throw std::invalid_argument("mel filterbank: invalid sample rate or FFT size");
    }
    if (!(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0 + 1e-9)) {
        throw std::invalid_argument("mel filterbank: need 0 <= fmin < fmax <= sr/2");
    }
    const double mel_lo = hz_to_mel(fmin);
    const double mel_hi = hz_to_mel(fmax);
    std::vector<double> edges(n_mels + 2);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / static_cast<double>(n_mels + 1));
    }
    rows_.resize(n_mels);
    for (std::size_t m = 0; m < n_mels; ++m) {
        const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
        const double area_norm = 2.0 / (hi - lo);
        std::vector<double> dense(n_bins_, 0.0);
        std::size_t first = n_bins_, last = 0;
        for (std::size_t k = 0; k < n_bins_; ++k) {
            const double f = static_cast<double>(k) * sample_rate / static_cast<double>(fft_size);
            const double rise = (f - lo) / (mid - lo);
            const double fall = (hi - f) / (hi - mid);
            const double w = std::max(0.0, std::min(rise, fall));
            if (w > 0.0) {
                dense[k] = w * area_norm;
                first = std::min(first, k);
                last = k;
            }
        }
        if (first <= last && first < n_bins_) {
            rows_[m].start = first;
            rows_[m].weights.assign(dense.begin() + static_cast<std::ptrdiff_t>(first),
                                    dense.begin() + static_cast<std::ptrdiff_t>(last + 1));
        }
    }
}

std::vector<double> MelFilterbank::dense_row(std::size_t band) const {
    std::vector<double> dense(n_bins_, 0.0);
    const Row& row = rows_.at(band);
    std::copy(row.weights.begin(), row.weights.end(), dense.begin() + static_cast<std::ptrdiff_t>(row.start));
    return dense;
}

void MelFilterbank::apply(std::span<const double> power, std::span<double> energies) const {
    if (power.size() != n_bins_ || energies.size() != rows_.size()) {
        throw std::invalid_argument("mel filterbank: size mismatch");
    }
    for (std::size_t m = 0; m < rows_.size(); ++m) {
        const Row& row = rows_[m];
        double acc = 0.0;
        for (std::size_t i = 0; i < row.weights.size(); ++i) {
            acc += row.weights[i] * power[row.start + i];
        }
        energies[m] = acc;
    }
}

MelSpectrogram mel_spectrogram(const Spectrogram& spec, const MelFilterbank& bank) {
    if (bank.n_bins() != spec.n_bins) {
        throw std::invalid_argument("mel_spectrogram: filterbank does not match spectrogram");
    }
    MelSpectrogram mel;
    mel.n_mels = bank.n_mels();
    mel.n_frames = spec.n_frames;
    mel.fmin = bank.fmin();
    mel.fmax = bank.fmax();
    mel.energies.assign(mel.n_mels * mel.n_frames, 0.0);
    std::vector<double> power(spec.n_bins);
    for (std::size_t f = 0; f < spec.n_frames; ++f) {
        auto mags = spec.frame(f);
        for (std::size_t k = 0; k < spec.n_bins; ++k) {
            power[k] = mags[k] * mags[k];
        }
        bank.apply(power, std::span<double>(mel.energies.data() + f * mel.n_mels, mel.n_mels));
    }
    return mel;
}

MelSpectrogram mel_spectrogram(const Spectrogram& spec, std::size_t n_mels, double fmin, double fmax) {
    const MelFilterbank bank(n_mels, spec.fft_size, spec.sample_rate, fmin, fmax);
    return mel_spectrogram(spec, bank);
}

} // namespace respira
