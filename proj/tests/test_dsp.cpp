#include "respira/audio_io.hpp"
#include "respira/fft.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace respira;
using respira::test::sine;
using respira::test::TempDir;

namespace {

std::vector<fft::cplx> naive_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<fft::cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        fft::cplx acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double a = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
            acc += x[t] * fft::cplx(std::cos(a), std::sin(a));
        }
        out[k] = acc;
    }
    return out;
}

std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) {
        v = rng.normal();
    }
    return x;
}

} // namespace

TEST(Fft, RealPlanMatchesNaiveDft) {
    for (std::size_t n : {2u, 8u, 64u, 512u}) {
        const auto x = random_signal(n, n);
        const auto ref = naive_dft(x);
        fft::RealPlan plan(n);
        std::vector<fft::cplx> bins(n / 2 + 1);
        plan.forward(x, bins);
        for (std::size_t k = 0; k <= n / 2; ++k) {
            EXPECT_NEAR(std::abs(bins[k] - ref[k]), 0.0, 1e-9 * std::sqrt(static_cast<double>(n))) << n << " " << k;
        }
    }
}

TEST(Fft, BluesteinMatchesNaiveDft) {
    for (std::size_t n : {3u, 7u, 100u, 441u}) {
        const auto x = random_signal(n, 100 + n);
        const auto ref = naive_dft(x);
        const auto got = fft::dft(x);
        ASSERT_EQ(got.size(), n);
        for (std::size_t k = 0; k < n; ++k) {
            EXPECT_NEAR(std::abs(got[k] - ref[k]), 0.0, 1e-8 * static_cast<double>(n));
        }
    }
}

TEST(Fft, InverseRecoversInput) {
    const std::size_t n = 256;
    const auto x = random_signal(n, 4);
    std::vector<fft::cplx> buf(x.begin(), x.end());
    fft::Plan plan(n);
    plan.transform(buf);
    plan.transform(buf, true);
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(buf[i].real() / n, x[i], 1e-12);
    }
}

TEST(Stft, ParsevalPerFrame) {
    const auto clip = AudioClip{random_signal(8192, 21), 22050};
    const auto frames = frame_signal(clip, 2048, 512, true);
    const auto spec = stft(frames, 2048);
    const auto win = hann_window(2048);
    ASSERT_EQ(spec.n_bins, 1025u);
    for (std::size_t f = 0; f < frames.n_frames; ++f) {
        double time_energy = 0.0;
        const auto fr = frames.frame(f);
        for (std::size_t i = 0; i < 2048; ++i) {
            time_energy += (fr[i] * win[i]) * (fr[i] * win[i]);
        }
        double freq_energy = 0.0;
        for (std::size_t k = 0; k < spec.n_bins; ++k) {
            const double m2 = spec.at(k, f) * spec.at(k, f);
            freq_energy += (k == 0 || k == 1024) ? m2 : 2.0 * m2;
        }
        freq_energy /= 2048.0;
        EXPECT_NEAR(freq_energy / time_energy, 1.0, 1e-6);
    }
}

TEST(Stft, FrameGeometry) {
    EXPECT_EQ(frame_count(22050, 2048, 512, true), 1 + 22050 / 512);
    EXPECT_EQ(frame_count(22050, 2048, 512, false), 1 + (22050 - 2048) / 512);
    AudioClip clip{std::vector<double>(5000, 0.0), 22050};
    for (std::size_t i = 0; i < 5000; ++i) {
        clip.samples[i] = static_cast<double>(i);
    }
    const auto frames = frame_signal(clip, 1024, 256, true);
    // first frame is reflection padded around sample 0
    EXPECT_DOUBLE_EQ(frames.frame(0)[512], 0.0);
    EXPECT_DOUBLE_EQ(frames.frame(0)[511], 1.0);
    EXPECT_DOUBLE_EQ(frames.frame(1)[512], 256.0);
}

TEST(Stft, HannWindowIsPeriodic) {
    const auto w = hann_window(8);
    EXPECT_DOUBLE_EQ(w[0], 0.0);
    EXPECT_NEAR(w[4], 1.0, 1e-15);
    EXPECT_NEAR(w[2], 0.5, 1e-15);
}

TEST(Mel, SlaneyScale) {
    EXPECT_NEAR(hz_to_mel(1000.0), 15.0, 1e-12);
    EXPECT_NEAR(hz_to_mel(500.0), 7.5, 1e-12);
    for (double hz : {50.0, 700.0, 1000.0, 4000.0, 11025.0}) {
        EXPECT_NEAR(mel_to_hz(hz_to_mel(hz)), hz, 1e-9 * hz);
    }
}

TEST(Mel, FilterbankTrianglesAreAreaNormalised) {
    MelFilterbank bank(40, 2048, 22050, 0.0, 11025.0);
    EXPECT_EQ(bank.n_mels(), 40u);
    EXPECT_EQ(bank.n_bins(), 1025u);
    const double df = 22050.0 / 2048.0;
    for (std::size_t b = 0; b < 40; ++b) {
        const auto row = bank.dense_row(b);
        double area = 0.0;
        for (double w : row) {
            ASSERT_GE(w, 0.0);
            area += w * df;
        }
        // a triangle of height 2/(f_hi - f_lo) has area 1; discretisation adds a little slack
        EXPECT_NEAR(area, 1.0, 0.25) << b;
    }
}

TEST(Wav, Pcm16RoundTripWithinOneLsb) {
    TempDir dir("wav16");
    const auto clip = sine(440.0, 16000, 0.25, 0.8);
    write_wav(dir / "a.wav", clip);
    const auto back = load_wav(dir / "a.wav");
    ASSERT_EQ(back.sample_rate, 16000);
    ASSERT_EQ(back.samples.size(), clip.samples.size());
    for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        EXPECT_NEAR(back.samples[i], clip.samples[i], 1.0 / 32767.0);
    }
}

TEST(Wav, FloatStereoAveragesToMono) {
    TempDir dir("wavf");
    std::vector<std::vector<double>> ch = {{0.5, -0.25, 1.0}, {0.25, 0.25, 0.0}};
    write_wav(dir / "s.wav", ch, 8000, WavEncoding::Float32);
    const auto back = load_wav(dir / "s.wav");
    ASSERT_EQ(back.samples.size(), 3u);
    EXPECT_FLOAT_EQ(static_cast<float>(back.samples[0]), 0.375f);
    EXPECT_FLOAT_EQ(static_cast<float>(back.samples[1]), 0.0f);
    EXPECT_FLOAT_EQ(static_cast<float>(back.samples[2]), 0.5f);
}

TEST(Wav, RejectsGarbage) {
    TempDir dir("wavbad");
    std::ofstream(dir / "bad.wav") << "not a wav file at all";
    EXPECT_THROW(load_wav(dir / "bad.wav"), std::exception);
    EXPECT_THROW(load_wav(dir / "missing.wav"), std::exception);
}

TEST(Resample, LengthAndToneArePreserved) {
    const auto clip = sine(1000.0, 44100, 0.5);
    const auto down = resample(clip, 22050);
    EXPECT_EQ(down.sample_rate, 22050);
    EXPECT_EQ(down.samples.size(), 11025u);
    // compare against the analytic tone away from the edges
    for (std::size_t i = 200; i < down.samples.size() - 200; ++i) {
        const double expected = 0.5 * std::sin(2.0 * std::numbers::pi * 1000.0 * static_cast<double>(i) / 22050.0);
        ASSERT_NEAR(down.samples[i], expected, 2e-3) << i;
    }
    const auto up = resample(clip, 48000);
    EXPECT_EQ(up.samples.size(), 24000u);
}

TEST(Resample, RemovesContentAboveNewNyquist) {
    const auto clip = sine(15000.0, 44100, 0.5);
    const auto down = resample(clip, 22050);
    double peak = 0.0;
    for (std::size_t i = 200; i < down.samples.size() - 200; ++i) {
        peak = std::max(peak, std::abs(down.samples[i]));
    }
    EXPECT_LT(peak, 0.01);
}

TEST(Trim, DropsSilentEdges) {
    const int sr = 22050;
    AudioClip clip{std::vector<double>(3 * sr, 0.0), sr};
    const auto tone = sine(441.0, sr, 1.0, 0.5);
    std::copy(tone.samples.begin(), tone.samples.end(), clip.samples.begin() + sr);
    const auto t = trim_silence(clip, 60.0);
    EXPECT_FALSE(t.all_silent);
    EXPECT_NEAR(static_cast<double>(t.start), sr, 60.0);
    EXPECT_NEAR(static_cast<double>(t.end), 2.0 * sr, 60.0);
    EXPECT_EQ(t.clip.samples.size(), t.end - t.start);
}

TEST(Trim, AllSilentClipIsUnchanged) {
    AudioClip clip{std::vector<double>(4096, 0.0), 22050};
    const auto t = trim_silence(clip);
    EXPECT_TRUE(t.all_silent);
    EXPECT_EQ(t.clip.samples.size(), 4096u);
}

TEST(Clip, ValidationRejectsBadInput) {
    EXPECT_THROW(validate_clip(AudioClip{{}, 22050}), std::invalid_argument);
    EXPECT_THROW(validate_clip(AudioClip{{0.1}, 0}), std::invalid_argument);
    EXPECT_THROW(validate_clip(AudioClip{{std::nan("")}, 100}), std::invalid_argument);
    EXPECT_NO_THROW(validate_clip(AudioClip{{0.1}, 100}));
}
