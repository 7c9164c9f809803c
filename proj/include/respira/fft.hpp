#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace respira::fft {

using cplx = std::complex<double>;

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

/// Precomputed radix-2 transform of a fixed power-of-two size. Immutable once
/// built, so one plan may be shared by many threads.
class Plan {
public:
    explicit Plan(std::size_t n);

    std::size_t size() const { return n_; }

    /// In-place forward (inverse = false) or unnormalized inverse transform.
    void transform(std::span<cplx> data, bool inverse = false) const;

private:
    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<cplx> twiddles_;
};

/// Real-input FFT of a power-of-two length n via an n/2 complex transform.
/// Returns bins 0..n/2.
class RealPlan {
public:
    explicit RealPlan(std::size_t n);

    std::size_t size() const { return n_; }

    void forward(std::span<const double> input, std::span<cplx> bins) const;

private:
    std::size_t n_;
    Plan half_;
    std::vector<cplx> post_twiddles_;
};

/// DFT of arbitrary length (Bluestein chirp-z for non powers of two).
std::vector<cplx> dft(std::span<const double> input);

} // namespace respira::fft
