#include "respira/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace respira::fft {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) {
        p <<= 1;
    }
    return p;
}

Plan::Plan(std::size_t n) : n_(n), bitrev_(n), twiddles_(n / 2) {
    if (!is_power_of_two(n)) {
        throw std::invalid_argument("FFT size must be a power of two");
    }
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) {
        ++bits;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b) {
            if (i & (std::size_t{1} << b)) {
                r |= std::size_t{1} << (bits - 1 - b);
            }
        }
        bitrev_[i] = r;
    }
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        twiddles_[k] = cplx(std::cos(angle), std::sin(angle));
    }
}

void Plan::transform(std::span<cplx> data, bool inverse) const {
    if (data.size() != n_) {
        throw std::invalid_argument("FFT buffer size mismatch");
    }
    for (std::size_t i = 0; i < n_; ++i) {
        if (i < bitrev_[i]) {
            std::swap(data[i], data[bitrev_[i]]);
        }
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n_ / len;
        for (std::size_t start = 0; start < n_; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                cplx w = twiddles_[j * stride];
                if (inverse) {
                    w = std::conj(w);
                }
                const cplx u = data[start + j];
                const cplx v = data[start + j + half] * w;
                data[start + j] = u + v;
                data[start + j + half] = u - v;
            }
        }
    }
}

RealPlan::RealPlan(std::size_t n) : n_(n), half_(n >= 2 ? n / 2 : 1), post_twiddles_(n / 2 + 1) {
    if (!is_power_of_two(n) || n < 2) {
        throw std::invalid_argument("real FFT size must be a power of two >= 2");
    }
    for (std::size_t k = 0; k <= n / 2; ++k) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        post_twiddles_[k] = cplx(std::cos(angle), std::sin(angle));
    }
}

void RealPlan::forward(std::span<const double> input, std::span<cplx> bins) const {
    if (input.size() != n_ || bins.size() != n_ / 2 + 1) {
        throw std::invalid_argument("real FFT buffer size mismatch");
    }
    const std::size_t m = n_ / 2;
    std::vector<cplx> z(m);
    for (std::size_t i = 0; i < m; ++i) {
        z[i] = cplx(input[2 * i], input[2 * i + 1]);
    }
    half_.transform(z);
    // split the packed transform into even/odd halves
    for (std::size_t k = 0; k <= m; ++k) {
        const cplx zk = z[k % m];
        const cplx zc = std::conj(z[(m - k) % m]);
        const cplx even = 0.5 * (zk + zc);
        const cplx odd = cplx(0.0, -0.5) * (zk - zc);
        bins[k] = even + post_twiddles_[k] * odd;
    }
}

std::vector<cplx> dft(std::span<const double> input) {
    const std::size_t n = input.size();
    std::vector<cplx> out(n);
    if (n == 0) {
        return out;
    }
    if (is_power_of_two(n)) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = input[i];
        }
        Plan(n).transform(out);
        return out;
    }
    // Bluestein: X_k = conj(w_k) * sum_j (x_j conj(w_j)) w_{k-j}, w_j = exp(i pi j^2 / n)
    std::vector<cplx> chirp(n);
    for (std::size_t j = 0; j < n; ++j) {
        // j^2 mod 2n keeps the angle argument small for long signals
        const unsigned long long jj = (static_cast<unsigned long long>(j) * j) % (2ULL * n);
        const double angle = std::numbers::pi * static_cast<double>(jj) / static_cast<double>(n);
        chirp[j] = cplx(std::cos(angle), std::sin(angle));
    }
    const std::size_t m = next_power_of_two(2 * n - 1);
    const Plan plan(m);
    std::vector<cplx> a(m), b(m);
    for (std::size_t j = 0; j < n; ++j) {
        a[j] = input[j] * std::conj(chirp[j]);
    }
    b[0] = chirp[0];
    for (std::size_t j = 1; j < n; ++j) {
        b[j] = chirp[j];
        b[m - j] = chirp[j];
    }
    plan.transform(a);
    plan.transform(b);
    for (std::size_t i = 0; i < m; ++i) {
        a[i] *= b[i];
    }
    plan.transform(a, true);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = std::conj(chirp[k]) * a[k] * scale;
    }
    return out;
}

} // namespace respira::fft
