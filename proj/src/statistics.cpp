#include "respira/acoustic_features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace respira {

const std::array<std::string_view, SummaryStatistics::kCount>& SummaryStatistics::names() {
    static const std::array<std::string_view, kCount> kNames = {
        "mean", "median", "rms", "max", "min", "q1", "q3", "iqr", "std", "skewness", "kurtosis"};
    return kNames;
}

std::array<double, SummaryStatistics::kCount> SummaryStatistics::values() const {
    return {mean, median, rms, max, min, q1, q3, iqr, std, skewness, kurtosis};
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace

SummaryStatistics summarize(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("summarize: empty series");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(values.size());

    SummaryStatistics s;
    s.min = sorted.front();
    s.max = sorted.back();
    s.median = quantile_sorted(sorted, 0.5);
    s.q1 = quantile_sorted(sorted, 0.25);
    s.q3 = quantile_sorted(sorted, 0.75);
    s.iqr = s.q3 - s.q1;

    double sum_sq = 0.0;
    for (double v : values) {
        sum_sq += v * v;
    }
    s.rms = std::sqrt(sum_sq / n);

    if (s.min == s.max) {
        s.mean = s.min;
        return s;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.std = std::sqrt(m2);
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return s;
}

} // namespace respira
