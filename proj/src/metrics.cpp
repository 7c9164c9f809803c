#include "respira/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace respira {

namespace {

void check_sizes(std::size_t a, std::size_t b) {
    if (a != b) {
        throw std::invalid_argument("metric inputs differ in length (" + std::to_string(a) + " vs " +
                                    std::to_string(b) + ")");
    }
}

} // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
    check_sizes(scores.size(), labels.size());
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            ++j;
        }
        // Ranks i+1 .. j share their average.
        const double avg = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] > 0) {
                rank_sum += avg;
                ++n_pos;
            }
        }
        i = j;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw std::invalid_argument("AUC needs both classes");
    }
    const double np = static_cast<double>(n_pos);
    return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

Precision precision(std::span<const int> predictions, std::span<const int> labels) {
    check_sizes(predictions.size(), labels.size());
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] > 0) {
            (labels[i] > 0 ? tp : fp) += 1;
        }
    }
    if (tp + fp == 0) {
        return {1.0, true};
    }
    return {static_cast<double>(tp) / static_cast<double>(tp + fp), false};
}

double recall(std::span<const int> predictions, std::span<const int> labels) {
    check_sizes(predictions.size(), labels.size());
    std::size_t tp = 0, fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (labels[i] > 0) {
            (predictions[i] > 0 ? tp : fn) += 1;
        }
    }
    if (tp + fn == 0) {
        throw std::invalid_argument("recall needs at least one positive label");
    }
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

MetricSet compute_metrics(std::span<const double> scores, std::span<const int> predictions,
                          std::span<const int> labels) {
    MetricSet m;
    m.auc = auc(scores, labels);
    const auto p = precision(predictions, labels);
    m.precision = p.value;
    m.precision_degenerate = p.degenerate;
    m.recall = recall(predictions, labels);
    return m;
}

} // namespace respira
