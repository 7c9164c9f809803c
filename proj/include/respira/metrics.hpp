#pragma once

#include <span>

namespace respira {

/// Mann-Whitney statistic with average ranks; tied pairs count one half.
/// Labels are -1/+1; throws when only one class is present.
double auc(std::span<const double> scores, std::span<const int> labels);

struct Precision {
    double value = 1.0;
    bool degenerate = false; // no positive predictions; value is then 1.0
};

Precision precision(std::span<const int> predictions, std::span<const int> labels);

/// Throws when there are no positive labels.
double recall(std::span<const int> predictions, std::span<const int> labels);

struct MetricSet {
    double auc = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    bool precision_degenerate = false;
};

MetricSet compute_metrics(std::span<const double> scores, std::span<const int> predictions,
                          std::span<const int> labels);

} // namespace respira
