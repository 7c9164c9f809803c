#include "respira/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace respira {

namespace {

constexpr double kErrorFloor = 1e-10;

struct Stump {
    int feature = -1;
    double threshold = 0.0;
    double error = std::numeric_limits<double>::infinity();
};

DecisionTree stump_tree(const Matrix& x, const Labels& y, const std::vector<double>& w, const Stump& s) {
    DecisionTree t;
    TreeNode root;
    for (std::size_t i = 0; i < y.size(); ++i) {
        (y[i] > 0 ? root.positive : root.negative) += w[i];
    }
    root.n_samples = static_cast<double>(y.size());
    root.weighted_n_samples = root.negative + root.positive;
    if (s.feature < 0) {
        t.nodes.push_back(root);
        return t;
    }
    root.feature = s.feature;
    root.threshold = s.threshold;
    root.left = 1;
    root.right = 2;
    TreeNode left, right;
    for (std::size_t i = 0; i < y.size(); ++i) {
        TreeNode& side = x(static_cast<Eigen::Index>(i), s.feature) <= s.threshold ? left : right;
        (y[i] > 0 ? side.positive : side.negative) += w[i];
        side.n_samples += 1.0;
    }
    left.weighted_n_samples = left.negative + left.positive;
    right.weighted_n_samples = right.negative + right.positive;
    t.nodes = {root, left, right};
    return t;
}

} // namespace

void AbParams::validate() const {
    if (n_estimators < 1) {
        throw std::invalid_argument("AdaBoost: n_estimators must be positive");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("AdaBoost: learning_rate must be positive");
    }
}

TrainedModel train_adaboost(const Matrix& x, const Labels& y, const AbParams& p, std::uint64_t seed) {
    validate_training_data(x, y);
    p.validate();
    const std::size_t n = static_cast<std::size_t>(x.rows());
    const std::size_t d = static_cast<std::size_t>(x.cols());

    std::vector<std::vector<std::size_t>> order(d, std::vector<std::size_t>(n));
    for (std::size_t f = 0; f < d; ++f) {
        auto& o = order[f];
        std::iota(o.begin(), o.end(), 0);
        std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) {
            return x(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(f)) <
                   x(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(f));
        });
    }

    AdaBoostModel m;
    m.params = p;
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    for (int round = 0; round < p.n_estimators; ++round) {
        double total_neg = 0.0, total_pos = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            (y[i] > 0 ? total_pos : total_neg) += w[i];
        }
        const double total = total_neg + total_pos;
        Stump best;
        best.error = std::min(total_neg, total_pos) / total;
        for (std::size_t f = 0; f < d; ++f) {
            const auto& o = order[f];
            double lneg = 0.0, lpos = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                const std::size_t i = o[k];
                (y[i] > 0 ? lpos : lneg) += w[i];
                const double v = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f));
                const double next = x(static_cast<Eigen::Index>(o[k + 1]), static_cast<Eigen::Index>(f));
                if (v == next) {
                    continue;
                }
                // Each leaf predicts its weighted majority (ties negative).
                const double err = (std::min(lneg, lpos) + std::min(total_neg - lneg, total_pos - lpos)) / total;
                if (err < best.error - 1e-15) {
                    best.error = err;
                    best.feature = static_cast<int>(f);
                    best.threshold = 0.5 * (v + next);
                    if (!(best.threshold < next)) {
                        best.threshold = v;
                    }
                }
            }
        }
        // Recompute the error exactly as the stump will predict.
        DecisionTree tree = stump_tree(x, y, w, best);
        double err = 0.0;
        std::vector<int> h(n);
        const auto& root = tree.nodes.front();
        for (std::size_t i = 0; i < n; ++i) {
            if (root.is_leaf()) {
                h[i] = root.vote();
            } else {
                const bool go_left = x(static_cast<Eigen::Index>(i), root.feature) <= root.threshold;
                h[i] = tree.nodes[static_cast<std::size_t>(go_left ? root.left : root.right)].vote();
            }
            if (h[i] != y[i]) {
                err += w[i];
            }
        }
        err /= total;
        if (err >= 0.5) {
            break;
        }
        const bool perfect = err <= 0.0;
        const double eps = std::max(err, kErrorFloor);
        const double alpha = p.learning_rate * 0.5 * std::log((1.0 - eps) / eps);
        m.stumps.push_back(std::move(tree));
        m.alphas.push_back(alpha);
        m.errors.push_back(err);
        if (perfect) {
            break;
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] *= std::exp(-alpha * y[i] * h[i]);
            norm += w[i];
        }
        for (auto& wi : w) {
            wi /= norm;
        }
    }

    TrainedModel tm;
    tm.model = std::move(m);
    tm.n_features = d;
    tm.seed = seed;
    return tm;
}

TrainedModel adaboost_prefix(const TrainedModel& boosted, int n_estimators) {
    const auto& a = std::get<AdaBoostModel>(boosted.model);
    if (n_estimators < 1) {
        throw std::invalid_argument("adaboost_prefix: n_estimators must be positive");
    }
    const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(n_estimators), a.stumps.size());
    AdaBoostModel m;
    m.params = a.params;
    m.params.n_estimators = n_estimators;
    m.stumps.assign(a.stumps.begin(), a.stumps.begin() + static_cast<std::ptrdiff_t>(keep));
    m.alphas.assign(a.alphas.begin(), a.alphas.begin() + static_cast<std::ptrdiff_t>(keep));
    m.errors.assign(a.errors.begin(), a.errors.begin() + static_cast<std::ptrdiff_t>(keep));
    TrainedModel tm = boosted;
    tm.model = std::move(m);
    return tm;
}

} // namespace respira
