#include "respira/classifiers.hpp"
#include "respira/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace respira {

namespace {

double impurity(SplitCriterion c, double neg, double pos) {
    const double n = neg + pos;
    if (n <= 0.0) {
        return 0.0;
    }
    const double pn = neg / n, pp = pos / n;
    if (c == SplitCriterion::Gini) {
        return 1.0 - pn * pn - pp * pp;
    }
    double h = 0.0;
    if (pn > 0.0) {
        h -= pn * std::log2(pn);
    }
    if (pp > 0.0) {
        h -= pp * std::log2(pp);
    }
    return h;
}

struct Pending {
    std::vector<std::size_t> rows;
    int node = 0;
    int depth = 0;
    std::uint64_t seed = 0;
};

} // namespace

void RfParams::validate() const {
    if (n_estimators < 1 || min_samples_split < 2 || max_depth < 1) {
        throw std::invalid_argument("RF: n_estimators >= 1, min_samples_split >= 2 and max_depth >= 1 required");
    }
}

const TreeNode& DecisionTree::node_for(const double* x, int max_depth, int min_samples_split) const {
    std::size_t i = 0;
    for (int depth = 0; !nodes[i].is_leaf() && depth < max_depth && nodes[i].n_samples >= min_samples_split; ++depth) {
        i = static_cast<std::size_t>(x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right);
    }
    return nodes[i];
}

const TreeNode& DecisionTree::leaf_for(const double* x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        i = static_cast<std::size_t>(x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right);
    }
    return nodes[i];
}

DecisionTree build_tree(const Matrix& x, const Labels& y, const std::vector<std::size_t>& rows, const RfParams& p,
                        std::size_t max_features, std::uint64_t seed) {
    const std::size_t d = static_cast<std::size_t>(x.cols());
    max_features = std::clamp<std::size_t>(max_features, 1, d);
    DecisionTree tree;
    std::vector<Pending> stack;
    tree.nodes.emplace_back();
    stack.push_back({rows, 0, 0, seed});

    std::vector<std::size_t> features(d);
    std::vector<std::pair<double, int>> column;
    while (!stack.empty()) {
        Pending job = std::move(stack.back());
        stack.pop_back();
        double neg = 0.0, pos = 0.0;
        for (auto r : job.rows) {
            (y[r] > 0 ? pos : neg) += 1.0;
        }
        {
            TreeNode& node = tree.nodes[static_cast<std::size_t>(job.node)];
            node.negative = neg;
            node.positive = pos;
            node.n_samples = node.weighted_n_samples = neg + pos;
            node.impurity = impurity(p.criterion, neg, pos);
        }
        const double parent_imp = tree.nodes[static_cast<std::size_t>(job.node)].impurity;
        if (job.depth >= p.max_depth || static_cast<int>(job.rows.size()) < p.min_samples_split || neg == 0.0 ||
            pos == 0.0) {
            continue;
        }

        // Each node draws from its own stream, so limits only prune the tree.
        Rng rng(job.seed);
        std::iota(features.begin(), features.end(), 0);
        int best_feature = -1;
        double best_threshold = 0.0, best_gain = -std::numeric_limits<double>::infinity();
        std::size_t visited = 0, informative = 0;
        const double n = neg + pos;
        while (informative < max_features && visited < d) {
            const std::size_t pick = visited + rng.index(d - visited);
            std::swap(features[visited], features[pick]);
            const std::size_t f = features[visited++];
            column.clear();
            for (auto r : job.rows) {
                column.emplace_back(x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)), y[r]);
            }
            std::sort(column.begin(), column.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (column.front().first == column.back().first) {
                continue; // constant here; does not count toward max_features
            }
            ++informative;
            double lneg = 0.0, lpos = 0.0;
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                (column[i].second > 0 ? lpos : lneg) += 1.0;
                if (column[i].first == column[i + 1].first) {
                    continue;
                }
                const double nl = lneg + lpos, nr = n - nl;
                const double child = (nl * impurity(p.criterion, lneg, lpos) +
                                      nr * impurity(p.criterion, neg - lneg, pos - lpos)) /
                                     n;
                const double gain = parent_imp - child;
                if (gain > best_gain + 1e-12) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (column[i].first + column[i + 1].first);
                    // Midpoints of adjacent doubles can round onto the right value.
                    if (!(best_threshold < column[i + 1].first)) {
                        best_threshold = column[i].first;
                    }
                }
            }
        }
        if (best_feature < 0) {
            continue;
        }
        std::vector<std::size_t> left, right;
        for (auto r : job.rows) {
            (x(static_cast<Eigen::Index>(r), best_feature) <= best_threshold ? left : right).push_back(r);
        }
        const int li = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        TreeNode& node = tree.nodes[static_cast<std::size_t>(job.node)];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = li;
        node.right = li + 1;
        // Right first so the left subtree is expanded first.
        stack.push_back({std::move(right), li + 1, job.depth + 1, derive_seed(job.seed, "right")});
        stack.push_back({std::move(left), li, job.depth + 1, derive_seed(job.seed, "left")});
    }
    return tree;
}

TrainedModel train_rf(const Matrix& x, const Labels& y, const RfParams& p, std::uint64_t seed) {
    validate_training_data(x, y);
    p.validate();
    const std::size_t n = static_cast<std::size_t>(x.rows());
    const std::size_t max_features =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(x.cols())))));
    ForestModel m;
    m.params = p;
    m.trees.reserve(static_cast<std::size_t>(p.n_estimators));
    std::vector<std::size_t> rows(n);
    for (int t = 0; t < p.n_estimators; ++t) {
        const std::uint64_t tree_seed = derive_seed(seed, "rf-tree", {static_cast<std::uint64_t>(t)});
        Rng rng(derive_seed(tree_seed, "bootstrap"));
        for (auto& r : rows) {
            r = rng.index(n);
        }
        std::sort(rows.begin(), rows.end());
        m.trees.push_back(build_tree(x, y, rows, p, max_features, derive_seed(tree_seed, "splits")));
    }
    TrainedModel tm;
    tm.model = std::move(m);
    tm.n_features = static_cast<std::size_t>(x.cols());
    tm.seed = seed;
    return tm;
}

TrainedModel forest_prefix(const TrainedModel& forest, int n_estimators) {
    const auto& f = std::get<ForestModel>(forest.model);
    if (n_estimators < 1 || static_cast<std::size_t>(n_estimators) > f.trees.size()) {
        throw std::invalid_argument("forest_prefix: n_estimators out of range");
    }
    ForestModel m;
    m.params = f.params;
    m.params.n_estimators = n_estimators;
    m.trees.assign(f.trees.begin(), f.trees.begin() + n_estimators);
    TrainedModel tm = forest;
    tm.model = std::move(m);
    return tm;
}

} // namespace respira
