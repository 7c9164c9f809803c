#include "respira/classifiers.hpp"
#include "respira/metrics.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace respira;
using respira::test::blobs;

namespace {

double kernel_oracle(const SvmParams& p, const Matrix& x, Eigen::Index i, Eigen::Index j) {
    const double dot = x.row(i).dot(x.row(j));
    const double sq = (x.row(i) - x.row(j)).squaredNorm();
    switch (p.kernel) {
    case SvmKernel::Rbf: return std::exp(-p.gamma * sq);
    case SvmKernel::Poly: return std::pow(p.gamma * dot + 1.0, p.degree);
    case SvmKernel::Sigmoid: return std::tanh(p.gamma * dot + 1.0);
    }
    return 0.0;
}

// Largest violation of the box-constrained dual optimality conditions.
double kkt_residual(const Matrix& x, const Labels& y, const SvmParams& p, const SvmDual& dual) {
    const Eigen::Index n = x.rows();
    double worst = 0.0, balance = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double f = dual.bias;
        for (Eigen::Index j = 0; j < n; ++j) {
            f += dual.alpha[j] * y[j] * kernel_oracle(p, x, i, j);
        }
        const double m = y[i] * f;
        const double a = dual.alpha[i];
        balance += a * y[i];
        if (a < -1e-12 || a > p.C + 1e-12) {
            return std::numeric_limits<double>::infinity();
        }
        if (a <= 1e-12) {
            worst = std::max(worst, 1.0 - m);
        } else if (a >= p.C - 1e-12) {
            worst = std::max(worst, m - 1.0);
        } else {
            worst = std::max(worst, std::abs(m - 1.0));
        }
    }
    return std::max(worst, std::abs(balance));
}

double train_auc(const TrainedModel& m, const Matrix& x, const Labels& y) {
    const auto s = predict_scores(m, x);
    return auc(s, y);
}

Labels labels_from(std::initializer_list<int> v) { return Labels(v); }

} // namespace

TEST(Svm, KktResidualsOnRandomProblems) {
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 4 + rng.index(17);
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.index(4));
        Matrix x;
        Labels y;
        blobs(n, d, 0.7, 1000 + trial, x, y);
        SvmParams p;
        p.kernel = static_cast<SvmKernel>(rng.index(3));
        p.C = std::pow(10.0, static_cast<double>(rng.index(3)) - 1.0);
        p.gamma = std::pow(10.0, static_cast<double>(rng.index(3)) - 2.0);
        p.degree = 2 + static_cast<int>(rng.index(3));
        const auto dual = solve_svm_dual(x, y, p);
        EXPECT_TRUE(dual.converged) << trial;
        EXPECT_LE(kkt_residual(x, y, p, dual), 1e-3) << "trial " << trial << " kernel " << to_string(p.kernel);
    }
}

TEST(Svm, SeparableProblemHasUnitMarginSupportVectors) {
    Matrix x(4, 1);
    x << -2, -1, 1, 2;
    const Labels y = labels_from({-1, -1, 1, 1});
    SvmParams p;
    p.C = 1000.0;
    p.gamma = 0.5;
    const auto m = train_svm(x, y, p);
    for (Eigen::Index i = 0; i < 4; ++i) {
        const double f = predict_score(m, std::span<const double>(x.row(i).data(), 1));
        EXPECT_GE(y[i] * f, 1.0 - 1e-3);
    }
    EXPECT_EQ(predict_labels(m, x), y);
}

TEST(Svm, ModelKeepsOnlySupportVectors) {
    Matrix x;
    Labels y;
    blobs(30, 2, 2.0, 3, x, y);
    SvmParams p;
    p.C = 1.0;
    p.gamma = 0.5;
    const auto dual = solve_svm_dual(x, y, p);
    const auto m = train_svm(x, y, p);
    const auto& svm = std::get<SvmModel>(m.model);
    std::size_t nsv = 0;
    for (double a : dual.alpha) {
        nsv += a > 0.0;
    }
    EXPECT_EQ(static_cast<std::size_t>(svm.support_vectors.rows()), nsv);
    EXPECT_LT(nsv, 30u);
}

TEST(Svm, RejectsBadParameters) {
    SvmParams p;
    p.C = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p.C = 1.0;
    p.gamma = -1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(LogReg, ObjectiveMonotoneAndStationaryL2) {
    for (double C : {0.01, 1.0, 100.0}) {
        Matrix x;
        Labels y;
        blobs(60, 5, 0.4, 11, x, y);
        LogRegParams p;
        p.C = C;
        LogRegTrace trace;
        train_logreg(x, y, p, 0, &trace);
        ASSERT_GE(trace.objective.size(), 2u);
        for (std::size_t i = 1; i < trace.objective.size(); ++i) {
            ASSERT_LE(trace.objective[i], trace.objective[i - 1]) << C << " step " << i;
        }
        EXPECT_LE(trace.gradient_norm, 1e-5) << C;
    }
}

TEST(LogReg, MatchesNewtonSolution) {
    Matrix x;
    Labels y;
    blobs(50, 3, 0.3, 12, x, y);
    const double C = 2.0;
    // Newton's method on [w; b] for sum log(1+exp(-y(wx+b))) + |w|^2/(2C)
    const Eigen::Index d = x.cols();
    Matrix xa(x.rows(), d + 1);
    xa << x, Vector::Ones(x.rows());
    Vector theta = Vector::Zero(d + 1);
    for (int it = 0; it < 50; ++it) {
        Vector g = Vector::Zero(d + 1);
        Matrix h = Matrix::Zero(d + 1, d + 1);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double yi = y[i];
            const double m = yi * xa.row(i).dot(theta);
            const double s = 1.0 / (1.0 + std::exp(m));
            g -= yi * s * xa.row(i).transpose();
            h += s * (1.0 - s) * xa.row(i).transpose() * xa.row(i);
        }
        g.head(d) += theta.head(d) / C;
        h.topLeftCorner(d, d) += Matrix::Identity(d, d) / C;
        theta -= h.ldlt().solve(g);
    }
    LogRegParams p;
    p.C = C;
    const auto m = train_logreg(x, y, p);
    const auto& lr = std::get<LogRegModel>(m.model);
    for (Eigen::Index j = 0; j < d; ++j) {
        EXPECT_NEAR(lr.weights(j), theta(j), 1e-5);
    }
    EXPECT_NEAR(lr.bias, theta(d), 1e-5);
}

TEST(LogReg, StrongL1PenaltyZeroesWeights) {
    Matrix x;
    Labels y;
    blobs(40, 6, 0.5, 13, x, y);
    LogRegParams p;
    p.penalty = Penalty::L1;
    p.C = 1e-3;
    LogRegTrace trace;
    const auto m = train_logreg(x, y, p, 0, &trace);
    EXPECT_EQ(std::get<LogRegModel>(m.model).weights.lpNorm<1>(), 0.0);
    for (std::size_t i = 1; i < trace.objective.size(); ++i) {
        ASSERT_LE(trace.objective[i], trace.objective[i - 1]);
    }
    p.C = 10.0;
    const auto loose = train_logreg(x, y, p);
    EXPECT_GT(std::get<LogRegModel>(loose.model).weights.lpNorm<1>(), 0.0);
    EXPECT_GE(train_auc(loose, x, y), 0.9);
}

TEST(LogReg, ScoresAreProbabilities) {
    Matrix x;
    Labels y;
    blobs(20, 2, 1.0, 14, x, y);
    const auto m = train_logreg(x, y, LogRegParams{});
    for (double s : predict_scores(m, x)) {
        EXPECT_GT(s, 0.0);
        EXPECT_LT(s, 1.0);
    }
    EXPECT_EQ(decision_threshold(ClassifierKind::LogReg), 0.5);
}

TEST(Forest, SeparableBlobsReachFullTrainingAuc) {
    Matrix x;
    Labels y;
    blobs(80, 2, 2.5, 15, x, y);
    for (auto c : {SplitCriterion::Gini, SplitCriterion::Entropy}) {
        const auto m = train_rf(x, y, RfParams{50, 2, 10, c}, 1);
        EXPECT_GE(train_auc(m, x, y), 0.99);
    }
}

TEST(Forest, DeterministicAndPrefixConsistent) {
    Matrix x;
    Labels y;
    blobs(40, 4, 0.5, 16, x, y);
    const auto a = train_rf(x, y, RfParams{20, 2, 10, SplitCriterion::Gini}, 9);
    const auto b = train_rf(x, y, RfParams{20, 2, 10, SplitCriterion::Gini}, 9);
    const auto small = train_rf(x, y, RfParams{7, 2, 10, SplitCriterion::Gini}, 9);
    EXPECT_EQ(predict_scores(a, x), predict_scores(b, x));
    EXPECT_EQ(predict_scores(forest_prefix(a, 7), x), predict_scores(small, x));
    EXPECT_THROW(forest_prefix(a, 21), std::invalid_argument);
}

TEST(Forest, GrowthLimitsEqualPruning) {
    Matrix x;
    Labels y;
    blobs(60, 5, 0.3, 17, x, y);
    const auto full = train_rf(x, y, RfParams{10, 2, 50, SplitCriterion::Entropy}, 4);
    for (auto [mss, depth] : {std::pair{2, 1}, std::pair{8, 3}, std::pair{12, 10}, std::pair{10, 2}}) {
        const auto limited = train_rf(x, y, RfParams{10, mss, depth, SplitCriterion::Entropy}, 4);
        const auto& ft = std::get<ForestModel>(full.model).trees;
        const auto& lt = std::get<ForestModel>(limited.model).trees;
        for (std::size_t t = 0; t < ft.size(); ++t) {
            for (Eigen::Index i = 0; i < x.rows(); ++i) {
                const Vector row = x.row(i).transpose();
                const auto& pruned = ft[t].node_for(row.data(), depth, mss);
                const auto& grown = lt[t].leaf_for(row.data());
                ASSERT_EQ(pruned.positive, grown.positive);
                ASSERT_EQ(pruned.negative, grown.negative);
            }
        }
    }
}

TEST(Forest, RootSplitsOnInformativeFeature) {
    Matrix x(8, 1);
    x << 0, 1, 2, 3, 10, 11, 12, 13;
    const Labels y = labels_from({-1, -1, -1, -1, 1, 1, 1, 1});
    std::vector<std::size_t> rows(8);
    for (std::size_t i = 0; i < 8; ++i) {
        rows[i] = i;
    }
    const auto tree = build_tree(x, y, rows, RfParams{1, 2, 10, SplitCriterion::Gini}, 1, 0);
    ASSERT_EQ(tree.nodes.size(), 3u);
    EXPECT_EQ(tree.nodes[0].feature, 0);
    EXPECT_DOUBLE_EQ(tree.nodes[0].threshold, 6.5);
    EXPECT_DOUBLE_EQ(tree.nodes[0].impurity, 0.5);
}

TEST(Forest, EntropyAndGiniImpurityValues) {
    Matrix x(4, 1);
    x << 0, 1, 2, 3;
    const Labels y = labels_from({-1, 1, 1, 1});
    std::vector<std::size_t> rows = {0, 1, 2, 3};
    const auto g = build_tree(x, y, rows, RfParams{1, 2, 1, SplitCriterion::Gini}, 1, 0);
    const auto e = build_tree(x, y, rows, RfParams{1, 2, 1, SplitCriterion::Entropy}, 1, 0);
    EXPECT_DOUBLE_EQ(g.nodes[0].impurity, 1.0 - 0.25 * 0.25 - 0.75 * 0.75);
    EXPECT_NEAR(e.nodes[0].impurity, -(0.25 * std::log2(0.25) + 0.75 * std::log2(0.75)), 1e-15);
}

TEST(AdaBoost, SeparableBlobsReachFullTrainingAuc) {
    Matrix x;
    Labels y;
    blobs(80, 2, 2.5, 18, x, y);
    const auto m = train_adaboost(x, y, AbParams{50, 1.0});
    EXPECT_GE(train_auc(m, x, y), 0.99);
}

TEST(AdaBoost, FirstStumpMinimisesUniformError) {
    Matrix x;
    Labels y;
    blobs(30, 3, 0.4, 19, x, y);
    const auto m = train_adaboost(x, y, AbParams{1, 1.0});
    const auto& ab = std::get<AdaBoostModel>(m.model);
    ASSERT_EQ(ab.stumps.size(), 1u);
    // brute force over features, cut points and leaf orientations
    double best = 1.0;
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
        for (Eigen::Index c = 0; c < x.rows(); ++c) {
            const double thr = x(c, f);
            for (int sign : {-1, 1}) {
                double err = 0.0;
                for (Eigen::Index i = 0; i < x.rows(); ++i) {
                    const int pred = x(i, f) <= thr ? -sign : sign;
                    err += pred != y[i] ? 1.0 / 30.0 : 0.0;
                }
                best = std::min(best, err);
            }
        }
    }
    EXPECT_NEAR(ab.errors[0], best, 1e-12);
    EXPECT_NEAR(ab.alphas[0], 0.5 * std::log((1.0 - best) / best), 1e-12);
    EXPECT_EQ(ab.stumps[0].nodes.size(), 3u);
}

TEST(AdaBoost, JitteredXorIsSolved) {
    Matrix x(4, 2);
    x << 1.03, 0.98, -0.97, -1.04, 0.99, -1.01, -1.02, 0.96;
    const Labels y = labels_from({1, 1, -1, -1});
    const auto m = train_adaboost(x, y, AbParams{50, 1.0});
    EXPECT_EQ(predict_labels(m, x), y);
}

TEST(AdaBoost, LatticeXorStopsWithoutStumps) {
    // every stump on the exact lattice has weighted error 1/2
    Matrix x(4, 2);
    x << 1, 1, -1, -1, 1, -1, -1, 1;
    const Labels y = labels_from({1, 1, -1, -1});
    const auto m = train_adaboost(x, y, AbParams{50, 1.0});
    EXPECT_TRUE(std::get<AdaBoostModel>(m.model).stumps.empty());
    for (double s : predict_scores(m, x)) {
        EXPECT_EQ(s, 0.0);
    }
}

TEST(AdaBoost, PerfectStumpStopsEarly) {
    Matrix x(4, 1);
    x << 0, 1, 5, 6;
    const Labels y = labels_from({-1, -1, 1, 1});
    const auto m = train_adaboost(x, y, AbParams{50, 1.0});
    const auto& ab = std::get<AdaBoostModel>(m.model);
    ASSERT_EQ(ab.stumps.size(), 1u);
    EXPECT_NEAR(ab.alphas[0], 0.5 * std::log((1.0 - 1e-10) / 1e-10), 1e-9);
}

TEST(AdaBoost, PrefixEqualsShorterRun) {
    Matrix x;
    Labels y;
    blobs(40, 3, 0.3, 20, x, y);
    const auto a = train_adaboost(x, y, AbParams{30, 0.5});
    const auto b = train_adaboost(x, y, AbParams{12, 0.5});
    EXPECT_EQ(predict_scores(adaboost_prefix(a, 12), x), predict_scores(b, x));
}

TEST(Classifiers, TrainingDataValidation) {
    Matrix x(3, 1);
    x << 0, 1, 2;
    EXPECT_THROW(validate_training_data(x, labels_from({1, 1, 1})), std::invalid_argument);
    EXPECT_THROW(validate_training_data(x, labels_from({1, -1})), std::invalid_argument);
    EXPECT_THROW(validate_training_data(x, labels_from({1, -1, 0})), std::invalid_argument);
    x(1, 0) = std::nan("");
    EXPECT_THROW(validate_training_data(x, labels_from({1, -1, 1})), std::invalid_argument);
}

TEST(Classifiers, Descriptions) {
    EXPECT_EQ(kind_of(Hyperparameters{RfParams{}}), ClassifierKind::RandomForest);
    EXPECT_EQ(parse_classifier_kind("ab"), ClassifierKind::AdaBoost);
    EXPECT_EQ(to_string(ClassifierKind::LogReg), "lr");
    EXPECT_NE(describe(SvmParams{}).find("rbf"), std::string::npos);
}
