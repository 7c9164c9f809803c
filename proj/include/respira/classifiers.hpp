#pragma once

#include "respira/matrix.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace respira {

/// Labels are -1 (healthy) and +1 (covid).
using Labels = std::vector<int>;

enum class ClassifierKind : std::uint8_t { Svm = 1, LogReg = 2, RandomForest = 3, AdaBoost = 4 };

std::string to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view text);

inline constexpr ClassifierKind kAllClassifierKinds[] = {ClassifierKind::Svm, ClassifierKind::LogReg,
                                                         ClassifierKind::RandomForest, ClassifierKind::AdaBoost};

// --- hyperparameters ----------------------------------------------------------------

enum class SvmKernel { Rbf = 0, Poly = 1, Sigmoid = 2 };
std::string to_string(SvmKernel kernel);
SvmKernel parse_svm_kernel(std::string_view text);

struct SvmParams {
    double C = 1.0;
    SvmKernel kernel = SvmKernel::Rbf;
    double gamma = 1.0;
    int degree = 3; // poly only
    double tolerance = 1e-3;

    void validate() const;
};

enum class Penalty { L1 = 0, L2 = 1 };
std::string to_string(Penalty penalty);
Penalty parse_penalty(std::string_view text);

struct LogRegParams {
    Penalty penalty = Penalty::L2;
    double C = 1.0;
    int max_iterations = 5000;
    double decrease_tolerance = 1e-8;
    double gradient_tolerance = 1e-6;

    void validate() const;
};

enum class SplitCriterion { Gini = 0, Entropy = 1 };
std::string to_string(SplitCriterion criterion);
SplitCriterion parse_criterion(std::string_view text);

struct RfParams {
    int n_estimators = 100;
    int min_samples_split = 2;
    int max_depth = 10;
    SplitCriterion criterion = SplitCriterion::Gini;

    void validate() const;
};

struct AbParams {
    int n_estimators = 50;
    double learning_rate = 1.0;

    void validate() const;
};

// --- fitted models ------------------------------------------------------------------

double svm_kernel(const SvmParams& p, const double* u, const double* v, Eigen::Index d);

struct SvmModel {
    SvmParams params;
    Matrix support_vectors;       // n_sv x d
    std::vector<double> dual_coef; // alpha_i * y_i
    double bias = 0.0;
};

struct LogRegModel {
    LogRegParams params;
    Vector weights;
    double bias = 0.0;
};

/// CART node. Leaves have feature == -1; class_weight holds the (weighted)
/// negative and positive mass that reached the node.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double impurity = 0.0;
    double n_samples = 0.0;
    double weighted_n_samples = 0.0;
    double negative = 0.0;
    double positive = 0.0;

    bool is_leaf() const { return feature < 0; }
    /// Class ties go to the negative class.
    int vote() const { return positive > negative ? 1 : -1; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    const TreeNode& leaf_for(const double* x) const;
    /// Where x lands in the tree pruned to the given limits. Growing with
    /// those limits and the same seed yields exactly that pruned tree.
    const TreeNode& node_for(const double* x, int max_depth, int min_samples_split) const;
    int predict(const double* x) const { return leaf_for(x).vote(); }
};

struct ForestModel {
    RfParams params;
    std::vector<DecisionTree> trees;
};

struct AdaBoostModel {
    AbParams params;
    std::vector<DecisionTree> stumps; // three nodes each
    std::vector<double> alphas;
    std::vector<double> errors; // weighted training error of each accepted stump
};

struct TrainedModel {
    std::variant<SvmModel, LogRegModel, ForestModel, AdaBoostModel> model;
    std::size_t n_features = 0;
    std::uint64_t seed = 0;

    ClassifierKind kind() const;
};

// --- training -----------------------------------------------------------------------

/// Full dual solution, exposed for KKT checks.
struct SvmDual {
    std::vector<double> alpha;
    double bias = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

SvmDual solve_svm_dual(const Matrix& x, const Labels& y, const SvmParams& params);

/// Objective values after every accepted step (first entry = starting point).
struct LogRegTrace {
    std::vector<double> objective;
    std::size_t iterations = 0;
    double gradient_norm = 0.0; // norm of the proximal gradient mapping at exit
};

double logreg_objective(const LogRegParams& p, const Vector& w, double b, const Matrix& x, const Labels& y);

TrainedModel train_svm(const Matrix& x, const Labels& y, const SvmParams& p, std::uint64_t seed = 0);
TrainedModel train_logreg(const Matrix& x, const Labels& y, const LogRegParams& p, std::uint64_t seed = 0,
                          LogRegTrace* trace = nullptr);
TrainedModel train_rf(const Matrix& x, const Labels& y, const RfParams& p, std::uint64_t seed);
TrainedModel train_adaboost(const Matrix& x, const Labels& y, const AbParams& p, std::uint64_t seed = 0);

/// One CART tree on the given (possibly repeated) row indices.
DecisionTree build_tree(const Matrix& x, const Labels& y, const std::vector<std::size_t>& rows, const RfParams& p,
                        std::size_t max_features, std::uint64_t seed);

/// A forest holding the first n trees. Tree seeds depend only on the tree
/// index, so this equals training with n_estimators = n.
TrainedModel forest_prefix(const TrainedModel& forest, int n_estimators);
/// Boosting is sequential, so the first n rounds are the n-round model.
TrainedModel adaboost_prefix(const TrainedModel& boosted, int n_estimators);

using Hyperparameters = std::variant<SvmParams, LogRegParams, RfParams, AbParams>;

ClassifierKind kind_of(const Hyperparameters& h);
std::string describe(const Hyperparameters& h);
TrainedModel train(const Matrix& x, const Labels& y, const Hyperparameters& h, std::uint64_t seed);

// --- prediction ---------------------------------------------------------------------

double predict_score(const TrainedModel& model, std::span<const double> x);
int predict_label(const TrainedModel& model, std::span<const double> x);
std::vector<double> predict_scores(const TrainedModel& model, const Matrix& x);
std::vector<int> predict_labels(const TrainedModel& model, const Matrix& x);
double decision_threshold(ClassifierKind kind);
inline int label_from_score(ClassifierKind kind, double score) { return score >= decision_threshold(kind) ? 1 : -1; }

/// Shared input validation: matching sizes, finite values, labels in
/// {-1, +1}, both classes present.
void validate_training_data(const Matrix& x, const Labels& y);

} // namespace respira
