#include "respira/classifiers.hpp"

#include "respira/csv.hpp"

#include <cmath>
#include <stdexcept>

namespace respira {

std::string to_string(ClassifierKind kind) {
    switch (kind) {
    case ClassifierKind::Svm: return "svm";
    case ClassifierKind::LogReg: return "lr";
    case ClassifierKind::RandomForest: return "rf";
    case ClassifierKind::AdaBoost: return "ab";
    }
    return "?";
}

ClassifierKind parse_classifier_kind(std::string_view text) {
    for (auto k : kAllClassifierKinds) {
        if (text == to_string(k)) {
            return k;
        }
    }
    throw std::invalid_argument("unknown classifier '" + std::string(text) + "' (expected svm, lr, rf or ab)");
}

std::string to_string(SvmKernel kernel) {
    switch (kernel) {
    case SvmKernel::Rbf: return "rbf";
    case SvmKernel::Poly: return "poly";
    case SvmKernel::Sigmoid: return "sigmoid";
    }
    return "?";
}

SvmKernel parse_svm_kernel(std::string_view text) {
    for (auto k : {SvmKernel::Rbf, SvmKernel::Poly, SvmKernel::Sigmoid}) {
        if (text == to_string(k)) {
            return k;
        }
    }
    throw std::invalid_argument("unknown SVM kernel '" + std::string(text) + "'");
}

std::string to_string(Penalty penalty) { return penalty == Penalty::L1 ? "l1" : "l2"; }

Penalty parse_penalty(std::string_view text) {
    if (text == "l1") {
        return Penalty::L1;
    }
    if (text == "l2") {
        return Penalty::L2;
    }
    throw std::invalid_argument("unknown penalty '" + std::string(text) + "'");
}

std::string to_string(SplitCriterion criterion) { return criterion == SplitCriterion::Gini ? "gini" : "entropy"; }

SplitCriterion parse_criterion(std::string_view text) {
    if (text == "gini") {
        return SplitCriterion::Gini;
    }
    if (text == "entropy") {
        return SplitCriterion::Entropy;
    }
    throw std::invalid_argument("unknown split criterion '" + std::string(text) + "'");
}

void validate_training_data(const Matrix& x, const Labels& y) {
    if (x.rows() == 0 || x.cols() == 0) {
        throw std::invalid_argument("training matrix is empty");
    }
    if (static_cast<std::size_t>(x.rows()) != y.size()) {
        throw std::invalid_argument("training matrix and labels differ in length");
    }
    if (!x.allFinite()) {
        throw std::invalid_argument("training matrix has non-finite features");
    }
    bool neg = false, pos = false;
    for (int v : y) {
        if (v == 1) {
            pos = true;
        } else if (v == -1) {
            neg = true;
        } else {
            throw std::invalid_argument("labels must be -1 or +1");
        }
    }
    if (!neg || !pos) {
        throw std::invalid_argument("training data contains a single class");
    }
}

ClassifierKind TrainedModel::kind() const {
    switch (model.index()) {
    case 0: return ClassifierKind::Svm;
    case 1: return ClassifierKind::LogReg;
    case 2: return ClassifierKind::RandomForest;
    default: return ClassifierKind::AdaBoost;
    }
}

ClassifierKind kind_of(const Hyperparameters& h) {
    switch (h.index()) {
    case 0: return ClassifierKind::Svm;
    case 1: return ClassifierKind::LogReg;
    case 2: return ClassifierKind::RandomForest;
    default: return ClassifierKind::AdaBoost;
    }
}

std::string describe(const Hyperparameters& h) {
    using csv::format_double;
    if (const auto* s = std::get_if<SvmParams>(&h)) {
        std::string out = "svm kernel=" + to_string(s->kernel) + " C=" + format_double(s->C) +
                          " gamma=" + format_double(s->gamma);
        if (s->kernel == SvmKernel::Poly) {
            out += " degree=" + std::to_string(s->degree);
        }
        return out;
    }
    if (const auto* l = std::get_if<LogRegParams>(&h)) {
        return "lr penalty=" + to_string(l->penalty) + " C=" + format_double(l->C);
    }
    if (const auto* r = std::get_if<RfParams>(&h)) {
        return "rf n_estimators=" + std::to_string(r->n_estimators) +
               " min_samples_split=" + std::to_string(r->min_samples_split) +
               " max_depth=" + std::to_string(r->max_depth) + " criterion=" + to_string(r->criterion);
    }
    const auto& a = std::get<AbParams>(h);
    return "ab n_estimators=" + std::to_string(a.n_estimators) + " learning_rate=" + format_double(a.learning_rate);
}

TrainedModel train(const Matrix& x, const Labels& y, const Hyperparameters& h, std::uint64_t seed) {
    return std::visit(
        [&](const auto& p) -> TrainedModel {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, SvmParams>) {
                return train_svm(x, y, p, seed);
            } else if constexpr (std::is_same_v<P, LogRegParams>) {
                return train_logreg(x, y, p, seed);
            } else if constexpr (std::is_same_v<P, RfParams>) {
                return train_rf(x, y, p, seed);
            } else {
                return train_adaboost(x, y, p, seed);
            }
        },
        h);
}

double decision_threshold(ClassifierKind kind) {
    return kind == ClassifierKind::LogReg || kind == ClassifierKind::RandomForest ? 0.5 : 0.0;
}

namespace {

double score_svm(const SvmModel& m, std::span<const double> x) {
    const Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    const double xx = xv.squaredNorm();
    double s = m.bias;
    for (Eigen::Index i = 0; i < m.support_vectors.rows(); ++i) {
        const double dot = m.support_vectors.row(i).dot(xv);
        double k = 0.0;
        switch (m.params.kernel) {
        case SvmKernel::Rbf: {
            const double sq = std::max(0.0, m.support_vectors.row(i).squaredNorm() + xx - 2.0 * dot);
            k = std::exp(-m.params.gamma * sq);
            break;
        }
        case SvmKernel::Poly: k = std::pow(m.params.gamma * dot + 1.0, m.params.degree); break;
        case SvmKernel::Sigmoid: k = std::tanh(m.params.gamma * dot + 1.0); break;
        }
        s += m.dual_coef[static_cast<std::size_t>(i)] * k;
    }
    return s;
}

double score_logreg(const LogRegModel& m, std::span<const double> x) {
    const Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    const double z = m.weights.dot(xv) + m.bias;
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double score_forest(const ForestModel& m, std::span<const double> x) {
    if (m.trees.empty()) {
        return 0.0;
    }
    std::size_t positive = 0;
    for (const auto& t : m.trees) {
        positive += t.predict(x.data()) > 0 ? 1 : 0;
    }
    return static_cast<double>(positive) / static_cast<double>(m.trees.size());
}

double score_adaboost(const AdaBoostModel& m, std::span<const double> x) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < m.stumps.size(); ++i) {
        num += m.alphas[i] * m.stumps[i].predict(x.data());
        den += m.alphas[i];
    }
    return den > 0.0 ? num / den : 0.0;
}

} // namespace

double predict_score(const TrainedModel& model, std::span<const double> x) {
    if (x.size() != model.n_features) {
        throw std::invalid_argument("feature width mismatch: model expects " + std::to_string(model.n_features) +
                                    ", got " + std::to_string(x.size()));
    }
    return std::visit(
        [&](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, SvmModel>) {
                return score_svm(m, x);
            } else if constexpr (std::is_same_v<M, LogRegModel>) {
                return score_logreg(m, x);
            } else if constexpr (std::is_same_v<M, ForestModel>) {
                return score_forest(m, x);
            } else {
                return score_adaboost(m, x);
            }
        },
        model.model);
}

int predict_label(const TrainedModel& model, std::span<const double> x) {
    return label_from_score(model.kind(), predict_score(model, x));
}

std::vector<double> predict_scores(const TrainedModel& model, const Matrix& x) {
    std::vector<double> out(static_cast<std::size_t>(x.rows()));
    std::vector<double> row(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            row[static_cast<std::size_t>(j)] = x(i, j);
        }
        out[static_cast<std::size_t>(i)] = predict_score(model, row);
    }
    return out;
}

std::vector<int> predict_labels(const TrainedModel& model, const Matrix& x) {
    const auto scores = predict_scores(model, x);
    std::vector<int> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = label_from_score(model.kind(), scores[i]);
    }
    return out;
}

} // namespace respira
