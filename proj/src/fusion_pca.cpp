#include "respira/fusion_pca.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace respira {

std::string to_string(FeatureSetId set) {
    switch (set) {
    case FeatureSetId::F1: return "F1";
    case FeatureSetId::F2: return "F2";
    case FeatureSetId::F3: return "F3";
    case FeatureSetId::F4: return "F4";
    }
    return "?";
}

std::string to_string(Modality modality) {
    switch (modality) {
    case Modality::Cough: return "cough";
    case Modality::Breath: return "breath";
    case Modality::CoughBreath: return "cough+breath";
    }
    return "?";
}

FeatureSetId parse_feature_set(std::string_view text) {
    for (auto s : kAllFeatureSets) {
        if (text == to_string(s)) {
            return s;
        }
    }
    throw std::invalid_argument("unknown feature set '" + std::string(text) + "'");
}

Modality parse_modality(std::string_view text) {
    if (text == "cough") {
        return Modality::Cough;
    }
    if (text == "breath") {
        return Modality::Breath;
    }
    if (text == "cough+breath" || text == "cough_breath" || text == "coughbreath") {
        return Modality::CoughBreath;
    }
    throw std::invalid_argument("unknown modality '" + std::string(text) + "'");
}

std::vector<std::size_t> acoustic_indices_for(FeatureSetId set) {
    switch (set) {
    case FeatureSetId::F1: return {};
    case FeatureSetId::F2: return acoustic_indices_scalar_subset();
    case FeatureSetId::F3: return acoustic_indices_without_deltas();
    case FeatureSetId::F4: {
        std::vector<std::size_t> all(kAcousticFeatureCount);
        for (std::size_t i = 0; i < all.size(); ++i) {
            all[i] = i;
        }
        return all;
    }
    }
    return {};
}

std::size_t feature_set_width(FeatureSetId set) {
    return kAggregatedEmbeddingWidth + acoustic_indices_for(set).size();
}

std::size_t fused_width(FeatureSetId set, Modality modality) {
    return feature_set_width(set) * (modality == Modality::CoughBreath ? 2 : 1);
}

std::vector<std::string> fused_feature_names(FeatureSetId set, Modality modality) {
    std::vector<std::string> single;
    char buf[32];
    for (std::size_t d = 0; d < kEmbeddingWidth; ++d) {
        std::snprintf(buf, sizeof buf, "emb_mean_%03zu", d);
        single.emplace_back(buf);
    }
    for (std::size_t d = 0; d < kEmbeddingWidth; ++d) {
        std::snprintf(buf, sizeof buf, "emb_std_%03zu", d);
        single.emplace_back(buf);
    }
    const auto& names = acoustic_feature_names();
    for (auto i : acoustic_indices_for(set)) {
        single.push_back(names[i]);
    }
    if (modality != Modality::CoughBreath) {
        return single;
    }
    std::vector<std::string> both;
    both.reserve(2 * single.size());
    for (const auto& n : single) {
        both.push_back("cough." + n);
    }
    for (const auto& n : single) {
        both.push_back("breath." + n);
    }
    return both;
}

std::vector<double> assemble_features(FeatureSetId set, const AcousticFeatureVector& acoustic,
                                      const AggregatedEmbedding& embedding) {
    if (embedding.values.size() != kAggregatedEmbeddingWidth) {
        throw std::invalid_argument("aggregated embedding must have 1024 values");
    }
    if (acoustic.values.size() != kAcousticFeatureCount) {
        throw std::invalid_argument("acoustic feature vector must have 477 values");
    }
    std::vector<double> out(embedding.values);
    for (auto i : acoustic_indices_for(set)) {
        out.push_back(acoustic.values[i]);
    }
    if (out.size() != feature_set_width(set)) {
        throw std::logic_error("fused width mismatch for " + to_string(set));
    }
    return out;
}

FusedVector assemble_features(FeatureSetId set, Modality modality, const RecordingFeatures* cough,
                              const RecordingFeatures* breath) {
    FusedVector v;
    v.set = set;
    v.modality = modality;
    auto require = [](const RecordingFeatures* r, const char* which) {
        if (r == nullptr) {
            throw std::invalid_argument(std::string("missing ") + which + " recording for fused features");
        }
        return r;
    };
    if (modality == Modality::Cough || modality == Modality::CoughBreath) {
        const auto* c = require(cough, "cough");
        v.values = assemble_features(set, c->acoustic, c->embedding);
    }
    if (modality == Modality::Breath || modality == Modality::CoughBreath) {
        const auto* b = require(breath, "breath");
        auto part = assemble_features(set, b->acoustic, b->embedding);
        v.values.insert(v.values.end(), part.begin(), part.end());
    }
    if (v.values.size() != fused_width(set, modality)) {
        throw std::logic_error("fused width mismatch");
    }
    return v;
}

// --- standardizer --------------------------------------------------------------------

Standardizer fit_standardizer(const Matrix& train) {
    if (train.rows() == 0 || train.cols() == 0) {
        throw std::invalid_argument("fit_standardizer: empty matrix");
    }
    if (!train.allFinite()) {
        throw std::invalid_argument("fit_standardizer: non-finite input");
    }
    Standardizer s;
    s.mean = train.colwise().mean().transpose();
    s.scale.resize(train.cols());
    for (Eigen::Index j = 0; j < train.cols(); ++j) {
        const double var = (train.col(j).array() - s.mean(j)).square().mean();
        s.scale(j) = std::max(std::sqrt(var), Standardizer::kStdFloor);
    }
    return s;
}

Matrix Standardizer::transform(const Matrix& x) const {
    if (x.cols() != mean.size()) {
        throw std::invalid_argument("standardizer dimension mismatch");
    }
    Matrix out = x.rowwise() - mean.transpose();
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        // Constant training columns give exact zeros rather than amplified noise.
        if (scale(j) <= Standardizer::kStdFloor) {
            out.col(j).setZero();
        } else {
            out.col(j) /= scale(j);
        }
    }
    return out;
}

Matrix apply_standardizer(const Standardizer& s, const Matrix& x) { return s.transform(x); }

// --- PCA -----------------------------------------------------------------------------

PcaBasis fit_pca_basis(const Matrix& x) {
    if (x.rows() < 2) {
        throw std::invalid_argument("fit_pca: need at least 2 rows");
    }
    if (!x.allFinite()) {
        throw std::invalid_argument("fit_pca: non-finite input");
    }
    PcaBasis b;
    b.mean = x.colwise().mean().transpose();
    const Matrix centred = x.rowwise() - b.mean.transpose();
    Eigen::BDCSVD<Matrix> svd(centred, Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const Matrix& v = svd.matrixV();
    const double denom = static_cast<double>(x.rows() - 1);
    double total = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        total += sv(i) * sv(i);
    }
    // Drop numerically null directions so every kept ratio is positive.
    const double tiny = total * 1e-20;
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) * sv(r) > tiny) {
        ++r;
    }
    r = std::max<Eigen::Index>(r, 1);
    b.components.resize(r, x.cols());
    for (Eigen::Index i = 0; i < r; ++i) {
        Vector c = v.col(i);
        Eigen::Index arg = 0;
        c.cwiseAbs().maxCoeff(&arg);
        if (c(arg) < 0) {
            c = -c;
        }
        b.components.row(i) = c.transpose();
        const double s2 = sv(i) * sv(i);
        b.explained_variance.push_back(s2 / denom);
        b.explained_variance_ratio.push_back(total > 0.0 ? s2 / total : (i == 0 ? 1.0 : 0.0));
    }
    return b;
}

std::size_t PcaBasis::components_for(double target) const {
    if (!(target > 0.0 && target <= 1.0)) {
        throw std::invalid_argument("target variance must be in (0, 1]");
    }
    double cum = 0.0;
    for (std::size_t k = 0; k < explained_variance_ratio.size(); ++k) {
        cum += explained_variance_ratio[k];
        if (cum >= target - 1e-12) {
            return k + 1;
        }
    }
    return explained_variance_ratio.size();
}

PcaModel PcaBasis::select(double target) const {
    const std::size_t k = components_for(target);
    PcaModel m;
    m.components = components.topRows(static_cast<Eigen::Index>(k));
    m.mean = mean;
    m.explained_variance.assign(explained_variance.begin(), explained_variance.begin() + static_cast<std::ptrdiff_t>(k));
    m.explained_variance_ratio.assign(explained_variance_ratio.begin(),
                                      explained_variance_ratio.begin() + static_cast<std::ptrdiff_t>(k));
    m.target_variance = target;
    return m;
}

PcaModel fit_pca(const Matrix& x, double target_variance) { return fit_pca_basis(x).select(target_variance); }

Matrix PcaModel::transform(const Matrix& x) const {
    if (x.cols() != mean.size()) {
        throw std::invalid_argument("PCA dimension mismatch");
    }
    return (x.rowwise() - mean.transpose()) * components.transpose();
}

Matrix PcaModel::inverse_transform(const Matrix& scores) const {
    return (scores * components).rowwise() + mean.transpose();
}

Matrix transform_pca(const PcaModel& model, const Matrix& x) { return model.transform(x); }

} // namespace respira
