#pragma once

#include "respira/acoustic_features.hpp"
#include "respira/deep_embeddings.hpp"
#include "respira/matrix.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace respira {

enum class FeatureSetId { F1, F2, F3, F4 };
enum class Modality { Cough, Breath, CoughBreath };

std::string to_string(FeatureSetId set);
std::string to_string(Modality modality);
FeatureSetId parse_feature_set(std::string_view text);
Modality parse_modality(std::string_view text);

inline constexpr FeatureSetId kAllFeatureSets[] = {FeatureSetId::F1, FeatureSetId::F2, FeatureSetId::F3,
                                                   FeatureSetId::F4};

/// Acoustic registry indices included in a feature set, in registry order.
std::vector<std::size_t> acoustic_indices_for(FeatureSetId set);

/// Width for one recording: 1024, 1027, 1215 or 1501.
std::size_t feature_set_width(FeatureSetId set);

/// CoughBreath is twice the single-recording width.
std::size_t fused_width(FeatureSetId set, Modality modality);

/// Column names: embedding means/stds then acoustic names; CoughBreath
/// prefixes the cough half with "cough." and the breath half with "breath.".
std::vector<std::string> fused_feature_names(FeatureSetId set, Modality modality);

struct RecordingFeatures {
    AcousticFeatureVector acoustic;
    AggregatedEmbedding embedding;
};

struct FusedVector {
    std::vector<double> values;
    FeatureSetId set = FeatureSetId::F1;
    Modality modality = Modality::Cough;
};

/// For Cough only `cough` is read, for Breath only `breath`, for CoughBreath
/// both. Throws std::invalid_argument when a required recording is null.
FusedVector assemble_features(FeatureSetId set, Modality modality, const RecordingFeatures* cough,
                              const RecordingFeatures* breath);

/// Single-recording assembly.
std::vector<double> assemble_features(FeatureSetId set, const AcousticFeatureVector& acoustic,
                                      const AggregatedEmbedding& embedding);

struct Standardizer {
    Vector mean;
    Vector scale; // std with a 1e-12 floor

    static constexpr double kStdFloor = 1e-12;

    Matrix transform(const Matrix& x) const;
    Eigen::Index dimension() const { return mean.size(); }
};

Standardizer fit_standardizer(const Matrix& train);
Matrix apply_standardizer(const Standardizer& s, const Matrix& x);

struct PcaModel {
    Matrix components; // k x d, orthonormal rows
    Vector mean;
    std::vector<double> explained_variance;
    std::vector<double> explained_variance_ratio;
    double target_variance = 1.0;

    std::size_t n_components() const { return static_cast<std::size_t>(components.rows()); }
    Matrix transform(const Matrix& x) const;
    /// Maps scores back to the input space.
    Matrix inverse_transform(const Matrix& scores) const;
};

/// Every principal direction of a centred training matrix, so that models for
/// several variance targets can share one decomposition.
struct PcaBasis {
    Matrix components; // r x d
    Vector mean;
    std::vector<double> explained_variance;
    std::vector<double> explained_variance_ratio;

    /// Smallest k whose cumulative ratio reaches target.
    std::size_t components_for(double target_variance) const;
    PcaModel select(double target_variance) const;
};

PcaBasis fit_pca_basis(const Matrix& x);
PcaModel fit_pca(const Matrix& x, double target_variance);
Matrix transform_pca(const PcaModel& model, const Matrix& x);

} // namespace respira
