#pragma once

#include "respira/classifiers.hpp"
#include "respira/fusion_pca.hpp"
#include "respira/model_io.hpp"
#include "respira/protocol.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace respira {

struct SvmGrid {
    std::vector<SvmKernel> kernels;
    std::vector<double> C;
    std::vector<double> gamma;
    std::vector<int> degree; // poly only
};

struct LrGrid {
    std::vector<Penalty> penalties;
    std::vector<double> C;
};

struct RfGrid {
    std::vector<int> n_estimators;
    std::vector<int> min_samples_split;
    std::vector<int> max_depth;
    std::vector<SplitCriterion> criteria;
};

struct AbGrid {
    std::vector<int> n_estimators;
    std::vector<double> learning_rate;
};

struct ClassifierGrid {
    std::optional<SvmGrid> svm;
    std::optional<LrGrid> lr;
    std::optional<RfGrid> rf;
    std::optional<AbGrid> ab;

    /// The default search space: 210 SVM + 14 LR + 96 RF + 24 AB candidates.
    static ClassifierGrid full();

    /// Throws std::invalid_argument for an empty grid or empty value lists.
    void validate() const;

    /// SVM (kernel, C, gamma, degree), LR (penalty, C), RF (n_estimators,
    /// min_samples_split, max_depth, criterion), AB (n_estimators, learning_rate).
    std::vector<Hyperparameters> enumerate() const;
};

/// Feature rows of every evaluation sample for one modality, at full F4
/// width (twice that for CoughBreath).
struct EvalData {
    Modality modality = Modality::Cough;
    Matrix x;
    std::vector<LabeledItem> items;
    std::vector<std::string> sample_ids;

    /// Column subset for a feature set, in fused order.
    Matrix columns(FeatureSetId set) const;
    Matrix columns(FeatureSetId set, const IndexList& rows) const;
};

std::vector<Eigen::Index> feature_set_columns(FeatureSetId set, Modality modality);

/// The part of one outer split a modality contributes to the search.
struct ModalityView {
    const EvalData* data = nullptr;
    IndexList dev;           // balanced dev rows
    std::vector<Fold> folds; // inner folds over `dev`
};

struct GridSpec {
    std::vector<FeatureSetId> feature_sets;
    std::vector<double> pca;
    ClassifierGrid grid;
    std::size_t jobs = 1;
    std::uint64_t seed = 0;
    /// Optional restriction to one classifier kind (footprint report).
    std::optional<ClassifierKind> only_kind;
};

struct CandidateScore {
    std::size_t view = 0;
    FeatureSetId set = FeatureSetId::F1;
    double pca = 0.0;
    std::size_t pca_index = 0;
    std::size_t hp_index = 0;
    Hyperparameters params;
    double mean_auc = 0.0;
    double mean_components = 0.0;
    std::size_t valid_folds = 0;
    bool ok = false;
};

struct GridSearchResult {
    std::vector<CandidateScore> candidates; // enumeration order
    std::size_t best = 0;
    std::size_t skipped_folds = 0;     // validation side with one class
    std::size_t leakage_checks = 0;
    std::size_t leakage_violations = 0;

    const CandidateScore& best_candidate() const { return candidates.at(best); }
};

/// Picks the maximum mean AUC; ties go to fewer mean PCA components, then
/// to the earlier candidate.
std::size_t select_best(const std::vector<CandidateScore>& candidates,
                        std::optional<ClassifierKind> kind = std::nullopt, std::optional<std::size_t> pca_index = {});

GridSearchResult grid_search(const std::vector<ModalityView>& views, const GridSpec& spec);

/// Standardizer -> PCA(target) -> classifier, fitted on the given rows.
Pipeline fit_pipeline(const EvalData& data, const IndexList& rows, FeatureSetId set, double pca,
                      const Hyperparameters& params, std::uint64_t seed);

Labels labels_of(const EvalData& data, const IndexList& rows);

} // namespace respira
