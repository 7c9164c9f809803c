#pragma once

#include "respira/dataset.hpp"
#include "respira/feature_store.hpp"
#include "respira/grid_search.hpp"
#include "respira/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace respira {

enum class BalanceOrder { AfterSplit, BeforeSplit };

struct ExperimentConfig {
    std::string task = "default";
    std::vector<Modality> modalities = {Modality::Cough};
    std::vector<FeatureSetId> feature_sets = {FeatureSetId::F1, FeatureSetId::F2, FeatureSetId::F3, FeatureSetId::F4};
    std::vector<double> pca = {0.7, 0.8, 0.9, 0.95, 0.99};
    std::size_t outer_shuffles = 10;
    double dev_fraction = 0.8;
    std::size_t inner_folds = 5;
    std::uint64_t seed = 0;
    BalanceOrder balance = BalanceOrder::AfterSplit;
    /// Shuffle the subject-to-label assignment before anything else (null runs).
    bool permute_labels = false;
    ClassifierGrid grid = ClassifierGrid::full();
    std::size_t jobs = 1;

    /// Throws std::invalid_argument describing the first problem found.
    void validate() const;
};

/// JSON keys mirror the struct fields; "grid" maps classifier names to value
/// lists and defaults to the full grid when absent.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

/// Evaluation rows for one modality. CoughBreath pairs the i-th cough with
/// the i-th breath recording (by sample_id) of each (subject, session).
EvalData build_eval_data(const Manifest& manifest, const FeatureStore& store, Modality modality);

struct SplitResult {
    std::size_t split = 0;
    Modality modality = Modality::Cough;
    FeatureSetId set = FeatureSetId::F1;
    double pca = 0.0;
    Hyperparameters params;
    std::size_t n_components = 0;
    double inner_auc = 0.0;
    MetricSet metrics;
    std::size_t dev_samples = 0;
    std::size_t test_samples = 0;
    std::size_t dev_subjects = 0;
    std::size_t test_subjects = 0;
    // class counts after balancing
    std::size_t dev_negatives = 0, dev_positives = 0;
    std::size_t test_negatives = 0, test_positives = 0;
    std::size_t model_bytes = 0;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0; // population
};

MeanStd mean_std(const std::vector<double>& values);

struct EvaluationReport {
    ExperimentConfig config;
    std::vector<SplitResult> splits;
    MeanStd auc, precision, recall;
    std::size_t leakage_checks = 0;
    std::size_t leakage_violations = 0;
    std::size_t skipped_folds = 0;
    Manifest manifest;
    std::vector<Bytes> pipelines; // serialized, one per split

    /// Most frequent (modality, feature set) among the split winners.
    std::pair<Modality, FeatureSetId> best_modality_set() const;
};

EvaluationReport run_experiment(const ExperimentConfig& config, const Manifest& manifest, const FeatureStore& store);

std::string report_to_json(const EvaluationReport& report);
/// Inverse of report_to_json for the parts footprint needs (config, manifest, rows).
EvaluationReport report_from_json(const std::string& text);
std::string report_to_csv(const EvaluationReport& report);
/// Mean (std) summary in the shape of a results-table row.
std::string report_summary_table(const EvaluationReport& report);

/// Writes <out>, <out stem>.csv and <out stem>_models/split_NN.rspm.
void write_report(const EvaluationReport& report, const std::filesystem::path& out_json);

struct FootprintRow {
    ClassifierKind kind = ClassifierKind::Svm;
    double pca = 0.0;
    std::size_t bytes = 0;
    double auc = 0.0;
    std::string params;
};

/// Per classifier kind and PCA coefficient: the inner-CV winner on outer
/// split 0's dev side, refitted on that dev side, with its serialized size
/// and test AUC.
std::vector<FootprintRow> footprint_report(const ExperimentConfig& config, const Manifest& manifest,
                                           const FeatureStore& store, Modality modality, FeatureSetId set);

std::string footprint_to_csv(const std::vector<FootprintRow>& rows);

} // namespace respira
