#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace respira {

enum class HealthLabel { Healthy, Covid };
enum class RecordingType { Cough, Breath, Voice };

std::string to_string(HealthLabel label);
std::string to_string(RecordingType type);
HealthLabel parse_health_label(std::string_view text);
RecordingType parse_recording_type(std::string_view text);

/// -1 for healthy, +1 for covid.
inline int label_value(HealthLabel label) { return label == HealthLabel::Covid ? 1 : -1; }

struct SampleRecord {
    std::string sample_id;
    std::string subject_id;
    std::string session_id;
    HealthLabel label = HealthLabel::Healthy;
    RecordingType modality = RecordingType::Cough;
    std::string path; // as written in the manifest
    std::string dataset;
    /// Extra manifest columns (symptoms, smoking, asthma ...), used by task filters.
    std::map<std::string, std::string> metadata;

    bool operator==(const SampleRecord&) const = default;
};

struct Manifest {
    std::vector<SampleRecord> records;
    /// Directory relative paths are resolved against when RESPIRA_DATA_ROOT is unset.
    std::filesystem::path base_dir;

    const SampleRecord& at(std::string_view sample_id) const;
};

inline constexpr const char* kManifestColumns[] = {"sample_id", "subject_id", "session_id", "label",
                                                   "modality",  "path",       "dataset"};

Manifest parse_manifest(const std::filesystem::path& path);
/// Validation shared by the parser and the scanners.
void validate_manifest(const Manifest& manifest);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

/// Absolute paths are kept; relative ones are prefixed with RESPIRA_DATA_ROOT
/// when set, otherwise with the manifest's base_dir.
std::filesystem::path resolve_audio_path(const Manifest& manifest, const SampleRecord& record);

struct SummaryRow {
    std::string dataset;
    HealthLabel label = HealthLabel::Healthy;
    RecordingType modality = RecordingType::Cough;
    std::size_t count = 0;
};

/// Counts per (dataset, label, modality), sorted by those keys.
std::vector<SummaryRow> manifest_summary(const Manifest& manifest);
/// Counts per (dataset, label).
std::map<std::pair<std::string, HealthLabel>, std::size_t> label_counts(const Manifest& manifest);

// --- COSWARA-style trees ------------------------------------------------------------
//
// <root>/<date>/<subject>/metadata.json   ({"covid_status": "...", ...})
// <root>/<date>/<subject>/cough-heavy.wav, cough-shallow.wav, breathing-deep.wav ...

struct SkipRecord {
    std::string subject_id;
    std::string path;
    std::string reason;
};

struct ScanResult {
    Manifest manifest;
    std::vector<SkipRecord> skipped;
};

/// Status string -> label; statuses absent from the table are skipped.
std::map<std::string, HealthLabel> load_status_map(const std::filesystem::path& path);

ScanResult scan_coswara_layout(const std::filesystem::path& root, const std::map<std::string, HealthLabel>& status_map,
                               const std::vector<RecordingType>& modalities = {RecordingType::Cough});

/// JSON lines, one object per skipped item.
void write_skip_report(const std::filesystem::path& path, const std::vector<SkipRecord>& skipped);

// --- task filters -------------------------------------------------------------------
//
// {"name": "...",
//  "positive": [{"column": "label", "equals": "covid"}, ...],
//  "negative": [{"column": "symptoms", "contains": "cough"}, ...]}
//
// A record joins the positive class when every positive condition holds,
// otherwise the negative class when every negative condition holds, and is
// dropped otherwise. Conditions: equals, not_equals, contains, in.

struct TaskCondition {
    std::string column;
    std::string op;
    std::vector<std::string> values;

    bool matches(const SampleRecord& r) const;
};

struct TaskFilter {
    std::string name;
    std::string description;
    std::vector<TaskCondition> positive;
    std::vector<TaskCondition> negative;
};

TaskFilter load_task_filter(const std::filesystem::path& path);
Manifest apply_task_filter(const Manifest& manifest, const TaskFilter& task);

} // namespace respira
