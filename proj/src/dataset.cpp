#include "respira/dataset.hpp"

#include "respira/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <tuple>
#include <set>
#include <stdexcept>

namespace respira {

using nlohmann::json;

std::string to_string(HealthLabel label) { return label == HealthLabel::Covid ? "covid" : "healthy"; }

std::string to_string(RecordingType type) {
    switch (type) {
    case RecordingType::Cough: return "cough";
    case RecordingType::Breath: return "breath";
    case RecordingType::Voice: return "voice";
    }
    return "?";
}

HealthLabel parse_health_label(std::string_view text) {
    if (text == "healthy") {
        return HealthLabel::Healthy;
    }
    if (text == "covid") {
        return HealthLabel::Covid;
    }
    throw std::invalid_argument("unknown label '" + std::string(text) + "' (allowed: healthy, covid)");
}

RecordingType parse_recording_type(std::string_view text) {
    if (text == "cough") {
        return RecordingType::Cough;
    }
    if (text == "breath") {
        return RecordingType::Breath;
    }
    if (text == "voice") {
        return RecordingType::Voice;
    }
    throw std::invalid_argument("unknown modality '" + std::string(text) + "' (allowed: cough, breath, voice)");
}

const SampleRecord& Manifest::at(std::string_view sample_id) const {
    for (const auto& r : records) {
        if (r.sample_id == sample_id) {
            return r;
        }
    }
    throw std::out_of_range("sample '" + std::string(sample_id) + "' not in manifest");
}

void validate_manifest(const Manifest& manifest) {
    std::set<std::string> seen;
    for (const auto& r : manifest.records) {
        if (r.sample_id.empty() || r.subject_id.empty() || r.path.empty()) {
            throw std::invalid_argument("manifest record with empty sample_id, subject_id or path");
        }
        if (!seen.insert(r.sample_id).second) {
            throw std::invalid_argument("duplicate sample_id '" + r.sample_id + "'");
        }
    }
}

Manifest parse_manifest(const std::filesystem::path& path) {
    const auto rows = csv::read_file(path.string());
    if (rows.empty()) {
        throw std::invalid_argument("manifest is empty (no header): " + path.string());
    }
    const auto& header = rows.front();
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        col[header[i]] = i;
    }
    std::vector<std::string> missing;
    for (const char* c : kManifestColumns) {
        if (!col.count(c)) {
            missing.emplace_back(c);
        }
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) {
            list += (list.empty() ? "" : ", ") + m;
        }
        throw std::invalid_argument("manifest is missing columns: " + list);
    }
    std::set<std::string> standard(std::begin(kManifestColumns), std::end(kManifestColumns));

    Manifest m;
    m.base_dir = path.parent_path();
    for (std::size_t line = 1; line < rows.size(); ++line) {
        const auto& row = rows[line];
        if (row.size() != header.size()) {
            throw std::invalid_argument("manifest line " + std::to_string(line + 1) + " has " +
                                        std::to_string(row.size()) + " fields, expected " +
                                        std::to_string(header.size()));
        }
        SampleRecord r;
        r.sample_id = row[col["sample_id"]];
        r.subject_id = row[col["subject_id"]];
        r.session_id = row[col["session_id"]];
        try {
            r.label = parse_health_label(row[col["label"]]);
            r.modality = parse_recording_type(row[col["modality"]]);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("manifest line " + std::to_string(line + 1) + ": " + e.what());
        }
        r.path = row[col["path"]];
        r.dataset = row[col["dataset"]];
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (!standard.count(header[i])) {
                r.metadata[header[i]] = row[i];
            }
        }
        m.records.push_back(std::move(r));
    }
    validate_manifest(m);
    return m;
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
    std::set<std::string> extra;
    for (const auto& r : manifest.records) {
        for (const auto& [k, v] : r.metadata) {
            extra.insert(k);
        }
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write manifest " + path.string());
    }
    csv::Row header(std::begin(kManifestColumns), std::end(kManifestColumns));
    header.insert(header.end(), extra.begin(), extra.end());
    out << csv::join(header) << '\n';
    for (const auto& r : manifest.records) {
        csv::Row row = {r.sample_id, r.subject_id, r.session_id, to_string(r.label),
                        to_string(r.modality), r.path, r.dataset};
        for (const auto& k : extra) {
            auto it = r.metadata.find(k);
            row.push_back(it == r.metadata.end() ? "" : it->second);
        }
        out << csv::join(row) << '\n';
    }
}

std::filesystem::path resolve_audio_path(const Manifest& manifest, const SampleRecord& record) {
    std::filesystem::path p(record.path);
    if (p.is_absolute()) {
        return p;
    }
    if (const char* root = std::getenv("RESPIRA_DATA_ROOT"); root != nullptr && *root != '\0') {
        return std::filesystem::path(root) / p;
    }
    return manifest.base_dir / p;
}

std::vector<SummaryRow> manifest_summary(const Manifest& manifest) {
    std::map<std::tuple<std::string, HealthLabel, RecordingType>, std::size_t> counts;
    for (const auto& r : manifest.records) {
        ++counts[{r.dataset, r.label, r.modality}];
    }
    std::vector<SummaryRow> out;
    for (const auto& [key, n] : counts) {
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), n});
    }
    return out;
}

std::map<std::pair<std::string, HealthLabel>, std::size_t> label_counts(const Manifest& manifest) {
    std::map<std::pair<std::string, HealthLabel>, std::size_t> counts;
    for (const auto& r : manifest.records) {
        ++counts[{r.dataset, r.label}];
    }
    return counts;
}

// --- COSWARA ----------------------------------------------------------------------------

std::map<std::string, HealthLabel> load_status_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read status map " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed status map " + path.string() + ": " + e.what());
    }
    const json& table = j.contains("map") ? j.at("map") : j;
    std::map<std::string, HealthLabel> out;
    for (auto it = table.begin(); it != table.end(); ++it) {
        if (it.value().is_string()) {
            out[it.key()] = parse_health_label(it.value().get<std::string>());
        }
    }
    return out;
}

namespace {

std::optional<RecordingType> coswara_recording_type(const std::string& stem) {
    if (stem.rfind("cough", 0) == 0) {
        return RecordingType::Cough;
    }
    if (stem.rfind("breathing", 0) == 0) {
        return RecordingType::Breath;
    }
    if (stem.rfind("counting", 0) == 0 || stem.rfind("vowel", 0) == 0) {
        return RecordingType::Voice;
    }
    return std::nullopt;
}

std::vector<std::filesystem::path> sorted_dirs(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_directory()) {
            out.push_back(e.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

ScanResult scan_coswara_layout(const std::filesystem::path& root, const std::map<std::string, HealthLabel>& status_map,
                               const std::vector<RecordingType>& modalities) {
    if (!std::filesystem::is_directory(root)) {
        throw std::runtime_error("not a directory: " + root.string());
    }
    ScanResult result;
    result.manifest.base_dir = root;
    for (const auto& date_dir : sorted_dirs(root)) {
        const std::string session = date_dir.filename().string();
        for (const auto& subject_dir : sorted_dirs(date_dir)) {
            const std::string subject = subject_dir.filename().string();
            const auto rel_dir = std::filesystem::relative(subject_dir, root);
            const auto meta_path = subject_dir / "metadata.json";
            if (!std::filesystem::exists(meta_path)) {
                result.skipped.push_back({subject, rel_dir.string(), "missing metadata.json"});
                continue;
            }
            json meta;
            {
                std::ifstream in(meta_path);
                try {
                    in >> meta;
                } catch (const json::exception& e) {
                    throw std::runtime_error("unreadable metadata " + meta_path.string() + ": " + e.what());
                }
            }
            if (!meta.contains("covid_status") || !meta["covid_status"].is_string()) {
                result.skipped.push_back({subject, rel_dir.string(), "metadata has no covid_status"});
                continue;
            }
            const std::string status = meta["covid_status"].get<std::string>();
            auto mapped = status_map.find(status);
            if (mapped == status_map.end()) {
                result.skipped.push_back({subject, rel_dir.string(), "unmapped covid_status '" + status + "'"});
                continue;
            }
            std::vector<std::filesystem::path> files;
            for (const auto& e : std::filesystem::directory_iterator(subject_dir)) {
                if (e.is_regular_file() && e.path().extension() == ".wav") {
                    files.push_back(e.path());
                }
            }
            std::sort(files.begin(), files.end());
            for (const auto& f : files) {
                const std::string stem = f.stem().string();
                const auto type = coswara_recording_type(stem);
                if (!type || std::find(modalities.begin(), modalities.end(), *type) == modalities.end()) {
                    continue;
                }
                SampleRecord r;
                r.sample_id = subject + "_" + stem;
                r.subject_id = subject;
                r.session_id = session;
                r.label = mapped->second;
                r.modality = *type;
                r.path = std::filesystem::relative(f, root).generic_string();
                r.dataset = "coswara";
                r.metadata["covid_status"] = status;
                r.metadata["recording"] = stem;
                result.manifest.records.push_back(std::move(r));
            }
        }
    }
    validate_manifest(result.manifest);
    return result;
}

void write_skip_report(const std::filesystem::path& path, const std::vector<SkipRecord>& skipped) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write skip report " + path.string());
    }
    for (const auto& s : skipped) {
        out << json{{"subject_id", s.subject_id}, {"path", s.path}, {"reason", s.reason}}.dump() << '\n';
    }
}

// --- task filters -----------------------------------------------------------------------

namespace {

std::string field_of(const SampleRecord& r, const std::string& column) {
    if (column == "label") {
        return to_string(r.label);
    }
    if (column == "modality") {
        return to_string(r.modality);
    }
    if (column == "dataset") {
        return r.dataset;
    }
    if (column == "subject_id") {
        return r.subject_id;
    }
    if (column == "session_id") {
        return r.session_id;
    }
    auto it = r.metadata.find(column);
    return it == r.metadata.end() ? std::string() : it->second;
}

std::vector<TaskCondition> parse_conditions(const json& list, const std::string& where) {
    std::vector<TaskCondition> out;
    if (!list.is_array()) {
        throw std::invalid_argument("task filter: '" + where + "' must be an array");
    }
    for (const auto& c : list) {
        TaskCondition t;
        t.column = c.at("column").get<std::string>();
        for (const char* op : {"equals", "not_equals", "contains", "in"}) {
            if (c.contains(op)) {
                t.op = op;
                const auto& v = c.at(op);
                if (v.is_array()) {
                    t.values = v.get<std::vector<std::string>>();
                } else {
                    t.values = {v.get<std::string>()};
                }
            }
        }
        if (t.op.empty()) {
            throw std::invalid_argument("task filter condition on '" + t.column + "' has no operator");
        }
        out.push_back(std::move(t));
    }
    return out;
}

bool all_match(const std::vector<TaskCondition>& conds, const SampleRecord& r) {
    return std::all_of(conds.begin(), conds.end(), [&](const auto& c) { return c.matches(r); });
}

} // namespace

bool TaskCondition::matches(const SampleRecord& r) const {
    const std::string v = field_of(r, column);
    if (op == "equals") {
        return v == values.front();
    }
    if (op == "not_equals") {
        return v != values.front();
    }
    if (op == "contains") {
        return v.find(values.front()) != std::string::npos;
    }
    return std::find(values.begin(), values.end(), v) != values.end();
}

TaskFilter load_task_filter(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read task filter " + path.string());
    }
    json j;
    try {
        in >> j;
        TaskFilter t;
        t.name = j.value("name", path.stem().string());
        t.description = j.value("description", "");
        t.positive = parse_conditions(j.at("positive"), "positive");
        t.negative = parse_conditions(j.at("negative"), "negative");
        return t;
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed task filter " + path.string() + ": " + e.what());
    }
}

Manifest apply_task_filter(const Manifest& manifest, const TaskFilter& task) {
    Manifest out;
    out.base_dir = manifest.base_dir;
    for (const auto& r : manifest.records) {
        if (all_match(task.positive, r)) {
            out.records.push_back(r);
            out.records.back().label = HealthLabel::Covid;
        } else if (all_match(task.negative, r)) {
            out.records.push_back(r);
            out.records.back().label = HealthLabel::Healthy;
        }
    }
    return out;
}

} // namespace respira
