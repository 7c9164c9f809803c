#include "respira/feature_store.hpp"

#include "respira/acoustic_features.hpp"
#include "respira/csv.hpp"
#include "respira/deep_embeddings.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace respira {

namespace {

std::map<std::string, std::vector<double>> load_table(const std::filesystem::path& path,
                                                      const std::vector<std::string>& columns) {
    std::map<std::string, std::vector<double>> out;
    if (!std::filesystem::exists(path)) {
        return out;
    }
    const auto rows = csv::read_file(path.string());
    if (rows.empty()) {
        return out;
    }
    const auto& header = rows.front();
    if (header.size() != columns.size() + 1 || header.front() != "sample_id" ||
        !std::equal(columns.begin(), columns.end(), header.begin() + 1)) {
        throw std::runtime_error("unexpected header in " + path.string());
    }
    for (std::size_t line = 1; line < rows.size(); ++line) {
        const auto& row = rows[line];
        if (row.size() != header.size()) {
            throw std::runtime_error(path.string() + ": line " + std::to_string(line + 1) + " has " +
                                     std::to_string(row.size()) + " fields");
        }
        std::vector<double> values(columns.size());
        for (std::size_t j = 0; j < columns.size(); ++j) {
            const auto& f = row[j + 1];
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[j]);
            if (ec != std::errc{} || ptr != f.data() + f.size()) {
                throw std::runtime_error(path.string() + ": bad number '" + f + "' on line " +
                                         std::to_string(line + 1));
            }
        }
        out[row.front()] = std::move(values);
    }
    return out;
}

void save_table(const std::filesystem::path& path, const std::vector<std::string>& columns,
                const std::map<std::string, std::vector<double>>& table, const Manifest& manifest) {
    std::vector<std::string> order;
    std::set<std::string> placed;
    for (const auto& r : manifest.records) {
        if (table.count(r.sample_id) && placed.insert(r.sample_id).second) {
            order.push_back(r.sample_id);
        }
    }
    for (const auto& [id, v] : table) {
        if (!placed.count(id)) {
            order.push_back(id);
        }
    }
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp);
        }
        csv::Row header{"sample_id"};
        header.insert(header.end(), columns.begin(), columns.end());
        out << csv::join(header) << '\n';
        for (const auto& id : order) {
            out << csv::escape(id);
            for (double v : table.at(id)) {
                out << ',' << csv::format_double(v);
            }
            out << '\n';
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace

std::vector<std::string> embedding_column_names() {
    std::vector<std::string> names;
    char buf[32];
    for (const char* part : {"mean", "std"}) {
        for (std::size_t d = 0; d < kEmbeddingWidth; ++d) {
            std::snprintf(buf, sizeof buf, "emb_%s_%03zu", part, d);
            names.emplace_back(buf);
        }
    }
    return names;
}

FeatureStore FeatureStore::load(const std::filesystem::path& dir) {
    FeatureStore s;
    s.acoustic_ = load_table(dir / kAcousticFile, acoustic_feature_names());
    s.embeddings_ = load_table(dir / kEmbeddingFile, embedding_column_names());
    return s;
}

void FeatureStore::save(const std::filesystem::path& dir, const Manifest& manifest) const {
    save_acoustic(dir, manifest);
    save_embeddings(dir, manifest);
}

void FeatureStore::save_acoustic(const std::filesystem::path& dir, const Manifest& manifest) const {
    std::filesystem::create_directories(dir);
    save_table(dir / kAcousticFile, acoustic_feature_names(), acoustic_, manifest);
}

void FeatureStore::save_embeddings(const std::filesystem::path& dir, const Manifest& manifest) const {
    std::filesystem::create_directories(dir);
    save_table(dir / kEmbeddingFile, embedding_column_names(), embeddings_, manifest);
}

const std::vector<double>& FeatureStore::acoustic(const std::string& id) const {
    auto it = acoustic_.find(id);
    if (it == acoustic_.end()) {
        throw std::out_of_range("no acoustic features for sample '" + id + "'");
    }
    return it->second;
}

const std::vector<double>& FeatureStore::embedding(const std::string& id) const {
    auto it = embeddings_.find(id);
    if (it == embeddings_.end()) {
        throw std::out_of_range("no embedding for sample '" + id + "'");
    }
    return it->second;
}

void FeatureStore::set_acoustic(const std::string& id, std::vector<double> values) {
    if (values.size() != kAcousticFeatureCount) {
        throw std::invalid_argument("acoustic row must have 477 values");
    }
    acoustic_[id] = std::move(values);
}

void FeatureStore::set_embedding(const std::string& id, std::vector<double> values) {
    if (values.size() != kAggregatedEmbeddingWidth) {
        throw std::invalid_argument("embedding row must have 1024 values");
    }
    embeddings_[id] = std::move(values);
}

std::vector<std::string> FeatureStore::missing(const Manifest& manifest) const {
    std::vector<std::string> out;
    for (const auto& r : manifest.records) {
        if (!has_acoustic(r.sample_id) || !has_embedding(r.sample_id)) {
            out.push_back(r.sample_id);
        }
    }
    return out;
}

} // namespace respira
