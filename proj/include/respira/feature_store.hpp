#pragma once

#include "respira/dataset.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace respira {

/// Per-sample feature rows kept as two CSV tables in one directory:
///   acoustic.csv    sample_id + 477 acoustic columns
///   embeddings.csv  sample_id + 1024 aggregated-embedding columns
/// Values are written in shortest round-trip form, so reloading is exact.
class FeatureStore {
public:
    static constexpr const char* kAcousticFile = "acoustic.csv";
    static constexpr const char* kEmbeddingFile = "embeddings.csv";

    /// Missing tables load as empty.
    static FeatureStore load(const std::filesystem::path& dir);

    /// Rows follow manifest order; samples not in the manifest go last in id order.
    void save(const std::filesystem::path& dir, const Manifest& manifest) const;
    void save_acoustic(const std::filesystem::path& dir, const Manifest& manifest) const;
    void save_embeddings(const std::filesystem::path& dir, const Manifest& manifest) const;

    bool has_acoustic(const std::string& id) const { return acoustic_.count(id) != 0; }
    bool has_embedding(const std::string& id) const { return embeddings_.count(id) != 0; }
    const std::vector<double>& acoustic(const std::string& id) const;
    const std::vector<double>& embedding(const std::string& id) const;
    void set_acoustic(const std::string& id, std::vector<double> values);
    void set_embedding(const std::string& id, std::vector<double> values);

    std::size_t acoustic_count() const { return acoustic_.size(); }
    std::size_t embedding_count() const { return embeddings_.size(); }

    /// Sample ids lacking either table's row.
    std::vector<std::string> missing(const Manifest& manifest) const;

private:
    std::map<std::string, std::vector<double>> acoustic_;
    std::map<std::string, std::vector<double>> embeddings_;
};

/// Column names of embeddings.csv (after sample_id).
std::vector<std::string> embedding_column_names();

} // namespace respira
