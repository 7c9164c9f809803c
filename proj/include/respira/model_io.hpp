#pragma once

#include "respira/classifiers.hpp"
#include "respira/fusion_pca.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace respira {

// Container layout (all integers and floats little-endian):
//
//   offset 0   "RSPM1"                     5 bytes
//   offset 5   kind                        u8
//   offset 6   version                     u16
//   offset 8   section count               u32
//   offset 12  section table, per section: u32 id, u64 offset, u64 length
//   payloads   f64 arrays (integers stored as exact doubles)
//
// A pipeline container (kind 7) nests the standardizer, PCA and classifier
// containers as raw byte sections 1, 2 and 3.

enum class ContainerKind : std::uint8_t {
    Svm = 1,
    LogReg = 2,
    RandomForest = 3,
    AdaBoost = 4,
    Standardizer = 5,
    Pca = 6,
    Pipeline = 7,
};

inline constexpr std::uint16_t kContainerVersion = 1;

using Bytes = std::vector<std::uint8_t>;

ContainerKind peek_container_kind(std::span<const std::uint8_t> bytes);

Bytes serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::span<const std::uint8_t> bytes);
/// Serialized length in bytes.
std::size_t model_size(const TrainedModel& model);

Bytes serialize_standardizer(const Standardizer& s);
Standardizer deserialize_standardizer(std::span<const std::uint8_t> bytes);

Bytes serialize_pca(const PcaModel& pca);
PcaModel deserialize_pca(std::span<const std::uint8_t> bytes);

/// standardize -> project -> classify
struct Pipeline {
    Standardizer standardizer;
    PcaModel pca;
    TrainedModel classifier;

    std::vector<double> scores(const Matrix& raw) const;
};

Bytes serialize_pipeline(const Pipeline& p);
Pipeline deserialize_pipeline(std::span<const std::uint8_t> bytes);

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
Bytes read_bytes(const std::filesystem::path& path);

} // namespace respira
