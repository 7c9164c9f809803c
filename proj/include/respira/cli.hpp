#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace respira::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitPartial = 2;

struct ExtractArgs {
    std::filesystem::path manifest;
    std::filesystem::path out_dir;
    bool acoustic_only = false;
    bool embeddings_only = false;
    std::string runner = "stub";
    std::optional<std::uint64_t> seed; // fills in a bare "stub" runner
    std::size_t jobs = 1;
    bool force = false;
};

struct EvaluateArgs {
    std::filesystem::path config;
    std::filesystem::path features;
    std::filesystem::path manifest;
    std::filesystem::path out = "report.json";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
};

struct FootprintArgs {
    std::filesystem::path report;
    std::filesystem::path features;
    std::filesystem::path out = "footprint.csv";
    std::optional<std::size_t> jobs;
};

struct SynthArgs {
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;
    std::size_t subjects = 40;
    std::size_t clips = 3;
};

struct ScanArgs {
    std::filesystem::path root;
    std::filesystem::path status_map;
    std::filesystem::path out;
    std::filesystem::path skip_report;
    std::vector<std::string> modalities = {"cough"};
};

struct TaskArgs {
    std::filesystem::path manifest;
    std::filesystem::path task;
    std::filesystem::path out;
};

int cmd_extract(const ExtractArgs& args, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);
int cmd_footprint(const FootprintArgs& args, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);
int cmd_scan(const ScanArgs& args, std::ostream& out, std::ostream& err);
int cmd_summary(const std::filesystem::path& manifest, std::ostream& out, std::ostream& err);
int cmd_task(const TaskArgs& args, std::ostream& out, std::ostream& err);

} // namespace respira::cli
