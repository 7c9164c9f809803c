#include "respira/cli.hpp"

#include "respira/dataset.hpp"
#include "respira/experiment.hpp"
#include "respira/extraction.hpp"
#include "respira/feature_store.hpp"
#include "respira/synthetic.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace respira::cli {

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::invalid_argument("cannot read " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int cmd_extract(const ExtractArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (args.acoustic_only && args.embeddings_only) {
            throw std::invalid_argument("--acoustic and --embeddings are mutually exclusive");
        }
        const Manifest manifest = parse_manifest(args.manifest);
        validate_manifest(manifest);
        ExtractionOptions opts;
        opts.acoustic = !args.embeddings_only;
        opts.embeddings = !args.acoustic_only;
        opts.runner = RunnerSpec::parse(args.runner);
        if (args.seed && opts.runner.kind == RunnerSpec::Kind::Stub && args.runner.find(':') == std::string::npos) {
            opts.runner.seed = *args.seed;
        }
        opts.jobs = args.jobs;
        opts.force = args.force;
        const ExtractionReport report = extract_features(manifest, args.out_dir, opts);
        out << "acoustic computed: " << report.acoustic_computed << "\n"
            << "embeddings computed: " << report.embeddings_computed << "\n"
            << "reused: " << report.reused << "\n";
        for (const auto& f : report.failures) {
            err << "failed " << f.sample_id << " (" << f.stage << "): " << f.message << '\n';
        }
        return report.failures.empty() ? kExitOk : kExitPartial;
    });
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        ExperimentConfig config = load_config(args.config);
        if (args.seed) {
            config.seed = *args.seed;
        }
        if (args.jobs) {
            config.jobs = *args.jobs;
        }
        config.validate();
        const Manifest manifest = parse_manifest(args.manifest);
        validate_manifest(manifest);
        const FeatureStore store = FeatureStore::load(args.features);
        const auto missing = store.missing(manifest);
        if (!missing.empty()) {
            throw std::invalid_argument("incomplete feature store: " + std::to_string(missing.size()) +
                                        " samples lack features (first: " + missing.front() + ")");
        }
        const EvaluationReport report = run_experiment(config, manifest, store);
        write_report(report, args.out);
        out << report_summary_table(report);
        return kExitOk;
    });
}

int cmd_footprint(const FootprintArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (!std::filesystem::exists(args.report)) {
            throw std::invalid_argument("report not found: " + args.report.string());
        }
        const EvaluationReport report = report_from_json(read_text(args.report));
        ExperimentConfig config = report.config;
        if (args.jobs) {
            config.jobs = *args.jobs;
        }
        const FeatureStore store = FeatureStore::load(args.features);
        const auto [modality, set] = report.best_modality_set();
        const auto rows = footprint_report(config, report.manifest, store, modality, set);
        const std::string csv = footprint_to_csv(rows);
        if (args.out.has_parent_path()) {
            std::filesystem::create_directories(args.out.parent_path());
        }
        std::ofstream f(args.out, std::ios::binary);
        if (!f) {
            throw std::runtime_error("cannot write " + args.out.string());
        }
        f << csv;
        out << "modality " << to_string(modality) << ", features " << to_string(set) << "\n" << csv;
        return kExitOk;
    });
}

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        SyntheticCorpusOptions opts;
        opts.seed = args.seed;
        opts.subjects = args.subjects;
        opts.clips_per_subject = args.clips;
        const Manifest m = write_synthetic_corpus(args.out_dir, opts);
        out << "wrote " << m.records.size() << " clips to " << (args.out_dir / "manifest.csv").string() << '\n';
        return kExitOk;
    });
}

int cmd_scan(const ScanArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        std::vector<RecordingType> types;
        for (const auto& m : args.modalities) {
            types.push_back(parse_recording_type(m));
        }
        const auto status = load_status_map(args.status_map);
        const ScanResult scan = scan_coswara_layout(args.root, status, types);
        write_manifest(args.out, scan.manifest);
        if (!args.skip_report.empty()) {
            write_skip_report(args.skip_report, scan.skipped);
        }
        out << "records: " << scan.manifest.records.size() << ", skipped: " << scan.skipped.size() << '\n';
        return kExitOk;
    });
}

int cmd_summary(const std::filesystem::path& manifest_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Manifest manifest = parse_manifest(manifest_path);
        validate_manifest(manifest);
        out << "dataset,label,modality,count\n";
        for (const auto& row : manifest_summary(manifest)) {
            out << row.dataset << ',' << to_string(row.label) << ',' << to_string(row.modality) << ',' << row.count
                << '\n';
        }
        return kExitOk;
    });
}

int cmd_task(const TaskArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Manifest manifest = parse_manifest(args.manifest);
        const TaskFilter task = load_task_filter(args.task);
        const Manifest filtered = apply_task_filter(manifest, task);
        write_manifest(args.out, filtered);
        out << task.name << ": " << filtered.records.size() << " of " << manifest.records.size() << " records\n";
        return kExitOk;
    });
}

} // namespace respira::cli
