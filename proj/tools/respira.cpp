#include "respira/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace respira::cli;
    CLI::App app{"Respiratory-sound COVID screening toolkit"};
    app.require_subcommand(1);

    ExtractArgs ex;
    std::uint64_t ex_seed = 0;
    auto* extract = app.add_subcommand("extract", "Compute acoustic features and embeddings for a manifest");
    extract->add_option("manifest", ex.manifest, "Manifest CSV")->required();
    extract->add_option("out", ex.out_dir, "Feature store directory")->required();
    extract->add_flag("--acoustic", ex.acoustic_only, "Acoustic features only");
    extract->add_flag("--embeddings", ex.embeddings_only, "Embeddings only");
    extract->add_option("--runner", ex.runner, "stub:<seed> or sidecar:<dir>");
    auto* ex_seed_opt = extract->add_option("--seed", ex_seed, "Seed for a bare stub runner");
    extract->add_option("--jobs", ex.jobs, "Worker threads")->check(CLI::PositiveNumber);
    extract->add_flag("--force", ex.force, "Recompute existing rows");

    EvaluateArgs ev;
    std::uint64_t ev_seed = 0;
    std::size_t ev_jobs = 1;
    auto* evaluate = app.add_subcommand("evaluate", "Run the nested subject-level evaluation");
    evaluate->add_option("config", ev.config, "Experiment config JSON")->required();
    evaluate->add_option("features", ev.features, "Feature store directory")->required();
    evaluate->add_option("manifest", ev.manifest, "Manifest CSV")->required();
    evaluate->add_option("--out", ev.out, "Report JSON path");
    auto* ev_seed_opt = evaluate->add_option("--seed", ev_seed, "Master seed (overrides the config)");
    auto* ev_jobs_opt = evaluate->add_option("--jobs", ev_jobs, "Worker threads")->check(CLI::PositiveNumber);

    FootprintArgs fp;
    std::size_t fp_jobs = 1;
    auto* footprint = app.add_subcommand("footprint", "Model size per classifier and PCA coefficient");
    footprint->add_option("report", fp.report, "Report JSON from evaluate")->required();
    footprint->add_option("features", fp.features, "Feature store directory")->required();
    footprint->add_option("--out", fp.out, "Output CSV");
    auto* fp_jobs_opt = footprint->add_option("--jobs", fp_jobs, "Worker threads")->check(CLI::PositiveNumber);

    SynthArgs sy;
    auto* synth = app.add_subcommand("synth", "Write the synthetic two-class corpus");
    synth->add_option("out", sy.out_dir, "Output directory")->required();
    synth->add_option("--seed", sy.seed, "Seed");
    synth->add_option("--subjects", sy.subjects, "Number of subjects")->check(CLI::PositiveNumber);
    synth->add_option("--clips", sy.clips, "Clips per subject")->check(CLI::PositiveNumber);

    ScanArgs sc;
    auto* scan = app.add_subcommand("scan", "Build a manifest from a COSWARA-style directory tree");
    scan->add_option("root", sc.root, "Dataset root")->required();
    scan->add_option("--status-map", sc.status_map, "Status-to-label JSON")->required();
    scan->add_option("--out", sc.out, "Manifest CSV")->required();
    scan->add_option("--skipped", sc.skip_report, "JSON-lines report of skipped items");
    scan->add_option("--modality", sc.modalities, "cough, breath or voice (repeatable)");

    std::filesystem::path summary_manifest;
    auto* summary = app.add_subcommand("summary", "Counts per dataset, label and modality");
    summary->add_option("manifest", summary_manifest, "Manifest CSV")->required();

    TaskArgs tk;
    auto* task = app.add_subcommand("task", "Relabel a manifest with a task filter");
    task->add_option("manifest", tk.manifest, "Manifest CSV")->required();
    task->add_option("task", tk.task, "Task filter JSON")->required();
    task->add_option("--out", tk.out, "Output manifest")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }

    if (*extract) {
        if (*ex_seed_opt) {
            ex.seed = ex_seed;
        }
        return cmd_extract(ex, std::cout, std::cerr);
    }
    if (*evaluate) {
        if (*ev_seed_opt) {
            ev.seed = ev_seed;
        }
        if (*ev_jobs_opt) {
            ev.jobs = ev_jobs;
        }
        return cmd_evaluate(ev, std::cout, std::cerr);
    }
    if (*footprint) {
        if (*fp_jobs_opt) {
            fp.jobs = fp_jobs;
        }
        return cmd_footprint(fp, std::cout, std::cerr);
    }
    if (*synth) {
        return cmd_synth(sy, std::cout, std::cerr);
    }
    if (*scan) {
        return cmd_scan(sc, std::cout, std::cerr);
    }
    if (*summary) {
        return cmd_summary(summary_manifest, std::cout, std::cerr);
    }
    return cmd_task(tk, std::cout, std::cerr);
}
