// Acceptance driver: one PASS/FAIL line per criterion.
//
//   respira_acceptance <work dir> [experiment config]
//
// The data-present check runs when RESPIRA_ACCEPTANCE_MANIFEST and
// RESPIRA_ACCEPTANCE_FEATURES point at a real manifest and feature store.

#include "respira/acoustic_features.hpp"
#include "respira/classifiers.hpp"
#include "respira/cli.hpp"
#include "respira/csv.hpp"
#include "respira/dataset.hpp"
#include "respira/deep_embeddings.hpp"
#include "respira/experiment.hpp"
#include "respira/extraction.hpp"
#include "respira/feature_store.hpp"
#include "respira/fusion_pca.hpp"
#include "respira/metrics.hpp"
#include "respira/random.hpp"
#include "respira/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace respira;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) {
                detail += "; ";
            }
            detail += what;
        }
    }
};

int failures = 0;

void report(const std::string& name, const Outcome& o, const std::string& summary) {
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << summary;
    if (!o.pass) {
        std::cout << " [" << o.detail << "]";
        ++failures;
    }
    std::cout << std::endl;
}

template <typename F>
void criterion(const std::string& name, F&& body) {
    Outcome o;
    std::string summary;
    try {
        summary = body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    report(name, o, summary);
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

AudioClip sine(double freq, int sr, double seconds, double amp = 0.5, double phase = 0.0) {
    AudioClip clip;
    clip.sample_rate = sr;
    clip.samples.resize(static_cast<std::size_t>(seconds * sr));
    for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        clip.samples[i] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / sr + phase);
    }
    return clip;
}

void blobs(std::size_t n, Eigen::Index d, double sep, std::uint64_t seed, Matrix& x, Labels& y) {
    Rng rng(seed);
    x.resize(static_cast<Eigen::Index>(n), d);
    y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = i % 2 == 0 ? 1 : -1;
        for (Eigen::Index j = 0; j < d; ++j) {
            x(static_cast<Eigen::Index>(i), j) = y[i] * sep + rng.normal();
        }
    }
}

// --- dimension contract ---------------------------------------------------------------

std::string check_dimensions(Outcome& o) {
    SyntheticCorpusOptions opts;
    std::vector<AudioClip> clips = {synthesize_tonal_clip(1, 220.0, opts), synthesize_noise_clip(2, opts),
                                    sine(440.0, 16000, 0.4), sine(1000.0, 48000, 2.5)};
    const StubRunner runner(7);
    double worst = 0.0;
    for (std::size_t c = 0; c < clips.size(); ++c) {
        const auto start = Clock::now();
        const auto acoustic = extract_acoustic(clips[c]);
        const auto embedding = extract_embedding(clips[c], runner);
        std::map<FeatureSetId, std::size_t> widths;
        for (auto set : kAllFeatureSets) {
            widths[set] = assemble_features(set, acoustic, embedding).size();
        }
        const double elapsed = seconds_since(start);
        worst = std::max(worst, elapsed);
        const std::string tag = "clip " + std::to_string(c);
        o.require(acoustic.values.size() == 477, tag + " acoustic " + std::to_string(acoustic.values.size()));
        o.require(embedding.values.size() == 1024, tag + " embedding " + std::to_string(embedding.values.size()));
        o.require(widths[FeatureSetId::F1] == 1024, tag + " F1");
        o.require(widths[FeatureSetId::F2] == 1027, tag + " F2");
        o.require(widths[FeatureSetId::F3] == 1215, tag + " F3");
        o.require(widths[FeatureSetId::F4] == 1501, tag + " F4");
        o.require(elapsed < 1.0, tag + " took " + fmt(elapsed) + " s");
    }
    return "477/1024/{1024,1027,1215,1501} on " + std::to_string(clips.size()) + " clips, slowest " + fmt(worst, 3) +
           " s";
}

// --- DSP oracles --------------------------------------------------------------------

std::string check_dsp(Outcome& o) {
    const auto start = Clock::now();
    const int sr = 22050;
    for (double f : {123.4, 441.0, 2000.7}) {
        const auto clip = sine(f, sr, 0.73);
        const double bin = static_cast<double>(sr) / static_cast<double>(clip.samples.size());
        const double p = dominant_period(clip);
        o.require(std::abs(p - f) <= bin, "dominant_period " + fmt(p) + " vs " + fmt(f));
    }

    double worst_zcr = 0.0;
    for (double f : {300.0, 1000.0, 3000.0}) {
        const auto frames = frame_signal(sine(f, sr, 1.0, 0.5, 0.3), 2048, 512, false);
        const double expected = 2.0 * f / sr;
        for (double v : zcr_series(frames).values) {
            worst_zcr = std::max(worst_zcr, std::abs(v - expected) / expected);
        }
    }
    o.require(worst_zcr <= 0.05, "zcr relative error " + fmt(worst_zcr));

    MelSpectrogram mel;
    mel.n_mels = 128;
    mel.n_frames = 4;
    mel.energies.assign(mel.n_mels * mel.n_frames, 0.0);
    for (std::size_t f = 0; f < mel.n_frames; ++f) {
        std::fill_n(mel.energies.begin() + static_cast<std::ptrdiff_t>(f * mel.n_mels), mel.n_mels,
                    -30.0 + 7.0 * static_cast<double>(f));
    }
    double worst_mfcc = 0.0;
    const auto mfcc = mfcc_series(mel, kMfccCount);
    for (std::size_t c = 1; c < mfcc.size(); ++c) {
        for (double v : mfcc[c].values) {
            worst_mfcc = std::max(worst_mfcc, std::abs(v));
        }
    }
    o.require(worst_mfcc < 1e-9, "mfcc higher coefficient " + fmt(worst_mfcc));

    Rng rng(5);
    AudioClip noise{std::vector<double>(12000), sr};
    for (double& v : noise.samples) {
        v = 2.0 * rng.uniform() - 1.0;
    }
    const std::size_t n_fft = 2048;
    const auto frames = frame_signal(noise, n_fft, 512, true);
    const auto spec = stft(frames, n_fft);
    const auto win = hann_window(n_fft);
    double worst_parseval = 0.0;
    for (std::size_t f = 0; f < frames.n_frames; ++f) {
        const auto fr = frames.frame(f);
        double time_energy = 0.0;
        for (std::size_t i = 0; i < n_fft; ++i) {
            time_energy += (fr[i] * win[i]) * (fr[i] * win[i]);
        }
        double freq_energy = 0.0;
        for (std::size_t k = 0; k < spec.n_bins; ++k) {
            const double m2 = spec.at(k, f) * spec.at(k, f);
            freq_energy += (k == 0 || k == n_fft / 2) ? m2 : 2.0 * m2;
        }
        freq_energy /= static_cast<double>(n_fft);
        worst_parseval = std::max(worst_parseval, std::abs(freq_energy - time_energy) / time_energy);
    }
    o.require(worst_parseval <= 1e-6, "parseval relative error " + fmt(worst_parseval));

    const double elapsed = seconds_since(start);
    o.require(elapsed < 10.0, "took " + fmt(elapsed) + " s");
    return "zcr err " + fmt(worst_zcr, 3) + ", mfcc max " + fmt(worst_mfcc, 3) + ", parseval err " +
           fmt(worst_parseval, 3) + ", " + fmt(elapsed, 3) + " s";
}

// --- AUC oracle -----------------------------------------------------------------------

double pair_count_auc(const std::vector<double>& s, const std::vector<int>& y) {
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[i] == 1 && y[j] == -1) {
                pairs += 1.0;
                wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            }
        }
    }
    return wins / pairs;
}

std::string check_auc(Outcome& o) {
    Rng rng(2024);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.index(49);
        std::vector<double> s(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng.index(8)) * 0.125;
            y[i] = rng.index(2) ? 1 : -1;
        }
        y[0] = 1;
        y[1] = -1;
        rng.shuffle(y);
        mismatches += auc(s, y) != pair_count_auc(s, y);
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    return "1000 instances, " + std::to_string(mismatches) + " mismatches";
}

// --- classifier oracles -------------------------------------------------------------

double kernel_oracle(const SvmParams& p, const Matrix& x, Eigen::Index i, Eigen::Index j) {
    const double dot = x.row(i).dot(x.row(j));
    switch (p.kernel) {
    case SvmKernel::Rbf: return std::exp(-p.gamma * (x.row(i) - x.row(j)).squaredNorm());
    case SvmKernel::Poly: return std::pow(p.gamma * dot + 1.0, p.degree);
    case SvmKernel::Sigmoid: return std::tanh(p.gamma * dot + 1.0);
    }
    return 0.0;
}

double kkt_residual(const Matrix& x, const Labels& y, const SvmParams& p, const SvmDual& dual) {
    double worst = 0.0, balance = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double f = dual.bias;
        for (Eigen::Index j = 0; j < x.rows(); ++j) {
            f += dual.alpha[j] * y[j] * kernel_oracle(p, x, i, j);
        }
        const double m = y[i] * f;
        const double a = dual.alpha[i];
        balance += a * y[i];
        if (a < -1e-12 || a > p.C + 1e-12) {
            return std::numeric_limits<double>::infinity();
        }
        if (a <= 1e-12) {
            worst = std::max(worst, 1.0 - m);
        } else if (a >= p.C - 1e-12) {
            worst = std::max(worst, m - 1.0);
        } else {
            worst = std::max(worst, std::abs(m - 1.0));
        }
    }
    return std::max(worst, std::abs(balance));
}

std::string check_classifiers(Outcome& o) {
    Rng rng(99);
    double worst_kkt = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 4 + rng.index(17);
        Matrix x;
        Labels y;
        blobs(n, 1 + static_cast<Eigen::Index>(rng.index(4)), 0.7, 500 + trial, x, y);
        SvmParams p;
        p.kernel = static_cast<SvmKernel>(rng.index(3));
        p.C = std::pow(10.0, static_cast<double>(rng.index(3)) - 1.0);
        p.gamma = std::pow(10.0, static_cast<double>(rng.index(3)) - 2.0);
        p.degree = 2 + static_cast<int>(rng.index(3));
        worst_kkt = std::max(worst_kkt, kkt_residual(x, y, p, solve_svm_dual(x, y, p)));
    }
    o.require(worst_kkt <= 1e-3, "svm kkt " + fmt(worst_kkt));

    double worst_grad = 0.0;
    bool monotone = true;
    for (double C : {0.01, 1.0, 100.0}) {
        Matrix x;
        Labels y;
        blobs(60, 5, 0.4, 11, x, y);
        LogRegParams p;
        p.C = C;
        LogRegTrace trace;
        train_logreg(x, y, p, 0, &trace);
        for (std::size_t i = 1; i < trace.objective.size(); ++i) {
            monotone = monotone && trace.objective[i] <= trace.objective[i - 1];
        }
        worst_grad = std::max(worst_grad, trace.gradient_norm);
    }
    o.require(monotone, "lr objective increased");
    o.require(worst_grad <= 1e-5, "lr gradient norm " + fmt(worst_grad));

    Matrix bx;
    Labels by;
    blobs(100, 2, 2.0, 31, bx, by);
    const double rf_auc = auc(predict_scores(train_rf(bx, by, RfParams{100, 2, 10, SplitCriterion::Gini}, 3), bx), by);
    const double ab_auc = auc(predict_scores(train_adaboost(bx, by, AbParams{50, 1.0}), bx), by);
    o.require(rf_auc >= 0.99, "rf train auc " + fmt(rf_auc));
    o.require(ab_auc >= 0.99, "ab train auc " + fmt(ab_auc));

    Matrix xor_x(4, 2);
    xor_x << 1.03, 0.98, -0.97, -1.04, 0.99, -1.01, -1.02, 0.96;
    const Labels xor_y = {1, 1, -1, -1};
    const bool xor_ok = predict_labels(train_adaboost(xor_x, xor_y, AbParams{50, 1.0}), xor_x) == xor_y;
    o.require(xor_ok, "ab xor misclassified");
    return "svm kkt " + fmt(worst_kkt, 3) + ", lr grad " + fmt(worst_grad, 3) + ", rf auc " + fmt(rf_auc) +
           ", ab auc " + fmt(ab_auc) + ", xor " + (xor_ok ? "solved" : "unsolved");
}

// --- end-to-end fixture ---------------------------------------------------------------

struct Fixture {
    fs::path manifest;
    fs::path features;
    fs::path config;
    fs::path report;
    bool ready = false;
    double extract_seconds = 0.0;
};

bool run_cli(int code, const std::ostringstream& err, Outcome& o, const std::string& what) {
    if (code != cli::kExitOk) {
        o.require(false, what + " exit " + std::to_string(code) + ": " + err.str());
        return false;
    }
    return true;
}

std::string check_end_to_end(Outcome& o, Fixture& fx, const fs::path& work, const fs::path& config) {
    const auto start = Clock::now();
    std::ostringstream out, err;
    cli::SynthArgs synth;
    synth.out_dir = work / "corpus";
    synth.subjects = 40;
    synth.clips = 3;
    if (!run_cli(cli::cmd_synth(synth, out, err), err, o, "synth")) {
        return "corpus generation failed";
    }
    cli::ExtractArgs ex;
    ex.manifest = synth.out_dir / "manifest.csv";
    ex.out_dir = work / "features";
    ex.runner = "stub";
    ex.force = true;
    if (!run_cli(cli::cmd_extract(ex, out, err), err, o, "extract")) {
        return "extraction failed";
    }
    fx.extract_seconds = seconds_since(start);
    cli::EvaluateArgs ev;
    ev.config = config;
    ev.features = ex.out_dir;
    ev.manifest = ex.manifest;
    ev.out = work / "run_a" / "report.json";
    fs::create_directories(ev.out.parent_path());
    if (!run_cli(cli::cmd_evaluate(ev, out, err), err, o, "evaluate")) {
        return "evaluation failed";
    }
    const double elapsed = seconds_since(start);
    fx = Fixture{ex.manifest, ex.out_dir, config, ev.out, true, fx.extract_seconds};

    const auto report = report_from_json(read_file(ev.out));
    const double mean_auc = report.auc.mean;
    o.require(mean_auc >= 0.90, "mean auc " + fmt(mean_auc));
    o.require(report.splits.size() == report.config.outer_shuffles, "split rows");
    o.require(elapsed <= 600.0, "took " + fmt(elapsed) + " s");
    return "mean auc " + fmt(mean_auc) + " (std " + fmt(report.auc.std, 3) + ") over " +
           std::to_string(report.splits.size()) + " splits, " + fmt(elapsed, 4) + " s (extract " +
           fmt(fx.extract_seconds, 3) + " s)";
}

std::string check_protocol(Outcome& o, const Fixture& fx, const fs::path& work) {
    if (!fx.ready) {
        o.require(false, "end-to-end fixture unavailable");
        return "not run";
    }
    const auto report = report_from_json(read_file(fx.report));
    const std::string json_a = read_file(fx.report);
    o.require(report.config.outer_shuffles >= 10, "fewer than 10 outer splits");
    o.require(report.leakage_checks > 0, "no leakage checks recorded");
    o.require(report.leakage_violations == 0, std::to_string(report.leakage_violations) + " leakage violations");

    std::size_t unbalanced = 0;
    for (const auto& s : report.splits) {
        unbalanced += s.dev_negatives != s.dev_positives || s.test_negatives != s.test_positives ||
                      s.dev_positives == 0 || s.test_positives == 0;
    }
    o.require(unbalanced == 0, std::to_string(unbalanced) + " splits with unequal class counts");

    std::ostringstream out, err;
    cli::EvaluateArgs ev;
    ev.config = fx.config;
    ev.features = fx.features;
    ev.manifest = fx.manifest;
    ev.out = work / "run_b" / "report.json";
    fs::create_directories(ev.out.parent_path());
    bool identical = false;
    if (run_cli(cli::cmd_evaluate(ev, out, err), err, o, "repeat evaluate")) {
        identical = read_file(ev.out) == json_a &&
                    read_file(fx.report.parent_path() / "report.csv") == read_file(ev.out.parent_path() / "report.csv");
        for (std::size_t s = 0; s < report.splits.size(); ++s) {
            char name[32];
            std::snprintf(name, sizeof name, "split_%02zu.rspm", s);
            const auto a = fx.report.parent_path() / "report_models" / name;
            const auto b = ev.out.parent_path() / "report_models" / name;
            identical = identical && fs::exists(a) && read_file(a) == read_file(b);
        }
        o.require(identical, "repeat run differs");
    }

    auto null_config = load_config(fx.config);
    null_config.permute_labels = true;
    const auto null_path = work / "null_config.json";
    std::ofstream(null_path) << config_to_json(null_config);
    ev.config = null_path;
    ev.out = work / "null" / "report.json";
    fs::create_directories(ev.out.parent_path());
    double null_auc = -1.0;
    if (run_cli(cli::cmd_evaluate(ev, out, err), err, o, "null evaluate")) {
        const auto null_report = report_from_json(read_file(ev.out));
        null_auc = null_report.auc.mean;
        o.require(null_auc >= 0.35 && null_auc <= 0.65, "null mean auc " + fmt(null_auc));
        o.require(null_report.leakage_violations == 0, "null run leakage");
    }
    return std::to_string(report.leakage_checks) + " subject-overlap checks, " +
           std::to_string(report.leakage_violations) + " violations, " + std::to_string(unbalanced) +
           " unbalanced splits, repeat " + (identical ? "byte-identical" : "different") + ", null auc " +
           fmt(null_auc);
}

std::string check_footprint(Outcome& o, const Fixture& fx, const fs::path& work) {
    if (!fx.ready) {
        o.require(false, "end-to-end fixture unavailable");
        return "not run";
    }
    std::ostringstream out, err;
    cli::FootprintArgs fa;
    fa.report = fx.report;
    fa.features = fx.features;
    fa.out = work / "footprint.csv";
    if (!run_cli(cli::cmd_footprint(fa, out, err), err, o, "footprint")) {
        return "footprint failed";
    }
    auto rows = csv::read_file(fa.out.string());
    if (!rows.empty()) {
        rows.erase(rows.begin());
    }
    o.require(rows.size() == 20, std::to_string(rows.size()) + " rows");
    std::map<std::string, std::vector<double>> bytes;
    double lr_max = 0.0;
    for (const auto& row : rows) {
        const std::string kind = row.at(0);
        const double b = std::stod(row.at(2));
        bytes[kind].push_back(b);
        if (kind == to_string(ClassifierKind::LogReg)) {
            lr_max = std::max(lr_max, b);
        }
    }
    for (const auto& [kind, values] : bytes) {
        o.require(values.size() == 5, kind + " has " + std::to_string(values.size()) + " pca levels");
    }
    o.require(bytes.count(to_string(ClassifierKind::LogReg)) == 1, "no lr rows");
    o.require(lr_max <= 100000.0, "lr uses " + fmt(lr_max, 8) + " bytes");

    std::vector<std::pair<double, std::string>> means;
    for (const auto& [kind, values] : bytes) {
        double sum = 0.0;
        for (double v : values) {
            sum += v;
        }
        means.emplace_back(sum / static_cast<double>(values.size()), kind);
    }
    std::sort(means.rbegin(), means.rend());
    std::string order;
    for (const auto& [m, kind] : means) {
        order += (order.empty() ? "" : " > ") + kind + " " + fmt(m, 7);
    }
    const bool top_two = means.size() == 4 &&
                         ((means[0].second == "ab" && means[1].second == "rf") ||
                          (means[0].second == "rf" && means[1].second == "ab"));
    o.require(top_two, "largest two are not ab and rf");
    return std::to_string(rows.size()) + " rows, lr max " + fmt(lr_max, 7) + " bytes, mean bytes " + order;
}

// --- optional real-data check ---------------------------------------------------------

void check_data_present() {
    const char* manifest_env = std::getenv("RESPIRA_ACCEPTANCE_MANIFEST");
    const char* features_env = std::getenv("RESPIRA_ACCEPTANCE_FEATURES");
    const std::string name = "data-present COSWARA+Virufy";
    if (manifest_env == nullptr || features_env == nullptr) {
        std::cout << "SKIP " << name
                  << ": set RESPIRA_ACCEPTANCE_MANIFEST and RESPIRA_ACCEPTANCE_FEATURES to run" << std::endl;
        return;
    }
    criterion(name, [&](Outcome& o) {
        const auto manifest = parse_manifest(manifest_env);
        std::map<std::pair<std::string, HealthLabel>, std::size_t> counts;
        for (const auto& row : manifest_summary(manifest)) {
            if (row.modality == RecordingType::Cough) {
                counts[{row.dataset, row.label}] += row.count;
            }
        }
        const auto count = [&](const std::string& ds, HealthLabel l) { return counts[{ds, l}]; };
        o.require(count("coswara", HealthLabel::Healthy) == 2758 && count("coswara", HealthLabel::Covid) == 860,
                  "coswara counts " + std::to_string(count("coswara", HealthLabel::Healthy)) + "/" +
                      std::to_string(count("coswara", HealthLabel::Covid)));
        o.require(count("virufy", HealthLabel::Healthy) == 7 && count("virufy", HealthLabel::Covid) == 62,
                  "virufy counts " + std::to_string(count("virufy", HealthLabel::Healthy)) + "/" +
                      std::to_string(count("virufy", HealthLabel::Covid)));

        ExperimentConfig config;
        config.feature_sets = {FeatureSetId::F3};
        config.pca = {0.99};
        config.grid = ClassifierGrid{};
        config.grid.lr = ClassifierGrid::full().lr;
        config.seed = 2022;
        const auto report = run_experiment(config, manifest, FeatureStore::load(features_env));
        o.require(report.auc.mean >= 0.95, "auc " + fmt(report.auc.mean));
        return "F3+LR+PCA .99 auc " + fmt(report.auc.mean) + " (std " + fmt(report.auc.std, 3) + ")";
    });
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: respira_acceptance <work dir> [experiment config]" << std::endl;
        return 2;
    }
    const fs::path work = argv[1];
    fs::remove_all(work);
    fs::create_directories(work);

    fs::path config;
    if (argc >= 3) {
        config = argv[2];
    } else {
        config = work / "config.json";
        ExperimentConfig c;
        c.seed = 2022;
        std::ofstream(config) << config_to_json(c);
    }

    criterion("dimension contract", check_dimensions);
    criterion("dsp oracles", check_dsp);
    criterion("auc oracle", check_auc);
    criterion("classifier oracles", check_classifiers);

    Fixture fx;
    criterion("end-to-end synthetic experiment",
              [&](Outcome& o) { return check_end_to_end(o, fx, work, config); });
    criterion("protocol properties", [&](Outcome& o) { return check_protocol(o, fx, work); });
    criterion("footprint ordinals", [&](Outcome& o) { return check_footprint(o, fx, work); });
    check_data_present();

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
