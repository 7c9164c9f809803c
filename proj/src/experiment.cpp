#include "respira/experiment.hpp"

#include "respira/csv.hpp"
#include "respira/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace respira {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// --- config ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
    if (modalities.empty()) {
        throw std::invalid_argument("config: modalities is empty");
    }
    if (feature_sets.empty()) {
        throw std::invalid_argument("config: feature_sets is empty");
    }
    if (pca.empty()) {
        throw std::invalid_argument("config: pca is empty");
    }
    for (double p : pca) {
        if (!(p > 0.0 && p <= 1.0)) {
            throw std::invalid_argument("config: pca coefficients must be in (0, 1]");
        }
    }
    if (outer_shuffles < 1) {
        throw std::invalid_argument("config: outer_shuffles must be at least 1");
    }
    if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
        throw std::invalid_argument("config: dev_fraction must be in (0, 1)");
    }
    if (inner_folds < 2) {
        throw std::invalid_argument("config: inner_folds must be at least 2");
    }
    if (jobs < 1) {
        throw std::invalid_argument("config: jobs must be at least 1");
    }
    grid.validate();
}

namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(const json& j, const char* key, Parse parse) {
    if (!j.is_array()) {
        throw std::invalid_argument(std::string("config: '") + key + "' must be a list");
    }
    std::vector<T> out;
    for (const auto& v : j) {
        out.push_back(parse(v));
    }
    return out;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) {
        throw std::invalid_argument("config: '" + where + "' must be an object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; })) {
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
        }
    }
}

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) {
        throw std::invalid_argument("config: '" + where + "' is missing '" + key + "'");
    }
    return j.at(key);
}

auto as_double = [](const json& v) { return v.get<double>(); };
auto as_int = [](const json& v) { return v.get<int>(); };

ClassifierGrid parse_grid(const json& g) {
    if (g.is_string()) {
        if (g.get<std::string>() == "full") {
            return ClassifierGrid::full();
        }
        throw std::invalid_argument("config: unknown grid preset '" + g.get<std::string>() + "'");
    }
    check_keys(g, {"svm", "lr", "rf", "ab"}, "grid");
    ClassifierGrid out;
    if (g.contains("svm")) {
        const auto& s = g["svm"];
        check_keys(s, {"kernel", "C", "gamma", "degree"}, "grid.svm");
        SvmGrid sg;
        sg.kernels = parse_list<SvmKernel>(require(s, "kernel", "grid.svm"), "kernel",
                                           [](const json& v) { return parse_svm_kernel(v.get<std::string>()); });
        sg.C = parse_list<double>(require(s, "C", "grid.svm"), "C", as_double);
        sg.gamma = parse_list<double>(require(s, "gamma", "grid.svm"), "gamma", as_double);
        if (s.contains("degree")) {
            sg.degree = parse_list<int>(s["degree"], "degree", as_int);
        }
        out.svm = sg;
    }
    if (g.contains("lr")) {
        const auto& l = g["lr"];
        check_keys(l, {"penalty", "C"}, "grid.lr");
        LrGrid lg;
        lg.penalties = parse_list<Penalty>(require(l, "penalty", "grid.lr"), "penalty",
                                           [](const json& v) { return parse_penalty(v.get<std::string>()); });
        lg.C = parse_list<double>(require(l, "C", "grid.lr"), "C", as_double);
        out.lr = lg;
    }
    if (g.contains("rf")) {
        const auto& r = g["rf"];
        check_keys(r, {"n_estimators", "min_samples_split", "max_depth", "criterion"}, "grid.rf");
        RfGrid rg;
        rg.n_estimators = parse_list<int>(require(r, "n_estimators", "grid.rf"), "n_estimators", as_int);
        rg.min_samples_split = parse_list<int>(require(r, "min_samples_split", "grid.rf"), "min_samples_split", as_int);
        rg.max_depth = parse_list<int>(require(r, "max_depth", "grid.rf"), "max_depth", as_int);
        rg.criteria = parse_list<SplitCriterion>(require(r, "criterion", "grid.rf"), "criterion",
                                                 [](const json& v) { return parse_criterion(v.get<std::string>()); });
        out.rf = rg;
    }
    if (g.contains("ab")) {
        const auto& a = g["ab"];
        check_keys(a, {"n_estimators", "learning_rate"}, "grid.ab");
        AbGrid ag;
        ag.n_estimators = parse_list<int>(require(a, "n_estimators", "grid.ab"), "n_estimators", as_int);
        ag.learning_rate = parse_list<double>(require(a, "learning_rate", "grid.ab"), "learning_rate", as_double);
        out.ab = ag;
    }
    return out;
}

ordered_json grid_to_json(const ClassifierGrid& g) {
    ordered_json out = ordered_json::object();
    if (g.svm) {
        ordered_json s;
        s["kernel"] = ordered_json::array();
        for (auto k : g.svm->kernels) {
            s["kernel"].push_back(to_string(k));
        }
        s["C"] = g.svm->C;
        s["gamma"] = g.svm->gamma;
        s["degree"] = g.svm->degree;
        out["svm"] = s;
    }
    if (g.lr) {
        ordered_json l;
        l["penalty"] = ordered_json::array();
        for (auto p : g.lr->penalties) {
            l["penalty"].push_back(to_string(p));
        }
        l["C"] = g.lr->C;
        out["lr"] = l;
    }
    if (g.rf) {
        ordered_json r;
        r["n_estimators"] = g.rf->n_estimators;
        r["min_samples_split"] = g.rf->min_samples_split;
        r["max_depth"] = g.rf->max_depth;
        r["criterion"] = ordered_json::array();
        for (auto c : g.rf->criteria) {
            r["criterion"].push_back(to_string(c));
        }
        out["rf"] = r;
    }
    if (g.ab) {
        ordered_json a;
        a["n_estimators"] = g.ab->n_estimators;
        a["learning_rate"] = g.ab->learning_rate;
        out["ab"] = a;
    }
    return out;
}

ExperimentConfig config_from_json(const json& j) {
    check_keys(j,
               {"task", "modalities", "feature_sets", "pca", "outer_shuffles", "dev_fraction", "inner_folds", "seed",
                "balance", "permute_labels", "grid", "jobs"},
               "config");
    ExperimentConfig c;
    c.task = j.value("task", c.task);
    if (j.contains("modalities")) {
        c.modalities = parse_list<Modality>(j["modalities"], "modalities",
                                            [](const json& v) { return parse_modality(v.get<std::string>()); });
    }
    if (j.contains("feature_sets")) {
        c.feature_sets = parse_list<FeatureSetId>(j["feature_sets"], "feature_sets",
                                                  [](const json& v) { return parse_feature_set(v.get<std::string>()); });
    }
    if (j.contains("pca")) {
        c.pca = parse_list<double>(j["pca"], "pca", as_double);
    }
    c.outer_shuffles = j.value("outer_shuffles", c.outer_shuffles);
    c.dev_fraction = j.value("dev_fraction", c.dev_fraction);
    c.inner_folds = j.value("inner_folds", c.inner_folds);
    c.seed = j.value("seed", c.seed);
    if (j.contains("balance")) {
        const auto b = j["balance"].get<std::string>();
        if (b == "after_split") {
            c.balance = BalanceOrder::AfterSplit;
        } else if (b == "before_split") {
            c.balance = BalanceOrder::BeforeSplit;
        } else {
            throw std::invalid_argument("config: balance must be after_split or before_split");
        }
    }
    c.permute_labels = j.value("permute_labels", c.permute_labels);
    c.jobs = j.value("jobs", c.jobs);
    if (j.contains("grid")) {
        c.grid = parse_grid(j["grid"]);
    }
    return c;
}

ordered_json config_json(const ExperimentConfig& c) {
    ordered_json j;
    j["task"] = c.task;
    j["modalities"] = ordered_json::array();
    for (auto m : c.modalities) {
        j["modalities"].push_back(to_string(m));
    }
    j["feature_sets"] = ordered_json::array();
    for (auto s : c.feature_sets) {
        j["feature_sets"].push_back(to_string(s));
    }
    j["pca"] = c.pca;
    j["outer_shuffles"] = c.outer_shuffles;
    j["dev_fraction"] = c.dev_fraction;
    j["inner_folds"] = c.inner_folds;
    j["seed"] = c.seed;
    j["balance"] = c.balance == BalanceOrder::AfterSplit ? "after_split" : "before_split";
    j["permute_labels"] = c.permute_labels;
    j["grid"] = grid_to_json(c.grid);
    return j;
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        c = config_from_json(j);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot read config " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

// --- evaluation data ------------------------------------------------------------------

EvalData build_eval_data(const Manifest& manifest, const FeatureStore& store, Modality modality) {
    EvalData d;
    d.modality = modality;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> missing;
    auto row_of = [&](const SampleRecord& r, std::vector<double>& out) {
        if (!store.has_acoustic(r.sample_id) || !store.has_embedding(r.sample_id)) {
            missing.push_back(r.sample_id);
            return false;
        }
        const auto& e = store.embedding(r.sample_id);
        const auto& a = store.acoustic(r.sample_id);
        out.insert(out.end(), e.begin(), e.end());
        out.insert(out.end(), a.begin(), a.end());
        return true;
    };

    if (modality != Modality::CoughBreath) {
        const RecordingType want = modality == Modality::Cough ? RecordingType::Cough : RecordingType::Breath;
        for (const auto& r : manifest.records) {
            if (r.modality != want) {
                continue;
            }
            std::vector<double> row;
            if (row_of(r, row)) {
                rows.push_back(std::move(row));
                d.items.push_back({r.subject_id, label_value(r.label)});
                d.sample_ids.push_back(r.sample_id);
            }
        }
    } else {
        std::map<std::pair<std::string, std::string>, std::pair<std::vector<const SampleRecord*>,
                                                                std::vector<const SampleRecord*>>>
            groups;
        for (const auto& r : manifest.records) {
            auto& g = groups[{r.subject_id, r.session_id}];
            if (r.modality == RecordingType::Cough) {
                g.first.push_back(&r);
            } else if (r.modality == RecordingType::Breath) {
                g.second.push_back(&r);
            }
        }
        auto by_id = [](const SampleRecord* a, const SampleRecord* b) { return a->sample_id < b->sample_id; };
        for (auto& [key, g] : groups) {
            std::sort(g.first.begin(), g.first.end(), by_id);
            std::sort(g.second.begin(), g.second.end(), by_id);
            const std::size_t n = std::min(g.first.size(), g.second.size());
            for (std::size_t i = 0; i < n; ++i) {
                const auto* c = g.first[i];
                const auto* b = g.second[i];
                if (c->label != b->label) {
                    throw std::invalid_argument("cough and breath labels differ for subject " + c->subject_id);
                }
                std::vector<double> row;
                if (row_of(*c, row) && row_of(*b, row)) {
                    rows.push_back(std::move(row));
                    d.items.push_back({c->subject_id, label_value(c->label)});
                    d.sample_ids.push_back(c->sample_id + "+" + b->sample_id);
                }
            }
        }
    }
    if (!missing.empty()) {
        throw std::invalid_argument("incomplete feature store: " + std::to_string(missing.size()) +
                                    " samples lack features (first: " + missing.front() + ")");
    }
    if (rows.empty()) {
        throw std::invalid_argument("no samples for modality " + to_string(modality));
    }
    d.x = rows_to_matrix(rows);
    return d;
}

MeanStd mean_std(const std::vector<double>& v) {
    MeanStd m;
    if (v.empty()) {
        return m;
    }
    for (double x : v) {
        m.mean += x;
    }
    m.mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) {
        ss += (x - m.mean) * (x - m.mean);
    }
    m.std = std::sqrt(ss / static_cast<double>(v.size()));
    return m;
}

std::pair<Modality, FeatureSetId> EvaluationReport::best_modality_set() const {
    if (splits.empty()) {
        throw std::invalid_argument("report has no splits");
    }
    std::map<std::pair<Modality, FeatureSetId>, std::size_t> count;
    for (const auto& s : splits) {
        ++count[{s.modality, s.set}];
    }
    std::pair<Modality, FeatureSetId> best = {splits.front().modality, splits.front().set};
    std::size_t best_n = 0;
    for (auto m : config.modalities) {
        for (auto f : config.feature_sets) {
            auto it = count.find({m, f});
            if (it != count.end() && it->second > best_n) {
                best = it->first;
                best_n = it->second;
            }
        }
    }
    return best;
}

// --- protocol wiring ------------------------------------------------------------------

namespace {

struct Prepared {
    std::vector<EvalData> data;
    std::vector<LabeledItem> combined; // all modalities, data[m] rows at offset[m]
    std::vector<std::size_t> offset;
};

Prepared prepare(const ExperimentConfig& config, const Manifest& manifest, const FeatureStore& store) {
    Prepared p;
    for (auto m : config.modalities) {
        p.data.push_back(build_eval_data(manifest, store, m));
    }
    if (config.permute_labels) {
        std::map<std::string, int> subject_label;
        for (const auto& d : p.data) {
            for (const auto& it : d.items) {
                subject_label.emplace(it.subject_id, it.label);
            }
        }
        std::vector<int> labels;
        for (const auto& [s, l] : subject_label) {
            labels.push_back(l);
        }
        Rng rng(derive_seed(config.seed, "permute-labels"));
        rng.shuffle(labels);
        std::size_t i = 0;
        for (auto& [s, l] : subject_label) {
            l = labels[i++];
        }
        for (auto& d : p.data) {
            for (auto& it : d.items) {
                it.label = subject_label.at(it.subject_id);
            }
        }
    }
    for (const auto& d : p.data) {
        p.offset.push_back(p.combined.size());
        p.combined.insert(p.combined.end(), d.items.begin(), d.items.end());
    }
    return p;
}

struct SplitPlan {
    std::vector<IndexList> dev;  // per modality, balanced
    std::vector<IndexList> test; // per modality, balanced
    std::vector<std::vector<Fold>> folds;
    std::size_t leakage_checks = 0;
    std::size_t leakage_violations = 0;
};

std::set<std::string> subjects_of(const std::vector<LabeledItem>& items, const IndexList& idx) {
    std::set<std::string> s;
    for (auto i : idx) {
        s.insert(items[i].subject_id);
    }
    return s;
}

SplitPlan plan_split(const ExperimentConfig& config, const Prepared& p, std::size_t split) {
    const std::uint64_t seed = derive_seed(config.seed, "outer", {split});
    const std::size_t nm = p.data.size();
    SplitPlan plan;
    plan.dev.resize(nm);
    plan.test.resize(nm);
    plan.folds.resize(nm);

    IndexList pool(p.combined.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        pool[i] = i;
    }
    if (config.balance == BalanceOrder::BeforeSplit) {
        IndexList kept;
        for (std::size_t m = 0; m < nm; ++m) {
            IndexList local(p.data[m].items.size());
            for (std::size_t i = 0; i < local.size(); ++i) {
                local[i] = i;
            }
            for (auto i : undersample_balance(p.data[m].items, local, derive_seed(seed, "balance", {m}))) {
                kept.push_back(p.offset[m] + i);
            }
        }
        pool = kept;
    }
    const SubjectSplit outer = subject_split(p.combined, pool, seed, config.dev_fraction);
    const auto dev_subjects = subjects_of(p.combined, outer.dev);

    IndexList combined_dev;
    for (std::size_t m = 0; m < nm; ++m) {
        const auto& items = p.data[m].items;
        IndexList dev, test;
        for (auto i : pool) {
            if (i < p.offset[m] || i >= p.offset[m] + items.size()) {
                continue;
            }
            const std::size_t local = i - p.offset[m];
            (dev_subjects.count(items[local].subject_id) ? dev : test).push_back(local);
        }
        if (config.balance == BalanceOrder::AfterSplit) {
            dev = undersample_balance(items, dev, derive_seed(seed, "balance-dev", {m}));
            test = undersample_balance(items, test, derive_seed(seed, "balance-test", {m}));
        }
        ++plan.leakage_checks;
        plan.leakage_violations += subject_overlap(items, dev, test);
        for (auto i : dev) {
            combined_dev.push_back(p.offset[m] + i);
        }
        plan.dev[m] = std::move(dev);
        plan.test[m] = std::move(test);
    }

    const auto folds = kfold_by_subject(p.combined, combined_dev, config.inner_folds, derive_seed(seed, "inner"));
    std::map<std::string, std::size_t> fold_of;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        for (auto i : folds[f].validation) {
            fold_of[p.combined[i].subject_id] = f;
        }
    }
    for (std::size_t m = 0; m < nm; ++m) {
        plan.folds[m].resize(folds.size());
        for (auto i : plan.dev[m]) {
            const std::size_t f = fold_of.at(p.data[m].items[i].subject_id);
            for (std::size_t g = 0; g < folds.size(); ++g) {
                (g == f ? plan.folds[m][g].validation : plan.folds[m][g].train).push_back(i);
            }
        }
    }
    return plan;
}

GridSpec grid_spec(const ExperimentConfig& config, std::uint64_t seed) {
    GridSpec spec;
    spec.feature_sets = config.feature_sets;
    spec.pca = config.pca;
    spec.grid = config.grid;
    spec.jobs = config.jobs;
    spec.seed = seed;
    return spec;
}

MetricSet evaluate(const Pipeline& pipe, const EvalData& data, const IndexList& rows, FeatureSetId set) {
    const auto scores = pipe.scores(data.columns(set, rows));
    const auto labels = labels_of(data, rows);
    std::vector<int> preds(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        preds[i] = label_from_score(pipe.classifier.kind(), scores[i]);
    }
    return compute_metrics(scores, preds, labels);
}

} // namespace

EvaluationReport run_experiment(const ExperimentConfig& config, const Manifest& manifest, const FeatureStore& store) {
    config.validate();
    const Prepared p = prepare(config, manifest, store);
    EvaluationReport report;
    report.config = config;
    report.manifest = manifest;

    for (std::size_t s = 0; s < config.outer_shuffles; ++s) {
        const SplitPlan plan = plan_split(config, p, s);
        std::vector<ModalityView> views;
        for (std::size_t m = 0; m < p.data.size(); ++m) {
            views.push_back({&p.data[m], plan.dev[m], plan.folds[m]});
        }
        const std::uint64_t seed = derive_seed(config.seed, "outer", {s});
        const GridSearchResult grid = grid_search(views, grid_spec(config, derive_seed(seed, "grid")));
        report.leakage_checks += plan.leakage_checks + grid.leakage_checks;
        report.leakage_violations += plan.leakage_violations + grid.leakage_violations;
        report.skipped_folds += grid.skipped_folds;
        if (report.leakage_violations != 0) {
            throw std::logic_error("subject leakage detected in outer split " + std::to_string(s));
        }

        const auto& best = grid.best_candidate();
        const std::size_t m = best.view;
        const Pipeline pipe =
            fit_pipeline(p.data[m], plan.dev[m], best.set, best.pca, best.params, derive_seed(seed, "refit"));

        SplitResult row;
        row.split = s;
        row.modality = p.data[m].modality;
        row.set = best.set;
        row.pca = best.pca;
        row.params = best.params;
        row.n_components = pipe.pca.n_components();
        row.inner_auc = best.mean_auc;
        row.metrics = evaluate(pipe, p.data[m], plan.test[m], best.set);
        row.dev_samples = plan.dev[m].size();
        row.test_samples = plan.test[m].size();
        row.dev_subjects = subjects_of(p.data[m].items, plan.dev[m]).size();
        row.test_subjects = subjects_of(p.data[m].items, plan.test[m]).size();
        std::tie(row.dev_negatives, row.dev_positives) = class_counts(p.data[m].items, plan.dev[m]);
        std::tie(row.test_negatives, row.test_positives) = class_counts(p.data[m].items, plan.test[m]);
        row.model_bytes = model_size(pipe.classifier);
        report.splits.push_back(row);
        report.pipelines.push_back(serialize_pipeline(pipe));
    }

    std::vector<double> a, pr, rc;
    for (const auto& r : report.splits) {
        a.push_back(r.metrics.auc);
        pr.push_back(r.metrics.precision);
        rc.push_back(r.metrics.recall);
    }
    report.auc = mean_std(a);
    report.precision = mean_std(pr);
    report.recall = mean_std(rc);
    return report;
}

// --- report I/O -----------------------------------------------------------------------

namespace {

ordered_json params_json(const Hyperparameters& h) {
    ordered_json j;
    j["classifier"] = to_string(kind_of(h));
    if (const auto* s = std::get_if<SvmParams>(&h)) {
        j["kernel"] = to_string(s->kernel);
        j["C"] = s->C;
        j["gamma"] = s->gamma;
        j["degree"] = s->degree;
    } else if (const auto* l = std::get_if<LogRegParams>(&h)) {
        j["penalty"] = to_string(l->penalty);
        j["C"] = l->C;
    } else if (const auto* r = std::get_if<RfParams>(&h)) {
        j["n_estimators"] = r->n_estimators;
        j["min_samples_split"] = r->min_samples_split;
        j["max_depth"] = r->max_depth;
        j["criterion"] = to_string(r->criterion);
    } else {
        const auto& a = std::get<AbParams>(h);
        j["n_estimators"] = a.n_estimators;
        j["learning_rate"] = a.learning_rate;
    }
    return j;
}

Hyperparameters params_from_json(const json& j) {
    switch (parse_classifier_kind(j.at("classifier").get<std::string>())) {
    case ClassifierKind::Svm:
        return SvmParams{j.at("C").get<double>(), parse_svm_kernel(j.at("kernel").get<std::string>()),
                         j.at("gamma").get<double>(), j.at("degree").get<int>()};
    case ClassifierKind::LogReg: {
        LogRegParams l;
        l.penalty = parse_penalty(j.at("penalty").get<std::string>());
        l.C = j.at("C").get<double>();
        return l;
    }
    case ClassifierKind::RandomForest:
        return RfParams{j.at("n_estimators").get<int>(), j.at("min_samples_split").get<int>(),
                        j.at("max_depth").get<int>(), parse_criterion(j.at("criterion").get<std::string>())};
    case ClassifierKind::AdaBoost: return AbParams{j.at("n_estimators").get<int>(), j.at("learning_rate").get<double>()};
    }
    throw std::invalid_argument("bad hyperparameters");
}

ordered_json mean_std_json(const MeanStd& m) {
    ordered_json j;
    j["mean"] = m.mean;
    j["std"] = m.std;
    return j;
}

} // namespace

std::string report_to_json(const EvaluationReport& r) {
    ordered_json j;
    j["config"] = config_json(r.config);
    j["splits"] = ordered_json::array();
    for (const auto& s : r.splits) {
        ordered_json row;
        row["split"] = s.split;
        row["modality"] = to_string(s.modality);
        row["feature_set"] = to_string(s.set);
        row["pca"] = s.pca;
        row["params"] = params_json(s.params);
        row["n_components"] = s.n_components;
        row["inner_auc"] = s.inner_auc;
        row["auc"] = s.metrics.auc;
        row["precision"] = s.metrics.precision;
        row["precision_degenerate"] = s.metrics.precision_degenerate;
        row["recall"] = s.metrics.recall;
        row["dev_samples"] = s.dev_samples;
        row["test_samples"] = s.test_samples;
        row["dev_subjects"] = s.dev_subjects;
        row["test_subjects"] = s.test_subjects;
        row["dev_class_counts"] = {s.dev_negatives, s.dev_positives};
        row["test_class_counts"] = {s.test_negatives, s.test_positives};
        row["model_bytes"] = s.model_bytes;
        j["splits"].push_back(row);
    }
    j["aggregate"] = {{"auc", mean_std_json(r.auc)},
                      {"precision", mean_std_json(r.precision)},
                      {"recall", mean_std_json(r.recall)}};
    j["leakage"] = {{"checks", r.leakage_checks}, {"violations", r.leakage_violations}};
    j["skipped_folds"] = r.skipped_folds;
    j["manifest"] = ordered_json::array();
    for (const auto& rec : r.manifest.records) {
        ordered_json m;
        m["sample_id"] = rec.sample_id;
        m["subject_id"] = rec.subject_id;
        m["session_id"] = rec.session_id;
        m["label"] = to_string(rec.label);
        m["modality"] = to_string(rec.modality);
        m["path"] = rec.path;
        m["dataset"] = rec.dataset;
        if (!rec.metadata.empty()) {
            m["metadata"] = rec.metadata;
        }
        j["manifest"].push_back(m);
    }
    return j.dump(2) + "\n";
}

EvaluationReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed report: ") + e.what());
    }
    EvaluationReport r;
    try {
        r.config = config_from_json(j.at("config"));
        for (const auto& row : j.at("splits")) {
            SplitResult s;
            s.split = row.at("split").get<std::size_t>();
            s.modality = parse_modality(row.at("modality").get<std::string>());
            s.set = parse_feature_set(row.at("feature_set").get<std::string>());
            s.pca = row.at("pca").get<double>();
            s.params = params_from_json(row.at("params"));
            s.n_components = row.at("n_components").get<std::size_t>();
            s.inner_auc = row.at("inner_auc").get<double>();
            s.metrics.auc = row.at("auc").get<double>();
            s.metrics.precision = row.at("precision").get<double>();
            s.metrics.precision_degenerate = row.at("precision_degenerate").get<bool>();
            s.metrics.recall = row.at("recall").get<double>();
            s.dev_samples = row.at("dev_samples").get<std::size_t>();
            s.test_samples = row.at("test_samples").get<std::size_t>();
            s.dev_subjects = row.at("dev_subjects").get<std::size_t>();
            s.test_subjects = row.at("test_subjects").get<std::size_t>();
            s.dev_negatives = row.at("dev_class_counts").at(0).get<std::size_t>();
            s.dev_positives = row.at("dev_class_counts").at(1).get<std::size_t>();
            s.test_negatives = row.at("test_class_counts").at(0).get<std::size_t>();
            s.test_positives = row.at("test_class_counts").at(1).get<std::size_t>();
            s.model_bytes = row.at("model_bytes").get<std::size_t>();
            r.splits.push_back(s);
        }
        const auto& agg = j.at("aggregate");
        r.auc = {agg.at("auc").at("mean").get<double>(), agg.at("auc").at("std").get<double>()};
        r.precision = {agg.at("precision").at("mean").get<double>(), agg.at("precision").at("std").get<double>()};
        r.recall = {agg.at("recall").at("mean").get<double>(), agg.at("recall").at("std").get<double>()};
        r.leakage_checks = j.at("leakage").at("checks").get<std::size_t>();
        r.leakage_violations = j.at("leakage").at("violations").get<std::size_t>();
        r.skipped_folds = j.value("skipped_folds", std::size_t{0});
        for (const auto& m : j.at("manifest")) {
            SampleRecord rec;
            rec.sample_id = m.at("sample_id").get<std::string>();
            rec.subject_id = m.at("subject_id").get<std::string>();
            rec.session_id = m.at("session_id").get<std::string>();
            rec.label = parse_health_label(m.at("label").get<std::string>());
            rec.modality = parse_recording_type(m.at("modality").get<std::string>());
            rec.path = m.at("path").get<std::string>();
            rec.dataset = m.at("dataset").get<std::string>();
            if (m.contains("metadata")) {
                rec.metadata = m.at("metadata").get<std::map<std::string, std::string>>();
            }
            r.manifest.records.push_back(std::move(rec));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed report: ") + e.what());
    }
    return r;
}

std::string report_to_csv(const EvaluationReport& r) {
    std::ostringstream out;
    out << "split,modality,feature_set,pca,classifier,params,n_components,inner_auc,auc,precision,recall\n";
    for (const auto& s : r.splits) {
        out << s.split << ',' << csv::escape(to_string(s.modality)) << ',' << to_string(s.set) << ','
            << csv::format_double(s.pca) << ',' << to_string(kind_of(s.params)) << ',' << csv::escape(describe(s.params))
            << ',' << s.n_components << ',' << csv::format_double(s.inner_auc) << ','
            << csv::format_double(s.metrics.auc) << ',' << csv::format_double(s.metrics.precision) << ','
            << csv::format_double(s.metrics.recall) << '\n';
    }
    return out.str();
}

std::string report_summary_table(const EvaluationReport& r) {
    const auto [modality, set] = r.best_modality_set();
    std::map<std::pair<ClassifierKind, double>, std::size_t> count;
    for (const auto& s : r.splits) {
        if (s.modality == modality && s.set == set) {
            ++count[{kind_of(s.params), s.pca}];
        }
    }
    std::pair<ClassifierKind, double> top{};
    std::size_t top_n = 0;
    for (const auto& [k, n] : count) {
        if (n > top_n) {
            top = k;
            top_n = n;
        }
    }
    char line[256];
    std::ostringstream out;
    out << "Task      Modality       Features  Classifier  PCA   AUC           Precision     Recall\n";
    std::snprintf(line, sizeof line, "%-9s %-14s %-9s %-11s %-5.2f %.3f (%.3f)  %.3f (%.3f)  %.3f (%.3f)\n",
                  r.config.task.c_str(), to_string(modality).c_str(), to_string(set).c_str(),
                  to_string(top.first).c_str(), top.second, r.auc.mean, r.auc.std, r.precision.mean, r.precision.std,
                  r.recall.mean, r.recall.std);
    out << line;
    return out.str();
}

void write_report(const EvaluationReport& report, const std::filesystem::path& out_json) {
    if (out_json.has_parent_path()) {
        std::filesystem::create_directories(out_json.parent_path());
    }
    {
        std::ofstream out(out_json, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + out_json.string());
        }
        out << report_to_json(report);
    }
    auto csv_path = out_json;
    csv_path.replace_extension(".csv");
    {
        std::ofstream out(csv_path, std::ios::binary);
        out << report_to_csv(report);
    }
    const auto models = out_json.parent_path() / (out_json.stem().string() + "_models");
    std::filesystem::create_directories(models);
    for (std::size_t i = 0; i < report.pipelines.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "split_%02zu.rspm", i);
        write_bytes(models / name, report.pipelines[i]);
    }
}

// --- footprint ------------------------------------------------------------------------

std::vector<FootprintRow> footprint_report(const ExperimentConfig& config, const Manifest& manifest,
                                           const FeatureStore& store, Modality modality, FeatureSetId set) {
    ExperimentConfig cfg = config;
    cfg.modalities = {modality};
    cfg.feature_sets = {set};
    cfg.validate();
    const Prepared p = prepare(cfg, manifest, store);
    const SplitPlan plan = plan_split(cfg, p, 0);
    if (plan.leakage_violations != 0) {
        throw std::logic_error("subject leakage detected in footprint split");
    }
    const std::uint64_t seed = derive_seed(cfg.seed, "outer", {0});
    std::vector<ModalityView> views = {{&p.data[0], plan.dev[0], plan.folds[0]}};
    const GridSearchResult grid = grid_search(views, grid_spec(cfg, derive_seed(seed, "grid")));

    std::vector<FootprintRow> rows;
    for (auto kind : kAllClassifierKinds) {
        const bool present = (kind == ClassifierKind::Svm && cfg.grid.svm) || (kind == ClassifierKind::LogReg && cfg.grid.lr) ||
                             (kind == ClassifierKind::RandomForest && cfg.grid.rf) ||
                             (kind == ClassifierKind::AdaBoost && cfg.grid.ab);
        if (!present) {
            continue;
        }
        for (std::size_t pi = 0; pi < cfg.pca.size(); ++pi) {
            const auto& c = grid.candidates.at(select_best(grid.candidates, kind, pi));
            const Pipeline pipe = fit_pipeline(p.data[0], plan.dev[0], set, c.pca, c.params,
                                               derive_seed(seed, "footprint", {static_cast<std::uint64_t>(kind), pi}));
            FootprintRow row;
            row.kind = kind;
            row.pca = c.pca;
            row.bytes = model_size(pipe.classifier);
            row.auc = evaluate(pipe, p.data[0], plan.test[0], set).auc;
            row.params = describe(c.params);
            rows.push_back(row);
        }
    }
    return rows;
}

std::string footprint_to_csv(const std::vector<FootprintRow>& rows) {
    std::ostringstream out;
    out << "classifier,pca,bytes,auc\n";
    for (const auto& r : rows) {
        out << to_string(r.kind) << ',' << csv::format_double(r.pca) << ',' << r.bytes << ','
            << csv::format_double(r.auc) << '\n';
    }
    return out.str();
}

} // namespace respira
