#include "respira/grid_search.hpp"

#include "respira/metrics.hpp"
#include "respira/parallel.hpp"
#include "respira/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace respira {

ClassifierGrid ClassifierGrid::full() {
    const std::vector<double> c = {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0};
    ClassifierGrid g;
    g.svm = SvmGrid{{SvmKernel::Rbf, SvmKernel::Poly, SvmKernel::Sigmoid}, c, {1e-3, 1e-2, 1e-1, 1.0, 10.0}, {2, 3, 4, 5}};
    g.lr = LrGrid{{Penalty::L1, Penalty::L2}, c};
    g.rf = RfGrid{{10, 20, 50, 100}, {2, 8, 10, 12}, {10, 30, 50}, {SplitCriterion::Entropy, SplitCriterion::Gini}};
    g.ab = AbGrid{{10, 20, 50, 100}, {1.0, 0.5, 0.1, 0.05, 0.01, 0.001}};
    return g;
}

void ClassifierGrid::validate() const {
    if (!svm && !lr && !rf && !ab) {
        throw std::invalid_argument("classifier grid is empty");
    }
    auto need = [](bool empty, const char* what) {
        if (empty) {
            throw std::invalid_argument(std::string("classifier grid: ") + what + " has no values");
        }
    };
    if (svm) {
        need(svm->kernels.empty() || svm->C.empty() || svm->gamma.empty(), "svm");
        const bool poly = std::find(svm->kernels.begin(), svm->kernels.end(), SvmKernel::Poly) != svm->kernels.end();
        need(poly && svm->degree.empty(), "svm degree");
    }
    if (lr) {
        need(lr->penalties.empty() || lr->C.empty(), "lr");
    }
    if (rf) {
        need(rf->n_estimators.empty() || rf->min_samples_split.empty() || rf->max_depth.empty() ||
                 rf->criteria.empty(),
             "rf");
    }
    if (ab) {
        need(ab->n_estimators.empty() || ab->learning_rate.empty(), "ab");
    }
    for (const auto& h : enumerate()) {
        std::visit([](const auto& p) { p.validate(); }, h);
    }
}

std::vector<Hyperparameters> ClassifierGrid::enumerate() const {
    std::vector<Hyperparameters> out;
    if (svm) {
        for (auto k : svm->kernels) {
            for (double c : svm->C) {
                for (double g : svm->gamma) {
                    if (k == SvmKernel::Poly) {
                        for (int d : svm->degree) {
                            out.emplace_back(SvmParams{c, k, g, d});
                        }
                    } else {
                        out.emplace_back(SvmParams{c, k, g, 3});
                    }
                }
            }
        }
    }
    if (lr) {
        for (auto p : lr->penalties) {
            for (double c : lr->C) {
                LogRegParams l;
                l.penalty = p;
                l.C = c;
                out.emplace_back(l);
            }
        }
    }
    if (rf) {
        for (int n : rf->n_estimators) {
            for (int s : rf->min_samples_split) {
                for (int d : rf->max_depth) {
                    for (auto c : rf->criteria) {
                        out.emplace_back(RfParams{n, s, d, c});
                    }
                }
            }
        }
    }
    if (ab) {
        for (int n : ab->n_estimators) {
            for (double l : ab->learning_rate) {
                out.emplace_back(AbParams{n, l});
            }
        }
    }
    return out;
}

std::vector<Eigen::Index> feature_set_columns(FeatureSetId set, Modality modality) {
    const auto single_width = static_cast<Eigen::Index>(feature_set_width(FeatureSetId::F4));
    std::vector<Eigen::Index> single;
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(kAggregatedEmbeddingWidth); ++j) {
        single.push_back(j);
    }
    for (auto i : acoustic_indices_for(set)) {
        single.push_back(static_cast<Eigen::Index>(kAggregatedEmbeddingWidth + i));
    }
    if (modality != Modality::CoughBreath) {
        return single;
    }
    std::vector<Eigen::Index> both = single;
    for (auto j : single) {
        both.push_back(single_width + j);
    }
    return both;
}

Matrix EvalData::columns(FeatureSetId set) const {
    IndexList rows(static_cast<std::size_t>(x.rows()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i] = i;
    }
    return columns(set, rows);
}

Matrix EvalData::columns(FeatureSetId set, const IndexList& rows) const {
    const auto cols = feature_set_columns(set, modality);
    if (static_cast<Eigen::Index>(fused_width(FeatureSetId::F4, modality)) != x.cols()) {
        throw std::logic_error("evaluation matrix has unexpected width");
    }
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                x(static_cast<Eigen::Index>(rows[r]), cols[c]);
        }
    }
    return out;
}

Labels labels_of(const EvalData& data, const IndexList& rows) {
    Labels y;
    y.reserve(rows.size());
    for (auto r : rows) {
        y.push_back(data.items[r].label);
    }
    return y;
}

namespace {

bool both_classes(const Labels& y) {
    const bool pos = std::find(y.begin(), y.end(), 1) != y.end();
    const bool neg = std::find(y.begin(), y.end(), -1) != y.end();
    return pos && neg;
}

double safe_auc(const std::vector<double>& scores, const Labels& y) {
    for (double s : scores) {
        if (!std::isfinite(s)) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    }
    return auc(scores, y);
}

// AUC of every candidate for one (view, set, fold) at every PCA level.
// Forests and boosted ensembles are grown once at the largest size and
// scored on their prefixes.
struct UnitResult {
    bool valid = false;
    std::vector<std::size_t> components;  // per pca
    std::vector<std::vector<double>> auc; // [pca][hp], NaN = failed
    std::size_t leakage_violations = 0;
};

UnitResult evaluate_unit(const ModalityView& view, std::size_t view_index, FeatureSetId set, std::size_t set_index,
                         std::size_t fold_index, const GridSpec& spec, const std::vector<Hyperparameters>& hps,
                         const std::vector<char>& active) {
    UnitResult out;
    const auto& fold = view.folds[fold_index];
    const EvalData& data = *view.data;
    out.leakage_violations = subject_overlap(data.items, fold.train, fold.validation);
    const Labels ytr = labels_of(data, fold.train);
    const Labels yva = labels_of(data, fold.validation);
    if (!both_classes(ytr) || !both_classes(yva) || fold.train.size() < 2) {
        return out;
    }
    out.valid = true;
    const Matrix xtr_raw = data.columns(set, fold.train);
    const Matrix xva_raw = data.columns(set, fold.validation);
    const Standardizer st = fit_standardizer(xtr_raw);
    const Matrix ztr = st.transform(xtr_raw);
    const Matrix zva = st.transform(xva_raw);
    const PcaBasis basis = fit_pca_basis(ztr);

    int max_rf = 0, max_ab = 0, rf_depth = 1, rf_split = std::numeric_limits<int>::max();
    for (const auto& h : hps) {
        if (const auto* r = std::get_if<RfParams>(&h)) {
            max_rf = std::max(max_rf, r->n_estimators);
            rf_depth = std::max(rf_depth, r->max_depth);
            rf_split = std::min(rf_split, r->min_samples_split);
        } else if (const auto* a = std::get_if<AbParams>(&h)) {
            max_ab = std::max(max_ab, a->n_estimators);
        }
    }

    out.components.resize(spec.pca.size());
    out.auc.assign(spec.pca.size(), std::vector<double>(hps.size(), std::numeric_limits<double>::quiet_NaN()));
    for (std::size_t pi = 0; pi < spec.pca.size(); ++pi) {
        const PcaModel pca = basis.select(spec.pca[pi]);
        out.components[pi] = pca.n_components();
        const Matrix ptr = pca.transform(ztr);
        const Matrix pva = pca.transform(zva);
        const std::size_t nva = static_cast<std::size_t>(pva.rows());
        std::vector<std::vector<double>> va_rows(nva);
        for (std::size_t i = 0; i < nva; ++i) {
            va_rows[i].resize(static_cast<std::size_t>(pva.cols()));
            for (Eigen::Index j = 0; j < pva.cols(); ++j) {
                va_rows[i][static_cast<std::size_t>(j)] = pva(static_cast<Eigen::Index>(i), j);
            }
        }

        // Per-member votes on the validation rows, keyed by ensemble identity.
        std::map<std::tuple<int, int, int>, std::vector<std::vector<int>>> rf_votes;
        std::map<SplitCriterion, TrainedModel> rf_forests;
        std::map<double, std::pair<std::vector<double>, std::vector<std::vector<int>>>> ab_votes;

        for (std::size_t h = 0; h < hps.size(); ++h) {
            if (!active[h]) {
                continue;
            }
            try {
                const auto& hp = hps[h];
                std::vector<double> scores(nva, 0.0);
                if (const auto* r = std::get_if<RfParams>(&hp)) {
                    const auto key = std::make_tuple(r->min_samples_split, r->max_depth, static_cast<int>(r->criterion));
                    auto it = rf_votes.find(key);
                    if (it == rf_votes.end()) {
                        auto grown = rf_forests.find(r->criterion);
                        if (grown == rf_forests.end()) {
                            RfParams full = *r;
                            full.n_estimators = max_rf;
                            full.max_depth = rf_depth;
                            full.min_samples_split = rf_split;
                            const std::uint64_t seed =
                                derive_seed(spec.seed, "grid-rf",
                                            {view_index, set_index, fold_index, pi, static_cast<std::uint64_t>(r->criterion)});
                            grown = rf_forests.emplace(r->criterion, train_rf(ptr, ytr, full, seed)).first;
                        }
                        const auto& trees = std::get<ForestModel>(grown->second.model).trees;
                        std::vector<std::vector<int>> votes(trees.size(), std::vector<int>(nva));
                        for (std::size_t t = 0; t < trees.size(); ++t) {
                            for (std::size_t i = 0; i < nva; ++i) {
                                votes[t][i] =
                                    trees[t].node_for(va_rows[i].data(), r->max_depth, r->min_samples_split).vote();
                            }
                        }
                        it = rf_votes.emplace(key, std::move(votes)).first;
                    }
                    const auto& votes = it->second;
                    for (int t = 0; t < r->n_estimators; ++t) {
                        for (std::size_t i = 0; i < nva; ++i) {
                            scores[i] += votes[static_cast<std::size_t>(t)][i] > 0 ? 1.0 : 0.0;
                        }
                    }
                    for (auto& s : scores) {
                        s /= r->n_estimators;
                    }
                } else if (const auto* a = std::get_if<AbParams>(&hp)) {
                    auto it = ab_votes.find(a->learning_rate);
                    if (it == ab_votes.end()) {
                        AbParams full = *a;
                        full.n_estimators = max_ab;
                        const auto model = train_adaboost(ptr, ytr, full);
                        const auto& m = std::get<AdaBoostModel>(model.model);
                        std::vector<std::vector<int>> votes(m.stumps.size(), std::vector<int>(nva));
                        for (std::size_t t = 0; t < m.stumps.size(); ++t) {
                            for (std::size_t i = 0; i < nva; ++i) {
                                votes[t][i] = m.stumps[t].predict(va_rows[i].data());
                            }
                        }
                        it = ab_votes.emplace(a->learning_rate, std::make_pair(m.alphas, std::move(votes))).first;
                    }
                    const auto& [alphas, votes] = it->second;
                    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(a->n_estimators), alphas.size());
                    double den = 0.0;
                    for (std::size_t t = 0; t < n; ++t) {
                        den += alphas[t];
                        for (std::size_t i = 0; i < nva; ++i) {
                            scores[i] += alphas[t] * votes[t][i];
                        }
                    }
                    for (auto& s : scores) {
                        s = den > 0.0 ? s / den : 0.0;
                    }
                } else {
                    const auto model = train(ptr, ytr, hp, 0);
                    for (std::size_t i = 0; i < nva; ++i) {
                        scores[i] = predict_score(model, va_rows[i]);
                    }
                }
                out.auc[pi][h] = safe_auc(scores, yva);
            } catch (const std::exception&) {
                // left as NaN: the candidate failed on this fold
            }
        }
    }
    return out;
}

} // namespace

std::size_t select_best(const std::vector<CandidateScore>& c, std::optional<ClassifierKind> kind,
                        std::optional<std::size_t> pca_index) {
    std::size_t best = c.size();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!c[i].ok || (kind && kind_of(c[i].params) != *kind) || (pca_index && c[i].pca_index != *pca_index)) {
            continue;
        }
        if (best == c.size() || c[i].mean_auc > c[best].mean_auc ||
            (c[i].mean_auc == c[best].mean_auc && c[i].mean_components < c[best].mean_components)) {
            best = i;
        }
    }
    if (best == c.size()) {
        throw std::runtime_error("grid search: every candidate failed");
    }
    return best;
}

GridSearchResult grid_search(const std::vector<ModalityView>& views, const GridSpec& spec) {
    spec.grid.validate();
    if (views.empty() || spec.feature_sets.empty() || spec.pca.empty()) {
        throw std::invalid_argument("grid search needs at least one modality, feature set and PCA coefficient");
    }
    const auto hps = spec.grid.enumerate();
    std::vector<char> active(hps.size(), 1);
    if (spec.only_kind) {
        for (std::size_t h = 0; h < hps.size(); ++h) {
            active[h] = kind_of(hps[h]) == *spec.only_kind ? 1 : 0;
        }
    }

    struct Unit {
        std::size_t view, set, fold;
    };
    std::vector<Unit> units;
    for (std::size_t v = 0; v < views.size(); ++v) {
        for (std::size_t s = 0; s < spec.feature_sets.size(); ++s) {
            for (std::size_t f = 0; f < views[v].folds.size(); ++f) {
                units.push_back({v, s, f});
            }
        }
    }
    std::vector<UnitResult> results(units.size());
    parallel_for(units.size(), spec.jobs, [&](std::size_t u) {
        const auto& unit = units[u];
        results[u] = evaluate_unit(views[unit.view], unit.view, spec.feature_sets[unit.set], unit.set, unit.fold, spec,
                                   hps, active);
    });

    GridSearchResult out;
    std::size_t u = 0;
    for (std::size_t v = 0; v < views.size(); ++v) {
        for (std::size_t s = 0; s < spec.feature_sets.size(); ++s) {
            const std::size_t first = u;
            const std::size_t n_folds = views[v].folds.size();
            u += n_folds;
            for (std::size_t f = first; f < u; ++f) {
                ++out.leakage_checks;
                out.leakage_violations += results[f].leakage_violations;
                out.skipped_folds += results[f].valid ? 0 : 1;
            }
            for (std::size_t pi = 0; pi < spec.pca.size(); ++pi) {
                for (std::size_t h = 0; h < hps.size(); ++h) {
                    if (!active[h]) {
                        continue;
                    }
                    CandidateScore c;
                    c.view = v;
                    c.set = spec.feature_sets[s];
                    c.pca = spec.pca[pi];
                    c.pca_index = pi;
                    c.hp_index = h;
                    c.params = hps[h];
                    double sum = 0.0, comps = 0.0;
                    bool failed = false;
                    for (std::size_t f = first; f < u; ++f) {
                        if (!results[f].valid) {
                            continue;
                        }
                        const double a = results[f].auc[pi][h];
                        if (std::isnan(a)) {
                            failed = true;
                            break;
                        }
                        sum += a;
                        comps += static_cast<double>(results[f].components[pi]);
                        ++c.valid_folds;
                    }
                    c.ok = !failed && c.valid_folds > 0;
                    if (c.ok) {
                        c.mean_auc = sum / static_cast<double>(c.valid_folds);
                        c.mean_components = comps / static_cast<double>(c.valid_folds);
                    }
                    out.candidates.push_back(std::move(c));
                }
            }
        }
    }
    out.best = select_best(out.candidates);
    return out;
}

Pipeline fit_pipeline(const EvalData& data, const IndexList& rows, FeatureSetId set, double pca,
                      const Hyperparameters& params, std::uint64_t seed) {
    Pipeline p;
    const Matrix raw = data.columns(set, rows);
    p.standardizer = fit_standardizer(raw);
    const Matrix z = p.standardizer.transform(raw);
    p.pca = fit_pca(z, pca);
    p.classifier = train(p.pca.transform(z), labels_of(data, rows), params, seed);
    return p;
}

} // namespace respira
