#include "respira/protocol.hpp"

#include "respira/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace respira {

namespace {

// Subjects of each class, in sorted id order.
std::pair<std::vector<std::string>, std::vector<std::string>> subjects_by_class(std::span<const LabeledItem> items,
                                                                                const IndexList& subset) {
    std::map<std::string, long> balance;
    for (auto i : subset) {
        balance[items[i].subject_id] += items[i].label > 0 ? 1 : -1;
    }
    std::vector<std::string> neg, pos;
    for (const auto& [s, b] : balance) {
        (b >= 0 ? pos : neg).push_back(s);
    }
    return {neg, pos};
}

IndexList all_indices(std::size_t n) {
    IndexList v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

} // namespace

SubjectSplit subject_split(std::span<const LabeledItem> items, std::uint64_t seed, double dev_fraction) {
    return subject_split(items, all_indices(items.size()), seed, dev_fraction);
}

SubjectSplit subject_split(std::span<const LabeledItem> items, const IndexList& subset, std::uint64_t seed,
                           double dev_fraction) {
    if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
        throw std::invalid_argument("dev_fraction must be in (0, 1)");
    }
    auto [neg, pos] = subjects_by_class(items, subset);
    if (neg.size() < 2 || pos.size() < 2) {
        throw std::invalid_argument("subject_split needs at least 2 subjects per class (have " +
                                    std::to_string(neg.size()) + " negative, " + std::to_string(pos.size()) +
                                    " positive)");
    }
    std::set<std::string> dev_subjects;
    std::uint64_t cls = 0;
    for (auto* group : {&neg, &pos}) {
        Rng rng(derive_seed(seed, "subject-split", {cls++}));
        rng.shuffle(*group);
        const auto n = static_cast<double>(group->size());
        const auto n_dev = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(dev_fraction * n)), 1,
                                                   group->size() - 1);
        dev_subjects.insert(group->begin(), group->begin() + static_cast<std::ptrdiff_t>(n_dev));
    }
    SubjectSplit split;
    for (auto i : subset) {
        (dev_subjects.count(items[i].subject_id) ? split.dev : split.test).push_back(i);
    }
    return split;
}

IndexList undersample_balance(std::span<const LabeledItem> items, const IndexList& subset, std::uint64_t seed) {
    IndexList neg, pos;
    for (auto i : subset) {
        (items[i].label > 0 ? pos : neg).push_back(i);
    }
    if (neg.empty() || pos.empty()) {
        throw std::invalid_argument("undersample_balance: a class is absent");
    }
    if (neg.size() == pos.size()) {
        return subset;
    }
    auto& major = neg.size() > pos.size() ? neg : pos;
    const std::size_t keep = std::min(neg.size(), pos.size());
    Rng rng(derive_seed(seed, "undersample"));
    rng.shuffle(major);
    std::set<std::size_t> dropped(major.begin() + static_cast<std::ptrdiff_t>(keep), major.end());
    IndexList out;
    for (auto i : subset) {
        if (!dropped.count(i)) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<Fold> kfold_by_subject(std::span<const LabeledItem> items, const IndexList& subset, std::size_t k,
                                   std::uint64_t seed) {
    if (k < 2) {
        throw std::invalid_argument("kfold_by_subject: k must be at least 2");
    }
    auto [neg, pos] = subjects_by_class(items, subset);
    if (neg.size() + pos.size() < k) {
        throw std::invalid_argument("kfold_by_subject: " + std::to_string(neg.size() + pos.size()) +
                                    " subjects cannot fill " + std::to_string(k) + " folds");
    }
    std::map<std::string, std::size_t> fold_of;
    std::size_t next = 0;
    std::uint64_t cls = 0;
    for (auto* group : {&neg, &pos}) {
        Rng rng(derive_seed(seed, "kfold", {cls++}));
        rng.shuffle(*group);
        for (const auto& s : *group) {
            fold_of[s] = next++ % k;
        }
    }
    std::vector<Fold> folds(k);
    for (auto i : subset) {
        const std::size_t f = fold_of.at(items[i].subject_id);
        for (std::size_t j = 0; j < k; ++j) {
            (j == f ? folds[j].validation : folds[j].train).push_back(i);
        }
    }
    return folds;
}

std::size_t subject_overlap(std::span<const LabeledItem> items, const IndexList& a, const IndexList& b) {
    std::set<std::string> sa, sb;
    for (auto i : a) {
        sa.insert(items[i].subject_id);
    }
    for (auto i : b) {
        sb.insert(items[i].subject_id);
    }
    std::size_t n = 0;
    for (const auto& s : sa) {
        n += sb.count(s);
    }
    return n;
}

std::pair<std::size_t, std::size_t> class_counts(std::span<const LabeledItem> items, const IndexList& subset) {
    std::size_t neg = 0, pos = 0;
    for (auto i : subset) {
        (items[i].label > 0 ? pos : neg) += 1;
    }
    return {neg, pos};
}

} // namespace respira
