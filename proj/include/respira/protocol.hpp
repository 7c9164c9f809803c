#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace respira {

/// What the protocol needs to know about one evaluation sample.
struct LabeledItem {
    std::string subject_id;
    int label = -1; // -1 / +1
};

using IndexList = std::vector<std::size_t>;

struct SubjectSplit {
    IndexList dev;
    IndexList test;
};

/// Subjects (not samples) are shuffled and cut at round(dev_fraction * n)
/// within each subject class, so both sides keep both classes. A subject's
/// class is the majority label of its samples (ties count as positive).
/// Throws when a class has fewer than 2 subjects.
SubjectSplit subject_split(std::span<const LabeledItem> items, std::uint64_t seed, double dev_fraction);

/// Same, restricted to `subset` (indices into items).
SubjectSplit subject_split(std::span<const LabeledItem> items, const IndexList& subset, std::uint64_t seed,
                           double dev_fraction);

/// Randomly drops majority-class samples until both classes have equal
/// counts. Returned indices keep their input order.
IndexList undersample_balance(std::span<const LabeledItem> items, const IndexList& subset, std::uint64_t seed);

struct Fold {
    IndexList train;
    IndexList validation;
};

/// Subjects are shuffled within each class and dealt round-robin into k
/// folds, so fold sizes differ by at most one subject.
std::vector<Fold> kfold_by_subject(std::span<const LabeledItem> items, const IndexList& subset, std::size_t k,
                                   std::uint64_t seed);

/// Number of subject ids present on both sides.
std::size_t subject_overlap(std::span<const LabeledItem> items, const IndexList& a, const IndexList& b);

/// (negatives, positives) among the subset.
std::pair<std::size_t, std::size_t> class_counts(std::span<const LabeledItem> items, const IndexList& subset);

} // namespace respira
