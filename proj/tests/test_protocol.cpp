#include "respira/protocol.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace respira;

namespace {

// n subjects with 1..3 samples each; every other subject positive
std::vector<LabeledItem> population(std::size_t subjects, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<LabeledItem> items;
    for (std::size_t s = 0; s < subjects; ++s) {
        const std::size_t k = 1 + rng.index(3);
        for (std::size_t i = 0; i < k; ++i) {
            items.push_back({"S" + std::to_string(s), s % 3 == 0 ? 1 : -1});
        }
    }
    return items;
}

std::set<std::string> subjects(const std::vector<LabeledItem>& items, const IndexList& idx) {
    std::set<std::string> out;
    for (auto i : idx) {
        out.insert(items[i].subject_id);
    }
    return out;
}

IndexList all(const std::vector<LabeledItem>& items) {
    IndexList idx(items.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        idx[i] = i;
    }
    return idx;
}

} // namespace

TEST(Protocol, SplitIsSubjectDisjointAndCovering) {
    const auto items = population(40, 1);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto split = subject_split(items, seed, 0.8);
        EXPECT_EQ(subject_overlap(items, split.dev, split.test), 0u);
        EXPECT_EQ(split.dev.size() + split.test.size(), items.size());
        const auto dev = subjects(items, split.dev);
        // 14 positive and 26 negative subjects: round(0.8 * n) of each
        std::size_t pos = 0;
        for (const auto& s : dev) {
            pos += std::stoi(s.substr(1)) % 3 == 0;
        }
        EXPECT_EQ(pos, 11u);
        EXPECT_EQ(dev.size() - pos, 21u);
    }
}

TEST(Protocol, SplitDependsOnSeedOnly) {
    const auto items = population(30, 2);
    EXPECT_EQ(subject_split(items, 5, 0.8).dev, subject_split(items, 5, 0.8).dev);
    EXPECT_NE(subject_split(items, 5, 0.8).dev, subject_split(items, 6, 0.8).dev);
}

TEST(Protocol, SplitNeedsTwoSubjectsPerClass) {
    std::vector<LabeledItem> items = {{"a", 1}, {"b", -1}, {"c", -1}};
    EXPECT_THROW(subject_split(items, 0, 0.8), std::invalid_argument);
}

TEST(Protocol, MajorityLabelDecidesSubjectClass) {
    std::vector<LabeledItem> items = {{"a", 1}, {"a", -1}, {"b", -1}, {"b", -1}, {"c", 1},
                                      {"d", -1}, {"e", 1},  {"e", 1},  {"f", -1}};
    // a ties -> positive; positives a c e, negatives b d f
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto split = subject_split(items, seed, 0.5);
        const auto dev = subjects(items, split.dev);
        EXPECT_EQ(dev.size(), 4u);
        const std::size_t pos = dev.count("a") + dev.count("c") + dev.count("e");
        EXPECT_EQ(pos, 2u);
    }
}

TEST(Protocol, UndersamplingEqualisesClassesAndKeepsOrder) {
    const auto items = population(40, 3);
    const auto idx = all(items);
    const auto kept = undersample_balance(items, idx, 7);
    const auto [neg, pos] = class_counts(items, kept);
    EXPECT_EQ(neg, pos);
    EXPECT_EQ(pos, class_counts(items, idx).second);
    EXPECT_TRUE(std::is_sorted(kept.begin(), kept.end()));
    EXPECT_EQ(kept, undersample_balance(items, idx, 7));
}

TEST(Protocol, KFoldPartitionsSubjects) {
    const auto items = population(40, 4);
    const auto idx = all(items);
    const auto folds = kfold_by_subject(items, idx, 5, 9);
    ASSERT_EQ(folds.size(), 5u);
    std::map<std::string, int> seen;
    std::size_t smallest = 1000, largest = 0;
    for (const auto& f : folds) {
        EXPECT_EQ(subject_overlap(items, f.train, f.validation), 0u);
        EXPECT_EQ(f.train.size() + f.validation.size(), items.size());
        const auto vs = subjects(items, f.validation);
        smallest = std::min(smallest, vs.size());
        largest = std::max(largest, vs.size());
        for (const auto& s : vs) {
            ++seen[s];
        }
        const auto [neg, pos] = class_counts(items, f.validation);
        EXPECT_GT(neg, 0u);
        EXPECT_GT(pos, 0u);
    }
    EXPECT_EQ(seen.size(), 40u);
    for (const auto& [s, n] : seen) {
        EXPECT_EQ(n, 1) << s;
    }
    EXPECT_LE(largest - smallest, 1u);
}

TEST(Protocol, KFoldRejectsTooFewSubjects) {
    std::vector<LabeledItem> items = {{"a", 1}, {"b", -1}};
    EXPECT_THROW(kfold_by_subject(items, all(items), 5, 0), std::invalid_argument);
}

TEST(Protocol, OverlapCountsSharedSubjects) {
    std::vector<LabeledItem> items = {{"a", 1}, {"a", 1}, {"b", -1}, {"c", 1}};
    EXPECT_EQ(subject_overlap(items, {0, 2}, {1, 3}), 1u);
    EXPECT_EQ(subject_overlap(items, {0}, {2, 3}), 0u);
}
