#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace respira {

// Seed derivation
// ---------------
// Every random stream in the toolkit is keyed by the master seed plus the
// identity of the thing it drives (stage tag, outer split index, fold index,
// candidate index, tree index ...), never by execution order:
//
//   derive_seed(master, {tag_hash("outer"), split})
//
// Keys are folded with splitmix64, so reordering work across threads cannot
// change any stream.

std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a hash of a stage tag.
std::uint64_t tag_hash(std::string_view tag);

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::initializer_list<std::uint64_t> keys = {}) {
    std::uint64_t s = derive_seed(master, {tag_hash(tag)});
    return derive_seed(s, keys);
}

/// mt19937_64 with platform-independent bounded draws (the std distributions
/// are implementation-defined, which would break byte-identical reports).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n);

    /// Uniform real in [0, 1).
    double uniform();

    /// Standard normal (Box-Muller, no cached spare).
    double normal();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace respira
