#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace lil {

using key_t = std::uint64_t;
using payload_t = std::uint64_t;
using pos_t = std::size_t;

/**
 * A sorted array of unique 64-bit keys with one 8-byte payload per key.
 * This is the array every index approximates; it is immutable after
 * construction.
 */
struct SortedDataset {
    std::vector<key_t> keys;
    std::vector<payload_t> payloads;
    std::uint64_t payload_seed = 0;  // seed the payloads were derived from

    SortedDataset() = default;
    SortedDataset(std::vector<key_t> k, std::vector<payload_t> p, std::uint64_t seed = 0);

    pos_t size() const { return keys.size(); }
    key_t min_key() const { return keys.front(); }
    key_t max_key() const { return keys.back(); }
};

/// Half-open index interval [lo, hi) guaranteed by a valid index to
/// contain the lower bound of the lookup key. `hi` may reach n+1 so the
/// interval can admit a lower bound of n (key past the end).
struct SearchBound {
    pos_t lo;
    pos_t hi;

    pos_t width() const { return hi - lo; }
    bool contains(pos_t i) const { return lo <= i && i < hi; }
    friend bool operator==(const SearchBound&, const SearchBound&) = default;
};

/// Slack an estimate needs on each side to cover the truth: `under` is
/// the largest amount the estimate may exceed the true position (search
/// must extend below it), `over` the largest amount it may fall short.
struct ErrorEnvelope {
    pos_t under = 0;
    pos_t over = 0;

    friend bool operator==(const ErrorEnvelope&, const ErrorEnvelope&) = default;
};

enum class SearchStrategy : std::uint8_t { Binary = 0, Linear = 1, Interpolation = 2 };

/// Thrown by last_mile_search when the given bound does not contain the
/// lower bound of the key, i.e. the index that produced it is invalid.
class BoundViolation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Smallest index i with keys[i] >= x; n if x exceeds every key.
pos_t lower_bound_oracle(const SortedDataset& d, key_t x);

/// Widens a position estimate (already clamped into [0, n]) into a
/// search bound: [est - under, est + over + 1) clipped to [0, n+1).
SearchBound bound_from_estimate(pos_t estimate, ErrorEnvelope env, pos_t n);

/// Resolves the lower bound of x inside bound b. All three strategies
/// return the same index. Throws BoundViolation if b does not contain it.
pos_t last_mile_search(const SortedDataset& d, SearchBound b, key_t x, SearchStrategy s);

struct ValidationReport {
    std::size_t violations = 0;
    std::size_t checked = 0;
};

/// Counts queries whose bound fails to contain lower_bound_oracle(d, x).
ValidationReport validate_index(const std::function<SearchBound(key_t)>& lookup,
                                const SortedDataset& d, std::span<const key_t> queries);

}  // namespace lil
