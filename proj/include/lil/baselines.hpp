#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lil/core.hpp"

namespace lil {

/// Radix binary search: just the radix table over r-bit key prefixes.
/// Bounds are whole prefix buckets, so heavy key skew (one bucket
/// swallowing most keys) makes it degenerate.
struct RbsIndex {
    unsigned radix_bits = 0;
    unsigned shift = 0;
    std::vector<std::uint32_t> table;  // 2^r + 1 entries, table[p] = first index with prefix >= p
    pos_t n = 0;

    key_t extract(key_t k) const { return k >> shift; }
    SearchBound lookup(key_t x) const;
    std::size_t size_bytes() const { return 4 * table.size() + 16; }
};

RbsIndex build_rbs(const SortedDataset& d, unsigned radix_bits);
inline SearchBound rbs_lookup(const RbsIndex& rbs, key_t x) { return rbs.lookup(x); }

/// Every k-th key with its position, binary searched; realizes the
/// size/accuracy trade of inserting a subset of keys into a tree:
/// bound width is at most stride + 1.
struct SampledIndex {
    pos_t stride = 1;
    std::vector<key_t> sample_keys;  // sample j sits at position j * stride
    pos_t n = 0;

    SearchBound lookup(key_t x) const;
    std::size_t size_bytes() const { return 16 * sample_keys.size() + 16; }
};

SampledIndex build_sampled(const SortedDataset& d, pos_t stride);
inline SearchBound sampled_lookup(const SampledIndex& s, key_t x) { return s.lookup(x); }

/// Size-zero baseline: the whole array is the bound.
struct BinaryBaseline {
    pos_t n = 0;

    SearchBound lookup(key_t) const { return {0, n + 1}; }
    std::size_t size_bytes() const { return 0; }
};

inline BinaryBaseline build_binary_baseline(const SortedDataset& d) { return {d.size()}; }
inline SearchBound binary_baseline_lookup(const BinaryBaseline& b, key_t x) {
    return b.lookup(x);
}

std::vector<std::uint8_t> to_blob(const RbsIndex&);
std::vector<std::uint8_t> to_blob(const SampledIndex&);
std::vector<std::uint8_t> to_blob(const BinaryBaseline&);
RbsIndex rbs_from_blob(std::span<const std::uint8_t> bytes);
SampledIndex sampled_from_blob(std::span<const std::uint8_t> bytes);
BinaryBaseline binary_from_blob(std::span<const std::uint8_t> bytes);

}  // namespace lil
