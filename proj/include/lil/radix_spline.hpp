#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lil/core.hpp"

namespace lil {

struct SplinePoint {
    key_t key;
    double position;

    friend bool operator==(const SplinePoint&, const SplinePoint&) = default;
};

/// Maps r-bit key prefixes to offsets into the spline point array.
/// offsets[p] is the first spline point whose prefix is >= p, so the
/// points with prefix p live in [offsets[p], offsets[p+1]).
struct RadixTable {
    unsigned radix_bits = 0;
    unsigned shift = 0;
    std::vector<std::uint32_t> offsets;  // 2^r + 1 entries

    key_t extract(key_t k) const { return k >> shift; }
};

/**
 * One-pass error-corridor spline fitting. Keys are fed in strictly
 * increasing order, positions are implicit (0, 1, 2, ...). A spline
 * point is committed whenever the incoming point falls outside the
 * corridor of lines through the current base. The corridor half-width
 * is epsilon - 1, leaving one position of slack so that rounding the
 * interpolated estimate keeps the external guarantee at epsilon.
 */
class SplineBuilder {
  public:
    explicit SplineBuilder(pos_t epsilon);

    void add_key(key_t k);
    std::vector<SplinePoint> finish();
    pos_t keys_seen() const { return count_; }

  private:
    double half_width_;
    pos_t count_ = 0;
    std::vector<SplinePoint> points_;
    key_t base_key_ = 0;
    pos_t base_pos_ = 0;
    key_t prev_key_ = 0;
    pos_t prev_pos_ = 0;
    bool corridor_set_ = false;
    double slope_lo_ = 0.0;
    double slope_hi_ = 0.0;
};

/// Fits the spline over any forward range of keys, reading each element
/// exactly once.
template <class It>
std::vector<SplinePoint> fit_spline(It first, It last, pos_t epsilon) {
    SplineBuilder b(epsilon);
    for (; first != last; ++first) b.add_key(*first);
    return b.finish();
}

std::vector<SplinePoint> fit_spline(const SortedDataset& d, pos_t epsilon);

/// shift = max(0, bit_width(key_universe_max) - r); prefixes beyond the
/// universe never occur for in-range keys.
RadixTable build_radix_table(std::span<const SplinePoint> spline, unsigned radix_bits,
                             key_t key_universe_max);

struct RsIndex {
    pos_t epsilon = 0;
    pos_t n = 0;
    std::vector<SplinePoint> spline;
    RadixTable table;

    key_t min_key() const { return spline.front().key; }
    key_t max_key() const { return spline.back().key; }

    /// Raw spline interpolation at x (no rounding or widening).
    double interpolate(key_t x) const;
    SearchBound lookup(key_t x) const;
    std::size_t size_bytes() const;
};

RsIndex build_rs(const SortedDataset& d, pos_t epsilon, unsigned radix_bits);

inline SearchBound rs_lookup(const RsIndex& rs, key_t x) { return rs.lookup(x); }

std::vector<std::uint8_t> to_blob(const RsIndex& rs);
RsIndex rs_from_blob(std::span<const std::uint8_t> bytes);

}  // namespace lil
