#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lil/core.hpp"

namespace lil {

/// An (x, y) pair for piecewise linear fitting; y values must not be
/// assumed consecutive (upper PGM levels fit segment ordinals).
struct PlaPoint {
    key_t x;
    std::int64_t y;
};

/// One linear piece. The line is anchored at its split point so that
/// predictions on huge keys do not lose precision to cancellation:
/// predict(x) = slope * (x - first_key) + intercept.
struct Segment {
    key_t first_key;
    double slope = 0.0;
    double intercept = 0.0;

    double predict(key_t x) const {
        const double dx = x >= first_key ? static_cast<double>(x - first_key)
                                         : -static_cast<double>(first_key - x);
        return slope * dx + intercept;
    }
    friend bool operator==(const Segment&, const Segment&) = default;
};

/**
 * Minimal error-bounded piecewise linear approximation of a stream of
 * points with strictly increasing x. Feasibility is tracked exactly
 * (integer convex-hull corridor), and the greedy longest-feasible-prefix
 * rule makes the piece count minimal.
 */
std::vector<Segment> optimal_pla(std::span<const PlaPoint> points, pos_t epsilon);

struct PgmLevel {
    std::vector<Segment> segments;
    /// child_start[s] = first item of the level below covered by
    /// segment s; child_start.back() == covered_count.
    std::vector<pos_t> child_start;
    pos_t covered_count = 0;
};

/**
 * Recursive stack of minimal epsilon-bounded piecewise linear
 * regressions: the bottom level predicts key positions, each level
 * above indexes the split keys of the one below, topped by a single
 * segment. Levels are stored bottom-up.
 */
struct PgmIndex {
    pos_t epsilon = 0;
    pos_t n = 0;
    key_t min_key = 0;
    key_t max_key = 0;
    std::vector<PgmLevel> levels;

    SearchBound lookup(key_t x) const;
    std::size_t size_bytes() const;
    std::size_t total_segments() const;
};

PgmIndex build_pgm(const SortedDataset& d, pos_t epsilon);

inline SearchBound pgm_lookup(const PgmIndex& pgm, key_t x) { return pgm.lookup(x); }

std::vector<std::uint8_t> to_blob(const PgmIndex& pgm);
PgmIndex pgm_from_blob(std::span<const std::uint8_t> bytes);

}  // namespace lil
