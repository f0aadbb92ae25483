#include "lil/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lil/blob.hpp"

namespace lil {

namespace {

using i128 = __int128;

struct Peg {
    i128 x;
    i128 y;
};

// Sign of the turn a -> b -> c; positive means c lies left of (above,
// for increasing x) the line through a and b.
i128 turn(const Peg& a, const Peg& b, const Peg& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

long double to_ld(i128 v) {
    return static_cast<long double>(static_cast<double>(static_cast<std::int64_t>(v >> 32))) *
               4294967296.0L +
           static_cast<long double>(static_cast<std::uint32_t>(v & 0xffffffff));
}

long double slope_ld(const Peg& a, const Peg& b) {
    return to_ld(b.y - a.y) / to_ld(b.x - a.x);
}

/**
 * Streaming feasibility corridor for one segment. A line fits the
 * points seen so far within +-eps iff it passes below every upper peg
 * (x, y+eps) and above every lower peg (x, y-eps). The extreme-slope
 * support lines are maintained exactly: `lo_line_` (minimum slope,
 * through an upper peg on the left and a lower peg on the right) and
 * `hi_line_` (maximum slope, through a lower peg then an upper peg).
 * Supports advance monotonically along the two convex chains, so the
 * whole segment costs amortized O(1) per point.
 */
class Corridor {
  public:
    explicit Corridor(std::int64_t eps) : eps_(eps) {}

    std::size_t points() const { return count_; }
    key_t first_key() const { return first_x_; }

    void reset() {
        count_ = 0;
        upper_.clear();
        lower_.clear();
        upper_start_ = lower_start_ = 0;
    }

    // Returns false when no line fits the extended point set; the
    // corridor state is left untouched so the segment can be emitted.
    bool add(key_t x, std::int64_t y) {
        const Peg u{static_cast<i128>(x), static_cast<i128>(y) + eps_};
        const Peg l{static_cast<i128>(x), static_cast<i128>(y) - eps_};
        if (count_ == 0) {
            first_x_ = x;
            first_y_ = y;
            upper_.assign(1, u);
            lower_.assign(1, l);
            upper_start_ = lower_start_ = 0;
            count_ = 1;
            return true;
        }
        if (count_ == 1) {
            lo_a_ = upper_[0];
            lo_b_ = l;
            hi_a_ = lower_[0];
            hi_b_ = u;
            push_upper(u);
            push_lower(l);
            count_ = 2;
            return true;
        }

        // The feasible value range at x is [lo_line(x), hi_line(x)];
        // it must intersect [y-eps, y+eps].
        if (turn(lo_a_, lo_b_, u) < 0 || turn(hi_a_, hi_b_, l) > 0) return false;

        if (turn(hi_a_, hi_b_, u) < 0) {
            // New upper peg caps the maximum slope; pivot on the lower
            // chain: max slope through u above all lower pegs.
            while (lower_start_ + 1 < lower_.size() &&
                   slope_leq(lower_[lower_start_ + 1], u, lower_[lower_start_], u))
                ++lower_start_;
            hi_a_ = lower_[lower_start_];
            hi_b_ = u;
        }
        if (turn(lo_a_, lo_b_, l) > 0) {
            // New lower peg raises the minimum slope; pivot on the
            // upper chain.
            while (upper_start_ + 1 < upper_.size() &&
                   slope_leq(upper_[upper_start_], l, upper_[upper_start_ + 1], l))
                ++upper_start_;
            lo_a_ = upper_[upper_start_];
            lo_b_ = l;
        }
        push_upper(u);
        push_lower(l);
        ++count_;
        return true;
    }

    Segment emit() const {
        if (count_ == 0) throw std::logic_error("empty corridor");
        if (count_ == 1) return {first_x_, 0.0, static_cast<double>(first_y_)};
        // The midline between the two support lines is feasible: both
        // pass through the corridor's waist, and the pointwise average
        // of two feasible lines stays inside every peg band.
        const long double s_lo = slope_ld(lo_a_, lo_b_);
        const long double s_hi = slope_ld(hi_a_, hi_b_);
        const i128 fx = static_cast<i128>(first_x_);
        const long double v_lo = to_ld(lo_a_.y) + s_lo * to_ld(fx - lo_a_.x);
        const long double v_hi = to_ld(hi_a_.y) + s_hi * to_ld(fx - hi_a_.x);
        return {first_x_, static_cast<double>((s_lo + s_hi) / 2.0L),
                static_cast<double>((v_lo + v_hi) / 2.0L)};
    }

  private:
    // slope(a1 -> b1) <= slope(a2 -> b2), all x-deltas positive.
    static bool slope_leq(const Peg& a1, const Peg& b1, const Peg& a2, const Peg& b2) {
        return (b1.y - a1.y) * (b2.x - a2.x) <= (b2.y - a2.y) * (b1.x - a1.x);
    }

    void push_upper(const Peg& p) {
        // Lower convex chain of upper pegs (edge slopes increasing).
        while (upper_.size() >= upper_start_ + 2 &&
               turn(upper_[upper_.size() - 2], upper_.back(), p) <= 0)
            upper_.pop_back();
        upper_.push_back(p);
    }
    void push_lower(const Peg& p) {
        // Upper convex chain of lower pegs (edge slopes decreasing).
        while (lower_.size() >= lower_start_ + 2 &&
               turn(lower_[lower_.size() - 2], lower_.back(), p) >= 0)
            lower_.pop_back();
        lower_.push_back(p);
    }

    std::int64_t eps_;
    std::size_t count_ = 0;
    key_t first_x_ = 0;
    std::int64_t first_y_ = 0;
    Peg lo_a_{}, lo_b_{};  // minimum-slope support line
    Peg hi_a_{}, hi_b_{};  // maximum-slope support line
    std::vector<Peg> upper_, lower_;
    std::size_t upper_start_ = 0, lower_start_ = 0;
};

struct PlaOutput {
    std::vector<Segment> segments;
    std::vector<pos_t> starts;  // first point index per segment + sentinel
};

PlaOutput run_pla(std::span<const PlaPoint> points, pos_t epsilon) {
    if (points.empty()) throw std::invalid_argument("optimal_pla needs at least one point");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i - 1].x >= points[i].x)
            throw std::invalid_argument("optimal_pla keys must be strictly increasing");

    PlaOutput out;
    Corridor corridor(static_cast<std::int64_t>(epsilon));
    pos_t seg_start = 0;
    for (pos_t i = 0; i < points.size(); ++i) {
        if (!corridor.add(points[i].x, points[i].y)) {
            out.segments.push_back(corridor.emit());
            out.starts.push_back(seg_start);
            seg_start = i;
            corridor.reset();
            corridor.add(points[i].x, points[i].y);
        }
    }
    out.segments.push_back(corridor.emit());
    out.starts.push_back(seg_start);
    out.starts.push_back(points.size());
    return out;
}

}  // namespace

std::vector<Segment> optimal_pla(std::span<const PlaPoint> points, pos_t epsilon) {
    return run_pla(points, epsilon).segments;
}

PgmIndex build_pgm(const SortedDataset& d, pos_t epsilon) {
    if (epsilon < 1) throw std::invalid_argument("pgm epsilon must be >= 1");
    PgmIndex pgm;
    pgm.epsilon = epsilon;
    pgm.n = d.size();
    pgm.min_key = d.min_key();
    pgm.max_key = d.max_key();

    std::vector<PlaPoint> pts;
    pts.reserve(d.size());
    for (pos_t i = 0; i < d.size(); ++i)
        pts.push_back({d.keys[i], static_cast<std::int64_t>(i)});

    PlaOutput bottom = run_pla(pts, epsilon);
    pgm.levels.push_back({std::move(bottom.segments), std::move(bottom.starts), d.size()});

    while (pgm.levels.back().segments.size() > 1) {
        const auto& below = pgm.levels.back().segments;
        pts.clear();
        for (pos_t j = 0; j < below.size(); ++j)
            pts.push_back({below[j].first_key, static_cast<std::int64_t>(j)});
        PlaOutput up = run_pla(pts, epsilon);
        pgm.levels.push_back({std::move(up.segments), std::move(up.starts),
                              static_cast<pos_t>(below.size())});
    }
    return pgm;
}

namespace {

// Clamped, capped, rounded line evaluation shared by all levels.
// `cap` is where the next segment's items begin: a positive-slope line
// may extrapolate past its own last covered item but never beyond it.
pos_t level_estimate(const Segment& seg, key_t x, pos_t cap, pos_t limit) {
    double v = seg.predict(x);
    if (std::isnan(v)) v = 0.0;
    v = std::min(v, static_cast<double>(cap));
    v = std::clamp(v, 0.0, static_cast<double>(limit));
    return static_cast<pos_t>(std::llround(v));
}

}  // namespace

SearchBound PgmIndex::lookup(key_t x) const {
    // One extra position on top covers absent keys: an x falling just
    // after key p has lower bound p+1 while the line is only
    // constrained around p.
    const ErrorEnvelope env{epsilon, epsilon + 1};
    if (x < min_key) return bound_from_estimate(0, env, n);
    if (x > max_key) return bound_from_estimate(n, env, n);

    pos_t seg = 0;
    for (std::size_t t = levels.size(); t-- > 1;) {
        const PgmLevel& level = levels[t];
        const PgmLevel& child = levels[t - 1];
        const pos_t m = child.segments.size();
        const pos_t cap = level.child_start[seg + 1];
        const pos_t pred = level_estimate(level.segments[seg], x, cap, m - 1);

        // The owner is within eps+1 below / eps above the prediction.
        const pos_t wlo = pred > epsilon + 1 ? pred - (epsilon + 1) : 0;
        const pos_t whi = std::min(m, pred + epsilon + 1);
        auto begin = child.segments.begin();
        auto it = std::upper_bound(begin + wlo, begin + whi, x,
                                   [](key_t v, const Segment& s) { return v < s.first_key; });
        seg = it == begin + wlo ? wlo : static_cast<pos_t>((it - begin) - 1);
    }

    const PgmLevel& bottom = levels.front();
    const pos_t cap = bottom.child_start[seg + 1];
    const pos_t est = level_estimate(bottom.segments[seg], x, cap, n);
    return bound_from_estimate(est, env, n);
}

std::size_t PgmIndex::total_segments() const {
    std::size_t total = 0;
    for (const auto& level : levels) total += level.segments.size();
    return total;
}

std::size_t PgmIndex::size_bytes() const { return 24 * total_segments() + 16; }

namespace {
constexpr char kPgmMagic[4] = {'P', 'G', 'M', '1'};
}

std::vector<std::uint8_t> to_blob(const PgmIndex& pgm) {
    blob::Writer w;
    w.magic(kPgmMagic);
    w.u64(pgm.epsilon);
    w.u64(pgm.n);
    w.u64(pgm.min_key);
    w.u64(pgm.max_key);
    w.u64(pgm.levels.size());
    for (const auto& level : pgm.levels) {
        w.u64(level.segments.size());
        w.u64(level.covered_count);
        for (const auto& s : level.segments) {
            w.u64(s.first_key);
            w.f64(s.slope);
            w.f64(s.intercept);
        }
        for (pos_t c : level.child_start) w.u64(c);
    }
    return w.take();
}

PgmIndex pgm_from_blob(std::span<const std::uint8_t> bytes) {
    blob::Reader r(bytes);
    r.magic(kPgmMagic);
    PgmIndex pgm;
    pgm.epsilon = r.u64();
    pgm.n = r.u64();
    pgm.min_key = r.u64();
    pgm.max_key = r.u64();
    pgm.levels.resize(r.u64());
    for (auto& level : pgm.levels) {
        level.segments.resize(r.u64());
        level.covered_count = r.u64();
        for (auto& s : level.segments) {
            s.first_key = r.u64();
            s.slope = r.f64();
            s.intercept = r.f64();
        }
        level.child_start.resize(level.segments.size() + 1);
        for (auto& c : level.child_start) c = r.u64();
    }
    r.expect_end();
    return pgm;
}

}  // namespace lil
