#include "lil/radix_spline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "lil/blob.hpp"

namespace lil {

SplineBuilder::SplineBuilder(pos_t epsilon) {
    if (epsilon < 1) throw std::invalid_argument("spline epsilon must be >= 1");
    half_width_ = static_cast<double>(epsilon - 1);
}

void SplineBuilder::add_key(key_t k) {
    const pos_t pos = count_++;
    if (pos == 0) {
        points_.push_back({k, 0.0});
        base_key_ = k;
        base_pos_ = 0;
        prev_key_ = k;
        prev_pos_ = 0;
        return;
    }
    if (k <= prev_key_) throw std::invalid_argument("spline keys must be strictly increasing");

    const double dx = static_cast<double>(k - base_key_);
    const double dy = static_cast<double>(pos) - static_cast<double>(base_pos_);
    const double slope = dy / dx;

    if (!corridor_set_) {
        slope_lo_ = (dy - half_width_) / dx;
        slope_hi_ = (dy + half_width_) / dx;
        corridor_set_ = true;
    } else if (slope < slope_lo_ || slope > slope_hi_) {
        // The exact point left the corridor: the previous point becomes
        // a spline point and the corridor restarts from it.
        points_.push_back({prev_key_, static_cast<double>(prev_pos_)});
        base_key_ = prev_key_;
        base_pos_ = prev_pos_;
        const double ndx = static_cast<double>(k - base_key_);
        const double ndy = static_cast<double>(pos) - static_cast<double>(base_pos_);
        slope_lo_ = (ndy - half_width_) / ndx;
        slope_hi_ = (ndy + half_width_) / ndx;
    } else {
        slope_lo_ = std::max(slope_lo_, (dy - half_width_) / dx);
        slope_hi_ = std::min(slope_hi_, (dy + half_width_) / dx);
    }
    prev_key_ = k;
    prev_pos_ = pos;
}

std::vector<SplinePoint> SplineBuilder::finish() {
    if (count_ == 0) throw std::logic_error("no keys fed to spline builder");
    if (points_.back().key != prev_key_)
        points_.push_back({prev_key_, static_cast<double>(prev_pos_)});
    return std::move(points_);
}

std::vector<SplinePoint> fit_spline(const SortedDataset& d, pos_t epsilon) {
    return fit_spline(d.keys.begin(), d.keys.end(), epsilon);
}

RadixTable build_radix_table(std::span<const SplinePoint> spline, unsigned radix_bits,
                             key_t key_universe_max) {
    if (radix_bits < 1 || radix_bits > 30)
        throw std::invalid_argument("radix bits must be in 1..30");
    RadixTable t;
    t.radix_bits = radix_bits;
    const unsigned width = std::bit_width(key_universe_max);
    t.shift = width > radix_bits ? width - radix_bits : 0;

    const std::size_t buckets = std::size_t{1} << radix_bits;
    t.offsets.resize(buckets + 1);
    std::uint32_t pos = 0;
    for (std::size_t p = 0; p <= buckets; ++p) {
        while (pos < spline.size() && t.extract(spline[pos].key) < p) ++pos;
        t.offsets[p] = pos;
    }
    return t;
}

double RsIndex::interpolate(key_t x) const {
    // Locate the segment via the radix table, then binary search the
    // bracketed spline points.
    const key_t prefix = std::min<key_t>(table.extract(x), (key_t{1} << table.radix_bits) - 1);
    const std::size_t lo = table.offsets[prefix];
    const std::size_t hi = std::min<std::size_t>(table.offsets[prefix + 1] + 1, spline.size());
    auto it = std::lower_bound(spline.begin() + lo, spline.begin() + hi, x,
                               [](const SplinePoint& p, key_t v) { return p.key < v; });
    if (it == spline.end()) return spline.back().position;
    if (it->key == x || it == spline.begin()) return it->position;
    const SplinePoint& b = *it;
    const SplinePoint& a = *(it - 1);
    const double seg_slope = (b.position - a.position) / static_cast<double>(b.key - a.key);
    return a.position + static_cast<double>(x - a.key) * seg_slope;
}

SearchBound RsIndex::lookup(key_t x) const {
    const ErrorEnvelope env{epsilon, epsilon};
    if (x <= min_key()) return bound_from_estimate(0, env, n);
    if (x > max_key()) return bound_from_estimate(n, env, n);
    const double est = interpolate(x);
    const double clamped = std::clamp(est, 0.0, static_cast<double>(n));
    return bound_from_estimate(static_cast<pos_t>(std::floor(clamped + 0.5)), env, n);
}

std::size_t RsIndex::size_bytes() const {
    return 16 * spline.size() + 4 * ((std::size_t{1} << table.radix_bits) + 1) + 24;
}

RsIndex build_rs(const SortedDataset& d, pos_t epsilon, unsigned radix_bits) {
    RsIndex rs;
    rs.epsilon = epsilon;
    rs.n = d.size();
    rs.spline = fit_spline(d, epsilon);
    rs.table = build_radix_table(rs.spline, radix_bits, d.max_key());
    return rs;
}

namespace {
constexpr char kRsMagic[4] = {'R', 'S', 'P', '1'};
}

std::vector<std::uint8_t> to_blob(const RsIndex& rs) {
    blob::Writer w;
    w.magic(kRsMagic);
    w.u64(rs.epsilon);
    w.u32(rs.table.radix_bits);
    w.u32(rs.table.shift);
    w.u64(rs.n);
    w.u64(rs.spline.size());
    for (const auto& p : rs.spline) {
        w.u64(p.key);
        w.f64(p.position);
    }
    for (std::uint32_t off : rs.table.offsets) w.u32(off);
    return w.take();
}

RsIndex rs_from_blob(std::span<const std::uint8_t> bytes) {
    blob::Reader r(bytes);
    r.magic(kRsMagic);
    RsIndex rs;
    rs.epsilon = r.u64();
    rs.table.radix_bits = r.u32();
    rs.table.shift = r.u32();
    rs.n = r.u64();
    rs.spline.resize(r.u64());
    for (auto& p : rs.spline) {
        p.key = r.u64();
        p.position = r.f64();
    }
    rs.table.offsets.resize((std::size_t{1} << rs.table.radix_bits) + 1);
    for (auto& off : rs.table.offsets) off = r.u32();
    r.expect_end();
    return rs;
}

}  // namespace lil
