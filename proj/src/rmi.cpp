#include "lil/rmi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lil/blob.hpp"

namespace lil {

LinearModel fit_linear(std::span<const ModelPoint> points) {
    if (points.empty()) throw std::invalid_argument("fit_linear needs at least one point");
    if (points.size() == 1) return {0.0, points[0].y};

    long double mx = 0, my = 0;
    for (const auto& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= points.size();
    my /= points.size();

    long double sxx = 0, sxy = 0;
    for (const auto& p : points) {
        const long double dx = p.x - mx;
        sxx += dx * dx;
        sxy += dx * (p.y - my);
    }
    if (sxx == 0) return {0.0, static_cast<double>(my)};
    const long double slope = sxy / sxx;
    return {static_cast<double>(slope), static_cast<double>(my - slope * mx)};
}

namespace {

// Solves the 4x4 normal equations with partial pivoting; returns false
// when the system is singular.
bool solve4(std::array<std::array<long double, 5>, 4>& m, std::array<long double, 4>& out) {
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
        if (m[pivot][col] == 0) return false;
        std::swap(m[col], m[pivot]);
        for (int r = col + 1; r < 4; ++r) {
            const long double f = m[r][col] / m[col][col];
            for (int c = col; c < 5; ++c) m[r][c] -= f * m[col][c];
        }
    }
    for (int r = 3; r >= 0; --r) {
        long double acc = m[r][4];
        for (int c = r + 1; c < 4; ++c) acc -= m[r][c] * out[c];
        out[r] = acc / m[r][r];
    }
    return true;
}

}  // namespace

CubicModel fit_cubic(std::span<const ModelPoint> points) {
    if (points.empty()) throw std::invalid_argument("fit_cubic needs at least one point");
    if (points.size() < 4) return CubicModel::from_linear(fit_linear(points));

    double xmin = points[0].x, xmax = points[0].x;
    for (const auto& p : points) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
    }
    if (xmax <= xmin) return CubicModel::from_linear(fit_linear(points));
    const double base = xmin;
    const double scale = 1.0 / (xmax - xmin);

    // Moments of t^k for k = 0..6 and of t^k * y for k = 0..3.
    std::array<long double, 7> tm{};
    std::array<long double, 4> ty{};
    for (const auto& p : points) {
        const long double t = (p.x - base) * scale;
        long double pw = 1;
        for (int k = 0; k <= 6; ++k) {
            tm[k] += pw;
            if (k <= 3) ty[k] += pw * p.y;
            pw *= t;
        }
    }
    std::array<std::array<long double, 5>, 4> sys{};
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) sys[r][c] = tm[r + c];
        sys[r][4] = ty[r];
    }
    std::array<long double, 4> coef{};
    if (!solve4(sys, coef)) return CubicModel::from_linear(fit_linear(points));

    CubicModel m;
    m.d = static_cast<double>(coef[0]);
    m.c = static_cast<double>(coef[1]);
    m.b = static_cast<double>(coef[2]);
    m.a = static_cast<double>(coef[3]);
    m.base = base;
    m.scale = scale;
    return m;
}

namespace {

// Prediction pipeline shared by training and lookup: clamp into [0, n],
// round to nearest. Envelope soundness relies on both sides computing
// estimates identically.
pos_t estimate(const CubicModel& m, double xd, pos_t n) {
    double p = m.predict(xd);
    if (std::isnan(p)) p = 0.0;
    p = std::clamp(p, 0.0, static_cast<double>(n));
    return static_cast<pos_t>(std::llround(p));
}

std::uint64_t route(const CubicModel& stage1, double xd, std::uint64_t branching, pos_t n) {
    const double r =
        std::floor(stage1.predict(xd) * static_cast<double>(branching) / static_cast<double>(n));
    if (!(r > 0)) return 0;  // also catches NaN
    if (r >= static_cast<double>(branching)) return branching - 1;
    return static_cast<std::uint64_t>(r);
}

struct ValueRange {
    double lo;
    double hi;
};

// Extremes of the model over [x0, x1]: endpoints plus any interior
// critical points of the cubic.
ValueRange model_range(const CubicModel& m, double x0, double x1) {
    double lo = std::min(m.predict(x0), m.predict(x1));
    double hi = std::max(m.predict(x0), m.predict(x1));
    if (m.a != 0.0 || m.b != 0.0) {
        // d/dt = 3a t^2 + 2b t + c
        const double qa = 3.0 * m.a, qb = 2.0 * m.b, qc = m.c;
        std::array<double, 2> roots{};
        int cnt = 0;
        if (qa == 0.0) {
            if (qb != 0.0) roots[cnt++] = -qc / qb;
        } else {
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc >= 0.0) {
                const double s = std::sqrt(disc);
                roots[cnt++] = (-qb - s) / (2.0 * qa);
                roots[cnt++] = (-qb + s) / (2.0 * qa);
            }
        }
        for (int i = 0; i < cnt; ++i) {
            if (m.scale == 0.0) continue;
            const double x = m.base + roots[i] / m.scale;
            if (x >= x0 && x <= x1) {
                const double v = m.predict(x);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    return {lo, hi};
}

class RmiTrainer {
  public:
    RmiTrainer(const SortedDataset& d, const RmiConfig& cfg) : d_(d), cfg_(cfg) {
        if (cfg.branching == 0) throw std::invalid_argument("branching factor must be >= 1");
    }

    TrainedRmi run() {
        const pos_t n = d_.size();
        const std::uint64_t bf = cfg_.branching;

        std::vector<ModelPoint> pts;
        pts.reserve(n);
        for (pos_t i = 0; i < n; ++i)
            pts.push_back({static_cast<double>(d_.keys[i]), static_cast<double>(i)});

        rmi_.config = cfg_;
        rmi_.n = n;
        rmi_.stage1 = fit_stage(cfg_.stage1, pts);

        // Partition pairs by predicted leaf.
        std::vector<std::vector<ModelPoint>> buckets(bf);
        std::vector<std::uint64_t> leaf_of(n);
        for (pos_t i = 0; i < n; ++i) {
            leaf_of[i] = route(rmi_.stage1, pts[i].x, bf, n);
            buckets[leaf_of[i]].push_back(pts[i]);
        }

        rmi_.leaves.resize(bf);
        rmi_.train_env.assign(bf, {});
        rmi_.lookup_env.assign(bf, {});
        fit_leaves(buckets);

        for (pos_t i = 0; i < n; ++i) {
            const std::uint64_t j = leaf_of[i];
            const pos_t est = estimate(rmi_.leaves[j], pts[i].x, n);
            auto& env = rmi_.train_env[j];
            if (est > i)
                env.under = std::max(env.under, est - i);
            else
                env.over = std::max(env.over, i - est);
        }
        for (std::uint64_t j = 0; j < bf; ++j) {
            rmi_.lookup_env[j].under = std::max(rmi_.lookup_env[j].under, rmi_.train_env[j].under);
            rmi_.lookup_env[j].over = std::max(rmi_.lookup_env[j].over, rmi_.train_env[j].over);
        }

        cover_gaps();
        return std::move(rmi_);
    }

  private:
    static CubicModel fit_stage(ModelKind kind, std::span<const ModelPoint> pts) {
        return kind == ModelKind::Linear ? CubicModel::from_linear(fit_linear(pts))
                                         : fit_cubic(pts);
    }

    void fit_leaves(const std::vector<std::vector<ModelPoint>>& buckets) {
        const std::uint64_t bf = cfg_.branching;
        // Boundary position an empty leaf should predict: the position
        // of the first pair in the next non-empty leaf (n past the end).
        std::vector<double> boundary(bf, static_cast<double>(d_.size()));
        double next = static_cast<double>(d_.size());
        for (std::uint64_t j = bf; j-- > 0;) {
            boundary[j] = next;
            if (!buckets[j].empty()) next = buckets[j].front().y;
        }
        for (std::uint64_t j = 0; j < bf; ++j) {
            if (buckets[j].empty()) {
                rmi_.leaves[j] = CubicModel{0.0, 0.0, 0.0, boundary[j], 0.0, 1.0};
                rmi_.lookup_env[j] = {1, 1};
            } else {
                rmi_.leaves[j] = fit_stage(cfg_.stage2, buckets[j]);
            }
        }
    }

    // Widens lookup envelopes so that every key routable into a leaf --
    // in particular absent keys inside gaps between dataset keys -- maps
    // to a bound containing its lower bound. The recorded training
    // envelopes only cover the assigned keys themselves.
    void cover_gaps() {
        const pos_t n = d_.size();
        if (d_.keys.front() > 0) gap(0, d_.keys.front() - 1, 0);
        for (pos_t i = 0; i + 1 < n; ++i)
            if (d_.keys[i + 1] - d_.keys[i] > 1) gap(d_.keys[i] + 1, d_.keys[i + 1] - 1, i + 1);
        if (d_.keys.back() < std::numeric_limits<key_t>::max())
            gap(d_.keys.back() + 1, std::numeric_limits<key_t>::max(), n);
    }

    void gap(key_t klo, key_t khi, pos_t truth) {
        const pos_t n = d_.size();
        const std::uint64_t bf = cfg_.branching;
        const double x0 = static_cast<double>(klo);
        const double x1 = static_cast<double>(khi);

        // Leaves the router can reach anywhere in the gap. A hair of
        // slack absorbs float noise at routing boundaries.
        const ValueRange vr = model_range(rmi_.stage1, x0, x1);
        const double bn = static_cast<double>(bf) / static_cast<double>(n);
        const double rlo = std::clamp(std::floor(vr.lo * bn - 1e-6), -1.0, static_cast<double>(bf));
        const double rhi = std::clamp(std::floor(vr.hi * bn + 1e-6), -1.0, static_cast<double>(bf));
        const std::uint64_t jlo = rlo < 0 ? 0 : std::min<std::uint64_t>(bf - 1, static_cast<std::uint64_t>(rlo));
        const std::uint64_t jhi = rhi < 0 ? 0 : std::min<std::uint64_t>(bf - 1, static_cast<std::uint64_t>(rhi));

        for (std::uint64_t j = jlo; j <= jhi; ++j) {
            const ValueRange er = model_range(rmi_.leaves[j], x0, x1);
            double plo = std::isnan(er.lo) ? 0.0 : std::clamp(er.lo, 0.0, static_cast<double>(n));
            double phi = std::isnan(er.hi) ? 0.0 : std::clamp(er.hi, 0.0, static_cast<double>(n));
            const pos_t elo = static_cast<pos_t>(std::llround(plo));
            const pos_t ehi = static_cast<pos_t>(std::llround(phi));
            auto& env = rmi_.lookup_env[j];
            // +1 on each side covers rounding of estimates that sit a
            // float ulp past the analyzed extremes.
            if (ehi + 1 > truth) env.under = std::max(env.under, ehi + 1 - truth);
            if (elo < truth + 1) env.over = std::max(env.over, truth + 1 - elo);
        }
    }

    const SortedDataset& d_;
    RmiConfig cfg_;
    TrainedRmi rmi_;
};

}  // namespace

std::uint64_t TrainedRmi::leaf_index(key_t x) const {
    return route(stage1, static_cast<double>(x), config.branching, n);
}

SearchBound TrainedRmi::lookup(key_t x) const {
    const std::uint64_t j = leaf_index(x);
    const pos_t est = estimate(leaves[j], static_cast<double>(x), n);
    return bound_from_estimate(est, lookup_env[j], n);
}

std::size_t TrainedRmi::size_bytes() const {
    auto model_bytes = [](ModelKind k) { return k == ModelKind::Linear ? 16u : 32u; };
    return model_bytes(config.stage1) + config.branching * model_bytes(config.stage2) +
           config.branching * 16 + 16;
}

TrainedRmi train_rmi(const SortedDataset& d, const RmiConfig& cfg) {
    return RmiTrainer(d, cfg).run();
}

namespace {

constexpr char kRmiMagic[4] = {'R', 'M', 'I', '1'};

void put_model(blob::Writer& w, const CubicModel& m) {
    w.f64(m.a);
    w.f64(m.b);
    w.f64(m.c);
    w.f64(m.d);
    w.f64(m.base);
    w.f64(m.scale);
}

CubicModel get_model(blob::Reader& r) {
    CubicModel m;
    m.a = r.f64();
    m.b = r.f64();
    m.c = r.f64();
    m.d = r.f64();
    m.base = r.f64();
    m.scale = r.f64();
    return m;
}

}  // namespace

std::vector<std::uint8_t> to_blob(const TrainedRmi& rmi) {
    blob::Writer w;
    w.magic(kRmiMagic);
    w.u8(static_cast<std::uint8_t>(rmi.config.stage1));
    w.u8(static_cast<std::uint8_t>(rmi.config.stage2));
    w.u8(0);
    w.u8(0);
    w.u32(0);
    w.u64(rmi.config.branching);
    w.u64(rmi.n);
    put_model(w, rmi.stage1);
    for (std::uint64_t j = 0; j < rmi.config.branching; ++j) {
        put_model(w, rmi.leaves[j]);
        w.u64(rmi.train_env[j].under);
        w.u64(rmi.train_env[j].over);
        w.u64(rmi.lookup_env[j].under);
        w.u64(rmi.lookup_env[j].over);
    }
    return w.take();
}

TrainedRmi rmi_from_blob(std::span<const std::uint8_t> bytes) {
    blob::Reader r(bytes);
    r.magic(kRmiMagic);
    TrainedRmi rmi;
    rmi.config.stage1 = static_cast<ModelKind>(r.u8());
    rmi.config.stage2 = static_cast<ModelKind>(r.u8());
    r.u8();
    r.u8();
    r.u32();
    rmi.config.branching = r.u64();
    rmi.n = r.u64();
    rmi.stage1 = get_model(r);
    rmi.leaves.resize(rmi.config.branching);
    rmi.train_env.resize(rmi.config.branching);
    rmi.lookup_env.resize(rmi.config.branching);
    for (std::uint64_t j = 0; j < rmi.config.branching; ++j) {
        rmi.leaves[j] = get_model(r);
        rmi.train_env[j] = {r.u64(), r.u64()};
        rmi.lookup_env[j] = {r.u64(), r.u64()};
    }
    r.expect_end();
    return rmi;
}

}  // namespace lil
