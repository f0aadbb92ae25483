#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lil/core.hpp"

namespace lil {

enum class ModelKind : std::uint8_t { Linear = 0, Cubic = 1 };

/// A (key, position) training pair, keys already cast to double.
struct ModelPoint {
    double x;
    double y;
};

struct LinearModel {
    double slope = 0.0;
    double intercept = 0.0;

    double predict(double x) const { return slope * x + intercept; }
};

/**
 * Cubic a*t^3 + b*t^2 + c*t + d evaluated on the affinely normalized
 * key t = (x - base) * scale. A linear model embeds as a = b = 0 with
 * the identity normalization, so this doubles as the unified leaf
 * representation inside a trained RMI.
 */
struct CubicModel {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    double base = 0.0;
    double scale = 1.0;

    double predict(double x) const {
        const double t = (x - base) * scale;
        return ((a * t + b) * t + c) * t + d;
    }
    static CubicModel from_linear(LinearModel m) {
        return {0.0, 0.0, m.slope, m.intercept, 0.0, 1.0};
    }
};

/// Ordinary least squares; a single point fits slope 0 through it.
LinearModel fit_linear(std::span<const ModelPoint> points);

/// Least-squares cubic on keys normalized to [0, 1]; fewer than four
/// points fall back to the linear fit embedded as a cubic.
CubicModel fit_cubic(std::span<const ModelPoint> points);

struct RmiConfig {
    ModelKind stage1 = ModelKind::Linear;
    ModelKind stage2 = ModelKind::Linear;
    std::uint64_t branching = 64;  // B, the number of stage-2 models
};

/**
 * Two-stage recursive model index. The stage-1 model routes a key to
 * one of B stage-2 leaves; the leaf's prediction, widened by that
 * leaf's error envelope, becomes the search bound.
 *
 * Two envelopes are kept per leaf: `train_env` is the exact maximum
 * deviation over the keys assigned to the leaf, `lookup_env` also
 * covers every key the stage-1 model can route to the leaf (including
 * absent keys inside gaps), so lookups are valid for the full 64-bit
 * key space.
 */
struct TrainedRmi {
    RmiConfig config;
    pos_t n = 0;
    CubicModel stage1;
    std::vector<CubicModel> leaves;
    std::vector<ErrorEnvelope> train_env;
    std::vector<ErrorEnvelope> lookup_env;

    std::uint64_t leaf_index(key_t x) const;
    SearchBound lookup(key_t x) const;
    std::size_t size_bytes() const;
};

/// Trains stage 1 on all (key, position) pairs, partitions keys by
/// predicted leaf, fits each leaf, and records both envelope kinds.
TrainedRmi train_rmi(const SortedDataset& d, const RmiConfig& cfg);

inline SearchBound rmi_lookup(const TrainedRmi& rmi, key_t x) { return rmi.lookup(x); }

std::vector<std::uint8_t> to_blob(const TrainedRmi& rmi);
TrainedRmi rmi_from_blob(std::span<const std::uint8_t> bytes);

}  // namespace lil
