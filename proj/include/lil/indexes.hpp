#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lil/baselines.hpp"
#include "lil/core.hpp"
#include "lil/pgm.hpp"
#include "lil/radix_spline.hpp"
#include "lil/rmi.hpp"

namespace lil {

enum class IndexKind : std::uint8_t { Rmi, RadixSpline, Pgm, Rbs, Sampled, Binary };

/// One point of the benchmark grid: which structure plus its knobs.
struct IndexConfig {
    IndexKind kind = IndexKind::Binary;
    ModelKind stage1 = ModelKind::Linear;  // rmi
    ModelKind stage2 = ModelKind::Linear;  // rmi
    std::uint64_t branching = 64;          // rmi
    pos_t epsilon = 32;                    // rs, pgm
    unsigned radix_bits = 12;              // rs, rbs
    pos_t stride = 16;                     // sampled

    std::string name() const;    // e.g. "rmi"
    std::string params() const;  // e.g. "linear/linear,B=64"
};

using IndexVariant =
    std::variant<TrainedRmi, RsIndex, PgmIndex, RbsIndex, SampledIndex, BinaryBaseline>;

IndexVariant build_index(const SortedDataset& d, const IndexConfig& cfg);

inline SearchBound index_lookup(const IndexVariant& ix, key_t x) {
    return std::visit([&](const auto& i) { return i.lookup(x); }, ix);
}
inline std::size_t index_size_bytes(const IndexVariant& ix) {
    return std::visit([](const auto& i) { return i.size_bytes(); }, ix);
}

std::vector<std::uint8_t> index_to_blob(const IndexVariant& ix);
/// Dispatches on the blob's magic.
IndexVariant index_from_blob(std::span<const std::uint8_t> bytes);

std::string to_string(IndexKind kind);
IndexKind index_kind_from_string(const std::string& s);
std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

}  // namespace lil
