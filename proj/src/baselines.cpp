#include "lil/baselines.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "lil/blob.hpp"

namespace lil {

RbsIndex build_rbs(const SortedDataset& d, unsigned radix_bits) {
    if (radix_bits < 1 || radix_bits > 30)
        throw std::invalid_argument("radix bits must be in 1..30");
    RbsIndex rbs;
    rbs.radix_bits = radix_bits;
    rbs.n = d.size();
    const unsigned width = std::bit_width(d.max_key());
    rbs.shift = width > radix_bits ? width - radix_bits : 0;

    const std::size_t buckets = std::size_t{1} << radix_bits;
    rbs.table.resize(buckets + 1);
    std::uint32_t pos = 0;
    for (std::size_t p = 0; p <= buckets; ++p) {
        while (pos < d.size() && rbs.extract(d.keys[pos]) < p) ++pos;
        rbs.table[p] = pos;
    }
    return rbs;
}

SearchBound RbsIndex::lookup(key_t x) const {
    const key_t buckets = key_t{1} << radix_bits;
    const key_t b = std::min(extract(x), buckets - 1);
    const pos_t hi = std::min<pos_t>(n + 1, table[b + 1] + std::size_t{1});
    return {table[b], hi};
}

SampledIndex build_sampled(const SortedDataset& d, pos_t stride) {
    if (stride < 1) throw std::invalid_argument("sample stride must be >= 1");
    SampledIndex s;
    s.stride = stride;
    s.n = d.size();
    for (pos_t i = 0; i < d.size(); i += stride) s.sample_keys.push_back(d.keys[i]);
    return s;
}

SearchBound SampledIndex::lookup(key_t x) const {
    // Rightmost sampled key <= x; its position anchors the bound.
    auto it = std::upper_bound(sample_keys.begin(), sample_keys.end(), x);
    const pos_t lo = it == sample_keys.begin()
                         ? 0
                         : static_cast<pos_t>(it - sample_keys.begin() - 1) * stride;
    return {lo, std::min(n + 1, lo + stride + 1)};
}

namespace {
constexpr char kRbsMagic[4] = {'R', 'B', 'X', '1'};
constexpr char kSampledMagic[4] = {'S', 'M', 'P', '1'};
constexpr char kBinaryMagic[4] = {'B', 'I', 'N', '1'};
}  // namespace

std::vector<std::uint8_t> to_blob(const RbsIndex& rbs) {
    blob::Writer w;
    w.magic(kRbsMagic);
    w.u32(rbs.radix_bits);
    w.u32(rbs.shift);
    w.u64(rbs.n);
    for (std::uint32_t v : rbs.table) w.u32(v);
    return w.take();
}

RbsIndex rbs_from_blob(std::span<const std::uint8_t> bytes) {
    blob::Reader r(bytes);
    r.magic(kRbsMagic);
    RbsIndex rbs;
    rbs.radix_bits = r.u32();
    rbs.shift = r.u32();
    rbs.n = r.u64();
    rbs.table.resize((std::size_t{1} << rbs.radix_bits) + 1);
    for (auto& v : rbs.table) v = r.u32();
    r.expect_end();
    return rbs;
}

std::vector<std::uint8_t> to_blob(const SampledIndex& s) {
    blob::Writer w;
    w.magic(kSampledMagic);
    w.u64(s.stride);
    w.u64(s.n);
    w.u64(s.sample_keys.size());
    for (key_t k : s.sample_keys) w.u64(k);
    return w.take();
}

SampledIndex sampled_from_blob(std::span<const std::uint8_t> bytes) {
    blob::Reader r(bytes);
    r.magic(kSampledMagic);
    SampledIndex s;
    s.stride = r.u64();
    s.n = r.u64();
    s.sample_keys.resize(r.u64());
    for (auto& k : s.sample_keys) k = r.u64();
    r.expect_end();
    return s;
}

std::vector<std::uint8_t> to_blob(const BinaryBaseline& b) {
    blob::Writer w;
    w.magic(kBinaryMagic);
    w.u64(b.n);
    return w.take();
}

BinaryBaseline binary_from_blob(std::span<const std::uint8_t> bytes) {
    blob::Reader r(bytes);
    r.magic(kBinaryMagic);
    BinaryBaseline b{r.u64()};
    r.expect_end();
    return b;
}

}  // namespace lil
