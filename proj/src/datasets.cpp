#include "lil/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>

namespace lil {

namespace {

constexpr char kFooterMagic[4] = {'L', 'I', 'P', '1'};

std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t limit) {
    // limit == 0 means the full 64-bit range.
    if (limit == 0) return rng();
    return std::uniform_int_distribution<std::uint64_t>(0, limit - 1)(rng);
}

std::vector<key_t> draw_unique(std::mt19937_64& rng, pos_t n, std::uint64_t lo,
                               std::uint64_t span, const char* what) {
    // span == 0 encodes [lo, 2^64).
    std::vector<key_t> out;
    out.reserve(n);
    for (int rounds = 0; out.size() < n; ++rounds) {
        if (rounds > 100)
            throw std::invalid_argument(std::string("key universe too small for ") + what);
        const pos_t missing = n - out.size();
        for (pos_t i = 0; i < missing; ++i) out.push_back(lo + draw_below(rng, span));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return out;
}

std::vector<key_t> gen_uniform(std::mt19937_64& rng, pos_t n) {
    return draw_unique(rng, n, 0, 0, "uniform dataset");
}

std::vector<key_t> gen_lognormal(std::mt19937_64& rng, pos_t n, double mu, double sigma) {
    std::lognormal_distribution<double> dist(mu, sigma);
    std::vector<key_t> out;
    out.reserve(n);
    for (int rounds = 0; out.size() < n; ++rounds) {
        if (rounds > 100)
            throw std::invalid_argument("lognormal parameters produce too few distinct keys");
        const pos_t missing = n - out.size();
        for (pos_t i = 0; i < missing; ++i) {
            const double v = std::min(dist(rng) * 1e9, 9.0e18);
            out.push_back(static_cast<key_t>(std::llround(v)));
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return out;
}

std::vector<key_t> gen_outlier_tail(std::mt19937_64& rng, const DatasetSpec& spec) {
    if (spec.outlier_count >= spec.n)
        throw std::invalid_argument("outlier_count must be smaller than n");
    if (spec.low_band_bits >= spec.high_band_bits || spec.high_band_bits > 63)
        throw std::invalid_argument("outlier bands must satisfy low < high <= 63");
    const pos_t body = spec.n - spec.outlier_count;
    const std::uint64_t low_limit = std::uint64_t{1} << spec.low_band_bits;
    const std::uint64_t high_base = std::uint64_t{1} << spec.high_band_bits;
    auto keys = draw_unique(rng, body, 0, low_limit, "outlier body band");
    auto tail = draw_unique(rng, spec.outlier_count, high_base, 0 - high_base, "outlier tail band");
    keys.insert(keys.end(), tail.begin(), tail.end());
    return keys;  // bands are disjoint, each half already sorted
}

}  // namespace

payload_t gen_payload(std::uint64_t seed, key_t key) {
    // splitmix64-style finalizer over (seed, key)
    std::uint64_t z = key ^ (seed + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<payload_t> gen_payloads(std::span<const key_t> keys, std::uint64_t seed) {
    std::vector<payload_t> out(keys.size());
    for (pos_t i = 0; i < keys.size(); ++i) out[i] = gen_payload(seed, keys[i]);
    return out;
}

SortedDataset generate(const DatasetSpec& spec) {
    if (spec.n < 2) throw std::invalid_argument("dataset needs n >= 2");
    std::mt19937_64 rng(spec.seed);
    std::vector<key_t> keys;
    switch (spec.kind) {
        case DatasetKind::Uniform: keys = gen_uniform(rng, spec.n); break;
        case DatasetKind::Lognormal: keys = gen_lognormal(rng, spec.n, spec.mu, spec.sigma); break;
        case DatasetKind::OutlierTail: keys = gen_outlier_tail(rng, spec); break;
        default: throw std::invalid_argument("unknown dataset kind");
    }
    auto payloads = gen_payloads(keys, spec.seed);
    return SortedDataset(std::move(keys), std::move(payloads), spec.seed);
}

LookupWorkload gen_lookups(const SortedDataset& d, std::size_t m, std::uint64_t seed,
                           WorkloadMode mode) {
    if (m < 1) throw std::invalid_argument("workload needs m >= 1");
    std::mt19937_64 rng(seed);
    LookupWorkload w;
    w.mode = mode;
    w.queries.reserve(m);
    if (mode == WorkloadMode::ExistingKeys) {
        std::uniform_int_distribution<pos_t> pick(0, d.size() - 1);
        for (std::size_t i = 0; i < m; ++i) w.queries.push_back(d.keys[pick(rng)]);
    } else {
        std::uniform_int_distribution<key_t> pick(d.min_key(), d.max_key());
        for (std::size_t i = 0; i < m; ++i) w.queries.push_back(pick(rng));
    }
    return w;
}

std::uint64_t checksum(const SortedDataset& d, const LookupWorkload& w) {
    std::uint64_t sum = 0;
    for (key_t q : w.queries) {
        const pos_t i = lower_bound_oracle(d, q);
        if (i < d.size()) sum += d.payloads[i];
    }
    return sum;
}

namespace {

void put_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

}  // namespace

void save_sosd(const SortedDataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    put_u64(out, d.size());
    for (key_t k : d.keys) put_u64(out, k);
    out.write(kFooterMagic, 4);
    put_u64(out, d.payload_seed);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

SortedDataset load_sosd(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 8) throw std::runtime_error("truncated file (no count): " + path.string());
    const std::uint64_t count = get_u64(bytes.data());
    if (count < 2) throw std::runtime_error("key file holds fewer than 2 keys: " + path.string());
    const std::uint64_t key_bytes = count * 8;
    if (bytes.size() < 8 + key_bytes)
        throw std::runtime_error("truncated file (key section short): " + path.string());

    std::vector<key_t> keys(count);
    for (std::uint64_t i = 0; i < count; ++i) keys[i] = get_u64(bytes.data() + 8 + i * 8);
    for (std::uint64_t i = 1; i < count; ++i) {
        if (keys[i - 1] > keys[i]) throw std::runtime_error("unsorted keys: " + path.string());
        if (keys[i - 1] == keys[i]) throw std::runtime_error("duplicate keys: " + path.string());
    }

    std::uint64_t payload_seed = 0;
    const std::uint64_t rest = bytes.size() - 8 - key_bytes;
    if (rest != 0) {
        if (rest != 12 || std::memcmp(bytes.data() + 8 + key_bytes, kFooterMagic, 4) != 0)
            throw std::runtime_error("trailing bytes are not a LIP1 footer: " + path.string());
        payload_seed = get_u64(bytes.data() + 8 + key_bytes + 4);
    }
    auto payloads = gen_payloads(keys, payload_seed);
    return SortedDataset(std::move(keys), std::move(payloads), payload_seed);
}

std::string to_string(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::Uniform: return "uniform";
        case DatasetKind::Lognormal: return "lognormal";
        case DatasetKind::OutlierTail: return "outlier_tail";
    }
    return "?";
}

std::string to_string(WorkloadMode mode) {
    return mode == WorkloadMode::ExistingKeys ? "existing" : "range";
}

}  // namespace lil
