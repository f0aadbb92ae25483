#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lil/core.hpp"

namespace lil {

enum class DatasetKind : std::uint8_t { Uniform = 0, Lognormal = 1, OutlierTail = 2 };

/**
 * Declarative recipe for a synthetic dataset. Generation is fully
 * deterministic in (kind, n, seed, params).
 *
 * Uniform draws keys from the whole 64-bit space. Lognormal draws
 * exp(N(mu, sigma)) scaled by 1e9, which yields a distinctly non-linear
 * key distribution. OutlierTail places all but `outlier_count` keys
 * below 2^low_band_bits and the outliers at or above 2^high_band_bits,
 * the pattern that defeats plain radix tables.
 */
struct DatasetSpec {
    DatasetKind kind = DatasetKind::Uniform;
    pos_t n = 1000;
    std::uint64_t seed = 42;
    double mu = 0.0;       // Lognormal
    double sigma = 2.0;    // Lognormal
    pos_t outlier_count = 100;  // OutlierTail
    unsigned low_band_bits = 50;
    unsigned high_band_bits = 59;
};

enum class WorkloadMode : std::uint8_t { ExistingKeys = 0, UniformInRange = 1 };

struct LookupWorkload {
    std::vector<key_t> queries;
    WorkloadMode mode = WorkloadMode::ExistingKeys;
};

SortedDataset generate(const DatasetSpec& spec);

/// Deterministic 8-byte payload for each key; pure mix of (seed, key).
payload_t gen_payload(std::uint64_t seed, key_t key);
std::vector<payload_t> gen_payloads(std::span<const key_t> keys, std::uint64_t seed);

LookupWorkload gen_lookups(const SortedDataset& d, std::size_t m, std::uint64_t seed,
                           WorkloadMode mode);

/// Wrapping sum of payload[LB(x)] over the workload; LB == n adds 0.
/// Every index/strategy combination must reproduce this value exactly.
std::uint64_t checksum(const SortedDataset& d, const LookupWorkload& w);

/// Binary key file: u64 LE count, count u64 LE keys (sorted, unique),
/// then a "LIP1" footer carrying the payload seed. Only keys and the
/// seed are stored; payloads are regenerated on load. Footer-less files
/// (plain key dumps) load with payload seed 0.
void save_sosd(const SortedDataset& d, const std::filesystem::path& path);
SortedDataset load_sosd(const std::filesystem::path& path);

std::string to_string(DatasetKind kind);
std::string to_string(WorkloadMode mode);

}  // namespace lil
