#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lil/core.hpp"
#include "lil/datasets.hpp"
#include "lil/indexes.hpp"

namespace lil {

enum class CacheMode : std::uint8_t { Warm = 0, Cold = 1 };

struct BenchConfig {
    SearchStrategy strategy = SearchStrategy::Binary;
    unsigned repetitions = 5;   // R, used by build timing
    std::size_t batch = 100;    // queries per timing batch (warm mode)
    bool fence = false;         // ordering barrier between lookups
    CacheMode cache_mode = CacheMode::Warm;
    std::size_t eviction_mb = 64;  // cold-mode eviction buffer size
    unsigned threads = 1;
};

struct BenchResult {
    std::string dataset;
    std::string index;
    std::string config;
    std::size_t size_bytes = 0;
    std::uint64_t build_ns = 0;
    double avg_lookup_ns = 0;
    double p50_ns = 0;
    double p99_ns = 0;
    double avg_log2_bound = 0;
    double throughput_lookups_per_s = 0;
    unsigned threads = 1;
    bool fence = false;
    CacheMode cache_mode = CacheMode::Warm;
    std::uint64_t checksum = 0;
    std::size_t violations = 0;
};

/// Median wall-clock nanoseconds of `repetitions` single-threaded builds.
std::uint64_t measure_build(const std::function<void()>& build, unsigned repetitions);

/**
 * Runs the workload through the index: per query the index emits a
 * bound, the last-mile search resolves the position, and that key's
 * payload feeds the checksum. Violations are counted, not fatal.
 * Latency is timed in batches to amortize timer overhead; cold mode
 * forces batch size 1 and streams over an eviction buffer between
 * lookups (untimed). LIL_EVICT_MB overrides the buffer size.
 */
BenchResult measure_lookups(const IndexVariant& ix, const SortedDataset& d,
                            const LookupWorkload& w, const BenchConfig& cfg);

struct ThroughputResult {
    double lookups_per_s = 0;
    std::uint64_t checksum = 0;
    std::size_t violations = 0;
};

/// Partitions the workload over T workers sharing the immutable index;
/// per-worker checksums are combined so the total stays comparable to
/// the single-threaded oracle.
ThroughputResult run_multithreaded(const IndexVariant& ix, const SortedDataset& d,
                                   const LookupWorkload& w, unsigned threads,
                                   SearchStrategy strategy = SearchStrategy::Binary,
                                   bool fence = false);

struct ParetoPoint {
    double size_bytes;
    double latency_ns;
};

/// Indices of rows not strictly dominated (some other row <= on both
/// axes and < on one), preserving input order. Duplicates survive.
std::vector<std::size_t> pareto_front(std::span<const ParetoPoint> rows);

void write_csv(std::span<const BenchResult> results, const std::filesystem::path& path);

std::string to_string(CacheMode mode);
std::string to_string(SearchStrategy s);
SearchStrategy strategy_from_string(const std::string& s);

}  // namespace lil
