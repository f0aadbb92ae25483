#include "lil/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace lil {

namespace {

using clock_t_ = std::chrono::steady_clock;

inline std::uint64_t now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               clock_t_::now().time_since_epoch())
        .count();
}

inline void ordering_fence() {
#if defined(__x86_64__)
    asm volatile("mfence" ::: "memory");
#else
    std::atomic_thread_fence(std::memory_order_seq_cst);
    asm volatile("" ::: "memory");
#endif
}

std::size_t eviction_bytes(const BenchConfig& cfg) {
    if (const char* env = std::getenv("LIL_EVICT_MB")) {
        const long mb = std::atol(env);
        if (mb >= 1) return static_cast<std::size_t>(mb) << 20;
    }
    return std::max<std::size_t>(1, cfg.eviction_mb) << 20;
}

// Touch every cache line of the buffer so index and data get evicted.
void stream_evict(std::span<const char> buf) {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < buf.size(); i += 64) acc += static_cast<unsigned char>(buf[i]);
    asm volatile("" ::"r"(acc));
}

struct QueryStats {
    std::uint64_t checksum = 0;
    std::size_t violations = 0;
    double log2_sum = 0;
};

// One query through the full pipeline; falls back to the oracle
// position on a violation so the checksum stays comparable.
template <class Ix>
inline void run_query(const Ix& ix, const SortedDataset& d, key_t q, SearchStrategy strategy,
                      QueryStats& st) {
    const SearchBound b = ix.lookup(q);
    st.log2_sum += std::log2(static_cast<double>(std::max<pos_t>(1, b.width())));
    pos_t pos;
    try {
        pos = last_mile_search(d, b, q, strategy);
    } catch (const BoundViolation&) {
        ++st.violations;
        pos = lower_bound_oracle(d, q);
    }
    if (pos < d.size()) st.checksum += d.payloads[pos];
}

template <class Ix>
BenchResult measure_lookups_impl(const Ix& ix, const SortedDataset& d, const LookupWorkload& w,
                                 const BenchConfig& cfg) {
    BenchResult res;
    res.threads = 1;
    res.fence = cfg.fence;
    res.cache_mode = cfg.cache_mode;
    res.size_bytes = ix.size_bytes();

    const bool cold = cfg.cache_mode == CacheMode::Cold;
    const std::size_t batch = cold ? 1 : std::max<std::size_t>(1, cfg.batch);
    std::vector<char> evict_buf;
    if (cold) evict_buf.assign(eviction_bytes(cfg), 1);

    const std::size_t m = w.queries.size();
    std::vector<double> batch_ns;
    batch_ns.reserve(m / batch + 1);
    QueryStats st;
    std::uint64_t total_ns = 0;

    std::size_t i = 0;
    while (i < m) {
        const std::size_t start = i;
        const std::size_t end = std::min(m, i + batch);
        const std::uint64_t t0 = now_ns();
        for (; i < end; ++i) {
            run_query(ix, d, w.queries[i], cfg.strategy, st);
            if (cfg.fence) ordering_fence();
        }
        const std::uint64_t dt = now_ns() - t0;
        total_ns += dt;
        batch_ns.push_back(static_cast<double>(dt) / static_cast<double>(end - start));
        if (cold) stream_evict(evict_buf);
    }

    res.checksum = st.checksum;
    res.violations = st.violations;
    res.avg_log2_bound = m ? st.log2_sum / static_cast<double>(m) : 0.0;
    res.avg_lookup_ns = m ? static_cast<double>(total_ns) / static_cast<double>(m) : 0.0;
    if (!batch_ns.empty()) {
        std::sort(batch_ns.begin(), batch_ns.end());
        res.p50_ns = batch_ns[batch_ns.size() / 2];
        res.p99_ns = batch_ns[std::min(batch_ns.size() - 1,
                                       static_cast<std::size_t>(
                                           std::ceil(0.99 * batch_ns.size()) - 1))];
    }
    res.throughput_lookups_per_s =
        total_ns ? static_cast<double>(m) * 1e9 / static_cast<double>(total_ns) : 0.0;
    return res;
}

}  // namespace

std::uint64_t measure_build(const std::function<void()>& build, unsigned repetitions) {
    repetitions = std::max(1u, repetitions);
    std::vector<std::uint64_t> runs;
    runs.reserve(repetitions);
    for (unsigned r = 0; r < repetitions; ++r) {
        const std::uint64_t t0 = now_ns();
        build();
        runs.push_back(now_ns() - t0);
    }
    std::sort(runs.begin(), runs.end());
    return runs[runs.size() / 2];
}

BenchResult measure_lookups(const IndexVariant& ix, const SortedDataset& d,
                            const LookupWorkload& w, const BenchConfig& cfg) {
    return std::visit(
        [&](const auto& concrete) { return measure_lookups_impl(concrete, d, w, cfg); }, ix);
}

ThroughputResult run_multithreaded(const IndexVariant& ix, const SortedDataset& d,
                                   const LookupWorkload& w, unsigned threads,
                                   SearchStrategy strategy, bool fence) {
    threads = std::max(1u, threads);
    const std::size_t m = w.queries.size();
    std::vector<QueryStats> stats(threads);

    const std::uint64_t t0 = now_ns();
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t lo = m * t / threads;
            const std::size_t hi = m * (t + 1) / threads;
            workers.emplace_back([&, lo, hi, t] {
                std::visit(
                    [&](const auto& concrete) {
                        QueryStats local;
                        for (std::size_t i = lo; i < hi; ++i) {
                            run_query(concrete, d, w.queries[i], strategy, local);
                            if (fence) ordering_fence();
                        }
                        stats[t] = local;
                    },
                    ix);
            });
        }
    }
    const std::uint64_t dt = now_ns() - t0;

    ThroughputResult res;
    for (const auto& st : stats) {
        res.checksum += st.checksum;
        res.violations += st.violations;
    }
    res.lookups_per_s = dt ? static_cast<double>(m) * 1e9 / static_cast<double>(dt) : 0.0;
    return res;
}

std::vector<std::size_t> pareto_front(std::span<const ParetoPoint> rows) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < rows.size() && !dominated; ++j) {
            if (j == i) continue;
            dominated = rows[j].size_bytes <= rows[i].size_bytes &&
                        rows[j].latency_ns <= rows[i].latency_ns &&
                        (rows[j].size_bytes < rows[i].size_bytes ||
                         rows[j].latency_ns < rows[i].latency_ns);
        }
        if (!dominated) keep.push_back(i);
    }
    return keep;
}

namespace {

std::string fmt_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace

void write_csv(std::span<const BenchResult> results, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "dataset,index,config,size_bytes,build_ns,avg_lookup_ns,p50_ns,p99_ns,"
           "avg_log2_bound,threads,fence,cache_mode,checksum,violations\n";
    for (const auto& r : results) {
        out << r.dataset << ',' << r.index << ',' << r.config << ',' << r.size_bytes << ','
            << r.build_ns << ',' << fmt_real(r.avg_lookup_ns) << ',' << fmt_real(r.p50_ns) << ','
            << fmt_real(r.p99_ns) << ',' << fmt_real(r.avg_log2_bound) << ',' << r.threads << ','
            << (r.fence ? "on" : "off") << ',' << to_string(r.cache_mode) << ',' << r.checksum
            << ',' << r.violations << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string to_string(CacheMode mode) { return mode == CacheMode::Warm ? "warm" : "cold"; }

std::string to_string(SearchStrategy s) {
    switch (s) {
        case SearchStrategy::Binary: return "binary";
        case SearchStrategy::Linear: return "linear";
        case SearchStrategy::Interpolation: return "interpolation";
    }
    return "?";
}

SearchStrategy strategy_from_string(const std::string& s) {
    if (s == "binary") return SearchStrategy::Binary;
    if (s == "linear") return SearchStrategy::Linear;
    if (s == "interpolation") return SearchStrategy::Interpolation;
    throw std::invalid_argument("unknown search strategy: " + s);
}

}  // namespace lil
