#include "lil/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "lil/bench.hpp"
#include "lil/datasets.hpp"
#include "lil/indexes.hpp"

namespace lil::cli {

namespace {

using nlohmann::json;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct IndexFlags {
    std::string kind = "binary";
    std::string stage1 = "linear";
    std::string stage2 = "linear";
    std::uint64_t branching = 64;
    std::uint64_t epsilon = 32;
    unsigned radix_bits = 12;
    std::uint64_t stride = 16;

    IndexConfig to_config() const {
        IndexConfig cfg;
        cfg.kind = index_kind_from_string(kind);
        cfg.stage1 = model_kind_from_string(stage1);
        cfg.stage2 = model_kind_from_string(stage2);
        cfg.branching = branching;
        cfg.epsilon = epsilon;
        cfg.radix_bits = radix_bits;
        cfg.stride = stride;
        return cfg;
    }
};

void add_index_flags(CLI::App* cmd, IndexFlags& f) {
    cmd->add_option("--index", f.kind, "index kind: rmi|rs|pgm|rbs|sampled|binary");
    cmd->add_option("--stage1", f.stage1, "rmi stage-1 model: linear|cubic");
    cmd->add_option("--stage2", f.stage2, "rmi stage-2 model: linear|cubic");
    cmd->add_option("--branching", f.branching, "rmi branching factor B");
    cmd->add_option("--epsilon", f.epsilon, "rs/pgm error bound");
    cmd->add_option("--radix-bits", f.radix_bits, "rs/rbs radix table bits");
    cmd->add_option("--stride", f.stride, "sampled index stride k");
}

DatasetSpec spec_from_json(const json& j) {
    DatasetSpec spec;
    const std::string kind = j.value("kind", "uniform");
    if (kind == "uniform")
        spec.kind = DatasetKind::Uniform;
    else if (kind == "lognormal")
        spec.kind = DatasetKind::Lognormal;
    else if (kind == "outlier_tail")
        spec.kind = DatasetKind::OutlierTail;
    else
        throw std::runtime_error("unknown dataset kind in manifest: " + kind);
    spec.n = j.value("n", std::uint64_t{1000});
    spec.seed = j.value("seed", std::uint64_t{42});
    spec.mu = j.value("mu", 0.0);
    spec.sigma = j.value("sigma", 2.0);
    spec.outlier_count = j.value("outlier_count", std::uint64_t{100});
    spec.low_band_bits = j.value("low_band_bits", 50u);
    spec.high_band_bits = j.value("high_band_bits", 59u);
    return spec;
}

IndexConfig config_from_json(const json& j) {
    IndexConfig cfg;
    cfg.kind = index_kind_from_string(j.at("kind").get<std::string>());
    cfg.stage1 = model_kind_from_string(j.value("stage1", "linear"));
    cfg.stage2 = model_kind_from_string(j.value("stage2", "linear"));
    cfg.branching = j.value("branching", std::uint64_t{64});
    cfg.epsilon = j.value("epsilon", std::uint64_t{32});
    cfg.radix_bits = j.value("radix_bits", 12u);
    cfg.stride = j.value("stride", std::uint64_t{16});
    return cfg;
}

int cmd_generate(const std::string& kind, std::uint64_t n, std::uint64_t seed, double mu,
                 double sigma, std::uint64_t outliers, unsigned low_bits, unsigned high_bits,
                 const std::string& out) {
    DatasetSpec spec;
    if (kind == "uniform")
        spec.kind = DatasetKind::Uniform;
    else if (kind == "lognormal")
        spec.kind = DatasetKind::Lognormal;
    else if (kind == "outlier_tail")
        spec.kind = DatasetKind::OutlierTail;
    else
        throw std::runtime_error("unknown dataset kind: " + kind);
    spec.n = n;
    spec.seed = seed;
    spec.mu = mu;
    spec.sigma = sigma;
    spec.outlier_count = outliers;
    spec.low_band_bits = low_bits;
    spec.high_band_bits = high_bits;
    const SortedDataset d = generate(spec);
    save_sosd(d, out);
    std::cout << "wrote " << d.size() << " keys to " << out << "\n";
    return 0;
}

int cmd_build(const std::string& data, const IndexFlags& flags, const std::string& out,
              unsigned reps) {
    const SortedDataset d = load_sosd(data);
    const IndexConfig cfg = flags.to_config();
    IndexVariant ix;
    const std::uint64_t build_ns = measure_build([&] { ix = build_index(d, cfg); }, reps);
    write_file(out, index_to_blob(ix));
    std::cout << cfg.name() << "(" << cfg.params() << ") size_bytes=" << index_size_bytes(ix)
              << " build_ns=" << build_ns << "\n";
    return 0;
}

int cmd_validate(const std::string& data, const std::string& index_file, const IndexFlags& flags,
                 bool have_kind, std::size_t queries, std::uint64_t seed,
                 const std::string& mode) {
    const SortedDataset d = load_sosd(data);
    IndexVariant ix;
    if (!index_file.empty()) {
        ix = index_from_blob(read_file(index_file));
    } else if (have_kind) {
        ix = build_index(d, flags.to_config());
    } else {
        throw std::runtime_error("validate needs --index-file or --index");
    }
    const WorkloadMode wm =
        mode == "range" ? WorkloadMode::UniformInRange : WorkloadMode::ExistingKeys;
    const LookupWorkload w = gen_lookups(d, queries, seed, wm);
    const ValidationReport report =
        validate_index([&](key_t x) { return index_lookup(ix, x); }, d, w.queries);
    std::cout << report.violations << " violations over " << report.checked << " queries\n";
    return report.violations > 0 ? 1 : 0;
}

struct CsvTable {
    std::string header;
    std::vector<std::string> lines;
};

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    CsvTable t;
    if (!std::getline(in, t.header)) throw std::runtime_error("empty csv: " + path.string());
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) t.lines.push_back(line);
    return t;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

int cmd_pareto(const std::string& in_path, const std::string& out_path) {
    const CsvTable t = read_csv(in_path);
    const auto header_cols = split_csv(t.header);
    std::size_t size_col = 3, lat_col = 5;  // schema defaults
    for (std::size_t c = 0; c < header_cols.size(); ++c) {
        if (header_cols[c] == "size_bytes") size_col = c;
        if (header_cols[c] == "avg_lookup_ns") lat_col = c;
    }
    std::vector<ParetoPoint> pts;
    for (const auto& line : t.lines) {
        const auto cols = split_csv(line);
        if (cols.size() <= std::max(size_col, lat_col))
            throw std::runtime_error("csv row has too few columns: " + line);
        pts.push_back({std::stod(cols[size_col]), std::stod(cols[lat_col])});
    }
    const auto keep = pareto_front(pts);
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
    out << t.header << "\n";
    for (std::size_t i : keep) out << t.lines[i] << "\n";
    std::cout << keep.size() << " of " << t.lines.size() << " rows on the pareto front\n";
    return 0;
}

int cmd_bench(const std::string& manifest_path, const std::string& output_override,
              int threads_override, int fence_override, const std::string& cache_override,
              const std::string& strategy_override) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path);
    json manifest = json::parse(in);

    SortedDataset d;
    std::string dataset_label;
    const json& jd = manifest.at("dataset");
    if (jd.contains("path")) {
        d = load_sosd(jd.at("path").get<std::string>());
        dataset_label = std::filesystem::path(jd.at("path").get<std::string>()).stem().string();
    } else {
        const DatasetSpec spec = spec_from_json(jd);
        d = generate(spec);
        dataset_label = to_string(spec.kind) + "-" + std::to_string(spec.n);
    }

    const json jw = manifest.value("workload", json::object());
    const std::size_t m = jw.value("m", std::uint64_t{10000});
    const std::uint64_t wseed = jw.value("seed", std::uint64_t{7});
    const WorkloadMode wm = jw.value("mode", std::string("existing")) == "range"
                                ? WorkloadMode::UniformInRange
                                : WorkloadMode::ExistingKeys;
    const LookupWorkload w = gen_lookups(d, m, wseed, wm);
    const std::uint64_t oracle = checksum(d, w);

    const json jb = manifest.value("bench", json::object());
    BenchConfig bcfg;
    bcfg.strategy = strategy_from_string(
        !strategy_override.empty() ? strategy_override : jb.value("strategy", "binary"));
    bcfg.repetitions = jb.value("repetitions", 5u);
    bcfg.batch = jb.value("batch", std::uint64_t{100});
    bcfg.fence = fence_override >= 0 ? fence_override != 0 : jb.value("fence", false);
    const std::string cache =
        !cache_override.empty() ? cache_override : jb.value("cache_mode", "warm");
    bcfg.cache_mode = cache == "cold" ? CacheMode::Cold : CacheMode::Warm;
    bcfg.eviction_mb = jb.value("eviction_mb", std::uint64_t{64});
    bcfg.threads = threads_override > 0 ? static_cast<unsigned>(threads_override)
                                        : jb.value("threads", 1u);

    std::vector<BenchResult> results;
    for (const json& jix : manifest.at("indexes")) {
        const IndexConfig cfg = config_from_json(jix);
        IndexVariant ix;
        const std::uint64_t build_ns =
            measure_build([&] { ix = build_index(d, cfg); }, bcfg.repetitions);
        BenchResult r = measure_lookups(ix, d, w, bcfg);
        r.dataset = dataset_label;
        r.index = cfg.name();
        r.config = cfg.params();
        r.build_ns = build_ns;
        if (bcfg.threads > 1) {
            const ThroughputResult tr =
                run_multithreaded(ix, d, w, bcfg.threads, bcfg.strategy, bcfg.fence);
            r.throughput_lookups_per_s = tr.lookups_per_s;
            r.checksum = tr.checksum;
            r.violations += tr.violations;
            r.threads = bcfg.threads;
        }
        if (r.checksum != oracle)
            std::cerr << "warning: checksum mismatch for " << r.index << "(" << r.config << ")\n";
        results.push_back(std::move(r));
    }

    const std::string out_path =
        !output_override.empty() ? output_override : manifest.value("output", "results.csv");
    write_csv(results, out_path);

    // Re-check the front the expensive way on every run.
    std::vector<ParetoPoint> pts;
    for (const auto& r : results)
        pts.push_back({static_cast<double>(r.size_bytes), r.avg_lookup_ns});
    const auto front = pareto_front(pts);
    for (std::size_t a : front)
        for (std::size_t b : front)
            if (a != b && pts[b].size_bytes <= pts[a].size_bytes &&
                pts[b].latency_ns <= pts[a].latency_ns &&
                (pts[b].size_bytes < pts[a].size_bytes || pts[b].latency_ns < pts[a].latency_ns))
                throw std::logic_error("pareto recheck failed: dominated row on front");

    std::cout << results.size() << " configurations -> " << out_path << " (pareto front "
              << front.size() << " rows, recheck ok)\n";
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    return dispatch(static_cast<int>(argv.size()), argv.data());
}

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"learned index benchmark suite"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate a synthetic dataset file");
    std::string g_kind = "uniform", g_out = "keys.sosd";
    std::uint64_t g_n = 1000, g_seed = 42, g_outliers = 100;
    double g_mu = 0.0, g_sigma = 2.0;
    unsigned g_low = 50, g_high = 59;
    gen->add_option("--kind", g_kind, "uniform|lognormal|outlier_tail");
    gen->add_option("--n", g_n, "number of keys");
    gen->add_option("--seed", g_seed, "rng seed");
    gen->add_option("--mu", g_mu, "lognormal mu");
    gen->add_option("--sigma", g_sigma, "lognormal sigma");
    gen->add_option("--outliers", g_outliers, "outlier_tail outlier count");
    gen->add_option("--low-bits", g_low, "outlier_tail body band bits");
    gen->add_option("--high-bits", g_high, "outlier_tail tail band bits");
    gen->add_option("--out", g_out, "output path")->required();

    // build
    auto* build = app.add_subcommand("build", "build an index over a dataset file");
    std::string b_data, b_out = "index.bin";
    unsigned b_reps = 1;
    IndexFlags b_flags;
    build->add_option("--data", b_data, "dataset file")->required();
    add_index_flags(build, b_flags);
    build->add_option("--out", b_out, "output blob path");
    build->add_option("--reps", b_reps, "build timing repetitions");

    // validate
    auto* val = app.add_subcommand("validate", "check search-bound validity");
    std::string v_data, v_index_file, v_mode = "existing";
    std::uint64_t v_queries = 10000, v_seed = 42;
    IndexFlags v_flags;
    val->add_option("--data", v_data, "dataset file")->required();
    val->add_option("--index-file", v_index_file, "serialized index blob");
    auto* v_kind_opt = val->add_option("--index", v_flags.kind, "index kind to build");
    val->add_option("--stage1", v_flags.stage1, "rmi stage-1 model");
    val->add_option("--stage2", v_flags.stage2, "rmi stage-2 model");
    val->add_option("--branching", v_flags.branching, "rmi branching factor");
    val->add_option("--epsilon", v_flags.epsilon, "rs/pgm error bound");
    val->add_option("--radix-bits", v_flags.radix_bits, "rs/rbs radix bits");
    val->add_option("--stride", v_flags.stride, "sampled stride");
    val->add_option("--queries", v_queries, "query count");
    val->add_option("--seed", v_seed, "workload seed");
    val->add_option("--mode", v_mode, "existing|range");

    // bench
    auto* bench = app.add_subcommand("bench", "run a benchmark manifest");
    std::string m_path, m_output, m_cache, m_strategy;
    int m_threads = 0, m_fence = -1;
    bench->add_option("--manifest", m_path, "manifest json")->required();
    bench->add_option("--output", m_output, "override csv output path");
    bench->add_option("--threads", m_threads, "override thread count");
    bench->add_flag("--fence,!--no-fence", m_fence, "override fence mode");
    bench->add_option("--cache-mode", m_cache, "override warm|cold");
    bench->add_option("--strategy", m_strategy, "override last-mile search");

    // pareto
    auto* pareto = app.add_subcommand("pareto", "drop dominated rows from a results csv");
    std::string p_in, p_out;
    pareto->add_option("--in", p_in, "input csv")->required();
    pareto->add_option("--out", p_out, "output csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (gen->parsed())
            return cmd_generate(g_kind, g_n, g_seed, g_mu, g_sigma, g_outliers, g_low, g_high,
                                g_out);
        if (build->parsed()) return cmd_build(b_data, b_flags, b_out, b_reps);
        if (val->parsed())
            return cmd_validate(v_data, v_index_file, v_flags, v_kind_opt->count() > 0,
                                v_queries, v_seed, v_mode);
        if (bench->parsed())
            return cmd_bench(m_path, m_output, m_threads, m_fence, m_cache, m_strategy);
        if (pareto->parsed()) return cmd_pareto(p_in, p_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace lil::cli
