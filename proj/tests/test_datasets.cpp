#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "lil/datasets.hpp"

using namespace lil;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
    for (auto kind : {DatasetKind::Uniform, DatasetKind::Lognormal, DatasetKind::OutlierTail}) {
        DatasetSpec spec;
        spec.kind = kind;
        spec.n = 1000;
        spec.seed = 123;
        const auto a = generate(spec);
        const auto b = generate(spec);
        CHECK(a.keys == b.keys);
        CHECK(a.payloads == b.payloads);
        spec.seed = 124;
        CHECK(generate(spec).keys != a.keys);
    }
}

TEST_CASE("generated keys are strictly increasing") {
    for (auto kind : {DatasetKind::Uniform, DatasetKind::Lognormal, DatasetKind::OutlierTail}) {
        DatasetSpec spec;
        spec.kind = kind;
        spec.n = 5000;
        spec.seed = 9;
        const auto d = generate(spec);
        REQUIRE(d.size() == 5000);
        for (pos_t i = 1; i < d.size(); ++i) CHECK(d.keys[i - 1] < d.keys[i]);
    }
}

TEST_CASE("outlier tail puts exactly outlier_count keys in the high band") {
    DatasetSpec spec;
    spec.kind = DatasetKind::OutlierTail;
    spec.n = 10000;
    spec.seed = 17;
    spec.outlier_count = 100;
    const auto d = generate(spec);
    pos_t above = 0, below = 0;
    for (key_t k : d.keys) {
        if (k >= (key_t{1} << 59)) ++above;
        if (k < (key_t{1} << 50)) ++below;
    }
    CHECK(above == 100);
    CHECK(below == d.size() - 100);
}

TEST_CASE("lognormal CDF deviates from the straight line") {
    DatasetSpec spec;
    spec.kind = DatasetKind::Lognormal;
    spec.n = 20000;
    spec.seed = 4;
    const auto d = generate(spec);
    // Max vertical distance between the empirical CDF and the chord
    // between its endpoints, in positions.
    const double n = static_cast<double>(d.size());
    const double k0 = static_cast<double>(d.min_key());
    const double kspan = static_cast<double>(d.max_key()) - k0;
    double max_dev = 0;
    for (pos_t i = 0; i < d.size(); ++i) {
        const double line = (static_cast<double>(d.keys[i]) - k0) / kspan * (n - 1);
        max_dev = std::max(max_dev, std::abs(line - static_cast<double>(i)));
    }
    CHECK(max_dev > 0.05 * n);
}

TEST_CASE("universe too small for n unique keys is rejected") {
    DatasetSpec spec;
    spec.kind = DatasetKind::OutlierTail;
    spec.n = 5000;
    spec.outlier_count = 10;
    spec.low_band_bits = 10;  // only 1024 distinct body keys possible
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
}

TEST_CASE("sosd round trip is byte identical") {
    DatasetSpec spec;
    spec.kind = DatasetKind::Uniform;
    spec.n = 500;
    spec.seed = 31;
    const auto d = generate(spec);
    const auto p1 = temp_file("lil_rt1.sosd");
    const auto p2 = temp_file("lil_rt2.sosd");
    save_sosd(d, p1);
    const auto loaded = load_sosd(p1);
    CHECK(loaded.keys == d.keys);
    CHECK(loaded.payloads == d.payloads);
    CHECK(loaded.payload_seed == d.payload_seed);
    save_sosd(loaded, p2);

    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(b1 == b2);
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("malformed sosd files are rejected with a diagnostic") {
    const auto path = temp_file("lil_bad.sosd");

    SUBCASE("truncated") {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        const std::uint64_t count = 100;
        out.write(reinterpret_cast<const char*>(&count), 8);
        const std::uint64_t one = 1;
        out.write(reinterpret_cast<const char*>(&one), 8);
        out.close();
        CHECK_THROWS_WITH_AS(load_sosd(path), doctest::Contains("truncated"),
                             std::runtime_error);
    }
    SUBCASE("unsorted") {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        const std::uint64_t vals[3] = {2, 3, 2};
        out.write(reinterpret_cast<const char*>(vals), sizeof(vals));
        out.close();
        CHECK_THROWS_WITH_AS(load_sosd(path), doctest::Contains("unsorted"),
                             std::runtime_error);
    }
    SUBCASE("duplicates") {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        const std::uint64_t vals[3] = {2, 5, 5};
        out.write(reinterpret_cast<const char*>(vals), sizeof(vals));
        out.close();
        CHECK_THROWS_WITH_AS(load_sosd(path), doctest::Contains("duplicate"),
                             std::runtime_error);
    }
    std::filesystem::remove(path);
}

TEST_CASE("plain key files without footer load with seed 0") {
    const auto path = temp_file("lil_plain.sosd");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    const std::uint64_t vals[4] = {3, 10, 20, 30};  // count + 3 keys, LE host
    out.write(reinterpret_cast<const char*>(vals), sizeof(vals));
    out.close();
    const auto d = load_sosd(path);
    CHECK(d.size() == 3);
    CHECK(d.payload_seed == 0);
    CHECK(d.payloads == gen_payloads(d.keys, 0));
    std::filesystem::remove(path);
}

TEST_CASE("workloads") {
    const auto d = test::random_dataset(2000, 8);
    SUBCASE("existing keys are members") {
        const auto w = gen_lookups(d, 500, 3, WorkloadMode::ExistingKeys);
        for (key_t q : w.queries) CHECK(d.keys[lower_bound_oracle(d, q)] == q);
    }
    SUBCASE("same seed, same workload") {
        const auto a = gen_lookups(d, 500, 3, WorkloadMode::ExistingKeys);
        const auto b = gen_lookups(d, 500, 3, WorkloadMode::ExistingKeys);
        CHECK(a.queries == b.queries);
    }
    SUBCASE("in-range lower bounds stay inside the array") {
        const auto w = gen_lookups(d, 500, 3, WorkloadMode::UniformInRange);
        for (key_t q : w.queries) {
            const pos_t lb = lower_bound_oracle(d, q);
            CHECK(lb <= d.size() - 1);
        }
    }
}

TEST_CASE("checksum semantics") {
    const auto d = test::random_dataset(300, 21);
    SUBCASE("empty workload sums to zero") {
        CHECK(checksum(d, LookupWorkload{}) == 0);
    }
    SUBCASE("permutation invariant") {
        auto w = gen_lookups(d, 400, 5, WorkloadMode::ExistingKeys);
        const auto base = checksum(d, w);
        std::reverse(w.queries.begin(), w.queries.end());
        CHECK(checksum(d, w) == base);
    }
    SUBCASE("past-the-end lower bounds contribute nothing") {
        LookupWorkload w;
        w.queries.assign(10, d.max_key() + 1);
        CHECK(checksum(d, w) == 0);
    }
}
