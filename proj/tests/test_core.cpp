#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "lil/core.hpp"

using namespace lil;
using test::make_dataset;
using test::mixed_queries;
using test::random_dataset;

TEST_CASE("lower_bound_oracle on the reference examples") {
    const auto d = make_dataset({10, 20, 30, 40});
    CHECK(lower_bound_oracle(d, 20) == 1);
    CHECK(lower_bound_oracle(d, 25) == 2);
    CHECK(lower_bound_oracle(d, 45) == 4);  // one past the end
    CHECK(lower_bound_oracle(d, 40) == 3);  // max key maps to its own slot
    CHECK(lower_bound_oracle(d, 5) == 0);
}

TEST_CASE("lower_bound_oracle is monotone in the query") {
    const auto d = random_dataset(500, 99);
    const auto qs = mixed_queries(d, 2000, 7);
    auto sorted = qs;
    std::sort(sorted.begin(), sorted.end());
    pos_t prev = 0;
    for (key_t q : sorted) {
        const pos_t cur = lower_bound_oracle(d, q);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("bound_from_estimate") {
    CHECK(bound_from_estimate(10, {3, 3}, 100) == SearchBound{7, 14});
    CHECK(bound_from_estimate(1, {3, 3}, 100) == SearchBound{0, 5});
    CHECK(bound_from_estimate(100, {3, 3}, 100) == SearchBound{97, 101});

    SUBCASE("cdf-style construction: 0.16 of n on both sides") {
        const pos_t n = 1000;
        const pos_t env = 160;  // ceil(0.16 * n)
        const auto b = bound_from_estimate(240, {env, env}, n);
        CHECK(b.lo == 80);
        CHECK(b.hi == 401);
        CHECK(b.contains(400));  // true position 0.4 * n
    }

    SUBCASE("full envelope always covers any lower bound") {
        const pos_t n = 57;
        for (pos_t est : {pos_t{0}, pos_t{13}, pos_t{57}})
            CHECK(bound_from_estimate(est, {n, n}, n) == SearchBound{0, n + 1});
    }
}

TEST_CASE("last_mile_search reference examples") {
    const auto d = make_dataset({10, 20, 30, 40});
    CHECK(last_mile_search(d, {0, 5}, 25, SearchStrategy::Binary) == 2);
    CHECK(last_mile_search(d, {1, 4}, 30, SearchStrategy::Linear) == 2);
    CHECK(last_mile_search(d, {0, 5}, 37, SearchStrategy::Interpolation) ==
          lower_bound_oracle(d, 37));
}

TEST_CASE("all strategies agree with the oracle on valid bounds") {
    const auto d = random_dataset(800, 3);
    const auto qs = mixed_queries(d, 4000, 11);
    std::mt19937_64 rng(5);
    const pos_t n = d.size();
    for (key_t q : qs) {
        const pos_t truth = lower_bound_oracle(d, q);
        // Random valid bound around the truth.
        const pos_t slack_lo = rng() % 9;
        const pos_t slack_hi = rng() % 9;
        SearchBound b{truth > slack_lo ? truth - slack_lo : 0,
                      std::min(n + 1, truth + 1 + slack_hi)};
        for (auto s : {SearchStrategy::Binary, SearchStrategy::Linear,
                       SearchStrategy::Interpolation})
            CHECK(last_mile_search(d, b, q, s) == truth);
        // Enlarging a valid bound never changes the result.
        SearchBound wide{b.lo > 3 ? b.lo - 3 : 0, std::min(n + 1, b.hi + 3)};
        CHECK(last_mile_search(d, wide, q, SearchStrategy::Binary) == truth);
    }
}

TEST_CASE("last_mile_search reports bounds that exclude the lower bound") {
    const auto d = make_dataset({10, 20, 30, 40});
    for (auto s :
         {SearchStrategy::Binary, SearchStrategy::Linear, SearchStrategy::Interpolation}) {
        CHECK_THROWS_AS(last_mile_search(d, {0, 2}, 35, s), BoundViolation);
        CHECK_THROWS_AS(last_mile_search(d, {2, 4}, 15, s), BoundViolation);
    }
}

TEST_CASE("validate_index counts violations") {
    const auto d = make_dataset({10, 20});
    const std::vector<key_t> qs{15};
    SUBCASE("whole-array bound is always valid") {
        const auto r = validate_index([&](key_t) { return SearchBound{0, d.size() + 1}; }, d, qs);
        CHECK(r.violations == 0);
    }
    SUBCASE("constant [0,1) misses LB=1") {
        const auto r = validate_index([](key_t) { return SearchBound{0, 1}; }, d, qs);
        CHECK(r.violations == 1);
    }
}
