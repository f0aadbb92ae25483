#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "lil/core.hpp"
#include "lil/datasets.hpp"

namespace lil::test {

/// Dataset straight from a key list, payloads derived with seed 1.
inline SortedDataset make_dataset(std::vector<key_t> keys) {
    auto payloads = gen_payloads(keys, 1);
    return SortedDataset(std::move(keys), std::move(payloads), 1);
}

/// n unique random keys below `limit` (0 = full 64-bit range).
inline SortedDataset random_dataset(pos_t n, std::uint64_t seed, key_t limit = 0) {
    std::mt19937_64 rng(seed);
    std::vector<key_t> keys;
    keys.reserve(n + n / 4);
    while (keys.size() < n) {
        for (pos_t i = keys.size(); i < n; ++i)
            keys.push_back(limit == 0 ? rng() : rng() % limit);
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    }
    keys.resize(n);
    return make_dataset(std::move(keys));
}

/// Mixed query stream: existing keys, in-range misses, and keys beyond
/// both ends.
inline std::vector<key_t> mixed_queries(const SortedDataset& d, std::size_t m,
                                        std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<key_t> qs;
    qs.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        switch (rng() % 4) {
            case 0: qs.push_back(d.keys[rng() % d.size()]); break;
            case 1: qs.push_back(d.min_key() + rng() % (d.max_key() - d.min_key() + 1)); break;
            case 2: qs.push_back(rng() % (d.min_key() + 1)); break;
            default: {
                const key_t room = ~key_t{0} - d.max_key();
                qs.push_back(d.max_key() + (room ? rng() % room : 0));
                break;
            }
        }
    }
    return qs;
}

}  // namespace lil::test
