#include "lil/core.hpp"

#include <algorithm>
#include <cassert>

namespace lil {

SortedDataset::SortedDataset(std::vector<key_t> k, std::vector<payload_t> p, std::uint64_t seed)
    : keys(std::move(k)), payloads(std::move(p)), payload_seed(seed) {
    if (keys.size() < 2) throw std::invalid_argument("dataset needs at least 2 keys");
    if (payloads.size() != keys.size())
        throw std::invalid_argument("payload count does not match key count");
    for (pos_t i = 1; i < keys.size(); ++i)
        if (keys[i - 1] >= keys[i])
            throw std::invalid_argument("keys must be strictly increasing");
}

pos_t lower_bound_oracle(const SortedDataset& d, key_t x) {
    return static_cast<pos_t>(std::lower_bound(d.keys.begin(), d.keys.end(), x) -
                              d.keys.begin());
}

SearchBound bound_from_estimate(pos_t estimate, ErrorEnvelope env, pos_t n) {
    if (estimate > n) estimate = n;
    pos_t lo = estimate > env.under ? estimate - env.under : 0;
    pos_t hi = std::min(n + 1, estimate + env.over + 1);
    return {lo, hi};
}

namespace {

// Local check that r is the lower bound of x: everything before r is
// smaller, r itself (if a real slot) is not.
bool is_lower_bound(const SortedDataset& d, pos_t r, key_t x) {
    const pos_t n = d.size();
    if (r > n) return false;
    if (r > 0 && d.keys[r - 1] >= x) return false;
    if (r < n && d.keys[r] < x) return false;
    return true;
}

pos_t binary_search(const SortedDataset& d, pos_t lo, pos_t hi, key_t x) {
    return static_cast<pos_t>(std::lower_bound(d.keys.begin() + lo, d.keys.begin() + hi, x) -
                              d.keys.begin());
}

pos_t linear_search(const SortedDataset& d, pos_t lo, pos_t hi, key_t x) {
    pos_t i = lo;
    while (i < hi && d.keys[i] < x) ++i;
    return i;
}

// Interpolated probing over [lo, hi); falls back to binary search when
// the interval stops halving over two consecutive probes.
pos_t interpolation_search(const SortedDataset& d, pos_t lo, pos_t hi, key_t x) {
    pos_t width = hi - lo;
    int probes = 0;
    while (hi - lo > 1) {
        if (d.keys[lo] >= x) return lo;
        if (d.keys[hi - 1] < x) return hi;
        // Now keys[lo] < x <= keys[hi-1], so the denominator is nonzero.
        const unsigned __int128 num =
            static_cast<unsigned __int128>(x - d.keys[lo]) * (hi - 1 - lo);
        const key_t den = d.keys[hi - 1] - d.keys[lo];
        pos_t probe = lo + static_cast<pos_t>(num / den);
        if (probe >= hi) probe = hi - 1;
        if (d.keys[probe] < x)
            lo = probe + 1;
        else
            hi = probe + 1;
        if (++probes % 2 == 0) {
            if ((hi - lo) * 2 > width) return binary_search(d, lo, hi, x);
            width = hi - lo;
        }
    }
    return lo;
}

}  // namespace

pos_t last_mile_search(const SortedDataset& d, SearchBound b, key_t x, SearchStrategy s) {
    const pos_t n = d.size();
    const pos_t lo = std::min(b.lo, n);
    const pos_t hi = std::min(b.hi, n);  // index n is a virtual end slot

    pos_t r;
    switch (s) {
        case SearchStrategy::Binary: r = binary_search(d, lo, hi, x); break;
        case SearchStrategy::Linear: r = linear_search(d, lo, hi, x); break;
        case SearchStrategy::Interpolation:
            r = lo < hi ? interpolation_search(d, lo, hi, x) : lo;
            break;
        default: throw std::invalid_argument("unknown search strategy");
    }

    if (!is_lower_bound(d, r, x) || !b.contains(r))
        throw BoundViolation("search bound does not contain the lower bound");
    return r;
}

ValidationReport validate_index(const std::function<SearchBound(key_t)>& lookup,
                                const SortedDataset& d, std::span<const key_t> queries) {
    ValidationReport report;
    report.checked = queries.size();
    for (key_t q : queries) {
        const pos_t truth = lower_bound_oracle(d, q);
        if (!lookup(q).contains(truth)) ++report.violations;
    }
    return report;
}

}  // namespace lil
