#include "riskminer/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "riskminer/errors.hpp"
#include "riskminer/random.hpp"

namespace riskminer {

namespace {

void check_ratios(const SplitRatios& r) {
    if (!(r.train > 0.0) || !(r.test > 0.0) || !(r.validation > 0.0))
        throw RatioSum("split ratios must all be positive");
    if (std::abs(r.train + r.test + r.validation - 1.0) > 1e-9)
        throw RatioSum("split ratios must sum to 1");
}

std::size_t floor_share(std::size_t n, double ratio) {
    // The epsilon absorbs representation error such as 10 * 0.1 landing just
    // below 1.
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio + 1e-9));
}

/// Largest-remainder apportionment of `total` across groups of the given sizes.
std::vector<std::size_t> apportion(std::size_t total, const std::vector<std::size_t>& sizes) {
    const std::size_t n = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    std::vector<std::size_t> out(sizes.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        const double ideal = static_cast<double>(total) * static_cast<double>(sizes[c]) / static_cast<double>(n);
        out[c] = std::min(sizes[c], static_cast<std::size_t>(std::floor(ideal)));
        assigned += out[c];
        remainders.emplace_back(ideal - static_cast<double>(out[c]), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < total; k = (k + 1) % remainders.size()) {
        const auto c = remainders[k].second;
        if (out[c] < sizes[c]) {
            ++out[c];
            ++assigned;
        }
    }
    return out;
}

} // namespace

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios) {
    check_ratios(ratios);
    const auto train = floor_share(n, ratios.train);
    const auto test = std::min(n - train, floor_share(n, ratios.test));
    return {train, test, n - train - test};
}

SplitBundle split_dataset(const Dataset& ds, const SplitRatios& ratios, std::uint64_t seed, bool stratified) {
    const auto [n_train, n_test, n_val] = split_sizes(ds.size(), ratios);
    (void)n_val;

    std::vector<std::vector<std::size_t>> groups;
    if (stratified) {
        groups.resize(2);
        for (std::size_t i = 0; i < ds.size(); ++i) groups[static_cast<std::size_t>(ds.label(i))].push_back(i);
        for (int c = 0; c < 2; ++c)
            if (groups[static_cast<std::size_t>(c)].empty())
                throw EmptyClass("stratified split: class " + std::to_string(c) + " has no records");
    } else {
        groups.emplace_back(ds.size());
        std::iota(groups[0].begin(), groups[0].end(), std::size_t{0});
    }

    std::vector<std::size_t> sizes;
    for (const auto& g : groups) sizes.push_back(g.size());
    // Cumulative apportionment keeps every class's part counts consistent.
    const auto cum_train = apportion(n_train, sizes);
    const auto cum_train_test = apportion(n_train + n_test, sizes);

    SplitBundle out{ds.subset({}), ds.subset({}), ds.subset({}), seed, {}, {}, {}};
    for (std::size_t c = 0; c < groups.size(); ++c) {
        auto& g = groups[c];
        Rng rng(derive_seed(seed, 0x5b17, c));
        rng.shuffle(std::span<std::size_t>(g));
        const std::size_t a = cum_train[c];
        const std::size_t b = std::max(a, cum_train_test[c]);
        out.train_positions.insert(out.train_positions.end(), g.begin(), g.begin() + static_cast<std::ptrdiff_t>(a));
        out.test_positions.insert(out.test_positions.end(), g.begin() + static_cast<std::ptrdiff_t>(a),
                                  g.begin() + static_cast<std::ptrdiff_t>(b));
        out.validation_positions.insert(out.validation_positions.end(), g.begin() + static_cast<std::ptrdiff_t>(b),
                                        g.end());
    }
    std::sort(out.train_positions.begin(), out.train_positions.end());
    std::sort(out.test_positions.begin(), out.test_positions.end());
    std::sort(out.validation_positions.begin(), out.validation_positions.end());
    out.train = ds.subset(out.train_positions);
    out.test = ds.subset(out.test_positions);
    out.validation = ds.subset(out.validation_positions);
    return out;
}

} // namespace riskminer
