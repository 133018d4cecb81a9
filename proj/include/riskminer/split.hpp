#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "riskminer/dataset.hpp"

namespace riskminer {

struct SplitRatios {
    double train = 0.75;
    double test = 0.175;
    double validation = 0.075;
};

/// Train/test/validation partition. `*_positions` index the source dataset and
/// are ascending within each part.
struct SplitBundle {
    Dataset train;
    Dataset test;
    Dataset validation;
    std::uint64_t seed = 0;
    std::vector<std::size_t> train_positions;
    std::vector<std::size_t> test_positions;
    std::vector<std::size_t> validation_positions;
};

/// Part sizes: train = floor(n * r_train), test = floor(n * r_test), the
/// validation part takes the remainder. Throws RatioSum.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios);

/// Seeded split. When stratified, each class is shuffled on its own stream and
/// apportioned to the parts by largest remainder, so every part's victim count
/// stays within two records of its proportional share. Throws RatioSum,
/// EmptyClass.
SplitBundle split_dataset(const Dataset& ds, const SplitRatios& ratios, std::uint64_t seed, bool stratified = true);

} // namespace riskminer
