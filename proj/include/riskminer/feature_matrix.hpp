#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "riskminer/dataset.hpp"

namespace riskminer {

/// Dense row-major design matrix. Learners consume the integer codes as reals.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    FeatureMatrix() = default;
    FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
};

/// Columns `features` (schema positions) of every record.
FeatureMatrix project(const Dataset& ds, std::span<const std::size_t> features);

} // namespace riskminer
