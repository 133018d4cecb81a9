#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "riskminer/dataset.hpp"

namespace fixture {

inline std::shared_ptr<const riskminer::Schema> binary_schema(std::size_t width) {
    std::vector<riskminer::FeatureSpec> fs;
    for (std::size_t j = 0; j < width; ++j)
        fs.push_back({"b" + std::to_string(j), riskminer::FeatureKind::Binary, {0, 1}});
    return std::make_shared<const riskminer::Schema>(std::move(fs));
}

/// Five binary signals voting the label (victim when at least three are set)
/// plus three noise bits. The plane b0+..+b4 = 2.5 separates the classes.
inline riskminer::Dataset separable(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<int> values;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        int votes = 0;
        for (int j = 0; j < 8; ++j) {
            const int b = static_cast<int>(gen() >> 63);
            if (j < 5) votes += b;
            values.push_back(b);
        }
        labels.push_back(votes >= 3 ? 1 : 0);
    }
    return riskminer::Dataset(binary_schema(8), std::move(values), std::move(labels));
}

/// Four copies of each XOR input.
inline riskminer::Dataset xor_data() {
    std::vector<int> values;
    std::vector<int> labels;
    for (int rep = 0; rep < 4; ++rep)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                values.insert(values.end(), {a, b});
                labels.push_back(a ^ b);
            }
    return riskminer::Dataset(binary_schema(2), std::move(values), std::move(labels));
}

} // namespace fixture
