#include "riskminer/feature_matrix.hpp"

namespace riskminer {

FeatureMatrix project(const Dataset& ds, std::span<const std::size_t> features) {
    FeatureMatrix x(ds.size(), features.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto r = ds.row(i);
        for (std::size_t j = 0; j < features.size(); ++j) x.at(i, j) = static_cast<double>(r[features[j]]);
    }
    return x;
}

} // namespace riskminer
