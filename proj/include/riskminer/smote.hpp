#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "riskminer/dataset.hpp"

namespace riskminer {

/// Nominal-attribute SMOTE settings. Classes missing from `target_per_class`
/// keep their current size.
struct SmoteConfig {
    std::size_t k = 5;
    std::map<int, std::size_t> target_per_class;
    std::uint64_t seed = 0;
};

/// The k records nearest to record `index` by Hamming distance, excluding the
/// record itself; ties resolve to the lower position. Throws PoolTooSmall when
/// fewer than k other records are eligible.
std::vector<std::size_t> knn_categorical(const Dataset& ds, std::size_t index, std::size_t k, bool same_class_only);

/// Grows each class to its target. Output holds every input record unchanged and
/// in order, followed by the synthetic records of class 0 and then class 1.
/// Each synthetic record picks a seed record of its class, one of the seed's k
/// same-class neighbours, and takes each attribute from either with
/// probability 1/2. Throws ClassTooSmall, TargetBelowCurrent.
Dataset smote_n(const Dataset& ds, const SmoteConfig& cfg);

/// Per-class targets for a total output size. Balanced targets split the total
/// evenly (an odd record goes to the victim class); otherwise the current class
/// proportions are kept by largest remainder. Throws TargetBelowCurrent when
/// the total cannot be met without shrinking a class.
std::map<int, std::size_t> smote_targets(const Dataset& ds, std::size_t target_total, bool balance);

} // namespace riskminer
