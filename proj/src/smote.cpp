#include "riskminer/smote.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "riskminer/errors.hpp"
#include "riskminer/random.hpp"

namespace riskminer {

std::vector<std::size_t> knn_categorical(const Dataset& ds, std::size_t index, std::size_t k, bool same_class_only) {
    if (index >= ds.size()) throw PoolTooSmall("knn query index out of range");
    const auto query = ds.row(index);
    const int label = ds.label(index);

    std::vector<std::pair<std::size_t, std::size_t>> candidates; // (distance, position)
    candidates.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i == index || (same_class_only && ds.label(i) != label)) continue;
        const auto r = ds.row(i);
        std::size_t d = 0;
        for (std::size_t j = 0; j < r.size(); ++j) d += r[j] != query[j] ? 1 : 0;
        candidates.emplace_back(d, i);
    }
    if (k > candidates.size())
        throw PoolTooSmall("k=" + std::to_string(k) + " exceeds the " + std::to_string(candidates.size()) +
                           " eligible neighbours");
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = candidates[i].second;
    return out;
}

Dataset smote_n(const Dataset& ds, const SmoteConfig& cfg) {
    if (cfg.k < 1) throw ConfigError("smote: k must be at least 1");
    for (const auto& [label, target] : cfg.target_per_class) {
        if (label != 0 && label != 1) throw ConfigError("smote: unknown class " + std::to_string(label));
        if (target < ds.count_label(label))
            throw TargetBelowCurrent("smote: target " + std::to_string(target) + " for class " +
                                     std::to_string(label) + " is below its current count " +
                                     std::to_string(ds.count_label(label)));
    }

    const std::size_t width = ds.feature_count();
    std::vector<int> values = ds.values();
    std::vector<int> labels = ds.labels();

    for (int label = 0; label < 2; ++label) {
        const auto it = cfg.target_per_class.find(label);
        if (it == cfg.target_per_class.end()) continue;
        const std::size_t current = ds.count_label(label);
        const std::size_t needed = it->second - current;
        if (needed == 0) continue;
        if (current < cfg.k + 1)
            throw ClassTooSmall("smote: class " + std::to_string(label) + " has " + std::to_string(current) +
                                " records, needs at least k+1 = " + std::to_string(cfg.k + 1));

        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < ds.size(); ++i)
            if (ds.label(i) == label) members.push_back(i);

        Rng rng(derive_seed(cfg.seed, 0x53, static_cast<std::uint64_t>(label)));
        std::unordered_map<std::size_t, std::vector<std::size_t>> neighbours;
        for (std::size_t s = 0; s < needed; ++s) {
            const std::size_t seed_pos = members[rng.below(members.size())];
            auto nb = neighbours.find(seed_pos);
            if (nb == neighbours.end())
                nb = neighbours.emplace(seed_pos, knn_categorical(ds, seed_pos, cfg.k, true)).first;
            const std::size_t donor = nb->second[rng.below(nb->second.size())];
            const auto a = ds.row(seed_pos);
            const auto b = ds.row(donor);
            for (std::size_t j = 0; j < width; ++j) values.push_back(rng.coin() ? b[j] : a[j]);
            labels.push_back(label);
        }
    }
    return Dataset(ds.schema_ptr(), std::move(values), std::move(labels));
}

std::map<int, std::size_t> smote_targets(const Dataset& ds, std::size_t target_total, bool balance) {
    const std::size_t n0 = ds.count_label(0);
    const std::size_t n1 = ds.count_label(1);
    std::map<int, std::size_t> targets;
    if (target_total < ds.size())
        throw TargetBelowCurrent("smote: target_total " + std::to_string(target_total) + " is below the " +
                                 std::to_string(ds.size()) + " existing records");
    if (balance) {
        targets[0] = target_total / 2;
        targets[1] = target_total - target_total / 2;
    } else {
        if (ds.empty()) throw EmptyInput("smote: empty dataset");
        const double share0 = static_cast<double>(target_total) * static_cast<double>(n0) / static_cast<double>(ds.size());
        targets[0] = static_cast<std::size_t>(std::floor(share0));
        targets[1] = target_total - targets[0];
        const double share1 = static_cast<double>(target_total) - share0;
        // Largest remainder between the two classes.
        if (share0 - std::floor(share0) > share1 - std::floor(share1)) {
            targets[0] += 1;
            targets[1] -= 1;
        }
    }
    if (targets[0] < n0 || targets[1] < n1)
        throw TargetBelowCurrent("smote: target_total " + std::to_string(target_total) +
                                 " cannot be reached without shrinking a class");
    return targets;
}

} // namespace riskminer
