#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskminer/dataset.hpp"

namespace riskminer {

/// A single feature level whose presence lifts the victim rate to `p_victim`.
/// `prevalence` is the marginal frequency of the level.
struct PlantedFactor {
    std::string feature;
    int value = 1;
    double p_victim = 0.9;
    double prevalence = 0.5;
};

struct Condition {
    std::string feature;
    int value = 1;
};

/// A conjunction of feature levels that holds for a `prevalence` share of the
/// records; exactly those records are victims with probability `p_victim`.
struct PlantedRule {
    std::vector<Condition> conditions;
    double p_victim = 0.9;
    double prevalence = 0.4;
};

/// Recipe for a synthetic survey whose dependencies are known by construction.
/// Features not named by a planted factor or the planted rule are noise: drawn
/// uniformly from their legal codes, independent of the label.
struct GenSpec {
    std::size_t n_records = 700;
    double class_balance = 0.5;
    std::vector<PlantedFactor> planted_factors;
    std::optional<PlantedRule> planted_rule;
    std::uint64_t seed = 42;

    /// Throws ConfigError / UnknownFeature when the recipe is inconsistent
    /// with the schema or implies a conditional probability outside [0,1].
    void validate(const Schema& schema) const;

    nlohmann::json to_json() const;
    static GenSpec from_json(const nlohmann::json& doc);
};

Dataset generate_synthetic(const GenSpec& spec, std::shared_ptr<const Schema> schema);

/// Five strong single-factor signals plus the three-factor rule
/// {compulsive-buyer, download-unauthorized-software, installed-malicious-software}
/// -> victim at 0.9; the remaining 18 attributes are noise.
GenSpec planted_signal_spec(std::size_t n_records, std::uint64_t seed);

} // namespace riskminer
