#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "riskminer/dataset.hpp"

namespace riskminer {

struct Factor {
    int id = 0;
    std::string feature;
    int value = 0;
    std::string description;
};

/// Factor ids 1..2m over m binary features, plus the victim item.
class FactorMap {
public:
    static constexpr int kDefaultVictimItem = 39;

    /// Throws ConfigError unless ids are dense from 1 and every feature
    /// contributes one factor per value of {0, 1}.
    explicit FactorMap(std::vector<Factor> entries, int victim_item = kDefaultVictimItem);

    /// The questionnaire dissolution: 19 features, 38 factors.
    static const FactorMap& standard();

    const std::vector<Factor>& entries() const noexcept { return entries_; }
    int victim_item() const noexcept { return victim_item_; }
    const Factor& factor(int id) const; // throws ConfigError for unknown ids
    std::string describe(int item) const;
    std::vector<std::string> features() const; // in factor order

private:
    std::vector<Factor> entries_;
    int victim_item_;
};

/// Sorted item ids.
using Transaction = std::vector<int>;

/// One factor per mapped feature, then the victim item when label == 1.
/// Throws UnmappedFeature when a mapped feature is not in the schema.
Transaction dissolve(std::span<const int> record, int label, const Schema& schema, const FactorMap& fm);
std::vector<Transaction> dissolve_dataset(const Dataset& ds, const FactorMap& fm);

struct FrequentItemset {
    std::vector<int> items;
    std::size_t count = 0;
    double support = 0.0;
};

struct AprioriResult {
    std::size_t transactions = 0;
    std::vector<FrequentItemset> itemsets; // by size, then lexicographic

    /// Nullptr when `items` (sorted) is not frequent.
    const FrequentItemset* find(std::span<const int> items) const;
};

/// Level-wise Apriori. An itemset is frequent when count / n >= min_support
/// (with a 1e-12 allowance for representation error). Throws EmptyInput,
/// ConfigError for min_support outside (0, 1].
AprioriResult apriori(const std::vector<Transaction>& transactions, double min_support);

struct Rule {
    std::vector<int> antecedent;
    std::vector<int> consequent;
    double support = 0.0;
    double confidence = 0.0;
    double lift = 0.0;
};

/// Rules S \ consequent -> consequent over frequent supersets S of the
/// consequent, kept at confidence >= min_confidence, ordered by confidence,
/// support (both descending) and antecedent, then truncated to `cap`.
std::vector<Rule> derive_rules(const AprioriResult& frequent, double min_confidence, std::vector<int> consequent,
                               std::size_t cap);

struct RuleMetrics {
    double support = 0.0;
    double confidence = 0.0;
    double lift = 0.0; // 0 when the consequent never occurs
};

/// Recounts a rule on raw transactions. Throws ZeroAntecedentSupport.
RuleMetrics rule_metrics(const Rule& rule, const std::vector<Transaction>& transactions);

/// CSV with one row per rule: rank, item ids joined by ';', descriptions
/// joined by " AND ", and the three metrics.
std::string format_rules_csv(const std::vector<Rule>& rules, const FactorMap& fm);

} // namespace riskminer
