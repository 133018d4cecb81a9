#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "riskminer/feature_matrix.hpp"
#include "riskminer/random.hpp"

namespace riskminer {

/// Gini impurity 1 - sum (c_i / n)^2. Throws EmptyNode when the counts sum to 0.
double gini(std::span<const double> class_counts);

enum class SplitCriterion { Gini, FriedmanMse };

/// A threshold split: records with value <= threshold go left. The value sets
/// list the feature codes present at the node on each side.
struct SplitChoice {
    std::size_t feature = 0;
    double threshold = 0.0;
    std::vector<double> left_values;
    std::vector<double> right_values;
    double decrease = 0.0;
};

/// Splits with a decrease at or below this are treated as no improvement.
inline constexpr double kMinDecrease = 1e-12;

/// Best split of the node holding `rows`. For Gini the targets are 0/1 labels;
/// for FriedmanMse they are real responses. Candidate thresholds sit midway
/// between consecutive distinct values. Ties keep the lower feature index,
/// then the smaller left side. Returns nullopt when no split decreases the
/// impurity.
std::optional<SplitChoice> best_split(const FeatureMatrix& x, std::span<const double> targets,
                                      std::span<const double> weights, std::span<const std::size_t> rows,
                                      std::span<const std::size_t> features, SplitCriterion criterion);

/// Unit-weight gini convenience overload over every row.
std::optional<SplitChoice> best_split(const FeatureMatrix& x, std::span<const int> labels,
                                      std::span<const std::size_t> features);

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    /// Leaf output: weighted share of class 1 for classification trees, the
    /// additive response for regression trees.
    double value = 0.0;
};

class Tree {
public:
    Tree() = default;
    explicit Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    double evaluate(std::span<const double> record) const;
    /// Index of the leaf reached by `record`.
    std::size_t leaf_of(std::span<const double> record) const;

    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    std::vector<TreeNode>& nodes() noexcept { return nodes_; }
    std::size_t depth() const;
    std::size_t leaf_count() const;

    /// Feature indices tested on the root-to-leaf path of every leaf.
    std::vector<std::vector<std::size_t>> paths() const;

    nlohmann::json to_json() const;
    static Tree from_json(const nlohmann::json& doc);

private:
    std::vector<TreeNode> nodes_;
};

struct TreeGrowth {
    SplitCriterion criterion = SplitCriterion::Gini;
    int max_depth = -1;                // negative: unlimited
    std::size_t min_samples_split = 2; // records with positive weight
    std::size_t max_features = 0;      // 0: every feature at every node
};

/// Grows a tree over the rows with positive weight. With max_features > 0 the
/// features are visited in a per-node random order and the search widens past
/// max_features until a useful split appears. Leaves hold the weighted target
/// mean (the class-1 share for Gini).
Tree grow_tree(const FeatureMatrix& x, std::span<const double> targets, std::span<const double> weights,
               const TreeGrowth& growth, Rng* rng = nullptr);

} // namespace riskminer
