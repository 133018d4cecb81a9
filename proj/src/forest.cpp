#include "riskminer/learners.hpp"

#include <cmath>

#include "riskminer/errors.hpp"

namespace riskminer {

namespace {

std::vector<double> as_targets(std::span<const int> y) { return {y.begin(), y.end()}; }

} // namespace

DecisionTreeModel fit_decision_tree(const FeatureMatrix& x, std::span<const int> y, const DecisionTreeParams& params) {
    if (x.rows == 0) throw EmptyInput("decision tree: no training records");
    const auto targets = as_targets(y);
    const std::vector<double> weights(y.size(), 1.0);
    TreeGrowth growth;
    growth.max_depth = params.max_depth;
    growth.min_samples_split = params.min_samples_split;
    return {grow_tree(x, targets, weights, growth)};
}

double RandomForestModel::score(std::span<const double> x) const {
    std::size_t votes = 0;
    for (const auto& t : trees) votes += t.evaluate(x) >= 0.5 ? 1 : 0;
    return static_cast<double>(votes) / static_cast<double>(trees.size());
}

RandomForestModel fit_random_forest(const FeatureMatrix& x, std::span<const int> y, const RandomForestParams& params) {
    if (x.rows == 0) throw EmptyInput("random forest: no training records");
    if (params.n_estimators == 0) throw ConfigError("random forest: n_estimators must be positive");
    const auto targets = as_targets(y);
    TreeGrowth growth;
    growth.min_samples_split = params.min_samples_split;
    growth.max_features = params.max_features > 0
                              ? params.max_features
                              : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols))));

    RandomForestModel model;
    for (std::size_t t = 0; t < params.n_estimators; ++t) {
        Rng rng(derive_seed(params.seed, 0xf0e5, t));
        std::vector<double> weights(x.rows, 0.0);
        for (std::size_t i = 0; i < x.rows; ++i) weights[rng.below(x.rows)] += 1.0;
        model.trees.push_back(grow_tree(x, targets, weights, growth, &rng));
    }
    return model;
}

} // namespace riskminer
