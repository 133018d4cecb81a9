#include "riskminer/learners.hpp"

#include <algorithm>
#include <cmath>

#include "riskminer/errors.hpp"

namespace riskminer {

namespace {

double mean_deviance(std::span<const int> y, std::span<const double> raw) {
    double loss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double z = raw[i];
        const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        loss += softplus - (y[i] == 1 ? z : 0.0);
    }
    return loss / static_cast<double>(y.size());
}

} // namespace

double log_loss(std::span<const int> y, std::span<const double> probabilities) {
    if (y.size() != probabilities.size()) throw LengthMismatch("log_loss: label and probability counts differ");
    if (y.empty()) throw EmptyInput("log_loss of nothing");
    double loss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double p = std::clamp(probabilities[i], 1e-15, 1.0 - 1e-15);
        loss -= y[i] == 1 ? std::log(p) : std::log1p(-p);
    }
    return loss / static_cast<double>(y.size());
}

double BoostingModel::raw(std::span<const double> x) const {
    double z = init_raw;
    for (const auto& t : trees) z += learning_rate * t.evaluate(x);
    return z;
}

BoostingModel fit_boosting(const FeatureMatrix& x, std::span<const int> y, const BoostingParams& params,
                           FitDiagnostics& diagnostics) {
    const std::size_t n = x.rows;
    if (n == 0) throw EmptyInput("gradient boosting: no training records");
    const auto positives = static_cast<double>(std::count(y.begin(), y.end(), 1));
    if (positives == 0.0 || positives == static_cast<double>(n))
        throw SingleClass("gradient boosting needs both classes in the training data");

    BoostingModel model;
    model.learning_rate = params.learning_rate;
    const double prior = positives / static_cast<double>(n);
    model.init_raw = std::log(prior / (1.0 - prior));

    TreeGrowth growth;
    growth.criterion = SplitCriterion::FriedmanMse;
    growth.max_depth = params.max_depth;
    growth.min_samples_split = params.min_samples_split;

    std::vector<double> raw(n, model.init_raw);
    std::vector<double> residual(n);
    std::vector<double> prob(n);
    const std::vector<double> weights(n, 1.0);
    diagnostics = {};
    diagnostics.loss_history.push_back(mean_deviance(y, raw));

    for (std::size_t m = 0; m < params.n_estimators; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            prob[i] = sigmoid(raw[i]);
            residual[i] = static_cast<double>(y[i]) - prob[i];
        }
        Tree tree = grow_tree(x, residual, weights, growth);

        // Newton step per leaf.
        auto& nodes = tree.nodes();
        std::vector<double> numerator(nodes.size(), 0.0);
        std::vector<double> denominator(nodes.size(), 0.0);
        std::vector<std::size_t> leaf(n);
        for (std::size_t i = 0; i < n; ++i) {
            leaf[i] = tree.leaf_of(x.row(i));
            numerator[leaf[i]] += residual[i];
            denominator[leaf[i]] += prob[i] * (1.0 - prob[i]);
        }
        for (std::size_t id = 0; id < nodes.size(); ++id)
            if (nodes[id].feature < 0)
                nodes[id].value = std::abs(denominator[id]) < 1e-150 ? 0.0 : numerator[id] / denominator[id];

        for (std::size_t i = 0; i < n; ++i) raw[i] += params.learning_rate * nodes[leaf[i]].value;
        model.trees.push_back(std::move(tree));
        diagnostics.loss_history.push_back(mean_deviance(y, raw));
    }
    diagnostics.iterations = params.n_estimators;
    return model;
}

} // namespace riskminer
