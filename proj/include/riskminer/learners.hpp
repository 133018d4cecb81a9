#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskminer/feature_matrix.hpp"
#include "riskminer/tree.hpp"

namespace riskminer {

/// Convergence bookkeeping shared by the iterative learners.
struct FitDiagnostics {
    bool converged = true;
    std::size_t iterations = 0;
    std::string warning;
    /// Training objective after each iteration (LR), or training log-loss
    /// before the first and after every boosting round (GB).
    std::vector<double> loss_history;
};

double sigmoid(double z);

// ---- decision tree / random forest ---------------------------------------------

struct DecisionTreeModel {
    Tree tree;
    double score(std::span<const double> x) const { return tree.evaluate(x); }
};

struct DecisionTreeParams {
    int max_depth = -1;
    std::size_t min_samples_split = 2;
};

DecisionTreeModel fit_decision_tree(const FeatureMatrix& x, std::span<const int> y, const DecisionTreeParams& params);

struct RandomForestModel {
    std::vector<Tree> trees;
    /// Share of trees whose leaf votes victim.
    double score(std::span<const double> x) const;
};

struct RandomForestParams {
    std::size_t n_estimators = 10;
    std::size_t max_features = 0; // 0: floor(sqrt(F)), at least 1
    std::size_t min_samples_split = 2;
    std::uint64_t seed = 42;
};

/// Each tree is grown on a bootstrap sample (n draws with replacement) using
/// its own stream derived from (seed, tree index).
RandomForestModel fit_random_forest(const FeatureMatrix& x, std::span<const int> y, const RandomForestParams& params);

// ---- logistic regression -------------------------------------------------------------

struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;
    double decision(std::span<const double> x) const;
    double score(std::span<const double> x) const { return sigmoid(decision(x)); }
};

struct LogisticParams {
    double c = 1.0;
    std::size_t max_iter = 1000;
    double tol = 1e-6;
};

/// Penalized negative log-likelihood: sum_i logloss(y_i, w.x_i + b) + |w|^2 / (2C).
/// `params` holds the weights followed by the bias.
double logistic_objective(std::span<const double> params, const FeatureMatrix& x, std::span<const int> y, double c);
std::vector<double> logistic_gradient(std::span<const double> params, const FeatureMatrix& x, std::span<const int> y,
                                      double c);

/// Batch gradient descent with Armijo backtracking; the trial step is the
/// Barzilai-Borwein length when available. Stops at gradient norm <= tol or
/// max_iter, flagging non-convergence in the diagnostics.
LogisticModel fit_logistic(const FeatureMatrix& x, std::span<const int> y, const LogisticParams& params,
                           FitDiagnostics& diagnostics);

// ---- support vector classifier ---------------------------------------------------------

struct SvcModel {
    double gamma = 1.0;
    double coef0 = 0.0;
    int degree = 3;
    double rho = 0.0;
    std::vector<double> dual_coef; // alpha_i * y_i for each support vector
    std::vector<double> alphas;    // alpha_i in [0, C]
    std::vector<std::size_t> support_indices; // training rows
    FeatureMatrix support_vectors;

    double kernel(std::span<const double> a, std::span<const double> b) const;
    double decision(std::span<const double> x) const;
    double score(std::span<const double> x) const { return sigmoid(decision(x)); }
};

struct SvcParams {
    double c = 1.0;
    int degree = 3;
    double coef0 = 0.0;
    double gamma = 0.0; // <= 0: 1 / (F * variance of all training values)
    double tol = 1e-3;
    std::size_t max_passes = 10000;
};

/// Sequential minimal optimization of the C-SVC dual with a polynomial kernel.
/// Each step updates the maximal-violating pair (second-order choice of the
/// partner); a pass is n such steps.
SvcModel fit_svc(const FeatureMatrix& x, std::span<const int> y, const SvcParams& params, FitDiagnostics& diagnostics);

/// Largest KKT violation m(alpha) - M(alpha) of the dual solution, recomputed
/// from the training data the model was fit on; zero at an exact optimum.
double svc_kkt_gap(const SvcModel& model, const FeatureMatrix& x, std::span<const int> y, double c);

// ---- gradient boosting --------------------------------------------------------------------

struct BoostingModel {
    double init_raw = 0.0;
    double learning_rate = 0.1;
    std::vector<Tree> trees;
    double raw(std::span<const double> x) const;
    double score(std::span<const double> x) const { return sigmoid(raw(x)); }
};

struct BoostingParams {
    std::size_t n_estimators = 100;
    double learning_rate = 0.1;
    int max_depth = 3;
    std::size_t min_samples_split = 2;
};

/// Binomial-deviance boosting: each round fits a friedman-mse regression tree
/// to y - p and replaces its leaf values by the Newton step
/// sum(y - p) / sum(p (1 - p)). The raw score starts at the prior log-odds.
BoostingModel fit_boosting(const FeatureMatrix& x, std::span<const int> y, const BoostingParams& params,
                           FitDiagnostics& diagnostics);

double log_loss(std::span<const int> y, std::span<const double> probabilities);

// ---- Gaussian naive Bayes -------------------------------------------------------------------

struct GaussianNbModel {
    std::vector<int> classes;
    std::vector<double> log_prior;
    std::vector<std::vector<double>> mean;
    std::vector<std::vector<double>> variance; // smoothed
    double epsilon = 0.0;

    /// Normalized posterior of class 1.
    double score(std::span<const double> x) const;
};

struct GaussianNbParams {
    double var_smoothing = 1e-9;
};

GaussianNbModel fit_gaussian_nb(const FeatureMatrix& x, std::span<const int> y, const GaussianNbParams& params);

} // namespace riskminer
