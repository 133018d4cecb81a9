#include "riskminer/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "riskminer/errors.hpp"

namespace riskminer {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

/// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double linear(std::span<const double> params, std::span<const double> row) {
    double z = params.back();
    for (std::size_t j = 0; j < row.size(); ++j) z += params[j] * row[j];
    return z;
}

double norm(std::span<const double> v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

} // namespace

double LogisticModel::decision(std::span<const double> x) const {
    double z = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * x[j];
    return z;
}

double logistic_objective(std::span<const double> params, const FeatureMatrix& x, std::span<const int> y, double c) {
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double z = linear(params, x.row(i));
        loss += softplus(z) - (y[i] == 1 ? z : 0.0);
    }
    double penalty = 0.0;
    for (std::size_t j = 0; j < x.cols; ++j) penalty += params[j] * params[j];
    return loss + penalty / (2.0 * c);
}

std::vector<double> logistic_gradient(std::span<const double> params, const FeatureMatrix& x, std::span<const int> y,
                                      double c) {
    std::vector<double> g(x.cols + 1, 0.0);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const auto row = x.row(i);
        const double r = sigmoid(linear(params, row)) - static_cast<double>(y[i]);
        for (std::size_t j = 0; j < x.cols; ++j) g[j] += r * row[j];
        g[x.cols] += r;
    }
    for (std::size_t j = 0; j < x.cols; ++j) g[j] += params[j] / c;
    return g;
}

LogisticModel fit_logistic(const FeatureMatrix& x, std::span<const int> y, const LogisticParams& params,
                           FitDiagnostics& diagnostics) {
    if (x.rows == 0) throw EmptyInput("logistic regression: no training records");
    const auto positives = std::count(y.begin(), y.end(), 1);
    if (positives == 0 || static_cast<std::size_t>(positives) == y.size())
        throw SingleClass("logistic regression needs both classes in the training data");
    if (!(params.c > 0.0)) throw ConfigError("logistic regression: C must be positive");

    const std::size_t n = x.rows;
    const std::size_t dim = x.cols + 1;
    // Optimizes over centered columns. The bias is unpenalized, so this is an
    // exact reparametrization that only improves conditioning.
    std::vector<double> mean(x.cols, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < x.cols; ++j) mean[j] += x.at(i, j);
    for (auto& m : mean) m /= static_cast<double>(n);
    FeatureMatrix xc = x;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < x.cols; ++j) xc.data[i * x.cols + j] -= mean[j];

    // Objective along the search direction is evaluated from cached linear
    // forms z + t * dz, so a line-search trial costs O(n).
    const auto objective = [&](std::span<const double> w, std::span<const double> z) {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) loss += softplus(z[i]) - (y[i] == 1 ? z[i] : 0.0);
        double penalty = 0.0;
        for (std::size_t j = 0; j + 1 < dim; ++j) penalty += w[j] * w[j];
        return loss + penalty / (2.0 * params.c);
    };
    // f(trial) - f(w) summed term by term; near the optimum the change is far
    // below the rounding error of f itself.
    const auto change = [&](std::span<const double> w0, std::span<const double> z0, std::span<const double> w1,
                            std::span<const double> z1) {
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = z1[i] - z0[i];
            const double sp = std::abs(d) < 1.0 ? std::log1p(sigmoid(z0[i]) * std::expm1(d))
                                                : softplus(z1[i]) - softplus(z0[i]);
            delta += sp - (y[i] == 1 ? d : 0.0);
        }
        for (std::size_t j = 0; j + 1 < dim; ++j) delta += (w1[j] - w0[j]) * (w1[j] + w0[j]) / (2.0 * params.c);
        return delta;
    };
    const auto gradient = [&](std::span<const double> w, std::span<const double> z, std::vector<double>& g) {
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = xc.row(i);
            const double r = sigmoid(z[i]) - static_cast<double>(y[i]);
            for (std::size_t j = 0; j + 1 < dim; ++j) g[j] += r * row[j];
            g[dim - 1] += r;
        }
        for (std::size_t j = 0; j + 1 < dim; ++j) g[j] += w[j] / params.c;
    };

    std::vector<double> w(dim, 0.0);
    std::vector<double> z(n, 0.0);
    std::vector<double> g(dim);
    gradient(w, z, g);
    double f = objective(w, z);
    diagnostics = {};
    diagnostics.loss_history.push_back(f);

    double step = 1.0 / (0.25 * static_cast<double>(n) * static_cast<double>(dim));
    std::vector<double> trial(dim);
    std::vector<double> z_trial(n);
    std::vector<double> dz(n);
    std::vector<double> g_new(dim);
    std::size_t iter = 0;
    for (; iter < params.max_iter && norm(g) > params.tol; ++iter) {
        const double g2 = std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
        for (std::size_t i = 0; i < n; ++i) dz[i] = -linear(g, xc.row(i));
        double t = step;
        int halvings = 0;
        while (true) {
            for (std::size_t j = 0; j < dim; ++j) trial[j] = w[j] - t * g[j];
            for (std::size_t i = 0; i < n; ++i) z_trial[i] = z[i] + t * dz[i];
            if (change(w, z, trial, z_trial) <= -1e-4 * t * g2) break;
            t *= 0.5;
            if (++halvings > 60) break;
        }
        if (halvings > 60) {
            diagnostics.warning = "line search stalled";
            break;
        }
        // Exact linear forms at the accepted point keep rounding from drifting.
        for (std::size_t i = 0; i < n; ++i) z_trial[i] = linear(trial, xc.row(i));
        const double f_trial = std::min(f, objective(trial, z_trial));
        gradient(trial, z_trial, g_new);
        // Barzilai-Borwein length for the next trial step.
        double ss = 0.0;
        double sy = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double s = trial[j] - w[j];
            ss += s * s;
            sy += s * (g_new[j] - g[j]);
        }
        step = sy > 0.0 && std::isfinite(ss / sy) ? ss / sy : 2.0 * t;
        std::swap(w, trial);
        std::swap(z, z_trial);
        std::swap(g, g_new);
        f = f_trial;
        diagnostics.loss_history.push_back(f);
    }
    diagnostics.iterations = iter;
    diagnostics.converged = norm(g) <= params.tol;
    if (!diagnostics.converged && diagnostics.warning.empty())
        diagnostics.warning = "NonConvergence: gradient norm " + std::to_string(norm(g)) + " after " +
                              std::to_string(iter) + " iterations";

    LogisticModel model;
    model.weights.assign(w.begin(), w.end() - 1);
    model.bias = w.back();
    for (std::size_t j = 0; j < x.cols; ++j) model.bias -= model.weights[j] * mean[j];
    return model;
}

} // namespace riskminer
