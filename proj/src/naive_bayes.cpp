#include "riskminer/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "riskminer/errors.hpp"

namespace riskminer {

double GaussianNbModel::score(std::span<const double> x) const {
    if (classes.size() == 1) return classes.front() == 1 ? 1.0 : 0.0;
    double jll[2] = {0.0, 0.0};
    for (std::size_t c = 0; c < 2; ++c) {
        double s = log_prior[c];
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double v = variance[c][j];
            const double d = x[j] - mean[c][j];
            s -= 0.5 * std::log(2.0 * std::numbers::pi * v) + 0.5 * d * d / v;
        }
        jll[c] = s;
    }
    return sigmoid(jll[1] - jll[0]);
}

GaussianNbModel fit_gaussian_nb(const FeatureMatrix& x, std::span<const int> y, const GaussianNbParams& params) {
    const std::size_t n = x.rows;
    if (n == 0) throw EmptyInput("naive Bayes: no training records");
    if (params.var_smoothing < 0.0) throw ConfigError("naive Bayes: var_smoothing must be non-negative");

    GaussianNbModel model;
    double largest_variance = 0.0;
    for (std::size_t j = 0; j < x.cols; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += x.at(i, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) var += (x.at(i, j) - mean) * (x.at(i, j) - mean);
        largest_variance = std::max(largest_variance, var / static_cast<double>(n));
    }
    model.epsilon = params.var_smoothing * largest_variance;
    // Constant training data would leave every variance at zero.
    if (!(model.epsilon > 0.0)) model.epsilon = std::max(params.var_smoothing, 1e-300);

    for (int label = 0; label < 2; ++label) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < n; ++i)
            if (y[i] == label) rows.push_back(i);
        if (rows.empty()) continue;
        const double count = static_cast<double>(rows.size());
        std::vector<double> mean(x.cols, 0.0);
        std::vector<double> var(x.cols, 0.0);
        for (auto i : rows)
            for (std::size_t j = 0; j < x.cols; ++j) mean[j] += x.at(i, j);
        for (auto& m : mean) m /= count;
        for (auto i : rows)
            for (std::size_t j = 0; j < x.cols; ++j) var[j] += (x.at(i, j) - mean[j]) * (x.at(i, j) - mean[j]);
        for (auto& v : var) v = v / count + model.epsilon;
        model.classes.push_back(label);
        model.log_prior.push_back(std::log(count / static_cast<double>(n)));
        model.mean.push_back(std::move(mean));
        model.variance.push_back(std::move(var));
    }
    return model;
}

} // namespace riskminer
