#include "riskminer/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskminer/errors.hpp"

namespace riskminer {

namespace {

constexpr double kTau = 1e-12;

double poly(double dot, double gamma, double coef0, int degree) {
    const double base = gamma * dot + coef0;
    double out = 1.0;
    for (int d = 0; d < degree; ++d) out *= base;
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

double scale_gamma(const FeatureMatrix& x) {
    const double n = static_cast<double>(x.data.size());
    double mean = 0.0;
    for (double v : x.data) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : x.data) var += (v - mean) * (v - mean);
    var /= n;
    return var > 0.0 ? 1.0 / (static_cast<double>(x.cols) * var) : 1.0;
}

} // namespace

double SvcModel::kernel(std::span<const double> a, std::span<const double> b) const {
    return poly(dot(a, b), gamma, coef0, degree);
}

double SvcModel::decision(std::span<const double> x) const {
    double f = -rho;
    for (std::size_t s = 0; s < dual_coef.size(); ++s) f += dual_coef[s] * kernel(support_vectors.row(s), x);
    return f;
}

SvcModel fit_svc(const FeatureMatrix& x, std::span<const int> labels, const SvcParams& params,
                 FitDiagnostics& diagnostics) {
    const std::size_t n = x.rows;
    if (n == 0) throw EmptyInput("svc: no training records");
    const auto positives = std::count(labels.begin(), labels.end(), 1);
    if (positives == 0 || static_cast<std::size_t>(positives) == n)
        throw SingleClass("svc needs both classes in the training data");
    if (!(params.c > 0.0)) throw ConfigError("svc: C must be positive");

    SvcModel model;
    model.degree = params.degree;
    model.coef0 = params.coef0;
    model.gamma = params.gamma > 0.0 ? params.gamma : scale_gamma(x);

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == 1 ? 1.0 : -1.0;

    std::vector<double> k(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = model.kernel(x.row(i), x.row(j));
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    auto kij = [&](std::size_t i, std::size_t j) { return k[i * n + j]; };

    const double c = params.c;
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);
    const std::size_t max_iter = params.max_passes > std::numeric_limits<std::size_t>::max() / n
                                     ? std::numeric_limits<std::size_t>::max()
                                     : params.max_passes * n;
    diagnostics = {};
    diagnostics.converged = false;

    std::size_t iter = 0;
    for (; iter < max_iter; ++iter) {
        // Maximal violating index i, then the partner j with the largest
        // second-order objective decrease.
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] > 0 ? alpha[t] < c : alpha[t] > 0.0) {
                const double v = -y[t] * grad[t];
                if (v >= gmax) {
                    gmax = v;
                    i = t;
                }
            }
        }
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best_obj = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        if (i < n) {
            for (std::size_t t = 0; t < n; ++t) {
                if (!(y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < c)) continue;
                const double v = y[t] * grad[t];
                gmax2 = std::max(gmax2, v);
                const double grad_diff = gmax + v;
                if (grad_diff > 0.0) {
                    double quad = kij(i, i) + kij(t, t) - 2.0 * kij(i, t);
                    if (quad <= 0.0) quad = kTau;
                    const double obj = -(grad_diff * grad_diff) / quad;
                    if (obj <= best_obj) {
                        best_obj = obj;
                        j = t;
                    }
                }
            }
        }
        if (i == n || j == n || gmax + gmax2 < params.tol) {
            diagnostics.converged = true;
            break;
        }

        const double old_i = alpha[i];
        const double old_j = alpha[j];
        const double qij = y[i] * y[j] * kij(i, j);
        if (y[i] != y[j]) {
            double quad = kij(i, i) + kij(j, j) + 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = kij(i, i) + kij(j, j) - 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double di = alpha[i] - old_i;
        const double dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t)
            grad[t] += y[t] * (y[i] * kij(i, t) * di + y[j] * kij(j, t) * dj);
    }
    diagnostics.iterations = iter;
    if (!diagnostics.converged)
        diagnostics.warning = "NonConvergence: SMO reached " + std::to_string(params.max_passes) + " passes";

    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= c) {
            if (y[t] < 0)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] > 0)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    model.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);

    std::vector<std::size_t> sv;
    for (std::size_t t = 0; t < n; ++t)
        if (alpha[t] > 0.0) sv.push_back(t);
    model.support_vectors = FeatureMatrix(sv.size(), x.cols);
    for (std::size_t s = 0; s < sv.size(); ++s) {
        const auto src = x.row(sv[s]);
        std::copy(src.begin(), src.end(), model.support_vectors.row(s).begin());
        model.support_indices.push_back(sv[s]);
        model.alphas.push_back(alpha[sv[s]]);
        model.dual_coef.push_back(alpha[sv[s]] * y[sv[s]]);
    }
    return model;
}

double svc_kkt_gap(const SvcModel& model, const FeatureMatrix& x, std::span<const int> labels, double c) {
    std::vector<double> alpha(x.rows, 0.0);
    for (std::size_t s = 0; s < model.alphas.size(); ++s) alpha.at(model.support_indices[s]) = model.alphas[s];
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < x.rows; ++t) {
        const double yt = labels[t] == 1 ? 1.0 : -1.0;
        const double g = yt * (model.decision(x.row(t)) + model.rho) - 1.0;
        const double v = -yt * g;
        if (yt > 0 ? alpha[t] < c : alpha[t] > 0.0) m_up = std::max(m_up, v);
        if (yt > 0 ? alpha[t] > 0.0 : alpha[t] < c) m_low = std::min(m_low, v);
    }
    return m_up - m_low;
}

} // namespace riskminer
