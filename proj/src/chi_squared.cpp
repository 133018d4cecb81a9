#include "riskminer/chi_squared.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskminer/errors.hpp"

namespace riskminer {

ContingencyTable::ContingencyTable(std::vector<std::vector<std::uint64_t>> counts, std::vector<int> row_levels)
    : counts_(std::move(counts)), row_levels_(std::move(row_levels)) {
    if (counts_.empty() || counts_.front().empty()) throw DegenerateTable("contingency table has no cells");
    const std::size_t ncols = counts_.front().size();
    if (row_levels_.empty())
        for (std::size_t r = 0; r < counts_.size(); ++r) row_levels_.push_back(static_cast<int>(r));
    if (row_levels_.size() != counts_.size()) throw DegenerateTable("row level count does not match table rows");
    col_totals_.assign(ncols, 0);
    for (const auto& row : counts_) {
        if (row.size() != ncols) throw DegenerateTable("ragged contingency table");
        std::uint64_t sum = 0;
        for (std::size_t c = 0; c < ncols; ++c) {
            sum += row[c];
            col_totals_[c] += row[c];
        }
        row_totals_.push_back(sum);
        total_ += sum;
    }
}

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 100000;

/// Lower regularized gamma by its power series; converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < kMaxIterations; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Upper regularized gamma by its continued fraction (modified Lentz).
double gamma_q_fraction(double a, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

double chi_squared_sf(double statistic, double dof) {
    if (statistic <= 0.0) return 1.0;
    return std::clamp(regularized_gamma_q(0.5 * dof, 0.5 * statistic), 0.0, 1.0);
}

ContingencyTable contingency(const Dataset& ds, std::string_view feature) {
    const auto j = ds.schema().index_of(feature);
    const auto& levels = ds.schema().feature(j).values;
    std::vector<std::vector<std::uint64_t>> counts(levels.size(), std::vector<std::uint64_t>(2, 0));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto pos = std::lower_bound(levels.begin(), levels.end(), ds.value(i, j)) - levels.begin();
        ++counts[static_cast<std::size_t>(pos)][static_cast<std::size_t>(ds.label(i))];
    }
    return ContingencyTable(std::move(counts), levels);
}

ChiSqResult chi_squared_test(const ContingencyTable& table) {
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    for (std::size_t r = 0; r < table.rows(); ++r)
        if (table.row_total(r) > 0) rows.push_back(r);
    for (std::size_t c = 0; c < table.cols(); ++c)
        if (table.col_total(c) > 0) cols.push_back(c);
    if (rows.size() < 2 || cols.size() < 2)
        throw DegenerateTable("contingency table has " + std::to_string(rows.size()) + " non-empty rows and " +
                              std::to_string(cols.size()) + " non-empty columns");

    const double n = static_cast<double>(table.total());
    double statistic = 0.0;
    for (auto r : rows)
        for (auto c : cols) {
            const double expected = static_cast<double>(table.row_total(r)) * static_cast<double>(table.col_total(c)) / n;
            const double diff = static_cast<double>(table.count(r, c)) - expected;
            statistic += diff * diff / expected;
        }
    ChiSqResult result;
    result.statistic = statistic;
    result.dof = static_cast<int>((rows.size() - 1) * (cols.size() - 1));
    result.p_value = chi_squared_sf(statistic, result.dof);
    return result;
}

std::vector<FeatureRank> rank_features(const Dataset& ds, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    std::vector<FeatureRank> ranking;
    for (std::size_t j = 0; j < ds.feature_count(); ++j) {
        FeatureRank fr;
        fr.feature = ds.schema().feature(j).name;
        fr.index = j;
        try {
            const auto res = chi_squared_test(contingency(ds, fr.feature));
            fr.statistic = res.statistic;
            fr.dof = res.dof;
            fr.p_value = res.p_value;
            fr.keep = res.p_value < alpha;
        } catch (const DegenerateTable&) {
            fr.degenerate = true;
        }
        ranking.push_back(std::move(fr));
    }
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const FeatureRank& a, const FeatureRank& b) { return a.p_value < b.p_value; });
    return ranking;
}

} // namespace riskminer
