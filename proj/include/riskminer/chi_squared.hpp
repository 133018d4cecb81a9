#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "riskminer/dataset.hpp"

namespace riskminer {

/// Feature-level x class tally.
class ContingencyTable {
public:
    /// `counts[r][c]`; every row must have the same number of columns.
    explicit ContingencyTable(std::vector<std::vector<std::uint64_t>> counts, std::vector<int> row_levels = {});

    std::size_t rows() const noexcept { return counts_.size(); }
    std::size_t cols() const noexcept { return col_totals_.size(); }
    std::uint64_t count(std::size_t r, std::size_t c) const { return counts_[r][c]; }
    std::uint64_t row_total(std::size_t r) const { return row_totals_[r]; }
    std::uint64_t col_total(std::size_t c) const { return col_totals_[c]; }
    std::uint64_t total() const noexcept { return total_; }
    const std::vector<int>& row_levels() const noexcept { return row_levels_; }
    const std::vector<std::vector<std::uint64_t>>& counts() const noexcept { return counts_; }

private:
    std::vector<std::vector<std::uint64_t>> counts_;
    std::vector<int> row_levels_;
    std::vector<std::uint64_t> row_totals_;
    std::vector<std::uint64_t> col_totals_;
    std::uint64_t total_ = 0;
};

struct ChiSqResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double regularized_gamma_q(double a, double x);

/// Upper tail of the chi-squared distribution.
double chi_squared_sf(double statistic, double dof);

/// Rows follow the feature's legal codes; columns are labels 0 and 1.
/// Throws UnknownFeature.
ContingencyTable contingency(const Dataset& ds, std::string_view feature);

/// Pearson's test of independence without continuity correction. All-zero rows
/// and columns are dropped first; throws DegenerateTable if fewer than two of
/// either remain.
ChiSqResult chi_squared_test(const ContingencyTable& table);

struct FeatureRank {
    std::string feature;
    std::size_t index = 0; // schema position
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    bool keep = false;
    bool degenerate = false;
};

/// Every schema feature tested against the label, ascending by p-value (schema
/// order on ties); keep = p < alpha. Degenerate features get p = 1, keep = false.
std::vector<FeatureRank> rank_features(const Dataset& ds, double alpha);

} // namespace riskminer
