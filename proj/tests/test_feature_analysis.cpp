#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "riskminer/chi_squared.hpp"
#include "riskminer/elimination.hpp"
#include "riskminer/errors.hpp"
#include "riskminer/synthetic.hpp"

using namespace riskminer;

namespace {

std::shared_ptr<const Schema> three_features() {
    return std::make_shared<const Schema>(std::vector<FeatureSpec>{{"f1", FeatureKind::Binary, {0, 1}},
                                                                   {"f2", FeatureKind::Binary, {0, 1}},
                                                                   {"f3", FeatureKind::Ordinal, {1, 2, 3}}});
}

// f1 copies the label, f2 and f3 are noise.
Dataset label_copy(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<int> values;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        const int y = static_cast<int>(gen() % 2);
        values.insert(values.end(), {y, static_cast<int>(gen() % 2), 1 + static_cast<int>(gen() % 3)});
        labels.push_back(y);
    }
    return Dataset(three_features(), std::move(values), std::move(labels));
}

std::vector<ClassifierSpec> quick_learners() {
    return {ClassifierSpec::defaults(LearnerKind::DT), ClassifierSpec::defaults(LearnerKind::GNB)};
}

} // namespace

TEST_CASE("contingency tallies") {
    const auto schema = three_features();
    const Dataset ds(schema, {0, 0, 1, 0, 1, 2, 1, 0, 3, 1, 1, 3}, {0, 1, 0, 1});
    const auto t = contingency(ds, "f1");
    CHECK(t.counts() == oracle::Table{{1, 1}, {1, 1}});

    const Dataset same(schema, {1, 0, 1, 1, 0, 1, 1, 1, 1}, {0, 1, 1});
    const auto one = contingency(same, "f1");
    CHECK(one.count(0, 0) + one.count(0, 1) == 0);
    CHECK(one.row_total(1) == 3);

    const auto ord = contingency(ds, "f3");
    CHECK(ord.rows() == 3);
    CHECK(ord.cols() == 2);
    CHECK(ord.row_levels() == std::vector<int>{1, 2, 3});
    CHECK(ord.counts() == oracle::Table{{1, 0}, {0, 1}, {1, 1}});
    CHECK_THROWS_AS(contingency(ds, "nope"), UnknownFeature);
}

TEST_CASE("chi-squared worked examples") {
    auto r = chi_squared_test(ContingencyTable({{10, 10}, {10, 10}}));
    CHECK(r.statistic == 0.0);
    CHECK(r.dof == 1);
    CHECK(r.p_value == 1.0);

    r = chi_squared_test(ContingencyTable({{20, 5}, {5, 20}}));
    CHECK(r.statistic == doctest::Approx(18.0).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(oracle::chi2_sf_reference(18.0, 1)).epsilon(1e-10));
    CHECK(r.p_value == doctest::Approx(2.2e-5).epsilon(0.05));

    r = chi_squared_test(ContingencyTable({{15, 5}, {10, 10}}));
    CHECK(r.statistic == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.1025).epsilon(1e-3));
    CHECK(r.p_value > 0.05);
}

TEST_CASE("chi-squared degenerate tables") {
    CHECK_THROWS_AS(chi_squared_test(ContingencyTable({{10, 0}, {5, 0}})), DegenerateTable);
    CHECK_THROWS_AS(chi_squared_test(ContingencyTable({{10, 3}, {0, 0}})), DegenerateTable);
    // An empty middle row is dropped rather than counted in the dof.
    const auto r = chi_squared_test(ContingencyTable({{20, 5}, {0, 0}, {5, 20}}));
    CHECK(r.dof == 1);
    CHECK(r.statistic == doctest::Approx(18.0));
}

TEST_CASE("chi-squared matches the direct summation and gamma reference") {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t rows = 2 + gen() % 2;
        oracle::Table t(rows, std::vector<std::uint64_t>(2));
        for (auto& row : t)
            for (auto& c : row) c = 1 + gen() % 80;
        int dof = 0;
        const long double stat = oracle::chi2_direct(t, &dof);
        const auto r = chi_squared_test(ContingencyTable(t));
        CHECK(r.dof == dof);
        CHECK(std::abs(r.statistic - static_cast<double>(stat)) <= 1e-9 * std::max(1.0L, stat));
        CHECK(std::abs(r.p_value - oracle::chi2_sf_reference(r.statistic, dof)) <= 1e-8);
    }
}

TEST_CASE("chi-squared survives row and column permutation") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 50; ++trial) {
        oracle::Table t(3, std::vector<std::uint64_t>(2));
        for (auto& row : t)
            for (auto& c : row) c = 1 + gen() % 50;
        const double base = chi_squared_test(ContingencyTable(t)).statistic;
        auto rows = t;
        std::shuffle(rows.begin(), rows.end(), gen);
        CHECK(chi_squared_test(ContingencyTable(rows)).statistic == doctest::Approx(base).epsilon(1e-12));
        auto cols = t;
        for (auto& row : cols) std::swap(row[0], row[1]);
        CHECK(chi_squared_test(ContingencyTable(cols)).statistic == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("pooling proportional rows leaves the statistic unchanged") {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 50; ++trial) {
        const std::uint64_t a = 1 + gen() % 20, b = 1 + gen() % 20, m1 = 1 + gen() % 5, m2 = 1 + gen() % 5;
        const std::uint64_t c = 1 + gen() % 40, d = 1 + gen() % 40;
        const oracle::Table split{{a * m1, b * m1}, {a * m2, b * m2}, {c, d}};
        const oracle::Table pooled{{a * (m1 + m2), b * (m1 + m2)}, {c, d}};
        const double s1 = chi_squared_test(ContingencyTable(split)).statistic;
        const double s2 = chi_squared_test(ContingencyTable(pooled)).statistic;
        CHECK(std::abs(s1 - s2) <= 1e-9 * std::max(1.0, s2));
    }
}

TEST_CASE("survival function edge values") {
    CHECK(chi_squared_sf(0.0, 1) == 1.0);
    CHECK(chi_squared_sf(-1.0, 3) == 1.0);
    CHECK(regularized_gamma_q(1.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(std::isnan(regularized_gamma_q(0.0, 1.0)));
    CHECK(chi_squared_sf(400.0, 1) < 1e-80);
    CHECK(chi_squared_sf(400.0, 1) == doctest::Approx(oracle::chi2_sf_reference(400.0, 1)).epsilon(1e-8));
}

TEST_CASE("rank_features") {
    SUBCASE("a feature equal to the label") {
        const auto ds = label_copy(200, 3);
        const auto ranks = rank_features(ds, 0.05);
        REQUIRE(ranks.size() == 3);
        CHECK(ranks[0].feature == "f1");
        CHECK(ranks[0].p_value < 1e-30);
        CHECK(ranks[0].keep);
        for (std::size_t i = 1; i < ranks.size(); ++i) CHECK(ranks[i - 1].p_value <= ranks[i].p_value);
    }
    SUBCASE("planted signals lead") {
        const auto spec = planted_signal_spec(1500, 77);
        const auto ds = generate_synthetic(spec, std::make_shared<const Schema>(default_schema()));
        const auto ranks = rank_features(ds, 0.05);
        std::set<std::string> top;
        for (std::size_t i = 0; i < spec.planted_factors.size(); ++i) top.insert(ranks[i].feature);
        for (const auto& f : spec.planted_factors) CHECK(top.count(f.feature) == 1);
    }
    SUBCASE("constant feature is degenerate") {
        const Dataset ds(three_features(), {1, 0, 1, 1, 1, 2, 1, 0, 3, 1, 1, 1}, {0, 1, 0, 1});
        const auto ranks = rank_features(ds, 0.05);
        const auto it = std::find_if(ranks.begin(), ranks.end(), [](const FeatureRank& r) { return r.feature == "f1"; });
        CHECK(it->degenerate);
        CHECK(it->p_value == 1.0);
        CHECK_FALSE(it->keep);
    }
}

TEST_CASE("backward elimination") {
    const auto ds = label_copy(240, 11);
    const auto splits = split_dataset(ds, {}, 4);
    const auto learners = quick_learners();

    SUBCASE("min_size equal to the feature count") {
        const auto trace = backward_eliminate(splits, learners, 3);
        REQUIRE(trace.steps.size() == 1);
        CHECK_FALSE(trace.steps[0].removed);
        CHECK(trace.final_selection == std::vector<std::size_t>{0, 1, 2});
    }

    SUBCASE("matches the exhaustive subset search") {
        const auto trace = backward_eliminate(splits, learners, 1);
        double best = 0.0;
        for (unsigned mask = 1; mask < 8; ++mask) {
            std::vector<std::size_t> fs;
            for (std::size_t j = 0; j < 3; ++j)
                if (mask & (1u << j)) fs.push_back(j);
            for (const auto& a : evaluate_feature_set(splits, learners, fs)) best = std::max(best, a.accuracy);
        }
        CHECK(std::count(trace.final_selection.begin(), trace.final_selection.end(), 0) == 1);
        CHECK(trace.steps[trace.final_step].best().accuracy == best);
        CHECK(trace.steps[trace.final_step].features == trace.final_selection);
    }

    SUBCASE("steps are strictly nested") {
        const auto trace = backward_eliminate(splits, learners, 1);
        REQUIRE(trace.steps.size() == 3);
        for (std::size_t s = 0; s < trace.steps.size(); ++s) {
            const auto& step = trace.steps[s];
            CHECK(step.features.size() == 3 - s);
            for (const auto& a : step.accuracies) {
                CHECK(a.accuracy >= 0.0);
                CHECK(a.accuracy <= 1.0);
            }
            if (s + 1 < trace.steps.size()) {
                REQUIRE(step.removed);
                auto expected = step.features;
                expected.erase(std::find(expected.begin(), expected.end(), *step.removed));
                CHECK(trace.steps[s + 1].features == expected);
            } else {
                CHECK_FALSE(step.removed);
            }
        }
    }

    SUBCASE("worker count does not change the trace") {
        const auto one = backward_eliminate(splits, learners, 1, {}, 1);
        const auto many = backward_eliminate(splits, learners, 1, {}, 3);
        REQUIRE(one.steps.size() == many.steps.size());
        for (std::size_t s = 0; s < one.steps.size(); ++s) {
            CHECK(one.steps[s].features == many.steps[s].features);
            CHECK(one.steps[s].removed == many.steps[s].removed);
        }
    }

    SUBCASE("starting set") {
        const std::vector<std::size_t> start{1, 2};
        const auto trace = backward_eliminate(splits, learners, 1, start);
        CHECK(trace.steps.front().features == start);
        CHECK(trace.steps.size() == 2);
    }
}
