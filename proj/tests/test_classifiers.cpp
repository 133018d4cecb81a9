#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "riskminer/classifier.hpp"
#include "riskminer/errors.hpp"
#include "riskminer/synthetic.hpp"

using namespace riskminer;

namespace {

std::vector<std::size_t> every_feature(const Dataset& ds) {
    std::vector<std::size_t> idx(ds.feature_count());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
}

double training_accuracy(const Model& m, const Dataset& ds) {
    const auto pred = predict_dataset(m, ds);
    return accuracy(ds.labels(), pred);
}

FeatureMatrix random_matrix(std::mt19937_64& gen, std::size_t rows, std::size_t cols) {
    FeatureMatrix x(rows, cols);
    for (auto& v : x.data) v = static_cast<double>(1 + gen() % 3);
    return x;
}

double binary_gini_oracle(double n, double ones) {
    const double p = ones / n;
    return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

} // namespace

TEST_CASE("gini impurity") {
    CHECK(gini(std::vector<double>{5, 5}) == doctest::Approx(0.5));
    CHECK(gini(std::vector<double>{10, 0}) == 0.0);
    CHECK(gini(std::vector<double>{2, 8}) == doctest::Approx(0.32));
    CHECK_THROWS_AS(gini(std::vector<double>{0, 0}), EmptyNode);
}

TEST_CASE("best_split") {
    SUBCASE("a copy of the label wins with pure children") {
        FeatureMatrix x(6, 2);
        const std::vector<int> y{0, 0, 0, 1, 1, 1};
        const std::vector<double> noise{1, 2, 1, 2, 1, 2};
        for (std::size_t i = 0; i < 6; ++i) {
            x.at(i, 0) = noise[i];
            x.at(i, 1) = y[i];
        }
        const std::vector<std::size_t> fs{0, 1};
        const auto s = best_split(x, y, fs);
        REQUIRE(s);
        CHECK(s->feature == 1);
        CHECK(s->threshold == 0.5);
        CHECK(s->decrease == doctest::Approx(0.5));
    }
    SUBCASE("uniform labels give no split") {
        FeatureMatrix x(4, 1);
        x.data = {0, 1, 0, 1};
        const std::vector<int> y{1, 1, 1, 1};
        const std::vector<std::size_t> fs{0};
        CHECK_FALSE(best_split(x, y, fs));
    }
    SUBCASE("equal decreases keep the lower feature") {
        // Columns 0 and 1 are mirror images, so every threshold ties.
        FeatureMatrix x(8, 2);
        const std::vector<int> y{0, 0, 0, 1, 1, 1, 1, 0};
        const std::vector<double> a{1, 1, 2, 2, 3, 3, 3, 1};
        for (std::size_t i = 0; i < 8; ++i) {
            x.at(i, 0) = 4 - a[i];
            x.at(i, 1) = a[i];
        }
        // Exhaustive enumeration of thresholds on both columns.
        double top = -1;
        for (std::size_t f = 0; f < 2; ++f)
            for (double t : {1.5, 2.5}) {
                double nl = 0, ol = 0, nr = 0, orr = 0;
                for (std::size_t i = 0; i < 8; ++i) (x.at(i, f) <= t ? (nl += 1, ol += y[i]) : (nr += 1, orr += y[i]));
                const double d = binary_gini_oracle(8, 4) - nl / 8 * binary_gini_oracle(nl, ol) -
                                 nr / 8 * binary_gini_oracle(nr, orr);
                top = std::max(top, d);
            }
        const std::vector<std::size_t> fs{0, 1};
        const auto s = best_split(x, y, fs);
        REQUIRE(s);
        CHECK(s->feature == 0);
        CHECK(s->decrease == doctest::Approx(top).epsilon(1e-12));
        const std::vector<std::size_t> reversed{1, 0};
        CHECK(best_split(x, y, reversed)->feature == 0);
    }
}

TEST_CASE("decision tree solves XOR") {
    const auto ds = fixture::xor_data();
    const auto m = train(ClassifierSpec::defaults(LearnerKind::DT), ds, every_feature(ds));
    CHECK(training_accuracy(m, ds) == 1.0);
}

TEST_CASE("random forest on one label") {
    std::vector<int> values(40);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<int>(i % 3 == 0);
    const Dataset ds(fixture::binary_schema(2), values, std::vector<int>(20, 1));
    const auto m = train(ClassifierSpec::defaults(LearnerKind::RF), ds, every_feature(ds));
    for (std::size_t i = 0; i < ds.size(); ++i) CHECK(m.predict(ds.row(i)) == 1);
}

TEST_CASE("random forest scores are vote shares") {
    const auto ds = fixture::separable(300, 4);
    const auto m = train(ClassifierSpec::defaults(LearnerKind::RF), ds, every_feature(ds));
    for (double s : score_dataset(m, ds)) CHECK(std::abs(s * 10 - std::round(s * 10)) < 1e-12);
}

TEST_CASE("every learner fits separable data") {
    const auto ds = fixture::separable(400, 21);
    for (auto kind : kAllLearners) {
        CAPTURE(to_string(kind));
        const auto m = train(ClassifierSpec::defaults(kind), ds, every_feature(ds));
        CHECK(training_accuracy(m, ds) >= 0.95);
    }
}

TEST_CASE("model input contract") {
    const auto schema = std::make_shared<const Schema>(default_schema());
    const auto ds = generate_synthetic(planted_signal_spec(200, 1), schema);
    std::vector<std::size_t> twenty(20);
    std::iota(twenty.begin(), twenty.end(), std::size_t{0});
    const auto m = train(ClassifierSpec::defaults(LearnerKind::GNB), ds, twenty);
    CHECK_THROWS_AS(m.score(ds.row(0)), FeatureMismatch);
    CHECK_THROWS_AS(train(ClassifierSpec::defaults(LearnerKind::LR), ds.subset(std::vector<std::size_t>{}), twenty),
                    EmptyInput);
}

TEST_CASE("logistic regression with zero parameters") {
    const LogisticModel lr{{0.0, 0.0, 0.0}, 0.0};
    const std::vector<double> x{1, 2, 3};
    CHECK(lr.score(x) == 0.5);
    const Model m(ClassifierSpec::defaults(LearnerKind::LR), {"a", "b", "c"}, lr, {});
    CHECK(m.predict(std::span<const double>(x)) == 1);
}

TEST_CASE("logistic gradient agrees with central differences") {
    std::mt19937_64 gen(12);
    std::normal_distribution<double> normal(0.0, 0.5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto x = random_matrix(gen, 30, 4);
        std::vector<int> y(30);
        for (auto& v : y) v = static_cast<int>(gen() % 2);
        std::vector<double> params(5);
        for (auto& p : params) p = normal(gen);
        const auto g = logistic_gradient(params, x, y, 0.7);
        for (std::size_t k = 0; k < params.size(); ++k) {
            const double h = 1e-5 * std::max(1.0, std::abs(params[k]));
            auto up = params;
            auto down = params;
            up[k] += h;
            down[k] -= h;
            const double fd = (logistic_objective(up, x, y, 0.7) - logistic_objective(down, x, y, 0.7)) / (2 * h);
            CHECK(std::abs(fd - g[k]) <= 1e-6 * std::max(1.0, std::abs(g[k])));
        }
    }
}

TEST_CASE("logistic objective never increases and the fit converges") {
    const auto ds = generate_synthetic(planted_signal_spec(500, 6), std::make_shared<const Schema>(default_schema()));
    const auto x = project(ds, every_feature(ds));
    FitDiagnostics d;
    const auto lr = fit_logistic(x, ds.labels(), {}, d);
    REQUIRE(d.loss_history.size() >= 2);
    for (std::size_t i = 1; i < d.loss_history.size(); ++i) CHECK(d.loss_history[i] <= d.loss_history[i - 1]);
    CHECK(d.converged);
    std::vector<double> params = lr.weights;
    params.push_back(lr.bias);
    const auto g = logistic_gradient(params, x, ds.labels(), 1.0);
    double norm = 0;
    for (double v : g) norm += v * v;
    CHECK(std::sqrt(norm) <= 1e-6);
}

TEST_CASE("logistic score is monotone in positively weighted features") {
    const auto ds = fixture::separable(300, 8);
    const auto x = project(ds, every_feature(ds));
    FitDiagnostics d;
    const auto lr = fit_logistic(x, ds.labels(), {}, d);
    std::mt19937_64 gen(3);
    for (std::size_t j = 0; j < lr.weights.size(); ++j) {
        if (lr.weights[j] <= 0) continue;
        const auto base = x.row(gen() % x.rows);
        std::vector<double> r(base.begin(), base.end());
        double prev = -1;
        for (double v = -2; v <= 3; v += 0.25) {
            r[j] = v;
            const double s = lr.score(r);
            CHECK(s >= prev);
            prev = s;
        }
    }
}

TEST_CASE("naive Bayes posterior") {
    SUBCASE("two points per class") {
        FeatureMatrix x(4, 1);
        x.data = {0, 0, 1, 1};
        const std::vector<int> y{0, 0, 1, 1};
        const auto m = fit_gaussian_nb(x, y, {});
        const std::vector<double> lo{0}, hi{1}, mid{0.5};
        CHECK(m.score(lo) < 0.5);
        CHECK(m.score(hi) > 0.5);
        CHECK(m.score(mid) == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("closed form in one dimension") {
        FeatureMatrix x(5, 1);
        x.data = {0, 2, 3, 5, 4};
        const std::vector<int> y{0, 0, 1, 1, 1};
        const auto m = fit_gaussian_nb(x, y, {});
        // Population variances 1 and 2/3; smoothing 1e-9 times the overall variance 2.96.
        const double eps = 1e-9 * 2.96;
        const double v0 = 1.0 + eps, v1 = 2.0 / 3.0 + eps;
        auto density = [](double q, double mu, double v) {
            return std::exp(-(q - mu) * (q - mu) / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
        };
        for (double q : {-1.0, 0.0, 1.5, 2.5, 3.3, 6.0}) {
            const double a = 0.4 * density(q, 1.0, v0);
            const double b = 0.6 * density(q, 4.0, v1);
            CHECK(std::abs(m.score(std::vector<double>{q}) - b / (a + b)) <= 1e-9);
        }
    }
}

TEST_CASE("boosting log-loss never increases over 100 rounds") {
    const auto ds = generate_synthetic(planted_signal_spec(600, 9), std::make_shared<const Schema>(default_schema()));
    const auto x = project(ds, every_feature(ds));
    FitDiagnostics d;
    const auto gb = fit_boosting(x, ds.labels(), {}, d);
    CHECK(gb.trees.size() == 100);
    REQUIRE(d.loss_history.size() == 101);
    for (std::size_t i = 1; i < d.loss_history.size(); ++i) CHECK(d.loss_history[i] <= d.loss_history[i - 1] + 1e-12);

    std::vector<double> p(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) p[i] = gb.score(x.row(i));
    CHECK(log_loss(ds.labels(), p) == doctest::Approx(d.loss_history.back()).epsilon(1e-9));
}

TEST_CASE("support vector dual stays in the box and satisfies KKT") {
    const auto ds = generate_synthetic(planted_signal_spec(300, 10), std::make_shared<const Schema>(default_schema()));
    const auto x = project(ds, every_feature(ds));
    for (double c : {0.5, 1.0, 4.0}) {
        SvcParams p;
        p.c = c;
        FitDiagnostics d;
        const auto svc = fit_svc(x, ds.labels(), p, d);
        CHECK(d.converged);
        REQUIRE(svc.alphas.size() == svc.support_indices.size());
        for (double a : svc.alphas) {
            CHECK(a >= 0.0);
            CHECK(a <= c);
        }
        CHECK(svc_kkt_gap(svc, x, ds.labels(), c) <= p.tol);
    }
}

TEST_CASE("tree paths test a feature at most once per gap between its values") {
    const auto ds = generate_synthetic(planted_signal_spec(800, 2), std::make_shared<const Schema>(default_schema()));
    const auto m = train(ClassifierSpec::defaults(LearnerKind::DT), ds, every_feature(ds));
    const auto& tree = std::get<DecisionTreeModel>(m.parameters()).tree;
    for (const auto& path : tree.paths()) {
        std::map<std::size_t, std::size_t> uses;
        for (auto f : path) ++uses[f];
        for (const auto& [f, count] : uses) CHECK(count <= ds.schema().feature(f).values.size() - 1);
    }
}

TEST_CASE("training is deterministic and models survive serialization") {
    const auto ds = generate_synthetic(planted_signal_spec(300, 13), std::make_shared<const Schema>(default_schema()));
    const auto idx = every_feature(ds);
    for (auto kind : kAllLearners) {
        CAPTURE(to_string(kind));
        const auto a = train(ClassifierSpec::defaults(kind), ds, idx);
        const auto b = train(ClassifierSpec::defaults(kind), ds, idx);
        CHECK(a.to_json() == b.to_json());
        const auto back = Model::from_json(nlohmann::json::parse(a.to_json().dump()));
        CHECK(back.features() == a.features());
        CHECK(score_dataset(back, ds) == score_dataset(a, ds));
        const auto scores = score_dataset(a, ds);
        const auto labels = predict_dataset(a, ds);
        for (std::size_t i = 0; i < ds.size(); ++i) CHECK(labels[i] == (scores[i] >= 0.5 ? 1 : 0));
    }
}

TEST_CASE("learner specs") {
    CHECK(parse_learner("GB") == LearnerKind::GB);
    CHECK_THROWS_AS(parse_learner("knn"), ConfigError);
    auto spec = ClassifierSpec::defaults(LearnerKind::RF);
    CHECK(spec.param("n_estimators") == 10);
    CHECK(spec.seed == 42);
    CHECK_THROWS_AS(spec.set("C", 1.0), ConfigError);
    CHECK_THROWS_AS(spec.set("n_estimators", 0), ConfigError);
    spec.set("n_estimators", 25);
    CHECK(ClassifierSpec::from_json(spec.to_json()).param("n_estimators") == 25);
    CHECK(ClassifierSpec::defaults(LearnerKind::DT).seed == 22);
    CHECK(ClassifierSpec::defaults(LearnerKind::GNB).param("var_smoothing") == 1e-9);
}
