#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "riskminer/errors.hpp"
#include "riskminer/rules.hpp"
#include "riskminer/synthetic.hpp"

using namespace riskminer;

namespace {

constexpr int A = 1;
constexpr int B = 2;
constexpr int V = 39;

std::vector<Transaction> toy() { return {{A, B, V}, {A, B, V}, {A, B}, {B, V}}; }

bool is_subset(const std::vector<int>& small, const std::vector<int>& big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

} // namespace

TEST_CASE("apriori on the toy database") {
    const auto r = apriori(toy(), 0.5);
    CHECK(r.transactions == 4);
    const std::map<std::vector<int>, double> expected{{{A}, 0.75},    {{B}, 1.0},       {{V}, 0.75},    {{A, B}, 0.75},
                                                      {{B, V}, 0.75}, {{A, V}, 0.5},    {{A, B, V}, 0.5}};
    CHECK(r.itemsets.size() == expected.size());
    for (const auto& [items, support] : expected) {
        const auto* f = r.find(items);
        REQUIRE(f);
        CHECK(f->support == support);
    }
    for (std::size_t i = 1; i < r.itemsets.size(); ++i) {
        const auto& p = r.itemsets[i - 1].items;
        const auto& q = r.itemsets[i].items;
        CHECK((p.size() < q.size() || (p.size() == q.size() && p < q)));
    }
}

TEST_CASE("apriori boundaries") {
    const auto full = apriori(toy(), 1.0);
    REQUIRE(full.itemsets.size() == 1);
    CHECK(full.itemsets[0].items == std::vector<int>{B});
    CHECK_THROWS_AS(apriori({}, 0.5), EmptyInput);
    CHECK_THROWS_AS(apriori(toy(), 0.0), ConfigError);
    CHECK_THROWS_AS(apriori(toy(), 1.5), ConfigError);
}

TEST_CASE("rules on the toy database") {
    const auto r = apriori(toy(), 0.5);
    const auto rules = derive_rules(r, 0.5, {V}, 100);
    const auto b = std::find_if(rules.begin(), rules.end(), [](const Rule& x) { return x.antecedent == std::vector<int>{B}; });
    REQUIRE(b != rules.end());
    CHECK(b->confidence == 0.75);
    CHECK(b->lift == doctest::Approx(1.0).epsilon(1e-15));
    const auto ab =
        std::find_if(rules.begin(), rules.end(), [](const Rule& x) { return x.antecedent == std::vector<int>{A, B}; });
    REQUIRE(ab != rules.end());
    CHECK(ab->confidence == doctest::Approx(2.0 / 3.0));

    const auto strict = derive_rules(r, 0.8, {V}, 100);
    for (const auto& rule : strict) CHECK(rule.antecedent != std::vector<int>{A, B});
    CHECK(derive_rules(r, 0.5, {99}, 100).empty());
    CHECK(derive_rules(r, 0.5, {V}, 1).size() == 1);
}

TEST_CASE("rule metrics") {
    const std::vector<Transaction> db{{1, 2}, {1}, {1, 2}, {1}};
    const auto m = rule_metrics(Rule{{1}, {2}}, db);
    CHECK(m.confidence == 0.5);
    CHECK(m.lift == 1.0);
    CHECK(m.support == 0.5);
    CHECK_THROWS_AS(rule_metrics(Rule{{7}, {2}}, db), ZeroAntecedentSupport);
    CHECK(rule_metrics(Rule{{1}, {9}}, db).lift == 0.0);
}

TEST_CASE("apriori and rules match the exhaustive lattice") {
    std::mt19937_64 gen(404);
    for (int trial = 0; trial < 30; ++trial) {
        const int n_items = 3 + static_cast<int>(gen() % 10);
        const int n_tx = 1 + static_cast<int>(gen() % 64);
        const double min_support = std::vector<double>{0.1, 0.25, 0.5}[gen() % 3];
        const auto db = oracle::random_db(gen, n_items, n_tx);
        std::vector<Transaction> txs(db.begin(), db.end());

        const auto ref = oracle::lattice(db, min_support);
        const auto got = apriori(txs, min_support);
        REQUIRE(got.itemsets.size() == ref.size());
        for (const auto& f : got.itemsets) {
            REQUIRE(ref.count(f.items));
            CHECK(f.count == ref.at(f.items));
            CHECK(f.support == static_cast<double>(f.count) / n_tx);
            // downward closure
            for (std::size_t drop = 0; drop < f.items.size() && f.items.size() > 1; ++drop) {
                auto sub = f.items;
                sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
                CHECK(got.find(sub) != nullptr);
            }
        }

        const int consequent = 1 + static_cast<int>(gen() % n_items);
        const auto rules = derive_rules(got, 0.6, {consequent}, 100000);
        const auto expected = oracle::rules_from_lattice(ref, static_cast<std::size_t>(n_tx), consequent, 0.6);
        REQUIRE(rules.size() == expected.size());
        for (std::size_t i = 0; i < rules.size(); ++i) {
            CHECK(rules[i].antecedent == expected[i].antecedent);
            CHECK(rules[i].consequent == std::vector<int>{consequent});
            CHECK(rules[i].support == doctest::Approx(expected[i].support).epsilon(1e-15));
            CHECK(rules[i].confidence == doctest::Approx(expected[i].confidence).epsilon(1e-15));
            CHECK(rules[i].lift == doctest::Approx(expected[i].lift).epsilon(1e-12));

            const auto m = rule_metrics(rules[i], txs);
            CHECK(std::abs(m.support - rules[i].support) <= 1e-12);
            CHECK(std::abs(m.confidence - rules[i].confidence) <= 1e-12);
            CHECK(std::abs(m.lift - rules[i].lift) <= 1e-12);

            const auto* a = got.find(rules[i].antecedent);
            const auto* c = got.find(rules[i].consequent);
            REQUIRE(a);
            REQUIRE(c);
            CHECK(rules[i].confidence >= 0.6 - 1e-12);
            CHECK(rules[i].confidence <= 1.0);
            CHECK(rules[i].support <= std::min(a->support, c->support));
            CHECK((rules[i].lift > 1.0 + 1e-12) == (rules[i].support > a->support * c->support + 1e-12));
        }
    }
}

TEST_CASE("standard factor map") {
    const auto& fm = FactorMap::standard();
    CHECK(fm.entries().size() == 38);
    const auto features = fm.features();
    CHECK(features.size() == 19);
    CHECK(std::set<std::string>(features.begin(), features.end()).size() == 19);
    CHECK(fm.victim_item() == 39);
    CHECK(fm.describe(39) == "victim");
    for (std::size_t i = 0; i < fm.entries().size(); ++i) CHECK(fm.entries()[i].id == static_cast<int>(i) + 1);
    for (const auto& f : fm.entries()) CHECK(default_schema().find(f.feature).has_value());
    CHECK_FALSE(std::count(features.begin(), features.end(), "gender"));
    CHECK_THROWS_AS(fm.factor(40), ConfigError);

    CHECK_THROWS_AS(FactorMap({{1, "a", 1, "x"}, {3, "a", 0, "y"}}), ConfigError);
    CHECK_THROWS_AS(FactorMap({{1, "a", 1, "x"}, {2, "a", 1, "y"}}), ConfigError);
    CHECK_NOTHROW(FactorMap({{1, "a", 1, "x"}, {2, "a", 0, "y"}}));
}

TEST_CASE("dissolution") {
    const auto& fm = FactorMap::standard();
    const auto& schema = default_schema();
    const auto weak = fm.factor(1).feature;
    const auto j = schema.index_of(weak);

    std::vector<int> record(schema.size());
    for (std::size_t k = 0; k < schema.size(); ++k) record[k] = schema.feature(k).values.front();
    record[j] = 1;
    auto items = dissolve(record, 1, schema, fm);
    CHECK(std::binary_search(items.begin(), items.end(), 1));
    CHECK(std::binary_search(items.begin(), items.end(), 39));
    CHECK(items.size() == 20);
    CHECK(std::is_sorted(items.begin(), items.end()));

    record[j] = 0;
    items = dissolve(record, 0, schema, fm);
    CHECK(std::binary_search(items.begin(), items.end(), 2));
    CHECK_FALSE(std::binary_search(items.begin(), items.end(), 39));
    CHECK(items.size() == 19);

    const Schema small({{"x", FeatureKind::Binary, {0, 1}}});
    CHECK_THROWS_AS(dissolve(std::vector<int>{1}, 0, small, fm), UnmappedFeature);
}

TEST_CASE("planted rule is recovered") {
    const auto spec = planted_signal_spec(3000, 19);
    const auto ds = generate_synthetic(spec, std::make_shared<const Schema>(default_schema()));
    const auto& fm = FactorMap::standard();
    const auto txs = dissolve_dataset(ds, fm);
    for (const auto& t : txs) CHECK((t.size() == 19 || t.size() == 20));

    std::vector<int> antecedent;
    for (const auto& c : spec.planted_rule->conditions)
        for (const auto& f : fm.entries())
            if (f.feature == c.feature && f.value == c.value) antecedent.push_back(f.id);
    std::sort(antecedent.begin(), antecedent.end());
    REQUIRE(antecedent.size() == 3);

    const auto rules = derive_rules(apriori(txs, 0.25), 0.8, {39}, 10000);
    const auto hit =
        std::find_if(rules.begin(), rules.end(), [&](const Rule& r) { return r.antecedent == antecedent; });
    REQUIRE(hit != rules.end());
    CHECK(hit->confidence >= 0.8);
    for (const auto& r : rules) CHECK(is_subset(r.consequent, {39}));
}

TEST_CASE("rules csv") {
    const auto& fm = FactorMap::standard();
    CHECK(format_rules_csv({}, fm) == "rank,antecedent_ids,antecedent,consequent_ids,consequent,support,confidence,lift\n");
    const auto csv = format_rules_csv({Rule{{1, 3}, {39}, 0.3, 0.9, 1.8}}, fm);
    CHECK(csv.find("1,1;3,") != std::string::npos);
    CHECK(csv.find(",39,victim,0.300000,0.900000,1.800000\n") != std::string::npos);
    CHECK(csv.find(" AND ") != std::string::npos);
}
