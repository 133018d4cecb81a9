#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "riskminer/chi_squared.hpp"
#include "riskminer/dataset.hpp"
#include "riskminer/errors.hpp"
#include "riskminer/schema.hpp"
#include "riskminer/split.hpp"
#include "riskminer/synthetic.hpp"

using namespace riskminer;

namespace {

std::shared_ptr<const Schema> schema26() { return std::make_shared<const Schema>(default_schema()); }

std::string header() {
    std::string h;
    for (const auto& f : default_schema().features()) h += f.name + ',';
    return h + "victim\n";
}

std::string row_of(int fill, int label, int weak_password = -1) {
    std::string r;
    for (const auto& f : default_schema().features()) {
        int v = f.values.front() == 1 ? 1 : fill;
        if (f.name == "weak-password" && weak_password >= 0) v = weak_password;
        r += std::to_string(v) + ',';
    }
    return r + std::to_string(label) + '\n';
}

std::shared_ptr<const Schema> tiny_schema() {
    return std::make_shared<const Schema>(
        std::vector<FeatureSpec>{{"a", FeatureKind::Binary, {0, 1}}, {"b", FeatureKind::Ordinal, {1, 2, 3}}});
}

} // namespace

TEST_CASE("default schema lists 26 questionnaire attributes") {
    const auto& s = default_schema();
    CHECK(s.size() == 26);
    CHECK(s.goal() == "victim");
    CHECK(s.feature(0).name == "weak-password");
    CHECK(s.feature(*s.find("age-range")).kind == FeatureKind::Discrete);
    CHECK(s.feature(*s.find("age-range")).values == std::vector<int>{1, 2, 3});
    CHECK(s.feature(*s.find("knowledge-about-cybercrime")).kind == FeatureKind::Ordinal);
    CHECK(s.feature(*s.find("knowledge-about-cybercrime")).values == std::vector<int>{1, 2, 3});
    std::size_t binary = 0;
    for (const auto& f : s.features()) binary += f.kind == FeatureKind::Binary && f.values == std::vector<int>{0, 1};
    CHECK(binary == 24);
    CHECK_FALSE(s.find("victim").has_value());
    CHECK_THROWS_AS(s.index_of("nope"), UnknownFeature);
}

TEST_CASE("schema rejects inconsistent definitions") {
    CHECK_THROWS_AS(Schema({{"a", FeatureKind::Binary, {0, 1}}, {"a", FeatureKind::Binary, {0, 1}}}), SchemaError);
    CHECK_THROWS_AS(Schema({{"a", FeatureKind::Binary, {1, 2}}}), SchemaError);
    CHECK_THROWS_AS(Schema({{"a", FeatureKind::Ordinal, {}}}), SchemaError);
    CHECK_THROWS_AS(Schema({{"victim", FeatureKind::Binary, {0, 1}}}), SchemaError);
}

TEST_CASE("schema JSON round trip") {
    const auto& s = default_schema();
    CHECK(Schema::from_json(s.to_json()) == s);
    const auto path = (std::filesystem::temp_directory_path() / "riskminer_schema_rt.json").string();
    write_schema(s, path);
    CHECK(load_schema(path) == s);
}

TEST_CASE("shipped schema file matches the built-in schema") {
    CHECK(load_schema(RISKMINER_SOURCE_DIR "/data/schema.json") == default_schema());
}

TEST_CASE("load_dataset accepts a conforming file") {
    const std::string text = header() + row_of(0, 0) + row_of(1, 1) + row_of(0, 1) + row_of(1, 0);
    const auto ds = parse_dataset(text, schema26());
    CHECK(ds.size() == 4);
    CHECK(ds.labels() == std::vector<int>{0, 1, 1, 0});
    CHECK(ds.count_label(1) == 2);
}

TEST_CASE("illegal binary value reports row and column") {
    const std::string text = header() + row_of(0, 0) + row_of(0, 1) + row_of(0, 1, 2);
    try {
        parse_dataset(text, schema26());
        FAIL("expected IllegalValue");
    } catch (const IllegalValue& e) {
        CHECK(e.row() == 3);
        CHECK(e.column() == "weak-password");
        CHECK(e.value() == 2);
        CHECK(e.category() == Error::Category::Data);
    }
}

TEST_CASE("missing column is named") {
    std::string h;
    for (const auto& f : default_schema().features())
        if (f.name != "age-range") h += f.name + ',';
    h += "victim\n";
    try {
        parse_dataset(h, schema26());
        FAIL("expected MissingColumn");
    } catch (const MissingColumn& e) {
        CHECK(e.column() == "age-range");
    }
}

TEST_CASE("ragged and malformed rows") {
    CHECK_THROWS_AS(parse_dataset("a,b,victim\n1,2\n", tiny_schema()), RaggedRow);
    CHECK_THROWS_AS(parse_dataset("a,b,victim\n1,x,0\n", tiny_schema()), MalformedCell);
    CHECK_THROWS_AS(parse_dataset("b,a,victim\n1,2,0\n", tiny_schema()), HeaderMismatch);
    CHECK_THROWS_AS(parse_dataset("a,b,victim\n1,2,2\n", tiny_schema()), IllegalValue);
    CHECK_THROWS_AS(load_dataset("/nonexistent/riskminer.csv", tiny_schema()), IoError);
}

TEST_CASE("CSV round trip is byte-exact") {
    const std::string text = "a,b,victim\n1,3,0\n0,1,1\n1,2,1\n";
    CHECK(format_csv(parse_dataset(text, tiny_schema())) == text);
    CHECK(format_csv(parse_dataset("a,b,victim\r\n1,3,0\r\n0,1,1\r\n", tiny_schema())) ==
          "a,b,victim\n1,3,0\n0,1,1\n");
    // Without a trailing newline the output differs only by that newline.
    CHECK(format_csv(parse_dataset("a,b,victim\n1,3,0", tiny_schema())) == "a,b,victim\n1,3,0\n");
}

TEST_CASE("CSV round trip property on generated data") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto ds = generate_synthetic(planted_signal_spec(50, seed), schema26());
        const auto text = format_csv(ds);
        CHECK(format_csv(parse_dataset(text, schema26())) == text);
    }
}

TEST_CASE("split sizes follow floor-then-remainder") {
    CHECK(split_sizes(3286, {0.75, 0.175, 0.075}) == std::array<std::size_t, 3>{2464, 575, 247});
    CHECK(split_sizes(10, {0.8, 0.1, 0.1}) == std::array<std::size_t, 3>{8, 1, 1});
    CHECK_THROWS_AS(split_sizes(10, {0.8, 0.1, 0.2}), RatioSum);
}

TEST_CASE("split is a deterministic stratified partition") {
    const auto ds = generate_synthetic(planted_signal_spec(997, 3), schema26());
    const auto a = split_dataset(ds, {}, 11, true);
    const auto b = split_dataset(ds, {}, 11, true);
    CHECK(a.train_positions == b.train_positions);
    CHECK(a.test_positions == b.test_positions);
    CHECK(a.validation_positions == b.validation_positions);
    const auto c = split_dataset(ds, {}, 12, true);
    CHECK(a.train_positions != c.train_positions);

    std::vector<std::size_t> all;
    for (const auto* part : {&a.train_positions, &a.test_positions, &a.validation_positions}) {
        CHECK(std::is_sorted(part->begin(), part->end()));
        all.insert(all.end(), part->begin(), part->end());
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expected(ds.size());
    std::iota(expected.begin(), expected.end(), std::size_t{0});
    CHECK(all == expected);
    CHECK(a.train.size() + a.test.size() + a.validation.size() == ds.size());

    const double whole = static_cast<double>(ds.count_label(1)) / static_cast<double>(ds.size());
    for (const auto* part : {&a.train, &a.test, &a.validation}) {
        const double n = static_cast<double>(part->size());
        const double frac = static_cast<double>(part->count_label(1)) / n;
        CHECK(std::abs(frac - whole) <= 2.0 / n);
    }
}

TEST_CASE("stratification bound holds across seeds and sizes") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 40 + gen() % 400;
        GenSpec spec;
        spec.n_records = n;
        spec.class_balance = 0.2 + 0.6 * static_cast<double>(gen() % 100) / 100.0;
        spec.seed = gen();
        const auto ds = generate_synthetic(spec, schema26());
        if (ds.count_label(0) == 0 || ds.count_label(1) == 0) continue;
        const auto s = split_dataset(ds, {0.6, 0.25, 0.15}, gen(), true);
        const double whole = static_cast<double>(ds.count_label(1)) / static_cast<double>(n);
        for (const auto* part : {&s.train, &s.test, &s.validation}) {
            const double m = static_cast<double>(part->size());
            CHECK(std::abs(static_cast<double>(part->count_label(1)) / m - whole) <= 2.0 / m);
        }
    }
}

TEST_CASE("stratified split needs both classes") {
    const auto ds = parse_dataset("a,b,victim\n1,3,1\n0,1,1\n1,2,1\n0,2,1\n", tiny_schema());
    CHECK_THROWS_AS(split_dataset(ds, {0.5, 0.25, 0.25}, 1, true), EmptyClass);
    CHECK_NOTHROW(split_dataset(ds, {0.5, 0.25, 0.25}, 1, false));
}

TEST_CASE("generator honours its recipe") {
    auto spec = planted_signal_spec(3286, 9);
    const auto ds = generate_synthetic(spec, schema26());
    CHECK(ds.size() == 3286);
    const auto again = generate_synthetic(spec, schema26());
    CHECK(again.values() == ds.values());
    CHECK(again.labels() == ds.labels());

    const double victims = static_cast<double>(ds.count_label(1));
    // Binomial(3286, 0.5) has sd ~28.7; five sd is a generous stochastic bound.
    CHECK(std::abs(victims - 1643.0) < 5 * 28.7);

    const auto col = ds.schema().index_of("clicked-on-spam-email-links");
    double hit = 0, with = 0;
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (ds.value(i, col) == 1) {
            with += 1;
            hit += ds.label(i);
        }
    CHECK(std::abs(hit / with - 0.9) <= 0.05);

    // The planted conjunction lifts the victim rate to 0.9.
    const std::size_t a = ds.schema().index_of("compulsive-buyer");
    const std::size_t b = ds.schema().index_of("download-unauthorized-software");
    const std::size_t c = ds.schema().index_of("installed-malicious-software");
    double rule_hit = 0, rule_with = 0;
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (ds.value(i, a) == 1 && ds.value(i, b) == 1 && ds.value(i, c) == 1) {
            rule_with += 1;
            rule_hit += ds.label(i);
        }
    CHECK(std::abs(rule_hit / rule_with - 0.9) <= 0.05);
    CHECK(std::abs(rule_with / 3286.0 - 0.4) <= 0.05);
}

TEST_CASE("generated records stay inside their domains") {
    GenSpec spec;
    spec.n_records = 300;
    spec.seed = 77;
    spec.planted_factors.push_back({"age-range", 3, 0.8, 0.3});
    spec.planted_factors.push_back({"knowledge-about-cybercrime", 1, 0.2, 0.4});
    const auto ds = generate_synthetic(spec, schema26());
    for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t j = 0; j < ds.feature_count(); ++j)
            CHECK(ds.schema().feature(j).accepts(ds.value(i, j)));
}

TEST_CASE("noise-only generator rarely rejects independence") {
    double significant = 0;
    const int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
        GenSpec spec;
        spec.n_records = 3286;
        spec.seed = 1000 + static_cast<std::uint64_t>(s);
        const auto ds = generate_synthetic(spec, schema26());
        for (const auto& r : rank_features(ds, 0.05)) significant += r.keep ? 1 : 0;
    }
    // At most 3 of 26 features significant on average.
    CHECK(significant / seeds <= 3.0);
}

TEST_CASE("generator spec validation") {
    GenSpec spec;
    spec.planted_factors.push_back({"no-such-feature", 1, 0.9, 0.5});
    CHECK_THROWS_AS(spec.validate(default_schema()), UnknownFeature);
    spec.planted_factors = {{"weak-password", 2, 0.9, 0.5}};
    CHECK_THROWS_AS(spec.validate(default_schema()), ConfigError);
    spec.planted_factors = {{"weak-password", 1, 0.9, 0.9}}; // needs P(f|victim) = 1.62
    CHECK_THROWS_AS(spec.validate(default_schema()), ConfigError);
    spec.planted_factors = {};
    spec.class_balance = 1.0;
    CHECK_THROWS_AS(spec.validate(default_schema()), ConfigError);

    const auto planted = planted_signal_spec(100, 1);
    CHECK(GenSpec::from_json(planted.to_json()).to_json() == planted.to_json());
}
