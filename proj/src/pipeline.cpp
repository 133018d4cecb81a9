#include "riskminer/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "riskminer/errors.hpp"
#include "riskminer/feature_matrix.hpp"
#include "riskminer/random.hpp"
#include "riskminer/schema.hpp"
#include "riskminer/smote.hpp"

namespace riskminer {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Sub-seed channels of the pipeline seed.
constexpr std::uint64_t kGeneratorChannel = 1;
constexpr std::uint64_t kSmoteChannel = 2;
constexpr std::uint64_t kSplitChannel = 3;

std::string resolve(const std::string& path, const std::string& base_dir) {
    if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
    return (fs::path(base_dir) / path).lexically_normal().string();
}

template <class T>
T get_or(const json& doc, const char* key, T fallback) {
    return doc.contains(key) && !doc[key].is_null() ? doc[key].get<T>() : fallback;
}

void reject_unknown(const json& doc, std::initializer_list<const char*> known, const std::string& where) {
    for (const auto& [key, value] : doc.items())
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
            throw ConfigError("unknown key '" + key + "' in " + where);
}

} // namespace

PipelineConfig PipelineConfig::defaults() {
    PipelineConfig cfg;
    cfg.generator = planted_signal_spec(700, kDefaultSeed);
    return cfg;
}

PipelineConfig PipelineConfig::from_json(const json& doc, const std::string& base_dir) {
    PipelineConfig cfg;
    try {
        if (!doc.is_object()) throw ConfigError("config must be a JSON object");
        reject_unknown(doc,
                       {"input", "generator", "schema", "seed", "smote", "alpha", "split", "learners",
                        "hyperparameters", "elimination", "apriori", "output_dir", "threads"},
                       "config");
        if (doc.contains("input") && !doc["input"].is_null())
            cfg.input = resolve(doc["input"].get<std::string>(), base_dir);
        if (doc.contains("generator") && !doc["generator"].is_null()) {
            const auto& g = doc["generator"];
            cfg.generator_seed_explicit = g.contains("seed");
            if (g.contains("preset")) {
                const auto preset = g["preset"].get<std::string>();
                if (preset != "planted-signal") throw ConfigError("unknown generator preset '" + preset + "'");
                reject_unknown(g, {"preset", "n_records", "seed"}, "generator");
                cfg.generator = planted_signal_spec(get_or<std::size_t>(g, "n_records", 700),
                                                    get_or<std::uint64_t>(g, "seed", kDefaultSeed));
            } else {
                cfg.generator = GenSpec::from_json(g);
            }
        }
        if (doc.contains("schema") && !doc["schema"].is_null())
            cfg.schema_path = resolve(doc["schema"].get<std::string>(), base_dir);
        cfg.seed = get_or<std::uint64_t>(doc, "seed", cfg.seed);
        if (doc.contains("smote")) {
            const auto& s = doc["smote"];
            reject_unknown(s, {"k", "target_total", "balance", "seed"}, "smote");
            cfg.smote.k = get_or<std::size_t>(s, "k", cfg.smote.k);
            cfg.smote.target_total = get_or<std::size_t>(s, "target_total", cfg.smote.target_total);
            cfg.smote.balance = get_or<bool>(s, "balance", cfg.smote.balance);
            if (s.contains("seed") && !s["seed"].is_null()) cfg.smote.seed = s["seed"].get<std::uint64_t>();
        }
        cfg.alpha = get_or<double>(doc, "alpha", cfg.alpha);
        if (doc.contains("split")) {
            const auto& s = doc["split"];
            reject_unknown(s, {"ratios", "stratified", "seed"}, "split");
            if (s.contains("ratios")) {
                const auto r = s["ratios"].get<std::vector<double>>();
                if (r.size() != 3) throw ConfigError("split.ratios needs three values");
                cfg.ratios = {r[0], r[1], r[2]};
            }
            cfg.stratified = get_or<bool>(s, "stratified", cfg.stratified);
            if (s.contains("seed") && !s["seed"].is_null()) cfg.split_seed = s["seed"].get<std::uint64_t>();
        }
        std::vector<LearnerKind> kinds(kAllLearners.begin(), kAllLearners.end());
        if (doc.contains("learners")) {
            kinds.clear();
            for (const auto& name : doc["learners"]) kinds.push_back(parse_learner(name.get<std::string>()));
        }
        for (auto kind : kinds) cfg.learners.push_back(ClassifierSpec::defaults(kind));
        if (doc.contains("hyperparameters")) {
            for (const auto& [name, params] : doc["hyperparameters"].items()) {
                const auto kind = parse_learner(name);
                auto it = std::find_if(cfg.learners.begin(), cfg.learners.end(),
                                       [&](const ClassifierSpec& s) { return s.kind == kind; });
                if (it == cfg.learners.end()) continue;
                for (const auto& [key, value] : params.items()) {
                    if (key == "seed")
                        it->seed = value.get<std::uint64_t>();
                    else
                        it->set(key, value.get<double>());
                }
            }
        }
        if (doc.contains("elimination")) {
            reject_unknown(doc["elimination"], {"min_size"}, "elimination");
            cfg.min_size = get_or<std::size_t>(doc["elimination"], "min_size", cfg.min_size);
        }
        if (doc.contains("apriori")) {
            const auto& a = doc["apriori"];
            reject_unknown(a, {"min_support", "min_confidence", "max_rules"}, "apriori");
            cfg.apriori.min_support = get_or<double>(a, "min_support", cfg.apriori.min_support);
            cfg.apriori.min_confidence = get_or<double>(a, "min_confidence", cfg.apriori.min_confidence);
            cfg.apriori.max_rules = get_or<std::size_t>(a, "max_rules", cfg.apriori.max_rules);
        }
        cfg.output_dir = get_or<std::string>(doc, "output_dir", cfg.output_dir);
        cfg.threads = get_or<unsigned>(doc, "threads", cfg.threads);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!cfg.input && !cfg.generator) {
        const auto fallback = defaults();
        cfg.generator = fallback.generator;
    }
    cfg.validate();
    return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return from_json(doc, fs::path(path).parent_path().string());
}

json PipelineConfig::to_json() const {
    json doc;
    doc["input"] = input ? json(*input) : json(nullptr);
    if (generator) {
        auto g = generator->to_json();
        g["seed"] = generator_seed();
        doc["generator"] = g;
    } else {
        doc["generator"] = nullptr;
    }
    doc["schema"] = schema_path ? json(*schema_path) : json(nullptr);
    doc["seed"] = seed;
    doc["smote"] = {{"k", smote.k}, {"target_total", smote.target_total}, {"balance", smote.balance},
                    {"seed", smote_seed()}};
    doc["alpha"] = alpha;
    doc["split"] = {{"ratios", {ratios.train, ratios.test, ratios.validation}},
                    {"stratified", stratified},
                    {"seed", effective_split_seed()}};
    json learner_names = json::array();
    json hyper = json::object();
    for (const auto& spec : effective_learners()) {
        learner_names.push_back(to_string(spec.kind));
        auto params = json(spec.hyperparameters);
        params["seed"] = spec.seed;
        hyper[std::string(to_string(spec.kind))] = params;
    }
    doc["learners"] = learner_names;
    doc["hyperparameters"] = hyper;
    doc["elimination"] = {{"min_size", min_size}};
    doc["apriori"] = {{"min_support", apriori.min_support},
                      {"min_confidence", apriori.min_confidence},
                      {"max_rules", apriori.max_rules}};
    doc["output_dir"] = output_dir;
    return doc;
}

void PipelineConfig::validate() const {
    if (input.has_value() == generator.has_value())
        throw ConfigError("config needs exactly one of 'input' and 'generator'");
    if (smote.k < 1) throw ConfigError("smote.k must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    split_sizes(0, ratios); // throws RatioSum
    if (min_size < 1) throw ConfigError("elimination.min_size must be at least 1");
    if (!(apriori.min_support > 0.0 && apriori.min_support <= 1.0))
        throw ConfigError("apriori.min_support must lie in (0, 1]");
    if (!(apriori.min_confidence >= 0.0 && apriori.min_confidence <= 1.0))
        throw ConfigError("apriori.min_confidence must lie in [0, 1]");
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
    auto specs = effective_learners();
    for (std::size_t a = 0; a < specs.size(); ++a) {
        specs[a].validate();
        for (std::size_t b = 0; b < a; ++b)
            if (specs[a].kind == specs[b].kind) throw ConfigError("learner listed twice");
    }
}

std::vector<ClassifierSpec> PipelineConfig::effective_learners() const {
    if (!learners.empty()) return learners;
    std::vector<ClassifierSpec> out;
    for (auto kind : kAllLearners) out.push_back(ClassifierSpec::defaults(kind));
    return out;
}

std::uint64_t PipelineConfig::generator_seed() const {
    if (generator && generator_seed_explicit) return generator->seed;
    return derive_seed(seed, kGeneratorChannel);
}

std::uint64_t PipelineConfig::smote_seed() const { return smote.seed ? *smote.seed : derive_seed(seed, kSmoteChannel); }

std::uint64_t PipelineConfig::effective_split_seed() const {
    return split_seed ? *split_seed : derive_seed(seed, kSplitChannel);
}

// ---- stages ------------------------------------------------------------------

std::shared_ptr<const Schema> load_config_schema(const PipelineConfig& cfg) {
    if (cfg.schema_path) return std::make_shared<const Schema>(load_schema(*cfg.schema_path));
    return std::make_shared<const Schema>(default_schema());
}

Dataset acquire_dataset(const PipelineConfig& cfg, std::shared_ptr<const Schema> schema) {
    if (cfg.input) return load_dataset(*cfg.input, std::move(schema));
    GenSpec spec = *cfg.generator;
    spec.seed = cfg.generator_seed();
    return generate_synthetic(spec, std::move(schema));
}

Dataset augment_dataset(const Dataset& ds, const PipelineConfig& cfg) {
    if (cfg.smote.target_total == 0 || cfg.smote.target_total == ds.size()) return ds;
    SmoteConfig sc;
    sc.k = cfg.smote.k;
    sc.seed = cfg.smote_seed();
    sc.target_per_class = smote_targets(ds, cfg.smote.target_total, cfg.smote.balance);
    return smote_n(ds, sc);
}

SplitBundle split_for(const Dataset& ds, const PipelineConfig& cfg) {
    return split_dataset(ds, cfg.ratios, cfg.effective_split_seed(), cfg.stratified);
}

std::vector<EliminationRow> eliminate_features(const SplitBundle& splits, const std::vector<FeatureRank>& ranking,
                                               const PipelineConfig& cfg, std::vector<std::size_t>& selection) {
    const auto learners = cfg.effective_learners();
    std::vector<std::size_t> survivors;
    std::vector<std::size_t> rejects; // descending p-value
    for (const auto& r : ranking) (r.keep ? survivors : rejects).push_back(r.index);
    std::reverse(rejects.begin(), rejects.end());
    if (survivors.empty()) throw StageError("no feature passed the chi-squared filter at alpha " + std::to_string(cfg.alpha));
    std::sort(survivors.begin(), survivors.end());

    std::vector<EliminationRow> rows;
    std::vector<std::size_t> active(splits.train.feature_count());
    std::iota(active.begin(), active.end(), std::size_t{0});
    for (auto feature : rejects) {
        rows.push_back({"chi2-filter", active, evaluate_feature_set(splits, learners, active), feature});
        active.erase(std::find(active.begin(), active.end(), feature));
    }

    const auto trace =
        backward_eliminate(splits, learners, std::min(cfg.min_size, survivors.size()), survivors, cfg.threads);
    for (const auto& step : trace.steps) rows.push_back({"backward", step.features, step.accuracies, step.removed});
    selection = trace.final_selection;
    return rows;
}

LearnerKind choose_best(const SplitBundle& splits, const EliminationRow& final_row, const PipelineConfig& cfg,
                        double& test_accuracy, double& test_auc) {
    double top = -1.0;
    for (const auto& a : final_row.accuracies) top = std::max(top, a.accuracy);
    std::optional<LearnerKind> best;
    test_auc = -1.0;
    for (const auto& spec : cfg.effective_learners()) {
        const auto it = std::find_if(final_row.accuracies.begin(), final_row.accuracies.end(),
                                     [&](const LearnerAccuracy& a) { return a.learner == spec.kind; });
        if (it == final_row.accuracies.end() || it->accuracy != top) continue;
        const auto model = train(spec, splits.train, std::span<const std::size_t>(final_row.features));
        const auto eval = evaluate_model(model, splits.test);
        if (eval.auc > test_auc) {
            test_auc = eval.auc;
            best = spec.kind;
        }
    }
    if (!best) throw StageError("no learner to choose from");
    test_accuracy = top;
    return *best;
}

LearnerEvaluation evaluate_model(const Model& model, const Dataset& ds) {
    LearnerEvaluation e;
    e.learner = model.spec().kind;
    e.diagnostics = model.diagnostics();
    const auto scores = score_dataset(model, ds);
    std::vector<int> predicted(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) predicted[i] = scores[i] >= 0.5 ? 1 : 0;
    e.confusion = confusion(ds.labels(), predicted, 0);
    e.metrics = classification_metrics(e.confusion);
    e.roc = roc_points(ds.labels(), scores, 1);
    e.auc = auc(e.roc);
    return e;
}

std::vector<Rule> mine_rules(const Dataset& ds, const AprioriSettings& settings, const FactorMap& fm,
                             std::size_t* transactions, std::size_t* frequent) {
    const auto db = dissolve_dataset(ds, fm);
    const auto result = apriori(db, settings.min_support);
    if (transactions) *transactions = db.size();
    if (frequent) *frequent = result.itemsets.size();
    return derive_rules(result, settings.min_confidence, {fm.victim_item()}, settings.max_rules);
}

namespace {

template <class F>
auto stage(const char* name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const Error& e) {
        throw Error(e.category(), std::string("stage ") + name + ": " + e.what());
    } catch (const std::exception& e) {
        throw StageError(std::string("stage ") + name + ": " + e.what());
    }
}

} // namespace

PipelineReport run_pipeline(const PipelineConfig& cfg) {
    cfg.validate();
    PipelineReport report;
    report.config = cfg.to_json();
    report.config.erase("output_dir"); // where a report lands is not part of its content
    report.schema = stage("schema", [&] { return load_config_schema(cfg); });

    Dataset raw = stage(cfg.input ? "load" : "generate", [&] { return acquire_dataset(cfg, report.schema); });
    report.records_loaded = raw.size();
    const Dataset ds = stage("augment", [&] { return augment_dataset(raw, cfg); });
    report.records = ds.size();
    report.victims = ds.count_label(1);

    report.ranking = stage("rank", [&] { return rank_features(ds, cfg.alpha); });
    const SplitBundle splits = stage("split", [&] { return split_for(ds, cfg); });
    report.split_sizes = {splits.train.size(), splits.test.size(), splits.validation.size()};

    report.elimination =
        stage("eliminate", [&] { return eliminate_features(splits, report.ranking, cfg, report.selection); });

    const auto final_row = std::find_if(report.elimination.begin(), report.elimination.end(), [&](const EliminationRow& r) {
        return r.stage == "backward" && r.features == report.selection;
    });
    report.best = stage("select", [&] {
        return choose_best(splits, *final_row, cfg, report.best_test_accuracy, report.best_test_auc);
    });

    stage("evaluate", [&] {
        for (const auto& spec : cfg.effective_learners()) {
            const auto model = train(spec, splits.train, std::span<const std::size_t>(report.selection));
            report.validation.push_back(evaluate_model(model, splits.validation));
        }
        return 0;
    });

    report.rules = stage("mine", [&] {
        return mine_rules(ds, cfg.apriori, report.factor_map, &report.transactions, &report.frequent_itemsets);
    });

    report.seeds = {{"pipeline", cfg.seed}, {"split", cfg.effective_split_seed()}};
    if (cfg.generator) report.seeds["generator"] = cfg.generator_seed();
    if (report.records != report.records_loaded) report.seeds["smote"] = cfg.smote_seed();
    for (const auto& spec : cfg.effective_learners()) report.seeds[std::string(to_string(spec.kind))] = spec.seed;
    return report;
}

const LearnerEvaluation& PipelineReport::headline() const {
    for (const auto& e : validation)
        if (e.learner == best) return e;
    throw StageError("best learner missing from the validation results");
}

// ---- serialization -------------------------------------------------------------

namespace {

json class_json(const ClassMetrics& m) {
    return {{"label", m.label},
            {"precision", m.precision},
            {"recall", m.recall},
            {"f1", m.f1},
            {"support", m.support},
            {"precision_undefined", m.precision_undefined},
            {"recall_undefined", m.recall_undefined},
            {"f1_undefined", m.f1_undefined}};
}

std::string class_name(int label) { return label == 1 ? "victim" : "non-victim"; }

json roc_json(const RocCurve& curve) {
    json points = json::array();
    for (const auto& p : curve.points)
        points.push_back({{"threshold", std::isinf(p.threshold) ? json("inf") : json(p.threshold)},
                          {"fpr", p.fpr},
                          {"tpr", p.tpr}});
    return points;
}

json names_of(const std::vector<std::size_t>& features, const Schema& schema) {
    json out = json::array();
    for (auto j : features) out.push_back(schema.feature(j).name);
    return out;
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

} // namespace

json evaluation_to_json(const LearnerEvaluation& e) {
    const auto& m = e.metrics;
    json classes = json::object();
    for (const auto& c : m.by_label()) classes[class_name(c.label)] = class_json(c);
    json warnings = json::array();
    if (!e.diagnostics.warning.empty()) warnings.push_back(e.diagnostics.warning);
    return {{"learner", to_string(e.learner)},
            {"accuracy", m.accuracy},
            {"weighted_f1", m.weighted_f1},
            {"tnr", m.tnr},
            {"tnr_undefined", m.tnr_undefined},
            {"auc", e.auc},
            {"classes", classes},
            {"confusion",
             {{"positive", class_name(e.confusion.positive)},
              {"tp", e.confusion.tp},
              {"fn", e.confusion.fn},
              {"fp", e.confusion.fp},
              {"tn", e.confusion.tn}}},
            {"roc", roc_json(e.roc)},
            {"warnings", warnings}};
}

json PipelineReport::to_json() const {
    json doc;
    doc["format_version"] = 1;
    doc["config"] = config;
    doc["seeds"] = seeds;
    doc["dataset"] = {{"records_loaded", records_loaded},
                      {"records", records},
                      {"victims", victims},
                      {"non_victims", records - victims},
                      {"split", {{"train", split_sizes[0]}, {"test", split_sizes[1]}, {"validation", split_sizes[2]}}}};

    json ranks = json::array();
    for (const auto& r : ranking)
        ranks.push_back({{"feature", r.feature},
                         {"statistic", r.statistic},
                         {"dof", r.dof},
                         {"p_value", r.p_value},
                         {"keep", r.keep},
                         {"degenerate", r.degenerate}});
    doc["ranking"] = ranks;

    json rows = json::array();
    for (const auto& row : elimination) {
        json acc = json::object();
        for (const auto& a : row.accuracies) acc[std::string(to_string(a.learner))] = a.accuracy;
        const auto best_it = std::max_element(row.accuracies.begin(), row.accuracies.end(),
                                              [](const LearnerAccuracy& a, const LearnerAccuracy& b) {
                                                  return a.accuracy < b.accuracy;
                                              });
        rows.push_back({{"stage", row.stage},
                        {"n_features", row.features.size()},
                        {"features", names_of(row.features, *schema)},
                        {"accuracy", acc},
                        {"best", to_string(best_it->learner)},
                        {"removed", row.removed ? json(schema->feature(*row.removed).name) : json(nullptr)}});
    }
    doc["elimination"] = rows;
    doc["selection"] = names_of(selection, *schema);

    doc["best"] = {{"learner", to_string(best)},
                   {"n_features", selection.size()},
                   {"test_accuracy", best_test_accuracy},
                   {"test_auc", best_test_auc}};
    json evals = json::array();
    for (const auto& e : validation) evals.push_back(evaluation_to_json(e));
    doc["validation"] = evals;

    json rule_rows = json::array();
    for (const auto& r : rules) {
        json desc = json::array();
        for (int id : r.antecedent) desc.push_back(factor_map.describe(id));
        rule_rows.push_back({{"antecedent", r.antecedent},
                             {"antecedent_text", desc},
                             {"consequent", r.consequent},
                             {"support", r.support},
                             {"confidence", r.confidence},
                             {"lift", r.lift}});
    }
    doc["rules"] = {{"transactions", transactions}, {"frequent_itemsets", frequent_itemsets}, {"rules", rule_rows}};
    return doc;
}

std::string format_ranking_csv(const std::vector<FeatureRank>& ranking) {
    std::string out = "feature,p_value,keep\n";
    for (const auto& r : ranking) out += r.feature + ',' + fmt("%.6e", r.p_value) + ',' + (r.keep ? "1" : "0") + '\n';
    return out;
}

std::string format_elimination_csv(const std::vector<EliminationRow>& rows, const Schema& schema) {
    std::string out = "stage,n_features";
    std::vector<LearnerKind> kinds;
    if (!rows.empty())
        for (const auto& a : rows.front().accuracies) kinds.push_back(a.learner);
    for (auto k : kinds) out += ',' + std::string(to_string(k));
    out += ",best,removed_next,features\n";
    for (const auto& row : rows) {
        out += row.stage + ',' + std::to_string(row.features.size());
        const LearnerAccuracy* best = nullptr;
        for (const auto& a : row.accuracies) {
            out += ',' + fmt("%.2f", 100.0 * a.accuracy);
            if (!best || a.accuracy > best->accuracy) best = &a;
        }
        out += ',' + std::string(best ? to_string(best->learner) : "");
        out += ',' + (row.removed ? schema.feature(*row.removed).name : std::string());
        std::string names;
        for (std::size_t k = 0; k < row.features.size(); ++k)
            names += (k ? ";" : "") + schema.feature(row.features[k]).name;
        out += ',' + csv_field(names) + '\n';
    }
    return out;
}

std::string format_metrics_csv(const std::vector<LearnerEvaluation>& evaluations) {
    std::string out = "learner,class,precision,recall,f1,support,accuracy,auc\n";
    for (const auto& e : evaluations) {
        const auto& m = e.metrics;
        const std::string tail = ',' + fmt("%.2f", 100.0 * m.accuracy) + ',' + fmt("%.2f", e.auc) + '\n';
        double wp = 0.0;
        double wr = 0.0;
        std::size_t n = 0;
        for (const auto& c : m.by_label()) {
            out += std::string(to_string(e.learner)) + ',' + class_name(c.label) + ',' + fmt("%.2f", c.precision) + ',' +
                   fmt("%.2f", c.recall) + ',' + fmt("%.2f", c.f1) + ',' + std::to_string(c.support) + tail;
            wp += static_cast<double>(c.support) * c.precision;
            wr += static_cast<double>(c.support) * c.recall;
            n += c.support;
        }
        const double dn = static_cast<double>(std::max<std::size_t>(n, 1));
        out += std::string(to_string(e.learner)) + ",weighted," + fmt("%.2f", wp / dn) + ',' + fmt("%.2f", wr / dn) +
               ',' + fmt("%.2f", m.weighted_f1) + ',' + std::to_string(n) + tail;
    }
    return out;
}

std::string format_roc_csv(const RocCurve& curve) {
    std::string out = "threshold,fpr,tpr\n";
    for (const auto& p : curve.points)
        out += (std::isinf(p.threshold) ? std::string("inf") : fmt("%.17g", p.threshold)) + ',' + fmt("%.17g", p.fpr) +
               ',' + fmt("%.17g", p.tpr) + '\n';
    return out;
}

std::string format_confusion_csv(const ConfusionMatrix& cm) {
    // Counts per (actual, predicted) pair regardless of which class is positive.
    const bool non_victim_positive = cm.positive == 0;
    const std::size_t nn = non_victim_positive ? cm.tp : cm.tn;
    const std::size_t nv = non_victim_positive ? cm.fn : cm.fp;
    const std::size_t vn = non_victim_positive ? cm.fp : cm.fn;
    const std::size_t vv = non_victim_positive ? cm.tn : cm.tp;
    return "actual,predicted_non_victim,predicted_victim\nnon-victim," + std::to_string(nn) + ',' + std::to_string(nv) +
           "\nvictim," + std::to_string(vn) + ',' + std::to_string(vv) + '\n';
}

void write_text(const std::string& path, const std::string& text) {
    std::error_code ec;
    const auto parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent, ec);
    if (ec) throw IoError(parent.string(), "cannot create directory (" + ec.message() + ")");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    out << text;
    out.flush();
    if (!out) throw IoError(path, "write failed");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string dump_json(const json& doc) { return doc.dump(2) + '\n'; }

void emit_report(const PipelineReport& report, const std::string& dir) {
    // Everything is formatted before the first write so a formatting failure
    // leaves no partial report behind.
    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("report.json", dump_json(report.to_json()));
    files.emplace_back("ranking.csv", format_ranking_csv(report.ranking));
    files.emplace_back("elimination.csv", format_elimination_csv(report.elimination, *report.schema));
    files.emplace_back("metrics.csv", format_metrics_csv(report.validation));
    for (const auto& e : report.validation)
        files.emplace_back("roc_" + std::string(to_string(e.learner)) + ".csv", format_roc_csv(e.roc));
    files.emplace_back("rules.csv", format_rules_csv(report.rules, report.factor_map));
    files.emplace_back("confusion.csv", format_confusion_csv(report.headline().confusion));
    for (const auto& [name, text] : files) write_text((fs::path(dir) / name).string(), text);
}

} // namespace riskminer
