// riskminer: command-line front end of the cyber-risk analysis pipeline.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "riskminer/errors.hpp"
#include "riskminer/pipeline.hpp"
#include "riskminer/schema.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace riskminer;

namespace {

// Options shared by most subcommands; unset values leave the config untouched.
struct Common {
    std::string config;
    std::string schema;
    std::string input;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha;
    std::string learners;
    std::optional<double> min_support;
    std::optional<double> min_confidence;
    std::optional<std::size_t> max_rules;
    std::optional<std::size_t> min_size;
    std::string out;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

std::uint64_t parse_seed(const std::string& text, const std::string& origin) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used, 10);
        if (used != text.size() || text.front() == '-') throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin + " is not an unsigned integer: '" + text + "'");
    }
}

/// Seed precedence: --seed, then the config file, then RISKMINER_SEED, then the default.
PipelineConfig build_config(const Common& c) {
    json doc = json::object();
    std::string base_dir;
    if (!c.config.empty()) {
        try {
            doc = json::parse(read_text(c.config));
        } catch (const json::parse_error& e) {
            throw ConfigError("config " + c.config + " is not valid JSON: " + e.what());
        }
        if (!doc.is_object()) throw ConfigError("config must be a JSON object");
        base_dir = fs::path(c.config).parent_path().string();
    }
    if (!doc.contains("seed"))
        if (const char* env = std::getenv("RISKMINER_SEED"); env && *env) doc["seed"] = parse_seed(env, "RISKMINER_SEED");
    if (c.seed) doc["seed"] = *c.seed;
    if (c.alpha) doc["alpha"] = *c.alpha;
    if (!c.learners.empty()) doc["learners"] = split_list(c.learners);
    if (c.min_support) doc["apriori"]["min_support"] = *c.min_support;
    if (c.min_confidence) doc["apriori"]["min_confidence"] = *c.min_confidence;
    if (c.max_rules) doc["apriori"]["max_rules"] = *c.max_rules;
    if (c.min_size) doc["elimination"]["min_size"] = *c.min_size;
    if (!c.input.empty()) {
        doc.erase("generator");
        doc.erase("input");
    }
    auto cfg = PipelineConfig::from_json(doc, base_dir);
    if (!c.input.empty()) {
        cfg.input = c.input;
        cfg.generator.reset();
    }
    if (!c.schema.empty()) cfg.schema_path = c.schema;
    cfg.validate();
    return cfg;
}

void add_config(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "JSON pipeline config");
    cmd->add_option("--schema", c.schema, "JSON schema file (default: built-in questionnaire schema)");
    cmd->add_option("--seed", c.seed, "Pipeline seed (overrides config and RISKMINER_SEED)");
}

void add_input(CLI::App* cmd, Common& c, bool required) {
    auto* opt = cmd->add_option("--input", c.input, "Dataset CSV");
    if (required) opt->required();
}

std::vector<std::string> selection_from_file(const std::string& path) {
    try {
        return json::parse(read_text(path)).at("features").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw ConfigError("selection file " + path + " is malformed: " + e.what());
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Cyber-risk survey analysis: augmentation, feature ranking, classifier search, rule mining"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "riskminer 1.0.0");

    Common c;
    std::optional<std::size_t> records;
    std::optional<std::size_t> target_total;
    std::optional<std::size_t> k;
    std::optional<bool> balance;
    std::string learner;
    std::string features;
    std::string selection;
    std::vector<std::string> models;

    auto* generate = app.add_subcommand("generate", "Write a planted-signal synthetic dataset");
    add_config(generate, c);
    generate->add_option("--records", records, "Number of records (overrides the generator spec)");
    generate->add_option("--out", c.out, "Output CSV")->required();

    auto* augment = app.add_subcommand("augment", "Grow a dataset with categorical SMOTE");
    add_config(augment, c);
    add_input(augment, c, true);
    augment->add_option("--target-total", target_total, "Output record count");
    augment->add_option("--k", k, "Neighbours per seed record");
    augment->add_option("--balance", balance, "Balance the classes (true/false)");
    augment->add_option("--out", c.out, "Output CSV")->required();

    auto* rank = app.add_subcommand("rank", "Chi-squared ranking of every feature against the label");
    add_config(rank, c);
    add_input(rank, c, true);
    rank->add_option("--alpha", c.alpha, "Significance level");
    rank->add_option("--out", c.out, "Output CSV (default: stdout)");

    auto* eliminate = app.add_subcommand("eliminate", "Chi-squared filter plus backward elimination");
    add_config(eliminate, c);
    add_input(eliminate, c, true);
    eliminate->add_option("--alpha", c.alpha, "Significance level");
    eliminate->add_option("--learners", c.learners, "Comma-separated learners (RF,DT,LR,SVC,GB,GNB)");
    eliminate->add_option("--min-size", c.min_size, "Smallest feature set to evaluate");
    eliminate->add_option("--out", c.out, "Output directory")->required();

    auto* train_cmd = app.add_subcommand("train", "Fit one learner on the training split");
    add_config(train_cmd, c);
    add_input(train_cmd, c, true);
    train_cmd->add_option("--learner", learner, "RF, DT, LR, SVC, GB or GNB")->required();
    auto* feat_opt = train_cmd->add_option("--features", features, "Comma-separated feature names");
    train_cmd->add_option("--selection", selection, "selection.json written by eliminate")->excludes(feat_opt);
    train_cmd->add_option("--out", c.out, "Output model JSON")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Metrics and ROC data of saved models on the validation split");
    add_config(evaluate, c);
    add_input(evaluate, c, true);
    evaluate->add_option("--model", models, "Model JSON (repeatable)")->required();
    evaluate->add_option("--out", c.out, "Output directory")->required();

    auto* mine = app.add_subcommand("mine", "Apriori victim rules over the dissolved risk factors");
    add_config(mine, c);
    add_input(mine, c, true);
    mine->add_option("--min-support", c.min_support, "Minimum itemset support");
    mine->add_option("--min-confidence", c.min_confidence, "Minimum rule confidence");
    mine->add_option("--max-rules", c.max_rules, "Rule cap");
    mine->add_option("--out", c.out, "Output CSV (default: stdout)");

    auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write the report files");
    add_config(pipeline, c);
    add_input(pipeline, c, false);
    pipeline->add_option("--out", c.out, "Output directory (overrides config)");
    pipeline->add_option("--alpha", c.alpha, "Significance level");
    pipeline->add_option("--learners", c.learners, "Comma-separated learners (RF,DT,LR,SVC,GB,GNB)");
    pipeline->add_option("--min-support", c.min_support, "Minimum itemset support");
    pipeline->add_option("--min-confidence", c.min_confidence, "Minimum rule confidence");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (*generate) {
        auto cfg = build_config(c);
        if (!cfg.generator) throw ConfigError("generate needs a generator spec, not an input file");
        if (records) cfg.generator->n_records = *records;
        const auto ds = acquire_dataset(cfg, load_config_schema(cfg));
        write_csv(ds, c.out);
        return 0;
    }
    if (*augment) {
        auto cfg = build_config(c);
        if (target_total) cfg.smote.target_total = *target_total;
        if (k) cfg.smote.k = *k;
        if (balance) cfg.smote.balance = *balance;
        cfg.validate();
        const auto ds = acquire_dataset(cfg, load_config_schema(cfg));
        write_csv(augment_dataset(ds, cfg), c.out);
        return 0;
    }
    if (*rank) {
        const auto cfg = build_config(c);
        const auto ds = acquire_dataset(cfg, load_config_schema(cfg));
        const auto text = format_ranking_csv(rank_features(ds, cfg.alpha));
        if (c.out.empty())
            std::cout << text;
        else
            write_text(c.out, text);
        return 0;
    }
    if (*eliminate) {
        const auto cfg = build_config(c);
        const auto ds = acquire_dataset(cfg, load_config_schema(cfg));
        const auto ranking = rank_features(ds, cfg.alpha);
        const auto splits = split_for(ds, cfg);
        std::vector<std::size_t> chosen;
        const auto rows = eliminate_features(splits, ranking, cfg, chosen);
        json names = json::array();
        for (auto j : chosen) names.push_back(ds.schema().feature(j).name);
        write_text((fs::path(c.out) / "ranking.csv").string(), format_ranking_csv(ranking));
        write_text((fs::path(c.out) / "elimination.csv").string(), format_elimination_csv(rows, ds.schema()));
        write_text((fs::path(c.out) / "selection.json").string(), dump_json({{"features", names}}));
        return 0;
    }
    if (*train_cmd) {
        const auto cfg = build_config(c);
        const auto kind = parse_learner(learner);
        ClassifierSpec spec = ClassifierSpec::defaults(kind);
        for (const auto& s : cfg.effective_learners())
            if (s.kind == kind) spec = s;
        const auto names = selection.empty() ? split_list(features) : selection_from_file(selection);
        const auto ds = acquire_dataset(cfg, load_config_schema(cfg));
        const auto splits = split_for(ds, cfg);
        std::vector<std::string> use = names;
        if (use.empty())
            for (std::size_t j = 0; j < ds.feature_count(); ++j) use.push_back(ds.schema().feature(j).name);
        save_model(train(spec, splits.train, std::span<const std::string>(use)), c.out);
        return 0;
    }
    if (*evaluate) {
        const auto cfg = build_config(c);
        const auto ds = acquire_dataset(cfg, load_config_schema(cfg));
        const auto splits = split_for(ds, cfg);
        std::vector<LearnerEvaluation> evals;
        json docs = json::array();
        for (const auto& path : models) {
            evals.push_back(evaluate_model(load_model(path), splits.validation));
            docs.push_back(evaluation_to_json(evals.back()));
        }
        const fs::path dir(c.out);
        write_text((dir / "metrics.json").string(), dump_json(docs));
        write_text((dir / "metrics.csv").string(), format_metrics_csv(evals));
        for (const auto& e : evals)
            write_text((dir / ("roc_" + std::string(to_string(e.learner)) + ".csv")).string(), format_roc_csv(e.roc));
        write_text((dir / "confusion.csv").string(), format_confusion_csv(evals.front().confusion));
        return 0;
    }
    if (*mine) {
        const auto cfg = build_config(c);
        const auto ds = acquire_dataset(cfg, load_config_schema(cfg));
        const auto& fm = FactorMap::standard();
        const auto text = format_rules_csv(mine_rules(ds, cfg.apriori, fm), fm);
        if (c.out.empty())
            std::cout << text;
        else
            write_text(c.out, text);
        return 0;
    }
    if (*pipeline) {
        auto cfg = build_config(c);
        if (!c.out.empty()) cfg.output_dir = c.out;
        const auto report = run_pipeline(cfg);
        emit_report(report, cfg.output_dir);
        const auto& h = report.headline();
        std::cout << "best " << to_string(report.best) << " on " << report.selection.size()
                  << " features: validation accuracy " << h.metrics.accuracy << ", AUC " << h.auc << ", "
                  << report.rules.size() << " rules; report in " << cfg.output_dir << '\n';
        return 0;
    }
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "riskminer: error: " << e.what() << '\n';
        switch (e.category()) {
        case Error::Category::Config: return 2;
        case Error::Category::Data: return 3;
        case Error::Category::Stage: return 4;
        }
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "riskminer: error: " << e.what() << '\n';
        return 4;
    }
}
