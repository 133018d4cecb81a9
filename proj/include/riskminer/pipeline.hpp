#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskminer/chi_squared.hpp"
#include "riskminer/classifier.hpp"
#include "riskminer/dataset.hpp"
#include "riskminer/elimination.hpp"
#include "riskminer/metrics.hpp"
#include "riskminer/rules.hpp"
#include "riskminer/split.hpp"
#include "riskminer/synthetic.hpp"

namespace riskminer {

inline constexpr std::uint64_t kDefaultSeed = 42;

struct SmoteSettings {
    std::size_t k = 5;
    std::size_t target_total = 3286; // 0 or the current size: no augmentation
    bool balance = true;
    std::optional<std::uint64_t> seed; // derived from the pipeline seed when unset
};

struct AprioriSettings {
    double min_support = 0.25;
    double min_confidence = 0.8;
    std::size_t max_rules = 10000;
};

/// Everything a run depends on. Exactly one of `input` and `generator` is set.
struct PipelineConfig {
    std::optional<std::string> input;
    std::optional<GenSpec> generator;
    bool generator_seed_explicit = false;
    std::optional<std::string> schema_path;
    std::uint64_t seed = kDefaultSeed;
    SmoteSettings smote;
    double alpha = 0.05;
    SplitRatios ratios;
    bool stratified = true;
    std::optional<std::uint64_t> split_seed;
    std::vector<ClassifierSpec> learners; // all six with defaults when empty
    std::size_t min_size = 1;
    AprioriSettings apriori;
    std::string output_dir = "riskminer-out";
    unsigned threads = 0; // 0: hardware concurrency

    /// Defaults: 700 planted-signal records grown to 3286 by balanced SMOTE.
    static PipelineConfig defaults();

    /// Relative input and schema paths resolve against `base_dir`. Throws ConfigError.
    static PipelineConfig from_json(const nlohmann::json& doc, const std::string& base_dir = "");
    static PipelineConfig load(const std::string& path);
    nlohmann::json to_json() const;

    /// Throws ConfigError for inconsistent settings.
    void validate() const;

    std::vector<ClassifierSpec> effective_learners() const;
    std::uint64_t generator_seed() const;
    std::uint64_t smote_seed() const;
    std::uint64_t effective_split_seed() const;
};

/// One elimination table row: a feature set and every learner's test accuracy.
/// Stage "chi2-filter" rows drop the chi-squared rejects one at a time (largest
/// p first); "backward" rows are the wrapper search over the survivors.
struct EliminationRow {
    std::string stage;
    std::vector<std::size_t> features;
    std::vector<LearnerAccuracy> accuracies;
    std::optional<std::size_t> removed; // dropped to reach the next row
};

struct LearnerEvaluation {
    LearnerKind learner;
    ConfusionMatrix confusion;
    MetricsReport metrics;
    RocCurve roc;
    double auc = 0.0;
    FitDiagnostics diagnostics;
};

struct PipelineReport {
    nlohmann::json config;
    std::map<std::string, std::uint64_t> seeds;
    std::shared_ptr<const Schema> schema;
    std::size_t records_loaded = 0;
    std::size_t records = 0;
    std::size_t victims = 0;
    std::array<std::size_t, 3> split_sizes{};
    std::vector<FeatureRank> ranking;
    std::vector<EliminationRow> elimination;
    std::vector<std::size_t> selection;
    LearnerKind best = LearnerKind::RF;
    double best_test_accuracy = 0.0;
    double best_test_auc = 0.0;
    std::vector<LearnerEvaluation> validation; // learner order of the config
    std::size_t transactions = 0;
    std::size_t frequent_itemsets = 0;
    std::vector<Rule> rules;
    FactorMap factor_map = FactorMap::standard();

    const LearnerEvaluation& headline() const;
    nlohmann::json to_json() const;
};

// Stages, shared by `pipeline` and the single-step subcommands.
std::shared_ptr<const Schema> load_config_schema(const PipelineConfig& cfg);
Dataset acquire_dataset(const PipelineConfig& cfg, std::shared_ptr<const Schema> schema);
Dataset augment_dataset(const Dataset& ds, const PipelineConfig& cfg);
SplitBundle split_for(const Dataset& ds, const PipelineConfig& cfg);
std::vector<EliminationRow> eliminate_features(const SplitBundle& splits, const std::vector<FeatureRank>& ranking,
                                               const PipelineConfig& cfg, std::vector<std::size_t>& selection);
/// Best learner on the final selection: test accuracy, then test AUC, then list order.
LearnerKind choose_best(const SplitBundle& splits, const EliminationRow& final_row, const PipelineConfig& cfg,
                        double& test_accuracy, double& test_auc);
LearnerEvaluation evaluate_model(const Model& model, const Dataset& ds);
std::vector<Rule> mine_rules(const Dataset& ds, const AprioriSettings& settings, const FactorMap& fm,
                             std::size_t* transactions = nullptr, std::size_t* frequent = nullptr);

/// Runs every stage in order. Failures are rethrown with the stage name and
/// keep their error category.
PipelineReport run_pipeline(const PipelineConfig& cfg);

/// Writes report.json, ranking.csv, elimination.csv, metrics.csv,
/// roc_<learner>.csv, rules.csv and confusion.csv into `dir`. Throws IoError.
void emit_report(const PipelineReport& report, const std::string& dir);

// File formats, also used by the single-step subcommands.
std::string format_ranking_csv(const std::vector<FeatureRank>& ranking);
std::string format_elimination_csv(const std::vector<EliminationRow>& rows, const Schema& schema);
std::string format_metrics_csv(const std::vector<LearnerEvaluation>& evaluations);
std::string format_roc_csv(const RocCurve& curve);
/// Fig-style layout: rows are actual classes, columns predicted classes.
std::string format_confusion_csv(const ConfusionMatrix& cm);
nlohmann::json evaluation_to_json(const LearnerEvaluation& e);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
/// Deterministic JSON text: sorted keys, two-space indent, trailing newline.
std::string dump_json(const nlohmann::json& doc);

} // namespace riskminer
