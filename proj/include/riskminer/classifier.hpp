#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "riskminer/dataset.hpp"
#include "riskminer/learners.hpp"

namespace riskminer {

enum class LearnerKind { RF, DT, LR, SVC, GB, GNB };

/// RF, DT, LR, SVC, GB, GNB: the report order and the final tie-break order.
inline constexpr std::array<LearnerKind, 6> kAllLearners{LearnerKind::RF,  LearnerKind::DT, LearnerKind::LR,
                                                         LearnerKind::SVC, LearnerKind::GB, LearnerKind::GNB};

std::string_view to_string(LearnerKind kind);
/// Throws ConfigError for unknown names.
LearnerKind parse_learner(std::string_view name);

/// Learner kind plus its hyperparameters. Defaults:
///   RF  n_estimators=10, max_features=0 (sqrt F), min_samples_split=2, seed 42
///   DT  max_depth=-1 (unlimited), min_samples_split=2, seed 22
///   LR  C=1, max_iter=1000, tol=1e-6, seed 22
///   SVC C=1, degree=3, coef0=0, gamma=0 ("scale"), tol=1e-3, max_passes=10000
///   GB  n_estimators=100, learning_rate=0.1, max_depth=3, min_samples_split=2
///   GNB var_smoothing=1e-9
struct ClassifierSpec {
    LearnerKind kind = LearnerKind::RF;
    std::map<std::string, double> hyperparameters;
    std::uint64_t seed = 0;

    static ClassifierSpec defaults(LearnerKind kind);

    double param(const std::string& key) const;
    /// Replaces known keys; throws ConfigError for unknown keys or values out of range.
    void set(const std::string& key, double value);
    void validate() const;

    nlohmann::json to_json() const;
    static ClassifierSpec from_json(const nlohmann::json& doc);
};

/// A fitted classifier over a fixed, ordered feature list. Immutable after
/// training; score() is P(victim) and predict() is score >= 0.5.
class Model {
public:
    using Parameters =
        std::variant<RandomForestModel, DecisionTreeModel, LogisticModel, SvcModel, BoostingModel, GaussianNbModel>;

    static constexpr int kFormatVersion = 1;

    Model(ClassifierSpec spec, std::vector<std::string> features, Parameters parameters, FitDiagnostics diagnostics);

    LearnerKind kind() const noexcept { return spec_.kind; }
    const ClassifierSpec& spec() const noexcept { return spec_; }
    const std::vector<std::string>& features() const noexcept { return features_; }
    const Parameters& parameters() const noexcept { return parameters_; }
    const FitDiagnostics& diagnostics() const noexcept { return diagnostics_; }

    /// Throws FeatureMismatch unless the record has one value per model feature.
    double score(std::span<const double> record) const;
    double score(std::span<const int> record) const;
    int predict(std::span<const double> record) const { return score(record) >= 0.5 ? 1 : 0; }
    int predict(std::span<const int> record) const { return score(record) >= 0.5 ? 1 : 0; }

    nlohmann::json to_json() const;
    static Model from_json(const nlohmann::json& doc);

private:
    ClassifierSpec spec_;
    std::vector<std::string> features_;
    Parameters parameters_;
    FitDiagnostics diagnostics_;
};

/// Fits on the named columns of `ds`. Throws UnknownFeature, EmptyInput,
/// SingleClass (LR, SVC, GB).
Model train(const ClassifierSpec& spec, const Dataset& ds, std::span<const std::string> features);
Model train(const ClassifierSpec& spec, const Dataset& ds, std::span<const std::size_t> feature_indices);
Model train(const ClassifierSpec& spec, const FeatureMatrix& x, std::span<const int> y,
            std::vector<std::string> feature_names);

/// Scores / labels for every record of `ds`, selecting the model's columns by name.
std::vector<double> score_dataset(const Model& model, const Dataset& ds);
std::vector<int> predict_dataset(const Model& model, const Dataset& ds);
double accuracy(std::span<const int> truth, std::span<const int> predicted);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

} // namespace riskminer
