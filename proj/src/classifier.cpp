#include "riskminer/classifier.hpp"

#include <cmath>
#include <fstream>

#include "riskminer/errors.hpp"
#include "riskminer/feature_matrix.hpp"

namespace riskminer {

std::string_view to_string(LearnerKind kind) {
    switch (kind) {
    case LearnerKind::RF: return "RF";
    case LearnerKind::DT: return "DT";
    case LearnerKind::LR: return "LR";
    case LearnerKind::SVC: return "SVC";
    case LearnerKind::GB: return "GB";
    case LearnerKind::GNB: return "GNB";
    }
    return "RF";
}

LearnerKind parse_learner(std::string_view name) {
    for (auto k : kAllLearners)
        if (to_string(k) == name) return k;
    throw ConfigError("unknown learner '" + std::string(name) + "' (expected RF, DT, LR, SVC, GB or GNB)");
}

namespace {

struct Range {
    double lo;
    double hi;
    bool integral;
};

/// Legal range of every hyperparameter per kind.
const std::map<std::string, Range>& ranges(LearnerKind kind) {
    static const std::map<LearnerKind, std::map<std::string, Range>> table{
        {LearnerKind::RF, {{"n_estimators", {1, 10000, true}}, {"max_features", {0, 1e6, true}},
                           {"min_samples_split", {2, 1e9, true}}}},
        {LearnerKind::DT, {{"max_depth", {-1, 1e6, true}}, {"min_samples_split", {2, 1e9, true}}}},
        {LearnerKind::LR, {{"C", {1e-12, 1e12, false}}, {"max_iter", {1, 1e9, true}}, {"tol", {0, 1, false}}}},
        {LearnerKind::SVC, {{"C", {1e-12, 1e12, false}}, {"degree", {1, 10, true}}, {"coef0", {-1e6, 1e6, false}},
                            {"gamma", {0, 1e6, false}}, {"tol", {1e-15, 1, false}},
                            {"max_passes", {1, 1e9, true}}}},
        {LearnerKind::GB, {{"n_estimators", {1, 100000, true}}, {"learning_rate", {1e-9, 10, false}},
                           {"max_depth", {1, 64, true}}, {"min_samples_split", {2, 1e9, true}}}},
        {LearnerKind::GNB, {{"var_smoothing", {0, 1, false}}}},
    };
    return table.at(kind);
}

template <class T>
T as(double v) {
    return static_cast<T>(std::llround(v));
}

} // namespace

ClassifierSpec ClassifierSpec::defaults(LearnerKind kind) {
    ClassifierSpec s;
    s.kind = kind;
    switch (kind) {
    case LearnerKind::RF:
        s.hyperparameters = {{"n_estimators", 10}, {"max_features", 0}, {"min_samples_split", 2}};
        s.seed = 42;
        break;
    case LearnerKind::DT:
        s.hyperparameters = {{"max_depth", -1}, {"min_samples_split", 2}};
        s.seed = 22;
        break;
    case LearnerKind::LR:
        s.hyperparameters = {{"C", 1.0}, {"max_iter", 1000}, {"tol", 1e-6}};
        s.seed = 22;
        break;
    case LearnerKind::SVC:
        s.hyperparameters = {{"C", 1.0}, {"degree", 3}, {"coef0", 0.0}, {"gamma", 0.0}, {"tol", 1e-3},
                             {"max_passes", 10000}};
        break;
    case LearnerKind::GB:
        s.hyperparameters = {{"n_estimators", 100}, {"learning_rate", 0.1}, {"max_depth", 3}, {"min_samples_split", 2}};
        break;
    case LearnerKind::GNB: s.hyperparameters = {{"var_smoothing", 1e-9}}; break;
    }
    return s;
}

double ClassifierSpec::param(const std::string& key) const {
    const auto it = hyperparameters.find(key);
    if (it == hyperparameters.end())
        throw ConfigError("learner " + std::string(to_string(kind)) + " has no hyperparameter '" + key + "'");
    return it->second;
}

void ClassifierSpec::set(const std::string& key, double value) {
    if (!ranges(kind).contains(key))
        throw ConfigError("learner " + std::string(to_string(kind)) + " has no hyperparameter '" + key + "'");
    hyperparameters[key] = value;
    validate();
}

void ClassifierSpec::validate() const {
    const auto& r = ranges(kind);
    for (const auto& [key, value] : hyperparameters) {
        const auto it = r.find(key);
        if (it == r.end())
            throw ConfigError("learner " + std::string(to_string(kind)) + " has no hyperparameter '" + key + "'");
        const auto& range = it->second;
        if (!(value >= range.lo && value <= range.hi) || (range.integral && value != std::round(value)))
            throw ConfigError("hyperparameter " + std::string(to_string(kind)) + "." + key + " = " +
                              std::to_string(value) + " is out of range");
    }
    for (const auto& [key, range] : r)
        if (!hyperparameters.contains(key))
            throw ConfigError("learner " + std::string(to_string(kind)) + " is missing hyperparameter '" + key + "'");
}

nlohmann::json ClassifierSpec::to_json() const {
    return {{"kind", to_string(kind)}, {"hyperparameters", hyperparameters}, {"seed", seed}};
}

ClassifierSpec ClassifierSpec::from_json(const nlohmann::json& doc) {
    try {
        auto spec = defaults(parse_learner(doc.at("kind").get<std::string>()));
        if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("hyperparameters"))
            for (const auto& [key, value] : doc["hyperparameters"].items()) spec.set(key, value.get<double>());
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed learner spec: ") + e.what());
    }
}

Model::Model(ClassifierSpec spec, std::vector<std::string> features, Parameters parameters, FitDiagnostics diagnostics)
    : spec_(std::move(spec)), features_(std::move(features)), parameters_(std::move(parameters)),
      diagnostics_(std::move(diagnostics)) {}

double Model::score(std::span<const double> record) const {
    if (record.size() != features_.size())
        throw FeatureMismatch("model expects " + std::to_string(features_.size()) + " features, record has " +
                              std::to_string(record.size()));
    return std::visit([&](const auto& m) { return m.score(record); }, parameters_);
}

double Model::score(std::span<const int> record) const {
    std::vector<double> x(record.begin(), record.end());
    return score(std::span<const double>(x));
}

namespace {

nlohmann::json matrix_json(const FeatureMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        const auto r = m.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return rows;
}

FeatureMatrix matrix_from_json(const nlohmann::json& doc, std::size_t cols) {
    FeatureMatrix m(doc.size(), cols);
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto r = doc[i].get<std::vector<double>>();
        if (r.size() != cols) throw DataError("support vector width mismatch");
        std::copy(r.begin(), r.end(), m.row(i).begin());
    }
    return m;
}

nlohmann::json trees_json(const std::vector<Tree>& trees) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& t : trees) out.push_back(t.to_json());
    return out;
}

std::vector<Tree> trees_from_json(const nlohmann::json& doc) {
    std::vector<Tree> out;
    for (const auto& t : doc) out.push_back(Tree::from_json(t));
    return out;
}

struct ParametersToJson {
    nlohmann::json operator()(const RandomForestModel& m) const { return {{"trees", trees_json(m.trees)}}; }
    nlohmann::json operator()(const DecisionTreeModel& m) const { return {{"tree", m.tree.to_json()}}; }
    nlohmann::json operator()(const LogisticModel& m) const { return {{"weights", m.weights}, {"bias", m.bias}}; }
    nlohmann::json operator()(const SvcModel& m) const {
        return {{"gamma", m.gamma},
                {"coef0", m.coef0},
                {"degree", m.degree},
                {"rho", m.rho},
                {"dual_coef", m.dual_coef},
                {"alphas", m.alphas},
                {"support_indices", m.support_indices},
                {"support_vectors", matrix_json(m.support_vectors)}};
    }
    nlohmann::json operator()(const BoostingModel& m) const {
        return {{"init_raw", m.init_raw}, {"learning_rate", m.learning_rate}, {"trees", trees_json(m.trees)}};
    }
    nlohmann::json operator()(const GaussianNbModel& m) const {
        return {{"classes", m.classes},
                {"log_prior", m.log_prior},
                {"mean", m.mean},
                {"variance", m.variance},
                {"epsilon", m.epsilon}};
    }
};

Model::Parameters parameters_from_json(LearnerKind kind, const nlohmann::json& p, std::size_t width) {
    switch (kind) {
    case LearnerKind::RF: return RandomForestModel{trees_from_json(p.at("trees"))};
    case LearnerKind::DT: return DecisionTreeModel{Tree::from_json(p.at("tree"))};
    case LearnerKind::LR: return LogisticModel{p.at("weights").get<std::vector<double>>(), p.at("bias").get<double>()};
    case LearnerKind::SVC: {
        SvcModel m;
        m.gamma = p.at("gamma").get<double>();
        m.coef0 = p.at("coef0").get<double>();
        m.degree = p.at("degree").get<int>();
        m.rho = p.at("rho").get<double>();
        m.dual_coef = p.at("dual_coef").get<std::vector<double>>();
        m.alphas = p.at("alphas").get<std::vector<double>>();
        m.support_indices = p.at("support_indices").get<std::vector<std::size_t>>();
        m.support_vectors = matrix_from_json(p.at("support_vectors"), width);
        return m;
    }
    case LearnerKind::GB: {
        BoostingModel m;
        m.init_raw = p.at("init_raw").get<double>();
        m.learning_rate = p.at("learning_rate").get<double>();
        m.trees = trees_from_json(p.at("trees"));
        return m;
    }
    case LearnerKind::GNB: {
        GaussianNbModel m;
        m.classes = p.at("classes").get<std::vector<int>>();
        m.log_prior = p.at("log_prior").get<std::vector<double>>();
        m.mean = p.at("mean").get<std::vector<std::vector<double>>>();
        m.variance = p.at("variance").get<std::vector<std::vector<double>>>();
        m.epsilon = p.at("epsilon").get<double>();
        return m;
    }
    }
    throw DataError("unknown model kind");
}

} // namespace

nlohmann::json Model::to_json() const {
    return {{"format_version", kFormatVersion},
            {"kind", to_string(spec_.kind)},
            {"seed", spec_.seed},
            {"hyperparameters", spec_.hyperparameters},
            {"features", features_},
            {"diagnostics",
             {{"converged", diagnostics_.converged},
              {"iterations", diagnostics_.iterations},
              {"warning", diagnostics_.warning}}},
            {"parameters", std::visit(ParametersToJson{}, parameters_)}};
}

Model Model::from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format_version").get<int>() != kFormatVersion)
            throw DataError("unsupported model format version " + doc["format_version"].dump());
        auto spec = ClassifierSpec::from_json(doc);
        auto features = doc.at("features").get<std::vector<std::string>>();
        FitDiagnostics diag;
        if (doc.contains("diagnostics")) {
            diag.converged = doc["diagnostics"].value("converged", true);
            diag.iterations = doc["diagnostics"].value("iterations", std::size_t{0});
            diag.warning = doc["diagnostics"].value("warning", std::string{});
        }
        auto params = parameters_from_json(spec.kind, doc.at("parameters"), features.size());
        return Model(std::move(spec), std::move(features), std::move(params), std::move(diag));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model artifact: ") + e.what());
    }
}

Model train(const ClassifierSpec& spec, const FeatureMatrix& x, std::span<const int> y,
            std::vector<std::string> feature_names) {
    spec.validate();
    if (x.rows == 0) throw EmptyInput(std::string(to_string(spec.kind)) + ": no training records");
    if (x.cols == 0) throw EmptyInput(std::string(to_string(spec.kind)) + ": no features");
    FitDiagnostics diag;
    Model::Parameters params;
    switch (spec.kind) {
    case LearnerKind::RF: {
        RandomForestParams p;
        p.n_estimators = as<std::size_t>(spec.param("n_estimators"));
        p.max_features = as<std::size_t>(spec.param("max_features"));
        p.min_samples_split = as<std::size_t>(spec.param("min_samples_split"));
        p.seed = spec.seed;
        params = fit_random_forest(x, y, p);
        break;
    }
    case LearnerKind::DT: {
        DecisionTreeParams p;
        p.max_depth = as<int>(spec.param("max_depth"));
        p.min_samples_split = as<std::size_t>(spec.param("min_samples_split"));
        params = fit_decision_tree(x, y, p);
        break;
    }
    case LearnerKind::LR: {
        LogisticParams p;
        p.c = spec.param("C");
        p.max_iter = as<std::size_t>(spec.param("max_iter"));
        p.tol = spec.param("tol");
        params = fit_logistic(x, y, p, diag);
        break;
    }
    case LearnerKind::SVC: {
        SvcParams p;
        p.c = spec.param("C");
        p.degree = as<int>(spec.param("degree"));
        p.coef0 = spec.param("coef0");
        p.gamma = spec.param("gamma");
        p.tol = spec.param("tol");
        p.max_passes = as<std::size_t>(spec.param("max_passes"));
        params = fit_svc(x, y, p, diag);
        break;
    }
    case LearnerKind::GB: {
        BoostingParams p;
        p.n_estimators = as<std::size_t>(spec.param("n_estimators"));
        p.learning_rate = spec.param("learning_rate");
        p.max_depth = as<int>(spec.param("max_depth"));
        p.min_samples_split = as<std::size_t>(spec.param("min_samples_split"));
        params = fit_boosting(x, y, p, diag);
        break;
    }
    case LearnerKind::GNB: {
        GaussianNbParams p;
        p.var_smoothing = spec.param("var_smoothing");
        params = fit_gaussian_nb(x, y, p);
        break;
    }
    }
    return Model(spec, std::move(feature_names), std::move(params), std::move(diag));
}

Model train(const ClassifierSpec& spec, const Dataset& ds, std::span<const std::size_t> feature_indices) {
    std::vector<std::string> names;
    for (auto j : feature_indices) names.push_back(ds.schema().feature(j).name);
    const auto x = project(ds, feature_indices);
    return train(spec, x, ds.labels(), std::move(names));
}

Model train(const ClassifierSpec& spec, const Dataset& ds, std::span<const std::string> features) {
    std::vector<std::size_t> idx;
    for (const auto& f : features) idx.push_back(ds.schema().index_of(f));
    return train(spec, ds, std::span<const std::size_t>(idx));
}

std::vector<double> score_dataset(const Model& model, const Dataset& ds) {
    std::vector<std::size_t> idx;
    for (const auto& f : model.features()) idx.push_back(ds.schema().index_of(f));
    const auto x = project(ds, idx);
    std::vector<double> out(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) out[i] = model.score(x.row(i));
    return out;
}

std::vector<int> predict_dataset(const Model& model, const Dataset& ds) {
    const auto scores = score_dataset(model, ds);
    std::vector<int> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= 0.5 ? 1 : 0;
    return out;
}

double accuracy(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size()) throw LengthMismatch("accuracy: length mismatch");
    if (truth.empty()) throw EmptyInput("accuracy of nothing");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

void save_model(const Model& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot write model");
    out << model.to_json().dump(1) << '\n';
    if (!out) throw IoError(path, "write failed");
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open model");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("cannot parse model " + path + ": " + e.what());
    }
    return Model::from_json(doc);
}

} // namespace riskminer
