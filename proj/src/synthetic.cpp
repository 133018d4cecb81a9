#include "riskminer/synthetic.hpp"

#include <algorithm>
#include <set>

#include "riskminer/errors.hpp"
#include "riskminer/random.hpp"

namespace riskminer {

namespace {

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

/// P(feature == value | label) that yields P(victim | feature == value) =
/// p_victim at the given prevalence and base rate.
double conditional_rate(const PlantedFactor& f, double balance, int label) {
    return label == 1 ? f.p_victim * f.prevalence / balance : (1.0 - f.p_victim) * f.prevalence / (1.0 - balance);
}

double residual_victim_rate(const GenSpec& spec) {
    if (!spec.planted_rule) return spec.class_balance;
    const auto& r = *spec.planted_rule;
    return (spec.class_balance - r.prevalence * r.p_victim) / (1.0 - r.prevalence);
}

int draw_other(const FeatureSpec& f, int excluded, Rng& rng) {
    std::vector<int> others;
    for (int v : f.values)
        if (v != excluded) others.push_back(v);
    return others[rng.below(others.size())];
}

int draw_uniform(const FeatureSpec& f, Rng& rng) { return f.values[rng.below(f.values.size())]; }

} // namespace

void GenSpec::validate(const Schema& schema) const {
    if (n_records == 0) throw ConfigError("generator: n_records must be positive");
    if (!(class_balance > 0.0 && class_balance < 1.0)) throw ConfigError("generator: class_balance must lie in (0,1)");
    std::set<std::string> used;
    for (const auto& f : planted_factors) {
        const auto& spec = schema.feature(schema.index_of(f.feature));
        if (!spec.accepts(f.value)) throw ConfigError("generator: illegal value for '" + f.feature + "'");
        if (spec.values.size() < 2) throw ConfigError("generator: '" + f.feature + "' has a single level");
        if (!used.insert(f.feature).second) throw ConfigError("generator: '" + f.feature + "' planted twice");
        if (!in_unit(f.p_victim) || !(f.prevalence > 0.0 && f.prevalence <= 1.0))
            throw ConfigError("generator: probabilities for '" + f.feature + "' out of range");
        if (!in_unit(conditional_rate(f, class_balance, 0)) || !in_unit(conditional_rate(f, class_balance, 1)))
            throw ConfigError("generator: factor '" + f.feature + "' is unattainable at this class balance");
    }
    if (planted_rule) {
        const auto& r = *planted_rule;
        if (r.conditions.empty()) throw ConfigError("generator: planted rule has no conditions");
        bool all_single_valued = true;
        for (const auto& c : r.conditions) {
            const auto& spec = schema.feature(schema.index_of(c.feature));
            if (!spec.accepts(c.value)) throw ConfigError("generator: illegal value for '" + c.feature + "'");
            if (!used.insert(c.feature).second)
                throw ConfigError("generator: '" + c.feature + "' used by more than one planted signal");
            all_single_valued = all_single_valued && spec.values.size() < 2;
        }
        if (all_single_valued) throw ConfigError("generator: planted rule cannot be avoided");
        if (!in_unit(r.p_victim) || !(r.prevalence > 0.0 && r.prevalence < 1.0))
            throw ConfigError("generator: planted rule probabilities out of range");
        if (!in_unit(residual_victim_rate(*this)))
            throw ConfigError("generator: planted rule is incompatible with class_balance");
    }
}

nlohmann::json GenSpec::to_json() const {
    nlohmann::json factors = nlohmann::json::array();
    for (const auto& f : planted_factors)
        factors.push_back(
            {{"feature", f.feature}, {"value", f.value}, {"p_victim", f.p_victim}, {"prevalence", f.prevalence}});
    nlohmann::json doc{{"n_records", n_records},
                       {"class_balance", class_balance},
                       {"planted_factors", std::move(factors)},
                       {"seed", seed}};
    if (planted_rule) {
        nlohmann::json conds = nlohmann::json::array();
        for (const auto& c : planted_rule->conditions) conds.push_back({{"feature", c.feature}, {"value", c.value}});
        doc["planted_rule"] = {{"conditions", std::move(conds)},
                               {"p_victim", planted_rule->p_victim},
                               {"prevalence", planted_rule->prevalence}};
    }
    return doc;
}

GenSpec GenSpec::from_json(const nlohmann::json& doc) {
    try {
        GenSpec spec;
        spec.n_records = doc.value("n_records", spec.n_records);
        spec.class_balance = doc.value("class_balance", spec.class_balance);
        spec.seed = doc.value("seed", spec.seed);
        for (const auto& f : doc.value("planted_factors", nlohmann::json::array())) {
            PlantedFactor p;
            p.feature = f.at("feature").get<std::string>();
            p.value = f.value("value", p.value);
            p.p_victim = f.value("p_victim", p.p_victim);
            p.prevalence = f.value("prevalence", p.prevalence);
            spec.planted_factors.push_back(std::move(p));
        }
        if (doc.contains("planted_rule") && !doc["planted_rule"].is_null()) {
            const auto& r = doc["planted_rule"];
            PlantedRule rule;
            for (const auto& c : r.at("conditions"))
                rule.conditions.push_back({c.at("feature").get<std::string>(), c.value("value", 1)});
            rule.p_victim = r.value("p_victim", rule.p_victim);
            rule.prevalence = r.value("prevalence", rule.prevalence);
            spec.planted_rule = std::move(rule);
        }
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed generator spec: ") + e.what());
    }
}

Dataset generate_synthetic(const GenSpec& spec, std::shared_ptr<const Schema> schema) {
    spec.validate(*schema);
    const std::size_t width = schema->size();

    // Per-feature role: -1 noise, otherwise index into planted_factors; rule
    // features are tracked separately.
    std::vector<int> factor_of(width, -1);
    for (std::size_t k = 0; k < spec.planted_factors.size(); ++k)
        factor_of[schema->index_of(spec.planted_factors[k].feature)] = static_cast<int>(k);
    std::vector<std::pair<std::size_t, int>> rule_conditions;
    std::vector<bool> is_rule(width, false);
    if (spec.planted_rule)
        for (const auto& c : spec.planted_rule->conditions) {
            const auto j = schema->index_of(c.feature);
            rule_conditions.emplace_back(j, c.value);
            is_rule[j] = true;
        }
    const double residual = residual_victim_rate(spec);

    Rng rng(spec.seed);
    std::vector<int> values(spec.n_records * width);
    std::vector<int> labels(spec.n_records);
    for (std::size_t i = 0; i < spec.n_records; ++i) {
        int* row = values.data() + i * width;
        const bool in_rule = spec.planted_rule && rng.bernoulli(spec.planted_rule->prevalence);
        const int label = rng.bernoulli(in_rule ? spec.planted_rule->p_victim : residual) ? 1 : 0;
        labels[i] = label;
        for (std::size_t j = 0; j < width; ++j) {
            const auto& f = schema->feature(j);
            if (factor_of[j] >= 0) {
                const auto& pf = spec.planted_factors[static_cast<std::size_t>(factor_of[j])];
                row[j] = rng.bernoulli(conditional_rate(pf, spec.class_balance, label)) ? pf.value
                                                                                         : draw_other(f, pf.value, rng);
            } else if (!is_rule[j]) {
                row[j] = draw_uniform(f, rng);
            }
        }
        if (in_rule) {
            for (auto [j, v] : rule_conditions) row[j] = v;
        } else if (spec.planted_rule) {
            // Records outside the rule never satisfy the full conjunction, so
            // P(victim | conjunction) is the planted rate.
            bool holds = true;
            do {
                holds = true;
                for (auto [j, v] : rule_conditions) {
                    row[j] = draw_uniform(schema->feature(j), rng);
                    holds = holds && row[j] == v;
                }
            } while (holds);
        }
    }
    return Dataset(std::move(schema), std::move(values), std::move(labels));
}

GenSpec planted_signal_spec(std::size_t n_records, std::uint64_t seed) {
    GenSpec spec;
    spec.n_records = n_records;
    spec.class_balance = 0.5;
    spec.seed = seed;
    for (const char* name : {"shared-internet-account-access", "sharing-private-information-on-the-internet",
                             "clicked-on-spam-email-links", "lost-money-by-purchasing-online-commodities",
                             "accessed-VPN"})
        spec.planted_factors.push_back({name, 1, 0.9, 0.5});
    spec.planted_rule = PlantedRule{{{"compulsive-buyer", 1},
                                     {"download-unauthorized-software", 1},
                                     {"installed-malicious-software", 1}},
                                    0.9,
                                    0.4};
    return spec;
}

} // namespace riskminer
