#include "riskminer/schema.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "riskminer/errors.hpp"

namespace riskminer {

std::string_view to_string(FeatureKind kind) {
    switch (kind) {
    case FeatureKind::Binary: return "binary";
    case FeatureKind::Discrete: return "discrete";
    case FeatureKind::Ordinal: return "ordinal";
    }
    return "binary";
}

FeatureKind parse_feature_kind(std::string_view text) {
    if (text == "binary") return FeatureKind::Binary;
    if (text == "discrete") return FeatureKind::Discrete;
    if (text == "ordinal") return FeatureKind::Ordinal;
    throw SchemaError("unknown feature kind '" + std::string(text) + "'");
}

bool FeatureSpec::accepts(int value) const {
    return std::binary_search(values.begin(), values.end(), value);
}

Schema::Schema(std::vector<FeatureSpec> features, std::string goal)
    : features_(std::move(features)), goal_(std::move(goal)) {
    if (features_.empty()) throw SchemaError("schema has no features");
    if (goal_.empty()) throw SchemaError("schema goal name is empty");
    std::set<std::string> seen;
    for (auto& f : features_) {
        if (f.name.empty()) throw SchemaError("feature with empty name");
        if (!seen.insert(f.name).second) throw SchemaError("duplicate feature '" + f.name + "'");
        if (f.name == goal_) throw SchemaError("goal '" + goal_ + "' is also listed as a feature");
        if (f.values.empty()) throw SchemaError("feature '" + f.name + "' has no legal values");
        std::sort(f.values.begin(), f.values.end());
        if (std::adjacent_find(f.values.begin(), f.values.end()) != f.values.end())
            throw SchemaError("feature '" + f.name + "' repeats a value code");
        if (f.kind == FeatureKind::Binary && f.values != std::vector<int>{0, 1})
            throw SchemaError("binary feature '" + f.name + "' must be coded {0,1}");
    }
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
    for (std::size_t i = 0; i < features_.size(); ++i)
        if (features_[i].name == name) return i;
    return std::nullopt;
}

std::size_t Schema::index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw UnknownFeature(std::string(name));
}

nlohmann::json Schema::to_json() const {
    nlohmann::json features = nlohmann::json::array();
    for (const auto& f : features_)
        features.push_back({{"name", f.name}, {"kind", to_string(f.kind)}, {"values", f.values}});
    return {{"features", std::move(features)}, {"goal", goal_}};
}

Schema Schema::from_json(const nlohmann::json& doc) {
    try {
        std::vector<FeatureSpec> features;
        for (const auto& f : doc.at("features")) {
            features.push_back({f.at("name").get<std::string>(),
                                parse_feature_kind(f.at("kind").get<std::string>()),
                                f.at("values").get<std::vector<int>>()});
        }
        return Schema(std::move(features), doc.value("goal", std::string(kGoalName)));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed schema document: ") + e.what());
    }
}

const Schema& default_schema() {
    static const Schema schema = [] {
        const std::vector<int> binary{0, 1};
        const std::vector<int> three{1, 2, 3};
        auto b = [&](const char* name) { return FeatureSpec{name, FeatureKind::Binary, binary}; };
        return Schema({
            b("weak-password"),
            b("social-media-user"),
            b("disclose-sentiment-on-social-media"),
            b("victimized-by-blackmailing"),
            b("maintained-privacy-on-social-media"),
            b("accessing-online-account-using-several-devices"),
            b("sharing-private-information-on-the-internet"),
            b("receive-phishing-email"),
            b("shared-email-access"),
            b("permitted-ingress-in-email"),
            b("clicked-on-spam-email-links"),
            b("online-products-purchaser"),
            b("lost-money-by-purchasing-online-commodities"),
            b("compulsive-buyer"),
            b("installed-malicious-software"),
            b("shared-private-devices"),
            b("download-unauthorized-software"),
            b("accessed-VPN"),
            b("stored-credentials-on-browsers"),
            b("used-virus-infected-pen-drive"),
            b("devices-keep-updated"),
            FeatureSpec{"age-range", FeatureKind::Discrete, three},
            b("gender"),
            b("shared-internet-account-access"),
            FeatureSpec{"knowledge-about-cybercrime", FeatureKind::Ordinal, three},
            b("aware-about-cybercrime"),
        });
    }();
    return schema;
}

Schema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open schema file");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("cannot parse schema " + path + ": " + e.what());
    }
    return Schema::from_json(doc);
}

void write_schema(const Schema& schema, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot write schema file");
    out << schema.to_json().dump(2) << '\n';
    if (!out) throw IoError(path, "write failed");
}

} // namespace riskminer
