#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace riskminer {

enum class FeatureKind { Binary, Discrete, Ordinal };

std::string_view to_string(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view text);

/// One questionnaire attribute and its legal integer codes.
struct FeatureSpec {
    std::string name;
    FeatureKind kind = FeatureKind::Binary;
    std::vector<int> values; // ascending, non-empty

    bool accepts(int value) const;

    friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Ordered feature list plus the goal column name. Immutable once built; the
/// constructor enforces unique names, non-empty ascending value sets, binary
/// features coded {0,1}, and a goal that is not also a feature.
class Schema {
public:
    static constexpr std::string_view kGoalName = "victim";

    Schema(std::vector<FeatureSpec> features, std::string goal = std::string(kGoalName));

    const std::vector<FeatureSpec>& features() const noexcept { return features_; }
    const FeatureSpec& feature(std::size_t index) const { return features_.at(index); }
    std::size_t size() const noexcept { return features_.size(); }
    const std::string& goal() const noexcept { return goal_; }

    std::optional<std::size_t> find(std::string_view name) const;
    /// Throws UnknownFeature.
    std::size_t index_of(std::string_view name) const;

    nlohmann::json to_json() const;
    static Schema from_json(const nlohmann::json& doc);

    friend bool operator==(const Schema&, const Schema&) = default;

private:
    std::vector<FeatureSpec> features_;
    std::string goal_;
};

/// The 26 survey attributes in questionnaire order (Q1..Q26).
const Schema& default_schema();

Schema load_schema(const std::string& path);
void write_schema(const Schema& schema, const std::string& path);

} // namespace riskminer
