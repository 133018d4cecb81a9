#include "riskminer/tree.hpp"

#include <algorithm>
#include <numeric>

#include "riskminer/errors.hpp"

namespace riskminer {

double gini(std::span<const double> class_counts) {
    double n = 0.0;
    for (double c : class_counts) n += c;
    if (!(n > 0.0)) throw EmptyNode("gini of an empty node");
    double sum_sq = 0.0;
    for (double c : class_counts) sum_sq += (c / n) * (c / n);
    return 1.0 - sum_sq;
}

namespace {

struct Candidate {
    double decrease = 0.0;
    double threshold = 0.0;
};

double binary_gini(double w, double w1) {
    const double p1 = w1 / w;
    const double p0 = 1.0 - p1;
    return 1.0 - p0 * p0 - p1 * p1;
}

constexpr std::size_t kMaxProbeBins = 64;

struct Bin {
    double value;
    double w;
    double s;
};

/// Best threshold of one feature. Rows are tallied per distinct value, then
/// the values are scanned in ascending order so the first of equally good
/// thresholds is kept.
std::optional<Candidate> best_for_feature(const FeatureMatrix& x, std::span<const double> targets,
                                          std::span<const double> weights, std::span<const std::size_t> rows,
                                          std::size_t feature, SplitCriterion criterion, std::vector<Bin>& bins) {
    bins.clear();
    double total_w = 0.0;
    double total_s = 0.0;
    bool many = false;
    for (auto r : rows) {
        const double v = x.at(r, feature);
        const double w = weights[r];
        const double ws = w * targets[r];
        total_w += w;
        total_s += ws;
        // Codes take few distinct values, so a linear probe beats sorting rows.
        auto it = std::find_if(bins.begin(), bins.end(), [v](const Bin& b) { return b.value == v; });
        if (it != bins.end()) {
            it->w += w;
            it->s += ws;
        } else if (bins.size() < kMaxProbeBins) {
            bins.push_back({v, w, ws});
        } else {
            many = true;
            break;
        }
    }
    if (many) {
        bins.clear();
        total_w = 0.0;
        total_s = 0.0;
        for (auto r : rows) bins.push_back({x.at(r, feature), weights[r], weights[r] * targets[r]});
        std::sort(bins.begin(), bins.end(), [](const Bin& a, const Bin& b) { return a.value < b.value; });
        std::size_t out = 0;
        for (std::size_t k = 0; k < bins.size(); ++k) {
            total_w += bins[k].w;
            total_s += bins[k].s;
            if (out > 0 && bins[out - 1].value == bins[k].value) {
                bins[out - 1].w += bins[k].w;
                bins[out - 1].s += bins[k].s;
            } else {
                bins[out++] = bins[k];
            }
        }
        bins.resize(out);
    }
    if (bins.size() < 2) return std::nullopt;
    std::sort(bins.begin(), bins.end(), [](const Bin& a, const Bin& b) { return a.value < b.value; });

    const double parent = criterion == SplitCriterion::Gini ? binary_gini(total_w, total_s) : 0.0;
    std::optional<Candidate> best;
    double left_w = 0.0;
    double left_s = 0.0;
    for (std::size_t k = 0; k + 1 < bins.size(); ++k) {
        left_w += bins[k].w;
        left_s += bins[k].s;
        const double right_w = total_w - left_w;
        const double right_s = total_s - left_s;
        if (!(left_w > 0.0) || !(right_w > 0.0)) continue;
        double decrease = 0.0;
        if (criterion == SplitCriterion::Gini) {
            decrease = parent - (left_w / total_w) * binary_gini(left_w, left_s) -
                       (right_w / total_w) * binary_gini(right_w, right_s);
        } else {
            const double diff = left_s / left_w - right_s / right_w;
            decrease = left_w * right_w * diff * diff / (total_w * total_w);
        }
        if (!best || decrease > best->decrease + kMinDecrease)
            best = Candidate{decrease, 0.5 * (bins[k].value + bins[k + 1].value)};
    }
    return best;
}

bool better(const Candidate& c, std::size_t feature, const std::optional<SplitChoice>& incumbent) {
    if (!incumbent) return true;
    if (c.decrease > incumbent->decrease + kMinDecrease) return true;
    if (c.decrease + kMinDecrease < incumbent->decrease) return false;
    return feature < incumbent->feature;
}

SplitChoice describe(const FeatureMatrix& x, std::span<const std::size_t> rows, std::size_t feature,
                     const Candidate& c) {
    SplitChoice s;
    s.feature = feature;
    s.threshold = c.threshold;
    s.decrease = c.decrease;
    std::vector<double> values;
    for (auto r : rows) values.push_back(x.at(r, feature));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (double v : values) (v <= c.threshold ? s.left_values : s.right_values).push_back(v);
    return s;
}

} // namespace

std::optional<SplitChoice> best_split(const FeatureMatrix& x, std::span<const double> targets,
                                      std::span<const double> weights, std::span<const std::size_t> rows,
                                      std::span<const std::size_t> features, SplitCriterion criterion) {
    if (rows.empty()) throw EmptyNode("best_split on an empty node");
    std::vector<Bin> scratch;
    std::optional<SplitChoice> best;
    for (auto f : features) {
        const auto c = best_for_feature(x, targets, weights, rows, f, criterion, scratch);
        if (c && c->decrease > kMinDecrease && better(*c, f, best)) best = describe(x, rows, f, *c);
    }
    return best;
}

std::optional<SplitChoice> best_split(const FeatureMatrix& x, std::span<const int> labels,
                                      std::span<const std::size_t> features) {
    std::vector<double> targets(labels.begin(), labels.end());
    std::vector<double> weights(labels.size(), 1.0);
    std::vector<std::size_t> rows(labels.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return best_split(x, targets, weights, rows, features, SplitCriterion::Gini);
}

double Tree::evaluate(std::span<const double> record) const { return nodes_[leaf_of(record)].value; }

std::size_t Tree::leaf_of(std::span<const double> record) const {
    std::size_t id = 0;
    while (nodes_[id].feature >= 0) {
        const auto& n = nodes_[id];
        id = static_cast<std::size_t>(record[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return id;
}

std::size_t Tree::depth() const {
    std::size_t deepest = 0;
    for (const auto& p : paths()) deepest = std::max(deepest, p.size());
    return deepest;
}

std::size_t Tree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

std::vector<std::vector<std::size_t>> Tree::paths() const {
    std::vector<std::vector<std::size_t>> out;
    if (nodes_.empty()) return out;
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> stack{{0, {}}};
    while (!stack.empty()) {
        auto [id, path] = std::move(stack.back());
        stack.pop_back();
        const auto& n = nodes_[id];
        if (n.feature < 0) {
            out.push_back(std::move(path));
            continue;
        }
        path.push_back(static_cast<std::size_t>(n.feature));
        stack.emplace_back(static_cast<std::size_t>(n.right), path);
        stack.emplace_back(static_cast<std::size_t>(n.left), std::move(path));
    }
    return out;
}

nlohmann::json Tree::to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : nodes_) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    return nodes;
}

Tree Tree::from_json(const nlohmann::json& doc) {
    std::vector<TreeNode> nodes;
    for (const auto& n : doc)
        nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                         n.at(4).get<double>()});
    return Tree(std::move(nodes));
}

Tree grow_tree(const FeatureMatrix& x, std::span<const double> targets, std::span<const double> weights,
               const TreeGrowth& growth, Rng* rng) {
    struct Task {
        std::size_t id;
        std::vector<std::size_t> rows;
        int depth;
    };
    std::vector<std::size_t> root_rows;
    for (std::size_t i = 0; i < x.rows; ++i)
        if (weights[i] > 0.0) root_rows.push_back(i);
    if (root_rows.empty()) throw EmptyNode("tree growth without weighted records");

    std::vector<std::size_t> order(x.cols);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const bool sample_features = growth.max_features > 0 && growth.max_features < x.cols;

    std::vector<TreeNode> nodes(1);
    std::vector<Task> stack;
    stack.push_back({0, std::move(root_rows), 0});
    std::vector<Bin> scratch;
    while (!stack.empty()) {
        Task task = std::move(stack.back());
        stack.pop_back();

        double w = 0.0;
        double s = 0.0;
        for (auto r : task.rows) {
            w += weights[r];
            s += weights[r] * targets[r];
        }
        nodes[task.id].value = s / w;

        const bool depth_ok = growth.max_depth < 0 || task.depth < growth.max_depth;
        const bool pure = growth.criterion == SplitCriterion::Gini && (s <= 0.0 || s >= w);
        if (!depth_ok || pure || task.rows.size() < growth.min_samples_split) continue;

        if (sample_features) {
            if (rng == nullptr) throw ConfigError("feature sampling requires a random stream");
            rng->shuffle(std::span<std::size_t>(order));
        }
        // An impure classification node with no improving split (balanced XOR)
        // still splits on the first usable feature visited.
        std::optional<SplitChoice> best;
        std::optional<SplitChoice> fallback;
        std::size_t visited = 0;
        for (auto f : order) {
            if (sample_features && visited >= growth.max_features && best) break;
            ++visited;
            const auto c = best_for_feature(x, targets, weights, task.rows, f, growth.criterion, scratch);
            if (!c) continue;
            if (c->decrease > kMinDecrease) {
                if (better(*c, f, best)) best = describe(x, task.rows, f, *c);
            } else if (!fallback && growth.criterion == SplitCriterion::Gini) {
                fallback = describe(x, task.rows, f, *c);
            }
        }
        if (!best) best = std::move(fallback);
        if (!best) continue;

        std::vector<std::size_t> left_rows;
        std::vector<std::size_t> right_rows;
        for (auto r : task.rows) (x.at(r, best->feature) <= best->threshold ? left_rows : right_rows).push_back(r);

        const auto left = nodes.size();
        nodes.resize(nodes.size() + 2);
        auto& node = nodes[task.id];
        node.feature = static_cast<int>(best->feature);
        node.threshold = best->threshold;
        node.left = static_cast<int>(left);
        node.right = static_cast<int>(left + 1);
        stack.push_back({left + 1, std::move(right_rows), task.depth + 1});
        stack.push_back({left, std::move(left_rows), task.depth + 1});
    }
    return Tree(std::move(nodes));
}

} // namespace riskminer
