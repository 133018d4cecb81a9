#include "riskminer/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "riskminer/errors.hpp"

namespace riskminer {

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, int positive) {
    if (y_true.size() != y_pred.size())
        throw LengthMismatch("confusion: " + std::to_string(y_true.size()) + " labels vs " +
                             std::to_string(y_pred.size()) + " predictions");
    if (y_true.empty()) throw EmptyInput("confusion: no records");
    ConfusionMatrix cm;
    cm.positive = positive;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool actual = y_true[i] == positive;
        const bool predicted = y_pred[i] == positive;
        if (actual && predicted)
            ++cm.tp;
        else if (!actual && predicted)
            ++cm.fp;
        else if (actual)
            ++cm.fn;
        else
            ++cm.tn;
    }
    return cm;
}

namespace {

double ratio(std::size_t num, std::size_t den, bool& undefined) {
    undefined = den == 0;
    return undefined ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ClassMetrics class_metrics(int label, std::size_t hit, std::size_t false_alarm, std::size_t miss) {
    ClassMetrics m;
    m.label = label;
    m.support = hit + miss;
    m.precision = ratio(hit, hit + false_alarm, m.precision_undefined);
    m.recall = ratio(hit, hit + miss, m.recall_undefined);
    m.f1_undefined = m.precision + m.recall == 0.0;
    m.f1 = m.f1_undefined ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

} // namespace

std::vector<ClassMetrics> MetricsReport::by_label() const {
    return positive.label == 0 ? std::vector<ClassMetrics>{positive, negative}
                               : std::vector<ClassMetrics>{negative, positive};
}

MetricsReport classification_metrics(const ConfusionMatrix& cm) {
    MetricsReport r;
    r.positive = class_metrics(cm.positive, cm.tp, cm.fp, cm.fn);
    r.negative = class_metrics(1 - cm.positive, cm.tn, cm.fn, cm.fp);
    r.tnr = ratio(cm.tn, cm.tn + cm.fp, r.tnr_undefined);
    bool unused = false;
    r.accuracy = ratio(cm.tp + cm.tn, cm.total(), unused);
    const std::size_t n = r.positive.support + r.negative.support;
    r.weighted_f1 = n == 0 ? 0.0
                           : (static_cast<double>(r.positive.support) * r.positive.f1 +
                              static_cast<double>(r.negative.support) * r.negative.f1) /
                                 static_cast<double>(n);
    return r;
}

RocCurve roc_points(std::span<const int> y_true, std::span<const double> scores, int positive) {
    if (y_true.size() != scores.size()) throw LengthMismatch("roc: labels and scores differ in length");
    if (y_true.empty()) throw EmptyInput("roc: no records");
    std::size_t pos = 0;
    for (int y : y_true) pos += y == positive ? 1 : 0;
    const std::size_t neg = y_true.size() - pos;
    if (pos == 0 || neg == 0) throw OneClassOnly("roc: both classes are required");

    std::vector<std::size_t> order(y_true.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (std::size_t k = 0; k < order.size();) {
        const double threshold = scores[order[k]];
        for (; k < order.size() && scores[order[k]] == threshold; ++k) (y_true[order[k]] == positive ? tp : fp) += 1;
        curve.points.push_back(
            {threshold, static_cast<double>(fp) / static_cast<double>(neg), static_cast<double>(tp) / static_cast<double>(pos)});
    }
    return curve;
}

double auc(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
        const auto& a = curve.points[k - 1];
        const auto& b = curve.points[k];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    return area;
}

} // namespace riskminer
