#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace riskminer {

/// Counts relative to `positive`. The default positive class is non-victim (0).
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
    int positive = 0;

    std::size_t total() const noexcept { return tp + fp + fn + tn; }
};

/// Throws LengthMismatch or EmptyInput.
ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, int positive = 0);

struct ClassMetrics {
    int label = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
    // Set when the metric had a zero denominator and was reported as 0.
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool f1_undefined = false;
};

struct MetricsReport {
    ClassMetrics positive; // precision = tp/(tp+fp), recall = tp/(tp+fn)
    ClassMetrics negative; // precision = tn/(tn+fn), recall = tnr
    double tnr = 0.0;
    bool tnr_undefined = false;
    double accuracy = 0.0;
    double weighted_f1 = 0.0; // support-weighted mean of the two class F1 scores

    /// Label 0 first, then label 1.
    std::vector<ClassMetrics> by_label() const;
};

MetricsReport classification_metrics(const ConfusionMatrix& cm);

struct RocPoint {
    double threshold = 0.0; // +inf for the first point
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;
};

/// One point per distinct score, descending, after a +inf sentinel at (0,0);
/// each point predicts positive for score >= threshold. Scores are oriented
/// toward `positive`. Throws LengthMismatch, EmptyInput, OneClassOnly.
RocCurve roc_points(std::span<const int> y_true, std::span<const double> scores, int positive = 1);

/// Trapezoidal area under the curve.
double auc(const RocCurve& curve);

} // namespace riskminer
