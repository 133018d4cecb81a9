#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "riskminer/classifier.hpp"
#include "riskminer/split.hpp"

namespace riskminer {

struct LearnerAccuracy {
    LearnerKind learner;
    double accuracy = 0.0;
};

/// One active feature set and how every learner scored on the test split when
/// trained on it. `removed` is the feature dropped to reach the next step.
struct EliminationStep {
    std::vector<std::size_t> features; // schema positions, ascending
    std::vector<LearnerAccuracy> accuracies;
    std::optional<std::size_t> removed;

    /// Highest accuracy; the first learner in list order on ties.
    const LearnerAccuracy& best() const;
};

struct EliminationTrace {
    std::vector<EliminationStep> steps;
    std::vector<std::size_t> final_selection;
    std::size_t final_step = 0;
};

/// Test-split accuracy of every learner trained on `features` of the train split.
std::vector<LearnerAccuracy> evaluate_feature_set(const SplitBundle& splits, std::span<const ClassifierSpec> learners,
                                                  std::span<const std::size_t> features);

/// Greedy backward elimination. Starting from `initial` (every schema feature
/// when empty), each step tries every single-feature removal, keeps the removal
/// whose best learner scores highest on the test split (lowest schema index on
/// ties), and stops once `min_size` features remain. The final selection is the
/// step with the highest best-learner accuracy, the smaller set on ties.
/// Candidate evaluations of a step may run on `threads` workers (0: hardware
/// concurrency); results do not depend on the worker count.
EliminationTrace backward_eliminate(const SplitBundle& splits, std::span<const ClassifierSpec> learners,
                                    std::size_t min_size, std::span<const std::size_t> initial = {},
                                    unsigned threads = 0);

} // namespace riskminer
