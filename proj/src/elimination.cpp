#include "riskminer/elimination.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <numeric>
#include <thread>

#include "riskminer/errors.hpp"
#include "riskminer/feature_matrix.hpp"

namespace riskminer {

const LearnerAccuracy& EliminationStep::best() const {
    if (accuracies.empty()) throw StageError("elimination step without learners");
    const LearnerAccuracy* best = &accuracies.front();
    for (const auto& a : accuracies)
        if (a.accuracy > best->accuracy) best = &a;
    return *best;
}

std::vector<LearnerAccuracy> evaluate_feature_set(const SplitBundle& splits, std::span<const ClassifierSpec> learners,
                                                  std::span<const std::size_t> features) {
    const auto x_train = project(splits.train, features);
    const auto x_test = project(splits.test, features);
    std::vector<std::string> names;
    for (auto j : features) names.push_back(splits.train.schema().feature(j).name);

    std::vector<LearnerAccuracy> out;
    for (const auto& spec : learners) {
        const auto model = train(spec, x_train, splits.train.labels(), names);
        std::vector<int> predicted(x_test.rows);
        for (std::size_t i = 0; i < x_test.rows; ++i) predicted[i] = model.predict(x_test.row(i));
        out.push_back({spec.kind, accuracy(splits.test.labels(), predicted)});
    }
    return out;
}

namespace {

/// Runs body(i) for i in [0, n) on up to `threads` workers; rethrows the
/// exception of the lowest failing index.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body body) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (count == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

EliminationTrace backward_eliminate(const SplitBundle& splits, std::span<const ClassifierSpec> learners,
                                    std::size_t min_size, std::span<const std::size_t> initial, unsigned threads) {
    if (min_size < 1) throw ConfigError("elimination: min_size must be at least 1");
    if (learners.empty()) throw ConfigError("elimination: no learners");
    std::vector<std::size_t> active(initial.begin(), initial.end());
    if (active.empty()) {
        active.resize(splits.train.feature_count());
        std::iota(active.begin(), active.end(), std::size_t{0});
    }
    std::sort(active.begin(), active.end());
    if (std::adjacent_find(active.begin(), active.end()) != active.end())
        throw ConfigError("elimination: duplicate feature in the initial set");
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

    EliminationTrace trace;
    trace.steps.push_back({active, evaluate_feature_set(splits, learners, active), std::nullopt});

    while (active.size() > min_size) {
        std::vector<std::vector<LearnerAccuracy>> results(active.size());
        parallel_for(active.size(), threads, [&](std::size_t c) {
            std::vector<std::size_t> candidate;
            for (std::size_t k = 0; k < active.size(); ++k)
                if (k != c) candidate.push_back(active[k]);
            results[c] = evaluate_feature_set(splits, learners, candidate);
        });

        std::size_t chosen = 0;
        double chosen_acc = -1.0;
        for (std::size_t c = 0; c < active.size(); ++c) {
            double best = -1.0;
            for (const auto& a : results[c]) best = std::max(best, a.accuracy);
            if (best > chosen_acc) {
                chosen_acc = best;
                chosen = c;
            }
        }
        trace.steps.back().removed = active[chosen];
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(chosen));
        trace.steps.push_back({active, std::move(results[chosen]), std::nullopt});
    }

    double best = -1.0;
    for (std::size_t s = 0; s < trace.steps.size(); ++s) {
        const double acc = trace.steps[s].best().accuracy;
        if (acc >= best) {
            best = acc;
            trace.final_step = s;
        }
    }
    trace.final_selection = trace.steps[trace.final_step].features;
    return trace;
}

} // namespace riskminer
