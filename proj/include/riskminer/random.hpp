#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace riskminer {

/// Mixes a base seed with stream coordinates (splitmix64 finalizer). Used to
/// give every tree, class or candidate its own reproducible stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Portable random source. std::mt19937_64 output is fixed by the standard;
/// the distributions below are implemented here because the standard library
/// distributions are not reproducible across implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    bool coin() { return (engine_() >> 63) != 0; }

    /// Uniform integer in [0, n), n > 0, without modulo bias.
    std::uint64_t below(std::uint64_t n);

    template <class T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace riskminer
