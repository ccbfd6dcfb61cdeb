#pragma once

#include <cstdint>
#include <random>

namespace cvsim {

/// The single random stream owned by a world.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the standard. The
/// transforms below are written out instead of using <random> distributions, whose
/// algorithms differ between standard libraries; this keeps seeded runs byte-identical
/// across toolchains.
///
/// Draw order inside one tick is part of the reproducibility contract:
///   1. arrivals, approaches in W,S,E,N order; per arrival: next gap, init speed, equipped flag
///   2. lane choice for pending vehicles, approaches in W,S,E,N order, FIFO
///   3. acceleration noise, lanes in WL..NR order, q_in front to back, then exiting front to back
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer on [0, n). n must be > 0.
    std::size_t uniform_index(std::size_t n);

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal via the Marsaglia polar method; the second variate is discarded
    /// so that every call consumes whole draws.
    double standard_normal();

    /// Exponential with the given rate (> 0).
    double exponential(double rate);

private:
    std::mt19937_64 engine_;
};

}  // namespace cvsim
