// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace randstep {

/// Default master seed used whenever none is given on the command line.
inline constexpr std::uint64_t kDefaultMasterSeed = 42;

/// Identifies one Monte Carlo replica within an experiment.
struct SeedSpec {
    std::uint64_t master_seed = kDefaultMasterSeed;
    std::uint64_t replica_index = 0;

    friend bool operator==(SeedSpec const&, SeedSpec const&) = default;
};

/// Equidistant partition t_n = n * T / N of [0, T].
class TimeGrid {
  public:
    TimeGrid(double final_time, int steps);

    double final_time() const { return final_time_; }
    int steps() const { return steps_; }
    double step_size() const { return step_size_; }

    /// t_n for n in [0, N]; node(N) == T exactly.
    double node(int n) const;

  private:
    double final_time_;
    int steps_;
    double step_size_;
};

/// Seedable stream of U[0,1) draws.
///
/// Counter based: the n-th draw is a pure function of (seed, n), so a stream
/// can be copied, rewound or reconstructed on another thread without changing
/// the values it produces. Replica substreams are keyed by hashing the
/// (master_seed, replica_index) pair.
class NodeStream {
  public:
    explicit NodeStream(SeedSpec seed);

    SeedSpec seed() const { return seed_; }
    std::uint64_t draws() const { return counter_; }

    /// Next tau in [0, 1); advances the draw counter by one.
    double next_tau();

    /// Value of draw `index` without touching the counter.
    double tau_at(std::uint64_t index) const;

  private:
    SeedSpec seed_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

NodeStream make_stream(SeedSpec seed);

/// Randomized node xi_n = t_{n-1} + k * tau inside the n-th step.
///
/// Throws IndexError unless 1 <= n <= N and 0 <= tau < 1.
double node(TimeGrid const& grid, int n, double tau);

namespace detail {
std::uint64_t splitmix64_mix(std::uint64_t z);
std::uint64_t fmix64(std::uint64_t z);
}  // namespace detail

}  // namespace randstep
