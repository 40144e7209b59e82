// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#include "randstep/rand_nodes.hpp"

#include <cmath>
#include <string>

#include "randstep/error.hpp"

namespace randstep {

namespace {
constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kReplicaSalt = 0xd1b54a32d192ed03ULL;
}  // namespace

namespace detail {

// Finalizer of SplitMix64 (Steele, Lea, Flood).
std::uint64_t splitmix64_mix(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// MurmurHash3 finalizer; used for key derivation so that stream keys and
// stream outputs go through different mixers.
std::uint64_t fmix64(std::uint64_t z)
{
    z ^= z >> 33;
    z *= 0xff51afd7ed558ccdULL;
    z ^= z >> 33;
    z *= 0xc4ceb9fe1a85ec53ULL;
    z ^= z >> 33;
    return z;
}

}  // namespace detail

TimeGrid::TimeGrid(double final_time, int steps)
    : final_time_{final_time}, steps_{steps}, step_size_{final_time / steps}
{
    if (!(final_time > 0) || !std::isfinite(final_time)) {
        throw IndexError("TimeGrid: final time must be positive, got " +
                         std::to_string(final_time));
    }
    if (steps < 1) {
        throw IndexError("TimeGrid: step count must be positive, got " +
                         std::to_string(steps));
    }
}

double TimeGrid::node(int n) const
{
    if (n < 0 || n > steps_) {
        throw IndexError("TimeGrid::node: index " + std::to_string(n) +
                         " outside [0, " + std::to_string(steps_) + "]");
    }
    if (n == steps_) return final_time_;
    return static_cast<double>(n) * final_time_ / steps_;
}

NodeStream::NodeStream(SeedSpec seed) : seed_{seed}
{
    std::uint64_t const m = detail::fmix64(seed.master_seed ^ kReplicaSalt);
    std::uint64_t const r = detail::fmix64(seed.replica_index + kGoldenGamma);
    key_ = detail::fmix64(m + kGoldenGamma * (r | 1ULL));
}

double NodeStream::tau_at(std::uint64_t index) const
{
    std::uint64_t const bits =
        detail::splitmix64_mix(key_ + (index + 1) * kGoldenGamma);
    // Top 53 bits -> [0, 1) on the double lattice 2^-53.
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double NodeStream::next_tau() { return tau_at(counter_++); }

NodeStream make_stream(SeedSpec seed) { return NodeStream{seed}; }

double node(TimeGrid const& grid, int n, double tau)
{
    if (n < 1 || n > grid.steps()) {
        throw IndexError("node: step index " + std::to_string(n) +
                         " outside [1, " + std::to_string(grid.steps()) + "]");
    }
    if (!(tau >= 0.0 && tau < 1.0)) {
        throw IndexError("node: tau must lie in [0, 1), got " +
                         std::to_string(tau));
    }
    double const left = grid.node(n - 1);
    double const xi = left + grid.step_size() * tau;
    // Guard against rounding up onto the right endpoint.
    double const right = grid.node(n);
    return xi < right ? xi : std::nextafter(right, left);
}

}  // namespace randstep
