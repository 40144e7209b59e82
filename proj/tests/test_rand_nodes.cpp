// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "randstep/error.hpp"
#include "randstep/rand_nodes.hpp"

namespace randstep {
namespace {

TEST(SplitMix, MatchesReferenceOutput)
{
    // First output of the reference SplitMix64 generator seeded with 0.
    EXPECT_EQ(detail::splitmix64_mix(0x9e3779b97f4a7c15ULL), 0xe220a8397b1dcdafULL);
}

TEST(TimeGrid, EndpointsAreExact)
{
    for (int steps : {1, 3, 7, 10, 1000}) {
        TimeGrid const g(0.7, steps);
        EXPECT_EQ(g.node(0), 0.0);
        EXPECT_EQ(g.node(steps), 0.7);
        EXPECT_GT(g.step_size(), 0.0);
    }
    TimeGrid const g(1.0, 3);
    EXPECT_EQ(g.node(2), 2.0 / 3.0);
}

TEST(TimeGrid, RejectsInvalid)
{
    EXPECT_THROW(TimeGrid(0.0, 4), IndexError);
    EXPECT_THROW(TimeGrid(-1.0, 4), IndexError);
    EXPECT_THROW(TimeGrid(1.0, 0), IndexError);
    TimeGrid const g(1.0, 4);
    EXPECT_THROW(g.node(5), IndexError);
    EXPECT_THROW(g.node(-1), IndexError);
}

TEST(NodeStream, SameSeedSameDraws)
{
    NodeStream a = make_stream({42, 7});
    NodeStream b = make_stream({42, 7});
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_tau(), b.next_tau());
    EXPECT_EQ(a.draws(), 1000u);
}

TEST(NodeStream, DrawIsPureFunctionOfIndex)
{
    NodeStream s = make_stream({3, 1});
    std::vector<double> seq;
    for (int i = 0; i < 50; ++i) seq.push_back(s.next_tau());
    NodeStream const fresh = make_stream({3, 1});
    for (int i = 0; i < 50; ++i) EXPECT_EQ(fresh.tau_at(i), seq[i]);
}

TEST(NodeStream, RegressionFixtures)
{
    NodeStream r0 = make_stream({42, 0});
    NodeStream r1 = make_stream({42, 1});
    EXPECT_EQ(r0.next_tau(), 0.39595494070880166);
    EXPECT_EQ(r0.next_tau(), 0.047819612624012797);
    EXPECT_EQ(r0.next_tau(), 0.80465705357045458);
    EXPECT_EQ(r1.next_tau(), 0.037596925097967637);
    EXPECT_EQ(r1.next_tau(), 0.55773425939550281);
    EXPECT_EQ(r1.next_tau(), 0.29739891448402889);
}

TEST(NodeStream, ReplicasDiffer)
{
    EXPECT_NE(make_stream({42, 0}).tau_at(0), make_stream({42, 1}).tau_at(0));
    EXPECT_NE(make_stream({42, 0}).tau_at(0), make_stream({43, 0}).tau_at(0));
}

TEST(NodeStream, NotNaiveSeedPlusIndex)
{
    // (s, r+1) and (s+1, r) must not share a stream.
    for (std::uint64_t s = 0; s < 20; ++s) {
        EXPECT_NE(make_stream({s, 1}).tau_at(0), make_stream({s + 1, 0}).tau_at(0));
    }
}

TEST(NodeStream, RangeContract)
{
    NodeStream s = make_stream({0, 0});
    for (int i = 0; i < 100000; ++i) {
        double const t = s.next_tau();
        ASSERT_GE(t, 0.0);
        ASSERT_LT(t, 1.0);
    }
}

TEST(NodeStream, FirstDrawMeanAcrossReplicas)
{
    constexpr int R = 10000;
    double sum = 0.0;
    for (int r = 0; r < R; ++r) sum += make_stream({42, static_cast<std::uint64_t>(r)}).tau_at(0);
    EXPECT_NEAR(sum / R, 0.5, 3.0 / std::sqrt(12.0 * R));
}

TEST(NodeStream, VarianceOfUniform)
{
    constexpr int n = 100000;
    NodeStream s = make_stream({42, 0});
    double mean = 0.0, m2 = 0.0;
    for (int i = 1; i <= n; ++i) {
        double const x = s.next_tau();
        double const d = x - mean;
        mean += d / i;
        m2 += d * (x - mean);
    }
    EXPECT_NEAR(m2 / (n - 1), 1.0 / 12.0, 0.05 / 12.0);
}

TEST(NodeStream, KolmogorovSmirnov)
{
    constexpr int n = 10000;
    NodeStream s = make_stream({42, 5});
    std::vector<double> x(n);
    for (double& v : x) v = s.next_tau();
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        d = std::max({d, (i + 1.0) / n - x[i], x[i] - static_cast<double>(i) / n});
    }
    // Asymptotic 1% critical value 1.628 / sqrt(n).
    EXPECT_LT(d, 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST(NodeStream, ReplicaCorrelation)
{
    constexpr int n = 4096;
    NodeStream a = make_stream({42, 0});
    NodeStream b = make_stream({42, 1});
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int i = 0; i < n; ++i) {
        double const x = a.next_tau();
        double const y = b.next_tau();
        sa += x;
        sb += y;
        saa += x * x;
        sbb += y * y;
        sab += x * y;
    }
    double const cov = sab / n - (sa / n) * (sb / n);
    double const va = saa / n - (sa / n) * (sa / n);
    double const vb = sbb / n - (sb / n) * (sb / n);
    EXPECT_LT(std::abs(cov / std::sqrt(va * vb)), 0.05);
}

TEST(Node, Examples)
{
    TimeGrid const g(1.0, 4);
    EXPECT_DOUBLE_EQ(node(g, 1, 0.5), 0.125);
    EXPECT_EQ(node(g, 3, 0.0), 0.5);
}

TEST(Node, StaysInHalfOpenInterval)
{
    TimeGrid const g(1.0, 3);
    double const almost_one = std::nextafter(1.0, 0.0);
    for (int n = 1; n <= 3; ++n) {
        double const xi = node(g, n, almost_one);
        EXPECT_GE(xi, g.node(n - 1));
        EXPECT_LT(xi, g.node(n));
    }
    NodeStream s = make_stream({9, 9});
    TimeGrid const fine(1.0, 1000);
    for (int n = 1; n <= 1000; ++n) {
        double const xi = node(fine, n, s.next_tau());
        ASSERT_GE(xi, fine.node(n - 1));
        ASSERT_LT(xi, fine.node(n));
    }
}

TEST(Node, MeanOfFirstNode)
{
    constexpr int R = 10000;
    TimeGrid const g(1.0, 2);
    double sum = 0.0;
    for (int r = 0; r < R; ++r) {
        sum += node(g, 1, make_stream({42, static_cast<std::uint64_t>(r)}).tau_at(0));
    }
    // xi_1 ~ U[0, 1/2): mean 1/4, sd 1/sqrt(48).
    EXPECT_NEAR(sum / R, 0.25, 3.0 / std::sqrt(48.0 * R));
}

TEST(Node, RejectsBadArguments)
{
    TimeGrid const g(1.0, 4);
    EXPECT_THROW(node(g, 0, 0.5), IndexError);
    EXPECT_THROW(node(g, 5, 0.5), IndexError);
    EXPECT_THROW(node(g, 1, 1.0), IndexError);
    EXPECT_THROW(node(g, 1, -0.1), IndexError);
}

}  // namespace
}  // namespace randstep
