#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "vulnprio/triage.hpp"

using namespace vulnprio::triage;

namespace {

std::vector<int> labels(std::size_t n, int classes = 3) {
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<int>(i % static_cast<std::size_t>(classes));
    return out;
}

void expect_exact_partition(const Partition& p, std::size_t n) {
    std::vector<std::size_t> all = p.train;
    all.insert(all.end(), p.test.begin(), p.test.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expected(n);
    std::iota(expected.begin(), expected.end(), std::size_t{0});
    EXPECT_EQ(all, expected);
}

}  // namespace

TEST(Split, EightyTwentyOfSixHundredSixtySeven) {
    const auto y = labels(667);
    const Partition p = split_indices(y, {});
    EXPECT_EQ(p.train.size(), 533u);
    EXPECT_EQ(p.test.size(), 134u);
    expect_exact_partition(p, 667);
}

TEST(Split, SameSeedSamePartition) {
    const auto y = labels(10);
    const SplitOptions opts{0.8, 1234, false};
    const Partition a = split_indices(y, opts);
    const Partition b = split_indices(y, opts);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    EXPECT_EQ(a.train.size(), 8u);
}

TEST(Split, DifferentSeedsShuffleDifferently) {
    const auto y = labels(100);
    EXPECT_NE(split_indices(y, {0.8, 1, false}).train, split_indices(y, {0.8, 2, false}).train);
}

TEST(Split, FractionMustLeaveBothSidesNonEmpty) {
    const auto y = labels(10);
    for (double f : {1.0, 0.0, -0.5, 1.5, 0.05}) {
        EXPECT_THROW(split_indices(y, {f, 42, false}), MlError) << f;
    }
}

TEST(Split, TooSmallCorpus) {
    try {
        split_indices(labels(4), {});
        FAIL();
    } catch (const MlError& e) {
        EXPECT_EQ(e.kind(), MlError::Kind::CorpusTooSmall);
    }
}

TEST(Split, StratifiedKeepsClassProportions) {
    std::vector<int> y(600, 0);
    std::fill(y.begin(), y.begin() + 48, 1);  // 8% minority
    const Partition p = split_indices(y, {0.8, 42, true});
    expect_exact_partition(p, 600);
    const auto minority_test = std::count_if(p.test.begin(), p.test.end(), [&](std::size_t i) { return y[i] == 1; });
    EXPECT_EQ(minority_test, 10);  // 48 - floor(0.8 * 48)
    EXPECT_EQ(p.train.size(), 479u);  // floor(441.6) + floor(38.4)
}

TEST(Split, UniformBelowStaysInRange) {
    std::mt19937_64 rng(1);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto v = uniform_below(rng, 7);
        ASSERT_LT(v, 7u);
        seen.insert(v);
    }
    EXPECT_EQ(seen.size(), 7u);
}
