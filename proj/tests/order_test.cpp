#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dyntrap/order.h"

using namespace dyntrap;

TEST(OrderKey, ComparesAsBinaryFractions) {
    EXPECT_LT(OrderKey("01"), OrderKey("1"));     // 0.01 < 0.1
    EXPECT_LT(OrderKey("1"), OrderKey("11"));     // 0.1 < 0.11
    EXPECT_LT(OrderKey("0011"), OrderKey("01"));  // 0.0011 < 0.01
    EXPECT_EQ(compare(OrderKey("101"), OrderKey("101")), 0);
}

TEST(Treap, FirstElementHasRootCode) {
    Treap t(1);
    OrderHandle a = t.emplace_at(1);
    EXPECT_EQ(t.key(a).bits(), "1");
    EXPECT_EQ(t.rank(a), 1u);
}

TEST(Treap, EmplaceInFrontCompareLess) {
    Treap t(2);
    OrderHandle a = t.emplace_at(1);
    OrderHandle b = t.emplace_at(1);
    EXPECT_LT(t.key(b), t.key(a));
    EXPECT_TRUE(t.less(b, a));
    EXPECT_FALSE(t.less(a, a));
}

TEST(Treap, AppendsKeepRanks) {
    Treap t(3);
    std::vector<OrderHandle> hs;
    for (std::size_t i = 1; i <= 100; ++i) hs.push_back(t.emplace_at(i));
    for (std::size_t i = 0; i < hs.size(); ++i) EXPECT_EQ(t.rank(hs[i]), i + 1);
    EXPECT_TRUE(t.audit().empty());
}

TEST(Treap, RankOutOfRange) {
    Treap t(4);
    EXPECT_THROW(t.emplace_at(0), RankOutOfRange);
    EXPECT_THROW(t.emplace_at(2), RankOutOfRange);
    t.emplace_at(1);
    EXPECT_THROW(t.at(2), RankOutOfRange);
}

TEST(Treap, DropKeepsOrder) {
    Treap t(5);
    OrderHandle a = t.emplace_at(1), b = t.emplace_at(2), c = t.emplace_at(3);
    t.drop(b);
    EXPECT_FALSE(t.valid(b));
    EXPECT_EQ(t.size(), 2u);
    EXPECT_TRUE(t.less(a, c));
    EXPECT_EQ(t.rank(c), 2u);
    EXPECT_THROW(t.drop(b), StaleHandle);
    EXPECT_THROW(t.rank(b), StaleHandle);
    t.drop(a);
    t.drop(c);
    EXPECT_EQ(t.size(), 0u);
    EXPECT_TRUE(t.audit().empty());
}

TEST(Treap, StaleHandleAfterSlotReuse) {
    Treap t(6);
    OrderHandle a = t.emplace_at(1);
    t.drop(a);
    OrderHandle b = t.emplace_at(1);
    EXPECT_FALSE(t.valid(a));
    EXPECT_TRUE(t.valid(b));
}

TEST(Treap, EmplaceThenDropRestoresSequence) {
    std::mt19937_64 rng(7);
    Treap t(7);
    for (int i = 0; i < 60; ++i) t.emplace_random(rng);
    for (int trial = 0; trial < 200; ++trial) {
        auto before = t.in_order();
        std::size_t r = std::uniform_int_distribution<std::size_t>(1, t.size() + 1)(rng);
        OrderHandle h = t.emplace_at(r);
        EXPECT_EQ(t.rank(h), r);
        t.drop(h);
        EXPECT_EQ(t.in_order(), before);
        EXPECT_TRUE(t.audit().empty());
    }
}

// Rank oracle: a plain vector that receives the same positional inserts.
TEST(Treap, RanksMatchVectorOracle) {
    std::mt19937_64 rng(8);
    Treap t(8);
    std::vector<OrderHandle> oracle;
    for (int i = 0; i < 200; ++i) {
        std::size_t r = std::uniform_int_distribution<std::size_t>(1, oracle.size() + 1)(rng);
        oracle.insert(oracle.begin() + static_cast<long>(r - 1), t.emplace_at(r));
    }
    for (int i = 0; i < 50; ++i) {
        std::size_t j = std::uniform_int_distribution<std::size_t>(0, oracle.size() - 1)(rng);
        t.drop(oracle[j]);
        oracle.erase(oracle.begin() + static_cast<long>(j));
    }
    ASSERT_EQ(t.in_order(), oracle);
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        EXPECT_EQ(t.rank(oracle[i]), i + 1);
        EXPECT_EQ(t.at(i + 1), oracle[i]);
    }
    EXPECT_TRUE(t.audit().empty());
}

TEST(Treap, LessAgreesWithRankExhaustively) {
    std::mt19937_64 rng(9);
    Treap t(9);
    std::vector<OrderHandle> hs;
    for (int i = 0; i < 500; ++i) hs.push_back(t.emplace_random(rng));
    std::vector<std::size_t> ranks;
    for (OrderHandle h : hs) ranks.push_back(t.rank(h));
    for (std::size_t i = 0; i < hs.size(); ++i)
        for (std::size_t j = 0; j < hs.size(); ++j)
            ASSERT_EQ(t.less(hs[i], hs[j]), ranks[i] < ranks[j]);
}

TEST(Treap, RandomEmplacementIsUniform) {
    for (std::size_t base : {1u, 3u}) {
        std::vector<int> hits(base + 1, 0);
        const int trials = 10000;
        for (int s = 0; s < trials; ++s) {
            std::mt19937_64 rng(1000 + s);
            Treap t(s);
            for (std::size_t i = 1; i <= base; ++i) t.emplace_at(i);
            hits[t.rank(t.emplace_random(rng)) - 1]++;
        }
        for (int h : hits) EXPECT_NEAR(static_cast<double>(h) / trials, 1.0 / (base + 1), 0.02);
    }
    Treap empty(1);
    std::mt19937_64 rng(1);
    EXPECT_EQ(empty.rank(empty.emplace_random(rng)), 1u);
}

TEST(Treap, DepthIsLogarithmic) {
    const std::size_t n = 1 << 14;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        std::mt19937_64 rng(seed);
        Treap t(seed);
        for (std::size_t i = 0; i < n; ++i) t.emplace_random(rng);
        EXPECT_LE(t.max_depth(), 4 * 14u);
    }
}

TEST(Treap, KeyRewritesGrowSlowly) {
    auto mean_rewrites = [](std::size_t n) {
        double total = 0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            std::mt19937_64 rng(seed);
            Treap t(seed);
            for (std::size_t i = 0; i < n; ++i) t.emplace_random(rng);
            total += static_cast<double>(t.rewritten_keys()) / n;
        }
        return total / 5;
    };
    double small = mean_rewrites(1 << 10), large = mean_rewrites(1 << 14);
    EXPECT_LE(large / small, 2.0 * 14 / 10);
}

TEST(Treap, KeysFollowSequenceOrder) {
    Treap t(10);
    std::mt19937_64 rng(10);
    for (int i = 0; i < 30; ++i) t.emplace_random(rng);
    EXPECT_TRUE(t.audit().empty());
    auto seq = t.in_order();
    for (std::size_t i = 1; i < seq.size(); ++i) EXPECT_LT(t.key(seq[i - 1]), t.key(seq[i]));
}
