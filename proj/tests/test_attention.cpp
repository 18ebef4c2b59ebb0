#include <random>

#include <gtest/gtest.h>

#include "jodstudy/attention.hpp"

using namespace jodstudy;

TEST(Attention, FirstMistakeCostsOne) {
    const auto s = update_attention({100.0, 0, 0}, false);
    EXPECT_EQ(s, (AttentionState{99.0, 1, 0}));
}

TEST(Attention, SecondMistakeCostsOnePointFour) {
    const auto s = update_attention({99.0, 1, 0}, false);
    EXPECT_DOUBLE_EQ(s.raw, 97.6);
    EXPECT_EQ(s.mistake_count, 2);
    EXPECT_EQ(s.consecutive_correct, 0);
}

TEST(Attention, FirstCorrectEarnsOne) {
    const auto s = update_attention({100.0, 0, 0}, true);
    EXPECT_EQ(s, (AttentionState{101.0, 0, 1}));
}

TEST(Attention, MixedTrace) {
    AttentionState s;
    const bool seq[] = {true, false, false, true, true};
    const double expected[] = {101.0, 100.0, 98.6, 99.6, 100.8};
    for (int k = 0; k < 5; ++k) {
        s = update_attention(s, seq[k]);
        EXPECT_EQ(s.raw, expected[k]) << "step " << k;
    }
    EXPECT_EQ(s.mistake_count, 0);
    EXPECT_EQ(s.consecutive_correct, 2);
}

TEST(Attention, DisplayClamps) {
    EXPECT_EQ(display_score(145.2), 100.0);
    EXPECT_EQ(display_score(-3.0), 0.0);
    EXPECT_EQ(display_score(87.2), 87.2);
}

TEST(Attention, ConsecutiveMistakesClosedForm) {
    for (int k = 1; k <= 30; ++k) {
        AttentionState s;
        for (int i = 0; i < k; ++i) s = update_attention(s, false);
        EXPECT_NEAR(100.0 - s.raw, k + 0.2 * k * (k - 1), 1e-9) << k;
    }
}

TEST(Attention, ConsecutiveCorrectClosedForm) {
    for (int k = 1; k <= 30; ++k) {
        AttentionState s;
        for (int i = 0; i < k; ++i) s = update_attention(s, true);
        EXPECT_NEAR(s.raw - 100.0, k + 0.1 * k * (k - 1), 1e-9) << k;
    }
}

TEST(Attention, RandomOutcomesKeepCountersAndSingleTerm) {
    std::mt19937_64 rng(5);
    std::bernoulli_distribution coin(0.6);
    AttentionState s;
    for (int step = 0; step < 5000; ++step) {
        const bool correct = coin(rng);
        const auto next = update_attention(s, correct);
        ASSERT_GE(next.mistake_count, 0);
        ASSERT_GE(next.consecutive_correct, 0);
        if (correct) {
            ASSERT_EQ(next.consecutive_correct, s.consecutive_correct + 1);
            ASSERT_NEAR(next.raw - s.raw, attention_bonus(next.consecutive_correct), 1e-9);
        } else {
            ASSERT_EQ(next.consecutive_correct, 0);
            ASSERT_NEAR(s.raw - next.raw, attention_penalty(next.mistake_count), 1e-9);
        }
        s = next;
    }
}

TEST(Attention, DisplayIdempotentAndMonotone) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> raw(-500.0, 500.0);
    for (int k = 0; k < 1000; ++k) {
        const double a = raw(rng), b = raw(rng);
        EXPECT_EQ(display_score(display_score(a)), display_score(a));
        if (a <= b) EXPECT_LE(display_score(a), display_score(b));
    }
}
