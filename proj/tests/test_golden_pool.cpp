#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "jodstudy/golden_pool.hpp"

using namespace jodstudy;

namespace {

PairStats from(int right, int tie, int left) {
    PairStats s;
    for (int k = 0; k < right; ++k) s = record(s, +1);
    for (int k = 0; k < tie; ++k) s = record(s, 0);
    for (int k = 0; k < left; ++k) s = record(s, -1);
    return s;
}

// Two-pass population mean/std straight from the raw values.
std::pair<double, double> direct_moments(const std::vector<int>& xs) {
    double mean = 0.0;
    for (int x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (int x : xs) var += (x - mean) * (x - mean);
    return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

}  // namespace

TEST(PairStats, SingleObservation) {
    const auto s = record({}, -1);
    EXPECT_EQ(s.n, 1);
    EXPECT_EQ(s.mean, -1.0);
    EXPECT_EQ(s.stddev, 0.0);
}

TEST(PairStats, TwoRightOneLeft) {
    const auto s = record(record(record({}, +1), +1), -1);
    EXPECT_EQ(s.n, 3);
    EXPECT_NEAR(s.mean, 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(s.stddev, std::sqrt(8.0 / 9.0), 1e-12);
    EXPECT_NEAR(s.stddev, 0.9428, 1e-4);
}

TEST(PairStats, SymmetricSplit) {
    const auto s = from(10, 0, 10);
    EXPECT_EQ(s.mean, 0.0);
    EXPECT_NEAR(s.stddev, 1.0, 1e-12);
}

TEST(PairStats, MatchesDirectComputationAndIsOrderIndependent) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> choice(-1, 1), len(1, 60);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<int> xs(static_cast<std::size_t>(len(rng)));
        for (auto& x : xs) x = choice(rng);
        PairStats a;
        for (int x : xs) a = record(a, x);
        const auto [mean, sd] = direct_moments(xs);
        EXPECT_NEAR(a.mean, mean, 1e-12);
        EXPECT_NEAR(a.stddev, sd, 1e-12);
        std::shuffle(xs.begin(), xs.end(), rng);
        PairStats b;
        for (int x : xs) b = record(b, x);
        EXPECT_EQ(a, b);
    }
}

TEST(Agreement, Examples) {
    EXPECT_DOUBLE_EQ(agreement(from(16, 2, 2)), 0.80);
    EXPECT_DOUBLE_EQ(agreement(from(10, 0, 10)), 0.50);
    EXPECT_DOUBLE_EQ(agreement(from(20, 0, 0)), 1.0);
    try {
        agreement(PairStats{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyStats);
    }
}

TEST(Evaluate, Examples) {
    EXPECT_EQ(evaluate(from(20, 0, 0)), (GoldenStatus{GoldenState::Promoted, Side::Right}));
    EXPECT_EQ(evaluate(from(10, 0, 10)).state, GoldenState::Excluded);

    const auto noisy = from(16, 2, 2);
    EXPECT_NEAR(noisy.mean, 0.70, 1e-12);
    EXPECT_NEAR(noisy.stddev, std::sqrt(8.2 / 20.0), 1e-12);
    EXPECT_NEAR(noisy.stddev, 0.640, 1e-3);
    EXPECT_EQ(evaluate(noisy).state, GoldenState::Excluded);

    const auto strong = from(19, 1, 0);
    EXPECT_NEAR(strong.stddev, std::sqrt(0.95 / 20.0), 1e-12);
    EXPECT_NEAR(strong.stddev, 0.218, 1e-3);
    EXPECT_EQ(evaluate(strong), (GoldenStatus{GoldenState::Promoted, Side::Right}));
}

TEST(Evaluate, PendingBelowMinRatings) {
    EXPECT_EQ(evaluate(from(19, 0, 0)).state, GoldenState::Pending);
    EXPECT_EQ(evaluate(from(5, 0, 0), 5).state, GoldenState::Promoted);
}

TEST(Evaluate, GrayZoneStaysPending) {
    // mean 0.6, std 0.49 (between 0.3 and 0.5)
    const auto s = from(12, 8, 0);
    EXPECT_GT(s.stddev, 0.3);
    EXPECT_LT(s.stddev, 0.5);
    EXPECT_EQ(evaluate(s).state, GoldenState::Pending);
}

TEST(Evaluate, PropertiesOverAllCountTriples) {
    for (int r = 0; r <= 30; ++r) {
        for (int t = 0; t + r <= 30; ++t) {
            for (int l = 0; l + t + r <= 30; ++l) {
                if (r + t + l == 0) continue;
                const auto s = from(r, t, l);
                const auto st = evaluate(s);
                if (s.n < 20) EXPECT_NE(st.state, GoldenState::Promoted);
                const bool promote = std::abs(s.mean) > 0.5 && s.stddev < 0.3;
                const bool exclude = std::abs(s.mean) < 0.5 || s.stddev > 0.5;
                EXPECT_FALSE(promote && exclude);
                // Negating all answers mirrors the winner and keeps other states.
                const auto mirrored = evaluate(from(l, t, r));
                if (st.state == GoldenState::Promoted) {
                    EXPECT_EQ(mirrored.state, GoldenState::Promoted);
                    EXPECT_NE(mirrored.winner, st.winner);
                } else {
                    EXPECT_EQ(mirrored.state, st.state);
                }
            }
        }
    }
}

TEST(GoldenPool, ReportsStatusChanges) {
    GoldenPool pool;
    GoldenPool::Update last{};
    for (int k = 0; k < 20; ++k) last = pool.record_and_evaluate("p", -1);
    EXPECT_TRUE(last.changed());
    EXPECT_EQ(last.after, (GoldenStatus{GoldenState::Promoted, Side::Left}));
    EXPECT_FALSE(pool.record_and_evaluate("p", -1).changed());
    EXPECT_EQ(pool.status("missing").state, GoldenState::Pending);
}

TEST(GoldenPool, ApplyPoolPromotesAndDemotes) {
    GoldenPool pool;
    for (int k = 0; k < 20; ++k) pool.record_and_evaluate("n", +1);
    for (int k = 0; k < 20; ++k) pool.record_and_evaluate("g", k % 2 ? 1 : -1);
    std::vector<ComparisonPair> playlist = {{"n", "S", "a", "b", PairKind::Normal, Side::None},
                                            {"g", "S", "a", "c", PairKind::SeedGolden, Side::Left},
                                            {"x", "S", "b", "c", PairKind::Normal, Side::None}};
    const auto out = apply_pool(playlist, pool);
    EXPECT_EQ(out[0].kind, PairKind::PromotedGolden);
    EXPECT_EQ(out[0].expected_winner, Side::Right);
    EXPECT_EQ(out[1].kind, PairKind::Normal);
    EXPECT_EQ(out[2], playlist[2]);
}
