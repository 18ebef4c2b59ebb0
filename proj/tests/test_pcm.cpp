#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "jodstudy/pcm.hpp"

using namespace jodstudy;

namespace {
const ComparisonPair kAB{"S:a:b", "S", "a", "b", PairKind::Normal, Side::None};
}

TEST(Accumulate, TieSplitsHalf) {
    const auto pcm = accumulate(Pcm({"a", "b"}), kAB, 0);
    EXPECT_EQ(pcm.wins(0, 1), 0.5);
    EXPECT_EQ(pcm.wins(1, 0), 0.5);
    EXPECT_EQ(pcm.totals(0, 1), 1.0);
    EXPECT_EQ(pcm.totals(1, 0), 1.0);
}

TEST(Accumulate, SymmetricOutcome) {
    Pcm pcm({"a", "b"});
    for (int k = 0; k < 4; ++k) pcm = accumulate(pcm, kAB, -1);
    for (int k = 0; k < 4; ++k) pcm = accumulate(pcm, kAB, +1);
    for (int k = 0; k < 2; ++k) pcm = accumulate(pcm, kAB, 0);
    EXPECT_EQ(pcm.wins(0, 1), 5.0);
    EXPECT_EQ(pcm.totals(0, 1), 10.0);
    EXPECT_EQ(empirical_prob(pcm, 0, 1), 0.5);
}

TEST(Accumulate, LeftWinsCountForLeft) {
    Pcm pcm({"a", "b"});
    for (int k = 0; k < 7; ++k) pcm = accumulate(pcm, kAB, -1);
    for (int k = 0; k < 3; ++k) pcm = accumulate(pcm, kAB, +1);
    EXPECT_DOUBLE_EQ(empirical_prob(pcm, "a", "b"), 0.7);
}

TEST(Accumulate, UnknownCondition) {
    const ComparisonPair bad{"x", "S", "a", "zz", PairKind::Normal, Side::None};
    try {
        accumulate(Pcm({"a", "b"}), bad, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownCondition);
    }
}

TEST(EmpiricalProb, Examples) {
    Pcm pcm({"a", "b", "c"});
    pcm.set(0, 1, 5, 10);
    pcm.set(0, 2, 15, 20);
    EXPECT_EQ(empirical_prob(pcm, 0, 1), 0.5);
    EXPECT_EQ(empirical_prob(pcm, 0, 2), 0.75);
    try {
        empirical_prob(pcm, 1, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoComparisons);
    }
}

TEST(PcmFile, RoundTripsFractionalCounts) {
    Pcm pcm({"R1V0", "R1V1", "R2V1"});
    pcm.set(0, 1, 12.5, 20);
    pcm.set(1, 2, 0.1, 3);
    const auto text = to_pcm_text(pcm);
    EXPECT_EQ(text.substr(0, text.find('\n')), "R1V0,R1V1,R2V1");
    EXPECT_EQ(from_pcm_text(text), pcm);
}

TEST(PcmFile, RejectsInconsistentMatrices) {
    EXPECT_THROW(from_pcm_text("a,b\n0,3\n1,0\n0,5\n5,0\n"), Error);  // 3 + 1 != 5
    EXPECT_THROW(from_pcm_text("a,b\n0,1\n1,0\n0,2\n"), Error);       // missing row
    EXPECT_THROW(from_pcm_text("a,b\n0,x\n1,0\n0,2\n2,0\n"), Error);
}

TEST(PcmProperty, RandomResponseMultisets) {
    std::mt19937_64 rng(31337);
    const std::vector<std::string> ids = {"c0", "c1", "c2", "c3", "c4"};
    std::uniform_int_distribution<std::size_t> cond(0, ids.size() - 1);
    std::uniform_int_distribution<int> choice(-1, 1), count(1, 80);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::pair<ComparisonPair, int>> responses;
        const int n = count(rng);
        for (int k = 0; k < n; ++k) {
            auto i = cond(rng), j = cond(rng);
            while (j == i) j = cond(rng);
            responses.push_back({{"p", "S", ids[i], ids[j], PairKind::Normal, Side::None}, choice(rng)});
        }
        Pcm a(ids);
        for (const auto& [p, c] : responses) a = accumulate(a, p, c);
        std::shuffle(responses.begin(), responses.end(), rng);
        Pcm b(ids);
        for (const auto& [p, c] : responses) b = accumulate(b, p, c);
        ASSERT_EQ(a, b);
        ASSERT_EQ(a.total_comparisons(), static_cast<double>(n));
        for (std::size_t i = 0; i < ids.size(); ++i) {
            ASSERT_EQ(a.wins(i, i), 0.0);
            for (std::size_t j = 0; j < ids.size(); ++j) {
                if (i == j || a.totals(i, j) == 0.0) continue;
                ASSERT_EQ(a.wins(i, j) + a.wins(j, i), a.totals(i, j));
                ASSERT_DOUBLE_EQ(empirical_prob(a, i, j) + empirical_prob(a, j, i), 1.0);
            }
        }
    }
}
