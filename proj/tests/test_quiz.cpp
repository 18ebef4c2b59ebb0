#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "jodstudy/quiz.hpp"

using namespace jodstudy;

TEST(Classify, ThreeCategories) {
    EXPECT_EQ(classify_response(Side::Right, +1), MatchCategory::PerfectMatch);
    EXPECT_EQ(classify_response(Side::Right, 0), MatchCategory::CloseMismatch);
    EXPECT_EQ(classify_response(Side::Right, -1), MatchCategory::CompleteMismatch);
    EXPECT_EQ(classify_response(Side::Left, -1), MatchCategory::PerfectMatch);
    EXPECT_EQ(classify_response(Side::Left, +1), MatchCategory::CompleteMismatch);
}

TEST(Score, DefaultWeights) {
    EXPECT_EQ(score_of(MatchCategory::PerfectMatch), 1.0);
    EXPECT_EQ(score_of(MatchCategory::CloseMismatch), 0.25);
    EXPECT_EQ(score_of(MatchCategory::CompleteMismatch), 0.0);
}

TEST(RollingScore, Examples) {
    EXPECT_DOUBLE_EQ(rolling_score(std::vector<double>(6, 1.0), 10), 100.0);
    EXPECT_DOUBLE_EQ(rolling_score(std::vector<double>{0, 0, 0, 0, 1, 1, 1, 1, 1, 1}, 10), 60.0);
    EXPECT_DOUBLE_EQ(rolling_score(std::vector<double>(10, 0.25), 10), 25.0);
}

TEST(RollingScore, UsesOnlyTrailingWindow) {
    std::vector<double> h(5, 0.0);
    h.insert(h.end(), 10, 1.0);
    EXPECT_DOUBLE_EQ(rolling_score(h, 10), 100.0);
}

TEST(RollingScore, EmptyHistoryFails) {
    try {
        rolling_score(std::vector<double>{}, 10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyHistory);
    }
}

namespace {
QuizState run(const std::vector<MatchCategory>& seq, const QuizConfig& cfg = {}) {
    QuizState s;
    for (auto c : seq) {
        if (s.status != QuizStatus::InProgress) break;
        s = quiz_step(s, c, cfg);
    }
    return s;
}
}  // namespace

TEST(QuizStep, SixPerfectQualifiesAtSix) {
    QuizState s;
    for (int k = 0; k < 5; ++k) {
        s = quiz_step(s, MatchCategory::PerfectMatch);
        EXPECT_EQ(s.status, QuizStatus::InProgress);
    }
    s = quiz_step(s, MatchCategory::PerfectMatch);
    EXPECT_EQ(s.status, QuizStatus::Qualified);
    EXPECT_EQ(s.history.size(), 6u);
}

TEST(QuizStep, ExactlySixtyDoesNotQualify) {
    std::vector<MatchCategory> seq(4, MatchCategory::CompleteMismatch);
    seq.insert(seq.end(), 6, MatchCategory::PerfectMatch);
    const auto s = run(seq);
    EXPECT_EQ(s.history.size(), 10u);
    EXPECT_EQ(s.status, QuizStatus::InProgress);
    EXPECT_DOUBLE_EQ(rolling_score(s.history, 10), 60.0);
}

TEST(QuizStep, TwentyTiesTerminate) {
    QuizState s;
    for (int k = 0; k < 19; ++k) s = quiz_step(s, MatchCategory::CloseMismatch);
    EXPECT_EQ(s.status, QuizStatus::InProgress);
    s = quiz_step(s, MatchCategory::CloseMismatch);
    EXPECT_EQ(s.status, QuizStatus::Terminated);
    EXPECT_EQ(s.history.size(), 20u);
}

TEST(QuizStep, FinishedQuizRejectsSteps) {
    auto s = run(std::vector<MatchCategory>(6, MatchCategory::PerfectMatch));
    try {
        quiz_step(s, MatchCategory::PerfectMatch);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::QuizAlreadyFinished);
    }
}

TEST(QuizStep, RandomSequencesReachOneTerminalStatus) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> pick(0, 2);
    const QuizConfig cfg;
    for (int trial = 0; trial < 2000; ++trial) {
        QuizState s;
        while (s.status == QuizStatus::InProgress) {
            s = quiz_step(s, static_cast<MatchCategory>(pick(rng)), cfg);
            const double r = rolling_score(s.history, cfg.window);
            ASSERT_GE(r, 0.0);
            ASSERT_LE(r, 100.0);
        }
        const auto n = static_cast<int>(s.history.size());
        ASSERT_LE(n, cfg.max_pairs);
        if (s.status == QuizStatus::Qualified) ASSERT_GE(n, cfg.min_pairs);
        if (s.status == QuizStatus::Terminated) ASSERT_EQ(n, cfg.max_pairs);
    }
}

TEST(QuizStep, RaisingAScoreNeverLosesQualification) {
    // Replace one category by a better one; if the original sequence
    // qualified at step k, the improved one must have qualified by step k.
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> pick(0, 2);
    auto better = [](MatchCategory c) {
        return c == MatchCategory::CompleteMismatch ? MatchCategory::CloseMismatch : MatchCategory::PerfectMatch;
    };
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<MatchCategory> seq(20);
        for (auto& c : seq) c = static_cast<MatchCategory>(pick(rng));
        const auto base = run(seq);
        if (base.status != QuizStatus::Qualified) continue;
        const auto k = base.history.size();
        auto improved = seq;
        std::uniform_int_distribution<std::size_t> at(0, k - 1);
        const auto pos = at(rng);
        improved[pos] = better(improved[pos]);
        std::vector<MatchCategory> prefix(improved.begin(), improved.begin() + static_cast<long>(k));
        EXPECT_EQ(run(prefix).status, QuizStatus::Qualified);
    }
}

TEST(Feedback, CompleteMismatchNamesReferenceAndRates) {
    const EncodeVariant r1v0{"R1V0", "S", 1, 0, 2160, 100000, 4};
    const EncodeVariant r3v1{"R3V1", "S", 3, 1, 1080, 5000, 22};
    const ComparisonPair pair{"S:R1V0:R3V1", "S", "R1V0", "R3V1", PairKind::Normal, Side::Left};
    const auto fb = feedback_message(pair, r1v0, r3v1, MatchCategory::CompleteMismatch);
    EXPECT_EQ(fb.expected_winner, "R1V0");
    EXPECT_EQ(fb.left_maxrate, 100000);
    EXPECT_EQ(fb.right_maxrate, 5000);
    EXPECT_EQ(fb.left_resolution, 2160);
    EXPECT_EQ(fb.right_resolution, 1080);
    EXPECT_NE(fb.message.find("100000"), std::string::npos);
    EXPECT_NE(fb.message.find("5000"), std::string::npos);
    EXPECT_TRUE(fb.review_prompt);
}

TEST(Feedback, PerfectAndCloseCases) {
    const EncodeVariant a{"R1V0", "S", 1, 0, 2160, 100000, 4};
    const EncodeVariant b{"R3V1", "S", 3, 1, 1080, 5000, 22};
    const ComparisonPair pair{"p", "S", "R1V0", "R3V1", PairKind::Normal, Side::Left};
    const auto ok = feedback_message(pair, a, b, MatchCategory::PerfectMatch);
    EXPECT_FALSE(ok.review_prompt);
    EXPECT_EQ(ok.message.rfind("Correct!", 0), 0u);
    EXPECT_EQ(ok.right_maxrate, 5000);
    const auto close = feedback_message(pair, a, b, MatchCategory::CloseMismatch);
    EXPECT_TRUE(close.review_prompt);
    EXPECT_EQ(close.category, MatchCategory::CloseMismatch);
}

TEST(QuizConfig, Validation) {
    QuizConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.min_pairs = 30;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.threshold = 100.0;
    EXPECT_THROW(cfg.validate(), Error);
}
