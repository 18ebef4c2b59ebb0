#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "jodstudy/error.hpp"
#include "jodstudy/model.hpp"

namespace jodstudy {

enum class MatchCategory { PerfectMatch, CloseMismatch, CompleteMismatch };
enum class QuizStatus { InProgress, Qualified, Terminated };

constexpr std::string_view to_string(MatchCategory c) noexcept {
    switch (c) {
        case MatchCategory::PerfectMatch: return "PerfectMatch";
        case MatchCategory::CloseMismatch: return "CloseMismatch";
        case MatchCategory::CompleteMismatch: return "CompleteMismatch";
    }
    return "?";
}

constexpr std::string_view to_string(QuizStatus s) noexcept {
    switch (s) {
        case QuizStatus::InProgress: return "InProgress";
        case QuizStatus::Qualified: return "Qualified";
        case QuizStatus::Terminated: return "Terminated";
    }
    return "?";
}

struct QuizWeights {
    double perfect = 1.0;
    double close = 0.25;
    double complete = 0.0;
};

struct QuizConfig {
    int window = 10;
    double threshold = 60.0;  // percent, compared strictly
    int min_pairs = 6;
    int max_pairs = 20;
    QuizWeights weights;

    void validate() const {
        if (window < 1) throw Error(ErrorCode::InvalidConfig, "quiz window must be >= 1");
        if (min_pairs < 1 || min_pairs > max_pairs)
            throw Error(ErrorCode::InvalidConfig, "quiz requires 1 <= min_pairs <= max_pairs");
        if (!(threshold > 0.0 && threshold < 100.0))
            throw Error(ErrorCode::InvalidConfig, "quiz threshold must be in (0, 100)");
    }
};

struct QuizState {
    std::vector<double> history;
    QuizStatus status = QuizStatus::InProgress;
};

inline MatchCategory classify_response(Side expected_winner, int choice) {
    validate_choice(choice);
    if (choice == 0) return MatchCategory::CloseMismatch;
    const Side chosen = choice < 0 ? Side::Left : Side::Right;
    return chosen == expected_winner ? MatchCategory::PerfectMatch : MatchCategory::CompleteMismatch;
}

inline double score_of(MatchCategory category, const QuizConfig& config = {}) {
    switch (category) {
        case MatchCategory::PerfectMatch: return config.weights.perfect;
        case MatchCategory::CloseMismatch: return config.weights.close;
        case MatchCategory::CompleteMismatch: return config.weights.complete;
    }
    return 0.0;
}

/// Percent mean of the trailing min(window, size) scores. A short history
/// averages over what is there, which is what allows qualifying before a
/// full window has been seen.
inline double rolling_score(std::span<const double> history, int window) {
    if (history.empty()) throw Error(ErrorCode::EmptyHistory, "rolling score of empty history");
    if (window < 1) throw Error(ErrorCode::InvalidConfig, "window must be >= 1");
    const std::size_t take = std::min(history.size(), static_cast<std::size_t>(window));
    const auto tail = history.last(take);
    return 100.0 * std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(take);
}

inline QuizState quiz_step(QuizState state, MatchCategory category, const QuizConfig& config = {}) {
    if (state.status != QuizStatus::InProgress)
        throw Error(ErrorCode::QuizAlreadyFinished, "quiz already " + std::string(to_string(state.status)));
    state.history.push_back(score_of(category, config));
    const auto pairs = static_cast<int>(state.history.size());
    if (pairs >= config.min_pairs && rolling_score(state.history, config.window) > config.threshold)
        state.status = QuizStatus::Qualified;
    else if (pairs >= config.max_pairs)
        state.status = QuizStatus::Terminated;
    return state;
}

struct QuizFeedback {
    MatchCategory category = MatchCategory::PerfectMatch;
    std::string expected_winner;  // variant id of the better encode
    std::string left_id;
    int left_resolution = 0;
    int left_maxrate = 0;
    std::string right_id;
    int right_resolution = 0;
    int right_maxrate = 0;
    bool review_prompt = false;
    std::string message;
};

namespace detail {
inline std::string describe(const EncodeVariant& v) {
    return v.id + " (" + std::to_string(v.resolution) + "p, " + std::to_string(v.maxrate) + " kbps)";
}
}  // namespace detail

/// Builds the post-answer feedback card shown during the quiz.
inline QuizFeedback feedback_message(const ComparisonPair& pair, const EncodeVariant& left,
                                     const EncodeVariant& right, MatchCategory category) {
    QuizFeedback fb;
    fb.category = category;
    fb.left_id = left.id;
    fb.left_resolution = left.resolution;
    fb.left_maxrate = left.maxrate;
    fb.right_id = right.id;
    fb.right_resolution = right.resolution;
    fb.right_maxrate = right.maxrate;
    const EncodeVariant& better = pair.expected_winner == Side::Right ? right : left;
    const EncodeVariant& worse = pair.expected_winner == Side::Right ? left : right;
    fb.expected_winner = better.id;

    const std::string details = "Video " + std::string(pair.expected_winner == Side::Right ? "2" : "1") + " " +
                                detail::describe(better) + " vs " + detail::describe(worse) +
                                ": maxrate difference " + std::to_string(better.maxrate - worse.maxrate) +
                                " kbps.";
    switch (category) {
        case MatchCategory::PerfectMatch:
            fb.message = "Correct! " + details;
            break;
        case MatchCategory::CloseMismatch:
            fb.review_prompt = true;
            fb.message = "Close: these videos differ clearly in quality. " + details +
                         " Please review the pair again before retrying.";
            break;
        case MatchCategory::CompleteMismatch:
            fb.review_prompt = true;
            fb.message = "Incorrect: the higher-quality video was " + better.id + ". " + details +
                         " Please review the pair again before retrying.";
            break;
    }
    return fb;
}

}  // namespace jodstudy
