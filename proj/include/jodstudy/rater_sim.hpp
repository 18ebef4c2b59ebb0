#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jodstudy/attention.hpp"
#include "jodstudy/config.hpp"
#include "jodstudy/error.hpp"
#include "jodstudy/golden_pool.hpp"
#include "jodstudy/jod_solver.hpp"
#include "jodstudy/metrics.hpp"
#include "jodstudy/model.hpp"
#include "jodstudy/pcm.hpp"
#include "jodstudy/quiz.hpp"

namespace jodstudy {

/// Simulated Thurstonian observer. Each stimulus is perceived with Gaussian
/// noise of standard deviation `sensitivity`, so a difference carries
/// sensitivity * sqrt(2).
struct RaterProfile {
    std::string name = "rater";
    Group group = Group::C;
    double sensitivity = 1.0;
    double tie_margin = 0.0;
    double lapse_prob = 0.0;
    bool spammer = false;
    std::uint64_t rng_seed = 0;
    int replay_max = 0;                  // replays drawn uniformly from [0, replay_max]
    std::int64_t elapsed_min_ms = 8000;  // per-answer time drawn uniformly from [min, max]
    std::int64_t elapsed_max_ms = 8000;

    void validate() const {
        if (lapse_prob < 0.0 || lapse_prob > 1.0) throw Error(ErrorCode::InvalidConfig, "lapse_prob must be in [0, 1]");
        if (tie_margin < 0.0) throw Error(ErrorCode::InvalidConfig, "tie_margin must be >= 0");
        if (!spammer && !(sensitivity > 0.0)) throw Error(ErrorCode::InvalidConfig, "sensitivity must be > 0");
        if (replay_max < 0 || elapsed_min_ms < 0 || elapsed_max_ms < elapsed_min_ms)
            throw Error(ErrorCode::InvalidConfig, "invalid replay/elapsed ranges");
    }
};

/// Per-stimulus sensitivity whose difference noise equals the solver's sigma.
inline double calibrated_sensitivity(double jnd_probability = 0.75) {
    return sigma_from_jnd(jnd_probability) / std::numbers::sqrt2;
}

/// True quality per condition, keyed by source then variant id.
class GroundTruth {
public:
    void set(const std::string& source, const std::string& variant, double q) { values_[source][variant] = q; }

    double at(const std::string& source, const std::string& variant) const {
        auto s = values_.find(source);
        if (s != values_.end()) {
            auto v = s->second.find(variant);
            if (v != s->second.end()) return v->second;
        }
        throw Error(ErrorCode::UnknownCondition, "no ground truth for " + source + "/" + variant);
    }

    /// Assigns `scores[k]` to the k-th variant of every ladder.
    static GroundTruth per_rung(const std::vector<QualityLadder>& ladders, const std::vector<double>& scores) {
        GroundTruth t;
        for (const auto& l : ladders) {
            if (scores.size() < l.variants.size())
                throw Error(ErrorCode::InvalidConfig, "ground truth shorter than ladder '" + l.source_id + "'");
            for (std::size_t k = 0; k < l.variants.size(); ++k) t.set(l.source_id, l.variants[k].id, scores[k]);
        }
        return t;
    }

private:
    std::map<std::string, std::map<std::string, double>> values_;
};

inline int sample_choice(const RaterProfile& profile, double q_left, double q_right, std::mt19937_64& rng) {
    if (profile.spammer) return 0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (profile.lapse_prob > 0.0 && unit(rng) < profile.lapse_prob) {
        std::uniform_int_distribution<int> any(-1, 1);
        return any(rng);
    }
    std::normal_distribution<double> noise(q_right - q_left, profile.sensitivity * std::numbers::sqrt2);
    const double d = noise(rng);
    if (std::abs(d) < profile.tie_margin) return 0;
    return d > 0.0 ? +1 : -1;
}

inline bool is_correct(Side expected_winner, int choice) {
    return (choice < 0 && expected_winner == Side::Left) || (choice > 0 && expected_winner == Side::Right);
}

struct SimResponse {
    ComparisonPair pair;
    Phase phase = Phase::Main;
    RaterResponse response;
};

struct SessionResult {
    RaterProfile profile;
    std::vector<SimResponse> responses;
    std::optional<QuizState> quiz;
    std::vector<double> attention_trajectory;  // empty when the main phase never ran
    int attention_updates = 0;
    bool disqualified = false;

    SessionRecord record() const {
        SessionRecord r;
        r.session_id = profile.name;
        r.group = profile.group;
        r.attention_trajectory = attention_trajectory;
        for (const auto& sr : responses) {
            if (sr.phase == Phase::Main) r.main_choices.push_back(sr.response.choice);
            r.total_replays += sr.response.replay_count;
            r.total_elapsed_ms += sr.response.elapsed_ms;
        }
        return r;
    }
};

struct ProtocolConfig {
    QuizConfig quiz;
    std::vector<ComparisonPair> quiz_pairs;
    GroupPolicy policy;
};

inline ProtocolConfig protocol_for(const StudyConfig& study, Group group) {
    return {study.quiz, study.effective_quiz_pairs(), study.policy(group)};
}

/// Plays one participant through the protocol: the quiz (if the group has
/// one), then every main pair in order. Golden pairs drive the attention
/// score; when `pool` is given and the group feeds it, every main answer is
/// recorded there as it happens.
inline SessionResult run_session(const RaterProfile& profile, const std::vector<ComparisonPair>& playlist,
                                 const GroundTruth& truth, const ProtocolConfig& protocol,
                                 GoldenPool* pool = nullptr) {
    profile.validate();
    SessionResult out;
    out.profile = profile;
    std::mt19937_64 rng(profile.rng_seed);
    std::uniform_int_distribution<int> replays(0, profile.replay_max);
    std::uniform_int_distribution<std::int64_t> elapsed(profile.elapsed_min_ms, profile.elapsed_max_ms);

    auto answer = [&](const ComparisonPair& pair, Phase phase) {
        const int choice =
            sample_choice(profile, truth.at(pair.source_id, pair.left), truth.at(pair.source_id, pair.right), rng);
        RaterResponse r{pair.pair_id, profile.name, choice, replays(rng), elapsed(rng)};
        out.responses.push_back({pair, phase, r});
        return choice;
    };

    if (protocol.policy.quiz) {
        if (protocol.quiz_pairs.empty()) throw Error(ErrorCode::InvalidConfig, "quiz enabled without quiz pairs");
        QuizState quiz;
        for (std::size_t k = 0; quiz.status == QuizStatus::InProgress; ++k) {
            const auto& pair = protocol.quiz_pairs[k % protocol.quiz_pairs.size()];
            const int choice = answer(pair, Phase::Quiz);
            quiz = quiz_step(std::move(quiz), classify_response(pair.expected_winner, choice), protocol.quiz);
        }
        out.disqualified = quiz.status == QuizStatus::Terminated;
        out.quiz = std::move(quiz);
        if (out.disqualified) return out;
    }

    AttentionState attention;
    out.attention_trajectory.push_back(attention.raw);
    for (const auto& pair : playlist) {
        const int choice = answer(pair, Phase::Main);
        if (pair.is_golden()) {
            attention = update_attention(attention, is_correct(pair.expected_winner, choice));
            ++out.attention_updates;
        }
        out.attention_trajectory.push_back(attention.raw);
        if (pool && protocol.policy.feeds_golden_pool) pool->record_and_evaluate(pair.pair_id, choice);
    }
    return out;
}

struct StudyDataset {
    std::vector<SessionResult> sessions;
    std::map<std::string, Pcm> pcms;  // per source, main-phase answers of qualified sessions
    std::map<std::string, GoldenPool::Entry> pool;
};

inline Pcm empty_pcm(const QualityLadder& ladder) {
    std::vector<std::string> ids;
    for (const auto& v : ladder.variants) ids.push_back(v.id);
    return Pcm(std::move(ids));
}

/// Runs every profile in order. Session k gets the study playlist shuffled
/// with seed + k, with pool verdicts at that moment applied, so promotion
/// timing is fixed by profile order.
inline StudyDataset run_group(const std::vector<RaterProfile>& profiles, const StudyConfig& study,
                              const GroundTruth& truth) {
    StudyDataset data;
    if (profiles.empty()) return data;
    study.validate();
    for (const auto& l : study.ladders) data.pcms.emplace(l.source_id, empty_pcm(l));
    GoldenPool pool(study.golden_thresholds());
    for (std::size_t k = 0; k < profiles.size(); ++k) {
        auto playlist = apply_pool(build_study_playlist(study.ladders, study.golden_per_source, study.rng_seed + k), pool);
        auto result = run_session(profiles[k], playlist, truth, protocol_for(study, profiles[k].group), &pool);
        for (const auto& r : result.responses)
            if (r.phase == Phase::Main)
                data.pcms[r.pair.source_id] = accumulate(std::move(data.pcms[r.pair.source_id]), r.pair, r.response.choice);
        data.sessions.push_back(std::move(result));
    }
    data.pool = pool.snapshot();
    return data;
}

/// Cohort description used by simulation configs: `count` raters sharing a profile,
/// seeds derived from `base_seed` + index.
struct Cohort {
    std::string name = "cohort";
    int count = 0;
    RaterProfile profile;
};

inline std::vector<RaterProfile> expand_cohorts(const std::vector<Cohort>& cohorts) {
    std::vector<RaterProfile> out;
    for (const auto& c : cohorts) {
        for (int k = 0; k < c.count; ++k) {
            RaterProfile p = c.profile;
            p.name = c.name + "-" + std::to_string(k + 1);
            p.rng_seed = c.profile.rng_seed + static_cast<std::uint64_t>(k);
            out.push_back(std::move(p));
        }
    }
    return out;
}

}  // namespace jodstudy
