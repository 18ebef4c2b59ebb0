#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jodstudy/attention.hpp"
#include "jodstudy/config.hpp"
#include "jodstudy/error.hpp"
#include "jodstudy/event_log.hpp"
#include "jodstudy/golden_pool.hpp"
#include "jodstudy/jod_solver.hpp"
#include "jodstudy/metrics.hpp"
#include "jodstudy/model.hpp"
#include "jodstudy/pcm.hpp"
#include "jodstudy/quiz.hpp"

namespace jodstudy {

/// What the client sees for the next comparison. Pair kind is deliberately absent.
struct PairDescriptor {
    bool done = false;
    std::string pair_id;
    Phase phase = Phase::Main;
    std::string first_locator;
    std::string second_locator;

    nlohmann::json to_json() const {
        if (done) return {{"done", true}, {"phase", "Done"}};
        return {{"done", false},
                {"pair_id", pair_id},
                {"phase", std::string(to_string(phase))},
                {"first", first_locator},
                {"second", second_locator}};
    }
};

struct SubmitOutcome {
    Phase phase = Phase::Main;
    std::optional<QuizFeedback> feedback;
    std::optional<double> attention_display;
    bool done = false;

    nlohmann::json to_json() const {
        nlohmann::json j = {{"phase", std::string(to_string(phase))}, {"done", done}};
        if (feedback) {
            const auto& f = *feedback;
            j["feedback"] = {{"category", std::string(to_string(f.category))},
                             {"expected_winner", f.expected_winner},
                             {"first", {{"id", f.left_id}, {"resolution", f.left_resolution}, {"maxrate", f.left_maxrate}}},
                             {"second", {{"id", f.right_id}, {"resolution", f.right_resolution}, {"maxrate", f.right_maxrate}}},
                             {"review_prompt", f.review_prompt},
                             {"message", f.message}};
        }
        if (attention_display) j["attention_display"] = *attention_display;
        return j;
    }
};

/// Export bundle: relative file name -> file contents.
using Bundle = std::map<std::string, std::string>;

inline void write_bundle(const Bundle& bundle, const std::filesystem::path& dir) {
    for (const auto& [name, content] : bundle) {
        const auto path = dir / name;
        std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write '" + path.string() + "'");
        out << content;
    }
}

/// Event-sourced study server core. Every mutating call appends its command
/// record (and any derived records) to the log while holding the service
/// lock, so the log order is exactly the order effects were applied and a
/// replay rebuilds identical state.
class StudyService {
public:
    using Clock = std::function<std::int64_t()>;

    explicit StudyService(std::string log_path = {}, Clock clock = {})
        : log_(std::move(log_path)), clock_(clock ? std::move(clock) : Clock(&system_now_ms)) {}

    std::string create_study(const StudyConfig& config) {
        std::lock_guard lock(mutex_);
        return create_study_locked(config, clock_());
    }

    Session create_session(const std::string& study_id, Group group) {
        std::lock_guard lock(mutex_);
        return create_session_locked(study_id, group, clock_());
    }

    PairDescriptor next_pair(const std::string& session_id) const {
        std::lock_guard lock(mutex_);
        const auto& st = session_at(session_id);
        const auto& s = st.session;
        if (s.phase == Phase::Disqualified) throw Error(ErrorCode::SessionFinished, session_id + " was disqualified");
        if (s.phase == Phase::Done || s.cursor >= s.playlist.size()) return {.done = true};
        const auto& pair = s.playlist[s.cursor];
        const auto& study = studies_.at(st.study_id);
        return {false, pair.pair_id, s.cursor < s.quiz_length ? Phase::Quiz : Phase::Main,
                locator(study->config, pair.source_id, pair.left), locator(study->config, pair.source_id, pair.right)};
    }

    SubmitOutcome submit_response(const std::string& session_id, const RaterResponse& response) {
        std::lock_guard lock(mutex_);
        return submit_locked(session_id, response, clock_());
    }

    /// Client-facing state. Attention appears only where the group shows it.
    nlohmann::json session_state(const std::string& session_id) const {
        std::lock_guard lock(mutex_);
        const auto& st = session_at(session_id);
        const auto& study = *studies_.at(st.study_id);
        nlohmann::json j = {{"session_id", st.session.session_id},
                            {"study_id", st.study_id},
                            {"group", std::string(to_string(st.session.group))},
                            {"phase", std::string(to_string(st.session.phase))},
                            {"cursor", st.session.cursor},
                            {"playlist_length", st.session.playlist.size()},
                            {"responses", st.session.response_log.size()}};
        if (study.config.policy(st.session.group).show_attention)
            j["attention_display"] = display_score(st.attention);
        if (!st.quiz.history.empty() || st.session.quiz_length > 0) {
            j["quiz_status"] = std::string(to_string(st.quiz.status));
            if (!st.quiz.history.empty()) j["quiz_rolling"] = rolling_score(st.quiz.history, study.config.quiz.window);
        }
        return j;
    }

    Session session(const std::string& session_id) const {
        std::lock_guard lock(mutex_);
        return session_at(session_id).session;
    }

    Bundle export_results(const std::string& study_id) const {
        std::lock_guard lock(mutex_);
        return export_locked(study_id);
    }

    std::vector<std::string> study_ids() const {
        std::lock_guard lock(mutex_);
        std::vector<std::string> ids;
        for (const auto& [id, _] : studies_) ids.push_back(id);
        return ids;
    }

    /// Re-applies command records in order. Derived records (phase changes,
    /// promotions) are regenerated rather than read back.
    void replay(const std::vector<EventRecord>& records) {
        std::lock_guard lock(mutex_);
        for (const auto& rec : records) {
            const auto& p = rec.payload;
            try {
                if (rec.type == "study_created") {
                    create_study_locked(study_config_from_json(p.at("config")), rec.timestamp_ms);
                } else if (rec.type == "session_created") {
                    auto s = create_session_locked(p.at("study_id"), group_from_string(p.at("group").get<std::string>()),
                                                   rec.timestamp_ms);
                    if (s.session_id != p.at("session_id").get<std::string>())
                        throw Error(ErrorCode::MalformedInput, "replayed session id diverged at seq " +
                                                                   std::to_string(rec.sequence));
                } else if (rec.type == "response_submitted") {
                    RaterResponse r{p.at("pair_id"), p.at("session_id"), p.at("choice"), p.at("replay_count"),
                                    p.at("elapsed_ms")};
                    submit_locked(r.session_id, r, rec.timestamp_ms);
                }
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorCode::MalformedInput, "event " + std::to_string(rec.sequence) + ": " + e.what());
            }
        }
    }

    void attach_log_file(const std::string& path) {
        std::lock_guard lock(mutex_);
        log_.attach(path);
    }

    const EventLog& log() const noexcept { return log_; }

    std::string log_text() const {
        std::lock_guard lock(mutex_);
        return log_.to_jsonl();
    }

private:
    struct SessionState {
        Session session;
        std::string study_id;
        std::uint64_t ordinal = 0;
        QuizState quiz;
        AttentionState attention;
        std::vector<double> trajectory;
        std::vector<ComparisonPair> answered;  // parallel to session.response_log
    };

    struct StudyState {
        explicit StudyState(StudyConfig cfg) : config(std::move(cfg)), pool(config.golden_thresholds()) {
            for (const auto& l : config.ladders) {
                std::vector<std::string> ids;
                for (const auto& v : l.variants) ids.push_back(v.id);
                pcms.emplace(l.source_id, Pcm(std::move(ids)));
            }
        }

        StudyConfig config;
        GoldenPool pool;
        std::map<std::string, Pcm> pcms;
        std::vector<std::string> session_ids;  // creation order
    };

    static std::int64_t system_now_ms() {
        using namespace std::chrono;
        return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
    }

    static std::string locator(const StudyConfig& cfg, const std::string& source, const std::string& variant) {
        std::string base = cfg.media_base;
        if (!base.empty() && base.back() != '/') base += '/';
        return base + source + "/" + variant;
    }

    const SessionState& session_at(const std::string& id) const {
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "unknown session '" + id + "'");
        return it->second;
    }

    std::string create_study_locked(const StudyConfig& config, std::int64_t ts) {
        config.validate();
        if (studies_.count(config.study_id))
            throw Error(ErrorCode::InvalidConfig, "study '" + config.study_id + "' already exists");
        log_.append("study_created", {{"study_id", config.study_id}, {"config", to_json_value(config)}}, ts);
        studies_.emplace(config.study_id, std::make_unique<StudyState>(config));
        return config.study_id;
    }

    Session create_session_locked(const std::string& study_id, Group group, std::int64_t ts) {
        auto it = studies_.find(study_id);
        if (it == studies_.end()) throw Error(ErrorCode::UnknownStudy, "unknown study '" + study_id + "'");
        auto& study = *it->second;
        const auto& policy = study.config.policy(group);

        SessionState st;
        st.study_id = study_id;
        st.ordinal = study.session_ids.size() + 1;
        st.session.session_id = study_id + "-s" + std::to_string(st.ordinal);
        st.session.group = group;
        st.session.phase = policy.quiz ? Phase::Training : Phase::Main;

        if (policy.quiz) {
            const auto quiz_pairs = study.config.effective_quiz_pairs();
            for (int k = 0; k < study.config.quiz.max_pairs; ++k) {
                ComparisonPair p = quiz_pairs[static_cast<std::size_t>(k) % quiz_pairs.size()];
                p.pair_id = "quiz" + std::to_string(k + 1) + ":" + p.pair_id;
                st.session.playlist.push_back(std::move(p));
            }
            st.session.quiz_length = st.session.playlist.size();
        }
        auto main = apply_pool(
            build_study_playlist(study.config.ladders, study.config.golden_per_source, study.config.rng_seed + st.ordinal),
            study.pool);
        st.session.playlist.insert(st.session.playlist.end(), main.begin(), main.end());
        st.trajectory.push_back(st.attention.raw);

        log_.append("session_created",
                    {{"study_id", study_id}, {"session_id", st.session.session_id}, {"group", std::string(to_string(group))}},
                    ts);
        study.session_ids.push_back(st.session.session_id);
        Session copy = st.session;
        sessions_.emplace(st.session.session_id, std::move(st));
        return copy;
    }

    void change_phase(SessionState& st, Phase to, std::int64_t ts) {
        log_.append("phase_change",
                    {{"session_id", st.session.session_id},
                     {"from", std::string(to_string(st.session.phase))},
                     {"to", std::string(to_string(to))}},
                    ts);
        st.session.phase = to;
    }

    SubmitOutcome submit_locked(const std::string& session_id, const RaterResponse& in, std::int64_t ts) {
        auto sit = sessions_.find(session_id);
        if (sit == sessions_.end()) throw Error(ErrorCode::UnknownSession, "unknown session '" + session_id + "'");
        auto& st = sit->second;
        auto& s = st.session;
        if (s.phase == Phase::Done || s.phase == Phase::Disqualified || s.cursor >= s.playlist.size())
            throw Error(ErrorCode::SessionFinished, session_id + " accepts no more responses");
        const auto pair = s.playlist[s.cursor];
        if (in.pair_id != pair.pair_id)
            throw Error(ErrorCode::PairMismatch, "expected response for '" + pair.pair_id + "', got '" + in.pair_id + "'");
        validate_choice(in.choice);
        if (in.replay_count < 0) throw Error(ErrorCode::MalformedInput, "replay_count must be >= 0");

        auto& study = *studies_.at(st.study_id);
        const auto& policy = study.config.policy(s.group);
        RaterResponse r = in;
        r.session_id = session_id;
        log_.append("response_submitted",
                    {{"session_id", session_id},
                     {"pair_id", r.pair_id},
                     {"choice", r.choice},
                     {"replay_count", r.replay_count},
                     {"elapsed_ms", r.elapsed_ms}},
                    ts);
        s.response_log.push_back(r);
        st.answered.push_back(pair);

        SubmitOutcome out;
        if (s.cursor < s.quiz_length) {
            if (s.phase == Phase::Training) change_phase(st, Phase::Quiz, ts);
            const auto category = classify_response(pair.expected_winner, r.choice);
            st.quiz = quiz_step(std::move(st.quiz), category, study.config.quiz);
            const auto& ladder = study.config.ladder(pair.source_id);
            out.feedback = feedback_message(pair, *ladder.find(pair.left), *ladder.find(pair.right), category);
            if (st.quiz.status == QuizStatus::Qualified) {
                change_phase(st, Phase::Main, ts);
                s.cursor = s.quiz_length;
            } else if (st.quiz.status == QuizStatus::Terminated) {
                change_phase(st, Phase::Disqualified, ts);
                s.cursor = s.quiz_length;
            } else {
                ++s.cursor;
            }
        } else {
            auto& pcm = study.pcms.at(pair.source_id);
            pcm = accumulate(std::move(pcm), pair, r.choice);
            if (policy.feeds_golden_pool) {
                const auto update = study.pool.record_and_evaluate(pair.pair_id, r.choice);
                if (update.changed())
                    log_.append("promotion",
                                {{"study_id", st.study_id},
                                 {"pair_id", pair.pair_id},
                                 {"state", std::string(to_string(update.after.state))},
                                 {"winner", std::string(to_string(update.after.winner))}},
                                ts);
            }
            if (pair.is_golden()) st.attention = update_attention(st.attention, is_golden_hit(pair, r.choice));
            st.trajectory.push_back(st.attention.raw);
            ++s.cursor;
            if (s.cursor >= s.playlist.size()) change_phase(st, Phase::Done, ts);
            if (policy.show_attention) out.attention_display = display_score(st.attention);
        }
        out.phase = s.phase;
        out.done = s.phase == Phase::Done;
        return out;
    }

    static bool is_golden_hit(const ComparisonPair& pair, int choice) {
        return (choice < 0 && pair.expected_winner == Side::Left) || (choice > 0 && pair.expected_winner == Side::Right);
    }

    Bundle export_locked(const std::string& study_id) const {
        auto it = studies_.find(study_id);
        if (it == studies_.end()) throw Error(ErrorCode::UnknownStudy, "unknown study '" + study_id + "'");
        const auto& study = *it->second;
        Bundle bundle;
        using nlohmann::json;

        bundle["config.json"] = to_json_value(study.config).dump(2) + "\n";

        std::ostringstream responses;
        responses << "session_id,group,phase,pair_id,source_id,first,second,kind,choice,replay_count,elapsed_ms\n";
        std::ostringstream sessions_jsonl;
        std::vector<SessionRecord> records;
        std::size_t response_total = 0;
        for (const auto& sid : study.session_ids) {
            const auto& st = sessions_.at(sid);
            const auto& s = st.session;
            SessionRecord rec;
            rec.session_id = sid;
            rec.group = s.group;
            rec.attention_trajectory = st.trajectory;
            for (std::size_t k = 0; k < s.response_log.size(); ++k) {
                const auto& r = s.response_log[k];
                const ComparisonPair* pair = &st.answered[k];
                const bool quiz = r.pair_id.rfind("quiz", 0) == 0;
                responses << sid << ',' << to_string(s.group) << ',' << (quiz ? "Quiz" : "Main") << ',' << r.pair_id
                          << ',' << pair->source_id << ',' << pair->left << ',' << pair->right << ','
                          << to_string(pair->kind) << ',' << r.choice << ',' << r.replay_count << ',' << r.elapsed_ms
                          << '\n';
                if (!quiz) rec.main_choices.push_back(r.choice);
                rec.total_replays += r.replay_count;
                rec.total_elapsed_ms += r.elapsed_ms;
                ++response_total;
            }
            json line = {{"session_id", sid},
                         {"group", std::string(to_string(s.group))},
                         {"phase", std::string(to_string(s.phase))},
                         {"main_choices", rec.main_choices},
                         {"attention_trajectory", rec.attention_trajectory},
                         {"attention_raw", st.attention.raw},
                         {"quiz_scores", st.quiz.history},
                         {"total_replays", rec.total_replays},
                         {"total_elapsed_ms", rec.total_elapsed_ms}};
            sessions_jsonl << line.dump() << '\n';
            records.push_back(std::move(rec));
        }
        bundle["responses.csv"] = responses.str();
        bundle["sessions.jsonl"] = sessions_jsonl.str();

        std::ostringstream pool;
        pool << "pair_id,n,count_left,count_tie,count_right,mean,std,status,winner\n";
        for (const auto& [pid, e] : study.pool.snapshot())
            pool << pid << ',' << e.stats.n << ',' << e.stats.count_left << ',' << e.stats.count_tie << ','
                 << e.stats.count_right << ',' << format_number(e.stats.mean) << ',' << format_number(e.stats.stddev)
                 << ',' << to_string(e.status.state) << ',' << to_string(e.status.winner) << '\n';
        bundle["pool.csv"] = pool.str();

        json manifest_sources = json::array();
        for (const auto& ladder : study.config.ladders) {
            const auto& pcm = study.pcms.at(ladder.source_id);
            bundle["pcm/" + ladder.source_id + ".csv"] = to_pcm_text(pcm);
            std::ostringstream table;
            table << "condition,jod\n";
            std::string status = "ok";
            if (pcm.total_comparisons() == 0.0) {
                status = "NoData";
            } else {
                try {
                    SolverConfig sc;
                    sc.anchor = ladder.pseudo_reference().id;
                    const auto res = solve(pcm, sc);
                    if (!res.converged) status = "NotConverged";
                    for (std::size_t k = 0; k < res.conditions.size(); ++k)
                        table << res.conditions[k] << ',' << format_number(res.scores[k]) << '\n';
                } catch (const Error& e) {
                    status = std::string(to_string(e.code()));
                }
            }
            bundle["jod/" + ladder.source_id + ".csv"] = table.str();
            manifest_sources.push_back({{"source_id", ladder.source_id}, {"status", status}});
        }

        bundle["summary.csv"] = to_summary_text(summarize_by_group(records));

        json manifest = {{"study_id", study_id},
                         {"sessions", study.session_ids.size()},
                         {"responses", response_total},
                         {"sources", manifest_sources}};
        json files = json::array();
        for (const auto& [name, _] : bundle) files.push_back(name);
        files.push_back("manifest.json");
        manifest["files"] = files;
        bundle["manifest.json"] = manifest.dump(2) + "\n";
        return bundle;
    }

    mutable std::mutex mutex_;
    EventLog log_;
    Clock clock_;
    std::map<std::string, std::unique_ptr<StudyState>> studies_;
    std::map<std::string, SessionState> sessions_;
};

}  // namespace jodstudy
