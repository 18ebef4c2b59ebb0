#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jodstudy/error.hpp"
#include "jodstudy/golden_pool.hpp"
#include "jodstudy/model.hpp"
#include "jodstudy/quiz.hpp"

namespace jodstudy {

struct GroupPolicy {
    bool quiz = false;
    bool show_attention = false;
    bool feeds_golden_pool = false;
};

/// Default protocol: A untrained, B trained with hidden attention, C trained
/// with live attention. Only trained groups feed dynamic golden selection.
inline std::map<Group, GroupPolicy> default_group_policies() {
    return {{Group::A, {false, false, false}}, {Group::B, {true, false, true}}, {Group::C, {true, true, true}}};
}

struct StudyConfig {
    std::string study_id = "study";
    std::vector<QualityLadder> ladders;
    QuizConfig quiz;
    std::vector<ComparisonPair> quiz_pairs;  // empty: derived from ladders
    std::map<Group, GroupPolicy> groups = default_group_policies();
    int golden_per_source = 1;
    int min_ratings = 20;
    std::uint64_t rng_seed = 1;
    std::string media_base;

    const QualityLadder& ladder(std::string_view source_id) const {
        for (const auto& l : ladders)
            if (l.source_id == source_id) return l;
        throw Error(ErrorCode::UnknownCondition, "unknown source '" + std::string(source_id) + "'");
    }

    const GroupPolicy& policy(Group g) const {
        auto it = groups.find(g);
        if (it == groups.end())
            throw Error(ErrorCode::InvalidConfig, "no policy for group " + std::string(to_string(g)));
        return it->second;
    }

    std::vector<ComparisonPair> effective_quiz_pairs() const {
        return quiz_pairs.empty() ? default_quiz_pairs(ladders) : quiz_pairs;
    }

    GoldenThresholds golden_thresholds() const {
        GoldenThresholds t;
        t.min_ratings = min_ratings;
        return t;
    }

    void validate() const {
        quiz.validate();
        if (ladders.empty()) throw Error(ErrorCode::InvalidConfig, "study has no sources");
        std::set<std::string> sources;
        for (const auto& l : ladders) {
            validate_ladder(l);
            if (!sources.insert(l.source_id).second)
                throw Error(ErrorCode::InvalidConfig, "duplicate source '" + l.source_id + "'");
            build_chain_pairs(l);
            seed_golden_pairs(l, golden_per_source);
        }
        for (Group g : {Group::A, Group::B, Group::C}) policy(g);
        for (const auto& p : effective_quiz_pairs()) {
            const auto& l = ladder(p.source_id);
            if (!l.find(p.left) || !l.find(p.right) || p.left == p.right || p.expected_winner == Side::None)
                throw Error(ErrorCode::InvalidConfig, "invalid quiz pair '" + p.pair_id + "'");
        }
        for (Group g : {Group::A, Group::B, Group::C})
            if (policy(g).quiz && effective_quiz_pairs().empty())
                throw Error(ErrorCode::InvalidConfig, "quiz enabled but no quiz pairs available");
        if (min_ratings < 1) throw Error(ErrorCode::InvalidConfig, "min_ratings must be >= 1");
    }
};

// ---- JSON mapping -----------------------------------------------------------
// Field names here are the on-disk config format documented in README.md.

inline nlohmann::json to_json_value(const EncodeVariant& v) {
    return {{"id", v.id},           {"rung", v.rung},       {"variant", v.variant},
            {"resolution", v.resolution}, {"maxrate", v.maxrate}, {"crf", v.crf}};
}

inline nlohmann::json to_json_value(const StudyConfig& cfg) {
    using nlohmann::json;
    json sources = json::array();
    for (const auto& l : cfg.ladders) {
        json vars = json::array();
        for (const auto& v : l.variants) vars.push_back(to_json_value(v));
        sources.push_back({{"source_id", l.source_id}, {"variants", vars}});
    }
    json quiz_pairs = json::array();
    for (const auto& p : cfg.quiz_pairs)
        quiz_pairs.push_back({{"source_id", p.source_id},
                              {"left", p.left},
                              {"right", p.right},
                              {"expected_winner", std::string(to_string(p.expected_winner))}});
    json groups = json::object();
    for (const auto& [g, pol] : cfg.groups)
        groups[std::string(to_string(g))] = {
            {"quiz", pol.quiz}, {"show_attention", pol.show_attention}, {"feeds_golden_pool", pol.feeds_golden_pool}};
    return {{"study_id", cfg.study_id},
            {"rng_seed", cfg.rng_seed},
            {"golden_per_source", cfg.golden_per_source},
            {"min_ratings", cfg.min_ratings},
            {"media_base", cfg.media_base},
            {"sources", sources},
            {"quiz",
             {{"window", cfg.quiz.window},
              {"threshold", cfg.quiz.threshold},
              {"min_pairs", cfg.quiz.min_pairs},
              {"max_pairs", cfg.quiz.max_pairs},
              {"weights", {cfg.quiz.weights.perfect, cfg.quiz.weights.close, cfg.quiz.weights.complete}},
              {"pairs", quiz_pairs}}},
            {"groups", groups}};
}

inline StudyConfig study_config_from_json(const nlohmann::json& j) {
    StudyConfig cfg;
    try {
        cfg.study_id = j.value("study_id", cfg.study_id);
        cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
        cfg.golden_per_source = j.value("golden_per_source", cfg.golden_per_source);
        cfg.min_ratings = j.value("min_ratings", cfg.min_ratings);
        cfg.media_base = j.value("media_base", cfg.media_base);
        for (const auto& s : j.at("sources")) {
            const std::string source_id = s.at("source_id");
            if (s.value("standard_ladder", false)) {
                cfg.ladders.push_back(standard_ladder(source_id));
                continue;
            }
            QualityLadder ladder{source_id, {}};
            for (const auto& v : s.at("variants"))
                ladder.variants.push_back({v.at("id"), source_id, v.at("rung"), v.value("variant", 0),
                                           v.at("resolution"), v.at("maxrate"), v.value("crf", 0)});
            cfg.ladders.push_back(std::move(ladder));
        }
        if (j.contains("quiz")) {
            const auto& q = j.at("quiz");
            cfg.quiz.window = q.value("window", cfg.quiz.window);
            cfg.quiz.threshold = q.value("threshold", cfg.quiz.threshold);
            cfg.quiz.min_pairs = q.value("min_pairs", cfg.quiz.min_pairs);
            cfg.quiz.max_pairs = q.value("max_pairs", cfg.quiz.max_pairs);
            if (q.contains("weights")) {
                const auto& w = q.at("weights");
                cfg.quiz.weights = {w.at(0), w.at(1), w.at(2)};
            }
            for (const auto& p : q.value("pairs", nlohmann::json::array())) {
                const std::string src = p.at("source_id"), left = p.at("left"), right = p.at("right");
                cfg.quiz_pairs.push_back({make_pair_id(src, left, right), src, left, right, PairKind::Normal,
                                          side_from_string(p.value("expected_winner", std::string("Left")))});
            }
        }
        if (j.contains("groups")) {
            for (const auto& [name, pol] : j.at("groups").items()) {
                GroupPolicy gp;
                gp.quiz = pol.value("quiz", false);
                gp.show_attention = pol.value("show_attention", false);
                gp.feeds_golden_pool = pol.value("feeds_golden_pool", gp.quiz);
                cfg.groups[group_from_string(name)] = gp;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
    cfg.validate();
    return cfg;
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
    }
}

/// Ten sources on the standard six-rung ladder, named S01..S10.
inline StudyConfig standard_study(std::string study_id = "study", std::uint64_t seed = 1, int sources = 10) {
    StudyConfig cfg;
    cfg.study_id = std::move(study_id);
    cfg.rng_seed = seed;
    for (int s = 1; s <= sources; ++s) {
        std::string name = (s < 10 ? "S0" : "S") + std::to_string(s);
        cfg.ladders.push_back(standard_ladder(name));
    }
    return cfg;
}

}  // namespace jodstudy
