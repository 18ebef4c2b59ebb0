#pragma once

#include <random>
#include <string>

#include "jodstudy/rater_sim.hpp"
#include "jodstudy/service.hpp"

namespace jodstudy {

/// Feeds a simulated rater through a live service session until it is Done
/// or Disqualified. Returns the number of responses submitted.
inline int drive_session(StudyService& service, const std::string& session_id, const RaterProfile& profile,
                         const GroundTruth& truth) {
    profile.validate();
    std::mt19937_64 rng(profile.rng_seed);
    std::uniform_int_distribution<int> replays(0, profile.replay_max);
    std::uniform_int_distribution<std::int64_t> elapsed(profile.elapsed_min_ms, profile.elapsed_max_ms);
    int submitted = 0;
    while (true) {
        const auto s = service.session(session_id);
        if (s.phase == Phase::Done || s.phase == Phase::Disqualified || s.cursor >= s.playlist.size()) break;
        const auto& pair = s.playlist[s.cursor];
        const int choice =
            sample_choice(profile, truth.at(pair.source_id, pair.left), truth.at(pair.source_id, pair.right), rng);
        service.submit_response(session_id, {pair.pair_id, session_id, choice, replays(rng), elapsed(rng)});
        ++submitted;
    }
    return submitted;
}

}  // namespace jodstudy

namespace jodstudy {

struct SimulationConfig {
    StudyConfig study;
    GroundTruth truth;
    std::vector<Cohort> cohorts;
};

/// Simulation file: {"study": <study config>, "ground_truth": [per-rung JOD] or
/// {source: {variant: JOD}}, "cohorts": [{"name", "group", "count", "seed",
/// "sensitivity", "tie_margin", "lapse", "spammer", "replay_max", "elapsed_ms": [lo, hi]}]}.
/// A missing sensitivity means the calibrated sigma/sqrt(2).
inline SimulationConfig simulation_config_from_json(const nlohmann::json& j) {
    SimulationConfig cfg;
    cfg.study = study_config_from_json(j.at("study"));
    try {
        const auto& gt = j.at("ground_truth");
        if (gt.is_array()) {
            cfg.truth = GroundTruth::per_rung(cfg.study.ladders, gt.get<std::vector<double>>());
        } else {
            for (const auto& [source, vars] : gt.items())
                for (const auto& [variant, q] : vars.items()) cfg.truth.set(source, variant, q.get<double>());
        }
        for (const auto& c : j.at("cohorts")) {
            Cohort cohort;
            cohort.name = c.value("name", std::string("cohort"));
            cohort.count = c.value("count", 1);
            auto& p = cohort.profile;
            p.group = group_from_string(c.value("group", std::string("C")));
            p.rng_seed = c.value("seed", std::uint64_t{1});
            p.sensitivity = c.contains("sensitivity") ? c.at("sensitivity").get<double>() : calibrated_sensitivity();
            p.tie_margin = c.value("tie_margin", 0.0);
            p.lapse_prob = c.value("lapse", 0.0);
            p.spammer = c.value("spammer", false);
            p.replay_max = c.value("replay_max", 0);
            if (c.contains("elapsed_ms")) {
                p.elapsed_min_ms = c.at("elapsed_ms").at(0);
                p.elapsed_max_ms = c.at("elapsed_ms").at(1);
            }
            p.validate();
            cfg.cohorts.push_back(std::move(cohort));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
    return cfg;
}

/// Runs every cohort through the service (one session per rater, cohorts in
/// file order) and returns the number of sessions created.
inline int run_simulation(StudyService& service, const SimulationConfig& sim) {
    const auto study_id = service.create_study(sim.study);
    int sessions = 0;
    for (const auto& profile : expand_cohorts(sim.cohorts)) {
        const auto s = service.create_session(study_id, profile.group);
        drive_session(service, s.session_id, profile, sim.truth);
        ++sessions;
    }
    return sessions;
}

}  // namespace jodstudy
