#pragma once

#include <string>

#include <nlohmann/json.hpp>

// Eigen must be seen before httplib: <resolv.h> defines a `_res` macro that
// collides with Eigen parameter names.
#include "jodstudy/config.hpp"
#include "jodstudy/error.hpp"
#include "jodstudy/service.hpp"

#include <httplib.h>

namespace jodstudy {

inline int http_status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownStudy:
        case ErrorCode::UnknownSession: return 404;
        case ErrorCode::SessionFinished:
        case ErrorCode::PairMismatch: return 409;
        default: return 400;
    }
}

namespace detail {

template <class Fn>
void guarded(httplib::Response& res, Fn&& fn) {
    try {
        res.set_content(fn().dump(), "application/json");
    } catch (const Error& e) {
        res.status = http_status_for(e.code());
        res.set_content(nlohmann::json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump(),
                        "application/json");
    } catch (const nlohmann::json::exception& e) {
        res.status = 400;
        res.set_content(nlohmann::json{{"error", "MalformedInput"}, {"message", e.what()}}.dump(), "application/json");
    }
}

}  // namespace detail

/// Routes:
///   POST /studies                    body: study config  -> {"study_id"}
///   POST /studies/{id}/sessions      body: {"group"}     -> session summary
///   GET  /sessions/{id}/next                             -> pair descriptor or {"done": true}
///   POST /sessions/{id}/responses    body: response      -> outcome
///   GET  /sessions/{id}/state                            -> session view
///   GET  /studies/{id}/export                            -> {"files": {name: content}}
inline void mount_routes(httplib::Server& server, StudyService& service) {
    using nlohmann::json;

    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Post("/studies", [&](const httplib::Request& req, httplib::Response& res) {
        detail::guarded(res, [&] {
            auto id = service.create_study(study_config_from_json(json::parse(req.body)));
            res.status = 201;
            return json{{"study_id", id}};
        });
    });

    server.Post(R"(/studies/([^/]+)/sessions)", [&](const httplib::Request& req, httplib::Response& res) {
        detail::guarded(res, [&] {
            const auto body = req.body.empty() ? json::object() : json::parse(req.body);
            const auto s = service.create_session(req.matches[1], group_from_string(body.value("group", std::string("A"))));
            res.status = 201;
            return json{{"session_id", s.session_id},
                        {"group", std::string(to_string(s.group))},
                        {"phase", std::string(to_string(s.phase))}};
        });
    });

    server.Get(R"(/sessions/([^/]+)/next)", [&](const httplib::Request& req, httplib::Response& res) {
        detail::guarded(res, [&] { return service.next_pair(req.matches[1]).to_json(); });
    });

    server.Post(R"(/sessions/([^/]+)/responses)", [&](const httplib::Request& req, httplib::Response& res) {
        detail::guarded(res, [&] {
            const auto body = json::parse(req.body);
            RaterResponse r;
            r.session_id = req.matches[1];
            r.pair_id = body.at("pair_id").get<std::string>();
            r.choice = body.at("choice").get<int>();
            r.replay_count = body.value("replay_count", 0);
            r.elapsed_ms = body.value("elapsed_ms", std::int64_t{0});
            return service.submit_response(r.session_id, r).to_json();
        });
    });

    server.Get(R"(/sessions/([^/]+)/state)", [&](const httplib::Request& req, httplib::Response& res) {
        detail::guarded(res, [&] { return service.session_state(req.matches[1]); });
    });

    server.Get(R"(/studies/([^/]+)/export)", [&](const httplib::Request& req, httplib::Response& res) {
        detail::guarded(res, [&] {
            json files = json::object();
            for (const auto& [name, content] : service.export_results(req.matches[1])) files[name] = content;
            return json{{"files", files}};
        });
    });
}

}  // namespace jodstudy
