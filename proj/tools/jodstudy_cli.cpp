// Command-line entry point: serve | simulate | solve | export | metrics.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "jodstudy/http_api.hpp"
#include "jodstudy/jodstudy.hpp"

namespace fs = std::filesystem;
using namespace jodstudy;

namespace {

std::string default_data_dir() {
    const char* env = std::getenv("JODSTUDY_DATA_DIR");
    return env && *env ? env : "data";
}

// Rebuilds a service from <data_dir>/events.jsonl. When `attach` is set, new
// events are appended to that same file.
void load_service(StudyService& service, const fs::path& data_dir, bool attach) {
    fs::create_directories(data_dir);
    const auto log_path = data_dir / "events.jsonl";
    const auto records = read_event_log(log_path.string());
    service.replay(records);
    if (attach) service.attach_log_file(log_path.string());
    std::cerr << "replayed " << records.size() << " events from " << log_path << "\n";
}

int cmd_serve(const std::string& listen, const std::string& data_dir) {
    StudyService service;
    load_service(service, data_dir, true);
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) throw Error(ErrorCode::InvalidConfig, "listen address must be host:port");
    const auto host = listen.substr(0, colon);
    const int port = std::stoi(listen.substr(colon + 1));
    httplib::Server server;
    mount_routes(server, service);
    std::cerr << "listening on " << host << ":" << port << "\n";
    if (!server.listen(host, port)) throw Error(ErrorCode::InvalidConfig, "cannot listen on " + listen);
    return 0;
}

int cmd_simulate(const std::string& config_path, const fs::path& out_dir) {
    const auto sim = simulation_config_from_json(read_json_file(config_path));
    fs::create_directories(out_dir);
    const auto log_path = out_dir / "events.jsonl";
    fs::remove(log_path);
    StudyService service(log_path.string());
    const int sessions = run_simulation(service, sim);
    write_bundle(service.export_results(sim.study.study_id), out_dir);
    std::cout << "simulated " << sessions << " sessions; bundle written to " << out_dir.string() << "\n";
    return 0;
}

int cmd_solve(const std::string& pcm_path, double jnd, const std::string& anchor, double tolerance,
              const std::string& format) {
    std::ifstream in(pcm_path);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open '" + pcm_path + "'");
    const auto pcm = read_pcm(in);
    SolverConfig cfg;
    cfg.jnd_probability = jnd;
    cfg.anchor = anchor;
    cfg.gradient_tolerance = tolerance;
    const auto res = solve(pcm, cfg);
    if (format == "json") {
        nlohmann::json scores = nlohmann::json::object();
        for (std::size_t k = 0; k < res.conditions.size(); ++k) scores[res.conditions[k]] = res.scores[k];
        std::cout << nlohmann::json{{"anchor", res.anchor},
                                    {"converged", res.converged},
                                    {"gradient_norm", res.final_gradient_norm},
                                    {"iterations", res.iterations},
                                    {"scores", scores}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << "condition,jod\n";
        for (std::size_t k = 0; k < res.conditions.size(); ++k)
            std::cout << res.conditions[k] << ',' << format_number(res.scores[k]) << '\n';
    }
    if (!res.converged) {
        std::cerr << "warning: solver did not converge (gradient norm " << res.final_gradient_norm << ")\n";
        return 3;
    }
    return 0;
}

int cmd_export(const std::string& data_dir, const std::string& study, const fs::path& out_dir) {
    StudyService service;
    load_service(service, data_dir, false);
    std::vector<std::string> ids = study.empty() ? service.study_ids() : std::vector<std::string>{study};
    for (const auto& id : ids) {
        const auto dir = ids.size() == 1 ? out_dir : out_dir / id;
        write_bundle(service.export_results(id), dir);
        std::cout << "exported " << id << " to " << dir.string() << "\n";
    }
    return 0;
}

int cmd_metrics(const std::string& sessions_path) {
    std::ifstream in(sessions_path);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open '" + sessions_path + "'");
    std::vector<SessionRecord> records;
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        SessionRecord r;
        r.session_id = j.at("session_id");
        r.group = group_from_string(j.at("group").get<std::string>());
        r.main_choices = j.at("main_choices").get<std::vector<int>>();
        r.attention_trajectory = j.at("attention_trajectory").get<std::vector<double>>();
        r.total_replays = j.value("total_replays", 0);
        r.total_elapsed_ms = j.value("total_elapsed_ms", std::int64_t{0});
        records.push_back(std::move(r));
    }
    write_summary(std::cout, summarize_by_group(records));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pairwise video-quality study server, simulator and JOD solver"};
    app.require_subcommand(1);

    std::string listen = "127.0.0.1:8080";
    std::string data_dir = default_data_dir();
    auto* serve = app.add_subcommand("serve", "Run the HTTP study service");
    serve->add_option("--listen", listen, "host:port to bind")->capture_default_str();
    serve->add_option("--data-dir", data_dir, "Directory holding events.jsonl (env JODSTUDY_DATA_DIR)")
        ->capture_default_str();

    std::string sim_config, sim_out = "sim-out";
    auto* simulate = app.add_subcommand("simulate", "Run simulated raters and write the export bundle");
    simulate->add_option("--config", sim_config, "Simulation config (JSON)")->required();
    simulate->add_option("--out", sim_out, "Output directory")->capture_default_str();

    std::string pcm_path, anchor, format = "csv";
    double jnd = 0.75, tolerance = 1e-8;
    auto* solve_cmd = app.add_subcommand("solve", "Recover JOD scores from a PCM file");
    solve_cmd->add_option("pcm", pcm_path, "PCM file")->required();
    solve_cmd->add_option("--jnd", jnd, "Detection probability of 1 JOD")->capture_default_str();
    solve_cmd->add_option("--anchor", anchor, "Condition fixed at 0 JOD (default: first)");
    solve_cmd->add_option("--tolerance", tolerance, "Gradient-norm tolerance")->capture_default_str();
    solve_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    std::string export_study, export_out = "export";
    auto* export_cmd = app.add_subcommand("export", "Replay the event log and write export bundles");
    export_cmd->add_option("--data-dir", data_dir, "Directory holding events.jsonl")->capture_default_str();
    export_cmd->add_option("--study", export_study, "Study id (default: all)");
    export_cmd->add_option("--out", export_out, "Output directory")->capture_default_str();

    std::string sessions_path;
    auto* metrics = app.add_subcommand("metrics", "Summarise sessions.jsonl into the group table");
    metrics->add_option("sessions", sessions_path, "sessions.jsonl from an export bundle")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve) return cmd_serve(listen, data_dir);
        if (*simulate) return cmd_simulate(sim_config, sim_out);
        if (*solve_cmd) return cmd_solve(pcm_path, jnd, anchor, tolerance, format);
        if (*export_cmd) return cmd_export(data_dir, export_study, export_out);
        if (*metrics) return cmd_metrics(sessions_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
