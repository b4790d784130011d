// tatechar: batch front end for the character computations.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tate/job.hpp"

using namespace tate;

namespace {

Json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ConfigError, "cli", "cannot read config '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::ConfigError, "cli", std::string("config is not valid JSON: ") + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tate characters of elliptic curves at finite p-adic precision"};
    app.require_subcommand(1, 1);
    std::string config_path, output, curve;
    std::optional<u64> seed;
    std::optional<int> precision;
    app.add_option("--config", config_path, "job config (JSON)");
    app.add_option("--seed", seed, "seed for randomized shifts");
    app.add_option("--precision", precision, "precision n");
    app.add_option("--output", output, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--curve", curve, "curve preset")->check(CLI::IsMember(preset_names()));
    app.fallthrough();
    for (const auto& kind : task_kinds()) app.add_subcommand(kind, "run " + kind + " tasks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    const std::string sub = app.get_subcommands().front()->get_name();

    JobConfig cfg;
    try {
        Json j = config_path.empty() ? Json::object() : load_config(config_path);
        if (!j.is_object()) fail(ErrorKind::ConfigError, "cli", "config must be a JSON object");
        if (!curve.empty()) j["curve"] = curve;
        if (seed) j["seed"] = *seed;
        if (precision) j["precision"] = *precision;
        if (!output.empty()) j["output"] = output;
        Json selected = Json::array();
        if (j.contains("tasks") && j["tasks"].is_array()) {
            for (const auto& t : j["tasks"])
                if (sub == "verify" || (t.is_object() && t.value("kind", "") == sub)) selected.push_back(t);
        }
        if (selected.empty()) selected.push_back({{"kind", sub}});
        j["tasks"] = selected;
        cfg = parse_config(j);
    } catch (const Error& e) {
        std::cerr << Json{{"error", {{"kind", to_string(e.kind())}, {"message", e.detail()}}}}.dump() << "\n";
        return 2;
    }

    JobOutcome out;
    try {
        out = run_job(cfg);
    } catch (const Error& e) {
        std::cerr << Json{{"error", {{"kind", to_string(e.kind())}, {"message", e.detail()}}}}.dump() << "\n";
        return 2;
    }
    if (cfg.output == "csv")
        std::cout << render_csv(out.document);
    else
        std::cout << out.document.dump(2) << "\n";
    return out.exit_code;
}
