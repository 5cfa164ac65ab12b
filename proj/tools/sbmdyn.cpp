// Command-line driver: sbmdyn <ground|evolve|thermal|scan|analyze> [--config file] [--key value ...]

#include <CLI11.hpp>
#include <iostream>
#include <map>

#include "sbmdyn/commands.hpp"
#include "sbmdyn/config.hpp"
#include "sbmdyn/error.hpp"

using nlohmann::json;

namespace {

// Flag values are parsed as JSON when possible ("3", "true", "[1,4]"),
// otherwise taken as strings.
json flag_value(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return text;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-boson dynamics with shifted optimized boson bases"};
    app.require_subcommand(1);

    const std::vector<std::string> keys = sbmdyn::config_keys();
    std::string config_path;
    std::string trajectory_path;
    std::map<std::string, std::map<std::string, std::string>> overrides;

    const char* kinds[][2] = {{"ground", "polarized-bath ground state and shift table"},
                              {"evolve", "real-time trajectory"},
                              {"thermal", "finite-temperature trajectory and occupations"},
                              {"scan", "classifier scan over s and alpha"},
                              {"analyze", "analysis report for a trajectory CSV"}};
    for (const auto& [name, help] : kinds) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", config_path, "JSON run configuration");
        if (std::string(name) == "analyze") sub->add_option("trajectory", trajectory_path, "trajectory CSV");
        for (const auto& key : keys) {
            if (key == "kind") continue;
            if (key == "trajectory" && std::string(name) == "analyze") continue;
            auto* target = &overrides[name][key];
            sub->add_option("--" + key, *target, "overrides config key '" + key + "'");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : sbmdyn::kExitConfig;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        const std::string kind = sub->get_name();
        json j = config_path.empty() ? json::object() : sbmdyn::config_to_json(sbmdyn::load_config(config_path));
        for (const auto& [key, value] : overrides[kind])
            if (sub->count("--" + key) > 0) j[key] = flag_value(value);
        j["kind"] = kind;
        if (kind == "analyze" && !trajectory_path.empty()) j["trajectory"] = trajectory_path;
        const sbmdyn::RunConfig cfg = sbmdyn::config_from_json(j);
        auto log = [&cfg](int level, const std::string& line) {
            if (level <= cfg.verbosity) std::cerr << line << "\n";
        };
        const std::string out = sbmdyn::run_command(cfg, log);
        std::cout << out << "\n";
        return sbmdyn::kExitOk;
    } catch (...) {
        std::string msg;
        const int rc = sbmdyn::exit_code_for_current_exception(msg);
        std::cerr << "error: " << msg << "\n";
        return rc;
    }
}
