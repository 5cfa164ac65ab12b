#include "sbmdyn/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "sbmdyn/error.hpp"

namespace sbmdyn {

using nlohmann::json;

namespace {

json beta_to_json(double beta) {
    if (std::isinf(beta)) return "inf";
    return beta;
}

double beta_from_json(const json& v) {
    if (v.is_null()) return std::numeric_limits<double>::infinity();
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw ConfigError("beta: expected a number or \"inf\"");
    }
    return v.get<double>();
}

template <class T>
void read(const json& j, const char* key, T& out) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

}  // namespace

json config_to_json(const RunConfig& c) {
    const ModelParams& m = c.model;
    json j;
    j["delta"] = m.delta;
    j["bias"] = m.bias;
    j["alpha"] = m.alpha;
    j["s"] = m.s;
    j["omega_c"] = m.omega_c;
    j["chain_length"] = m.chain_length;
    j["fock_dim"] = m.fock_dim;
    j["obb_dim"] = m.obb_dim;
    j["bond_cap"] = m.bond_cap;
    j["dt"] = m.dt;
    j["beta"] = beta_to_json(m.beta);
    j["mu"] = m.mu;
    j["kind"] = c.kind;
    j["output_dir"] = c.output_dir;
    j["t_final"] = c.t_final;
    j["observe_every"] = c.observe_every;
    j["snapshot_every"] = c.snapshot_every;
    j["checkpoint_every"] = c.checkpoint_every;
    j["resume"] = c.resume;
    j["shifted"] = c.shifted;
    j["epsilon"] = c.epsilon;
    j["shift_mode"] = c.shift_mode == ShiftMode::sandwich ? "sandwich" : "substitute";
    j["order"] = c.order;
    j["trunc_budget"] = c.trunc_budget;
    j["weight_tol"] = c.weight_tol;
    j["shift_tol"] = c.shift_tol;
    j["max_sweeps"] = c.max_sweeps;
    j["e_tol"] = c.e_tol;
    j["dtau"] = c.dtau;
    j["thermal_shifted"] = c.thermal_shifted;
    j["max_fock_dim"] = c.max_fock_dim;
    j["n_osc"] = c.classifier.n_osc;
    j["hysteresis"] = c.classifier.hysteresis;
    j["cv_cutoff"] = c.classifier.cv_cutoff;
    j["t_skip"] = c.classifier.t_skip;
    j["scan_s"] = c.scan_s;
    j["scan_alpha"] = c.scan_alpha;
    j["seed"] = c.seed;
    j["verbosity"] = c.verbosity;
    j["trajectory"] = c.trajectory;
    j["occupations"] = c.occupations;
    return j;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    const json defaults = config_to_json(RunConfig{});
    for (const auto& [k, v] : defaults.items()) keys.push_back(k);
    return keys;
}

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const json defaults = config_to_json(RunConfig{});
    for (const auto& [k, v] : j.items())
        if (!defaults.contains(k)) throw ConfigError("unknown config key '" + k + "'");
    RunConfig c;
    ModelParams& m = c.model;
    read(j, "delta", m.delta);
    read(j, "bias", m.bias);
    read(j, "alpha", m.alpha);
    read(j, "s", m.s);
    read(j, "omega_c", m.omega_c);
    read(j, "chain_length", m.chain_length);
    read(j, "fock_dim", m.fock_dim);
    read(j, "obb_dim", m.obb_dim);
    read(j, "bond_cap", m.bond_cap);
    read(j, "dt", m.dt);
    if (j.contains("beta")) {
        try {
            m.beta = beta_from_json(j.at("beta"));
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config key 'beta': ") + e.what());
        }
    }
    read(j, "mu", m.mu);
    read(j, "kind", c.kind);
    read(j, "output_dir", c.output_dir);
    read(j, "t_final", c.t_final);
    read(j, "observe_every", c.observe_every);
    read(j, "snapshot_every", c.snapshot_every);
    read(j, "checkpoint_every", c.checkpoint_every);
    read(j, "resume", c.resume);
    read(j, "shifted", c.shifted);
    read(j, "epsilon", c.epsilon);
    std::string mode = "substitute";
    read(j, "shift_mode", mode);
    if (mode == "substitute") c.shift_mode = ShiftMode::substitute;
    else if (mode == "sandwich") c.shift_mode = ShiftMode::sandwich;
    else throw ConfigError("shift_mode must be 'substitute' or 'sandwich'");
    read(j, "order", c.order);
    read(j, "trunc_budget", c.trunc_budget);
    read(j, "weight_tol", c.weight_tol);
    read(j, "shift_tol", c.shift_tol);
    read(j, "max_sweeps", c.max_sweeps);
    read(j, "e_tol", c.e_tol);
    read(j, "dtau", c.dtau);
    read(j, "thermal_shifted", c.thermal_shifted);
    read(j, "max_fock_dim", c.max_fock_dim);
    read(j, "n_osc", c.classifier.n_osc);
    read(j, "hysteresis", c.classifier.hysteresis);
    read(j, "cv_cutoff", c.classifier.cv_cutoff);
    read(j, "t_skip", c.classifier.t_skip);
    read(j, "scan_s", c.scan_s);
    read(j, "scan_alpha", c.scan_alpha);
    read(j, "seed", c.seed);
    read(j, "verbosity", c.verbosity);
    read(j, "trajectory", c.trajectory);
    read(j, "occupations", c.occupations);

    static const char* kinds[] = {"ground", "evolve", "thermal", "scan", "analyze"};
    bool known = false;
    for (const char* k : kinds) known = known || c.kind == k;
    if (!known) throw ConfigError("unknown run kind '" + c.kind + "'");
    if (c.order != 1 && c.order != 2) throw ConfigError("order must be 1 or 2");
    if (c.observe_every < 1) throw ConfigError("observe_every must be >= 1");
    if (c.snapshot_every < 0 || c.checkpoint_every < 0) throw ConfigError("cadences must be >= 0");
    if (c.epsilon < 0.0) throw ConfigError("epsilon must be >= 0");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return config_from_json(j);
}

void save_config(const std::string& path, const RunConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << config_to_json(cfg).dump(2) << "\n";
}

}  // namespace sbmdyn
