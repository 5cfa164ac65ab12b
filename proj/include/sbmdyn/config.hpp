#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbmdyn/analysis.hpp"
#include "sbmdyn/model.hpp"
#include "sbmdyn/shift.hpp"

namespace sbmdyn {

/// One run: model parameters plus orchestration settings. Serialized as a
/// flat JSON object; every field is optional on input, unknown keys are errors.
struct RunConfig {
    ModelParams model;
    std::string kind = "evolve";  // ground | evolve | thermal | scan | analyze
    std::string output_dir = ".";
    double t_final = 10.0;
    int observe_every = 1;
    int snapshot_every = 10;  // 0 disables occupation snapshots
    int checkpoint_every = 0;
    bool resume = false;
    bool shifted = true;
    double epsilon = 0.1;
    ShiftMode shift_mode = ShiftMode::substitute;
    int order = 2;
    double trunc_budget = 1e-3;
    double weight_tol = 1e-12;
    double shift_tol = 1e-6;
    int max_sweeps = 200;
    double e_tol = 1e-10;
    double dtau = 0.0;  // thermal preparation step, <= 0 selects dt/5
    bool thermal_shifted = false;
    int max_fock_dim = 6;
    ClassifierOptions classifier;
    std::vector<double> scan_s;
    std::vector<double> scan_alpha;
    std::uint64_t seed = 12345;
    int verbosity = 1;
    std::string trajectory;   // analyze: input trajectory CSV
    std::string occupations;  // analyze: optional occupation CSV
};

nlohmann::json config_to_json(const RunConfig& cfg);
/// Throws ConfigError on unknown keys or wrongly typed values.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
void save_config(const std::string& path, const RunConfig& cfg);

/// Names of all accepted keys, in serialization order.
std::vector<std::string> config_keys();

}  // namespace sbmdyn
