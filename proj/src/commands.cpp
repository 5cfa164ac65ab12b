#include "sbmdyn/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <array>
#include <map>
#include <sstream>

#include "sbmdyn/analysis.hpp"
#include "sbmdyn/checkpoint.hpp"
#include "sbmdyn/dmrg.hpp"
#include "sbmdyn/error.hpp"
#include "sbmdyn/thermal.hpp"

namespace sbmdyn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void emit(const LogSink& log, int level, const std::string& line) {
    if (log) log(level, line);
}

std::string prepare_dir(const RunConfig& cfg) {
    const std::string dir = resolve_output_dir(cfg);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
    return dir;
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << "\n";
}

std::string run_tag(const RunConfig& cfg) {
    json j = config_to_json(cfg);
    j.erase("resume");
    j.erase("t_final");
    j.erase("output_dir");
    j.erase("verbosity");
    return std::to_string(std::hash<std::string>{}(j.dump()));
}

PolarizedBathOptions bath_options(const RunConfig& cfg) {
    PolarizedBathOptions o;
    o.shifted = cfg.shifted;
    o.shift_tol = cfg.shift_tol;
    o.dmrg.max_sweeps = cfg.max_sweeps;
    o.dmrg.e_tol = cfg.e_tol;
    o.dmrg.seed = cfg.seed;
    o.dmrg.bond_cap = cfg.model.bond_cap;
    o.dmrg.weight_tol = cfg.weight_tol;
    return o;
}

TrajectoryRecord concat(const TrajectoryRecord& a, const TrajectoryRecord& b) {
    TrajectoryRecord r = a;
    r.times.insert(r.times.end(), b.times.begin(), b.times.end());
    r.sigma_z.insert(r.sigma_z.end(), b.sigma_z.begin(), b.sigma_z.end());
    r.norm.insert(r.norm.end(), b.norm.begin(), b.norm.end());
    r.energy.insert(r.energy.end(), b.energy.begin(), b.energy.end());
    r.trunc_err.insert(r.trunc_err.end(), b.trunc_err.begin(), b.trunc_err.end());
    r.snapshots.insert(r.snapshots.end(), b.snapshots.begin(), b.snapshots.end());
    return r;
}

std::function<void(int, double, double)> step_logger(const LogSink& log) {
    if (!log) return {};
    return [log](int, double t, double err) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "t=%.6g trunc_err=%.3e", t, err);
        log(2, buf);
    };
}

struct EvolveOutcome {
    TrajectoryRecord record;
    std::string trajectory_path;
};

EvolveOutcome run_evolution(const RunConfig& cfg, const std::string& dir, const LogSink& log, bool allow_resume,
                            const std::string& stem) {
    const ModelParams& p = cfg.model;
    p.validate();
    if (cfg.checkpoint_every > 0 && cfg.checkpoint_every % cfg.observe_every != 0)
        throw ConfigError("checkpoint_every must be a multiple of observe_every");
    const std::string ck_path = join(dir, stem + ".ckpt");
    const std::string tag = run_tag(cfg);

    MpsState state;
    TrajectoryRecord prefix;
    double t0 = 0.0;
    if (allow_resume && cfg.resume) {
        Checkpoint ck = load_checkpoint(ck_path);
        if (ck.tag != tag) throw ConfigError("checkpoint " + ck_path + " was written by a different configuration");
        state = std::move(ck.state);
        prefix = std::move(ck.trajectory);
        t0 = ck.t;
        emit(log, 1, "resuming from t=" + std::to_string(t0));
    } else {
        DynamicsOptions dopt;
        dopt.bath = bath_options(cfg);
        dopt.epsilon = cfg.epsilon;
        dopt.mode = cfg.shift_mode;
        dopt.order = cfg.order;
        DynamicsInitial init = prepare_dynamics_initial(p, dopt);
        if (!init.bath.converged) emit(log, 1, "warning: shift iteration did not converge");
        if (init.epsilon_report.norm_loss > kEpsilonShiftNormLossFlag) {
            std::ostringstream msg;
            msg << "warning: epsilon shift lost " << init.epsilon_report.norm_loss << " of the norm";
            emit(log, 1, msg.str());
        }
        state = std::move(init.state);
    }
    write_shift_table(join(dir, stem + "_shifts.csv"), state.shifts);

    const GateSet gates = dynamics_gates(p, state.shifts, cfg.shift_mode, cfg.order);
    const ChainHamiltonian h = sbm_hamiltonian(chain_coefficients(p), p, state.shifts);
    const Mpo mpo = build_mpo(h);
    EvolveOptions eo;
    eo.t_start = t0;
    eo.t_final = cfg.t_final;
    eo.observe_every = cfg.observe_every;
    eo.snapshot_every = cfg.snapshot_every;
    eo.step.bond_cap = p.bond_cap;
    eo.step.obb_dim = p.obb_dim;
    eo.step.weight_tol = cfg.weight_tol;
    eo.trunc_budget = cfg.trunc_budget;
    eo.record_initial = prefix.size() == 0;
    eo.checkpoint_every = cfg.checkpoint_every;
    eo.on_checkpoint = [&](const MpsState& s, double t, const TrajectoryRecord& rec) {
        save_checkpoint(ck_path, Checkpoint{s, t, tag, concat(prefix, rec)});
    };
    if (cfg.verbosity >= 2) eo.on_step = step_logger(log);

    EvolveOutcome out;
    out.trajectory_path = join(dir, stem + ".csv");
    try {
        out.record = concat(prefix, evolve(state, gates, &mpo, eo));
    } catch (const EvolutionAborted& e) {
        write_trajectory_csv(out.trajectory_path, concat(prefix, e.partial));
        throw;
    }
    write_trajectory_csv(out.trajectory_path, out.record);
    if (cfg.checkpoint_every > 0) save_checkpoint(ck_path, Checkpoint{state, cfg.t_final, tag, out.record});
    return out;
}

// Rows of the last time slice of an occupation CSV.
ModeOccupations read_last_occupations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("occupation file not found: " + path);
    std::string line;
    std::getline(in, line);
    if (line != "t,omega_p,n_p,n_p_minus_n0") throw ConfigError(path + ": unexpected occupation header");
    std::map<double, std::vector<std::array<double, 3>>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        double v[4];
        for (double& x : v) {
            if (!std::getline(ss, cell, ',')) throw ConfigError(path + ": short row");
            x = std::strtod(cell.c_str(), nullptr);
        }
        rows[v[0]].push_back({v[1], v[2], v[3]});
    }
    if (rows.empty()) throw NotFoundError(path + ": no occupation rows");
    const auto& last = rows.rbegin()->second;
    ModeOccupations m;
    const Eigen::Index n = static_cast<Eigen::Index>(last.size());
    m.omega_p.resize(n);
    m.n_p.resize(n);
    m.n0_p.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m.omega_p(i) = last[i][0];
        m.n_p(i) = last[i][1];
        m.n0_p(i) = last[i][1] - last[i][2];
    }
    return m;
}

}  // namespace

int exit_code_for_current_exception(std::string& message) {
    try {
        throw;
    } catch (const NotFoundError& e) {
        message = e.what();
        return kExitNotFound;
    } catch (const ConfigError& e) {
        message = e.what();
        return kExitConfig;
    } catch (const ParameterError& e) {
        message = e.what();
        return kExitConfig;
    } catch (const DomainError& e) {
        message = e.what();
        return kExitConfig;
    } catch (const json::exception& e) {
        message = e.what();
        return kExitConfig;
    } catch (const NumericalError& e) {
        message = e.what();
        return kExitNumerical;
    } catch (const std::exception& e) {
        message = e.what();
        return kExitFailure;
    }
}

std::string resolve_output_dir(const RunConfig& cfg) {
    if (const char* env = std::getenv("SBMDYN_OUTPUT_DIR"); env && *env) return env;
    return cfg.output_dir;
}

std::string cmd_ground(const RunConfig& cfg, const LogSink& log) {
    const std::string dir = prepare_dir(cfg);
    cfg.model.validate();
    const PolarizedBath bath = polarized_bath_state(cfg.model, bath_options(cfg));
    MpsState state = attach_spin(bath.state, Spin::up);
    const std::string ck = join(dir, "ground.ckpt");
    save_checkpoint(ck, Checkpoint{state, 0.0, run_tag(cfg), {}});
    write_shift_table(join(dir, "shifts.csv"), state.shifts);
    json j;
    j["energy"] = bath.energy;
    j["shift_iterations"] = bath.iterations;
    j["shift_residual"] = bath.residual;
    j["converged"] = bath.converged;
    j["max_bond_dim"] = state.max_bond_dim();
    write_json(join(dir, "ground.json"), j);
    emit(log, 1, "bath energy " + std::to_string(bath.energy));
    return ck;
}

std::string cmd_evolve(const RunConfig& cfg, const LogSink& log) {
    const std::string dir = prepare_dir(cfg);
    const EvolveOutcome out = run_evolution(cfg, dir, log, true, "trajectory");
    if (cfg.snapshot_every > 0 && !out.record.snapshots.empty())
        write_occupation_csv(join(dir, "occupations.csv"), out.record.snapshots, chain_coefficients(cfg.model));
    return out.trajectory_path;
}

std::string cmd_thermal(const RunConfig& cfg, const LogSink& log) {
    const std::string dir = prepare_dir(cfg);
    const ModelParams& p = cfg.model;
    p.validate(true);
    if (!std::isfinite(p.beta)) throw ConfigError("thermal runs need a finite beta");
    auto warn = [&](const std::string& w) { emit(log, 1, "warning: " + w); };
    ThermalOptions to;
    to.dtau = cfg.dtau;
    to.order = cfg.order;
    to.shifted = cfg.thermal_shifted;
    to.max_fock_dim = cfg.max_fock_dim;
    to.warn = warn;
    MpsState state = thermal_state(p, p.beta, p.mu, to);
    ThermalEvolveOptions eo;
    eo.observe_every = cfg.observe_every;
    eo.snapshot_every = cfg.snapshot_every;
    eo.order = cfg.order;
    eo.trunc_budget = cfg.trunc_budget;
    eo.max_fock_dim = cfg.max_fock_dim;
    eo.warn = warn;
    if (cfg.verbosity >= 2) eo.on_step = step_logger(log);
    const std::string path = join(dir, "trajectory.csv");
    TrajectoryRecord rec;
    try {
        rec = thermal_evolve(state, p, cfg.t_final, eo);
    } catch (const EvolutionAborted& e) {
        write_trajectory_csv(path, e.partial);
        throw;
    }
    write_trajectory_csv(path, rec);
    if (!rec.snapshots.empty()) write_occupation_csv(join(dir, "occupations.csv"), rec.snapshots, chain_coefficients(p));
    return path;
}

std::string cmd_scan(const RunConfig& cfg, const LogSink& log) {
    if (cfg.scan_s.empty() || cfg.scan_alpha.empty()) throw ConfigError("scan needs non-empty scan_s and scan_alpha");
    const std::string dir = prepare_dir(cfg);
    const std::string path = join(dir, "scan.csv");
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ConfigError("cannot open " + path);
    std::fprintf(f, "s,alpha,label,sign_changes,spacing_cv,t_s,sigma_m\n");
    for (double s : cfg.scan_s) {
        for (double a : cfg.scan_alpha) {
            RunConfig point = cfg;
            point.model.s = s;
            point.model.alpha = a;
            point.resume = false;
            point.snapshot_every = 0;
            point.checkpoint_every = 0;
            char stem[64];
            std::snprintf(stem, sizeof(stem), "scan_s%g_alpha%g", s, a);
            emit(log, 1, std::string("scan point ") + stem);
            std::string label = "aborted";
            ClassifierReport rep;
            double ts = NAN, sm = NAN;
            try {
                const EvolveOutcome out = run_evolution(point, dir, log, false, stem);
                const TrajectoryAnalysis an = analyze_trajectory(out.record, cfg.classifier);
                rep = an.classification;
                label = to_string(rep.label);
                if (an.has_minimum) {
                    ts = an.t_s;
                    sm = an.sigma_m;
                }
            } catch (const TruncationBudgetExceeded& e) {
                emit(log, 1, std::string("warning: ") + e.what());
            }
            std::fprintf(f, "%.15g,%.15g,%s,%d,%.15g,%.15g,%.15g\n", s, a, label.c_str(), rep.sign_changes,
                         rep.spacing_cv, ts, sm);
            std::fflush(f);
        }
    }
    std::fclose(f);
    return path;
}

std::string cmd_analyze(const std::string& trajectory_path, const RunConfig& cfg, const LogSink& log) {
    const TrajectoryRecord rec = read_trajectory_csv(trajectory_path);
    const TrajectoryAnalysis an = analyze_trajectory(rec, cfg.classifier);
    const ModelParams& p = cfg.model;
    json j;
    j["trajectory"] = trajectory_path;
    j["t_s"] = an.has_minimum ? json(an.t_s) : json(nullptr);
    j["sigma_m"] = an.has_minimum ? json(an.sigma_m) : json(nullptr);
    j["label"] = to_string(an.classification.label);
    j["sign_changes"] = an.classification.sign_changes;
    j["spacing_cv"] = an.classification.spacing_cv;
    j["thresholds"] = {{"n_osc", cfg.classifier.n_osc},
                       {"hysteresis", cfg.classifier.hysteresis},
                       {"cv_cutoff", cfg.classifier.cv_cutoff},
                       {"t_skip", cfg.classifier.t_skip}};
    if (p.alpha < 1.0) j["delta_r_zero_T"] = delta_r_zero_T(p.delta, p.omega_c, p.alpha);
    if (std::isfinite(p.beta)) {
        try {
            const auto [lo, hi] = delta_r_finite_T(p.delta, p.omega_c, p.alpha, p.beta);
            j["delta_r_finite_T"] = {lo, hi};
        } catch (const RootCountError& e) {
            j["delta_r_finite_T"] = nullptr;
            j["delta_r_finite_T_roots"] = e.roots;
        }
    }
    if (!cfg.occupations.empty()) j["omega_peak"] = resonance_peak(read_last_occupations(cfg.occupations));
    const std::string dir = prepare_dir(cfg);
    const std::string path = join(dir, "analysis.json");
    write_json(path, j);
    emit(log, 1, "label " + to_string(an.classification.label));
    return path;
}

std::string run_command(const RunConfig& cfg, const LogSink& log) {
    if (cfg.kind == "ground") return cmd_ground(cfg, log);
    if (cfg.kind == "evolve") return cmd_evolve(cfg, log);
    if (cfg.kind == "thermal") return cmd_thermal(cfg, log);
    if (cfg.kind == "scan") return cmd_scan(cfg, log);
    if (cfg.kind == "analyze") {
        if (cfg.trajectory.empty()) throw ConfigError("analyze needs a trajectory path");
        return cmd_analyze(cfg.trajectory, cfg, log);
    }
    throw ConfigError("unknown run kind '" + cfg.kind + "'");
}

}  // namespace sbmdyn
