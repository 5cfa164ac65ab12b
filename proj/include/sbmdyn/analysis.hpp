#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sbmdyn/model.hpp"
#include "sbmdyn/mps.hpp"
#include "sbmdyn/tebd.hpp"

namespace sbmdyn {

/// Star-mode occupations n_p = (O C O^T)_pp, ascending in omega_p.
struct ModeOccupations {
    RealVector omega_p;
    RealVector n_p;
    RealVector n0_p;  // reference occupations (zero when none given)
};

ModeOccupations mode_occupations(const Matrix& one_body, const ChainCoefficients& c);
ModeOccupations mode_occupations(const Matrix& one_body, const Matrix& reference, const ChainCoefficients& c);
ModeOccupations mode_occupations(const MpsState& state, const ChainCoefficients& c);

/// Maximum of n_p - n0_p, refined by a three-point parabola in mode index
/// and mapped back to frequency by linear interpolation.
double resonance_peak(const ModeOccupations& m);

/// Delta (Delta/omega_c)^{alpha/(1-alpha)}
double delta_r_zero_T(double delta, double omega_c, double alpha);

/// F(r) = r/2 - (Delta/2) exp(-2 pi alpha/(beta r))
///        * [(2 + beta r tanh(beta r/2)) / (beta omega_c + beta r tanh(beta r/2))]^alpha
double finite_T_residual(double r, double delta, double omega_c, double alpha, double beta);

/// Both roots of finite_T_residual on (0, Delta], low then high. alpha = 0
/// returns (Delta, Delta). Throws RootCountError when not exactly two roots.
std::pair<double, double> delta_r_finite_T(double delta, double omega_c, double alpha, double beta);

struct LocalMinimum {
    double t_s = 0.0;
    double sigma_m = 0.0;
};

/// First local minimum of the window-3 moving average, refined by a parabola
/// through the raw samples. Throws NotFoundError for monotone data.
LocalMinimum first_local_minimum(const std::vector<double>& t, const std::vector<double>& v);
LocalMinimum first_local_minimum(const TrajectoryRecord& rec);

/// sigma_m ~ a ln N + b
struct LogFit {
    double a = 0.0;
    double b = 0.0;
    double operator()(double n) const;
    double invert(double sigma) const;
};
LogFit n_eff_fit(const std::vector<std::pair<double, double>>& points);

enum class DynamicsLabel { coherent, pseudo_coherent, undetermined };
std::string to_string(DynamicsLabel label);

struct ClassifierOptions {
    int n_osc = 6;
    double hysteresis = 0.02;  // fraction of max |d sigma/dt|
    double cv_cutoff = 0.2;
    double t_skip = 20.0;
};

struct ClassifierReport {
    DynamicsLabel label = DynamicsLabel::undetermined;
    int sign_changes = 0;
    double spacing_cv = 0.0;
    std::vector<double> extrema;  // times of derivative zero crossings
};

ClassifierReport classify_dynamics(const std::vector<double>& t, const std::vector<double>& v,
                                   const ClassifierOptions& opt = {});

struct TrajectoryAnalysis {
    bool has_minimum = false;
    double t_s = 0.0;
    double sigma_m = 0.0;
    double n_eff = 0.0;  // 0 when no fit was supplied
    ClassifierReport classification;
};

TrajectoryAnalysis analyze_trajectory(const TrajectoryRecord& rec, const ClassifierOptions& opt,
                                      const LogFit* fit = nullptr);

/// `t,omega_p,n_p,n_p_minus_n0`; the first snapshot is the reference.
void write_occupation_csv(const std::string& path, const std::vector<Snapshot>& snapshots,
                          const ChainCoefficients& c);

}  // namespace sbmdyn
