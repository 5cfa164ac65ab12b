#include "sbmdyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "sbmdyn/error.hpp"

namespace sbmdyn {

namespace {

// Vertex of the parabola through three points.
std::pair<double, double> parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double a = (d12 - d01) / (x2 - x0);
    if (a == 0.0) return {x1, y1};
    const double b = d01 - a * (x0 + x1);
    const double xv = -b / (2.0 * a);
    const double yv = y0 + (xv - x0) * (d01 + a * (xv - x1));
    return {xv, yv};
}

}  // namespace

ModeOccupations mode_occupations(const Matrix& one_body, const ChainCoefficients& c) {
    return mode_occupations(one_body, Matrix::Zero(one_body.rows(), one_body.cols()), c);
}

ModeOccupations mode_occupations(const Matrix& one_body, const Matrix& reference, const ChainCoefficients& c) {
    const int nb = c.boson_sites();
    if (one_body.rows() != nb || one_body.cols() != nb || reference.rows() != nb || reference.cols() != nb)
        throw ParameterError("mode_occupations: one-body matrix does not match the chain");
    const StarBath star = chain_to_star(c);
    const Matrix o = star.transform.cast<cplx>();
    ModeOccupations m;
    m.omega_p = star.frequencies;
    m.n_p = (o * one_body * o.transpose()).diagonal().real();
    m.n0_p = (o * reference * o.transpose()).diagonal().real();
    return m;
}

ModeOccupations mode_occupations(const MpsState& state, const ChainCoefficients& c) {
    return mode_occupations(one_body_matrix(state), c);
}

double resonance_peak(const ModeOccupations& m) {
    const Eigen::Index n = m.omega_p.size();
    if (n < 3 || m.n_p.size() != n || m.n0_p.size() != n) throw ParameterError("resonance_peak: need >= 3 modes");
    const RealVector f = m.n_p - m.n0_p;
    if (f.maxCoeff() - f.minCoeff() < 1e-12) throw NotFoundError("resonance_peak: flat occupation profile");
    Eigen::Index j = 0;
    f.maxCoeff(&j);
    if (j == 0 || j == n - 1) return m.omega_p(j);
    const double w = parabola_vertex(m.omega_p(j - 1), f(j - 1), m.omega_p(j), f(j), m.omega_p(j + 1), f(j + 1)).first;
    return std::clamp(w, m.omega_p(j - 1), m.omega_p(j + 1));
}

double delta_r_zero_T(double delta, double omega_c, double alpha) {
    if (alpha < 0.0 || alpha >= 1.0) throw DomainError("delta_r_zero_T: alpha must lie in [0, 1)");
    if (!(delta > 0.0) || !(omega_c > 0.0)) throw DomainError("delta_r_zero_T: delta and omega_c must be positive");
    return delta * std::pow(delta / omega_c, alpha / (1.0 - alpha));
}

double finite_T_residual(double r, double delta, double omega_c, double alpha, double beta) {
    const double br = beta * r;
    const double th = br * std::tanh(0.5 * br);
    const double ratio = (2.0 + th) / (beta * omega_c + th);
    const double log_term = -2.0 * std::numbers::pi * alpha / br + alpha * std::log(ratio);
    return 0.5 * r - 0.5 * delta * std::exp(std::min(log_term, 700.0));
}

std::pair<double, double> delta_r_finite_T(double delta, double omega_c, double alpha, double beta) {
    if (!(delta > 0.0) || !(omega_c > 0.0) || !(beta > 0.0) || alpha < 0.0)
        throw DomainError("delta_r_finite_T: parameters must be positive");
    if (alpha == 0.0) return {delta, delta};
    auto f = [&](double r) { return finite_T_residual(r, delta, omega_c, alpha, beta); };
    constexpr int kPoints = 1000;
    const double lo = delta * 1e-6;
    const double ratio = std::log(delta / lo) / (kPoints - 1);
    std::vector<double> roots;
    double x_prev = lo, f_prev = f(lo);
    if (f_prev == 0.0) roots.push_back(lo);
    for (int i = 1; i < kPoints; ++i) {
        const double x = i == kPoints - 1 ? delta : lo * std::exp(ratio * i);
        const double fx = f(x);
        if (fx == 0.0) {
            roots.push_back(x);
        } else if (f_prev != 0.0 && (f_prev < 0.0) != (fx < 0.0)) {
            double a = x_prev, b = x, fa = f_prev;
            while (b - a > 1e-12 * std::max(1.0, b)) {
                const double mid = 0.5 * (a + b);
                const double fm = f(mid);
                if (fm == 0.0) {
                    a = b = mid;
                    break;
                }
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        x_prev = x;
        f_prev = fx;
    }
    if (roots.size() != 2) {
        throw RootCountError("delta_r_finite_T: expected two roots, found " + std::to_string(roots.size()),
                             roots);
    }
    return {roots[0], roots[1]};
}

LocalMinimum first_local_minimum(const std::vector<double>& t, const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 5 || t.size() != n) throw ParameterError("first_local_minimum: need >= 5 samples");
    std::vector<double> sm(v);
    for (std::size_t i = 1; i + 1 < n; ++i) sm[i] = (v[i - 1] + v[i] + v[i + 1]) / 3.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(sm[i - 1] > sm[i] && sm[i] < sm[i + 1])) continue;
        // Raw-sample minimum next to the smoothed one, then a parabola through it.
        std::size_t j = i;
        if (v[i - 1] < v[j]) j = i - 1;
        if (v[i + 1] < v[j]) j = i + 1;
        j = std::clamp<std::size_t>(j, 1, n - 2);
        auto [tv, vv] = parabola_vertex(t[j - 1], v[j - 1], t[j], v[j], t[j + 1], v[j + 1]);
        if (!(tv >= t[j - 1] && tv <= t[j + 1]) || vv > v[j]) {
            tv = t[j];
            vv = v[j];
        }
        return {tv, vv};
    }
    throw NotFoundError("first_local_minimum: trajectory has no local minimum");
}

LocalMinimum first_local_minimum(const TrajectoryRecord& rec) { return first_local_minimum(rec.times, rec.sigma_z); }

double LogFit::operator()(double n) const { return a * std::log(n) + b; }

double LogFit::invert(double sigma) const {
    if (a == 0.0) throw NumericalError("LogFit::invert: zero slope");
    return std::exp((sigma - b) / a);
}

LogFit n_eff_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw ParameterError("n_eff_fit: need >= 3 points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [n, s] : points) {
        if (!(n > 0.0)) throw ParameterError("n_eff_fit: N must be positive");
        sx += std::log(n);
        sy += s;
    }
    const double m = static_cast<double>(points.size());
    const double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [n, s] : points) {
        const double dx = std::log(n) - mx;
        sxx += dx * dx;
        sxy += dx * (s - my);
    }
    if (sxx < 1e-300) throw NumericalError("n_eff_fit: degenerate abscissae");
    LogFit fit;
    fit.a = sxy / sxx;
    fit.b = my - fit.a * mx;
    return fit;
}

std::string to_string(DynamicsLabel label) {
    switch (label) {
        case DynamicsLabel::coherent: return "coherent";
        case DynamicsLabel::pseudo_coherent: return "pseudo-coherent";
        case DynamicsLabel::undetermined: return "undetermined";
    }
    return "undetermined";
}

ClassifierReport classify_dynamics(const std::vector<double>& t, const std::vector<double>& v,
                                   const ClassifierOptions& opt) {
    const std::size_t n = v.size();
    if (t.size() != n) throw ParameterError("classify_dynamics: length mismatch");
    std::vector<double> tt, dd;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (t[i] <= opt.t_skip) continue;
        tt.push_back(t[i]);
        dd.push_back((v[i + 1] - v[i - 1]) / (t[i + 1] - t[i - 1]));
    }
    if (dd.size() < 5) throw ParameterError("classify_dynamics: record too short after t_skip");
    double dmax = 0.0;
    for (double d : dd) dmax = std::max(dmax, std::abs(d));
    ClassifierReport rep;
    if (dmax == 0.0) return rep;
    const double h = opt.hysteresis * dmax;
    int state = 0;
    for (std::size_t i = 0; i < dd.size(); ++i) {
        const int s = dd[i] > h ? 1 : (dd[i] < -h ? -1 : state);
        if (state != 0 && s != state) {
            ++rep.sign_changes;
            // Zero crossing of the derivative closest before the switch.
            std::size_t j = i;
            while (j > 0 && (dd[j - 1] < 0.0) == (dd[i] < 0.0)) --j;
            double tc = tt[j];
            if (j > 0) {
                const double d0 = dd[j - 1], d1 = dd[j];
                tc = d0 == d1 ? tt[j] : tt[j - 1] + (tt[j] - tt[j - 1]) * d0 / (d0 - d1);
            }
            rep.extrema.push_back(tc);
        }
        state = s;
    }
    if (rep.extrema.size() >= 3) {
        std::vector<double> gaps;
        for (std::size_t i = 1; i < rep.extrema.size(); ++i) gaps.push_back(rep.extrema[i] - rep.extrema[i - 1]);
        double mean = 0.0;
        for (double g : gaps) mean += g;
        mean /= static_cast<double>(gaps.size());
        double var = 0.0;
        for (double g : gaps) var += (g - mean) * (g - mean);
        var /= static_cast<double>(gaps.size());
        rep.spacing_cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
    }
    if (rep.sign_changes >= opt.n_osc)
        rep.label = rep.spacing_cv > opt.cv_cutoff ? DynamicsLabel::pseudo_coherent : DynamicsLabel::coherent;
    return rep;
}

TrajectoryAnalysis analyze_trajectory(const TrajectoryRecord& rec, const ClassifierOptions& opt, const LogFit* fit) {
    TrajectoryAnalysis a;
    try {
        const LocalMinimum m = first_local_minimum(rec);
        a.has_minimum = true;
        a.t_s = m.t_s;
        a.sigma_m = m.sigma_m;
        if (fit) a.n_eff = fit->invert(m.sigma_m);
    } catch (const NotFoundError&) {
        a.has_minimum = false;
    }
    a.classification = classify_dynamics(rec.times, rec.sigma_z, opt);
    return a;
}

void write_occupation_csv(const std::string& path, const std::vector<Snapshot>& snapshots, const ChainCoefficients& c) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    std::fprintf(f, "t,omega_p,n_p,n_p_minus_n0\n");
    if (!snapshots.empty()) {
        const Matrix& ref = snapshots.front().one_body;
        for (const auto& s : snapshots) {
            const ModeOccupations m = mode_occupations(s.one_body, ref, c);
            for (Eigen::Index p = 0; p < m.omega_p.size(); ++p)
                std::fprintf(f, "%.15g,%.15g,%.15g,%.15g\n", s.t, m.omega_p(p), m.n_p(p), m.n_p(p) - m.n0_p(p));
        }
    }
    std::fclose(f);
}

}  // namespace sbmdyn
