#include "sbmdyn/tebd.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "sbmdyn/mps_internal.hpp"
#include "sbmdyn/operators.hpp"

namespace sbmdyn {

namespace {

// G acting on (p1 x p2) lifted to ((p1 a1) x (p2 a2)) with identity ancillas.
Matrix embed_ancilla_gate(const Matrix& g, int p1, int a1, int p2, int a2) {
    if (a1 == 1 && a2 == 1) return g;
    const int d1 = p1 * a1, d2 = p2 * a2;
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(d1) * d2, static_cast<Eigen::Index>(d1) * d2);
    auto idx = [&](int n1, int x1, int n2, int x2) { return (n1 * a1 + x1) * d2 + n2 * a2 + x2; };
    for (int n1 = 0; n1 < p1; ++n1)
        for (int n2 = 0; n2 < p2; ++n2)
            for (int m1 = 0; m1 < p1; ++m1)
                for (int m2 = 0; m2 < p2; ++m2) {
                    const cplx v = g(n1 * p2 + n2, m1 * p2 + m2);
                    if (v == cplx(0.0)) continue;
                    for (int x1 = 0; x1 < a1; ++x1)
                        for (int x2 = 0; x2 < a2; ++x2) out(idx(n1, x1, n2, x2), idx(m1, x1, m2, x2)) = v;
                }
    return out;
}

// rho12(s, s') = sum_{l,r} th(l, s, r) conj(th(l, s', r)) for identity environments.
Matrix pair_density(const Tensor3& th) {
    Matrix rho = Matrix::Zero(th.dp, th.dp);
    for (int r = 0; r < th.dr; ++r) {
        Eigen::Map<const Matrix> b(th.m.col(r).data(), th.dl, th.dp);
        rho.noalias() += b.transpose() * b.conjugate();
    }
    return rho;
}

Matrix trace_right(const Matrix& rho, int p1, int p2) {
    Matrix out = Matrix::Zero(p1, p1);
    for (int a = 0; a < p1; ++a)
        for (int b = 0; b < p1; ++b)
            for (int s = 0; s < p2; ++s) out(a, b) += rho(a * p2 + s, b * p2 + s);
    return out;
}

Matrix trace_left(const Matrix& rho, int p1, int p2) {
    Matrix out = Matrix::Zero(p2, p2);
    for (int a = 0; a < p2; ++a)
        for (int b = 0; b < p2; ++b)
            for (int s = 0; s < p1; ++s) out(a, b) += rho(s * p2 + a, s * p2 + b);
    return out;
}

int target_opt_dim(const MpsState& st, int k, const StepOptions& opt) {
    if (st.fixed_basis[k]) return st.full_dim(k);
    if (!opt.obb_every_gate) return st.opt_dim(k);
    if (opt.obb_dim <= 0) return st.full_dim(k);
    return std::min(opt.obb_dim, st.full_dim(k));
}

void apply_layer(MpsState& state, const std::vector<Matrix>& gates, int parity, const StepOptions& opt,
                 bool renormalize, double& err) {
    const int nb = static_cast<int>(gates.size());
    std::vector<int> bonds;
    for (int b = parity; b < nb; b += 2)
        if (gates[b].size() > 0) bonds.push_back(b);
    if (bonds.empty()) return;
    const bool rightward = 2 * state.center < state.size();
    if (rightward) {
        for (int b : bonds) err += apply_bond_gate(state, b, gates[b], opt, true, renormalize);
    } else {
        for (auto it = bonds.rbegin(); it != bonds.rend(); ++it)
            err += apply_bond_gate(state, *it, gates[*it], opt, false, renormalize);
    }
}

}  // namespace

std::vector<Matrix> local_terms(const ChainCoefficients& c, const ModelParams& p,
                                const std::vector<double>& shifts) {
    return bond_terms(sbm_hamiltonian(c, p, shifts));
}

GateSet build_gates(const std::vector<Matrix>& terms, double dt, const GateOptions& opt) {
    if (!(dt > 0.0)) throw ParameterError("build_gates: dt must be positive");
    if (opt.order != 1 && opt.order != 2) throw ParameterError("build_gates: order must be 1 or 2");
    const bool sandwich = opt.mode == ShiftMode::sandwich;
    const int nb = static_cast<int>(terms.size());
    if (sandwich && static_cast<int>(opt.phys_dims.size()) != nb + 1)
        throw ParameterError("build_gates: sandwich mode needs per-site physical dimensions");
    if (!opt.anc_dims.empty() && static_cast<int>(opt.anc_dims.size()) != nb + 1)
        throw ParameterError("build_gates: ancilla dimensions must cover every site");

    GateSet g;
    g.dt = dt;
    g.kind = opt.kind;
    g.order = opt.order;
    g.shift_mode = opt.mode;
    g.even_gates.assign(nb, Matrix());
    g.odd_gates.assign(nb, Matrix());

    for (int b = 0; b < nb; ++b) {
        if (hermiticity_defect(terms[b]) > 1e-10) throw NumericalError("build_gates: non-Hermitian bond term");
        const double tau = (b % 2 == 1 && opt.order == 2) ? 0.5 * dt : dt;
        const cplx c = opt.kind == TimeKind::real ? cplx(0.0, -tau) : cplx(-tau, 0.0);
        Matrix gate = expm_hermitian(terms[b], c);
        if (sandwich) {
            auto shift = [&](int k) { return k < static_cast<int>(opt.shifts.size()) ? opt.shifts[k] : 0.0; };
            gate = sandwich_gate(gate, shift(b), shift(b + 1), opt.phys_dims[b], opt.phys_dims[b + 1]);
        }
        if (!opt.anc_dims.empty() && (opt.anc_dims[b] > 1 || opt.anc_dims[b + 1] > 1)) {
            if (static_cast<int>(opt.phys_dims.size()) != nb + 1)
                throw ParameterError("build_gates: ancilla embedding needs per-site physical dimensions");
            gate = embed_ancilla_gate(gate, opt.phys_dims[b], opt.anc_dims[b], opt.phys_dims[b + 1],
                                      opt.anc_dims[b + 1]);
        }
        (b % 2 == 0 ? g.even_gates : g.odd_gates)[b] = std::move(gate);
    }
    return g;
}

double apply_bond_gate(MpsState& state, int bond, const Matrix& gate, const StepOptions& opt,
                       bool move_right, bool renormalize) {
    const int k1 = bond, k2 = bond + 1;
    if (state.center < k1) move_center(state, k1);
    if (state.center > k2) move_center(state, k2);

    const int d1 = state.full_dim(k1), d2 = state.full_dim(k2);
    if (gate.rows() != static_cast<Eigen::Index>(d1) * d2)
        throw ParameterError("apply_bond_gate: gate dimension mismatch");

    const Tensor3 th_opt = detail::merge_two_sites(state.tensors[k1], state.tensors[k2]);
    const Matrix w_old = kron(state.obb[k1], state.obb[k2]);
    const Tensor3 th = th_opt.contract_physical(w_old.transpose()).contract_physical(gate);

    double err = 0.0;
    Matrix v1 = state.obb[k1], v2 = state.obb[k2];
    const int o1 = target_opt_dim(state, k1, opt), o2 = target_opt_dim(state, k2, opt);
    if (opt.obb_every_gate && !(state.fixed_basis[k1] && state.fixed_basis[k2])) {
        const Matrix rho = pair_density(th);
        const double tr = rho.trace().real();
        if (!(tr > 0.0)) throw DegenerateStateError("apply_bond_gate: state annihilated");
        if (state.fixed_basis[k1]) {
            v1 = Matrix::Identity(d1, d1);
        } else {
            const OptimalBasis ob = optimal_basis(trace_right(rho, d1, d2) / tr, o1);
            v1 = ob.transform;
            err += 1.0 - ob.kept_weight;
        }
        if (state.fixed_basis[k2]) {
            v2 = Matrix::Identity(d2, d2);
        } else {
            const OptimalBasis ob = optimal_basis(trace_left(rho, d1, d2) / tr, o2);
            v2 = ob.transform;
            err += 1.0 - ob.kept_weight;
        }
    }
    const int p1 = static_cast<int>(v1.rows()), p2 = static_cast<int>(v2.rows());
    const Tensor3 th_new = th.contract_physical(kron(v1, v2).conjugate());
    const Matrix mat = detail::split_matrix(th_new, p1, p2);
    SvdResult sv = svd_truncate(mat, opt.bond_cap, opt.weight_tol);
    err += sv.discarded_weight;

    RealVector s = sv.values;
    if (renormalize) s /= s.norm();
    const int dl = th.dl, dr = th.dr;
    if (move_right) {
        state.tensors[k1] = Tensor3::from_left_grouped(std::move(sv.left), dl, p1);
        const Matrix r = s.cast<cplx>().asDiagonal() * sv.right;
        state.tensors[k2] = Tensor3::from_right_grouped(r, p2, dr);
        state.center = k2;
    } else {
        Matrix l = sv.left * s.cast<cplx>().asDiagonal();
        state.tensors[k1] = Tensor3::from_left_grouped(std::move(l), dl, p1);
        state.tensors[k2] = Tensor3::from_right_grouped(sv.right, p2, dr);
        state.center = k1;
    }
    state.obb[k1] = std::move(v1);
    state.obb[k2] = std::move(v2);
    state.trunc_weight += err;
    return err;
}

double tebd_step(MpsState& state, const GateSet& gates, const StepOptions& opt) {
    if (gates.bonds() != state.size() - 1) throw ParameterError("tebd_step: gate set does not match chain");
    const bool renorm = gates.kind == TimeKind::imaginary;
    double err = 0.0;
    apply_layer(state, gates.odd_gates, 1, opt, renorm, err);
    apply_layer(state, gates.even_gates, 0, opt, renorm, err);
    if (gates.order == 2) apply_layer(state, gates.odd_gates, 1, opt, renorm, err);
    return err;
}

double mpo_expectation(const MpsState& state, const Mpo& mpo) {
    if (static_cast<int>(mpo.size()) != state.size()) throw ParameterError("mpo_expectation: length mismatch");
    std::vector<Matrix> env(1, Matrix::Identity(1, 1));
    for (int k = 0; k < state.size(); ++k) {
        const MpoSite& w = mpo[k];
        const Tensor3& t = state.tensors[k];
        std::vector<Matrix> next(w.wr, Matrix::Zero(t.dr, t.dr));
        for (const auto& e : w.entries) {
            if (env[e.a].size() == 0) continue;
            const Matrix o = state.to_opt_basis(e.op, k);
            next[e.b] += detail::transfer_left(env[e.a], t, t, &o);
        }
        env = std::move(next);
    }
    const double nrm = state.norm_squared();
    return env[0].trace().real() / nrm;
}

void observe(const MpsState& state, const Mpo* energy_mpo, double t, double err, TrajectoryRecord& rec) {
    rec.times.push_back(t);
    const bool spin = state.fixed_basis[0] && state.phys_dim[0] == 2;
    rec.sigma_z.push_back(spin ? expect_local(state, ops::sigma_z(), 0).real()
                               : std::numeric_limits<double>::quiet_NaN());
    rec.norm.push_back(std::sqrt(state.norm_squared()));
    rec.energy.push_back(energy_mpo ? mpo_expectation(state, *energy_mpo)
                                    : std::numeric_limits<double>::quiet_NaN());
    rec.trunc_err.push_back(err);
}

Snapshot take_snapshot(const MpsState& state, double t) {
    Snapshot s;
    s.t = t;
    s.one_body = one_body_matrix(state);
    s.occupations = s.one_body.diagonal().real();
    return s;
}

TrajectoryRecord evolve(MpsState& state, const GateSet& gates, const Mpo* energy_mpo, const EvolveOptions& opt) {
    if (opt.observe_every < 1) throw ParameterError("evolve: observe_every must be >= 1");
    const double span = opt.t_final - opt.t_start;
    if (span < -1e-12) throw ParameterError("evolve: t_final precedes t_start");
    const long steps = std::max(0L, std::lround(span / gates.dt));
    TrajectoryRecord rec;
    if (opt.record_initial) {
        observe(state, energy_mpo, opt.t_start, 0.0, rec);
        if (opt.snapshot_every > 0) rec.snapshots.push_back(take_snapshot(state, opt.t_start));
    }
    double pending = 0.0;
    for (long i = 1; i <= steps; ++i) {
        const double t = opt.t_start + static_cast<double>(i) * gates.dt;
        const double e = tebd_step(state, gates, opt.step);
        pending += e;
        if (opt.on_step) opt.on_step(static_cast<int>(i), t, e);
        if (i % opt.observe_every == 0 || i == steps) {
            observe(state, energy_mpo, t, pending, rec);
            pending = 0.0;
        }
        if (opt.snapshot_every > 0 && i % opt.snapshot_every == 0) rec.snapshots.push_back(take_snapshot(state, t));
        if (state.trunc_weight > opt.trunc_budget) {
            std::ostringstream msg;
            msg << "evolve: accumulated truncation weight " << state.trunc_weight << " exceeds budget "
                << opt.trunc_budget << " at t=" << t;
            throw EvolutionAborted(msg.str(), std::move(rec));
        }
        if (opt.checkpoint_every > 0 && opt.on_checkpoint && i % opt.checkpoint_every == 0)
            opt.on_checkpoint(state, t, rec);
    }
    return rec;
}

TrajectoryRecord evolve(MpsState& state, const ModelParams& p, double t_final, int observe_every) {
    const ChainCoefficients c = chain_coefficients(p);
    const ChainHamiltonian h = sbm_hamiltonian(c, p, state.shifts);
    GateOptions go;
    const GateSet gates = build_gates(bond_terms(h), p.dt, go);
    const Mpo mpo = build_mpo(h, state.anc_dim);
    EvolveOptions eo;
    eo.t_final = t_final;
    eo.observe_every = observe_every;
    eo.step.bond_cap = p.bond_cap;
    eo.step.obb_dim = p.obb_dim;
    return evolve(state, gates, &mpo, eo);
}

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    std::fprintf(f, "t,sigma_z,norm,energy,trunc_err\n");
    for (std::size_t i = 0; i < rec.size(); ++i)
        std::fprintf(f, "%.15g,%.15g,%.15g,%.15g,%.15g\n", rec.times[i], rec.sigma_z[i], rec.norm[i],
                     rec.energy[i], rec.trunc_err[i]);
    std::fclose(f);
}

TrajectoryRecord read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open trajectory " + path);
    std::string line;
    std::getline(in, line);
    if (line.rfind("t,sigma_z", 0) != 0) throw ConfigError(path + ": unexpected trajectory header");
    TrajectoryRecord rec;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        double v[5];
        for (double& x : v) {
            if (!std::getline(ss, cell, ',')) throw ConfigError(path + ": short row");
            x = std::strtod(cell.c_str(), nullptr);
        }
        rec.times.push_back(v[0]);
        rec.sigma_z.push_back(v[1]);
        rec.norm.push_back(v[2]);
        rec.energy.push_back(v[3]);
        rec.trunc_err.push_back(v[4]);
    }
    return rec;
}

}  // namespace sbmdyn
