#include "sbmdyn/dmrg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "sbmdyn/error.hpp"
#include "sbmdyn/mps_internal.hpp"
#include "sbmdyn/operators.hpp"

namespace sbmdyn {

namespace {

using Env = std::vector<Matrix>;  // one block per MPO bond index

Env advance_left(const Env& e, const Tensor3& a, const MpoSite& w) {
    Env out(w.wr, Matrix::Zero(a.dr, a.dr));
    for (const auto& en : w.entries) out[en.b] += detail::transfer_left(e[en.a], a, a, &en.op);
    return out;
}

Env advance_right(const Env& f, const Tensor3& a, const MpoSite& w) {
    Env out(w.wl, Matrix::Zero(a.dl, a.dl));
    for (const auto& en : w.entries) out[en.a] += detail::transfer_right(f[en.b], a, a, &en.op);
    return out;
}

// (H A)(l', s', r') = sum E[a](l', l) W_ab(s', s) A(l, s, r) F[b](r, r')
Tensor3 apply_heff(const Tensor3& a, const Env& e, const MpoSite& w, const Env& f) {
    std::vector<Matrix> ea(w.wl);
    Tensor3 out(a.dl, a.dp, a.dr);
    for (const auto& en : w.entries) {
        if (ea[en.a].size() == 0) ea[en.a] = e[en.a] * a.right_grouped();
        const Tensor3 x = Tensor3::from_right_grouped(ea[en.a], a.dp, a.dr).contract_physical(en.op);
        out.m.noalias() += x.m * f[en.b];
    }
    return out;
}

double lowest_eigenpair(const std::function<Vector(const Vector&)>& apply, Vector& v, int krylov = 40,
                        double tol = 1e-9, int restarts = 8) {
    const Eigen::Index n = v.size();
    const int m = static_cast<int>(std::min<Eigen::Index>(krylov, n));
    double energy = 0.0;
    if (v.norm() == 0.0) v.setOnes();
    for (int rs = 0; rs < restarts; ++rs) {
        Matrix basis(n, m);
        std::vector<double> alpha, beta;
        Vector q = v.normalized();
        double last_beta = 0.0;
        int dim = 0;
        for (int j = 0; j < m; ++j) {
            basis.col(j) = q;
            Vector w = apply(q);
            const double a = q.dot(w).real();
            alpha.push_back(a);
            dim = j + 1;
            for (int pass = 0; pass < 2; ++pass)
                w -= basis.leftCols(dim) * (basis.leftCols(dim).adjoint() * w);
            const double b = w.norm();
            last_beta = b;
            if (b < 1e-13 || j == m - 1) break;
            beta.push_back(b);
            q = w / b;
        }
        RealMatrix t = RealMatrix::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) t(i, i) = alpha[i];
        for (int i = 0; i + 1 < dim; ++i) t(i, i + 1) = t(i + 1, i) = beta[i];
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(t);
        const Eigen::VectorXd y = es.eigenvectors().col(0);
        energy = es.eigenvalues()(0);
        v = basis.leftCols(dim) * y.cast<cplx>();
        v.normalize();
        const double residual = std::abs(last_beta * y(dim - 1));
        if (residual < tol || dim == n) break;
    }
    return energy;
}

MpsState random_state(const std::vector<int>& dims, int bond, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    const int n = static_cast<int>(dims.size());
    std::vector<long> left(n + 1, 1), right(n + 1, 1);
    for (int k = 0; k < n; ++k) left[k + 1] = std::min<long>(left[k] * dims[k], 1L << 20);
    for (int k = n - 1; k >= 0; --k) right[k] = std::min<long>(right[k + 1] * dims[k], 1L << 20);
    std::vector<int> bd(n + 1, 1);
    for (int k = 1; k < n; ++k) bd[k] = static_cast<int>(std::min<long>({static_cast<long>(bond), left[k], right[k]}));
    MpsState s;
    for (int k = 0; k < n; ++k) {
        Tensor3 t(bd[k], dims[k], bd[k + 1]);
        for (Eigen::Index i = 0; i < t.m.size(); ++i) t.m.data()[i] = cplx(g(rng), g(rng));
        s.tensors.push_back(std::move(t));
        s.obb.push_back(Matrix::Identity(dims[k], dims[k]));
        s.phys_dim.push_back(dims[k]);
        s.anc_dim.push_back(1);
        s.fixed_basis.push_back(0);
        s.shifts.push_back(0.0);
    }
    canonicalize(s, 0);
    s.scale(1.0 / std::sqrt(s.norm_squared()));
    return s;
}

// Bring a warm-start state into the full local basis with center at 0.
MpsState prepare_initial(const MpsState& init, const std::vector<int>& dims) {
    if (init.size() != static_cast<int>(dims.size())) throw ParameterError("ground_state: initial state length mismatch");
    MpsState s = init;
    for (int k = 0; k < s.size(); ++k) {
        if (s.full_dim(k) != dims[k]) throw ParameterError("ground_state: initial state dimension mismatch");
        if (s.opt_dim(k) != dims[k] || !s.obb[k].isIdentity(0.0)) s.set_physical_tensor(k, s.physical_tensor(k));
    }
    canonicalize(s, 0);
    const double nrm = s.norm_squared();
    if (!(nrm > 0.0)) throw DegenerateStateError("ground_state: initial state has zero norm");
    s.scale(1.0 / std::sqrt(nrm));
    return s;
}

constexpr double kExpansionTol = 1e-30;

}  // namespace

DmrgResult ground_state(const ChainHamiltonian& h, const DmrgOptions& opt, const MpsState* initial) {
    const int n = h.size();
    if (n < 1) throw ParameterError("ground_state: empty Hamiltonian");
    if (opt.bond_cap < 1) throw ParameterError("ground_state: bond_cap must be >= 1");
    const Mpo mpo = build_mpo(h);
    DmrgResult res;
    res.state = initial ? prepare_initial(*initial, h.dims) : random_state(h.dims, opt.initial_bond, opt.seed);
    MpsState& s = res.state;

    std::vector<Env> left(n + 1), right(n + 1);
    left[0] = Env{Matrix::Identity(1, 1)};
    right[n] = Env{Matrix::Identity(1, 1)};
    for (int k = n - 1; k >= 1; --k) right[k] = advance_right(right[k + 1], s.tensors[k], mpo[k]);

    auto optimize = [&](int k) {
        Tensor3& a = s.tensors[k];
        Vector v = Eigen::Map<const Vector>(a.m.data(), a.m.size());
        const int dl = a.dl, dp = a.dp, dr = a.dr;
        auto apply = [&](const Vector& x) {
            Tensor3 t(dl, dp, dr);
            t.m = Eigen::Map<const Matrix>(x.data(), static_cast<Eigen::Index>(dl) * dp, dr);
            const Tensor3 y = apply_heff(t, left[k], mpo[k], right[k + 1]);
            return Vector(Eigen::Map<const Vector>(y.m.data(), y.m.size()));
        };
        const double e = lowest_eigenpair(apply, v);
        a.m = Eigen::Map<const Matrix>(v.data(), static_cast<Eigen::Index>(dl) * dp, dr);
        return e;
    };

    double prev = std::numeric_limits<double>::infinity();
    double energy = prev;
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        const double noise = sweep < opt.noise_sweeps ? opt.noise : 0.0;
        for (int k = 0; k + 1 < n; ++k) {
            energy = optimize(k);
            Tensor3& a = s.tensors[k];
            Tensor3& b = s.tensors[k + 1];
            Matrix am = a.m;
            Matrix bm = b.right_grouped();
            int cap = opt.bond_cap;
            double tol = opt.weight_tol;
            if (noise > 0.0) {
                const MpoSite& w = mpo[k];
                std::vector<Matrix> blocks(w.wr);
                for (const auto& en : w.entries) {
                    const Matrix ea = left[k][en.a] * a.right_grouped();
                    const Tensor3 x = Tensor3::from_right_grouped(ea, a.dp, a.dr).contract_physical(en.op);
                    if (blocks[en.b].size() == 0) blocks[en.b] = x.m;
                    else blocks[en.b] += x.m;
                }
                for (const auto& blk : blocks) {
                    if (blk.size() == 0) continue;
                    Matrix wider(am.rows(), am.cols() + blk.cols());
                    wider << am, noise * blk;
                    am = std::move(wider);
                    Matrix taller = Matrix::Zero(bm.rows() + blk.cols(), bm.cols());
                    taller.topRows(bm.rows()) = bm;
                    bm = std::move(taller);
                }
                cap = std::min(opt.bond_cap, a.dr + std::max(4, a.dr / 2));
                tol = kExpansionTol;
            }
            SvdResult sv = svd_truncate(am, cap, tol);
            const int dl = a.dl, dp = a.dp;
            a = Tensor3::from_left_grouped(std::move(sv.left), dl, dp);
            const Matrix nb = sv.values.cast<cplx>().asDiagonal() * (sv.right * bm);
            b = Tensor3::from_right_grouped(nb, b.dp, b.dr);
            s.center = k + 1;
            left[k + 1] = advance_left(left[k], a, mpo[k]);
        }
        for (int k = n - 1; k >= 1; --k) {
            energy = optimize(k);
            Tensor3& a = s.tensors[k];
            Tensor3& b = s.tensors[k - 1];
            Matrix am = a.right_grouped();
            Matrix bm = b.m;
            int cap = opt.bond_cap;
            double tol = opt.weight_tol;
            if (noise > 0.0) {
                const MpoSite& w = mpo[k];
                std::vector<Matrix> blocks(w.wl);
                for (const auto& en : w.entries) {
                    const Tensor3 x = a.contract_physical(en.op);
                    const Tensor3 y = Tensor3::from_left_grouped(x.m * right[k + 1][en.b], a.dl, a.dp);
                    const Matrix rg = y.right_grouped();
                    if (blocks[en.a].size() == 0) blocks[en.a] = rg;
                    else blocks[en.a] += rg;
                }
                for (const auto& blk : blocks) {
                    if (blk.size() == 0) continue;
                    Matrix taller(am.rows() + blk.rows(), am.cols());
                    taller << am, noise * blk;
                    am = std::move(taller);
                    Matrix wider = Matrix::Zero(bm.rows(), bm.cols() + blk.rows());
                    wider.leftCols(bm.cols()) = bm;
                    bm = std::move(wider);
                }
                cap = std::min(opt.bond_cap, a.dl + std::max(4, a.dl / 2));
                tol = kExpansionTol;
            }
            SvdResult sv = svd_truncate(am, cap, tol);
            const int dp = a.dp, dr = a.dr;
            a = Tensor3::from_right_grouped(sv.right, dp, dr);
            Matrix nb = bm * (sv.left * sv.values.cast<cplx>().asDiagonal());
            b = Tensor3::from_left_grouped(std::move(nb), b.dl, b.dp);
            s.center = k - 1;
            right[k] = advance_right(right[k + 1], a, mpo[k]);
        }
        if (n == 1) energy = optimize(0);
        res.sweep_energies.push_back(energy);
        res.sweeps = sweep + 1;
        if (sweep + 1 >= opt.noise_sweeps && sweep >= 1 && std::abs(prev - energy) < opt.e_tol) {
            res.converged = true;
            break;
        }
        prev = energy;
    }
    s.scale(1.0 / std::sqrt(s.norm_squared()));
    res.energy = mpo_expectation(s, mpo);
    return res;
}

namespace {

void compress_obb(MpsState& s, int d_opt) {
    for (int k = 0; k < s.size(); ++k) {
        if (s.fixed_basis[k]) continue;
        move_center(s, k);
        const ObbUpdate u = obb_update(s, k, std::min(d_opt, s.full_dim(k)));
        s.trunc_weight += u.discarded_weight;
    }
}

}  // namespace

PolarizedBath polarized_bath_state(const ModelParams& p, const PolarizedBathOptions& opt) {
    p.validate();
    const ChainCoefficients c = chain_coefficients(p);
    const int nb = c.boson_sites();
    const int d = p.fock_dim;
    std::vector<double> shifts(nb, 0.0);
    DmrgOptions dopt = opt.dmrg;
    dopt.bond_cap = std::min(dopt.bond_cap, p.bond_cap);

    PolarizedBath out;
    DmrgResult res = ground_state(bath_hamiltonian(c, d, 0.5, shifts), dopt);
    const Matrix xop = ops::position(d);
    if (opt.shifted && c.eta1 != 0.0) {
        for (int it = 0; it < opt.max_shift_iterations; ++it) {
            std::vector<double> measured(nb);
            double residual = 0.0;
            for (int k = 0; k < nb; ++k) {
                measured[k] = expect_local_rep(res.state, xop, k).real();
                residual = std::max(residual, std::abs(measured[k]));
            }
            out.iterations = it;
            out.residual = residual;
            if (residual < opt.shift_tol) {
                out.converged = true;
                break;
            }
            MpsState warm = res.state;
            for (int k = 0; k < nb; ++k) {
                const double step = opt.damping * measured[k];
                warm.apply_local(shift_matrix(-step, d), k);
                shifts[k] += step;
            }
            DmrgOptions wopt = dopt;
            wopt.noise_sweeps = std::min(wopt.noise_sweeps, 1);
            res = ground_state(bath_hamiltonian(c, d, 0.5, shifts), wopt, &warm);
        }
    } else {
        out.converged = true;
        if (c.eta1 != 0.0) {
            for (int k = 0; k < nb; ++k)
                out.residual = std::max(out.residual, std::abs(expect_local_rep(res.state, xop, k).real()));
        }
    }
    res.state.shifts = shifts;
    out.energy = res.energy;
    out.state = std::move(res.state);
    compress_obb(out.state, p.obb_dim);
    out.shifts.shifts = shifts;
    return out;
}

GateSet dynamics_gates(const ModelParams& p, const std::vector<double>& shifts, ShiftMode mode, int order) {
    const ChainCoefficients c = chain_coefficients(p);
    GateOptions go;
    go.kind = TimeKind::real;
    go.order = order;
    go.mode = mode;
    if (mode == ShiftMode::sandwich) {
        go.shifts = shifts;
        go.phys_dims.assign(p.chain_length, p.fock_dim);
        go.phys_dims[0] = 2;
        return build_gates(bond_terms(sbm_hamiltonian(c, p, {})), p.dt, go);
    }
    return build_gates(bond_terms(sbm_hamiltonian(c, p, shifts)), p.dt, go);
}

DynamicsInitial prepare_dynamics_initial(const ModelParams& p, const DynamicsOptions& opt) {
    DynamicsInitial out;
    out.bath = polarized_bath_state(p, opt.bath);
    out.state = attach_spin(out.bath.state, Spin::up);
    if (opt.bath.shifted) out.epsilon_report = apply_epsilon_shift(out.state, opt.epsilon);
    out.shifts.shifts = out.state.shifts;
    out.shifts.epsilon = opt.epsilon;
    out.shifts.mode = opt.mode;
    out.gates = dynamics_gates(p, out.state.shifts, opt.mode, opt.order);
    out.hamiltonian = sbm_hamiltonian(chain_coefficients(p), p, out.state.shifts);
    return out;
}

}  // namespace sbmdyn
