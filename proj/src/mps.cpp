#include "sbmdyn/mps.hpp"

#include <algorithm>
#include <cmath>

#include "sbmdyn/error.hpp"
#include "sbmdyn/mps_internal.hpp"
#include "sbmdyn/operators.hpp"
#include "sbmdyn/shift.hpp"

namespace sbmdyn {

Tensor3 Tensor3::contract_physical(const Matrix& op) const {
    if (op.cols() != dp) throw ParameterError("contract_physical: operator dimension mismatch");
    const int np = static_cast<int>(op.rows());
    Tensor3 out(dl, np, dr);
    const Matrix opt = op.transpose();
    for (int r = 0; r < dr; ++r) {
        Eigen::Map<const Matrix> in(m.col(r).data(), dl, dp);
        Eigen::Map<Matrix> res(out.m.col(r).data(), dl, np);
        res.noalias() = in * opt;
    }
    return out;
}

Tensor3 Tensor3::from_left_grouped(Matrix mat, int dl, int dp) {
    Tensor3 t;
    t.dl = dl;
    t.dp = dp;
    t.dr = static_cast<int>(mat.cols());
    t.m = std::move(mat);
    return t;
}

Tensor3 Tensor3::from_right_grouped(const Matrix& mat, int dp, int dr) {
    Tensor3 t;
    t.dl = static_cast<int>(mat.rows());
    t.dp = dp;
    t.dr = dr;
    t.m = Eigen::Map<const Matrix>(mat.data(), t.dl * dp, dr);
    return t;
}

int MpsState::max_bond_dim() const {
    int d = 1;
    for (const auto& t : tensors) d = std::max(d, t.dr);
    return d;
}

bool MpsState::shifted() const {
    return std::any_of(shifts.begin(), shifts.end(), [](double x) { return x != 0.0; });
}

Tensor3 MpsState::physical_tensor(int k) const {
    return tensors[k].contract_physical(obb[k].transpose());
}

void MpsState::set_physical_tensor(int k, Tensor3 t) {
    if (t.dp != full_dim(k)) throw ParameterError("set_physical_tensor: dimension mismatch");
    obb[k] = Matrix::Identity(t.dp, t.dp);
    tensors[k] = std::move(t);
}

Matrix MpsState::to_opt_basis(const Matrix& op, int k) const {
    return obb[k].conjugate() * op * obb[k].transpose();
}

void MpsState::apply_local(const Matrix& op, int k) {
    tensors[k] = tensors[k].contract_physical(to_opt_basis(op, k));
}

void MpsState::scale(cplx factor) { tensors[center].m *= factor; }

double MpsState::norm_squared() const {
    Matrix e = Matrix::Identity(1, 1);
    for (const auto& t : tensors) e = detail::transfer_left(e, t, t, nullptr);
    return e.trace().real();
}

namespace detail {

Matrix transfer_left(const Matrix& env, const Tensor3& bra, const Tensor3& ket, const Matrix* op) {
    Matrix t = env * ket.right_grouped();
    Tensor3 t3 = Tensor3::from_right_grouped(t, ket.dp, ket.dr);
    if (op) t3 = t3.contract_physical(*op);
    return bra.m.adjoint() * t3.m;
}

Matrix transfer_right(const Matrix& env, const Tensor3& bra, const Tensor3& ket, const Matrix* op) {
    Tensor3 g = Tensor3::from_left_grouped(ket.m * env, ket.dl, ket.dp);
    if (op) {
        const Tensor3 b = bra.contract_physical(op->adjoint());
        return g.right_grouped() * b.right_grouped().adjoint();
    }
    return g.right_grouped() * bra.right_grouped().adjoint();
}

std::vector<Matrix> left_environments(const MpsState& s) {
    std::vector<Matrix> env(s.size() + 1);
    env[0] = Matrix::Identity(1, 1);
    for (int k = 0; k < s.size(); ++k)
        env[k + 1] = transfer_left(env[k], s.tensors[k], s.tensors[k], nullptr);
    return env;
}

std::vector<Matrix> right_environments(const MpsState& s) {
    std::vector<Matrix> env(s.size() + 1);
    env[s.size()] = Matrix::Identity(1, 1);
    for (int k = s.size() - 1; k >= 0; --k)
        env[k] = transfer_right(env[k + 1], s.tensors[k], s.tensors[k], nullptr);
    return env;
}

Tensor3 merge_two_sites(const Tensor3& a, const Tensor3& b) {
    const Matrix prod = a.m * b.right_grouped();  // (l + dl*s1, s2 + p2*r)
    const int dl = a.dl, p1 = a.dp, p2 = b.dp, dr = b.dr;
    Tensor3 th(dl, p1 * p2, dr);
    for (int r = 0; r < dr; ++r)
        for (int s2 = 0; s2 < p2; ++s2)
            for (int s1 = 0; s1 < p1; ++s1)
                th.m.block(static_cast<Eigen::Index>(dl) * (s1 * p2 + s2), r, dl, 1) =
                    prod.block(static_cast<Eigen::Index>(dl) * s1, s2 + p2 * r, dl, 1);
    return th;
}

Matrix split_matrix(const Tensor3& th, int p1, int p2) {
    const int dl = th.dl, dr = th.dr;
    Matrix out(static_cast<Eigen::Index>(dl) * p1, static_cast<Eigen::Index>(p2) * dr);
    for (int r = 0; r < dr; ++r)
        for (int s2 = 0; s2 < p2; ++s2)
            for (int s1 = 0; s1 < p1; ++s1)
                out.block(static_cast<Eigen::Index>(dl) * s1, s2 + p2 * r, dl, 1) =
                    th.m.block(static_cast<Eigen::Index>(dl) * (s1 * p2 + s2), r, dl, 1);
    return out;
}

Matrix density_from_tensor(const Tensor3& a, const Matrix& left, const Matrix& right) {
    const Matrix x = left * a.right_grouped();
    const Tensor3 x3 = Tensor3::from_right_grouped(x, a.dp, a.dr);
    const Tensor3 y = Tensor3::from_left_grouped(x3.m * right, a.dl, a.dp);
    Matrix rho(a.dp, a.dp);
    for (int n = 0; n < a.dp; ++n)
        for (int np = 0; np < a.dp; ++np)
            rho(n, np) = (y.slice(n).array() * a.slice(np).array().conjugate()).sum();
    return rho;
}

}  // namespace detail

MpsState product_state(const std::vector<Vector>& locals, bool spin_first, int opt_dim) {
    MpsState s;
    const int n = static_cast<int>(locals.size());
    for (int k = 0; k < n; ++k) {
        const int d = static_cast<int>(locals[k].size());
        const bool fixed = spin_first && k == 0;
        const int dopt = (fixed || opt_dim < 0) ? d : std::min(opt_dim, d);
        // Basis whose first vector is the local state; the rest completes it.
        Matrix basis = Matrix::Identity(d, d);
        Tensor3 t(1, d, 1);
        for (int i = 0; i < d; ++i) t(0, i, 0) = locals[k](i);
        if (!fixed && dopt < d) {
            Matrix seed = Matrix::Identity(d, d);
            seed.col(0) = locals[k].normalized();
            Eigen::HouseholderQR<Matrix> qr(seed);
            Matrix q = qr.householderQ() * Matrix::Identity(d, d);
            // Phase so that the first column equals the local state.
            const cplx ph = q.col(0).dot(locals[k].normalized());
            q.col(0) *= ph;
            basis = q.transpose().topRows(dopt);
            Tensor3 opt(1, dopt, 1);
            opt(0, 0, 0) = locals[k].norm();
            s.tensors.push_back(opt);
            s.obb.push_back(basis);
        } else {
            s.tensors.push_back(t);
            s.obb.push_back(Matrix::Identity(d, d));
        }
        s.phys_dim.push_back(d);
        s.anc_dim.push_back(1);
        s.fixed_basis.push_back(fixed ? 1 : 0);
        s.shifts.push_back(0.0);
    }
    s.center = 0;
    return s;
}

MpsState init_product_state(const ModelParams& p, Spin spin) {
    std::vector<Vector> locals;
    Vector sp = Vector::Zero(2);
    sp(spin == Spin::up ? 0 : 1) = 1.0;
    locals.push_back(sp);
    for (int k = 1; k < p.chain_length; ++k) {
        Vector v = Vector::Zero(p.fock_dim);
        v(0) = 1.0;
        locals.push_back(v);
    }
    MpsState s = product_state(locals, true);
    // Identity embedding: first d_opt rows of 1_d.
    for (int k = 1; k < s.size(); ++k) {
        s.obb[k] = Matrix::Identity(p.fock_dim, p.fock_dim).topRows(p.obb_dim);
        Tensor3 t(1, p.obb_dim, 1);
        t(0, 0, 0) = 1.0;
        s.tensors[k] = t;
    }
    return s;
}

MpsState attach_spin(const MpsState& bath, Spin spin) {
    MpsState s;
    Tensor3 t(1, 2, 1);
    t(0, spin == Spin::up ? 0 : 1, 0) = 1.0;
    s.tensors.push_back(t);
    s.obb.push_back(Matrix::Identity(2, 2));
    s.phys_dim.push_back(2);
    s.anc_dim.push_back(1);
    s.fixed_basis.push_back(1);
    s.shifts.push_back(0.0);
    for (int k = 0; k < bath.size(); ++k) {
        s.tensors.push_back(bath.tensors[k]);
        s.obb.push_back(bath.obb[k]);
        s.phys_dim.push_back(bath.phys_dim[k]);
        s.anc_dim.push_back(bath.anc_dim[k]);
        s.fixed_basis.push_back(bath.fixed_basis[k]);
        s.shifts.push_back(bath.shifts[k]);
    }
    s.center = bath.center + 1;
    s.trunc_weight = bath.trunc_weight;
    return s;
}

namespace {

void shift_center_right(MpsState& s, int k) {
    Tensor3& a = s.tensors[k];
    Eigen::HouseholderQR<Matrix> qr(a.m);
    const Eigen::Index rows = a.m.rows(), cols = a.m.cols();
    const Eigen::Index r = std::min(rows, cols);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, r);
    Matrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    const int dl = a.dl, dp = a.dp;
    a = Tensor3::from_left_grouped(std::move(q), dl, dp);
    Tensor3& b = s.tensors[k + 1];
    const Matrix nb = rr * b.right_grouped();
    b = Tensor3::from_right_grouped(nb, b.dp, b.dr);
}

void shift_center_left(MpsState& s, int k) {
    Tensor3& a = s.tensors[k];
    const Matrix mt = a.right_grouped().adjoint();  // (dp*dr) x dl
    Eigen::HouseholderQR<Matrix> qr(mt);
    const Eigen::Index rows = mt.rows(), cols = mt.cols();
    const Eigen::Index r = std::min(rows, cols);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, r);
    Matrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    const int dp = a.dp, dr = a.dr;
    a = Tensor3::from_right_grouped(q.adjoint(), dp, dr);
    Tensor3& b = s.tensors[k - 1];
    Matrix nb = b.m * rr.adjoint();
    b = Tensor3::from_left_grouped(std::move(nb), b.dl, b.dp);
}

}  // namespace

void canonicalize(MpsState& state, int new_center) {
    if (new_center < 0 || new_center >= state.size())
        throw ParameterError("canonicalize: center out of range");
    for (int k = 0; k < new_center; ++k) shift_center_right(state, k);
    for (int k = state.size() - 1; k > new_center; --k) shift_center_left(state, k);
    state.center = new_center;
}

void move_center(MpsState& state, int target) {
    if (target < 0 || target >= state.size()) throw ParameterError("move_center: out of range");
    while (state.center < target) shift_center_right(state, state.center++);
    while (state.center > target) shift_center_left(state, state.center--);
}

OptimalBasis optimal_basis(const Matrix& rho, int d_opt) {
    const int d = static_cast<int>(rho.rows());
    if (d_opt < 1 || d_opt > d) throw ParameterError("optimal_basis: d_opt must lie in [1, d]");
    const EighResult e = eigh(0.5 * (rho + rho.adjoint()));
    const double tr = std::max(e.values.sum(), 1e-300);
    OptimalBasis ob;
    ob.eigenvalues = e.values.reverse() / tr;
    ob.transform.resize(d_opt, d);
    for (int j = 0; j < d_opt; ++j) {
        Vector u = e.vectors.col(d - 1 - j);
        Eigen::Index imax = 0;
        u.cwiseAbs().maxCoeff(&imax);
        u *= std::abs(u(imax)) / u(imax);
        ob.transform.row(j) = u.transpose();
    }
    ob.kept_weight = std::clamp(ob.eigenvalues.head(d_opt).sum(), 0.0, 1.0);
    return ob;
}

Matrix site_density_matrix(const MpsState& state, int k) {
    const auto le = detail::left_environments(state);
    const auto re = detail::right_environments(state);
    Matrix rho_opt = detail::density_from_tensor(state.tensors[k], le[k], re[k + 1]);
    Matrix rho = state.obb[k].transpose() * rho_opt * state.obb[k].conjugate();
    const double tr = rho.trace().real();
    if (!(tr > 0.0)) throw DegenerateStateError("site_density_matrix: zero norm");
    return rho / tr;
}

ObbUpdate obb_update(MpsState& state, int k, int d_opt) {
    if (state.fixed_basis[k]) throw ParameterError("obb_update: site has a fixed basis");
    if (d_opt > state.full_dim(k)) throw ParameterError("obb_update: d_opt exceeds local dimension");
    const Matrix rho = site_density_matrix(state, k);
    const OptimalBasis ob = optimal_basis(rho, d_opt);
    const Tensor3 full = state.physical_tensor(k);
    state.tensors[k] = full.contract_physical(ob.transform.conjugate());
    state.obb[k] = ob.transform;
    return {ob.kept_weight, 1.0 - ob.kept_weight};
}

cplx expect_local_rep(const MpsState& state, const Matrix& op, int k) {
    if (k < 0 || k >= state.size()) throw ParameterError("expect_local: site out of range");
    if (op.rows() != state.full_dim(k) || op.cols() != state.full_dim(k))
        throw ParameterError("expect_local: operator dimension mismatch");
    const auto le = detail::left_environments(state);
    const auto re = detail::right_environments(state);
    const Matrix o = state.to_opt_basis(op, k);
    const Matrix e = detail::transfer_left(le[k], state.tensors[k], state.tensors[k], &o);
    const cplx num = (e * re[k + 1]).trace();
    const double nrm = (le[k + 1] * re[k + 1]).trace().real();
    return num / nrm;
}

cplx expect_local(const MpsState& state, const Matrix& op, int k) {
    if (k < 0 || k >= state.size()) throw ParameterError("expect_local: site out of range");
    const int d = state.phys_dim[k];
    if (op.rows() != d || op.cols() != d) throw ParameterError("expect_local: operator dimension mismatch");
    Matrix rep = op;
    if (state.shifts[k] != 0.0) {
        const Matrix u = shift_matrix(state.shifts[k], d);
        rep = u.adjoint() * op * u;
    }
    return expect_local_rep(state, ops::with_ancilla(rep, state.anc_dim[k]), k);
}

double expect_number(const MpsState& state, int k) {
    const auto so = shifted_local_operators(state.shifts[k], state.phys_dim[k]);
    return expect_local_rep(state, ops::with_ancilla(so.n, state.anc_dim[k]), k).real();
}

double expect_position(const MpsState& state, int k) {
    const auto so = shifted_local_operators(state.shifts[k], state.phys_dim[k]);
    return expect_local_rep(state, ops::with_ancilla(so.x, state.anc_dim[k]), k).real();
}

cplx expect_two_site_rep(const MpsState& state, const Matrix& op, int k) {
    if (k < 0 || k + 1 >= state.size()) throw ParameterError("expect_two_site: bond out of range");
    const auto le = detail::left_environments(state);
    const auto re = detail::right_environments(state);
    const Tensor3 th = detail::merge_two_sites(state.tensors[k], state.tensors[k + 1]);
    const Matrix w = kron(state.obb[k], state.obb[k + 1]);
    const Matrix o = w.conjugate() * op * w.transpose();
    const Matrix e = detail::transfer_left(le[k], th, th, &o);
    const cplx num = (e * re[k + 2]).trace();
    const double nrm = (le[k + 1] * re[k + 1]).trace().real();
    return num / nrm;
}

Matrix one_body_matrix(const MpsState& state) {
    std::vector<int> sites;
    for (int k = 0; k < state.size(); ++k)
        if (!state.fixed_basis[k]) sites.push_back(k);
    const int nb = static_cast<int>(sites.size());
    const auto le = detail::left_environments(state);
    const auto re = detail::right_environments(state);
    const double nrm = le[state.size()].trace().real();

    std::vector<Matrix> bdag(state.size()), b(state.size()), n(state.size());
    for (int k : sites) {
        const auto so = shifted_local_operators(state.shifts[k], state.phys_dim[k]);
        b[k] = state.to_opt_basis(ops::with_ancilla(so.b, state.anc_dim[k]), k);
        bdag[k] = state.to_opt_basis(ops::with_ancilla(so.bdag, state.anc_dim[k]), k);
        n[k] = state.to_opt_basis(ops::with_ancilla(so.n, state.anc_dim[k]), k);
    }
    Matrix c = Matrix::Zero(nb, nb);
    for (int i = 0; i < nb; ++i) {
        const int k = sites[i];
        const auto& t = state.tensors[k];
        c(i, i) = (detail::transfer_left(le[k], t, t, &n[k]) * re[k + 1]).trace() / nrm;
        Matrix f = detail::transfer_left(le[k], t, t, &bdag[k]);
        for (int kk = k + 1, j = i; kk < state.size(); ++kk) {
            const auto& tk = state.tensors[kk];
            if (!state.fixed_basis[kk]) {
                ++j;
                c(i, j) = (detail::transfer_left(f, tk, tk, &b[kk]) * re[kk + 1]).trace() / nrm;
                c(j, i) = std::conj(c(i, j));
            }
            f = detail::transfer_left(f, tk, tk, nullptr);
        }
    }
    return c;
}

cplx overlap(const MpsState& a, const MpsState& b) {
    if (a.size() != b.size()) throw ParameterError("overlap: length mismatch");
    Matrix e = Matrix::Identity(1, 1);
    for (int k = 0; k < a.size(); ++k) {
        if (a.full_dim(k) != b.full_dim(k)) throw ParameterError("overlap: local dimension mismatch");
        e = detail::transfer_left(e, a.physical_tensor(k), b.physical_tensor(k), nullptr);
    }
    return e(0, 0);
}

}  // namespace sbmdyn
