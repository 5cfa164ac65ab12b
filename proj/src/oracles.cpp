#include "sbmdyn/oracles.hpp"

#include <cmath>

#include "sbmdyn/error.hpp"
#include "sbmdyn/operators.hpp"

namespace sbmdyn {

namespace {

long checked_dim(const std::vector<int>& dims) {
    long total = 1;
    for (int d : dims) {
        total *= d;
        if (total > kDenseDimCap) throw ParameterError("dense oracle: Hilbert space exceeds the dimension cap");
    }
    return total;
}

// op on `site` of a chain with local dimensions dims
Matrix on_site(const std::vector<int>& dims, int site, const Matrix& op) {
    Matrix out = Matrix::Identity(1, 1);
    for (int k = 0; k < static_cast<int>(dims.size()); ++k)
        out = kron(out, k == site ? op : Matrix::Identity(dims[k], dims[k]));
    return out;
}

// Coherent state truncated to d levels: e^{-|a|^2/2} a^n / sqrt(n!) then renormalized.
Vector coherent(double x, int d) {
    Vector v(d);
    const double a = x / std::sqrt(2.0);
    double term = std::exp(-0.5 * a * a);
    for (int n = 0; n < d; ++n) {
        v(n) = term;
        term *= a / std::sqrt(static_cast<double>(n + 1));
    }
    return v.normalized();
}

}  // namespace

Matrix dense_sbm_hamiltonian(const ModelParams& p) {
    const ChainCoefficients c = chain_coefficients(p);
    std::vector<int> dims(p.chain_length, p.fock_dim);
    dims[0] = 2;
    const long dim = checked_dim(dims);
    const int d = p.fock_dim;
    const Matrix b = ops::annihilation(d), bd = ops::creation(d), n = ops::number(d);
    Matrix h = Matrix::Zero(dim, dim);
    h += on_site(dims, 0, -0.5 * p.delta * ops::sigma_x() - 0.5 * p.bias * ops::sigma_z());
    h += 0.5 * c.eta1 * on_site(dims, 0, ops::sigma_z()) * on_site(dims, 1, b + bd);
    for (int k = 1; k < p.chain_length; ++k) h += c.omega[k - 1] * on_site(dims, k, n);
    for (int k = 1; k + 1 < p.chain_length; ++k) {
        const Matrix hop = on_site(dims, k, bd) * on_site(dims, k + 1, b);
        h += c.hop[k - 1] * (hop + hop.adjoint());
    }
    return h;
}

DenseTrajectory dense_evolve(const ModelParams& p, double t_final, double dt_obs,
                             const std::vector<double>& bath_coherent) {
    if (!(dt_obs > 0.0)) throw ParameterError("dense_evolve: dt_obs must be positive");
    const Matrix h = dense_sbm_hamiltonian(p);
    std::vector<int> dims(p.chain_length, p.fock_dim);
    dims[0] = 2;
    Vector psi = Vector::Ones(1);
    Vector up = Vector::Zero(2);
    up(0) = 1.0;
    psi = up;
    for (int k = 1; k < p.chain_length; ++k) {
        const double x = static_cast<std::size_t>(k - 1) < bath_coherent.size() ? bath_coherent[k - 1] : 0.0;
        psi = kron(psi, coherent(x, p.fock_dim));
    }
    const EighResult e = eigh(h);
    const Vector c0 = e.vectors.adjoint() * psi;
    const Matrix sz = on_site(dims, 0, ops::sigma_z());
    std::vector<Matrix> nk;
    for (int k = 1; k < p.chain_length; ++k) nk.push_back(on_site(dims, k, ops::number(p.fock_dim)));

    DenseTrajectory out;
    const long steps = std::lround(t_final / dt_obs);
    for (long i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) * dt_obs;
        Vector ct(c0.size());
        for (Eigen::Index j = 0; j < c0.size(); ++j) ct(j) = std::exp(cplx(0.0, -e.values(j) * t)) * c0(j);
        const Vector v = e.vectors * ct;
        out.times.push_back(t);
        out.sigma_z.push_back(v.dot(sz * v).real());
        out.energy.push_back(v.dot(h * v).real());
        std::vector<double> occ;
        for (const auto& m : nk) occ.push_back(v.dot(m * v).real());
        out.occupations.push_back(std::move(occ));
    }
    return out;
}

DenseThermal dense_thermal(const ModelParams& p, double beta, double mu) {
    const ChainCoefficients c = chain_coefficients(p);
    const int nb = c.boson_sites();
    const int d = p.fock_dim;
    std::vector<int> dims(nb, d);
    const long dim = checked_dim(dims);
    const Matrix b = ops::annihilation(d), bd = ops::creation(d), n = ops::number(d);
    Matrix h = Matrix::Zero(dim, dim);
    for (int k = 0; k < nb; ++k) h += c.omega[k] * on_site(dims, k, n);
    for (int k = 0; k + 1 < nb; ++k) {
        const Matrix hop = on_site(dims, k, bd) * on_site(dims, k + 1, b);
        h += c.hop[k] * (hop + hop.adjoint());
    }
    h -= mu * c.eta1 * on_site(dims, 0, b + bd);
    const EighResult e = eigh(h);
    const double e0 = e.values.minCoeff();
    RealVector w(e.values.size());
    for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = std::exp(-beta * (e.values(j) - e0));
    const double z = w.sum();
    const Matrix rho = e.vectors * (w / z).cast<cplx>().asDiagonal() * e.vectors.adjoint();
    DenseThermal out;
    out.partition = z * std::exp(-beta * e0);
    for (int k = 0; k < nb; ++k) {
        out.occupations.push_back((rho * on_site(dims, k, n)).trace().real());
        out.positions.push_back((rho * on_site(dims, k, ops::position(d))).trace().real());
    }
    return out;
}

std::vector<double> displacement_oracle(const ChainCoefficients& c, double source) {
    const int nb = c.boson_sites();
    if (nb == 0) return {};
    const Eigen::MatrixXd t = c.tridiagonal();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nb);
    rhs(0) = -std::sqrt(2.0) * source * c.eta1;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(t);
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14)
        throw NumericalError("displacement_oracle: singular chain matrix");
    const Eigen::VectorXd x = ldlt.solve(rhs);
    return {x.data(), x.data() + nb};
}

}  // namespace sbmdyn
