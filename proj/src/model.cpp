#include "sbmdyn/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sbmdyn/error.hpp"

namespace sbmdyn {

void ModelParams::validate(bool purified) const {
    auto fail = [](const std::string& m) { throw ParameterError(m); };
    if (!(alpha >= 0.0)) fail("alpha must be >= 0");
    if (!(s > 0.0)) fail("spectral exponent s must be > 0");
    if (!(omega_c > 0.0)) fail("omega_c must be > 0");
    if (chain_length < 2) fail("chain_length must be >= 2");
    if (fock_dim < 2) fail("fock_dim must be >= 2");
    const int cap = purified ? fock_dim * fock_dim : fock_dim;
    if (obb_dim < 1 || obb_dim > cap) fail("obb_dim must lie in [1, " + std::to_string(cap) + "]");
    if (bond_cap < 1) fail("bond_cap must be >= 1");
    if (!(dt > 0.0)) fail("dt must be > 0");
    if (!(beta > 0.0)) fail("beta must be > 0");
}

Eigen::MatrixXd ChainCoefficients::tridiagonal() const {
    const int n = boson_sites();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) t(k, k) = omega[k];
    for (int k = 0; k + 1 < n; ++k) t(k, k + 1) = t(k + 1, k) = hop[k];
    return t;
}

double spectral_density(double omega, const ModelParams& p) {
    if (omega < 0.0) throw DomainError("spectral_density: omega must be >= 0");
    if (omega >= p.omega_c) return 0.0;
    return 2.0 * std::numbers::pi * p.alpha * std::pow(p.omega_c, 1.0 - p.s) * std::pow(omega, p.s);
}

double chain_omega(double s, double omega_c, int k) {
    return 0.5 * omega_c * (1.0 + s * s / ((s + 2.0 * k - 2.0) * (s + 2.0 * k)));
}

double chain_hop(double s, double omega_c, int k) {
    const double a = s + 2.0 * k;
    return omega_c * k * (s + k) / (a * (1.0 + a)) * std::sqrt((a + 1.0) / (a - 1.0));
}

ChainCoefficients chain_coefficients(const ModelParams& p) {
    if (!(p.s > 0.0)) throw DomainError("chain_coefficients: s must be > 0");
    if (p.chain_length < 2) throw ParameterError("chain_coefficients: chain_length must be >= 2");
    ChainCoefficients c;
    c.eta1 = std::sqrt(2.0 * p.alpha * p.omega_c * p.omega_c / (1.0 + p.s));
    const int n = p.chain_length - 1;
    c.omega.resize(n);
    for (int k = 1; k <= n; ++k) c.omega[k - 1] = chain_omega(p.s, p.omega_c, k);
    c.hop.resize(n - 1);
    for (int k = 1; k <= n - 1; ++k) c.hop[k - 1] = chain_hop(p.s, p.omega_c, k);
    return c;
}

StarBath chain_to_star(const ChainCoefficients& c) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.tridiagonal());
    StarBath star;
    star.frequencies = es.eigenvalues();
    // Rows of O are eigenvectors; first nonzero component made positive.
    star.transform = es.eigenvectors().transpose();
    for (Eigen::Index p = 0; p < star.transform.rows(); ++p) {
        for (Eigen::Index k = 0; k < star.transform.cols(); ++k) {
            const double v = star.transform(p, k);
            if (std::abs(v) > 1e-14) {
                if (v < 0) star.transform.row(p) *= -1.0;
                break;
            }
        }
    }
    return star;
}

}  // namespace sbmdyn
