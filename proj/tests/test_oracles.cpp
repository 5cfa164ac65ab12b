#include <gtest/gtest.h>

#include <cmath>

#include "sbmdyn/error.hpp"
#include "sbmdyn/linalg.hpp"
#include "sbmdyn/model.hpp"
#include "sbmdyn/oracles.hpp"

using namespace sbmdyn;

namespace {

ModelParams params(double alpha, int L, int d) {
    ModelParams p;
    p.alpha = alpha;
    p.chain_length = L;
    p.fock_dim = d;
    p.obb_dim = d;
    return p;
}

double frozen_energy(const ChainCoefficients& c, const std::vector<double>& x) {
    double e = std::sqrt(2.0) * 0.5 * c.eta1 * x[0];
    for (std::size_t k = 0; k < x.size(); ++k) e += 0.5 * c.omega[k] * x[k] * x[k];
    for (std::size_t k = 0; k + 1 < x.size(); ++k) e += c.hop[k] * x[k] * x[k + 1];
    return e;
}

}  // namespace

TEST(DenseEvolve, DecoupledRabi) {
    const DenseTrajectory r = dense_evolve(params(0.0, 3, 4), 50.0, 0.5);
    for (std::size_t i = 0; i < r.times.size(); ++i) EXPECT_NEAR(r.sigma_z[i], std::cos(0.1 * r.times[i]), 1e-12);
}

TEST(DenseEvolve, ZeroTunnelingAndEnergy) {
    ModelParams p = params(0.2, 4, 4);
    p.delta = 0.0;
    const DenseTrajectory r = dense_evolve(p, 20.0, 1.0);
    for (double v : r.sigma_z) EXPECT_NEAR(v, 1.0, 1e-12);
    p.delta = 0.1;
    const DenseTrajectory q = dense_evolve(p, 20.0, 1.0);
    for (double e : q.energy) EXPECT_NEAR(e, q.energy.front(), 1e-12);
}

TEST(DenseEvolve, DimensionCap) {
    EXPECT_THROW(dense_evolve(params(0.1, 6, 6), 1.0, 0.1), ParameterError);
    EXPECT_THROW(dense_thermal(params(0.1, 7, 6), 1.0, 0.0), ParameterError);
}

TEST(DenseThermal, LimitsAndFreeMode) {
    const DenseThermal hot = dense_thermal(params(0.1, 3, 4), 1e-10, 0.0);
    for (double n : hot.occupations) EXPECT_NEAR(n, 1.5, 1e-8);
    const DenseThermal one = dense_thermal(params(0.1, 2, 20), 2.0, 0.0);
    const double w = 2.0 / 3.0;
    double z = 0.0, n = 0.0;
    for (int k = 0; k < 20; ++k) {
        z += std::exp(-2.0 * w * k);
        n += k * std::exp(-2.0 * w * k);
    }
    EXPECT_NEAR(one.occupations[0], n / z, 1e-12);
    EXPECT_NEAR(one.partition, z, 1e-10);
    EXPECT_NEAR(one.positions[0], 0.0, 1e-14);
}

TEST(DisplacementOracle, ClosedFormAndResidual) {
    const ChainCoefficients c2 = chain_coefficients(params(0.1, 2, 2));
    EXPECT_NEAR(displacement_oracle(c2)[0], -0.335410196624968, 1e-12);
    for (double x : displacement_oracle(chain_coefficients(params(0.0, 10, 2)))) EXPECT_EQ(x, 0.0);

    const ChainCoefficients c = chain_coefficients(params(0.3, 25, 2));
    const std::vector<double> x = displacement_oracle(c);
    Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(x.size());
    rhs(0) = -c.eta1 / std::sqrt(2.0);
    EXPECT_LT((c.tridiagonal() * xv - rhs).norm(), 1e-12);
}

TEST(DisplacementOracle, MinimizesFrozenEnergy) {
    const ChainCoefficients c = chain_coefficients(params(0.3, 8, 2));
    const std::vector<double> x = displacement_oracle(c);
    const double e0 = frozen_energy(c, x);
    for (std::size_t k = 0; k < x.size(); ++k) {
        for (double h : {1e-3, -1e-3}) {
            std::vector<double> y = x;
            y[k] += h;
            EXPECT_GT(frozen_energy(c, y), e0);
        }
    }
}

TEST(DisplacementOracle, MatchesDenseFrozenSpinGround) {
    ModelParams p = params(0.2, 3, 16);
    const std::vector<double> x = displacement_oracle(chain_coefficients(p));
    const DenseThermal cold = dense_thermal(p, 60.0, -0.5);
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(cold.positions[k], x[k], 1e-6);
}
