#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sbmdyn/analysis.hpp"
#include "sbmdyn/error.hpp"
#include "sbmdyn/model.hpp"

using namespace sbmdyn;

namespace {

ChainCoefficients toy_chain() {
    ChainCoefficients c;
    c.eta1 = 0.2;
    c.omega = {0.6, 0.6};
    c.hop = {0.2};
    return c;
}

std::vector<double> grid(double dt, double t_final) {
    std::vector<double> t;
    for (int i = 0; i * dt <= t_final + 1e-12; ++i) t.push_back(i * dt);
    return t;
}

ModeOccupations profile(const std::vector<double>& w, const std::vector<double>& n) {
    ModeOccupations m;
    m.omega_p = Eigen::Map<const RealVector>(w.data(), w.size());
    m.n_p = Eigen::Map<const RealVector>(n.data(), n.size());
    m.n0_p = RealVector::Zero(w.size());
    return m;
}

}  // namespace

TEST(ModeOccupations, VacuumAndSingleExcitation) {
    const ChainCoefficients c = toy_chain();
    EXPECT_EQ(mode_occupations(Matrix::Zero(2, 2), c).n_p.norm(), 0.0);
    Matrix one = Matrix::Zero(2, 2);
    one(0, 0) = 1.0;
    const ModeOccupations m = mode_occupations(one, c);
    EXPECT_NEAR(m.n_p(0), 0.5, 1e-14);
    EXPECT_NEAR(m.n_p(1), 0.5, 1e-14);
    EXPECT_NEAR(m.omega_p(0), 0.4, 1e-14);
}

TEST(ModeOccupations, TraceConservationAndReference) {
    ModelParams p;
    p.chain_length = 12;
    const ChainCoefficients c = chain_coefficients(p);
    Matrix a = Matrix::Random(11, 11);
    const Matrix cmat = a * a.adjoint();
    const ModeOccupations m = mode_occupations(cmat, cmat / 2.0, c);
    EXPECT_NEAR(m.n_p.sum(), cmat.trace().real(), 1e-10);
    EXPECT_LT((m.n0_p - m.n_p / 2.0).norm(), 1e-12);
    EXPECT_THROW(mode_occupations(Matrix::Zero(3, 3), c), ParameterError);
}

TEST(ResonancePeak, DeltaProfileAndParabola) {
    const std::vector<double> w = {0.1, 0.2, 0.3, 0.4, 0.5};
    EXPECT_NEAR(resonance_peak(profile(w, {0, 0, 1, 0, 0})), 0.3, 1e-15);
    std::vector<double> n;
    for (double x : w) n.push_back(1.0 - (x - 0.27) * (x - 0.27));
    EXPECT_NEAR(resonance_peak(profile(w, n)), 0.27, 1e-12);
    const std::vector<double> uneven = {0.1, 0.15, 0.3, 0.5, 0.6};
    std::vector<double> m;
    for (double x : uneven) m.push_back(1.0 - (x - 0.21) * (x - 0.21));
    EXPECT_NEAR(resonance_peak(profile(uneven, m)), 0.21, 1e-12);
    EXPECT_THROW(resonance_peak(profile(w, {1, 1, 1, 1, 1})), NotFoundError);
    EXPECT_THROW(resonance_peak(profile({0.1, 0.2}, {0, 1})), ParameterError);
}

TEST(DeltaR, ZeroTemperature) {
    EXPECT_EQ(delta_r_zero_T(0.1, 1.0, 0.0), 0.1);
    EXPECT_NEAR(delta_r_zero_T(0.1, 1.0, 0.1), 0.0774263683, 1e-9);
    EXPECT_NEAR(delta_r_zero_T(1.0, 1.0, 0.7), 1.0, 1e-15);
    EXPECT_THROW(delta_r_zero_T(0.1, 1.0, 1.0), DomainError);
}

TEST(DeltaR, FiniteTemperatureRoots) {
    const auto [lo, hi] = delta_r_finite_T(0.1, 1.0, 0.01, 2.0);
    EXPECT_NEAR(lo, 0.0187929057, 1e-9);
    EXPECT_NEAR(hi, 0.0583886686, 1e-9);
    EXPECT_LT(lo, hi);
    EXPECT_LT(hi, 0.1);
    EXPECT_LT(std::abs(finite_T_residual(lo, 0.1, 1.0, 0.01, 2.0)), 1e-9);
    EXPECT_LT(std::abs(finite_T_residual(hi, 0.1, 1.0, 0.01, 2.0)), 1e-9);
    const auto [a, b] = delta_r_finite_T(0.1, 1.0, 0.0, 2.0);
    EXPECT_EQ(a, 0.1);
    EXPECT_EQ(b, 0.1);
}

TEST(DeltaR, RootCountError) {
    try {
        delta_r_finite_T(0.1, 1.0, 0.5, 2.0);
        FAIL() << "expected a root-count error";
    } catch (const RootCountError& e) {
        EXPECT_NE(e.roots.size(), 2u);
    }
}

TEST(FirstMinimum, Cosine) {
    const std::vector<double> t = grid(0.1, 60.0);
    std::vector<double> v;
    for (double x : t) v.push_back(std::cos(0.1 * x));
    const LocalMinimum m = first_local_minimum(t, v);
    EXPECT_NEAR(m.t_s, std::numbers::pi / 0.1, 1e-3);
    EXPECT_NEAR(m.sigma_m, -1.0, 1e-4);
    std::vector<double> lifted = v;
    for (double& x : lifted) x += 0.37;
    const LocalMinimum n = first_local_minimum(t, lifted);
    EXPECT_NEAR(n.t_s, m.t_s, 1e-12);
    EXPECT_NEAR(n.sigma_m, m.sigma_m + 0.37, 1e-12);
}

TEST(FirstMinimum, MonotoneHasNone) {
    const std::vector<double> t = grid(0.1, 10.0);
    std::vector<double> v;
    for (double x : t) v.push_back(std::exp(-x));
    EXPECT_THROW(first_local_minimum(t, v), NotFoundError);
    EXPECT_THROW(first_local_minimum({0, 1, 2}, {1, 0, 1}), ParameterError);
}

TEST(LogFit, ExactRecoveryAndInverse) {
    std::vector<std::pair<double, double>> pts;
    for (double n : {3.0, 4.0, 6.0, 8.0, 10.0}) pts.push_back({n, 0.3 * std::log(n) - 1.0});
    const LogFit f = n_eff_fit(pts);
    EXPECT_NEAR(f.a, 0.3, 1e-12);
    EXPECT_NEAR(f.b, -1.0, 1e-12);
    EXPECT_NEAR(f.invert(f(53.0)), 53.0, 1e-9);
    EXPECT_THROW(n_eff_fit({{1, 0}, {2, 1}}), ParameterError);
    EXPECT_THROW(n_eff_fit({{2, 0}, {2, 1}, {2, 2}}), NumericalError);
    EXPECT_THROW(n_eff_fit({{0, 0}, {2, 1}, {3, 2}}), ParameterError);
}

TEST(Classifier, CosineIsCoherent) {
    const std::vector<double> t = grid(0.1, 300.0);
    std::vector<double> v;
    for (double x : t) v.push_back(std::cos(0.1 * x));
    const ClassifierReport r = classify_dynamics(t, v);
    EXPECT_EQ(r.label, DynamicsLabel::coherent);
    EXPECT_GE(r.sign_changes, 6);
    EXPECT_LT(r.spacing_cv, 1e-3);
    EXPECT_EQ(to_string(r.label), "coherent");
}

TEST(Classifier, DecayIsUndetermined) {
    const std::vector<double> t = grid(0.1, 100.0);
    std::vector<double> v;
    for (double x : t) v.push_back(std::exp(-0.05 * x));
    EXPECT_EQ(classify_dynamics(t, v).label, DynamicsLabel::undetermined);
}

TEST(Classifier, AperiodicIsPseudoCoherent) {
    const std::vector<double> t = grid(0.05, 300.0);
    std::vector<double> v;
    for (double x : t) v.push_back(0.5 * std::cos(0.1 * x) + 0.4 * std::cos(0.1 * std::sqrt(2.0) * x));
    const ClassifierReport r = classify_dynamics(t, v);
    EXPECT_EQ(r.label, DynamicsLabel::pseudo_coherent);
    EXPECT_GT(r.spacing_cv, 0.2);
    EXPECT_EQ(to_string(r.label), "pseudo-coherent");
}

TEST(Classifier, ScaleAndTimeUnitInvariance) {
    const std::vector<double> t = grid(0.05, 300.0);
    std::vector<double> v, scaled;
    for (double x : t) v.push_back(std::exp(-0.004 * x) * std::cos(0.13 * x) + 0.1 * std::cos(0.41 * x));
    for (double x : v) scaled.push_back(3.0 * x);
    std::vector<double> stretched = t;
    for (double& x : stretched) x *= 2.0;
    ClassifierOptions o2;
    o2.t_skip = 40.0;
    const ClassifierReport a = classify_dynamics(t, v);
    const ClassifierReport b = classify_dynamics(t, scaled);
    const ClassifierReport c = classify_dynamics(stretched, v, o2);
    EXPECT_EQ(a.label, b.label);
    EXPECT_EQ(a.sign_changes, b.sign_changes);
    EXPECT_EQ(a.label, c.label);
    EXPECT_EQ(a.sign_changes, c.sign_changes);
    EXPECT_NEAR(a.spacing_cv, c.spacing_cv, 1e-12);
}

TEST(Classifier, TooShort) {
    EXPECT_THROW(classify_dynamics({0, 1, 2}, {1, 0, 1}), ParameterError);
}
