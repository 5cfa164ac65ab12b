#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "sbmdyn/error.hpp"
#include "sbmdyn/hamiltonian.hpp"
#include "sbmdyn/linalg.hpp"
#include "sbmdyn/model.hpp"
#include "sbmdyn/operators.hpp"
#include "sbmdyn/oracles.hpp"
#include "sbmdyn/shift.hpp"
#include "sbmdyn/tebd.hpp"
#include "test_util.hpp"

using namespace sbmdyn;

namespace {

ModelParams params(double s, double alpha, int L, int d) {
    ModelParams p;
    p.s = s;
    p.alpha = alpha;
    p.chain_length = L;
    p.fock_dim = d;
    p.obb_dim = d;
    return p;
}

EvolveOptions exact_options(double t_final) {
    EvolveOptions eo;
    eo.t_final = t_final;
    eo.step.bond_cap = 256;
    eo.step.weight_tol = 0.0;
    return eo;
}

TrajectoryRecord run(const ModelParams& p, double t_final, int order, double weight_tol = 0.0) {
    MpsState s = init_product_state(p, Spin::up);
    GateOptions go;
    go.order = order;
    const GateSet g = build_gates(local_terms(chain_coefficients(p), p), p.dt, go);
    EvolveOptions eo = exact_options(t_final);
    eo.step.weight_tol = weight_tol;
    return evolve(s, g, nullptr, eo);
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b, std::size_t stride_b = 1) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i * stride_b]));
    return m;
}

}  // namespace

TEST(LocalTerms, DenseReassembly) {
    for (double s : {1.0, 0.25}) {
        ModelParams p = params(s, 0.1, 4, 3);
        p.bias = 0.07;
        const auto terms = local_terms(chain_coefficients(p), p);
        ASSERT_EQ(terms.size(), 3u);
        const std::vector<int> dims = {2, 3, 3, 3};
        Matrix sum = Matrix::Zero(54, 54);
        for (int b = 0; b < 3; ++b) sum += embed_bond(dims, terms[b], b);
        EXPECT_LT((sum - dense_sbm_hamiltonian(p)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(LocalTerms, SingleBondCarriesEverything) {
    const ModelParams p = params(1.0, 0.1, 2, 5);
    const auto terms = local_terms(chain_coefficients(p), p);
    ASSERT_EQ(terms.size(), 1u);
    EXPECT_LT((terms[0] - dense_sbm_hamiltonian(p)).norm(), 1e-13);
}

TEST(LocalTerms, DecoupledSpin) {
    ModelParams p = params(1.0, 0.0, 3, 3);
    p.delta = 0.0;
    const auto terms = local_terms(chain_coefficients(p), p);
    const Matrix sz = kron(ops::sigma_z(), ops::identity(3));
    const Matrix sx = kron(ops::sigma_x(), ops::identity(3));
    EXPECT_LT((terms[0] * sz - sz * terms[0]).norm(), 1e-14);
    EXPECT_LT((terms[0] * sx - sx * terms[0]).norm(), 1e-14);
}

TEST(BuildGates, UnitaryAndSmallStep) {
    const ModelParams p = params(1.0, 0.1, 4, 4);
    const auto terms = local_terms(chain_coefficients(p), p);
    const GateSet g = build_gates(terms, 0.05, GateOptions{});
    for (int b = 0; b < g.bonds(); ++b) {
        const Matrix& gate = b % 2 == 0 ? g.even_gates[b] : g.odd_gates[b];
        const Matrix id = Matrix::Identity(gate.rows(), gate.cols());
        EXPECT_LT((gate.adjoint() * gate - id).norm(), 1e-12);
        const double step = b % 2 == 0 ? 0.05 : 0.025;
        EXPECT_NEAR((gate - expm_hermitian(terms[b], cplx(0, -step))).norm(), 0.0, 1e-14);
    }
    const double tiny = 1e-4;
    const GateSet h = build_gates(terms, tiny, GateOptions{.order = 1});
    const double hn = terms[0].operatorNorm();
    EXPECT_LE((h.even_gates[0] - Matrix::Identity(8, 8)).operatorNorm(), hn * tiny + hn * hn * tiny * tiny);
}

TEST(BuildGates, Errors) {
    Matrix bad = Matrix::Zero(4, 4);
    bad(0, 1) = 1.0;
    EXPECT_THROW(build_gates({bad}, 0.1, GateOptions{}), NumericalError);
    EXPECT_THROW(build_gates({Matrix::Identity(4, 4)}, 0.0, GateOptions{}), ParameterError);
    EXPECT_THROW(build_gates({Matrix::Identity(4, 4)}, 0.1, GateOptions{.order = 3}), ParameterError);
}

TEST(Tebd, IdentityGatesLeaveStateUnchanged) {
    MpsState s = sbmdyn::testing::random_state({2, 3, 3, 3}, true, 21);
    const Vector v0 = sbmdyn::testing::dense_vector(s);
    std::vector<Matrix> zero(3, Matrix::Zero(6, 6));
    zero[1] = Matrix::Zero(9, 9);
    zero[2] = Matrix::Zero(9, 9);
    const GateSet g = build_gates(zero, 0.1, GateOptions{});
    const double err = tebd_step(s, g, StepOptions{.bond_cap = 64, .weight_tol = 0.0});
    EXPECT_LT(err, 1e-24);
    EXPECT_NEAR(std::abs(v0.dot(sbmdyn::testing::dense_vector(s))), 1.0, 1e-12);
}

TEST(Tebd, TwoSiteChainIsExact) {
    ModelParams p = params(1.0, 0.1, 2, 6);
    p.dt = 0.1;
    const TrajectoryRecord rec = run(p, 20.0, 2);
    const DenseTrajectory dense = dense_evolve(p, 20.0, 0.1);
    ASSERT_EQ(rec.size(), dense.times.size());
    EXPECT_LT(max_gap(rec.sigma_z, dense.sigma_z), 1e-12);
}

TEST(Tebd, ZeroTunnelingConservesSpin) {
    ModelParams p = params(1.0, 0.2, 5, 4);
    p.delta = 0.0;
    const TrajectoryRecord rec = run(p, 500 * p.dt, 2, 1e-12);
    ASSERT_EQ(rec.size(), 501u);
    for (double v : rec.sigma_z) EXPECT_NEAR(v, 1.0, 1e-8);
}

TEST(Tebd, DecoupledRabiOscillation) {
    ModelParams p = params(1.0, 0.0, 4, 3);
    p.dt = 0.1;
    const TrajectoryRecord rec = run(p, 40.0, 2, 1e-12);
    for (std::size_t i = 0; i < rec.size(); ++i) EXPECT_NEAR(rec.sigma_z[i], std::cos(0.1 * rec.times[i]), 1e-6);
}

TEST(Tebd, MatchesDenseOracle) {
    ModelParams p = params(0.25, 0.03, 4, 4);
    p.dt = 0.05;
    const TrajectoryRecord rec = run(p, 10.0, 2, 1e-12);
    const DenseTrajectory dense = dense_evolve(p, 10.0, 0.05);
    EXPECT_LT(max_gap(rec.sigma_z, dense.sigma_z), 1e-3);
}

TEST(Tebd, TrotterOrders) {
    ModelParams p = params(1.0, 0.3, 3, 6);
    p.delta = 0.5;
    const std::vector<double> x = {0.6, -0.4};
    const DenseTrajectory dense = dense_evolve(p, 4.0, 0.2, x);
    std::vector<Vector> locals = {Vector::Unit(2, 0)};
    for (double xk : x) {
        Vector v(6);
        const double a = xk / std::sqrt(2.0);
        double term = 1.0;
        for (int n = 0; n < 6; ++n) {
            v(n) = term;
            term *= a / std::sqrt(n + 1.0);
        }
        locals.push_back(v.normalized());
    }
    for (int order : {1, 2}) {
        std::vector<double> gaps;
        for (double dt : {0.1, 0.05}) {
            MpsState s = product_state(locals, true, 6);
            GateOptions go;
            go.order = order;
            const GateSet g = build_gates(local_terms(chain_coefficients(p), p), dt, go);
            const TrajectoryRecord rec = evolve(s, g, nullptr, exact_options(4.0));
            gaps.push_back(max_gap(dense.sigma_z, rec.sigma_z, static_cast<std::size_t>(std::lround(0.2 / dt))));
        }
        const double ratio = gaps[0] / gaps[1];
        if (order == 1) EXPECT_NEAR(ratio, 2.0, 0.3);
        if (order == 2) EXPECT_NEAR(ratio, 4.0, 0.5);
    }
}

TEST(Tebd, NormAndTruncationBookkeeping) {
    ModelParams p = params(1.0, 0.2, 8, 4);
    p.bond_cap = 4;
    MpsState s = init_product_state(p, Spin::up);
    const GateSet g = build_gates(local_terms(chain_coefficients(p), p), p.dt, GateOptions{});
    EvolveOptions eo;
    eo.t_final = 5.0;
    eo.step.bond_cap = 4;
    eo.trunc_budget = 1.0;
    const TrajectoryRecord rec = evolve(s, g, nullptr, eo);
    double trunc = 0.0;
    for (double e : rec.trunc_err) trunc += e;
    EXPECT_GT(trunc, 0.0);
    EXPECT_NEAR(trunc, s.trunc_weight, 1e-14);
    EXPECT_LE(std::abs(1.0 - rec.norm.back()), 10 * trunc);
    EXPECT_LE(s.max_bond_dim(), 4);
}

TEST(Evolve, ZeroDurationRecordsInitialPoint) {
    const ModelParams p = params(1.0, 0.1, 4, 3);
    MpsState s = init_product_state(p, Spin::up);
    const TrajectoryRecord rec = evolve(s, p, 0.0, 1);
    ASSERT_EQ(rec.size(), 1u);
    EXPECT_EQ(rec.times[0], 0.0);
    EXPECT_EQ(rec.sigma_z[0], 1.0);
}

TEST(Evolve, ObservationCadence) {
    const ModelParams p = params(1.0, 0.1, 3, 3);
    MpsState s = init_product_state(p, Spin::up);
    const TrajectoryRecord rec = evolve(s, p, 1.05, 4);
    ASSERT_EQ(rec.size(), 4u);
    EXPECT_NEAR(rec.times[1], 0.4, 1e-12);
    EXPECT_NEAR(rec.times.back(), 1.1, 1e-12);
}

TEST(Evolve, BudgetAbortKeepsPartialRecord) {
    ModelParams p = params(1.0, 0.3, 8, 4);
    MpsState s = init_product_state(p, Spin::up);
    const GateSet g = build_gates(local_terms(chain_coefficients(p), p), p.dt, GateOptions{});
    EvolveOptions eo;
    eo.t_final = 10.0;
    eo.step.bond_cap = 1;
    eo.trunc_budget = 1e-6;
    try {
        evolve(s, g, nullptr, eo);
        FAIL() << "expected abort";
    } catch (const EvolutionAborted& e) {
        EXPECT_GE(e.partial.size(), 1u);
        EXPECT_LT(e.partial.times.back(), 10.0);
    }
}

TEST(Evolve, MirroredChainGivesMirroredOccupations) {
    const int L = 6, d = 4;
    ChainHamiltonian h = bath_hamiltonian(chain_coefficients(params(1.0, 0.2, L + 1, d)), d, 0.5, {});
    ChainHamiltonian m;
    m.dims.assign(h.dims.rbegin(), h.dims.rend());
    m.onsite.assign(h.onsite.rbegin(), h.onsite.rend());
    for (int b = L - 2; b >= 0; --b) {
        std::vector<ProductTerm> swapped;
        for (const ProductTerm& t : h.bonds[b]) swapped.push_back({t.right, t.left});
        m.bonds.push_back(swapped);
    }
    std::mt19937_64 rng(4);
    std::vector<Vector> locals;
    for (int k = 0; k < L; ++k) locals.push_back(sbmdyn::testing::random_vector(d, rng));
    std::vector<Vector> reversed(locals.rbegin(), locals.rend());
    MpsState a = product_state(locals, false), b = product_state(reversed, false);
    const StepOptions so{.bond_cap = 256, .weight_tol = 0.0};
    const GateSet ga = build_gates(bond_terms(h), 0.1, GateOptions{});
    const GateSet gb = build_gates(bond_terms(m), 0.1, GateOptions{});
    for (int i = 0; i < 30; ++i) {
        tebd_step(a, ga, so);
        tebd_step(b, gb, so);
    }
    for (int k = 0; k < L; ++k) EXPECT_NEAR(expect_number(a, k), expect_number(b, L - 1 - k), 1e-10);
}

TEST(Evolve, ImaginaryTimeFindsGroundEnergy) {
    ModelParams p = params(1.0, 0.2, 3, 4);
    const ChainHamiltonian h = sbm_hamiltonian(chain_coefficients(p), p, {});
    GateOptions go;
    go.kind = TimeKind::imaginary;
    const GateSet g = build_gates(bond_terms(h), 0.05, go);
    MpsState s = sbmdyn::testing::random_state({2, 4, 4}, true, 9);
    for (int i = 0; i < 2000; ++i) tebd_step(s, g, StepOptions{.bond_cap = 64, .weight_tol = 0.0});
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-10);
    const double e0 = eigh(dense_matrix(h)).values(0);
    EXPECT_NEAR(mpo_expectation(s, build_mpo(h)), e0, 1e-5);
}

TEST(Evolve, SandwichMatchesSubstitute) {
    ModelParams p = params(1.0, 0.1, 3, 16);
    p.dt = 0.05;
    const std::vector<double> shifts = {0.0, -0.3, 0.15};
    std::vector<double> sz[2];
    for (ShiftMode mode : {ShiftMode::substitute, ShiftMode::sandwich}) {
        MpsState s = init_product_state(p, Spin::up);
        s.shifts = shifts;
        GateOptions go;
        go.mode = mode;
        std::vector<Matrix> terms = local_terms(chain_coefficients(p), p, shifts);
        if (mode == ShiftMode::sandwich) {
            go.shifts = shifts;
            go.phys_dims = {2, 16, 16};
            terms = local_terms(chain_coefficients(p), p);
        }
        const GateSet g = build_gates(terms, p.dt, go);
        EvolveOptions eo = exact_options(5.0);
        sz[mode == ShiftMode::sandwich] = evolve(s, g, nullptr, eo).sigma_z;
    }
    EXPECT_LT(max_gap(sz[0], sz[1]), 1e-6);
}

TEST(TrajectoryCsv, RoundTrip) {
    const ModelParams p = params(1.0, 0.1, 3, 3);
    MpsState s = init_product_state(p, Spin::up);
    const TrajectoryRecord rec = evolve(s, p, 1.0, 2);
    const auto path = std::filesystem::temp_directory_path() / "sbmdyn_traj_roundtrip.csv";
    write_trajectory_csv(path.string(), rec);
    const TrajectoryRecord back = read_trajectory_csv(path.string());
    ASSERT_EQ(back.size(), rec.size());
    for (std::size_t i = 0; i < rec.size(); ++i) {
        EXPECT_NEAR(back.sigma_z[i], rec.sigma_z[i], 1e-14);
        EXPECT_NEAR(back.energy[i], rec.energy[i], 1e-14);
    }
    std::filesystem::remove(path);
    EXPECT_THROW(read_trajectory_csv(path.string()), NotFoundError);
}
