#include <gtest/gtest.h>

#include <cmath>

#include "sbmdyn/linalg.hpp"
#include "sbmdyn/mps.hpp"
#include "sbmdyn/operators.hpp"
#include "sbmdyn/shift.hpp"

using namespace sbmdyn;

TEST(ShiftMatrix, IdentityAtZero) {
    for (int d : {1, 2, 6, 20}) EXPECT_EQ(shift_matrix(0.0, d), Matrix::Identity(d, d));
}

TEST(ShiftMatrix, VacuumElement) {
    for (int d : {2, 5, 30}) EXPECT_NEAR(shift_matrix(1.0, d)(0, 0).real(), std::exp(-0.25), 1e-15);
}

TEST(ShiftMatrix, MatchesProjectedDisplacement) {
    const int big = 80, d = 8;
    const double x = 0.7;
    const Matrix gen = x / std::sqrt(2.0) * (ops::creation(big) - ops::annihilation(big));
    const Matrix exact = expm_hermitian(kI * gen, cplx(0.0, -1.0));
    EXPECT_LT((shift_matrix(x, d) - exact.topLeftCorner(d, d)).norm(), 1e-12);
}

TEST(ShiftMatrix, InverseProduct) {
    const Matrix a = shift_matrix(0.3, 30);
    const Matrix b = shift_matrix(-0.3, 30);
    EXPECT_LT((a * b - Matrix::Identity(30, 30)).norm(), 2 * unitarity_defect(a) + 1e-12);
}

TEST(UnitarityDefect, Values) {
    EXPECT_EQ(unitarity_defect(Matrix::Identity(4, 4)), 0.0);
    EXPECT_NEAR(unitarity_defect(shift_matrix(0.2, 10)), 0.181224277155131, 1e-12);
    // Leakage through the top level keeps the defect finite for any cutoff.
    EXPECT_GT(unitarity_defect(shift_matrix(0.2, 30)), unitarity_defect(shift_matrix(0.2, 10)));
    EXPECT_GT(unitarity_defect(shift_matrix(4.0, 5)), 0.5);
    double prev = -1.0;
    for (double x = 0.0; x <= 5.0; x += 0.5) {
        const double u = unitarity_defect(shift_matrix(x, 10));
        EXPECT_GT(u, prev);
        prev = u;
    }
}

TEST(ShiftedOperators, Algebra) {
    const int d = 12;
    const ShiftedOperators z = shifted_local_operators(0.0, d);
    EXPECT_EQ(z.b, ops::annihilation(d));
    for (double x : {0.5, -1.3}) {
        const ShiftedOperators o = shifted_local_operators(x, d);
        EXPECT_NEAR(o.n(0, 0).real(), x * x / 2, 1e-14);
        EXPECT_EQ(o.bdag, Matrix(o.b.adjoint()));
        EXPECT_LT((o.x - ops::position(d) - x * Matrix::Identity(d, d)).norm(), 1e-14);
    }
}

TEST(SandwichGate, ZeroShiftAndIdentity) {
    const int d = 6;
    const Matrix g = expm_hermitian(kron(ops::number(d), ops::position(d)), cplx(0.0, -0.1));
    EXPECT_LT((sandwich_gate(g, 0.0, 0.0, d, d) - g).norm(), 1e-15);
    const Matrix id = Matrix::Identity(d * d, d * d);
    const double bound = unitarity_defect(kron(shift_matrix(0.1, d), shift_matrix(0.2, d)));
    EXPECT_LE((sandwich_gate(id, 0.1, 0.2, d, d) - id).norm(), bound + 1e-12);
}

TEST(SandwichGate, ApproachesSubstitute) {
    const double x = 0.8, dt = 0.1;
    double prev = 1e9;
    for (int d : {8, 14, 20}) {
        const Matrix unshifted = kron(ops::number(d), ops::identity(d));
        const Matrix sub = expm_hermitian(kron(shifted_local_operators(x, d).n, ops::identity(d)), cplx(0, -dt));
        const Matrix sand = sandwich_gate(expm_hermitian(unshifted, cplx(0, -dt)), x, 0.0, d, d);
        const int low = d * (d / 2);
        const double dev = (sand - sub).topLeftCorner(low, low).norm();
        const double bound = 2 * unitarity_defect(shift_matrix(x, d));
        EXPECT_LE(dev, bound + 1e-12);
        EXPECT_LT(dev, prev);
        prev = dev;
        EXPECT_LT((sub.adjoint() * sub - Matrix::Identity(d * d, d * d)).norm(), 1e-12);
    }
    EXPECT_LT(prev, 1e-6);
}

namespace {

MpsState coherent_mode(double x, int d) {
    Vector v = shift_matrix(x, 60).col(0).head(d);
    v.normalize();
    MpsState s = product_state({v}, false);
    return s;
}

}  // namespace

TEST(EpsilonShift, ZeroIsNoop) {
    MpsState s = coherent_mode(1.0, 30);
    s.shifts = {1.0};
    const MpsState before = s;
    const EpsilonShiftReport r = apply_epsilon_shift(s, 0.0);
    EXPECT_EQ(r.norm_loss, 0.0);
    EXPECT_LT((s.physical_tensor(0).m - before.physical_tensor(0).m).norm(), 1e-15);
}

TEST(EpsilonShift, PreservesPhysicalStateAndGrowsRegister) {
    const int d = 30;
    MpsState rep = product_state({Vector::Unit(d, 0)}, false);
    rep.shifts = {1.2};
    const double n_before = expect_number(rep, 0);
    const double register_before = rep.shifts[0] * rep.shifts[0] / 2;
    const EpsilonShiftReport r = apply_epsilon_shift(rep, 0.1);
    EXPECT_NEAR(rep.shifts[0], 1.32, 1e-15);
    EXPECT_NEAR(rep.shifts[0] * rep.shifts[0] / 2 / register_before, 1.21, 1e-12);
    EXPECT_NEAR(expect_number(rep, 0), n_before, 1e-9);
    EXPECT_NEAR(expect_position(rep, 0), 1.2, 1e-9);
    EXPECT_LT(r.norm_loss, 1e-12);
}

TEST(EpsilonShift, LargeEpsilonFlagged) {
    const int d = 10;
    MpsState rep = product_state({Vector::Unit(d, 0)}, false);
    rep.shifts = {2.0};
    const EpsilonShiftReport r = apply_epsilon_shift(rep, 1.5);
    EXPECT_GT(r.norm_loss, kEpsilonShiftNormLossFlag);
    EXPECT_NEAR(rep.norm_squared(), 1.0, 1e-12);
}
