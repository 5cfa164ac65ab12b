#include "sbmdyn/shift.hpp"

#include <algorithm>
#include <cmath>

#include "sbmdyn/error.hpp"
#include "sbmdyn/mps.hpp"
#include "sbmdyn/operators.hpp"

namespace sbmdyn {

Matrix shift_matrix(double x, int d) {
    if (d < 1) throw ParameterError("shift_matrix: d must be >= 1");
    Matrix u = Matrix::Zero(d, d);
    if (x == 0.0) {
        u.setIdentity();
        return u;
    }
    const double a = x / std::sqrt(2.0);
    const double la = std::log(std::abs(a));
    const double sa = a > 0 ? 1.0 : -1.0;
    const double pref = -0.25 * x * x;
    for (int n = 0; n < d; ++n) {
        for (int m = 0; m < d; ++m) {
            double sum = 0.0;
            for (int k = 0; k <= std::min(n, m); ++k) {
                const int up = n - k, down = m - k;
                const double logmag = (up + down) * la +
                                      0.5 * (std::lgamma(n + 1.0) + std::lgamma(m + 1.0)) -
                                      std::lgamma(k + 1.0) - std::lgamma(up + 1.0) -
                                      std::lgamma(down + 1.0);
                double sign = ((up + down) % 2 == 0) ? 1.0 : sa;
                if (down % 2 == 1) sign = -sign;
                sum += sign * std::exp(logmag + pref);
            }
            u(n, m) = sum;
        }
    }
    return u;
}

double unitarity_defect(const Matrix& u) {
    if (u.rows() != u.cols()) throw ParameterError("unitarity_defect: square matrix required");
    return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm();
}

ShiftedOperators shifted_local_operators(double x, int d) {
    ShiftedOperators o;
    o.b = ops::annihilation(d) + (x / std::sqrt(2.0)) * Matrix::Identity(d, d);
    o.bdag = o.b.adjoint();
    o.n = o.bdag * o.b;
    o.x = (o.b + o.bdag) / std::sqrt(2.0);
    return o;
}

Matrix sandwich_gate(const Matrix& gate, const Matrix& u_left, const Matrix& u_right) {
    const Eigen::Index dim = u_left.rows() * u_right.rows();
    if (gate.rows() != dim || gate.cols() != dim)
        throw ParameterError("sandwich_gate: gate dimension does not match shift matrices");
    const Matrix w = kron(u_left, u_right);
    return w.adjoint() * gate * w;
}

Matrix sandwich_gate(const Matrix& gate, double x_left, double x_right, int d_left, int d_right) {
    return sandwich_gate(gate, shift_matrix(x_left, d_left), shift_matrix(x_right, d_right));
}

EpsilonShiftReport apply_epsilon_shift(MpsState& state, double epsilon) {
    EpsilonShiftReport report;
    if (epsilon == 0.0) return report;
    const double before = state.norm_squared();
    for (int k = 0; k < state.size(); ++k) {
        const double x = state.shifts[k];
        if (x == 0.0 || state.fixed_basis[k]) continue;
        const Matrix u = shift_matrix(-epsilon * x, state.phys_dim[k]);
        report.max_unitarity_defect = std::max(report.max_unitarity_defect, unitarity_defect(u));
        state.apply_local(ops::with_ancilla(u, state.anc_dim[k]), k);
        state.shifts[k] = (1.0 + epsilon) * x;
    }
    const double nrm = state.norm_squared();
    report.norm_loss = 1.0 - nrm / before;
    if (!(nrm > 0.0)) throw DegenerateStateError("apply_epsilon_shift: state annihilated");
    state.scale(1.0 / std::sqrt(nrm));
    return report;
}

}  // namespace sbmdyn
