#pragma once

#include <vector>

#include "sbmdyn/linalg.hpp"

namespace sbmdyn {

struct MpsState;

enum class ShiftMode { substitute, sandwich };

/// Per-site displacements <x_k> defining the shifted boson frame.
///
/// Frame convention: a representation state |r> with register x stands for
/// the physical state prod_k U(x_k)|r>, where U(x) = exp(x (b^dag - b)/sqrt 2)
/// and U(x)^dag b U(x) = b + x/sqrt 2. Hence H'(b) = H(b + x/sqrt 2).
struct ShiftRegister {
    std::vector<double> shifts;  // one per MPS site; 0 on the spin site
    double epsilon = 0.1;
    ShiftMode mode = ShiftMode::substitute;
};

/// <n|U(x)|m> for n, m < d, from the normal-ordered product
/// e^{x b^dag/sqrt2} e^{-x b/sqrt2} e^{-x^2/4} evaluated before truncation.
Matrix shift_matrix(double x, int d);

/// ||U^dagger U - 1||_F
double unitarity_defect(const Matrix& u);

struct ShiftedOperators {
    Matrix b;       // b + x/sqrt2
    Matrix bdag;    // (b + x/sqrt2)^dagger
    Matrix n;       // bdag * b
    Matrix x;       // (b + bdag)/sqrt2
};
ShiftedOperators shifted_local_operators(double x, int d);

/// Transforms a two-site gate into the shifted frame:
/// (U_l (x) U_r)^dagger gate (U_l (x) U_r) with truncated shift matrices.
Matrix sandwich_gate(const Matrix& gate, const Matrix& u_left, const Matrix& u_right);

/// Convenience overload; a site with x == 0 (e.g. the spin) gets the identity.
Matrix sandwich_gate(const Matrix& gate, double x_left, double x_right, int d_left, int d_right);

struct EpsilonShiftReport {
    double norm_loss = 0.0;         // 1 - <psi|psi> before renormalization
    double max_unitarity_defect = 0.0;
};

/// Moves the frame from x_k to (1+eps) x_k on every boson site. The
/// representation is multiplied by the truncated U(-eps x_k) = U(eps x_k)^dag
/// so the physical state is preserved up to truncation; the state is then
/// renormalized and the loss reported.
EpsilonShiftReport apply_epsilon_shift(MpsState& state, double epsilon);

/// Norm-loss level above which an epsilon shift is flagged as unreliable.
inline constexpr double kEpsilonShiftNormLossFlag = 0.01;

}  // namespace sbmdyn
