#pragma once

#include "sbmdyn/linalg.hpp"

namespace sbmdyn::ops {

// Spin basis ordering: index 0 = up (sigma_z = +1), index 1 = down.
Matrix sigma_x();
Matrix sigma_y();
Matrix sigma_z();
Matrix identity(int d);

// Truncated Fock-space operators, basis |0>..|d-1>.
Matrix annihilation(int d);
Matrix creation(int d);
Matrix number(int d);
/// x = (b + b^dagger)/sqrt(2)
Matrix position(int d);

/// Embeds a physical-leg operator into a purified site: op (x) 1_anc.
Matrix with_ancilla(const Matrix& op, int anc_dim);

}  // namespace sbmdyn::ops
