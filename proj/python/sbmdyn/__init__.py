"""Spin-boson dynamics with matrix product states and shifted optimized boson bases."""

from ._sbmdyn import (
    ModelParams,
    ChainCoefficients,
    Trajectory,
    chain_coefficients,
    chain_to_star,
    spectral_density,
    shift_matrix,
    unitarity_defect,
    delta_r_zero_T,
    delta_r_finite_T,
    displacement_oracle,
    dense_evolve,
    dense_thermal,
    polarized_bath_shifts,
    evolve,
    thermal_occupations,
    first_local_minimum,
    n_eff_fit,
    classify_dynamics,
    resonance_peak,
    run_config,
)

__all__ = [name for name in dir() if not name.startswith("_")]
