//! Direct-summation Fourier transforms of atomic measures,
//! `mu_hat(ξ) = Σ_j w_j e^{-2πi x_j·ξ}`, and the quadratures built on them.

mod caps;
mod grid;
pub(crate) mod kernel;
mod mollifier;

pub use caps::{
    cap_decomposition, square_function_compare, tube_mass_profile, tube_mass_profiles, Cap, CapDecomposition, SquareFunctionReport,
    TubeMassProfile,
};
pub use grid::{
    ball_power_integrals, evaluate_mu_hat, evaluate_mu_hat_with_budget, lp_norm_ball, BallIntegral, FourierGrid,
    NormReport, DEFAULT_MEMORY_BUDGET, DEFAULT_SPACING, MAX_SPACING,
};
pub use kernel::mu_hat_at;
pub use mollifier::{bump, bump_autocorrelation, bump_hat, cardinal_bspline, mollified_l2, BUMP_SCALE, PSI_L2_SQ};
