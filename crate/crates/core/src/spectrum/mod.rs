//! Spectral sets of the transition operator of a 2×2 adding machine.
//!
//! - `𝓕`: `λ` with `(u_{F_n}(λ))` bounded,
//! - `𝓔`: `λ` with `(u_{F_n}(λ), w_{F_n}(λ))` bounded,
//! - `σ_pt`: `λ` with the full eigenvector sequence `(u_n(λ))` bounded, where
//!   `u_n = ∏ u_{F_i}^{δ_{i+1}} w_{F_i}^{γ_{i+1}}` over the digits of `n`.
//!
//! `σ_pt ⊂ 𝓕`, and `σ_pt = 𝓔` when `a + b = c + d`.

mod general;
mod membership;
mod orbit;
mod params;
mod render;

pub use general::{fibered_orbit_general, general_step, OrbitOutcome};
pub use membership::{
    critical_escape_test, e_membership, eigen_residual, escape_comparison, escape_radius,
    f_membership, pt_membership, u_n_value, Certificate, CriticalTest, EscapeComparison,
    MembershipResult, SetKind, Verdict,
};
pub use orbit::{
    affine, affine_monomial, fibered_orbit, monomial, orbit_from, uw_step, Coord, FiberedOrbit,
    Stop, HUGE,
};
pub use params::{
    RadiusSource, SpectralParams, DEFAULT_BUDGET, DEFAULT_DP_THRESHOLD, DEFAULT_DP_WINDOW,
};
pub use render::{classify, gray_levels, render_row, render_set, GridSpec, Raster};
