//! Mixed-state concurrence as an upper bound on its convex roof
//! `C(ρ) = min Σ_j C(ψ_j)` over decompositions `ρ = Σ_j |ψ_j⟩⟨ψ_j|` into
//! sub-normalized vectors.

mod decomposition;
mod mixed;
mod roof;

pub use decomposition::{eigendecomposition_ensemble, mix_decomposition, Decomposition, EIGEN_CUTOFF, ISOMETRY_TOL};
pub use mixed::{MixedState, MixedStateJson, HERMITIAN_TOL, PSD_TOL, TRACE_TOL};
pub use roof::{convex_roof_estimate, convex_roof_upper, flags_equality_check, FlagsCheck, RoofConfig, RoofEstimate};
