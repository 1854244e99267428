//! Generalized multipartite concurrences and their behaviour under LOCC.
//!
//! * [`qstate`]: dense pure states, partial traces, purities and local flags.
//! * [`concurrence`]: the `p ↔ α` coefficient algebra and pure-state evaluation.
//! * [`monotonicity`]: the flag-superposition gap, analytic counterexamples
//!   and a derivative-free violation search.
//! * [`convexroof`]: an upper-bound estimator for mixed-state concurrence.

pub mod cli;
pub mod concurrence;
pub mod convexroof;
pub mod error;
pub mod monotonicity;
pub mod optimize;
pub mod qstate;

pub use error::{Error, Result};
