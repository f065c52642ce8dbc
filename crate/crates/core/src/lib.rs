//! Optimal placement of finitely many sampling points for reconstruction in a
//! reproducing kernel Hilbert space.
//!
//! Given a kernel `K`, a reconstruction domain `Ω` and a measure `μ` on it
//! (discretized as a weighted node set), the crate searches for `n` points
//! `X` whose minimal-norm interpolant reconstructs functions of `H_K` best:
//!
//! | Objective | Quantity | Direction |
//! |-----------|----------|-----------|
//! | [`ObjectiveKind::Trace`] | `tr(𝐊 K[X]⁻¹)`, `𝐊 = ∫ K(x_k,t) K(t,x_l) dμ(t)` | maximize |
//! | [`ObjectiveKind::TraceSpectral`] | the same trace through the Karhunen–Loève spectrum | maximize |
//! | [`ObjectiveKind::Subspace`] | `λ_max(K[X] (E Eᵀ)⁻¹)`, `E_jk = e_k(x_j)` | minimize |
//! | [`ObjectiveKind::Supnorm`] | `max_μ φ_X`, the power function sup-norm | minimize |
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! thread-parallel drivers live in the `optsample` companion crate, which
//! calls the per-start / per-trial entry points exposed here
//! ([`optimize::run_start`], [`bench::ExperimentPlan::run_trial`]).
//!
//! ```
//! use optsample_core::{BoxDomain, Kernel, Measure, ObjectiveKind, ObjectiveSpec};
//! use optsample_core::optimize::{optimize_points, SearchConfig};
//!
//! let domain = BoxDomain::interval(-3.0, 3.0).unwrap();
//! let measure = Measure::grid(&domain, &[61]).unwrap();
//! let spec = ObjectiveSpec::new(ObjectiveKind::Supnorm, Kernel::gaussian(1), measure, domain, 1).unwrap();
//! let config = SearchConfig { restarts: 3, ..SearchConfig::default() };
//! let best = optimize_points(&spec, &config).unwrap();
//! assert!(best.points.point(0)[0].abs() < 0.1);
//! ```

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bench;
pub mod closedform;
mod error;
pub mod kernel;
pub mod linalg;
pub mod measure;
pub mod objective;
pub mod optimize;
pub mod rkhs;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use kernel::{Kernel, KernelFamily};
pub use measure::{BoxDomain, Measure, PointSet};
pub use objective::{ObjectiveKind, ObjectiveSpec};
pub use rkhs::{Expansion, Interpolant};
pub use spectral::EigenBasis;

/// Relative eigenvalue cutoff shared by every pseudo-inverse-like operation.
pub const TRUNCATION: f64 = 1e-12;
