//! Finite-element laboratory for Steklov eigenvalue problems on strips with
//! oscillating boundaries.
//!
//! The crate solves the Steklov problem `Δu = 0` in `Ω`, `u_ν = λu` on the
//! boundary (and its mixed and weighted variants) with P1 finite elements,
//! and studies how the spectrum reacts when the flat top of a strip is
//! replaced by a fast oscillation `g_ε(x₁) = ε^α b(x₁/ε)`. Depending on the
//! exponent the spectrum is stable (`α > 1`), converges to a weighted limit
//! problem (`α = 1`), or degenerates to zero (`α < 1`); the crate reproduces
//! all three regimes numerically and cross-checks its solvers against
//! closed-form references.
//!
//! Start from the `examples/` directory: each example is a small, runnable
//! experiment exercising one capability (oracle validation, the trichotomy
//! sweep, connecting-map diagnostics, ...). The `steklov` binary wraps the
//! same machinery behind `solve`, `sweep`, `validate` and `emap`
//! subcommands.

pub mod eigsolve;
pub mod fem;
pub mod geometry;
pub mod linsolve;
pub mod mesh;
pub mod oracle;
pub mod perturb;
pub mod problem;
pub mod sweep;

pub use eigsolve::{EigenPairs, OperatorBundle};
pub use fem::{EdgeWeight, FeFunction, NormReport, SparseSymMatrix};
pub use geometry::{DomainSpec, ProfileKind, ProfileSpec};
pub use mesh::{BoundaryTag, Mesh, MeshResolution, TagSet};
pub use perturb::{ConnectingMap, LimitDescriptor, Regime};
pub use problem::{SteklovMode, SteklovSpectrum};
