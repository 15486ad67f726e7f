//! Dirichlet solver for the invariant Laplacians on the unit ball of R^n.
//!
//! For `n >= 2` and `theta > -1/2` the operator
//!
//! ```text
//! Δ_θ u = (1-|x|²) { (1-|x|²)/4 Δu + θ Σ x_j ∂_j u + θ(n/2-1-θ) u }
//! ```
//!
//! has the Poisson kernel `P_θ(x,ζ) = c_{n,θ} (1-|x|²)^{1+2θ} / |x-ζ|^{n+2θ}` and the
//! Dirichlet problem with continuous data `φ` is solved by `u = P_θ[φ]`. The crate
//! evaluates `u` and `∇u` by quadrature on the sphere and ships a verification suite
//! that checks the hypergeometric mass identities, the singular-integral bounds and
//! the boundary behaviour of `∇u` (bounded for `θ > 0`, blowing up like
//! `(1-|x|²)^{2θ}` for `θ < 0`).
//!
//! Modules:
//! - [`specfun`]: log-gamma, Pochhammer symbols and the Gauss function 2F1 on `[0,1)`.
//! - [`kernel`]: parameters, ball/sphere points, the kernel, its gradient and `Δ_θ`.
//! - [`quadrature`]: σ-normalized rules on `S^{n-1}` and zonal reductions.
//! - [`solver`]: boundary data, the Poisson integral and its gradient.
//! - [`analysis`]: identity checks and log-log exponent fits.
//! - [`cli`]: the `invlap` command line front end.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod kernel;
pub mod quadrature;
pub mod solver;
pub mod specfun;

pub use error::{Error, Result};
pub use kernel::{BallPoint, SpherePoint, ThetaParams};
pub use quadrature::{RuleFactory, SphereRule, ZonalRule};
pub use solver::{BoundaryFunction, Profile, Rotation, SolutionField};
