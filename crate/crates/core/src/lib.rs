//! Laplace eigenvalue sums on highly symmetric domains and their linear
//! images.
//!
//! The crate computes eigenvalue sums exactly where closed forms exist
//! (boxes, balls, flat tori, the equilateral triangle) and by conforming
//! piecewise-linear finite elements otherwise, then checks the sharp upper
//! bounds that hold for linear images `T(D)` of a domain `D` with an
//! irreducible symmetry group:
//!
//! ```text
//! (l_1 + ... + l_n)(T(D)) <= |T^{-1}|_HS^2 / d * (l_1 + ... + l_n)(D)
//! ```
//!
//! together with the tight-frame averaging identity behind it, the
//! volume/second-moment identities that turn it into a scale-invariant
//! statement, a Robin variant with rescaled boundary parameter, and the flat
//! torus analogue.
//!
//! Layout:
//!
//! - [`linalg`]: dense and sparse linear algebra.
//! - [`symmetry`]: finite orthogonal groups, irreducibility, frame averages,
//!   boundary-Jacobian forms.
//! - [`geometry`]: polytopes, ellipsoids, exact moments, linear images, polar
//!   duals.
//! - [`spectra`]: closed-form and root-found spectra.
//! - [`fem`]: simplicial meshes, P1 assembly, generalized eigensolver,
//!   Richardson extrapolation.
//! - [`lab`]: verification reports, maximizer search, and the polar-dual
//!   conjecture explorer.

pub mod error;
pub mod fem;
pub mod geometry;
pub mod lab;
pub mod linalg;
pub mod numfmt;
pub mod spectra;
pub mod symmetry;

pub use error::{Error, Result};
pub use geometry::{Body, BodyMoments, Ellipsoid, Polytope};
pub use lab::report::VerificationReport;
pub use linalg::{RectMatrix, SquareMatrix, SymmetricEigenResult};
pub use spectra::{BoundaryCondition, Provenance, Spectrum};
pub use symmetry::{BoundaryFrame, GroupLabel, OrthogonalGroup};
