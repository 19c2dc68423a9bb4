//! Exact log-polynomial series for the self-action radial system, damped
//! moment integrals, and the eigenvalue condition that fixes the coupling
//! constant α.

// Node and ζ tables are quoted to full published precision; NaN-rejecting
// guards are written as negated comparisons on purpose.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod damped;
pub mod densities;
pub mod eigen;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod reference;
pub mod roots;
pub mod series;
pub mod summation;
pub mod verify;

pub use algebra::{rat, LogPolySeries, Monomial, Term};
pub use damped::{
    damped_moment, euler_probe, gauss_flux, integrate_series_damped, solve_beta, BetaMode,
    BetaOptions, BetaResult, DampedMoment, MomentMode, MomentOptions,
};
pub use error::{Error, Result};
pub use series::{
    external_solution, generate_family, product_density, FamilyKind, ProductKind, ProductSeries,
    SolutionFamily,
};
pub use eigen::{
    eigen_residual, lambda_exponent, refine_alpha, solve_alpha, AlphaResult, EigenConfig, EigenMode,
    Refinement, Residual,
};
