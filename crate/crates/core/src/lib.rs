//! Exact computation of noncentral Whitney numbers, noncentral Dowling and
//! Tanny-Dowling polynomials, and Bernoulli polynomials, with an engine that
//! verifies the integral and explicit-sum identities linking them.
//!
//! Symbolic paths use [`Rational`] throughout; the [`quadrature`] module
//! provides independent floating-point cross-checks.

pub mod bernoulli;
pub mod cli;
pub mod error;
pub mod exact_arith;
pub mod identities;
pub mod poly;
pub mod quadrature;
pub mod triangles;

pub use bernoulli::{bernoulli_number, bernoulli_poly, bernoulli_poly_eval, BernoulliCache};
pub use error::{Error, Result};
pub use exact_arith::{binomial, factorial, falling_factorial, rat_pow, Integer, Rational};
pub use identities::{
    check_corollary2, check_theorem1, check_theorem3_exact, check_theorem4_series, check_worpitzky_general,
    gamma_moment, verify_sweep, IdentityCheck, IdentityId, Selection, Side, SweepGrid, Theorem4Residual,
    VerificationReport,
};
pub use poly::{
    dowling_poly, exponential_poly, geometric_poly, poly_definite_integral, poly_eval, poly_scale_arg,
    tanny_dowling_poly, Family, Polynomial, PolynomialRecord,
};
pub use quadrature::{
    adaptive_simpson, check_theorem1_numeric, check_theorem3_numeric, improper_integral_theorem4, laguerre_rule,
    LaguerreRule, NumericResidual, QuadratureResult,
};
pub use triangles::{stirling2, whitney2_explicit, whitney2_explicit_row, whitney2_table, WhitneyParams, WhitneyTriangle};
