//! Scalars, multi-indices and Hermitian polynomial algebra.

pub mod field;
pub mod linalg;
pub mod poly;
pub mod rational;

pub use field::{hermitian_dot, norm_sqr, Field, C64, FLOAT_ZERO_TOL};
pub use poly::{minimal_poly_check, product_weight, ExactPolynomial, HermitianPolynomial, MultiIndex};
pub use rational::{GaussianRational, PiScaled, QPoly};
