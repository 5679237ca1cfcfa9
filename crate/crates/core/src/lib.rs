//! Bergman kernels of balls, finite ball quotients and Hartogs domains.
//!
//! The crate is organised bottom-up:
//!
//! * [`complex`] scalars (floating and exact), multi-indices, Hermitian
//!   polynomials and the small linear algebra everything else relies on;
//! * [`ball`] the ball kernel and Levi forms of real-algebraic hypersurfaces;
//! * [`unitary`] finite unitary groups over cyclotomic fields;
//! * [`invariants`] Reynolds averaging, basic maps and syzygies;
//! * [`quotient`] deck sums and the push-forward of the ball kernel;
//! * [`hartogs`] moments, series and closed forms on `Ω = {|λ|²h(z) < 1}`;
//! * [`algebraicity`] polynomial relations fitted to kernel samples and map
//!   recovery from a kernel;
//! * [`verify`] Monte Carlo integration and the verification reports.

pub mod algebraicity;
pub mod ball;
pub mod cache;
pub mod complex;
pub mod error;
pub mod hartogs;
pub mod invariants;
pub mod quotient;
pub mod unitary;
pub mod verify;

pub use complex::C64;
pub use error::{Error, Result};
