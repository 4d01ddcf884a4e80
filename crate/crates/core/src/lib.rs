//! Modal laboratory for the abstract damped wave equation `u'' + Au + u' = 0`.
//!
//! The operator `A` is represented by spectral data ([`spectral::ModalOperator`]);
//! every quantity is computed mode by mode in closed form. On top of that sit
//! the asymptotic profiles of the diffusion phenomenon ([`expansion`]), the
//! energy-type functionals ([`functionals`]), concrete realizations of the
//! Dirichlet Laplacian ([`domains`]), rate fitting ([`rates`]) and a declarative
//! experiment runner ([`runner`]).

pub mod domains;
pub mod error;
pub mod expansion;
pub mod functionals;
pub mod numeric;
pub mod ode;
pub mod oracle;
pub mod rates;
pub mod runner;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use spectral::{CauchyPair, EigenMode, ModalOperator, ModalVector, ModeState};
