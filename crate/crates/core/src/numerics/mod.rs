//! Special functions and small dense complex linear algebra.
//!
//! Everything that multiplies many gamma values together goes through
//! [`LogValue`] so intermediate products never overflow.

mod linalg;
mod logvalue;
mod matrix;
mod sampling;
mod special;

pub(crate) use linalg::cholesky_logdet_unchecked;
pub use linalg::{
    det_real, hermitian_eigen, hermitian_eigenvalues, logdet_hermitian_pd, matrix_sqrt_psd,
};
pub use logvalue::LogValue;
pub use matrix::ComplexMatrix;
pub use sampling::sample_complex_gaussian;
pub use special::{harmonic, ln_gamma, pochhammer, EULER_GAMMA};
