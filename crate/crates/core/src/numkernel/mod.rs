//! Complex polynomial algebra and small dense linear algebra.

pub mod linalg;
pub mod poly;
pub mod roots;

pub use linalg::{eig2, pinv_solve, singular_values, svd, CMatrix, Svd};
pub use poly::{monomial_count, monomial_exponents, monomial_index, BiPoly, UniPoly, Var, DROP_TOL};
pub use roots::{newton_polish, resultant_eliminate, roots_univariate, Polished};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
