//! Numerical building blocks: quadrature, root bracketing, compensated sums
//! and the standard normal law.

pub mod normal;
pub mod quad;
pub mod roots;
pub mod sum;

pub use normal::{normal_cdf, normal_cdf_diff, normal_pdf};
pub use quad::{integrate, integrate_with_breaks, Integral, DEFAULT_ABS_TOL};
pub use roots::bisect_increasing;
pub use sum::NeumaierSum;
