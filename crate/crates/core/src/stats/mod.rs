//! Regression and correlation with p-values computed in-crate.

mod correlation;
mod ols;
mod special;

pub use correlation::{pearson, ranks, spearman, Correlation};
pub use ols::{ols2, Coefficient, RegressionReport};
pub use special::{beta_inc, f_sf, ln_gamma, student_t_sf, student_t_two_sided};
