//! Least squares with an intercept and two regressors.

use serde::{Deserialize, Serialize};

use super::special::{f_sf, student_t_two_sided};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
    /// Two-sided.
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub intercept: Coefficient,
    pub x1: Coefficient,
    pub x2: Coefficient,
    pub n: usize,
    /// Residual degrees of freedom, n - 3.
    pub df: usize,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub f_stat: f64,
    pub f_p_value: f64,
    pub residual_se: f64,
}

impl RegressionReport {
    pub fn coefficients(&self) -> [(&'static str, &Coefficient); 3] {
        [("Intercept", &self.intercept), ("x1", &self.x1), ("x2", &self.x2)]
    }
}

type Qr = ([Vec<f64>; 3], [[f64; 3]; 3]);

/// Thin QR of an n x 3 design by modified Gram-Schmidt: returns Q's
/// columns and upper-triangular R.
fn thin_qr(cols: [Vec<f64>; 3]) -> Result<Qr> {
    let mut q = cols;
    let mut r = [[0.0; 3]; 3];
    let scale: f64 = q.iter().map(|c| norm(c)).fold(0.0, f64::max);
    for k in 0..3 {
        for i in 0..k {
            let proj = dot(&q[i], &q[k]);
            r[i][k] = proj;
            let qi = q[i].clone();
            q[k].iter_mut().zip(&qi).for_each(|(v, u)| *v -= proj * u);
        }
        let nk = norm(&q[k]);
        if nk <= 1e-10 * scale.max(1.0) {
            let name = ["intercept", "x1", "x2"][k];
            return Err(Error::Stats(format!(
                "design matrix is rank deficient: column '{name}' is a linear combination of the previous ones"
            )));
        }
        r[k][k] = nk;
        q[k].iter_mut().for_each(|v| *v /= nk);
    }
    Ok((q, r))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Inverse of an upper-triangular 3x3 matrix.
fn invert_upper(r: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut inv = [[0.0; 3]; 3];
    for j in 0..3 {
        inv[j][j] = 1.0 / r[j][j];
        for i in (0..j).rev() {
            let s: f64 = ((i + 1)..=j).map(|k| r[i][k] * inv[k][j]).sum();
            inv[i][j] = -s / r[i][i];
        }
    }
    inv
}

/// Regresses `y` on `[1, x1, x2]`.
///
/// A perfect fit (zero residuals) reports zero standard errors, p = 0 for
/// nonzero estimates and p = 1 for zero ones.
pub fn ols2(y: &[f64], x1: &[f64], x2: &[f64]) -> Result<RegressionReport> {
    let n = y.len();
    if x1.len() != n || x2.len() != n {
        return Err(Error::Stats(format!(
            "regression inputs differ in length ({n}, {}, {})",
            x1.len(),
            x2.len()
        )));
    }
    if n < 4 {
        return Err(Error::Stats(format!(
            "regression needs at least 4 observations, got {n}"
        )));
    }
    if y.iter().chain(x1).chain(x2).any(|v| !v.is_finite()) {
        return Err(Error::Stats("regression inputs must be finite".into()));
    }

    let (q, r) = thin_qr([vec![1.0; n], x1.to_vec(), x2.to_vec()])?;
    let qty = [dot(&q[0], y), dot(&q[1], y), dot(&q[2], y)];
    let mut beta = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = ((i + 1)..3).map(|k| r[i][k] * beta[k]).sum();
        beta[i] = (qty[i] - s) / r[i][i];
    }

    let fitted: Vec<f64> = (0..n).map(|i| beta[0] + beta[1] * x1[i] + beta[2] * x2[i]).collect();
    let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b).powi(2)).sum();
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean_y).powi(2)).sum();
    let df = n - 3;
    let dfd = df as f64;

    let y_scale = y.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    let exact = rss.sqrt() <= 1e-12 * y_scale * (n as f64).sqrt();
    let sigma2 = if exact { 0.0 } else { rss / dfd };

    // (X'X)^-1 = R^-1 R^-T.
    let rinv = invert_upper(&r);
    let cov_diag: Vec<f64> = (0..3).map(|i| (0..3).map(|k| rinv[i][k].powi(2)).sum()).collect();
    let beta_scale = beta.iter().map(|b| b.abs()).fold(0.0, f64::max).max(1.0);

    let coef = |i: usize| -> Result<Coefficient> {
        let se = (sigma2 * cov_diag[i]).sqrt();
        let est = beta[i];
        if se == 0.0 {
            let zero = est.abs() <= 1e-9 * beta_scale;
            return Ok(Coefficient {
                estimate: if zero { 0.0 } else { est },
                std_error: 0.0,
                t_stat: if zero { 0.0 } else { est.signum() * f64::INFINITY },
                p_value: if zero { 1.0 } else { 0.0 },
            });
        }
        let t = est / se;
        Ok(Coefficient {
            estimate: est,
            std_error: se,
            t_stat: t,
            p_value: student_t_two_sided(t, dfd)?,
        })
    };

    let r_squared = if tss > 0.0 {
        (1.0 - rss / tss).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n as f64 - 1.0) / dfd;
    let ess = (tss - rss).max(0.0);
    let (f_stat, f_p_value) = if tss <= 0.0 || ess <= 1e-12 * tss {
        (0.0, 1.0)
    } else if exact {
        (f64::INFINITY, 0.0)
    } else {
        let f = (ess / 2.0) / (rss / dfd);
        (f, f_sf(f, 2.0, dfd)?)
    };

    Ok(RegressionReport {
        intercept: coef(0)?,
        x1: coef(1)?,
        x2: coef(2)?,
        n,
        df,
        r_squared,
        adj_r_squared,
        f_stat,
        f_p_value,
        residual_se: sigma2.sqrt(),
    })
}
