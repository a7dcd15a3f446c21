//! Oracles shared by the integration tests. Nothing here calls into the
//! crate's statistics code.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // Split first so a narrow peak cannot hide between the initial nodes.
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            adaptive(
                f,
                lo,
                hi,
                fa,
                fm,
                fb,
                simpson(lo, hi, fa, fm, fb),
                tol / pieces as f64,
                40,
            )
        })
        .sum()
}

/// Upper tail of Student's t. With `x = sqrt(df) tan(u)` the density becomes
/// proportional to `cos(u)^(df - 1)` on `(-pi/2, pi/2)`.
pub fn t_sf_oracle(t: f64, df: f64) -> f64 {
    let k = |u: f64| u.cos().max(0.0).powf(df - 1.0);
    let u0 = (t / df.sqrt()).atan();
    integrate(&k, u0, FRAC_PI_2, 1e-14) / integrate(&k, -FRAC_PI_2, FRAC_PI_2, 1e-14)
}

/// Upper tail of F(d1, d2). With `x = (d2 / d1) tan(u)^2` the density becomes
/// proportional to `sin(u)^(d1 - 1) cos(u)^(d2 - 1)` on `(0, pi/2)`.
pub fn f_sf_oracle(f: f64, d1: f64, d2: f64) -> f64 {
    let k = |u: f64| u.sin().max(0.0).powf(d1 - 1.0) * u.cos().max(0.0).powf(d2 - 1.0);
    let u0 = (d1 * f / d2).sqrt().atan();
    integrate(&k, u0, FRAC_PI_2, 1e-14) / integrate(&k, 0.0, FRAC_PI_2, 1e-14)
}

/// The 20 (t, df) points checked against the quadrature oracle.
pub const T_GRID: [(f64, f64); 10] = [
    (0.0, 1.0),
    (1.0, 1.0),
    (-2.5, 2.0),
    (0.5, 3.0),
    (2.0, 10.0),
    (-1.3, 7.0),
    (3.0, 30.0),
    (1.96, 228.0),
    (4.0, 375.0),
    (-0.2, 375.0),
];

pub const F_GRID: [(f64, f64, f64); 10] = [
    (1.0, 1.0, 1.0),
    (0.5, 1.0, 10.0),
    (3.0, 2.0, 375.0),
    (2.0, 2.0, 228.0),
    (1.5, 3.0, 12.0),
    (4.0, 5.0, 5.0),
    (0.2, 4.0, 20.0),
    (10.0, 2.0, 8.0),
    (0.9, 7.0, 50.0),
    (2.5, 1.0, 100.0),
];

/// Draws from N(0, 1) by Box-Muller on a small xorshift generator, so
/// synthetic data does not depend on the crate's random streams.
pub struct Gauss {
    state: u64,
    spare: Option<f64>,
}

impl Gauss {
    pub fn new(seed: u64) -> Self {
        Gauss {
            state: seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1,
            spare: None,
        }
    }

    fn uniform(&mut self) -> f64 {
        self.state ^= self.state << 13;
        self.state ^= self.state >> 7;
        self.state ^= self.state << 17;
        ((self.state >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    pub fn next(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        let (u, v) = (self.uniform(), self.uniform());
        let r = (-2.0 * u.ln()).sqrt();
        let a = 2.0 * std::f64::consts::PI * v;
        self.spare = Some(r * a.sin());
        r * a.cos()
    }
}

/// Outcome of the Monte Carlo check that `ols2` recovers known coefficients.
pub struct OlsRecovery {
    pub trials: usize,
    /// Per coefficient: trials whose estimate lies within 3 reported SE of the truth.
    pub covered: [usize; 3],
    /// Per coefficient: |mean estimate - truth| in units of the standard
    /// error of that mean.
    pub mean_bias_in_se: [f64; 3],
}

pub fn ols_recovery(trials: usize, seed: u64) -> OlsRecovery {
    let truth = [40.0, 50.0, -3.0];
    let n = 231;
    let mut g = Gauss::new(seed);
    let mut covered = [0; 3];
    let mut sums = [0.0; 3];
    let mut se_sums = [0.0; 3];
    for _ in 0..trials {
        let x1: Vec<f64> = (0..n).map(|i| (i % 21) as f64 / 20.0).collect();
        let x2: Vec<f64> = (0..n).map(|i| (i / 21) as f64 / 10.0 + 0.05 * g.next()).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| truth[0] + truth[1] * x1[i] + truth[2] * x2[i] + 4.0 * g.next())
            .collect();
        let fit = divsim::stats::ols2(&y, &x1, &x2).expect("regression");
        for (k, c) in [fit.intercept, fit.x1, fit.x2].iter().enumerate() {
            if (c.estimate - truth[k]).abs() <= 3.0 * c.std_error {
                covered[k] += 1;
            }
            sums[k] += c.estimate;
            se_sums[k] += c.std_error;
        }
    }
    let t = trials as f64;
    let mut mean_bias_in_se = [0.0; 3];
    for k in 0..3 {
        let se_of_mean = se_sums[k] / t / t.sqrt();
        mean_bias_in_se[k] = (sums[k] / t - truth[k]).abs() / se_of_mean;
    }
    OlsRecovery {
        trials,
        covered,
        mean_bias_in_se,
    }
}
