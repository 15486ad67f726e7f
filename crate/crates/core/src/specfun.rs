//! Log-gamma, Pochhammer symbols and the Gauss hypergeometric function.
//!
//! `hyp2f1` sums the power series
//!
//! ```text
//! 2F1(a,b;c;λ) = Σ_k (a)_k (b)_k / ((c)_k k!) λ^k,      0 <= λ < 1,
//! ```
//!
//! and switches to the Euler form `(1-λ)^{c-a-b} 2F1(c-a,c-b;c;λ)` when
//! `c-a-b > 0` and `λ` is close to one. Every result carries the number of
//! terms used and an estimate of the truncation error.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Shift target for the Stirling series.
const STIRLING_MIN: f64 = 15.0;

/// `B_{2k} / (2k (2k-1))` for k = 1..8.
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// Natural logarithm of the gamma function for `x > 0`.
///
/// Uses the Stirling series with Bernoulli corrections through `B_16`,
/// after shifting the argument above 15 with the recurrence
/// `Γ(x+1) = x Γ(x)`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("log_gamma needs a finite x > 0, got {x}")));
    }
    let mut z = x;
    let mut shift = 1.0;
    while z < STIRLING_MIN {
        shift *= z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in STIRLING_COEFFS {
        corr += c * p;
        p *= inv2;
    }
    let stirling = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + corr;
    Ok(stirling - shift.ln())
}

/// `ln(Γ(p0) Γ(p1) ... / (Γ(q0) Γ(q1) ...))`, all arguments positive.
pub fn log_gamma_ratio(num: &[f64], den: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for &v in num {
        acc += log_gamma(v)?;
    }
    for &v in den {
        acc -= log_gamma(v)?;
    }
    Ok(acc)
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (a + j as f64))
}

pub(crate) fn is_nonpositive_integer(v: f64) -> bool {
    v <= 0.0 && v == v.round()
}

/// Parameters of a 2F1 evaluation on `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub lambda: f64,
}

impl HypParams {
    pub fn new(a: f64, b: f64, c: f64, lambda: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::domain("2F1 parameters must be finite"));
        }
        if is_nonpositive_integer(c) {
            return Err(Error::domain(format!("2F1 lower parameter c = {c} is a non-positive integer")));
        }
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::domain(format!("2F1 argument must lie in [0,1), got {lambda}")));
        }
        Ok(Self { a, b, c, lambda })
    }

    /// Terminating polynomial degree, if `a` or `b` is a non-positive integer.
    pub fn terminating_degree(&self) -> Option<usize> {
        let deg = |v: f64| is_nonpositive_integer(v).then_some((-v) as usize);
        match (deg(self.a), deg(self.b)) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        }
    }
}

/// Value of a truncated series together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    /// Relative truncation tolerance on the estimated tail.
    pub tol: f64,
    pub max_terms: usize,
    /// Euler transformation is applied for `λ` above this (and `c-a-b > 0`).
    /// Set to `1.0` or more to always sum the plain series.
    pub euler_threshold: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self { tol: 1e-14, max_terms: 1_000_000, euler_threshold: 0.75 }
    }
}

impl SeriesConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Gauss hypergeometric function with the default configuration and tolerance `tol`.
pub fn hyp2f1(p: &HypParams, tol: f64) -> Result<SeriesResult> {
    hyp2f1_with(p, &SeriesConfig::with_tol(tol))
}

pub fn hyp2f1_with(p: &HypParams, cfg: &SeriesConfig) -> Result<SeriesResult> {
    if !(cfg.tol > 0.0) {
        return Err(Error::domain("series tolerance must be positive"));
    }
    let excess = p.c - p.a - p.b;
    let use_euler = p.terminating_degree().is_none() && excess > 0.0 && p.lambda > cfg.euler_threshold;
    if use_euler {
        let inner = sum_series(p.c - p.a, p.c - p.b, p.c, p.lambda, cfg)?;
        let factor = (excess * (-p.lambda).ln_1p()).exp();
        Ok(finish(inner.value * factor, inner.terms_used, inner.tail_bound * factor))
    } else {
        sum_series(p.a, p.b, p.c, p.lambda, cfg)
    }
}

/// `d/dλ 2F1(a,b;c;λ) = (ab/c) 2F1(a+1,b+1;c+1;λ)`.
pub fn hyp2f1_derivative(p: &HypParams, tol: f64) -> Result<SeriesResult> {
    hyp2f1_derivative_with(p, &SeriesConfig::with_tol(tol))
}

pub fn hyp2f1_derivative_with(p: &HypParams, cfg: &SeriesConfig) -> Result<SeriesResult> {
    let scale = p.a * p.b / p.c;
    if scale == 0.0 {
        return Ok(SeriesResult { value: 0.0, terms_used: 1, tail_bound: 0.0 });
    }
    let shifted = HypParams::new(p.a + 1.0, p.b + 1.0, p.c + 1.0, p.lambda)?;
    let inner = hyp2f1_with(&shifted, cfg)?;
    Ok(finish(scale * inner.value, inner.terms_used, scale.abs() * inner.tail_bound))
}

/// Gauss summation `2F1(a,b;c;1) = Γ(c)Γ(c-a-b) / (Γ(c-a)Γ(c-b))` for `c-a-b > 0`.
///
/// The gamma arguments `c-a` and `c-b` may be negative; reflection is used for them.
pub fn hyp2f1_at_one(a: f64, b: f64, c: f64) -> Result<f64> {
    let excess = c - a - b;
    if !(excess > 0.0) || is_nonpositive_integer(c) {
        return Err(Error::domain(format!("Gauss sum needs c-a-b > 0, got {excess}")));
    }
    if is_nonpositive_integer(c - a) || is_nonpositive_integer(c - b) {
        return Ok(0.0);
    }
    let (lc, sc) = signed_log_gamma(c)?;
    let (le, se) = signed_log_gamma(excess)?;
    let (la, sa) = signed_log_gamma(c - a)?;
    let (lb, sb) = signed_log_gamma(c - b)?;
    Ok(sc * se * sa * sb * (lc + le - la - lb).exp())
}

/// `(ln|Γ(x)|, sign Γ(x))` for any non-pole real `x`.
fn signed_log_gamma(x: f64) -> Result<(f64, f64)> {
    if x > 0.0 {
        return Ok((log_gamma(x)?, 1.0));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::domain(format!("gamma has a pole at {x}")));
    }
    // Γ(x) Γ(1-x) = π / sin(πx)
    let s = (PI * x).sin();
    let lg = PI.ln() - s.abs().ln() - log_gamma(1.0 - x)?;
    Ok((lg, s.signum()))
}

fn finish(value: f64, terms_used: usize, tail: f64) -> SeriesResult {
    let floor = f64::EPSILON * value.abs();
    let tail_bound = if tail > floor { tail } else { floor };
    SeriesResult { value, terms_used, tail_bound }
}

fn sum_series(a: f64, b: f64, c: f64, lambda: f64, cfg: &SeriesConfig) -> Result<SeriesResult> {
    let mut term = 1.0;
    let mut sum = 1.0;
    if lambda == 0.0 {
        return Ok(finish(sum, 1, 0.0));
    }
    let mut k = 0usize;
    loop {
        let kf = k as f64;
        let num = (a + kf) * (b + kf);
        if num == 0.0 {
            // a or b hit zero: the series terminates with k+1 terms.
            return Ok(finish(sum, k + 1, 0.0));
        }
        term *= num / ((c + kf) * (kf + 1.0)) * lambda;
        sum += term;
        k += 1;

        let kf = k as f64;
        // Past this index the term ratios keep a fixed sign and tend to λ.
        let settled = a + kf > 0.0 && b + kf > 0.0 && c + kf > 0.0;
        if settled {
            let next = ((a + kf) * (b + kf) / ((c + kf) * (kf + 1.0))).abs() * lambda;
            let rho = next.max(lambda);
            if rho < 1.0 {
                let tail = term.abs() * rho / (1.0 - rho);
                if tail <= cfg.tol * sum.abs() {
                    return Ok(finish(sum, k + 1, tail));
                }
                if k + 1 >= cfg.max_terms {
                    return Err(Error::NonConvergence { terms: k + 1, tail });
                }
                continue;
            }
        }
        if k + 1 >= cfg.max_terms {
            return Err(Error::NonConvergence { terms: k + 1, tail: f64::INFINITY });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn log_gamma_known_values() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-14);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-14);
        assert!(rel(log_gamma(5.0).unwrap(), 24f64.ln()) < 1e-14);
        assert!(rel(log_gamma(0.5).unwrap(), 0.5 * PI.ln()) < 1e-14);
        // ln(199!) via a direct sum of logs
        let direct: f64 = (1..200).map(|k| (k as f64).ln()).sum();
        assert!(rel(log_gamma(200.0).unwrap(), direct) < 1e-14);
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(matches!(log_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(-1.5), Err(Error::Domain(_))));
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn pochhammer_basics() {
        assert_eq!(pochhammer(1.0, 4), 24.0);
        assert_eq!(pochhammer(-3.7, 0), 1.0);
        assert_eq!(pochhammer(-1.0, 2), 0.0);
        assert_eq!(pochhammer(0.5, 3), 0.5 * 1.5 * 2.5);
    }

    #[test]
    fn hyp_params_validation() {
        assert!(HypParams::new(1.0, 1.0, 0.0, 0.5).is_err());
        assert!(HypParams::new(1.0, 1.0, -2.0, 0.5).is_err());
        assert!(HypParams::new(1.0, 1.0, -2.5, 0.5).is_ok());
        assert!(HypParams::new(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(HypParams::new(1.0, 1.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn hyp2f1_at_zero_is_one() {
        let p = HypParams::new(2.3, -0.7, 1.9, 0.0).unwrap();
        let r = hyp2f1(&p, 1e-14).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.terms_used, 1);
    }

    #[test]
    fn terminating_series_is_exact() {
        for &lam in &[0.0, 0.2, 0.9, 0.99] {
            let p = HypParams::new(-1.0, -0.5, 1.5, lam).unwrap();
            let r = hyp2f1(&p, 1e-14).unwrap();
            assert!((r.value - (1.0 + lam / 3.0)).abs() <= 2.0 * f64::EPSILON);
            if lam > 0.0 {
                assert_eq!(r.terms_used, 2);
            }
            let d = hyp2f1_derivative(&p, 1e-14).unwrap();
            assert!((d.value - 1.0 / 3.0).abs() < 1e-15);
        }
        let p = HypParams::new(-4.0, 2.5, 3.5, 0.97).unwrap();
        assert_eq!(hyp2f1(&p, 1e-14).unwrap().terms_used, 5);
    }

    #[test]
    fn closed_forms() {
        // 2F1(1,1;2;λ) = -ln(1-λ)/λ
        for &lam in &[0.1, 0.5, 0.8, 0.99] {
            let p = HypParams::new(1.0, 1.0, 2.0, lam).unwrap();
            let v = hyp2f1(&p, 1e-15).unwrap().value;
            assert!(rel(v, -(-lam as f64).ln_1p() / lam) < 1e-13, "λ={lam}");
        }
        // 2F1(a,b;b;λ) = (1-λ)^{-a}
        let p = HypParams::new(0.7, 2.2, 2.2, 0.6).unwrap();
        assert!(rel(hyp2f1(&p, 1e-15).unwrap().value, 0.4f64.powf(-0.7)) < 1e-13);
    }

    #[test]
    fn derivative_leading_term() {
        let p = HypParams::new(1.3, -0.4, 2.1, 0.0).unwrap();
        let d = hyp2f1_derivative(&p, 1e-14).unwrap();
        assert!((d.value - 1.3 * -0.4 / 2.1).abs() < 1e-16);
    }

    #[test]
    fn non_convergence_reported() {
        let p = HypParams::new(1.5, 1.5, 1.0, 0.999).unwrap();
        let cfg = SeriesConfig { tol: 1e-14, max_terms: 50, euler_threshold: 0.75 };
        assert!(matches!(hyp2f1_with(&p, &cfg), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn tail_bound_positive() {
        let p = HypParams::new(0.5, 0.5, 1.0, 0.5).unwrap();
        let r = hyp2f1(&p, 1e-14).unwrap();
        assert!(r.tail_bound > 0.0);
        assert!(r.tail_bound <= 1e-14 * r.value.abs());
    }

    #[test]
    fn gauss_sum_matches_series_limit() {
        // 2F1(1/2,1/2;2;1) = 4/π
        let v = hyp2f1_at_one(0.5, 0.5, 2.0).unwrap();
        assert!(rel(v, 4.0 / PI) < 1e-13);
        // Chu-Vandermonde with a negative gamma argument c-a = -0.5
        let v = hyp2f1_at_one(2.0, -3.0, 1.5).unwrap();
        assert!(rel(v, pochhammer(-0.5, 3) / pochhammer(1.5, 3)) < 1e-13);
    }
}
