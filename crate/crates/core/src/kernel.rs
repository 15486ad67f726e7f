//! The θ-Poisson kernel, its gradient, and the operator Δ_θ.
//!
//! ```text
//! P_θ(x,ζ) = c_{n,θ} (1-|x|²)^{1+2θ} / |x-ζ|^{n+2θ}
//! c_{n,θ}  = Γ(n/2+θ) Γ(1+θ) / (Γ(n/2) Γ(1+2θ))
//! ```
//!
//! All powers are taken in log space so the kernel stays finite and accurate for
//! `|x|` within `1e-8` of the sphere and `θ` close to `-1/2`.

use crate::error::{Error, Result};
use crate::specfun::log_gamma_ratio;

/// Sphere points whose norm is off by more than this are rejected.
pub const SPHERE_RENORM_TOL: f64 = 1e-8;

/// Dimension, parameter and the two derived constants of the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaParams {
    n: usize,
    theta: f64,
    c_norm: f64,
    c_grad: f64,
}

impl ThetaParams {
    /// Validates `n >= 2`, `theta > -1/2` and computes `c_{n,θ}` and
    /// `C(n,θ) = -2θ(n-2-2θ) c_{n,θ} / n`.
    pub fn new(n: usize, theta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("dimension must be at least 2, got {n}")));
        }
        if !theta.is_finite() || theta <= -0.5 {
            return Err(Error::domain(format!(
                "theta = {theta}: the Dirichlet problem is solvable for all continuous data only when theta > -1/2"
            )));
        }
        let half = n as f64 / 2.0;
        let log_c = log_gamma_ratio(&[half + theta, 1.0 + theta], &[half, 1.0 + 2.0 * theta])?;
        let c_norm = log_c.exp();
        let c_grad = -2.0 * theta * (n as f64 - 2.0 - 2.0 * theta) / n as f64 * c_norm;
        Ok(Self { n, theta, c_norm, c_grad })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `c_{n,θ}`
    pub fn c_norm(&self) -> f64 {
        self.c_norm
    }

    /// `C(n,θ)`
    pub fn c_grad(&self) -> f64 {
        self.c_grad
    }

    /// `n/2 + θ`, half the kernel's distance exponent.
    pub(crate) fn half_exponent(&self) -> f64 {
        0.5 * self.n as f64 + self.theta
    }

    /// `θ(n/2 - 1 - θ)`, the zeroth-order coefficient of Δ_θ.
    pub fn zeroth_order_coeff(&self) -> f64 {
        self.theta * (0.5 * self.n as f64 - 1.0 - self.theta)
    }
}

/// Same as [`ThetaParams::new`].
pub fn make_params(n: usize, theta: f64) -> Result<ThetaParams> {
    ThetaParams::new(n, theta)
}

/// A point of the open unit ball, with its norm cached.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    coords: Vec<f64>,
    r: f64,
}

impl BallPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("ball point needs finite coordinates"));
        }
        let r = norm(&coords);
        if r >= 1.0 {
            return Err(Error::domain(format!("|x| = {r} is not inside the unit ball")));
        }
        Ok(Self { coords, r })
    }

    pub fn origin(n: usize) -> Self {
        Self { coords: vec![0.0; n], r: 0.0 }
    }

    /// `r e₁`
    pub fn on_axis(n: usize, r: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::domain(format!("radius {r} outside [0,1)")));
        }
        let mut coords = vec![0.0; n];
        coords[0] = r;
        Ok(Self { coords, r })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `1 - |x|²`, formed as `(1-r)(1+r)`.
    pub fn one_minus_r2(&self) -> f64 {
        (1.0 - self.r) * (1.0 + self.r)
    }
}

/// A point of the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Accepts vectors within [`SPHERE_RENORM_TOL`] of unit length and renormalizes them.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let len = norm(&coords);
        if !len.is_finite() || (len - 1.0).abs() > SPHERE_RENORM_TOL {
            return Err(Error::domain(format!("|ζ| = {len} is not on the unit sphere")));
        }
        Ok(Self { coords: coords.into_iter().map(|v| v / len).collect() })
    }

    /// Normalizes any non-zero vector.
    pub fn from_direction(v: &[f64]) -> Result<Self> {
        let len = norm(v);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::domain("direction must be a finite non-zero vector"));
        }
        Ok(Self { coords: v.iter().map(|c| c / len).collect() })
    }

    pub(crate) fn from_unit(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    /// `e_k` (zero-based axis index).
    pub fn basis(n: usize, k: usize) -> Self {
        let mut coords = vec![0.0; n];
        coords[k] = 1.0;
        Self { coords }
    }

    pub fn e1(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist2(x: &BallPoint, zeta: &SpherePoint) -> f64 {
    x.coords.iter().zip(&zeta.coords).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `P_θ(x, ζ)`.
pub fn poisson_kernel(p: &ThetaParams, x: &BallPoint, zeta: &SpherePoint) -> f64 {
    let ln_w = x.one_minus_r2().ln();
    let ln_d2 = dist2(x, zeta).ln();
    (p.c_norm.ln() + (1.0 + 2.0 * p.theta) * ln_w - p.half_exponent() * ln_d2).exp()
}

/// `∇_x P_θ(x, ζ)`:
///
/// ```text
/// ∂_k P = -2(1+2θ) c (1-|x|²)^{2θ} x_k |x-ζ|² / |x-ζ|^{n+2θ+2}
///         - (n+2θ) c (1-|x|²)^{1+2θ} (x_k-ζ_k) / |x-ζ|^{n+2θ+2}
/// ```
pub fn poisson_kernel_gradient(p: &ThetaParams, x: &BallPoint, zeta: &SpherePoint) -> Vec<f64> {
    let w = x.one_minus_r2();
    let d2 = dist2(x, zeta);
    let h = p.half_exponent();
    let ln_c = p.c_norm.ln();
    // (1-|x|²)^{2θ} |x-ζ|^{-(n+2θ)} and (1-|x|²)^{1+2θ} |x-ζ|^{-(n+2θ+2)}
    let first = (ln_c + 2.0 * p.theta * w.ln() - h * d2.ln()).exp();
    let second = (ln_c + (1.0 + 2.0 * p.theta) * w.ln() - (h + 1.0) * d2.ln()).exp();
    let a = -2.0 * (1.0 + 2.0 * p.theta) * first;
    let b = -2.0 * h * second;
    x.coords
        .iter()
        .zip(&zeta.coords)
        .map(|(xk, zk)| a * xk + b * (xk - zk))
        .collect()
}

/// Kernel data at the axis point `x = r e₁`, parameterized by the gap `1 - ζ₁`.
///
/// With `s = 1 - ζ₁` the squared distance is `|re₁ - ζ|² = (1-r)² + 2rs`, which
/// stays accurate when both `1-r` and `s` are tiny.
#[derive(Debug, Clone, Copy)]
pub struct AxialKernel {
    r: f64,
    one_minus_r: f64,
    half: f64,
    theta: f64,
    ln_value: f64,
    ln_first: f64,
    ln_second: f64,
}

impl AxialKernel {
    pub fn new(p: &ThetaParams, r: f64) -> Self {
        let one_minus_r = 1.0 - r;
        let ln_w = (one_minus_r * (1.0 + r)).ln();
        let ln_c = p.c_norm.ln();
        Self {
            r,
            one_minus_r,
            half: p.half_exponent(),
            theta: p.theta,
            ln_value: ln_c + (1.0 + 2.0 * p.theta) * ln_w,
            ln_first: ln_c + 2.0 * p.theta * ln_w,
            ln_second: ln_c + (1.0 + 2.0 * p.theta) * ln_w,
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn dist2(&self, gap: f64) -> f64 {
        self.one_minus_r * self.one_minus_r + 2.0 * self.r * gap
    }

    /// `P_θ(re₁, ζ)`
    pub fn value(&self, gap: f64) -> f64 {
        (self.ln_value - self.half * self.dist2(gap).ln()).exp()
    }

    /// `∂P_θ/∂x₁ (re₁, ζ)`, using `r - ζ₁ = gap - (1-r)`.
    pub fn radial(&self, gap: f64) -> f64 {
        let ln_d2 = self.dist2(gap).ln();
        let first = (self.ln_first - self.half * ln_d2).exp();
        let second = (self.ln_second - (self.half + 1.0) * ln_d2).exp();
        -2.0 * (1.0 + 2.0 * self.theta) * self.r * first - 2.0 * self.half * (gap - self.one_minus_r) * second
    }

    /// `(value, radial, tangential)` from a single exponential.
    pub fn all(&self, gap: f64) -> (f64, f64, f64) {
        let d2 = self.dist2(gap);
        let v = (self.ln_value - self.half * d2.ln()).exp();
        let over_d2 = v / d2;
        let w = self.one_minus_r * (1.0 + self.r);
        let radial = -2.0 * (1.0 + 2.0 * self.theta) * self.r * v / w - 2.0 * self.half * (gap - self.one_minus_r) * over_d2;
        (v, radial, 2.0 * self.half * over_d2)
    }

    /// Factor `f` with `∂P_θ/∂x_k (re₁, ζ) = f ζ_k` for `k >= 2`.
    pub fn tangential(&self, gap: f64) -> f64 {
        2.0 * self.half * (self.ln_second - (self.half + 1.0) * self.dist2(gap).ln()).exp()
    }
}

/// Default stencil step `max(1e-5, 1e-3 (1-|x|))`.
pub fn default_step(x: &BallPoint) -> f64 {
    (1e-3 * (1.0 - x.r)).max(1e-5)
}

/// `Δ_θ u(x)` with second-order central differences of step `h`.
pub fn apply_delta_theta<F>(p: &ThetaParams, u: F, x: &BallPoint, h: f64) -> Result<f64>
where
    F: Fn(&BallPoint) -> Result<f64>,
{
    if !(h > 0.0) || 1.0 - x.r <= 2.0 * h {
        return Err(Error::Step { step: h, radius: x.r });
    }
    let n = x.dim();
    let u0 = u(x)?;
    let mut lap = 0.0;
    let mut radial = 0.0;
    let mut shifted = x.coords.clone();
    for j in 0..n {
        shifted[j] = x.coords[j] + h;
        let up = u(&BallPoint::new(shifted.clone())?)?;
        shifted[j] = x.coords[j] - h;
        let down = u(&BallPoint::new(shifted.clone())?)?;
        shifted[j] = x.coords[j];
        lap += (up - 2.0 * u0 + down) / (h * h);
        radial += x.coords[j] * (up - down) / (2.0 * h);
    }
    let w = x.one_minus_r2();
    Ok(w * (0.25 * w * lap + p.theta * radial + p.zeroth_order_coeff() * u0))
}
