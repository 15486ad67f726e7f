//! Gauss rules for the symmetric Jacobi weight `(1-t²)^a` on `[-1, 1]`.
//!
//! Nodes are found by Newton iteration on `P_m^{(a,a)}(cos φ)` in the angle
//! variable, so both `t = cos φ` and the endpoint gap `1 - t = 2 sin²(φ/2)` come
//! out accurate. Weights are normalized to sum to one.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-14;
/// Below this, a step that fails to halve is rounding noise.
const NEWTON_NOISE: f64 = 1e-11;
const NEWTON_MAX_ITER: usize = 100;

/// Nodes as angles `φ_i ∈ (0, π)` (increasing, so `t_i = cos φ_i` decreases)
/// and normalized weights.
#[derive(Debug, Clone)]
pub struct AngularGauss {
    pub angles: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `(P_m, P_{m-1})` for the Jacobi family with `α = β = a`.
fn jacobi_pair(m: usize, a: f64, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    if m == 0 {
        return (prev, 0.0);
    }
    let mut cur = (a + 1.0) * x;
    for k in 2..=m {
        let k = k as f64;
        let s = 2.0 * k + 2.0 * a;
        let next = ((s - 1.0) * s * (s - 2.0) * x * cur - 2.0 * (k + a - 1.0).powi(2) * s * prev)
            / (2.0 * k * (k + 2.0 * a) * (s - 2.0));
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// `(P_m(cos φ), d/dφ P_m(cos φ))`.
fn jacobi_angular(m: usize, a: f64, phi: f64) -> (f64, f64) {
    let x = phi.cos();
    let s = phi.sin();
    let (pm, pm1) = jacobi_pair(m, a, x);
    let mf = m as f64;
    // (1-x²) P'_m = -m x P_m + (m+a) P_{m-1}
    let one_minus_x2_dp = -mf * x * pm + (mf + a) * pm1;
    (pm, -one_minus_x2_dp / s)
}

/// m-point Gauss rule for `(1-t²)^a dt`, `a > -1`, exact through degree `2m-1`.
pub fn gauss_jacobi_symmetric(m: usize, a: f64) -> Result<AngularGauss> {
    if m == 0 {
        return Err(Error::InvalidRule("Gauss rule needs at least one node".into()));
    }
    if !(a > -1.0) {
        return Err(Error::InvalidRule(format!("Jacobi exponent {a} must exceed -1")));
    }
    if a == -0.5 {
        return Ok(chebyshev_first_kind(m));
    }
    let mf = m as f64;
    // Π (k+a)² / (k(k+2a)) tends to a constant, so this stays well scaled.
    let mut scale = 2.0 * a + 1.0;
    for k in 1..=m {
        let k = k as f64;
        scale *= (k + a) * (k + a) / (k * (k + 2.0 * a));
    }

    let half = m.div_ceil(2);
    let mut angles = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..half {
        let mut phi = PI * (i as f64 + 0.75 + 0.5 * a) / (mf + a + 0.5);
        if m % 2 == 1 && i == half - 1 {
            phi = 0.5 * PI;
        }
        let mut converged = false;
        let mut prev = f64::INFINITY;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = jacobi_angular(m, a, phi);
            let step = p / dp;
            if step.abs() < NEWTON_NOISE && step.abs() > 0.5 * prev {
                converged = true;
                break;
            }
            phi -= step;
            prev = step.abs();
            if prev < NEWTON_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::InvalidRule(format!("Newton iteration for node {i} of {m} did not converge")));
        }
        let (_, dp) = jacobi_angular(m, a, phi);
        let w = scale / (dp * dp);
        angles[i] = phi;
        weights[i] = w;
        angles[m - 1 - i] = PI - phi;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        angles[m / 2] = 0.5 * PI;
    }
    Ok(AngularGauss { angles, weights })
}

fn chebyshev_first_kind(m: usize) -> AngularGauss {
    let mf = m as f64;
    AngularGauss {
        angles: (0..m).map(|i| PI * (i as f64 + 0.5) / mf).collect(),
        weights: vec![1.0 / mf; m],
    }
}

/// Gauss–Legendre nodes on `[-1, 1]` (increasing) with weights summing to 2.
pub fn gauss_legendre(m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = gauss_jacobi_symmetric(m, 0.0)?;
    let nodes = g.angles.iter().rev().map(|phi| phi.cos()).collect();
    let weights = g.weights.iter().rev().map(|w| 2.0 * w).collect();
    Ok((nodes, weights))
}
