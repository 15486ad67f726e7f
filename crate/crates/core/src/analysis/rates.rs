//! Growth rates near the sphere: singular integrals, gradient blow-up for
//! `θ < 0`, sup-gradient scans, and term-by-term gradient majorants at `re₁`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{BallPoint, SpherePoint, ThetaParams};
use crate::quadrature::{RuleFactory, ZonalRule};
use crate::solver::{BoundaryFunction, Profile, SolutionField};
use crate::specfun::{hyp2f1, HypParams};

use super::FitReport;

/// Radii for boundedness scans.
pub const SCAN_RADII: [f64; 7] = [0.90, 0.93, 0.96, 0.98, 0.99, 0.995, 0.999];

/// Below this the scanned gradient counts as identically zero.
const ZERO_GRADIENT: f64 = 1e-9;

/// `r = 1 - 10^{-k}` for `k = 4, 4.5, ..., 8`.
pub fn blowup_radii() -> Vec<f64> {
    (0..9).map(|j| 1.0 - 10f64.powf(-4.0 - 0.5 * j as f64)).collect()
}

/// `∫ |ζ-e₁|^q / |ζ-re₁|^{n-1+p} dσ`.
pub fn singular_integral(n: usize, p_exp: f64, q_exp: f64, r: f64, rule: &ZonalRule) -> f64 {
    let one_minus_r = 1.0 - r;
    let power = 0.5 * (n as f64 - 1.0 + p_exp);
    rule.iter()
        .map(|(z, w)| {
            let d2 = one_minus_r * one_minus_r + 2.0 * r * z.gap;
            let top = if q_exp == 0.0 { 1.0 } else { (2.0 * z.gap).powf(0.5 * q_exp) };
            w * top * (-power * d2.ln()).exp()
        })
        .sum()
}

/// Fits `ln I(r)` against `ln 1/(1-r)`; the slope should not exceed `p - q`.
pub fn verify_singular_integral_bound(n: usize, p_exp: f64, q_exp: f64, radii: &[f64], rules: &RuleFactory) -> Result<FitReport> {
    if !(p_exp > q_exp && q_exp >= 0.0) {
        return Err(Error::domain(format!("singular integral needs p > q >= 0, got p = {p_exp}, q = {q_exp}")));
    }
    let mut values = Vec::with_capacity(radii.len());
    for &r in radii {
        values.push(singular_integral(n, p_exp, q_exp, r, &*rules.zonal(n, r)?));
    }
    FitReport::fit(radii, &values, |r| 1.0 / (1.0 - r))
}

/// Fits `ln |r ∂_r P_θ[1](re₁)|` against `ln(1-r²)`; the slope should be `2θ`.
pub fn blowup_exponent_fit(p: &ThetaParams, radii: &[f64], rules: &Arc<RuleFactory>) -> Result<FitReport> {
    if !(p.theta() < 0.0) {
        return Err(Error::domain(format!("blow-up fit needs theta < 0, got {}", p.theta())));
    }
    if radii.iter().any(|r| !(0.9..1.0).contains(r)) {
        return Err(Error::domain("blow-up radii must lie in [0.9, 1)"));
    }
    let field = SolutionField::new(*p, BoundaryFunction::constant(p.n(), 1.0), Arc::clone(rules))?;
    let mut values = Vec::with_capacity(radii.len());
    for &r in radii {
        values.push(field.radial_derivative(r)?.abs());
    }
    FitReport::fit(radii, &values, |r| (1.0 - r) * (1.0 + r))
}

/// `cos α e₁ + sin α e₂` for `count` angles evenly spaced in `[0, π]`.
pub fn default_directions(n: usize, count: usize) -> Vec<SpherePoint> {
    (0..count)
        .map(|j| {
            let a = std::f64::consts::PI * j as f64 / (count.max(2) - 1) as f64;
            let mut c = vec![0.0; n];
            c[0] = a.cos();
            c[1] = a.sin();
            SpherePoint::from_direction(&c).expect("unit vector")
        })
        .collect()
}

/// `|∇u(r d)|` for every radius (rows) and direction (columns).
pub fn gradient_table(s: &SolutionField, radii: &[f64], directions: &[SpherePoint]) -> Result<Vec<Vec<f64>>> {
    radii
        .iter()
        .map(|&r| {
            directions
                .iter()
                .map(|d| {
                    let x = BallPoint::new(d.coords().iter().map(|c| r * c).collect())?;
                    let g = s.solution_gradient(&x)?;
                    Ok(g.iter().map(|v| v * v).sum::<f64>().sqrt())
                })
                .collect()
        })
        .collect()
}

/// `sup_d |∇u(r d)|` at each radius, fitted against `ln(1-r)`. A gradient that
/// vanishes identically is reported with slope 0.
pub fn lipschitz_scan(s: &SolutionField, radii: &[f64], directions: &[SpherePoint]) -> Result<FitReport> {
    if directions.is_empty() {
        return Err(Error::domain("scan needs at least one direction"));
    }
    let sups: Vec<f64> =
        gradient_table(s, radii, directions)?.iter().map(|row| row.iter().copied().fold(0.0, f64::max)).collect();
    if sups.iter().all(|v| *v < ZERO_GRADIENT) {
        return Ok(FitReport { slope: 0.0, intercept: 0.0, max_residual: 0.0, radii: radii.to_vec(), values: sups });
    }
    FitReport::fit(radii, &sups, |r| 1.0 - r)
}

/// Solver gradient at `re₁` for Lipschitz data against the term-by-term bounds
/// built from `|φ(ζ) - φ(e₁)| <= L|ζ - e₁|`:
///
/// ```text
/// |∂_k u| <= L (n+2θ) c I₃                                   (k >= 2)
/// |∂₁ u|  <= I₁ + L [2(1+2θ) c I₂ + (n+2θ) c (I₃ + I₄)]
/// I₁ = |φ(e₁)| |C(n,θ) 2F1(1-θ, n/2-θ; n/2+1; r²) r|
/// I₂ = (1-r²)^{2θ}   ∫ |ζ-e₁|   / |re₁-ζ|^{n+2θ}
/// I₃ = (1-r²)^{1+2θ} ∫ |ζ-e₁|²  / |re₁-ζ|^{n+2θ+2}
/// I₄ = (1-r²)^{1+2θ} (1-r) ∫ |ζ-e₁| / |re₁-ζ|^{n+2θ+2}
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct MajorantReport {
    pub radii: Vec<f64>,
    /// `max_{k>=2} |∂_k u(re₁)|`
    pub tangential: Vec<f64>,
    pub tangential_bound: Vec<f64>,
    /// `|∂₁ u(re₁)|`
    pub radial: Vec<f64>,
    pub radial_bound: Vec<f64>,
    /// `[I₁, I₂, I₃, I₄]` per radius.
    pub terms: Vec<[f64; 4]>,
}

impl MajorantReport {
    /// Largest `observed / bound` over radii for the tangential and radial components.
    pub fn worst_ratios(&self) -> (f64, f64) {
        let ratio = |obs: &[f64], bound: &[f64]| {
            obs.iter().zip(bound).map(|(o, b)| if *b > 0.0 { o / b } else if *o > 0.0 { f64::INFINITY } else { 0.0 }).fold(0.0, f64::max)
        };
        (ratio(&self.tangential, &self.tangential_bound), ratio(&self.radial, &self.radial_bound))
    }
}

fn majorant_terms(p: &ThetaParams, r: f64, rule: &ZonalRule) -> [f64; 3] {
    let h = 0.5 * p.n() as f64 + p.theta();
    let one_minus_r = 1.0 - r;
    let ln_w = (one_minus_r * (1.0 + r)).ln();
    let mut i2 = 0.0;
    let mut i3 = 0.0;
    let mut i4 = 0.0;
    for (z, w) in rule.iter() {
        let ln_d2 = (one_minus_r * one_minus_r + 2.0 * r * z.gap).ln();
        let dist = (2.0 * z.gap).sqrt();
        let near = (2.0 * p.theta() * ln_w - h * ln_d2).exp();
        let far = ((1.0 + 2.0 * p.theta()) * ln_w - (h + 1.0) * ln_d2).exp();
        i2 += w * near * dist;
        i3 += w * far * dist * dist;
        i4 += w * far * dist * one_minus_r;
    }
    [i2, i3, i4]
}

pub fn gradient_majorants(
    p: &ThetaParams,
    profile: Profile,
    axis: SpherePoint,
    radii: &[f64],
    rules: &Arc<RuleFactory>,
) -> Result<MajorantReport> {
    let phi = BoundaryFunction::zonal(profile, axis);
    let lip = phi
        .lipschitz_constant()
        .ok_or_else(|| Error::domain("majorants need boundary data with a Lipschitz constant"))?;
    let n = p.n();
    let phi_e1 = phi.eval(&SpherePoint::e1(n)).abs();
    let field = SolutionField::new(*p, phi, Arc::clone(rules))?;
    let half = 0.5 * n as f64;
    let c = p.c_norm();
    let h2 = n as f64 + 2.0 * p.theta();

    let mut out = MajorantReport {
        radii: radii.to_vec(),
        tangential: vec![],
        tangential_bound: vec![],
        radial: vec![],
        radial_bound: vec![],
        terms: vec![],
    };
    for &r in radii {
        let g = field.solution_gradient(&BallPoint::on_axis(n, r)?)?;
        let [i2, i3, i4] = majorant_terms(p, r, &*rules.zonal(n, r)?);
        let mass = hyp2f1(&HypParams::new(1.0 - p.theta(), half - p.theta(), half + 1.0, r * r)?, 1e-15)?.value;
        let i1 = phi_e1 * (p.c_grad() * mass * r).abs();
        out.tangential.push(g[1..].iter().fold(0.0, |m, v| m.max(v.abs())));
        out.tangential_bound.push(lip * h2 * c * i3);
        out.radial.push(g[0].abs());
        out.radial_bound.push(i1 + lip * (2.0 * (1.0 + 2.0 * p.theta()) * c * i2 + h2 * c * (i3 + i4)));
        out.terms.push([i1, i2, i3, i4]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::RuleConfig;

    #[test]
    fn blowup_radii_shape() {
        let r = blowup_radii();
        assert_eq!(r.len(), 9);
        assert!((r[0] - 0.9999).abs() < 1e-15);
        assert!((1.0 - r[8] - 1e-8).abs() < 1e-8 * 1e-7);
        assert!(r.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn singular_integral_at_origin_is_mean_of_distance_power() {
        let rules = RuleFactory::new(RuleConfig::default());
        // r = 0: |ζ| = 1 so I = ∫ |ζ-e₁|^q; for q = 2 that is 2
        let v = singular_integral(3, 3.0, 2.0, 0.0, &rules.zonal(3, 0.0).unwrap());
        assert!((v - 2.0).abs() < 1e-13);
        assert!(verify_singular_integral_bound(3, 1.0, 1.0, &SCAN_RADII, &rules).is_err());
    }

    #[test]
    fn directions_span_half_circle() {
        let d = default_directions(3, 9);
        assert_eq!(d.len(), 9);
        assert_eq!(d[0], SpherePoint::e1(3));
        assert!((d[8].coords()[0] + 1.0).abs() < 1e-15);
        assert!((d[4].coords()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn blowup_rejects_nonnegative_theta() {
        let rules = Arc::new(RuleFactory::new(RuleConfig::default()));
        let p = ThetaParams::new(3, 0.5).unwrap();
        assert!(blowup_exponent_fit(&p, &blowup_radii(), &rules).is_err());
        let p = ThetaParams::new(3, -0.25).unwrap();
        assert!(blowup_exponent_fit(&p, &[0.5, 0.9], &rules).is_err());
    }

    #[test]
    fn constant_scan_vanishes_in_hyperbolic_case() {
        let rules = Arc::new(RuleFactory::new(RuleConfig::default()));
        let p = ThetaParams::new(4, 1.0).unwrap();
        let s = SolutionField::new(p, BoundaryFunction::constant(4, 1.0), rules).unwrap();
        let f = lipschitz_scan(&s, &[0.9, 0.99], &default_directions(4, 3)).unwrap();
        assert_eq!(f.slope, 0.0);
        assert!(f.values.iter().all(|v| *v < 1e-9));
    }
}
