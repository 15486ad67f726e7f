//! Identity checks: kernel masses, the `n = 3` closed form, and the PDE residual.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use crate::error::Result;
use crate::kernel::{apply_delta_theta, default_step, AxialKernel, BallPoint, ThetaParams};
use crate::quadrature::{RuleFactory, SliceRule, ZonalRule};
use crate::solver::{BoundaryFunction, SolutionField};
use crate::specfun::{hyp2f1, hyp2f1_at_one, HypParams};

use super::{CheckResult, Comparison};

const SERIES_TOL: f64 = 1e-15;

fn f21(a: f64, b: f64, c: f64, lambda: f64) -> Result<f64> {
    Ok(hyp2f1(&HypParams::new(a, b, c, lambda)?, SERIES_TOL)?.value)
}

fn base_params(p: &ThetaParams, r: f64) -> Value {
    json!({ "n": p.n(), "theta": p.theta(), "r": r })
}

/// `∫ P_θ(re₁, ζ) dσ` by quadrature against `c_{n,θ} 2F1(-θ, n/2-1-θ; n/2; r²)`.
pub fn verify_mass_identity(p: &ThetaParams, r: f64, rule: &ZonalRule, tol: f64) -> Result<CheckResult> {
    let half = 0.5 * p.n() as f64;
    let kernel = AxialKernel::new(p, r);
    let observed: f64 = rule.iter().map(|(z, w)| w * kernel.value(z.gap)).sum();
    let expected = p.c_norm() * f21(-p.theta(), half - 1.0 - p.theta(), half, r * r)?;
    Ok(CheckResult::new("mass_identity", base_params(p, r), observed, expected, tol, Comparison::Relative))
}

#[derive(Debug, Clone)]
pub struct GradientMassChecks {
    pub radial: CheckResult,
    pub tangential: CheckResult,
}

/// `∫ ∂₁P_θ(re₁, ζ) dσ` against `C(n,θ) 2F1(1-θ, n/2-θ; n/2+1; r²) r`, and
/// `∫ ∂_k P_θ(re₁, ζ) dσ = 0` for `k >= 2` under the product of the zonal and slice rules.
pub fn verify_gradient_mass_identity(
    p: &ThetaParams,
    r: f64,
    rule: &ZonalRule,
    slice: &SliceRule,
    tol: f64,
    tangential_tol: f64,
) -> Result<GradientMassChecks> {
    let half = 0.5 * p.n() as f64;
    let kernel = AxialKernel::new(p, r);
    let mut radial = 0.0;
    let mut tangential_radius = 0.0;
    for (z, w) in rule.iter() {
        let (_, rad, tan) = kernel.all(z.gap);
        radial += w * rad;
        tangential_radius += w * tan * z.sin;
    }
    let slice_mean: f64 = slice.iter().map(|(s, mu)| mu * s).sum();
    let tangential = tangential_radius * slice_mean;

    let expected = p.c_grad() * f21(1.0 - p.theta(), half - p.theta(), half + 1.0, r * r)? * r;
    let params = base_params(p, r);
    let radial = if expected == 0.0 {
        CheckResult::new("gradient_mass_identity", params.clone(), radial, 0.0, tol, Comparison::Absolute)
    } else {
        CheckResult::new("gradient_mass_identity", params.clone(), radial, expected, tol, Comparison::Relative)
    };
    let tangential = CheckResult::new("tangential_vanishing", params, tangential, 0.0, tangential_tol, Comparison::Absolute);
    Ok(GradientMassChecks { radial, tangential })
}

/// `Σ_j |(a)_j (b)_j / ((c)_j j!)|` for `c - a - b > 0`: the leading coefficients
/// whose signs may vary, plus the constant-sign tail from the Gauss sum.
fn absolute_coefficient_sum(a: f64, b: f64, c: f64) -> Result<f64> {
    let mut coef: f64 = 1.0;
    let mut signed = 0.0;
    let mut absolute = 0.0;
    let mut j = 0usize;
    loop {
        let jf = j as f64;
        if coef == 0.0 {
            return Ok(absolute);
        }
        if a + jf > 0.0 && b + jf > 0.0 {
            break;
        }
        signed += coef;
        absolute += coef.abs();
        coef *= (a + jf) * (b + jf) / ((c + jf) * (jf + 1.0));
        j += 1;
    }
    Ok(absolute + (hyp2f1_at_one(a, b, c)? - signed).abs())
}

/// For `θ > 0`, `max_r |C(n,θ) 2F1(1-θ, n/2-θ; n/2+1; r²) r|` stays below
/// `|C(n,θ)| Σ_j |coef_j|`, the bound from absolute summability at `λ = 1`.
pub fn verify_bounded_gradient_mass(p: &ThetaParams, radii: &[f64], tol: f64) -> Result<CheckResult> {
    let half = 0.5 * p.n() as f64;
    let (a, b, c) = (1.0 - p.theta(), half - p.theta(), half + 1.0);
    let params = json!({ "n": p.n(), "theta": p.theta(), "radii": radii });
    if !(p.theta() > 0.0) {
        return Ok(CheckResult::skipped("bounded_gradient_mass", params, "requires theta > 0"));
    }
    let mut values = Vec::with_capacity(radii.len());
    for &r in radii {
        values.push((p.c_grad() * f21(a, b, c, r * r)? * r).abs());
    }
    let observed = values.iter().copied().fold(0.0, f64::max);
    let bound = p.c_grad().abs() * absolute_coefficient_sum(a, b, c)?;
    let mut check = CheckResult::new("bounded_gradient_mass", params, observed, bound, tol * bound.max(1.0), Comparison::AtMost);
    if let (Some(first), Some(last)) = (values.first(), values.last()) {
        if *first > 0.0 {
            check = check.with_note(format!("growth from first to last radius: {:.6}", last / first));
        }
    }
    Ok(check)
}

/// `P_θ[1](re₁)` for `n = 3`: `2^{-1-2θ} [(1+r)^{1+2θ} - (1-r)^{1+2θ}] / r`.
pub fn n3_closed_form(theta: f64, r: f64) -> f64 {
    let k = 1.0 + 2.0 * theta;
    if r == 0.0 {
        return k * (-2.0 * theta * std::f64::consts::LN_2).exp();
    }
    let scale = (-k * std::f64::consts::LN_2).exp();
    scale * ((k * r.ln_1p()).exp() - (k * (-r).ln_1p()).exp()) / r
}

/// `r d/dr` of [`n3_closed_form`].
pub fn n3_closed_form_radial_derivative(theta: f64, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let k = 1.0 + 2.0 * theta;
    let scale = (-k * std::f64::consts::LN_2).exp();
    let plus = (2.0 * theta * r.ln_1p()).exp();
    let minus = (2.0 * theta * (-r).ln_1p()).exp();
    scale * k * (plus + minus) - n3_closed_form(theta, r)
}

/// Solver output for `φ ≡ 1`, `n = 3` against the closed form, and the closed form
/// against `c_{3,θ} 2F1(-θ, 1/2-θ; 3/2; r²)`. Both report the largest relative deviation.
pub fn verify_n3_closed_form(
    theta: f64,
    radii: &[f64],
    rules: &std::sync::Arc<RuleFactory>,
    tol: f64,
    series_tol: f64,
) -> Result<(CheckResult, CheckResult)> {
    let p = ThetaParams::new(3, theta)?;
    let field = SolutionField::new(p, BoundaryFunction::constant(3, 1.0), std::sync::Arc::clone(rules))?;
    let mut solver_dev: f64 = 0.0;
    let mut series_dev: f64 = 0.0;
    for &r in radii {
        let closed = n3_closed_form(theta, r);
        let u = field.poisson_integral(&BallPoint::on_axis(3, r)?)?;
        let series = p.c_norm() * f21(-theta, 0.5 - theta, 1.5, r * r)?;
        solver_dev = solver_dev.max((u - closed).abs() / closed.abs());
        series_dev = series_dev.max((series - closed).abs() / closed.abs());
    }
    let params = json!({ "n": 3, "theta": theta, "radii": radii });
    Ok((
        CheckResult::new("n3_closed_form", params.clone(), solver_dev, 0.0, tol, Comparison::Absolute)
            .with_note("max relative deviation of the solver from the closed form"),
        CheckResult::new("n3_hypergeometric", params, series_dev, 0.0, series_tol, Comparison::Absolute)
            .with_note("max relative deviation of c*2F1(-theta,1/2-theta;3/2;r^2) from the closed form"),
    ))
}

/// `count` points uniform in the ball of radius `max_radius`.
pub fn random_ball_points(n: usize, count: usize, max_radius: f64, seed: u64) -> Result<Vec<BallPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let len = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if len == 0.0 {
            continue;
        }
        let radius = max_radius * rng.random::<f64>().powf(1.0 / n as f64);
        out.push(BallPoint::new(v.iter().map(|c| c / len * radius).collect())?);
    }
    Ok(out)
}

/// `max |Δ_θ u(x)| / (1 + |u(x)|)` over `points`, with the default stencil step unless `h` is given.
pub fn verify_pde_residual<F>(
    name: &str,
    params: Value,
    p: &ThetaParams,
    u: F,
    points: &[BallPoint],
    h: Option<f64>,
    tol: f64,
) -> Result<CheckResult>
where
    F: Fn(&BallPoint) -> Result<f64>,
{
    let mut worst: f64 = 0.0;
    for x in points {
        let step = h.unwrap_or_else(|| default_step(x));
        let lu = apply_delta_theta(p, &u, x, step)?;
        let ux = u(x)?;
        worst = worst.max(lu.abs() / (1.0 + ux.abs()));
    }
    Ok(CheckResult::new(name, params, worst, 0.0, tol, Comparison::Absolute))
}

/// [`verify_pde_residual`] for a quadrature-built solution.
pub fn verify_pde_residual_field(s: &SolutionField, points: &[BallPoint], h: Option<f64>, tol: f64) -> Result<CheckResult> {
    let p = *s.params();
    let params = json!({ "n": p.n(), "theta": p.theta(), "phi": s.phi().name(), "points": points.len() });
    verify_pde_residual("pde_residual", params, &p, |x| s.poisson_integral(x), points, h, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{build_slice_rule, RuleConfig};

    #[test]
    fn closed_form_values() {
        assert!((n3_closed_form(1.0, 0.5) - 0.8125).abs() < 1e-15);
        for &r in &[0.0, 0.3, 0.9] {
            assert!((n3_closed_form(0.0, r) - 1.0).abs() < 1e-15);
        }
        let p = ThetaParams::new(3, 0.3).unwrap();
        assert!((n3_closed_form(0.3, 0.0) - p.c_norm()).abs() < 1e-14);
        assert!((n3_closed_form(0.3, 1e-6) - p.c_norm()).abs() < 1e-9);
    }

    #[test]
    fn closed_form_derivative_matches_difference_quotient() {
        for &(theta, r) in &[(-0.4, 0.5), (0.5, 0.8), (1.0, 0.2)] {
            let h = 1e-6;
            let fd = r * (n3_closed_form(theta, r + h) - n3_closed_form(theta, r - h)) / (2.0 * h);
            let d = n3_closed_form_radial_derivative(theta, r);
            assert!((fd - d).abs() < 1e-7 * d.abs().max(1.0), "theta={theta}");
        }
    }

    #[test]
    fn trivial_identity_cases() {
        let rules = RuleFactory::new(RuleConfig::default());
        let p = ThetaParams::new(4, 0.0).unwrap();
        let rule = rules.zonal(4, 0.7).unwrap();
        let c = verify_mass_identity(&p, 0.7, &rule, 1e-10).unwrap();
        assert!(c.passed && (c.expected - 1.0).abs() < 1e-15);
        let p = ThetaParams::new(3, 1.0).unwrap();
        let c = verify_mass_identity(&p, 0.5, &rules.zonal(3, 0.5).unwrap(), 1e-10).unwrap();
        assert!(c.passed && (c.expected - 0.8125).abs() < 1e-14);
        let p = ThetaParams::new(2, 1.0).unwrap();
        let slice = build_slice_rule(2, 2).unwrap();
        let g = verify_gradient_mass_identity(&p, 0.5, &rules.zonal(2, 0.5).unwrap(), &slice, 1e-9, 1e-12).unwrap();
        assert!(g.radial.passed && g.tangential.passed);
        assert!((g.radial.expected - 2.0 * p.c_norm() * 0.5).abs() < 1e-14);
    }

    #[test]
    fn coefficient_sum_cases() {
        // all coefficients positive: Σ|c_j| is the Gauss sum
        let s = absolute_coefficient_sum(0.5, 1.0, 2.0).unwrap();
        assert!((s - hyp2f1_at_one(0.5, 1.0, 2.0).unwrap()).abs() < 1e-14);
        // 2F1(-0.5, 1; 2; 1) = Γ(2)Γ(1.5)/(Γ(2.5)Γ(1)) = 2/3; coefficients 1, -1/4, -1/24, ...
        let s = absolute_coefficient_sum(-0.5, 1.0, 2.0).unwrap();
        assert!((s - (1.0 + (1.0 - 2.0 / 3.0))).abs() < 1e-13);
        // terminating
        assert!((absolute_coefficient_sum(-1.0, 1.0, 2.0).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn pde_residual_of_closed_form() {
        let p = ThetaParams::new(3, 1.0).unwrap();
        let pts = random_ball_points(3, 10, 0.7, 3).unwrap();
        assert!(pts.iter().all(|x| x.r() <= 0.7));
        let c = verify_pde_residual("closed", json!({}), &p, |x| Ok(n3_closed_form(1.0, x.r())), &pts, None, 1e-4).unwrap();
        assert!(c.passed, "{}", c.observed);
    }
}
