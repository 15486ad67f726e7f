//! Verification checks with declared tolerances, log-log exponent fits, and a
//! suite runner that emits one JSON record per check.

mod identities;
mod rates;
mod suite;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use identities::{
    n3_closed_form, n3_closed_form_radial_derivative, random_ball_points, verify_bounded_gradient_mass,
    verify_gradient_mass_identity, verify_mass_identity, verify_n3_closed_form, verify_pde_residual,
    verify_pde_residual_field, GradientMassChecks,
};
pub use rates::{
    blowup_exponent_fit, blowup_radii, default_directions, gradient_majorants, gradient_table, lipschitz_scan, singular_integral,
    verify_singular_integral_bound, MajorantReport, SCAN_RADII,
};
pub(crate) use suite::csv_err;
pub use suite::{
    default_grid, run_suite, write_report, Header, ReportFormat, SuiteConfig, Tolerances, KNOWN_CHECKS,
};

/// How `observed` is compared with `expected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|observed - expected| <= tolerance * |expected|`
    Relative,
    /// `|observed - expected| <= tolerance`
    Absolute,
    /// `observed <= expected + tolerance`
    AtMost,
    /// Not evaluated; recorded as passing with a note.
    Skipped,
}

impl Comparison {
    pub fn holds(&self, observed: f64, expected: f64, tolerance: f64) -> bool {
        match self {
            Comparison::Relative => (observed - expected).abs() <= tolerance * expected.abs(),
            Comparison::Absolute => (observed - expected).abs() <= tolerance,
            Comparison::AtMost => observed <= expected + tolerance,
            Comparison::Skipped => true,
        }
    }
}

/// One verified claim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub params: Value,
    #[serde(deserialize_with = "nan_from_null")]
    pub observed: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub expected: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitReport>,
}

impl CheckResult {
    /// `passed` is derived from the comparison; non-finite observations fail.
    pub fn new(name: &str, params: Value, observed: f64, expected: f64, tolerance: f64, comparison: Comparison) -> Self {
        let passed = comparison == Comparison::Skipped
            || (observed.is_finite() && expected.is_finite() && comparison.holds(observed, expected, tolerance));
        Self { name: name.into(), params, observed, expected, tolerance, comparison, passed, note: None, fit: None }
    }

    pub fn skipped(name: &str, params: Value, note: &str) -> Self {
        let mut c = Self::new(name, params, f64::NAN, f64::NAN, 0.0, Comparison::Skipped);
        c.note = Some(note.into());
        c
    }

    /// A failed record for a check that could not be evaluated.
    pub fn errored(name: &str, params: Value, err: &Error) -> Self {
        let mut c = Self::new(name, params, f64::NAN, f64::NAN, 0.0, Comparison::Absolute);
        c.note = Some(format!("error: {err}"));
        c
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_fit(mut self, fit: FitReport) -> Self {
        self.fit = Some(fit);
        self
    }
}

/// JSON has no NaN; it is written as `null`.
fn nan_from_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// Least-squares line through `(ln g(r_i), ln v_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual in log space.
    pub max_residual: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl FitReport {
    /// Fits `ln values` against `ln abscissa(r)`.
    pub fn fit<G: Fn(f64) -> f64>(radii: &[f64], values: &[f64], abscissa: G) -> Result<Self> {
        if radii.len() < 2 || radii.len() != values.len() {
            return Err(Error::domain(format!("fit needs matching samples (got {} radii, {} values)", radii.len(), values.len())));
        }
        if radii.windows(2).any(|w| !(w[0] < w[1])) || radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
            return Err(Error::domain("fit radii must be strictly increasing in (0, 1)"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::domain(format!("fit values must be finite and positive, got {v}")));
        }
        let xs: Vec<f64> = radii.iter().map(|&r| abscissa(r).ln()).collect();
        let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        let (slope, intercept) = least_squares(&xs, &ys);
        let max_residual = xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).abs()).fold(0.0, f64::max);
        Ok(Self { slope, intercept, max_residual, radii: radii.to_vec(), values: values.to_vec() })
    }
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn fit_recovers_power_law() {
        let radii = [0.9, 0.99, 0.999];
        let values: Vec<f64> = radii.iter().map(|r: &f64| 3.0 * (1.0 - r).powf(-0.7)).collect();
        let f = FitReport::fit(&radii, &values, |r| 1.0 - r).unwrap();
        assert!((f.slope + 0.7).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.max_residual < 1e-12);
    }

    #[test]
    fn fit_rejects_bad_samples() {
        assert!(FitReport::fit(&[0.9, 0.8], &[1.0, 2.0], |r| r).is_err());
        assert!(FitReport::fit(&[0.8, 0.9], &[1.0, -2.0], |r| r).is_err());
        assert!(FitReport::fit(&[0.8, 1.0], &[1.0, 2.0], |r| r).is_err());
        assert!(FitReport::fit(&[0.8], &[1.0], |r| r).is_err());
    }

    #[test]
    fn comparisons() {
        let p = json!({});
        assert!(CheckResult::new("a", p.clone(), 1.0 + 1e-9, 1.0, 1e-8, Comparison::Relative).passed);
        assert!(!CheckResult::new("a", p.clone(), 1.1, 1.0, 1e-8, Comparison::Relative).passed);
        assert!(CheckResult::new("a", p.clone(), 0.9, 1.0, 0.0, Comparison::AtMost).passed);
        assert!(!CheckResult::new("a", p.clone(), f64::NAN, 1.0, 1.0, Comparison::Absolute).passed);
        assert!(CheckResult::skipped("a", p, "n/a").passed);
    }

    #[test]
    fn skipped_record_round_trips() {
        let c = CheckResult::skipped("a", json!({"n": 2}), "n/a");
        let back: CheckResult = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert!(back.observed.is_nan() && back.passed);
        assert_eq!(back.note, c.note);
    }
}
