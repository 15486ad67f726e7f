//! The default verification suite and its report writer.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::kernel::{SpherePoint, ThetaParams};
use crate::quadrature::{RuleConfig, RuleFactory};
use crate::solver::{BoundaryFunction, Profile, SolutionField};

use super::identities::{
    n3_closed_form, n3_closed_form_radial_derivative, random_ball_points, verify_bounded_gradient_mass,
    verify_gradient_mass_identity, verify_mass_identity, verify_n3_closed_form, verify_pde_residual,
    verify_pde_residual_field,
};
use super::rates::{
    blowup_exponent_fit, blowup_radii, default_directions, gradient_majorants, lipschitz_scan,
    verify_singular_integral_bound, SCAN_RADII,
};
use super::{CheckResult, Comparison, FitReport};

/// Check names accepted by [`Tolerances::set`], with their defaults.
pub const KNOWN_CHECKS: &[(&str, f64)] = &[
    ("mass_identity", 1e-8),
    ("gradient_mass_identity", 1e-7),
    ("tangential_vanishing", 1e-9),
    ("bounded_gradient_mass", 1e-12),
    ("blowup_fit", 0.05),
    ("blowup_closed_form", 1e-6),
    ("blowup_monotone", 0.0),
    ("singular_integral", 0.05),
    ("n3_closed_form", 1e-9),
    ("n3_hypergeometric", 1e-9),
    ("pde_residual", 1e-3),
    ("pde_residual_closed_form", 1e-4),
    ("lipschitz_scan", 0.05),
    ("case1_majorant", 1e-9),
    ("case2_majorant", 1e-9),
    ("fit_stability", 0.01),
];

/// Per-check tolerances, keyed by check name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Self(KNOWN_CHECKS.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0.get(name).copied().unwrap_or_else(|| panic!("no tolerance for check `{name}`"))
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !KNOWN_CHECKS.iter().any(|(k, _)| *k == name) {
            let names: Vec<&str> = KNOWN_CHECKS.iter().map(|(k, _)| *k).collect();
            return Err(Error::Config(format!("unknown check `{name}` (known: {})", names.join(", "))));
        }
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::Config(format!("tolerance for `{name}` must be a finite non-negative number")));
        }
        self.0.insert(name.to_string(), value);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &f64)> {
        self.0.iter()
    }
}

/// `n ∈ ns` × `θ ∈ {-0.4, -0.1, 0.5, 1, (n-2)/2}` without duplicates.
pub fn default_grid(ns: &[usize]) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for &n in ns {
        let mut thetas = vec![-0.4, -0.1, 0.5, 1.0];
        let hyperbolic = 0.5 * n as f64 - 1.0;
        if !thetas.contains(&hyperbolic) {
            thetas.push(hyperbolic);
        }
        out.extend(thetas.into_iter().map(|t| (n, t)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// `(n, θ)` pairs for the identity, blow-up and PDE checks.
    pub grid: Vec<(usize, f64)>,
    /// Radii for the mass identities.
    pub identity_radii: Vec<f64>,
    /// `(n, θ)` pairs with `θ > 0` for sup-gradient scans and majorants.
    pub scan_grid: Vec<(usize, f64)>,
    /// Dimensions for the singular-integral fits.
    pub singular_dims: Vec<usize>,
    /// θ values for the `n = 3` closed-form checks.
    pub closed_form_thetas: Vec<f64>,
    /// `(n, θ)` pairs, `θ < 0`, with extra blow-up fits and the monotonicity check.
    pub blowup_grid: Vec<(usize, f64)>,
    pub pde_points: usize,
    pub seed: u64,
    pub rules: RuleConfig,
    pub tolerances: Tolerances,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let mut scan_grid = Vec::new();
        for n in [2usize, 3, 4] {
            let mut thetas = vec![0.25, 0.5];
            let hyperbolic = 0.5 * n as f64 - 1.0;
            if hyperbolic > 0.0 && !thetas.contains(&hyperbolic) {
                thetas.push(hyperbolic);
            }
            scan_grid.extend(thetas.into_iter().map(|t| (n, t)));
        }
        let blowup_grid = [2usize, 3].iter().flat_map(|&n| [-0.4, -0.25, -0.1].map(|t| (n, t))).collect();
        Self {
            grid: default_grid(&[2, 3, 4, 5]),
            identity_radii: vec![0.0, 0.3, 0.7, 0.95],
            scan_grid,
            singular_dims: vec![2, 3],
            closed_form_thetas: vec![-0.4, -0.25, 0.5, 1.0],
            blowup_grid,
            pde_points: 50,
            seed: RuleConfig::default().seed,
            rules: RuleConfig::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl SuiteConfig {
    /// The suite restricted to one `(n, θ)`.
    pub fn single(n: usize, theta: f64) -> Self {
        let d = Self::default();
        Self {
            grid: vec![(n, theta)],
            scan_grid: if theta > 0.0 { vec![(n, theta)] } else { vec![] },
            singular_dims: vec![n],
            closed_form_thetas: if n == 3 { vec![theta] } else { vec![] },
            blowup_grid: vec![],
            ..d
        }
    }
}

#[derive(Debug, Clone)]
enum Job {
    Identities { n: usize, theta: f64 },
    Blowup { n: usize, theta: f64 },
    BlowupMonotone { n: usize, thetas: Vec<f64> },
    PdeResidual { n: usize, theta: f64 },
    ClosedForm { theta: f64 },
    ClosedFormPde { theta: f64 },
    Singular { n: usize, p: f64, q: f64 },
    Scan { n: usize, theta: f64, profile: usize },
    Majorants { n: usize, theta: f64, profile: usize },
}

const PROFILES: [&str; 3] = ["coordinate", "distance", "clamped"];

fn profile(i: usize) -> Profile {
    match i {
        0 => Profile::Coordinate,
        1 => Profile::Distance,
        _ => Profile::Clamped,
    }
}

/// Axis used for the majorant checks, off `e₁` so that tangential components are non-trivial.
fn tilted_axis(n: usize) -> SpherePoint {
    let mut c = vec![0.0; n];
    c[0] = 0.7f64.cos();
    c[1] = 0.7f64.sin();
    SpherePoint::from_direction(&c).expect("unit vector")
}

struct Context<'a> {
    cfg: &'a SuiteConfig,
    rules: Arc<RuleFactory>,
    doubled: Arc<RuleFactory>,
}

fn jobs(cfg: &SuiteConfig) -> Vec<Job> {
    let mut out = Vec::new();
    for &(n, theta) in &cfg.grid {
        out.push(Job::Identities { n, theta });
        out.push(Job::Blowup { n, theta });
        out.push(Job::PdeResidual { n, theta });
    }
    for &(n, theta) in &cfg.blowup_grid {
        if !cfg.grid.contains(&(n, theta)) {
            out.push(Job::Blowup { n, theta });
        }
    }
    let mut blowup_dims: Vec<usize> = cfg.blowup_grid.iter().map(|g| g.0).collect();
    blowup_dims.dedup();
    for n in blowup_dims {
        let thetas: Vec<f64> = cfg.blowup_grid.iter().filter(|g| g.0 == n).map(|g| g.1).collect();
        if thetas.len() > 1 {
            out.push(Job::BlowupMonotone { n, thetas });
        }
    }
    for &theta in &cfg.closed_form_thetas {
        out.push(Job::ClosedForm { theta });
        out.push(Job::ClosedFormPde { theta });
    }
    for &n in &cfg.singular_dims {
        for (p, q) in [(1.0, 0.0), (2.0, 1.0), (1.0, 0.5)] {
            out.push(Job::Singular { n, p, q });
        }
    }
    for &(n, theta) in &cfg.scan_grid {
        for profile in 0..PROFILES.len() {
            out.push(Job::Scan { n, theta, profile });
            out.push(Job::Majorants { n, theta, profile });
        }
    }
    out
}

fn params_of(n: usize, theta: f64) -> serde_json::Value {
    json!({ "n": n, "theta": theta })
}

fn stability(name: &str, params: serde_json::Value, a: &FitReport, b: &FitReport, tol: f64) -> CheckResult {
    CheckResult::new("fit_stability", params, b.slope, a.slope, tol, Comparison::Absolute)
        .with_note(format!("{name}: slope with every rule size doubled"))
}

fn run_job(job: &Job, ctx: &Context) -> Vec<CheckResult> {
    let tol = &ctx.cfg.tolerances;
    let (name, params) = match job {
        Job::Identities { n, theta } => ("identities", params_of(*n, *theta)),
        Job::Blowup { n, theta } => ("blowup_fit", params_of(*n, *theta)),
        Job::BlowupMonotone { n, .. } => ("blowup_monotone", json!({ "n": n })),
        Job::PdeResidual { n, theta } => ("pde_residual", params_of(*n, *theta)),
        Job::ClosedForm { theta } => ("n3_closed_form", params_of(3, *theta)),
        Job::ClosedFormPde { theta } => ("pde_residual_closed_form", params_of(3, *theta)),
        Job::Singular { n, p, q } => ("singular_integral", json!({ "n": n, "p": p, "q": q })),
        Job::Scan { n, theta, profile } => ("lipschitz_scan", json!({ "n": n, "theta": theta, "phi": PROFILES[*profile] })),
        Job::Majorants { n, theta, profile } => ("majorants", json!({ "n": n, "theta": theta, "phi": PROFILES[*profile] })),
    };
    let run = |params: serde_json::Value| -> Result<Vec<CheckResult>> {
        match job {
            Job::Identities { n, theta } => {
                let p = ThetaParams::new(*n, *theta)?;
                let slice = ctx.rules.slice(*n)?;
                let mut out = Vec::new();
                for &r in &ctx.cfg.identity_radii {
                    let rule = ctx.rules.zonal(*n, r)?;
                    out.push(verify_mass_identity(&p, r, &rule, tol.get("mass_identity"))?);
                    let g = verify_gradient_mass_identity(
                        &p,
                        r,
                        &rule,
                        &slice,
                        tol.get("gradient_mass_identity"),
                        tol.get("tangential_vanishing"),
                    )?;
                    out.push(g.radial);
                    out.push(g.tangential);
                }
                if *theta > 0.0 {
                    out.push(verify_bounded_gradient_mass(&p, &[0.9, 0.99, 0.999, 0.9999], tol.get("bounded_gradient_mass"))?);
                }
                Ok(out)
            }
            Job::Blowup { n, theta } => {
                if *theta > 0.0 {
                    return Ok(vec![]);
                }
                if *theta == 0.0 {
                    return Ok(vec![CheckResult::skipped(
                        "blowup_fit",
                        params,
                        "theta = 0: externally witnessed, no constructive counterexample here",
                    )]);
                }
                let p = ThetaParams::new(*n, *theta)?;
                let radii = blowup_radii();
                let fit = blowup_exponent_fit(&p, &radii, &ctx.rules)?;
                let mut out = vec![CheckResult::new(
                    "blowup_fit",
                    params.clone(),
                    fit.slope,
                    2.0 * theta,
                    tol.get("blowup_fit"),
                    Comparison::Absolute,
                )
                .with_note("slope of ln|r du/dr(r e1)| against ln(1-r^2), phi = 1")
                .with_fit(fit.clone())];
                if *n == 3 {
                    let dev = radii
                        .iter()
                        .zip(&fit.values)
                        .map(|(r, v)| {
                            let exact = n3_closed_form_radial_derivative(*theta, *r).abs();
                            (v - exact).abs() / exact
                        })
                        .fold(0.0, f64::max);
                    out.push(
                        CheckResult::new("blowup_closed_form", params.clone(), dev, 0.0, tol.get("blowup_closed_form"), Comparison::Absolute)
                            .with_note("max relative deviation from the differentiated closed form"),
                    );
                }
                let again = blowup_exponent_fit(&p, &radii, &ctx.doubled)?;
                out.push(stability("blowup_fit", params, &fit, &again, tol.get("fit_stability")));
                Ok(out)
            }
            Job::BlowupMonotone { n, thetas } => {
                let mut pairs = Vec::new();
                for &t in thetas {
                    let p = ThetaParams::new(*n, t)?;
                    pairs.push((t, blowup_exponent_fit(&p, &blowup_radii(), &ctx.rules)?.slope));
                }
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                let violations = pairs.windows(2).filter(|w| !(w[0].1 < w[1].1)).count();
                let slopes: Vec<String> = pairs.iter().map(|(t, s)| format!("{t}:{s:.4}")).collect();
                Ok(vec![CheckResult::new("blowup_monotone", params, violations as f64, 0.0, tol.get("blowup_monotone"), Comparison::AtMost)
                    .with_note(format!("slopes by theta {}", slopes.join(" ")))])
            }
            Job::PdeResidual { n, theta } => {
                let p = ThetaParams::new(*n, *theta)?;
                let field = SolutionField::new(p, BoundaryFunction::coordinate(*n), Arc::clone(&ctx.rules))?;
                let pts = random_ball_points(*n, ctx.cfg.pde_points, 0.7, ctx.cfg.seed.wrapping_add(*n as u64))?;
                Ok(vec![verify_pde_residual_field(&field, &pts, None, tol.get("pde_residual"))?])
            }
            Job::ClosedForm { theta } => {
                let radii: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
                let (a, b) =
                    verify_n3_closed_form(*theta, &radii, &ctx.rules, tol.get("n3_closed_form"), tol.get("n3_hypergeometric"))?;
                Ok(vec![a, b])
            }
            Job::ClosedFormPde { theta } => {
                let p = ThetaParams::new(3, *theta)?;
                let pts = random_ball_points(3, ctx.cfg.pde_points, 0.7, ctx.cfg.seed.wrapping_add(33))?;
                let t = *theta;
                Ok(vec![verify_pde_residual(
                    "pde_residual_closed_form",
                    params,
                    &p,
                    |x| Ok(n3_closed_form(t, x.r())),
                    &pts,
                    None,
                    tol.get("pde_residual_closed_form"),
                )?])
            }
            Job::Singular { n, p, q } => {
                let fit = verify_singular_integral_bound(*n, *p, *q, &SCAN_RADII, &ctx.rules)?;
                let again = verify_singular_integral_bound(*n, *p, *q, &SCAN_RADII, &ctx.doubled)?;
                Ok(vec![
                    CheckResult::new("singular_integral", params.clone(), fit.slope, p - q, tol.get("singular_integral"), Comparison::AtMost)
                        .with_note("slope of ln I(r) against ln 1/(1-r)")
                        .with_fit(fit.clone()),
                    stability("singular_integral", params, &fit, &again, tol.get("fit_stability")),
                ])
            }
            Job::Scan { n, theta, profile: i } => {
                let p = ThetaParams::new(*n, *theta)?;
                let phi = BoundaryFunction::zonal(profile(*i), SpherePoint::e1(*n));
                let lip = phi.lipschitz_constant().unwrap_or(1.0);
                let field = SolutionField::new(p, phi, Arc::clone(&ctx.rules))?;
                let dirs = default_directions(*n, 9);
                let fit = lipschitz_scan(&field, &SCAN_RADII, &dirs)?;
                let sup = fit.values.iter().copied().fold(0.0, f64::max);
                let mut out = vec![CheckResult::new("lipschitz_scan", params.clone(), fit.slope, 0.0, tol.get("lipschitz_scan"), Comparison::Absolute)
                    .with_note(format!("slope of ln sup|grad u| against ln(1-r); max sup|grad u| / L = {:.6}", sup / lip))
                    .with_fit(fit.clone())];
                if *i == 0 {
                    let doubled = SolutionField::new(p, field.phi().clone(), Arc::clone(&ctx.doubled))?;
                    let again = lipschitz_scan(&doubled, &SCAN_RADII, &dirs)?;
                    out.push(stability("lipschitz_scan", params, &fit, &again, tol.get("fit_stability")));
                }
                Ok(out)
            }
            Job::Majorants { n, theta, profile: i } => {
                let p = ThetaParams::new(*n, *theta)?;
                let rep = gradient_majorants(&p, profile(*i), tilted_axis(*n), &SCAN_RADII, &ctx.rules)?;
                let (t_ratio, r_ratio) = rep.worst_ratios();
                let finite = rep.terms.iter().flatten().all(|v| v.is_finite());
                let largest = rep.terms.iter().fold([0.0f64; 4], |m, t| [m[0].max(t[0]), m[1].max(t[1]), m[2].max(t[2]), m[3].max(t[3])]);
                let terms_note = format!("max I1..I4 over radii: {:.6e} {:.6e} {:.6e} {:.6e}", largest[0], largest[1], largest[2], largest[3]);
                let mut case1 = CheckResult::new("case1_majorant", params.clone(), t_ratio, 1.0, tol.get("case1_majorant"), Comparison::AtMost)
                    .with_note("max over radii of |d_k u(r e1)| (k >= 2) / L(n+2theta)c I3");
                let mut case2 = CheckResult::new("case2_majorant", params, r_ratio, 1.0, tol.get("case2_majorant"), Comparison::AtMost)
                    .with_note(format!("max over radii of |d_1 u(r e1)| / (I1 + L[...]); {terms_note}"));
                case1.passed &= finite;
                case2.passed &= finite;
                Ok(vec![case1, case2])
            }
        }
    };
    run(params.clone()).unwrap_or_else(|e| vec![CheckResult::errored(name, params, &e)])
}

/// Runs every check of `cfg` (concurrently, in the current rayon pool) and
/// returns the results in a fixed order.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let ctx = Context {
        cfg,
        rules: Arc::new(RuleFactory::new(cfg.rules.clone())),
        doubled: Arc::new(RuleFactory::new(cfg.rules.doubled())),
    };
    let jobs = jobs(cfg);
    let results: Vec<Vec<CheckResult>> = jobs.par_iter().map(|j| run_job(j, &ctx)).collect();
    results.into_iter().flatten().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Report,
}

/// Provenance written at the top of every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub params: serde_json::Value,
    pub rules: serde_json::Value,
    pub seed: u64,
}

impl Header {
    pub fn new(command: &str, params: serde_json::Value, rules: &RuleConfig, rule_kinds: &str) -> Self {
        let mut sizes = serde_json::to_value(rules).expect("rule config serializes");
        sizes["kinds"] = json!(rule_kinds);
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            params,
            rules: sizes,
            seed: rules.seed,
        }
    }

    /// `# key: value` lines.
    pub fn write_comment<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "# tool: {} {}", self.tool, self.version)?;
        writeln!(out, "# command: {}", self.command)?;
        writeln!(out, "# params: {}", self.params)?;
        writeln!(out, "# rules: {}", self.rules)?;
        writeln!(out, "# seed: {}", self.seed)?;
        Ok(())
    }
}

/// Writes the header and one record per check.
pub fn write_report<W: Write>(results: &[CheckResult], header: &Header, format: ReportFormat, mut out: W) -> Result<()> {
    match format {
        ReportFormat::Report => {
            writeln!(out, "{}", json!({ "header": header }))?;
            for r in results {
                writeln!(out, "{}", serde_json::to_string(r).map_err(|e| Error::Config(e.to_string()))?)?;
            }
        }
        ReportFormat::Csv => {
            header.write_comment(&mut out)?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["name", "params", "observed", "expected", "tolerance", "comparison", "passed", "note"])
                .map_err(csv_err)?;
            for r in results {
                let comparison = serde_json::to_value(r.comparison).expect("enum serializes");
                w.write_record([
                    r.name.clone(),
                    r.params.to_string(),
                    format!("{:.16e}", r.observed),
                    format!("{:.16e}", r.expected),
                    format!("{:.16e}", r.tolerance),
                    comparison.as_str().unwrap_or_default().to_string(),
                    r.passed.to_string(),
                    r.note.clone().unwrap_or_default(),
                ])
                .map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}
