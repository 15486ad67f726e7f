//! The `invlap` command line: `solve`, `verify`, `blowup`, `scan` and `keylem`.
//!
//! Every subcommand writes a provenance header (parameters, rule sizes, seed,
//! tool version) followed by its table, to `--out` or stdout. Exit status is 0
//! when every check passes, 1 when a check or a row fails, 2 on configuration
//! errors.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use crate::analysis::{
    blowup_exponent_fit, blowup_radii, default_directions, gradient_table, run_suite, singular_integral, write_report,
    CheckResult, Comparison, FitReport, Header, ReportFormat, SuiteConfig, Tolerances, SCAN_RADII,
};
use crate::error::{Error, Result};
use crate::kernel::{BallPoint, ThetaParams};
use crate::quadrature::{RuleConfig, RuleFactory};
use crate::solver::{BoundaryFunction, SolutionField};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "invlap", version, about = "Poisson integrals and boundary-regularity checks for the invariant Laplacians")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Dimension of the ball.
    #[arg(long, global = true)]
    pub n: Option<usize>,

    /// Operator parameter, > -1/2.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<f64>,

    /// Base size of the zonal rules.
    #[arg(long, global = true)]
    pub base_size: Option<usize>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Tolerance override, `NAME=VALUE` (also accepted as `--tol.NAME=VALUE`).
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    pub tol: Vec<String>,

    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,

    /// TOML file with the same keys as the flags; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Report,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Report => ReportFormat::Report,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate u and |grad u| at the points of a file.
    Solve {
        /// constant[:c], coordinate, distance, clamped, or file:PATH with `w z1..zn value` rows.
        #[arg(long)]
        boundary: Option<String>,
        /// One point per line, n whitespace-separated coordinates.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Run the verification suite.
    Verify,
    /// Fit the blow-up exponent of the radial derivative of P[1] (theta < 0).
    Blowup,
    /// Scan sup |grad u| towards the sphere for built-in Lipschitz data.
    Scan {
        /// coordinate, distance, clamped or constant.
        #[arg(long)]
        phi: Option<String>,
    },
    /// Fit the growth of the singular integral with exponents p > q >= 0.
    Keylem {
        #[arg(long, allow_hyphen_values = true)]
        p: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<f64>,
    },
}

/// Keys accepted in `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub theta: Option<f64>,
    pub base_size: Option<usize>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<FormatArg>,
    #[serde(default)]
    pub tol: BTreeMap<String, f64>,
    pub boundary: Option<String>,
    pub points: Option<PathBuf>,
    pub phi: Option<String>,
    pub p: Option<f64>,
    pub q: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Flags merged over the config file and validated.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub theta: Option<f64>,
    pub rules: RuleConfig,
    pub jobs: Option<usize>,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub format: ReportFormat,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs, file: &FileConfig) -> Result<Self> {
        let n = args.n.or(file.n);
        let theta = args.theta.or(file.theta);
        if let Some(n) = n {
            if n < 2 {
                return Err(Error::Config(format!("n must be at least 2, got {n}")));
            }
        }
        if let Some(t) = theta {
            if !(t > -0.5 && t.is_finite()) {
                return Err(Error::Config(format!("theta must exceed -1/2, got {t}")));
            }
        }
        let mut rules = RuleConfig::default();
        if let Some(b) = args.base_size.or(file.base_size) {
            if b < 2 {
                return Err(Error::Config(format!("base size must be at least 2, got {b}")));
            }
            rules.zonal_base = b;
        }
        if let Some(s) = args.seed.or(file.seed) {
            rules.seed = s;
        }
        let jobs = args.jobs.or(file.jobs);
        if jobs == Some(0) {
            return Err(Error::Config("--jobs must be positive".into()));
        }
        let mut tolerances = Tolerances::default();
        for (k, v) in &file.tol {
            tolerances.set(k, *v)?;
        }
        for spec in &args.tol {
            let (k, v) = spec
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("tolerance override `{spec}` is not NAME=VALUE")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::Config(format!("tolerance `{spec}`: bad number")))?;
            tolerances.set(k.trim(), v)?;
        }
        Ok(Self {
            n,
            theta,
            rules,
            jobs,
            tolerances,
            out: args.out.clone().or_else(|| file.out.clone()),
            format: args.format.or(file.format).unwrap_or(FormatArg::Csv).into(),
        })
    }

    fn n_or(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }

    fn theta_required(&self, command: &str) -> Result<f64> {
        self.theta.ok_or_else(|| Error::Config(format!("`{command}` needs --theta")))
    }

    fn header(&self, command: &str, params: serde_json::Value, kinds: &str) -> Header {
        Header::new(command, params, &self.rules, kinds)
    }
}

/// `--tol.NAME=V` and `--tol.NAME V` become `--tol NAME=V`.
pub fn normalize_args<I: IntoIterator<Item = String>>(args: I) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        match a.strip_prefix("--tol.") {
            Some(rest) if rest.contains('=') => {
                out.push("--tol".into());
                out.push(rest.into());
            }
            Some(rest) => {
                out.push("--tol".into());
                let v = it.next().unwrap_or_default();
                out.push(format!("{rest}={v}"));
            }
            None => out.push(a),
        }
    }
    out
}

/// Parses `args` (including the program name), runs, and returns the exit status.
pub fn run<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(normalize_args(args)) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("invlap: {e}");
            match e {
                Error::Config(_) | Error::Parse { .. } => EXIT_CONFIG,
                _ => EXIT_FAILED,
            }
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32> {
    let file = match &cli.common.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::resolve(&cli.common, &file)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Solve { boundary, points } => {
            let boundary = boundary.clone().or(file.boundary.clone()).unwrap_or_else(|| "constant".into());
            let points = points
                .clone()
                .or(file.points.clone())
                .ok_or_else(|| Error::Config("`solve` needs --points".into()))?;
            cmd_solve(&cfg, &boundary, &points)
        }
        Command::Verify => cmd_verify(&cfg),
        Command::Blowup => cmd_blowup(&cfg),
        Command::Scan { phi } => cmd_scan(&cfg, phi.as_deref().or(file.phi.as_deref()).unwrap_or("coordinate")),
        Command::Keylem { p, q } => {
            let p = p.or(file.p).ok_or_else(|| Error::Config("`keylem` needs --p".into()))?;
            let q = q.or(file.q).unwrap_or(0.0);
            cmd_keylem(&cfg, p, q)
        }
    })
}

fn open_out(cfg: &RunConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.out {
        Some(p) => Box::new(std::io::BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn exit_for(results: &[CheckResult]) -> i32 {
    if results.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

/// Parses a `--boundary` spec for dimension `n`.
pub fn parse_boundary(spec: &str, n: usize) -> Result<BoundaryFunction> {
    let phi = match spec.split_once(':') {
        Some(("constant", c)) => {
            let c: f64 = c.parse().map_err(|_| Error::Config(format!("bad constant in `{spec}`")))?;
            BoundaryFunction::constant(n, c)
        }
        Some(("file", path)) => {
            let f = File::open(path).map_err(|e| Error::Config(format!("{path}: {e}")))?;
            let phi = BoundaryFunction::read_sampled(BufReader::new(f))?;
            if phi.n() != n {
                return Err(Error::Config(format!("{path} has samples in dimension {}, expected {n}", phi.n())));
            }
            phi
        }
        None if spec == "constant" => BoundaryFunction::constant(n, 1.0),
        None if spec == "coordinate" => BoundaryFunction::coordinate(n),
        None if spec == "distance" => BoundaryFunction::distance_to_e1(n),
        None if spec == "clamped" => BoundaryFunction::clamped_coordinate(n),
        _ => {
            return Err(Error::Config(format!(
                "unknown boundary `{spec}` (constant[:c], coordinate, distance, clamped, file:PATH)"
            )))
        }
    };
    Ok(phi)
}

/// Reads one point per line; `#` starts a comment. Points are not checked
/// against the ball here.
pub fn read_points<R: BufRead>(input: R, n: usize) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let text = line.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let coords = text
            .split_whitespace()
            .map(|s| s.parse::<f64>().map_err(|_| Error::Parse { line: idx + 1, msg: format!("bad number `{s}`") }))
            .collect::<Result<Vec<_>>>()?;
        if coords.len() != n {
            return Err(Error::Parse { line: idx + 1, msg: format!("expected {n} coordinates, found {}", coords.len()) });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parse { line: idx + 1, msg: "non-finite coordinate".into() });
        }
        out.push(coords);
    }
    Ok(out)
}

pub fn cmd_solve(cfg: &RunConfig, boundary: &str, points: &Path) -> Result<i32> {
    let n = cfg.n_or(3);
    let theta = cfg.theta_required("solve")?;
    let p = ThetaParams::new(n, theta).map_err(|e| Error::Config(e.to_string()))?;
    let phi = parse_boundary(boundary, n)?;
    let f = File::open(points).map_err(|e| Error::Config(format!("{}: {e}", points.display())))?;
    let pts = read_points(BufReader::new(f), n)?;
    let rules = Arc::new(RuleFactory::new(cfg.rules.clone()));
    let kinds = rules.describe(n, 0.0);
    let field = SolutionField::new(p, phi, rules)?;

    let header = cfg.header("solve", json!({ "n": n, "theta": theta, "boundary": boundary }), &kinds);
    let mut rows = Vec::with_capacity(pts.len());
    let mut failed = false;
    for (i, x) in pts.iter().enumerate() {
        let row = BallPoint::new(x.clone())
            .map_err(|_| Error::OutOfBall { index: i })
            .and_then(|b| field.evaluate(&b));
        failed |= row.is_err();
        rows.push(row);
    }

    let mut out = open_out(cfg)?;
    match cfg.format {
        ReportFormat::Report => {
            writeln!(out, "{}", json!({ "header": header }))?;
            for (i, (x, row)) in pts.iter().zip(&rows).enumerate() {
                let rec = match row {
                    Ok(e) => json!({
                        "index": i, "x": x, "u": e.value, "grad_norm": norm(&e.gradient),
                        "gradient": e.gradient, "std_error": e.std_error, "status": "ok",
                    }),
                    Err(err) => json!({ "index": i, "x": x, "status": format!("error: {err}") }),
                };
                writeln!(out, "{rec}")?;
            }
        }
        ReportFormat::Csv => {
            header.write_comment(&mut out)?;
            let mut w = csv::Writer::from_writer(&mut out);
            let mut head = vec!["index".to_string()];
            head.extend((1..=n).map(|k| format!("x{k}")));
            head.extend(["u", "grad_norm", "status"].map(String::from));
            w.write_record(&head).map_err(csv_err)?;
            for (i, (x, row)) in pts.iter().zip(&rows).enumerate() {
                let mut rec = vec![i.to_string()];
                rec.extend(x.iter().map(|v| fmt(*v)));
                match row {
                    Ok(e) => rec.extend([fmt(e.value), fmt(norm(&e.gradient)), "ok".into()]),
                    Err(err) => rec.extend([String::new(), String::new(), format!("error: {err}")]),
                }
                w.write_record(&rec).map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(if failed { EXIT_FAILED } else { EXIT_OK })
}

/// The suite for the configured `(n, θ)`, or the full default grid when neither is set.
pub fn suite_config(cfg: &RunConfig) -> SuiteConfig {
    let mut suite = match (cfg.n, cfg.theta) {
        (None, None) => SuiteConfig::default(),
        (n, Some(theta)) => SuiteConfig::single(n.unwrap_or(3), theta),
        (Some(n), None) => {
            let d = SuiteConfig::default();
            let mut scan_grid: Vec<_> = d.scan_grid.iter().copied().filter(|g| g.0 == n).collect();
            if scan_grid.is_empty() {
                scan_grid = vec![(n, 0.25), (n, 0.5)];
            }
            SuiteConfig {
                grid: crate::analysis::default_grid(&[n]),
                scan_grid,
                singular_dims: vec![n],
                closed_form_thetas: if n == 3 { d.closed_form_thetas.clone() } else { vec![] },
                blowup_grid: [-0.4, -0.25, -0.1].map(|t| (n, t)).to_vec(),
                ..d
            }
        }
    };
    suite.seed = cfg.rules.seed;
    suite.rules = cfg.rules.clone();
    suite.tolerances = cfg.tolerances.clone();
    suite
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<i32> {
    let suite = suite_config(cfg);
    let results = run_suite(&suite);
    let params = json!({ "grid": suite.grid, "scan_grid": suite.scan_grid, "tolerances": suite.tolerances });
    let header = cfg.header("verify", params, "zonal=gauss-jacobi|graded, slice=gauss-jacobi, general=circle|product|monte-carlo");
    let mut out = open_out(cfg)?;
    write_report(&results, &header, cfg.format, &mut out)?;
    out.flush()?;
    Ok(exit_for(&results))
}

/// Writes a fit as a `radius,value` table (CSV) or one record (report).
fn write_fit(cfg: &RunConfig, header: &Header, check: &CheckResult, fit: &FitReport) -> Result<()> {
    let mut out = open_out(cfg)?;
    match cfg.format {
        ReportFormat::Report => write_report(std::slice::from_ref(check), header, cfg.format, &mut out)?,
        ReportFormat::Csv => {
            header.write_comment(&mut out)?;
            writeln!(out, "# slope: {}", fmt(check.observed))?;
            writeln!(out, "# target: {} ({:?}, tolerance {})", fmt(check.expected), check.comparison, check.tolerance)?;
            writeln!(out, "# passed: {}", check.passed)?;
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["radius", "value"]).map_err(csv_err)?;
            for (r, v) in fit.radii.iter().zip(&fit.values) {
                w.write_record([fmt(*r), fmt(*v)]).map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn cmd_blowup(cfg: &RunConfig) -> Result<i32> {
    let n = cfg.n_or(2);
    let theta = cfg.theta_required("blowup")?;
    if !(theta < 0.0) {
        return Err(Error::Config(format!("`blowup` needs theta < 0, got {theta}")));
    }
    let p = ThetaParams::new(n, theta)?;
    let rules = Arc::new(RuleFactory::new(cfg.rules.clone()));
    let radii = blowup_radii();
    let fit = blowup_exponent_fit(&p, &radii, &rules)?;
    let params = json!({ "n": n, "theta": theta });
    let check = CheckResult::new("blowup_fit", params.clone(), fit.slope, 2.0 * theta, cfg.tolerances.get("blowup_fit"), Comparison::Absolute)
        .with_note("slope of ln|r du/dr(r e1)| against ln(1-r^2), phi = 1")
        .with_fit(fit.clone());
    let header = cfg.header("blowup", params, &rules.describe(n, radii[radii.len() - 1]));
    write_fit(cfg, &header, &check, &fit)?;
    Ok(exit_for(&[check]))
}

pub fn cmd_scan(cfg: &RunConfig, phi: &str) -> Result<i32> {
    let n = cfg.n_or(3);
    let theta = cfg.theta_required("scan")?;
    let p = ThetaParams::new(n, theta)?;
    let boundary = match phi {
        "coordinate" | "distance" | "clamped" | "constant" => parse_boundary(phi, n)?,
        _ => return Err(Error::Config(format!("unknown scan data `{phi}` (coordinate, distance, clamped, constant)"))),
    };
    let lip = boundary.lipschitz_constant().unwrap_or(1.0);
    let rules = Arc::new(RuleFactory::new(cfg.rules.clone()));
    let field = SolutionField::new(p, boundary, Arc::clone(&rules))?;
    let dirs = default_directions(n, 9);
    let table = gradient_table(&field, &SCAN_RADII, &dirs)?;
    let sups: Vec<f64> = table.iter().map(|row| row.iter().copied().fold(0.0, f64::max)).collect();
    let params = json!({ "n": n, "theta": theta, "phi": phi });
    let tol = cfg.tolerances.get("lipschitz_scan");

    let vanishing = sups.iter().all(|v| *v < 1e-9);
    let fit = if vanishing {
        FitReport { slope: 0.0, intercept: 0.0, max_residual: 0.0, radii: SCAN_RADII.to_vec(), values: sups.clone() }
    } else {
        FitReport::fit(&SCAN_RADII, &sups, |r| 1.0 - r)?
    };
    let sup = sups.iter().copied().fold(0.0, f64::max);
    let check = if theta > 0.0 {
        CheckResult::new("lipschitz_scan", params.clone(), fit.slope, 0.0, tol, Comparison::Absolute)
            .with_note(format!("slope of ln sup|grad u| against ln(1-r); max sup|grad u| / L = {:.6}", sup / lip))
    } else {
        let mut c = CheckResult::new("lipschitz_scan", params.clone(), fit.slope, 2.0 * theta, tol, Comparison::Skipped);
        c.note = Some("theta <= 0: slope reported, no boundedness claim".into());
        c
    }
    .with_fit(fit);

    let header = cfg.header("scan", params, &rules.describe(n, SCAN_RADII[SCAN_RADII.len() - 1]));
    let mut out = open_out(cfg)?;
    match cfg.format {
        ReportFormat::Report => write_report(std::slice::from_ref(&check), &header, cfg.format, &mut out)?,
        ReportFormat::Csv => {
            header.write_comment(&mut out)?;
            writeln!(out, "# slope: {}", fmt(check.observed))?;
            writeln!(out, "# passed: {}", check.passed)?;
            for (j, d) in dirs.iter().enumerate() {
                writeln!(out, "# d{j}: {}", d.coords().iter().map(|c| fmt(*c)).collect::<Vec<_>>().join(" "))?;
            }
            let mut w = csv::Writer::from_writer(&mut out);
            let mut head = vec!["radius".to_string()];
            head.extend((0..dirs.len()).map(|j| format!("d{j}")));
            head.push("sup".into());
            w.write_record(&head).map_err(csv_err)?;
            for ((r, row), s) in SCAN_RADII.iter().zip(&table).zip(&sups) {
                let mut rec = vec![fmt(*r)];
                rec.extend(row.iter().map(|v| fmt(*v)));
                rec.push(fmt(*s));
                w.write_record(&rec).map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(exit_for(&[check]))
}

pub fn cmd_keylem(cfg: &RunConfig, p_exp: f64, q_exp: f64) -> Result<i32> {
    let n = cfg.n_or(3);
    if !(p_exp > q_exp && q_exp >= 0.0) {
        return Err(Error::Config(format!("`keylem` needs p > q >= 0, got p = {p_exp}, q = {q_exp}")));
    }
    let rules = RuleFactory::new(cfg.rules.clone());
    let values = SCAN_RADII
        .iter()
        .map(|&r| Ok(singular_integral(n, p_exp, q_exp, r, &*rules.zonal(n, r)?)))
        .collect::<Result<Vec<_>>>()?;
    let fit = FitReport::fit(&SCAN_RADII, &values, |r| 1.0 / (1.0 - r))?;
    let params = json!({ "n": n, "p": p_exp, "q": q_exp });
    let check = CheckResult::new("singular_integral", params.clone(), fit.slope, p_exp - q_exp, cfg.tolerances.get("singular_integral"), Comparison::AtMost)
        .with_note("slope of ln I(r) against ln 1/(1-r)")
        .with_fit(fit.clone());
    let header = cfg.header("keylem", params, &rules.describe(n, SCAN_RADII[SCAN_RADII.len() - 1]));
    write_fit(cfg, &header, &check, &fit)?;
    Ok(exit_for(&[check]))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// 17 significant digits.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    crate::analysis::csv_err(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn tol_flags_are_rewritten() {
        let a = normalize_args(strings(&["invlap", "--tol.mass_identity=1e-6", "--tol.pde_residual", "0.01", "verify"]));
        assert_eq!(a, strings(&["invlap", "--tol", "mass_identity=1e-6", "--tol", "pde_residual=0.01", "verify"]));
    }

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str("n = 4\ntheta = 0.5\nseed = 7\n[tol]\nmass_identity = 1e-5\n").unwrap();
        let args = CommonArgs { n: Some(3), tol: vec!["mass_identity=1e-4".into()], ..Default::default() };
        let cfg = RunConfig::resolve(&args, &file).unwrap();
        assert_eq!(cfg.n, Some(3));
        assert_eq!(cfg.theta, Some(0.5));
        assert_eq!(cfg.rules.seed, 7);
        assert_eq!(cfg.tolerances.get("mass_identity"), 1e-4);
    }

    #[test]
    fn rejects_bad_config() {
        let file = FileConfig::default();
        for args in [
            CommonArgs { theta: Some(-0.6), ..Default::default() },
            CommonArgs { n: Some(1), ..Default::default() },
            CommonArgs { tol: vec!["bogus=1".into()], ..Default::default() },
            CommonArgs { tol: vec!["mass_identity".into()], ..Default::default() },
        ] {
            assert!(matches!(RunConfig::resolve(&args, &file), Err(Error::Config(_))));
        }
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }

    #[test]
    fn boundary_specs() {
        assert_eq!(parse_boundary("constant:2.5", 3).unwrap().name(), "constant:2.5");
        assert_eq!(parse_boundary("distance", 3).unwrap().lipschitz_constant(), Some(1.0));
        assert!(parse_boundary("sine", 3).is_err());
        assert!(parse_boundary("constant:x", 3).is_err());
    }

    #[test]
    fn points_parse() {
        let pts = read_points("# header\n0.5 0 0\n\n0.1 0.2 0.3 # c\n".as_bytes(), 3).unwrap();
        assert_eq!(pts, vec![vec![0.5, 0.0, 0.0], vec![0.1, 0.2, 0.3]]);
        assert!(matches!(read_points("0.5 0\n".as_bytes(), 3), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_points("0.5 x 0\n".as_bytes(), 3), Err(Error::Parse { .. })));
    }
}
