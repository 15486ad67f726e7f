//! The Dirichlet solution `u = P_θ[φ]` and its gradient.
//!
//! Point evaluation picks one of three paths:
//! - `x = 0`: the kernel is the constant `c_{n,θ}`, so `u` and `∇u` are moments of `φ`.
//! - boundary data zonal about an axis `a`: exact reduction to a rule in
//!   `t = ζ·x̂` (graded towards `x̂`) times a rule on `S^{n-2}` for the
//!   coordinate of `ζ` along the part of `a` orthogonal to `x̂`.
//! - anything else: reflect `x` onto `|x| e₁` and use the factory's sphere rule,
//!   whose nodes cluster around `e₁`.

use std::fmt;
use std::io::BufRead;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{dot, norm, poisson_kernel, poisson_kernel_gradient, AxialKernel, BallPoint, SpherePoint, ThetaParams};
use crate::quadrature::{RuleFactory, SliceRule, SphereRule, SphereRuleKind, ZonalRule};

/// Profile `f` of boundary data `φ(ζ) = f(ζ·a)`.
#[derive(Clone)]
pub enum Profile {
    Constant(f64),
    /// `f(t) = t`
    Coordinate,
    /// `|ζ - a| = sqrt(2(1-t))`
    Distance,
    /// `max(0, t)`
    Clamped,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(c) => write!(f, "Constant({c})"),
            Profile::Coordinate => f.write_str("Coordinate"),
            Profile::Distance => f.write_str("Distance"),
            Profile::Clamped => f.write_str("Clamped"),
            Profile::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl Profile {
    /// `t = ζ·a` and `gap = 1 - t`; built-ins use whichever is accurate.
    pub fn eval(&self, t: f64, gap: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Coordinate => t,
            Profile::Distance => (2.0 * gap.max(0.0)).sqrt(),
            Profile::Clamped => t.max(0.0),
            Profile::Custom(f) => f(t),
        }
    }

    fn lipschitz(&self) -> Option<f64> {
        match self {
            Profile::Constant(_) => Some(0.0),
            Profile::Coordinate | Profile::Distance | Profile::Clamped => Some(1.0),
            Profile::Custom(_) => None,
        }
    }

    /// Degree in `t` when the profile is a polynomial.
    fn degree(&self) -> Option<usize> {
        match self {
            Profile::Constant(_) => Some(0),
            Profile::Coordinate => Some(1),
            _ => None,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Profile::Constant(_) => "constant",
            Profile::Coordinate => "coordinate",
            Profile::Distance => "distance",
            Profile::Clamped => "clamped",
            Profile::Custom(_) => "custom",
        }
    }
}

#[derive(Clone)]
enum Kind {
    Zonal { profile: Profile, axis: SpherePoint },
    General { n: usize, f: Arc<dyn Fn(&SpherePoint) -> f64 + Send + Sync> },
    Sampled { rule: Arc<SphereRule>, values: Arc<Vec<f64>> },
}

/// Continuous data on `S^{n-1}`, optionally with a known Lipschitz constant.
#[derive(Clone)]
pub struct BoundaryFunction {
    kind: Kind,
    lipschitz: Option<f64>,
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryFunction")
            .field("name", &self.name())
            .field("n", &self.n())
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl BoundaryFunction {
    /// `φ(ζ) = f(ζ·axis)`.
    pub fn zonal(profile: Profile, axis: SpherePoint) -> Self {
        let lipschitz = profile.lipschitz();
        Self { kind: Kind::Zonal { profile, axis }, lipschitz }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::zonal(Profile::Constant(c), SpherePoint::e1(n))
    }

    /// `φ(ζ) = ζ₁`
    pub fn coordinate(n: usize) -> Self {
        Self::zonal(Profile::Coordinate, SpherePoint::e1(n))
    }

    /// `φ(ζ) = |ζ - e₁|`
    pub fn distance_to_e1(n: usize) -> Self {
        Self::zonal(Profile::Distance, SpherePoint::e1(n))
    }

    /// `φ(ζ) = max(0, ζ₁)`
    pub fn clamped_coordinate(n: usize) -> Self {
        Self::zonal(Profile::Clamped, SpherePoint::e1(n))
    }

    /// Arbitrary data, integrated with the factory's sphere rules.
    pub fn general<F>(n: usize, f: F, lipschitz: Option<f64>) -> Self
    where
        F: Fn(&SpherePoint) -> f64 + Send + Sync + 'static,
    {
        Self { kind: Kind::General { n, f: Arc::new(f) }, lipschitz }
    }

    /// Values given on the nodes of a rule; the Poisson integral is the rule sum.
    pub fn sampled(rule: SphereRule, values: Vec<f64>) -> Result<Self> {
        if values.len() != rule.len() {
            return Err(Error::InvalidRule(format!("{} values for {} nodes", values.len(), rule.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("boundary values must be finite"));
        }
        Ok(Self { kind: Kind::Sampled { rule: Arc::new(rule), values: Arc::new(values) }, lipschitz: None })
    }

    /// Reads `weight ζ_1 .. ζ_n value` rows; blank lines and `#` comments are skipped.
    pub fn read_sampled<R: BufRead>(input: R) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut values = Vec::new();
        let mut n = None;
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let text = line.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let vals = text
                .split_whitespace()
                .map(|s| s.parse::<f64>().map_err(|_| Error::Parse { line: idx + 1, msg: format!("bad number `{s}`") }))
                .collect::<Result<Vec<_>>>()?;
            let dim = *n.get_or_insert(vals.len().saturating_sub(2));
            if dim < 2 || vals.len() != dim + 2 {
                return Err(Error::Parse { line: idx + 1, msg: format!("expected {} columns, found {}", dim + 2, vals.len()) });
            }
            weights.push(vals[0]);
            nodes.push(SpherePoint::new(vals[1..=dim].to_vec()).map_err(|e| Error::Parse { line: idx + 1, msg: e.to_string() })?);
            values.push(vals[dim + 1]);
        }
        let n = n.ok_or(Error::Parse { line: 0, msg: "no boundary samples".into() })?;
        let rule = SphereRule::from_parts(n, nodes, weights, SphereRuleKind::Tabulated, None)?;
        Self::sampled(rule, values)
    }

    pub fn with_lipschitz(mut self, l: Option<f64>) -> Self {
        self.lipschitz = l;
        self
    }

    pub fn lipschitz_constant(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn is_zonal(&self) -> bool {
        matches!(self.kind, Kind::Zonal { .. })
    }

    pub fn n(&self) -> usize {
        match &self.kind {
            Kind::Zonal { axis, .. } => axis.dim(),
            Kind::General { n, .. } => *n,
            Kind::Sampled { rule, .. } => rule.n(),
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            Kind::Zonal { profile: Profile::Constant(c), .. } => format!("constant:{c}"),
            Kind::Zonal { profile, axis } if *axis == SpherePoint::e1(axis.dim()) => profile.name().to_string(),
            Kind::Zonal { profile, .. } => format!("{}@axis", profile.name()),
            Kind::General { .. } => "general".into(),
            Kind::Sampled { rule, .. } => format!("sampled:{}", rule.len()),
        }
    }

    /// `φ(ζ)`; sampled data returns the value at the nearest node.
    pub fn eval(&self, zeta: &SpherePoint) -> f64 {
        match &self.kind {
            Kind::Zonal { profile, axis } => {
                let t = dot(zeta.coords(), axis.coords());
                let d: f64 = zeta.coords().iter().zip(axis.coords()).map(|(z, a)| (z - a) * (z - a)).sum();
                profile.eval(t.clamp(-1.0, 1.0), 0.5 * d)
            }
            Kind::General { f, .. } => f(zeta),
            Kind::Sampled { rule, values } => {
                let best = rule
                    .nodes()
                    .iter()
                    .map(|z| dot(z.coords(), zeta.coords()))
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |acc, (i, c)| if c > acc.1 { (i, c) } else { acc });
                values[best.0]
            }
        }
    }

    /// `φ ∘ T`.
    pub fn rotated(&self, rot: &Rotation) -> Self {
        let kind = match &self.kind {
            Kind::Zonal { profile, axis } => Kind::Zonal {
                profile: profile.clone(),
                axis: SpherePoint::from_unit(rot.apply_transpose(axis.coords())),
            },
            Kind::General { n, f } => {
                let f = Arc::clone(f);
                let rot = rot.clone();
                Kind::General { n: *n, f: Arc::new(move |z: &SpherePoint| f(&SpherePoint::from_unit(rot.apply(z.coords())))) }
            }
            Kind::Sampled { rule, values } => {
                let nodes = rule.nodes().iter().map(|z| SpherePoint::from_unit(rot.apply_transpose(z.coords()))).collect();
                let rule = SphereRule::from_parts(rule.n(), nodes, rule.weights().to_vec(), rule.kind(), rule.seed())
                    .expect("rotation preserves rule invariants");
                Kind::Sampled { rule: Arc::new(rule), values: Arc::clone(values) }
            }
        };
        Self { kind, lipschitz: self.lipschitz }
    }
}

/// Householder reflection `T = I - 2vvᵀ/|v|²` with `T e₁ = x̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    v: Vec<f64>,
    /// `2/|v|²`, zero for the identity.
    scale: f64,
}

impl Rotation {
    pub fn identity(n: usize) -> Self {
        Self { v: vec![0.0; n], scale: 0.0 }
    }

    fn from_unit(xhat: &[f64]) -> Self {
        let tail: f64 = xhat[1..].iter().map(|c| c * c).sum();
        if tail == 0.0 && xhat[0] > 0.0 {
            return Self::identity(xhat.len());
        }
        // v = e₁ - x̂, with 1 - x̂₁ = |x̂_{2..}|²/(1 + x̂₁) when x̂₁ > 0
        let mut v: Vec<f64> = xhat.iter().map(|c| -c).collect();
        v[0] = if xhat[0] > 0.0 { tail / (1.0 + xhat[0]) } else { 1.0 - xhat[0] };
        let len2: f64 = v.iter().map(|c| c * c).sum();
        Self { v, scale: 2.0 / len2 }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    /// `T y`
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        let k = self.scale * dot(&self.v, y);
        y.iter().zip(&self.v).map(|(a, b)| a - k * b).collect()
    }

    /// `Tᵀ y` (a reflection is symmetric).
    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        self.apply(y)
    }

    /// Dense matrix, row-major.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| f64::from(u8::from(i == j)) - self.scale * self.v[i] * self.v[j]).collect())
            .collect()
    }
}

/// Orthogonal `T` with `T(|x| e₁) = x`; errors at `x = 0`, where callers use the identity.
pub fn rotate_to_axis(x: &BallPoint) -> Result<Rotation> {
    if x.r() == 0.0 {
        return Err(Error::domain("rotation to the axis is undefined at the origin"));
    }
    let xhat: Vec<f64> = x.coords().iter().map(|c| c / x.r()).collect();
    Ok(Rotation::from_unit(&xhat))
}

/// Parameters of the hyperbolic case `θ = n/2 - 1`.
pub fn hyperbolic_params(n: usize) -> Result<ThetaParams> {
    if n < 3 {
        return Err(Error::domain(format!(
            "hyperbolic case needs n >= 3 so that theta = n/2 - 1 > 0; n = {n} gives theta = {}",
            0.5 * n as f64 - 1.0
        )));
    }
    ThetaParams::new(n, 0.5 * n as f64 - 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: Vec<f64>,
    /// Standard error of `value` for Monte Carlo rules.
    pub std_error: Option<f64>,
}

/// `u = P_θ[φ]` with its rule factory.
#[derive(Debug, Clone)]
pub struct SolutionField {
    params: ThetaParams,
    phi: BoundaryFunction,
    rules: Arc<RuleFactory>,
}

impl SolutionField {
    pub fn new(params: ThetaParams, phi: BoundaryFunction, rules: Arc<RuleFactory>) -> Result<Self> {
        if phi.n() != params.n() {
            return Err(Error::domain(format!("boundary data lives on S^{} but n = {}", phi.n() - 1, params.n())));
        }
        Ok(Self { params, phi, rules })
    }

    pub fn params(&self) -> &ThetaParams {
        &self.params
    }

    pub fn phi(&self) -> &BoundaryFunction {
        &self.phi
    }

    pub fn rules(&self) -> &Arc<RuleFactory> {
        &self.rules
    }

    /// Same field with `φ` replaced by `φ ∘ T`.
    pub fn rotated(&self, rot: &Rotation) -> Self {
        Self { params: self.params, phi: self.phi.rotated(rot), rules: Arc::clone(&self.rules) }
    }

    fn check_point(&self, x: &BallPoint) -> Result<()> {
        if x.dim() != self.params.n() {
            return Err(Error::domain(format!("point has {} coordinates, expected {}", x.dim(), self.params.n())));
        }
        Ok(())
    }

    pub fn poisson_integral(&self, x: &BallPoint) -> Result<f64> {
        Ok(self.evaluate(x)?.value)
    }

    pub fn solution_gradient(&self, x: &BallPoint) -> Result<Vec<f64>> {
        Ok(self.evaluate(x)?.gradient)
    }

    /// `Σ x_k ∂_k u` at `r e₁`.
    pub fn radial_derivative(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(0.0);
        }
        let x = BallPoint::on_axis(self.params.n(), r)?;
        Ok(r * self.evaluate(&x)?.gradient[0])
    }

    /// `u(x)` and `∇u(x)`.
    pub fn evaluate(&self, x: &BallPoint) -> Result<Evaluation> {
        self.check_point(x)?;
        match &self.phi.kind {
            Kind::Sampled { rule, values } => Ok(self.eval_sampled(rule, values, x)),
            _ if x.r() == 0.0 => self.eval_origin(),
            Kind::Zonal { profile, axis } => self.eval_zonal(profile, axis, x),
            Kind::General { f, .. } => self.eval_general(f.as_ref(), x),
        }
    }

    fn eval_origin(&self) -> Result<Evaluation> {
        let p = &self.params;
        let n = p.n();
        let scale = (n as f64 + 2.0 * p.theta()) * p.c_norm();
        match &self.phi.kind {
            Kind::Zonal { profile, axis } => {
                let rule = self.rules.zonal(n, 0.0)?;
                let (m0, m1) = rule
                    .iter()
                    .map(|(z, w)| {
                        let f = profile.eval(z.t, z.gap);
                        (w * f, w * z.t * f)
                    })
                    .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
                Ok(Evaluation {
                    value: p.c_norm() * m0,
                    gradient: axis.coords().iter().map(|a| scale * a * m1).collect(),
                    std_error: None,
                })
            }
            Kind::General { f, .. } => {
                let rule = self.rules.sphere(n, 0.0)?;
                let vals: Vec<f64> = rule.nodes().iter().map(|z| f(z)).collect();
                let mut value = 0.0;
                let mut grad = vec![0.0; n];
                for ((z, w), v) in rule.iter().zip(&vals) {
                    value += w * v;
                    for (g, c) in grad.iter_mut().zip(z.coords()) {
                        *g += w * c * v;
                    }
                }
                let std_error = monte_carlo_error(&rule, &vals, value).map(|e| p.c_norm() * e);
                Ok(Evaluation {
                    value: p.c_norm() * value,
                    gradient: grad.into_iter().map(|g| scale * g).collect(),
                    std_error,
                })
            }
            Kind::Sampled { .. } => unreachable!("sampled data never reaches the origin path"),
        }
    }

    fn eval_sampled(&self, rule: &SphereRule, values: &[f64], x: &BallPoint) -> Evaluation {
        let p = &self.params;
        let mut value = 0.0;
        let mut grad = vec![0.0; p.n()];
        for ((z, w), v) in rule.iter().zip(values) {
            value += w * v * poisson_kernel(p, x, z);
            for (g, d) in grad.iter_mut().zip(poisson_kernel_gradient(p, x, z)) {
                *g += w * v * d;
            }
        }
        Evaluation { value, gradient: grad, std_error: None }
    }

    fn eval_zonal(&self, profile: &Profile, axis: &SpherePoint, x: &BallPoint) -> Result<Evaluation> {
        let n = self.params.n();
        let r = x.r();
        let xhat: Vec<f64> = x.coords().iter().map(|c| c / r).collect();
        let a = axis.coords();
        let rule = self.rules.zonal(n, r)?;
        let kernel = AxialKernel::new(&self.params, r);

        let diff2: f64 = a.iter().zip(&xhat).map(|(p, q)| (p - q) * (p - q)).sum();
        let omc = 0.5 * diff2;
        let cos_b = 1.0 - omc;
        // a - cosβ x̂ = (a - x̂) + (1 - cosβ) x̂
        let perp: Vec<f64> = a.iter().zip(&xhat).map(|(p, q)| (p - q) + omc * q).collect();
        let sin_b = norm(&perp);

        if sin_b <= 1e-14 {
            let sign = if cos_b > 0.0 { 1.0 } else { -1.0 };
            let (value, g1) = axial_sums(&rule, &kernel, |t, gap| {
                if sign > 0.0 {
                    profile.eval(t, gap)
                } else {
                    profile.eval(-t, 2.0 - gap)
                }
            });
            return Ok(Evaluation { value, gradient: xhat.iter().map(|q| g1 * q).collect(), std_error: None });
        }

        let slice = match profile.degree() {
            Some(d) => self.rules.slice_sized(n, ((d + 3) / 2).max(2))?,
            None => self.rules.slice(n)?,
        };
        let (value, g1, g2) = biaxial_sums(&rule, &slice, &kernel, profile, cos_b, omc, sin_b);
        let gradient = xhat.iter().zip(&perp).map(|(q, w)| g1 * q + g2 * w / sin_b).collect();
        Ok(Evaluation { value, gradient, std_error: None })
    }

    fn eval_general(&self, f: &(dyn Fn(&SpherePoint) -> f64 + Send + Sync), x: &BallPoint) -> Result<Evaluation> {
        let n = self.params.n();
        let rot = rotate_to_axis(x)?;
        let rule = self.rules.sphere(n, x.r())?;
        let kernel = AxialKernel::new(&self.params, x.r());
        let mut value = 0.0;
        let mut local = vec![0.0; n];
        let mut terms = Vec::with_capacity(rule.len());
        for (eta, w) in rule.iter() {
            let c = eta.coords();
            let phi = f(&SpherePoint::from_unit(rot.apply(c)));
            let gap = eta_gap(c);
            let (v, rad, tan) = kernel.all(gap);
            terms.push(v * phi);
            value += w * v * phi;
            local[0] += w * rad * phi;
            for k in 1..n {
                local[k] += w * tan * c[k] * phi;
            }
        }
        let std_error = monte_carlo_error(&rule, &terms, value);
        Ok(Evaluation { value, gradient: rot.apply(&local), std_error })
    }
}

/// `1 - η₁` without cancellation near `e₁`.
fn eta_gap(c: &[f64]) -> f64 {
    if c[0] > 0.0 {
        c[1..].iter().map(|v| v * v).sum::<f64>() / (1.0 + c[0])
    } else {
        1.0 - c[0]
    }
}

fn monte_carlo_error(rule: &SphereRule, terms: &[f64], mean: f64) -> Option<f64> {
    if rule.kind() != SphereRuleKind::MonteCarlo {
        return None;
    }
    let m = terms.len() as f64;
    let var = terms.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (m - 1.0);
    Some((var / m).sqrt())
}

/// `(∫ P f, ∫ ∂₁P f)` at `r e₁` for data depending on `ζ₁` only.
fn axial_sums<F: Fn(f64, f64) -> f64>(rule: &ZonalRule, kernel: &AxialKernel, f: F) -> (f64, f64) {
    let mut value = 0.0;
    let mut g1 = 0.0;
    for (z, w) in rule.iter() {
        let (v, rad, _) = kernel.all(z.gap);
        let phi = f(z.t, z.gap);
        value += w * v * phi;
        g1 += w * rad * phi;
    }
    (value, g1)
}

/// Sums for data zonal about `a = cosβ x̂ + sinβ w`: `ζ·a = t cosβ + sinα s sinβ`
/// with `s` the coordinate along `w` of the `S^{n-2}` factor.
fn biaxial_sums(
    rule: &ZonalRule,
    slice: &SliceRule,
    kernel: &AxialKernel,
    profile: &Profile,
    cos_b: f64,
    omc: f64,
    sin_b: f64,
) -> (f64, f64, f64) {
    let mut value = 0.0;
    let mut g1 = 0.0;
    let mut g2 = 0.0;
    for (z, w) in rule.iter() {
        let mut f0 = 0.0;
        let mut f1 = 0.0;
        for (s, mu) in slice.iter() {
            let lift = z.sin * s * sin_b;
            let t = (z.t * cos_b + lift).clamp(-1.0, 1.0);
            let gap = (z.gap * cos_b + omc - lift).clamp(0.0, 2.0);
            let phi = profile.eval(t, gap);
            f0 += mu * phi;
            f1 += mu * s * phi;
        }
        let (v, rad, tan) = kernel.all(z.gap);
        value += w * v * f0;
        g1 += w * rad * f0;
        g2 += w * tan * z.sin * f1;
    }
    (value, g1, g2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::RuleConfig;
    use crate::specfun::{hyp2f1, HypParams};

    fn factory() -> Arc<RuleFactory> {
        Arc::new(RuleFactory::new(RuleConfig::default()))
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn rotation_maps_axis_to_point() {
        for coords in [vec![0.3, 0.0, 0.0], vec![0.0, 0.4, 0.0], vec![-0.5, 0.1, 0.2], vec![-0.7, 0.0, 0.0], vec![0.2, -0.3, 0.1]] {
            let x = BallPoint::new(coords.clone()).unwrap();
            let t = rotate_to_axis(&x).unwrap();
            let mut e = vec![0.0; 3];
            e[0] = x.r();
            let mapped = t.apply(&e);
            for (a, b) in mapped.iter().zip(&coords) {
                assert!((a - b).abs() < 1e-15);
            }
            let m = t.matrix();
            for i in 0..3 {
                for j in 0..3 {
                    let g: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                    assert!((g - f64::from(u8::from(i == j))).abs() < 1e-14);
                }
            }
        }
        let t = rotate_to_axis(&BallPoint::on_axis(4, 0.5).unwrap()).unwrap();
        assert_eq!(t, Rotation::identity(4));
        assert!(rotate_to_axis(&BallPoint::origin(3)).is_err());
    }

    #[test]
    fn origin_is_the_mean() {
        let p = ThetaParams::new(3, 0.7).unwrap();
        let s = SolutionField::new(p, BoundaryFunction::constant(3, 2.0), factory()).unwrap();
        assert!(rel(s.poisson_integral(&BallPoint::origin(3)).unwrap(), 2.0 * p.c_norm()) < 1e-14);
        let s = SolutionField::new(p, BoundaryFunction::coordinate(3), factory()).unwrap();
        let e = s.evaluate(&BallPoint::origin(3)).unwrap();
        assert!(e.value.abs() < 1e-15);
        let expected = (3.0 + 1.4) * p.c_norm() / 3.0;
        assert!(rel(e.gradient[0], expected) < 1e-13);
    }

    #[test]
    fn constant_data_matches_mass_identity() {
        for (n, theta) in [(2, 0.5), (3, -0.3), (4, 1.0), (5, 0.2)] {
            let p = ThetaParams::new(n, theta).unwrap();
            let s = SolutionField::new(p, BoundaryFunction::constant(n, 1.0), factory()).unwrap();
            let mut c = vec![0.0; n];
            c[0] = 0.3;
            c[1] = -0.4;
            let x = BallPoint::new(c).unwrap();
            let h = (0.5 * n as f64 - 1.0 - theta, 0.5 * n as f64);
            let expected = p.c_norm() * hyp2f1(&HypParams::new(-theta, h.0, h.1, 0.25).unwrap(), 1e-15).unwrap().value;
            assert!(rel(s.poisson_integral(&x).unwrap(), expected) < 1e-11, "n={n}");
        }
    }

    #[test]
    fn zonal_paths_agree_with_general_path() {
        let rules = factory();
        for (n, theta) in [(2, 0.3), (3, -0.2)] {
            let p = ThetaParams::new(n, theta).unwrap();
            let axis = SpherePoint::from_direction(&[0.6, 0.8, 0.0][..n]).unwrap();
            let a = axis.coords().to_vec();
            let zonal = BoundaryFunction::zonal(Profile::Coordinate, axis);
            let general = BoundaryFunction::general(n, move |z| dot(z.coords(), &a), Some(1.0));
            let sz = SolutionField::new(p, zonal, Arc::clone(&rules)).unwrap();
            let sg = SolutionField::new(p, general, Arc::clone(&rules)).unwrap();
            let x = BallPoint::new(vec![0.1, -0.5, 0.2][..n].to_vec()).unwrap();
            let ez = sz.evaluate(&x).unwrap();
            let eg = sg.evaluate(&x).unwrap();
            assert!((ez.value - eg.value).abs() < 1e-10, "n={n}: {} vs {}", ez.value, eg.value);
            for (a, b) in ez.gradient.iter().zip(&eg.gradient) {
                assert!((a - b).abs() < 1e-9, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn sampled_data_reproduces_rule_sum() {
        let rule = crate::quadrature::build_circle_rule(512).unwrap();
        let values: Vec<f64> = rule.nodes().iter().map(|z| z.coords()[0]).collect();
        let phi = BoundaryFunction::sampled(rule, values).unwrap();
        let p = ThetaParams::new(2, 0.0).unwrap();
        let s = SolutionField::new(p, phi, factory()).unwrap();
        let x = BallPoint::new(vec![0.3, 0.2]).unwrap();
        // harmonic extension of ζ₁ is x₁
        assert!((s.poisson_integral(&x).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn read_sampled_rows() {
        let text = "# w z1 z2 value\n0.5 1 0 2.0\n0.5 -1 0 4.0\n";
        let phi = BoundaryFunction::read_sampled(text.as_bytes()).unwrap();
        assert_eq!(phi.n(), 2);
        assert_eq!(phi.eval(&SpherePoint::e1(2)), 2.0);
        assert!(BoundaryFunction::read_sampled("0.5 1 0\n0.5 -1 0 1\n".as_bytes()).is_err());
        assert!(BoundaryFunction::read_sampled("1 0 x 1\n".as_bytes()).is_err());
    }

    #[test]
    fn hyperbolic_case() {
        assert_eq!(hyperbolic_params(4).unwrap().theta(), 1.0);
        assert_eq!(hyperbolic_params(3).unwrap().theta(), 0.5);
        assert!(hyperbolic_params(2).is_err());
    }

    #[test]
    fn radial_derivative_basics() {
        let p = hyperbolic_params(4).unwrap();
        let s = SolutionField::new(p, BoundaryFunction::constant(4, 1.0), factory()).unwrap();
        assert_eq!(s.radial_derivative(0.0).unwrap(), 0.0);
        assert!(s.radial_derivative(0.9).unwrap().abs() < 1e-10);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let p = ThetaParams::new(3, 0.5).unwrap();
        assert!(SolutionField::new(p, BoundaryFunction::coordinate(4), factory()).is_err());
        let s = SolutionField::new(p, BoundaryFunction::coordinate(3), factory()).unwrap();
        assert!(s.evaluate(&BallPoint::origin(2)).is_err());
    }
}
