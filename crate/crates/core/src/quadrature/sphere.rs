use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::kernel::SpherePoint;

use super::jacobi::gauss_legendre;

/// Deterministic rules must have weights summing to one within this.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SphereRuleKind {
    CircleTrapezoid,
    ProductGauss,
    MonteCarlo,
    /// Read from a file; no structural guarantees beyond the rule invariants.
    Tabulated,
}

impl SphereRuleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SphereRuleKind::CircleTrapezoid => "circle-trapezoid",
            SphereRuleKind::ProductGauss => "product-gauss",
            SphereRuleKind::MonteCarlo => "monte-carlo",
            SphereRuleKind::Tabulated => "tabulated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "circle-trapezoid" => SphereRuleKind::CircleTrapezoid,
            "product-gauss" => SphereRuleKind::ProductGauss,
            "monte-carlo" => SphereRuleKind::MonteCarlo,
            "tabulated" => SphereRuleKind::Tabulated,
            _ => return None,
        })
    }
}

/// Quadrature nodes on `S^{n-1}` with positive weights summing to one.
#[derive(Debug, Clone)]
pub struct SphereRule {
    n: usize,
    nodes: Vec<SpherePoint>,
    weights: Vec<f64>,
    kind: SphereRuleKind,
    seed: Option<u64>,
}

impl SphereRule {
    /// Validates the rule invariants.
    pub fn from_parts(
        n: usize,
        nodes: Vec<SpherePoint>,
        weights: Vec<f64>,
        kind: SphereRuleKind,
        seed: Option<u64>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidRule(format!("sphere dimension n = {n} < 2")));
        }
        if nodes.len() < 2 || nodes.len() != weights.len() {
            return Err(Error::InvalidRule(format!(
                "{} nodes / {} weights (need matching counts >= 2)",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.iter().any(|z| z.dim() != n) {
            return Err(Error::InvalidRule("node dimension mismatch".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidRule("weights must be positive".into()));
        }
        let total = compensated_sum(&weights);
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidRule(format!("weights sum to {total}, not 1")));
        }
        if kind == SphereRuleKind::MonteCarlo && seed.is_none() {
            return Err(Error::InvalidRule("monte-carlo rule without a seed".into()));
        }
        Ok(Self { n, nodes, weights, kind, seed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[SpherePoint] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> SphereRuleKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SpherePoint, f64)> + '_ {
        self.nodes.iter().zip(self.weights.iter().copied())
    }
}

/// Builds the default rule of roughly `size` nodes for `S^{n-1}`:
/// equally spaced points for `n = 2`, a Gauss–Legendre × azimuth product for
/// `n = 3` (`size ≈ m × 2m`), and seeded Monte Carlo for `n >= 4`.
pub fn build_sphere_rule(n: usize, size: usize, seed: Option<u64>) -> Result<SphereRule> {
    if size < 2 {
        return Err(Error::InvalidRule(format!("rule size {size} < 2")));
    }
    match n {
        0 | 1 => Err(Error::InvalidRule(format!("sphere dimension n = {n} < 2"))),
        2 => build_circle_rule(size),
        3 => {
            let polar = ((size as f64 / 2.0).sqrt().round() as usize).max(2);
            let azimuth = (size / polar).max(2);
            build_product_rule(polar, azimuth)
        }
        _ => {
            let seed = seed.ok_or_else(|| Error::InvalidRule("monte-carlo rule for n >= 4 needs a seed".into()))?;
            build_monte_carlo_rule(n, size, seed)
        }
    }
}

/// `size` equally spaced points on the circle, the first at `e₁`.
pub fn build_circle_rule(size: usize) -> Result<SphereRule> {
    let w = 1.0 / size as f64;
    let nodes = (0..size)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / size as f64;
            SpherePoint::from_unit(vec![a.cos(), a.sin()])
        })
        .collect();
    SphereRule::from_parts(2, nodes, vec![w; size], SphereRuleKind::CircleTrapezoid, None)
}

/// Gauss–Legendre in `ζ₁` (the polar axis is `e₁`) times a uniform azimuth grid on `S²`.
pub fn build_product_rule(polar: usize, azimuth: usize) -> Result<SphereRule> {
    if polar < 2 || azimuth < 2 {
        return Err(Error::InvalidRule(format!("product rule {polar}x{azimuth} too small")));
    }
    let (t, wt) = gauss_legendre(polar)?;
    let mut nodes = Vec::with_capacity(polar * azimuth);
    let mut weights = Vec::with_capacity(polar * azimuth);
    for (ti, wi) in t.iter().zip(&wt) {
        let s = (1.0 - ti * ti).sqrt();
        for j in 0..azimuth {
            let psi = 2.0 * PI * (j as f64 + 0.5) / azimuth as f64;
            nodes.push(SpherePoint::from_unit(vec![*ti, s * psi.cos(), s * psi.sin()]));
            weights.push(0.5 * wi / azimuth as f64);
        }
    }
    SphereRule::from_parts(3, nodes, weights, SphereRuleKind::ProductGauss, None)
}

/// Uniform random directions from normalized standard Gaussian vectors.
pub fn build_monte_carlo_rule(n: usize, size: usize, seed: u64) -> Result<SphereRule> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::with_capacity(size);
    while nodes.len() < size {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        if let Ok(z) = SpherePoint::from_direction(&v) {
            nodes.push(z);
        }
    }
    let w = 1.0 / size as f64;
    SphereRule::from_parts(n, nodes, vec![w; size], SphereRuleKind::MonteCarlo, Some(seed))
}

/// Neumaier summation; plain summation of `N` equal weights drifts by `~N ε`.
fn compensated_sum(v: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0;
    for &x in v {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

/// An integral value with a standard error for Monte Carlo rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: Option<f64>,
}

/// `Σ w_i f(ζ_i)`.
pub fn integrate_sphere<F: Fn(&SpherePoint) -> f64>(rule: &SphereRule, f: F) -> f64 {
    rule.iter().map(|(z, w)| w * f(z)).sum()
}

/// Fallible version of [`integrate_sphere`].
pub fn try_integrate_sphere<F: Fn(&SpherePoint) -> Result<f64>>(rule: &SphereRule, f: F) -> Result<f64> {
    let mut acc = 0.0;
    for (z, w) in rule.iter() {
        acc += w * f(z)?;
    }
    Ok(acc)
}

/// Integral plus the sample standard error when the rule is Monte Carlo.
pub fn integrate_sphere_estimate<F: Fn(&SpherePoint) -> f64>(rule: &SphereRule, f: F) -> Estimate {
    if rule.kind() != SphereRuleKind::MonteCarlo {
        return Estimate { value: integrate_sphere(rule, f), std_error: None };
    }
    let vals: Vec<f64> = rule.nodes().iter().map(&f).collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Estimate { value: mean, std_error: Some((var / n).sqrt()) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_monte_carlo_rules_build() {
        for size in [40_000, 123_457, 400_000] {
            assert_eq!(build_monte_carlo_rule(4, size, 3).unwrap().len(), size);
        }
    }

    #[test]
    fn circle_rule_is_uniform() {
        let rule = build_sphere_rule(2, 64, None).unwrap();
        assert_eq!(rule.len(), 64);
        assert!(rule.weights().iter().all(|&w| w == 1.0 / 64.0));
        assert_eq!(rule.kind(), SphereRuleKind::CircleTrapezoid);
    }

    #[test]
    fn product_rule_shape_and_moment() {
        let rule = build_sphere_rule(3, 64 * 128, None).unwrap();
        assert_eq!(rule.len(), 64 * 128);
        let m = integrate_sphere(&rule, |z| z.coords()[0].powi(2));
        assert!((m - 1.0 / 3.0).abs() < 1e-12);
        let m = integrate_sphere(&rule, |z| z.coords()[2].powi(2));
        assert!((m - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn constants_and_odd_functions() {
        for (n, seed) in [(2, None), (3, None), (4, Some(7)), (5, Some(7))] {
            let rule = build_sphere_rule(n, 4096, seed).unwrap();
            assert!((integrate_sphere(&rule, |_| 2.5) - 2.5).abs() < 1e-12);
            if seed.is_none() {
                assert!(integrate_sphere(&rule, |z| z.coords()[0]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn monte_carlo_needs_seed_and_is_reproducible() {
        assert!(build_sphere_rule(4, 100, None).is_err());
        let a = build_sphere_rule(4, 100, Some(42)).unwrap();
        let b = build_sphere_rule(4, 100, Some(42)).unwrap();
        let c = build_sphere_rule(4, 100, Some(43)).unwrap();
        assert_eq!(a.nodes(), b.nodes());
        assert_ne!(a.nodes(), c.nodes());
    }

    #[test]
    fn monte_carlo_moments_within_three_sigma() {
        let rule = build_monte_carlo_rule(5, 20000, 11).unwrap();
        for k in 0..5 {
            let e = integrate_sphere_estimate(&rule, |z| z.coords()[k]);
            assert!(e.value.abs() <= 3.0 * e.std_error.unwrap());
            let e = integrate_sphere_estimate(&rule, |z| z.coords()[k].powi(2));
            assert!((e.value - 0.2).abs() <= 3.0 * e.std_error.unwrap());
        }
    }

    #[test]
    fn rejects_invalid_parts() {
        let z = SpherePoint::e1(2);
        assert!(build_sphere_rule(2, 1, None).is_err());
        assert!(SphereRule::from_parts(2, vec![z.clone(), z.clone()], vec![0.5, 0.4], SphereRuleKind::Tabulated, None).is_err());
        assert!(SphereRule::from_parts(2, vec![z.clone(), z.clone()], vec![1.5, -0.5], SphereRuleKind::Tabulated, None).is_err());
        assert!(SphereRule::from_parts(2, vec![z.clone(), z], vec![0.5, 0.5], SphereRuleKind::Tabulated, None).is_ok());
    }
}
