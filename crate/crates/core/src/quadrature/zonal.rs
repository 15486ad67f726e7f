//! One-dimensional reductions of sphere integrals.
//!
//! For `g` depending only on `t = ζ·e₁`,
//!
//! ```text
//! ∫_{S^{n-1}} g(ζ₁) dσ(ζ) = ∫_{-1}^{1} g(t) (1-t²)^{(n-3)/2} dt / B_n
//!                         = ∫_0^π g(cos α) sin^{n-2}α dα / B_n.
//! ```
//!
//! [`ZonalRule`] discretizes this measure either with a Gauss–Jacobi rule in `t`
//! or with a composite Gauss–Legendre rule in `α` graded geometrically towards
//! `α = 0`; the latter resolves kernels concentrated in a cap of radius `1-r`
//! at any `r < 1`. [`SliceRule`] discretizes the analogous measure
//! `(1-s²)^{(n-4)/2} ds` on `S^{n-2}`, used for integrands depending on two
//! orthogonal coordinates.

use crate::error::{Error, Result};
use crate::specfun::log_gamma;

use super::jacobi::{gauss_jacobi_symmetric, gauss_legendre};

/// Number of halvings below the kernel scale in the graded rule.
const GRADED_INNER_LEVELS: i32 = 12;
/// Largest panel width (radians) in the graded rule.
const GRADED_MAX_PANEL: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZonalNode {
    /// `t = cos α`
    pub t: f64,
    /// `1 - t`, accurate near the pole
    pub gap: f64,
    /// `sin α = sqrt(1 - t²)`
    pub sin: f64,
}

impl ZonalNode {
    pub fn from_angle(alpha: f64) -> Self {
        let h = (0.5 * alpha).sin();
        Self { t: alpha.cos(), gap: 2.0 * h * h, sin: alpha.sin() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZonalKind {
    GaussJacobi,
    Graded,
}

#[derive(Debug, Clone)]
pub struct ZonalRule {
    n: usize,
    kind: ZonalKind,
    nodes: Vec<ZonalNode>,
    weights: Vec<f64>,
}

impl ZonalRule {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> ZonalKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[ZonalNode] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn abscissae(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|z| z.t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ZonalNode, f64)> + '_ {
        self.nodes.iter().zip(self.weights.iter().copied())
    }
}

/// m-point Gauss–Jacobi rule for the weight `(1-t²)^{(n-3)/2}`, normalized to total mass one.
pub fn build_zonal_rule(n: usize, m: usize) -> Result<ZonalRule> {
    if n < 3 {
        return Err(Error::InvalidRule(format!("Gauss-Jacobi zonal rule needs n >= 3, got {n}")));
    }
    if m < 2 {
        return Err(Error::InvalidRule(format!("zonal rule needs at least 2 nodes, got {m}")));
    }
    let g = gauss_jacobi_symmetric(m, 0.5 * (n as f64 - 3.0))?;
    Ok(ZonalRule {
        n,
        kind: ZonalKind::GaussJacobi,
        nodes: g.angles.iter().map(|&a| ZonalNode::from_angle(a)).collect(),
        weights: g.weights,
    })
}

/// `B_n = ∫_0^π sin^{n-2}α dα = √π Γ((n-1)/2) / Γ(n/2)`.
fn angular_mass(n: usize) -> Result<f64> {
    let nf = n as f64;
    Ok((0.5 * std::f64::consts::PI.ln() + log_gamma(0.5 * (nf - 1.0))? - log_gamma(0.5 * nf)?).exp())
}

/// Composite Gauss–Legendre rule in the polar angle with panels
/// `[0, s 2^{-12}], ..., [s/2, s], [s, 2s], ...` graded around `scale = s`,
/// then uniform panels up to `π`.
pub fn build_graded_zonal_rule(n: usize, scale: f64, order: usize) -> Result<ZonalRule> {
    if n < 2 {
        return Err(Error::InvalidRule(format!("sphere dimension n = {n} < 2")));
    }
    if order < 2 {
        return Err(Error::InvalidRule(format!("panel order {order} < 2")));
    }
    if !(scale > 0.0) {
        return Err(Error::InvalidRule(format!("grading scale {scale} must be positive")));
    }
    let pi = std::f64::consts::PI;
    let s = scale.min(GRADED_MAX_PANEL);
    let mut breaks = vec![0.0];
    for j in (1..=GRADED_INNER_LEVELS).rev() {
        breaks.push(s * 2f64.powi(-j));
    }
    let mut b = s;
    while b < GRADED_MAX_PANEL {
        breaks.push(b);
        b *= 2.0;
    }
    let start = *breaks.last().unwrap();
    let panels = ((pi - start) / GRADED_MAX_PANEL).ceil().max(1.0) as usize;
    for k in 1..=panels {
        breaks.push(start + (pi - start) * k as f64 / panels as f64);
    }

    let (gx, gw) = gauss_legendre(order)?;
    let mass = angular_mass(n)?;
    let power = n as i32 - 2;
    let mut nodes = Vec::with_capacity((breaks.len() - 1) * order);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in breaks.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, w) in gx.iter().zip(&gw) {
            let alpha = mid + half * x;
            let node = ZonalNode::from_angle(alpha);
            nodes.push(node);
            weights.push(w * half * node.sin.powi(power) / mass);
        }
    }
    Ok(ZonalRule { n, kind: ZonalKind::Graded, nodes, weights })
}

/// `Σ w_i g(t_i)`.
pub fn integrate_zonal<G: Fn(f64) -> f64>(rule: &ZonalRule, g: G) -> f64 {
    rule.iter().map(|(z, w)| w * g(z.t)).sum()
}

/// Like [`integrate_zonal`] but hands the integrand the full node (`t`, `1-t`, `sin α`).
pub fn integrate_zonal_nodes<G: Fn(&ZonalNode) -> f64>(rule: &ZonalRule, g: G) -> f64 {
    rule.iter().map(|(z, w)| w * g(z)).sum()
}

/// Rule for the measure on `[-1,1]` induced by `ζ ↦ ζ·u` on `S^{n-2}`,
/// i.e. `(1-s²)^{(n-4)/2} ds` normalized (two atoms `±1` when `n = 2`).
#[derive(Debug, Clone)]
pub struct SliceRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl SliceRule {
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn build_slice_rule(n: usize, size: usize) -> Result<SliceRule> {
    if n < 2 {
        return Err(Error::InvalidRule(format!("sphere dimension n = {n} < 2")));
    }
    if n == 2 {
        return Ok(SliceRule { nodes: vec![-1.0, 1.0], weights: vec![0.5, 0.5] });
    }
    if size < 2 {
        return Err(Error::InvalidRule(format!("slice rule needs at least 2 nodes, got {size}")));
    }
    let g = gauss_jacobi_symmetric(size, 0.5 * (n as f64 - 4.0))?;
    Ok(SliceRule { nodes: g.angles.iter().map(|a| a.cos()).collect(), weights: g.weights })
}
