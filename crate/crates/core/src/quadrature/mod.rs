//! σ-normalized integration over `S^{n-1}`.

mod format;
mod jacobi;
mod sphere;
mod zonal;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use format::{read_rule, write_rule, RULE_MAGIC};
pub use jacobi::{gauss_jacobi_symmetric, gauss_legendre, AngularGauss};
pub use sphere::{
    build_circle_rule, build_monte_carlo_rule, build_product_rule, build_sphere_rule, integrate_sphere,
    integrate_sphere_estimate, try_integrate_sphere, Estimate, SphereRule, SphereRuleKind, WEIGHT_SUM_TOL,
};
pub use zonal::{
    build_graded_zonal_rule, build_slice_rule, build_zonal_rule, integrate_zonal, integrate_zonal_nodes, SliceRule,
    ZonalKind, ZonalNode, ZonalRule,
};

/// `base * ceil(1/(1-r))`, capped at `cap`.
pub fn adaptive_size_for(r: f64, base: usize, cap: usize) -> usize {
    // ceil(1/(1-0.9)) must be 10, not 11
    let factor = ((1.0 / (1.0 - r)) * (1.0 - 1e-12)).ceil().max(1.0);
    let size = base as f64 * factor;
    if size >= cap as f64 {
        cap
    } else {
        size as usize
    }
}

/// Sizes and seed used by [`RuleFactory`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RuleConfig {
    /// Gauss–Jacobi zonal size is `zonal_base * ceil(1/(1-r))`.
    pub zonal_base: usize,
    /// Above this Gauss–Jacobi size the graded rule is used instead.
    pub gauss_jacobi_max: usize,
    /// Gauss–Legendre points per panel of the graded rule.
    pub graded_order: usize,
    /// Nodes of the `S^{n-2}` rule in two-axis reductions.
    pub slice_size: usize,
    /// Circle rule size is `circle_base * ceil(1/(1-r))`.
    pub circle_base: usize,
    /// Polar size of the `n = 3` product rule is `product_base * ceil(1/(1-r))`.
    pub product_base: usize,
    pub product_azimuth: usize,
    /// Monte Carlo size is `mc_base * ceil(1/(1-r))`.
    pub mc_base: usize,
    /// Cap for circle and Monte Carlo rules.
    pub max_nodes: usize,
    pub seed: u64,
}

impl Default for RuleConfig {
    fn default() -> Self {
        Self {
            zonal_base: 256,
            gauss_jacobi_max: 8192,
            graded_order: 16,
            slice_size: 128,
            circle_base: 256,
            product_base: 64,
            product_azimuth: 256,
            mc_base: 20_000,
            max_nodes: 2_000_000,
            seed: 20_240_601,
        }
    }
}

impl RuleConfig {
    /// Every size doubled, for stability checks.
    pub fn doubled(&self) -> Self {
        Self {
            zonal_base: 2 * self.zonal_base,
            gauss_jacobi_max: 2 * self.gauss_jacobi_max,
            graded_order: 2 * self.graded_order,
            slice_size: 2 * self.slice_size,
            circle_base: 2 * self.circle_base,
            product_base: 2 * self.product_base,
            product_azimuth: 2 * self.product_azimuth,
            mc_base: 2 * self.mc_base,
            max_nodes: 2 * self.max_nodes,
            seed: self.seed,
        }
    }
}

type Cache<K, V> = Mutex<HashMap<K, Arc<V>>>;

fn cached<K, V, F>(cache: &Cache<K, V>, key: K, build: F) -> Result<Arc<V>>
where
    K: std::hash::Hash + Eq + Clone,
    F: FnOnce() -> Result<V>,
{
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Ok(Arc::clone(v));
    }
    // Built outside the lock; a concurrent duplicate build is harmless.
    let v = Arc::new(build()?);
    Ok(Arc::clone(cache.lock().unwrap().entry(key).or_insert(v)))
}

/// Chooses and caches quadrature rules by dimension and evaluation radius.
#[derive(Debug, Default)]
pub struct RuleFactory {
    config: RuleConfig,
    zonal: Cache<(usize, usize), ZonalRule>,
    slice: Cache<(usize, usize), SliceRule>,
    sphere: Cache<(usize, usize), SphereRule>,
}

impl RuleFactory {
    pub fn new(config: RuleConfig) -> Self {
        Self { config, ..Default::default() }
    }

    pub fn config(&self) -> &RuleConfig {
        &self.config
    }

    /// Zonal rule resolving the kernel at radius `r`: Gauss–Jacobi while its
    /// adaptive size stays within `gauss_jacobi_max` (and `n >= 3`), graded otherwise.
    pub fn zonal(&self, n: usize, r: f64) -> Result<Arc<ZonalRule>> {
        let c = &self.config;
        let size = adaptive_size_for(r, c.zonal_base, usize::MAX);
        if n >= 3 && size <= c.gauss_jacobi_max {
            cached(&self.zonal, (n, size), || build_zonal_rule(n, size))
        } else {
            Ok(Arc::new(build_graded_zonal_rule(n, 1.0 - r, c.graded_order)?))
        }
    }

    pub fn slice(&self, n: usize) -> Result<Arc<SliceRule>> {
        self.slice_sized(n, self.config.slice_size)
    }

    pub fn slice_sized(&self, n: usize, size: usize) -> Result<Arc<SliceRule>> {
        cached(&self.slice, (n, size), || build_slice_rule(n, size))
    }

    /// General-purpose rule for radius `r`, with the concentration point at `e₁`.
    pub fn sphere(&self, n: usize, r: f64) -> Result<Arc<SphereRule>> {
        let c = &self.config;
        match n {
            2 => {
                let size = adaptive_size_for(r, c.circle_base, c.max_nodes);
                cached(&self.sphere, (n, size), || build_circle_rule(size))
            }
            3 => {
                let polar = adaptive_size_for(r, c.product_base, c.gauss_jacobi_max);
                cached(&self.sphere, (n, polar), || build_product_rule(polar, c.product_azimuth))
            }
            _ => {
                let size = adaptive_size_for(r, c.mc_base, c.max_nodes);
                cached(&self.sphere, (n, size), || build_monte_carlo_rule(n, size, c.seed))
            }
        }
    }

    /// Short description of the rules used at radius `r`, for output headers.
    pub fn describe(&self, n: usize, r: f64) -> String {
        let c = &self.config;
        let size = adaptive_size_for(r, c.zonal_base, usize::MAX);
        let zonal = if n >= 3 && size <= c.gauss_jacobi_max {
            format!("gauss-jacobi:{size}")
        } else {
            format!("graded:order{}", c.graded_order)
        };
        format!("zonal={zonal} slice={} ", c.slice_size)
            + &match n {
                2 => format!("general=circle-trapezoid:{}", adaptive_size_for(r, c.circle_base, c.max_nodes)),
                3 => format!(
                    "general=product-gauss:{}x{}",
                    adaptive_size_for(r, c.product_base, c.gauss_jacobi_max),
                    c.product_azimuth
                ),
                _ => format!("general=monte-carlo:{}:seed{}", adaptive_size_for(r, c.mc_base, c.max_nodes), c.seed),
            }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptive_sizes() {
        let cap = RuleConfig::default().gauss_jacobi_max;
        assert_eq!(adaptive_size_for(0.0, 64, cap), 64);
        assert_eq!(adaptive_size_for(0.9, 64, cap), 640);
        assert_eq!(adaptive_size_for(0.999, 64, cap), cap);
        assert_eq!(adaptive_size_for(0.5, 64, cap), 128);
        assert_eq!(adaptive_size_for(0.95, 256, usize::MAX), 5120);
    }

    #[test]
    fn factory_switches_to_graded_near_the_sphere() {
        let f = RuleFactory::default();
        assert_eq!(f.zonal(3, 0.95).unwrap().kind(), ZonalKind::GaussJacobi);
        assert_eq!(f.zonal(3, 0.95).unwrap().len(), 5120);
        assert_eq!(f.zonal(3, 0.99).unwrap().kind(), ZonalKind::Graded);
        assert_eq!(f.zonal(2, 0.1).unwrap().kind(), ZonalKind::Graded);
    }

    #[test]
    fn factory_caches() {
        let f = RuleFactory::default();
        let a = f.zonal(4, 0.5).unwrap();
        let b = f.zonal(4, 0.5).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        let s = f.sphere(4, 0.0).unwrap();
        assert_eq!(s.kind(), SphereRuleKind::MonteCarlo);
        assert_eq!(s.len(), 20_000);
    }
}
