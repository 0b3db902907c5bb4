//! Empirical Łojasiewicz exponents on shrinking spheres and verdicts for the
//! classical sufficiency conditions.
//!
//! A condition of the form `F(x) >= C |x|^a` near the origin is probed by
//! minimizing `F` on spheres of radius `eps_k`, fitting `log min F` against
//! `log eps_k`, and comparing the fitted slope to `a`. The outcome is evidence,
//! never a proof, and every verdict says so.

mod fit;
mod sphere;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use fit::{fit_power_law, linear_fit, ExponentEstimate, FitError, MIN_SCALES};
pub use sphere::{grid_directions, min_on_sphere, min_on_sphere_constrained, SphereMin, SphereStrategy};

use crate::error::{Error, Result};
use crate::quantities::{euclid, KuoThom, MapGerm};

pub const CAVEAT: &str = "numerical evidence, not proof";

/// Radii, sphere search and tolerance settings shared by all scans.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanConfig {
    /// Strictly decreasing sphere radii.
    pub radii: Vec<f64>,
    pub strategy: SphereStrategy,
    /// Allowed excess of the fitted slope over the target exponent.
    pub tolerance: f64,
    /// A sphere minimum at or below `zero_rel_tol^m` times the sphere maximum
    /// counts as a zero of a quantity of degree `m` (see [`is_numerical_zero`]).
    pub zero_rel_tol: f64,
}

pub fn default_radii() -> Vec<f64> {
    (0..8).map(|k| 0.1 * 0.5f64.powi(k)).collect()
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            radii: default_radii(),
            strategy: SphereStrategy::default(),
            tolerance: 0.1,
            zero_rel_tol: 1e-10,
        }
    }
}

impl ScanConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.strategy.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.radii.len() < MIN_SCALES {
            return Err(Error::InvalidArgument(format!(
                "at least {MIN_SCALES} radii are required, got {}",
                self.radii.len()
            )));
        }
        if self.radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(Error::InvalidArgument("radii must be positive".into()));
        }
        if self.radii.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidArgument("radii must be strictly decreasing".into()));
        }
        if !(self.tolerance >= 0.0) || !(self.zero_rel_tol >= 0.0) {
            return Err(Error::InvalidArgument("tolerances must be nonnegative".into()));
        }
        if self.strategy.grid_per_angle == 0 || self.strategy.multistart == 0 || self.strategy.directions == 0 {
            return Err(Error::InvalidArgument("grid sizes must be positive".into()));
        }
        Ok(())
    }
}

/// Sphere minima of one quantity over the radius schedule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialScan {
    pub radii: Vec<f64>,
    /// `None` where the sphere had no admissible point.
    pub min_values: Vec<Option<f64>>,
    pub max_values: Vec<f64>,
    /// Degree of the quantity in the underlying polynomial values; the zero
    /// test scales the tolerance by this power.
    pub homogeneity: u32,
    pub strategy: SphereStrategy,
}

impl RadialScan {
    /// `(radius, min)` pairs for the regression; vanishing minima map to `None`,
    /// spheres without admissible points are dropped.
    pub fn fit_points(&self, zero_rel_tol: f64) -> Vec<(f64, Option<f64>)> {
        self.radii
            .iter()
            .zip(&self.min_values)
            .zip(&self.max_values)
            .filter_map(|((&r, &v), &mx)| {
                let v = v?;
                Some((r, (!is_numerical_zero(v, mx, self.homogeneity, zero_rel_tol)).then_some(v)))
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.min_values.iter().all(Option::is_none)
    }

    /// `radius,min_value` rows; empty spheres are written as `nan`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("radius,min_value\n");
        for (r, v) in self.radii.iter().zip(&self.min_values) {
            match v {
                Some(v) => s.push_str(&format!("{},{}\n", crate::report::fmt_float(*r), crate::report::fmt_float(*v))),
                None => s.push_str(&format!("{},nan\n", crate::report::fmt_float(*r))),
            }
        }
        s
    }
}

/// `v` counts as zero when `v <= max * tol^degree`. A quantity of degree `m`
/// in polynomial values with a simple zero on the sphere leaves a residual of
/// order `step^m` after a search of resolution `step`.
pub fn is_numerical_zero(v: f64, max: f64, degree: u32, tol: f64) -> bool {
    v <= 0.0 || v <= max * tol.powi(degree.max(1) as i32)
}

pub fn radial_scan<F, A>(f: &F, admissible: &A, n: usize, cfg: &ScanConfig) -> Result<RadialScan>
where
    F: Fn(&[f64]) -> f64 + Sync,
    A: Fn(&[f64]) -> bool + Sync,
{
    cfg.validate()?;
    let mins = cfg
        .radii
        .par_iter()
        .map(|&eps| min_on_sphere_constrained(f, admissible, n, eps, &cfg.strategy))
        .collect::<Result<Vec<_>>>()?;
    Ok(RadialScan {
        radii: cfg.radii.clone(),
        min_values: mins
            .iter()
            .map(|m| (m.admissible_points > 0).then_some(m.value))
            .collect(),
        max_values: mins.iter().map(|m| m.max_value).collect(),
        homogeneity: 1,
        strategy: cfg.strategy.clone(),
    })
}

pub fn estimate_exponent(scan: &RadialScan, cfg: &ScanConfig) -> std::result::Result<ExponentEstimate, FitError> {
    fit_power_law(&scan.fit_points(cfg.zero_rel_tol))
}

/// The quantities a scan can target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Quantity {
    /// `|grad f|` for scalar germs, `sum |p-minor|` for maps.
    Gradient,
    /// `K_m`
    Kuo(u32),
    /// `T_m`
    Thom(u32),
}

impl Quantity {
    pub fn homogeneity(self) -> u32 {
        match self {
            Quantity::Gradient => 1,
            Quantity::Kuo(m) | Quantity::Thom(m) => m,
        }
    }

    pub fn eval(self, kt: &KuoThom, x: &[f64]) -> f64 {
        match self {
            Quantity::Gradient => kt.gradient_size(x),
            Quantity::Kuo(m) => kt.kuo_unchecked(m, x),
            Quantity::Thom(m) => kt.thom_unchecked(m, x),
        }
    }
}

pub fn scan_quantity(kt: &KuoThom, q: Quantity, cfg: &ScanConfig) -> Result<RadialScan> {
    let mut scan = radial_scan(&|x: &[f64]| q.eval(kt, x), &|_: &[f64]| true, kt.n(), cfg)?;
    scan.homogeneity = q.homogeneity();
    Ok(scan)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionVerdict {
    pub condition: String,
    pub holds: bool,
    pub estimate: Option<ExponentEstimate>,
    pub target_exponent: f64,
    pub tolerance: f64,
    pub diagnostic: Option<String>,
    pub caveat: String,
}

fn caveat_for(cfg: &ScanConfig) -> String {
    let lo = cfg.radii.last().copied().unwrap_or(0.0);
    let hi = cfg.radii.first().copied().unwrap_or(0.0);
    format!(
        "{CAVEAT}; sampled on spheres of radius {} to {}, behaviour at smaller scales is not observed",
        crate::report::fmt_float(lo),
        crate::report::fmt_float(hi)
    )
}

/// Verdict for `F >= C |x|^target` from a finished scan.
pub fn verdict_from_scan(condition: &str, scan: &RadialScan, target: f64, cfg: &ScanConfig) -> ConditionVerdict {
    let mut v = ConditionVerdict {
        condition: condition.to_string(),
        holds: false,
        estimate: None,
        target_exponent: target,
        tolerance: cfg.tolerance,
        diagnostic: None,
        caveat: caveat_for(cfg),
    };
    if scan.is_empty() {
        v.holds = true;
        v.diagnostic = Some("admissible region empty on every sphere; holds vacuously".into());
        return v;
    }
    match estimate_exponent(scan, cfg) {
        Ok(est) => {
            v.holds = est.slope <= target + cfg.tolerance;
            v.estimate = Some(est);
        }
        Err(e) => v.diagnostic = Some(e.to_string()),
    }
    v
}

fn require_scalar(f: &MapGerm) -> Result<()> {
    if f.p() != 1 {
        return Err(Error::Precondition(format!(
            "condition defined for scalar germs, got p = {}",
            f.p()
        )));
    }
    Ok(())
}

/// `|grad f(x)| >= C |x|^(r-1)` near 0.
pub fn check_kuiper_kuo(f: &MapGerm, r: u64, cfg: &ScanConfig) -> Result<ConditionVerdict> {
    require_scalar(f)?;
    let kt = KuoThom::new(f);
    let scan = scan_quantity(&kt, Quantity::Gradient, cfg)?;
    Ok(verdict_from_scan("kuiper-kuo", &scan, r as f64 - 1.0, cfg))
}

/// Membership in the horn neighbourhood `|f(x)| <= wbar |x|^r`.
pub fn horn_membership(kt: &KuoThom, r: u64, wbar: f64, x: &[f64]) -> bool {
    kt.norm_f(x) <= wbar * euclid(x.iter().copied()).powi(r as i32)
}

/// The Kuiper-Kuo inequality restricted to the horn neighbourhood of degree `r`
/// and width `wbar`.
pub fn check_kuo(f: &MapGerm, r: u64, wbar: f64, cfg: &ScanConfig) -> Result<ConditionVerdict> {
    if !(wbar > 0.0) {
        return Err(Error::InvalidArgument(format!("horn width must be positive, got {wbar}")));
    }
    let kt = KuoThom::new(f);
    let scan = radial_scan(
        &|x: &[f64]| kt.gradient_size(x),
        &|x: &[f64]| horn_membership(&kt, r, wbar, x),
        f.n(),
        cfg,
    )?;
    Ok(verdict_from_scan("kuo", &scan, r as f64 - 1.0, cfg))
}

/// `|x| |grad f| + |f| >= C |x|^r`, in the `K_1` form valid for maps.
pub fn check_condition_ktilde(f: &MapGerm, r: u64, cfg: &ScanConfig) -> Result<ConditionVerdict> {
    let kt = KuoThom::new(f);
    let scan = scan_quantity(&kt, Quantity::Kuo(1), cfg)?;
    Ok(verdict_from_scan("k-tilde", &scan, r as f64, cfg))
}

/// `T_2(f, x) >= K |x|^(2r)`.
pub fn check_thom_inequality(f: &MapGerm, r: u64, cfg: &ScanConfig) -> Result<ConditionVerdict> {
    check_thom_quantity(f, 2, r, cfg)
}

/// `K_m(f, x) >= C |x|^(m r)`.
pub fn check_kuo_quantity(f: &MapGerm, m: u32, r: u64, cfg: &ScanConfig) -> Result<ConditionVerdict> {
    let kt = KuoThom::new(f);
    let scan = scan_quantity(&kt, Quantity::Kuo(m), cfg)?;
    Ok(verdict_from_scan(&format!("kuo-quantity-m{m}"), &scan, (m as u64 * r) as f64, cfg))
}

/// `T_m(f, x) >= C |x|^(m r)`.
pub fn check_thom_quantity(f: &MapGerm, m: u32, r: u64, cfg: &ScanConfig) -> Result<ConditionVerdict> {
    let kt = KuoThom::new(f);
    let scan = scan_quantity(&kt, Quantity::Thom(m), cfg)?;
    Ok(verdict_from_scan(&format!("thom-quantity-m{m}"), &scan, (m as u64 * r) as f64, cfg))
}

/// Smallest `r <= r_max` for which the Kuiper-Kuo verdict holds.
pub fn sufficiency_degree_estimate(f: &MapGerm, r_max: u64, cfg: &ScanConfig) -> Result<Option<u64>> {
    require_scalar(f)?;
    let kt = KuoThom::new(f);
    let scan = scan_quantity(&kt, Quantity::Gradient, cfg)?;
    Ok((1..=r_max).find(|&r| verdict_from_scan("kuiper-kuo", &scan, r as f64 - 1.0, cfg).holds))
}

/// Largest observed `K_m / T_m` and `T_m / K_m` over random points of a ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioBounds {
    pub radius: f64,
    pub max_k_over_t: f64,
    pub max_t_over_k: f64,
    pub points_used: usize,
}

pub fn ratio_bounds(kt: &KuoThom, m: u32, radius: f64, samples: usize, seed: u64) -> RatioBounds {
    let n = kt.n();
    let mut rng = crate::rng::stream(seed, "ratio-ball");
    let pts: Vec<Vec<f64>> = (0..samples)
        .map(|_| crate::rng::ball_point(&mut rng, n, radius))
        .collect();
    let ratios: Vec<Option<(f64, f64)>> = pts
        .par_iter()
        .map(|x| {
            let k = kt.kuo_unchecked(m, x);
            let t = kt.thom_unchecked(m, x);
            (k > 0.0 && t > 0.0).then(|| (k / t, t / k))
        })
        .collect();
    let used: Vec<(f64, f64)> = ratios.into_iter().flatten().collect();
    RatioBounds {
        radius,
        max_k_over_t: used.iter().map(|r| r.0).fold(0.0, f64::max),
        max_t_over_k: used.iter().map(|r| r.1).fold(0.0, f64::max),
        points_used: used.len(),
    }
}

/// `K_m / T_m` over a deterministic polar grid of a disc in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridRatio {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub points_used: usize,
    /// Grid points where `T_m` vanishes.
    pub excluded: usize,
}

/// Samples `r = radius (i + 1/2) / n_radii`, `theta = 2 pi (j + 1/2) / n_angles`.
/// Only defined for germs in two variables.
pub fn ratio_on_polar_grid(kt: &KuoThom, m: u32, radius: f64, n_radii: usize, n_angles: usize) -> GridRatio {
    assert_eq!(kt.n(), 2, "polar grid needs n = 2");
    let mut out = GridRatio {
        min_ratio: f64::INFINITY,
        max_ratio: 0.0,
        points_used: 0,
        excluded: 0,
    };
    for i in 0..n_radii {
        let r = radius * (i as f64 + 0.5) / n_radii as f64;
        for j in 0..n_angles {
            let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n_angles as f64;
            let x = [r * th.cos(), r * th.sin()];
            let t = kt.thom_unchecked(m, &x);
            if t == 0.0 {
                out.excluded += 1;
                continue;
            }
            let q = kt.kuo_unchecked(m, &x) / t;
            out.min_ratio = out.min_ratio.min(q);
            out.max_ratio = out.max_ratio.max(q);
            out.points_used += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn germ(comps: &[&str]) -> MapGerm {
        MapGerm::parse(2, comps).unwrap()
    }

    fn cfg() -> ScanConfig {
        ScanConfig::default()
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        let mut c = cfg();
        c.radii = vec![0.1, 0.2, 0.05, 0.01];
        assert!(c.validate().is_err());
        c.radii = vec![0.1, 0.05, 0.01];
        assert!(c.validate().is_err());
    }

    #[test]
    fn exponent_of_exact_power_laws() {
        let c = cfg();
        for (k, coef) in [(1, 2.0), (2, 3.0), (3, 0.5)] {
            let f = move |x: &[f64]| coef * euclid(x.iter().copied()).powi(k);
            let scan = radial_scan(&f, &|_: &[f64]| true, 2, &c).unwrap();
            let est = estimate_exponent(&scan, &c).unwrap();
            assert!((est.slope - k as f64).abs() < 0.05);
            assert!(est.r_squared >= 0.999);
        }
    }

    #[test]
    fn kuiper_kuo_examples() {
        let c = cfg();
        assert!(check_kuiper_kuo(&germ(&["x^2 + y^2"]), 2, &c).unwrap().holds);
        assert!(check_kuiper_kuo(&germ(&["x^3 - 3*x*y^2"]), 3, &c).unwrap().holds);
        assert!(!check_kuiper_kuo(&germ(&["x^3 - 3*x*y^2"]), 2, &c).unwrap().holds);
        assert!(matches!(
            check_kuiper_kuo(&germ(&["x", "y"]), 2, &c),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn horn_examples() {
        let kt = KuoThom::new(&germ(&["x - y^2"]));
        assert!(horn_membership(&kt, 2, 1.0, &[0.25, 0.5]));
        assert!(!horn_membership(&kt, 2, 1.0, &[0.1, 0.0]));
        assert!(horn_membership(&kt, 2, 1.0, &[0.0, 0.0]));
    }

    #[test]
    fn kuo_examples() {
        let c = cfg();
        assert!(check_kuo(&germ(&["x^2 + y^2"]), 2, 1.0, &c).unwrap().holds);
        assert!(check_kuo(&germ(&["x - y^2"]), 1, 1.0, &c).unwrap().holds);
        assert!(check_kuo(&germ(&["x"]), 1, 0.0, &c).is_err());
    }

    #[test]
    fn horn_restriction_changes_the_scan() {
        let c = cfg();
        let f = germ(&["(x - y^2)^2"]);
        let kt = KuoThom::new(&f);
        let free = scan_quantity(&kt, Quantity::Gradient, &c).unwrap();
        let horn = radial_scan(
            &|x: &[f64]| kt.gradient_size(x),
            &|x: &[f64]| horn_membership(&kt, 4, 1e-3, x),
            2,
            &c,
        )
        .unwrap();
        let admissible: usize = c
            .radii
            .iter()
            .map(|&e| {
                grid_directions(2, &c.strategy)
                    .iter()
                    .filter(|d| horn_membership(&kt, 4, 1e-3, &[d[0] * e, d[1] * e]))
                    .count()
            })
            .sum();
        assert!(admissible < 8 * 720);
        assert!(horn.max_values.iter().zip(&free.max_values).all(|(h, f)| h <= f));
        assert!(horn.max_values.iter().zip(&free.max_values).any(|(h, f)| h < f));
    }

    #[test]
    fn ktilde_examples() {
        let c = cfg();
        assert!(check_condition_ktilde(&germ(&["x^2 + y^2"]), 2, &c).unwrap().holds);
        assert!(check_condition_ktilde(&germ(&["x - y^2"]), 1, &c).unwrap().holds);
        let f = germ(&["x^2*y^2"]);
        let mut prev = false;
        for r in 1..8 {
            let h = check_condition_ktilde(&f, r, &c).unwrap().holds;
            assert!(!prev || h, "verdict must be monotone in r");
            prev = h;
        }
    }

    #[test]
    fn thom_examples() {
        let c = cfg();
        assert!(check_thom_inequality(&germ(&["x^2 + y^2"]), 2, &c).unwrap().holds);
        let zero = germ(&["0"]);
        for r in 1..4 {
            let v = check_thom_inequality(&zero, r, &c).unwrap();
            assert!(!v.holds);
            assert!(v.diagnostic.is_some());
        }
        let g = germ(&["x - y^2", "x^2"]);
        let kt = KuoThom::new(&g);
        let ks = scan_quantity(&kt, Quantity::Kuo(2), &c).unwrap();
        let ts = scan_quantity(&kt, Quantity::Thom(2), &c).unwrap();
        for r in 1..=6 {
            let a = verdict_from_scan("k", &ks, 2.0 * r as f64, &c).holds;
            let b = verdict_from_scan("t", &ts, 2.0 * r as f64, &c).holds;
            assert_eq!(a, b, "r = {r}");
        }
    }

    #[test]
    fn degree_estimates() {
        let c = cfg();
        assert_eq!(sufficiency_degree_estimate(&germ(&["x^2 + y^2"]), 6, &c).unwrap(), Some(2));
        assert_eq!(sufficiency_degree_estimate(&germ(&["x^3 - 3*x*y^2"]), 6, &c).unwrap(), Some(3));
        assert_eq!(sufficiency_degree_estimate(&germ(&["x"]), 6, &c).unwrap(), Some(1));
        assert_eq!(sufficiency_degree_estimate(&germ(&["x^2*y^2"]), 3, &c).unwrap(), None);
    }

    #[test]
    fn deterministic_verdicts() {
        let c = cfg().with_seed(5);
        let f = MapGerm::parse(4, &["x1*x2 - x3^3 + x4^2"]).unwrap();
        let a = check_condition_ktilde(&f, 3, &c).unwrap();
        let b = check_condition_ktilde(&f, 3, &c).unwrap();
        assert_eq!(a, b);
    }
}
