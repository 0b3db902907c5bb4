//! Conditions relative to a closed set `Sigma` through the origin.
//!
//! `Sigma` is either a union of coordinate subspaces, where distances and jets
//! are handled exactly, or the zero set of polynomials, where the distance is a
//! numerical projection.
//!
//! Relative lower bounds `Q(x) >= c d(x, Sigma)^a` are probed by sampling a small
//! ball in dyadic bands of `d(x, Sigma)` and fitting the band minima of `Q`
//! against the distance.

use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lojasiewicz::{fit_power_law, ExponentEstimate, CAVEAT};
use crate::poly::{parse_poly, CompiledPoly, Polynomial, Rational, Vars};
use crate::quantities::{euclid, KuoThom, MapGerm};

/// Residual bound accepted for numerically projected points.
pub const PROJECTION_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SigmaSet {
    /// Union of coordinate subspaces, each given by its retained (0-based)
    /// coordinates. An empty list of retained coordinates is the origin.
    Subspaces { n: usize, retained: Vec<Vec<usize>> },
    /// Common zero set of polynomials.
    Algebraic { gens: Vec<Polynomial> },
}

impl SigmaSet {
    pub fn subspaces(n: usize, retained: Vec<Vec<usize>>) -> Result<Self> {
        if retained.is_empty() {
            return Err(Error::InvalidArgument("Sigma needs at least one subspace".into()));
        }
        let mut retained = retained;
        for s in &mut retained {
            if s.iter().any(|&i| i >= n) {
                return Err(Error::InvalidArgument(format!(
                    "subspace coordinate out of range for n = {n}"
                )));
            }
            s.sort_unstable();
            s.dedup();
        }
        Ok(SigmaSet::Subspaces { n, retained })
    }

    /// `{0}`: distances reduce to `|x|`.
    pub fn origin(n: usize) -> Self {
        SigmaSet::Subspaces {
            n,
            retained: vec![Vec::new()],
        }
    }

    pub fn algebraic(gens: Vec<Polynomial>) -> Result<Self> {
        let Some(first) = gens.first() else {
            return Err(Error::InvalidArgument("Sigma needs at least one generator".into()));
        };
        let n = first.nvars();
        for g in &gens {
            if g.nvars() != n {
                return Err(Error::InvalidArgument("generators disagree on the variable count".into()));
            }
            if !g.constant_term().is_zero() {
                return Err(Error::InvalidArgument(format!(
                    "generator {g} does not vanish at the origin"
                )));
            }
        }
        Ok(SigmaSet::Algebraic { gens })
    }

    /// Parses `subspaces: [x1], [x1,x2]` or `zeros: x2; x3`.
    pub fn parse(src: &str, n: usize) -> Result<Self> {
        let src = src.trim();
        let bad = |m: String| Error::InvalidArgument(format!("Sigma: {m}"));
        let vars = Vars::standard(n);
        if let Some(rest) = src.strip_prefix("subspaces:") {
            let rest = rest.trim();
            let mut retained = Vec::new();
            let mut s = rest;
            while !s.is_empty() {
                let s2 = s.strip_prefix('[').ok_or_else(|| bad(format!("expected '[' in '{s}'")))?;
                let close = s2.find(']').ok_or_else(|| bad("missing ']'".into()))?;
                let inner = &s2[..close];
                let mut coords = Vec::new();
                for name in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                    coords.push(vars.lookup(name).ok_or_else(|| bad(format!("unknown variable '{name}'")))?);
                }
                retained.push(coords);
                s = s2[close + 1..].trim_start();
                if let Some(after) = s.strip_prefix(',') {
                    s = after.trim_start();
                } else if !s.is_empty() {
                    return Err(bad(format!("unexpected '{s}'")));
                }
            }
            SigmaSet::subspaces(n, retained)
        } else if let Some(rest) = src.strip_prefix("zeros:") {
            let gens = rest
                .split(';')
                .map(|g| parse_poly(g.trim(), &vars))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            SigmaSet::algebraic(gens)
        } else {
            Err(bad("expected 'subspaces:' or 'zeros:'".into()))
        }
    }

    pub fn nvars(&self) -> usize {
        match self {
            SigmaSet::Subspaces { n, .. } => *n,
            SigmaSet::Algebraic { gens } => gens[0].nvars(),
        }
    }

    pub fn is_origin(&self) -> bool {
        matches!(self, SigmaSet::Subspaces { retained, .. } if retained.iter().all(Vec::is_empty))
    }

    pub fn variant(&self) -> &'static str {
        match self {
            SigmaSet::Subspaces { .. } => "coordinate-subspaces",
            SigmaSet::Algebraic { .. } => "algebraic",
        }
    }

    pub fn distance_method(&self) -> String {
        match self {
            SigmaSet::Subspaces { .. } => "exact".into(),
            SigmaSet::Algebraic { .. } => {
                format!("penalty projection, residual tolerance {PROJECTION_TOL:e}")
            }
        }
    }

    fn complement(n: usize, retained: &[usize]) -> Vec<usize> {
        (0..n).filter(|i| !retained.contains(i)).collect()
    }

    /// Distance `d(x, Sigma)`; an upper-bound estimate for algebraic sets.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.nvars(), x.len())?;
        Ok(self.nearest(x).1)
    }

    /// A point of `Sigma` realising (or, for algebraic sets, approximating) the
    /// distance, together with that distance.
    pub fn nearest(&self, x: &[f64]) -> (Vec<f64>, f64) {
        self.oracle().nearest(x)
    }

    /// Distance evaluator with the projection machinery built once.
    pub fn oracle(&self) -> DistanceOracle<'_> {
        DistanceOracle {
            sigma: self,
            projector: match self {
                SigmaSet::Algebraic { gens } => Some(AlgebraicProjector::new(gens)),
                SigmaSet::Subspaces { .. } => None,
            },
        }
    }
}

/// Nearest points of a fixed `Sigma`, reusable across many queries.
pub struct DistanceOracle<'a> {
    sigma: &'a SigmaSet,
    projector: Option<AlgebraicProjector>,
}

impl DistanceOracle<'_> {
    pub fn nearest(&self, x: &[f64]) -> (Vec<f64>, f64) {
        match (self.sigma, &self.projector) {
            (SigmaSet::Subspaces { n, retained }, _) => {
                let mut best: Option<(f64, &Vec<usize>)> = None;
                for s in retained {
                    let d = euclid(SigmaSet::complement(*n, s).into_iter().map(|i| x[i]));
                    if best.is_none_or(|b| d < b.0) {
                        best = Some((d, s));
                    }
                }
                let (d, s) = best.expect("nonempty");
                let y = (0..*n).map(|i| if s.contains(&i) { x[i] } else { 0.0 }).collect();
                (y, d)
            }
            (SigmaSet::Algebraic { .. }, Some(p)) => p.project(x),
            (SigmaSet::Algebraic { .. }, None) => unreachable!("projector built with the oracle"),
        }
    }

    /// Like [`nearest`](Self::nearest), but for algebraic sets the search
    /// starts from `hint`, a point of `Sigma` close to the answer.
    pub fn nearest_from(&self, x: &[f64], hint: &[f64]) -> (Vec<f64>, f64) {
        match &self.projector {
            Some(p) => p.project_from(x, hint),
            None => self.nearest(x),
        }
    }
}

impl fmt::Display for SigmaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaSet::Subspaces { n, retained } => {
                let vars = Vars::standard(*n);
                f.write_str("subspaces: ")?;
                for (k, s) in retained.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    let names: Vec<&str> = s.iter().map(|&i| vars.name(i)).collect();
                    write!(f, "[{}]", names.join(","))?;
                }
                Ok(())
            }
            SigmaSet::Algebraic { gens } => {
                f.write_str("zeros: ")?;
                for (k, g) in gens.iter().enumerate() {
                    if k > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{g}")?;
                }
                Ok(())
            }
        }
    }
}

struct AlgebraicProjector {
    gens: Vec<CompiledPoly>,
    grads: Vec<Vec<CompiledPoly>>,
}

impl AlgebraicProjector {
    fn new(gens: &[Polynomial]) -> Self {
        AlgebraicProjector {
            gens: gens.iter().map(CompiledPoly::new).collect(),
            grads: gens
                .iter()
                .map(|g| (0..g.nvars()).map(|i| CompiledPoly::new(&g.partial(i).unwrap())).collect())
                .collect(),
        }
    }

    fn residual(&self, y: &[f64]) -> f64 {
        self.gens.iter().map(|g| g.eval(y).abs()).fold(0.0, f64::max)
    }

    fn penalty(&self, x: &[f64], y: &[f64], mu: f64) -> f64 {
        let dist: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
        dist + mu * self.gens.iter().map(|g| g.eval(y).powi(2)).sum::<f64>()
    }

    fn penalty_grad(&self, x: &[f64], y: &[f64], mu: f64) -> Vec<f64> {
        let mut out: Vec<f64> = x.iter().zip(y).map(|(a, b)| 2.0 * (b - a)).collect();
        for (g, gg) in self.gens.iter().zip(&self.grads) {
            let v = g.eval(y);
            for (o, d) in out.iter_mut().zip(gg) {
                *o += 2.0 * mu * v * d.eval(y);
            }
        }
        out
    }

    /// Gauss-Newton step towards `{g = 0}` with minimal norm.
    fn newton_polish(&self, y: &mut [f64]) {
        let k = self.gens.len();
        for _ in 0..20 {
            if self.residual(y) <= PROJECTION_TOL * 1e-3 {
                return;
            }
            let vals: Vec<f64> = self.gens.iter().map(|g| g.eval(y)).collect();
            let jac: Vec<Vec<f64>> = self.grads.iter().map(|gg| gg.iter().map(|d| d.eval(y)).collect()).collect();
            // (J J^T + tiny I) lambda = vals
            let mut a = vec![vec![0.0; k + 1]; k];
            for i in 0..k {
                for j in 0..k {
                    a[i][j] = jac[i].iter().zip(&jac[j]).map(|(p, q)| p * q).sum();
                }
                a[i][i] += 1e-30;
                a[i][k] = vals[i];
            }
            let Some(lambda) = solve(a) else { return };
            for (c, yc) in y.iter_mut().enumerate() {
                *yc -= (0..k).map(|i| jac[i][c] * lambda[i]).sum::<f64>();
            }
        }
    }

    /// Penalty descent as a warm start, then alternating tangent steps and
    /// Gauss-Newton returns to the variety.
    fn descend(&self, x: &[f64], start: Vec<f64>) -> Vec<f64> {
        let mut y = start;
        let mut mu = 1.0;
        while mu <= 1e4 {
            for _ in 0..50 {
                let grad = self.penalty_grad(x, &y, mu);
                let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
                if gnorm2 < 1e-40 {
                    break;
                }
                let f0 = self.penalty(x, &y, mu);
                let mut step = 1.0 / (2.0 + mu);
                let mut moved = false;
                for _ in 0..40 {
                    let trial: Vec<f64> = y.iter().zip(&grad).map(|(a, g)| a - step * g).collect();
                    if self.penalty(x, &trial, mu) <= f0 - 1e-4 * step * gnorm2 {
                        y = trial;
                        moved = true;
                        break;
                    }
                    step *= 0.5;
                }
                if !moved {
                    break;
                }
            }
            mu *= 10.0;
        }
        self.newton_polish(&mut y);
        self.slide(x, y)
    }

    /// Tangent steps along the variety while the distance to `x` decreases.
    fn slide(&self, x: &[f64], mut y: Vec<f64>) -> Vec<f64> {
        for _ in 0..60 {
            let Some(vt) = self.tangent_part(&y, x) else { break };
            let vn = euclid(vt.iter().copied());
            if vn <= 1e-14 * euclid(x.iter().copied()).max(1e-300) {
                break;
            }
            let mut trial: Vec<f64> = y.iter().zip(&vt).map(|(a, b)| a + b).collect();
            self.newton_polish(&mut trial);
            let d_old = euclid(x.iter().zip(&y).map(|(a, b)| a - b));
            let d_new = euclid(x.iter().zip(&trial).map(|(a, b)| a - b));
            if d_new >= d_old || self.residual(&trial) > PROJECTION_TOL {
                break;
            }
            y = trial;
        }
        y
    }

    /// Component of `x - y` tangent to the variety at `y`.
    fn tangent_part(&self, y: &[f64], x: &[f64]) -> Option<Vec<f64>> {
        let k = self.gens.len();
        let v: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        let jac: Vec<Vec<f64>> = self.grads.iter().map(|gg| gg.iter().map(|d| d.eval(y)).collect()).collect();
        let mut a = vec![vec![0.0; k + 1]; k];
        for i in 0..k {
            for j in 0..k {
                a[i][j] = jac[i].iter().zip(&jac[j]).map(|(p, q)| p * q).sum();
            }
            a[i][i] += 1e-30;
            a[i][k] = jac[i].iter().zip(&v).map(|(p, q)| p * q).sum();
        }
        let lambda = solve(a)?;
        Some(
            v.iter()
                .enumerate()
                .map(|(c, vc)| vc - (0..k).map(|i| jac[i][c] * lambda[i]).sum::<f64>())
                .collect(),
        )
    }

    fn project_from(&self, x: &[f64], hint: &[f64]) -> (Vec<f64>, f64) {
        let mut y = hint.to_vec();
        self.newton_polish(&mut y);
        let y = self.slide(x, y);
        let origin = (vec![0.0; x.len()], euclid(x.iter().copied()));
        if self.residual(&y) > PROJECTION_TOL {
            return self.project(x);
        }
        let d = euclid(x.iter().zip(&y).map(|(a, b)| a - b));
        if d < origin.1 {
            (y, d)
        } else {
            origin
        }
    }

    fn project(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let origin = vec![0.0; x.len()];
        let mut best = (origin, euclid(x.iter().copied()));
        for start in [x.to_vec()] {
            let y = self.descend(x, start);
            if self.residual(&y) <= PROJECTION_TOL {
                let d = euclid(x.iter().zip(&y).map(|(a, b)| a - b));
                if d < best.1 {
                    best = (y, d);
                }
            }
        }
        best
    }
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let k = a.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for row in col + 1..k {
            let factor = a[row][col] / a[col][col];
            for c in col..=k {
                a[row][c] -= factor * a[col][c];
            }
        }
    }
    let mut out = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|c| a[row][c] * out[c]).sum();
        out[row] = (a[row][k] - s) / a[row][row];
    }
    Some(out)
}

/// Which quantity a relative condition bounds from below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelativeCondition {
    #[serde(rename = "I^T")]
    Thom,
    #[serde(rename = "I^K")]
    Kuo,
}

impl fmt::Display for RelativeCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelativeCondition::Thom => "I^T",
            RelativeCondition::Kuo => "I^K",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RelativeConfig {
    /// Samples are drawn from `|x| < ball_radius`.
    pub ball_radius: f64,
    /// Upper edge of the largest distance band.
    pub top_distance: f64,
    /// Number of dyadic distance bands.
    pub bands: usize,
    pub samples_per_band: usize,
    pub tolerance: f64,
    pub zero_rel_tol: f64,
    pub seed: u64,
}

impl Default for RelativeConfig {
    fn default() -> Self {
        RelativeConfig {
            ball_radius: 0.05,
            top_distance: 0.025,
            bands: 10,
            samples_per_band: 4000,
            tolerance: 0.1,
            zero_rel_tol: 1e-10,
            seed: 0,
        }
    }
}

impl RelativeConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ball_radius > 0.0) || !(self.top_distance > 0.0) || self.top_distance >= self.ball_radius {
            return Err(Error::InvalidArgument(
                "need 0 < top_distance < ball_radius".into(),
            ));
        }
        if self.bands < crate::lojasiewicz::MIN_SCALES || self.samples_per_band == 0 {
            return Err(Error::InvalidArgument("too few bands or samples".into()));
        }
        if !(self.tolerance >= 0.0) || !(self.zero_rel_tol >= 0.0) {
            return Err(Error::InvalidArgument("tolerances must be nonnegative".into()));
        }
        Ok(())
    }

    fn band_of(&self, d: f64) -> Option<usize> {
        if !(d > 0.0) || d >= self.top_distance {
            return None;
        }
        let k = (self.top_distance / d).log2().floor() as usize;
        (k < self.bands).then_some(k)
    }
}

/// A sample point with its distance to `Sigma`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellSample {
    pub point: Vec<f64>,
    pub distance: f64,
    pub band: usize,
}

/// Points of the ball spread over the distance bands.
///
/// Each point is `b + delta * u`, where `b` lies on `Sigma` (the origin for a
/// quarter of the draws) and `u` is a unit vector normal to the chosen
/// subspace, or arbitrary for algebraic sets.
pub fn shell_samples(sigma: &SigmaSet, cfg: &RelativeConfig) -> Result<Vec<ShellSample>> {
    cfg.validate()?;
    let n = sigma.nvars();
    let mut rng = crate::rng::stream(cfg.seed, "relative-shells");
    // (base or raw point to project, normal coordinates, offset)
    let mut plan: Vec<(Vec<f64>, bool, Vec<usize>, Vec<f64>)> = Vec::with_capacity(cfg.bands * cfg.samples_per_band);
    for k in 0..cfg.bands {
        let hi = cfg.top_distance * 0.5f64.powi(k as i32);
        for s in 0..cfg.samples_per_band {
            let delta = hi * 0.5f64.powf(rng.gen::<f64>());
            let from_origin = s % 4 == 0;
            let (base, project, normal): (Vec<f64>, bool, Vec<usize>) = match sigma {
                SigmaSet::Subspaces { n, retained } => {
                    let sub = &retained[rng.gen_range(0..retained.len())];
                    let comp = SigmaSet::complement(*n, sub);
                    let mut b = vec![0.0; *n];
                    if !from_origin && !sub.is_empty() {
                        let dir = crate::rng::unit_vector(&mut rng, sub.len());
                        let rad = cfg.ball_radius * rng.gen::<f64>();
                        for (c, &i) in sub.iter().enumerate() {
                            b[i] = dir[c] * rad;
                        }
                    }
                    (b, false, comp)
                }
                SigmaSet::Algebraic { .. } => {
                    if from_origin {
                        (vec![0.0; n], false, (0..n).collect())
                    } else {
                        (crate::rng::ball_point(&mut rng, n, cfg.ball_radius), true, (0..n).collect())
                    }
                }
            };
            if normal.is_empty() {
                continue;
            }
            let u = crate::rng::unit_vector(&mut rng, normal.len());
            let offset: Vec<f64> = u.iter().map(|c| delta * c).collect();
            plan.push((base, project, normal, offset));
        }
    }
    let oracle = sigma.oracle();
    let draws: Vec<Vec<f64>> = plan
        .into_par_iter()
        .map(|(base, project, normal, offset)| {
            let mut x = if project { oracle.nearest(&base).0 } else { base };
            for (c, &i) in normal.iter().enumerate() {
                x[i] += offset[c];
            }
            x
        })
        .collect();
    let out: Vec<Option<ShellSample>> = draws
        .into_par_iter()
        .map(|x| {
            if euclid(x.iter().copied()) >= cfg.ball_radius {
                return None;
            }
            let d = oracle.nearest(&x).1;
            cfg.band_of(d).map(|band| ShellSample {
                point: x,
                distance: d,
                band,
            })
        })
        .collect();
    Ok(out.into_iter().flatten().collect())
}

/// Band minima of a quantity and the power-law fit against the distance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShellScan {
    /// `(distance at the band minimum, band minimum)`; `None` for empty bands.
    pub bands: Vec<Option<(f64, f64)>>,
    pub band_max: Vec<f64>,
    pub homogeneity: u32,
    pub samples: usize,
}

/// Band minima over the samples, each polished by a compass search that
/// stays inside its distance band and the ball.
pub fn shell_scan<F>(
    samples: &[ShellSample],
    sigma: &SigmaSet,
    cfg: &RelativeConfig,
    homogeneity: u32,
    q: F,
) -> ShellScan
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let nbands = cfg.bands;
    let vals: Vec<f64> = samples.par_iter().map(|s| q(&s.point)).collect();
    let mut band_max = vec![0.0f64; nbands];
    let mut ranked: Vec<Vec<(f64, usize)>> = vec![Vec::new(); nbands];
    for (i, (s, &v)) in samples.iter().zip(&vals).enumerate() {
        band_max[s.band] = band_max[s.band].max(v);
        ranked[s.band].push((v, i));
    }
    let oracle = sigma.oracle();
    let bands: Vec<Option<(f64, f64)>> = ranked
        .into_par_iter()
        .enumerate()
        .map(|(k, mut cands)| {
            cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let (v0, i0) = *cands.first()?;
            let mut best = (samples[i0].distance, v0);
            for &(_, i) in cands.iter().take(REFINE_STARTS) {
                let (d, v) = refine_in_band(&q, &oracle, cfg, k, &samples[i], i);
                if v < best.1 {
                    best = (d, v);
                }
            }
            Some(best)
        })
        .collect();
    ShellScan {
        bands,
        band_max,
        homogeneity,
        samples: samples.len(),
    }
}

const REFINE_STARTS: usize = 3;
const REFINE_EVALS: usize = 4000;

fn refine_in_band<F>(
    q: &F,
    oracle: &DistanceOracle<'_>,
    cfg: &RelativeConfig,
    band: usize,
    start: &ShellSample,
    start_id: usize,
) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let inside = |x: &[f64], hint: &[f64]| -> Option<(Vec<f64>, f64)> {
        if euclid(x.iter().copied()) >= cfg.ball_radius {
            return None;
        }
        let (foot, d) = oracle.nearest_from(x, hint);
        // neighbouring bands too; the fit uses the actual distance
        let b = cfg.band_of(d)?;
        (b + 1 >= band && b <= band + 1).then_some((foot, d))
    };
    let mut x = start.point.clone();
    let (mut foot, mut d) = oracle.nearest(&x);
    let mut fx = q(&x);
    let mut step = 0.25 * start.distance;
    let min_step = 1e-13 * start.distance;
    let n = x.len();
    let mut rng = crate::rng::stream(cfg.seed ^ ((band as u64) << 32 | start_id as u64), "relative-refine");
    let mut evals = 0;
    while step > min_step && evals < REFINE_EVALS && fx > 0.0 {
        let mut improved = false;
        // coordinate directions plus fresh random ones, so that thin valleys
        // along a band edge are eventually followed
        let mut polls: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        polls.extend((0..n).map(|_| crate::rng::unit_vector(&mut rng, n)));
        'dirs: for dir in &polls {
            for sgn in [1.0, -1.0] {
                let trial: Vec<f64> = x.iter().zip(dir).map(|(a, b)| a + sgn * step * b).collect();
                evals += 1;
                let Some((ft_foot, dt)) = inside(&trial, &foot) else { continue };
                let ft = q(&trial);
                if ft < fx {
                    (x, foot, d, fx) = (trial, ft_foot, dt, ft);
                    improved = true;
                    break 'dirs;
                }
            }
        }
        step *= if improved { 1.5 } else { 0.5 };
    }
    (d, fx)
}

impl ShellScan {
    pub fn fit(&self, zero_rel_tol: f64) -> std::result::Result<ExponentEstimate, crate::lojasiewicz::FitError> {
        let pts: Vec<(f64, Option<f64>)> = self
            .bands
            .iter()
            .zip(&self.band_max)
            .filter_map(|(b, &mx)| {
                let (d, v) = (*b)?;
                let zero = crate::lojasiewicz::is_numerical_zero(v, mx, self.homogeneity, zero_rel_tol);
                Some((d, (!zero).then_some(v)))
            })
            .collect();
        fit_power_law(&pts)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelativeVerdict {
    pub condition: RelativeCondition,
    pub r: u64,
    pub m: u32,
    pub holds: bool,
    pub estimate: Option<ExponentEstimate>,
    pub target_exponent: f64,
    pub tolerance: f64,
    pub diagnostic: Option<String>,
    pub caveat: String,
}

fn relative_caveat(sigma: &SigmaSet) -> String {
    let mut s = format!(
        "{CAVEAT}; a single (c, exponent) pair is fitted per scan, existence of c and delta is not certified; Sigma assumed coherent"
    );
    if matches!(sigma, SigmaSet::Algebraic { .. }) {
        s.push_str("; distances to an algebraic Sigma are numerical and band minima are sampled then polished, so zero curves of the quantity off Sigma can be missed");
    }
    s
}

/// `Q_m(f, x) >= c d(x, Sigma)^(r m)` near 0, for `Q = T` or `Q = K`.
pub fn check_relative(
    f: &MapGerm,
    which: RelativeCondition,
    r: u64,
    m: u32,
    sigma: &SigmaSet,
    cfg: &RelativeConfig,
) -> Result<RelativeVerdict> {
    check_dim(f.n(), sigma.nvars())?;
    let samples = shell_samples(sigma, cfg)?;
    let kt = KuoThom::new(f);
    Ok(relative_from_samples(&kt, sigma, which, r, m, &samples, cfg))
}

pub fn relative_from_samples(
    kt: &KuoThom,
    sigma: &SigmaSet,
    which: RelativeCondition,
    r: u64,
    m: u32,
    samples: &[ShellSample],
    cfg: &RelativeConfig,
) -> RelativeVerdict {
    let scan = match which {
        RelativeCondition::Thom => shell_scan(samples, sigma, cfg, m, |x| kt.thom_unchecked(m, x)),
        RelativeCondition::Kuo => shell_scan(samples, sigma, cfg, m, |x| kt.kuo_unchecked(m, x)),
    };
    let target = (r * m as u64) as f64;
    let mut v = RelativeVerdict {
        condition: which,
        r,
        m,
        holds: false,
        estimate: None,
        target_exponent: target,
        tolerance: cfg.tolerance,
        diagnostic: None,
        caveat: relative_caveat(sigma),
    };
    match scan.fit(cfg.zero_rel_tol) {
        Ok(est) => {
            v.holds = est.slope <= target + cfg.tolerance;
            v.estimate = Some(est);
        }
        Err(e) => v.diagnostic = Some(e.to_string()),
    }
    v
}

/// All multi-indices in `n` variables of total order at most `r`.
fn multi_indices(n: usize, r: u64) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; n]];
    let mut frontier = out.clone();
    for _ in 0..r {
        let mut next = Vec::new();
        for a in &frontier {
            let start = a.iter().rposition(|&e| e > 0).unwrap_or(0);
            for i in start..n {
                let mut b = a.clone();
                b[i] += 1;
                next.push(b);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn same_shape(f: &MapGerm, g: &MapGerm) -> Result<()> {
    if f.n() != g.n() || f.p() != g.p() {
        return Err(Error::InvalidArgument(format!(
            "germs map R^{} -> R^{} and R^{} -> R^{}",
            f.n(),
            f.p(),
            g.n(),
            g.p()
        )));
    }
    Ok(())
}

/// Whether `f` and `g` have the same `r`-jet at every point of `Sigma`.
///
/// Every partial derivative of order at most `r` of every component of `g - f`
/// must vanish identically on each subspace.
pub fn jets_equal_on_sigma(f: &MapGerm, g: &MapGerm, r: u64, sigma: &SigmaSet) -> Result<bool> {
    same_shape(f, g)?;
    let SigmaSet::Subspaces { n, retained } = sigma else {
        return Err(Error::Unsupported(
            "relative jet equality is only decided for coordinate-subspace Sigma".into(),
        ));
    };
    check_dim(f.n(), *n)?;
    let alphas = multi_indices(*n, r);
    for (fc, gc) in f.components().iter().zip(g.components()) {
        let diff = gc - fc;
        if diff.is_zero() {
            continue;
        }
        for alpha in &alphas {
            let mut d = diff.clone();
            for (i, &k) in alpha.iter().enumerate() {
                for _ in 0..k {
                    d = d.partial(i)?;
                }
            }
            if d.is_zero() {
                continue;
            }
            for s in retained {
                if !d.restrict_zero(&SigmaSet::complement(*n, s)).is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `f_t = f + t (g - f)`.
pub fn deformation(f: &MapGerm, g: &MapGerm, t: &Rational) -> Result<MapGerm> {
    same_shape(f, g)?;
    if *t < Rational::zero() || *t > Rational::one() {
        return Err(Error::InvalidArgument(format!("deformation parameter {t} outside [0, 1]")));
    }
    let comps = f
        .components()
        .iter()
        .zip(g.components())
        .map(|(a, b)| a + &(b - a).scale(t))
        .collect();
    MapGerm::new(f.n(), comps)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompatibilityRow {
    pub t: String,
    pub verdict: RelativeVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompatibilityReport {
    pub rows: Vec<CompatibilityRow>,
    /// Every verdict matches the verdict at the first grid value.
    pub constant: bool,
}

/// Runs [`check_relative`] along the deformation `f_t` after confirming the
/// jets agree on `Sigma`.
#[allow(clippy::too_many_arguments)]
pub fn check_compatibility(
    f: &MapGerm,
    g: &MapGerm,
    r: u64,
    m: u32,
    which: RelativeCondition,
    sigma: &SigmaSet,
    t_grid: &[Rational],
    cfg: &RelativeConfig,
) -> Result<CompatibilityReport> {
    if !jets_equal_on_sigma(f, g, r, sigma)? {
        return Err(Error::Precondition(format!(
            "the {r}-jets of f and g differ on Sigma"
        )));
    }
    let samples = shell_samples(sigma, cfg)?;
    let rows = t_grid
        .iter()
        .map(|t| {
            let ft = deformation(f, g, t)?;
            let kt = KuoThom::new(&ft);
            Ok(CompatibilityRow {
                t: crate::report::fmt_rational(t),
                verdict: relative_from_samples(&kt, sigma, which, r, m, &samples, cfg),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let constant = rows.windows(2).all(|w| w[0].verdict.holds == w[1].verdict.holds);
    Ok(CompatibilityReport { rows, constant })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratorProbe {
    pub generator: String,
    pub estimate: Option<ExponentEstimate>,
    /// Smallest integer exponent consistent with the fit, if within `alpha_max`.
    pub alpha: Option<u64>,
    pub diagnostic: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EllipticityReport {
    pub generators: Vec<GeneratorProbe>,
    pub elliptic: bool,
    pub witness: Option<usize>,
    pub caveat: String,
}

/// Looks for a generator bounded below by a power of `d(x, Sigma)`.
pub fn sigma_elliptic_probe(
    gens: &[Polynomial],
    sigma: &SigmaSet,
    alpha_max: u64,
    cfg: &RelativeConfig,
) -> Result<EllipticityReport> {
    if gens.is_empty() {
        return Err(Error::InvalidArgument("no generators".into()));
    }
    for g in gens {
        check_dim(sigma.nvars(), g.nvars())?;
    }
    let samples = shell_samples(sigma, cfg)?;
    let probes: Vec<GeneratorProbe> = gens
        .iter()
        .map(|g| {
            let mut probe = GeneratorProbe {
                generator: g.to_string(),
                estimate: None,
                alpha: None,
                diagnostic: None,
            };
            if g.is_zero() {
                probe.diagnostic = Some("zero generator skipped".into());
                return probe;
            }
            let c = CompiledPoly::new(g);
            let scan = shell_scan(&samples, sigma, cfg, 1, |x| c.eval(x).abs());
            match scan.fit(cfg.zero_rel_tol) {
                Ok(est) => {
                    let alpha = (est.slope - cfg.tolerance).ceil().max(0.0) as u64;
                    if alpha <= alpha_max {
                        probe.alpha = Some(alpha);
                    }
                    probe.estimate = Some(est);
                }
                Err(e) => probe.diagnostic = Some(e.to_string()),
            }
            probe
        })
        .collect();
    let witness = probes.iter().position(|p| p.alpha.is_some());
    Ok(EllipticityReport {
        elliptic: witness.is_some(),
        witness,
        generators: probes,
        caveat: relative_caveat(sigma),
    })
}
