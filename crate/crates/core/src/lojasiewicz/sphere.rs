//! Deterministic minimization of a nonnegative function over `{|x| = eps}`.
//!
//! A dense angular grid (full grid for `n <= 3`, a shifted Halton point set for
//! `n >= 4`) locates candidate basins; the best grid points are then refined by
//! a projected compass search that stays on the sphere.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SphereStrategy {
    /// Grid points per angle dimension for `n <= 3`.
    pub grid_per_angle: usize,
    /// Number of refined starts.
    pub multistart: usize,
    /// Quasi-random directions for `n >= 4`.
    pub directions: usize,
    /// Compass search stops once its step falls below `eps * min_step`.
    pub min_step: f64,
    pub max_evals_per_start: usize,
    pub seed: u64,
}

impl Default for SphereStrategy {
    fn default() -> Self {
        SphereStrategy {
            grid_per_angle: 720,
            multistart: 16,
            directions: 4096,
            min_step: 1e-13,
            max_evals_per_start: 20_000,
            seed: 0,
        }
    }
}

/// Outcome of one sphere minimization. `argmin` is `None` when no admissible
/// point was found.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereMin {
    pub value: f64,
    pub argmin: Option<Vec<f64>>,
    /// Largest value seen among admissible grid points.
    pub max_value: f64,
    pub admissible_points: usize,
}

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    out
}

/// Unit directions used as the coarse search set.
pub fn grid_directions(n: usize, strategy: &SphereStrategy) -> Vec<Vec<f64>> {
    match n {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            let k = strategy.grid_per_angle.max(4);
            (0..k)
                .map(|i| {
                    let th = 2.0 * PI * i as f64 / k as f64;
                    vec![th.cos(), th.sin()]
                })
                .collect()
        }
        3 => {
            let k = strategy.grid_per_angle.max(4);
            let polar = k / 2 + 1;
            let mut out = Vec::with_capacity(k * polar);
            for j in 0..polar {
                let ph = PI * j as f64 / (polar - 1) as f64;
                for i in 0..k {
                    let th = 2.0 * PI * i as f64 / k as f64;
                    out.push(vec![ph.sin() * th.cos(), ph.sin() * th.sin(), ph.cos()]);
                }
            }
            out
        }
        _ => {
            let mut rng = crate::rng::stream(strategy.seed, "sphere-shift");
            let pairs = n.div_ceil(2);
            let shift: Vec<f64> = (0..2 * pairs).map(|_| rng.gen::<f64>()).collect();
            let mut out: Vec<Vec<f64>> = Vec::with_capacity(strategy.directions + 2 * n);
            for i in 0..n {
                for s in [1.0, -1.0] {
                    let mut e = vec![0.0; n];
                    e[i] = s;
                    out.push(e);
                }
            }
            for idx in 1..=strategy.directions as u64 {
                let mut z = Vec::with_capacity(2 * pairs);
                for q in 0..pairs {
                    let u1 = (radical_inverse(idx, PRIMES[2 * q % PRIMES.len()]) + shift[2 * q]).fract();
                    let u2 =
                        (radical_inverse(idx, PRIMES[(2 * q + 1) % PRIMES.len()]) + shift[2 * q + 1]).fract();
                    let rad = (-2.0 * (1.0 - u1).max(1e-300).ln()).sqrt();
                    z.push(rad * (2.0 * PI * u2).cos());
                    z.push(rad * (2.0 * PI * u2).sin());
                }
                z.truncate(n);
                let norm = z.iter().map(|a| a * a).sum::<f64>().sqrt();
                if norm > 0.0 {
                    out.push(z.into_iter().map(|a| a / norm).collect());
                }
            }
            out
        }
    }
}

fn project(x: &mut [f64], eps: f64) {
    let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm > 0.0 {
        for a in x.iter_mut() {
            *a *= eps / norm;
        }
    }
}

fn compass_search<F, A>(f: &F, admissible: &A, start: Vec<f64>, eps: f64, init_step: f64, strategy: &SphereStrategy) -> (f64, Vec<f64>)
where
    F: Fn(&[f64]) -> f64,
    A: Fn(&[f64]) -> bool,
{
    let n = start.len();
    let mut x = start;
    let mut fx = f(&x);
    let mut step = init_step;
    let mut evals = 0;
    let mut trial = vec![0.0; n];
    while step > eps * strategy.min_step && evals < strategy.max_evals_per_start && fx > 0.0 {
        let mut improved = false;
        'dirs: for i in 0..n {
            for s in [1.0, -1.0] {
                trial.copy_from_slice(&x);
                trial[i] += s * step;
                project(&mut trial, eps);
                evals += 1;
                if !admissible(&trial) {
                    continue;
                }
                let ft = f(&trial);
                if ft < fx {
                    fx = ft;
                    x.copy_from_slice(&trial);
                    improved = true;
                    break 'dirs;
                }
            }
        }
        if improved {
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    (fx, x)
}

/// Minimum of `f` over the admissible part of the sphere of radius `eps`.
pub fn min_on_sphere_constrained<F, A>(
    f: &F,
    admissible: &A,
    n: usize,
    eps: f64,
    strategy: &SphereStrategy,
) -> Result<SphereMin>
where
    F: Fn(&[f64]) -> f64 + Sync,
    A: Fn(&[f64]) -> bool + Sync,
{
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("sphere radius must be positive, got {eps}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let dirs = grid_directions(n, strategy);
    let values: Vec<Option<f64>> = dirs
        .par_iter()
        .map(|d| {
            let x: Vec<f64> = d.iter().map(|a| a * eps).collect();
            admissible(&x).then(|| f(&x))
        })
        .collect();
    let mut ranked: Vec<(f64, usize)> = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (v, i)))
        .collect();
    let admissible_points = ranked.len();
    if ranked.is_empty() {
        return Ok(SphereMin {
            value: f64::INFINITY,
            argmin: None,
            max_value: 0.0,
            admissible_points: 0,
        });
    }
    let max_value = ranked.iter().map(|r| r.0).fold(0.0, f64::max);
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let starts: Vec<usize> = ranked
        .iter()
        .take(strategy.multistart.max(1))
        .map(|r| r.1)
        .collect();
    let spacing = match n {
        1 => 0.0,
        2 | 3 => 2.0 * PI / strategy.grid_per_angle.max(4) as f64,
        _ => 0.5,
    };
    let refined: Vec<(f64, Vec<f64>)> = starts
        .par_iter()
        .map(|&i| {
            let x: Vec<f64> = dirs[i].iter().map(|a| a * eps).collect();
            if n == 1 {
                let v = f(&x);
                return (v, x);
            }
            compass_search(f, admissible, x, eps, eps * spacing, strategy)
        })
        .collect();
    let (value, argmin) = refined
        .into_iter()
        .fold((f64::INFINITY, Vec::new()), |best, cand| {
            if cand.0 < best.0 {
                cand
            } else {
                best
            }
        });
    Ok(SphereMin {
        value,
        argmin: Some(argmin),
        max_value,
        admissible_points,
    })
}

pub fn min_on_sphere<F>(f: &F, n: usize, eps: f64, strategy: &SphereStrategy) -> Result<SphereMin>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    min_on_sphere_constrained(f, &|_: &[f64]| true, n, eps, strategy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(x: &[f64]) -> f64 {
        x.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    #[test]
    fn gradient_of_square_norm() {
        let f = |x: &[f64]| 2.0 * norm(x);
        let m = min_on_sphere(&f, 2, 0.1, &SphereStrategy::default()).unwrap();
        assert!((m.value - 0.2).abs() < 1e-6);
    }

    #[test]
    fn gradient_of_monkey_saddle() {
        // |grad(x^3 - 3xy^2)|
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            ((3.0 * a * a - 3.0 * b * b).powi(2) + (6.0 * a * b).powi(2)).sqrt()
        };
        let m = min_on_sphere(&f, 2, 0.1, &SphereStrategy::default()).unwrap();
        assert!((m.value - 0.03).abs() < 1e-5, "{}", m.value);
    }

    #[test]
    fn parabola_meets_small_sphere() {
        let f = |x: &[f64]| (x[0] - x[1] * x[1]).abs();
        let m = min_on_sphere(&f, 2, 0.01, &SphereStrategy::default()).unwrap();
        assert!(m.value <= 1e-4);
        let x = m.argmin.unwrap();
        assert!((norm(&x) - 0.01).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_radius() {
        let f = |x: &[f64]| norm(x);
        assert!(min_on_sphere(&f, 2, 0.0, &SphereStrategy::default()).is_err());
        assert!(min_on_sphere(&f, 2, -1.0, &SphereStrategy::default()).is_err());
    }

    #[test]
    fn high_dimensional_directions() {
        let s = SphereStrategy::default();
        let d = grid_directions(5, &s);
        assert_eq!(d.len(), s.directions + 10);
        for v in &d {
            assert!((norm(v) - 1.0).abs() < 1e-12);
        }
        assert_eq!(d, grid_directions(5, &s));
        // min of x1^2 + 2 x2^2 + .. on the sphere is attained on the x1 axis
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, a)| (i + 1) as f64 * a * a).sum::<f64>();
        let m = min_on_sphere(&f, 5, 0.1, &s).unwrap();
        assert!((m.value - 0.01).abs() < 1e-9);
    }

    #[test]
    fn constrained_minimum() {
        let f = |x: &[f64]| x[0].abs();
        let upper = |x: &[f64]| x[0] >= 0.5 * norm(x);
        let m = min_on_sphere_constrained(&f, &upper, 2, 1.0, &SphereStrategy::default()).unwrap();
        assert!((m.value - 0.5).abs() < 1e-6);
        let never = |_: &[f64]| false;
        let m = min_on_sphere_constrained(&f, &never, 2, 1.0, &SphereStrategy::default()).unwrap();
        assert_eq!(m.admissible_points, 0);
        assert!(m.argmin.is_none());
    }
}
