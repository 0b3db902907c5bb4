//! Jacobian minors, the Kuo quantity `K_m`, the Thom quantity `T_m`, and the
//! auxiliary functions `u, v, w, h, g`.
//!
//! For a germ `f = (f_1, .., f_p)` in `n` variables:
//!
//! ```text
//! K_m(f, x) = |x|^m * sum_I |det D(f_1..f_p)/D(x_I)|^m + |f(x)|^m      (|I| = p)
//! T_m(f, x) = sum_J |det D(f_1..f_p, rho)/D(x_J)|^m + |f(x)|^m          (|J| = p + 1)
//! ```
//!
//! with `rho = |x|^2`. All norms are Euclidean.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::poly::{CompiledPoly, Polynomial, Rational, Vars};

/// A polynomial map germ `(R^n, 0) -> (R^p, 0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapGerm {
    n: usize,
    components: Vec<Polynomial>,
    jet_degree: Option<u64>,
}

impl MapGerm {
    pub fn new(n: usize, components: Vec<Polynomial>) -> Result<Self> {
        let p = components.len();
        if p == 0 {
            return Err(Error::InvalidGerm("a germ needs at least one component".into()));
        }
        if n < p {
            return Err(Error::InvalidGerm(format!(
                "target dimension {p} exceeds source dimension {n}"
            )));
        }
        for (j, c) in components.iter().enumerate() {
            if c.nvars() != n {
                return Err(Error::InvalidGerm(format!(
                    "component {} has {} variables, expected {n}",
                    j + 1,
                    c.nvars()
                )));
            }
            if !c.constant_term().is_zero() {
                return Err(Error::InvalidGerm(format!(
                    "component {} does not vanish at the origin",
                    j + 1
                )));
            }
        }
        Ok(MapGerm {
            n,
            components,
            jet_degree: None,
        })
    }

    /// Parses components written in the standard variable names for `n`.
    pub fn parse(n: usize, components: &[&str]) -> Result<Self> {
        let vars = Vars::standard(n);
        let comps = components
            .iter()
            .map(|s| crate::poly::parse_poly(s, &vars))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        MapGerm::new(n, comps)
    }

    pub fn with_jet_degree(mut self, r: u64) -> Self {
        self.jet_degree = Some(r);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.components.len()
    }

    pub fn jet_degree(&self) -> Option<u64> {
        self.jet_degree
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn is_zero_map(&self) -> bool {
        self.components.iter().all(Polynomial::is_zero)
    }

    /// Jacobian matrix; entry `[j][i]` is `d f_j / d x_i`.
    pub fn jacobian(&self) -> Vec<Vec<Polynomial>> {
        self.components
            .iter()
            .map(|c| {
                (0..self.n)
                    .map(|i| c.partial(i).expect("index in range"))
                    .collect()
            })
            .collect()
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &[Vec<Polynomial>]) -> Polynomial {
    let k = m.len();
    assert!(k > 0 && m.iter().all(|r| r.len() == k), "square matrix required");
    let nvars = m[0][0].nvars();
    if k == 1 {
        return m[0][0].clone();
    }
    let mut acc = Polynomial::zero(nvars);
    for col in 0..k {
        if m[0][col].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != col)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][col] * &determinant(&minor);
        acc = if col % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// A minor together with the (0-based) column indices it selects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledMinor {
    pub columns: Vec<usize>,
    pub poly: Polynomial,
}

/// Symbolic Jacobian minors of a germ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorCache {
    /// `det D(f_1..f_p)/D(x_I)` for every `p`-subset `I`.
    pub p_minors: Vec<LabeledMinor>,
    /// `det D(f_1..f_p, rho)/D(x_J)` for every `(p+1)`-subset `J`; empty when `n = p`.
    pub thom_minors: Vec<LabeledMinor>,
}

pub fn build_minors(f: &MapGerm) -> MinorCache {
    let n = f.n();
    let p = f.p();
    let jac = f.jacobian();
    let rho_grad: Vec<Polynomial> = (0..n)
        .map(|i| Polynomial::var(n, i).scale(&Rational::from_integer(2.into())))
        .collect();
    let select = |rows: &[&Vec<Polynomial>], cols: &[usize]| -> Vec<Vec<Polynomial>> {
        rows.iter()
            .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
            .collect()
    };
    let f_rows: Vec<&Vec<Polynomial>> = jac.iter().collect();
    let p_minors = combinations(n, p)
        .into_iter()
        .map(|cols| LabeledMinor {
            poly: determinant(&select(&f_rows, &cols)),
            columns: cols,
        })
        .collect();
    let mut t_rows = f_rows.clone();
    t_rows.push(&rho_grad);
    let thom_minors = combinations(n, p + 1)
        .into_iter()
        .map(|cols| LabeledMinor {
            poly: determinant(&select(&t_rows, &cols)),
            columns: cols,
        })
        .collect();
    MinorCache {
        p_minors,
        thom_minors,
    }
}

impl MinorCache {
    /// Exact polynomial form of `K_m` for even `m`.
    pub fn symbolic_kuo(&self, f: &MapGerm, m: u32) -> Option<Polynomial> {
        if m % 2 != 0 {
            return None;
        }
        let n = f.n();
        let minors = self
            .p_minors
            .iter()
            .fold(Polynomial::zero(n), |acc, mi| &acc + &mi.poly.pow(m));
        let rho = Polynomial::squared_norm(n).pow(m / 2);
        Some(&(&rho * &minors) + &norm_f_even(f, m))
    }

    /// Exact polynomial form of `T_m` for even `m`.
    pub fn symbolic_thom(&self, f: &MapGerm, m: u32) -> Option<Polynomial> {
        if m % 2 != 0 {
            return None;
        }
        let minors = self
            .thom_minors
            .iter()
            .fold(Polynomial::zero(f.n()), |acc, mi| &acc + &mi.poly.pow(m));
        Some(&minors + &norm_f_even(f, m))
    }
}

fn norm_f_even(f: &MapGerm, m: u32) -> Polynomial {
    f.components()
        .iter()
        .fold(Polynomial::zero(f.n()), |acc, c| &acc + &c.pow(2))
        .pow(m / 2)
}

/// Generators of `I_K`: the components followed by the `p`-minors.
pub fn ideal_generators_k(f: &MapGerm) -> Vec<Polynomial> {
    let cache = build_minors(f);
    f.components()
        .iter()
        .cloned()
        .chain(cache.p_minors.into_iter().map(|m| m.poly))
        .collect()
}

/// Generators of `I_T`: the components followed by the `(p+1)`-minors.
pub fn ideal_generators_t(f: &MapGerm) -> Vec<Polynomial> {
    let cache = build_minors(f);
    f.components()
        .iter()
        .cloned()
        .chain(cache.thom_minors.into_iter().map(|m| m.poly))
        .collect()
}

/// Pointwise values of the auxiliary functions and of `K_m`, `T_m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KTEvaluation {
    /// `|f(x)|`
    pub u: f64,
    /// `|x| * sum |p-minor|`
    pub v: f64,
    /// `sum |(p+1)-minor|`
    pub w: f64,
    pub h: f64,
    pub g: f64,
    pub k: f64,
    pub t: f64,
    pub m: u32,
    pub point: Vec<f64>,
}

/// Float evaluator over compiled minors. Immutable once built.
#[derive(Clone, Debug)]
pub struct KuoThom {
    germ: MapGerm,
    minors: MinorCache,
    comps: Vec<CompiledPoly>,
    p_minors: Vec<CompiledPoly>,
    thom_minors: Vec<CompiledPoly>,
}

impl KuoThom {
    pub fn new(germ: &MapGerm) -> Self {
        let minors = build_minors(germ);
        KuoThom {
            comps: germ.components().iter().map(CompiledPoly::new).collect(),
            p_minors: minors.p_minors.iter().map(|m| CompiledPoly::new(&m.poly)).collect(),
            thom_minors: minors
                .thom_minors
                .iter()
                .map(|m| CompiledPoly::new(&m.poly))
                .collect(),
            minors,
            germ: germ.clone(),
        }
    }

    pub fn germ(&self) -> &MapGerm {
        &self.germ
    }

    pub fn minors(&self) -> &MinorCache {
        &self.minors
    }

    pub fn n(&self) -> usize {
        self.germ.n()
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        check_dim(self.germ.n(), x.len())
    }

    /// `|f(x)|`.
    pub fn norm_f(&self, x: &[f64]) -> f64 {
        euclid(self.comps.iter().map(|c| c.eval(x)))
    }

    /// `|grad f(x)|` for `p = 1`, or `sum |p-minor(x)|` otherwise.
    pub fn gradient_size(&self, x: &[f64]) -> f64 {
        if self.germ.p() == 1 {
            euclid(self.p_minors.iter().map(|c| c.eval(x)))
        } else {
            self.p_minors.iter().map(|c| c.eval(x).abs()).sum()
        }
    }

    /// `sum |p-minor(x)|^m`.
    pub fn p_minor_power_sum(&self, m: u32, x: &[f64]) -> f64 {
        self.p_minors.iter().map(|c| c.eval(x).abs().powi(m as i32)).sum()
    }

    /// `sum |(p+1)-minor(x)|^m`.
    pub fn thom_minor_power_sum(&self, m: u32, x: &[f64]) -> f64 {
        self.thom_minors
            .iter()
            .map(|c| c.eval(x).abs().powi(m as i32))
            .sum()
    }

    /// `K_m(f, x)` without the dimension check.
    pub fn kuo_unchecked(&self, m: u32, x: &[f64]) -> f64 {
        let nx = euclid(x.iter().copied());
        nx.powi(m as i32) * self.p_minor_power_sum(m, x) + self.norm_f(x).powi(m as i32)
    }

    /// `T_m(f, x)` without the dimension check.
    pub fn thom_unchecked(&self, m: u32, x: &[f64]) -> f64 {
        self.thom_minor_power_sum(m, x) + self.norm_f(x).powi(m as i32)
    }

    pub fn eval_k(&self, m: u32, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok(self.kuo_unchecked(m, x))
    }

    pub fn eval_t(&self, m: u32, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok(self.thom_unchecked(m, x))
    }

    pub fn eval_uvwhg(&self, m: u32, x: &[f64]) -> Result<KTEvaluation> {
        self.check(x)?;
        let u = self.norm_f(x);
        let v = euclid(x.iter().copied()) * self.p_minor_power_sum(1, x);
        let w = self.thom_minor_power_sum(1, x);
        Ok(KTEvaluation {
            u,
            v,
            w,
            h: v + u,
            g: w + u,
            k: self.kuo_unchecked(m, x),
            t: self.thom_unchecked(m, x),
            m,
            point: x.to_vec(),
        })
    }
}

pub(crate) fn euclid<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// `K_m(f, x)`; builds the minors on every call. Prefer [`KuoThom`] in loops.
pub fn eval_k(f: &MapGerm, m: u32, x: &[f64]) -> Result<f64> {
    KuoThom::new(f).eval_k(m, x)
}

/// `T_m(f, x)`; for `n = p` this is `|f(x)|^m`.
pub fn eval_t(f: &MapGerm, m: u32, x: &[f64]) -> Result<f64> {
    KuoThom::new(f).eval_t(m, x)
}

pub fn eval_uvwhg(f: &MapGerm, m: u32, x: &[f64]) -> Result<KTEvaluation> {
    KuoThom::new(f).eval_uvwhg(m, x)
}
