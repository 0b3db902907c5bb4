//! Exact vanishing orders of `K_m`, `T_m` and the auxiliary functions along
//! polynomial arcs through the origin.
//!
//! Every summand of `K_m` and `T_m` is nonnegative, so the order of the sum along
//! an arc is the minimum of the summand orders, and `|P(lambda(t))|` has the
//! order of the polynomial `P(lambda(t))`. This reduces all orders to exact
//! univariate expansions.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::poly::{ArcPowers, Order, Rational, UniPoly};
use crate::quantities::{build_minors, MapGerm, MinorCache};

/// An analytic test curve `t -> (lambda_1(t), .., lambda_n(t))` with `lambda(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    components: Vec<UniPoly>,
}

impl Arc {
    pub fn new(components: Vec<UniPoly>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("an arc needs at least one component".into()));
        }
        if components.iter().any(|c| c.ord() == Order::Finite(0)) {
            return Err(Error::InvalidArgument(
                "arc components must vanish at t = 0".into(),
            ));
        }
        if components.iter().all(UniPoly::is_zero) {
            return Err(Error::InvalidArgument("arc is identically zero".into()));
        }
        Ok(Arc { components })
    }

    /// Parses the `t^2; t` format.
    pub fn parse(src: &str) -> Result<Self> {
        let comps = src
            .split(';')
            .map(|s| UniPoly::parse(s.trim()))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Arc::new(comps)
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[UniPoly] {
        &self.components
    }

    /// Order of `|lambda(t)|`.
    pub fn ord_norm(&self) -> Order {
        Order::min_of(self.components.iter().map(UniPoly::ord))
    }

    pub fn eval_float(&self, t: f64) -> Vec<f64> {
        self.components.iter().map(|c| c.eval_float(t)).collect()
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

pub fn ord_uni(q: &UniPoly) -> Order {
    q.ord()
}

/// Orders of every quantity entering `K_m` and `T_m` along one arc.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderLedger {
    pub ord_u: Order,
    pub ord_v: Order,
    pub ord_w: Order,
    pub ord_h: Order,
    pub ord_g: Order,
    pub ord_norm_x: Order,
    /// `ord (M_I o lambda)` for each `p`-minor, in minor order.
    pub ord_minors: Vec<Order>,
    /// `ord (N_J o lambda)` for each `(p+1)`-minor.
    pub ord_thom_minors: Vec<Order>,
    /// `ord (f_j o lambda)` per component.
    pub ord_f: Vec<Order>,
}

impl OrderLedger {
    pub fn ord_k(&self, m: u32) -> Order {
        self.ord_h.scale(m as u64)
    }

    pub fn ord_t(&self, m: u32) -> Order {
        self.ord_g.scale(m as u64)
    }
}

/// Germ with its minors, ready for repeated arc evaluation.
#[derive(Clone, Debug)]
pub struct ArcOracle {
    germ: MapGerm,
    minors: MinorCache,
}

impl ArcOracle {
    pub fn new(germ: &MapGerm) -> Self {
        ArcOracle {
            minors: build_minors(germ),
            germ: germ.clone(),
        }
    }

    pub fn germ(&self) -> &MapGerm {
        &self.germ
    }

    pub fn ledger(&self, arc: &Arc) -> Result<OrderLedger> {
        check_dim(self.germ.n(), arc.n())?;
        let mut powers = ArcPowers::new(arc.components());
        let ord_f: Vec<Order> = self
            .germ
            .components()
            .iter()
            .map(|c| c.compose_with_powers(&mut powers).ord())
            .collect();
        let ord_minors: Vec<Order> = self
            .minors
            .p_minors
            .iter()
            .map(|m| m.poly.compose_with_powers(&mut powers).ord())
            .collect();
        let ord_thom_minors: Vec<Order> = self
            .minors
            .thom_minors
            .iter()
            .map(|m| m.poly.compose_with_powers(&mut powers).ord())
            .collect();
        let ord_norm_x = arc.ord_norm();
        let ord_u = Order::min_of(ord_f.iter().copied());
        let ord_v = ord_norm_x + Order::min_of(ord_minors.iter().copied());
        let ord_w = Order::min_of(ord_thom_minors.iter().copied());
        Ok(OrderLedger {
            ord_u,
            ord_v,
            ord_w,
            ord_h: ord_v.min(ord_u),
            ord_g: ord_w.min(ord_u),
            ord_norm_x,
            ord_minors,
            ord_thom_minors,
            ord_f,
        })
    }

    pub fn ord_k(&self, m: u32, arc: &Arc) -> Result<Order> {
        Ok(self.ledger(arc)?.ord_k(m))
    }

    pub fn ord_t(&self, m: u32, arc: &Arc) -> Result<Order> {
        Ok(self.ledger(arc)?.ord_t(m))
    }
}

pub fn ledger(f: &MapGerm, arc: &Arc) -> Result<OrderLedger> {
    ArcOracle::new(f).ledger(arc)
}

pub fn ord_k(f: &MapGerm, m: u32, arc: &Arc) -> Result<Order> {
    ArcOracle::new(f).ord_k(m, arc)
}

pub fn ord_t(f: &MapGerm, m: u32, arc: &Arc) -> Result<Order> {
    ArcOracle::new(f).ord_t(m, arc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeRow {
    pub arc_id: usize,
    pub ord_k: Order,
    pub ord_t: Order,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub m: u32,
    pub rows: Vec<ProbeRow>,
    pub total: usize,
    pub equal_count: usize,
}

impl ProbeReport {
    pub fn all_equal(&self) -> bool {
        self.equal_count == self.total
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &ProbeRow> {
        self.rows.iter().filter(|r| !r.equal)
    }

    /// `arc_id,ord_K,ord_T,equal` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("arc_id,ord_K,ord_T,equal\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", r.arc_id, r.ord_k, r.ord_t, r.equal));
        }
        s
    }
}

/// Compares `ord K_m` with `ord T_m` along every arc. Rows follow arc order.
pub fn equivalence_probe(f: &MapGerm, arcs: &[Arc], m: u32) -> Result<ProbeReport> {
    let oracle = ArcOracle::new(f);
    let rows = arcs
        .par_iter()
        .enumerate()
        .map(|(arc_id, arc)| {
            let l = oracle.ledger(arc)?;
            let (ord_k, ord_t) = (l.ord_k(m), l.ord_t(m));
            Ok(ProbeRow {
                arc_id,
                ord_k,
                ord_t,
                equal: ord_k == ord_t,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let equal_count = rows.iter().filter(|r| r.equal).count();
    Ok(ProbeReport {
        m,
        total: rows.len(),
        equal_count,
        rows,
    })
}

/// Bounds for random arcs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct ArcBounds {
    pub max_exponent: u32,
    pub max_terms: usize,
    pub coeff_bound: u32,
}

impl Default for ArcBounds {
    fn default() -> Self {
        ArcBounds {
            max_exponent: 6,
            max_terms: 3,
            coeff_bound: 5,
        }
    }
}

pub(crate) fn random_rational(rng: &mut ChaCha8Rng, bound: u32) -> Rational {
    let b = bound as i64;
    let mut num = rng.gen_range(-b..b);
    if num >= 0 {
        num += 1;
    }
    let den = rng.gen_range(1..=b);
    crate::poly::rat(num, den)
}

/// Deterministic pseudo-random arc in `n` variables.
pub fn arc_generator(seed: u64, n: usize, bounds: ArcBounds) -> Result<Arc> {
    if n == 0 || bounds.max_exponent == 0 || bounds.max_terms == 0 || bounds.coeff_bound == 0 {
        return Err(Error::InvalidArgument(format!(
            "arc bounds must be positive: n = {n}, {bounds:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exps: Vec<u32> = (1..=bounds.max_exponent).collect();
    let max_terms = bounds.max_terms.min(exps.len());
    loop {
        let comps: Vec<UniPoly> = (0..n)
            .map(|_| {
                let k = rng.gen_range(0..=max_terms);
                let chosen: Vec<u32> = exps.choose_multiple(&mut rng, k).copied().collect();
                let mut coeffs = vec![Rational::from_integer(0.into()); bounds.max_exponent as usize + 1];
                for e in chosen {
                    coeffs[e as usize] = random_rational(&mut rng, bounds.coeff_bound);
                }
                UniPoly::new(coeffs)
            })
            .collect();
        if comps.iter().any(|c| !c.is_zero()) {
            return Arc::new(comps);
        }
    }
}

/// `count` arcs whose seeds are drawn from the `"arcs"` stream of `seed`.
pub fn arc_corpus(seed: u64, count: usize, n: usize, bounds: ArcBounds) -> Result<Vec<Arc>> {
    let mut rng = crate::rng::stream(seed, "arcs");
    (0..count)
        .map(|_| arc_generator(rng.gen(), n, bounds))
        .collect()
}
