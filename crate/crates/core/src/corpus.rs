//! Seeded random polynomial germs for property checks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::poly::{Polynomial, Rational};
use crate::quantities::MapGerm;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GermBounds {
    pub dims: &'static [usize],
    pub max_degree: u32,
    pub max_terms: usize,
    pub coeff_bound: i64,
}

impl Default for GermBounds {
    fn default() -> Self {
        GermBounds {
            dims: &[2, 3, 4],
            max_degree: 4,
            max_terms: 3,
            coeff_bound: 3,
        }
    }
}

fn random_monomial(rng: &mut ChaCha8Rng, n: usize, degree: u32) -> Vec<u32> {
    let mut e = vec![0u32; n];
    for _ in 0..degree {
        e[rng.gen_range(0..n)] += 1;
    }
    e
}

/// A polynomial with no constant term and total degree at most `max_degree`.
pub fn random_component(rng: &mut ChaCha8Rng, n: usize, bounds: &GermBounds) -> Polynomial {
    let k = rng.gen_range(1..=bounds.max_terms);
    let terms: Vec<(Vec<u32>, Rational)> = (0..k)
        .map(|_| {
            let d = rng.gen_range(1..=bounds.max_degree);
            let b = bounds.coeff_bound;
            let mut c = rng.gen_range(-b..b);
            if c >= 0 {
                c += 1;
            }
            (random_monomial(rng, n, d), Rational::from_integer(c.into()))
        })
        .collect();
    Polynomial::from_terms(n, terms)
}

pub fn random_germ(rng: &mut ChaCha8Rng, bounds: &GermBounds) -> MapGerm {
    let n = bounds.dims[rng.gen_range(0..bounds.dims.len())];
    let p = rng.gen_range(1..=n);
    let comps = (0..p).map(|_| random_component(rng, n, bounds)).collect();
    MapGerm::new(n, comps).expect("generated components vanish at 0")
}

/// `count` germs drawn from the `"germs"` stream of `seed`.
pub fn germ_corpus(seed: u64, count: usize, bounds: &GermBounds) -> Vec<MapGerm> {
    let mut rng = crate::rng::stream(seed, "germs");
    (0..count).map(|_| random_germ(&mut rng, bounds)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_respects_bounds() {
        let b = GermBounds::default();
        let c = germ_corpus(11, 100, &b);
        assert_eq!(c, germ_corpus(11, 100, &b));
        for g in &c {
            assert!(b.dims.contains(&g.n()));
            assert!(g.p() >= 1 && g.p() <= g.n());
            for comp in g.components() {
                assert!(comp.degree().unwrap_or(0) <= b.max_degree as u64);
                assert!(num_traits::Zero::is_zero(&comp.constant_term()));
            }
        }
        assert!(c.iter().any(|g| g.n() == g.p()));
    }
}
