#![allow(dead_code)]

use ktgerm::poly::{rat, UniPoly};
use ktgerm::quantities::combinations;
use ktgerm::{Arc, MapGerm, Order, Polynomial, Rational};
use num_traits::{Signed, Zero};

/// Determinant by the permutation (Leibniz) expansion, over univariate series.
pub fn leibniz_det(m: &[Vec<UniPoly>]) -> UniPoly {
    let k = m.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut total = UniPoly::zero();
    loop {
        let inversions = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .filter(|&(i, j)| perm[i] > perm[j])
            .count();
        let mut term = UniPoly::constant(rat(1, 1));
        for (row, &col) in perm.iter().enumerate() {
            term = &term * &m[row][col];
        }
        total = if inversions % 2 == 0 { &total + &term } else { &total - &term };
        // next permutation in lexicographic order
        let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            break;
        };
        let j = (i + 1..k).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    total
}

/// `(ord_K(1), ord_T(1))` computed by composing the Jacobian with the arc
/// first and taking determinants afterwards.
pub fn brute_orders(f: &MapGerm, arc: &Arc) -> (Order, Order) {
    let (n, p) = (f.n(), f.p());
    let lam = arc.components();
    let jac: Vec<Vec<UniPoly>> = f
        .components()
        .iter()
        .map(|c| (0..n).map(|j| c.partial(j).unwrap().compose_arc(lam).unwrap()).collect())
        .collect();
    let ord_f = f
        .components()
        .iter()
        .map(|c| c.compose_arc(lam).unwrap().ord())
        .min()
        .unwrap();
    let ord_x = lam.iter().map(UniPoly::ord).min().unwrap();
    let ord_minor = combinations(n, p)
        .iter()
        .map(|cols| {
            let sub: Vec<Vec<UniPoly>> = jac.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect();
            leibniz_det(&sub).ord()
        })
        .min()
        .unwrap();
    let ord_k = ord_f.min(ord_x + ord_minor);
    let ord_t = if n == p {
        ord_f
    } else {
        let two = rat(2, 1);
        let mut ext = jac.clone();
        ext.push(lam.iter().map(|l| l.scale(&two)).collect());
        let ord_thom = combinations(n, p + 1)
            .iter()
            .map(|cols| {
                let sub: Vec<Vec<UniPoly>> =
                    ext.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect();
                leibniz_det(&sub).ord()
            })
            .min()
            .unwrap();
        ord_f.min(ord_thom)
    };
    (ord_k, ord_t)
}

/// `K_2` evaluated in exact arithmetic: `|x|^2 sum minor^2 + sum f_j^2`.
pub fn exact_k2(f: &MapGerm, x: &[Rational]) -> Rational {
    let minors = ktgerm::quantities::build_minors(f);
    let nx2: Rational = x.iter().map(|a| a * a).sum();
    let sm: Rational = minors
        .p_minors
        .iter()
        .map(|m| {
            let v = m.poly.eval_exact(x).unwrap();
            &v * &v
        })
        .sum();
    nx2 * sm + exact_fsq(f, x)
}

pub fn exact_t2(f: &MapGerm, x: &[Rational]) -> Rational {
    let minors = ktgerm::quantities::build_minors(f);
    let st: Rational = minors
        .thom_minors
        .iter()
        .map(|m| {
            let v = m.poly.eval_exact(x).unwrap();
            &v * &v
        })
        .sum();
    st + exact_fsq(f, x)
}

fn exact_fsq(f: &MapGerm, x: &[Rational]) -> Rational {
    f.components()
        .iter()
        .map(|c| {
            let v = c.eval_exact(x).unwrap();
            &v * &v
        })
        .sum()
}

pub fn to_f64(q: &Rational) -> f64 {
    ktgerm::poly::rat_to_f64(q)
}

pub fn abs_f64(q: &Rational) -> f64 {
    to_f64(&q.abs())
}

pub fn is_zero(q: &Rational) -> bool {
    q.is_zero()
}

/// Small polynomial from `(exponents, numerator, denominator)` triples.
pub fn poly_from(nvars: usize, terms: &[(Vec<u32>, i64, i64)]) -> Polynomial {
    Polynomial::from_terms(
        nvars,
        terms.iter().map(|(e, a, b)| (e.clone(), rat(*a, *b))),
    )
}
