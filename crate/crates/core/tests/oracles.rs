//! Cross-checks against computations that take a different route from the
//! library: arc orders through composed Jacobians and permutation
//! determinants, and K_2 / T_2 through exact rational evaluation.

mod common;

use ktgerm::arcs::{arc_corpus, ArcBounds};
use ktgerm::corpus::{germ_corpus, GermBounds};
use ktgerm::poly::rat;
use ktgerm::quantities::build_minors;
use ktgerm::{Arc, ArcOracle, KuoThom, MapGerm, Order};

#[test]
fn arc_orders_match_brute_force() {
    let germs = germ_corpus(99, 40, &GermBounds::default());
    let mut checked = 0;
    for (i, f) in germs.iter().enumerate() {
        let oracle = ArcOracle::new(f);
        for arc in arc_corpus(1000 + i as u64, 10, f.n(), ArcBounds::default()).unwrap() {
            let (k, t) = common::brute_orders(f, &arc);
            assert_eq!(oracle.ord_k(1, &arc).unwrap(), k, "germ {i} arc {arc}");
            assert_eq!(oracle.ord_t(1, &arc).unwrap(), t, "germ {i} arc {arc}");
            checked += 1;
        }
    }
    assert_eq!(checked, 400);
}

#[test]
fn hand_computed_arc_rows() {
    let f = MapGerm::parse(2, &["x - y^2"]).unwrap();
    let arc = Arc::parse("t^2; t").unwrap();
    assert_eq!(common::brute_orders(&f, &arc), (Order::Finite(1), Order::Finite(1)));
    let o = ArcOracle::new(&f);
    assert_eq!(o.ord_k(1, &arc).unwrap(), Order::Finite(1));
    assert_eq!(o.ord_t(3, &arc).unwrap(), Order::Finite(3));
}

/// Along `lambda(t)` the values `K_1(f, lambda(t))` behave like `c t^ord`; the
/// log-slope between two tiny parameters, computed from exact rational
/// evaluations, must be close to the exact order.
#[test]
fn arc_orders_match_log_slopes() {
    let germs = germ_corpus(5, 25, &GermBounds::default());
    let mut compared = 0;
    for (i, f) in germs.iter().enumerate() {
        let minors = build_minors(f);
        let oracle = ArcOracle::new(f);
        for arc in arc_corpus(77 + i as u64, 4, f.n(), ArcBounds::default()).unwrap() {
            let Some(ord) = oracle.ord_k(1, &arc).unwrap().finite() else { continue };
            if ord > 30 {
                continue;
            }
            let k1 = |t: &ktgerm::Rational| -> f64 {
                let x: Vec<_> = arc.components().iter().map(|c| c.eval_exact(t)).collect();
                let nx = x.iter().map(|a| common::to_f64(&(a * a))).sum::<f64>().sqrt();
                let sm: f64 = minors.p_minors.iter().map(|m| common::abs_f64(&m.poly.eval_exact(&x).unwrap())).sum();
                let nf = f
                    .components()
                    .iter()
                    .map(|c| common::to_f64(&c.eval_exact(&x).unwrap()).powi(2))
                    .sum::<f64>()
                    .sqrt();
                nx * sm + nf
            };
            let (t1, t2) = (rat(1, 1_000_000), rat(1, 10_000_000));
            let slope = (k1(&t1) / k1(&t2)).log10();
            assert!((slope - ord as f64).abs() < 0.05, "germ {i} arc {arc}: slope {slope} vs {ord}");
            compared += 1;
        }
    }
    assert!(compared >= 40, "only {compared} finite arcs compared");
}

#[test]
fn float_k2_t2_match_exact_values() {
    let germs = germ_corpus(8, 30, &GermBounds::default());
    for f in &germs {
        let kt = KuoThom::new(f);
        for s in 0..5i64 {
            let xr: Vec<_> = (0..f.n() as i64).map(|j| rat((s * 7 + j * 3) % 11 - 5, 64)).collect();
            let xf: Vec<f64> = xr.iter().map(common::to_f64).collect();
            let (ke, te) = (common::exact_k2(f, &xr), common::exact_t2(f, &xr));
            let (kf, tf) = (kt.eval_k(2, &xf).unwrap(), kt.eval_t(2, &xf).unwrap());
            let (ke, te) = (common::to_f64(&ke), common::to_f64(&te));
            assert!((kf - ke).abs() <= 1e-10 * ke.abs().max(1e-300), "K2 {kf} vs {ke}");
            assert!((tf - te).abs() <= 1e-10 * te.abs().max(1e-300), "T2 {tf} vs {te}");
        }
    }
}

#[test]
fn symbolic_even_powers_match_exact_values() {
    for f in germ_corpus(21, 15, &GermBounds::default()) {
        let minors = build_minors(&f);
        let k2 = minors.symbolic_kuo(&f, 2).unwrap();
        let t2 = minors.symbolic_thom(&f, 2).unwrap();
        let x: Vec<_> = (0..f.n() as i64).map(|j| rat(j + 1, 3)).collect();
        assert_eq!(k2.eval_exact(&x).unwrap(), common::exact_k2(&f, &x));
        assert_eq!(t2.eval_exact(&x).unwrap(), common::exact_t2(&f, &x));
    }
}
