//! Exact orders of K_m and T_m along seeded random arcs.
//!
//!     cargo run --example arc_probe -- 7 50

use ktgerm::arcs::{arc_corpus, ArcBounds};
use ktgerm::corpus::{germ_corpus, GermBounds};
use ktgerm::equivalence_probe;

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("seed"));
    let ngerms: usize = args.next().map_or(20, |s| s.parse().expect("count"));
    let germs = germ_corpus(seed, ngerms, &GermBounds::default());
    let mut total = 0;
    let mut equal = 0;
    for (i, f) in germs.iter().enumerate() {
        let arcs = arc_corpus(seed.wrapping_add(i as u64), 50, f.n(), ArcBounds::default()).unwrap();
        let probe = equivalence_probe(f, &arcs, 1).unwrap();
        total += probe.total;
        equal += probe.equal_count;
        let first = &probe.rows[0];
        println!(
            "germ {i:3} n={} p={}  {}/{} equal  (arc 0: ord_K={} ord_T={})",
            f.n(),
            f.p(),
            probe.equal_count,
            probe.total,
            first.ord_k,
            first.ord_t
        );
    }
    println!("{equal}/{total} arcs with ord_K = ord_T");
}
