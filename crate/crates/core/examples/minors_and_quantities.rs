//! Minors, symbolic K_m / T_m and pointwise values for a germ given on the
//! command line.
//!
//!     cargo run --example minors_and_quantities -- 3 "x*y" "y*z - x^2"

use ktgerm::quantities::build_minors;
use ktgerm::{KuoThom, MapGerm};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (n, comps): (usize, Vec<&str>) = if args.len() >= 2 {
        (args[0].parse().expect("n"), args[1..].iter().map(String::as_str).collect())
    } else {
        (2, vec!["x - y^2", "x^2"])
    };
    let f = MapGerm::parse(n, &comps).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(1)
    });
    let minors = build_minors(&f);
    println!("f = ({})", comps.join(", "));
    for m in &minors.p_minors {
        println!("p-minor {:?}: {}", m.columns, m.poly);
    }
    for m in &minors.thom_minors {
        println!("thom minor {:?}: {}", m.columns, m.poly);
    }
    println!("K2 = {}", minors.symbolic_kuo(&f, 2).unwrap());
    println!("T2 = {}", minors.symbolic_thom(&f, 2).unwrap());

    let kt = KuoThom::new(&f);
    let x: Vec<f64> = (0..n).map(|i| 0.01 * (i as f64 + 1.0)).collect();
    let e = kt.eval_uvwhg(1, &x).unwrap();
    println!("at {x:?}: u={:e} v={:e} w={:e} K1={:e} T1={:e}", e.u, e.v, e.w, e.k, e.t);
    println!("w <= 2(n-p) v: {}", e.w <= 2.0 * (n - f.p()) as f64 * e.v + 1e-12);
}
