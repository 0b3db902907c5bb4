//! Gradient and K/T scans on shrinking spheres with the fitted exponents.
//!
//!     cargo run --example sphere_scan -- "x^3 - 3*x*y^2"

use ktgerm::lojasiewicz::{
    estimate_exponent, scan_quantity, sufficiency_degree_estimate, Quantity, ScanConfig,
};
use ktgerm::{KuoThom, MapGerm};

fn main() {
    let src = std::env::args().nth(1).unwrap_or_else(|| "x^3 - 3*x*y^2".into());
    let f = MapGerm::parse(2, &[src.as_str()]).expect("scalar germ in x, y");
    let cfg = ScanConfig::default();
    let kt = KuoThom::new(&f);
    for q in [Quantity::Gradient, Quantity::Kuo(1), Quantity::Kuo(2), Quantity::Thom(2)] {
        let scan = scan_quantity(&kt, q, &cfg).unwrap();
        match estimate_exponent(&scan, &cfg) {
            Ok(e) => println!("{q:?}: slope {:.4} (r^2 {:.6})", e.slope, e.r_squared),
            Err(e) => println!("{q:?}: {e}"),
        }
    }
    let deg = sufficiency_degree_estimate(&f, 8, &cfg).unwrap();
    println!("sufficiency degree estimate: {deg:?}");
}
