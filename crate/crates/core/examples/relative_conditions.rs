//! Conditions relative to a set Sigma, sampled in distance bands.
//!
//!     cargo run --example relative_conditions -- 11

use std::time::Instant;

use ktgerm::relative::{relative_from_samples, shell_samples, RelativeConfig};
use ktgerm::{KuoThom, MapGerm, RelativeCondition, SigmaSet};

fn main() {
    let seed: u64 = std::env::args().nth(1).map_or(11, |s| s.parse().expect("seed"));
    let cfg = RelativeConfig::default().with_seed(seed);
    let f = MapGerm::parse(2, &["y^2"]).unwrap();
    let kt = KuoThom::new(&f);
    for text in ["subspaces: [x]", "subspaces: []", "zeros: y - x^2"] {
        let sigma = SigmaSet::parse(text, 2).unwrap();
        let clock = Instant::now();
        // one sample set serves every condition on the same Sigma
        let samples = shell_samples(&sigma, &cfg).unwrap();
        println!("Sigma = {sigma} ({}), {} samples", sigma.distance_method(), samples.len());
        for which in [RelativeCondition::Kuo, RelativeCondition::Thom] {
            for r in 1..=3 {
                let v = relative_from_samples(&kt, &sigma, which, r, 1, &samples, &cfg);
                let slope = v.estimate.map(|e| format!("{:.3}", e.slope)).unwrap_or("-".into());
                println!("  {which:?} r={r}: holds={} slope={slope}", v.holds);
            }
        }
        println!("  ({:.1?})", clock.elapsed());
    }
}
