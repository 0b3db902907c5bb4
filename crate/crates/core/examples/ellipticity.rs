//! Searches the K and T ideal generators for one bounded below by a power of
//! the distance to Sigma.

use ktgerm::quantities::{ideal_generators_k, ideal_generators_t};
use ktgerm::relative::{sigma_elliptic_probe, RelativeConfig};
use ktgerm::{MapGerm, SigmaSet};

fn main() {
    let cfg = RelativeConfig::default().with_seed(3);
    let sigma = SigmaSet::parse("subspaces: [x]", 2).unwrap();
    for comps in [["y^2"], ["x*y"], ["x^2 + y^2"]] {
        let f = MapGerm::parse(2, &comps).unwrap();
        for (name, gens) in [("I_K", ideal_generators_k(&f)), ("I_T", ideal_generators_t(&f))] {
            let rep = sigma_elliptic_probe(&gens, &sigma, 4, &cfg).unwrap();
            let alphas: Vec<String> = rep
                .generators
                .iter()
                .map(|g| format!("{}:{}", g.generator, g.alpha.map_or("-".into(), |a| a.to_string())))
                .collect();
            println!("f = {}  {name}: elliptic={} [{}]", comps[0], rep.elliptic, alphas.join(" "));
        }
    }
}
