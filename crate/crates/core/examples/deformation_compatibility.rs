//! Relative verdicts along f + t (g - f) when the jets agree on Sigma.

use ktgerm::poly::parse_rational;
use ktgerm::relative::{check_compatibility, jets_equal_on_sigma, RelativeConfig};
use ktgerm::{MapGerm, RelativeCondition, SigmaSet};

fn main() {
    let f = MapGerm::parse(2, &["y^2"]).unwrap();
    let g = MapGerm::parse(2, &["y^2 + x*y^3"]).unwrap();
    let sigma = SigmaSet::parse("subspaces: [x]", 2).unwrap();
    println!("2-jets equal on Sigma: {}", jets_equal_on_sigma(&f, &g, 2, &sigma).unwrap());
    let grid: Vec<_> = ["0", "1/4", "1/2", "3/4", "1"].iter().map(|s| parse_rational(s).unwrap()).collect();
    let cfg = RelativeConfig::default().with_seed(5);
    let rep = check_compatibility(&f, &g, 2, 1, RelativeCondition::Kuo, &sigma, &grid, &cfg).unwrap();
    for row in &rep.rows {
        println!("t = {:>3}: holds = {}", row.t, row.verdict.holds);
    }
    println!("constant along the deformation: {}", rep.constant);

    let far = MapGerm::parse(2, &["y^2 + x^3"]).unwrap();
    match check_compatibility(&f, &far, 2, 1, RelativeCondition::Kuo, &sigma, &grid, &cfg) {
        Err(e) => println!("g = y^2 + x^3: {e}"),
        Ok(_) => println!("g = y^2 + x^3: unexpectedly compatible"),
    }
}
