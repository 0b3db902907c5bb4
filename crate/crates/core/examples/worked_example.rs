//! The germ f = (x - y^2, x^2) end to end, printed as the `example` report.
//!
//!     cargo run --example worked_example -- 7

use ktgerm::cli::{cmd_example, TaskConfig};

fn main() {
    let seed = std::env::args().nth(1).map(|s| s.parse().expect("seed must be an integer"));
    let cfg = TaskConfig {
        seed,
        ..TaskConfig::default()
    };
    let out = cmd_example(&cfg).expect("example runs");
    print!("{}", out.report.to_json());
}
