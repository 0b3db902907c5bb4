//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use ktgerm::arcs::{arc_corpus, ArcBounds};
use ktgerm::cli::{example_germ, EXAMPLE_K2, EXAMPLE_T2};
use ktgerm::corpus::{germ_corpus, GermBounds};
use ktgerm::lojasiewicz::{
    ratio_on_polar_grid, scan_quantity, estimate_exponent, sufficiency_degree_estimate, verdict_from_scan, Quantity,
    ScanConfig,
};
use ktgerm::poly::parse_rational;
use ktgerm::quantities::build_minors;
use ktgerm::relative::{check_compatibility, jets_equal_on_sigma, relative_from_samples, shell_samples, RelativeConfig};
use ktgerm::rng::{ball_point, stream};
use ktgerm::{parse_poly, ArcOracle, KuoThom, MapGerm, Order, RelativeCondition, SigmaSet, Vars};

const CORPUS_SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn corpus() -> Vec<MapGerm> {
    germ_corpus(CORPUS_SEED, 200, &GermBounds::default())
}

fn arcs_for(i: usize, f: &MapGerm) -> Vec<ktgerm::Arc> {
    arc_corpus(CORPUS_SEED + 1 + i as u64, 50, f.n(), ArcBounds::default()).unwrap()
}

fn symbolic_reproduction() -> Outcome {
    let clock = Instant::now();
    let f = example_germ();
    let minors = build_minors(&f);
    let vars = Vars::standard(2);
    let k2 = minors.symbolic_kuo(&f, 2).unwrap();
    let t2 = minors.symbolic_thom(&f, 2).unwrap();
    let ok = k2 == parse_poly(EXAMPLE_K2, &vars).unwrap() && t2 == parse_poly(EXAMPLE_T2, &vars).unwrap();
    let took = clock.elapsed();
    outcome(ok && took < Duration::from_secs(1), format!("K2 = {k2}, T2 = {t2} in {took:.2?}"))
}

fn ratio_bound() -> Outcome {
    let clock = Instant::now();
    let kt = KuoThom::new(&example_germ());
    let g = ratio_on_polar_grid(&kt, 2, 0.01, 100, 100);
    let took = clock.elapsed();
    let ok = g.points_used + g.excluded == 10_000
        && g.min_ratio >= 1.0
        && g.max_ratio <= 66.0
        && took < Duration::from_secs(10);
    outcome(
        ok,
        format!("K2/T2 in [{}, {}] over {} points ({} excluded) in {took:.2?}", g.min_ratio, g.max_ratio, g.points_used, g.excluded),
    )
}

fn arc_orders(germs: &[MapGerm]) -> Outcome {
    let clock = Instant::now();
    let (mut total, mut equal, mut infinite) = (0, 0, 0);
    for (i, f) in germs.iter().enumerate() {
        let probe = ktgerm::equivalence_probe(f, &arcs_for(i, f), 1).unwrap();
        total += probe.total;
        equal += probe.equal_count;
        infinite += probe.rows.iter().filter(|r| r.ord_k == Order::Infinity).count();
    }
    let took = clock.elapsed();
    outcome(
        equal == total && total == 10_000 && took < Duration::from_secs(300),
        format!("{equal}/{total} arcs with ord_K = ord_T ({infinite} both infinite) in {took:.2?}"),
    )
}

fn m_scaling(germs: &[MapGerm]) -> Outcome {
    let (mut cases, mut bad) = (0, 0);
    for (i, f) in germs.iter().enumerate() {
        let oracle = ArcOracle::new(f);
        for arc in arcs_for(i, f) {
            let (k1, t1) = (oracle.ord_k(1, &arc).unwrap(), oracle.ord_t(1, &arc).unwrap());
            for m in [1u32, 2, 3, 5] {
                cases += 1;
                if oracle.ord_k(m, &arc).unwrap() != k1 * m as u64 || oracle.ord_t(m, &arc).unwrap() != t1 * m as u64 {
                    bad += 1;
                }
            }
        }
    }
    outcome(bad == 0, format!("{} of {cases} (germ, arc, m) cases scale linearly", cases - bad))
}

fn domination(germs: &[MapGerm]) -> Outcome {
    let mut rng = stream(CORPUS_SEED, "acceptance-domination");
    let evaluators: Vec<KuoThom> = germs.iter().map(KuoThom::new).collect();
    let (mut violations, mut worst) = (0, f64::NEG_INFINITY);
    for s in 0..100_000usize {
        let kt = &evaluators[s % evaluators.len()];
        let f = kt.germ();
        let x = ball_point(&mut rng, f.n(), 0.5);
        let e = kt.eval_uvwhg(1, &x).unwrap();
        let excess = e.w - 2.0 * (f.n() - f.p()) as f64 * e.v;
        worst = worst.max(excess);
        if excess > 1e-12 {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("100000 points, {violations} violations, largest w - 2(n-p)v = {worst:e}"))
}

fn exponent_accuracy() -> Outcome {
    let cfg = ScanConfig::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for (src, slope, degree) in [("x^2 + y^2", 1.0, 2), ("x^3 - 3*x*y^2", 2.0, 3)] {
        let clock = Instant::now();
        let f = MapGerm::parse(2, &[src]).unwrap();
        let scan = scan_quantity(&KuoThom::new(&f), Quantity::Gradient, &cfg).unwrap();
        let est = estimate_exponent(&scan, &cfg).map(|e| e.slope).unwrap_or(f64::NAN);
        let deg = sufficiency_degree_estimate(&f, 6, &cfg).unwrap();
        let took = clock.elapsed();
        ok &= (est - slope).abs() <= 0.05 && deg == Some(degree) && took < Duration::from_secs(30);
        parts.push(format!("{src}: slope {est:.4}, degree {deg:?} ({took:.2?})"));
    }
    outcome(ok, parts.join("; "))
}

fn kt_verdicts(germs: &[MapGerm]) -> Outcome {
    let cfg = ScanConfig::default().with_seed(CORPUS_SEED);
    let (mut agree, mut total, mut finite) = (0, 0, 0);
    for f in germs.iter().take(20) {
        let kt = KuoThom::new(f);
        let ks = scan_quantity(&kt, Quantity::Kuo(2), &cfg).unwrap();
        let ts = scan_quantity(&kt, Quantity::Thom(2), &cfg).unwrap();
        if estimate_exponent(&ks, &cfg).is_ok() {
            finite += 1;
        }
        for r in 1..=6u64 {
            let target = 2.0 * r as f64;
            total += 1;
            if verdict_from_scan("K2", &ks, target, &cfg).holds == verdict_from_scan("T2", &ts, target, &cfg).holds {
                agree += 1;
            }
        }
    }
    outcome(agree == total, format!("{agree}/{total} (germ, r) verdict pairs agree; {finite} of 20 germs have a finite K2 exponent"))
}

fn relative_condition() -> Outcome {
    let cfg = RelativeConfig::default().with_seed(CORPUS_SEED);
    let f = MapGerm::parse(2, &["y^2"]).unwrap();
    let sigma = SigmaSet::parse("subspaces: [x]", 2).unwrap();
    let samples = shell_samples(&sigma, &cfg).unwrap();
    let kt = KuoThom::new(&f);
    let k = relative_from_samples(&kt, &sigma, RelativeCondition::Kuo, 2, 1, &samples, &cfg);
    let t = relative_from_samples(&kt, &sigma, RelativeCondition::Thom, 2, 1, &samples, &cfg);
    let below = samples
        .iter()
        .filter(|s| kt.eval_k(1, &s.point).unwrap() < s.distance * s.distance)
        .count();
    outcome(
        k.holds && t.holds && below == 0,
        format!(
            "I^K holds={} I^T holds={}; K1 >= d^2 fails at {below} of {} samples",
            k.holds,
            t.holds,
            samples.len()
        ),
    )
}

fn compatibility() -> Outcome {
    let f = MapGerm::parse(2, &["y^2"]).unwrap();
    let g = MapGerm::parse(2, &["y^2 + x*y^3"]).unwrap();
    let sigma = SigmaSet::parse("subspaces: [x]", 2).unwrap();
    let jets = jets_equal_on_sigma(&f, &g, 2, &sigma).unwrap();
    let grid: Vec<_> = ["0", "1/4", "1/2", "3/4", "1"].iter().map(|s| parse_rational(s).unwrap()).collect();
    let cfg = RelativeConfig::default().with_seed(CORPUS_SEED);
    let rep = check_compatibility(&f, &g, 2, 1, RelativeCondition::Kuo, &sigma, &grid, &cfg).unwrap();
    let all_hold = rep.rows.iter().all(|r| r.verdict.holds);
    outcome(
        jets && rep.constant && all_hold && rep.rows.len() == 5,
        format!("jets equal on Sigma: {jets}; holds at t = {:?}", rep.rows.iter().map(|r| (r.t.as_str(), r.verdict.holds)).collect::<Vec<_>>()),
    )
}

fn determinism() -> Outcome {
    let run = || Command::new(env!("CARGO_BIN_EXE_ktgerm")).args(["example", "--seed", "7"]).output().unwrap();
    let (a, b) = (run(), run());
    let ok = a.status.success() && b.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    outcome(ok, format!("two runs, {} bytes each, identical: {}", a.stdout.len(), a.stdout == b.stdout))
}

fn main() {
    let germs = corpus();
    let results = [
        ("1 symbolic K2/T2 of the worked example", symbolic_reproduction()),
        ("2 K2/T2 ratio within [1, 66] on the grid", ratio_bound()),
        ("3 arc orders of K and T coincide", arc_orders(&germs)),
        ("4 arc orders scale with m", m_scaling(&germs)),
        ("5 w <= 2(n-p) v pointwise", domination(&germs)),
        ("6 gradient exponents and degree estimates", exponent_accuracy()),
        ("7 K2 and T2 verdicts agree for r = 1..6", kt_verdicts(&germs)),
        ("8 relative condition for y^2 along the x-axis", relative_condition()),
        ("9 compatibility along the deformation", compatibility()),
        ("10 example report is byte-identical", determinism()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
