//! Command-line front end: file parsing, orchestration and report assembly.
//!
//! Exit codes: 0 success, 1 parse or validation error, 2 precondition
//! violation, 3 internal inconsistency.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arcs::{arc_corpus, equivalence_probe, Arc, ArcBounds, ArcOracle};
use crate::error::{Error, Result};
use crate::lojasiewicz::{
    horn_membership, radial_scan, ratio_bounds, ratio_on_polar_grid, scan_quantity, verdict_from_scan,
    ConditionVerdict, Quantity, RadialScan, ScanConfig, SphereStrategy,
};
use crate::poly::{parse_poly, parse_rational, PolyError, Polynomial, Rational, Vars};
use crate::quantities::{build_minors, ideal_generators_k, ideal_generators_t, KuoThom, MapGerm, MinorCache};
use crate::relative::{
    check_compatibility, relative_from_samples, shell_samples, sigma_elliptic_probe, RelativeCondition,
    RelativeConfig, SigmaSet,
};
use crate::report::{fmt_rational, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ktgerm", version, about = "Kuo and Thom quantities of polynomial map germs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minors, symbolic K_m/T_m and condition verdicts for one germ.
    Analyze(CommonArgs),
    /// Exact arc-order comparison of K_m and T_m.
    Arcs(CommonArgs),
    /// Conditions relative to a set Sigma.
    Relative(CommonArgs),
    /// The built-in two-variable example end to end.
    Example(CommonArgs),
}

#[derive(Debug, Clone, Args, Default)]
pub struct CommonArgs {
    #[arg(long)]
    pub germ: Option<PathBuf>,
    #[arg(long)]
    pub sigma: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; the JSON report goes to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Precondition(_) | Error::Unsupported(_) => EXIT_PRECONDITION,
            Error::Inconsistency(_) => EXIT_INCONSISTENT,
            _ => EXIT_INVALID,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    pub radii: Vec<f64>,
    pub grid_per_angle: usize,
    pub multistart: usize,
    pub directions: usize,
    pub zero_rel_tol: f64,
}

impl Default for ScanSection {
    fn default() -> Self {
        let d = ScanConfig::default();
        ScanSection {
            radii: d.radii,
            grid_per_angle: d.strategy.grid_per_angle,
            multistart: d.strategy.multistart,
            directions: d.strategy.directions,
            zero_rel_tol: d.zero_rel_tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArcSection {
    pub count: usize,
    pub max_exponent: u32,
    pub max_terms: usize,
    pub coeff_bound: u32,
    /// Explicit arcs, one per line in the `t^2; t` format.
    pub file: Option<PathBuf>,
}

impl Default for ArcSection {
    fn default() -> Self {
        let b = ArcBounds::default();
        ArcSection {
            count: 50,
            max_exponent: b.max_exponent,
            max_terms: b.max_terms,
            coeff_bound: b.coeff_bound,
            file: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelativeSection {
    pub ball_radius: f64,
    pub top_distance: f64,
    pub bands: usize,
    pub samples_per_band: usize,
    pub t_grid: Vec<String>,
    pub alpha_max: u64,
}

impl Default for RelativeSection {
    fn default() -> Self {
        let d = RelativeConfig::default();
        RelativeSection {
            ball_radius: d.ball_radius,
            top_distance: d.top_distance,
            bands: d.bands,
            samples_per_band: d.samples_per_band,
            t_grid: ["0", "1/4", "1/2", "3/4", "1"].iter().map(|s| s.to_string()).collect(),
            alpha_max: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatioSection {
    pub radius: f64,
    pub samples: usize,
}

impl Default for RatioSection {
    fn default() -> Self {
        RatioSection {
            radius: 0.01,
            samples: 10_000,
        }
    }
}

/// Parameters of one CLI task, read from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskConfig {
    pub seed: Option<u64>,
    pub m: Vec<u32>,
    pub r: Vec<u64>,
    pub tolerance: f64,
    pub horn_width: f64,
    pub scan: ScanSection,
    pub arcs: ArcSection,
    pub relative: RelativeSection,
    pub ratio: RatioSection,
}

impl Default for TaskConfig {
    fn default() -> Self {
        TaskConfig {
            seed: None,
            m: vec![1, 2],
            r: vec![1, 2, 3, 4],
            tolerance: 0.1,
            horn_width: 1.0,
            scan: ScanSection::default(),
            arcs: ArcSection::default(),
            relative: RelativeSection::default(),
            ratio: RatioSection::default(),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

impl TaskConfig {
    pub fn from_toml(src: &str, path: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_col(src, s.start))
                .unwrap_or((0, 0));
            Error::Parse {
                path: path.to_string(),
                line,
                column,
                message: e.message().to_string(),
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.m.is_empty() || self.m.iter().any(|&m| m == 0) {
            return Err(invalid("m values must be positive"));
        }
        if self.r.is_empty() || self.r.iter().any(|&r| r == 0) {
            return Err(invalid("r values must be positive"));
        }
        if !(self.tolerance >= 0.0) || !(self.horn_width > 0.0) {
            return Err(invalid("tolerance must be nonnegative and horn_width positive"));
        }
        if self.arcs.max_exponent == 0 || self.arcs.max_terms == 0 || self.arcs.coeff_bound == 0 {
            return Err(invalid("arc bounds must be positive"));
        }
        if !(self.ratio.radius > 0.0) || self.ratio.samples == 0 {
            return Err(invalid("ratio radius and samples must be positive"));
        }
        self.scan_config(0).validate()?;
        self.relative_config(0).validate()?;
        self.t_grid()?;
        Ok(())
    }

    pub fn require_seed(&self, what: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| invalid(format!("{what} is randomized and needs a seed (--seed or `seed` in the config)")))
    }

    pub fn scan_config(&self, seed: u64) -> ScanConfig {
        ScanConfig {
            radii: self.scan.radii.clone(),
            strategy: SphereStrategy {
                grid_per_angle: self.scan.grid_per_angle,
                multistart: self.scan.multistart,
                directions: self.scan.directions,
                seed,
                ..SphereStrategy::default()
            },
            tolerance: self.tolerance,
            zero_rel_tol: self.scan.zero_rel_tol,
        }
    }

    pub fn relative_config(&self, seed: u64) -> RelativeConfig {
        RelativeConfig {
            ball_radius: self.relative.ball_radius,
            top_distance: self.relative.top_distance,
            bands: self.relative.bands,
            samples_per_band: self.relative.samples_per_band,
            tolerance: self.tolerance,
            zero_rel_tol: self.scan.zero_rel_tol,
            seed,
        }
    }

    pub fn arc_bounds(&self) -> ArcBounds {
        ArcBounds {
            max_exponent: self.arcs.max_exponent,
            max_terms: self.arcs.max_terms,
            coeff_bound: self.arcs.coeff_bound,
        }
    }

    pub fn t_grid(&self) -> Result<Vec<Rational>> {
        self.relative
            .t_grid
            .iter()
            .map(|s| parse_rational(s).map_err(|e| invalid(format!("t_grid entry '{s}': {e}"))))
            .collect()
    }
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// A germ file: `n:`, one `f:` line per component, optional `r:` and optional
/// `g:` lines for a second germ used in compatibility checks.
#[derive(Clone, Debug, PartialEq)]
pub struct GermFile {
    pub germ: MapGerm,
    pub comparison: Option<MapGerm>,
}

pub fn parse_germ_file(src: &str, path: &str) -> Result<GermFile> {
    let perr = |line: usize, column: usize, message: String| Error::Parse {
        path: path.to_string(),
        line,
        column,
        message,
    };
    let mut n: Option<usize> = None;
    let mut r: Option<u64> = None;
    let mut f_lines: Vec<(usize, usize, &str)> = Vec::new();
    let mut g_lines: Vec<(usize, usize, &str)> = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(colon) = content.find(':') else {
            let col = content.len() - content.trim_start().len() + 1;
            return Err(perr(line_no, col, "expected `key: value`".into()));
        };
        let key = content[..colon].trim();
        let value = &content[colon + 1..];
        let value_col = colon + 2 + (value.len() - value.trim_start().len());
        let value = value.trim();
        match key {
            "n" => {
                n = Some(value.parse().ok().filter(|&v: &usize| v > 0).ok_or_else(|| {
                    perr(line_no, value_col, format!("invalid dimension '{value}'"))
                })?)
            }
            "r" => {
                r = Some(value.parse().ok().filter(|&v: &u64| v > 0).ok_or_else(|| {
                    perr(line_no, value_col, format!("invalid jet degree '{value}'"))
                })?)
            }
            "f" => f_lines.push((line_no, value_col, value)),
            "g" => g_lines.push((line_no, value_col, value)),
            other => {
                let col = content.find(other).unwrap_or(0) + 1;
                return Err(perr(line_no, col, format!("unknown key '{other}'")));
            }
        }
    }
    let n = n.ok_or_else(|| perr(1, 1, "missing `n:` line".into()))?;
    let vars = Vars::standard(n);
    let parse_lines = |lines: &[(usize, usize, &str)]| -> Result<Vec<Polynomial>> {
        lines
            .iter()
            .map(|&(l, c, s)| {
                parse_poly(s, &vars).map_err(|e| match e {
                    PolyError::Parse { column, message } => perr(l, c + column - 1, message),
                    other => perr(l, c, other.to_string()),
                })
            })
            .collect()
    };
    if f_lines.is_empty() {
        return Err(perr(1, 1, "no `f:` components".into()));
    }
    let mut germ = MapGerm::new(n, parse_lines(&f_lines)?)?;
    if let Some(r) = r {
        germ = germ.with_jet_degree(r);
    }
    let comparison = if g_lines.is_empty() {
        None
    } else {
        Some(MapGerm::new(n, parse_lines(&g_lines)?)?)
    };
    Ok(GermFile { germ, comparison })
}

pub fn parse_sigma_file(src: &str, n: usize) -> Result<SigmaSet> {
    let body: Vec<&str> = src
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .collect();
    SigmaSet::parse(&body.join(" "), n)
}

pub fn parse_arc_file(src: &str, path: &str) -> Result<Vec<Arc>> {
    src.lines()
        .enumerate()
        .filter(|(_, l)| !l.split('#').next().unwrap_or("").trim().is_empty())
        .map(|(i, l)| {
            Arc::parse(l.split('#').next().unwrap_or("")).map_err(|e| Error::Parse {
                path: path.to_string(),
                line: i + 1,
                column: 1,
                message: e.to_string(),
            })
        })
        .collect()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Report plus side files (CSV) and the exit code to use.
#[derive(Debug)]
pub struct Output {
    pub report: Report,
    pub files: Vec<(String, String)>,
    pub exit_code: i32,
}

impl Output {
    fn ok(report: Report) -> Self {
        Output {
            report,
            files: Vec::new(),
            exit_code: EXIT_OK,
        }
    }

    /// Writes into `out` when given, otherwise returns the JSON for stdout.
    pub fn emit(self, out: Option<&Path>) -> Result<(Option<String>, i32)> {
        let code = self.exit_code;
        let json = self.report.to_json();
        match out {
            None => Ok((Some(json), code)),
            Some(dir) => {
                let io = |source| Error::Io {
                    path: dir.display().to_string(),
                    source,
                };
                std::fs::create_dir_all(dir).map_err(io)?;
                std::fs::write(dir.join("report.json"), json).map_err(io)?;
                for (name, body) in self.files {
                    std::fs::write(dir.join(name), body).map_err(io)?;
                }
                Ok((None, code))
            }
        }
    }
}

fn load_config(args: &CommonArgs) -> Result<TaskConfig> {
    let mut cfg = match &args.config {
        Some(p) => TaskConfig::from_toml(&read(p)?, &p.display().to_string())?,
        None => TaskConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.seed = Some(s);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load_germ(args: &CommonArgs) -> Result<GermFile> {
    let p = args.germ.as_ref().ok_or_else(|| invalid("--germ is required"))?;
    parse_germ_file(&read(p)?, &p.display().to_string())
}

fn germ_summary(f: &MapGerm) -> Value {
    json!({
        "n": f.n(),
        "p": f.p(),
        "components": f.components().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "jet_degree": f.jet_degree(),
    })
}

/// Minors printed with 1-based column labels.
pub fn minors_summary(c: &MinorCache) -> Value {
    let fmt = |ms: &[crate::quantities::LabeledMinor]| -> Vec<Value> {
        ms.iter()
            .map(|m| {
                json!({
                    "columns": m.columns.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "minor": m.poly.to_string(),
                })
            })
            .collect()
    };
    json!({"p_minors": fmt(&c.p_minors), "thom_minors": fmt(&c.thom_minors)})
}

fn symbolic_summary(f: &MapGerm, c: &MinorCache, ms: &[u32]) -> Value {
    let mut out = BTreeMap::new();
    for &m in ms {
        match (c.symbolic_kuo(f, m), c.symbolic_thom(f, m)) {
            (Some(k), Some(t)) => {
                out.insert(format!("K{m}"), Value::from(k.to_string()));
                out.insert(format!("T{m}"), Value::from(t.to_string()));
            }
            _ => {
                out.insert(
                    format!("m{m}"),
                    Value::from("odd m: K_m and T_m involve absolute values and norms, no polynomial form"),
                );
            }
        }
    }
    serde_json::to_value(out).unwrap()
}

#[derive(Serialize)]
struct RVerdict<'a> {
    r: u64,
    #[serde(flatten)]
    verdict: &'a ConditionVerdict,
}

/// Sphere scans keyed by quantity, computed once per task.
struct ScanCache<'a> {
    kt: &'a KuoThom,
    cfg: &'a ScanConfig,
    scans: Vec<(Quantity, RadialScan)>,
}

impl<'a> ScanCache<'a> {
    fn get(&mut self, q: Quantity) -> Result<&RadialScan> {
        if let Some(i) = self.scans.iter().position(|(k, _)| *k == q) {
            return Ok(&self.scans[i].1);
        }
        let s = scan_quantity(self.kt, q, self.cfg)?;
        self.scans.push((q, s));
        Ok(&self.scans.last().unwrap().1)
    }
}

fn quantity_label(q: Quantity) -> String {
    match q {
        Quantity::Gradient => "gradient".into(),
        Quantity::Kuo(m) => format!("K{m}"),
        Quantity::Thom(m) => format!("T{m}"),
    }
}

pub fn cmd_analyze(gf: &GermFile, cfg: &TaskConfig) -> Result<Output> {
    let f = &gf.germ;
    let seed = if f.n() >= 4 {
        cfg.require_seed("sphere search in dimension >= 4")?
    } else {
        cfg.seed.unwrap_or(0)
    };
    let scfg = cfg.scan_config(seed);
    let kt = KuoThom::new(f);
    let minors = kt.minors().clone();
    let mut report = Report::new("analyze");
    report.set("config", cfg);
    report.set("germ", &germ_summary(f));
    report.set("minors", &minors_summary(&minors));
    report.set("symbolic", &symbolic_summary(f, &minors, &cfg.m));
    report.set(
        "generators",
        &json!({
            "I_K": ideal_generators_k(f).iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "I_T": ideal_generators_t(f).iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        }),
    );
    if f.n() == f.p() {
        report.caveat("n = p: T_m(f, x) = |f(x)|^m");
    }
    if f.is_zero_map() {
        report.set(
            "diagnostic",
            &"degenerate input: zero map, every lower bound fails",
        );
    }

    let mut cache = ScanCache {
        kt: &kt,
        cfg: &scfg,
        scans: Vec::new(),
    };
    let mut verdicts: BTreeMap<String, Vec<Value>> = BTreeMap::new();
    let mut push = |name: &str, r: u64, v: &ConditionVerdict| {
        verdicts
            .entry(name.to_string())
            .or_default()
            .push(crate::report::to_value(&RVerdict { r, verdict: v }));
    };
    let mut agreement = Vec::new();
    for &r in &cfg.r {
        if f.p() == 1 {
            let s = cache.get(Quantity::Gradient)?;
            push("kuiper-kuo", r, &verdict_from_scan("kuiper-kuo", s, r as f64 - 1.0, &scfg));
        }
        let horn = radial_scan(
            &|x: &[f64]| kt.gradient_size(x),
            &|x: &[f64]| horn_membership(&kt, r, cfg.horn_width, x),
            f.n(),
            &scfg,
        )?;
        push("kuo", r, &verdict_from_scan("kuo", &horn, r as f64 - 1.0, &scfg));
        let s = cache.get(Quantity::Kuo(1))?;
        push("k-tilde", r, &verdict_from_scan("k-tilde", s, r as f64, &scfg));
        let s = cache.get(Quantity::Thom(2))?;
        push("thom-inequality", r, &verdict_from_scan("thom-inequality", s, 2.0 * r as f64, &scfg));
        for &m in &cfg.m {
            let target = (m as u64 * r) as f64;
            let kv = verdict_from_scan(&format!("K{m}"), cache.get(Quantity::Kuo(m))?, target, &scfg);
            let tv = verdict_from_scan(&format!("T{m}"), cache.get(Quantity::Thom(m))?, target, &scfg);
            agreement.push(json!({"r": r, "m": m, "K_holds": kv.holds, "T_holds": tv.holds, "agree": kv.holds == tv.holds}));
            push(&format!("K{m}-lower-bound"), r, &kv);
            push(&format!("T{m}-lower-bound"), r, &tv);
        }
    }
    report.set("verdicts", &verdicts);
    report.set("kt_agreement", &agreement);
    if f.p() == 1 {
        let s = cache.get(Quantity::Gradient)?;
        let r_max = cfg.r.iter().copied().max().unwrap_or(1);
        let degree = (1..=r_max).find(|&r| verdict_from_scan("kuiper-kuo", s, r as f64 - 1.0, &scfg).holds);
        report.set("sufficiency_degree_estimate", &json!({"r_max": r_max, "degree": degree}));
    }
    let mut ratios = Vec::new();
    for &m in &cfg.m {
        let big = ratio_bounds(&kt, m, cfg.ratio.radius, cfg.ratio.samples, seed);
        let small = ratio_bounds(&kt, m, cfg.ratio.radius / 4.0, cfg.ratio.samples, seed);
        ratios.push(json!({"m": m, "outer": crate::report::to_value(&big), "inner": crate::report::to_value(&small)}));
    }
    report.set("ratio_bounds", &ratios);
    report.caveat(crate::lojasiewicz::CAVEAT);

    let mut out = Output::ok(report);
    let mut csv_names = Vec::new();
    for (q, s) in &cache.scans {
        let name = format!("scan_{}.csv", quantity_label(*q));
        out.files.push((name.clone(), s.to_csv()));
        csv_names.push(name);
    }
    out.report.set(
        "csv",
        &json!({"files": csv_names, "columns": ["radius", "min_value"]}),
    );
    Ok(out)
}

pub fn cmd_arcs(gf: &GermFile, cfg: &TaskConfig, arcs_override: Option<Vec<Arc>>) -> Result<Output> {
    let f = &gf.germ;
    let (arcs, source) = match arcs_override {
        Some(a) => (a, "explicit".to_string()),
        None => match &cfg.arcs.file {
            Some(p) => (parse_arc_file(&read(p)?, &p.display().to_string())?, "file".to_string()),
            None => {
                let seed = cfg.require_seed("random arc generation")?;
                (arc_corpus(seed, cfg.arcs.count, f.n(), cfg.arc_bounds())?, "seeded".to_string())
            }
        },
    };
    for a in &arcs {
        if a.n() != f.n() {
            return Err(Error::DimensionMismatch {
                expected: f.n(),
                got: a.n(),
            });
        }
    }
    let probe = equivalence_probe(f, &arcs, 1)?;
    let oracle = ArcOracle::new(f);
    let mut scaling_ok = true;
    for a in &arcs {
        let l = oracle.ledger(a)?;
        for &m in &cfg.m {
            scaling_ok &= l.ord_k(m) == l.ord_k(1).scale(m as u64) && l.ord_t(m) == l.ord_t(1).scale(m as u64);
        }
    }
    let mut report = Report::new("arcs");
    report.set("config", cfg);
    report.set("germ", &germ_summary(f));
    report.set("arc_source", &source);
    let rows: Vec<Value> = probe
        .rows
        .iter()
        .zip(&arcs)
        .map(|(row, a)| {
            json!({"arc_id": row.arc_id, "arc": a.to_string(), "ord_K": row.ord_k, "ord_T": row.ord_t, "equal": row.equal})
        })
        .collect();
    report.set("rows", &rows);
    report.set(
        "summary",
        &json!({"total": probe.total, "equal": probe.equal_count, "m_scaling_holds": scaling_ok}),
    );
    report.set("csv", &json!({"files": ["arcs.csv"], "columns": ["arc_id", "ord_K", "ord_T", "equal"]}));
    let consistent = probe.all_equal() && scaling_ok;
    if !consistent {
        report.set(
            "diagnostic",
            &"arc-order mismatch between K_m and T_m: implementation inconsistency",
        );
    }
    Ok(Output {
        report,
        files: vec![("arcs.csv".into(), probe.to_csv())],
        exit_code: if consistent { EXIT_OK } else { EXIT_INCONSISTENT },
    })
}

pub fn cmd_relative(gf: &GermFile, sigma: &SigmaSet, cfg: &TaskConfig) -> Result<Output> {
    let f = &gf.germ;
    if sigma.nvars() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: sigma.nvars(),
        });
    }
    let seed = cfg.require_seed("relative sampling")?;
    let rcfg = cfg.relative_config(seed);
    let mut report = Report::new("relative");
    report.set("config", cfg);
    report.set("germ", &germ_summary(f));
    let mut meta = json!({
        "text": sigma.to_string(),
        "variant": sigma.variant(),
        "distance_method": sigma.distance_method(),
        "coherence": "assumed, not checked",
    });
    if sigma.is_origin() {
        meta["reduction"] = Value::from("Sigma = {0}: d(x, Sigma) = |x|, the non-relative conditions");
    }
    report.set("sigma", &meta);

    let samples = shell_samples(sigma, &rcfg)?;
    let kt = KuoThom::new(f);
    let mut verdicts = Vec::new();
    let mut corollary = Vec::new();
    for &r in &cfg.r {
        for &m in &cfg.m {
            let k = relative_from_samples(&kt, sigma, RelativeCondition::Kuo, r, m, &samples, &rcfg);
            let t = relative_from_samples(&kt, sigma, RelativeCondition::Thom, r, m, &samples, &rcfg);
            corollary.push(json!({"r": r, "m": m, "agree": k.holds == t.holds}));
            verdicts.push(crate::report::to_value(&k));
            verdicts.push(crate::report::to_value(&t));
        }
    }
    report.set("verdicts", &verdicts);
    report.set("kt_agreement", &corollary);

    let mut exit_code = EXIT_OK;
    if let Some(g) = &gf.comparison {
        let r = f.jet_degree().unwrap_or(cfg.r[0]);
        let m = cfg.m[0];
        match check_compatibility(f, g, r, m, RelativeCondition::Kuo, sigma, &cfg.t_grid()?, &rcfg) {
            Ok(rep) => report.set(
                "compatibility",
                &json!({"status": "ok", "r": r, "m": m, "g": germ_summary(g), "result": crate::report::to_value(&rep)}),
            ),
            Err(Error::Unsupported(msg)) => report.set(
                "compatibility",
                &json!({"status": "unsupported", "message": msg}),
            ),
            Err(e @ Error::Precondition(_)) => {
                report.set("compatibility", &json!({"status": "precondition-violation", "message": e.to_string()}));
                exit_code = EXIT_PRECONDITION;
            }
            Err(e) => return Err(e),
        }
    }
    let ell_k = sigma_elliptic_probe(&ideal_generators_k(f), sigma, cfg.relative.alpha_max, &rcfg)?;
    let ell_t = sigma_elliptic_probe(&ideal_generators_t(f), sigma, cfg.relative.alpha_max, &rcfg)?;
    report.set("ellipticity", &json!({"I_K": crate::report::to_value(&ell_k), "I_T": crate::report::to_value(&ell_t)}));
    report.caveat(crate::lojasiewicz::CAVEAT);
    Ok(Output {
        report,
        files: Vec::new(),
        exit_code,
    })
}

/// The germ `(x - y^2, x^2)` used by the `example` command.
pub fn example_germ() -> MapGerm {
    MapGerm::parse(2, &["x - y^2", "x^2"]).expect("valid example")
}

pub const EXAMPLE_K2: &str = "16*(x^2 + y^2)*x^2*y^2 + (x - y^2)^2 + x^4";
pub const EXAMPLE_T2: &str = "(x - y^2)^2 + x^4";

pub fn cmd_example(cfg: &TaskConfig) -> Result<Output> {
    let seed = cfg.seed.unwrap_or(7);
    let f = example_germ();
    let vars = Vars::standard(2);
    let minors = build_minors(&f);
    let k2 = minors.symbolic_kuo(&f, 2).expect("even m");
    let t2 = minors.symbolic_thom(&f, 2).expect("even m");
    let k2_ref = parse_poly(EXAMPLE_K2, &vars)?;
    let t2_ref = parse_poly(EXAMPLE_T2, &vars)?;
    let kt = KuoThom::new(&f);
    let grid = ratio_on_polar_grid(&kt, 2, 0.01, 100, 100);
    let arcs = arc_corpus(seed, cfg.arcs.count, 2, cfg.arc_bounds())?;
    let probe = equivalence_probe(&f, &arcs, 1)?;
    let scfg = cfg.scan_config(seed);
    let ks = scan_quantity(&kt, Quantity::Kuo(2), &scfg)?;
    let ts = scan_quantity(&kt, Quantity::Thom(2), &scfg)?;
    let verdicts: Vec<Value> = (1..=6u64)
        .map(|r| {
            let kv = verdict_from_scan("K2", &ks, 2.0 * r as f64, &scfg);
            let tv = verdict_from_scan("T2", &ts, 2.0 * r as f64, &scfg);
            json!({"r": r, "K2_holds": kv.holds, "T2_holds": tv.holds, "agree": kv.holds == tv.holds,
                   "K2_slope": kv.estimate.map(|e| e.slope), "T2_slope": tv.estimate.map(|e| e.slope)})
        })
        .collect();

    let mut report = Report::new("example");
    report.set("seed", &seed);
    report.set("germ", &germ_summary(&f));
    report.set("minors", &minors_summary(&minors));
    report.set(
        "symbolic",
        &json!({"K2": k2.to_string(), "T2": t2.to_string(),
                "K2_matches_reference": k2 == k2_ref, "T2_matches_reference": t2 == t2_ref}),
    );
    report.set(
        "ratio_grid",
        &json!({"radius": 0.01, "points": grid.points_used, "excluded_t_zero": grid.excluded,
                "min_k_over_t": grid.min_ratio, "max_k_over_t": grid.max_ratio,
                "within_1_and_66": grid.min_ratio >= 1.0 && grid.max_ratio <= 66.0}),
    );
    report.set(
        "arc_probe",
        &json!({"arcs": probe.total, "equal": probe.equal_count,
                "rows": probe.rows.iter().map(|r| json!([r.arc_id, r.ord_k, r.ord_t, r.equal])).collect::<Vec<_>>()}),
    );
    report.set("kt_verdicts", &verdicts);
    report.caveat(crate::lojasiewicz::CAVEAT);
    let exit_code = if probe.all_equal() { EXIT_OK } else { EXIT_INCONSISTENT };
    Ok(Output {
        report,
        files: vec![("arcs.csv".into(), probe.to_csv())],
        exit_code,
    })
}

/// Runs a parsed command line; returns stdout text (if any) and the exit code.
pub fn run(cli: &Cli) -> Result<(Option<String>, i32)> {
    let (args, out) = match &cli.command {
        Command::Analyze(a) => (a, cmd_analyze(&load_germ(a)?, &load_config(a)?)?),
        Command::Arcs(a) => (a, cmd_arcs(&load_germ(a)?, &load_config(a)?, None)?),
        Command::Relative(a) => {
            let gf = load_germ(a)?;
            let sp = a.sigma.as_ref().ok_or_else(|| invalid("--sigma is required"))?;
            let sigma = parse_sigma_file(&read(sp)?, gf.germ.n())?;
            (a, cmd_relative(&gf, &sigma, &load_config(a)?)?)
        }
        Command::Example(a) => (a, cmd_example(&load_config(a)?)?),
    };
    out.emit(args.out.as_deref())
}

pub fn rational_label(q: &Rational) -> String {
    fmt_rational(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn germ_file_parsing() {
        let gf = parse_germ_file("# demo\nn: 2\nf: x - y^2\nf: x^2  # second\nr: 3\n", "g.txt").unwrap();
        assert_eq!(gf.germ, example_germ().with_jet_degree(3));
        assert!(gf.comparison.is_none());
        let gf = parse_germ_file("n: 2\nf: y^2\ng: y^2 + x*y^3\n", "g.txt").unwrap();
        assert_eq!(gf.comparison.unwrap().components()[0].to_string(), "y^2 + x*y^3");
    }

    #[test]
    fn germ_file_errors_have_positions() {
        match parse_germ_file("n: 2\nf: x - q^2\n", "g.txt") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 8)),
            other => panic!("{other:?}"),
        }
        match parse_germ_file("n: 2\nbogus line\n", "g.txt") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_germ_file("f: x\n", "g"), Err(Error::Parse { .. })));
        assert!(matches!(parse_germ_file("n: 2\nf: x + 1\n", "g"), Err(Error::InvalidGerm(_))));
    }

    #[test]
    fn config_defaults_and_errors() {
        let c = TaskConfig::from_toml("seed = 3\nm = [2]\n[scan]\ngrid_per_angle = 360\n", "c.toml").unwrap();
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.m, vec![2]);
        assert_eq!(c.scan.grid_per_angle, 360);
        assert_eq!(c.scan.multistart, 16);
        c.validate().unwrap();
        match TaskConfig::from_toml("seed = 3\nbogus = 1\n", "c.toml") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let bad = TaskConfig {
            m: vec![0],
            ..TaskConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(TaskConfig::default().require_seed("x").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Error::Precondition("x".into()).exit_code(), EXIT_PRECONDITION);
        assert_eq!(Error::Inconsistency("x".into()).exit_code(), EXIT_INCONSISTENT);
        assert_eq!(invalid("x").exit_code(), EXIT_INVALID);
    }
}
