//! Experiment drivers behind the `phaseprobe` binary.
//!
//! Every run is a pure function of its parsed arguments: the arguments and
//! the crate version are echoed into the output, sweeps run on a rayon pool
//! (capped by `PHASEPROBE_THREADS`) but are assembled in input order, and
//! the only randomness is the explicitly seeded sampler.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::continuum::{cost_curve, family_cost, FAMILY_OPTIMUM};
use crate::crb::crb_gap_report;
use crate::error::{Error, Result};
use crate::fock::{mean_photon, FockVector, Parity};
use crate::herald::{
    herald_amplitudes, herald_fidelity, optimize_betas, published_config, HeraldConfig, PUBLISHED_FIDELITY,
    PUBLISHED_NORMALIZER, PUBLISHED_PRODUCT, PUBLISHED_SUM,
};
use crate::phase::{
    aligned_covariant_error, covariant_error, empirical_error, minimize_tau, modular_measurement_check,
    sample_estimates, PointerProfile, PointerShape,
};
use crate::squeeze::{alpha_asymptotics, psi74_core_coefficients, psi74_default_dim, psi74_state};
use crate::VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser, Serialize)]
#[command(name = "phaseprobe", version, about = "Energy-constrained phase estimation experiments")]
pub struct Cli {
    #[command(subcommand)]
    #[serde(flatten)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Minimal covariant error for each photon budget.
    Tau {
        #[arg(long = "energy", value_delimiter = ',', required = true)]
        energies: Vec<f64>,
        #[arg(long, default_value_t = 1024)]
        n_trunc: usize,
    },
    /// Cost of the x^a e^{-x/2} family over a grid of a.
    CostCurve {
        #[arg(long, default_value_t = 0.75)]
        a_min: f64,
        #[arg(long, default_value_t = 4.0)]
        a_max: f64,
        #[arg(long, default_value_t = 3250)]
        steps: usize,
    },
    /// Squeezed three-level probe: energy and error versus squeezing.
    Psi74 {
        #[arg(long = "r", value_delimiter = ',', default_values_t = vec![0.0, 1.0, 2.0, 3.0])]
        r_list: Vec<f64>,
        /// Fixed truncation; chosen per r when omitted.
        #[arg(long)]
        n_trunc: Option<usize>,
    },
    /// Squeezed number-state superpositions against their scaling limit.
    AlphaConvergence {
        #[arg(long, default_value_t = 2)]
        l: usize,
        #[arg(long, default_value = "even")]
        parity: Parity,
        #[arg(long = "r", value_delimiter = ',', default_values_t = vec![2.0, 2.5, 3.0, 3.5])]
        r_list: Vec<f64>,
    },
    /// Heralded preparation: amplitudes and fidelity.
    Herald {
        /// Two-mode squeezing `tanh r2`; defaults to tanh 2.
        #[arg(long)]
        q: Option<f64>,
        /// Four displacements; the published values when omitted.
        #[arg(long, value_delimiter = ',', num_args = 4, conflicts_with = "auto")]
        betas: Option<Vec<f64>>,
        /// Solve for the displacements instead.
        #[arg(long)]
        auto: bool,
        /// Target state (JSON file or built-in spec); the probe core by default.
        #[arg(long)]
        target: Option<String>,
    },
    /// Cramér-Rao bound of the divergent family versus the attainable error.
    CrbGap {
        #[arg(long, default_value_t = 10.0)]
        energy: f64,
        #[arg(long = "t", value_delimiter = ',', default_values_t = vec![10.0, 100.0, 1000.0])]
        t_list: Vec<f64>,
        #[arg(long, default_value_t = 1024)]
        n_trunc: usize,
    },
    /// Monte-Carlo estimate of the covariant error.
    Sample {
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 100_000)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Include the raw estimates in the output.
        #[arg(long)]
        emit_samples: bool,
    },
    /// Pointer realization of the measurement versus the ideal density.
    ModularCheck {
        #[arg(long)]
        state: String,
        #[arg(long, default_value = "raised-cosine")]
        pointer: String,
        #[arg(long, default_value_t = 512)]
        k_max: usize,
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Tau { .. } => "tau",
            Command::CostCurve { .. } => "cost-curve",
            Command::Psi74 { .. } => "psi74",
            Command::AlphaConvergence { .. } => "alpha-convergence",
            Command::Herald { .. } => "herald",
            Command::CrbGap { .. } => "crb-gap",
            Command::Sample { .. } => "sample",
            Command::ModularCheck { .. } => "modular-check",
        }
    }
}

/// Tabular result plus free-form summary fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Map<String, Value>,
    /// Exit code for partial failures recorded in the rows.
    pub exit_code: i32,
}

impl Report {
    fn new(cli: &Cli, columns: Vec<&'static str>) -> Self {
        Self {
            command: cli.command.name().to_string(),
            config: serde_json::to_value(cli).unwrap_or(Value::Null),
            columns,
            rows: Vec::new(),
            summary: Map::new(),
            exit_code: 0,
        }
    }

    fn set(&mut self, key: &str, v: impl Serialize) {
        self.summary.insert(key.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
            .collect();
        let doc = json!({
            "phaseprobe_version": VERSION,
            "command": self.command,
            "config": self.config,
            "summary": self.summary,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("values serialize");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# phaseprobe {VERSION} {}", self.command);
        let _ = writeln!(s, "# config: {}", self.config);
        for (k, v) in &self.summary {
            let _ = writeln!(s, "# {k}: {}", csv_summary(v));
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

fn csv_summary(v: &Value) -> String {
    match v {
        Value::Number(_) => csv_cell(v),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => format!("{:.16e}", n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn opt(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

/// Parses a state given as a JSON file or one of the built-in specs:
/// `vacuum`, `fock:N`, `sup:n1,n2,...` (equal superposition), `psi74-core`,
/// `psi74:R` (squeezed by `r = R`).
pub fn parse_state(spec: &str) -> Result<FockVector> {
    let spec = spec.trim();
    if spec == "vacuum" {
        return FockVector::basis(0, 1);
    }
    if spec == "psi74-core" {
        let c = psi74_core_coefficients();
        return FockVector::from_real(&[c[0], 0.0, c[1], 0.0, c[2]]);
    }
    if let Some(n) = spec.strip_prefix("fock:") {
        let n: usize = n.parse().map_err(|_| Error::Invalid(format!("bad photon number in '{spec}'")))?;
        return FockVector::basis(n, n + 1);
    }
    if let Some(list) = spec.strip_prefix("sup:") {
        let ns = list
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Invalid(format!("bad photon-number list in '{spec}'")))?;
        let top = ns.iter().copied().max().ok_or_else(|| Error::Invalid("empty superposition".into()))?;
        return FockVector::superposition(&ns, top + 1);
    }
    if let Some(r) = spec.strip_prefix("psi74:") {
        let r: f64 = r.parse().map_err(|_| Error::Invalid(format!("bad squeezing in '{spec}'")))?;
        return psi74_state(r, psi74_default_dim(r));
    }
    read_state(Path::new(spec))
}

pub fn read_state(path: &Path) -> Result<FockVector> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

pub fn write_state(path: &Path, v: &FockVector) -> Result<()> {
    let text = serde_json::to_string(v).map_err(|e| Error::Invalid(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

/// Runs the parsed command.
pub fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Tau { energies, n_trunc } => cmd_tau(cli, energies, *n_trunc),
        Command::CostCurve { a_min, a_max, steps } => cmd_cost_curve(cli, *a_min, *a_max, *steps),
        Command::Psi74 { r_list, n_trunc } => cmd_psi74(cli, r_list, *n_trunc),
        Command::AlphaConvergence { l, parity, r_list } => {
            let mut rep = Report::new(cli, vec!["r", "R", "sup_deviation"]);
            for row in alpha_asymptotics(*l, *parity, r_list)? {
                rep.rows.push(vec![num(row.r), num(row.scale), num(row.sup_deviation)]);
            }
            Ok(rep)
        }
        Command::Herald { q, betas, auto, target } => cmd_herald(cli, *q, betas.as_deref(), *auto, target.as_deref()),
        Command::CrbGap { energy, t_list, n_trunc } => {
            let g = crb_gap_report(*energy, *n_trunc, t_list)?;
            let mut rep = Report::new(cli, vec!["t", "mean", "variance", "mcrb", "E2mcrb", "E2tau", "ratio"]);
            for r in &g.rows {
                rep.rows.push(vec![
                    num(r.t),
                    num(r.mean),
                    num(r.variance),
                    opt(r.mcrb),
                    opt(r.e2mcrb),
                    num(g.e2tau),
                    opt(r.e2mcrb.map(|m| g.e2tau / m)),
                ]);
            }
            rep.set("E", g.energy);
            rep.set("tau", g.tau);
            rep.set("E2tau", g.e2tau);
            rep.set("inf_E2mcrb", g.inf_e2mcrb);
            rep.set("gap", g.gap);
            rep.set("vacuous", g.vacuous);
            rep.set("statement", &g.statement);
            Ok(rep)
        }
        Command::Sample { state, theta, count, seed, emit_samples } => {
            let v = parse_state(state)?.normalize()?;
            let samples = sample_estimates(&v, *theta, *count, *seed)?;
            let emp = empirical_error(&samples, *theta)?;
            let exact = covariant_error(&v)?;
            let mut rep = Report::new(cli, vec!["index", "theta_est"]);
            if *emit_samples {
                rep.rows = samples.iter().enumerate().map(|(i, x)| vec![json!(i), num(*x)]).collect();
            }
            rep.set("empirical_mean", emp.mean);
            rep.set("std_error", emp.std_error);
            rep.set("count", emp.count);
            rep.set("covariant_error", exact);
            rep.set("z_score", if emp.std_error > 0.0 { (emp.mean - exact) / emp.std_error } else { 0.0 });
            Ok(rep)
        }
        Command::ModularCheck { state, pointer, k_max, grid } => {
            let v = parse_state(state)?.normalize()?;
            let shape: PointerShape = pointer.parse()?;
            let profile = match shape {
                PointerShape::RaisedCosine => PointerProfile::raised_cosine(),
                PointerShape::Box => PointerProfile::boxcar(),
            };
            let mut rep = Report::new(cli, vec!["k_max", "max_deviation"]);
            let dev = modular_measurement_check(&v, &profile, *k_max, *grid)?;
            rep.rows.push(vec![json!(k_max), num(dev)]);
            Ok(rep)
        }
    }
}

fn cmd_tau(cli: &Cli, energies: &[f64], n_trunc: usize) -> Result<Report> {
    let results: Vec<_> = energies.par_iter().map(|&e| (e, minimize_tau(e, n_trunc))).collect();
    let mut rep = Report::new(cli, vec!["E", "tau", "E2tau", "sector", "mu", "error"]);
    for (e, r) in results {
        match r {
            Ok(t) => rep.rows.push(vec![
                num(e),
                num(t.tau),
                num(t.e2tau()),
                json!(t.sector.to_string()),
                opt(t.multiplier),
                Value::Null,
            ]),
            Err(err) => {
                rep.exit_code = rep.exit_code.max(err.exit_code());
                rep.rows.push(vec![num(e), Value::Null, Value::Null, Value::Null, Value::Null, json!(err.to_string())]);
            }
        }
    }
    Ok(rep)
}

fn cmd_cost_curve(cli: &Cli, a_min: f64, a_max: f64, steps: usize) -> Result<Report> {
    if steps == 0 || !(a_max > a_min) {
        return Err(Error::Precondition("need a_max > a_min and steps >= 1".into()));
    }
    let grid: Vec<f64> = (0..=steps).map(|i| a_min + (a_max - a_min) * i as f64 / steps as f64).collect();
    let curve = cost_curve(&grid)?;
    let (a_best, c_best) = curve.iter().copied().min_by(|x, y| x.1.total_cmp(&y.1)).expect("non-empty grid");
    let mut rep = Report::new(cli, vec!["a", "c"]);
    rep.rows = curve.iter().map(|&(a, c)| vec![num(a), num(c)]).collect();
    rep.set("argmin_a", a_best);
    rep.set("min_c", c_best);
    rep.set("c_7_4_over_c_3_2", family_cost(1.75) / family_cost(FAMILY_OPTIMUM));
    Ok(rep)
}

fn cmd_psi74(cli: &Cli, r_list: &[f64], n_trunc: Option<usize>) -> Result<Report> {
    let rows: Vec<Result<Vec<Value>>> = r_list
        .par_iter()
        .map(|&r| {
            let dim = n_trunc.unwrap_or_else(|| psi74_default_dim(r));
            let v = psi74_state(r, dim)?;
            let e = mean_photon(&v)?;
            let d = aligned_covariant_error(&v)?;
            let d_plain = covariant_error(&v)?;
            Ok(vec![num(r), json!(dim), num(e), num(d), num(e * e * d), num(d_plain)])
        })
        .collect();
    let mut rep = Report::new(cli, vec!["r", "n_trunc", "E", "D", "E2D", "D_unaligned"]);
    for row in rows {
        rep.rows.push(row?);
    }
    Ok(rep)
}

fn cmd_herald(cli: &Cli, q: Option<f64>, betas: Option<&[f64]>, auto: bool, target: Option<&str>) -> Result<Report> {
    let q = q.unwrap_or_else(|| 2f64.tanh());
    let target = parse_state(target.unwrap_or("psi74-core"))?;
    let target = target.normalize()?;
    let cfg = if auto {
        optimize_betas(q, &target)?
    } else if let Some(b) = betas {
        HeraldConfig::new(q, [b[0], b[1], b[2], b[3]])?
    } else {
        HeraldConfig { q, ..published_config() }
    };
    let h = herald_amplitudes(&cfg)?;
    let f = herald_fidelity(&cfg, &target)?;
    let (p, s) = cfg.sum_product();
    let mut rep = Report::new(cli, vec!["source", "q", "p", "s", "N", "fidelity"]);
    rep.rows.push(vec![json!("computed"), num(q), num(p), num(s), num(h.normalizer), num(f)]);
    rep.rows.push(vec![
        json!("published"),
        num(2f64.tanh()),
        num(PUBLISHED_PRODUCT),
        num(PUBLISHED_SUM),
        num(PUBLISHED_NORMALIZER),
        num(PUBLISHED_FIDELITY),
    ]);
    rep.set("betas", cfg.betas);
    rep.set("phi", h.phi);
    Ok(rep)
}

/// Builds the worker pool from `PHASEPROBE_THREADS` (all cores when unset).
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("PHASEPROBE_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Invalid(format!("PHASEPROBE_THREADS must be a positive integer, got '{v}'")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Invalid(e.to_string()))
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn main_with(cli: Cli) -> i32 {
    let outcome = thread_pool().and_then(|pool| pool.install(|| run(&cli)));
    match outcome {
        Ok(rep) => {
            let text = rep.render(cli.format);
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return 2;
                    }
                }
                None => print!("{text}"),
            }
            rep.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("phaseprobe").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn tau_zero_row() {
        let rep = run(&parse(&["tau", "--energy", "0,1", "--n-trunc", "64"])).unwrap();
        assert_eq!(rep.rows[0][1], json!(1.0));
        assert_eq!(rep.exit_code, 0);
    }

    #[test]
    fn tau_row_failure_is_reported() {
        let rep = run(&parse(&["tau", "--energy", "1,50", "--n-trunc", "32"])).unwrap();
        assert!(rep.rows[1][5].is_string());
        assert_eq!(rep.exit_code, 3);
    }

    #[test]
    fn csv_uses_full_precision() {
        let rep = run(&parse(&["cost-curve", "--a-min", "1", "--a-max", "2", "--steps", "4", "--format", "csv"])).unwrap();
        let csv = rep.to_csv();
        assert!(csv.starts_with("# phaseprobe "));
        assert!(csv.contains("1.5000000000000000e0,4.0000000000000000e0"));
    }

    #[test]
    fn built_in_states() {
        assert_eq!(parse_state("fock:3").unwrap(), FockVector::basis(3, 4).unwrap());
        assert_eq!(parse_state("sup:0,2").unwrap(), FockVector::superposition(&[0, 2], 3).unwrap());
        assert!(parse_state("nope.json").is_err());
    }

    #[test]
    fn herald_report_has_published_row() {
        let rep = run(&parse(&["herald", "--auto"])).unwrap();
        assert_eq!(rep.rows.len(), 2);
        assert_eq!(rep.rows[1][0], json!("published"));
    }
}
