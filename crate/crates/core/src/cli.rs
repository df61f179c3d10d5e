//! Command-line front end: `analyze`, `scan` and `atlas`.
//!
//! Every command returns an [`Outcome`], the exit code together with the
//! rendered report; the binary only decides where the report goes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atlas::{full_reproduction, ReproductionOptions, SystemName};
use crate::engine::{level0_seeds, run_branch, EngineError, Status, TestVerdict, DEFERRAL_CAP};
use crate::kernel::Expression;
use crate::model::{parse_dsl, BranchSeed, EvolutionSystem};
use crate::ring::{parse_rational, Rational};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_NON_PRINCIPAL: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "superpainleve", version, about = "Exact Painleve test for boson/fermion evolution systems")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0, global = true)]
    pub jobs: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one branch of one system.
    Analyze {
        /// Equation file, or a bundled system name.
        #[arg(long)]
        system: String,
        /// Seed file.
        #[arg(long)]
        seed: PathBuf,
        /// Last level to solve; defaults to the last resonance.
        #[arg(long)]
        max_level: Option<u32>,
    },
    /// Bosonic-core verdicts over an (alpha, beta) grid at fixed c.
    Scan {
        #[arg(long, default_value = "skdv")]
        system: String,
        #[arg(long, default_value = "3", allow_hyphen_values = true)]
        c: String,
        /// `a:b:step` or a comma list of rationals.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long)]
        max_level: Option<u32>,
    },
    /// Reproduce every table and case of the classification.
    Atlas {
        /// Seed files replacing the bundled seed with the same label.
        #[arg(long)]
        seed: Vec<PathBuf>,
        /// Half-width of the integer scan.
        #[arg(long, default_value_t = crate::atlas::WINDOW)]
        window: i64,
        /// Members run per non-principal family.
        #[arg(long, default_value_t = 2)]
        samples: usize,
    },
}

/// Exit code and rendered report.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

impl Outcome {
    fn usage(message: impl std::fmt::Display) -> Self {
        Outcome { code: EXIT_USAGE, report: format!("error: {message}\n") }
    }
}

/// Runs the parsed command line.
pub fn run(cfg: &RunConfig) -> Outcome {
    match &cfg.command {
        Command::Analyze { system, seed, max_level } => {
            let sys = match load_system(system) {
                Ok(s) => s,
                Err(e) => return Outcome::usage(e),
            };
            let seed = match load_seed(seed) {
                Ok(s) => s,
                Err(e) => return Outcome::usage(e),
            };
            cmd_analyze(&sys, &seed, max_level.map(|m| m as i32), cfg.format)
        }
        Command::Scan { system, c, alpha, beta, max_level } => {
            let grid = (|| -> Result<_, String> {
                let sys = load_system(system)?;
                let c = parse_rational(c).map_err(|e| format!("--c: {e}"))?;
                Ok((sys, c, parse_grid(alpha)?, parse_grid(beta)?))
            })();
            match grid {
                Ok((sys, c, alphas, betas)) => {
                    let report = cmd_scan(&sys, &c, &alphas, &betas, max_level.map(|m| m as i32), cfg.jobs);
                    let text = match cfg.format {
                        Format::Json => report.to_json(),
                        Format::Text => report.to_text(),
                    };
                    Outcome { code: EXIT_PASS, report: text }
                }
                Err(e) => Outcome::usage(e),
            }
        }
        Command::Atlas { seed, window, samples } => {
            let mut replace = Vec::new();
            for p in seed {
                match load_seed(p) {
                    Ok(s) => replace.push(s),
                    Err(e) => return Outcome::usage(e),
                }
            }
            let opts = ReproductionOptions { window: *window, samples: *samples, jobs: cfg.jobs, replace };
            cmd_atlas(&opts, cfg.format)
        }
    }
}

/// An equation file, or one of `skdv`, `osp22`, `skdv-c0-limit`.
pub fn load_system(spec: &str) -> Result<EvolutionSystem, String> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{spec}: {e}"))?;
        return parse_dsl(&text).map_err(|e| format!("{spec}: {e}"));
    }
    match spec {
        "skdv" => Ok(SystemName::Skdv.system()),
        "osp22" => Ok(SystemName::Osp22.system()),
        "skdv-c0-limit" => Ok(SystemName::SkdvC0Limit.system()),
        _ => Err(format!("{spec}: no such file or bundled system")),
    }
}

pub fn load_seed(path: &Path) -> Result<BranchSeed, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    BranchSeed::from_toml(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// `a:b:step` (inclusive) or `x,y,...`; the empty string is the empty grid.
pub fn parse_grid(text: &str) -> Result<Vec<Rational>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let num = |s: &str| parse_rational(s.trim()).map_err(|e| format!("`{s}`: {e}"));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if step <= Rational::from_integer(0.into()) {
                return Err(format!("`{text}`: step must be positive"));
            }
            let mut out = Vec::new();
            let mut x = a;
            while x <= b {
                out.push(x.clone());
                x += &step;
            }
            Ok(out)
        }
        [one] => one.split(',').map(num).collect(),
        _ => Err(format!("`{text}`: expected a:b:step or a comma list")),
    }
}

/// Runs with the given last level. Without one, runs through the last
/// resonance, going past it when a condition is still open there.
pub fn run_auto(sys: &EvolutionSystem, seed: &BranchSeed, max_level: Option<i32>) -> Result<TestVerdict, EngineError> {
    if let Some(m) = max_level {
        return run_branch(sys, seed, m);
    }
    let needed = match run_branch(sys, seed, 0) {
        Err(EngineError::MaxLevelTooLow { needed, .. }) => needed,
        other => return other,
    };
    match run_branch(sys, seed, needed) {
        Err(EngineError::Inconclusive { .. }) => run_branch(sys, seed, needed + DEFERRAL_CAP),
        other => other,
    }
}

fn is_usage_error(e: &EngineError) -> bool {
    matches!(e, EngineError::Model(_) | EngineError::Kernel(_) | EngineError::Seed(_))
}

/// One branch: exit 0 on a pass, 2 when non-principal, 1 on any failure.
pub fn cmd_analyze(sys: &EvolutionSystem, seed: &BranchSeed, max_level: Option<i32>, format: Format) -> Outcome {
    match run_auto(sys, seed, max_level) {
        Ok(v) => {
            let report = match format {
                Format::Json => v.to_json() + "\n",
                Format::Text => verdict_text(&v),
            };
            Outcome { code: v.status.exit_code(), report }
        }
        Err(e) if is_usage_error(&e) => Outcome::usage(e),
        Err(e) => Outcome { code: EXIT_FAIL, report: format!("{}: {e}\n", seed.label) },
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

pub fn verdict_text(v: &TestVerdict) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "branch {}: {}", v.branch.label, v.status);
    if let Some(p) = &v.bosonic {
        let _ = writeln!(s, "  bosonic    {}  roots [{}]", p.render_factored(), join(&v.bosonic_resonances));
    }
    if let Some(p) = &v.fermionic {
        let _ = writeln!(s, "  fermionic  {}  roots [{}]", p.render_factored(), join(&v.fermionic_resonances));
    }
    if let Some(l) = v.max_level_solved {
        let _ = writeln!(s, "  solved through level {l}");
    }
    if v.status.is_pass() {
        let labels = v.ledger_labels();
        let _ = writeln!(s, "  {} arbitrary functions: {}", labels.len(), labels.join(", "));
    }
    if let Some(f) = &v.failure {
        match f.defect {
            Some([mult, free]) => {
                let _ = writeln!(s, "  resonance of multiplicity {mult} with {free} arbitrary coefficient(s)");
            }
            None => {
                let _ = writeln!(s, "  residual: {}", f.residual);
            }
        }
    }
    s
}

/// Verdict of one leading-order solution at a grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanBranch {
    pub level0: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<Status>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub alpha: String,
    pub beta: String,
    pub branches: Vec<ScanBranch>,
}

impl ScanPoint {
    pub fn passes(&self) -> bool {
        self.branches.iter().any(|b| b.status.as_ref().is_some_and(Status::is_pass))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub c: String,
    pub points: Vec<ScanPoint>,
    /// `(alpha, beta)` of the points with a passing branch.
    pub hits: Vec<(String, String)>,
}

impl ScanReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "c = {}: {} grid points, {} with a passing branch", self.c, self.points.len(), self.hits.len());
        for p in &self.points {
            for b in &p.branches {
                let at = b.level0.iter().map(|(k, v)| format!("{k}0 = {v}")).collect::<Vec<_>>().join(", ");
                let verdict = match (&b.status, &b.error) {
                    (Some(st), _) => st.to_string(),
                    (None, Some(e)) => format!("error: {e}"),
                    (None, None) => String::new(),
                };
                let mark = if b.status.as_ref().is_some_and(Status::is_pass) { "*" } else { " " };
                let _ = writeln!(s, "{mark} alpha = {:6} beta = {:6} {at:24} {verdict}", p.alpha, p.beta);
            }
        }
        for (a, b) in &self.hits {
            let _ = writeln!(s, "hit: alpha = {a}, beta = {b}");
        }
        s
    }
}

fn scan_point(sys: &EvolutionSystem, c: &Rational, alpha: &Rational, beta: &Rational, max_level: Option<i32>) -> ScanPoint {
    let params: BTreeMap<String, Expression> = [("c", c), ("alpha", alpha), ("beta", beta)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), Expression::rational(v.clone())))
        .collect();
    let core = sys.with_params(&params).bosonic_core();
    let label = format!("alpha={alpha},beta={beta}");
    let branches = match level0_seeds(&core) {
        Err(e) => vec![ScanBranch { level0: BTreeMap::new(), status: None, error: Some(e.to_string()) }],
        Ok(seeds) => seeds
            .into_iter()
            .map(|l0| {
                let mut seed = BranchSeed::new(&label).core();
                seed.params = params.clone();
                seed.level0 = l0.clone();
                let level0 = l0.iter().map(|(k, v)| (k.clone(), v.render())).collect();
                match run_auto(sys, &seed, max_level) {
                    Ok(v) => ScanBranch { level0, status: Some(v.status), error: None },
                    Err(e) => ScanBranch { level0, status: None, error: Some(e.to_string()) },
                }
            })
            .collect(),
    };
    ScanPoint { alpha: alpha.to_string(), beta: beta.to_string(), branches }
}

/// Bosonic-core verdicts for every leading-order solution at every
/// `(alpha, beta)` of the grid, `c` fixed. Points come out in grid order.
pub fn cmd_scan(
    sys: &EvolutionSystem,
    c: &Rational,
    alphas: &[Rational],
    betas: &[Rational],
    max_level: Option<i32>,
    jobs: usize,
) -> ScanReport {
    let grid: Vec<(&Rational, &Rational)> = alphas.iter().flat_map(|a| betas.iter().map(move |b| (a, b))).collect();
    let work = || grid.par_iter().map(|(a, b)| scan_point(sys, c, a, b, max_level)).collect::<Vec<_>>();
    let points = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    };
    let hits = points.iter().filter(|p| p.passes()).map(|p| (p.alpha.clone(), p.beta.clone())).collect();
    ScanReport { c: c.to_string(), points, hits }
}

/// Full reproduction; exit 0 exactly when everything matches the
/// published data.
pub fn cmd_atlas(opts: &ReproductionOptions, format: Format) -> Outcome {
    match full_reproduction(opts) {
        Ok(r) => {
            let report = match format {
                Format::Json => r.to_json() + "\n",
                Format::Text => r.to_text(),
            };
            Outcome { code: if r.all_match() { EXIT_PASS } else { EXIT_FAIL }, report }
        }
        Err(e) => Outcome::usage(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("").unwrap(), Vec::<Rational>::new());
        assert_eq!(parse_grid("-1:1:1/2").unwrap().len(), 5);
        assert_eq!(parse_grid("1/3, -2").unwrap(), vec![rat(1, 3), rat(-2, 1)]);
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("x").is_err());
    }

    #[test]
    fn unknown_system_is_a_usage_error() {
        assert!(load_system("no-such-system").is_err());
        assert!(load_system("osp22").is_ok());
    }
}
