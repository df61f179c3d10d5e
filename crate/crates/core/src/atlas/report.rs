//! Full reproduction: every table, every bundled entry, sampled family
//! members and the brute-force scan, with an itemized diff.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::catalog::{listed_label, non_principal_list, principal_list, Listed};
use super::enumerate::{enumerate_all, Candidate, Class};
use super::tables::{check_a_tables, check_b_tables, TableCheck};
use super::{fixtures, AtlasEntry, AtlasError, EntryOutcome, Expectation, SystemName};
use crate::engine::{run_branch, Status};
use crate::kernel::Expression;
use crate::model::BranchSeed;
use crate::ring::{rat, Rational};

#[derive(Clone, Debug)]
pub struct ReproductionOptions {
    /// Half-width of the integer scan.
    pub window: i64,
    /// Members sampled per non-principal family.
    pub samples: usize,
    /// Worker threads; `0` uses the rayon default.
    pub jobs: usize,
    /// Seeds replacing the bundled seed with the same label.
    pub replace: Vec<BranchSeed>,
}

impl Default for ReproductionOptions {
    fn default() -> Self {
        ReproductionOptions { window: super::WINDOW, samples: 2, jobs: 0, replace: Vec::new() }
    }
}

/// One principal scan member run through the engine.
#[derive(Clone, Debug, Serialize)]
pub struct ScanRun {
    pub family: String,
    pub index: Vec<i64>,
    pub roots: Vec<i64>,
    pub listed: Option<String>,
    pub status: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanSummary {
    pub window: i64,
    pub candidates: usize,
    pub by_class: BTreeMap<String, usize>,
    pub principal_runs: Vec<ScanRun>,
    /// Listed labels of the passing principal members, deduplicated.
    pub passes: Vec<String>,
    /// Passing principal members outside (I)-(V).
    pub unlisted_passes: Vec<ScanRun>,
    /// Non-principal members not covered by (VI)-(XVII).
    pub extras: Vec<Candidate>,
    /// Listed members no scanned family produced.
    pub unreached: Vec<String>,
}

impl ScanSummary {
    pub fn core_passes_exact(&self) -> bool {
        self.passes == ["I", "II", "III", "IV", "V"] && self.unlisted_passes.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproductionReport {
    pub a_tables: Vec<TableCheck>,
    pub b_tables: Vec<TableCheck>,
    pub entries: Vec<EntryOutcome>,
    pub scan: ScanSummary,
}

fn class_name(c: Class) -> &'static str {
    match c {
        Class::Principal => "principal",
        Class::NonPrincipal => "non_principal",
        Class::MovableLog => "movable_log",
        Class::Degenerate => "degenerate",
    }
}

/// `beta` for families whose resonances leave it free: the value the
/// level-6 condition selects.
fn beta_for_free(c: &Candidate) -> Rational {
    &c.alpha * rat(3, 1)
}

fn listed_entry(l: &Listed) -> AtlasEntry {
    let idx: Vec<String> = l.index.iter().map(|k| k.to_string()).collect();
    let label = if idx.is_empty() { l.label.to_string() } else { format!("{}[{}]", l.label, idx.join(",")) };
    let beta = l.beta.clone().unwrap_or_else(|| &l.alpha * rat(3, 1));
    let seed = BranchSeed::new(&label)
        .param("c", Expression::int(l.c))
        .param("alpha", Expression::rational(l.alpha.clone()))
        .param("beta", Expression::rational(beta))
        .level0("u", Expression::rational(l.u0.clone()))
        .level0("w", Expression::gauss(l.w0.clone()))
        .core();
    AtlasEntry {
        label,
        system: SystemName::Skdv,
        max_level: 0,
        seed,
        expected: Expectation::NonPrincipal,
        provenance: format!("sec. 4 ({})", l.label),
    }
}

/// The first `per_label` members of each non-principal family.
pub fn family_samples(per_label: usize) -> Vec<AtlasEntry> {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut list = non_principal_list(12);
    list.sort_by_key(|l| l.index.iter().map(|k| k.abs()).sum::<i64>());
    list.iter()
        .filter(|l| {
            let n = seen.entry(l.label).or_default();
            *n += 1;
            *n <= per_label
        })
        .map(listed_entry)
        .collect()
}

fn run_scan(window: i64) -> Result<ScanSummary, AtlasError> {
    let all = enumerate_all(window);
    let np = non_principal_list(window);
    let pl = principal_list();
    let mut by_class = BTreeMap::new();
    for c in &all {
        *by_class.entry(class_name(c.class).to_string()).or_insert(0) += 1;
    }
    let sys = SystemName::Skdv.system();
    let principal: Vec<&Candidate> = all.iter().filter(|c| c.class == Class::Principal).collect();
    let principal_runs = principal
        .par_iter()
        .map(|c| {
            let max = *c.roots.iter().max().unwrap_or(&0) as i32;
            let v = run_branch(&sys, &c.seed(&beta_for_free(c)), max)?;
            Ok(ScanRun {
                family: c.family.to_string(),
                index: c.index.clone(),
                roots: c.roots.clone(),
                listed: listed_label(&pl, c).map(str::to_string),
                status: v.status.to_string(),
            })
        })
        .collect::<Result<Vec<_>, AtlasError>>()?;
    let pass = Status::PrincipalPass.to_string();
    let mut passes: Vec<String> = principal_runs.iter().filter(|r| r.status == pass).filter_map(|r| r.listed.clone()).collect();
    passes.sort_by_key(|l| ["I", "II", "III", "IV", "V"].iter().position(|x| x == l));
    passes.dedup();
    let unlisted_passes = principal_runs.iter().filter(|r| r.status == pass && r.listed.is_none()).cloned().collect();
    let extras = all.iter().filter(|c| c.class == Class::NonPrincipal && listed_label(&np, c).is_none()).cloned().collect();
    let mut unreached: Vec<String> = np
        .iter()
        .chain(&pl)
        .filter(|l| !all.iter().any(|c| l.covers(c)))
        .map(|l| l.label.to_string())
        .collect();
    unreached.dedup();
    Ok(ScanSummary { window, candidates: all.len(), by_class, principal_runs, passes, unlisted_passes, extras, unreached })
}

/// Runs everything. Entries are evaluated in parallel and sorted by label.
pub fn full_reproduction(opts: &ReproductionOptions) -> Result<ReproductionReport, AtlasError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| AtlasError::Usage(e.to_string()))?;
    pool.install(|| {
        let (a_tables, b_tables) = rayon::join(check_a_tables, check_b_tables);
        let mut work = fixtures();
        for e in &mut work {
            if let Some(s) = opts.replace.iter().find(|s| s.label == e.seed.label) {
                e.seed = s.clone();
            }
        }
        work.extend(family_samples(opts.samples));
        let mut entries: Vec<EntryOutcome> = work.par_iter().map(AtlasEntry::evaluate_or_report).collect();
        entries.sort_by(|a, b| a.label.cmp(&b.label));
        Ok(ReproductionReport { a_tables: a_tables?, b_tables: b_tables?, entries, scan: run_scan(opts.window)? })
    })
}

impl ReproductionReport {
    /// One line per disagreement with the published data.
    pub fn mismatches(&self) -> Vec<String> {
        let mut out = Vec::new();
        for t in self.a_tables.iter().chain(&self.b_tables).filter(|t| !t.matches) {
            out.push(format!("{}: printed {} differs from the determinant", t.label, t.expected));
        }
        for e in self.entries.iter().filter(|e| !e.matches) {
            let mut line = format!("{}: expected {}, observed {}", e.label, describe(&e.expected), e.observed);
            for n in &e.notes {
                let _ = write!(line, "; {n}");
            }
            out.push(line);
        }
        let s = &self.scan;
        if !s.core_passes_exact() {
            out.push(format!("scan: passing core branches {:?}", s.passes));
        }
        for r in &s.unlisted_passes {
            out.push(format!("scan: unlisted pass {}{:?} roots {:?}", r.family, r.index, r.roots));
        }
        if !s.extras.is_empty() {
            let mut per: BTreeMap<&str, usize> = BTreeMap::new();
            for c in &s.extras {
                *per.entry(c.family).or_default() += 1;
            }
            out.push(format!("scan: {} unlisted non-principal members {per:?}", s.extras.len()));
        }
        for l in &s.unreached {
            out.push(format!("scan: listed {l} not produced by any family within the window"));
        }
        out
    }

    pub fn all_match(&self) -> bool {
        self.mismatches().is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let count = |v: &[TableCheck]| v.iter().filter(|t| t.matches).count();
        let _ = writeln!(s, "A(n) closed forms: {}/{} match", count(&self.a_tables), self.a_tables.len());
        let _ = writeln!(s, "B(n) closed forms: {}/{} match", count(&self.b_tables), self.b_tables.len());
        let _ = writeln!(s);
        let width = self.entries.iter().map(|e| e.label.len()).max().unwrap_or(0);
        for e in &self.entries {
            let mark = if e.matches { "ok  " } else { "DIFF" };
            let _ = writeln!(s, "{mark} {:width$}  {}", e.label, e.observed);
        }
        let sc = &self.scan;
        let _ = writeln!(s);
        let _ = writeln!(s, "scan over [-{0}, {0}]: {1} members {2:?}", sc.window, sc.candidates, sc.by_class);
        let _ = writeln!(s, "passing core branches: {}", sc.passes.join(", "));
        let mismatches = self.mismatches();
        if !mismatches.is_empty() {
            let _ = writeln!(s);
            let _ = writeln!(s, "differences:");
            for m in mismatches {
                let _ = writeln!(s, "  {m}");
            }
        }
        s
    }
}

fn describe(e: &Expectation) -> String {
    match e {
        Expectation::Pass { .. } => "pass".into(),
        Expectation::Fail { level, sector } => format!("{sector} failure at level {level}"),
        Expectation::NonPrincipal => "non-principal".into(),
        Expectation::Condition { level, param, value } => format!("{param} = {value} forced at level {level}"),
    }
}
