use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::lead::{leading_exponents_bosonic, LeadBalance};
use super::resonance::{determinant, n_symbol, recursion_matrix, resonance_polynomial, sector_fields, ResonancePolynomial};
use super::EngineError;
use crate::kernel::{solve_relations, Expression, Sector, Symbol, SymbolKind};
use crate::model::{recursion_at_level, reduce_static_derivatives, BranchSeed, EvolutionSystem};

/// Levels past its origin that an open condition may wait for look-ahead
/// coefficients before the run is declared inconclusive.
pub const DEFERRAL_CAP: i32 = 2;

/// One arbitrary function: a series coefficient, or the manifold itself as
/// `phi` at level -1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub field: String,
    pub level: i32,
}

impl LedgerEntry {
    pub fn manifold() -> Self {
        LedgerEntry { field: "phi".into(), level: -1 }
    }

    pub fn new(field: &str, level: i32) -> Self {
        LedgerEntry { field: field.into(), level }
    }

    /// Parses `phi`, `w3` or `xi1_0`.
    pub fn parse(label: &str) -> Option<Self> {
        if label == "phi" {
            return Some(Self::manifold());
        }
        if let Some((f, l)) = label.rsplit_once('_') {
            return l.parse().ok().map(|l| Self::new(f, l));
        }
        let cut = label.find(|c: char| c.is_ascii_digit())?;
        label[cut..].parse().ok().map(|l| Self::new(&label[..cut], l))
    }
}

impl fmt::Display for LedgerEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field == "phi" {
            f.write_str("phi")
        } else if self.field.ends_with(|c: char| c.is_ascii_digit()) {
            write!(f, "{}_{}", self.field, self.level)
        } else {
            write!(f, "{}{}", self.field, self.level)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Status {
    PrincipalPass,
    FailNonIntegerLead { reason: String },
    FailNonIntegerResonance { sector: Sector },
    FailCompatibility { level: i32, sector: Sector },
    /// Negative resonances other than the manifold's -1.
    NonPrincipal { negative: Vec<i64> },
    /// A resonance on a level whose coefficients the seed already fixes.
    MovableLogarithm { level: i32 },
}

impl Status {
    /// 0 on a pass, 2 for a non-principal branch, 1 for every failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::PrincipalPass => 0,
            Status::NonPrincipal { .. } => 2,
            _ => 1,
        }
    }

    pub fn is_pass(&self) -> bool {
        *self == Status::PrincipalPass
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::PrincipalPass => f.write_str("principal pass"),
            Status::FailNonIntegerLead { reason } => write!(f, "fail: non-integer lead ({reason})"),
            Status::FailNonIntegerResonance { sector } => write!(f, "fail: non-integer {sector} resonance"),
            Status::FailCompatibility { level, sector } => write!(f, "fail: {sector} compatibility at level {level}"),
            Status::NonPrincipal { negative } => write!(f, "non-principal (negative resonances {negative:?})"),
            Status::MovableLogarithm { level } => write!(f, "movable logarithm at level {level}"),
        }
    }
}

/// Where a compatibility condition failed, with the surviving residual.
///
/// A resonance whose multiplicity exceeds the number of arbitrary
/// coefficients the level admits (a Jordan block) fails too; `residual` is
/// then empty and `defect` holds `[multiplicity, arbitrary]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureSite {
    pub level: i32,
    pub sector: Sector,
    pub residual: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect: Option<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestVerdict {
    pub branch: BranchSeed,
    pub bosonic: Option<ResonancePolynomial>,
    pub fermionic: Option<ResonancePolynomial>,
    pub bosonic_resonances: Vec<i64>,
    pub fermionic_resonances: Vec<i64>,
    /// Bosonic entries first, then fermionic, each by level.
    pub arbitrary_functions: Vec<LedgerEntry>,
    pub status: Status,
    pub max_level_solved: Option<i32>,
    pub failure: Option<FailureSite>,
}

impl TestVerdict {
    fn new(branch: &BranchSeed) -> Self {
        TestVerdict {
            branch: branch.clone(),
            bosonic: None,
            fermionic: None,
            bosonic_resonances: Vec::new(),
            fermionic_resonances: Vec::new(),
            arbitrary_functions: Vec::new(),
            status: Status::PrincipalPass,
            max_level_solved: None,
            failure: None,
        }
    }

    pub fn ledger_labels(&self) -> Vec<String> {
        self.arbitrary_functions.iter().map(|e| e.to_string()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdicts serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// A finished run together with the prepared system and every coefficient
/// value it fixed (arbitrary ones are absent and stay symbolic).
#[derive(Clone, Debug)]
pub struct BranchRun {
    pub verdict: TestVerdict,
    pub system: EvolutionSystem,
    pub values: HashMap<Symbol, Expression>,
    /// The failing residual, when the run stopped on one.
    pub residual: Option<Expression>,
}

/// Applies the seed's parameters, core restriction and fermionic lead, and
/// sets the even leads from the dominant balance when one exists.
pub fn prepare_system(sys: &EvolutionSystem, seed: &BranchSeed) -> EvolutionSystem {
    let mut out = sys.with_params(&seed.params);
    if seed.core {
        out = out.bosonic_core();
    }
    if let Some(r) = seed.r {
        out = out.with_fermion_lead(r);
    }
    if let LeadBalance::Poles(poles) = leading_exponents_bosonic(&out) {
        for (name, p) in poles {
            if let Some(i) = out.field_index(&name) {
                out.fields[i].lead = p;
            }
        }
    }
    out
}

/// Level-0 coefficient bindings from the seed.
pub(crate) fn seed_bindings(sys: &EvolutionSystem, seed: &BranchSeed) -> Result<HashMap<Symbol, Expression>, EngineError> {
    let mut out = HashMap::new();
    for (name, value) in &seed.level0 {
        let Some(f) = sys.field(name) else {
            if seed.core && !sys.fields.is_empty() {
                continue;
            }
            return Err(EngineError::Seed(format!("unknown field `{name}`")));
        };
        if value.parity().is_some_and(|p| p != f.parity) {
            return Err(EngineError::Seed(format!("level-0 value of `{name}` has the wrong parity")));
        }
        out.insert(f.coeff(0), value.clone());
    }
    for (_, f) in sys.evolving() {
        if f.parity == crate::kernel::Parity::Even && !out.contains_key(&f.coeff(0)) {
            return Err(EngineError::Seed(format!("missing level-0 value for `{}`", f.name)));
        }
    }
    Ok(out)
}

fn body_matrix(m: Vec<Vec<Expression>>) -> Vec<Vec<Expression>> {
    m.into_iter().map(|row| row.into_iter().map(|e| e.filter_terms(|m| m.odd_degree() == 0)).collect()).collect()
}

fn is_fixed(e: &Expression) -> bool {
    !e.any_symbol(|s| matches!(s.kind(), SymbolKind::Series | SymbolKind::Function))
}

/// Flags a bosonic resonance at level 0 when the seed fixes every level-0
/// coefficient, which signals a movable logarithm. Works with symbolic
/// parameters.
pub fn movable_log_guard(sys: &EvolutionSystem, seed: &BranchSeed) -> Result<bool, EngineError> {
    let sys = prepare_system(sys, seed);
    let level0 = seed_bindings(&sys, seed)?;
    if !level0.values().all(is_fixed) {
        return Ok(false);
    }
    let m = body_matrix(recursion_matrix(&sys, Sector::Bosonic, &level0)?);
    let b: HashMap<Symbol, Expression> = [(n_symbol(), Expression::zero())].into_iter().collect();
    let at0: Vec<Vec<Expression>> = m.iter().map(|row| row.iter().map(|e| e.substitute_unchecked(&b)).collect()).collect();
    Ok(determinant(&at0).is_zero())
}

struct Pending {
    origin: i32,
    sector: Sector,
    expr: Expression,
}

/// Runs the test and returns the verdict only.
pub fn run_branch(sys: &EvolutionSystem, seed: &BranchSeed, max_level: i32) -> Result<TestVerdict, EngineError> {
    run_branch_full(sys, seed, max_level).map(|r| r.verdict)
}

/// Runs the full test for one branch: lead, resonances, then every level
/// from the start level to `max_level`, checking each compatibility
/// condition once the coefficients it depends on are known.
pub fn run_branch_full(sys: &EvolutionSystem, seed: &BranchSeed, max_level: i32) -> Result<BranchRun, EngineError> {
    run_impl(sys, seed, max_level, false)
}

/// Runs the recursion levels even on branches the resonance gates reject
/// (negative or level-0 resonances), to read off the conditions a level
/// imposes on symbolic parameters. The status reflects only the levels.
pub fn probe_branch(sys: &EvolutionSystem, seed: &BranchSeed, max_level: i32) -> Result<BranchRun, EngineError> {
    run_impl(sys, seed, max_level, true)
}

fn run_impl(sys: &EvolutionSystem, seed: &BranchSeed, max_level: i32, probe: bool) -> Result<BranchRun, EngineError> {
    let sys = prepare_system(sys, seed);
    let mut verdict = TestVerdict::new(seed);
    let mut values: HashMap<Symbol, Expression> = HashMap::new();
    let finish = |verdict: TestVerdict, sys: EvolutionSystem, values| Ok(BranchRun { verdict, system: sys, values, residual: None });

    match leading_exponents_bosonic(&sys) {
        LeadBalance::Poles(_) => {}
        LeadBalance::NonInteger { field, value } => {
            verdict.status = Status::FailNonIntegerLead { reason: format!("`{field}` has weight {value}") };
            return finish(verdict, sys, values);
        }
        LeadBalance::NoBalance(reason) => {
            verdict.status = Status::FailNonIntegerLead { reason };
            return finish(verdict, sys, values);
        }
    }
    let level0 = seed_bindings(&sys, seed)?;
    values.extend(level0.clone());

    let bos = resonance_polynomial(&body_matrix(recursion_matrix(&sys, Sector::Bosonic, &level0)?))?;
    verdict.bosonic_resonances = bos.roots.clone();
    let bos_integer = bos.is_integer();
    verdict.bosonic = Some(bos);
    if !bos_integer {
        verdict.status = Status::FailNonIntegerResonance { sector: Sector::Bosonic };
        return finish(verdict, sys, values);
    }
    if !sector_fields(&sys, Sector::Fermionic).is_empty() {
        let fer = resonance_polynomial(&body_matrix(recursion_matrix(&sys, Sector::Fermionic, &level0)?))?;
        verdict.fermionic_resonances = fer.roots.clone();
        let integer = fer.is_integer();
        verdict.fermionic = Some(fer);
        if !integer {
            verdict.status = Status::FailNonIntegerResonance { sector: Sector::Fermionic };
            return finish(verdict, sys, values);
        }
    }
    let mut negative: Vec<i64> = verdict.bosonic_resonances.iter().chain(&verdict.fermionic_resonances).copied().filter(|r| *r < 0).collect();
    if verdict.bosonic_resonances.contains(&-1) {
        if let Some(i) = negative.iter().position(|r| *r == -1) {
            negative.remove(i);
        }
    }
    if !negative.is_empty() && !probe {
        verdict.status = Status::NonPrincipal { negative };
        return finish(verdict, sys, values);
    }
    if !probe && verdict.bosonic_resonances.contains(&0) && level0.values().all(is_fixed) {
        verdict.status = Status::MovableLogarithm { level: 0 };
        return finish(verdict, sys, values);
    }
    let needed = verdict.bosonic_resonances.iter().chain(&verdict.fermionic_resonances).copied().max().unwrap_or(0) as i32;
    if max_level < needed && !probe {
        return Err(EngineError::MaxLevelTooLow { needed, given: max_level });
    }

    let evolving: BTreeSet<String> = sys.evolving().map(|(_, f)| f.name.clone()).collect();
    let sector_of_field: Vec<Sector> = sys.fields.iter().map(|f| crate::model::sector_of(f.parity)).collect();
    let field_order: HashMap<String, usize> = sys.fields.iter().enumerate().map(|(i, f)| (f.name.clone(), i)).collect();
    let hints = seed.free_symbols(&sys.fields.iter().map(|f| (f.name.clone(), f.parity)).collect::<Vec<_>>());
    let mut free: Vec<Symbol> = Vec::new();
    let mut pending: Vec<Pending> = Vec::new();

    for n in sys.start_level()..=max_level {
        let rels = recursion_at_level(&sys, n)?;
        let mut unknowns = Vec::new();
        if n >= 0 {
            for (_, f) in sys.evolving() {
                let s = f.coeff(n);
                if !values.contains_key(&s) {
                    unknowns.push(s);
                }
            }
        }
        let relations: Vec<Expression> = rels.entries.iter().map(|(_, _, e)| reduce_static_derivatives(&sys, &e.substitute_towers(&values))).collect();
        let row_sector: Vec<Sector> = rels.entries.iter().map(|(fi, _, _)| sector_of_field[*fi]).collect();
        let sol = solve_relations(&unknowns, &relations, &hints)?;
        let new: HashMap<Symbol, Expression> = sol.solved.into_iter().collect();
        if !new.is_empty() {
            for v in values.values_mut() {
                if v.any_symbol(|s| new.contains_key(&s.base())) {
                    *v = v.substitute_towers(&new);
                }
            }
            for p in pending.iter_mut() {
                if p.expr.any_symbol(|s| new.contains_key(&s.base())) {
                    p.expr = reduce_static_derivatives(&sys, &p.expr.substitute_towers(&new));
                }
            }
            values.extend(new);
        }
        for sector in [Sector::Bosonic, Sector::Fermionic] {
            let roots = match sector {
                Sector::Bosonic => &verdict.bosonic_resonances,
                Sector::Fermionic => &verdict.fermionic_resonances,
            };
            let multiplicity = roots.iter().filter(|r| **r == n as i64).count();
            let arbitrary = sol.free.iter().filter(|s| sector_of_field[field_order[&s.desc().name]] == sector).count();
            if n > 0 && arbitrary < multiplicity {
                free.extend(sol.free.iter().copied());
                verdict.status = Status::FailCompatibility { level: n, sector };
                verdict.failure = Some(FailureSite { level: n, sector, residual: String::new(), defect: Some([multiplicity, arbitrary]) });
                verdict.arbitrary_functions = ledger(&free, &field_order, &sector_of_field);
                verdict.max_level_solved = Some(n);
                return finish(verdict, sys, values);
            }
        }
        free.extend(sol.free.iter().copied());
        for (res, row) in sol.residuals.into_iter().zip(&sol.cokernel) {
            if res.is_zero() {
                continue;
            }
            let sector = row.iter().zip(&row_sector).find(|(g, _)| !g.is_zero()).map(|(_, s)| *s).unwrap_or(Sector::Bosonic);
            pending.push(Pending { origin: n, sector, expr: res });
        }
        verdict.max_level_solved = Some(n);

        let future = |e: &Expression| {
            e.any_symbol(|s| s.kind() == SymbolKind::Series && s.level().is_some_and(|l| l > n) && evolving.contains(&s.desc().name))
        };
        let mut failed: Option<&Pending> = None;
        for p in &pending {
            if p.expr.is_zero() || future(&p.expr) {
                continue;
            }
            if failed.is_none_or(|f| p.origin < f.origin) {
                failed = Some(p);
            }
        }
        if let Some(p) = failed {
            verdict.status = Status::FailCompatibility { level: p.origin, sector: p.sector };
            verdict.failure = Some(FailureSite { level: p.origin, sector: p.sector, residual: p.expr.render(), defect: None });
            verdict.arbitrary_functions = ledger(&free, &field_order, &sector_of_field);
            let residual = Some(p.expr.clone());
            return Ok(BranchRun { verdict, system: sys, values, residual });
        }
        pending.retain(|p| !p.expr.is_zero() && future(&p.expr));
        if let Some(p) = pending.iter().find(|p| n >= p.origin + DEFERRAL_CAP) {
            return Err(EngineError::Inconclusive { level: p.origin, sector: p.sector });
        }
    }
    if let Some(p) = pending.first() {
        return Err(EngineError::Inconclusive { level: p.origin, sector: p.sector });
    }
    verdict.arbitrary_functions = ledger(&free, &field_order, &sector_of_field);
    let expected = verdict.bosonic_resonances.len() + verdict.fermionic_resonances.len();
    if verdict.arbitrary_functions.len() != expected && !probe {
        return Err(EngineError::LedgerMismatch { expected, found: verdict.arbitrary_functions.len() });
    }
    verdict.status = Status::PrincipalPass;
    finish(verdict, sys, values)
}

fn ledger(free: &[Symbol], order: &HashMap<String, usize>, sectors: &[Sector]) -> Vec<LedgerEntry> {
    let mut keyed: Vec<(Sector, i32, usize, LedgerEntry)> = free
        .iter()
        .map(|s| {
            let name = s.desc().name.clone();
            let idx = order[&name];
            let level = s.level().unwrap_or(0);
            (sectors[idx], level, idx, LedgerEntry::new(&name, level))
        })
        .collect();
    keyed.sort();
    let mut out = vec![LedgerEntry::manifold()];
    out.extend(keyed.into_iter().map(|k| k.3));
    out
}
