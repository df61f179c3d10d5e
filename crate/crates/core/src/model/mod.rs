//! Evolution systems, the N=2 super-KdV family, the equation text
//! format, and mechanical generation of the series recursion.

mod dsl;
mod families;
mod seed;
mod series;

pub use dsl::{emit_dsl, parse_dsl};
pub use families::{build_osp22, build_skdv, build_skdv_c0_limit};
pub use seed::{BranchSeed, FermionRelation, KRelation};
pub use series::{jacobian_at_level, manifold_fn, recursion_at_level, reduce_static_derivatives, residual_oracle, sector_of, LevelRelations, OracleEntry};

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{Expression, KernelError, Parity, Symbol, SymbolKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("equation for `{0}` does not have the parity of its field")]
    EquationParity(String),
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("level {level} is below the starting level {start}")]
    LevelBelowStart { level: i32, start: i32 },
    #[error("seed: {0}")]
    Seed(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}


#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub name: String,
    pub parity: Parity,
    /// Pole order `p` in `F = sum F_m phi^(m-p)`.
    pub lead: i32,
}

impl FieldSpec {
    pub fn new(name: &str, parity: Parity, lead: i32) -> Self {
        FieldSpec { name: name.to_string(), parity, lead }
    }

    pub fn jet(&self, order: u32) -> Symbol {
        Symbol::jet(&self.name, order, self.parity)
    }

    pub fn coeff(&self, level: i32) -> Symbol {
        Symbol::series(&self.name, level, self.parity)
    }
}

/// Fields together with `F_t = rhs_F` for each field that evolves. A field
/// without an equation is static data.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionSystem {
    pub name: String,
    pub params: Vec<String>,
    pub fields: Vec<FieldSpec>,
    pub equations: Vec<Option<Expression>>,
}

impl EvolutionSystem {
    pub fn new(name: &str, params: &[&str], fields: Vec<FieldSpec>) -> Self {
        let n = fields.len();
        EvolutionSystem {
            name: name.to_string(),
            params: params.iter().map(|s| s.to_string()).collect(),
            fields,
            equations: vec![None; n],
        }
    }

    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f.name == name)
    }

    pub fn field(&self, name: &str) -> Option<&FieldSpec> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn set_equation(&mut self, field: &str, rhs: Expression) -> Result<(), ModelError> {
        let idx = self.field_index(field).ok_or_else(|| ModelError::UnknownField(field.into()))?;
        if let Some(p) = rhs.parity() {
            if p != self.fields[idx].parity {
                return Err(ModelError::EquationParity(field.into()));
            }
        }
        self.equations[idx] = Some(rhs);
        Ok(())
    }

    pub fn equation(&self, field: &str) -> Option<&Expression> {
        self.field_index(field).and_then(|i| self.equations[i].as_ref())
    }

    pub fn evolving(&self) -> impl Iterator<Item = (usize, &FieldSpec)> {
        self.fields.iter().enumerate().filter(|(i, _)| self.equations[*i].is_some())
    }

    /// Jet symbol lookup: `(field index, x-order)`.
    pub fn jet_of(&self, s: Symbol) -> Option<(usize, u32)> {
        let d = s.desc();
        if d.kind != SymbolKind::Jet {
            return None;
        }
        self.field_index(&d.name).map(|i| (i, d.level.unwrap_or(0) as u32))
    }

    /// Substitutes parameter values into every equation.
    pub fn with_params(&self, values: &BTreeMap<String, Expression>) -> EvolutionSystem {
        let b: HashMap<Symbol, Expression> =
            values.iter().map(|(k, v)| (Symbol::param(k), v.clone())).collect();
        let mut out = self.clone();
        for eq in out.equations.iter_mut().flatten() {
            *eq = eq.substitute_unchecked(&b);
        }
        out.params.retain(|p| !values.contains_key(p));
        out
    }

    /// Same system with every odd field removed (the bosonic core).
    pub fn bosonic_core(&self) -> EvolutionSystem {
        let mut out = self.clone();
        for eq in out.equations.iter_mut().flatten() {
            *eq = eq.filter_terms(|m| m.odd_degree() == 0);
        }
        let keep: Vec<bool> = self.fields.iter().map(|f| f.parity == Parity::Even).collect();
        let mut k = keep.iter();
        out.fields.retain(|_| *k.next().unwrap());
        let mut k = keep.iter();
        out.equations.retain(|_| *k.next().unwrap());
        out.name = format!("{} (bosonic core)", self.name);
        out
    }

    /// Overrides the lead of every odd field.
    pub fn with_fermion_lead(&self, r: i32) -> EvolutionSystem {
        let mut out = self.clone();
        for f in out.fields.iter_mut().filter(|f| f.parity == Parity::Odd) {
            f.lead = r;
        }
        out
    }

    pub fn has_fermions(&self) -> bool {
        self.fields.iter().any(|f| f.parity == Parity::Odd)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let fields: Vec<_> = self
            .fields
            .iter()
            .zip(&self.equations)
            .map(|(f, e)| {
                serde_json::json!({
                    "name": f.name,
                    "parity": f.parity,
                    "lead": f.lead,
                    "equation": e.as_ref().map(|e| e.render()),
                })
            })
            .collect();
        serde_json::json!({ "name": self.name, "params": self.params, "fields": fields })
    }
}

/// Total x-derivative of a polynomial in jet symbols. Each factor is
/// replaced in place by its derivative, which is the right partial
/// derivative multiplied back on the right.
pub fn dx(e: &Expression) -> Expression {
    let mut out = Expression::zero();
    for s in e.symbols() {
        let d = s.desc();
        if d.kind != SymbolKind::Jet {
            continue;
        }
        let next = Symbol::jet(&d.name, d.level.unwrap_or(0) as u32 + 1, d.parity);
        out.add_assign_ref(&(&e.partial(s) * &Expression::symbol(next)));
    }
    out
}

pub fn dx_n(e: &Expression, k: u32) -> Expression {
    (0..k).fold(e.clone(), |acc, _| dx(&acc))
}
