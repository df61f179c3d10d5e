use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::kernel::{parse_expression, ExprResolver, Expression, Parity, Symbol};

/// Sign relating the unit in `w_0` to `k_0` in `xi2_0 = k_0 xi1_0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum KRelation {
    Plus,
    Minus,
    #[default]
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FermionRelation {
    /// Both `xi1_0` and `xi2_0` free.
    Type1,
    /// `xi2_0 = k_0 xi1_0`.
    Type2,
    #[default]
    None,
}

/// A leading-order solution to run: parameter values, the level-0 values
/// of the even fields, and the fermionic lead.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchSeed {
    pub label: String,
    pub params: BTreeMap<String, Expression>,
    pub level0: BTreeMap<String, Expression>,
    /// Fermionic lead; `None` keeps the system's own value.
    pub r: Option<i32>,
    pub k_relation: KRelation,
    pub fermion_relation: FermionRelation,
    /// Drop every odd field and run the bosonic core only.
    pub core: bool,
    /// Names of odd constants that may appear in the level-0 values.
    pub generators: Vec<String>,
    /// Unknowns to leave free at a rank-deficient level when a choice
    /// exists, e.g. `w3`.
    pub free: Vec<String>,
}

impl BranchSeed {
    pub fn new(label: &str) -> Self {
        BranchSeed {
            label: label.to_string(),
            params: BTreeMap::new(),
            level0: BTreeMap::new(),
            r: None,
            k_relation: KRelation::None,
            fermion_relation: FermionRelation::None,
            core: false,
            generators: Vec::new(),
            free: Vec::new(),
        }
    }

    pub fn param(mut self, name: &str, value: Expression) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn level0(mut self, field: &str, value: Expression) -> Self {
        self.level0.insert(field.to_string(), value);
        self
    }

    pub fn core(mut self) -> Self {
        self.core = true;
        self
    }

    pub fn fermions(mut self, r: i32, rel: FermionRelation, k: KRelation) -> Self {
        self.r = Some(r);
        self.fermion_relation = rel;
        self.k_relation = k;
        self
    }

    pub fn free(mut self, names: &[&str]) -> Self {
        self.free = names.iter().map(|s| s.to_string()).collect();
        self
    }

    /// Free-hint symbols resolved against field parities (`w3` -> `w_3`).
    pub fn free_symbols(&self, fields: &[(String, Parity)]) -> Vec<Symbol> {
        let mut out = Vec::new();
        for hint in &self.free {
            // field names may end in digits (xi1): prefer the longest match
            let mut best: Option<(&str, Parity, i32)> = None;
            for (name, p) in fields {
                if let Some(rest) = hint.strip_prefix(name.as_str()) {
                    let rest = rest.strip_prefix('_').unwrap_or(rest);
                    if let Ok(level) = rest.parse::<i32>() {
                        if best.is_none_or(|b| name.len() > b.0.len()) {
                            best = Some((name, *p, level));
                        }
                    }
                }
            }
            if let Some((name, p, level)) = best {
                out.push(Symbol::series(name, level, p));
            }
        }
        out
    }

    pub fn from_toml(text: &str) -> Result<Self, ModelError> {
        let rec: SeedRecord = toml::from_str(text).map_err(|e| {
            let (line, col) = e
                .span()
                .map(|s| crate::kernel::line_col(text, s.start))
                .unwrap_or((1, 1));
            ModelError::Syntax { line, col, message: e.message().to_string() }
        })?;
        rec.into_seed()
    }

    pub fn to_record(&self) -> SeedRecord {
        SeedRecord {
            label: self.label.clone(),
            core: self.core,
            params: self.params.iter().map(|(k, v)| (k.clone(), v.render())).collect(),
            level0: self.level0.iter().map(|(k, v)| (k.clone(), v.render())).collect(),
            fermions: SeedFermions {
                r: self.r,
                relation: self.fermion_relation,
                k: self.k_relation,
                generators: self.generators.clone(),
            },
            hints: SeedHints { free: self.free.clone() },
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_record()).expect("seed serializes")
    }
}

impl Serialize for BranchSeed {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BranchSeed {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        SeedRecord::deserialize(d)?.into_seed().map_err(serde::de::Error::custom)
    }
}

/// On-disk form of a [`BranchSeed`]: every number is a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedRecord {
    pub label: String,
    #[serde(default)]
    pub core: bool,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default)]
    pub level0: BTreeMap<String, String>,
    #[serde(default)]
    pub fermions: SeedFermions,
    #[serde(default)]
    pub hints: SeedHints,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SeedFermions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<i32>,
    #[serde(default)]
    pub relation: FermionRelation,
    #[serde(default)]
    pub k: KRelation,
    #[serde(default)]
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SeedHints {
    #[serde(default)]
    pub free: Vec<String>,
}

/// Identifiers in seed values are even parameters unless listed as odd
/// generators; `i` and `k` stay the imaginary unit.
struct SeedResolver {
    odd: HashMap<String, Symbol>,
}

impl ExprResolver for SeedResolver {
    fn ident(&mut self, name: &str) -> Option<Expression> {
        if let Some(s) = self.odd.get(name) {
            return Some(Expression::symbol(*s));
        }
        if name == "i" || name == "k" {
            return None;
        }
        Some(Expression::symbol(Symbol::param(name)))
    }
}

impl SeedRecord {
    pub fn into_seed(self) -> Result<BranchSeed, ModelError> {
        let odd = self
            .fermions
            .generators
            .iter()
            .map(|g| (g.clone(), Symbol::param_with_parity(g, Parity::Odd)))
            .collect();
        let mut res = SeedResolver { odd };
        let mut parse = |key: &str, text: &str| -> Result<Expression, ModelError> {
            parse_expression(text, &mut res, None).map_err(|e| ModelError::Seed(format!("{key}: {e}")))
        };
        let mut params = BTreeMap::new();
        for (k, v) in &self.params {
            let e = parse(k, v)?;
            if e.parity() == Some(Parity::Odd) {
                return Err(ModelError::Seed(format!("parameter `{k}` must be even")));
            }
            params.insert(k.clone(), e);
        }
        let mut level0 = BTreeMap::new();
        for (k, v) in &self.level0 {
            let e = parse(k, v)?;
            if e.parity() == Some(Parity::Odd) {
                return Err(ModelError::Seed(format!("level-0 value of `{k}` must be even")));
            }
            level0.insert(k.clone(), e);
        }
        Ok(BranchSeed {
            label: self.label,
            params,
            level0,
            r: self.fermions.r,
            k_relation: self.fermions.k,
            fermion_relation: self.fermions.relation,
            core: self.core,
            generators: self.fermions.generators,
            free: self.hints.free,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Gauss;

    const SEED: &str = r#"
label = "II"
[params]
c = "3"
alpha = "1"
beta = "3"
[level0]
u = "1 - 2/3*lambda0*theta"
w = "i"
[fermions]
r = 2
relation = "type2"
k = "minus"
generators = ["lambda0", "theta"]
[hints]
free = ["w3", "w6", "xi1_2"]
"#;

    #[test]
    fn toml_round_trip() {
        let seed = BranchSeed::from_toml(SEED).unwrap();
        assert_eq!(seed.level0["w"].as_gauss().unwrap(), Gauss::k());
        assert_eq!(seed.level0["u"].parity(), Some(Parity::Even));
        let again = BranchSeed::from_toml(&seed.to_toml()).unwrap();
        assert_eq!(again, seed);
        let fields = vec![("w".to_string(), Parity::Even), ("xi1".to_string(), Parity::Odd)];
        let free = seed.free_symbols(&fields);
        assert_eq!(free, vec![Symbol::series("w", 3, Parity::Even), Symbol::series("w", 6, Parity::Even), Symbol::series("xi1", 2, Parity::Odd)]);
    }

    #[test]
    fn odd_parameter_rejected() {
        let bad = SEED.replace("alpha = \"1\"", "alpha = \"theta\"");
        assert!(matches!(BranchSeed::from_toml(&bad), Err(ModelError::Seed(_))));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = BranchSeed::from_toml("label = \"x\"\nr = [").unwrap_err();
        assert!(matches!(err, ModelError::Syntax { line: 2, .. }), "{err:?}");
    }
}
