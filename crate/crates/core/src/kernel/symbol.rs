use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn from_odd(odd: bool) -> Self {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// What a symbol stands for. Parameters are constants; series coefficients
/// and free functions depend on `t` and carry a tower of formal derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    Parameter,
    Function,
    Series,
    /// `d^level/dx^level` of a field, used in equations.
    Jet,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymbolDescriptor {
    pub name: String,
    pub level: Option<i32>,
    pub parity: Parity,
    pub dt_order: u32,
    pub kind: SymbolKind,
}

impl SymbolDescriptor {
    pub fn render(&self) -> String {
        if self.kind == SymbolKind::Jet {
            return match self.level.unwrap_or(0) {
                0 => self.name.clone(),
                1 => format!("d({})", self.name),
                k => format!("d^{k}({})", self.name),
            };
        }
        let mut s = self.name.clone();
        if let Some(l) = self.level {
            s.push('_');
            s.push_str(&l.to_string());
        }
        for _ in 0..self.dt_order {
            s.push('\'');
        }
        s
    }
}

/// Interned symbol handle. The low bit of the id carries the parity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(u32);

struct Interner {
    descs: Vec<Arc<SymbolDescriptor>>,
    ids: HashMap<SymbolDescriptor, Symbol>,
}

static INTERNER: Lazy<RwLock<Interner>> =
    Lazy::new(|| RwLock::new(Interner { descs: Vec::new(), ids: HashMap::new() }));

impl Symbol {
    pub fn intern(desc: SymbolDescriptor) -> Symbol {
        if let Some(s) = INTERNER.read().ids.get(&desc) {
            return *s;
        }
        let mut w = INTERNER.write();
        if let Some(s) = w.ids.get(&desc) {
            return *s;
        }
        let idx = w.descs.len() as u32;
        let sym = Symbol(idx << 1 | desc.parity.is_odd() as u32);
        w.descs.push(Arc::new(desc.clone()));
        w.ids.insert(desc, sym);
        sym
    }

    /// Series coefficient `name_level` (no derivatives).
    pub fn series(name: &str, level: i32, parity: Parity) -> Symbol {
        Symbol::intern(SymbolDescriptor {
            name: name.to_string(),
            level: Some(level),
            parity,
            dt_order: 0,
            kind: SymbolKind::Series,
        })
    }

    /// `d^order/dx^order` of the field `name`.
    pub fn jet(name: &str, order: u32, parity: Parity) -> Symbol {
        Symbol::intern(SymbolDescriptor {
            name: name.to_string(),
            level: Some(order as i32),
            parity,
            dt_order: 0,
            kind: SymbolKind::Jet,
        })
    }

    pub fn kind(self) -> SymbolKind {
        self.desc().kind
    }

    /// Constant parameter such as `alpha`.
    pub fn param(name: &str) -> Symbol {
        Symbol::param_with_parity(name, Parity::Even)
    }

    pub fn param_with_parity(name: &str, parity: Parity) -> Symbol {
        Symbol::intern(SymbolDescriptor {
            name: name.to_string(),
            level: None,
            parity,
            dt_order: 0,
            kind: SymbolKind::Parameter,
        })
    }

    /// Free function of `t` without a level, e.g. the manifold shift `f`.
    pub fn function(name: &str, parity: Parity) -> Symbol {
        Symbol::intern(SymbolDescriptor {
            name: name.to_string(),
            level: None,
            parity,
            dt_order: 0,
            kind: SymbolKind::Function,
        })
    }

    pub fn desc(self) -> Arc<SymbolDescriptor> {
        INTERNER.read().descs[(self.0 >> 1) as usize].clone()
    }

    pub fn is_odd(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn parity(self) -> Parity {
        Parity::from_odd(self.is_odd())
    }

    pub fn is_constant(self) -> bool {
        self.desc().kind == SymbolKind::Parameter
    }

    pub fn level(self) -> Option<i32> {
        self.desc().level
    }

    pub fn dt_order(self) -> u32 {
        self.desc().dt_order
    }

    /// The symbol with one more formal `d/dt`; `None` for constants.
    pub fn dt(self) -> Option<Symbol> {
        let d = self.desc();
        if d.kind == SymbolKind::Parameter {
            return None;
        }
        let mut next = (*d).clone();
        next.dt_order += 1;
        Some(Symbol::intern(next))
    }

    /// The underived member of this symbol's derivative tower.
    pub fn base(self) -> Symbol {
        let d = self.desc();
        if d.dt_order == 0 {
            return self;
        }
        let mut b = (*d).clone();
        b.dt_order = 0;
        Symbol::intern(b)
    }

    pub fn name(self) -> String {
        self.desc().render()
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_stable() {
        let a = Symbol::series("u", 4, Parity::Even);
        let b = Symbol::series("u", 4, Parity::Even);
        assert_eq!(a, b);
        assert_ne!(a, Symbol::series("u", 5, Parity::Even));
        assert_eq!(a.name(), "u_4");
        assert_eq!(a.dt().unwrap().name(), "u_4'");
        assert_eq!(a.dt().unwrap().dt().unwrap().base(), a);
    }

    #[test]
    fn parity_bit() {
        assert!(Symbol::series("xi1", 0, Parity::Odd).is_odd());
        assert!(!Symbol::param("alpha").is_odd());
        assert!(Symbol::param("alpha").dt().is_none());
    }
}
