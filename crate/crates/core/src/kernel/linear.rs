use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Expression, KernelError, Symbol};
use crate::ring::Gauss;

const MAX_ITERATIONS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Bosonic,
    Fermionic,
}

impl std::fmt::Display for Sector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sector::Bosonic => "bosonic",
            Sector::Fermionic => "fermionic",
        })
    }
}

/// `matrix * unknowns = rhs` for one parity sector at one level. Entries may
/// carry nilpotent (odd-bilinear) corrections; the body of the matrix must
/// be symbol-free. Each product is written `matrix[i][j] * x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem2 {
    pub unknowns: Vec<Symbol>,
    pub matrix: Vec<Vec<Expression>>,
    pub rhs: Vec<Expression>,
}

/// Outcome of [`solve_level`]: solved unknowns, unknowns left arbitrary, and
/// the consistency residuals that must vanish (one per missing rank).
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSolution {
    pub solved: Vec<(Symbol, Expression)>,
    pub free: Vec<Symbol>,
    pub residuals: Vec<Expression>,
    /// Rows of the body cokernel, one per residual.
    pub cokernel: Vec<Vec<Gauss>>,
}

impl LevelSolution {
    pub fn is_unique(&self) -> bool {
        self.free.is_empty()
    }
}

impl LinearSystem2 {
    /// Splits relations `R_i = 0`, each linear in `unknowns`.
    pub fn from_relations(unknowns: &[Symbol], relations: &[Expression]) -> Result<Self, KernelError> {
        let zero: HashMap<Symbol, Expression> = unknowns.iter().map(|s| (*s, Expression::zero())).collect();
        let mut matrix = Vec::with_capacity(relations.len());
        let mut rhs = Vec::with_capacity(relations.len());
        for r in relations {
            let row: Vec<Expression> = unknowns.iter().map(|x| r.partial(*x).substitute_unchecked(&zero)).collect();
            let b = -r.substitute_unchecked(&zero);
            let mut check = -&b;
            for (m, x) in row.iter().zip(unknowns) {
                check.add_assign_ref(&(m * &Expression::symbol(*x)));
            }
            if &check != r {
                return Err(KernelError::NonLinear);
            }
            matrix.push(row);
            rhs.push(b);
        }
        Ok(LinearSystem2 { unknowns: unknowns.to_vec(), matrix, rhs })
    }

    pub fn body(&self) -> Result<Vec<Vec<Gauss>>, KernelError> {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        let body = e.filter_terms(|m| m.odd_degree() == 0);
                        body.as_scalar().map(|s| s.body()).ok_or(KernelError::SymbolicBody)
                    })
                    .collect()
            })
            .collect()
    }

    /// `matrix * x - rhs` for the given values.
    pub fn residual(&self, values: &HashMap<Symbol, Expression>) -> Vec<Expression> {
        self.matrix
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| {
                let mut acc = -b;
                for (m, x) in row.iter().zip(&self.unknowns) {
                    let v = values.get(x).cloned().unwrap_or_else(|| Expression::symbol(*x));
                    acc.add_assign_ref(&(m * &v));
                }
                acc
            })
            .collect()
    }
}

fn norm(g: &Gauss) -> crate::ring::Rational {
    g.norm_sq()
}

/// Solves one sector's level system over the Grassmann ring.
///
/// The body matrix is row reduced with pivots of largest magnitude (ties go
/// to the later column, and columns named in `prefer_free` are pivoted last).
/// Nilpotent parts of the matrix are handled by fixed-point iteration, which
/// terminates because they are nilpotent.
pub fn solve_level(system: &LinearSystem2, prefer_free: &[Symbol]) -> Result<LevelSolution, KernelError> {
    let values: HashMap<Symbol, Expression> = HashMap::new();
    let relations = system.residual(&values);
    solve_relations(&system.unknowns, &relations, prefer_free)
}

/// Body of `d relation / d unknown` with every unknown set to zero.
fn body_jacobian(unknowns: &[Symbol], relations: &[Expression]) -> Result<Vec<Vec<Gauss>>, KernelError> {
    let zero: HashMap<Symbol, Expression> = unknowns.iter().map(|s| (*s, Expression::zero())).collect();
    relations
        .iter()
        .map(|r| {
            unknowns
                .iter()
                .map(|x| {
                    let d = r.partial(*x).filter_terms(|m| m.odd_degree() == 0).substitute_unchecked(&zero);
                    d.as_scalar().map(|s| s.body()).ok_or(KernelError::SymbolicBody)
                })
                .collect()
        })
        .collect()
}

/// Solves relations `R_i(x) = 0` whose Jacobian body is constant and whose
/// remaining nonlinearity is nilpotent, such as the level relations of a
/// series expansion with anticommuting coefficients.
///
/// Uses chord iteration `x <- x - T R(x)` with `T` the body pseudo-inverse
/// from row reduction (largest pivot first, ties to the later column,
/// `prefer_free` columns last). Unpivoted unknowns stay symbolic; each
/// unpivoted row yields a consistency residual.
pub fn solve_relations(unknowns: &[Symbol], relations: &[Expression], prefer_free: &[Symbol]) -> Result<LevelSolution, KernelError> {
    let body = body_jacobian(unknowns, relations)?;
    let rows = body.len();
    let cols = unknowns.len();
    let mut a = body;
    let mut t: Vec<Vec<Gauss>> = (0..rows).map(|i| (0..rows).map(|j| if i == j { Gauss::one() } else { Gauss::zero() }).collect()).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut used_rows = vec![false; rows];
    let mut used_cols = vec![false; cols];
    loop {
        let mut best: Option<(usize, usize)> = None;
        let key = |a: &Vec<Vec<Gauss>>, r: usize, c: usize| (!prefer_free.contains(&unknowns[c]), norm(&a[r][c]), c);
        for i in (0..rows).filter(|i| !used_rows[*i]) {
            for j in (0..cols).filter(|j| !used_cols[*j]) {
                if a[i][j].is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| key(&a, i, j) > key(&a, bi, bj)) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        let inv = a[pi][pj].inv()?;
        for v in a[pi].iter_mut() {
            *v = &*v * &inv;
        }
        for v in t[pi].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows {
            if i == pi || a[i][pj].is_zero() {
                continue;
            }
            let f = a[i][pj].clone();
            for j in 0..cols {
                let d = &f * &a[pi][j];
                a[i][j] = &a[i][j] - &d;
            }
            for j in 0..rows {
                let d = &f * &t[pi][j];
                t[i][j] = &t[i][j] - &d;
            }
        }
        used_rows[pi] = true;
        used_cols[pj] = true;
        pivots.push((pi, pj));
    }
    let free: Vec<Symbol> = (0..cols).filter(|j| !used_cols[*j]).map(|j| unknowns[j]).collect();
    let combine = |row: &[Gauss], r: &[Expression]| -> Expression {
        let mut acc = Expression::zero();
        for (g, e) in row.iter().zip(r) {
            acc.add_scaled(e, g);
        }
        acc
    };
    let eval = |values: &HashMap<Symbol, Expression>| -> Vec<Expression> {
        relations.iter().map(|r| r.substitute_unchecked(values)).collect()
    };
    let mut values: HashMap<Symbol, Expression> = pivots.iter().map(|(_, j)| (unknowns[*j], Expression::zero())).collect();
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let r = eval(&values);
        let mut changed = false;
        for (pi, pj) in &pivots {
            let step = combine(&t[*pi], &r);
            if !step.is_zero() {
                changed = true;
                let x = unknowns[*pj];
                let v = &values[&x] - &step;
                values.insert(x, v);
            }
        }
        if !changed {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(KernelError::NoConvergence(MAX_ITERATIONS));
    }
    let r = eval(&values);
    let mut residuals = Vec::new();
    let mut cokernel = Vec::new();
    for i in (0..rows).filter(|i| !used_rows[*i]) {
        residuals.push(combine(&t[i], &r));
        cokernel.push(t[i].clone());
    }
    let solved = pivots.iter().map(|(_, j)| (unknowns[*j], values[&unknowns[*j]].clone())).collect();
    Ok(LevelSolution { solved, free, residuals, cokernel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Parity;

    fn sym(name: &str, level: i32, parity: Parity) -> Symbol {
        Symbol::series(name, level, parity)
    }

    #[test]
    fn unique_diagonal() {
        let (x, y) = (sym("lx", 1, Parity::Even), sym("ly", 1, Parity::Even));
        let sys = LinearSystem2 {
            unknowns: vec![x, y],
            matrix: vec![vec![Expression::int(2), Expression::zero()], vec![Expression::zero(), Expression::int(3)]],
            rhs: vec![Expression::int(4), Expression::int(9)],
        };
        let sol = solve_level(&sys, &[]).unwrap();
        assert!(sol.is_unique());
        let got: HashMap<_, _> = sol.solved.into_iter().collect();
        assert_eq!(got[&x], Expression::int(2));
        assert_eq!(got[&y], Expression::int(3));
    }

    #[test]
    fn rank_one_consistent() {
        let (x, y) = (sym("lx", 2, Parity::Even), sym("ly", 2, Parity::Even));
        let sys = LinearSystem2 {
            unknowns: vec![x, y],
            matrix: vec![vec![Expression::int(1), Expression::int(2)], vec![Expression::int(2), Expression::int(4)]],
            rhs: vec![Expression::int(1), Expression::int(2)],
        };
        let sol = solve_level(&sys, &[]).unwrap();
        assert_eq!(sol.free.len(), 1);
        assert_eq!(sol.residuals, vec![Expression::zero()]);
    }

    #[test]
    fn nilpotent_correction() {
        // (1 + a b) x = c, with a, b odd: x = c - a b c
        let x = sym("lx", 3, Parity::Even);
        let a = Expression::symbol(sym("la", 0, Parity::Odd));
        let b = Expression::symbol(sym("lb", 0, Parity::Odd));
        let c = Expression::symbol(sym("lc", 0, Parity::Even));
        let ab = &a * &b;
        let sys = LinearSystem2 { unknowns: vec![x], matrix: vec![vec![&Expression::one() + &ab]], rhs: vec![c.clone()] };
        let sol = solve_level(&sys, &[]).unwrap();
        assert_eq!(sol.solved[0].1, &c - &(&ab * &c));
        let vals: HashMap<_, _> = sol.solved.into_iter().collect();
        assert!(sys.residual(&vals).iter().all(Expression::is_zero));
    }

    #[test]
    fn nilpotent_nonlinearity() {
        // y = a + y z b, z = c with every symbol odd
        let y = sym("ly", 1, Parity::Odd);
        let z = sym("lz", 1, Parity::Odd);
        let [a, b, c] = ["la", "lb", "lc"].map(|n| Expression::symbol(sym(n, 0, Parity::Odd)));
        let (ey, ez) = (Expression::symbol(y), Expression::symbol(z));
        let r1 = &(&ey - &a) - &(&(&ey * &ez) * &b);
        let r2 = &ez - &c;
        let sol = solve_relations(&[y, z], &[r1.clone(), r2.clone()], &[]).unwrap();
        let vals: HashMap<_, _> = sol.solved.into_iter().collect();
        assert_eq!(vals[&y], &a + &(&(&a * &c) * &b));
        assert!(r1.substitute_unchecked(&vals).is_zero());
        assert!(r2.substitute_unchecked(&vals).is_zero());
    }
}
