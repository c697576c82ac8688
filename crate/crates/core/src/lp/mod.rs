//! Exact feasibility for linear systems over nonnegative continuous delay
//! variables and finite-domain integer parameter variables.
//!
//! [`lp_feasible`] decides purely continuous systems with a rational simplex.
//! Strict inequalities share a single slack `s`: `lhs < c` becomes
//! `lhs + s <= c` (and `lhs > c` becomes `lhs - s >= c`), `s <= 1` keeps the
//! problem bounded, and the system is feasible iff `max s > 0`.
//!
//! [`feasible`] enumerates integer assignments in lexicographic order of the
//! declared variables and returns the first one whose continuous residue is
//! feasible. [`Solver`] adds a memo cache and call statistics on top.

pub mod simplex;

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write};
use std::sync::atomic::{AtomicUsize, Ordering};

use num_traits::{One, Signed, Zero};
use parking_lot::Mutex;
use thiserror::Error;

use crate::model::Relation;
use crate::rational::int;
use crate::Rational;
use simplex::{maximize, Outcome, Row, RowKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("duplicate variable {0}")]
    DuplicateVariable(String),
    #[error("constraint references undeclared variable #{0}")]
    UnknownVariable(usize),
    #[error("integer variable {name} has empty domain [{lo}, {hi}]")]
    EmptyDomain { name: String, lo: i64, hi: i64 },
    #[error("continuous solver called with integer variable {0}")]
    IntegerVariable(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    /// A real variable with implicit lower bound 0.
    Continuous,
    /// An integer variable ranging over `lo..=hi`.
    Integer { lo: i64, hi: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinVar {
    pub name: String,
    pub kind: VarKind,
}

/// `Σ coef·var  relation  constant`, tagged with what it encodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinConstraint {
    pub terms: BTreeMap<usize, Rational>,
    pub relation: Relation,
    pub constant: Rational,
    pub provenance: String,
}

impl LinConstraint {
    pub fn new(
        terms: impl IntoIterator<Item = (usize, Rational)>,
        relation: Relation,
        constant: Rational,
        provenance: impl Into<String>,
    ) -> Self {
        let mut map: BTreeMap<usize, Rational> = BTreeMap::new();
        for (v, c) in terms {
            *map.entry(v).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        LinConstraint {
            terms: map,
            relation,
            constant,
            provenance: provenance.into(),
        }
    }

    pub fn lhs(&self, values: &[Rational]) -> Rational {
        self.terms.iter().map(|(&v, c)| c * &values[v]).sum()
    }

    pub fn holds(&self, values: &[Rational]) -> bool {
        self.relation.holds(&self.lhs(values), &self.constant)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FeasibilitySystem {
    variables: Vec<LinVar>,
    constraints: Vec<LinConstraint>,
}

type KeyRow = (Vec<(usize, Rational)>, Relation, Rational);

/// Identity of a system for caching: everything except provenance tags.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct SystemKey {
    variables: Vec<LinVar>,
    constraints: Vec<KeyRow>,
}

impl FeasibilitySystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind) -> Result<usize, LpError> {
        let name = name.into();
        if self.var_index(&name).is_some() {
            return Err(LpError::DuplicateVariable(name));
        }
        if let VarKind::Integer { lo, hi } = kind {
            if lo > hi {
                return Err(LpError::EmptyDomain { name, lo, hi });
            }
        }
        self.variables.push(LinVar { name, kind });
        Ok(self.variables.len() - 1)
    }

    pub fn add_constraint(&mut self, c: LinConstraint) -> Result<(), LpError> {
        if let Some(&v) = c.terms.keys().find(|&&v| v >= self.variables.len()) {
            return Err(LpError::UnknownVariable(v));
        }
        self.constraints.push(c);
        Ok(())
    }

    /// Drops constraints beyond the first `len`.
    pub fn truncate_constraints(&mut self, len: usize) {
        self.constraints.truncate(len);
    }

    /// Drops variables beyond the first `len`; constraints must not use them.
    pub fn truncate_variables(&mut self, len: usize) {
        debug_assert!(self
            .constraints
            .iter()
            .all(|c| c.terms.keys().all(|&v| v < len)));
        self.variables.truncate(len);
    }

    pub fn variables(&self) -> &[LinVar] {
        &self.variables
    }

    pub fn constraints(&self) -> &[LinConstraint] {
        &self.constraints
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn has_integer_vars(&self) -> bool {
        self.variables
            .iter()
            .any(|v| matches!(v.kind, VarKind::Integer { .. }))
    }

    /// Whether `values` (indexed like the variables) satisfies all bounds,
    /// domains and constraints, strict ones strictly.
    pub fn is_satisfied_by(&self, values: &[Rational]) -> bool {
        if values.len() != self.variables.len() {
            return false;
        }
        let in_domain = self
            .variables
            .iter()
            .zip(values)
            .all(|(var, x)| match var.kind {
                VarKind::Continuous => !x.is_negative(),
                VarKind::Integer { lo, hi } => x.is_integer() && *x >= int(lo) && *x <= int(hi),
            });
        in_domain && self.constraints.iter().all(|c| c.holds(values))
    }

    fn key(&self) -> SystemKey {
        SystemKey {
            variables: self.variables.clone(),
            constraints: self
                .constraints
                .iter()
                .map(|c| {
                    (
                        c.terms.iter().map(|(&v, q)| (v, q.clone())).collect(),
                        c.relation,
                        c.constant.clone(),
                    )
                })
                .collect(),
        }
    }

    /// One constraint per line:
    /// `<coef>*<var> (+ ...) <op> <const>   # <provenance>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for c in &self.constraints {
            let lhs = if c.terms.is_empty() {
                "0".to_string()
            } else {
                c.terms
                    .iter()
                    .map(|(&v, q)| format!("{}*{}", q, self.variables[v].name))
                    .collect::<Vec<_>>()
                    .join(" + ")
            };
            writeln!(
                out,
                "{} {} {}   # {}",
                lhs, c.relation, c.constant, c.provenance
            )
            .unwrap();
        }
        out
    }
}

impl fmt::Display for FeasibilitySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

/// A satisfying assignment, one value per system variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    names: Vec<String>,
    values: Vec<Rational>,
}

impl Witness {
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, name: &str) -> Option<&Rational> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.values[i])
    }
}

/// Decides a system with continuous variables only.
pub fn lp_feasible(system: &FeasibilitySystem) -> Result<Option<Witness>, LpError> {
    if let Some(v) = system
        .variables
        .iter()
        .find(|v| matches!(v.kind, VarKind::Integer { .. }))
    {
        return Err(LpError::IntegerVariable(v.name.clone()));
    }
    let n = system.variables.len();
    let slack = n;
    let mut rows = Vec::with_capacity(system.constraints.len() + 1);
    for c in &system.constraints {
        if c.terms.is_empty() {
            if c.relation.holds(&Rational::zero(), &c.constant) {
                continue;
            }
            return Ok(None);
        }
        let mut coeffs = vec![Rational::zero(); n + 1];
        for (&v, q) in &c.terms {
            coeffs[v] = q.clone();
        }
        let kind = match c.relation {
            Relation::Lt => {
                coeffs[slack] = Rational::one();
                RowKind::Le
            }
            Relation::Le => RowKind::Le,
            Relation::Gt => {
                coeffs[slack] = -Rational::one();
                RowKind::Ge
            }
            Relation::Ge => RowKind::Ge,
        };
        rows.push(Row {
            coeffs,
            kind,
            rhs: c.constant.clone(),
        });
    }
    let mut cap = vec![Rational::zero(); n + 1];
    cap[slack] = Rational::one();
    rows.push(Row {
        coeffs: cap,
        kind: RowKind::Le,
        rhs: Rational::one(),
    });
    let mut objective = vec![Rational::zero(); n + 1];
    objective[slack] = Rational::one();

    match maximize(n + 1, &rows, &objective) {
        Outcome::Optimal(mut x, s) if s.is_positive() => {
            x.truncate(n);
            let w = Witness {
                names: system.variables.iter().map(|v| v.name.clone()).collect(),
                values: x,
            };
            debug_assert!(system.is_satisfied_by(&w.values), "unsound LP witness");
            Ok(Some(w))
        }
        Outcome::Optimal(..) | Outcome::Infeasible => Ok(None),
        Outcome::Unbounded => unreachable!("objective is capped by s <= 1"),
    }
}

/// Integer variables in declaration order and their domains.
fn integer_grid(system: &FeasibilitySystem) -> Vec<(usize, i64, i64)> {
    system
        .variables
        .iter()
        .enumerate()
        .filter_map(|(i, v)| match v.kind {
            VarKind::Integer { lo, hi } => Some((i, lo, hi)),
            VarKind::Continuous => None,
        })
        .collect()
}

/// Substitutes fixed integer values, returning the continuous residue and the
/// map from residue variable index to original index.
fn substitute(
    system: &FeasibilitySystem,
    fixed: &HashMap<usize, i64>,
) -> (FeasibilitySystem, Vec<usize>) {
    let mut residue = FeasibilitySystem::new();
    let mut back = Vec::new();
    let mut forward = vec![usize::MAX; system.variables.len()];
    for (i, v) in system.variables.iter().enumerate() {
        if !fixed.contains_key(&i) {
            forward[i] = residue.variables.len();
            residue.variables.push(v.clone());
            back.push(i);
        }
    }
    for c in &system.constraints {
        let mut constant = c.constant.clone();
        let mut terms = BTreeMap::new();
        for (&v, q) in &c.terms {
            match fixed.get(&v) {
                Some(&val) => constant -= q * int(val),
                None => {
                    terms.insert(forward[v], q.clone());
                }
            }
        }
        residue.constraints.push(LinConstraint {
            terms,
            relation: c.relation,
            constant,
            provenance: c.provenance.clone(),
        });
    }
    (residue, back)
}

/// Decides a mixed system by enumerating the integer grid in lexicographic
/// order (first declared variable most significant).
pub fn feasible(system: &FeasibilitySystem) -> Option<Witness> {
    let grid = integer_grid(system);
    let mut current: Vec<i64> = grid.iter().map(|&(_, lo, _)| lo).collect();
    loop {
        let fixed: HashMap<usize, i64> = grid
            .iter()
            .zip(&current)
            .map(|(&(i, _, _), &v)| (i, v))
            .collect();
        let (residue, back) = substitute(system, &fixed);
        if let Some(w) = lp_feasible(&residue).expect("residue is continuous") {
            let mut values = vec![Rational::zero(); system.variables.len()];
            for (&i, &v) in &fixed {
                values[i] = int(v);
            }
            for (k, &i) in back.iter().enumerate() {
                values[i] = w.values[k].clone();
            }
            let witness = Witness {
                names: system.variables.iter().map(|v| v.name.clone()).collect(),
                values,
            };
            debug_assert!(system.is_satisfied_by(&witness.values), "unsound witness");
            return Some(witness);
        }
        // odometer, last variable fastest
        let mut k = grid.len();
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            if current[k] < grid[k].2 {
                current[k] += 1;
                for j in k + 1..grid.len() {
                    current[j] = grid[j].1;
                }
                break;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    /// Calls to [`Solver::feasible`].
    pub queries: usize,
    pub cache_hits: usize,
}

/// [`feasible`] behind a thread-safe memo cache.
#[derive(Debug, Default)]
pub struct Solver {
    cache: Mutex<HashMap<SystemKey, Option<Witness>>>,
    queries: AtomicUsize,
    hits: AtomicUsize,
}

impl Solver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn feasible(&self, system: &FeasibilitySystem) -> Option<Witness> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let key = system.key();
        if let Some(hit) = self.cache.lock().get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return hit.clone();
        }
        let result = feasible(system);
        self.cache.lock().insert(key, result.clone());
        result
    }

    pub fn stats(&self) -> SolverStats {
        SolverStats {
            queries: self.queries.load(Ordering::Relaxed),
            cache_hits: self.hits.load(Ordering::Relaxed),
        }
    }
}
