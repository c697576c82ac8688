//! Parametric timed automata, reach-avoid specifications and parameter
//! valuations.
//!
//! A [`Pta`] is immutable once built. Locations, clocks, parameters, input
//! symbols and transitions are referred to by dense index newtypes; names are
//! only used at the text boundary (parser, printer, reports). Clock index 0 is
//! always the global clock `x0`, which is never reset.

mod normalize;
mod parse;
mod print;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use normalize::{normalize_guards, NormalizationReport, RewrittenGroup};
pub use parse::parse_model;
pub use print::print_model;

/// Name of the implicit global clock.
pub const GLOBAL_CLOCK: &str = "x0";

macro_rules! index_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub usize);

        impl $name {
            pub fn index(self) -> usize {
                self.0
            }
        }
    };
}

index_type!(
    /// Index of a location in [`Pta::locations`].
    LocId
);
index_type!(
    /// Index of a clock; `ClockId(0)` is `x0`.
    ClockId
);
index_type!(
    /// Index of a parameter in [`Pta::params`].
    ParamId
);
index_type!(
    /// Index of a transition in [`Pta::transitions`] (declaration order).
    TransId
);
index_type!(
    /// Index of an input symbol in [`Pta::alphabet`].
    SymbolId
);

impl ClockId {
    pub const GLOBAL: ClockId = ClockId(0);
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{entity}: {reason}")]
    Semantic { entity: String, reason: String },
}

impl ModelError {
    pub(crate) fn semantic(entity: impl Into<String>, reason: impl Into<String>) -> Self {
        ModelError::Semantic {
            entity: entity.into(),
            reason: reason.into(),
        }
    }
}

/// A parameter with its finite domain `[lo, hi]` of naturals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parameter {
    pub name: String,
    pub lo: u64,
    pub hi: u64,
}

impl Parameter {
    pub fn contains(&self, value: u64) -> bool {
        self.lo <= value && value <= self.hi
    }
}

/// `Σ kᵢ·pᵢ + b` with natural coefficients, at most one term per parameter,
/// terms sorted by parameter index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineParamExpr {
    terms: Vec<(u64, ParamId)>,
    constant: u64,
}

impl AffineParamExpr {
    pub fn constant(constant: u64) -> Self {
        AffineParamExpr {
            terms: Vec::new(),
            constant,
        }
    }

    /// Builds an expression, merging repeated parameters and dropping zero
    /// coefficients.
    pub fn new(terms: impl IntoIterator<Item = (u64, ParamId)>, constant: u64) -> Self {
        let mut merged: Vec<(u64, ParamId)> = Vec::new();
        for (coef, param) in terms {
            match merged.iter_mut().find(|(_, p)| *p == param) {
                Some((c, _)) => *c += coef,
                None => merged.push((coef, param)),
            }
        }
        merged.retain(|(c, _)| *c != 0);
        merged.sort_by_key(|&(_, p)| p);
        AffineParamExpr {
            terms: merged,
            constant,
        }
    }

    pub fn terms(&self) -> &[(u64, ParamId)] {
        &self.terms
    }

    pub fn constant_part(&self) -> u64 {
        self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluates the bound under `gamma`.
    pub fn eval(&self, gamma: &ParamValuation) -> u64 {
        self.terms
            .iter()
            .map(|&(k, p)| k * gamma.get(p))
            .sum::<u64>()
            + self.constant
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Relation {
    pub fn holds<T: PartialOrd>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Lt | Relation::Gt)
    }

    /// The relation obtained by multiplying both sides with -1.
    pub fn flip(self) -> Self {
        match self {
            Relation::Lt => Relation::Gt,
            Relation::Le => Relation::Ge,
            Relation::Gt => Relation::Lt,
            Relation::Ge => Relation::Le,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GuardAtom {
    pub clock: ClockId,
    pub relation: Relation,
    pub bound: AffineParamExpr,
}

/// A conjunction of atoms; the empty conjunction is `true`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Guard {
    pub atoms: Vec<GuardAtom>,
}

impl Guard {
    pub fn truth() -> Self {
        Guard::default()
    }

    pub fn is_true(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Parameters referenced by any atom, ascending.
    pub fn params(&self) -> BTreeSet<ParamId> {
        self.atoms
            .iter()
            .flat_map(|a| a.bound.terms().iter().map(|&(_, p)| p))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub id: String,
    pub source: LocId,
    pub input: SymbolId,
    pub resets: BTreeSet<ClockId>,
    pub guard: Guard,
    pub target: LocId,
}

/// A parametric timed automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pta {
    pub(crate) locations: Vec<String>,
    pub(crate) init: LocId,
    pub(crate) alphabet: Vec<String>,
    pub(crate) clocks: Vec<String>,
    pub(crate) params: Vec<Parameter>,
    pub(crate) transitions: Vec<Transition>,
}

/// Reach-avoid specification with deadline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spec {
    pub targets: BTreeSet<LocId>,
    pub avoids: BTreeSet<LocId>,
    pub deadline: u64,
}

impl Spec {
    pub fn is_target(&self, l: LocId) -> bool {
        self.targets.contains(&l)
    }

    pub fn is_avoid(&self, l: LocId) -> bool {
        self.avoids.contains(&l)
    }
}

impl Pta {
    /// Assembles a PTA from already-resolved parts, checking structural
    /// invariants. `clocks` must not contain `x0`; it is prepended.
    pub fn new(
        locations: Vec<String>,
        init: LocId,
        alphabet: Vec<String>,
        clocks: Vec<String>,
        params: Vec<Parameter>,
        transitions: Vec<Transition>,
    ) -> Result<Self, ModelError> {
        let mut all_clocks = vec![GLOBAL_CLOCK.to_string()];
        all_clocks.extend(clocks);
        let pta = Pta {
            locations,
            init,
            alphabet,
            clocks: all_clocks,
            params,
            transitions,
        };
        pta.check()?;
        Ok(pta)
    }

    fn check(&self) -> Result<(), ModelError> {
        unique(&self.locations, "location")?;
        unique(&self.clocks, "clock")?;
        unique(&self.alphabet, "input")?;
        unique(
            &self
                .params
                .iter()
                .map(|p| p.name.clone())
                .collect::<Vec<_>>(),
            "param",
        )?;
        unique(
            &self
                .transitions
                .iter()
                .map(|t| t.id.clone())
                .collect::<Vec<_>>(),
            "transition",
        )?;
        if self.init.0 >= self.locations.len() {
            return Err(ModelError::semantic("init", "undeclared initial location"));
        }
        for p in &self.params {
            if p.lo > p.hi {
                return Err(ModelError::semantic(
                    format!("param {}", p.name),
                    format!("empty domain [{}, {}]", p.lo, p.hi),
                ));
            }
        }
        for t in &self.transitions {
            let entity = || format!("transition {}", t.id);
            if t.source.0 >= self.locations.len() || t.target.0 >= self.locations.len() {
                return Err(ModelError::semantic(entity(), "undeclared location"));
            }
            if t.input.0 >= self.alphabet.len() {
                return Err(ModelError::semantic(entity(), "input not in alphabet"));
            }
            if t.resets.contains(&ClockId::GLOBAL) {
                return Err(ModelError::semantic(entity(), "x0 reset forbidden"));
            }
            for atom in &t.guard.atoms {
                if atom.clock.0 >= self.clocks.len() {
                    return Err(ModelError::semantic(entity(), "undeclared clock in guard"));
                }
                if atom
                    .bound
                    .terms()
                    .iter()
                    .any(|&(_, p)| p.0 >= self.params.len())
                {
                    return Err(ModelError::semantic(
                        entity(),
                        "undeclared parameter in guard",
                    ));
                }
            }
            if t.resets.iter().any(|c| c.0 >= self.clocks.len()) {
                return Err(ModelError::semantic(
                    entity(),
                    "undeclared clock in reset set",
                ));
            }
        }
        Ok(())
    }

    pub fn init(&self) -> LocId {
        self.init
    }

    pub fn locations(&self) -> impl ExactSizeIterator<Item = LocId> {
        (0..self.locations.len()).map(LocId)
    }

    pub fn location_count(&self) -> usize {
        self.locations.len()
    }

    pub fn location_name(&self, l: LocId) -> &str {
        &self.locations[l.0]
    }

    pub fn location_by_name(&self, name: &str) -> Option<LocId> {
        self.locations.iter().position(|n| n == name).map(LocId)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn symbol_name(&self, a: SymbolId) -> &str {
        &self.alphabet[a.0]
    }

    pub fn symbol_by_name(&self, name: &str) -> Option<SymbolId> {
        self.alphabet.iter().position(|n| n == name).map(SymbolId)
    }

    /// All clocks including `x0` at index 0.
    pub fn clocks(&self) -> &[String] {
        &self.clocks
    }

    pub fn clock_count(&self) -> usize {
        self.clocks.len()
    }

    pub fn clock_name(&self, c: ClockId) -> &str {
        &self.clocks[c.0]
    }

    pub fn clock_by_name(&self, name: &str) -> Option<ClockId> {
        self.clocks.iter().position(|n| n == name).map(ClockId)
    }

    pub fn params(&self) -> &[Parameter] {
        &self.params
    }

    pub fn param(&self, p: ParamId) -> &Parameter {
        &self.params[p.0]
    }

    pub fn param_by_name(&self, name: &str) -> Option<ParamId> {
        self.params.iter().position(|p| p.name == name).map(ParamId)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, e: TransId) -> &Transition {
        &self.transitions[e.0]
    }

    pub fn transition_by_id(&self, id: &str) -> Option<TransId> {
        self.transitions
            .iter()
            .position(|t| t.id == id)
            .map(TransId)
    }

    fn check_location(&self, l: LocId) -> Result<(), ModelError> {
        if l.0 < self.locations.len() {
            Ok(())
        } else {
            Err(ModelError::semantic(
                format!("location #{}", l.0),
                "unknown location",
            ))
        }
    }

    /// Σ(l): input symbols labelling some transition leaving `l`, in alphabet
    /// order.
    pub fn enabled_inputs(&self, l: LocId) -> Result<BTreeSet<SymbolId>, ModelError> {
        self.check_location(l)?;
        Ok(self
            .transitions
            .iter()
            .filter(|t| t.source == l)
            .map(|t| t.input)
            .collect())
    }

    /// Transitions leaving `l` under input `a`, in declaration order.
    pub fn post(&self, l: LocId, a: SymbolId) -> Vec<TransId> {
        self.transitions
            .iter()
            .enumerate()
            .filter(|(_, t)| t.source == l && t.input == a)
            .map(|(i, _)| TransId(i))
            .collect()
    }

    /// Replaces every parametric bound by its value under `gamma`.
    pub fn instantiate(&self, gamma: &ParamValuation) -> Result<Pta, ModelError> {
        gamma.check_against(self)?;
        let mut out = self.clone();
        for t in &mut out.transitions {
            for atom in &mut t.guard.atoms {
                atom.bound = AffineParamExpr::constant(atom.bound.eval(gamma));
            }
        }
        Ok(out)
    }

    /// Whether every parameter-dependent bound has been evaluated away.
    pub fn is_parameter_free(&self) -> bool {
        self.transitions
            .iter()
            .all(|t| t.guard.atoms.iter().all(|a| a.bound.is_constant()))
    }

    /// Whether all transitions sharing a (source, input) pair carry the same
    /// guard.
    pub fn satisfies_same_guard_assumption(&self) -> bool {
        self.transitions.iter().all(|t| {
            self.transitions
                .iter()
                .filter(|u| u.source == t.source && u.input == t.input)
                .all(|u| u.guard == t.guard)
        })
    }

    /// The guard shared by the `a`-transitions leaving `l`, if any exist.
    /// Meaningful for PTAs that satisfy the same-guard assumption.
    pub fn input_guard(&self, l: LocId, a: SymbolId) -> Option<&Guard> {
        self.post(l, a).first().map(|&e| &self.transition(e).guard)
    }

    pub fn guard_to_string(&self, g: &Guard) -> String {
        if g.is_true() {
            return "true".to_string();
        }
        g.atoms
            .iter()
            .map(|a| self.atom_to_string(a))
            .collect::<Vec<_>>()
            .join(" & ")
    }

    pub fn atom_to_string(&self, a: &GuardAtom) -> String {
        format!(
            "{} {} {}",
            self.clock_name(a.clock),
            a.relation,
            self.expr_to_string(&a.bound)
        )
    }

    pub fn expr_to_string(&self, e: &AffineParamExpr) -> String {
        let mut parts: Vec<String> = e
            .terms()
            .iter()
            .map(|&(k, p)| {
                let name = &self.params[p.0].name;
                if k == 1 {
                    name.clone()
                } else {
                    format!("{}*{}", k, name)
                }
            })
            .collect();
        if e.constant_part() != 0 || parts.is_empty() {
            parts.push(e.constant_part().to_string());
        }
        parts.join(" + ")
    }
}

fn unique(names: &[String], kind: &str) -> Result<(), ModelError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(ModelError::semantic(
                format!("{} {}", kind, n),
                "duplicate declaration",
            ));
        }
    }
    Ok(())
}

/// γ: a value for every parameter of a PTA, indexed by [`ParamId`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamValuation {
    values: Vec<u64>,
}

impl ParamValuation {
    pub fn new(values: Vec<u64>) -> Self {
        ParamValuation { values }
    }

    /// Builds a valuation from `(name, value)` pairs, checking totality and
    /// domains.
    pub fn from_named<'a>(
        pta: &Pta,
        pairs: impl IntoIterator<Item = (&'a str, u64)>,
    ) -> Result<Self, ModelError> {
        let mut values: Vec<Option<u64>> = vec![None; pta.params.len()];
        for (name, v) in pairs {
            let p = pta
                .param_by_name(name)
                .ok_or_else(|| ModelError::semantic(format!("param {}", name), "undeclared"))?;
            if values[p.0].replace(v).is_some() {
                return Err(ModelError::semantic(
                    format!("param {}", name),
                    "assigned twice",
                ));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    ModelError::semantic(format!("param {}", pta.params[i].name), "missing value")
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let gamma = ParamValuation { values };
        gamma.check_against(pta)?;
        Ok(gamma)
    }

    pub fn get(&self, p: ParamId) -> u64 {
        self.values[p.0]
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn check_against(&self, pta: &Pta) -> Result<(), ModelError> {
        if self.values.len() != pta.params.len() {
            return Err(ModelError::semantic(
                "valuation",
                format!(
                    "expected {} parameter values, got {}",
                    pta.params.len(),
                    self.values.len()
                ),
            ));
        }
        for (p, &v) in pta.params.iter().zip(&self.values) {
            if !p.contains(v) {
                return Err(ModelError::semantic(
                    format!("param {}", p.name),
                    format!("value {} outside domain [{}, {}]", v, p.lo, p.hi),
                ));
            }
        }
        Ok(())
    }

    /// `p1=3 p2=3` rendering used in strategy files and reports.
    pub fn display<'a>(&'a self, pta: &'a Pta) -> impl fmt::Display + 'a {
        DisplayValuation { gamma: self, pta }
    }
}

struct DisplayValuation<'a> {
    gamma: &'a ParamValuation,
    pta: &'a Pta,
}

impl fmt::Display for DisplayValuation<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (p, v)) in self.pta.params.iter().zip(&self.gamma.values).enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}={}", p.name, v)?;
        }
        Ok(())
    }
}
