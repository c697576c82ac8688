//! Concrete timed semantics: clock valuations, delay and reset, guard
//! evaluation, discrete steps, paths, runs and reach-avoid checking.
//!
//! All time values are exact rationals.

use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::model::{ClockId, Guard, LocId, ParamValuation, Pta, Spec, SymbolId, TransId};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("negative delay {0}")]
    NegativeDelay(Rational),
    #[error("x0 cannot be reset")]
    GlobalClockReset,
    #[error("no value for parameter #{0}")]
    MissingParam(usize),
    #[error("path has {transitions} transitions but {delays} delays were given")]
    LengthMismatch { transitions: usize, delays: usize },
    #[error("malformed path: {0}")]
    MalformedPath(String),
    #[error("step {index}: transition {transition} is not enabled")]
    NotEnabled { index: usize, transition: String },
}

/// Values of all clocks of a PTA, indexed by [`ClockId`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClockValuation {
    values: Vec<Rational>,
}

impl ClockValuation {
    pub fn zero(clock_count: usize) -> Self {
        ClockValuation {
            values: vec![Rational::zero(); clock_count],
        }
    }

    /// Builds a valuation from explicit values; all must be nonnegative.
    pub fn from_values(values: Vec<Rational>) -> Option<Self> {
        if values.iter().any(|v| v.is_negative()) {
            None
        } else {
            Some(ClockValuation { values })
        }
    }

    pub fn get(&self, c: ClockId) -> &Rational {
        &self.values[c.0]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn global(&self) -> &Rational {
        &self.values[ClockId::GLOBAL.0]
    }

    pub fn delay(&self, d: &Rational) -> Result<Self, SemanticsError> {
        if d.is_negative() {
            return Err(SemanticsError::NegativeDelay(d.clone()));
        }
        Ok(ClockValuation {
            values: self.values.iter().map(|v| v + d).collect(),
        })
    }

    pub fn reset<'a>(
        &self,
        clocks: impl IntoIterator<Item = &'a ClockId>,
    ) -> Result<Self, SemanticsError> {
        let mut values = self.values.clone();
        for &c in clocks {
            if c == ClockId::GLOBAL {
                return Err(SemanticsError::GlobalClockReset);
            }
            values[c.0] = Rational::zero();
        }
        Ok(ClockValuation { values })
    }

    /// `[x0=3 x=0 y=3]`
    pub fn display<'a>(&'a self, pta: &'a Pta) -> impl fmt::Display + 'a {
        DisplayValuation { v: self, pta }
    }
}

struct DisplayValuation<'a> {
    v: &'a ClockValuation,
    pta: &'a Pta,
}

impl fmt::Display for DisplayValuation<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (name, value)) in self.pta.clocks().iter().zip(&self.v.values).enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}={}", name, value)?;
        }
        f.write_str("]")
    }
}

/// Whether `v` satisfies `g` with parametric bounds evaluated under `gamma`.
pub fn eval_guard(
    v: &ClockValuation,
    g: &Guard,
    gamma: &ParamValuation,
) -> Result<bool, SemanticsError> {
    if let Some(p) = g.params().into_iter().find(|p| p.0 >= gamma.values().len()) {
        return Err(SemanticsError::MissingParam(p.0));
    }
    Ok(g.atoms.iter().all(|atom| {
        let bound = crate::rational::nat(atom.bound.eval(gamma));
        atom.relation.holds(v.get(atom.clock), &bound)
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub location: LocId,
    pub valuation: ClockValuation,
}

impl State {
    pub fn initial(pta: &Pta) -> Self {
        State {
            location: pta.init(),
            valuation: ClockValuation::zero(pta.clock_count()),
        }
    }
}

/// Delays `d` in `s`, then fires every `a`-transition whose guard holds.
/// Successors are returned with the transition that produced them, in
/// declaration order.
pub fn step(
    pta: &Pta,
    gamma: &ParamValuation,
    s: &State,
    d: &Rational,
    a: SymbolId,
) -> Result<Vec<(TransId, State)>, SemanticsError> {
    let delayed = s.valuation.delay(d)?;
    let mut out = Vec::new();
    for e in pta.post(s.location, a) {
        let t = pta.transition(e);
        if eval_guard(&delayed, &t.guard, gamma)? {
            out.push((
                e,
                State {
                    location: t.target,
                    valuation: delayed.reset(&t.resets)?,
                },
            ));
        }
    }
    Ok(out)
}

/// An automaton path `l0, e1, l1, ..., en, ln` starting at the initial
/// location. Stored as its transition sequence; locations are implied.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    transitions: Vec<TransId>,
}

impl Path {
    pub fn empty() -> Self {
        Path {
            transitions: Vec::new(),
        }
    }

    /// Checks that consecutive transitions chain from the initial location.
    pub fn new(pta: &Pta, transitions: Vec<TransId>) -> Result<Self, SemanticsError> {
        let mut at = pta.init();
        for (i, &e) in transitions.iter().enumerate() {
            if e.0 >= pta.transitions().len() {
                return Err(SemanticsError::MalformedPath(format!(
                    "unknown transition #{}",
                    e.0
                )));
            }
            let t = pta.transition(e);
            if t.source != at {
                return Err(SemanticsError::MalformedPath(format!(
                    "transition {} (position {}) leaves {}, not {}",
                    t.id,
                    i + 1,
                    pta.location_name(t.source),
                    pta.location_name(at)
                )));
            }
            at = t.target;
        }
        Ok(Path { transitions })
    }

    /// Parses the interleaved form `l0 e1 l1 ... en ln` (whitespace or comma
    /// separated) and checks it against the automaton.
    pub fn parse(pta: &Pta, text: &str) -> Result<Self, SemanticsError> {
        let items: Vec<&str> = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .collect();
        if items.is_empty() || items.len().is_multiple_of(2) {
            return Err(SemanticsError::MalformedPath(
                "expected l0 e1 l1 ... en ln".into(),
            ));
        }
        if pta.location_by_name(items[0]) != Some(pta.init()) {
            return Err(SemanticsError::MalformedPath(format!(
                "path must start at the initial location {}",
                pta.location_name(pta.init())
            )));
        }
        let mut transitions = Vec::new();
        for pair in items[1..].chunks(2) {
            let e = pta.transition_by_id(pair[0]).ok_or_else(|| {
                SemanticsError::MalformedPath(format!("unknown transition {}", pair[0]))
            })?;
            let l = pta.location_by_name(pair[1]).ok_or_else(|| {
                SemanticsError::MalformedPath(format!("unknown location {}", pair[1]))
            })?;
            if pta.transition(e).target != l {
                return Err(SemanticsError::MalformedPath(format!(
                    "transition {} does not enter {}",
                    pair[0], pair[1]
                )));
            }
            transitions.push(e);
        }
        Path::new(pta, transitions)
    }

    pub fn transitions(&self) -> &[TransId] {
        &self.transitions
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    /// `l0, l1, ..., ln`
    pub fn locations(&self, pta: &Pta) -> Vec<LocId> {
        std::iter::once(pta.init())
            .chain(self.transitions.iter().map(|&e| pta.transition(e).target))
            .collect()
    }

    pub fn last_location(&self, pta: &Pta) -> LocId {
        self.transitions
            .last()
            .map_or(pta.init(), |&e| pta.transition(e).target)
    }

    pub fn extended(&self, e: TransId) -> Path {
        let mut transitions = self.transitions.clone();
        transitions.push(e);
        Path { transitions }
    }

    /// `l0,e1,l1,...` rendering used in strategy files.
    pub fn to_string(&self, pta: &Pta) -> String {
        let mut parts = vec![pta.location_name(pta.init()).to_string()];
        for &e in &self.transitions {
            let t = pta.transition(e);
            parts.push(t.id.clone());
            parts.push(pta.location_name(t.target).to_string());
        }
        parts.join(",")
    }
}

/// Whether firing the transitions of `path` after the given delays is
/// possible from the initial state.
pub fn realize_path(
    pta: &Pta,
    gamma: &ParamValuation,
    path: &Path,
    delays: &[Rational],
) -> Result<bool, SemanticsError> {
    if delays.len() != path.len() {
        return Err(SemanticsError::LengthMismatch {
            transitions: path.len(),
            delays: delays.len(),
        });
    }
    let mut v = ClockValuation::zero(pta.clock_count());
    for (&e, d) in path.transitions().iter().zip(delays) {
        let t = pta.transition(e);
        let delayed = v.delay(d)?;
        if !eval_guard(&delayed, &t.guard, gamma)? {
            return Ok(false);
        }
        v = delayed.reset(&t.resets)?;
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunStep {
    pub delay: Rational,
    pub transition: TransId,
}

/// A finite run from the initial state, kept as its (delay, transition)
/// steps. States are recomputed on demand.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Run {
    pub steps: Vec<RunStep>,
}

impl Run {
    pub fn path(&self, pta: &Pta) -> Result<Path, SemanticsError> {
        Path::new(pta, self.steps.iter().map(|s| s.transition).collect())
    }

    /// Replays the run, checking each guard. Returns `s0, s1, ..., sn`.
    pub fn states(&self, pta: &Pta, gamma: &ParamValuation) -> Result<Vec<State>, SemanticsError> {
        self.path(pta)?;
        let mut states = vec![State::initial(pta)];
        for (i, step) in self.steps.iter().enumerate() {
            let cur = states.last().unwrap();
            let t = pta.transition(step.transition);
            let delayed = cur.valuation.delay(&step.delay)?;
            if !eval_guard(&delayed, &t.guard, gamma)? {
                return Err(SemanticsError::NotEnabled {
                    index: i + 1,
                    transition: t.id.clone(),
                });
            }
            states.push(State {
                location: t.target,
                valuation: delayed.reset(&t.resets)?,
            });
        }
        Ok(states)
    }

    pub fn total_delay(&self) -> Rational {
        self.steps.iter().map(|s| &s.delay).sum()
    }

    /// One line per step: `delay=<q> fire=<id> -> <loc> [x0=<q> ...]`.
    pub fn format_trace(
        &self,
        pta: &Pta,
        gamma: &ParamValuation,
    ) -> Result<String, SemanticsError> {
        let states = self.states(pta, gamma)?;
        let mut out = String::new();
        for (step, state) in self.steps.iter().zip(&states[1..]) {
            out.push_str(&format!(
                "delay={} fire={} -> {} {}\n",
                step.delay,
                pta.transition(step.transition).id,
                pta.location_name(state.location),
                state.valuation.display(pta)
            ));
        }
        Ok(out)
    }
}

/// Whether the run enters a target location within the deadline without
/// visiting an avoid location first. Only locations and delays matter; guards
/// are not re-checked.
pub fn check_satisfaction(pta: &Pta, run: &Run, spec: &Spec) -> bool {
    let deadline = crate::rational::nat(spec.deadline);
    let mut elapsed = Rational::zero();
    let mut location = pta.init();
    let mut steps = run.steps.iter();
    loop {
        if spec.is_avoid(location) {
            return false;
        }
        if spec.is_target(location) {
            return elapsed <= deadline;
        }
        match steps.next() {
            Some(step) => {
                elapsed += &step.delay;
                location = pta.transition(step.transition).target;
            }
            None => return false,
        }
    }
}
