//! Constraint systems for paths and proper sub-trees.
//!
//! A clock's value when transition `i` of a path fires is the sum of the
//! delays since its last reset, `d_k + ... + d_{i-1}`. Each guard atom
//! `x ~ Σ kⱼ·pⱼ + b` becomes `d_k + ... + d_{i-1} - Σ kⱼ·γ_pⱼ ~ b`, with one
//! integer variable `g@<param>` per parameter. Delay variables are `d@<i>` for
//! path positions and `d@<node id>` for internal tree nodes.

use thiserror::Error;

use crate::lp::{FeasibilitySystem, LinConstraint, VarKind};
use crate::model::{ClockId, GuardAtom, ParamId, Pta, Relation, Spec, TransId};
use crate::rational::{int, nat};
use crate::semantics::Path;
use crate::synthesis::ProperSubTree;
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error("transition index {index} out of range 1..={len}")]
    OutOfRange { index: usize, len: usize },
    #[error("not a proper sub-tree: {0}")]
    InvalidSubTree(String),
}

pub fn param_var(pta: &Pta, p: ParamId) -> String {
    format!("g@{}", pta.param(p).name)
}

pub fn path_delay_var(i: usize) -> String {
    format!("d@{}", i)
}

pub fn node_delay_var(node_id: usize) -> String {
    format!("d@n{}", node_id)
}

/// Largest position `m < i` whose transition resets `x`, or 0.
pub fn last_reset_index(
    pta: &Pta,
    path: &Path,
    i: usize,
    x: ClockId,
) -> Result<usize, EncodingError> {
    if i == 0 || i > path.len() {
        return Err(EncodingError::OutOfRange {
            index: i,
            len: path.len(),
        });
    }
    Ok(last_reset(pta, &path.transitions()[..i - 1], x))
}

/// Last reset of `x` among the given (1-indexed) transitions.
fn last_reset(pta: &Pta, prefix: &[TransId], x: ClockId) -> usize {
    prefix
        .iter()
        .rposition(|&e| pta.transition(e).resets.contains(&x))
        .map_or(0, |m| m + 1)
}

fn add_param_vars(pta: &Pta, system: &mut FeasibilitySystem) -> Vec<usize> {
    pta.params()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            system
                .add_var(
                    param_var(pta, ParamId(i)),
                    VarKind::Integer {
                        lo: p.lo as i64,
                        hi: p.hi as i64,
                    },
                )
                .expect("parameter names are unique")
        })
        .collect()
}

/// `Σ delays - Σ k·γ  ~  b`
fn atom_constraint(
    atom: &GuardAtom,
    delays: &[usize],
    params: &[usize],
    provenance: String,
) -> LinConstraint {
    let terms = delays.iter().map(|&v| (v, int(1))).chain(
        atom.bound
            .terms()
            .iter()
            .map(|&(k, p)| (params[p.0], -nat(k))),
    );
    LinConstraint::new(
        terms,
        atom.relation,
        nat(atom.bound.constant_part()),
        provenance,
    )
}

fn deadline_constraint(delays: &[usize], spec: &Spec, provenance: String) -> LinConstraint {
    LinConstraint::new(
        delays.iter().map(|&v| (v, int(1))),
        Relation::Le,
        nat(spec.deadline),
        provenance,
    )
}

/// Incremental path encoder: transitions are pushed and popped in stack
/// order, as during a depth-first traversal. The guard constraints of a
/// prefix are shared by all its extensions.
#[derive(Clone, Debug)]
pub struct PathEncoder<'a> {
    pta: &'a Pta,
    spec: &'a Spec,
    system: FeasibilitySystem,
    params: Vec<usize>,
    delays: Vec<usize>,
    transitions: Vec<TransId>,
    constraint_marks: Vec<usize>,
}

impl<'a> PathEncoder<'a> {
    pub fn new(pta: &'a Pta, spec: &'a Spec) -> Self {
        let mut system = FeasibilitySystem::new();
        let params = add_param_vars(pta, &mut system);
        PathEncoder {
            pta,
            spec,
            system,
            params,
            delays: Vec::new(),
            transitions: Vec::new(),
            constraint_marks: Vec::new(),
        }
    }

    /// Appends transition `e` (it must leave the current last location).
    pub fn push(&mut self, e: TransId) {
        let i = self.transitions.len() + 1;
        self.constraint_marks.push(self.system.constraints().len());
        let d = self
            .system
            .add_var(path_delay_var(i - 1), VarKind::Continuous)
            .expect("delay names are unique");
        self.delays.push(d);
        let t = self.pta.transition(e);
        for atom in &t.guard.atoms {
            let k = last_reset(self.pta, &self.transitions, atom.clock);
            let provenance = format!("{} (step {}): {}", t.id, i, self.pta.atom_to_string(atom));
            let c = atom_constraint(atom, &self.delays[k..], &self.params, provenance);
            self.system
                .add_constraint(c)
                .expect("variables are declared");
        }
        self.transitions.push(e);
    }

    pub fn pop(&mut self) {
        if self.transitions.pop().is_some() {
            let mark = self.constraint_marks.pop().unwrap();
            self.system.truncate_constraints(mark);
            self.delays.pop();
            let len = self.system.variables().len() - 1;
            self.system.truncate_variables(len);
        }
    }

    pub fn depth(&self) -> usize {
        self.transitions.len()
    }

    /// The guard constraints so far plus the deadline over all delays.
    pub fn system(&self) -> FeasibilitySystem {
        let mut system = self.system.clone();
        system
            .add_constraint(deadline_constraint(
                &self.delays,
                self.spec,
                "deadline".to_string(),
            ))
            .expect("variables are declared");
        system
    }
}

/// Feasibility system of a path: realizable within the deadline under some
/// in-domain parameter valuation iff the system is feasible.
pub fn encode_path(pta: &Pta, path: &Path, spec: &Spec) -> FeasibilitySystem {
    let mut enc = PathEncoder::new(pta, spec);
    for &e in path.transitions() {
        enc.push(e);
    }
    enc.system()
}

/// Feasibility system of a proper sub-tree: one delay variable per internal
/// node, shared by all branches through it, one constraint per guard atom of
/// the input chosen at each internal node, and a deadline per leaf.
pub fn encode_tree(
    pta: &Pta,
    subtree: &ProperSubTree,
    spec: &Spec,
) -> Result<FeasibilitySystem, EncodingError> {
    subtree
        .check(pta, spec)
        .map_err(EncodingError::InvalidSubTree)?;
    let mut system = FeasibilitySystem::new();
    let params = add_param_vars(pta, &mut system);
    let mut delay_of = vec![usize::MAX; subtree.len()];
    for m in subtree.internal_nodes() {
        delay_of[m] = system
            .add_var(node_delay_var(subtree.node(m).id), VarKind::Continuous)
            .expect("node ids are unique");
    }
    for m in subtree.internal_nodes() {
        let node = subtree.node(m);
        let chain = subtree.chain_to(m);
        let path: Vec<TransId> = chain[1..]
            .iter()
            .map(|&n| subtree.node(n).incoming.unwrap())
            .collect();
        // Conjunction of the guards of all chosen-input transitions; under the
        // same-guard assumption this is just their common guard.
        let mut atoms: Vec<&GuardAtom> = Vec::new();
        for &c in &node.children {
            let t = pta.transition(subtree.node(c).incoming.unwrap());
            for atom in &t.guard.atoms {
                if !atoms.contains(&atom) {
                    atoms.push(atom);
                }
            }
        }
        let input = node.chosen.expect("internal node has an input");
        for atom in atoms {
            let k = last_reset(pta, &path, atom.clock);
            let delays: Vec<usize> = chain[k..].iter().map(|&n| delay_of[n]).collect();
            let provenance = format!(
                "n{} input {}: {}",
                node.id,
                pta.symbol_name(input),
                pta.atom_to_string(atom)
            );
            system
                .add_constraint(atom_constraint(atom, &delays, &params, provenance))
                .expect("variables are declared");
        }
    }
    for leaf in subtree.leaves() {
        let chain = subtree.chain_to(leaf);
        if chain.len() < 2 {
            continue;
        }
        let delays: Vec<usize> = chain[..chain.len() - 1]
            .iter()
            .map(|&n| delay_of[n])
            .collect();
        let provenance = format!("deadline at leaf n{}", subtree.node(leaf).id);
        system
            .add_constraint(deadline_constraint(&delays, spec, provenance))
            .expect("variables are declared");
    }
    Ok(system)
}

/// Extracts the delay values `d@0..d@{n-1}` of a path witness.
pub fn path_delays(system: &FeasibilitySystem, values: &[Rational], n: usize) -> Vec<Rational> {
    (0..n)
        .map(|i| {
            let v = system
                .var_index(&path_delay_var(i))
                .expect("path delay variable");
            values[v].clone()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::feasible;
    use crate::model::parse_model;

    fn fig1() -> (Pta, Spec) {
        parse_model(include_str!("../examples/fig1.pta")).unwrap()
    }

    #[test]
    fn last_reset_examples() {
        let (pta, _) = fig1();
        let x = pta.clock_by_name("x").unwrap();
        let y = pta.clock_by_name("y").unwrap();
        let pi1 = Path::parse(&pta, "l0 e12 lb' e13 lb e14 lc' e6 lc").unwrap();
        assert_eq!(last_reset_index(&pta, &pi1, 3, x), Ok(2));
        for i in 1..=4 {
            assert_eq!(last_reset_index(&pta, &pi1, i, ClockId::GLOBAL), Ok(0));
        }
        let pi2 = pi1.extended(pta.transition_by_id("e10").unwrap());
        assert_eq!(last_reset_index(&pta, &pi2, 5, y), Ok(2));
        assert_eq!(last_reset_index(&pta, &pi2, 5, x), Ok(4));
        assert!(last_reset_index(&pta, &pi2, 0, x).is_err());
        assert!(last_reset_index(&pta, &pi2, 6, x).is_err());
    }

    #[test]
    fn pi1_system_matches_hand_encoding() {
        let (pta, spec) = fig1();
        let pi1 = Path::parse(&pta, "l0 e12 lb' e13 lb e14 lc' e6 lc").unwrap();
        let s = encode_path(&pta, &pi1, &spec);
        let lines: Vec<String> = s
            .dump()
            .lines()
            .map(|l| l.split("   #").next().unwrap().to_string())
            .collect();
        assert_eq!(
            lines,
            vec![
                "-1*g@p1 + 1*d@1 >= 0",
                "-5*g@p1 + 1*d@2 >= 0",
                "-1*g@p1 + 1*d@3 >= 0",
                "1*d@0 + 1*d@1 + 1*d@2 + 1*d@3 <= 15",
            ]
        );
        assert!(feasible(&s).is_some());
    }

    #[test]
    fn trivial_path_has_only_deadline() {
        let (pta, spec) = fig1();
        let s = encode_path(&pta, &Path::empty(), &spec);
        assert_eq!(s.constraints().len(), 1);
        assert!(s.constraints()[0].terms.is_empty());
        assert!(feasible(&s).is_some());
    }

    #[test]
    fn encoder_push_pop_matches_fresh_encoding() {
        let (pta, spec) = fig1();
        let pi2 = Path::parse(&pta, "l0 e12 lb' e13 lb e14 lc' e6 lc e10 lt").unwrap();
        let mut enc = PathEncoder::new(&pta, &spec);
        enc.push(pta.transition_by_id("e1").unwrap());
        enc.pop();
        for &e in pi2.transitions() {
            enc.push(e);
            enc.push(pta.transition_by_id("e4").unwrap());
            enc.pop();
        }
        assert_eq!(enc.system(), encode_path(&pta, &pi2, &spec));
        assert_eq!(enc.depth(), 5);
    }
}
