//! Independent oracles and generators shared by the integration suites.
//!
//! The oracles do not use the crate's solver or encoder: feasibility is
//! decided by Fourier–Motzkin elimination, integer variables by plain
//! enumeration, and tree constraints are rebuilt from the automaton.

#![allow(dead_code)]

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use pta_synth::encoding::{encode_path, encode_tree, path_delays};
use pta_synth::lp::{feasible, lp_feasible, FeasibilitySystem, LinConstraint, Solver, VarKind};
use pta_synth::model::{
    normalize_guards, parse_model, LocId, ParamValuation, Pta, Relation, Spec, SymbolId, TransId,
};
use pta_synth::rational::{int, nat};
use pta_synth::semantics::{realize_path, Path};
use pta_synth::synthesis::{
    forward_analysis, get_solution_tree, synthesize, Outcome, Strategy as PtaStrategy,
    SynthesisConfig,
};
use pta_synth::validate::validate;
use pta_synth::Rational;

pub const FIG1: &str = include_str!("../../examples/fig1.pta");
pub const FIG1_D10: &str = include_str!("../../examples/fig1_d10.pta");

pub fn fig1() -> (Pta, Spec) {
    parse_model(FIG1).unwrap()
}

/// `coeffs · x  <  rhs` when strict, `<=` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Ineq {
    pub coeffs: Vec<Rational>,
    pub strict: bool,
    pub rhs: Rational,
}

impl Ineq {
    /// `coeffs · x  rel  rhs`, rewritten into upper-bound form.
    pub fn from_relation(coeffs: Vec<Rational>, rel: Relation, rhs: Rational) -> Self {
        match rel {
            Relation::Le | Relation::Lt => Ineq {
                coeffs,
                strict: rel == Relation::Lt,
                rhs,
            },
            Relation::Ge | Relation::Gt => Ineq {
                coeffs: coeffs.into_iter().map(|c| -c).collect(),
                strict: rel == Relation::Gt,
                rhs: -rhs,
            },
        }
    }

    fn normalized(mut self) -> Self {
        // scale so the first nonzero coefficient has magnitude 1
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).cloned() {
            let s = lead.abs();
            for c in self.coeffs.iter_mut() {
                *c /= &s;
            }
            self.rhs /= &s;
        }
        self
    }
}

/// Decides `{x >= 0 : every inequality holds}` by Fourier–Motzkin elimination.
pub fn fm_feasible(n: usize, ineqs: &[Ineq]) -> bool {
    let mut set: BTreeSet<Ineq> = ineqs.iter().cloned().map(Ineq::normalized).collect();
    for j in 0..n {
        let mut coeffs = vec![Rational::zero(); n];
        coeffs[j] = int(-1);
        set.insert(Ineq {
            coeffs,
            strict: false,
            rhs: Rational::zero(),
        });
    }
    let mut remaining: Vec<usize> = (0..n).collect();
    while !remaining.is_empty() {
        // eliminate the variable producing the fewest combinations
        let (pos_of, &j) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &j)| {
                let p = set.iter().filter(|q| q.coeffs[j].is_positive()).count();
                let m = set.iter().filter(|q| q.coeffs[j].is_negative()).count();
                p * m
            })
            .unwrap();
        remaining.remove(pos_of);
        let (pos, rest): (Vec<Ineq>, Vec<Ineq>) =
            set.into_iter().partition(|q| q.coeffs[j].is_positive());
        let (neg, zero): (Vec<Ineq>, Vec<Ineq>) =
            rest.into_iter().partition(|q| q.coeffs[j].is_negative());
        let mut next: BTreeSet<Ineq> = zero.into_iter().collect();
        for p in &pos {
            for q in &neg {
                let a = p.coeffs[j].clone();
                let b = -q.coeffs[j].clone();
                let coeffs: Vec<Rational> = p
                    .coeffs
                    .iter()
                    .zip(&q.coeffs)
                    .map(|(x, y)| x * &b + y * &a)
                    .collect();
                let comb = Ineq {
                    coeffs,
                    strict: p.strict || q.strict,
                    rhs: &p.rhs * &b + &q.rhs * &a,
                }
                .normalized();
                if comb.coeffs.iter().all(|c| c.is_zero()) {
                    let ok = if comb.strict {
                        comb.rhs.is_positive()
                    } else {
                        !comb.rhs.is_negative()
                    };
                    if !ok {
                        return false;
                    }
                } else {
                    next.insert(comb);
                }
            }
        }
        set = next;
    }
    set.iter().all(|q| {
        if q.strict {
            q.rhs.is_positive()
        } else {
            !q.rhs.is_negative()
        }
    })
}

/// Feasibility of a [`FeasibilitySystem`] by integer enumeration and
/// Fourier–Motzkin over the continuous residue.
pub fn oracle_feasible(sys: &FeasibilitySystem) -> bool {
    let vars = sys.variables();
    let ints: Vec<(usize, i64, i64)> = vars
        .iter()
        .enumerate()
        .filter_map(|(i, v)| match v.kind {
            VarKind::Integer { lo, hi } => Some((i, lo, hi)),
            VarKind::Continuous => None,
        })
        .collect();
    if ints.iter().any(|&(_, lo, hi)| lo > hi) {
        return false;
    }
    let conts: Vec<usize> = (0..vars.len())
        .filter(|i| !ints.iter().any(|&(k, _, _)| k == *i))
        .collect();
    let mut assignment: Vec<i64> = ints.iter().map(|&(_, lo, _)| lo).collect();
    loop {
        let ineqs: Vec<Ineq> = sys
            .constraints()
            .iter()
            .map(|c| {
                let mut coeffs = vec![Rational::zero(); conts.len()];
                let mut rhs = c.constant.clone();
                for (&v, a) in &c.terms {
                    if let Some(k) = ints.iter().position(|&(i, _, _)| i == v) {
                        rhs -= a * int(assignment[k]);
                    } else {
                        let pos = conts.iter().position(|&i| i == v).unwrap();
                        coeffs[pos] += a;
                    }
                }
                Ineq::from_relation(coeffs, c.relation, rhs)
            })
            .collect();
        if fm_feasible(conts.len(), &ineqs) {
            return true;
        }
        // odometer
        let mut k = ints.len();
        loop {
            if k == 0 {
                return false;
            }
            k -= 1;
            if assignment[k] < ints[k].2 {
                assignment[k] += 1;
                for (l, a) in assignment.iter_mut().enumerate().skip(k + 1) {
                    *a = ints[l].1;
                }
                break;
            }
        }
    }
}

/// Every parameter valuation in the declared domains.
pub fn all_valuations(pta: &Pta) -> Vec<ParamValuation> {
    let mut out = vec![Vec::new()];
    for p in pta.params() {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u64>| {
                (p.lo..=p.hi).map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out.into_iter().map(ParamValuation::new).collect()
}

/// A proper sub-tree, built without the crate's exploration code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleTree {
    pub loc: LocId,
    pub via: Option<TransId>,
    pub input: Option<SymbolId>,
    pub kids: Vec<OracleTree>,
}

/// All proper sub-trees rooted at `loc` with at most `depth` more steps.
pub fn oracle_subtrees(
    pta: &Pta,
    spec: &Spec,
    loc: LocId,
    via: Option<TransId>,
    depth: usize,
) -> Vec<OracleTree> {
    if spec.is_avoid(loc) {
        return Vec::new();
    }
    if spec.is_target(loc) {
        return vec![OracleTree {
            loc,
            via,
            input: None,
            kids: Vec::new(),
        }];
    }
    if depth == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for a in 0..pta.alphabet().len() {
        let a = SymbolId(a);
        let succ: Vec<TransId> = pta
            .transitions()
            .iter()
            .enumerate()
            .filter(|(_, t)| t.source == loc && t.input == a)
            .map(|(i, _)| TransId(i))
            .collect();
        if succ.is_empty() {
            continue;
        }
        let mut combos: Vec<Vec<OracleTree>> = vec![Vec::new()];
        for &e in &succ {
            let options = oracle_subtrees(pta, spec, pta.transition(e).target, Some(e), depth - 1);
            combos = combos
                .into_iter()
                .flat_map(|prefix| {
                    options.iter().map(move |o| {
                        let mut next = prefix.clone();
                        next.push(o.clone());
                        next
                    })
                })
                .collect();
        }
        for kids in combos {
            out.push(OracleTree {
                loc,
                via,
                input: Some(a),
                kids,
            });
        }
    }
    out
}

impl OracleTree {
    pub fn internal_count(&self) -> usize {
        if self.kids.is_empty() {
            0
        } else {
            1 + self.kids.iter().map(|k| k.internal_count()).sum::<usize>()
        }
    }

    pub fn leaf_count(&self) -> usize {
        if self.kids.is_empty() {
            1
        } else {
            self.kids.iter().map(|k| k.leaf_count()).sum()
        }
    }
}

/// Decides whether one delay per internal node makes every guard of the
/// tree hold under `gamma` and every leaf is reached by the deadline.
pub fn oracle_tree_feasible(
    pta: &Pta,
    spec: &Spec,
    tree: &OracleTree,
    gamma: &ParamValuation,
) -> bool {
    let n = tree.internal_count();
    let mut ineqs = Vec::new();
    let mut next_var = 0;
    // chain: delay variables from the root; resets: per clock, chain length at last reset
    let resets = vec![0usize; pta.clock_count()];
    collect(
        pta,
        spec,
        tree,
        gamma,
        n,
        &mut Vec::new(),
        resets,
        &mut next_var,
        &mut ineqs,
    );
    fm_feasible(n, &ineqs)
}

#[allow(clippy::too_many_arguments)]
fn collect(
    pta: &Pta,
    spec: &Spec,
    node: &OracleTree,
    gamma: &ParamValuation,
    n: usize,
    chain: &mut Vec<usize>,
    resets: Vec<usize>,
    next_var: &mut usize,
    out: &mut Vec<Ineq>,
) {
    if node.kids.is_empty() {
        if !chain.is_empty() {
            let mut coeffs = vec![Rational::zero(); n];
            for &v in chain.iter() {
                coeffs[v] = Rational::one();
            }
            out.push(Ineq::from_relation(
                coeffs,
                Relation::Le,
                nat(spec.deadline),
            ));
        }
        return;
    }
    let me = *next_var;
    *next_var += 1;
    chain.push(me);
    for kid in &node.kids {
        let t = pta.transition(kid.via.unwrap());
        for atom in &t.guard.atoms {
            let mut coeffs = vec![Rational::zero(); n];
            for &v in &chain[resets[atom.clock.0]..] {
                coeffs[v] = Rational::one();
            }
            out.push(Ineq::from_relation(
                coeffs,
                atom.relation,
                nat(atom.bound.eval(gamma)),
            ));
        }
    }
    for kid in &node.kids {
        let t = pta.transition(kid.via.unwrap());
        let mut r = resets.clone();
        for c in &t.resets {
            r[c.0] = chain.len();
        }
        collect(pta, spec, kid, gamma, n, chain, r, next_var, out);
    }
    chain.pop();
}

/// Whether some valuation makes some proper sub-tree feasible.
pub fn oracle_has_solution(pta: &Pta, spec: &Spec, depth: usize) -> bool {
    let trees = oracle_subtrees(pta, spec, pta.init(), None, depth);
    all_valuations(pta)
        .iter()
        .any(|g| trees.iter().any(|t| oracle_tree_feasible(pta, spec, t, g)))
}

// ---------------------------------------------------------------------------
// generators

/// Random model text: up to 6 locations, 1-2 clocks, up to 2 parameters with
/// domains inside 0..=3, small guards.
pub fn arb_model() -> impl Strategy<Value = String> {
    arb_model_shaped(false)
}

/// Like [`arb_model`], but every transition moves to a later location, so
/// models are acyclic and tend to have deeper solutions.
pub fn arb_layered_model() -> impl Strategy<Value = String> {
    arb_model_shaped(true)
}

fn arb_model_shaped(layered: bool) -> impl Strategy<Value = String> {
    (2usize..=6, 1usize..=2, 0usize..=2, 1u64..=8).prop_flat_map(move |(nl, nc, np, deadline)| {
        let param_doms = prop::collection::vec((0u64..=3, 0u64..=3), np);
        let atom = (
            0..nc,
            0usize..4,
            prop::collection::vec(0u64..=2, np),
            0u64..=4,
        );
        let trans = (
            0..nl,
            0usize..2,
            prop::collection::vec(any::<bool>(), nc),
            prop::collection::vec(atom, 0..=2),
            0..nl,
        );
        (
            Just((nl, nc, np, deadline)),
            param_doms,
            prop::collection::vec(trans, 2..=10),
            prop::sample::subsequence((1..nl).collect::<Vec<_>>(), 1..nl.min(3)),
            0usize..3,
        )
            .prop_map(
                move |((nl, nc, np, deadline), doms, mut trans, targets, n_avoid)| {
                    if layered {
                        for t in trans.iter_mut() {
                            t.0 %= nl - 1;
                            t.4 = (t.0 + 1 + t.4 % 2).min(nl - 1);
                        }
                    }
                    render_model(nl, nc, np, deadline, &doms, &trans, &targets, n_avoid)
                },
            )
    })
}

type GenAtom = (usize, usize, Vec<u64>, u64);
type GenTrans = (usize, usize, Vec<bool>, Vec<GenAtom>, usize);

#[allow(clippy::too_many_arguments)]
fn render_model(
    nl: usize,
    nc: usize,
    np: usize,
    deadline: u64,
    doms: &[(u64, u64)],
    trans: &[GenTrans],
    marked: &[usize],
    n_avoid: usize,
) -> String {
    let n_avoid = n_avoid.min(marked.len().saturating_sub(1));
    let avoid: Vec<usize> = marked[..n_avoid].to_vec();
    let target: Vec<usize> = marked[n_avoid..].to_vec();
    let mut s = String::new();
    for l in 0..nl {
        s.push_str(&format!("location l{}", l));
        if l == 0 {
            s.push_str(" init");
        }
        if target.contains(&l) {
            s.push_str(" target");
        }
        if avoid.contains(&l) {
            s.push_str(" avoid");
        }
        s.push('\n');
    }
    for c in 0..nc {
        s.push_str(&format!("clock c{}\n", c));
    }
    for (p, &(a, b)) in doms.iter().enumerate().take(np) {
        s.push_str(&format!("param p{} {} {}\n", p, a.min(b), a.max(b)));
    }
    s.push_str(&format!("deadline {}\n", deadline));
    for (src, input, resets, atoms, dst) in trans {
        let resets: Vec<String> = resets
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(c, _)| format!("c{}", c))
            .collect();
        let guard = if atoms.is_empty() {
            "true".to_string()
        } else {
            atoms
                .iter()
                .map(|(c, op, ks, b)| {
                    let op = ["<", "<=", ">", ">="][*op];
                    let mut terms: Vec<String> = ks
                        .iter()
                        .enumerate()
                        .filter(|(_, &k)| k > 0)
                        .map(|(p, k)| format!("{}*p{}", k, p))
                        .collect();
                    if *b > 0 || terms.is_empty() {
                        terms.push(b.to_string());
                    }
                    format!("c{} {} {}", c, op, terms.join(" + "))
                })
                .collect::<Vec<_>>()
                .join(" & ")
        };
        s.push_str(&format!(
            "trans l{} {} {{{}}} {} l{}\n",
            src,
            ["a", "b"][*input],
            resets.join(","),
            guard,
            dst
        ));
    }
    s
}

/// Random continuous system: `(coeffs, relation, rhs)` rows over `n` vars.
pub fn arb_lp() -> impl Strategy<Value = (usize, Vec<(Vec<i64>, Relation, i64)>)> {
    (1usize..=4).prop_flat_map(|n| {
        let rel =
            prop::sample::select(vec![Relation::Lt, Relation::Le, Relation::Gt, Relation::Ge]);
        let row = (prop::collection::vec(-3i64..=3, n), rel, -6i64..=6);
        (Just(n), prop::collection::vec(row, 1..=5))
    })
}

// ---------------------------------------------------------------------------
// property checks, shared by the property suite and the acceptance gate

pub fn lp_system(n: usize, rows: &[(Vec<i64>, Relation, i64)]) -> FeasibilitySystem {
    let mut sys = FeasibilitySystem::new();
    for i in 0..n {
        sys.add_var(format!("x{}", i), VarKind::Continuous).unwrap();
    }
    for (k, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        let terms = coeffs.iter().enumerate().map(|(i, &c)| (i, int(c)));
        sys.add_constraint(LinConstraint::new(
            terms,
            *rel,
            int(*rhs),
            format!("r{}", k),
        ))
        .unwrap();
    }
    sys
}

/// (a) the simplex agrees with Fourier–Motzkin, and its witnesses check out.
pub fn check_lp_agrees(n: usize, rows: &[(Vec<i64>, Relation, i64)]) -> Result<(), TestCaseError> {
    let sys = lp_system(n, rows);
    let got = lp_feasible(&sys).unwrap();
    prop_assert_eq!(
        got.is_some(),
        oracle_feasible(&sys),
        "system:\n{}",
        sys.dump()
    );
    if let Some(w) = got {
        prop_assert!(sys.is_satisfied_by(w.values()));
    }
    Ok(())
}

/// (a') mixed systems: grid enumeration agrees with the oracle.
pub fn check_mixed_agrees(
    n: usize,
    rows: &[(Vec<i64>, Relation, i64)],
    dom: (i64, i64),
) -> Result<(), TestCaseError> {
    let mut sys = FeasibilitySystem::new();
    sys.add_var(
        "k",
        VarKind::Integer {
            lo: dom.0,
            hi: dom.1,
        },
    )
    .unwrap();
    for i in 1..n {
        sys.add_var(format!("x{}", i), VarKind::Continuous).unwrap();
    }
    for (k, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        let terms = coeffs.iter().enumerate().map(|(i, &c)| (i, int(c)));
        sys.add_constraint(LinConstraint::new(
            terms,
            *rel,
            int(*rhs),
            format!("r{}", k),
        ))
        .unwrap();
    }
    let got = feasible(&sys);
    prop_assert_eq!(
        got.is_some(),
        oracle_feasible(&sys),
        "system:\n{}",
        sys.dump()
    );
    if let Some(w) = got {
        prop_assert!(sys.is_satisfied_by(w.values()));
        prop_assert!(w.values()[0].is_integer());
    }
    Ok(())
}

pub fn random_path(pta: &Pta, choices: &[usize]) -> Path {
    let mut at = pta.init();
    let mut trans = Vec::new();
    for &c in choices {
        let out: Vec<TransId> = (0..pta.transitions().len())
            .map(TransId)
            .filter(|&e| pta.transition(e).source == at)
            .collect();
        if out.is_empty() {
            break;
        }
        let e = out[c % out.len()];
        trans.push(e);
        at = pta.transition(e).target;
    }
    Path::new(pta, trans).unwrap()
}

fn gamma_of(pta: &Pta, sys: &FeasibilitySystem, values: &[Rational]) -> ParamValuation {
    ParamValuation::new(
        pta.params()
            .iter()
            .map(|p| {
                let i = sys.var_index(&format!("g@{}", p.name)).unwrap();
                u64::try_from(values[i].to_integer()).unwrap()
            })
            .collect(),
    )
}

/// (b) path systems are exact: witnesses realize the path in time, and
/// realizing delays satisfy the system.
pub fn check_path_encoding(
    text: &str,
    choices: &[usize],
    gamma_pick: &[u64],
    halves: &[u64],
) -> Result<(), TestCaseError> {
    let (pta, spec) = parse_model(text).unwrap();
    let path = random_path(&pta, choices);
    let sys = encode_path(&pta, &path, &spec);
    if let Some(w) = feasible(&sys) {
        let gamma = gamma_of(&pta, &sys, w.values());
        let delays = path_delays(&sys, w.values(), path.len());
        prop_assert!(realize_path(&pta, &gamma, &path, &delays).unwrap());
        let total: Rational = delays.iter().sum();
        prop_assert!(total <= nat(spec.deadline));
    }
    // reverse direction with sampled values
    let gamma = ParamValuation::new(
        pta.params()
            .iter()
            .enumerate()
            .map(|(i, p)| p.lo + gamma_pick.get(i).copied().unwrap_or(0) % (p.hi - p.lo + 1))
            .collect(),
    );
    let delays: Vec<Rational> = (0..path.len())
        .map(|i| Rational::new(halves.get(i).copied().unwrap_or(0).into(), 2.into()))
        .collect();
    let total: Rational = delays.iter().sum();
    if realize_path(&pta, &gamma, &path, &delays).unwrap() && total <= nat(spec.deadline) {
        let values: Vec<Rational> = sys
            .variables()
            .iter()
            .map(|v| {
                if let Some(p) = v.name.strip_prefix("g@") {
                    nat(gamma.get(pta.param_by_name(p).unwrap()))
                } else {
                    let i: usize = v.name.strip_prefix("d@").unwrap().parse().unwrap();
                    delays[i].clone()
                }
            })
            .collect();
        prop_assert!(sys.is_satisfied_by(&values), "system:\n{}", sys.dump());
        prop_assert!(feasible(&sys).is_some());
    }
    Ok(())
}

/// (c) a candidate with an infeasible root-to-leaf path is infeasible.
pub fn check_tree_implies_paths(text: &str) -> Result<(), TestCaseError> {
    let (pta, spec) = parse_model(text).unwrap();
    let (pta, _) = normalize_guards(&pta);
    let cfg = SynthesisConfig {
        max_depth: 4,
        prune: false,
        ..SynthesisConfig::default()
    };
    let an = forward_analysis(&pta, &spec, &cfg, &Solver::new()).unwrap();
    let ps = an.ps().clone();
    let mut i = num_bigint::BigUint::one();
    let mut checked = 0;
    while i <= ps && checked < 16 {
        let t = get_solution_tree(&an.tree, &i).unwrap();
        t.check(&pta, &spec).map_err(TestCaseError::fail)?;
        let tree_ok = feasible(&encode_tree(&pta, &t, &spec).unwrap()).is_some();
        let paths_ok = t.leaves().all(|leaf| {
            let path = Path::new(&pta, t.path_to(leaf)).unwrap();
            feasible(&encode_path(&pta, &path, &spec)).is_some()
        });
        if !paths_ok {
            prop_assert!(!tree_ok, "tree {} feasible with an infeasible path", i);
        }
        i += 1u32;
        checked += 1;
    }
    Ok(())
}

/// Candidates above this count are skipped: the count can grow doubly
/// exponentially with the depth on cyclic models.
pub const MAX_CANDIDATES: u32 = 2000;

pub fn candidate_count(pta: &Pta, spec: &Spec, depth: usize, prune: bool) -> num_bigint::BigUint {
    let (pta, _) = normalize_guards(pta);
    let cfg = SynthesisConfig {
        max_depth: depth,
        prune,
        ..SynthesisConfig::default()
    };
    forward_analysis(&pta, spec, &cfg, &Solver::new())
        .unwrap()
        .ps()
        .clone()
}

/// (d) every solution survives exhaustive replay, one run per leaf.
pub fn check_solutions_validate(text: &str) -> Result<(), TestCaseError> {
    let (pta, spec) = parse_model(text).unwrap();
    prop_assume!(candidate_count(&pta, &spec, 5, true) <= MAX_CANDIDATES.into());
    let cfg = SynthesisConfig {
        max_depth: 5,
        ..SynthesisConfig::default()
    };
    let report = synthesize(&pta, &spec, &cfg).unwrap();
    if let Outcome::Solution(s) = &report.outcome {
        let r = validate(&pta, &spec, s).unwrap();
        prop_assert!(r.ok, "{}\n{}", s.to_text(&pta), r.render(&pta, s));
        prop_assert_eq!(r.runs_checked, s.tree().leaves().count());
        let again = PtaStrategy::parse(&pta, &s.to_text(&pta)).unwrap();
        prop_assert_eq!(&again, s);
    }
    Ok(())
}

/// (e) pruning never changes whether a solution exists.
pub fn check_pruning_neutral(text: &str, depth: usize) -> Result<(), TestCaseError> {
    let (pta, spec) = parse_model(text).unwrap();
    prop_assume!(candidate_count(&pta, &spec, depth, false) <= MAX_CANDIDATES.into());
    let on = SynthesisConfig {
        max_depth: depth,
        ..SynthesisConfig::default()
    };
    let off = SynthesisConfig {
        prune: false,
        ..on.clone()
    };
    let a = synthesize(&pta, &spec, &on).unwrap().outcome;
    let b = synthesize(&pta, &spec, &off).unwrap().outcome;
    prop_assert_eq!(
        a.solution().is_some(),
        b.solution().is_some(),
        "pruned {:?} vs unpruned {:?}",
        a,
        b
    );
    if b == Outcome::NoSolution {
        prop_assert_eq!(a, Outcome::NoSolution);
    }
    Ok(())
}

/// Synthesis finds a solution iff the brute-force oracle does.
pub fn check_against_oracle(text: &str, depth: usize) -> Result<(), TestCaseError> {
    let (pta, spec) = parse_model(text).unwrap();
    prop_assume!(candidate_count(&pta, &spec, depth, false) <= MAX_CANDIDATES.into());
    let cfg = SynthesisConfig {
        max_depth: depth,
        ..SynthesisConfig::default()
    };
    let got = synthesize(&pta, &spec, &cfg).unwrap().outcome;
    let (npta, _) = normalize_guards(&pta);
    prop_assert_eq!(
        got.solution().is_some(),
        oracle_has_solution(&npta, &spec, depth)
    );
    Ok(())
}
