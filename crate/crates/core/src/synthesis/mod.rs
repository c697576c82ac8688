//! Controller and parameter synthesis.
//!
//! [`forward_analysis`] unfolds the automaton depth-first, dropping inputs
//! whose extended path is already infeasible and inputs with a successor that
//! admits no proper sub-tree, and counts the surviving candidates. Candidates
//! are then enumerated with [`get_solution_tree`] and each one's tree system is
//! solved; the first feasible one becomes the strategy.

mod strategy;
mod subtree;
mod tree;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use thiserror::Error;

use crate::encoding::{encode_tree, EncodingError};
use crate::lp::{Solver, SolverStats, Witness};
use crate::model::{normalize_guards, ModelError, NormalizationReport, Pta, Spec};

pub use strategy::{extract_strategy, Strategy, StrategyError};
pub use subtree::{ProperSubTree, SubTreeNode};
pub use tree::{
    forward_analysis, get_solution_tree, Analysis, AnalysisStats, ExplorationTree, TreeNode,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthesisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("candidate index {index} out of range 1..={ps}")]
    IndexOutOfRange { index: BigUint, ps: BigUint },
    #[error("witness does not match the sub-tree: {0}")]
    WitnessMismatch(String),
    #[error("max depth must be at least 1")]
    ZeroDepth,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisConfig {
    /// Longest tree path explored, in transitions.
    pub max_depth: usize,
    /// Solve every candidate instead of stopping at the first solution.
    pub enumerate_all: bool,
    /// Prune inputs whose extended path is infeasible.
    pub prune: bool,
    /// Worker threads for candidate solving; 0 is sequential.
    pub threads: usize,
    /// Keep the constraint system of every solved candidate.
    pub dump_lp: bool,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig {
            max_depth: 64,
            enumerate_all: false,
            prune: true,
            threads: 0,
            dump_lp: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Solution(Strategy),
    NoSolution,
    /// No candidate worked, but the depth bound cut some branch.
    BoundHit,
}

impl Outcome {
    pub fn solution(&self) -> Option<&Strategy> {
        match self {
            Outcome::Solution(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SynthesisStats {
    pub ps: BigUint,
    pub tree_nodes: usize,
    pub candidates_solved: usize,
    pub analysis: AnalysisStats,
    pub lp: SolverStats,
}

#[derive(Clone, Debug)]
pub struct SynthesisReport {
    pub outcome: Outcome,
    /// Every feasible candidate, in index order, when `enumerate_all` is set.
    pub solutions: Vec<Strategy>,
    pub stats: SynthesisStats,
    /// `(candidate index, system dump)` when `dump_lp` is set.
    pub lp_dumps: Vec<(BigUint, String)>,
    pub normalization: NormalizationReport,
}

struct Solved {
    index: BigUint,
    subtree: ProperSubTree,
    witness: Option<Witness>,
    dump: Option<String>,
}

fn solve_candidate(
    pta: &Pta,
    spec: &Spec,
    tree: &ExplorationTree,
    solver: &Solver,
    index: BigUint,
    dump: bool,
) -> Result<Solved, SynthesisError> {
    let subtree = get_solution_tree(tree, &index)?;
    let system = encode_tree(pta, &subtree, spec)?;
    Ok(Solved {
        index,
        witness: solver.feasible(&system),
        dump: dump.then(|| system.dump()),
        subtree,
    })
}

/// Runs the whole pipeline on a (possibly unnormalized) automaton.
pub fn synthesize(
    pta: &Pta,
    spec: &Spec,
    cfg: &SynthesisConfig,
) -> Result<SynthesisReport, SynthesisError> {
    if cfg.max_depth == 0 {
        return Err(SynthesisError::ZeroDepth);
    }
    let (pta, normalization) = normalize_guards(pta);
    let solver = Solver::new();
    let analysis = forward_analysis(&pta, spec, cfg, &solver)?;
    let ps = analysis.ps().clone();
    log::debug!("forward analysis: ps={} nodes={}", ps, analysis.tree.len());

    let pool = if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .ok()
    } else {
        None
    };
    let batch = cfg.threads.max(1) * 4;

    let mut solutions = Vec::new();
    let mut lp_dumps = Vec::new();
    let mut solved = 0usize;
    let mut next = BigUint::one();
    'outer: while next <= ps {
        let mut indices = Vec::with_capacity(batch);
        while indices.len() < batch && next <= ps {
            indices.push(next.clone());
            next += 1u32;
        }
        let results: Vec<Result<Solved, SynthesisError>> = match &pool {
            Some(pool) => pool.install(|| {
                indices
                    .into_par_iter()
                    .map(|i| solve_candidate(&pta, spec, &analysis.tree, &solver, i, cfg.dump_lp))
                    .collect()
            }),
            None => {
                let mut out = Vec::with_capacity(indices.len());
                for i in indices {
                    let r = solve_candidate(&pta, spec, &analysis.tree, &solver, i, cfg.dump_lp);
                    let found = matches!(&r, Ok(s) if s.witness.is_some());
                    out.push(r);
                    if found && !cfg.enumerate_all {
                        break;
                    }
                }
                out
            }
        };
        for r in results {
            let s = r?;
            solved += 1;
            if let Some(d) = s.dump {
                lp_dumps.push((s.index.clone(), d));
            }
            if let Some(w) = &s.witness {
                log::debug!("candidate {} feasible", s.index);
                let strategy = extract_strategy(&pta, &s.subtree, w)?;
                debug_assert!(
                    crate::validate::validate(&pta, spec, &strategy)
                        .map(|r| r.ok)
                        .unwrap_or(false),
                    "synthesized strategy fails validation"
                );
                solutions.push(strategy);
                if !cfg.enumerate_all {
                    break 'outer;
                }
            }
        }
    }

    let outcome = match solutions.first() {
        Some(s) => Outcome::Solution(s.clone()),
        None if analysis.bound_hit => Outcome::BoundHit,
        None => Outcome::NoSolution,
    };
    if !cfg.enumerate_all {
        solutions.clear();
    }
    Ok(SynthesisReport {
        outcome,
        solutions,
        stats: SynthesisStats {
            tree_nodes: analysis.tree.len(),
            ps,
            candidates_solved: solved,
            analysis: analysis.stats,
            lp: solver.stats(),
        },
        lp_dumps,
        normalization,
    })
}

impl SynthesisStats {
    /// Single-line summary for diagnostics.
    pub fn summary(&self) -> String {
        format!(
            "ps={} candidates_solved={} tree_nodes={} feasibility_checks={} infeasible_inputs={} dead_inputs={} truncated_inputs={} lp_queries={} cache_hits={}",
            self.ps,
            self.candidates_solved,
            self.tree_nodes,
            self.analysis.feasibility_checks,
            self.analysis.infeasible_inputs,
            self.analysis.dead_inputs,
            self.analysis.truncated_inputs,
            self.lp.queries,
            self.lp.cache_hits
        )
    }
}
