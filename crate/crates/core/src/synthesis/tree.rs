use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::subtree::{ProperSubTree, SubTreeNode};
use super::{SynthesisConfig, SynthesisError};
use crate::encoding::PathEncoder;
use crate::lp::Solver;
use crate::model::{LocId, Pta, Spec, SymbolId, TransId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub id: usize,
    pub label: LocId,
    pub parent: Option<usize>,
    pub incoming: Option<TransId>,
    /// Retained inputs and their successors, one per transition.
    pub children: BTreeMap<SymbolId, Vec<usize>>,
    /// Number of proper sub-trees rooted here.
    pub ps: BigUint,
    pub input_counts: BTreeMap<SymbolId, BigUint>,
}

/// Pruned unfolding of the automaton. Nodes are stored in pre-order, with
/// inputs in alphabet order and successors in transition order; the root has
/// id 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplorationTree {
    nodes: Vec<TreeNode>,
}

impl ExplorationTree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn ps(&self) -> &BigUint {
        &self.root().ps
    }

    /// Transition sequence from the root to `id`.
    pub fn path_to(&self, id: usize) -> Vec<TransId> {
        let mut path = Vec::new();
        let mut cur = &self.nodes[id];
        while let (Some(e), Some(p)) = (cur.incoming, cur.parent) {
            path.push(e);
            cur = &self.nodes[p];
        }
        path.reverse();
        path
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnalysisStats {
    pub feasibility_checks: usize,
    /// Inputs removed because the extended path is infeasible.
    pub infeasible_inputs: usize,
    /// Inputs removed because some successor has no proper sub-tree.
    pub dead_inputs: usize,
    /// Inputs cut off by the depth bound.
    pub truncated_inputs: usize,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub tree: ExplorationTree,
    /// Some branch was cut by the depth bound in a way that may hide
    /// candidates.
    pub bound_hit: bool,
    pub stats: AnalysisStats,
}

impl Analysis {
    pub fn ps(&self) -> &BigUint {
        self.tree.ps()
    }
}

struct Built {
    label: LocId,
    incoming: Option<TransId>,
    inputs: Vec<(SymbolId, BigUint, Vec<Built>)>,
    ps: BigUint,
    truncated: bool,
}

impl Built {
    fn leaf(label: LocId, incoming: Option<TransId>, ps: BigUint) -> Self {
        Built {
            label,
            incoming,
            inputs: Vec::new(),
            ps,
            truncated: false,
        }
    }
}

struct Explorer<'a> {
    pta: &'a Pta,
    spec: &'a Spec,
    cfg: &'a SynthesisConfig,
    solver: &'a Solver,
    encoder: PathEncoder<'a>,
    stats: AnalysisStats,
}

impl Explorer<'_> {
    fn expand(
        &mut self,
        label: LocId,
        incoming: Option<TransId>,
        depth: usize,
    ) -> Result<Built, SynthesisError> {
        if self.spec.is_avoid(label) {
            return Ok(Built::leaf(label, incoming, BigUint::zero()));
        }
        if self.spec.is_target(label) {
            return Ok(Built::leaf(label, incoming, BigUint::one()));
        }
        let mut node = Built::leaf(label, incoming, BigUint::zero());
        for a in self.pta.enabled_inputs(label)? {
            let post = self.pta.post(label, a);
            if self.cfg.prune {
                self.stats.feasibility_checks += 1;
                self.encoder.push(post[0]);
                let ok = self.solver.feasible(&self.encoder.system()).is_some();
                self.encoder.pop();
                if !ok {
                    self.stats.infeasible_inputs += 1;
                    continue;
                }
            }
            if depth >= self.cfg.max_depth {
                self.stats.truncated_inputs += 1;
                node.truncated = true;
                continue;
            }
            let mut children = Vec::with_capacity(post.len());
            let mut count = BigUint::one();
            let mut dead_exact = false;
            let mut truncated = false;
            for e in post {
                self.encoder.push(e);
                let child = self.expand(self.pta.transition(e).target, Some(e), depth + 1);
                self.encoder.pop();
                let child = child?;
                truncated |= child.truncated;
                if child.ps.is_zero() && !child.truncated {
                    dead_exact = true;
                    break;
                }
                count *= &child.ps;
                children.push(child);
            }
            if dead_exact || count.is_zero() {
                self.stats.dead_inputs += 1;
                node.truncated |= truncated && !dead_exact;
                continue;
            }
            node.truncated |= truncated;
            node.ps += &count;
            node.inputs.push((a, count, children));
        }
        Ok(node)
    }
}

fn flatten(b: Built, parent: Option<usize>, nodes: &mut Vec<TreeNode>) -> usize {
    let id = nodes.len();
    nodes.push(TreeNode {
        id,
        label: b.label,
        parent,
        incoming: b.incoming,
        children: BTreeMap::new(),
        ps: b.ps,
        input_counts: BTreeMap::new(),
    });
    for (a, count, children) in b.inputs {
        let ids: Vec<usize> = children
            .into_iter()
            .map(|c| flatten(c, Some(id), nodes))
            .collect();
        nodes[id].children.insert(a, ids);
        nodes[id].input_counts.insert(a, count);
    }
    id
}

/// Depth-first construction of the exploration tree with path-feasibility
/// pruning. Expects a normalized automaton.
pub fn forward_analysis(
    pta: &Pta,
    spec: &Spec,
    cfg: &SynthesisConfig,
    solver: &Solver,
) -> Result<Analysis, SynthesisError> {
    let mut explorer = Explorer {
        pta,
        spec,
        cfg,
        solver,
        encoder: PathEncoder::new(pta, spec),
        stats: AnalysisStats::default(),
    };
    let built = explorer.expand(pta.init(), None, 0)?;
    let bound_hit = built.truncated;
    let mut nodes = Vec::new();
    flatten(built, None, &mut nodes);
    Ok(Analysis {
        tree: ExplorationTree { nodes },
        bound_hit,
        stats: explorer.stats,
    })
}

/// The `i`-th proper sub-tree, `1 <= i <= ps`, in mixed-radix order: the
/// index first selects an input (alphabet order), then the residue is split
/// across the successors with the first successor least significant.
pub fn get_solution_tree(
    tree: &ExplorationTree,
    i: &BigUint,
) -> Result<ProperSubTree, SynthesisError> {
    if i.is_zero() || i > tree.ps() {
        return Err(SynthesisError::IndexOutOfRange {
            index: i.clone(),
            ps: tree.ps().clone(),
        });
    }
    let mut out = Vec::new();
    select(tree, 0, i - 1u32, None, &mut out);
    Ok(ProperSubTree::from_nodes(out))
}

fn select(
    tree: &ExplorationTree,
    id: usize,
    mut r: BigUint,
    parent: Option<usize>,
    out: &mut Vec<SubTreeNode>,
) -> usize {
    let node = tree.node(id);
    let local = out.len();
    out.push(SubTreeNode {
        id,
        label: node.label,
        parent,
        incoming: node.incoming,
        chosen: None,
        children: Vec::new(),
    });
    for (&a, count) in &node.input_counts {
        if r >= *count {
            r -= count;
            continue;
        }
        out[local].chosen = Some(a);
        for &c in &node.children[&a] {
            let child_ps = &tree.node(c).ps;
            let digit = &r % child_ps;
            r /= child_ps;
            let child_local = select(tree, c, digit, Some(local), out);
            out[local].children.push(child_local);
        }
        break;
    }
    local
}
