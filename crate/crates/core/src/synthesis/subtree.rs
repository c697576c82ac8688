use std::collections::BTreeSet;

use crate::model::{LocId, Pta, Spec, SymbolId, TransId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubTreeNode {
    /// Id of the node in the exploration tree it was taken from.
    pub id: usize,
    pub label: LocId,
    pub parent: Option<usize>,
    pub incoming: Option<TransId>,
    /// The input assigned at an internal node; `None` at leaves.
    pub chosen: Option<SymbolId>,
    /// Local indices of the children, ordered by incoming transition.
    pub children: Vec<usize>,
}

/// A candidate solution: a connected sub-tree of the exploration tree that
/// picks one input per internal node and keeps all successors under it.
///
/// Nodes are stored in pre-order; index 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProperSubTree {
    nodes: Vec<SubTreeNode>,
}

impl ProperSubTree {
    pub fn from_nodes(nodes: Vec<SubTreeNode>) -> Self {
        ProperSubTree { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &SubTreeNode {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[SubTreeNode] {
        &self.nodes
    }

    pub fn internal_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| !self.nodes[i].children.is_empty())
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].children.is_empty())
    }

    /// Local indices from the root to `i`, inclusive.
    pub fn chain_to(&self, i: usize) -> Vec<usize> {
        let mut chain = vec![i];
        let mut cur = i;
        while let Some(p) = self.nodes[cur].parent {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        chain
    }

    /// Transition sequence of the automaton path induced by the tree path
    /// from the root to `i`.
    pub fn path_to(&self, i: usize) -> Vec<TransId> {
        self.chain_to(i)[1..]
            .iter()
            .map(|&n| {
                self.nodes[n]
                    .incoming
                    .expect("non-root node has an incoming transition")
            })
            .collect()
    }

    /// Checks the proper sub-tree conditions, naming the first violated one.
    pub fn check(&self, pta: &Pta, spec: &Spec) -> Result<(), String> {
        let root = self.nodes.first().ok_or("empty tree")?;
        if root.label != pta.init() || root.parent.is_some() || root.incoming.is_some() {
            return Err("root must be the initial location without parent".into());
        }
        let mut ids = BTreeSet::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if !ids.insert(n.id) {
                return Err(format!("duplicate node id n{}", n.id));
            }
            let name = pta.location_name(n.label);
            if spec.is_avoid(n.label) {
                return Err(format!(
                    "node n{} is labelled by avoid location {}",
                    n.id, name
                ));
            }
            if spec.is_target(n.label) {
                if !n.children.is_empty() || n.chosen.is_some() {
                    return Err(format!("target node n{} ({}) has successors", n.id, name));
                }
            } else {
                let a = n.chosen.ok_or_else(|| {
                    format!("non-target node n{} ({}) has no input assigned", n.id, name)
                })?;
                let expected = pta.post(n.label, a);
                if expected.is_empty() {
                    return Err(format!(
                        "input {} is not enabled at n{} ({})",
                        pta.symbol_name(a),
                        n.id,
                        name
                    ));
                }
                let mut got = Vec::new();
                for &c in &n.children {
                    let child = self.nodes.get(c).ok_or("child index out of range")?;
                    if child.parent != Some(i) {
                        return Err(format!(
                            "child n{} does not point back to n{}",
                            child.id, n.id
                        ));
                    }
                    let e = child.incoming.ok_or("child without incoming transition")?;
                    if pta.transition(e).target != child.label {
                        return Err(format!("n{} label disagrees with its transition", child.id));
                    }
                    got.push(e);
                }
                got.sort();
                if got != expected {
                    return Err(format!(
                        "n{} ({}) must have exactly one child per {}-transition",
                        n.id,
                        name,
                        pta.symbol_name(a)
                    ));
                }
            }
            if let Some(p) = n.parent {
                if !self.nodes.get(p).is_some_and(|pn| pn.children.contains(&i)) {
                    return Err(format!("n{} is not connected to its parent", n.id));
                }
            } else if i != 0 {
                return Err(format!("n{} has no parent", n.id));
            }
        }
        Ok(())
    }
}
