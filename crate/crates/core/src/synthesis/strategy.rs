use std::collections::BTreeMap;
use std::fmt::Write;

use num_traits::Signed;
use thiserror::Error;

use super::subtree::{ProperSubTree, SubTreeNode};
use super::SynthesisError;
use crate::encoding::{node_delay_var, param_var};
use crate::lp::Witness;
use crate::model::{ParamId, ParamValuation, Pta, SymbolId, TransId};
use crate::rational;
use crate::semantics::Path;
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("strategy line {line}: {message}")]
pub struct StrategyError {
    pub line: usize,
    pub message: String,
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, StrategyError> {
    Err(StrategyError {
        line,
        message: message.into(),
    })
}

type ParsedLine = (usize, usize, Option<(Rational, SymbolId)>);

/// A tree-shaped control strategy: a delay and an input for every internal
/// node of a proper sub-tree, plus the parameter valuation it was built for.
/// Paths outside the tree are undefined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    tree: ProperSubTree,
    entries: BTreeMap<usize, (Rational, SymbolId)>,
    valuation: ParamValuation,
}

impl Strategy {
    pub fn tree(&self) -> &ProperSubTree {
        &self.tree
    }

    pub fn valuation(&self) -> &ParamValuation {
        &self.valuation
    }

    /// Entries keyed by local node index.
    pub fn entries(&self) -> &BTreeMap<usize, (Rational, SymbolId)> {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Local index of the node reached by following `path` from the root.
    pub fn find(&self, path: &[TransId]) -> Option<usize> {
        let mut cur = 0;
        for &e in path {
            cur = *self
                .tree
                .node(cur)
                .children
                .iter()
                .find(|&&c| self.tree.node(c).incoming == Some(e))?;
        }
        Some(cur)
    }

    pub fn lookup(&self, path: &[TransId]) -> Option<(&Rational, SymbolId)> {
        let m = self.find(path)?;
        self.entries.get(&m).map(|(d, a)| (d, *a))
    }

    /// Replaces the delay of an internal node.
    pub fn set_delay(&mut self, local: usize, delay: Rational) -> bool {
        match self.entries.get_mut(&local) {
            Some(entry) if !delay.is_negative() => {
                entry.0 = delay;
                true
            }
            _ => false,
        }
    }

    pub fn set_input(&mut self, local: usize, input: SymbolId) -> bool {
        match self.entries.get_mut(&local) {
            Some(entry) => {
                entry.1 = input;
                true
            }
            None => false,
        }
    }

    /// Text form: a `gamma` header, then `node` lines for internal nodes and
    /// `leaf` lines for leaves, in pre-order.
    pub fn to_text(&self, pta: &Pta) -> String {
        let mut out = format!("gamma {}\n", self.valuation.display(pta))
            .trim_end()
            .to_string();
        out.push('\n');
        for (i, n) in self.tree.nodes().iter().enumerate() {
            let path = Path::new(pta, self.tree.path_to(i))
                .expect("tree paths are valid")
                .to_string(pta);
            match self.entries.get(&i) {
                Some((d, a)) => writeln!(
                    out,
                    "node n{} path={} delay={} input={}",
                    n.id,
                    path,
                    d,
                    pta.symbol_name(*a)
                ),
                None => writeln!(out, "leaf n{} path={}", n.id, path),
            }
            .unwrap();
        }
        out
    }

    /// Parses the text form. Lines may come in any order; `#` starts a
    /// comment.
    pub fn parse(pta: &Pta, text: &str) -> Result<Strategy, StrategyError> {
        let mut gamma: Option<ParamValuation> = None;
        // path -> (line, id, entry)
        let mut items: BTreeMap<Vec<TransId>, ParsedLine> = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let mut words = content.split_whitespace();
            let kind = words.next().unwrap();
            if kind == "gamma" {
                if gamma.is_some() {
                    return fail(line, "duplicate gamma line");
                }
                let mut pairs = Vec::new();
                for w in words {
                    let Some((name, value)) = w.split_once('=') else {
                        return fail(line, format!("expected <param>=<nat>, found {w}"));
                    };
                    let Ok(v) = value.parse::<u64>() else {
                        return fail(line, format!("invalid parameter value {value}"));
                    };
                    pairs.push((name, v));
                }
                let g = ParamValuation::from_named(pta, pairs).map_err(|e| StrategyError {
                    line,
                    message: e.to_string(),
                })?;
                gamma = Some(g);
                continue;
            }
            if kind != "node" && kind != "leaf" {
                return fail(line, format!("unknown line kind {kind}"));
            }
            let Some(id) = words
                .next()
                .and_then(|w| w.strip_prefix('n'))
                .and_then(|w| w.parse::<usize>().ok())
            else {
                return fail(line, "expected node id n<k>");
            };
            let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
            for w in words {
                let Some((key, value)) = w.split_once('=') else {
                    return fail(line, format!("expected key=value, found {w}"));
                };
                if fields.insert(key, value).is_some() {
                    return fail(line, format!("duplicate field {key}"));
                }
            }
            let allowed: &[&str] = if kind == "node" {
                &["path", "delay", "input"]
            } else {
                &["path"]
            };
            if let Some(key) = fields.keys().find(|k| !allowed.contains(k)) {
                return fail(line, format!("unexpected field {key}"));
            }
            let Some(path_text) = fields.get("path") else {
                return fail(line, "missing path");
            };
            let path = Path::parse(pta, path_text).map_err(|e| StrategyError {
                line,
                message: e.to_string(),
            })?;
            let entry = if kind == "node" {
                let (Some(d), Some(a)) = (fields.get("delay"), fields.get("input")) else {
                    return fail(line, "node needs delay and input");
                };
                let Some(delay) = rational::parse(d) else {
                    return fail(line, format!("invalid delay {d}"));
                };
                if delay.is_negative() {
                    return fail(line, format!("negative delay {d}"));
                }
                let Some(input) = pta.symbol_by_name(a) else {
                    return fail(line, format!("unknown input {a}"));
                };
                Some((delay, input))
            } else {
                None
            };
            if items
                .insert(path.transitions().to_vec(), (line, id, entry))
                .is_some()
            {
                return fail(line, format!("path {path_text} listed twice"));
            }
        }
        let Some(valuation) = gamma else {
            return fail(0, "missing gamma line");
        };
        if !items.contains_key(&Vec::new()) {
            return fail(0, "missing root node");
        }

        // BTreeMap order on transition sequences is a pre-order with
        // successors sorted by transition.
        let index: BTreeMap<&Vec<TransId>, usize> =
            items.keys().enumerate().map(|(i, p)| (p, i)).collect();
        let mut nodes: Vec<SubTreeNode> = Vec::with_capacity(items.len());
        let mut entries = BTreeMap::new();
        let mut ids = BTreeMap::new();
        for (i, (path, (line, id, entry))) in items.iter().enumerate() {
            if let Some(prev) = ids.insert(*id, *line) {
                return fail(*line, format!("node id n{id} already used on line {prev}"));
            }
            let parent = if path.is_empty() {
                None
            } else {
                let p = &path[..path.len() - 1];
                let Some(&pi) = index.get(&p.to_vec()) else {
                    return fail(*line, "parent path is not listed");
                };
                let Some((_, pa)) = &items[&p.to_vec()].2 else {
                    return fail(*line, "parent is a leaf");
                };
                let e = *path.last().unwrap();
                if pta.transition(e).input != *pa {
                    return fail(
                        *line,
                        format!(
                            "transition {} does not carry the parent's input {}",
                            pta.transition(e).id,
                            pta.symbol_name(*pa)
                        ),
                    );
                }
                nodes[pi].children.push(i);
                Some(pi)
            };
            let label = Path::new(pta, path.clone())
                .expect("checked while parsing")
                .last_location(pta);
            nodes.push(SubTreeNode {
                id: *id,
                label,
                parent,
                incoming: path.last().copied(),
                chosen: entry.as_ref().map(|(_, a)| *a),
                children: Vec::new(),
            });
            if let Some(entry) = entry {
                entries.insert(i, entry.clone());
            }
        }
        Ok(Strategy {
            tree: ProperSubTree::from_nodes(nodes),
            entries,
            valuation,
        })
    }
}

/// Reads the node delays and the parameter valuation off a solution of the
/// sub-tree's constraint system.
pub fn extract_strategy(
    pta: &Pta,
    subtree: &ProperSubTree,
    witness: &Witness,
) -> Result<Strategy, SynthesisError> {
    let mut values = Vec::with_capacity(pta.params().len());
    for (i, p) in pta.params().iter().enumerate() {
        let name = param_var(pta, ParamId(i));
        let v = witness
            .get(&name)
            .ok_or_else(|| SynthesisError::WitnessMismatch(format!("no value for {name}")))?;
        let n = v
            .is_integer()
            .then(|| u64::try_from(v.to_integer()).ok())
            .flatten()
            .filter(|&n| p.contains(n))
            .ok_or_else(|| {
                SynthesisError::WitnessMismatch(format!("{name}={v} outside the domain"))
            })?;
        values.push(n);
    }
    let mut entries = BTreeMap::new();
    for m in subtree.internal_nodes() {
        let node = subtree.node(m);
        let name = node_delay_var(node.id);
        let d = witness
            .get(&name)
            .ok_or_else(|| SynthesisError::WitnessMismatch(format!("no value for {name}")))?;
        if d.is_negative() {
            return Err(SynthesisError::WitnessMismatch(format!(
                "{name}={d} is negative"
            )));
        }
        let a = node
            .chosen
            .ok_or_else(|| SynthesisError::WitnessMismatch(format!("n{} has no input", node.id)))?;
        entries.insert(m, (d.clone(), a));
    }
    Ok(Strategy {
        tree: subtree.clone(),
        entries,
        valuation: ParamValuation::new(values),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_model;
    use crate::rational::int;

    const REFERENCE: &str = "\
gamma p1=3 p2=3
node n0 path=l0 delay=0 input=a
node n1 path=l0,e1,la' delay=3 input=a
node n2 path=l0,e1,la',e3,la delay=3 input=c
node n3 path=l0,e1,la',e3,la,e4,lc' delay=3 input=c
node n4 path=l0,e1,la',e3,la,e4,lc',e6,lc delay=6 input=c
leaf n5 path=l0,e1,la',e3,la,e4,lc',e6,lc,e10,lt
node n6 path=l0,e1,la',e3,la,e5,lc delay=9 input=c
leaf n7 path=l0,e1,la',e3,la,e5,lc,e10,lt
node n8 path=l0,e2,la delay=3 input=c
node n9 path=l0,e2,la,e4,lc' delay=3 input=c
node n10 path=l0,e2,la,e4,lc',e6,lc delay=6 input=c
leaf n11 path=l0,e2,la,e4,lc',e6,lc,e10,lt
node n12 path=l0,e2,la,e5,lc delay=9 input=c
leaf n13 path=l0,e2,la,e5,lc,e10,lt
";

    fn fig1() -> Pta {
        parse_model(include_str!("../../examples/fig1.pta"))
            .unwrap()
            .0
    }

    #[test]
    fn parse_and_print_round_trip() {
        let pta = fig1();
        let s = Strategy::parse(&pta, REFERENCE).unwrap();
        assert_eq!(s.entries().len(), 10);
        assert_eq!(s.tree().leaves().count(), 4);
        assert_eq!(s.to_text(&pta), REFERENCE);
        let e = |id: &str| pta.transition_by_id(id).unwrap();
        let (d, a) = s.lookup(&[e("e2"), e("e5")]).unwrap();
        assert_eq!((d.clone(), pta.symbol_name(a)), (int(9), "c"));
        assert!(s.lookup(&[e("e11")]).is_none());
        assert!(s.lookup(&[e("e2"), e("e5"), e("e10")]).is_none());
    }

    #[test]
    fn lines_may_be_shuffled() {
        let pta = fig1();
        let mut lines: Vec<&str> = REFERENCE.lines().collect();
        lines.reverse();
        let text = format!("# comment\n{}\n", lines.join("\n"));
        assert_eq!(
            Strategy::parse(&pta, &text).unwrap().to_text(&pta),
            REFERENCE
        );
    }

    #[test]
    fn format_errors() {
        let pta = fig1();
        let bad = REFERENCE.replace("e10,lt", "e99,lt");
        assert!(Strategy::parse(&pta, &bad)
            .unwrap_err()
            .message
            .contains("e99"));
        let no_gamma = REFERENCE.replace("gamma p1=3 p2=3\n", "");
        assert!(Strategy::parse(&pta, &no_gamma).is_err());
        let orphan =
            "gamma p1=3 p2=3\nnode n0 path=l0 delay=0 input=a\nleaf n1 path=l0,e1,la',e3,la\n";
        assert!(Strategy::parse(&pta, orphan).is_err());
        let negative = REFERENCE.replace("delay=9", "delay=-9");
        assert!(Strategy::parse(&pta, &negative).is_err());
        let wrong_input = REFERENCE.replace("path=l0 delay=0 input=a", "path=l0 delay=0 input=b");
        assert!(Strategy::parse(&pta, &wrong_input).is_err());
        let out_of_domain = REFERENCE.replace("p1=3", "p1=7");
        assert!(Strategy::parse(&pta, &out_of_domain).is_err());
    }

    #[test]
    fn rational_delays_are_kept_exactly() {
        let pta = fig1();
        let text = REFERENCE.replace("delay=9", "delay=17/2");
        let s = Strategy::parse(&pta, &text).unwrap();
        assert!(s.to_text(&pta).contains("delay=17/2"));
    }
}
