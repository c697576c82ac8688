//! Guard-conjunction normalization: make every (source, input) group share a
//! single guard by conjoining the atoms of all its members.

use super::{GuardAtom, LocId, Pta, SymbolId, TransId};

/// One (source, input) group whose guards were replaced by their conjunction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewrittenGroup {
    pub source: LocId,
    pub input: SymbolId,
    pub transitions: Vec<TransId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NormalizationReport {
    pub rewritten: Vec<RewrittenGroup>,
}

impl NormalizationReport {
    pub fn is_empty(&self) -> bool {
        self.rewritten.is_empty()
    }
}

pub fn normalize_guards(pta: &Pta) -> (Pta, NormalizationReport) {
    let mut out = pta.clone();
    let mut report = NormalizationReport::default();
    let mut groups: Vec<(LocId, SymbolId)> = Vec::new();
    for t in pta.transitions() {
        if !groups.contains(&(t.source, t.input)) {
            groups.push((t.source, t.input));
        }
    }
    for (source, input) in groups {
        let members = pta.post(source, input);
        let first = &pta.transition(members[0]).guard;
        if members.iter().all(|&e| pta.transition(e).guard == *first) {
            continue;
        }
        let mut atoms: Vec<GuardAtom> = Vec::new();
        for &e in &members {
            for atom in &pta.transition(e).guard.atoms {
                if !atoms.contains(atom) {
                    atoms.push(atom.clone());
                }
            }
        }
        for &e in &members {
            out.transitions[e.0].guard.atoms = atoms.clone();
        }
        report.rewritten.push(RewrittenGroup {
            source,
            input,
            transitions: members,
        });
    }
    (out, report)
}
