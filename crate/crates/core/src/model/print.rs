use std::fmt::Write;

use super::{Pta, Spec};

/// Renders a model in the file format accepted by [`super::parse_model`].
/// Transition ids are always written explicitly.
pub fn print_model(pta: &Pta, spec: &Spec) -> String {
    let mut out = String::new();
    for l in pta.locations() {
        out.push_str("location ");
        out.push_str(pta.location_name(l));
        if l == pta.init() {
            out.push_str(" init");
        }
        if spec.is_target(l) {
            out.push_str(" target");
        }
        if spec.is_avoid(l) {
            out.push_str(" avoid");
        }
        out.push('\n');
    }
    for c in &pta.clocks()[1..] {
        writeln!(out, "clock {}", c).unwrap();
    }
    for p in pta.params() {
        writeln!(out, "param {} {} {}", p.name, p.lo, p.hi).unwrap();
    }
    writeln!(out, "deadline {}", spec.deadline).unwrap();
    for t in pta.transitions() {
        let resets: Vec<&str> = t.resets.iter().map(|&c| pta.clock_name(c)).collect();
        writeln!(
            out,
            "trans {}: {} {} {{{}}} {} {}",
            t.id,
            pta.location_name(t.source),
            pta.symbol_name(t.input),
            resets.join(","),
            pta.guard_to_string(&t.guard),
            pta.location_name(t.target)
        )
        .unwrap();
    }
    out
}
