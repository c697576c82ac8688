//! Exhaustive closed-loop replay of a strategy.
//!
//! Every nondeterministic successor is followed, so the report covers all
//! runs of the closed loop. Only the concrete semantics is used here, no
//! constraint solving.

use std::fmt::{self, Write};

use thiserror::Error;

use crate::model::{ModelError, Pta, Spec, TransId};
use crate::rational::nat;
use crate::semantics::{step, Run, RunStep, SemanticsError, State};
use crate::synthesis::Strategy;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidateError {
    #[error("invalid parameter valuation: {0}")]
    Valuation(#[from] ModelError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationReason {
    AvoidHit,
    DeadlineExceeded,
    /// The run left the strategy's tree before reaching a target.
    OffTree,
    /// The prescribed input has no enabled transition after the delay.
    Stuck,
}

impl fmt::Display for ViolationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationReason::AvoidHit => "avoid-hit",
            ViolationReason::DeadlineExceeded => "deadline-exceeded",
            ViolationReason::OffTree => "off-tree",
            ViolationReason::Stuck => "stuck",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub run: Run,
    pub reason: ViolationReason,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    /// Terminal runs explored, good or bad.
    pub runs_checked: usize,
    pub violations: Vec<Violation>,
    pub ok: bool,
    /// Runs that reached a target in time.
    pub good_runs: Vec<Run>,
}

impl ValidationReport {
    pub fn summary(&self) -> String {
        format!(
            "VALIDATION ok={} runs={} violations={}",
            self.ok,
            self.runs_checked,
            self.violations.len()
        )
    }

    /// Violating runs as traces, followed by the summary line.
    pub fn render(&self, pta: &Pta, strategy: &Strategy) -> String {
        let mut out = String::new();
        for (k, v) in self.violations.iter().enumerate() {
            writeln!(out, "violation {} {}", k + 1, v.reason).unwrap();
            match v.run.format_trace(pta, strategy.valuation()) {
                Ok(t) => out.push_str(&t),
                Err(e) => writeln!(out, "  (trace unavailable: {e})").unwrap(),
            }
        }
        out.push_str(&self.summary());
        out.push('\n');
        out
    }
}

struct Replay<'a> {
    pta: &'a Pta,
    spec: &'a Spec,
    strategy: &'a Strategy,
    report: ValidationReport,
    path: Vec<TransId>,
    run: Run,
}

impl Replay<'_> {
    fn finish(&mut self, reason: Option<ViolationReason>) {
        self.report.runs_checked += 1;
        match reason {
            Some(reason) => self.report.violations.push(Violation {
                run: self.run.clone(),
                reason,
            }),
            None => self.report.good_runs.push(self.run.clone()),
        }
    }

    fn visit(&mut self, s: &State) -> Result<(), ValidateError> {
        if self.spec.is_avoid(s.location) {
            self.finish(Some(ViolationReason::AvoidHit));
            return Ok(());
        }
        if self.spec.is_target(s.location) {
            let late = *s.valuation.global() > nat(self.spec.deadline);
            self.finish(late.then_some(ViolationReason::DeadlineExceeded));
            return Ok(());
        }
        let Some((d, a)) = self.strategy.lookup(&self.path) else {
            self.finish(Some(ViolationReason::OffTree));
            return Ok(());
        };
        let d = d.clone();
        let successors = step(self.pta, self.strategy.valuation(), s, &d, a)?;
        if successors.is_empty() {
            self.finish(Some(ViolationReason::Stuck));
            return Ok(());
        }
        for (e, next) in successors {
            self.path.push(e);
            self.run.steps.push(RunStep {
                delay: d.clone(),
                transition: e,
            });
            let r = self.visit(&next);
            self.run.steps.pop();
            self.path.pop();
            r?;
        }
        Ok(())
    }
}

/// Replays `strategy` against every resolution of nondeterminism.
pub fn validate(
    pta: &Pta,
    spec: &Spec,
    strategy: &Strategy,
) -> Result<ValidationReport, ValidateError> {
    strategy.valuation().check_against(pta)?;
    let mut replay = Replay {
        pta,
        spec,
        strategy,
        report: ValidationReport {
            runs_checked: 0,
            violations: Vec::new(),
            ok: false,
            good_runs: Vec::new(),
        },
        path: Vec::new(),
        run: Run::default(),
    };
    replay.visit(&State::initial(pta))?;
    let mut report = replay.report;
    report.ok = report.violations.is_empty();
    Ok(report)
}
