//! Controller and parameter synthesis for parametric timed automata.
//!
//! Given a PTA with finite integer parameter domains and a reach-avoid
//! specification with deadline, the pipeline explores the unfolding of the
//! automaton depth-first, prunes directions whose path constraints are
//! infeasible, and solves a mixed integer feasibility problem per candidate
//! sub-tree to obtain a parameter valuation together with a feedback strategy
//! that maps finite paths to (delay, input) pairs.
//!
//! Module map:
//! - [`model`]: automata, specifications, the model file format.
//! - [`semantics`]: concrete clock semantics, runs and path realizability.
//! - [`lp`]: exact rational feasibility for mixed delay/parameter systems.
//! - [`encoding`]: path and tree constraint systems.
//! - [`synthesis`]: exploration tree, candidate enumeration, strategies.
//! - [`validate`]: exhaustive closed-loop replay of a strategy.
//! - [`cli`]: the `pta-synth` command line front end.

pub mod cli;
pub mod encoding;
pub mod lp;
pub mod model;
pub mod rational;
pub mod semantics;
pub mod synthesis;
pub mod validate;

pub use rational::Rational;
