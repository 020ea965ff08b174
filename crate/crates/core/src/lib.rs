//! Rooted graph transformation: host graphs, rules, a search-plan matcher and
//! an interpreter for GP 2 style command sequences.

pub mod bench;
pub mod generators;
pub mod host_graph;
pub mod interp;
pub mod matcher;
pub mod programs;
pub mod rule;
pub mod text;

pub use host_graph::{Atom, EdgeId, EdgeMark, GraphError, HostGraph, Label, NodeId, NodeMark};
pub use interp::{exec, exec_traced, Limits, Outcome, Program, ProgramError, RunStats};
pub use matcher::{build_plan, find_match, CompiledRule, SearchPlan};
pub use rule::{Match, Rule};
pub use text::{parse_host, parse_program, print_host, print_program, ProgramSource, TextError};
