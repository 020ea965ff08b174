//! Program execution.
//!
//! Commands run directly on the host graph. `if`/`try` conditions and loop
//! iterations open a checkpoint so failed attempts are undone through the
//! graph's undo log rather than by copying.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::host_graph::HostGraph;
use crate::matcher::{CompiledRule, PlanError, ProbeBudgetReport};
use crate::rule::apply_at;
use crate::text::{parse_program, CmdExpr, ProgramSource, TextError};

/// Command after procedure inlining; rule calls refer to rule indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    /// Apply the first applicable rule of the set, in order.
    Call(Vec<usize>),
    Seq(Vec<Command>),
    If(Box<Command>, Box<Command>, Box<Command>),
    Try(Box<Command>, Box<Command>, Box<Command>),
    Loop(Box<Command>),
    Break,
    Or(Box<Command>, Box<Command>),
    Skip,
    Fail,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error(transparent)]
    Text(#[from] TextError),
    #[error("no Main procedure")]
    MissingMain,
    #[error("procedure {0} calls itself")]
    RecursiveProcedure(String),
    #[error("{0} is not declared")]
    Undeclared(String),
    #[error("{0} in a rule set is not a rule")]
    NotARule(String),
    #[error("break outside of a loop body")]
    BreakOutsideLoop,
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// Substitutes procedure bodies into `Main`.
pub fn inline_procedures(src: &ProgramSource) -> Result<Command, ProgramError> {
    let rules: HashMap<&str, usize> = src
        .rules
        .iter()
        .enumerate()
        .map(|(i, r)| (r.name.as_str(), i))
        .collect();
    let procs: HashMap<&str, &CmdExpr> = src
        .procs
        .iter()
        .map(|p| (p.name.as_str(), &p.body))
        .collect();
    let main = procs.get("Main").ok_or(ProgramError::MissingMain)?;
    let mut active = vec!["Main".to_string()];
    inline(main, &rules, &procs, &mut active)
}

fn inline(
    c: &CmdExpr,
    rules: &HashMap<&str, usize>,
    procs: &HashMap<&str, &CmdExpr>,
    active: &mut Vec<String>,
) -> Result<Command, ProgramError> {
    let mut sub = |c: &CmdExpr| inline(c, rules, procs, active).map(Box::new);
    Ok(match c {
        CmdExpr::Call(name) => {
            if let Some(&i) = rules.get(name.as_str()) {
                return Ok(Command::Call(vec![i]));
            }
            let Some(body) = procs.get(name.as_str()) else {
                return Err(ProgramError::Undeclared(name.clone()));
            };
            if active.iter().any(|a| a == name) {
                return Err(ProgramError::RecursiveProcedure(name.clone()));
            }
            active.push(name.clone());
            let out = inline(body, rules, procs, active)?;
            active.pop();
            out
        }
        CmdExpr::RuleSet(names) => Command::Call(
            names
                .iter()
                .map(|n| match rules.get(n.as_str()) {
                    Some(&i) => Ok(i),
                    None if procs.contains_key(n.as_str()) => Err(ProgramError::NotARule(n.clone())),
                    None => Err(ProgramError::Undeclared(n.clone())),
                })
                .collect::<Result<_, _>>()?,
        ),
        CmdExpr::Seq(items) => Command::Seq(
            items
                .iter()
                .map(|c| inline(c, rules, procs, active))
                .collect::<Result<_, _>>()?,
        ),
        CmdExpr::Loop(b) => Command::Loop(sub(b)?),
        CmdExpr::If(a, b, c) => Command::If(sub(a)?, sub(b)?, sub(c)?),
        CmdExpr::Try(a, b, c) => Command::Try(sub(a)?, sub(b)?, sub(c)?),
        CmdExpr::Or(a, b) => Command::Or(sub(a)?, sub(b)?),
        CmdExpr::Skip => Command::Skip,
        CmdExpr::Fail => Command::Fail,
        CmdExpr::Break => Command::Break,
    })
}

/// Checks that every `break` sits in a loop body without an `if`/`try`
/// condition between it and the loop.
pub fn check_breaks(c: &Command) -> Result<(), ProgramError> {
    fn walk(c: &Command, in_loop: bool) -> Result<(), ProgramError> {
        match c {
            Command::Break if !in_loop => Err(ProgramError::BreakOutsideLoop),
            Command::Break | Command::Call(_) | Command::Skip | Command::Fail => Ok(()),
            Command::Seq(items) => items.iter().try_for_each(|c| walk(c, in_loop)),
            Command::If(c, t, e) | Command::Try(c, t, e) => {
                walk(c, false)?;
                walk(t, in_loop)?;
                walk(e, in_loop)
            }
            Command::Loop(b) => walk(b, true),
            Command::Or(a, b) => {
                walk(a, in_loop)?;
                walk(b, in_loop)
            }
        }
    }
    walk(c, false)
}

/// An executable program: compiled rules plus the inlined main command.
#[derive(Clone, Debug)]
pub struct Program {
    rules: Vec<CompiledRule>,
    main: Command,
}

impl Program {
    pub fn new(rules: Vec<CompiledRule>, main: Command) -> Result<Program, ProgramError> {
        check_breaks(&main)?;
        fn max_rule(c: &Command) -> Option<usize> {
            match c {
                Command::Call(rs) => rs.iter().copied().max(),
                Command::Seq(items) => items.iter().filter_map(max_rule).max(),
                Command::If(a, b, c) | Command::Try(a, b, c) => {
                    [a, b, c].into_iter().filter_map(|c| max_rule(c)).max()
                }
                Command::Loop(b) => max_rule(b),
                Command::Or(a, b) => max_rule(a).max(max_rule(b)),
                Command::Break | Command::Skip | Command::Fail => None,
            }
        }
        if let Some(i) = max_rule(&main) {
            if i >= rules.len() {
                return Err(ProgramError::Undeclared(format!("rule #{i}")));
            }
        }
        Ok(Program { rules, main })
    }

    pub fn from_source(src: &ProgramSource) -> Result<Program, ProgramError> {
        let main = inline_procedures(src)?;
        let rules = src
            .rules
            .iter()
            .map(|r| CompiledRule::new(r.clone()))
            .collect::<Result<_, _>>()?;
        Program::new(rules, main)
    }

    pub fn parse(text: &str) -> Result<Program, ProgramError> {
        Program::from_source(&parse_program(text)?)
    }

    pub fn rules(&self) -> &[CompiledRule] {
        &self.rules
    }

    pub fn main(&self) -> &Command {
        &self.main
    }

    pub fn rule_index(&self, name: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.rule.name == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Upper bound on steps, and separately on loop iterations.
    pub max_steps: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_steps: 1_000_000_000,
        }
    }
}

#[derive(Debug)]
pub enum Outcome {
    Graph(HostGraph),
    Fail,
    StepLimitExceeded,
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Graph(_) => "graph",
            Outcome::Fail => "fail",
            Outcome::StepLimitExceeded => "limit",
        }
    }

    pub fn graph(&self) -> Option<&HostGraph> {
        match self {
            Outcome::Graph(g) => Some(g),
            _ => None,
        }
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Outcome::Fail)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleTally {
    pub name: String,
    /// Match attempts (one per rule tried in a rule-set call).
    pub calls: u64,
    pub applied: u64,
    pub probes: u64,
    pub max_probes: u64,
}

#[derive(Clone, Debug, Default)]
pub struct RunStats {
    /// Rule-set calls (applied or failed), breaks and fails.
    pub steps: u64,
    pub failed_calls: u64,
    pub probes: u64,
    pub loop_iterations: u64,
    /// Largest root count seen after any rule application.
    pub max_roots: usize,
    pub rules: Vec<RuleTally>,
    pub wall: Duration,
}

impl RunStats {
    pub fn tally(&self, rule: &str) -> Option<&RuleTally> {
        self.rules.iter().find(|t| t.name == rule)
    }

    pub fn probe_reports(&self) -> Vec<ProbeBudgetReport> {
        self.rules
            .iter()
            .map(|t| ProbeBudgetReport {
                rule: t.name.clone(),
                calls: t.calls,
                probes: t.probes,
                max_probes_per_call: t.max_probes,
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CondKind {
    If,
    Try,
}

/// Events reported to a trace callback.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent<'a> {
    /// A rule-set call; `rule` names the applied rule, or the first rule of
    /// the set when none applied.
    Call {
        step: u64,
        rule: &'a str,
        applied: bool,
        probes: u64,
    },
    Break { step: u64 },
    Fail { step: u64 },
    /// An `if`/`try` condition is about to run.
    CondEnter { kind: CondKind },
    /// The condition finished; `rolled_back` tells whether its changes were undone.
    CondExit {
        kind: CondKind,
        succeeded: bool,
        rolled_back: bool,
    },
}

pub type Trace<'t> = &'t mut dyn FnMut(&TraceEvent<'_>, &HostGraph);

enum Flow {
    Ok,
    Fail,
    Break,
}

struct StepLimit;

struct Machine<'p, 't> {
    program: &'p Program,
    limits: Limits,
    stats: RunStats,
    trace: Option<Trace<'t>>,
}

impl Machine<'_, '_> {
    fn emit(&mut self, ev: TraceEvent<'_>, g: &HostGraph) {
        if let Some(t) = self.trace.as_mut() {
            t(&ev, g);
        }
    }

    fn step(&mut self) -> Result<(), StepLimit> {
        self.stats.steps += 1;
        if self.stats.steps > self.limits.max_steps {
            Err(StepLimit)
        } else {
            Ok(())
        }
    }

    fn call(&mut self, rules: &[usize], g: &mut HostGraph) -> Result<Flow, StepLimit> {
        self.step()?;
        let mut total = 0;
        for &i in rules {
            let cr = &self.program.rules[i];
            let mut probes = 0;
            let found = cr.find_match(g, &mut probes);
            total += probes;
            let t = &mut self.stats.rules[i];
            t.calls += 1;
            t.probes += probes;
            t.max_probes = t.max_probes.max(probes);
            if let Some(m) = found {
                t.applied += 1;
                apply_at(g, &cr.rule, &m).expect("matches satisfy the dangling condition");
                self.stats.probes += total;
                self.stats.max_roots = self.stats.max_roots.max(g.root_count());
                let ev = TraceEvent::Call {
                    step: self.stats.steps,
                    rule: &cr.rule.name,
                    applied: true,
                    probes: total,
                };
                self.emit(ev, g);
                return Ok(Flow::Ok);
            }
        }
        self.stats.probes += total;
        self.stats.failed_calls += 1;
        let name = rules
            .first()
            .map_or("", |&i| self.program.rules[i].rule.name.as_str());
        let ev = TraceEvent::Call {
            step: self.stats.steps,
            rule: name,
            applied: false,
            probes: total,
        };
        self.emit(ev, g);
        Ok(Flow::Fail)
    }

    fn run(&mut self, c: &Command, g: &mut HostGraph) -> Result<Flow, StepLimit> {
        match c {
            Command::Call(rules) => self.call(rules, g),
            Command::Seq(items) => {
                for it in items {
                    match self.run(it, g)? {
                        Flow::Ok => {}
                        other => return Ok(other),
                    }
                }
                Ok(Flow::Ok)
            }
            Command::If(cond, then, els) => {
                self.emit(TraceEvent::CondEnter { kind: CondKind::If }, g);
                let cp = g.checkpoint();
                let r = self.run(cond, g);
                g.rollback(cp).expect("checkpoints are nested");
                let ok = matches!(r?, Flow::Ok);
                let ev = TraceEvent::CondExit {
                    kind: CondKind::If,
                    succeeded: ok,
                    rolled_back: true,
                };
                self.emit(ev, g);
                self.run(if ok { then } else { els }, g)
            }
            Command::Try(cond, then, els) => {
                self.emit(TraceEvent::CondEnter { kind: CondKind::Try }, g);
                let cp = g.checkpoint();
                let r = match self.run(cond, g) {
                    Ok(r) => r,
                    Err(e) => {
                        g.rollback(cp).expect("checkpoints are nested");
                        return Err(e);
                    }
                };
                let ok = matches!(r, Flow::Ok);
                if ok {
                    g.release(cp).expect("checkpoints are nested");
                } else {
                    g.rollback(cp).expect("checkpoints are nested");
                }
                let ev = TraceEvent::CondExit {
                    kind: CondKind::Try,
                    succeeded: ok,
                    rolled_back: !ok,
                };
                self.emit(ev, g);
                self.run(if ok { then } else { els }, g)
            }
            Command::Loop(body) => loop {
                self.stats.loop_iterations += 1;
                if self.stats.loop_iterations > self.limits.max_steps {
                    return Err(StepLimit);
                }
                let cp = g.checkpoint();
                match self.run(body, g) {
                    Ok(Flow::Ok) => g.release(cp).expect("checkpoints are nested"),
                    Ok(Flow::Fail) => {
                        g.rollback(cp).expect("checkpoints are nested");
                        return Ok(Flow::Ok);
                    }
                    Ok(Flow::Break) => {
                        g.release(cp).expect("checkpoints are nested");
                        return Ok(Flow::Ok);
                    }
                    Err(e) => {
                        g.rollback(cp).expect("checkpoints are nested");
                        return Err(e);
                    }
                }
            },
            Command::Break => {
                self.step()?;
                self.emit(
                    TraceEvent::Break {
                        step: self.stats.steps,
                    },
                    g,
                );
                Ok(Flow::Break)
            }
            Command::Or(a, _) => self.run(a, g),
            Command::Skip => Ok(Flow::Ok),
            Command::Fail => {
                self.step()?;
                self.emit(
                    TraceEvent::Fail {
                        step: self.stats.steps,
                    },
                    g,
                );
                Ok(Flow::Fail)
            }
        }
    }
}

/// Runs `program` on `graph`.
pub fn exec(program: &Program, graph: HostGraph, limits: Limits) -> (Outcome, RunStats) {
    exec_traced(program, graph, limits, None)
}

/// Runs `program` on `graph`, reporting every step to `trace`.
pub fn exec_traced(
    program: &Program,
    mut graph: HostGraph,
    limits: Limits,
    trace: Option<Trace<'_>>,
) -> (Outcome, RunStats) {
    let start = Instant::now();
    let mut m = Machine {
        program,
        limits,
        stats: RunStats {
            rules: program
                .rules
                .iter()
                .map(|r| RuleTally {
                    name: r.rule.name.clone(),
                    ..RuleTally::default()
                })
                .collect(),
            max_roots: graph.root_count(),
            ..RunStats::default()
        },
        trace,
    };
    let flow = m.run(&program.main, &mut graph);
    let mut stats = m.stats;
    stats.wall = start.elapsed();
    let outcome = match flow {
        Ok(Flow::Ok) => Outcome::Graph(graph),
        Ok(Flow::Fail) => Outcome::Fail,
        Ok(Flow::Break) => unreachable!("break outside a loop is rejected statically"),
        Err(StepLimit) => Outcome::StepLimitExceeded,
    };
    (outcome, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_host, print_host};

    const RULES: &str = "
        grow(x: list) {
          lhs [ (1, x, grey) | ]
          rhs [ (1, x, grey) (2, empty, grey) | ]
          interface {1}
        }
        paint(x: list) {
          lhs [ (1, x, grey) | ]
          rhs [ (1, x, blue) | ]
          interface {1}
        }";

    fn program(main: &str) -> Program {
        Program::parse(&format!("Main = {main}\n{RULES}")).unwrap()
    }

    fn one_grey() -> HostGraph {
        parse_host("[ (0, empty, grey) | ]").unwrap()
    }

    #[test]
    fn fail_fails() {
        let (o, s) = exec(&program("fail"), one_grey(), Limits::default());
        assert!(o.is_fail());
        assert_eq!(s.steps, 1);
    }

    #[test]
    fn break_leaves_loop_keeping_the_graph() {
        let (o, _) = exec(&program("(break; paint)!"), one_grey(), Limits::default());
        assert_eq!(print_host(o.graph().unwrap()), print_host(&one_grey()));
        let (o, _) = exec(&program("(paint; break)!"), one_grey(), Limits::default());
        assert!(print_host(o.graph().unwrap()).contains("blue"));
    }

    #[test]
    fn if_condition_is_undone() {
        let (o, _) = exec(&program("if paint then skip else skip"), one_grey(), Limits::default());
        assert_eq!(print_host(o.graph().unwrap()), print_host(&one_grey()));
    }

    #[test]
    fn try_condition_is_kept() {
        let (o, _) = exec(&program("try paint then skip else skip"), one_grey(), Limits::default());
        assert!(print_host(o.graph().unwrap()).contains("blue"));
    }

    #[test]
    fn loop_restores_state_before_failed_iteration() {
        // The first iteration paints, then fails on grow: the paint is undone.
        let (o, s) = exec(&program("(paint; grow)!"), one_grey(), Limits::default());
        assert_eq!(print_host(o.graph().unwrap()), print_host(&one_grey()));
        assert_eq!(s.tally("paint").unwrap().applied, 1);
        assert_eq!(s.failed_calls, 1);
    }

    #[test]
    fn divergence_is_caught() {
        let limits = Limits { max_steps: 1000 };
        let (o, _) = exec(&program("grow!"), one_grey(), limits);
        assert!(matches!(o, Outcome::StepLimitExceeded));
        let (o, _) = exec(&program("skip!"), one_grey(), limits);
        assert!(matches!(o, Outcome::StepLimitExceeded));
    }

    #[test]
    fn or_takes_left_branch() {
        let (o, _) = exec(&program("paint or fail"), one_grey(), Limits::default());
        assert!(o.graph().is_some());
    }

    #[test]
    fn inline_errors() {
        let err = Program::parse(&format!("P = paint\n{RULES}")).unwrap_err();
        assert_eq!(err, ProgramError::MissingMain);
        let err = Program::parse(&format!("Main = P\nP = Q\nQ = P\n{RULES}")).unwrap_err();
        assert!(matches!(err, ProgramError::RecursiveProcedure(_)));
        let err = Program::parse(&format!("Main = Nope\n{RULES}")).unwrap_err();
        assert_eq!(err, ProgramError::Undeclared("Nope".into()));
        let err = Program::parse(&format!("Main = paint; break\n{RULES}")).unwrap_err();
        assert_eq!(err, ProgramError::BreakOutsideLoop);
        let err = Program::parse(&format!("Main = (if break then skip)!\n{RULES}")).unwrap_err();
        assert_eq!(err, ProgramError::BreakOutsideLoop);
    }

    #[test]
    fn inline_loop_of_rule() {
        let p = program("paint!");
        assert_eq!(p.main(), &Command::Loop(Box::new(Command::Call(vec![1]))));
    }

    #[test]
    fn trace_counts_match_steps() {
        let p = program("(paint; grow)!; if paint then fail; try fail else skip");
        let mut n = 0u64;
        let mut cb = |ev: &TraceEvent<'_>, _: &HostGraph| {
            if matches!(
                ev,
                TraceEvent::Call { .. } | TraceEvent::Break { .. } | TraceEvent::Fail { .. }
            ) {
                n += 1;
            }
        };
        let (_, s) = exec_traced(&p, one_grey(), Limits::default(), Some(&mut cb));
        assert_eq!(s.steps, n);
    }
}
