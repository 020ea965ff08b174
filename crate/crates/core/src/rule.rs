//! Conditional rules and their application at a match.

use std::fmt;

use thiserror::Error;

use crate::host_graph::{EdgeId, EdgeMark, GraphError, HostGraph, Label, NodeId, NodeMark};

/// A mark in a rule graph: a concrete mark or the wildcard `any`.
///
/// `any` matches every mark except the unmarked state, and on the right-hand
/// side it keeps whatever mark the matched item had.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MarkPat<M> {
    Is(M),
    Any,
}

pub type NodeMarkPat = MarkPat<NodeMark>;
pub type EdgeMarkPat = MarkPat<EdgeMark>;

impl NodeMarkPat {
    pub fn accepts(self, m: NodeMark) -> bool {
        match self {
            MarkPat::Is(want) => want == m,
            MarkPat::Any => m != NodeMark::None,
        }
    }
}

impl EdgeMarkPat {
    pub fn accepts(self, m: EdgeMark) -> bool {
        match self {
            MarkPat::Is(want) => want == m,
            MarkPat::Any => m != EdgeMark::None,
        }
    }
}

/// Label of a rule item: a whole-label variable or a constant list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LabelExpr {
    Var(usize),
    Const(Label),
}

impl LabelExpr {
    pub fn var(&self) -> Option<usize> {
        match self {
            LabelExpr::Var(v) => Some(*v),
            LabelExpr::Const(_) => None,
        }
    }

    fn instantiate(&self, bindings: &[Option<Label>]) -> Label {
        match self {
            LabelExpr::Var(v) => bindings[*v].clone().unwrap_or_default(),
            LabelExpr::Const(l) => l.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleNode {
    /// Identifier used in the rule text; shared identifiers form the interface.
    pub id: String,
    pub label: LabelExpr,
    pub mark: NodeMarkPat,
    pub rooted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleEdge {
    pub id: String,
    pub src: usize,
    pub tgt: usize,
    pub label: LabelExpr,
    pub mark: EdgeMarkPat,
    /// Matches a host edge in either direction.
    pub bidirectional: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleGraph {
    pub nodes: Vec<RuleNode>,
    pub edges: Vec<RuleEdge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DegreeKind {
    In,
    Out,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn eval(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// Application condition. Node references are LHS node indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    Degree {
        kind: DegreeKind,
        node: usize,
        op: CmpOp,
        value: i64,
    },
    Edge {
        src: usize,
        tgt: usize,
    },
    Not(Box<Condition>),
    And(Box<Condition>, Box<Condition>),
}

impl Condition {
    /// LHS nodes the condition refers to.
    pub fn nodes(&self, out: &mut Vec<usize>) {
        match self {
            Condition::Degree { node, .. } => out.push(*node),
            Condition::Edge { src, tgt } => {
                out.push(*src);
                out.push(*tgt);
            }
            Condition::Not(c) => c.nodes(out),
            Condition::And(a, b) => {
                a.nodes(out);
                b.nodes(out);
            }
        }
    }

    pub fn has_edge_predicate(&self) -> bool {
        match self {
            Condition::Degree { .. } => false,
            Condition::Edge { .. } => true,
            Condition::Not(c) => c.has_edge_predicate(),
            Condition::And(a, b) => a.has_edge_predicate() || b.has_edge_predicate(),
        }
    }

    /// Splits top-level conjunctions into independent clauses.
    pub fn conjuncts(&self) -> Vec<&Condition> {
        match self {
            Condition::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            c => vec![c],
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule {rule}: left-hand side is empty")]
    EmptyLhs { rule: String },
    #[error("rule {rule}: variable {var} occurs on the right but not on the left")]
    RhsOnlyVariable { rule: String, var: String },
    #[error("rule {rule}: {item} uses `any` on the right without a matching `any` on the left")]
    UnboundAny { rule: String, item: String },
    #[error("rule {rule}: condition refers to node {node}, which is not an interface node")]
    ConditionNode { rule: String, node: String },
    #[error("rule {rule}: {msg}")]
    Malformed { rule: String, msg: String },
}

#[derive(Debug, Error)]
pub enum ApplyError {
    #[error("inconsistent match for rule {rule}: {source}")]
    Graph {
        rule: String,
        #[source]
        source: GraphError,
    },
}

/// A validated rule `L => R` with its interface and optional condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub params: Vec<String>,
    pub lhs: RuleGraph,
    pub rhs: RuleGraph,
    pub condition: Option<Condition>,
    lhs_to_rhs: Vec<Option<usize>>,
    rhs_to_lhs: Vec<Option<usize>>,
    lhs_edge_pair: Vec<Option<usize>>,
    rhs_edge_pair: Vec<Option<usize>>,
}

/// Result of a successful match: images of every LHS item plus the values
/// bound to variables and wildcard marks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Match {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub bindings: Vec<Option<Label>>,
    pub node_marks: Vec<NodeMark>,
    pub edge_marks: Vec<EdgeMark>,
}

impl Match {
    /// Builds a match record from item images, reading labels and marks
    /// from the host graph.
    pub fn from_images(
        g: &HostGraph,
        rule: &Rule,
        nodes: Vec<NodeId>,
        edges: Vec<EdgeId>,
    ) -> Match {
        let mut bindings = vec![None; rule.params.len()];
        let mut node_marks = Vec::with_capacity(nodes.len());
        let mut edge_marks = Vec::with_capacity(edges.len());
        for (rn, &h) in rule.lhs.nodes.iter().zip(&nodes) {
            let v = &g.nodes[h.index()];
            node_marks.push(v.mark);
            if let LabelExpr::Var(x) = rn.label {
                bindings[x].get_or_insert_with(|| v.label.clone());
            }
        }
        for (re, &h) in rule.lhs.edges.iter().zip(&edges) {
            let e = &g.edges[h.index()];
            edge_marks.push(e.mark);
            if let LabelExpr::Var(x) = re.label {
                bindings[x].get_or_insert_with(|| e.label.clone());
            }
        }
        Match {
            nodes,
            edges,
            bindings,
            node_marks,
            edge_marks,
        }
    }
}

/// Why a rule is not fast.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SlowReason {
    /// LHS nodes not undirectedly reachable from any LHS root.
    Unreachable(Vec<String>),
    /// A variable occurs more than once in L or in R.
    RepeatedVariable(String),
    /// The condition uses an `edge` predicate.
    EdgePredicate,
}

impl fmt::Display for SlowReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlowReason::Unreachable(ids) => {
                write!(f, "nodes not reachable from a root: {}", ids.join(", "))
            }
            SlowReason::RepeatedVariable(v) => write!(f, "variable {v} is repeated"),
            SlowReason::EdgePredicate => write!(f, "condition uses an edge predicate"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FastReport {
    pub rule: String,
    pub reasons: Vec<SlowReason>,
}

impl FastReport {
    pub fn is_fast(&self) -> bool {
        self.reasons.is_empty()
    }
}

impl Rule {
    /// Validates and builds a rule. `interface` pairs LHS with RHS node indices.
    pub fn new(
        name: impl Into<String>,
        params: Vec<String>,
        lhs: RuleGraph,
        rhs: RuleGraph,
        interface: &[(usize, usize)],
        condition: Option<Condition>,
    ) -> Result<Rule, RuleError> {
        let name = name.into();
        let malformed = |msg: String| RuleError::Malformed {
            rule: name.clone(),
            msg,
        };
        if lhs.nodes.is_empty() {
            return Err(RuleError::EmptyLhs { rule: name });
        }
        for (side, g) in [("left", &lhs), ("right", &rhs)] {
            for e in &g.edges {
                if e.src >= g.nodes.len() || e.tgt >= g.nodes.len() {
                    return Err(malformed(format!("{side} edge {} has a bad endpoint", e.id)));
                }
            }
            let vars = g
                .nodes
                .iter()
                .map(|n| &n.label)
                .chain(g.edges.iter().map(|e| &e.label));
            for l in vars {
                if let LabelExpr::Var(v) = l {
                    if *v >= params.len() {
                        return Err(malformed(format!("variable index {v} out of range")));
                    }
                }
            }
        }
        let mut lhs_to_rhs = vec![None; lhs.nodes.len()];
        let mut rhs_to_lhs = vec![None; rhs.nodes.len()];
        for &(l, r) in interface {
            if l >= lhs.nodes.len() || r >= rhs.nodes.len() {
                return Err(malformed("interface index out of range".into()));
            }
            if lhs_to_rhs[l].is_some() || rhs_to_lhs[r].is_some() {
                return Err(malformed(format!(
                    "interface node {} listed twice",
                    lhs.nodes[l].id
                )));
            }
            lhs_to_rhs[l] = Some(r);
            rhs_to_lhs[r] = Some(l);
        }

        // Every RHS variable must be bound by the LHS.
        let mut lhs_vars = vec![false; params.len()];
        for l in lhs
            .nodes
            .iter()
            .map(|n| &n.label)
            .chain(lhs.edges.iter().map(|e| &e.label))
        {
            if let LabelExpr::Var(v) = l {
                lhs_vars[*v] = true;
            }
        }
        for l in rhs
            .nodes
            .iter()
            .map(|n| &n.label)
            .chain(rhs.edges.iter().map(|e| &e.label))
        {
            if let LabelExpr::Var(v) = l {
                if !lhs_vars[*v] {
                    return Err(RuleError::RhsOnlyVariable {
                        rule: name,
                        var: params[*v].clone(),
                    });
                }
            }
        }

        // Pair RHS edges with LHS edges between the same interface nodes.
        let mut lhs_edge_pair = vec![None; lhs.edges.len()];
        let mut rhs_edge_pair = vec![None; rhs.edges.len()];
        for (j, re) in rhs.edges.iter().enumerate() {
            let (Some(s), Some(t)) = (rhs_to_lhs[re.src], rhs_to_lhs[re.tgt]) else {
                continue;
            };
            let found = lhs.edges.iter().enumerate().position(|(i, le)| {
                lhs_edge_pair[i].is_none()
                    && le.bidirectional == re.bidirectional
                    && ((le.src == s && le.tgt == t)
                        || (re.bidirectional && le.src == t && le.tgt == s))
            });
            if let Some(i) = found {
                lhs_edge_pair[i] = Some(j);
                rhs_edge_pair[j] = Some(i);
            }
        }

        for (r, n) in rhs.nodes.iter().enumerate() {
            if n.mark == MarkPat::Any
                && !rhs_to_lhs[r].is_some_and(|l| lhs.nodes[l].mark == MarkPat::Any)
            {
                return Err(RuleError::UnboundAny {
                    rule: name,
                    item: format!("node {}", n.id),
                });
            }
        }
        for (j, e) in rhs.edges.iter().enumerate() {
            if e.mark == MarkPat::Any
                && !rhs_edge_pair[j].is_some_and(|i| lhs.edges[i].mark == MarkPat::Any)
            {
                return Err(RuleError::UnboundAny {
                    rule: name,
                    item: format!("edge {}", e.id),
                });
            }
        }

        if let Some(c) = &condition {
            let mut refs = Vec::new();
            c.nodes(&mut refs);
            for n in refs {
                if n >= lhs.nodes.len() {
                    return Err(malformed("condition node out of range".into()));
                }
                if lhs_to_rhs[n].is_none() {
                    return Err(RuleError::ConditionNode {
                        rule: name,
                        node: lhs.nodes[n].id.clone(),
                    });
                }
            }
        }

        Ok(Rule {
            name,
            params,
            lhs,
            rhs,
            condition,
            lhs_to_rhs,
            rhs_to_lhs,
            lhs_edge_pair,
            rhs_edge_pair,
        })
    }

    /// RHS index of an LHS node, if it belongs to the interface.
    pub fn lhs_to_rhs(&self, l: usize) -> Option<usize> {
        self.lhs_to_rhs[l]
    }

    pub fn rhs_to_lhs(&self, r: usize) -> Option<usize> {
        self.rhs_to_lhs[r]
    }

    /// Interface pairs `(lhs index, rhs index)` in LHS order.
    pub fn interface(&self) -> Vec<(usize, usize)> {
        self.lhs_to_rhs
            .iter()
            .enumerate()
            .filter_map(|(l, r)| r.map(|r| (l, r)))
            .collect()
    }

    /// True when the LHS node is deleted by the rule.
    pub fn deletes_node(&self, l: usize) -> bool {
        self.lhs_to_rhs[l].is_none()
    }

    /// RHS edge that keeps LHS edge `i` in place (relabelled), if any.
    pub fn lhs_edge_pair(&self, i: usize) -> Option<usize> {
        self.lhs_edge_pair[i]
    }

    pub fn rhs_edge_pair(&self, j: usize) -> Option<usize> {
        self.rhs_edge_pair[j]
    }

    /// Applies the rule's fast-rule test and lists every violated clause.
    pub fn classify_fast(&self) -> FastReport {
        let mut reasons = Vec::new();
        let n = self.lhs.nodes.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.lhs.edges {
            adj[e.src].push(e.tgt);
            adj[e.tgt].push(e.src);
        }
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&i| self.lhs.nodes[i].rooted).collect();
        for &r in &stack {
            seen[r] = true;
        }
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        let unreachable: Vec<String> = (0..n)
            .filter(|&i| !seen[i])
            .map(|i| self.lhs.nodes[i].id.clone())
            .collect();
        if !unreachable.is_empty() {
            reasons.push(SlowReason::Unreachable(unreachable));
        }
        for g in [&self.lhs, &self.rhs] {
            let mut count = vec![0usize; self.params.len()];
            let labels = g
                .nodes
                .iter()
                .map(|x| &x.label)
                .chain(g.edges.iter().map(|e| &e.label));
            for l in labels {
                if let LabelExpr::Var(v) = l {
                    count[*v] += 1;
                }
            }
            for (v, c) in count.iter().enumerate() {
                let r = SlowReason::RepeatedVariable(self.params[v].clone());
                if *c > 1 && !reasons.contains(&r) {
                    reasons.push(r);
                }
            }
        }
        if self.condition.as_ref().is_some_and(|c| c.has_edge_predicate()) {
            reasons.push(SlowReason::EdgePredicate);
        }
        FastReport {
            rule: self.name.clone(),
            reasons,
        }
    }
}

/// Dangling condition: every host node matched by a deleted LHS node has all
/// of its incident edges inside the match.
pub fn check_dangling(g: &HostGraph, rule: &Rule, m: &Match) -> bool {
    dangling_ok_at(g, rule, &m.nodes, &m.edges)
}

pub(crate) fn dangling_ok_at(g: &HostGraph, rule: &Rule, nodes: &[NodeId], edges: &[EdgeId]) -> bool {
    for (l, &h) in nodes.iter().enumerate() {
        if !rule.deletes_node(l) {
            continue;
        }
        let (mut ins, mut outs) = (0u32, 0u32);
        for &e in edges {
            let rec = &g.edges[e.index()];
            if rec.tgt == h.0 {
                ins += 1;
            }
            if rec.src == h.0 {
                outs += 1;
            }
        }
        let v = &g.nodes[h.index()];
        if v.indeg != ins || v.outdeg != outs {
            return false;
        }
    }
    true
}

/// Evaluates a condition against the images in `nodes` (LHS index → host).
pub fn eval_condition_at(g: &HostGraph, c: &Condition, nodes: &[NodeId]) -> bool {
    match c {
        Condition::Degree {
            kind,
            node,
            op,
            value,
        } => {
            let v = &g.nodes[nodes[*node].index()];
            let d = match kind {
                DegreeKind::In => v.indeg,
                DegreeKind::Out => v.outdeg,
            };
            op.eval(d as i64, *value)
        }
        Condition::Edge { src, tgt } => {
            let t = nodes[*tgt];
            g.out_edges(nodes[*src])
                .any(|e| g.edges[e.index()].tgt == t.0)
        }
        Condition::Not(c) => !eval_condition_at(g, c, nodes),
        Condition::And(a, b) => eval_condition_at(g, a, nodes) && eval_condition_at(g, b, nodes),
    }
}

pub fn eval_condition(g: &HostGraph, c: &Condition, m: &Match) -> bool {
    eval_condition_at(g, c, &m.nodes)
}

/// Applies `rule` at match `m`: deletes unpaired LHS edges, then deleted
/// nodes; updates interface nodes and kept edges in place; then creates the
/// new nodes and edges of the RHS.
pub fn apply_at(g: &mut HostGraph, rule: &Rule, m: &Match) -> Result<(), ApplyError> {
    let err = |source| ApplyError::Graph {
        rule: rule.name.clone(),
        source,
    };
    for (i, &e) in m.edges.iter().enumerate() {
        if rule.lhs_edge_pair(i).is_none() {
            g.delete_edge(e).map_err(err)?;
        }
    }
    for (l, &v) in m.nodes.iter().enumerate() {
        if rule.deletes_node(l) {
            g.delete_node(v).map_err(err)?;
        }
    }

    let mut rhs_img: Vec<Option<NodeId>> = vec![None; rule.rhs.nodes.len()];
    for (r, rn) in rule.rhs.nodes.iter().enumerate() {
        let Some(l) = rule.rhs_to_lhs(r) else {
            continue;
        };
        let v = m.nodes[l];
        rhs_img[r] = Some(v);
        let label = rn.label.instantiate(&m.bindings);
        if g.node(v).map_err(err)?.label() != &label {
            g.relabel_node(v, label).map_err(err)?;
        }
        let mark = match rn.mark {
            MarkPat::Is(mk) => mk,
            MarkPat::Any => m.node_marks[l],
        };
        g.set_node_mark(v, mark).map_err(err)?;
        g.set_root(v, rn.rooted).map_err(err)?;
    }
    for (j, re) in rule.rhs.edges.iter().enumerate() {
        let Some(i) = rule.rhs_edge_pair(j) else {
            continue;
        };
        let e = m.edges[i];
        let label = re.label.instantiate(&m.bindings);
        if g.edge(e).map_err(err)?.label() != &label {
            g.relabel_edge(e, label).map_err(err)?;
        }
        let mark = match re.mark {
            MarkPat::Is(mk) => mk,
            MarkPat::Any => m.edge_marks[i],
        };
        g.set_edge_mark(e, mark).map_err(err)?;
    }

    for (r, rn) in rule.rhs.nodes.iter().enumerate() {
        if rhs_img[r].is_some() {
            continue;
        }
        let mark = match rn.mark {
            MarkPat::Is(mk) => mk,
            MarkPat::Any => unreachable!("validated: `any` only on interface nodes"),
        };
        let label = rn.label.instantiate(&m.bindings);
        rhs_img[r] = Some(g.add_node(label, mark, rn.rooted));
    }
    for (j, re) in rule.rhs.edges.iter().enumerate() {
        if rule.rhs_edge_pair(j).is_some() {
            continue;
        }
        let mark = match re.mark {
            MarkPat::Is(mk) => mk,
            MarkPat::Any => unreachable!("validated: `any` only on kept edges"),
        };
        let label = re.label.instantiate(&m.bindings);
        let s = rhs_img[re.src].expect("all rhs nodes placed");
        let t = rhs_img[re.tgt].expect("all rhs nodes placed");
        g.add_edge(s, t, label, mark).map_err(err)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_program;

    fn rule(src: &str) -> Rule {
        let p = parse_program(&format!("Main = r\n{src}")).unwrap();
        p.rules.into_iter().next().unwrap()
    }

    fn grey(g: &mut HostGraph, rooted: bool) -> NodeId {
        g.add_node(Label::empty(), NodeMark::Grey, rooted)
    }

    fn edge(g: &mut HostGraph, s: NodeId, t: NodeId) -> EdgeId {
        g.add_edge(s, t, Label::empty(), EdgeMark::None).unwrap()
    }

    const RED2: &str = "r(a, b, x, y: list) {
        lhs [ (u(R), x, grey) (w, y, grey) | (e1, u, w, a) (e2, w, u, b) ]
        rhs [ (n(R), x, grey) | (e3, n, n, a) ]
        interface { }
    }";

    #[test]
    fn red2_dangling_with_extra_loop() {
        let r = rule(RED2);
        let mut g = HostGraph::new();
        let u = grey(&mut g, true);
        let w = grey(&mut g, false);
        let e1 = edge(&mut g, u, w);
        let e2 = edge(&mut g, w, u);
        let m = Match::from_images(&g, &r, vec![u, w], vec![e1, e2]);
        assert!(check_dangling(&g, &r, &m));
        edge(&mut g, u, u);
        assert!(!check_dangling(&g, &r, &m));
    }

    #[test]
    fn rule_deleting_nothing_never_dangles() {
        let r = rule("r(x: list) { lhs [ (1, x, grey) | ] rhs [ (1, x, grey) | ] interface {1} }");
        let mut g = HostGraph::new();
        let v = grey(&mut g, false);
        edge(&mut g, v, v);
        let m = Match::from_images(&g, &r, vec![v], vec![]);
        assert!(check_dangling(&g, &r, &m));
    }

    #[test]
    fn conditions() {
        let mut g = HostGraph::new();
        let a = grey(&mut g, false);
        let b = grey(&mut g, false);
        let c = grey(&mut g, false);
        edge(&mut g, a, b);
        edge(&mut g, b, c);
        let indeg0 = Condition::Degree {
            kind: DegreeKind::In,
            node: 0,
            op: CmpOp::Eq,
            value: 0,
        };
        assert!(!eval_condition_at(&g, &indeg0, &[b]));
        let not_edge = Condition::Not(Box::new(Condition::Edge { src: 0, tgt: 1 }));
        assert!(eval_condition_at(&g, &not_edge, &[a, c]));
        edge(&mut g, a, c);
        let out_lt3 = Condition::Degree {
            kind: DegreeKind::Out,
            node: 0,
            op: CmpOp::Lt,
            value: 3,
        };
        assert_eq!(g.outdegree(a), Ok(2));
        assert!(eval_condition_at(&g, &out_lt3, &[a]));
    }

    #[test]
    fn red1_empties_the_graph() {
        let r = rule(
            "r(a, x: list) { lhs [ (u(R), x, grey) | (e, u, u, a) ] rhs [ | ] interface { } }",
        );
        let mut g = HostGraph::new();
        let v = grey(&mut g, true);
        let e = edge(&mut g, v, v);
        let m = Match::from_images(&g, &r, vec![v], vec![e]);
        apply_at(&mut g, &r, &m).unwrap();
        assert!(g.is_empty());
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn push_moves_root() {
        let r = rule(
            "r(a, x, y: list) {
                lhs [ (1(R), x, blue) (2, y, grey) | (e, 1, 2, a) ]
                rhs [ (1, x, blue) (2(R), y, blue) | (e, 1, 2, a) ]
                interface {1, 2}
            }",
        );
        let mut g = HostGraph::new();
        let p = g.add_node(Label::empty(), NodeMark::Blue, true);
        let c = grey(&mut g, false);
        let e = edge(&mut g, p, c);
        let m = Match::from_images(&g, &r, vec![p, c], vec![e]);
        apply_at(&mut g, &r, &m).unwrap();
        assert!(!g.node(p).unwrap().rooted());
        assert!(g.node(c).unwrap().rooted());
        assert_eq!(g.node(c).unwrap().mark(), NodeMark::Blue);
        // the edge was kept in place
        assert!(g.contains_edge(e));
    }

    #[test]
    fn unroot_keeps_any_mark() {
        let r = rule("r(x: list) { lhs [ (1(R), x, any) | ] rhs [ (1, x, any) | ] interface {1} }");
        let mut g = HostGraph::new();
        let v = g.add_node(Label::empty(), NodeMark::Red, true);
        let m = Match::from_images(&g, &r, vec![v], vec![]);
        apply_at(&mut g, &r, &m).unwrap();
        assert!(!g.node(v).unwrap().rooted());
        assert_eq!(g.node(v).unwrap().mark(), NodeMark::Red);
    }

    #[test]
    fn any_rejects_unmarked() {
        assert!(MarkPat::<NodeMark>::Any.accepts(NodeMark::Grey));
        assert!(!MarkPat::<NodeMark>::Any.accepts(NodeMark::None));
        assert!(!MarkPat::<EdgeMark>::Any.accepts(EdgeMark::None));
        assert!(MarkPat::<EdgeMark>::Any.accepts(EdgeMark::Dashed));
    }

    #[test]
    fn rhs_any_needs_lhs_any() {
        let src = "Main = r\nr(x: list) { lhs [ (1, x, grey) | ] rhs [ (1, x, any) | ] interface {1} }";
        assert!(parse_program(src).is_err());
    }

    #[test]
    fn fast_classification() {
        let prune = rule(
            "r(a, x, y: list) {
                lhs [ (1, x, blue) (2(R), y, blue) | (e, 1, 2, a) ]
                rhs [ (1(R), x, blue) | ]
                interface {1}
            }",
        );
        assert!(prune.classify_fast().is_fast());
        let link = rule(
            "r(a, b, x, y, z: list) {
                lhs [ (1, x, grey) (2, y, grey) (3, z, grey) | (e1, 1, 2, a) (e2, 2, 3, b) ]
                rhs [ (1, x, grey) (2, y, grey) (3, z, grey) | (e1, 1, 2, a) (e2, 2, 3, b) (e3, 1, 3, empty) ]
                interface {1, 2, 3}
                where not edge(1, 3)
            }",
        );
        let rep = link.classify_fast();
        assert!(!rep.is_fast());
        assert!(rep.reasons.contains(&SlowReason::EdgePredicate));
        assert!(matches!(rep.reasons[0], SlowReason::Unreachable(_)));
        let init = rule("r(x: list) { lhs [ (1, x, grey) | ] rhs [ (1(R), x, grey) | ] interface {1} }");
        assert_eq!(
            init.classify_fast().reasons,
            vec![SlowReason::Unreachable(vec!["1".into()])]
        );
    }

    #[test]
    fn repeated_variable_is_slow() {
        let r = rule(
            "r(x: list) {
                lhs [ (1(R), x, grey) (2, x, grey) | (e, 1, 2, empty) ]
                rhs [ (1(R), x, grey) (2, x, grey) | (e, 1, 2, empty) ]
                interface {1, 2}
            }",
        );
        assert_eq!(
            r.classify_fast().reasons,
            vec![SlowReason::RepeatedVariable("x".into())]
        );
    }
}
