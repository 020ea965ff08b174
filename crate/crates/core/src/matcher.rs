//! Search-plan compilation and execution.
//!
//! A plan binds LHS items one probe at a time: anchor nodes come from the
//! root list (rooted LHS nodes) or the node list, every other node is reached
//! by walking an incident-edge list of an already bound node. Node candidates
//! are filtered by mark, rootedness, label and degree counters before the
//! search continues, and condition clauses run as soon as the nodes they
//! mention are bound. Execution is depth-first with backtracking; the first
//! complete assignment in list order wins.

use std::collections::VecDeque;

use thiserror::Error;

use crate::host_graph::{EdgeId, HostGraph, Label, NodeId};
use crate::rule::{eval_condition_at, Condition, EdgeMarkPat, LabelExpr, Match, NodeMarkPat, Rule};

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Probe {
    /// Bind an LHS node to a host root.
    AnchorRoot { node: usize },
    /// Bind an LHS node by scanning the node list (unrooted candidates only).
    AnchorNode { node: usize },
    /// Walk the out-edges of bound `from`, binding `edge` and its target `to`.
    ExtendOut { edge: usize, from: usize, to: usize },
    /// Walk the in-edges of bound `from`, binding `edge` and its source `to`.
    ExtendIn { edge: usize, from: usize, to: usize },
    /// Bidirectional edge: out-edges of `from` first, then in-edges.
    ExtendEither { edge: usize, from: usize, to: usize },
    /// Both endpoints bound (including loops): find a host edge between them.
    CheckEdge { edge: usize },
    /// Evaluate one conjunct of the rule condition.
    Condition { clause: usize },
    /// Final dangling-condition check for deleted nodes.
    Dangling,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum LabelCheck {
    Const(Label),
    /// First occurrence of a variable in plan order: binds it.
    Bind(usize),
    /// Later occurrence: must equal the bound value.
    Same(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct NodeReq {
    mark: NodeMarkPat,
    rooted: bool,
    label: LabelCheck,
    min_in: u32,
    min_out: u32,
    min_total: u32,
    /// Deleted node with only directed incident edges: exact degrees.
    exact: Option<(u32, u32)>,
    /// Deleted node with bidirectional incident edges: exact total degree.
    exact_total: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct EdgeReq {
    mark: EdgeMarkPat,
    label: LabelCheck,
}

/// Compiled probe sequence for one rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchPlan {
    pub probes: Vec<Probe>,
    clauses: Vec<Condition>,
    nodes: Vec<NodeReq>,
    edges: Vec<EdgeReq>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("rule {0} has an empty left-hand side")]
    EmptyLhs(String),
}

impl SearchPlan {
    /// True when the first probe anchors at the root list and every other
    /// node is reached through an edge.
    pub fn is_root_anchored(&self) -> bool {
        matches!(self.probes.first(), Some(Probe::AnchorRoot { .. }))
            && self.probes.iter().skip(1).all(|p| {
                !matches!(p, Probe::AnchorNode { .. } | Probe::AnchorRoot { .. })
            })
    }
}

/// Compiles a rule into a search plan.
pub fn build_plan(rule: &Rule) -> Result<SearchPlan, PlanError> {
    let lhs = &rule.lhs;
    let n = lhs.nodes.len();
    if n == 0 {
        return Err(PlanError::EmptyLhs(rule.name.clone()));
    }

    // Degree hints.
    let mut min_in = vec![0u32; n];
    let mut min_out = vec![0u32; n];
    let mut total = vec![0u32; n];
    let mut has_bidi = vec![false; n];
    for e in &lhs.edges {
        total[e.src] += 1;
        total[e.tgt] += 1;
        if e.bidirectional {
            has_bidi[e.src] = true;
            has_bidi[e.tgt] = true;
        } else {
            min_out[e.src] += 1;
            min_in[e.tgt] += 1;
        }
    }

    let mut incident: Vec<Vec<usize>> = Vec::with_capacity(n);
    for v in 0..n {
        let mut outs = Vec::new();
        let mut ins = Vec::new();
        let mut bidi = Vec::new();
        for (i, e) in lhs.edges.iter().enumerate() {
            if e.src != v && e.tgt != v {
                continue;
            }
            if e.bidirectional {
                bidi.push(i);
            } else if e.src == v {
                outs.push(i);
            } else {
                ins.push(i);
            }
        }
        incident.push(outs.into_iter().chain(ins).chain(bidi).collect());
    }

    let clauses: Vec<Condition> = rule
        .condition
        .as_ref()
        .map(|c| c.conjuncts().into_iter().cloned().collect())
        .unwrap_or_default();
    let clause_nodes: Vec<Vec<usize>> = clauses
        .iter()
        .map(|c| {
            let mut v = Vec::new();
            c.nodes(&mut v);
            v
        })
        .collect();
    let mut clause_done = vec![false; clauses.len()];

    let mut probes = Vec::new();
    let mut bound = vec![false; n];
    let mut edge_done = vec![false; lhs.edges.len()];
    let mut node_order = Vec::with_capacity(n);
    let mut edge_order = Vec::with_capacity(lhs.edges.len());

    let flush_clauses = |probes: &mut Vec<Probe>, bound: &[bool], done: &mut [bool]| {
        for (c, nodes) in clause_nodes.iter().enumerate() {
            if !done[c] && nodes.iter().all(|&v| bound[v]) {
                done[c] = true;
                probes.push(Probe::Condition { clause: c });
            }
        }
    };
    // Clauses that mention no nodes can run first.
    flush_clauses(&mut probes, &bound, &mut clause_done);

    let anchors: Vec<usize> = (0..n)
        .filter(|&v| lhs.nodes[v].rooted)
        .chain((0..n).filter(|&v| !lhs.nodes[v].rooted))
        .collect();
    for a in anchors {
        if bound[a] {
            continue;
        }
        bound[a] = true;
        node_order.push(a);
        probes.push(if lhs.nodes[a].rooted {
            Probe::AnchorRoot { node: a }
        } else {
            Probe::AnchorNode { node: a }
        });
        flush_clauses(&mut probes, &bound, &mut clause_done);
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            for &i in &incident[v] {
                if edge_done[i] {
                    continue;
                }
                let e = &lhs.edges[i];
                edge_done[i] = true;
                edge_order.push(i);
                let other = if e.src == v { e.tgt } else { e.src };
                if bound[other] {
                    probes.push(Probe::CheckEdge { edge: i });
                    continue;
                }
                bound[other] = true;
                node_order.push(other);
                queue.push_back(other);
                probes.push(if e.bidirectional {
                    Probe::ExtendEither {
                        edge: i,
                        from: v,
                        to: other,
                    }
                } else if e.src == v {
                    Probe::ExtendOut {
                        edge: i,
                        from: v,
                        to: other,
                    }
                } else {
                    Probe::ExtendIn {
                        edge: i,
                        from: v,
                        to: other,
                    }
                });
                flush_clauses(&mut probes, &bound, &mut clause_done);
            }
        }
    }
    if (0..n).any(|v| rule.deletes_node(v)) {
        probes.push(Probe::Dangling);
    }

    // Label checks follow plan order: the first item carrying a variable binds it.
    let mut var_bound = vec![false; rule.params.len()];
    let mut check = |l: &LabelExpr| match l {
        LabelExpr::Const(c) => LabelCheck::Const(c.clone()),
        LabelExpr::Var(x) => {
            if var_bound[*x] {
                LabelCheck::Same(*x)
            } else {
                var_bound[*x] = true;
                LabelCheck::Bind(*x)
            }
        }
    };
    let mut node_labels: Vec<Option<LabelCheck>> = vec![None; n];
    let mut edge_labels: Vec<Option<LabelCheck>> = vec![None; lhs.edges.len()];
    // Walk the probes so that binding order is exactly execution order.
    for p in &probes {
        match *p {
            Probe::AnchorRoot { node } | Probe::AnchorNode { node } => {
                node_labels[node] = Some(check(&lhs.nodes[node].label));
            }
            Probe::ExtendOut { edge, to, .. }
            | Probe::ExtendIn { edge, to, .. }
            | Probe::ExtendEither { edge, to, .. } => {
                edge_labels[edge] = Some(check(&lhs.edges[edge].label));
                node_labels[to] = Some(check(&lhs.nodes[to].label));
            }
            Probe::CheckEdge { edge } => {
                edge_labels[edge] = Some(check(&lhs.edges[edge].label));
            }
            Probe::Condition { .. } | Probe::Dangling => {}
        }
    }
    debug_assert_eq!(node_order.len(), n);
    debug_assert_eq!(edge_order.len(), lhs.edges.len());

    let nodes = (0..n)
        .map(|v| {
            let deleted = rule.deletes_node(v);
            NodeReq {
                mark: lhs.nodes[v].mark,
                rooted: lhs.nodes[v].rooted,
                label: node_labels[v].take().expect("every node bound"),
                min_in: min_in[v],
                min_out: min_out[v],
                min_total: total[v],
                exact: (deleted && !has_bidi[v]).then_some((min_in[v], min_out[v])),
                exact_total: (deleted && has_bidi[v]).then_some(total[v]),
            }
        })
        .collect();
    let edges = lhs
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| EdgeReq {
            mark: e.mark,
            label: edge_labels[i].take().expect("every edge bound"),
        })
        .collect();
    Ok(SearchPlan {
        probes,
        clauses,
        nodes,
        edges,
    })
}

/// A rule together with its search plan.
#[derive(Clone, Debug)]
pub struct CompiledRule {
    pub rule: Rule,
    pub plan: SearchPlan,
}

impl CompiledRule {
    pub fn new(rule: Rule) -> Result<CompiledRule, PlanError> {
        let plan = build_plan(&rule)?;
        Ok(CompiledRule { rule, plan })
    }

    pub fn find_match(&self, g: &mut HostGraph, probes: &mut u64) -> Option<Match> {
        find_match(g, &self.rule, &self.plan, probes)
    }
}

#[derive(Clone, Copy)]
enum Item {
    Node(u32),
    Edge(u32),
}

struct Search<'a> {
    g: &'a mut HostGraph,
    rule: &'a Rule,
    plan: &'a SearchPlan,
    nodes: Vec<NodeId>,
    edges: Vec<EdgeId>,
    vars: Vec<Item>,
    probes: u64,
}

/// Finds the first match of `rule` in `g` in deterministic search order.
///
/// `probes` is increased by the number of candidate inspections (list
/// fetches, including the final empty one, plus condition evaluations).
/// Matched flags are clear again when this returns.
pub fn find_match(
    g: &mut HostGraph,
    rule: &Rule,
    plan: &SearchPlan,
    probes: &mut u64,
) -> Option<Match> {
    let mut s = Search {
        g,
        rule,
        plan,
        nodes: vec![NodeId(NIL); rule.lhs.nodes.len()],
        edges: vec![EdgeId(NIL); rule.lhs.edges.len()],
        vars: vec![Item::Node(NIL); rule.params.len()],
        probes: 0,
    };
    let found = s.go(0);
    *probes += s.probes;
    if !found {
        return None;
    }
    for &v in &s.nodes {
        s.g.set_node_matched(v, false);
    }
    for &e in &s.edges {
        s.g.set_edge_matched(e, false);
    }
    Some(Match::from_images(s.g, rule, s.nodes, s.edges))
}

impl Search<'_> {
    fn item_label(&self, it: Item) -> &Label {
        match it {
            Item::Node(v) => &self.g.nodes[v as usize].label,
            Item::Edge(e) => &self.g.edges[e as usize].label,
        }
    }

    fn label_ok(&self, check: &LabelCheck, label: &Label) -> bool {
        match check {
            LabelCheck::Const(c) => c == label,
            LabelCheck::Bind(_) => true,
            LabelCheck::Same(x) => self.item_label(self.vars[*x]) == label,
        }
    }

    fn node_ok(&self, l: usize, h: u32) -> bool {
        let req = &self.plan.nodes[l];
        let rec = &self.g.nodes[h as usize];
        if rec.matched || rec.rooted != req.rooted || !req.mark.accepts(rec.mark) {
            return false;
        }
        let degrees_ok = match (req.exact, req.exact_total) {
            (Some((i, o)), _) => rec.indeg == i && rec.outdeg == o,
            (None, Some(t)) => {
                rec.indeg + rec.outdeg == t && rec.indeg >= req.min_in && rec.outdeg >= req.min_out
            }
            (None, None) => {
                rec.indeg >= req.min_in
                    && rec.outdeg >= req.min_out
                    && rec.indeg + rec.outdeg >= req.min_total
            }
        };
        degrees_ok && self.label_ok(&req.label, &rec.label)
    }

    fn edge_ok(&self, l: usize, h: u32) -> bool {
        let req = &self.plan.edges[l];
        let rec = &self.g.edges[h as usize];
        !rec.matched && req.mark.accepts(rec.mark) && self.label_ok(&req.label, &rec.label)
    }

    fn bind_node(&mut self, l: usize, h: u32) {
        self.nodes[l] = NodeId(h);
        self.g.nodes[h as usize].matched = true;
        if let LabelCheck::Bind(x) = self.plan.nodes[l].label {
            self.vars[x] = Item::Node(h);
        }
    }

    fn unbind_node(&mut self, l: usize) {
        let h = self.nodes[l];
        self.g.nodes[h.index()].matched = false;
        self.nodes[l] = NodeId(NIL);
    }

    fn bind_edge(&mut self, l: usize, h: u32) {
        self.edges[l] = EdgeId(h);
        self.g.edges[h as usize].matched = true;
        if let LabelCheck::Bind(x) = self.plan.edges[l].label {
            self.vars[x] = Item::Edge(h);
        }
    }

    fn unbind_edge(&mut self, l: usize) {
        let h = self.edges[l];
        self.g.edges[h.index()].matched = false;
        self.edges[l] = EdgeId(NIL);
    }

    /// Tries host edge `e` for LHS `edge`, with `other` as the image of `to`.
    fn try_extend(&mut self, k: usize, edge: usize, to: usize, e: u32, other: u32) -> bool {
        if !self.edge_ok(edge, e) || !self.node_ok(to, other) {
            return false;
        }
        self.bind_edge(edge, e);
        self.bind_node(to, other);
        if self.go(k + 1) {
            return true;
        }
        self.unbind_node(to);
        self.unbind_edge(edge);
        false
    }

    fn try_edge(&mut self, k: usize, edge: usize, e: u32) -> bool {
        if !self.edge_ok(edge, e) {
            return false;
        }
        self.bind_edge(edge, e);
        if self.go(k + 1) {
            return true;
        }
        self.unbind_edge(edge);
        false
    }

    fn walk_out(&mut self, k: usize, edge: usize, from: u32, to: usize) -> bool {
        let mut cur = self.g.nodes[from as usize].first_out;
        loop {
            self.probes += 1;
            if cur == NIL {
                return false;
            }
            let next = self.g.edges[cur as usize].out_next;
            let t = self.g.edges[cur as usize].tgt;
            if self.try_extend(k, edge, to, cur, t) {
                return true;
            }
            cur = next;
        }
    }

    fn walk_in(&mut self, k: usize, edge: usize, from: u32, to: usize) -> bool {
        let mut cur = self.g.nodes[from as usize].first_in;
        loop {
            self.probes += 1;
            if cur == NIL {
                return false;
            }
            let next = self.g.edges[cur as usize].in_next;
            let s = self.g.edges[cur as usize].src;
            if self.try_extend(k, edge, to, cur, s) {
                return true;
            }
            cur = next;
        }
    }

    /// Walks the out-list of `a` (or the in-list, if `use_in`) for edges whose
    /// other end is `b`.
    fn connect(&mut self, k: usize, edge: usize, a: u32, b: u32, use_in: bool) -> bool {
        let mut cur = if use_in {
            self.g.nodes[a as usize].first_in
        } else {
            self.g.nodes[a as usize].first_out
        };
        loop {
            self.probes += 1;
            if cur == NIL {
                return false;
            }
            let rec = &self.g.edges[cur as usize];
            let (next, other) = if use_in {
                (rec.in_next, rec.src)
            } else {
                (rec.out_next, rec.tgt)
            };
            if other == b && self.try_edge(k, edge, cur) {
                return true;
            }
            cur = next;
        }
    }

    fn go(&mut self, k: usize) -> bool {
        let Some(probe) = self.plan.probes.get(k) else {
            return true;
        };
        match *probe {
            Probe::AnchorRoot { node } | Probe::AnchorNode { node } => {
                let from_roots = matches!(probe, Probe::AnchorRoot { .. });
                let mut cur = if from_roots {
                    self.g.first_root_raw()
                } else {
                    self.g.first_node_raw()
                };
                loop {
                    self.probes += 1;
                    if cur == NIL {
                        return false;
                    }
                    let rec = &self.g.nodes[cur as usize];
                    let next = if from_roots { rec.root_next_raw() } else { rec.next_raw() };
                    if self.node_ok(node, cur) {
                        self.bind_node(node, cur);
                        if self.go(k + 1) {
                            return true;
                        }
                        self.unbind_node(node);
                    }
                    cur = next;
                }
            }
            Probe::ExtendOut { edge, from, to } => {
                let f = self.nodes[from].0;
                self.walk_out(k, edge, f, to)
            }
            Probe::ExtendIn { edge, from, to } => {
                let f = self.nodes[from].0;
                self.walk_in(k, edge, f, to)
            }
            Probe::ExtendEither { edge, from, to } => {
                let f = self.nodes[from].0;
                self.walk_out(k, edge, f, to) || self.walk_in(k, edge, f, to)
            }
            Probe::CheckEdge { edge } => {
                let e = &self.rule.lhs.edges[edge];
                let s = self.nodes[e.src].0;
                let t = self.nodes[e.tgt].0;
                if e.bidirectional {
                    if s == t {
                        return self.connect(k, edge, s, s, false);
                    }
                    // Pick the endpoint with fewer incident edges.
                    let ds = self.g.nodes[s as usize].indeg + self.g.nodes[s as usize].outdeg;
                    let dt = self.g.nodes[t as usize].indeg + self.g.nodes[t as usize].outdeg;
                    let (a, b) = if ds <= dt { (s, t) } else { (t, s) };
                    self.connect(k, edge, a, b, false) || self.connect(k, edge, a, b, true)
                } else if self.g.nodes[s as usize].outdeg <= self.g.nodes[t as usize].indeg {
                    self.connect(k, edge, s, t, false)
                } else {
                    self.connect(k, edge, t, s, true)
                }
            }
            Probe::Condition { clause } => {
                self.probes += 1;
                eval_condition_at(self.g, &self.plan.clauses[clause], &self.nodes) && self.go(k + 1)
            }
            Probe::Dangling => {
                self.probes += 1;
                crate::rule::dangling_ok_at(self.g, self.rule, &self.nodes, &self.edges)
                    && self.go(k + 1)
            }
        }
    }
}

/// Number of roots in the host graph; constant time.
pub fn count_roots(g: &HostGraph) -> usize {
    g.root_count()
}

/// Per-rule probe totals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProbeBudgetReport {
    pub rule: String,
    pub calls: u64,
    pub probes: u64,
    pub max_probes_per_call: u64,
}
