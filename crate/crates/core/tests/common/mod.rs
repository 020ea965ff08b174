//! Independent oracles shared by the integration tests. Nothing here calls
//! the matcher or the interpreter; graphs are read through the public API
//! only.
#![allow(dead_code)]

pub mod sos;

use std::collections::{HashMap, HashSet, VecDeque};

use gp2_core::rule::{CmpOp, Condition, DegreeKind, LabelExpr, MarkPat, Rule};
use gp2_core::text::print_host;
use gp2_core::{EdgeId, EdgeMark, HostGraph, Label, NodeId, NodeMark};

/// Plain copy of a host graph with dense indices.
#[derive(Clone, Debug)]
pub struct Snap {
    pub ids: Vec<NodeId>,
    pub index: HashMap<NodeId, usize>,
    pub labels: Vec<Label>,
    pub marks: Vec<NodeMark>,
    pub rooted: Vec<bool>,
    pub edges: Vec<SnapEdge>,
}

#[derive(Clone, Debug)]
pub struct SnapEdge {
    pub id: EdgeId,
    pub src: usize,
    pub tgt: usize,
    pub label: Label,
    pub mark: EdgeMark,
}

impl Snap {
    pub fn of(g: &HostGraph) -> Snap {
        let ids: Vec<NodeId> = g.nodes().collect();
        let index: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut s = Snap {
            labels: Vec::new(),
            marks: Vec::new(),
            rooted: Vec::new(),
            edges: Vec::new(),
            ids,
            index,
        };
        for &v in &s.ids {
            let n = g.node(v).unwrap();
            s.labels.push(n.label().clone());
            s.marks.push(n.mark());
            s.rooted.push(n.rooted());
        }
        for e in g.edges() {
            let ev = g.edge(e).unwrap();
            s.edges.push(SnapEdge {
                id: e,
                src: s.index[&ev.source()],
                tgt: s.index[&ev.target()],
                label: ev.label().clone(),
                mark: ev.mark(),
            });
        }
        s
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn indeg(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.tgt == v).count()
    }

    pub fn outdeg(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.src == v).count()
    }

    fn succ(&self) -> Vec<Vec<usize>> {
        let mut s = vec![Vec::new(); self.n()];
        for e in &self.edges {
            s[e.src].push(e.tgt);
        }
        s
    }
}

// ---------------------------------------------------------------------------
// Graph properties

/// One node with a loop, or n >= 2 nodes on one directed cycle.
pub fn is_cycle_graph(s: &Snap) -> bool {
    let n = s.n();
    if n == 0 || s.edges.len() != n {
        return false;
    }
    if (0..n).any(|v| s.indeg(v) != 1 || s.outdeg(v) != 1) {
        return false;
    }
    // Follow successors from node 0: a single cycle returns after n hops.
    let succ = s.succ();
    let mut v = 0;
    for k in 1..=n {
        v = succ[v][0];
        if v == 0 {
            return k == n;
        }
    }
    false
}

/// Some node has exactly one directed walk to every node: counting walks
/// from a candidate root must never reach two for any node.
pub fn is_tree(s: &Snap) -> bool {
    let succ = s.succ();
    (0..s.n()).any(|r| {
        let mut count = vec![0u32; s.n()];
        count[r] = 1;
        let mut queue = VecDeque::from([r]);
        while let Some(v) = queue.pop_front() {
            for &w in &succ[v] {
                count[w] += 1;
                if count[w] > 1 {
                    return false;
                }
                queue.push_back(w);
            }
        }
        count.iter().all(|&c| c == 1)
    })
}

/// No directed cycle (three-colour DFS) and outdegree at most two.
pub fn is_bin_dag(s: &Snap) -> bool {
    if (0..s.n()).any(|v| s.outdeg(v) > 2) {
        return false;
    }
    !has_directed_cycle(s)
}

pub fn has_directed_cycle(s: &Snap) -> bool {
    let succ = s.succ();
    let mut colour = vec![0u8; s.n()];
    for start in 0..s.n() {
        if colour[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        colour[start] = 1;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i];
                *i += 1;
                match colour[w] {
                    0 => {
                        colour[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return true,
                    _ => {}
                }
            } else {
                colour[v] = 2;
                stack.pop();
            }
        }
    }
    false
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut x = x;
    while p[x] != r {
        let nx = p[x];
        p[x] = r;
        x = nx;
    }
    r
}

/// At most one weakly connected component (union-find).
pub fn is_connected(s: &Snap) -> bool {
    let mut p: Vec<usize> = (0..s.n()).collect();
    for e in &s.edges {
        let (a, b) = (find(&mut p, e.src), find(&mut p, e.tgt));
        p[a] = b;
    }
    let roots: HashSet<usize> = (0..s.n()).map(|v| find(&mut p, v)).collect();
    roots.len() <= 1
}

/// Proper 2-colouring of the underlying undirected graph, if one exists.
pub fn two_colouring(s: &Snap) -> Option<Vec<bool>> {
    let mut adj = vec![Vec::new(); s.n()];
    for e in &s.edges {
        adj[e.src].push(e.tgt);
        adj[e.tgt].push(e.src);
    }
    let mut side: Vec<Option<bool>> = vec![None; s.n()];
    for start in 0..s.n() {
        if side[start].is_some() {
            continue;
        }
        side[start] = Some(false);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let c = side[v].unwrap();
            for &w in &adj[v] {
                match side[w] {
                    None => {
                        side[w] = Some(!c);
                        queue.push_back(w);
                    }
                    Some(d) if d == c => return None,
                    _ => {}
                }
            }
        }
    }
    Some(side.into_iter().map(Option::unwrap).collect())
}

/// Kahn's algorithm; `None` if there is a directed cycle.
pub fn topological_order(s: &Snap) -> Option<Vec<usize>> {
    let mut indeg: Vec<usize> = (0..s.n()).map(|v| s.indeg(v)).collect();
    let succ = s.succ();
    let mut ready: VecDeque<usize> = (0..s.n()).filter(|&v| indeg[v] == 0).collect();
    let mut out = Vec::new();
    while let Some(v) = ready.pop_front() {
        out.push(v);
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.push_back(w);
            }
        }
    }
    (out.len() == s.n()).then_some(out)
}

/// Pairs (u, v), u != v, with a non-empty directed path from u to v.
pub fn reachability(s: &Snap) -> HashSet<(usize, usize)> {
    let succ = s.succ();
    let mut out = HashSet::new();
    for u in 0..s.n() {
        let mut seen = vec![false; s.n()];
        let mut stack = succ[u].clone();
        while let Some(v) = stack.pop() {
            if !seen[v] {
                seen[v] = true;
                stack.extend(&succ[v]);
            }
        }
        for (v, _) in seen.iter().enumerate().filter(|&(v, &r)| r && v != u) {
            out.insert((u, v));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Canonical form up to isomorphism (small graphs only)

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Lexicographically least description over all node orderings.
pub fn canonical(g: &HostGraph) -> String {
    let s = Snap::of(g);
    assert!(s.n() <= 8, "canonical form is for small graphs");
    let node_key = |v: usize| format!("{:?}/{:?}/{}", s.labels[v], s.marks[v], s.rooted[v]);
    let mut best: Option<String> = None;
    for perm in permutations(s.n()) {
        // perm[i] = old node placed at position i
        let mut pos = vec![0; s.n()];
        for (i, &v) in perm.iter().enumerate() {
            pos[v] = i;
        }
        let nodes: Vec<String> = perm.iter().map(|&v| node_key(v)).collect();
        let mut edges: Vec<String> = s
            .edges
            .iter()
            .map(|e| format!("{}>{}/{:?}/{:?}", pos[e.src], pos[e.tgt], e.label, e.mark))
            .collect();
        edges.sort();
        let key = format!("{}|{}", nodes.join(","), edges.join(","));
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    }
    best.unwrap_or_else(|| "|".into())
}

// ---------------------------------------------------------------------------
// Brute-force matching

/// All matches of `rule` in `g`: injective, marks and labels respected,
/// rootedness preserved and reflected, condition and dangling condition
/// satisfied. Each match lists host images of LHS nodes and edges.
pub fn all_matches(g: &HostGraph, rule: &Rule) -> Vec<(Vec<NodeId>, Vec<EdgeId>)> {
    let s = Snap::of(g);
    let mut out = Vec::new();
    node_assign(&s, rule, &mut Vec::new(), &mut out);
    out
}

fn bind(b: &mut HashMap<usize, Label>, expr: &LabelExpr, actual: &Label) -> bool {
    match expr {
        LabelExpr::Const(l) => l == actual,
        LabelExpr::Var(x) => match b.get(x) {
            Some(l) => l == actual,
            None => {
                b.insert(*x, actual.clone());
                true
            }
        },
    }
}

fn node_assign(
    s: &Snap,
    rule: &Rule,
    img: &mut Vec<usize>,
    out: &mut Vec<(Vec<NodeId>, Vec<EdgeId>)>,
) {
    let k = img.len();
    if k == rule.lhs.nodes.len() {
        let mut eimg = Vec::new();
        edge_assign(s, rule, img, &mut eimg, out);
        return;
    }
    let rn = &rule.lhs.nodes[k];
    for v in 0..s.n() {
        if img.contains(&v) || s.rooted[v] != rn.rooted {
            continue;
        }
        let ok = match rn.mark {
            MarkPat::Is(m) => s.marks[v] == m,
            MarkPat::Any => s.marks[v] != NodeMark::None,
        };
        if ok {
            img.push(v);
            node_assign(s, rule, img, out);
            img.pop();
        }
    }
}

fn edge_assign(
    s: &Snap,
    rule: &Rule,
    img: &[usize],
    eimg: &mut Vec<usize>,
    out: &mut Vec<(Vec<NodeId>, Vec<EdgeId>)>,
) {
    let k = eimg.len();
    if k == rule.lhs.edges.len() {
        if accept(s, rule, img, eimg) {
            out.push((
                img.iter().map(|&v| s.ids[v]).collect(),
                eimg.iter().map(|&e| s.edges[e].id).collect(),
            ));
        }
        return;
    }
    let re = &rule.lhs.edges[k];
    let (a, b) = (img[re.src], img[re.tgt]);
    for (i, e) in s.edges.iter().enumerate() {
        if eimg.contains(&i) {
            continue;
        }
        let fits = (e.src == a && e.tgt == b) || (re.bidirectional && e.src == b && e.tgt == a);
        let ok = match re.mark {
            MarkPat::Is(m) => e.mark == m,
            MarkPat::Any => e.mark != EdgeMark::None,
        };
        if fits && ok {
            eimg.push(i);
            edge_assign(s, rule, img, eimg, out);
            eimg.pop();
        }
    }
}

fn accept(s: &Snap, rule: &Rule, img: &[usize], eimg: &[usize]) -> bool {
    let mut b = HashMap::new();
    for (rn, &v) in rule.lhs.nodes.iter().zip(img) {
        if !bind(&mut b, &rn.label, &s.labels[v]) {
            return false;
        }
    }
    for (re, &e) in rule.lhs.edges.iter().zip(eimg) {
        if !bind(&mut b, &re.label, &s.edges[e].label) {
            return false;
        }
    }
    if let Some(c) = &rule.condition {
        if !cond(s, c, img) {
            return false;
        }
    }
    // Dangling: deleted nodes have no incident edge outside the match.
    for (l, &v) in img.iter().enumerate() {
        if rule.lhs_to_rhs(l).is_some() {
            continue;
        }
        for (i, e) in s.edges.iter().enumerate() {
            if (e.src == v || e.tgt == v) && !eimg.contains(&i) {
                return false;
            }
        }
    }
    true
}

fn cond(s: &Snap, c: &Condition, img: &[usize]) -> bool {
    match c {
        Condition::Degree {
            kind,
            node,
            op,
            value,
        } => {
            let d = match kind {
                DegreeKind::In => s.indeg(img[*node]),
                DegreeKind::Out => s.outdeg(img[*node]),
            } as i64;
            match op {
                CmpOp::Eq => d == *value,
                CmpOp::Ne => d != *value,
                CmpOp::Lt => d < *value,
                CmpOp::Le => d <= *value,
                CmpOp::Gt => d > *value,
                CmpOp::Ge => d >= *value,
            }
        }
        Condition::Edge { src, tgt } => s
            .edges
            .iter()
            .any(|e| e.src == img[*src] && e.tgt == img[*tgt]),
        Condition::Not(c) => !cond(s, c, img),
        Condition::And(a, b) => cond(s, a, img) && cond(s, b, img),
    }
}

/// Well-formedness by full scan: live endpoints, counters equal recounts,
/// root list equal to the rooted flags.
pub fn well_formed(g: &HostGraph) -> Result<(), String> {
    let s = Snap::of(g);
    for (i, &v) in s.ids.iter().enumerate() {
        let n = g.node(v).map_err(|e| e.to_string())?;
        if n.indegree() != s.indeg(i) || n.outdegree() != s.outdeg(i) {
            return Err(format!("degree counters of {v} are off"));
        }
        if g.indegree(v).unwrap() != s.indeg(i) {
            return Err(format!("indegree of {v} is off"));
        }
    }
    if g.edge_count() != s.edges.len() {
        return Err("edge count is off".into());
    }
    let roots: HashSet<NodeId> = g.roots().collect();
    let flagged: HashSet<NodeId> = s
        .ids
        .iter()
        .zip(&s.rooted)
        .filter(|(_, &r)| r)
        .map(|(&v, _)| v)
        .collect();
    if roots != flagged || g.root_count() != flagged.len() {
        return Err("root list differs from rooted flags".into());
    }
    if !g.all_matched_clear() {
        return Err("matched flags left set".into());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Program contracts

/// Oracle deciding whether a recognizer should succeed on `s`.
pub fn recognizer_oracle(program: &str) -> fn(&Snap) -> bool {
    match program {
        "is-cycle" | "is-cycle-slow" => is_cycle_graph,
        "is-tree" => is_tree,
        "is-bin-dag" => is_bin_dag,
        "is-connected" => is_connected,
        other => panic!("{other} is not a recognizer"),
    }
}

pub const RECOGNIZERS: [&str; 5] = ["is-cycle", "is-cycle-slow", "is-tree", "is-bin-dag", "is-connected"];

/// Checks a top-sort result against its input: the input edges survive
/// unmarked, a single green root points along a blue chain through every
/// input node, and every input edge goes forward in that chain.
pub fn check_top_sort(input: &Snap, output: &HostGraph) -> Result<(), String> {
    let out = Snap::of(output);
    let pointer: Vec<usize> = (0..out.n())
        .filter(|&v| out.marks[v] == NodeMark::Green)
        .collect();
    let [p] = pointer[..] else {
        return Err(format!("{} green nodes", pointer.len()));
    };
    if !out.rooted[p] {
        return Err("pointer is not rooted".into());
    }
    if out.n() != input.n() + 1 {
        return Err(format!("{} nodes for an input of {}", out.n(), input.n()));
    }
    let mut next = vec![None; out.n()];
    for e in out.edges.iter().filter(|e| e.mark == EdgeMark::Blue) {
        if next[e.src].replace(e.tgt).is_some() {
            return Err("two blue edges leave one node".into());
        }
    }
    let mut pos = vec![usize::MAX; out.n()];
    let mut cur = next[p];
    let mut k = 0;
    while let Some(v) = cur {
        if pos[v] != usize::MAX || v == p {
            return Err("blue chain revisits a node".into());
        }
        if out.marks[v] != NodeMark::Blue {
            return Err("chain node is not blue".into());
        }
        pos[v] = k;
        k += 1;
        cur = next[v];
    }
    if k != input.n() {
        return Err(format!("chain covers {k} of {} nodes", input.n()));
    }
    let mut plain: Vec<(NodeId, NodeId)> = Vec::new();
    for e in out.edges.iter().filter(|e| e.mark == EdgeMark::None) {
        if pos[e.src] >= pos[e.tgt] {
            return Err(format!("edge {:?} goes backwards", e.id));
        }
        plain.push((out.ids[e.src], out.ids[e.tgt]));
    }
    if out.edges.len() != input.edges.len() + input.n() {
        return Err("unexpected extra edges".into());
    }
    let mut orig: Vec<(NodeId, NodeId)> = input
        .edges
        .iter()
        .map(|e| (input.ids[e.src], input.ids[e.tgt]))
        .collect();
    plain.sort();
    orig.sort();
    if plain != orig {
        return Err("input edges changed".into());
    }
    Ok(())
}

/// Checks a 2-colour result: a proper red/blue colouring when the input is
/// bipartite, otherwise the unchanged input.
pub fn check_two_colour(input: &HostGraph, output: &HostGraph) -> Result<(), String> {
    let s = Snap::of(input);
    if two_colouring(&s).is_none() {
        return if print_host(input) == print_host(output) {
            Ok(())
        } else {
            Err("non-bipartite input was modified".into())
        };
    }
    let out = Snap::of(output);
    if out.n() != s.n() || out.edges.len() != s.edges.len() {
        return Err("graph shape changed".into());
    }
    for v in 0..out.n() {
        if !matches!(out.marks[v], NodeMark::Red | NodeMark::Blue) || out.rooted[v] {
            return Err(format!("node {v} is {:?}, rooted {}", out.marks[v], out.rooted[v]));
        }
    }
    for e in &out.edges {
        if out.marks[e.src] == out.marks[e.tgt] {
            return Err(format!("edge {:?} joins equal colours", e.id));
        }
        if e.mark != EdgeMark::None {
            return Err("edge marks changed".into());
        }
    }
    Ok(())
}
