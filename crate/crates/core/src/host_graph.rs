//! Host graph store.
//!
//! Nodes and edges live in dense vectors indexed by their identifiers. Every
//! membership list (all nodes, roots, per-node in/out edges) is an intrusive
//! doubly linked list so that insertion, removal and `next` are all O(1).
//! Deleted records stay in place (marked dead) so identifiers are never
//! handed out twice; a rollback that undoes a creation pops the record again.

use std::cell::Cell;
use std::fmt;

use thiserror::Error;

const NIL: u32 = u32::MAX;

/// Identifier of a host node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

/// Identifier of a host edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// One element of a label list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Int(i64),
    Str(String),
}

/// A label is a (possibly empty) list of atoms. The empty list is the
/// "unlabelled" label, written `empty` in text.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(pub Vec<Atom>);

impl Label {
    pub fn empty() -> Label {
        Label(Vec::new())
    }

    pub fn int(i: i64) -> Label {
        Label(vec![Atom::Int(i)])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Marks a host node can carry.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeMark {
    #[default]
    None,
    Red,
    Green,
    Blue,
    Grey,
}

/// Marks a host edge can carry.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeMark {
    #[default]
    None,
    Red,
    Green,
    Blue,
    Dashed,
}

impl NodeMark {
    pub const ALL: [NodeMark; 5] = [
        NodeMark::None,
        NodeMark::Red,
        NodeMark::Green,
        NodeMark::Blue,
        NodeMark::Grey,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NodeMark::None => "none",
            NodeMark::Red => "red",
            NodeMark::Green => "green",
            NodeMark::Blue => "blue",
            NodeMark::Grey => "grey",
        }
    }

    pub fn from_name(s: &str) -> Option<NodeMark> {
        NodeMark::ALL.into_iter().find(|m| m.name() == s)
    }
}

impl EdgeMark {
    pub const ALL: [EdgeMark; 5] = [
        EdgeMark::None,
        EdgeMark::Red,
        EdgeMark::Green,
        EdgeMark::Blue,
        EdgeMark::Dashed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EdgeMark::None => "none",
            EdgeMark::Red => "red",
            EdgeMark::Green => "green",
            EdgeMark::Blue => "blue",
            EdgeMark::Dashed => "dashed",
        }
    }

    pub fn from_name(s: &str) -> Option<EdgeMark> {
        EdgeMark::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("node {0} still has incident edges")]
    DanglingViolation(NodeId),
    #[error("cursor refers to a deleted item")]
    StaleCursor,
    #[error("rollback or release of a checkpoint that is not the innermost one")]
    CheckpointDiscipline,
}

#[derive(Clone, Debug)]
pub(crate) struct NodeRec {
    pub(crate) label: Label,
    pub(crate) mark: NodeMark,
    pub(crate) rooted: bool,
    pub(crate) matched: bool,
    pub(crate) alive: bool,
    prev: u32,
    next: u32,
    root_prev: u32,
    root_next: u32,
    pub(crate) first_out: u32,
    last_out: u32,
    pub(crate) first_in: u32,
    last_in: u32,
    pub(crate) indeg: u32,
    pub(crate) outdeg: u32,
}

#[derive(Clone, Debug)]
pub(crate) struct EdgeRec {
    pub(crate) src: u32,
    pub(crate) tgt: u32,
    pub(crate) label: Label,
    pub(crate) mark: EdgeMark,
    pub(crate) matched: bool,
    pub(crate) alive: bool,
    out_prev: u32,
    pub(crate) out_next: u32,
    in_prev: u32,
    pub(crate) in_next: u32,
}

#[derive(Clone, Copy, Debug, Default)]
struct ListHead {
    first: u32,
    last: u32,
    len: u32,
}

impl ListHead {
    fn new() -> ListHead {
        ListHead {
            first: NIL,
            last: NIL,
            len: 0,
        }
    }
}

/// Inverse operations recorded while a checkpoint is open.
#[derive(Clone, Debug)]
enum Undo {
    AddNode(u32),
    AddEdge(u32),
    DeleteNode {
        id: u32,
        prev: u32,
        next: u32,
        root_links: Option<(u32, u32)>,
    },
    DeleteEdge {
        id: u32,
        out_prev: u32,
        out_next: u32,
        in_prev: u32,
        in_next: u32,
    },
    NodeLabel(u32, Label),
    EdgeLabel(u32, Label),
    NodeMark(u32, NodeMark),
    EdgeMark(u32, EdgeMark),
    /// Root flag changed; when it was previously set, the old list position.
    Root {
        id: u32,
        was: bool,
        links: (u32, u32),
    },
}

/// Token returned by [`HostGraph::checkpoint`].
#[derive(Debug, PartialEq, Eq)]
#[must_use]
pub struct Checkpoint {
    depth: usize,
}

/// Read-only view of a live node.
#[derive(Clone, Copy)]
pub struct NodeView<'g> {
    rec: &'g NodeRec,
}

impl<'g> NodeView<'g> {
    pub fn label(&self) -> &'g Label {
        &self.rec.label
    }
    pub fn mark(&self) -> NodeMark {
        self.rec.mark
    }
    pub fn rooted(&self) -> bool {
        self.rec.rooted
    }
    pub fn indegree(&self) -> usize {
        self.rec.indeg as usize
    }
    pub fn outdegree(&self) -> usize {
        self.rec.outdeg as usize
    }
}

/// Read-only view of a live edge.
#[derive(Clone, Copy)]
pub struct EdgeView<'g> {
    rec: &'g EdgeRec,
}

impl<'g> EdgeView<'g> {
    pub fn source(&self) -> NodeId {
        NodeId(self.rec.src)
    }
    pub fn target(&self) -> NodeId {
        NodeId(self.rec.tgt)
    }
    pub fn label(&self) -> &'g Label {
        &self.rec.label
    }
    pub fn mark(&self) -> EdgeMark {
        self.rec.mark
    }
}

/// Labelled, marked, rooted directed multigraph.
#[derive(Clone, Debug)]
pub struct HostGraph {
    pub(crate) nodes: Vec<NodeRec>,
    pub(crate) edges: Vec<EdgeRec>,
    node_list: ListHead,
    root_list: ListHead,
    edge_count: usize,
    undo: Vec<Undo>,
    /// Undo-log length at each open checkpoint, innermost last.
    checkpoints: Vec<usize>,
    probes: Cell<u64>,
}

impl Default for HostGraph {
    fn default() -> Self {
        HostGraph::new()
    }
}

impl HostGraph {
    pub fn new() -> HostGraph {
        HostGraph {
            nodes: Vec::new(),
            edges: Vec::new(),
            node_list: ListHead::new(),
            root_list: ListHead::new(),
            edge_count: 0,
            undo: Vec::new(),
            checkpoints: Vec::new(),
            probes: Cell::new(0),
        }
    }

    pub fn with_capacity(nodes: usize, edges: usize) -> HostGraph {
        let mut g = HostGraph::new();
        g.nodes.reserve(nodes);
        g.edges.reserve(edges);
        g
    }

    // ---- sizes -------------------------------------------------------

    pub fn node_count(&self) -> usize {
        self.node_list.len as usize
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn root_count(&self) -> usize {
        self.root_list.len as usize
    }

    /// Number of nodes plus number of edges.
    pub fn size(&self) -> usize {
        self.node_count() + self.edge_count()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count() == 0
    }

    // ---- lookups -----------------------------------------------------

    pub fn contains_node(&self, v: NodeId) -> bool {
        self.nodes.get(v.index()).is_some_and(|n| n.alive)
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.get(e.index()).is_some_and(|r| r.alive)
    }

    pub fn node(&self, v: NodeId) -> Result<NodeView<'_>, GraphError> {
        match self.nodes.get(v.index()) {
            Some(rec) if rec.alive => Ok(NodeView { rec }),
            _ => Err(GraphError::UnknownNode(v)),
        }
    }

    pub fn edge(&self, e: EdgeId) -> Result<EdgeView<'_>, GraphError> {
        match self.edges.get(e.index()) {
            Some(rec) if rec.alive => Ok(EdgeView { rec }),
            _ => Err(GraphError::UnknownEdge(e)),
        }
    }

    pub fn indegree(&self, v: NodeId) -> Result<usize, GraphError> {
        self.node(v).map(|n| n.indegree())
    }

    pub fn outdegree(&self, v: NodeId) -> Result<usize, GraphError> {
        self.node(v).map(|n| n.outdegree())
    }

    // ---- mutation ----------------------------------------------------

    fn logging(&self) -> bool {
        !self.checkpoints.is_empty()
    }

    pub fn add_node(&mut self, label: Label, mark: NodeMark, rooted: bool) -> NodeId {
        let id = self.nodes.len() as u32;
        self.nodes.push(NodeRec {
            label,
            mark,
            rooted: false,
            matched: false,
            alive: true,
            prev: NIL,
            next: NIL,
            root_prev: NIL,
            root_next: NIL,
            first_out: NIL,
            last_out: NIL,
            first_in: NIL,
            last_in: NIL,
            indeg: 0,
            outdeg: 0,
        });
        self.link_node(id, self.node_list.last, NIL);
        if rooted {
            self.nodes[id as usize].rooted = true;
            self.link_root(id, self.root_list.last, NIL);
        }
        if self.logging() {
            self.undo.push(Undo::AddNode(id));
        }
        NodeId(id)
    }

    pub fn add_edge(
        &mut self,
        src: NodeId,
        tgt: NodeId,
        label: Label,
        mark: EdgeMark,
    ) -> Result<EdgeId, GraphError> {
        if !self.contains_node(src) {
            return Err(GraphError::UnknownNode(src));
        }
        if !self.contains_node(tgt) {
            return Err(GraphError::UnknownNode(tgt));
        }
        let id = self.edges.len() as u32;
        self.edges.push(EdgeRec {
            src: src.0,
            tgt: tgt.0,
            label,
            mark,
            matched: false,
            alive: true,
            out_prev: NIL,
            out_next: NIL,
            in_prev: NIL,
            in_next: NIL,
        });
        let out_last = self.nodes[src.index()].last_out;
        let in_last = self.nodes[tgt.index()].last_in;
        self.link_edge(id, out_last, NIL, in_last, NIL);
        if self.logging() {
            self.undo.push(Undo::AddEdge(id));
        }
        Ok(EdgeId(id))
    }

    pub fn delete_edge(&mut self, e: EdgeId) -> Result<(), GraphError> {
        if !self.contains_edge(e) {
            return Err(GraphError::UnknownEdge(e));
        }
        let r = &self.edges[e.index()];
        let undo = Undo::DeleteEdge {
            id: e.0,
            out_prev: r.out_prev,
            out_next: r.out_next,
            in_prev: r.in_prev,
            in_next: r.in_next,
        };
        self.unlink_edge(e.0);
        self.edges[e.index()].alive = false;
        if self.logging() {
            self.undo.push(undo);
        }
        Ok(())
    }

    pub fn delete_node(&mut self, v: NodeId) -> Result<(), GraphError> {
        let n = self.node(v)?;
        if n.indegree() + n.outdegree() > 0 {
            return Err(GraphError::DanglingViolation(v));
        }
        let r = &self.nodes[v.index()];
        let undo = Undo::DeleteNode {
            id: v.0,
            prev: r.prev,
            next: r.next,
            root_links: r.rooted.then_some((r.root_prev, r.root_next)),
        };
        if r.rooted {
            self.unlink_root(v.0);
        }
        self.unlink_node(v.0);
        self.nodes[v.index()].alive = false;
        if self.logging() {
            self.undo.push(undo);
        }
        Ok(())
    }

    pub fn relabel_node(&mut self, v: NodeId, label: Label) -> Result<(), GraphError> {
        self.node(v)?;
        let old = std::mem::replace(&mut self.nodes[v.index()].label, label);
        if self.logging() {
            self.undo.push(Undo::NodeLabel(v.0, old));
        }
        Ok(())
    }

    pub fn relabel_edge(&mut self, e: EdgeId, label: Label) -> Result<(), GraphError> {
        self.edge(e)?;
        let old = std::mem::replace(&mut self.edges[e.index()].label, label);
        if self.logging() {
            self.undo.push(Undo::EdgeLabel(e.0, old));
        }
        Ok(())
    }

    pub fn set_node_mark(&mut self, v: NodeId, mark: NodeMark) -> Result<(), GraphError> {
        self.node(v)?;
        let old = std::mem::replace(&mut self.nodes[v.index()].mark, mark);
        if self.logging() && old != mark {
            self.undo.push(Undo::NodeMark(v.0, old));
        }
        Ok(())
    }

    pub fn set_edge_mark(&mut self, e: EdgeId, mark: EdgeMark) -> Result<(), GraphError> {
        self.edge(e)?;
        let old = std::mem::replace(&mut self.edges[e.index()].mark, mark);
        if self.logging() && old != mark {
            self.undo.push(Undo::EdgeMark(e.0, old));
        }
        Ok(())
    }

    pub fn set_root(&mut self, v: NodeId, rooted: bool) -> Result<(), GraphError> {
        let was = self.node(v)?.rooted();
        if was == rooted {
            return Ok(());
        }
        let r = &self.nodes[v.index()];
        let links = (r.root_prev, r.root_next);
        if rooted {
            self.nodes[v.index()].rooted = true;
            self.link_root(v.0, self.root_list.last, NIL);
        } else {
            self.unlink_root(v.0);
            self.nodes[v.index()].rooted = false;
        }
        if self.logging() {
            self.undo.push(Undo::Root {
                id: v.0,
                was,
                links,
            });
        }
        Ok(())
    }

    // ---- matched flags -----------------------------------------------

    pub fn node_matched(&self, v: NodeId) -> bool {
        self.nodes[v.index()].matched
    }

    pub fn set_node_matched(&mut self, v: NodeId, on: bool) {
        self.nodes[v.index()].matched = on;
    }

    pub fn edge_matched(&self, e: EdgeId) -> bool {
        self.edges[e.index()].matched
    }

    pub fn set_edge_matched(&mut self, e: EdgeId, on: bool) {
        self.edges[e.index()].matched = on;
    }

    /// True when no live item carries a matched flag (full scan; for tests).
    pub fn all_matched_clear(&self) -> bool {
        self.nodes.iter().all(|n| !n.matched) && self.edges.iter().all(|e| !e.matched)
    }

    // ---- cursor iteration (counted) ----------------------------------

    /// Number of first/next calls made through the cursor API.
    pub fn probe_count(&self) -> u64 {
        self.probes.get()
    }

    pub fn reset_probe_count(&self) {
        self.probes.set(0);
    }

    fn probe(&self) {
        self.probes.set(self.probes.get() + 1);
    }

    fn opt_node(i: u32) -> Option<NodeId> {
        (i != NIL).then_some(NodeId(i))
    }

    fn opt_edge(i: u32) -> Option<EdgeId> {
        (i != NIL).then_some(EdgeId(i))
    }

    pub fn first_host_node(&self) -> Option<NodeId> {
        self.probe();
        Self::opt_node(self.node_list.first)
    }

    pub fn next_host_node(&self, cur: NodeId) -> Result<Option<NodeId>, GraphError> {
        self.probe();
        match self.nodes.get(cur.index()) {
            Some(n) if n.alive => Ok(Self::opt_node(n.next)),
            _ => Err(GraphError::StaleCursor),
        }
    }

    pub fn first_root_node(&self) -> Option<NodeId> {
        self.probe();
        Self::opt_node(self.root_list.first)
    }

    pub fn next_root_node(&self, cur: NodeId) -> Result<Option<NodeId>, GraphError> {
        self.probe();
        match self.nodes.get(cur.index()) {
            Some(n) if n.alive && n.rooted => Ok(Self::opt_node(n.root_next)),
            _ => Err(GraphError::StaleCursor),
        }
    }

    pub fn first_out_edge(&self, v: NodeId) -> Result<Option<EdgeId>, GraphError> {
        self.probe();
        let n = self.node(v)?;
        Ok(Self::opt_edge(n.rec.first_out))
    }

    pub fn next_out_edge(&self, cur: EdgeId) -> Result<Option<EdgeId>, GraphError> {
        self.probe();
        match self.edges.get(cur.index()) {
            Some(e) if e.alive => Ok(Self::opt_edge(e.out_next)),
            _ => Err(GraphError::StaleCursor),
        }
    }

    pub fn first_in_edge(&self, v: NodeId) -> Result<Option<EdgeId>, GraphError> {
        self.probe();
        let n = self.node(v)?;
        Ok(Self::opt_edge(n.rec.first_in))
    }

    pub fn next_in_edge(&self, cur: EdgeId) -> Result<Option<EdgeId>, GraphError> {
        self.probe();
        match self.edges.get(cur.index()) {
            Some(e) if e.alive => Ok(Self::opt_edge(e.in_next)),
            _ => Err(GraphError::StaleCursor),
        }
    }

    // ---- uncounted iterators -----------------------------------------

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        let mut cur = self.node_list.first;
        std::iter::from_fn(move || {
            (cur != NIL).then(|| {
                let id = cur;
                cur = self.nodes[id as usize].next;
                NodeId(id)
            })
        })
    }

    pub fn roots(&self) -> impl Iterator<Item = NodeId> + '_ {
        let mut cur = self.root_list.first;
        std::iter::from_fn(move || {
            (cur != NIL).then(|| {
                let id = cur;
                cur = self.nodes[id as usize].root_next;
                NodeId(id)
            })
        })
    }

    pub fn out_edges(&self, v: NodeId) -> impl Iterator<Item = EdgeId> + '_ {
        let mut cur = self.nodes.get(v.index()).map_or(NIL, |n| n.first_out);
        std::iter::from_fn(move || {
            (cur != NIL).then(|| {
                let id = cur;
                cur = self.edges[id as usize].out_next;
                EdgeId(id)
            })
        })
    }

    pub fn in_edges(&self, v: NodeId) -> impl Iterator<Item = EdgeId> + '_ {
        let mut cur = self.nodes.get(v.index()).map_or(NIL, |n| n.first_in);
        std::iter::from_fn(move || {
            (cur != NIL).then(|| {
                let id = cur;
                cur = self.edges[id as usize].in_next;
                EdgeId(id)
            })
        })
    }

    /// All live edges: out-lists of the nodes, in node-list order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.nodes().flat_map(move |v| self.out_edges(v))
    }

    // ---- checkpoints -------------------------------------------------

    /// Opens a checkpoint. Checkpoints nest; each must be closed by
    /// [`rollback`](Self::rollback) or [`release`](Self::release), innermost first.
    pub fn checkpoint(&mut self) -> Checkpoint {
        self.checkpoints.push(self.undo.len());
        Checkpoint {
            depth: self.checkpoints.len(),
        }
    }

    pub fn checkpoint_depth(&self) -> usize {
        self.checkpoints.len()
    }

    /// Number of undo records logged since `cp` was opened.
    pub fn changes_since(&self, cp: &Checkpoint) -> usize {
        self.checkpoints
            .get(cp.depth.wrapping_sub(1))
            .map_or(0, |&mark| self.undo.len() - mark)
    }

    /// Undoes every change since `cp`, restoring the exact prior state.
    pub fn rollback(&mut self, cp: Checkpoint) -> Result<(), GraphError> {
        if cp.depth != self.checkpoints.len() || cp.depth == 0 {
            return Err(GraphError::CheckpointDiscipline);
        }
        let mark = self.checkpoints.pop().expect("depth checked");
        while self.undo.len() > mark {
            let u = self.undo.pop().expect("length checked");
            self.revert(u);
        }
        Ok(())
    }

    /// Closes `cp`, keeping the changes made since it was opened.
    pub fn release(&mut self, cp: Checkpoint) -> Result<(), GraphError> {
        if cp.depth != self.checkpoints.len() || cp.depth == 0 {
            return Err(GraphError::CheckpointDiscipline);
        }
        self.checkpoints.pop();
        if self.checkpoints.is_empty() {
            self.undo.clear();
        }
        Ok(())
    }

    fn revert(&mut self, u: Undo) {
        match u {
            Undo::AddNode(id) => {
                let rooted = self.nodes[id as usize].rooted;
                if rooted {
                    self.unlink_root(id);
                }
                self.unlink_node(id);
                debug_assert_eq!(id as usize, self.nodes.len() - 1);
                self.nodes.pop();
            }
            Undo::AddEdge(id) => {
                self.unlink_edge(id);
                debug_assert_eq!(id as usize, self.edges.len() - 1);
                self.edges.pop();
            }
            Undo::DeleteNode {
                id,
                prev,
                next,
                root_links,
            } => {
                self.nodes[id as usize].alive = true;
                self.link_node(id, prev, next);
                if let Some((rp, rn)) = root_links {
                    self.link_root(id, rp, rn);
                }
            }
            Undo::DeleteEdge {
                id,
                out_prev,
                out_next,
                in_prev,
                in_next,
            } => {
                self.edges[id as usize].alive = true;
                self.link_edge(id, out_prev, out_next, in_prev, in_next);
            }
            Undo::NodeLabel(id, l) => self.nodes[id as usize].label = l,
            Undo::EdgeLabel(id, l) => self.edges[id as usize].label = l,
            Undo::NodeMark(id, m) => self.nodes[id as usize].mark = m,
            Undo::EdgeMark(id, m) => self.edges[id as usize].mark = m,
            Undo::Root { id, was, links } => {
                if was {
                    self.nodes[id as usize].rooted = true;
                    self.link_root(id, links.0, links.1);
                } else {
                    self.unlink_root(id);
                    self.nodes[id as usize].rooted = false;
                }
            }
        }
    }

    pub(crate) fn first_node_raw(&self) -> u32 {
        self.node_list.first
    }

    pub(crate) fn first_root_raw(&self) -> u32 {
        self.root_list.first
    }

    // ---- list plumbing -----------------------------------------------

    fn link_node(&mut self, id: u32, prev: u32, next: u32) {
        {
            let n = &mut self.nodes[id as usize];
            n.prev = prev;
            n.next = next;
        }
        if prev == NIL {
            self.node_list.first = id;
        } else {
            self.nodes[prev as usize].next = id;
        }
        if next == NIL {
            self.node_list.last = id;
        } else {
            self.nodes[next as usize].prev = id;
        }
        self.node_list.len += 1;
    }

    fn unlink_node(&mut self, id: u32) {
        let (prev, next) = {
            let n = &self.nodes[id as usize];
            (n.prev, n.next)
        };
        if prev == NIL {
            self.node_list.first = next;
        } else {
            self.nodes[prev as usize].next = next;
        }
        if next == NIL {
            self.node_list.last = prev;
        } else {
            self.nodes[next as usize].prev = prev;
        }
        self.node_list.len -= 1;
    }

    fn link_root(&mut self, id: u32, prev: u32, next: u32) {
        {
            let n = &mut self.nodes[id as usize];
            n.root_prev = prev;
            n.root_next = next;
        }
        if prev == NIL {
            self.root_list.first = id;
        } else {
            self.nodes[prev as usize].root_next = id;
        }
        if next == NIL {
            self.root_list.last = id;
        } else {
            self.nodes[next as usize].root_prev = id;
        }
        self.root_list.len += 1;
    }

    fn unlink_root(&mut self, id: u32) {
        let (prev, next) = {
            let n = &self.nodes[id as usize];
            (n.root_prev, n.root_next)
        };
        if prev == NIL {
            self.root_list.first = next;
        } else {
            self.nodes[prev as usize].root_next = next;
        }
        if next == NIL {
            self.root_list.last = prev;
        } else {
            self.nodes[next as usize].root_prev = prev;
        }
        let n = &mut self.nodes[id as usize];
        n.root_prev = NIL;
        n.root_next = NIL;
        self.root_list.len -= 1;
    }

    fn link_edge(&mut self, id: u32, out_prev: u32, out_next: u32, in_prev: u32, in_next: u32) {
        let (src, tgt) = {
            let e = &mut self.edges[id as usize];
            e.out_prev = out_prev;
            e.out_next = out_next;
            e.in_prev = in_prev;
            e.in_next = in_next;
            (e.src, e.tgt)
        };
        if out_prev == NIL {
            self.nodes[src as usize].first_out = id;
        } else {
            self.edges[out_prev as usize].out_next = id;
        }
        if out_next == NIL {
            self.nodes[src as usize].last_out = id;
        } else {
            self.edges[out_next as usize].out_prev = id;
        }
        if in_prev == NIL {
            self.nodes[tgt as usize].first_in = id;
        } else {
            self.edges[in_prev as usize].in_next = id;
        }
        if in_next == NIL {
            self.nodes[tgt as usize].last_in = id;
        } else {
            self.edges[in_next as usize].in_prev = id;
        }
        self.nodes[src as usize].outdeg += 1;
        self.nodes[tgt as usize].indeg += 1;
        self.edge_count += 1;
    }

    fn unlink_edge(&mut self, id: u32) {
        let e = self.edges[id as usize].clone_links();
        if e.out_prev == NIL {
            self.nodes[e.src as usize].first_out = e.out_next;
        } else {
            self.edges[e.out_prev as usize].out_next = e.out_next;
        }
        if e.out_next == NIL {
            self.nodes[e.src as usize].last_out = e.out_prev;
        } else {
            self.edges[e.out_next as usize].out_prev = e.out_prev;
        }
        if e.in_prev == NIL {
            self.nodes[e.tgt as usize].first_in = e.in_next;
        } else {
            self.edges[e.in_prev as usize].in_next = e.in_next;
        }
        if e.in_next == NIL {
            self.nodes[e.tgt as usize].last_in = e.in_prev;
        } else {
            self.edges[e.in_next as usize].in_prev = e.in_prev;
        }
        self.nodes[e.src as usize].outdeg -= 1;
        self.nodes[e.tgt as usize].indeg -= 1;
        self.edge_count -= 1;
    }
}

impl NodeRec {
    pub(crate) fn next_raw(&self) -> u32 {
        self.next
    }

    pub(crate) fn root_next_raw(&self) -> u32 {
        self.root_next
    }
}

struct EdgeLinks {
    src: u32,
    tgt: u32,
    out_prev: u32,
    out_next: u32,
    in_prev: u32,
    in_next: u32,
}

impl EdgeRec {
    fn clone_links(&self) -> EdgeLinks {
        EdgeLinks {
            src: self.src,
            tgt: self.tgt,
            out_prev: self.out_prev,
            out_next: self.out_next,
            in_prev: self.in_prev,
            in_next: self.in_next,
        }
    }
}
