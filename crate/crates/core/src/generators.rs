//! Input graph generators for the benchmark classes.
//!
//! Every generated graph is an input graph: grey unrooted nodes, unmarked
//! edges, empty labels. The class generators are deterministic in `n`;
//! [`random_graph`] is seeded and exists for fuzzing only.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::host_graph::{EdgeMark, HostGraph, Label, NodeId, NodeMark};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphClass {
    Discrete,
    Grid,
    GridChain,
    BinaryTree,
    Star,
    Cycle,
    Sun,
    LinkedList,
}

impl GraphClass {
    pub const ALL: [GraphClass; 8] = [
        GraphClass::Discrete,
        GraphClass::Grid,
        GraphClass::GridChain,
        GraphClass::BinaryTree,
        GraphClass::Star,
        GraphClass::Cycle,
        GraphClass::Sun,
        GraphClass::LinkedList,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GraphClass::Discrete => "discrete",
            GraphClass::Grid => "grid",
            GraphClass::GridChain => "grid-chain",
            GraphClass::BinaryTree => "binary-tree",
            GraphClass::Star => "star",
            GraphClass::Cycle => "cycle",
            GraphClass::Sun => "sun",
            GraphClass::LinkedList => "linked-list",
        }
    }

    /// Smallest accepted `n`.
    pub fn min_nodes(self) -> usize {
        match self {
            GraphClass::Sun => 4,
            _ => 1,
        }
    }

    /// Whether node degrees stay bounded as `n` grows.
    pub fn bounded_degree(self) -> bool {
        self != GraphClass::Star
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("unknown graph class `{0}`")]
    UnknownClass(String),
    #[error("{class} needs at least {min} nodes, got {n}")]
    TooSmall {
        class: GraphClass,
        n: usize,
        min: usize,
    },
}

impl FromStr for GraphClass {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GraphClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| GenError::UnknownClass(s.to_string()))
    }
}

fn grey(g: &mut HostGraph) -> NodeId {
    g.add_node(Label::empty(), NodeMark::Grey, false)
}

fn edge(g: &mut HostGraph, s: NodeId, t: NodeId) {
    g.add_edge(s, t, Label::empty(), EdgeMark::None)
        .expect("generator endpoints are live");
}

/// Builds a member of `class` with about `n` nodes.
///
/// Exact node counts: grid rounds up to a square, sun rounds down to an even
/// count, grid-chain uses `1 + 8k` nodes for `k = max(1, (n - 1) / 8)` grids.
pub fn generate(class: GraphClass, n: usize) -> Result<HostGraph, GenError> {
    if n < class.min_nodes() {
        return Err(GenError::TooSmall {
            class,
            n,
            min: class.min_nodes(),
        });
    }
    let mut g = HostGraph::with_capacity(n, 2 * n);
    match class {
        GraphClass::Discrete => {
            for _ in 0..n {
                grey(&mut g);
            }
        }
        GraphClass::LinkedList => {
            let v: Vec<_> = (0..n).map(|_| grey(&mut g)).collect();
            for w in v.windows(2) {
                edge(&mut g, w[0], w[1]);
            }
        }
        GraphClass::Cycle => {
            let v: Vec<_> = (0..n).map(|_| grey(&mut g)).collect();
            for i in 0..n {
                edge(&mut g, v[i], v[(i + 1) % n]);
            }
        }
        GraphClass::Star => {
            let c = grey(&mut g);
            for i in 1..n {
                let s = grey(&mut g);
                if i % 2 == 1 {
                    edge(&mut g, c, s);
                } else {
                    edge(&mut g, s, c);
                }
            }
        }
        GraphClass::BinaryTree => {
            let v: Vec<_> = (0..n).map(|_| grey(&mut g)).collect();
            for i in 0..n {
                for c in [2 * i + 1, 2 * i + 2] {
                    if c < n {
                        edge(&mut g, v[i], v[c]);
                    }
                }
            }
        }
        GraphClass::Grid => {
            let side = (1..).find(|s| s * s >= n).unwrap();
            let v: Vec<_> = (0..side * side).map(|_| grey(&mut g)).collect();
            for r in 0..side {
                for c in 0..side {
                    let i = r * side + c;
                    if c + 1 < side {
                        edge(&mut g, v[i], v[i + 1]);
                    }
                    if r + 1 < side {
                        edge(&mut g, v[i], v[i + side]);
                    }
                }
            }
        }
        GraphClass::Sun => {
            let k = n / 2;
            let mut pendant = Vec::with_capacity(k);
            let mut ring = Vec::with_capacity(k);
            for _ in 0..k {
                pendant.push(grey(&mut g));
                ring.push(grey(&mut g));
            }
            for i in 0..k {
                edge(&mut g, ring[i], ring[(i + 1) % k]);
            }
            for i in 0..k {
                edge(&mut g, pendant[i], ring[i]);
            }
        }
        GraphClass::GridChain => {
            let grids = ((n - 1) / 8).max(1);
            // Bottom-left corner of the next grid is the top-right corner of
            // the previous one.
            let mut corner = grey(&mut g);
            for _ in 0..grids {
                let mut cell = [[corner; 3]; 3];
                for (r, row) in cell.iter_mut().enumerate() {
                    for (c, slot) in row.iter_mut().enumerate() {
                        if (r, c) != (2, 0) {
                            *slot = grey(&mut g);
                        }
                    }
                }
                for r in 0..3 {
                    for c in 0..3 {
                        if c + 1 < 3 {
                            edge(&mut g, cell[r][c], cell[r][c + 1]);
                        }
                        if r + 1 < 3 {
                            edge(&mut g, cell[r][c], cell[r + 1][c]);
                        }
                    }
                }
                corner = cell[0][2];
            }
        }
    }
    Ok(g)
}

/// Grey unrooted nodes and unmarked edges throughout.
pub fn is_input_graph(g: &HostGraph) -> bool {
    g.nodes().all(|v| {
        let n = g.node(v).expect("iterated node is live");
        n.mark() == NodeMark::Grey && !n.rooted()
    }) && g
        .edges()
        .all(|e| g.edge(e).expect("iterated edge is live").mark() == EdgeMark::None)
}

/// Largest total degree over all nodes.
pub fn max_degree(g: &HostGraph) -> usize {
    g.nodes()
        .map(|v| g.indegree(v).unwrap() + g.outdegree(v).unwrap())
        .max()
        .unwrap_or(0)
}

/// Uniform random input graph with `nodes` nodes and `edges` edges; loops and
/// parallel edges allowed. For fuzzing, not benchmarking.
pub fn random_graph(seed: u64, nodes: usize, edges: usize) -> HostGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = HostGraph::with_capacity(nodes, edges);
    let v: Vec<_> = (0..nodes).map(|_| grey(&mut g)).collect();
    if nodes > 0 {
        for _ in 0..edges {
            let s = v[rng.gen_range(0..nodes)];
            let t = v[rng.gen_range(0..nodes)];
            edge(&mut g, s, t);
        }
    }
    g
}
