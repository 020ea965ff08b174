//! Brute-force big-step reading of the small-step inference rules: computes
//! every outcome a command can reach from a graph, exploring all rule and
//! match choices and both branches of `or`.

use std::collections::{BTreeSet, HashMap, HashSet};

use gp2_core::interp::Command;
use gp2_core::rule::{apply_at, Match, Rule};
use gp2_core::HostGraph;

use super::{all_matches, canonical};

/// Observable final outcome, graphs up to isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Final {
    Graph(String),
    Fail,
    Diverge,
}

#[derive(Clone, Debug)]
enum Res {
    Ok(HostGraph),
    Fail,
    Break(HostGraph),
    Diverge,
}

pub struct Enumerator<'r> {
    pub rules: &'r [Rule],
    /// Loop exploration gives up beyond this many states.
    pub max_states: usize,
}

impl Enumerator<'_> {
    pub fn outcomes(&self, c: &Command, g: &HostGraph) -> BTreeSet<Final> {
        self.sem(c, g)
            .into_iter()
            .map(|r| match r {
                Res::Ok(h) => Final::Graph(canonical(&h)),
                Res::Fail => Final::Fail,
                Res::Diverge => Final::Diverge,
                Res::Break(_) => panic!("break escaped every loop"),
            })
            .collect()
    }

    fn dedup(rs: Vec<Res>) -> Vec<Res> {
        let mut seen = HashSet::new();
        rs.into_iter()
            .filter(|r| {
                let key = match r {
                    Res::Ok(h) => format!("ok {}", canonical(h)),
                    Res::Break(h) => format!("break {}", canonical(h)),
                    Res::Fail => "fail".into(),
                    Res::Diverge => "diverge".into(),
                };
                seen.insert(key)
            })
            .collect()
    }

    fn apply_all(&self, rules: &[usize], g: &HostGraph) -> Vec<Res> {
        let mut out = Vec::new();
        for &i in rules {
            let rule = &self.rules[i];
            for (nodes, edges) in all_matches(g, rule) {
                let mut h = g.clone();
                let m = Match::from_images(&h, rule, nodes, edges);
                apply_at(&mut h, rule, &m).expect("brute-force match is applicable");
                out.push(Res::Ok(h));
            }
        }
        if out.is_empty() {
            out.push(Res::Fail);
        }
        out
    }

    fn sem(&self, c: &Command, g: &HostGraph) -> Vec<Res> {
        let out = match c {
            Command::Call(rules) => self.apply_all(rules, g),
            Command::Skip => vec![Res::Ok(g.clone())],
            Command::Fail => vec![Res::Fail],
            Command::Break => vec![Res::Break(g.clone())],
            Command::Seq(items) => {
                let mut cur = vec![Res::Ok(g.clone())];
                for it in items {
                    let mut next = Vec::new();
                    for r in cur {
                        match r {
                            Res::Ok(h) => next.extend(self.sem(it, &h)),
                            other => next.push(other),
                        }
                    }
                    cur = Self::dedup(next);
                }
                cur
            }
            Command::Or(a, b) => {
                let mut v = self.sem(a, g);
                v.extend(self.sem(b, g));
                v
            }
            Command::If(cond, then, els) => {
                let mut out = Vec::new();
                for r in self.sem(cond, g) {
                    match r {
                        Res::Ok(_) => out.extend(self.sem(then, g)),
                        Res::Fail => out.extend(self.sem(els, g)),
                        Res::Diverge => out.push(Res::Diverge),
                        Res::Break(_) => panic!("break in a condition"),
                    }
                }
                out
            }
            Command::Try(cond, then, els) => {
                let mut out = Vec::new();
                for r in self.sem(cond, g) {
                    match r {
                        Res::Ok(h) => out.extend(self.sem(then, &h)),
                        Res::Fail => out.extend(self.sem(els, g)),
                        Res::Diverge => out.push(Res::Diverge),
                        Res::Break(_) => panic!("break in a condition"),
                    }
                }
                out
            }
            Command::Loop(body) => self.sem_loop(body, g),
        };
        Self::dedup(out)
    }

    /// Explores loop-head states; a cycle among them means some run never
    /// leaves the loop.
    fn sem_loop(&self, body: &Command, g: &HostGraph) -> Vec<Res> {
        let mut out = Vec::new();
        let mut succ: HashMap<String, Vec<String>> = HashMap::new();
        let start = canonical(g);
        let mut todo = vec![(start.clone(), g.clone())];
        let mut seen = HashSet::from([start.clone()]);
        while let Some((key, h)) = todo.pop() {
            assert!(seen.len() <= self.max_states, "loop state space too large");
            let mut next = Vec::new();
            for r in self.sem(body, &h) {
                match r {
                    Res::Ok(h2) => {
                        let k2 = canonical(&h2);
                        next.push(k2.clone());
                        if seen.insert(k2.clone()) {
                            todo.push((k2, h2));
                        }
                    }
                    Res::Fail => out.push(Res::Ok(h.clone())),
                    Res::Break(h2) => out.push(Res::Ok(h2)),
                    Res::Diverge => out.push(Res::Diverge),
                }
            }
            succ.insert(key, next);
        }
        if has_cycle(&start, &succ) {
            out.push(Res::Diverge);
        }
        out
    }
}

fn has_cycle(start: &str, succ: &HashMap<String, Vec<String>>) -> bool {
    // Iterative three-colour DFS.
    let mut colour: HashMap<&str, u8> = HashMap::new();
    let mut stack: Vec<(&str, usize)> = vec![(start, 0)];
    colour.insert(start, 1);
    while let Some(&mut (v, ref mut i)) = stack.last_mut() {
        let next = &succ[v];
        if *i < next.len() {
            let w = next[*i].as_str();
            *i += 1;
            match colour.get(w).copied().unwrap_or(0) {
                0 => {
                    colour.insert(w, 1);
                    stack.push((w, 0));
                }
                1 => return true,
                _ => {}
            }
        } else {
            colour.insert(v, 2);
            stack.pop();
        }
    }
    false
}
