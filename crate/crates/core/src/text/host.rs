//! Single-pass reader for host graphs. Works on bytes and borrows names from
//! the input, so large graphs parse without per-token allocation.

use std::collections::HashMap;

use super::{Pos, TextError};
use crate::host_graph::{Atom, EdgeMark, HostGraph, Label, NodeId, NodeMark};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Id<'a> {
    Num(u64),
    Name(&'a str),
}

impl Id<'_> {
    fn text(self) -> String {
        match self {
            Id::Num(n) => n.to_string(),
            Id::Name(s) => s.to_string(),
        }
    }
}

/// Identifier table: small numbers index a vector, everything else hashes.
struct IdMap<'a, T: Copy> {
    dense: Vec<Option<T>>,
    sparse: HashMap<Id<'a>, T>,
}

const DENSE_LIMIT: u64 = 1 << 24;

impl<'a, T: Copy> IdMap<'a, T> {
    fn new() -> Self {
        IdMap {
            dense: Vec::new(),
            sparse: HashMap::new(),
        }
    }

    /// Returns false if `id` was already present.
    fn insert(&mut self, id: Id<'a>, v: T) -> bool {
        match id {
            Id::Num(n) if n < DENSE_LIMIT => {
                let n = n as usize;
                if n >= self.dense.len() {
                    self.dense.resize((n + 1).max(2 * self.dense.len()), None);
                }
                self.dense[n].replace(v).is_none()
            }
            _ => self.sparse.insert(id, v).is_none(),
        }
    }

    fn get(&self, id: Id<'a>) -> Option<T> {
        match id {
            Id::Num(n) if n < DENSE_LIMIT => self.dense.get(n as usize).copied().flatten(),
            _ => self.sparse.get(&id).copied(),
        }
    }
}

struct Reader<'a> {
    src: &'a str,
    b: &'a [u8],
    i: usize,
}

impl<'a> Reader<'a> {
    fn pos_at(&self, i: usize) -> Pos {
        let before = &self.src[..i];
        let line = before.bytes().filter(|&c| c == b'\n').count() + 1;
        let start = before.rfind('\n').map_or(0, |k| k + 1);
        Pos {
            line,
            col: before[start..].chars().count() + 1,
        }
    }

    fn syntax<T>(&self, at: usize, msg: impl Into<String>) -> Result<T, TextError> {
        let p = self.pos_at(at);
        Err(TextError::Syntax {
            line: p.line,
            col: p.col,
            msg: msg.into(),
        })
    }

    fn semantic<T>(&self, at: usize, msg: impl Into<String>) -> Result<T, TextError> {
        let p = self.pos_at(at);
        Err(TextError::Semantic {
            line: p.line,
            col: p.col,
            msg: msg.into(),
        })
    }

    fn ws(&mut self) {
        while self.i < self.b.len() {
            match self.b[self.i] {
                c if c.is_ascii_whitespace() => self.i += 1,
                b'/' if self.b.get(self.i + 1) == Some(&b'/') => {
                    while self.i < self.b.len() && self.b[self.i] != b'\n' {
                        self.i += 1;
                    }
                }
                _ => break,
            }
        }
    }

    /// Next significant byte, without consuming it.
    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.b.get(self.i).copied()
    }

    fn found(&mut self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(_) => {
                let ch = self.src[self.i..].chars().next().unwrap();
                format!("`{ch}`")
            }
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), TextError> {
        if self.eat(c) {
            Ok(())
        } else {
            let f = self.found();
            self.syntax(self.i, format!("expected `{}`, found {f}", c as char))
        }
    }

    fn word(&mut self) -> Option<&'a str> {
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.i;
                while self.i < self.b.len()
                    && (self.b[self.i].is_ascii_alphanumeric() || self.b[self.i] == b'_')
                {
                    self.i += 1;
                }
                Some(&self.src[start..self.i])
            }
            _ => None,
        }
    }

    fn int(&mut self) -> Result<Option<i64>, TextError> {
        let start = match self.peek() {
            Some(b'-') if self.b.get(self.i + 1).is_some_and(u8::is_ascii_digit) => self.i,
            Some(c) if c.is_ascii_digit() => self.i,
            _ => return Ok(None),
        };
        self.i += 1;
        while self.i < self.b.len() && self.b[self.i].is_ascii_digit() {
            self.i += 1;
        }
        match self.src[start..self.i].parse::<i64>() {
            Ok(v) => Ok(Some(v)),
            Err(e) => self.syntax(start, format!("bad integer: {e}")),
        }
    }

    fn item_id(&mut self) -> Result<Id<'a>, TextError> {
        if let Some(w) = self.word() {
            return Ok(Id::Name(w));
        }
        let at = self.i;
        match self.int()? {
            Some(n) if n >= 0 => Ok(Id::Num(n as u64)),
            Some(n) => self.syntax(at, format!("expected an identifier, found `{n}`")),
            None => {
                let f = self.found();
                self.syntax(self.i, format!("expected an identifier, found {f}"))
            }
        }
    }

    /// `(X)` directly after an identifier.
    fn flag(&mut self, letter: &str) -> bool {
        let save = self.i;
        if self.eat(b'(') && self.word() == Some(letter) && self.eat(b')') {
            return true;
        }
        self.i = save;
        false
    }

    fn string(&mut self) -> Result<String, TextError> {
        let start = self.i;
        self.i += 1;
        let mut s = String::new();
        loop {
            let Some(ch) = self.src[self.i..].chars().next() else {
                return self.syntax(start, "unterminated string");
            };
            self.i += ch.len_utf8();
            match ch {
                '"' => return Ok(s),
                '\n' => return self.syntax(start, "newline in string"),
                '\\' => {
                    let Some(esc) = self.src[self.i..].chars().next() else {
                        return self.syntax(start, "unterminated string");
                    };
                    self.i += esc.len_utf8();
                    match esc {
                        '"' | '\\' => s.push(esc),
                        _ => return self.syntax(self.i, format!("unknown escape \\{esc}")),
                    }
                }
                _ => s.push(ch),
            }
        }
    }

    fn label(&mut self) -> Result<Label, TextError> {
        let save = self.i;
        if self.word() == Some("empty") {
            return Ok(Label::empty());
        }
        self.i = save;
        let mut atoms = Vec::new();
        loop {
            self.ws();
            let at = self.i;
            if let Some(v) = self.int()? {
                atoms.push(Atom::Int(v));
            } else if self.peek() == Some(b'"') {
                atoms.push(Atom::Str(self.string()?));
            } else if let Some(w) = self.word() {
                return self.semantic(at, format!("host labels cannot contain variables (found {w})"));
            } else {
                let f = self.found();
                return self.syntax(at, format!("expected a label, found {f}"));
            }
            if !self.eat(b':') {
                return Ok(Label(atoms));
            }
        }
    }

    /// Optional `, mark` before the closing parenthesis.
    fn mark<M>(&mut self, kind: &str, parse: fn(&str) -> Option<M>, none: M) -> Result<M, TextError>
    where
        M: PartialEq,
    {
        if !self.eat(b',') {
            return Ok(none);
        }
        self.ws();
        let at = self.i;
        match self.word() {
            Some(w) => match parse(w) {
                Some(m) if m != none => Ok(m),
                _ => self.semantic(at, format!("`{w}` is not {kind} mark")),
            },
            None => {
                let f = self.found();
                self.syntax(at, format!("expected a name, found {f}"))
            }
        }
    }
}

pub(super) fn parse(src: &str) -> Result<HostGraph, TextError> {
    let mut r = Reader {
        src,
        b: src.as_bytes(),
        i: 0,
    };
    let mut g = HostGraph::new();
    let mut nodes: IdMap<NodeId> = IdMap::new();
    r.expect(b'[')?;
    while r.peek() == Some(b'(') {
        let at = r.i;
        r.i += 1;
        let id = r.item_id()?;
        let rooted = r.flag("R");
        r.expect(b',')?;
        let label = r.label()?;
        let mark = r.mark("a node", NodeMark::from_name, NodeMark::None)?;
        r.expect(b')')?;
        let v = g.add_node(label, mark, rooted);
        if !nodes.insert(id, v) {
            let p = r.pos_at(at);
            return Err(TextError::DuplicateTag {
                line: p.line,
                col: p.col,
                id: id.text(),
            });
        }
    }
    r.expect(b'|')?;
    let mut edges: IdMap<()> = IdMap::new();
    while r.peek() == Some(b'(') {
        let at = r.i;
        r.i += 1;
        let id = r.item_id()?;
        if r.flag("B") {
            return r.semantic(at, "host edges cannot be bidirectional");
        }
        if !edges.insert(id, ()) {
            let p = r.pos_at(at);
            return Err(TextError::DuplicateTag {
                line: p.line,
                col: p.col,
                id: id.text(),
            });
        }
        r.expect(b',')?;
        let mut ends = [NodeId(0); 2];
        for end in &mut ends {
            let e = r.item_id()?;
            *end = nodes.get(e).ok_or_else(|| {
                let p = r.pos_at(at);
                TextError::DanglingReference {
                    line: p.line,
                    col: p.col,
                    id: e.text(),
                }
            })?;
            r.expect(b',')?;
        }
        let label = r.label()?;
        let mark = r.mark("an edge", EdgeMark::from_name, EdgeMark::None)?;
        r.expect(b')')?;
        g.add_edge(ends[0], ends[1], label, mark)
            .expect("endpoints are live");
    }
    r.expect(b']')?;
    if r.peek().is_some() {
        let f = r.found();
        return r.syntax(r.i, format!("trailing input: {f}"));
    }
    Ok(g)
}
