//! Text formats: host graphs and programs.
//!
//! Host graphs:
//!
//! ```text
//! [ (0(R), empty, grey) (1, 3:"abc") | (0, 0, 1, empty, dashed) ]
//! ```
//!
//! Programs are a list of declarations. A procedure is `Name = commands`;
//! a rule is
//!
//! ```text
//! link(a, b, x, y, z: list) {
//!   lhs [ (1, x, grey) (2, y, grey) (3, z, grey) | (e1, 1, 2, a) (e2, 2, 3, b) ]
//!   rhs [ (1, x, grey) (2, y, grey) (3, z, grey) | (e1, 1, 2, a) (e2, 2, 3, b) (e3, 1, 3, empty) ]
//!   interface {1, 2, 3}
//!   where not edge(1, 3)
//! }
//! ```
//!
//! Rule edges flagged `(B)` after their identifier match in either direction.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

mod host;

use crate::host_graph::{Atom, EdgeMark, HostGraph, Label, NodeMark};
use crate::rule::{
    CmpOp, Condition, DegreeKind, LabelExpr, MarkPat, Rule, RuleEdge, RuleError, RuleGraph,
    RuleNode,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: undeclared variable {name}")]
    UndeclaredVariable { line: usize, col: usize, name: String },
    #[error("{line}:{col}: duplicate identifier {id}")]
    DuplicateTag { line: usize, col: usize, id: String },
    #[error("{line}:{col}: edge refers to unknown node {id}")]
    DanglingReference { line: usize, col: usize, id: String },
    #[error("{line}:{col}: {msg}")]
    Semantic { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: {source}")]
    Rule {
        line: usize,
        col: usize,
        #[source]
        source: RuleError,
    },
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 17] = [
    "<=", ">=", "!=", "(", ")", "[", "]", "{", "}", "|", ",", ":", ";", "!", "=", "<", ">",
];

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, TextError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: String| TextError::Syntax { line, col, msg };
    while i < bytes.len() {
        let c = bytes[i];
        let pos = Pos { line, col };
        if c == b'\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Ident(src[start..i].to_string()), pos));
            continue;
        }
        if c.is_ascii_digit()
            || (c == b'-' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit()))
        {
            let start = i;
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let v = src[start..i]
                .parse::<i64>()
                .map_err(|e| err(pos.line, pos.col, format!("bad integer: {e}")))?;
            out.push((Tok::Int(v), pos));
            continue;
        }
        if c == b'"' {
            let mut s = String::new();
            i += 1;
            col += 1;
            loop {
                let Some(ch) = src[i..].chars().next() else {
                    return Err(err(pos.line, pos.col, "unterminated string".into()));
                };
                i += ch.len_utf8();
                col += 1;
                match ch {
                    '"' => break,
                    '\n' => return Err(err(pos.line, pos.col, "newline in string".into())),
                    '\\' => {
                        let Some(esc) = src[i..].chars().next() else {
                            return Err(err(pos.line, pos.col, "unterminated string".into()));
                        };
                        i += esc.len_utf8();
                        col += 1;
                        match esc {
                            '"' | '\\' => s.push(esc),
                            _ => {
                                return Err(err(line, col, format!("unknown escape \\{esc}")));
                            }
                        }
                    }
                    _ => s.push(ch),
                }
            }
            out.push((Tok::Str(s), pos));
            continue;
        }
        match SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) {
            Some(s) => {
                i += s.len();
                col += s.len();
                out.push((Tok::Sym(s), pos));
            }
            None => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(err(line, col, format!("unexpected character {ch:?}")));
            }
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, TextError> {
        Ok(Parser {
            toks: lex(src)?,
            i: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, TextError> {
        let p = self.pos();
        Err(TextError::Syntax {
            line: p.line,
            col: p.col,
            msg: msg.into(),
        })
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Str(s) => format!("{s:?}"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        if self.is_kw(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), TextError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", Self::describe(self.peek())))
        }
    }

    fn expect_kw(&mut self, s: &str) -> Result<(), TextError> {
        if self.eat_kw(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", Self::describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<String, TextError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            t => self.error(format!("expected a name, found {}", Self::describe(&t))),
        }
    }

    /// Item identifier: a name or a non-negative integer.
    fn item_id(&mut self) -> Result<String, TextError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            Tok::Int(i) if i >= 0 => {
                self.bump();
                Ok(i.to_string())
            }
            t => self.error(format!("expected an identifier, found {}", Self::describe(&t))),
        }
    }

    fn int(&mut self) -> Result<i64, TextError> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(i)
            }
            t => self.error(format!("expected an integer, found {}", Self::describe(&t))),
        }
    }

    /// Parses `(X)` directly after an item identifier, returning whether the
    /// flag letter `X` was present.
    fn flag(&mut self, letter: &str) -> Result<bool, TextError> {
        if self.is_sym("(")
            && matches!(self.peek_at(1), Tok::Ident(s) if s == letter)
            && matches!(self.peek_at(2), Tok::Sym(")"))
        {
            self.bump();
            self.bump();
            self.bump();
            Ok(true)
        } else {
            Ok(false)
        }
    }
}

// ---------------------------------------------------------------------------
// Graph literals (shared by host graphs and rule sides)

#[derive(Clone, Debug)]
enum RawAtom {
    Int(i64),
    Str(String),
    Var(String, Pos),
}

#[derive(Debug)]
struct RawNode {
    id: String,
    rooted: bool,
    label: Vec<RawAtom>,
    mark: Option<(String, Pos)>,
    pos: Pos,
}

#[derive(Debug)]
struct RawEdge {
    id: String,
    bidirectional: bool,
    src: String,
    tgt: String,
    label: Vec<RawAtom>,
    mark: Option<(String, Pos)>,
    pos: Pos,
}

#[derive(Debug)]
struct RawGraph {
    nodes: Vec<RawNode>,
    edges: Vec<RawEdge>,
}

impl Parser {
    fn label(&mut self) -> Result<Vec<RawAtom>, TextError> {
        if self.eat_kw("empty") {
            return Ok(Vec::new());
        }
        let mut atoms = Vec::new();
        loop {
            let pos = self.pos();
            match self.bump() {
                Tok::Int(i) => atoms.push(RawAtom::Int(i)),
                Tok::Str(s) => atoms.push(RawAtom::Str(s)),
                Tok::Ident(s) if s != "empty" => atoms.push(RawAtom::Var(s, pos)),
                t => {
                    self.i -= 1;
                    return self.error(format!("expected a label, found {}", Self::describe(&t)));
                }
            }
            if !self.eat_sym(":") {
                return Ok(atoms);
            }
        }
    }

    fn opt_mark(&mut self) -> Result<Option<(String, Pos)>, TextError> {
        if self.eat_sym(",") {
            let pos = self.pos();
            Ok(Some((self.ident()?, pos)))
        } else {
            Ok(None)
        }
    }

    fn graph(&mut self) -> Result<RawGraph, TextError> {
        self.expect_sym("[")?;
        let mut nodes = Vec::new();
        while self.is_sym("(") {
            let pos = self.pos();
            self.bump();
            let id = self.item_id()?;
            let rooted = self.flag("R")?;
            self.expect_sym(",")?;
            let label = self.label()?;
            let mark = self.opt_mark()?;
            self.expect_sym(")")?;
            nodes.push(RawNode {
                id,
                rooted,
                label,
                mark,
                pos,
            });
        }
        self.expect_sym("|")?;
        let mut edges = Vec::new();
        while self.is_sym("(") {
            let pos = self.pos();
            self.bump();
            let id = self.item_id()?;
            let bidirectional = self.flag("B")?;
            self.expect_sym(",")?;
            let src = self.item_id()?;
            self.expect_sym(",")?;
            let tgt = self.item_id()?;
            self.expect_sym(",")?;
            let label = self.label()?;
            let mark = self.opt_mark()?;
            self.expect_sym(")")?;
            edges.push(RawEdge {
                id,
                bidirectional,
                src,
                tgt,
                label,
                mark,
                pos,
            });
        }
        self.expect_sym("]")?;
        Ok(RawGraph { nodes, edges })
    }
}

fn semantic(pos: Pos, msg: impl Into<String>) -> TextError {
    TextError::Semantic {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
    }
}

fn host_label(atoms: Vec<RawAtom>) -> Result<Label, TextError> {
    atoms
        .into_iter()
        .map(|a| match a {
            RawAtom::Int(i) => Ok(Atom::Int(i)),
            RawAtom::Str(s) => Ok(Atom::Str(s)),
            RawAtom::Var(name, pos) => Err(semantic(
                pos,
                format!("host labels cannot contain variables (found {name})"),
            )),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Label)
}

/// Parses a host graph, assigning fresh identifiers in textual order.
pub fn parse_host(src: &str) -> Result<HostGraph, TextError> {
    host::parse(src)
}

fn write_atom(out: &mut String, a: &Atom) {
    match a {
        Atom::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Atom::Str(s) => {
            out.push('"');
            for ch in s.chars() {
                if ch == '"' || ch == '\\' {
                    out.push('\\');
                }
                out.push(ch);
            }
            out.push('"');
        }
    }
}

pub fn format_label(l: &Label) -> String {
    let mut s = String::new();
    write_label(&mut s, l);
    s
}

fn write_label(out: &mut String, l: &Label) {
    if l.is_empty() {
        out.push_str("empty");
        return;
    }
    for (k, a) in l.0.iter().enumerate() {
        if k > 0 {
            out.push(':');
        }
        write_atom(out, a);
    }
}

/// Prints a host graph in canonical form: one item per line, nodes in
/// node-list order, edges grouped by source in out-list order. Identifiers
/// are the graph's internal indices.
pub fn print_host(g: &HostGraph) -> String {
    let mut out = String::with_capacity(24 * g.size() + 8);
    out.push_str("[\n");
    for v in g.nodes() {
        let n = g.node(v).expect("live");
        let _ = write!(out, "  ({}", v.0);
        if n.rooted() {
            out.push_str("(R)");
        }
        out.push_str(", ");
        write_label(&mut out, n.label());
        if n.mark() != NodeMark::None {
            out.push_str(", ");
            out.push_str(n.mark().name());
        }
        out.push_str(")\n");
    }
    out.push_str("|\n");
    for e in g.edges() {
        let r = g.edge(e).expect("live");
        let _ = write!(out, "  ({}, {}, {}, ", e.0, r.source().0, r.target().0);
        write_label(&mut out, r.label());
        if r.mark() != EdgeMark::None {
            out.push_str(", ");
            out.push_str(r.mark().name());
        }
        out.push_str(")\n");
    }
    out.push_str("]\n");
    out
}

// ---------------------------------------------------------------------------
// Programs

/// Command expression as written, before procedure inlining.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CmdExpr {
    /// A rule or procedure name.
    Call(String),
    RuleSet(Vec<String>),
    Seq(Vec<CmdExpr>),
    Loop(Box<CmdExpr>),
    If(Box<CmdExpr>, Box<CmdExpr>, Box<CmdExpr>),
    Try(Box<CmdExpr>, Box<CmdExpr>, Box<CmdExpr>),
    Or(Box<CmdExpr>, Box<CmdExpr>),
    Skip,
    Fail,
    Break,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcDecl {
    pub name: String,
    pub body: CmdExpr,
}

/// A parsed program: procedure declarations (including `Main`) and rules,
/// each in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ProgramSource {
    pub procs: Vec<ProcDecl>,
    pub rules: Vec<Rule>,
}

impl ProgramSource {
    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn proc(&self, name: &str) -> Option<&ProcDecl> {
        self.procs.iter().find(|p| p.name == name)
    }
}

const KEYWORDS: [&str; 12] = [
    "if", "then", "else", "try", "or", "skip", "fail", "break", "where", "not", "and", "empty",
];

impl Parser {
    fn decl_name(&mut self) -> Result<String, TextError> {
        let pos = self.pos();
        let name = self.ident()?;
        if KEYWORDS.contains(&name.as_str()) {
            return Err(TextError::Syntax {
                line: pos.line,
                col: pos.col,
                msg: format!("`{name}` is a keyword"),
            });
        }
        Ok(name)
    }

    fn seq(&mut self) -> Result<CmdExpr, TextError> {
        let mut items = vec![self.command()?];
        while self.eat_sym(";") {
            items.push(self.command()?);
        }
        Ok(if items.len() == 1 {
            items.pop().expect("one item")
        } else {
            CmdExpr::Seq(items)
        })
    }

    fn command(&mut self) -> Result<CmdExpr, TextError> {
        if self.eat_kw("if") {
            let c = self.block()?;
            self.expect_kw("then")?;
            let t = self.block()?;
            let e = if self.eat_kw("else") {
                self.block()?
            } else {
                CmdExpr::Skip
            };
            return Ok(CmdExpr::If(Box::new(c), Box::new(t), Box::new(e)));
        }
        if self.eat_kw("try") {
            let c = self.block()?;
            let t = if self.eat_kw("then") {
                self.block()?
            } else {
                CmdExpr::Skip
            };
            let e = if self.eat_kw("else") {
                self.block()?
            } else {
                CmdExpr::Skip
            };
            return Ok(CmdExpr::Try(Box::new(c), Box::new(t), Box::new(e)));
        }
        let mut left = self.block()?;
        while self.eat_kw("or") {
            let right = self.block()?;
            left = CmdExpr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn block(&mut self) -> Result<CmdExpr, TextError> {
        let mut b = if self.eat_sym("(") {
            let inner = self.seq()?;
            self.expect_sym(")")?;
            inner
        } else if self.eat_sym("{") {
            let mut names = vec![self.decl_name()?];
            while self.eat_sym(",") {
                names.push(self.decl_name()?);
            }
            self.expect_sym("}")?;
            CmdExpr::RuleSet(names)
        } else if self.eat_kw("skip") {
            CmdExpr::Skip
        } else if self.eat_kw("fail") {
            CmdExpr::Fail
        } else if self.eat_kw("break") {
            CmdExpr::Break
        } else {
            match self.peek() {
                Tok::Ident(_) => CmdExpr::Call(self.decl_name()?),
                t => {
                    let d = Self::describe(t);
                    return self.error(format!("expected a command, found {d}"));
                }
            }
        };
        while self.eat_sym("!") {
            b = CmdExpr::Loop(Box::new(b));
        }
        Ok(b)
    }

    fn params(&mut self) -> Result<Vec<(String, Pos)>, TextError> {
        let mut out = Vec::new();
        if self.is_sym(")") {
            return Ok(out);
        }
        loop {
            let pos = self.pos();
            let name = self.decl_name()?;
            if out.iter().any(|(n, _)| *n == name) {
                return Err(TextError::DuplicateTag {
                    line: pos.line,
                    col: pos.col,
                    id: name,
                });
            }
            out.push((name, pos));
            if self.eat_sym(":") {
                let tpos = self.pos();
                let ty = self.ident()?;
                if ty != "list" {
                    return Err(semantic(tpos, format!("unsupported variable type `{ty}`")));
                }
                if !self.eat_sym(";") && !self.eat_sym(",") {
                    return Ok(out);
                }
            } else if !self.eat_sym(",") {
                return Ok(out);
            }
        }
    }

    fn condition(&mut self) -> Result<RawCond, TextError> {
        let mut left = self.cond_unary()?;
        while self.eat_kw("and") {
            let right = self.cond_unary()?;
            left = RawCond::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn cond_unary(&mut self) -> Result<RawCond, TextError> {
        if self.eat_kw("not") {
            return Ok(RawCond::Not(Box::new(self.cond_unary()?)));
        }
        if self.eat_sym("(") {
            let c = self.condition()?;
            self.expect_sym(")")?;
            return Ok(c);
        }
        let pos = self.pos();
        let kw = self.ident()?;
        match kw.as_str() {
            "indeg" | "outdeg" => {
                self.expect_sym("(")?;
                let npos = self.pos();
                let node = self.item_id()?;
                self.expect_sym(")")?;
                let op = match self.bump() {
                    Tok::Sym("=") => CmpOp::Eq,
                    Tok::Sym("!=") => CmpOp::Ne,
                    Tok::Sym("<") => CmpOp::Lt,
                    Tok::Sym("<=") => CmpOp::Le,
                    Tok::Sym(">") => CmpOp::Gt,
                    Tok::Sym(">=") => CmpOp::Ge,
                    t => {
                        self.i -= 1;
                        return self
                            .error(format!("expected a comparison, found {}", Self::describe(&t)));
                    }
                };
                let value = self.int()?;
                let kind = if kw == "indeg" {
                    DegreeKind::In
                } else {
                    DegreeKind::Out
                };
                Ok(RawCond::Degree {
                    kind,
                    node: (node, npos),
                    op,
                    value,
                })
            }
            "edge" => {
                self.expect_sym("(")?;
                let spos = self.pos();
                let s = self.item_id()?;
                self.expect_sym(",")?;
                let tpos = self.pos();
                let t = self.item_id()?;
                self.expect_sym(")")?;
                Ok(RawCond::Edge {
                    src: (s, spos),
                    tgt: (t, tpos),
                })
            }
            _ => Err(TextError::Syntax {
                line: pos.line,
                col: pos.col,
                msg: format!("unknown predicate `{kw}`"),
            }),
        }
    }
}

#[derive(Debug)]
enum RawCond {
    Degree {
        kind: DegreeKind,
        node: (String, Pos),
        op: CmpOp,
        value: i64,
    },
    Edge {
        src: (String, Pos),
        tgt: (String, Pos),
    },
    Not(Box<RawCond>),
    And(Box<RawCond>, Box<RawCond>),
}

struct RuleCtx<'a> {
    params: &'a [(String, Pos)],
}

impl RuleCtx<'_> {
    fn label(&self, atoms: Vec<RawAtom>, pos: Pos) -> Result<LabelExpr, TextError> {
        let has_var = atoms.iter().any(|a| matches!(a, RawAtom::Var(..)));
        if !has_var {
            return host_label(atoms).map(LabelExpr::Const);
        }
        if atoms.len() != 1 {
            return Err(semantic(
                pos,
                "a label containing a variable must be that single variable",
            ));
        }
        let RawAtom::Var(name, vpos) = &atoms[0] else {
            unreachable!("checked above")
        };
        match self.params.iter().position(|(p, _)| p == name) {
            Some(i) => Ok(LabelExpr::Var(i)),
            None => Err(TextError::UndeclaredVariable {
                line: vpos.line,
                col: vpos.col,
                name: name.clone(),
            }),
        }
    }

    fn graph(&self, raw: RawGraph) -> Result<(RuleGraph, HashMap<String, usize>), TextError> {
        let mut ids = HashMap::new();
        let mut g = RuleGraph::default();
        for n in raw.nodes {
            if ids.insert(n.id.clone(), g.nodes.len()).is_some() {
                return Err(TextError::DuplicateTag {
                    line: n.pos.line,
                    col: n.pos.col,
                    id: n.id,
                });
            }
            let mark = match n.mark {
                None => MarkPat::Is(NodeMark::None),
                Some((s, _)) if s == "any" => MarkPat::Any,
                Some((s, pos)) => match NodeMark::from_name(&s) {
                    Some(m) if m != NodeMark::None => MarkPat::Is(m),
                    _ => return Err(semantic(pos, format!("`{s}` is not a node mark"))),
                },
            };
            g.nodes.push(RuleNode {
                label: self.label(n.label, n.pos)?,
                id: n.id,
                mark,
                rooted: n.rooted,
            });
        }
        let mut edge_ids = HashMap::new();
        for e in raw.edges {
            if edge_ids.insert(e.id.clone(), ()).is_some() {
                return Err(TextError::DuplicateTag {
                    line: e.pos.line,
                    col: e.pos.col,
                    id: e.id,
                });
            }
            let end = |id: &String| {
                ids.get(id).copied().ok_or_else(|| TextError::DanglingReference {
                    line: e.pos.line,
                    col: e.pos.col,
                    id: id.clone(),
                })
            };
            let (src, tgt) = (end(&e.src)?, end(&e.tgt)?);
            let mark = match e.mark {
                None => MarkPat::Is(EdgeMark::None),
                Some((s, _)) if s == "any" => MarkPat::Any,
                Some((s, pos)) => match EdgeMark::from_name(&s) {
                    Some(m) if m != EdgeMark::None => MarkPat::Is(m),
                    _ => return Err(semantic(pos, format!("`{s}` is not an edge mark"))),
                },
            };
            g.edges.push(RuleEdge {
                label: self.label(e.label, e.pos)?,
                id: e.id,
                src,
                tgt,
                mark,
                bidirectional: e.bidirectional,
            });
        }
        Ok((g, ids))
    }
}

fn resolve_cond(
    c: RawCond,
    lhs_ids: &HashMap<String, usize>,
) -> Result<Condition, TextError> {
    let node = |(id, pos): (String, Pos)| {
        lhs_ids
            .get(&id)
            .copied()
            .ok_or_else(|| semantic(pos, format!("condition refers to unknown node {id}")))
    };
    Ok(match c {
        RawCond::Degree {
            kind,
            node: n,
            op,
            value,
        } => Condition::Degree {
            kind,
            node: node(n)?,
            op,
            value,
        },
        RawCond::Edge { src, tgt } => Condition::Edge {
            src: node(src)?,
            tgt: node(tgt)?,
        },
        RawCond::Not(c) => Condition::Not(Box::new(resolve_cond(*c, lhs_ids)?)),
        RawCond::And(a, b) => Condition::And(
            Box::new(resolve_cond(*a, lhs_ids)?),
            Box::new(resolve_cond(*b, lhs_ids)?),
        ),
    })
}

impl Parser {
    fn rule_decl(&mut self, name: String, pos: Pos) -> Result<Rule, TextError> {
        self.expect_sym("(")?;
        let params = self.params()?;
        self.expect_sym(")")?;
        self.expect_sym("{")?;
        self.expect_kw("lhs")?;
        let lhs_raw = self.graph()?;
        self.expect_kw("rhs")?;
        let rhs_raw = self.graph()?;
        self.expect_kw("interface")?;
        self.expect_sym("{")?;
        let mut iface = Vec::new();
        if !self.is_sym("}") {
            loop {
                let p = self.pos();
                iface.push((self.item_id()?, p));
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym("}")?;
        let cond = if self.eat_kw("where") {
            Some(self.condition()?)
        } else {
            None
        };
        self.expect_sym("}")?;

        let ctx = RuleCtx { params: &params };
        let (lhs, lhs_ids) = ctx.graph(lhs_raw)?;
        let (rhs, rhs_ids) = ctx.graph(rhs_raw)?;
        let mut pairs = Vec::new();
        for (id, p) in &iface {
            if pairs.iter().any(|(l, _): &(usize, usize)| lhs.nodes[*l].id == *id) {
                return Err(TextError::DuplicateTag {
                    line: p.line,
                    col: p.col,
                    id: id.clone(),
                });
            }
            match (lhs_ids.get(id), rhs_ids.get(id)) {
                (Some(&l), Some(&r)) => pairs.push((l, r)),
                _ => {
                    return Err(semantic(
                        *p,
                        format!("interface node {id} must occur on both sides"),
                    ));
                }
            }
        }
        for n in &lhs.nodes {
            if rhs_ids.contains_key(&n.id) && !iface.iter().any(|(i, _)| *i == n.id) {
                return Err(semantic(
                    pos,
                    format!(
                        "rule {name}: node {} occurs on both sides but is not in the interface",
                        n.id
                    ),
                ));
            }
        }
        let condition = cond.map(|c| resolve_cond(c, &lhs_ids)).transpose()?;
        let params = params.into_iter().map(|(p, _)| p).collect();
        Rule::new(name, params, lhs, rhs, &pairs, condition).map_err(|source| TextError::Rule {
            line: pos.line,
            col: pos.col,
            source,
        })
    }
}

/// Parses a program. Rules are validated; procedure references are resolved
/// later, when the program is compiled.
pub fn parse_program(src: &str) -> Result<ProgramSource, TextError> {
    let mut p = Parser::new(src)?;
    let mut prog = ProgramSource::default();
    let mut names: HashMap<String, ()> = HashMap::new();
    if matches!(p.peek(), Tok::Eof) {
        return p.error("empty program");
    }
    while !matches!(p.peek(), Tok::Eof) {
        let pos = p.pos();
        let name = p.decl_name()?;
        if names.insert(name.clone(), ()).is_some() {
            return Err(semantic(pos, format!("{name} is declared twice")));
        }
        if p.eat_sym("=") {
            let body = p.seq()?;
            prog.procs.push(ProcDecl { name, body });
        } else if p.is_sym("(") {
            let r = p.rule_decl(name, pos)?;
            prog.rules.push(r);
        } else {
            return p.error(format!(
                "expected `=` or `(` after {name}, found {}",
                Parser::describe(p.peek())
            ));
        }
    }
    Ok(prog)
}

// ---------------------------------------------------------------------------
// Program printing

fn is_block(c: &CmdExpr) -> bool {
    matches!(
        c,
        CmdExpr::Call(_) | CmdExpr::RuleSet(_) | CmdExpr::Skip | CmdExpr::Fail | CmdExpr::Break
    ) || matches!(c, CmdExpr::Loop(_))
}

fn write_block(out: &mut String, c: &CmdExpr) {
    if is_block(c) {
        write_cmd(out, c);
    } else {
        out.push('(');
        write_cmd(out, c);
        out.push(')');
    }
}


fn write_cmd(out: &mut String, c: &CmdExpr) {
    match c {
        CmdExpr::Call(n) => out.push_str(n),
        CmdExpr::RuleSet(names) => {
            let _ = write!(out, "{{{}}}", names.join(", "));
        }
        CmdExpr::Seq(items) => {
            for (k, it) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str("; ");
                }
                if matches!(it, CmdExpr::Seq(_)) {
                    write_block(out, it);
                } else {
                    write_cmd(out, it);
                }
            }
        }
        CmdExpr::Loop(b) => {
            write_block(out, b);
            out.push('!');
        }
        CmdExpr::If(c, t, e) => write_branching(out, "if", c, t, e),
        CmdExpr::Try(c, t, e) => write_branching(out, "try", c, t, e),
        CmdExpr::Or(a, b) => {
            if matches!(**a, CmdExpr::Or(..)) {
                write_cmd(out, a);
            } else {
                write_block(out, a);
            }
            out.push_str(" or ");
            write_block(out, b);
        }
        CmdExpr::Skip => out.push_str("skip"),
        CmdExpr::Fail => out.push_str("fail"),
        CmdExpr::Break => out.push_str("break"),
    }
}

fn write_branching(out: &mut String, kw: &str, c: &CmdExpr, t: &CmdExpr, e: &CmdExpr) {
    out.push_str(kw);
    out.push(' ');
    write_block(out, c);
    out.push_str(" then ");
    write_block(out, t);
    out.push_str(" else ");
    write_block(out, e);
}

pub fn format_command(c: &CmdExpr) -> String {
    let mut s = String::new();
    write_cmd(&mut s, c);
    s
}

fn write_label_expr(out: &mut String, l: &LabelExpr, params: &[String]) {
    match l {
        LabelExpr::Var(v) => out.push_str(&params[*v]),
        LabelExpr::Const(c) => write_label(out, c),
    }
}

fn write_rule_graph(out: &mut String, g: &RuleGraph, params: &[String]) {
    out.push('[');
    for n in &g.nodes {
        let _ = write!(out, " ({}", n.id);
        if n.rooted {
            out.push_str("(R)");
        }
        out.push_str(", ");
        write_label_expr(out, &n.label, params);
        match n.mark {
            MarkPat::Is(NodeMark::None) => {}
            MarkPat::Is(m) => {
                let _ = write!(out, ", {}", m.name());
            }
            MarkPat::Any => out.push_str(", any"),
        }
        out.push(')');
    }
    out.push_str(" |");
    for e in &g.edges {
        let _ = write!(out, " ({}", e.id);
        if e.bidirectional {
            out.push_str("(B)");
        }
        let _ = write!(out, ", {}, {}, ", g.nodes[e.src].id, g.nodes[e.tgt].id);
        write_label_expr(out, &e.label, params);
        match e.mark {
            MarkPat::Is(EdgeMark::None) => {}
            MarkPat::Is(m) => {
                let _ = write!(out, ", {}", m.name());
            }
            MarkPat::Any => out.push_str(", any"),
        }
        out.push(')');
    }
    out.push_str(" ]");
}

fn write_condition(out: &mut String, c: &Condition, lhs: &RuleGraph) {
    match c {
        Condition::Degree {
            kind,
            node,
            op,
            value,
        } => {
            let f = match kind {
                DegreeKind::In => "indeg",
                DegreeKind::Out => "outdeg",
            };
            let _ = write!(out, "{f}({}) {} {value}", lhs.nodes[*node].id, op.symbol());
        }
        Condition::Edge { src, tgt } => {
            let _ = write!(out, "edge({}, {})", lhs.nodes[*src].id, lhs.nodes[*tgt].id);
        }
        Condition::Not(c) => {
            out.push_str("not ");
            if matches!(**c, Condition::And(..)) {
                out.push('(');
                write_condition(out, c, lhs);
                out.push(')');
            } else {
                write_condition(out, c, lhs);
            }
        }
        Condition::And(a, b) => {
            write_condition(out, a, lhs);
            out.push_str(" and ");
            if matches!(**b, Condition::And(..)) {
                out.push('(');
                write_condition(out, b, lhs);
                out.push(')');
            } else {
                write_condition(out, b, lhs);
            }
        }
    }
}

pub fn format_rule(r: &Rule) -> String {
    let mut out = String::new();
    let _ = write!(out, "{}(", r.name);
    if !r.params.is_empty() {
        let _ = write!(out, "{}: list", r.params.join(", "));
    }
    out.push_str(") {\n  lhs ");
    write_rule_graph(&mut out, &r.lhs, &r.params);
    out.push_str("\n  rhs ");
    write_rule_graph(&mut out, &r.rhs, &r.params);
    let iface: Vec<&str> = r
        .interface()
        .into_iter()
        .map(|(l, _)| r.lhs.nodes[l].id.as_str())
        .collect();
    let _ = write!(out, "\n  interface {{{}}}", iface.join(", "));
    if let Some(c) = &r.condition {
        out.push_str("\n  where ");
        write_condition(&mut out, c, &r.lhs);
    }
    out.push_str("\n}\n");
    out
}

/// Prints a program in a form [`parse_program`] reads back to an equal value.
pub fn print_program(p: &ProgramSource) -> String {
    let mut out = String::new();
    for d in &p.procs {
        let _ = writeln!(out, "{} = {}", d.name, format_command(&d.body));
    }
    for r in &p.rules {
        out.push('\n');
        out.push_str(&format_rule(r));
    }
    out
}
