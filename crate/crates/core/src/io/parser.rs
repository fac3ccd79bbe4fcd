// SPDX-License-Identifier: Apache-2.0
//! Parser for graphs, rules and systems.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{EdgeId, Graph, Label, VertexId, UNLABELED};
use crate::rewrite::RuleSet;
use crate::rule::{expand, AnnotatedRule, AnnotatedSide, Forbid, NameKey, QuasiRule, TraceKey, TypeDecl, TypeEnd};

use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

const KEYWORDS: &[&str] = &["node", "type", "forbid", "ctx", "from", "fresh", "on", "lhs", "rhs"];

/// Everything defined in one text: graphs, rules and systems, in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub graphs: Vec<(String, Graph)>,
    pub rules: Vec<QuasiRule>,
    pub systems: Vec<(String, Vec<String>)>,
    /// Non-fatal diagnostics, e.g. forbid marks that suppress nothing.
    pub warnings: Vec<String>,
}

impl Document {
    pub fn graph(&self, name: &str) -> Option<&Graph> {
        self.graphs.iter().find(|(n, _)| n == name).map(|(_, g)| g)
    }

    pub fn rule(&self, name: &str) -> Option<&QuasiRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    /// The named system, or `None` if it is not defined.
    pub fn system(&self, name: &str) -> Option<RuleSet> {
        let (_, members) = self.systems.iter().find(|(n, _)| n == name)?;
        let rules = members.iter().map(|m| self.rule(m).cloned()).collect::<Option<Vec<_>>>()?;
        Some(RuleSet::new(name, rules))
    }

    /// All rules as one system, in file order.
    pub fn all_rules(&self) -> RuleSet {
        RuleSet::new("all", self.rules.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum NodeRef {
    Num(u64),
    Sym(String),
}

#[derive(Clone, Debug)]
enum EndRef {
    Ctx,
    Node(NodeRef, Pos),
}

type Pos = (usize, usize);

enum Link {
    Default,
    From(NodeRef, Pos),
    Fresh,
}

struct RawNode {
    node: NodeRef,
    names: Vec<String>,
    black: bool,
    link: Link,
    pos: Pos,
}

struct RawEdge {
    id: Option<u64>,
    src: NodeRef,
    tgt: NodeRef,
    label: String,
    pos: Pos,
}

struct RawType {
    id: Option<u64>,
    src: EndRef,
    tgt: EndRef,
    from: Option<TraceKey>,
}

struct RawForbid {
    key: NameKey,
    src: EndRef,
    tgt: EndRef,
}

#[derive(Default)]
struct RawBlock {
    nodes: Vec<RawNode>,
    edges: Vec<RawEdge>,
    types: Vec<RawType>,
    forbids: Vec<RawForbid>,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> Pos {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (l, c) = self.here();
        Err(ParseError::new(l, c, msg))
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {}, found {}", want.describe(), self.peek().describe()))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{kw}`, found {}", self.peek().describe()))
        }
    }

    /// A name-like token: identifier, number or string.
    fn word(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            Tok::Int(n) => {
                self.bump();
                Ok(n.to_string())
            }
            t => self.err(format!("expected {what}, found {}", t.describe())),
        }
    }

    fn int(&mut self, what: &str) -> Result<u64, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            t => self.err(format!("expected {what}, found {}", t.describe())),
        }
    }

    fn node_ref(&mut self) -> Result<NodeRef, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(NodeRef::Num(n))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(NodeRef::Sym(s))
            }
            t => self.err(format!("expected a node, found {}", t.describe())),
        }
    }

    fn end_ref(&mut self) -> Result<EndRef, ParseError> {
        if self.is_kw("ctx") {
            self.bump();
            return Ok(EndRef::Ctx);
        }
        let pos = self.here();
        Ok(EndRef::Node(self.node_ref()?, pos))
    }

    fn name_key(&mut self) -> Result<NameKey, ParseError> {
        let pos = self.here();
        self.expect(Tok::LParen)?;
        let a = self.word("a name or ctx")?;
        self.expect(Tok::Comma)?;
        let b = self.word("a name or ctx")?;
        self.expect(Tok::RParen)?;
        match (a == "ctx", b == "ctx") {
            (true, true) => Err(ParseError::new(pos.0, pos.1, "(ctx,ctx) is not a type edge key")),
            (true, false) => Ok(NameKey::In(b)),
            (false, true) => Ok(NameKey::Out(a)),
            (false, false) => Ok(NameKey::Pair(a, b)),
        }
    }

    /// `[EID :] SRC - LABEL -> TGT ;` or `SRC --> TGT ;`
    fn edge(&mut self) -> Result<RawEdge, ParseError> {
        let pos = self.here();
        let id = if matches!(self.peek(), Tok::Int(_)) && *self.peek2() == Tok::Colon {
            let n = self.int("an edge id")?;
            self.bump();
            Some(n)
        } else {
            None
        };
        let src = self.node_ref()?;
        self.expect(Tok::Dash)?;
        let label = if *self.peek() == Tok::Arrow {
            UNLABELED.to_string()
        } else {
            self.word("an edge label")?
        };
        self.expect(Tok::Arrow)?;
        let tgt = self.node_ref()?;
        self.expect(Tok::Semi)?;
        Ok(RawEdge {
            id,
            src,
            tgt,
            label,
            pos,
        })
    }

    fn graph_body(&mut self) -> Result<RawBlock, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut b = RawBlock::default();
        while *self.peek() != Tok::RBrace {
            if self.is_kw("node") {
                let pos = self.here();
                self.bump();
                let node = self.node_ref()?;
                self.expect(Tok::Semi)?;
                b.nodes.push(RawNode {
                    node,
                    names: vec![],
                    black: false,
                    link: Link::Default,
                    pos,
                });
            } else {
                b.edges.push(self.edge()?);
            }
        }
        self.bump();
        Ok(b)
    }

    fn side_body(&mut self, rhs: bool) -> Result<RawBlock, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut b = RawBlock::default();
        while *self.peek() != Tok::RBrace {
            let pos = self.here();
            if self.is_kw("node") {
                self.bump();
                let node = self.node_ref()?;
                let mut black = false;
                let mut names = Vec::new();
                let mut link = Link::Default;
                if *self.peek() == Tok::Bang {
                    self.bump();
                    black = true;
                }
                if *self.peek() == Tok::LBracket {
                    self.bump();
                    while *self.peek() != Tok::RBracket {
                        names.push(self.word("a name")?);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.expect(Tok::RBracket)?;
                }
                if rhs && self.is_kw("from") {
                    self.bump();
                    let at = self.here();
                    link = Link::From(self.node_ref()?, at);
                } else if rhs && self.is_kw("fresh") {
                    self.bump();
                    link = Link::Fresh;
                }
                self.expect(Tok::Semi)?;
                b.nodes.push(RawNode {
                    node,
                    names,
                    black,
                    link,
                    pos,
                });
            } else if self.is_kw("type") {
                self.bump();
                let id = if matches!(self.peek(), Tok::Int(_)) {
                    Some(self.int("a type key")?)
                } else {
                    None
                };
                self.expect(Tok::Colon)?;
                let src = self.end_ref()?;
                self.expect(Tok::Arrow)?;
                let tgt = self.end_ref()?;
                let mut from = None;
                if self.is_kw("from") {
                    if !rhs {
                        return self.err("`from` is only allowed on rhs type edges");
                    }
                    self.bump();
                    from = Some(if *self.peek() == Tok::LParen {
                        TraceKey::Name(self.name_key()?)
                    } else {
                        TraceKey::Num(self.int("a trace key")?)
                    });
                }
                self.expect(Tok::Semi)?;
                let (id, from) = match (rhs, id, from) {
                    (false, None, _) => return Err(ParseError::new(pos.0, pos.1, "lhs type edge needs a key")),
                    (false, Some(k), _) => (Some(k), None),
                    (true, None, None) => {
                        return Err(ParseError::new(pos.0, pos.1, "rhs type edge needs a key or `from`"))
                    }
                    (true, Some(k), None) => (None, Some(TraceKey::Num(k))),
                    (true, id, Some(f)) => (id, Some(f)),
                };
                b.types.push(RawType { id, src, tgt, from });
            } else if self.is_kw("forbid") {
                self.bump();
                let key = self.name_key()?;
                self.expect_kw("on")?;
                let src = self.end_ref()?;
                self.expect(Tok::Arrow)?;
                let tgt = self.end_ref()?;
                self.expect(Tok::Semi)?;
                b.forbids.push(RawForbid { key, src, tgt });
            } else {
                b.edges.push(self.edge()?);
            }
        }
        self.bump();
        Ok(b)
    }
}

/// Assigns ids to node tokens: numbers are kept, symbols are numbered above
/// the largest number, in order of first appearance.
struct Ids(BTreeMap<NodeRef, VertexId>);

impl Ids {
    fn new<'a>(blocks: impl IntoIterator<Item = &'a RawBlock> + Clone) -> Ids {
        let mut refs: Vec<NodeRef> = Vec::new();
        for b in blocks.clone() {
            for n in &b.nodes {
                refs.push(n.node.clone());
                if let Link::From(r, _) = &n.link {
                    refs.push(r.clone());
                }
            }
            for e in &b.edges {
                refs.push(e.src.clone());
                refs.push(e.tgt.clone());
            }
        }
        let max = refs
            .iter()
            .filter_map(|r| match r {
                NodeRef::Num(n) => Some(*n),
                NodeRef::Sym(_) => None,
            })
            .max();
        let mut next = max.map_or(0, |m| m.saturating_add(1));
        let mut map = BTreeMap::new();
        for r in refs {
            if map.contains_key(&r) {
                continue;
            }
            let id = match &r {
                NodeRef::Num(n) => *n,
                NodeRef::Sym(_) => {
                    next += 1;
                    next - 1
                }
            };
            map.insert(r, VertexId(id));
        }
        Ids(map)
    }

    fn get(&self, r: &NodeRef) -> VertexId {
        self.0[r]
    }
}

fn show(r: &NodeRef) -> String {
    match r {
        NodeRef::Num(n) => n.to_string(),
        NodeRef::Sym(s) => s.clone(),
    }
}

fn build_graph(b: &RawBlock, ids: &Ids) -> Result<Graph, ParseError> {
    let mut g = Graph::new();
    for n in &b.nodes {
        if g.add_vertex(ids.get(&n.node)).is_err() {
            return Err(ParseError::new(n.pos.0, n.pos.1, format!("duplicate node {}", show(&n.node))));
        }
    }
    let explicit: BTreeSet<u64> = b.edges.iter().filter_map(|e| e.id).collect();
    let mut next = explicit.iter().next_back().map_or(0, |m| m.saturating_add(1));
    for e in &b.edges {
        for end in [&e.src, &e.tgt] {
            if !g.contains_vertex(ids.get(end)) {
                return Err(ParseError::new(e.pos.0, e.pos.1, format!("undeclared node {}", show(end))));
            }
        }
        let id = match e.id {
            Some(i) => i,
            None => {
                next += 1;
                next - 1
            }
        };
        if g.add_edge(EdgeId(id), ids.get(&e.src), ids.get(&e.tgt), Label::new(&e.label)).is_err() {
            return Err(ParseError::new(e.pos.0, e.pos.1, format!("duplicate edge id {id}")));
        }
    }
    Ok(g)
}

fn resolve_end(e: &EndRef, ids: &Ids, g: &Graph) -> Result<TypeEnd, ParseError> {
    match e {
        EndRef::Ctx => Ok(TypeEnd::Context),
        EndRef::Node(r, pos) => {
            let v = ids.0.get(r).copied();
            match v {
                Some(v) if g.contains_vertex(v) => Ok(TypeEnd::Node(v)),
                _ => Err(ParseError::new(pos.0, pos.1, format!("undeclared node {}", show(r)))),
            }
        }
    }
}

fn annotated_side(b: &RawBlock, ids: &Ids) -> Result<AnnotatedSide, ParseError> {
    let pattern = build_graph(b, ids)?;
    let mut side = AnnotatedSide {
        pattern,
        ..Default::default()
    };
    for n in &b.nodes {
        let v = ids.get(&n.node);
        if !n.names.is_empty() {
            side.names.insert(v, n.names.clone());
        }
        if n.black {
            side.black.insert(v);
        }
    }
    for t in &b.types {
        side.types.push(TypeDecl {
            id: t.id,
            src: resolve_end(&t.src, ids, &side.pattern)?,
            tgt: resolve_end(&t.tgt, ids, &side.pattern)?,
            from: t.from.clone(),
        });
    }
    for f in &b.forbids {
        side.forbids.push(Forbid {
            key: f.key.clone(),
            src: resolve_end(&f.src, ids, &side.pattern)?,
            tgt: resolve_end(&f.tgt, ids, &side.pattern)?,
        });
    }
    Ok(side)
}

fn build_rule(name: &str, pos: Pos, lhs: &RawBlock, rhs: &RawBlock) -> Result<(QuasiRule, Vec<String>), ParseError> {
    let ids = Ids::new([lhs, rhs]);
    let l = annotated_side(lhs, &ids)?;
    let r = annotated_side(rhs, &ids)?;
    let mut correspondence = BTreeMap::new();
    for n in &rhs.nodes {
        let v = ids.get(&n.node);
        match &n.link {
            Link::Default => {
                if l.pattern.contains_vertex(v) {
                    correspondence.insert(v, v);
                }
            }
            Link::From(x, at) => {
                let w = ids.get(x);
                if !l.pattern.contains_vertex(w) {
                    return Err(ParseError::new(at.0, at.1, format!("`from` names unknown lhs node {}", show(x))));
                }
                correspondence.insert(v, w);
            }
            Link::Fresh => {}
        }
    }
    let annotated = AnnotatedRule {
        name: name.to_string(),
        lhs: l,
        rhs: r,
        correspondence,
    };
    match expand(&annotated) {
        Ok(out) => Ok((out.rule, out.warnings)),
        Err(e) => Err(ParseError {
            line: pos.0,
            col: pos.1,
            message: e.to_string(),
            cause: Some(e),
        }),
    }
}

/// Parses a whole document.
pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let mut doc = Document::default();
    let mut names: [BTreeSet<String>; 3] = Default::default();
    loop {
        let pos = p.here();
        let kind = match p.peek() {
            Tok::Eof => break,
            Tok::Ident(s) if s == "graph" => 0,
            Tok::Ident(s) if s == "rule" => 1,
            Tok::Ident(s) if s == "system" => 2,
            t => return p.err(format!("expected `graph`, `rule` or `system`, found {}", t.describe())),
        };
        p.bump();
        let name = p.word("a name")?;
        if !names[kind].insert(name.clone()) {
            return Err(ParseError::new(pos.0, pos.1, format!("duplicate definition of {name}")));
        }
        match kind {
            0 => {
                let b = p.graph_body()?;
                let ids = Ids::new([&b]);
                doc.graphs.push((name, build_graph(&b, &ids)?));
            }
            1 => {
                p.expect(Tok::LBrace)?;
                p.expect_kw("lhs")?;
                let lhs = p.side_body(false)?;
                p.expect_kw("rhs")?;
                let rhs = p.side_body(true)?;
                p.expect(Tok::RBrace)?;
                let (rule, warnings) = build_rule(&name, pos, &lhs, &rhs)?;
                doc.rules.push(rule);
                doc.warnings.extend(warnings);
            }
            _ => {
                p.expect(Tok::LBrace)?;
                let mut members = Vec::new();
                while *p.peek() != Tok::RBrace {
                    members.push(p.word("a rule name")?);
                    if *p.peek() == Tok::Comma {
                        p.bump();
                    } else {
                        break;
                    }
                }
                p.expect(Tok::RBrace)?;
                doc.systems.push((name, members));
            }
        }
    }
    for (name, members) in &doc.systems {
        for m in members {
            if doc.rule(m).is_none() {
                return Err(ParseError::new(1, 1, format!("system {name} refers to unknown rule {m}")));
            }
        }
    }
    Ok(doc)
}

/// Parses a text holding exactly one graph, or nothing (the empty graph).
pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let doc = parse_document(text)?;
    match (doc.graphs.len(), doc.rules.len() + doc.systems.len()) {
        (0, 0) => Ok(Graph::new()),
        (1, 0) => Ok(doc.graphs.into_iter().next().expect("one graph").1),
        _ => Err(ParseError::new(1, 1, "expected a single graph")),
    }
}

/// Parses the rules of a document.
pub fn parse_rules(text: &str) -> Result<Vec<QuasiRule>, ParseError> {
    Ok(parse_document(text)?.rules)
}
