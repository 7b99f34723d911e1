//! Line-oriented parser for the presentation DSL.
//!
//! ```text
//! object NAME [zero]
//! stab NAME of NAME via NAME
//! hom NAME : OBJ -> OBJ
//! compose NAME ; NAME = (NAME | id(OBJ) | 0)
//! sum OBJ = OBJ (+) OBJ inj NAME NAME proj NAME NAME
//! homotopic NAME ~ NAME
//! splitexact NAME : NAME NAME NAME sum OBJ
//! rep OBJ for OBJ via HOM invvia HOM [link ...]*
//!     link corner NAME to NAME via HOM
//!     link split NAME to NAME via HOM HOM HOM sum HOM inv HOM
//! group NAME
//! ```
//!
//! Names may be used before they are declared; everything is resolved once
//! the whole file has been read.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::{
    CornerDecl, CornerId, CornerLink, Hom, HomDecl, HomId, HomotopyDecl, ObjId, ObjectDecl,
    Presentation, RepresentativeDecl, SplitExactDecl, SplitId, SplitLink, SumDecl, SumId,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{pos}: syntax error: expected {expected}, found {found}")]
    Syntax {
        pos: Pos,
        expected: String,
        found: String,
    },
    #[error("{pos}: duplicate {kind} `{name}`")]
    Duplicate {
        pos: Pos,
        kind: &'static str,
        name: String,
    },
    #[error("{pos}: unresolved {kind} `{name}`")]
    Unresolved {
        pos: Pos,
        kind: &'static str,
        name: String,
    },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::Duplicate { pos, .. }
            | ParseError::Unresolved { pos, .. } => *pos,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Zero,
    Colon,
    Arrow,
    Semi,
    Eq,
    Oplus,
    LParen,
    RParen,
    Comma,
    Tilde,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Zero => f.write_str("`0`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Oplus => f.write_str("`(+)`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Tilde => f.write_str("`~`"),
        }
    }
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos {
            line: lineno,
            col: i + 1,
        };
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        let (tok, len) = match c {
            '0' if !chars.get(i + 1).is_some_and(|c| c.is_ascii_digit()) => (Tok::Zero, 1),
            ':' => (Tok::Colon, 1),
            ';' => (Tok::Semi, 1),
            '=' => (Tok::Eq, 1),
            ',' => (Tok::Comma, 1),
            '~' => (Tok::Tilde, 1),
            ')' => (Tok::RParen, 1),
            '-' if chars.get(i + 1) == Some(&'>') => (Tok::Arrow, 2),
            '(' if chars.get(i + 1) == Some(&'+') && chars.get(i + 2) == Some(&')') => {
                (Tok::Oplus, 3)
            }
            '(' => (Tok::LParen, 1),
            other => {
                return Err(ParseError::Syntax {
                    pos,
                    expected: "a name or punctuation".into(),
                    found: format!("`{other}`"),
                })
            }
        };
        out.push((tok, pos));
        i += len;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
struct Name {
    text: String,
    pos: Pos,
}

#[derive(Clone, Debug)]
enum HomRef {
    Name(Name),
    Id(Name),
    Zero(Option<(Name, Name)>, Pos),
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
enum LinkStmt {
    Corner {
        corner: Name,
        target: Name,
        via: HomRef,
    },
    Split {
        split: Name,
        target: Name,
        pi_a: HomRef,
        pi_b: HomRef,
        pi_d: HomRef,
        sum_iso: HomRef,
        sum_iso_inv: HomRef,
    },
}

#[derive(Clone, Debug)]
enum Stmt {
    Object {
        name: Name,
        zero: bool,
    },
    Stab {
        stab: Name,
        base: Name,
        via: Name,
    },
    Hom {
        name: Name,
        dom: Name,
        cod: Name,
    },
    Compose {
        first: Name,
        second: Name,
        result: HomRef,
    },
    Sum {
        sum: Name,
        left: Name,
        right: Name,
        inj: (Name, Name),
        proj: (Name, Name),
    },
    Homotopic {
        f0: Name,
        f1: Name,
    },
    SplitExact {
        name: Name,
        f: Name,
        g: Name,
        s: Name,
        sum: Name,
    },
    Rep {
        rep: Name,
        object: Name,
        iso: HomRef,
        iso_inv: HomRef,
        links: Vec<LinkStmt>,
    },
    Group {
        name: Name,
    },
}

struct Cursor {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            expected: expected.to_string(),
            found: self
                .peek()
                .map(|t| t.to_string())
                .unwrap_or_else(|| "end of line".to_string()),
        })
    }

    fn name(&mut self) -> Result<Name, ParseError> {
        match self.toks.get(self.at) {
            Some((Tok::Ident(s), p)) => {
                let n = Name {
                    text: s.clone(),
                    pos: *p,
                };
                self.at += 1;
                Ok(n)
            }
            _ => self.err("a name"),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.at += 1;
                Ok(())
            }
            _ => self.err(&format!("`{kw}`")),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn punct(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            self.err(&tok.to_string())
        }
    }

    fn hom_ref(&mut self) -> Result<HomRef, ParseError> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Zero) => {
                self.at += 1;
                if self.peek() == Some(&Tok::LParen) {
                    self.at += 1;
                    let a = self.name()?;
                    self.punct(Tok::Comma)?;
                    let b = self.name()?;
                    self.punct(Tok::RParen)?;
                    Ok(HomRef::Zero(Some((a, b)), pos))
                } else {
                    Ok(HomRef::Zero(None, pos))
                }
            }
            Some(Tok::Ident(s))
                if s == "id" && self.toks.get(self.at + 1).map(|t| &t.0) == Some(&Tok::LParen) =>
            {
                self.at += 2;
                let o = self.name()?;
                self.punct(Tok::RParen)?;
                Ok(HomRef::Id(o))
            }
            Some(Tok::Ident(_)) => Ok(HomRef::Name(self.name()?)),
            _ => self.err("a homomorphism (`NAME`, `id(OBJ)` or `0`)"),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.at < self.toks.len() {
            self.err("end of line")
        } else {
            Ok(())
        }
    }
}

fn parse_statement(c: &mut Cursor) -> Result<Stmt, ParseError> {
    let head = c.name()?;
    let stmt = match head.text.as_str() {
        "object" => {
            let name = c.name()?;
            let zero = if c.is_keyword("zero") {
                c.at += 1;
                true
            } else {
                false
            };
            Stmt::Object { name, zero }
        }
        "stab" => {
            let stab = c.name()?;
            c.keyword("of")?;
            let base = c.name()?;
            c.keyword("via")?;
            let via = c.name()?;
            Stmt::Stab { stab, base, via }
        }
        "hom" => {
            let name = c.name()?;
            c.punct(Tok::Colon)?;
            let dom = c.name()?;
            c.punct(Tok::Arrow)?;
            let cod = c.name()?;
            Stmt::Hom { name, dom, cod }
        }
        "compose" => {
            let first = c.name()?;
            c.punct(Tok::Semi)?;
            let second = c.name()?;
            c.punct(Tok::Eq)?;
            let result = c.hom_ref()?;
            Stmt::Compose {
                first,
                second,
                result,
            }
        }
        "sum" => {
            let sum = c.name()?;
            c.punct(Tok::Eq)?;
            let left = c.name()?;
            c.punct(Tok::Oplus)?;
            let right = c.name()?;
            c.keyword("inj")?;
            let inj = (c.name()?, c.name()?);
            c.keyword("proj")?;
            let proj = (c.name()?, c.name()?);
            Stmt::Sum {
                sum,
                left,
                right,
                inj,
                proj,
            }
        }
        "homotopic" => {
            let f0 = c.name()?;
            c.punct(Tok::Tilde)?;
            let f1 = c.name()?;
            Stmt::Homotopic { f0, f1 }
        }
        "splitexact" => {
            let name = c.name()?;
            c.punct(Tok::Colon)?;
            let f = c.name()?;
            let g = c.name()?;
            let s = c.name()?;
            c.keyword("sum")?;
            let sum = c.name()?;
            Stmt::SplitExact { name, f, g, s, sum }
        }
        "rep" => {
            let rep = c.name()?;
            c.keyword("for")?;
            let object = c.name()?;
            c.keyword("via")?;
            let iso = c.hom_ref()?;
            c.keyword("invvia")?;
            let iso_inv = c.hom_ref()?;
            let mut links = Vec::new();
            while c.is_keyword("link") {
                c.at += 1;
                links.push(parse_link(c)?);
            }
            Stmt::Rep {
                rep,
                object,
                iso,
                iso_inv,
                links,
            }
        }
        "group" => Stmt::Group { name: c.name()? },
        _ => {
            return Err(ParseError::Syntax {
                pos: head.pos,
                expected: "a statement keyword (object, stab, hom, compose, sum, homotopic, splitexact, rep, group)".into(),
                found: format!("`{}`", head.text),
            })
        }
    };
    c.finish()?;
    Ok(stmt)
}

fn parse_link(c: &mut Cursor) -> Result<LinkStmt, ParseError> {
    if c.is_keyword("corner") {
        c.at += 1;
        let corner = c.name()?;
        c.keyword("to")?;
        let target = c.name()?;
        c.keyword("via")?;
        let via = c.hom_ref()?;
        Ok(LinkStmt::Corner {
            corner,
            target,
            via,
        })
    } else if c.is_keyword("split") {
        c.at += 1;
        let split = c.name()?;
        c.keyword("to")?;
        let target = c.name()?;
        c.keyword("via")?;
        let pi_a = c.hom_ref()?;
        let pi_b = c.hom_ref()?;
        let pi_d = c.hom_ref()?;
        c.keyword("sum")?;
        let sum_iso = c.hom_ref()?;
        c.keyword("inv")?;
        let sum_iso_inv = c.hom_ref()?;
        Ok(LinkStmt::Split {
            split,
            target,
            pi_a,
            pi_b,
            pi_d,
            sum_iso,
            sum_iso_inv,
        })
    } else {
        c.err("`corner` or `split`")
    }
}

struct Resolver {
    p: Presentation,
    objs: HashMap<String, ObjId>,
    homs: HashMap<String, HomId>,
    splits: HashMap<String, SplitId>,
}

impl Resolver {
    fn obj(&self, n: &Name) -> Result<ObjId, ParseError> {
        self.objs
            .get(&n.text)
            .copied()
            .ok_or_else(|| ParseError::Unresolved {
                pos: n.pos,
                kind: "object",
                name: n.text.clone(),
            })
    }

    fn hom(&self, n: &Name) -> Result<HomId, ParseError> {
        self.homs
            .get(&n.text)
            .copied()
            .ok_or_else(|| ParseError::Unresolved {
                pos: n.pos,
                kind: "homomorphism",
                name: n.text.clone(),
            })
    }

    fn split(&self, n: &Name) -> Result<SplitId, ParseError> {
        self.splits
            .get(&n.text)
            .copied()
            .ok_or_else(|| ParseError::Unresolved {
                pos: n.pos,
                kind: "split exact sequence",
                name: n.text.clone(),
            })
    }

    fn corner(&self, n: &Name) -> Result<CornerId, ParseError> {
        let hom = self.hom(n).map_err(|_| ParseError::Unresolved {
            pos: n.pos,
            kind: "corner embedding",
            name: n.text.clone(),
        })?;
        self.p
            .corners
            .iter()
            .position(|c| c.emb == hom)
            .map(|i| CornerId(i as u32))
            .ok_or_else(|| ParseError::Unresolved {
                pos: n.pos,
                kind: "corner embedding",
                name: n.text.clone(),
            })
    }

    /// `inferred` supplies the endpoints of a bare `0`.
    fn hom_ref(&self, r: &HomRef, inferred: Option<(ObjId, ObjId)>) -> Result<Hom, ParseError> {
        match r {
            HomRef::Name(n) => self.hom(n).map(Hom::Gen),
            HomRef::Id(o) => self.obj(o).map(Hom::Id),
            HomRef::Zero(Some((a, b)), _) => Ok(Hom::Zero(self.obj(a)?, self.obj(b)?)),
            HomRef::Zero(None, pos) => match inferred {
                Some((a, b)) => Ok(Hom::Zero(a, b)),
                None => Err(ParseError::Syntax {
                    pos: *pos,
                    expected: "`0(OBJ,OBJ)` (endpoints cannot be inferred here)".into(),
                    found: "`0`".into(),
                }),
            },
        }
    }
}

/// Parses DSL source into a [`Presentation`].
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut stmts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let toks = tokenize(line, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let end = Pos {
            line: lineno,
            col: line.chars().count() + 1,
        };
        let mut cursor = Cursor { toks, at: 0, end };
        stmts.push(parse_statement(&mut cursor)?);
    }
    resolve(stmts)
}

fn resolve(stmts: Vec<Stmt>) -> Result<Presentation, ParseError> {
    let mut r = Resolver {
        p: Presentation::default(),
        objs: HashMap::new(),
        homs: HashMap::new(),
        splits: HashMap::new(),
    };

    for st in &stmts {
        if let Stmt::Object { name, zero } = st {
            if r.objs.contains_key(&name.text) {
                return Err(ParseError::Duplicate {
                    pos: name.pos,
                    kind: "object",
                    name: name.text.clone(),
                });
            }
            r.objs
                .insert(name.text.clone(), ObjId(r.p.objects.len() as u32));
            r.p.objects.push(ObjectDecl {
                name: name.text.clone(),
                stabilization_of: None,
                is_zero: *zero,
                line: name.pos.line,
            });
        }
    }

    for st in &stmts {
        if let Stmt::Hom { name, dom, cod } = st {
            if r.homs.contains_key(&name.text) {
                return Err(ParseError::Duplicate {
                    pos: name.pos,
                    kind: "homomorphism",
                    name: name.text.clone(),
                });
            }
            let (dom, cod) = (r.obj(dom)?, r.obj(cod)?);
            r.homs
                .insert(name.text.clone(), HomId(r.p.homs.len() as u32));
            r.p.homs.push(HomDecl {
                name: name.text.clone(),
                dom,
                cod,
                line: name.pos.line,
            });
        }
    }

    for st in &stmts {
        match st {
            Stmt::Stab { stab, base, via } => {
                let (stab_id, base_id, emb) = (r.obj(stab)?, r.obj(base)?, r.hom(via)?);
                let decl = &mut r.p.objects[stab_id.0 as usize];
                match decl.stabilization_of {
                    Some(prev) if prev != base_id => {
                        return Err(ParseError::Duplicate {
                            pos: stab.pos,
                            kind: "stabilization tag for",
                            name: stab.text.clone(),
                        })
                    }
                    _ => decl.stabilization_of = Some(base_id),
                }
                if r.p.corners.iter().any(|c| c.emb == emb) {
                    return Err(ParseError::Duplicate {
                        pos: via.pos,
                        kind: "corner embedding",
                        name: via.text.clone(),
                    });
                }
                r.p.corners.push(CornerDecl {
                    emb,
                    line: via.pos.line,
                });
            }
            Stmt::Sum {
                sum,
                left,
                right,
                inj,
                proj,
            } => {
                let sum_id = r.obj(sum)?;
                if r.p.sums.iter().any(|s| s.sum == sum_id) {
                    return Err(ParseError::Duplicate {
                        pos: sum.pos,
                        kind: "direct sum",
                        name: sum.text.clone(),
                    });
                }
                let decl = SumDecl {
                    sum: sum_id,
                    left: r.obj(left)?,
                    right: r.obj(right)?,
                    i_left: r.hom(&inj.0)?,
                    i_right: r.hom(&inj.1)?,
                    p_left: r.hom(&proj.0)?,
                    p_right: r.hom(&proj.1)?,
                    line: sum.pos.line,
                };
                r.p.sums.push(decl);
            }
            Stmt::Homotopic { f0, f1 } => {
                let decl = HomotopyDecl {
                    f0: r.hom(f0)?,
                    f1: r.hom(f1)?,
                    line: f0.pos.line,
                };
                r.p.homotopies.push(decl);
            }
            Stmt::Group { name } => {
                if r.p.group_tag.is_some() {
                    return Err(ParseError::Duplicate {
                        pos: name.pos,
                        kind: "group tag",
                        name: name.text.clone(),
                    });
                }
                r.p.group_tag = Some(name.text.clone());
            }
            _ => {}
        }
    }

    for st in &stmts {
        if let Stmt::SplitExact { name, f, g, s, sum } = st {
            if r.splits.contains_key(&name.text) {
                return Err(ParseError::Duplicate {
                    pos: name.pos,
                    kind: "split exact sequence",
                    name: name.text.clone(),
                });
            }
            let sum_obj = r.obj(sum)?;
            let sum_id =
                r.p.sums
                    .iter()
                    .position(|d| d.sum == sum_obj)
                    .map(|i| SumId(i as u32))
                    .ok_or_else(|| ParseError::Unresolved {
                        pos: sum.pos,
                        kind: "direct sum",
                        name: sum.text.clone(),
                    })?;
            let decl = SplitExactDecl {
                name: name.text.clone(),
                f: r.hom(f)?,
                g: r.hom(g)?,
                s: r.hom(s)?,
                sum: sum_id,
                line: name.pos.line,
            };
            r.splits
                .insert(name.text.clone(), SplitId(r.p.splits.len() as u32));
            r.p.splits.push(decl);
        }
    }

    for st in &stmts {
        if let Stmt::Compose {
            first,
            second,
            result,
        } = st
        {
            let (a, b) = (r.hom(first)?, r.hom(second)?);
            let ends = (r.p.hom_decl(a).dom, r.p.hom_decl(b).cod);
            let h = r.hom_ref(result, Some(ends))?;
            if r.p.table.insert(a, b, h).is_some() {
                return Err(ParseError::Duplicate {
                    pos: first.pos,
                    kind: "composition entry",
                    name: format!("{};{}", first.text, second.text),
                });
            }
        }
    }

    for st in &stmts {
        if let Stmt::Rep {
            rep,
            object,
            iso,
            iso_inv,
            links,
        } = st
        {
            let (rep_id, obj_id) = (r.obj(rep)?, r.obj(object)?);
            if r.p.reps.iter().any(|d| d.object == obj_id) {
                return Err(ParseError::Duplicate {
                    pos: object.pos,
                    kind: "representative for",
                    name: object.text.clone(),
                });
            }
            let mut decl = RepresentativeDecl {
                object: obj_id,
                rep: rep_id,
                iso: r.hom_ref(iso, Some((obj_id, rep_id)))?,
                iso_inv: r.hom_ref(iso_inv, Some((rep_id, obj_id)))?,
                corner_links: Vec::new(),
                split_links: Vec::new(),
                line: rep.pos.line,
            };
            for link in links {
                match link {
                    LinkStmt::Corner {
                        corner,
                        target,
                        via,
                    } => decl.corner_links.push(CornerLink {
                        corner: r.corner(corner)?,
                        target: r.corner(target)?,
                        stab_iso: r.hom_ref(via, None)?,
                    }),
                    LinkStmt::Split {
                        split,
                        target,
                        pi_a,
                        pi_b,
                        pi_d,
                        sum_iso,
                        sum_iso_inv,
                    } => decl.split_links.push(SplitLink {
                        split: r.split(split)?,
                        target: r.split(target)?,
                        pi_a: r.hom_ref(pi_a, None)?,
                        pi_b: r.hom_ref(pi_b, None)?,
                        pi_d: r.hom_ref(pi_d, None)?,
                        sum_iso: r.hom_ref(sum_iso, None)?,
                        sum_iso_inv: r.hom_ref(sum_iso_inv, None)?,
                    }),
                }
            }
            r.p.reps.push(decl);
        }
    }

    let mut p = r.p;
    p.rebuild_indices();
    Ok(p)
}
