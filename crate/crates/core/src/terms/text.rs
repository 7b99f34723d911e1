//! Term text syntax: atoms `NAME | id(OBJ) | inv(CORNER) | theta(SPLIT) |
//! 0(OBJ,OBJ)` joined by `;`, words joined by `+` / `-`.

use thiserror::Error;

use super::{make_word, FormalSum, Letter, Sign, SignedWord, TermError, Word};
use crate::presentation::parse::{is_ident_char, is_ident_start};
use crate::presentation::{Hom, ObjId, Presentation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermParseError {
    #[error("column {col}: expected {expected}, found {found}")]
    Syntax {
        col: usize,
        expected: &'static str,
        found: String,
    },
    #[error("column {col}: unknown {kind} `{name}`")]
    Unknown {
        col: usize,
        kind: &'static str,
        name: String,
    },
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Zero,
    LParen,
    RParen,
    Comma,
    Semi,
    Plus,
    Minus,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Zero => "`0`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, TermParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        let tok = match c {
            '0' => Tok::Zero,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            other => {
                return Err(TermParseError::Syntax {
                    col,
                    expected: "a term",
                    found: format!("`{other}`"),
                })
            }
        };
        out.push((tok, col));
        i += 1;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

/// One parsed atom: either a letter or a zero homomorphism that makes its
/// word vanish while still fixing the typing.
enum Atom {
    Letter(Letter),
    Zero(ObjId, ObjId),
}

struct Parser<'a> {
    p: &'a Presentation,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), TermParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn unexpected(&self, expected: &'static str) -> TermParseError {
        TermParseError::Syntax {
            col: self.col(),
            expected,
            found: self.peek().describe(),
        }
    }

    fn ident(&mut self, expected: &'static str) -> Result<(String, usize), TermParseError> {
        let col = self.col();
        match self.peek() {
            Tok::Ident(_) => match self.bump() {
                Tok::Ident(s) => Ok((s, col)),
                _ => unreachable!(),
            },
            _ => Err(self.unexpected(expected)),
        }
    }

    fn object(&mut self) -> Result<ObjId, TermParseError> {
        let (name, col) = self.ident("an object name")?;
        self.p.object_id(&name).ok_or(TermParseError::Unknown {
            col,
            kind: "object",
            name,
        })
    }

    fn atom(&mut self) -> Result<Atom, TermParseError> {
        if *self.peek() == Tok::Zero {
            self.bump();
            self.expect(Tok::LParen, "`(`")?;
            let a = self.object()?;
            self.expect(Tok::Comma, "`,`")?;
            let b = self.object()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Atom::Zero(a, b));
        }
        let (name, col) = self.ident("a letter")?;
        if *self.peek() != Tok::LParen {
            let id = self.p.hom_id(&name).ok_or(TermParseError::Unknown {
                col,
                kind: "homomorphism",
                name,
            })?;
            return Ok(Atom::Letter(Letter::Gen(Hom::Gen(id))));
        }
        self.bump();
        let atom = match name.as_str() {
            "id" => {
                let o = self.object()?;
                // the identity of a zero object is its zero endomorphism
                if self.p.object(o).is_zero {
                    Atom::Zero(o, o)
                } else {
                    Atom::Letter(Letter::Gen(Hom::Id(o)))
                }
            }
            "inv" => {
                let (arg, acol) = self.ident("a corner name")?;
                let c = self.p.corner_id(&arg).ok_or(TermParseError::Unknown {
                    col: acol,
                    kind: "corner",
                    name: arg,
                })?;
                Atom::Letter(Letter::CornerInv(c))
            }
            "theta" => {
                let (arg, acol) = self.ident("a split exact sequence name")?;
                let s = self.p.split_id(&arg).ok_or(TermParseError::Unknown {
                    col: acol,
                    kind: "split exact sequence",
                    name: arg,
                })?;
                Atom::Letter(Letter::Theta(s))
            }
            _ => {
                return Err(TermParseError::Unknown {
                    col,
                    kind: "constructor",
                    name,
                })
            }
        };
        self.expect(Tok::RParen, "`)`")?;
        Ok(atom)
    }

    /// Returns the word (None if it vanishes) and its endpoints.
    fn word(&mut self) -> Result<(Option<Word>, ObjId, ObjId), TermParseError> {
        let mut atoms = vec![self.atom()?];
        while *self.peek() == Tok::Semi {
            self.bump();
            atoms.push(self.atom()?);
        }
        let ends = |a: &Atom| match a {
            Atom::Letter(l) => (l.dom(self.p), l.cod(self.p)),
            Atom::Zero(d, c) => (*d, *c),
        };
        for (i, pair) in atoms.windows(2).enumerate() {
            let (c, d) = (ends(&pair[0]).1, ends(&pair[1]).0);
            if c != d {
                return Err(TermError::TypeMismatch {
                    position: i + 2,
                    left: self.p.obj_name(c).to_string(),
                    right: self.p.obj_name(d).to_string(),
                }
                .into());
            }
        }
        let dom = ends(&atoms[0]).0;
        let cod = ends(atoms.last().unwrap()).1;
        if atoms.iter().any(|a| matches!(a, Atom::Zero(..))) {
            return Ok((None, dom, cod));
        }
        let letters = atoms
            .into_iter()
            .map(|a| match a {
                Atom::Letter(l) => l,
                Atom::Zero(..) => unreachable!(),
            })
            .collect();
        Ok((Some(make_word(self.p, letters)?), dom, cod))
    }

    fn sum(&mut self) -> Result<FormalSum, TermParseError> {
        let mut sign = Sign::Plus;
        if *self.peek() == Tok::Minus {
            self.bump();
            sign = Sign::Minus;
        } else if *self.peek() == Tok::Plus {
            self.bump();
        }
        let mut terms = Vec::new();
        let mut ends: Option<(ObjId, ObjId)> = None;
        loop {
            let (word, dom, cod) = self.word()?;
            match ends {
                None => ends = Some((dom, cod)),
                Some((d, c)) if (d, c) != (dom, cod) => {
                    return Err(TermError::Heterogeneous {
                        expected: format!("{} -> {}", self.p.obj_name(d), self.p.obj_name(c)),
                        found: format!("{} -> {}", self.p.obj_name(dom), self.p.obj_name(cod)),
                    }
                    .into())
                }
                _ => {}
            }
            if let Some(w) = word {
                terms.push(SignedWord::new(sign, w));
            }
            sign = match self.peek() {
                Tok::Plus => Sign::Plus,
                Tok::Minus => Sign::Minus,
                Tok::End => break,
                _ => return Err(self.unexpected("`+`, `-`, `;` or end of input")),
            };
            self.bump();
        }
        let (dom, cod) = ends.expect("at least one word");
        Ok(FormalSum::from_terms(dom, cod, terms)?)
    }
}

/// Parses a formal sum. The result is the literal term sequence, not
/// canonicalized.
pub fn parse_sum(p: &Presentation, text: &str) -> Result<FormalSum, TermParseError> {
    let mut parser = Parser {
        p,
        toks: tokenize(text)?,
        pos: 0,
    };
    parser.sum()
}

/// Parses a single word with no zero atoms.
pub fn parse_word(p: &Presentation, text: &str) -> Result<Word, TermParseError> {
    let mut parser = Parser {
        p,
        toks: tokenize(text)?,
        pos: 0,
    };
    let (word, ..) = parser.word()?;
    if *parser.peek() != Tok::End {
        return Err(parser.unexpected("`;` or end of input"));
    }
    word.ok_or_else(|| TermError::ZeroLetter("0".into()).into())
}
