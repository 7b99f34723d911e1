//! The free layer: letters, typed words and signed formal sums.
//!
//! A word `l1;l2;...;ln` denotes the composite "first `l1`, then `l2`, ...",
//! i.e. `ln ∘ ... ∘ l1`. Formal sums are kept as plain sequences here;
//! [`canonical_sum_form`] is the only operation that reorders or cancels.

mod text;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Mul, Neg};

use thiserror::Error;

use crate::presentation::{CornerId, Hom, ObjId, Presentation, SplitId};

pub use text::{parse_sum, parse_word, TermParseError};

/// A letter of the alphabet: a homomorphism of the presentation, the formal
/// inverse of a corner embedding, or the formal inverse of `σ` for a split
/// exact sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Gen(Hom),
    CornerInv(CornerId),
    Theta(SplitId),
}

impl Letter {
    pub fn is_synthetic(self) -> bool {
        !matches!(self, Letter::Gen(_))
    }

    pub fn dom(self, p: &Presentation) -> ObjId {
        match self {
            Letter::Gen(h) => p.dom(h),
            Letter::CornerInv(c) => p.corner_objects(c).1,
            Letter::Theta(s) => p.split_objects(s).1,
        }
    }

    pub fn cod(self, p: &Presentation) -> ObjId {
        match self {
            Letter::Gen(h) => p.cod(h),
            Letter::CornerInv(c) => p.corner_objects(c).0,
            Letter::Theta(s) => p.sum(p.split(s).sum).sum,
        }
    }

    pub fn name(self, p: &Presentation) -> String {
        match self {
            Letter::Gen(h) => p.hom_name(h),
            Letter::CornerInv(c) => format!("inv({})", p.corner_name(c)),
            Letter::Theta(s) => format!("theta({})", p.split(s).name),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("type mismatch at position {position}: {left} != {right}")]
    TypeMismatch {
        position: usize,
        left: String,
        right: String,
    },
    #[error("a word needs at least one letter")]
    EmptyWord,
    #[error("zero homomorphism {0} cannot be a letter; it is the empty sum")]
    ZeroLetter(String),
    #[error("sum terms must share domain and codomain: {expected} vs {found}")]
    Heterogeneous { expected: String, found: String },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
}

/// A nonempty chain-typed sequence of letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
    dom: ObjId,
    cod: ObjId,
}

impl Word {
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn dom(&self) -> ObjId {
        self.dom
    }

    pub fn cod(&self) -> ObjId {
        self.cod
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn single(p: &Presentation, letter: Letter) -> Result<Word, TermError> {
        make_word(p, vec![letter])
    }

    /// Builds a word from letters already known to chain. Callers must
    /// guarantee typing.
    pub(crate) fn from_parts(letters: Vec<Letter>, dom: ObjId, cod: ObjId) -> Word {
        debug_assert!(!letters.is_empty());
        Word { letters, dom, cod }
    }

    pub fn display<'a>(&'a self, p: &'a Presentation) -> impl fmt::Display + 'a {
        WordDisplay { p, w: self }
    }
}

/// Words are ordered by length, then lexicographically by letter.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
            .then_with(|| (self.dom, self.cod).cmp(&(other.dom, other.cod)))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct WordDisplay<'a> {
    p: &'a Presentation,
    w: &'a Word,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.w.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            f.write_str(&l.name(self.p))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedWord {
    pub word: Word,
    pub sign: Sign,
}

impl SignedWord {
    pub fn new(sign: Sign, word: Word) -> Self {
        SignedWord { word, sign }
    }

    pub fn negated(&self) -> Self {
        SignedWord {
            word: self.word.clone(),
            sign: -self.sign,
        }
    }
}

/// A signed sum of equally typed words. The empty sum is the zero morphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormalSum {
    dom: ObjId,
    cod: ObjId,
    terms: Vec<SignedWord>,
}

impl FormalSum {
    pub fn zero(dom: ObjId, cod: ObjId) -> Self {
        FormalSum {
            dom,
            cod,
            terms: Vec::new(),
        }
    }

    pub fn from_word(word: Word) -> Self {
        Self::signed(Sign::Plus, word)
    }

    pub fn signed(sign: Sign, word: Word) -> Self {
        FormalSum {
            dom: word.dom,
            cod: word.cod,
            terms: vec![SignedWord::new(sign, word)],
        }
    }

    pub fn from_terms(dom: ObjId, cod: ObjId, terms: Vec<SignedWord>) -> Result<Self, TermError> {
        for t in &terms {
            if t.word.dom != dom || t.word.cod != cod {
                return Err(TermError::Heterogeneous {
                    expected: format!("{dom:?} -> {cod:?}"),
                    found: format!("{:?} -> {:?}", t.word.dom, t.word.cod),
                });
            }
        }
        Ok(FormalSum { dom, cod, terms })
    }

    pub fn dom(&self) -> ObjId {
        self.dom
    }

    pub fn cod(&self) -> ObjId {
        self.cod
    }

    pub fn terms(&self) -> &[SignedWord] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn display<'a>(&'a self, p: &'a Presentation) -> impl fmt::Display + 'a {
        SumDisplay { p, s: self }
    }

    pub fn to_text(&self, p: &Presentation) -> String {
        self.display(p).to_string()
    }
}

struct SumDisplay<'a> {
    p: &'a Presentation,
    s: &'a FormalSum,
}

impl fmt::Display for SumDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.s.terms.is_empty() {
            return write!(
                f,
                "0({},{})",
                self.p.obj_name(self.s.dom),
                self.p.obj_name(self.s.cod)
            );
        }
        for (i, t) in self.s.terms.iter().enumerate() {
            match (i, t.sign) {
                (0, Sign::Plus) => {}
                (0, Sign::Minus) => f.write_str("-")?,
                (_, Sign::Plus) => f.write_str(" + ")?,
                (_, Sign::Minus) => f.write_str(" - ")?,
            }
            write!(f, "{}", t.word.display(self.p))?;
        }
        Ok(())
    }
}

fn obj_pair(p: &Presentation, a: ObjId, b: ObjId) -> (String, String) {
    (p.obj_name(a).to_string(), p.obj_name(b).to_string())
}

/// Checks that consecutive letters chain and computes the endpoints.
pub fn make_word(p: &Presentation, letters: Vec<Letter>) -> Result<Word, TermError> {
    let first = *letters.first().ok_or(TermError::EmptyWord)?;
    for l in &letters {
        if let Letter::Gen(h) = l {
            if p.is_zero_hom(*h) {
                return Err(TermError::ZeroLetter(p.hom_name(*h)));
            }
        }
    }
    for (i, pair) in letters.windows(2).enumerate() {
        let (c, d) = (pair[0].cod(p), pair[1].dom(p));
        if c != d {
            let (left, right) = obj_pair(p, c, d);
            return Err(TermError::TypeMismatch {
                position: i + 2,
                left,
                right,
            });
        }
    }
    let dom = first.dom(p);
    let cod = letters.last().unwrap().cod(p);
    Ok(Word { letters, dom, cod })
}

/// The functor from the presentation: a homomorphism becomes a one-letter
/// word, a zero homomorphism the empty sum.
pub fn embed_hom(p: &Presentation, h: Hom) -> Result<FormalSum, TermError> {
    if p.is_zero_hom(h) {
        Ok(FormalSum::zero(p.dom(h), p.cod(h)))
    } else {
        Ok(FormalSum::from_word(make_word(p, vec![Letter::Gen(h)])?))
    }
}

pub fn concat(p: &Presentation, w1: &Word, w2: &Word) -> Result<Word, TermError> {
    if w1.cod != w2.dom {
        let (left, right) = obj_pair(p, w1.cod, w2.dom);
        return Err(TermError::TypeMismatch {
            position: w1.len() + 1,
            left,
            right,
        });
    }
    Ok(concat_unchecked(w1, w2))
}

pub(crate) fn concat_unchecked(w1: &Word, w2: &Word) -> Word {
    let mut letters = Vec::with_capacity(w1.len() + w2.len());
    letters.extend_from_slice(&w1.letters);
    letters.extend_from_slice(&w2.letters);
    Word {
        letters,
        dom: w1.dom,
        cod: w2.cod,
    }
}

/// Distributive product. Terms are enumerated as `f1 g1, ..., fn g1, f1 g2, ...`.
pub fn product(p: &Presentation, s1: &FormalSum, s2: &FormalSum) -> Result<FormalSum, TermError> {
    if s1.cod != s2.dom {
        let (left, right) = obj_pair(p, s1.cod, s2.dom);
        return Err(TermError::TypeMismatch {
            position: 0,
            left,
            right,
        });
    }
    let mut terms = Vec::with_capacity(s1.len() * s2.len());
    for g in &s2.terms {
        for f in &s1.terms {
            terms.push(SignedWord::new(
                f.sign * g.sign,
                concat_unchecked(&f.word, &g.word),
            ));
        }
    }
    Ok(FormalSum {
        dom: s1.dom,
        cod: s2.cod,
        terms,
    })
}

pub fn add(p: &Presentation, s1: &FormalSum, s2: &FormalSum) -> Result<FormalSum, TermError> {
    if s1.dom != s2.dom || s1.cod != s2.cod {
        return Err(TermError::Heterogeneous {
            expected: format!("{} -> {}", p.obj_name(s1.dom), p.obj_name(s1.cod)),
            found: format!("{} -> {}", p.obj_name(s2.dom), p.obj_name(s2.cod)),
        });
    }
    let mut terms = s1.terms.clone();
    terms.extend(s2.terms.iter().cloned());
    Ok(FormalSum {
        dom: s1.dom,
        cod: s1.cod,
        terms,
    })
}

pub fn negate(s: &FormalSum) -> FormalSum {
    FormalSum {
        dom: s.dom,
        cod: s.cod,
        terms: s.terms.iter().map(SignedWord::negated).collect(),
    }
}

/// `σ = pA;f + pB;s` for a split exact sequence.
pub fn sigma_of(p: &Presentation, split: SplitId) -> FormalSum {
    let s = p.split(split);
    let sum = p.sum(s.sum);
    let d = p.hom_decl(s.f).cod;
    let left = Word::from_parts(
        vec![
            Letter::Gen(Hom::Gen(sum.p_left)),
            Letter::Gen(Hom::Gen(s.f)),
        ],
        sum.sum,
        d,
    );
    let right = Word::from_parts(
        vec![
            Letter::Gen(Hom::Gen(sum.p_right)),
            Letter::Gen(Hom::Gen(s.s)),
        ],
        sum.sum,
        d,
    );
    FormalSum {
        dom: sum.sum,
        cod: d,
        terms: vec![
            SignedWord::new(Sign::Plus, left),
            SignedWord::new(Sign::Plus, right),
        ],
    }
}

/// Looks a split exact sequence up by name and returns its `σ`.
pub fn sigma_by_name(p: &Presentation, name: &str) -> Result<FormalSum, TermError> {
    let id = p.split_id(name).ok_or_else(|| TermError::Unknown {
        kind: "split exact sequence",
        name: name.to_string(),
    })?;
    Ok(sigma_of(p, id))
}

/// Sorts terms by word, then cancels equal words of opposite sign in pairs.
/// The result is the unique representative modulo permutation, cancellation
/// and the zero unit.
pub fn canonical_sum_form(s: &FormalSum) -> FormalSum {
    let mut terms = s.terms.clone();
    terms.sort_by(|a, b| a.word.cmp(&b.word).then(a.sign.cmp(&b.sign)));
    let mut out: Vec<SignedWord> = Vec::with_capacity(terms.len());
    let mut i = 0;
    while i < terms.len() {
        let mut j = i;
        let mut balance = 0i64;
        while j < terms.len() && terms[j].word == terms[i].word {
            balance += terms[j].sign.as_i64();
            j += 1;
        }
        let sign = if balance > 0 { Sign::Plus } else { Sign::Minus };
        for _ in 0..balance.unsigned_abs() {
            out.push(SignedWord::new(sign, terms[i].word.clone()));
        }
        i = j;
    }
    FormalSum {
        dom: s.dom,
        cod: s.cod,
        terms: out,
    }
}

/// `s + other` for equally typed sums, in canonical form. Used by the rewrite
/// layer, which only ever combines typed patterns.
pub(crate) fn canonical_combine(
    base: &FormalSum,
    extra: impl IntoIterator<Item = SignedWord>,
) -> FormalSum {
    let mut terms = base.terms.clone();
    terms.extend(extra);
    canonical_sum_form(&FormalSum {
        dom: base.dom,
        cod: base.cod,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P1: &str = include_str!("../../fixtures/p1.gk");

    fn p1() -> Presentation {
        Presentation::parse(P1).unwrap()
    }

    fn gen(p: &Presentation, name: &str) -> Letter {
        Letter::Gen(p.resolve_hom(name).unwrap())
    }

    fn w(p: &Presentation, names: &[&str]) -> Word {
        let letters = names
            .iter()
            .map(|n| match n.strip_prefix("theta:") {
                Some(s) => Letter::Theta(p.split_id(s).unwrap()),
                None => gen(p, n),
            })
            .collect();
        make_word(p, letters).unwrap()
    }

    fn sum(p: &Presentation, text: &str) -> FormalSum {
        parse_sum(p, text).unwrap()
    }

    #[test]
    fn make_word_types() {
        let p = p1();
        let fg = w(&p, &["f", "g"]);
        assert_eq!(p.obj_name(fg.dom()), "A");
        assert_eq!(p.obj_name(fg.cod()), "B");

        let err = make_word(&p, vec![gen(&p, "g"), gen(&p, "f")]).unwrap_err();
        assert_eq!(
            err,
            TermError::TypeMismatch {
                position: 2,
                left: "B".into(),
                right: "A".into()
            }
        );

        let chain = w(&p, &["pA", "f", "theta:S1"]);
        assert_eq!(p.obj_name(chain.dom()), "AB");
        assert_eq!(p.obj_name(chain.cod()), "AB");
    }

    #[test]
    fn zero_letters_are_rejected() {
        let p = p1();
        let z = p.resolve_hom("0(A,B)").unwrap();
        assert!(matches!(
            make_word(&p, vec![Letter::Gen(z)]),
            Err(TermError::ZeroLetter(_))
        ));
        assert!(matches!(make_word(&p, vec![]), Err(TermError::EmptyWord)));
    }

    #[test]
    fn embed() {
        let p = p1();
        assert_eq!(
            embed_hom(&p, p.resolve_hom("f").unwrap()).unwrap(),
            sum(&p, "f")
        );
        let zero = embed_hom(&p, p.resolve_hom("0(A,B)").unwrap()).unwrap();
        assert!(zero.is_empty());
        assert_eq!(p.obj_name(zero.dom()), "A");
        assert_eq!(
            embed_hom(&p, p.resolve_hom("id(A)").unwrap()).unwrap(),
            sum(&p, "id(A)")
        );
    }

    #[test]
    fn concat_is_free() {
        let p = p1();
        let f = w(&p, &["f"]);
        let g = w(&p, &["g"]);
        assert_eq!(concat(&p, &f, &g).unwrap(), w(&p, &["f", "g"]));
        assert_eq!(
            concat(&p, &f, &w(&p, &["id(D)"])).unwrap(),
            w(&p, &["f", "id(D)"])
        );
        assert_eq!(
            concat(&p, &w(&p, &["pA", "f"]), &w(&p, &["theta:S1"])).unwrap(),
            w(&p, &["pA", "f", "theta:S1"])
        );
        assert!(concat(&p, &g, &f).is_err());
    }

    #[test]
    fn product_signs_and_order() {
        let p = p1();
        let lhs = sum(&p, "f - f");
        let rhs = sum(&p, "g");
        assert_eq!(product(&p, &lhs, &rhs).unwrap().to_text(&p), "f;g - f;g");

        let empty = sum(&p, "0(A,D)");
        assert!(product(&p, &empty, &rhs).unwrap().is_empty());

        let two = sum(&p, "g - g");
        assert_eq!(
            product(&p, &sum(&p, "f"), &two).unwrap().to_text(&p),
            "f;g - f;g"
        );

        // f1 g1, f2 g1, f1 g2, f2 g2
        let a = sum(&p, "pA;f + pB;s");
        let b = sum(&p, "g - g_s;g");
        assert_eq!(
            product(&p, &a, &b).unwrap().to_text(&p),
            "pA;f;g + pB;s;g - pA;f;g_s;g - pB;s;g_s;g"
        );
    }

    #[test]
    fn add_and_negate_are_free() {
        let p = p1();
        assert_eq!(
            add(&p, &sum(&p, "f"), &sum(&p, "0(A,D)")).unwrap(),
            sum(&p, "f")
        );
        assert_eq!(
            add(&p, &sum(&p, "f"), &sum(&p, "-f")).unwrap().to_text(&p),
            "f - f"
        );
        assert_eq!(negate(&sum(&p, "f - f2")).to_text(&p), "-f + f2");
        assert!(add(&p, &sum(&p, "f"), &sum(&p, "g")).is_err());
    }

    #[test]
    fn sigma() {
        let p = p1();
        let s = sigma_by_name(&p, "S1").unwrap();
        assert_eq!(s.to_text(&p), "pA;f + pB;s");
        assert_eq!(p.obj_name(s.dom()), "AB");
        assert_eq!(p.obj_name(s.cod()), "D");
        assert!(sigma_by_name(&p, "S9").is_err());
    }

    #[test]
    fn canonical_examples() {
        let p = p1();
        assert!(canonical_sum_form(&sum(&p, "f - f")).is_empty());
        assert_eq!(canonical_sum_form(&sum(&p, "f + f - f")), sum(&p, "f"));
        let c = canonical_sum_form(&sum(&p, "-pA;f;g_s + pA;f2"));
        assert_eq!(c.to_text(&p), "pA;f2 - pA;f;g_s");
        let c = canonical_sum_form(&sum(&p, "-pA;f;g_s + pA;f"));
        assert_eq!(c.to_text(&p), "pA;f - pA;f;g_s");
        assert_eq!(canonical_sum_form(&c), c);
    }
}
