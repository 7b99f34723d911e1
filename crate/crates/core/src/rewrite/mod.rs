//! Elementary equivalences as bidirectional, context-closed rules over formal
//! sums, with bounded equivalence search and checkable proof traces.
//!
//! Sums are always held in canonical form, so permutation of summands and
//! the zero unit never appear as explicit steps.
//!
//! A step applies rule `from ≡ to` with contexts `y`, `z` and a sign `ε`:
//!
//! ```text
//! after = canonical(before - ε·y·from·z + ε·y·to·z)
//! ```
//!
//! When every term of `ε·y·from·z` occurs in `before` this is the plain
//! replacement `x + y·from·z ≡ x + y·to·z`. Terms that do not occur are
//! first introduced together with their negatives (cancellation read
//! backwards) and then rewritten, so every step is still a composite of
//! elementary equivalences and is undone by swapping the direction.

mod search;
mod trace_json;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::presentation::{CornerId, Hom, Presentation, SplitId, SumId};
use crate::terms::{
    canonical_sum_form, embed_hom, make_word, sigma_of, FormalSum, Letter, Sign, SignedWord, Word,
};

pub use search::{decide_equiv, successors, Budget, Rewriter, SearchStats, Verdict};
pub use trace_json::{trace_from_json, trace_to_json, TraceFormatError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    LhsToRhs,
    RhsToLhs,
}

impl Direction {
    pub fn reversed(self) -> Direction {
        match self {
            Direction::LhsToRhs => Direction::RhsToLhs,
            Direction::RhsToLhs => Direction::LhsToRhs,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::LhsToRhs => "lhs->rhs",
            Direction::RhsToLhs => "rhs->lhs",
        }
    }
}

/// Names one instance of an elementary equivalence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    /// `+w - w ≡ 0`.
    Cancel(Word),
    /// `pA;iA + pB;iB ≡ id(A⊕B)`.
    Biproduct(SumId),
    /// `f;g ≡ table(f,g)`, the empty sum when the composite is zero.
    Fusion(Hom, Hom),
    /// `id;q ≡ q` (left) or `q;id ≡ q` (right) for a synthetic letter `q`.
    Unit(Letter, Side),
    /// `f0 ≡ f1` for the homotopy pair with this index.
    Homotopy(usize),
    /// `c;inv(c) ≡ id(A)` (left) or `inv(c);c ≡ id(A_K)` (right).
    Stability(CornerId, Side),
    /// `σ;θ ≡ id(A⊕B)` (left) or `θ;σ ≡ id(D)` (right).
    SplitExact(SplitId, Side),
}

impl RuleId {
    pub fn display<'a>(&'a self, p: &'a Presentation) -> impl fmt::Display + 'a {
        RuleIdDisplay { p, id: self }
    }

    pub fn to_text(&self, p: &Presentation) -> String {
        self.display(p).to_string()
    }
}

struct RuleIdDisplay<'a> {
    p: &'a Presentation,
    id: &'a RuleId,
}

impl fmt::Display for RuleIdDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        match self.id {
            RuleId::Cancel(w) => write!(f, "R2({})", w.display(p)),
            RuleId::Biproduct(s) => write!(f, "R4({})", p.obj_name(p.sum(*s).sum)),
            RuleId::Fusion(a, b) => write!(f, "R5({},{})", p.hom_name(*a), p.hom_name(*b)),
            RuleId::Unit(q, side) => write!(f, "R6({},{})", side.as_str(), q.name(p)),
            RuleId::Homotopy(i) => {
                let h = &p.homotopies[*i];
                write!(f, "R7({},{})", p.hom_decl(h.f0).name, p.hom_decl(h.f1).name)
            }
            RuleId::Stability(c, side) => {
                write!(f, "R8({},{})", side.as_str(), p.corner_name(*c))
            }
            RuleId::SplitExact(s, side) => {
                write!(f, "R9({},{})", side.as_str(), p.split(*s).name)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub id: RuleId,
    pub lhs: FormalSum,
    pub rhs: FormalSum,
}

impl Rule {
    /// The side a step consumes and the side it produces.
    pub fn sides(&self, dir: Direction) -> (&FormalSum, &FormalSum) {
        match dir {
            Direction::LhsToRhs => (&self.lhs, &self.rhs),
            Direction::RhsToLhs => (&self.rhs, &self.lhs),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("no such rule: {0}")]
    UnknownRule(String),
    #[error("context does not fit the rule: {0}")]
    ContextType(String),
    #[error("pattern not present in the sum")]
    PatternNotPresent,
    #[error("sums have different types: {0}")]
    Typing(String),
}

/// Builds the rule named by `id`, checking that it exists in the
/// presentation.
pub fn rule_for(p: &Presentation, id: &RuleId) -> Result<Rule, RewriteError> {
    let unknown = || RewriteError::UnknownRule(format!("{id:?}"));
    let single = |letters: Vec<Letter>| -> Result<FormalSum, RewriteError> {
        make_word(p, letters)
            .map(FormalSum::from_word)
            .map_err(|_| unknown())
    };
    let emb = |h: Hom| embed_hom(p, h).map_err(|_| unknown());
    let g = |h| Letter::Gen(Hom::Gen(h));
    let (lhs, rhs) = match id {
        RuleId::Cancel(w) => {
            let lhs = FormalSum::from_terms(
                w.dom(),
                w.cod(),
                vec![
                    SignedWord::new(Sign::Plus, w.clone()),
                    SignedWord::new(Sign::Minus, w.clone()),
                ],
            )
            .map_err(|_| unknown())?;
            (lhs, FormalSum::zero(w.dom(), w.cod()))
        }
        RuleId::Biproduct(s) => {
            if s.0 as usize >= p.sums.len() {
                return Err(unknown());
            }
            let d = p.sum(*s);
            let a = single(vec![g(d.p_left), g(d.i_left)])?;
            let b = single(vec![g(d.p_right), g(d.i_right)])?;
            let lhs = crate::terms::add(p, &a, &b).map_err(|_| unknown())?;
            (lhs, emb(Hom::Id(d.sum))?)
        }
        RuleId::Fusion(a, b) => {
            if !is_letter_hom(p, *a) || !is_letter_hom(p, *b) {
                return Err(unknown());
            }
            let c = p.compose_lookup(*a, *b).map_err(|_| unknown())?;
            (single(vec![Letter::Gen(*a), Letter::Gen(*b)])?, emb(c)?)
        }
        RuleId::Unit(q, side) => {
            if !q.is_synthetic() || !letter_exists(p, *q) {
                return Err(unknown());
            }
            let lhs = match side {
                Side::Left => single(vec![Letter::Gen(Hom::Id(q.dom(p))), *q])?,
                Side::Right => single(vec![*q, Letter::Gen(Hom::Id(q.cod(p)))])?,
            };
            (lhs, single(vec![*q])?)
        }
        RuleId::Homotopy(i) => {
            let h = p.homotopies.get(*i).ok_or_else(unknown)?;
            (single(vec![g(h.f0)])?, single(vec![g(h.f1)])?)
        }
        RuleId::Stability(c, side) => {
            if c.0 as usize >= p.corners.len() {
                return Err(unknown());
            }
            let emb_letter = g(p.corner(*c).emb);
            let inv = Letter::CornerInv(*c);
            let (a, ak) = p.corner_objects(*c);
            match side {
                Side::Left => (single(vec![emb_letter, inv])?, emb(Hom::Id(a))?),
                Side::Right => (single(vec![inv, emb_letter])?, emb(Hom::Id(ak))?),
            }
        }
        RuleId::SplitExact(s, side) => {
            if s.0 as usize >= p.splits.len() {
                return Err(unknown());
            }
            let sigma = sigma_of(p, *s);
            let theta = single(vec![Letter::Theta(*s)])?;
            let (_, d, _) = p.split_objects(*s);
            let ab = p.sum(p.split(*s).sum).sum;
            match side {
                Side::Left => (
                    crate::terms::product(p, &sigma, &theta).map_err(|_| unknown())?,
                    emb(Hom::Id(ab))?,
                ),
                Side::Right => (
                    crate::terms::product(p, &theta, &sigma).map_err(|_| unknown())?,
                    emb(Hom::Id(d))?,
                ),
            }
        }
    };
    Ok(Rule {
        id: id.clone(),
        lhs,
        rhs,
    })
}

fn is_letter_hom(p: &Presentation, h: Hom) -> bool {
    match h {
        Hom::Gen(id) => (id.0 as usize) < p.homs.len(),
        Hom::Id(o) => (o.0 as usize) < p.objects.len() && !p.object(o).is_zero,
        Hom::Zero(..) => false,
    }
}

fn letter_exists(p: &Presentation, l: Letter) -> bool {
    match l {
        Letter::Gen(h) => is_letter_hom(p, h),
        Letter::CornerInv(c) => (c.0 as usize) < p.corners.len(),
        Letter::Theta(s) => (s.0 as usize) < p.splits.len(),
    }
}

/// Homs usable as letters: declared generators and identities of nonzero
/// objects.
pub fn letter_homs(p: &Presentation) -> Vec<Hom> {
    let mut out: Vec<Hom> = p.hom_ids().map(Hom::Gen).collect();
    out.extend(
        p.object_ids()
            .filter(|o| !p.object(*o).is_zero)
            .map(Hom::Id),
    );
    out
}

pub fn synthetic_letters(p: &Presentation) -> Vec<Letter> {
    let mut out: Vec<Letter> = p.corner_ids().map(Letter::CornerInv).collect();
    out.extend(p.split_ids().map(Letter::Theta));
    out
}

/// All materialized rules. Cancellation is a schema over arbitrary words and
/// is checked on demand instead.
#[derive(Clone, Debug)]
pub struct RuleSet {
    rules: Vec<Rule>,
    by_id: HashMap<RuleId, usize>,
}

impl RuleSet {
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn get(&self, id: &RuleId) -> Option<&Rule> {
        self.by_id.get(id).map(|&i| &self.rules[i])
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// Instantiates every elementary equivalence of the presentation.
/// Presentations are assumed valid; instances that fail to build (such as a
/// missing table entry) are skipped.
pub fn instantiate_rules(p: &Presentation) -> RuleSet {
    let mut ids = Vec::new();
    ids.extend(p.sum_ids().map(RuleId::Biproduct));
    let homs = letter_homs(p);
    for &a in &homs {
        for &b in &homs {
            if p.cod(a) == p.dom(b) {
                ids.push(RuleId::Fusion(a, b));
            }
        }
    }
    for q in synthetic_letters(p) {
        ids.push(RuleId::Unit(q, Side::Left));
        ids.push(RuleId::Unit(q, Side::Right));
    }
    ids.extend((0..p.homotopies.len()).map(RuleId::Homotopy));
    for c in p.corner_ids() {
        ids.push(RuleId::Stability(c, Side::Left));
        ids.push(RuleId::Stability(c, Side::Right));
    }
    for s in p.split_ids() {
        ids.push(RuleId::SplitExact(s, Side::Left));
        ids.push(RuleId::SplitExact(s, Side::Right));
    }
    let rules: Vec<Rule> = ids.iter().filter_map(|id| rule_for(p, id).ok()).collect();
    let by_id = rules
        .iter()
        .enumerate()
        .map(|(i, r)| (r.id.clone(), i))
        .collect();
    RuleSet { rules, by_id }
}

/// A rule applied in direction `direction`, inside contexts `y` and `z`,
/// scaled by `sign`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContextApplication {
    pub rule: RuleId,
    pub direction: Direction,
    pub sign: Sign,
    pub y: Option<Word>,
    pub z: Option<Word>,
}

impl ContextApplication {
    pub fn new(rule: RuleId, direction: Direction) -> Self {
        ContextApplication {
            rule,
            direction,
            sign: Sign::Plus,
            y: None,
            z: None,
        }
    }

    pub fn with_context(mut self, y: Option<Word>, z: Option<Word>) -> Self {
        self.y = y;
        self.z = z;
        self
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    /// The step that undoes this one.
    pub fn inverse(&self) -> Self {
        ContextApplication {
            direction: self.direction.reversed(),
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofStep {
    pub app: ContextApplication,
    /// For each term of the consumed side, the index in the before-state of
    /// the summand it matched, if any.
    pub matched: Vec<Option<usize>>,
    pub after: FormalSum,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTrace {
    pub start: FormalSum,
    pub end: FormalSum,
    pub steps: Vec<ProofStep>,
}

impl ProofTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Start followed by every after-state.
    pub fn states(&self) -> impl Iterator<Item = &FormalSum> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|s| &s.after))
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn then(mut self, other: ProofTrace) -> ProofTrace {
        self.steps.extend(other.steps);
        self.end = other.end;
        self
    }
}

pub(crate) fn with_context(y: Option<&Word>, w: &Word, z: Option<&Word>) -> Word {
    let mut letters = Vec::with_capacity(w.len() + 4);
    if let Some(y) = y {
        letters.extend_from_slice(y.letters());
    }
    letters.extend_from_slice(w.letters());
    if let Some(z) = z {
        letters.extend_from_slice(z.letters());
    }
    let dom = y.map_or(w.dom(), Word::dom);
    let cod = z.map_or(w.cod(), Word::cod);
    Word::from_parts(letters, dom, cod)
}

/// `ε·y·s·z` distributed over the terms of `s`.
pub(crate) fn scaled(
    sign: Sign,
    y: Option<&Word>,
    s: &FormalSum,
    z: Option<&Word>,
) -> Vec<SignedWord> {
    s.terms()
        .iter()
        .map(|t| SignedWord::new(sign * t.sign, with_context(y, &t.word, z)))
        .collect()
}

fn check_context(
    p: &Presentation,
    before: &FormalSum,
    rule: &Rule,
    app: &ContextApplication,
) -> Result<(), RewriteError> {
    let (rd, rc) = (rule.lhs.dom(), rule.lhs.cod());
    let dom = match &app.y {
        Some(y) if y.cod() != rd => {
            return Err(RewriteError::ContextType(format!(
                "y ends at {} but the rule starts at {}",
                p.obj_name(y.cod()),
                p.obj_name(rd)
            )))
        }
        Some(y) => y.dom(),
        None => rd,
    };
    let cod = match &app.z {
        Some(z) if z.dom() != rc => {
            return Err(RewriteError::ContextType(format!(
                "z starts at {} but the rule ends at {}",
                p.obj_name(z.dom()),
                p.obj_name(rc)
            )))
        }
        Some(z) => z.cod(),
        None => rc,
    };
    if (dom, cod) != (before.dom(), before.cod()) {
        return Err(RewriteError::ContextType(format!(
            "context gives {} -> {} but the sum is {} -> {}",
            p.obj_name(dom),
            p.obj_name(cod),
            p.obj_name(before.dom()),
            p.obj_name(before.cod())
        )));
    }
    Ok(())
}

/// Where the consumed terms sit in `before`, each summand used at most once.
pub(crate) fn match_indices(before: &FormalSum, consumed: &[SignedWord]) -> Vec<Option<usize>> {
    let mut used = vec![false; before.len()];
    consumed
        .iter()
        .map(|t| {
            let hit = before
                .terms()
                .iter()
                .enumerate()
                .position(|(i, b)| !used[i] && b == t);
            if let Some(i) = hit {
                used[i] = true;
            }
            hit
        })
        .collect()
}

/// Applies one step in the uniform sense described in the module docs.
/// `before` must be canonical.
pub fn apply_step(
    p: &Presentation,
    rule: &Rule,
    before: &FormalSum,
    app: &ContextApplication,
) -> Result<ProofStep, RewriteError> {
    check_context(p, before, rule, app)?;
    let (from, to) = rule.sides(app.direction);
    let consumed = scaled(app.sign, app.y.as_ref(), from, app.z.as_ref());
    let matched = match_indices(before, &consumed);
    let produced = scaled(app.sign, app.y.as_ref(), to, app.z.as_ref());
    let after = crate::terms::canonical_combine(
        before,
        consumed.iter().map(SignedWord::negated).chain(produced),
    );
    Ok(ProofStep {
        app: app.clone(),
        matched,
        after,
    })
}

/// Replaces an occurrence of `y·lhs·z` (or `y·rhs·z`, by direction) in `s`.
/// Unlike [`apply_step`] the whole pattern must be present.
pub fn apply_rule(
    p: &Presentation,
    s: &FormalSum,
    app: &ContextApplication,
) -> Result<FormalSum, RewriteError> {
    let rule = rule_for(p, &app.rule)?;
    let before = canonical_sum_form(s);
    let step = apply_step(p, &rule, &before, app)?;
    if step.matched.iter().any(Option::is_none) {
        return Err(RewriteError::PatternNotPresent);
    }
    Ok(step.after)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("trace rejected at step {step}: {reason}")]
pub struct TraceError {
    /// Index of the failing step; `steps.len()` means the end state.
    pub step: usize,
    pub reason: String,
}

/// Replays the trace from its canonical start state, checking each rule,
/// its context typing, the matched indices and the recorded after-state.
pub fn check_trace(p: &Presentation, trace: &ProofTrace) -> Result<(), TraceError> {
    let mut state = canonical_sum_form(&trace.start);
    for (i, step) in trace.steps.iter().enumerate() {
        let fail = |reason: String| TraceError { step: i, reason };
        let rule = rule_for(p, &step.app.rule).map_err(|e| fail(e.to_string()))?;
        let replay = apply_step(p, &rule, &state, &step.app).map_err(|e| fail(e.to_string()))?;
        if replay.after != step.after {
            return Err(fail(format!(
                "recomputed {} but the trace records {}",
                replay.after.to_text(p),
                step.after.to_text(p)
            )));
        }
        if replay.matched != step.matched {
            return Err(fail("matched indices differ".into()));
        }
        state = replay.after;
    }
    if state != canonical_sum_form(&trace.end) {
        return Err(TraceError {
            step: trace.steps.len(),
            reason: format!(
                "last state {} is not the end {}",
                state.to_text(p),
                trace.end.to_text(p)
            ),
        });
    }
    Ok(())
}

/// Builds a trace one step at a time.
#[derive(Clone, Debug)]
pub struct Derivation<'a> {
    p: &'a Presentation,
    start: FormalSum,
    state: FormalSum,
    steps: Vec<ProofStep>,
}

impl<'a> Derivation<'a> {
    pub fn new(p: &'a Presentation, start: &FormalSum) -> Self {
        let start = canonical_sum_form(start);
        Derivation {
            p,
            state: start.clone(),
            start,
            steps: Vec::new(),
        }
    }

    pub fn state(&self) -> &FormalSum {
        &self.state
    }

    pub fn apply(&mut self, app: ContextApplication) -> Result<&mut Self, RewriteError> {
        let rule = rule_for(self.p, &app.rule)?;
        let step = apply_step(self.p, &rule, &self.state, &app)?;
        self.state = step.after.clone();
        self.steps.push(step);
        Ok(self)
    }

    pub fn finish(self) -> ProofTrace {
        ProofTrace {
            start: self.start,
            end: self.state,
            steps: self.steps,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_sum;

    fn fixture(name: &str) -> Presentation {
        let text =
            std::fs::read_to_string(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR")))
                .unwrap();
        Presentation::parse(&text).unwrap()
    }

    fn sum(p: &Presentation, t: &str) -> FormalSum {
        parse_sum(p, t).unwrap()
    }

    fn word(p: &Presentation, t: &str) -> Word {
        crate::terms::parse_word(p, t).unwrap()
    }

    #[test]
    fn p1_rules() {
        let p = fixture("p1.gk");
        let rules = instantiate_rules(&p);
        let s1 = p.split_id("S1").unwrap();
        let r9 = rules.get(&RuleId::SplitExact(s1, Side::Left)).unwrap();
        assert_eq!(r9.lhs.to_text(&p), "pA;f;theta(S1) + pB;s;theta(S1)");
        assert_eq!(r9.rhs.to_text(&p), "id(AB)");
        let r9r = rules.get(&RuleId::SplitExact(s1, Side::Right)).unwrap();
        assert_eq!(r9r.lhs.to_text(&p), "theta(S1);pA;f + theta(S1);pB;s");

        let s = p.resolve_hom("s").unwrap();
        let g = p.resolve_hom("g").unwrap();
        let r5 = rules.get(&RuleId::Fusion(s, g)).unwrap();
        assert_eq!(r5.rhs.to_text(&p), "id(B)");
        let f = p.resolve_hom("f").unwrap();
        assert!(rules.get(&RuleId::Fusion(f, g)).unwrap().rhs.is_empty());
        assert!(rules.get(&RuleId::Fusion(g, f)).is_none());

        for r in rules.rules() {
            assert_eq!(
                (r.lhs.dom(), r.lhs.cod()),
                (r.rhs.dom(), r.rhs.cod()),
                "{:?}",
                r.id
            );
        }
    }

    #[test]
    fn p2_rules() {
        let p = fixture("p2.gk");
        let rules = instantiate_rules(&p);
        let c = p.corner_id("c").unwrap();
        let l = rules.get(&RuleId::Stability(c, Side::Left)).unwrap();
        assert_eq!(l.lhs.to_text(&p), "c;inv(c)");
        assert_eq!(l.rhs.to_text(&p), "id(A)");
        let r = rules.get(&RuleId::Stability(c, Side::Right)).unwrap();
        assert_eq!(r.lhs.to_text(&p), "inv(c);c");
        assert_eq!(r.rhs.to_text(&p), "id(KA)");
    }

    #[test]
    fn apply_rule_examples() {
        let p = fixture("p1.gk");
        let s1 = p.split_id("S1").unwrap();
        let app = ContextApplication::new(RuleId::SplitExact(s1, Side::Left), Direction::LhsToRhs);
        let out = apply_rule(&p, &sum(&p, "pA;f;theta(S1) + pB;s;theta(S1)"), &app).unwrap();
        assert_eq!(out.to_text(&p), "id(AB)");

        let (s, g) = (p.resolve_hom("s").unwrap(), p.resolve_hom("g").unwrap());
        let app = ContextApplication::new(RuleId::Fusion(s, g), Direction::LhsToRhs)
            .with_context(Some(word(&p, "pB")), None);
        let out = apply_rule(&p, &sum(&p, "pB;s;g"), &app).unwrap();
        assert_eq!(out.to_text(&p), "pB;id(B)");

        // pattern missing
        assert_eq!(
            apply_rule(
                &p,
                &sum(&p, "pA;f;theta(S1)"),
                &ContextApplication::new(RuleId::SplitExact(s1, Side::Left), Direction::LhsToRhs)
            ),
            Err(RewriteError::PatternNotPresent)
        );
        // context of the wrong type
        let bad = ContextApplication::new(RuleId::Fusion(s, g), Direction::LhsToRhs)
            .with_context(Some(word(&p, "pA")), None);
        assert!(matches!(
            apply_rule(&p, &sum(&p, "pB;s;g"), &bad),
            Err(RewriteError::ContextType(_))
        ));
    }

    #[test]
    fn cancel_reverse_alone_is_a_null_move() {
        let p = fixture("p1.gk");
        let f = word(&p, "f");
        let app = ContextApplication::new(RuleId::Cancel(f), Direction::RhsToLhs);
        let out = apply_rule(&p, &sum(&p, "0(A,D)"), &app).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn partial_match_then_inverse_restores() {
        let p = fixture("p1.gk");
        let s1 = p.split_id("S1").unwrap();
        let rule = rule_for(&p, &RuleId::SplitExact(s1, Side::Left)).unwrap();
        let before = canonical_sum_form(&sum(&p, "pA;f;theta(S1)"));
        let app = ContextApplication::new(rule.id.clone(), Direction::LhsToRhs);
        let step = apply_step(&p, &rule, &before, &app).unwrap();
        assert_eq!(step.matched, vec![Some(0), None]);
        assert_eq!(step.after.to_text(&p), "id(AB) - pB;s;theta(S1)");
        let back = apply_step(&p, &rule, &step.after, &app.inverse()).unwrap();
        assert_eq!(back.after, before);
    }

    #[test]
    fn derivation_and_check() {
        let p = fixture("p1.gk");
        let (s, g) = (p.resolve_hom("s").unwrap(), p.resolve_hom("g").unwrap());
        let mut d = Derivation::new(&p, &sum(&p, "pB;s;g"));
        d.apply(
            ContextApplication::new(RuleId::Fusion(s, g), Direction::LhsToRhs)
                .with_context(Some(word(&p, "pB")), None),
        )
        .unwrap();
        let pb = p.resolve_hom("pB").unwrap();
        let idb = p.resolve_hom("id(B)").unwrap();
        d.apply(ContextApplication::new(
            RuleId::Fusion(pb, idb),
            Direction::LhsToRhs,
        ))
        .unwrap();
        let trace = d.finish();
        assert_eq!(trace.end.to_text(&p), "pB");
        assert_eq!(check_trace(&p, &trace), Ok(()));

        let mut bad = trace.clone();
        bad.steps[1].app.rule = RuleId::Fusion(s, g);
        assert_eq!(check_trace(&p, &bad).unwrap_err().step, 1);

        let mut bad = trace.clone();
        bad.steps[0].after = sum(&p, "pB");
        assert_eq!(check_trace(&p, &bad).unwrap_err().step, 0);

        let mut bad = trace;
        bad.end = sum(&p, "pB - pB;id(B)");
        assert_eq!(check_trace(&p, &bad).unwrap_err().step, 2);
    }

    #[test]
    fn hand_written_zero_object_trace() {
        let p = fixture("zero.gk");
        let zz = p.object_id("ZZ").unwrap();
        let sum_id = p.sum_of_object(zz).unwrap();
        let h = |n: &str| p.resolve_hom(n).unwrap();
        let mut d = Derivation::new(&p, &sum(&p, "id(ZZ)"));
        d.apply(ContextApplication::new(
            RuleId::Biproduct(sum_id),
            Direction::RhsToLhs,
        ))
        .unwrap();
        assert_eq!(d.state().to_text(&p), "p1;i1 + p2;i2");
        d.apply(ContextApplication::new(
            RuleId::Fusion(h("p1"), h("i1")),
            Direction::LhsToRhs,
        ))
        .unwrap();
        d.apply(ContextApplication::new(
            RuleId::Fusion(h("p2"), h("i2")),
            Direction::LhsToRhs,
        ))
        .unwrap();
        let trace = d.finish();
        assert!(trace.end.is_empty());
        assert_eq!(check_trace(&p, &trace), Ok(()));
    }
}
