//! Normal forms: synthetic letters are conjugated onto representative
//! objects, homomorphism runs are fused, and each word takes the alternating
//! shape `h1 q1 h2 q2 ... hk`.
//!
//! Every transformation is carried out as a [`Derivation`], so each result
//! comes with a proof trace back to its input.

use thiserror::Error;

use crate::presentation::{Hom, ObjId, Presentation};
use crate::rewrite::{
    ContextApplication, Derivation, Direction, ProofTrace, RewriteError, RuleId, Side,
};
use crate::terms::{canonical_sum_form, make_word, FormalSum, Letter, Sign, SignedWord, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalFormError {
    #[error("no representative linkage for {0}")]
    MissingLinkage(String),
    #[error("linked letter {0} does not have its endpoints among the representatives")]
    LinkOutsideRepresentatives(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

/// Result of fusing a word: a word, or zero when some run composes to a zero
/// homomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fused {
    Word(Word),
    Zero,
}

fn in_reps(p: &Presentation, q: Letter) -> bool {
    p.is_representative(q.dom(p)) && p.is_representative(q.cod(p))
}

fn id(o: ObjId) -> Letter {
    Letter::Gen(Hom::Id(o))
}

/// Emits steps on one summand of the derivation state while tracking its
/// current letters.
struct TermWork<'d, 'a> {
    p: &'a Presentation,
    d: &'d mut Derivation<'a>,
    sign: Sign,
}

impl TermWork<'_, '_> {
    fn word(&self, letters: &[Letter]) -> Option<Word> {
        if letters.is_empty() {
            None
        } else {
            Some(make_word(self.p, letters.to_vec()).expect("tracked words stay typed"))
        }
    }

    fn step(
        &mut self,
        y: &[Letter],
        z: &[Letter],
        rule: RuleId,
        direction: Direction,
    ) -> Result<(), NormalFormError> {
        let app = ContextApplication::new(rule, direction)
            .with_sign(self.sign)
            .with_context(self.word(y), self.word(z));
        self.d.apply(app)?;
        Ok(())
    }

    /// Replaces `w[k]` by its linked or padded substitute; returns the new
    /// letters.
    fn substitute(&mut self, w: &[Letter], k: usize) -> Result<Vec<Letter>, NormalFormError> {
        let p = self.p;
        let q = w[k];
        let (pre, post) = (&w[..k], &w[k + 1..]);
        let cat = |parts: &[&[Letter]]| -> Vec<Letter> { parts.concat() };
        if in_reps(p, q) {
            self.step(pre, post, RuleId::Unit(q, Side::Left), Direction::RhsToLhs)?;
            let lead = [id(q.dom(p))];
            self.step(
                &cat(&[pre, &lead]),
                post,
                RuleId::Unit(q, Side::Right),
                Direction::RhsToLhs,
            )?;
            return Ok(cat(&[pre, &[id(q.dom(p)), q, id(q.cod(p))], post]));
        }
        match q {
            Letter::Theta(s) => {
                let link = p
                    .split_link(s)
                    .ok_or_else(|| NormalFormError::MissingLinkage(q.name(p)))?
                    .clone();
                let target = Letter::Theta(link.target);
                if !in_reps(p, target) {
                    return Err(NormalFormError::LinkOutsideRepresentatives(target.name(p)));
                }
                let g = |h| Letter::Gen(h);
                let (big_sigma, rho, pi_d) = (link.sum_iso, link.sum_iso_inv, link.pi_d);
                let old = p.split(s).clone();
                let new = p.split(link.target).clone();
                let old_sum = p.sum(old.sum).clone();
                let new_sum = p.sum(new.sum).clone();
                let (pa, pb) = (Hom::Gen(old_sum.p_left), Hom::Gen(old_sum.p_right));
                let (npa, npb) = (Hom::Gen(new_sum.p_left), Hom::Gen(new_sum.p_right));
                let (f, sp) = (Hom::Gen(old.f), Hom::Gen(old.s));
                let (nf, ns) = (Hom::Gen(new.f), Hom::Gen(new.s));
                let nab = new_sum.sum;
                let th = [q];
                let tail = cat(&[&[g(rho)], post]);
                let pre_th = cat(&[pre, &th]);
                let pre_th_sig = cat(&[pre, &[q, g(big_sigma)]]);

                self.step(pre, post, RuleId::Unit(q, Side::Right), Direction::RhsToLhs)?;
                self.step(
                    &pre_th,
                    post,
                    RuleId::Fusion(big_sigma, rho),
                    Direction::RhsToLhs,
                )?;
                self.step(
                    &pre_th,
                    &tail,
                    RuleId::Fusion(big_sigma, Hom::Id(nab)),
                    Direction::RhsToLhs,
                )?;
                self.step(
                    &pre_th_sig,
                    &tail,
                    RuleId::SplitExact(link.target, Side::Left),
                    Direction::RhsToLhs,
                )?;
                // move each summand of σ' across the isomorphisms
                for (np, nh, op, oh, pi) in
                    [(npa, nf, pa, f, link.pi_a), (npb, ns, pb, sp, link.pi_b)]
                {
                    let after_np = cat(&[&[g(nh), target, g(rho)], post]);
                    self.step(
                        &pre_th,
                        &after_np,
                        RuleId::Fusion(big_sigma, np),
                        Direction::LhsToRhs,
                    )?;
                    self.step(
                        &pre_th,
                        &after_np,
                        RuleId::Fusion(op, pi),
                        Direction::RhsToLhs,
                    )?;
                    let pre_op = cat(&[pre, &[q, g(op)]]);
                    let after_nh = cat(&[&[target, g(rho)], post]);
                    self.step(
                        &pre_op,
                        &after_nh,
                        RuleId::Fusion(pi, nh),
                        Direction::LhsToRhs,
                    )?;
                    self.step(
                        &pre_op,
                        &after_nh,
                        RuleId::Fusion(oh, pi_d),
                        Direction::RhsToLhs,
                    )?;
                }
                let (_, dobj, _) = p.split_objects(s);
                let after_d = cat(&[&[g(pi_d), target, g(rho)], post]);
                self.step(
                    pre,
                    &after_d,
                    RuleId::SplitExact(s, Side::Right),
                    Direction::LhsToRhs,
                )?;
                self.step(
                    pre,
                    &cat(&[&[target, g(rho)], post]),
                    RuleId::Fusion(Hom::Id(dobj), pi_d),
                    Direction::LhsToRhs,
                )?;
                Ok(cat(&[pre, &[g(pi_d), target, g(rho)], post]))
            }
            Letter::CornerInv(c) => {
                let (rep, link) = p
                    .corner_link(c)
                    .ok_or_else(|| NormalFormError::MissingLinkage(q.name(p)))?;
                let (rep, link) = (rep.clone(), link.clone());
                let target = Letter::CornerInv(link.target);
                if !in_reps(p, target) {
                    return Err(NormalFormError::LinkOutsideRepresentatives(target.name(p)));
                }
                let g = |h| Letter::Gen(h);
                let (pi, pi_inv, pik) = (rep.iso, rep.iso_inv, link.stab_iso);
                let emb = Hom::Gen(p.corner(c).emb);
                let new_emb = Hom::Gen(p.corner(link.target).emb);
                let (_, ak) = p.corner_objects(c);
                let pre_q = cat(&[pre, &[q]]);
                let tail = cat(&[&[g(pi_inv)], post]);

                self.step(pre, post, RuleId::Unit(q, Side::Right), Direction::RhsToLhs)?;
                self.step(
                    &pre_q,
                    post,
                    RuleId::Fusion(pi, pi_inv),
                    Direction::RhsToLhs,
                )?;
                self.step(
                    &pre_q,
                    &tail,
                    RuleId::Fusion(pi, Hom::Id(rep.rep)),
                    Direction::RhsToLhs,
                )?;
                let pre_q_pi = cat(&[pre, &[q, g(pi)]]);
                self.step(
                    &pre_q_pi,
                    &tail,
                    RuleId::Stability(link.target, Side::Left),
                    Direction::RhsToLhs,
                )?;
                let after_c = cat(&[&[target, g(pi_inv)], post]);
                self.step(
                    &pre_q,
                    &after_c,
                    RuleId::Fusion(pi, new_emb),
                    Direction::LhsToRhs,
                )?;
                self.step(
                    &pre_q,
                    &after_c,
                    RuleId::Fusion(emb, pik),
                    Direction::RhsToLhs,
                )?;
                let after_k = cat(&[&[g(pik), target, g(pi_inv)], post]);
                self.step(
                    pre,
                    &after_k,
                    RuleId::Stability(c, Side::Right),
                    Direction::LhsToRhs,
                )?;
                self.step(
                    pre,
                    &after_c,
                    RuleId::Fusion(Hom::Id(ak), pik),
                    Direction::LhsToRhs,
                )?;
                Ok(cat(&[pre, &[g(pik), target, g(pi_inv)], post]))
            }
            Letter::Gen(_) => unreachable!("only synthetic letters are substituted"),
        }
    }

    fn desyntheticize(&mut self, w: &[Letter]) -> Result<Vec<Letter>, NormalFormError> {
        let mut cur = w.to_vec();
        let mut k = 0;
        while k < cur.len() {
            if cur[k].is_synthetic() {
                let before = cur.len();
                cur = self.substitute(&cur, k)?;
                // skip the inserted segment; the synthetic letter sits in its middle
                k += cur.len() - before + 1;
            } else {
                k += 1;
            }
        }
        Ok(cur)
    }

    fn fuse(&mut self, w: &[Letter]) -> Result<Option<Vec<Letter>>, NormalFormError> {
        let p = self.p;
        let mut cur = w.to_vec();
        let mut i = 0;
        while i + 1 < cur.len() {
            match (cur[i], cur[i + 1]) {
                (Letter::Gen(a), Letter::Gen(b)) => {
                    let (y, z) = (cur[..i].to_vec(), cur[i + 2..].to_vec());
                    self.step(&y, &z, RuleId::Fusion(a, b), Direction::LhsToRhs)?;
                    let c = p
                        .compose_lookup(a, b)
                        .map_err(|e| RewriteError::UnknownRule(e.to_string()))?;
                    if p.is_zero_hom(c) {
                        return Ok(None);
                    }
                    cur = [&y[..], &[Letter::Gen(c)], &z[..]].concat();
                }
                _ => i += 1,
            }
        }
        // pad so the word starts and ends with a homomorphism and
        // synthetic letters never touch
        if cur[0].is_synthetic() {
            let q = cur[0];
            self.step(
                &[],
                &cur[1..],
                RuleId::Unit(q, Side::Left),
                Direction::RhsToLhs,
            )?;
            cur.insert(0, id(q.dom(p)));
        }
        let mut i = 0;
        while i < cur.len() {
            let q = cur[i];
            let next_synthetic = cur.get(i + 1).is_some_and(|l| l.is_synthetic());
            if q.is_synthetic() && (i + 1 == cur.len() || next_synthetic) {
                let (y, z) = (cur[..i].to_vec(), cur[i + 1..].to_vec());
                self.step(&y, &z, RuleId::Unit(q, Side::Right), Direction::RhsToLhs)?;
                cur.insert(i + 1, id(q.cod(p)));
            }
            i += 1;
        }
        Ok(Some(cur))
    }
}

/// Replaces each synthetic letter by its substitute over the representative
/// set: linked letters are conjugated by the declared isomorphisms, letters
/// already between representatives are padded with identities.
pub fn desyntheticize(p: &Presentation, w: &Word) -> Result<Word, NormalFormError> {
    desyntheticize_traced(p, w).map(|(w, _)| w)
}

/// As [`desyntheticize`], with a trace from `w` to the result.
pub fn desyntheticize_traced(
    p: &Presentation,
    w: &Word,
) -> Result<(Word, ProofTrace), NormalFormError> {
    let mut d = Derivation::new(p, &FormalSum::from_word(w.clone()));
    let letters = TermWork {
        p,
        d: &mut d,
        sign: Sign::Plus,
    }
    .desyntheticize(w.letters())?;
    let out = make_word(p, letters).expect("substitutes are typed");
    Ok((out, d.finish()))
}

/// Folds every maximal run of homomorphism letters into one letter and pads
/// with identities so the word alternates.
pub fn fuse_runs(p: &Presentation, w: &Word) -> Fused {
    fuse_runs_traced(p, w).0
}

/// As [`fuse_runs`], with a trace from `w` to the result.
pub fn fuse_runs_traced(p: &Presentation, w: &Word) -> (Fused, ProofTrace) {
    let mut d = Derivation::new(p, &FormalSum::from_word(w.clone()));
    let fused = TermWork {
        p,
        d: &mut d,
        sign: Sign::Plus,
    }
    .fuse(w.letters())
    .expect("fusion steps exist on valid presentations");
    let out = match fused {
        Some(letters) => Fused::Word(make_word(p, letters).expect("fused words are typed")),
        None => Fused::Zero,
    };
    (out, d.finish())
}

pub fn normalize_sum(p: &Presentation, s: &FormalSum) -> Result<FormalSum, NormalFormError> {
    normalize_sum_traced(p, s).map(|(n, _)| n)
}

/// Normalizes every term, drops the ones that vanish and canonicalizes. The
/// trace runs from the canonical form of `s` to the result.
pub fn normalize_sum_traced(
    p: &Presentation,
    s: &FormalSum,
) -> Result<(FormalSum, ProofTrace), NormalFormError> {
    let start = canonical_sum_form(s);
    let mut d = Derivation::new(p, &start);
    let mut terms = Vec::new();
    for t in start.terms() {
        let mut work = TermWork {
            p,
            d: &mut d,
            sign: t.sign,
        };
        let letters = work.desyntheticize(t.word.letters())?;
        if let Some(letters) = work.fuse(&letters)? {
            let w = make_word(p, letters).expect("normal words are typed");
            terms.push(SignedWord::new(t.sign, w));
        }
    }
    let expected = canonical_sum_form(
        &FormalSum::from_terms(start.dom(), start.cod(), terms).expect("types are preserved"),
    );
    let trace = d.finish();
    debug_assert_eq!(trace.end, expected);
    Ok((trace.end.clone(), trace))
}

/// The alternating shape `h1 q1 ... hk` with every synthetic letter between
/// representatives.
pub fn is_normal_word(p: &Presentation, w: &Word) -> bool {
    let letters = w.letters();
    if letters.len().is_multiple_of(2) {
        return false;
    }
    letters.iter().enumerate().all(|(i, l)| {
        if i % 2 == 0 {
            !l.is_synthetic()
        } else {
            l.is_synthetic() && in_reps(p, *l)
        }
    })
}

pub fn is_normal_sum(p: &Presentation, s: &FormalSum) -> bool {
    s.terms().iter().all(|t| is_normal_word(p, &t.word))
}
