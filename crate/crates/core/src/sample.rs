//! Random typed terms and rewrite walks, for property tests and fuzzing.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::presentation::{ObjId, Presentation};
use crate::rewrite::{Budget, ProofTrace, Rewriter};
use crate::terms::{canonical_sum_form, FormalSum, Letter, Sign, SignedWord, Word};

/// A random composable word of exactly `len` letters starting at `start`,
/// drawn from `letters`. `None` if some intermediate object has no outgoing
/// letter.
pub fn random_word_from<R: Rng + ?Sized>(
    p: &Presentation,
    rng: &mut R,
    letters: &[Letter],
    start: ObjId,
    len: usize,
) -> Option<Word> {
    let mut out = Vec::with_capacity(len);
    let mut at = start;
    for _ in 0..len {
        let options: Vec<Letter> = letters.iter().copied().filter(|l| l.dom(p) == at).collect();
        let l = *options.choose(rng)?;
        at = l.cod(p);
        out.push(l);
    }
    crate::terms::make_word(p, out).ok()
}

/// A random word of length `1..=max_len` from a random source object.
pub fn random_word<R: Rng + ?Sized>(
    p: &Presentation,
    rng: &mut R,
    letters: &[Letter],
    max_len: usize,
) -> Option<Word> {
    let starts: Vec<ObjId> = letters.iter().map(|l| l.dom(p)).collect();
    let start = *starts.choose(rng)?;
    let len = rng.gen_range(1..=max_len.max(1));
    random_word_from(p, rng, letters, start, len)
}

/// A random word with the given endpoints, by rejection sampling.
pub fn random_word_between<R: Rng + ?Sized>(
    p: &Presentation,
    rng: &mut R,
    letters: &[Letter],
    dom: ObjId,
    cod: ObjId,
    max_len: usize,
) -> Option<Word> {
    for _ in 0..2000 {
        let len = rng.gen_range(1..=max_len.max(1));
        if let Some(w) = random_word_from(p, rng, letters, dom, len) {
            if w.cod() == cod {
                return Some(w);
            }
        }
    }
    None
}

/// A canonical sum of up to `max_terms` random signed words sharing a
/// random type.
pub fn random_sum<R: Rng + ?Sized>(
    p: &Presentation,
    rng: &mut R,
    letters: &[Letter],
    max_terms: usize,
    max_len: usize,
) -> Option<FormalSum> {
    let first = random_word(p, rng, letters, max_len)?;
    let (dom, cod) = (first.dom(), first.cod());
    let mut terms = vec![SignedWord::new(random_sign(rng), first)];
    let extra = rng.gen_range(0..max_terms.max(1));
    for _ in 0..extra {
        if let Some(w) = random_word_between(p, rng, letters, dom, cod, max_len) {
            terms.push(SignedWord::new(random_sign(rng), w));
        }
    }
    FormalSum::from_terms(dom, cod, terms)
        .ok()
        .map(|s| canonical_sum_form(&s))
}

/// A random sum with fixed endpoints; may be the empty sum.
pub fn random_sum_between<R: Rng + ?Sized>(
    p: &Presentation,
    rng: &mut R,
    letters: &[Letter],
    dom: ObjId,
    cod: ObjId,
    max_terms: usize,
    max_len: usize,
) -> FormalSum {
    let n = rng.gen_range(1..=max_terms.max(1));
    let mut terms = Vec::with_capacity(n);
    for _ in 0..n {
        if let Some(w) = random_word_between(p, rng, letters, dom, cod, max_len) {
            terms.push(SignedWord::new(random_sign(rng), w));
        }
    }
    canonical_sum_form(&FormalSum::from_terms(dom, cod, terms).expect("words share the type"))
}

fn random_sign<R: Rng + ?Sized>(rng: &mut R) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Up to `len` uniformly chosen rewrite steps from `seed`, stopping early at
/// a state with no successor.
pub fn random_walk<R: Rng + ?Sized>(
    rw: &Rewriter<'_>,
    rng: &mut R,
    seed: &FormalSum,
    len: usize,
    budget: &Budget,
) -> ProofTrace {
    let start = canonical_sum_form(seed);
    let mut state = start.clone();
    let mut steps = Vec::with_capacity(len);
    for _ in 0..len {
        let mut next = rw.successors(&state, budget);
        if next.is_empty() {
            break;
        }
        let i = rng.gen_range(0..next.len());
        let step = next.swap_remove(i);
        state = step.after.clone();
        steps.push(step);
    }
    ProofTrace {
        start,
        end: state,
        steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::check_trace;
    use rand::SeedableRng;

    fn fixture(name: &str) -> Presentation {
        let text =
            std::fs::read_to_string(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR")))
                .unwrap();
        Presentation::parse(&text).unwrap()
    }

    #[test]
    fn words_are_typed() {
        let p = fixture("p3.gk");
        let rw = Rewriter::new(&p);
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let w = random_word(&p, &mut rng, rw.alphabet(), 5).unwrap();
            assert!((1..=5).contains(&w.len()));
            for pair in w.letters().windows(2) {
                assert_eq!(pair[0].cod(&p), pair[1].dom(&p));
            }
        }
    }

    #[test]
    fn walks_check() {
        let p = fixture("p1.gk");
        let rw = Rewriter::new(&p);
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let seed = random_sum(&p, &mut rng, rw.alphabet(), 2, 3).unwrap();
            let t = random_walk(&rw, &mut rng, &seed, 4, &Budget::default());
            assert_eq!(check_trace(&p, &t), Ok(()));
        }
    }
}
