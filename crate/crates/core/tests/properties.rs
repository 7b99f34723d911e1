mod common;

use gkcat::model::{random_unimodular, soundness_check_trace, Evaluator};
use gkcat::presentation::{Hom, Presentation};
use gkcat::rewrite::{
    check_trace, decide_equiv, letter_homs, trace_from_json, trace_to_json, Budget,
    ContextApplication, Derivation, Rewriter, Verdict,
};
use gkcat::sample::{random_sum, random_walk, random_word_between, random_word_from};
use gkcat::terms::{canonical_sum_form, concat, parse_sum, product, FormalSum, Word};
use proptest::prelude::*;
use rand::Rng;

use common::{det_by_permutations, fixture, models, rng};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        ..ProptestConfig::default()
    }
}

fn pres(i: usize) -> Presentation {
    fixture(["p1.gk", "p2.gk", "p3.gk", "zero.gk"][i])
}

fn extend(
    p: &Presentation,
    outer: Option<&Word>,
    inner: Option<&Word>,
    outer_first: bool,
) -> Option<Word> {
    match (outer, inner) {
        (None, x) | (x, None) => x.cloned(),
        (Some(o), Some(i)) if outer_first => Some(concat(p, o, i).unwrap()),
        (Some(o), Some(i)) => Some(concat(p, i, o).unwrap()),
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn sums_print_and_parse_back(seed: u64, which in 0usize..4) {
        let p = pres(which);
        let rw = Rewriter::new(&p);
        let mut r = rng(seed);
        if let Some(s) = random_sum(&p, &mut r, rw.alphabet(), 4, 5) {
            let text = s.to_text(&p);
            let back = parse_sum(&p, &text).unwrap();
            prop_assert_eq!(canonical_sum_form(&back), s, "{}", text);
        }
    }

    #[test]
    fn verdicts_are_symmetric(seed: u64, which in 0usize..3) {
        let p = pres(which);
        let rw = Rewriter::new(&p);
        let mut r = rng(seed);
        let a = random_sum(&p, &mut r, rw.alphabet(), 2, 3).unwrap();
        // half the time the right side is reachable, half the time random
        let b = if r.gen_bool(0.5) {
            random_walk(&rw, &mut r, &a, 2, &Budget::default()).end
        } else {
            let w = random_word_between(&p, &mut r, rw.alphabet(), a.dom(), a.cod(), 3);
            w.map_or_else(|| a.clone(), FormalSum::from_word)
        };
        let budget = Budget::with_depth(2);
        let ab = rw.decide(&a, &b, &budget).unwrap();
        let ba = rw.decide(&b, &a, &budget).unwrap();
        prop_assert_eq!(ab.is_equivalent(), ba.is_equivalent());
        for v in [&ab, &ba] {
            if let Some(t) = v.trace() {
                prop_assert_eq!(check_trace(&p, t), Ok(()));
                prop_assert!(t.len() <= 2);
            }
        }
    }

    #[test]
    fn walks_stay_equal_in_models(seed: u64, which in 0usize..4) {
        let p = pres(which);
        let base = ["m1.json", "p2_perm.json", "m3.json", "zero.json"][which];
        let ms = models(&p, base, 2, seed);
        let rw = Rewriter::new(&p);
        let mut r = rng(seed ^ 0x5eed);
        let seed_sum = random_sum(&p, &mut r, rw.alphabet(), 3, 4).unwrap();
        let t = random_walk(&rw, &mut r, &seed_sum, 5, &Budget::default());
        prop_assert_eq!(check_trace(&p, &t), Ok(()));
        for m in &ms {
            prop_assert!(soundness_check_trace(&p, m, &t).unwrap());
        }
    }

    /// Wrapping every step of a derivation in a fixed outer context gives a
    /// derivation between the wrapped endpoints.
    #[test]
    fn steps_are_congruences(seed: u64, which in 0usize..3) {
        let p = pres(which);
        let rw = Rewriter::new(&p);
        let mut r = rng(seed);
        let s = random_sum(&p, &mut r, rw.alphabet(), 2, 3).unwrap();
        let t = random_walk(&rw, &mut r, &s, 4, &Budget::default());
        let y_len = r.gen_range(0..3);
        let z_len = r.gen_range(0..3);
        let y = (y_len > 0)
            .then(|| random_word_between(&p, &mut r, rw.alphabet(), s.dom(), s.dom(), y_len))
            .flatten()
            .or_else(|| {
                let ws: Vec<_> = rw.alphabet().iter().copied().filter(|l| l.cod(&p) == s.dom()).collect();
                (!ws.is_empty() && y_len > 0)
                    .then(|| Word::single(&p, ws[r.gen_range(0..ws.len())]).unwrap())
            });
        let z = (z_len > 0)
            .then(|| random_word_from(&p, &mut r, rw.alphabet(), s.cod(), z_len))
            .flatten();
        let wrap = |x: &FormalSum| {
            let mut out = x.clone();
            if let Some(y) = &y {
                out = product(&p, &FormalSum::from_word(y.clone()), &out).unwrap();
            }
            if let Some(z) = &z {
                out = product(&p, &out, &FormalSum::from_word(z.clone())).unwrap();
            }
            canonical_sum_form(&out)
        };
        let mut d = Derivation::new(&p, &wrap(&t.start));
        for step in &t.steps {
            let app = ContextApplication::new(step.app.rule.clone(), step.app.direction)
                .with_sign(step.app.sign)
                .with_context(
                    extend(&p, y.as_ref(), step.app.y.as_ref(), true),
                    extend(&p, z.as_ref(), step.app.z.as_ref(), false),
                );
            d.apply(app).unwrap();
            prop_assert_eq!(d.state(), &wrap(&step.after));
        }
        let lifted = d.finish();
        prop_assert_eq!(check_trace(&p, &lifted), Ok(()));
        prop_assert_eq!(lifted.end, wrap(&t.end));
    }

    #[test]
    fn composition_table_is_associative(which in 0usize..4, a in 0usize..64, b in 0usize..64, c in 0usize..64) {
        let p = pres(which);
        let homs = letter_homs(&p);
        let (f, g, h) = (homs[a % homs.len()], homs[b % homs.len()], homs[c % homs.len()]);
        prop_assume!(p.cod(f) == p.dom(g) && p.cod(g) == p.dom(h));
        let left = p.compose_lookup(p.compose_lookup(f, g).unwrap(), h).unwrap();
        let right = p.compose_lookup(f, p.compose_lookup(g, h).unwrap()).unwrap();
        prop_assert!(p.same_hom(left, right), "{} vs {}", p.hom_name(left), p.hom_name(right));
    }

    #[test]
    fn unimodular_samples_have_unit_determinant(seed: u64, n in 0usize..6, ops in 0usize..20) {
        let mut r = rng(seed);
        let (u, inv) = random_unimodular(&mut r, n, ops);
        prop_assert_eq!(det_by_permutations(&u).abs(), 1);
        prop_assert_eq!(i128::from(u.det().unwrap()), det_by_permutations(&u));
        prop_assert!(u.mul(&inv).unwrap().is_identity());
        prop_assert_eq!(u.unimodular_inverse().unwrap(), inv);
    }

    #[test]
    fn traces_survive_json(seed: u64, which in 0usize..4) {
        let p = pres(which);
        let rw = Rewriter::new(&p);
        let mut r = rng(seed);
        let s = random_sum(&p, &mut r, rw.alphabet(), 3, 3).unwrap();
        let t = random_walk(&rw, &mut r, &s, 4, &Budget::default());
        let json = trace_to_json(&p, &t);
        let back = trace_from_json(&p, &json).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(trace_to_json(&p, &back), json);
    }
}

#[test]
fn equivalence_implies_equal_values() {
    let p = fixture("p3.gk");
    let ms = models(&p, "m3.json", 3, 9);
    let cases = [
        ("theta(S1);pB", "g"),
        ("f;theta(S1)", "iA"),
        ("s;theta(S1)", "iB"),
        ("u;uinv", "id(D)"),
    ];
    for (l, r) in cases {
        let (ls, rs) = (parse_sum(&p, l).unwrap(), parse_sum(&p, r).unwrap());
        let v = decide_equiv(&p, &ls, &rs, &Budget::with_depth(5)).unwrap();
        let Verdict::Equivalent(t) = v else {
            panic!("{l} == {r} not found");
        };
        assert_eq!(check_trace(&p, &t), Ok(()));
        for m in &ms {
            let ev = Evaluator::new(&p, m).unwrap();
            assert_eq!(ev.sum(&ls).unwrap(), ev.sum(&rs).unwrap(), "{l} vs {r}");
        }
    }
}

#[test]
fn declared_homs_have_their_own_letters() {
    for i in 0..4 {
        let p = pres(i);
        for h in p.hom_ids() {
            let s = gkcat::terms::embed_hom(&p, Hom::Gen(h)).unwrap();
            if p.is_zero_hom(Hom::Gen(h)) {
                assert!(s.is_empty());
            } else {
                assert_eq!(s.to_text(&p), p.hom_decl(h).name);
            }
        }
    }
}
