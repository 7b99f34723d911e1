use std::collections::BTreeSet;
use std::fmt;

use super::{Hom, HomId, ObjId, Presentation, PresentationError};

/// One violated invariant. Violations are data, not failures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    IllTypedEntry {
        entry: String,
        detail: String,
    },
    MissingComposition {
        first: String,
        second: String,
    },
    Associativity {
        triple: String,
        left: String,
        right: String,
    },
    ZeroObjectComposite {
        entry: String,
        object: String,
    },
    SumFact {
        sum: String,
        fact: String,
    },
    SplitExactFact {
        split: String,
        fact: String,
    },
    Typing {
        decl: String,
        detail: String,
    },
    RepresentativeFact {
        object: String,
        fact: String,
    },
    Linkage {
        decl: String,
        detail: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IllTypedEntry { entry, detail } => {
                write!(f, "ill-typed composition entry {entry}: {detail}")
            }
            Violation::MissingComposition { first, second } => {
                write!(f, "missing composition {first};{second}")
            }
            Violation::Associativity { triple, left, right } => write!(
                f,
                "associativity fails for {triple}: left-nested gives {left}, right-nested gives {right}"
            ),
            Violation::ZeroObjectComposite { entry, object } => write!(
                f,
                "composite {entry} factors through zero object {object} but is not 0"
            ),
            Violation::SumFact { sum, fact } => write!(f, "sum fact {fact} violated for {sum}"),
            Violation::SplitExactFact { split, fact } => {
                write!(f, "split-exact fact {fact} violated for {split}")
            }
            Violation::Typing { decl, detail } => write!(f, "ill-typed {decl}: {detail}"),
            Violation::RepresentativeFact { object, fact } => {
                write!(f, "representative fact {fact} violated for {object}")
            }
            Violation::Linkage { decl, detail } => write!(f, "linkage {decl}: {detail}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

struct Checker<'a> {
    p: &'a Presentation,
    out: Vec<Violation>,
    missing: BTreeSet<(HomId, HomId)>,
}

impl<'a> Checker<'a> {
    fn name(&self, h: Hom) -> String {
        self.p.hom_name(h)
    }

    fn obj(&self, o: ObjId) -> String {
        self.p.obj_name(o).to_string()
    }

    /// Composite of a chain, recording missing entries; `None` when the
    /// chain is ill-typed or incomplete.
    fn chain(&mut self, chain: &[Hom]) -> Option<Hom> {
        let mut acc = chain[0];
        for &h in &chain[1..] {
            match self.p.compose_lookup(acc, h) {
                Ok(r) => acc = r,
                Err(PresentationError::MissingComposition { .. }) => {
                    if let (Hom::Gen(a), Hom::Gen(b)) = (acc, h) {
                        self.missing.insert((a, b));
                    }
                    return None;
                }
                Err(_) => return None,
            }
        }
        Some(acc)
    }

    fn typed(&mut self, decl: &str, h: Hom, dom: ObjId, cod: ObjId) -> bool {
        let (d, c) = (self.p.dom(h), self.p.cod(h));
        if d == dom && c == cod {
            return true;
        }
        self.out.push(Violation::Typing {
            decl: decl.to_string(),
            detail: format!(
                "{} : {} -> {} where {} -> {} is required",
                self.name(h),
                self.obj(d),
                self.obj(c),
                self.obj(dom),
                self.obj(cod)
            ),
        });
        false
    }

    /// Checks `chain = expected`; returns the violated fact text.
    fn fact(&mut self, chain: &[Hom], expected: Hom) -> Option<String> {
        let text = format!(
            "{} = {}",
            chain
                .iter()
                .map(|h| self.name(*h))
                .collect::<Vec<_>>()
                .join(";"),
            match expected {
                Hom::Zero(..) => "0".to_string(),
                other => self.name(other),
            }
        );
        match self.chain(chain) {
            Some(h) if self.p.same_hom(h, expected) => None,
            _ => Some(text),
        }
    }

    fn table(&mut self) {
        let p = self.p;
        for ((a, b), h) in p.table.iter() {
            let entry = format!("{};{}", p.hom_decl(a).name, p.hom_decl(b).name);
            let (fa, fb) = (p.hom_decl(a), p.hom_decl(b));
            if fa.cod != fb.dom {
                self.out.push(Violation::IllTypedEntry {
                    entry,
                    detail: format!("{} != {}", self.obj(fa.cod), self.obj(fb.dom)),
                });
                continue;
            }
            if p.dom(h) != fa.dom || p.cod(h) != fb.cod {
                self.out.push(Violation::IllTypedEntry {
                    entry,
                    detail: format!(
                        "result {} is not a map {} -> {}",
                        self.name(h),
                        self.obj(fa.dom),
                        self.obj(fb.cod)
                    ),
                });
                continue;
            }
            if p.object(fa.cod).is_zero && !p.same_hom(h, Hom::Zero(fa.dom, fb.cod)) {
                self.out.push(Violation::ZeroObjectComposite {
                    entry,
                    object: self.obj(fa.cod),
                });
            }
        }

        let ids: Vec<HomId> = p.hom_ids().collect();
        for &a in &ids {
            for &b in &ids {
                if p.hom_decl(a).cod == p.hom_decl(b).dom {
                    self.chain(&[Hom::Gen(a), Hom::Gen(b)]);
                }
            }
        }

        for &a in &ids {
            for &b in &ids {
                if p.hom_decl(a).cod != p.hom_decl(b).dom {
                    continue;
                }
                for &c in &ids {
                    if p.hom_decl(b).cod != p.hom_decl(c).dom {
                        continue;
                    }
                    let (ga, gb, gc) = (Hom::Gen(a), Hom::Gen(b), Hom::Gen(c));
                    let ab = self.chain(&[ga, gb]);
                    let bc = self.chain(&[gb, gc]);
                    let left = ab.and_then(|ab| self.chain(&[ab, gc]));
                    let right = bc.and_then(|bc| self.chain(&[ga, bc]));
                    if let (Some(l), Some(r)) = (left, right) {
                        if !p.same_hom(l, r) {
                            self.out.push(Violation::Associativity {
                                triple: format!(
                                    "{};{};{}",
                                    p.hom_decl(a).name,
                                    p.hom_decl(b).name,
                                    p.hom_decl(c).name
                                ),
                                left: self.name(l),
                                right: self.name(r),
                            });
                        }
                    }
                }
            }
        }
    }

    fn homotopies(&mut self) {
        let p = self.p;
        for h in &p.homotopies {
            let (a, b) = (p.hom_decl(h.f0), p.hom_decl(h.f1));
            if a.dom != b.dom || a.cod != b.cod {
                self.out.push(Violation::Typing {
                    decl: format!("homotopy {} ~ {}", a.name, b.name),
                    detail: "endpoints have different domain or codomain".into(),
                });
            }
        }
    }

    fn corners(&mut self) {
        let p = self.p;
        for c in p.corner_ids() {
            let (base, stab) = p.corner_objects(c);
            if p.object(stab).stabilization_of != Some(base) {
                self.out.push(Violation::Typing {
                    decl: format!("corner {}", p.corner_name(c)),
                    detail: format!(
                        "codomain {} is not tagged as the stabilization of {}",
                        self.obj(stab),
                        self.obj(base)
                    ),
                });
            }
        }
    }

    fn sums(&mut self) {
        let p = self.p;
        for s in &p.sums {
            let decl = format!("sum {}", self.obj(s.sum));
            let ok = [
                self.typed(&decl, Hom::Gen(s.i_left), s.left, s.sum),
                self.typed(&decl, Hom::Gen(s.i_right), s.right, s.sum),
                self.typed(&decl, Hom::Gen(s.p_left), s.sum, s.left),
                self.typed(&decl, Hom::Gen(s.p_right), s.sum, s.right),
            ];
            if ok.contains(&false) {
                continue;
            }
            let (il, ir, pl, pr) = (
                Hom::Gen(s.i_left),
                Hom::Gen(s.i_right),
                Hom::Gen(s.p_left),
                Hom::Gen(s.p_right),
            );
            let facts = [
                ([il, pl], Hom::Id(s.left)),
                ([ir, pr], Hom::Id(s.right)),
                ([il, pr], Hom::Zero(s.left, s.right)),
                ([ir, pl], Hom::Zero(s.right, s.left)),
            ];
            for (chain, expected) in facts {
                if let Some(fact) = self.fact(&chain, expected) {
                    self.out.push(Violation::SumFact {
                        sum: self.obj(s.sum),
                        fact,
                    });
                }
            }
        }
    }

    fn splits(&mut self) {
        let p = self.p;
        for s in &p.splits {
            let decl = format!("split exact sequence {}", s.name);
            let sum = p.sum(s.sum);
            let (a, b) = (sum.left, sum.right);
            let d = p.hom_decl(s.f).cod;
            let ok = [
                self.typed(&decl, Hom::Gen(s.f), a, d),
                self.typed(&decl, Hom::Gen(s.g), d, b),
                self.typed(&decl, Hom::Gen(s.s), b, d),
            ];
            if ok.contains(&false) {
                continue;
            }
            let facts = [
                ([Hom::Gen(s.s), Hom::Gen(s.g)], Hom::Id(b)),
                ([Hom::Gen(s.f), Hom::Gen(s.g)], Hom::Zero(a, b)),
            ];
            for (chain, expected) in facts {
                if let Some(fact) = self.fact(&chain, expected) {
                    self.out.push(Violation::SplitExactFact {
                        split: s.name.clone(),
                        fact,
                    });
                }
            }
        }
    }

    fn representatives(&mut self) {
        let p = self.p;
        for r in &p.reps {
            let object = self.obj(r.object);
            let decl = format!("representative {} for {}", self.obj(r.rep), object);
            if !p.is_representative(r.rep) {
                self.out.push(Violation::Linkage {
                    decl: decl.clone(),
                    detail: format!(
                        "{} is itself replaced by another representative",
                        self.obj(r.rep)
                    ),
                });
            }
            let ok = self.typed(&decl, r.iso, r.object, r.rep)
                & self.typed(&decl, r.iso_inv, r.rep, r.object);
            if ok {
                for (chain, expected) in [
                    ([r.iso, r.iso_inv], Hom::Id(r.object)),
                    ([r.iso_inv, r.iso], Hom::Id(r.rep)),
                ] {
                    if let Some(fact) = self.fact(&chain, expected) {
                        self.out.push(Violation::RepresentativeFact {
                            object: object.clone(),
                            fact,
                        });
                    }
                }
            }

            for l in &r.corner_links {
                let (base, stab) = p.corner_objects(l.corner);
                let (tbase, tstab) = p.corner_objects(l.target);
                let ldecl = format!(
                    "corner {} to {}",
                    p.corner_name(l.corner),
                    p.corner_name(l.target)
                );
                if base != r.object || tbase != r.rep {
                    self.out.push(Violation::Linkage {
                        decl: ldecl,
                        detail: format!(
                            "must run from a corner on {} to a corner on {}",
                            object,
                            self.obj(r.rep)
                        ),
                    });
                    continue;
                }
                if !p.is_representative(tstab) {
                    self.out.push(Violation::Linkage {
                        decl: ldecl.clone(),
                        detail: format!("{} is not a representative", self.obj(tstab)),
                    });
                }
                if !self.typed(&ldecl, l.stab_iso, stab, tstab) || !ok {
                    continue;
                }
                let emb = Hom::Gen(p.corner(l.corner).emb);
                let temb = Hom::Gen(p.corner(l.target).emb);
                let lhs = self.chain(&[r.iso, temb]);
                let rhs = self.chain(&[emb, l.stab_iso]);
                if lhs.is_none() || rhs.is_none() || !p.same_hom(lhs.unwrap(), rhs.unwrap()) {
                    self.out.push(Violation::RepresentativeFact {
                        object: object.clone(),
                        fact: format!(
                            "{};{} = {};{}",
                            self.name(r.iso),
                            self.name(temb),
                            self.name(emb),
                            self.name(l.stab_iso)
                        ),
                    });
                }
            }

            for l in &r.split_links {
                self.split_link(&object, l);
            }
        }
    }

    fn split_link(&mut self, object: &str, l: &super::SplitLink) {
        let p = self.p;
        let (src, dst) = (p.split(l.split), p.split(l.target));
        let ldecl = format!("split {} to {}", src.name, dst.name);
        let (a, d, b) = p.split_objects(l.split);
        let (a2, d2, b2) = p.split_objects(l.target);
        let (sum, sum2) = (p.sum(src.sum), p.sum(dst.sum));
        for obj in [d2, sum2.sum] {
            if !p.is_representative(obj) {
                self.out.push(Violation::Linkage {
                    decl: ldecl.clone(),
                    detail: format!("{} is not a representative", self.obj(obj)),
                });
            }
        }
        let ok = [
            self.typed(&ldecl, l.pi_a, a, a2),
            self.typed(&ldecl, l.pi_b, b, b2),
            self.typed(&ldecl, l.pi_d, d, d2),
            self.typed(&ldecl, l.sum_iso, sum.sum, sum2.sum),
            self.typed(&ldecl, l.sum_iso_inv, sum2.sum, sum.sum),
        ];
        if ok.contains(&false) {
            return;
        }
        let squares = [
            ([l.pi_a, Hom::Gen(dst.f)], [Hom::Gen(src.f), l.pi_d]),
            ([l.pi_b, Hom::Gen(dst.s)], [Hom::Gen(src.s), l.pi_d]),
            (
                [Hom::Gen(sum.p_left), l.pi_a],
                [l.sum_iso, Hom::Gen(sum2.p_left)],
            ),
            (
                [Hom::Gen(sum.p_right), l.pi_b],
                [l.sum_iso, Hom::Gen(sum2.p_right)],
            ),
        ];
        for (lhs, rhs) in squares {
            let (x, y) = (self.chain(&lhs), self.chain(&rhs));
            let holds = matches!((x, y), (Some(x), Some(y)) if p.same_hom(x, y));
            if !holds {
                self.out.push(Violation::RepresentativeFact {
                    object: object.to_string(),
                    fact: format!(
                        "{};{} = {};{}",
                        self.name(lhs[0]),
                        self.name(lhs[1]),
                        self.name(rhs[0]),
                        self.name(rhs[1])
                    ),
                });
            }
        }
        for (chain, expected) in [
            ([l.sum_iso, l.sum_iso_inv], Hom::Id(sum.sum)),
            ([l.sum_iso_inv, l.sum_iso], Hom::Id(sum2.sum)),
        ] {
            if let Some(fact) = self.fact(&chain, expected) {
                self.out.push(Violation::RepresentativeFact {
                    object: object.to_string(),
                    fact,
                });
            }
        }
    }
}

pub(crate) fn validate_presentation(p: &Presentation) -> ValidationReport {
    let mut c = Checker {
        p,
        out: Vec::new(),
        missing: BTreeSet::new(),
    };
    c.table();
    c.homotopies();
    c.corners();
    c.sums();
    c.splits();
    c.representatives();
    let mut violations: Vec<Violation> = c
        .missing
        .iter()
        .map(|(a, b)| Violation::MissingComposition {
            first: p.hom_decl(*a).name.clone(),
            second: p.hom_decl(*b).name.clone(),
        })
        .collect();
    violations.extend(c.out);
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use crate::presentation::Presentation;

    const P1: &str = include_str!("../../fixtures/p1.gk");
    const P3: &str = include_str!("../../fixtures/p3.gk");

    #[test]
    fn fixtures_are_valid() {
        for src in [
            P1,
            P3,
            include_str!("../../fixtures/p2.gk"),
            include_str!("../../fixtures/zero.gk"),
        ] {
            let p = Presentation::parse(src).unwrap();
            let report = p.validate();
            assert!(report.is_valid(), "{report}");
        }
    }

    #[test]
    fn broken_splitting_is_reported() {
        let src = P1.replace("compose s ; g = id(B)", "compose s ; g = 0");
        let report = Presentation::parse(&src).unwrap().validate();
        let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        assert!(
            msgs.contains(&"split-exact fact s;g = id(B) violated for S1".to_string()),
            "{msgs:?}"
        );
    }

    #[test]
    fn missing_composition_is_reported() {
        let src = "object A\nobject B\nobject C\nobject D\n\
                   hom f : A -> B\nhom g : B -> C\nhom h : C -> D\nhom fg : A -> C\n\
                   compose f ; g = fg\n";
        let report = Presentation::parse(src).unwrap().validate();
        let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        assert!(
            msgs.contains(&"missing composition fg;h".to_string()),
            "{msgs:?}"
        );
        assert!(
            msgs.contains(&"missing composition g;h".to_string()),
            "{msgs:?}"
        );
    }

    #[test]
    fn associativity_failure() {
        // e is idempotent by declaration but a second idempotent k disagrees
        let src = "object A\nhom e : A -> A\nhom k : A -> A\n\
                   compose e ; e = e\ncompose e ; k = e\ncompose k ; e = k\ncompose k ; k = e\n";
        let report = Presentation::parse(src).unwrap().validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, super::Violation::Associativity { .. })));
    }

    #[test]
    fn corner_needs_stabilization_tag() {
        let src = "object A\nobject KA\nobject X\nstab X of A via c\nhom c : A -> KA\n";
        let report = Presentation::parse(src).unwrap().validate();
        assert!(!report.is_valid());
        assert!(report.violations[0].to_string().contains("stabilization"));
    }

    #[test]
    fn representative_square_is_checked() {
        let src = P3.replace("compose f ; u = f'", "compose f ; u = f2_u");
        let report = Presentation::parse(&src).unwrap().validate();
        assert!(
            report.violations.iter().any(|v| v
                .to_string()
                .starts_with("representative fact id(A);f' = f;u")),
            "{report}"
        );
    }

    #[test]
    fn through_zero_object_must_be_zero() {
        let src =
            "object Z zero\nobject A\nhom a : A -> Z\nhom b : Z -> A\ncompose a ; b = id(A)\n";
        let report = Presentation::parse(src).unwrap().validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, super::Violation::ZeroObjectComposite { .. })));
    }
}
