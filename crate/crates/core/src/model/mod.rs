//! Exact integer-matrix models: each object becomes a free abelian group of
//! finite rank, each homomorphism a matrix, and every term is evaluated with
//! the inverse letters sent to exact integer inverses.
//!
//! A word `l1;...;ln` evaluates to `M(ln)···M(l1)`.

mod matrix;

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presentation::{Hom, HomId, ObjId, Presentation};
use crate::rewrite::ProofTrace;
use crate::terms::{FormalSum, Letter, Sign, Word};

pub use matrix::{IntMatrix, MatrixError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("malformed model file: {0}")]
    Json(String),
    #[error("no dimension given for object `{0}`")]
    MissingDim(String),
    #[error("no matrix given for homomorphism `{0}`")]
    MissingGen(String),
    #[error("unknown {kind} `{name}` in model")]
    Unknown { kind: &'static str, name: String },
    #[error("zero object `{0}` must have dimension 0")]
    ZeroObjectDim(String),
    #[error("matrix for `{name}` has shape {found}, expected {expected}")]
    Shape {
        name: String,
        expected: String,
        found: String,
    },
    #[error("{0} has no integer inverse in this model")]
    NotInvertible(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    dims: BTreeMap<String, usize>,
    gens: BTreeMap<String, Vec<Vec<i64>>>,
}

/// Object dimensions and generator matrices, indexed by id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixModel {
    dims: Vec<usize>,
    gens: Vec<IntMatrix>,
}

impl MatrixModel {
    /// Checks that every object and generator is covered with the right
    /// shape. Shape problems are hard errors, not report entries.
    pub fn new(
        p: &Presentation,
        dims: Vec<usize>,
        gens: Vec<IntMatrix>,
    ) -> Result<Self, ModelError> {
        if dims.len() != p.objects.len() {
            return Err(ModelError::MissingDim(format!(
                "{} objects, {} dimensions",
                p.objects.len(),
                dims.len()
            )));
        }
        if gens.len() != p.homs.len() {
            return Err(ModelError::MissingGen(format!(
                "{} homomorphisms, {} matrices",
                p.homs.len(),
                gens.len()
            )));
        }
        for o in p.object_ids() {
            if p.object(o).is_zero && dims[o.0 as usize] != 0 {
                return Err(ModelError::ZeroObjectDim(p.obj_name(o).to_string()));
            }
        }
        for h in p.hom_ids() {
            let decl = p.hom_decl(h);
            let expected = (dims[decl.cod.0 as usize], dims[decl.dom.0 as usize]);
            let m = &gens[h.0 as usize];
            if m.shape() != expected {
                return Err(ModelError::Shape {
                    name: decl.name.clone(),
                    expected: format!("{}x{}", expected.0, expected.1),
                    found: m.shape_text(),
                });
            }
        }
        Ok(MatrixModel { dims, gens })
    }

    pub fn from_json(p: &Presentation, text: &str) -> Result<Self, ModelError> {
        let doc: ModelDoc =
            serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        for name in doc.dims.keys() {
            if p.object_id(name).is_none() {
                return Err(ModelError::Unknown {
                    kind: "object",
                    name: name.clone(),
                });
            }
        }
        for name in doc.gens.keys() {
            if p.hom_id(name).is_none() {
                return Err(ModelError::Unknown {
                    kind: "homomorphism",
                    name: name.clone(),
                });
            }
        }
        let dims = p
            .object_ids()
            .map(|o| {
                let name = p.obj_name(o);
                doc.dims
                    .get(name)
                    .copied()
                    .ok_or_else(|| ModelError::MissingDim(name.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let gens = p
            .hom_ids()
            .map(|h| {
                let decl = p.hom_decl(h);
                let rows = doc
                    .gens
                    .get(&decl.name)
                    .ok_or_else(|| ModelError::MissingGen(decl.name.clone()))?;
                let (r, c) = (dims[decl.cod.0 as usize], dims[decl.dom.0 as usize]);
                let shape_err = || ModelError::Shape {
                    name: decl.name.clone(),
                    expected: format!("{r}x{c}"),
                    found: format!("{}x{}", rows.len(), rows.first().map_or(0, Vec::len)),
                };
                if rows.len() != r {
                    return Err(shape_err());
                }
                IntMatrix::from_rows(rows, c).map_err(|_| shape_err())
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(p, dims, gens)
    }

    pub fn to_json(&self, p: &Presentation) -> String {
        let doc = ModelDoc {
            dims: p
                .object_ids()
                .map(|o| (p.obj_name(o).to_string(), self.dim(o)))
                .collect(),
            gens: p
                .hom_ids()
                .map(|h| {
                    (
                        p.hom_decl(h).name.clone(),
                        self.gens[h.0 as usize].to_rows(),
                    )
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("plain data serializes");
        out.push('\n');
        out
    }

    pub fn dim(&self, o: ObjId) -> usize {
        self.dims[o.0 as usize]
    }

    /// Matrix of a homomorphism; identities and zeros are implicit.
    pub fn hom(&self, h: Hom) -> IntMatrix {
        match h {
            Hom::Gen(id) => self.gens[id.0 as usize].clone(),
            Hom::Id(o) => IntMatrix::identity(self.dim(o)),
            Hom::Zero(d, c) => IntMatrix::zeros(self.dim(c), self.dim(d)),
        }
    }

    /// Replaces one generator matrix, keeping the shape.
    pub fn set_gen(&mut self, h: HomId, m: IntMatrix) -> Result<(), ModelError> {
        let old = &self.gens[h.0 as usize];
        if old.shape() != m.shape() {
            return Err(ModelError::Shape {
                name: format!("{h:?}"),
                expected: old.shape_text(),
                found: m.shape_text(),
            });
        }
        self.gens[h.0 as usize] = m;
        Ok(())
    }
}

/// One failed condition, labelled `a` to `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelViolation {
    pub condition: char,
    pub subject: String,
    /// Difference between the two sides, when both sides have equal shape.
    pub residual: Option<IntMatrix>,
}

impl fmt::Display for ModelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.condition {
            'a' => "table entry",
            'b' => "homotopy pair",
            'c' => "corner embedding not invertible",
            'd' => "sigma not invertible",
            _ => "biproduct identity",
        };
        write!(f, "({}) {what}: {}", self.condition, self.subject)?;
        if let Some(r) = &self.residual {
            let rows: Vec<String> = r.to_rows().iter().map(|row| format!("{row:?}")).collect();
            write!(f, "; residual [{}]", rows.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelReport {
    pub violations: Vec<ModelViolation>,
}

impl ModelReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn conditions(&self) -> Vec<char> {
        let mut c: Vec<char> = self.violations.iter().map(|v| v.condition).collect();
        c.dedup();
        c
    }
}

impl fmt::Display for ModelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// `M(f)·M(pA) + M(s)·M(pB)`, the image of `σ`.
pub fn sigma_matrix(
    p: &Presentation,
    m: &MatrixModel,
    split: crate::presentation::SplitId,
) -> Result<IntMatrix, MatrixError> {
    let s = p.split(split);
    let sum = p.sum(s.sum);
    let g = |h| m.hom(Hom::Gen(h));
    g(s.f)
        .mul(&g(sum.p_left))?
        .add(&g(s.s).mul(&g(sum.p_right))?)
}

/// Checks the conditions that make the model a valid target: (a) table
/// entries, (b) homotopy pairs, (c) corners invertible, (d) every `σ`
/// invertible, (e) biproduct identities. All arithmetic is exact.
pub fn validate_model(p: &Presentation, m: &MatrixModel) -> Result<ModelReport, ModelError> {
    let mut violations = Vec::new();
    let differs = |l: &IntMatrix, r: &IntMatrix| -> Result<Option<Option<IntMatrix>>, ModelError> {
        if l == r {
            Ok(None)
        } else if l.shape() == r.shape() {
            Ok(Some(Some(l.sub(r)?)))
        } else {
            Ok(Some(None))
        }
    };
    for ((a, b), h) in p.table.iter() {
        let lhs = m.hom(Hom::Gen(b)).mul(&m.hom(Hom::Gen(a)))?;
        let rhs = m.hom(h);
        if let Some(residual) = differs(&lhs, &rhs)? {
            violations.push(ModelViolation {
                condition: 'a',
                subject: format!(
                    "{};{} = {}",
                    p.hom_decl(a).name,
                    p.hom_decl(b).name,
                    p.hom_name(h)
                ),
                residual,
            });
        }
    }
    for hp in &p.homotopies {
        let (l, r) = (m.hom(Hom::Gen(hp.f0)), m.hom(Hom::Gen(hp.f1)));
        if let Some(residual) = differs(&l, &r)? {
            violations.push(ModelViolation {
                condition: 'b',
                subject: format!("{} ~ {}", p.hom_decl(hp.f0).name, p.hom_decl(hp.f1).name),
                residual,
            });
        }
    }
    for c in p.corner_ids() {
        let mc = m.hom(Hom::Gen(p.corner(c).emb));
        if !(mc.rows() == mc.cols() && mc.is_unimodular()) {
            violations.push(ModelViolation {
                condition: 'c',
                subject: p.corner_name(c).to_string(),
                residual: None,
            });
        }
    }
    for s in p.split_ids() {
        let sigma = sigma_matrix(p, m, s)?;
        if !(sigma.rows() == sigma.cols() && sigma.is_unimodular()) {
            violations.push(ModelViolation {
                condition: 'd',
                subject: p.split(s).name.clone(),
                residual: None,
            });
        }
    }
    for sid in p.sum_ids() {
        let s = p.sum(sid);
        let g = |h| m.hom(Hom::Gen(h));
        let lhs = g(s.i_left)
            .mul(&g(s.p_left))?
            .add(&g(s.i_right).mul(&g(s.p_right))?)?;
        let id = IntMatrix::identity(m.dim(s.sum));
        if let Some(residual) = differs(&lhs, &id)? {
            violations.push(ModelViolation {
                condition: 'e',
                subject: p.obj_name(s.sum).to_string(),
                residual,
            });
        }
    }
    Ok(ModelReport { violations })
}

/// Evaluates terms in a model, with inverses of corners and of every `σ`
/// computed once.
pub struct Evaluator<'a> {
    m: &'a MatrixModel,
    corner_inv: Vec<IntMatrix>,
    theta: Vec<IntMatrix>,
}

impl<'a> Evaluator<'a> {
    pub fn new(p: &'a Presentation, m: &'a MatrixModel) -> Result<Self, ModelError> {
        let corner_inv = p
            .corner_ids()
            .map(|c| {
                m.hom(Hom::Gen(p.corner(c).emb))
                    .unimodular_inverse()
                    .map_err(|_| ModelError::NotInvertible(format!("corner {}", p.corner_name(c))))
            })
            .collect::<Result<_, _>>()?;
        let theta = p
            .split_ids()
            .map(|s| {
                sigma_matrix(p, m, s)?
                    .unimodular_inverse()
                    .map_err(|_| ModelError::NotInvertible(format!("sigma of {}", p.split(s).name)))
            })
            .collect::<Result<_, _>>()?;
        Ok(Evaluator {
            m,
            corner_inv,
            theta,
        })
    }

    pub fn letter(&self, l: Letter) -> IntMatrix {
        match l {
            Letter::Gen(h) => self.m.hom(h),
            Letter::CornerInv(c) => self.corner_inv[c.0 as usize].clone(),
            Letter::Theta(s) => self.theta[s.0 as usize].clone(),
        }
    }

    pub fn word(&self, w: &Word) -> Result<IntMatrix, ModelError> {
        let mut acc = IntMatrix::identity(self.m.dim(w.dom()));
        for &l in w.letters() {
            acc = self.letter(l).mul(&acc)?;
        }
        Ok(acc)
    }

    pub fn sum(&self, s: &FormalSum) -> Result<IntMatrix, ModelError> {
        let mut acc = IntMatrix::zeros(self.m.dim(s.cod()), self.m.dim(s.dom()));
        for t in s.terms() {
            let v = self.word(&t.word)?;
            acc = match t.sign {
                Sign::Plus => acc.add(&v)?,
                Sign::Minus => acc.sub(&v)?,
            };
        }
        Ok(acc)
    }
}

pub fn eval(p: &Presentation, m: &MatrixModel, s: &FormalSum) -> Result<IntMatrix, ModelError> {
    Evaluator::new(p, m)?.sum(s)
}

/// True iff every state of the trace has the same value in the model.
pub fn soundness_check_trace(
    p: &Presentation,
    m: &MatrixModel,
    trace: &ProofTrace,
) -> Result<bool, ModelError> {
    let ev = Evaluator::new(p, m)?;
    let first = ev.sum(&trace.start)?;
    for s in trace.states().skip(1).chain(std::iter::once(&trace.end)) {
        if ev.sum(s)? != first {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A random unimodular matrix together with its inverse, as a product of
/// elementary row operations with small coefficients.
pub fn random_unimodular<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    ops: usize,
) -> (IntMatrix, IntMatrix) {
    let mut u = IntMatrix::identity(n);
    let mut inv = IntMatrix::identity(n);
    if n == 0 {
        return (u, inv);
    }
    for _ in 0..ops {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            // row negation, its own inverse
            for k in 0..n {
                u.set(i, k, -u.get(i, k));
                inv.set(k, i, -inv.get(k, i));
            }
            continue;
        }
        let c = *[-2i64, -1, 1, 2].get(rng.gen_range(0..4)).unwrap();
        // u <- (I + c e_ij) u, inv <- inv (I - c e_ij)
        for k in 0..n {
            u.set(i, k, u.get(i, k) + c * u.get(j, k));
            inv.set(k, j, inv.get(k, j) - c * inv.get(k, i));
        }
    }
    (u, inv)
}

/// A new valid model built from a valid `base`: the direct sum of `copies`
/// copies, conjugated object by object with random unimodular matrices.
/// Every validation condition is invariant under both operations.
pub fn random_model<R: Rng + ?Sized>(
    p: &Presentation,
    base: &MatrixModel,
    copies: usize,
    rng: &mut R,
) -> MatrixModel {
    let copies = copies.max(1);
    let dims: Vec<usize> = base.dims.iter().map(|d| d * copies).collect();
    let conj: Vec<(IntMatrix, IntMatrix)> = dims
        .iter()
        .map(|&n| random_unimodular(rng, n, 2 * n + 2))
        .collect();
    let gens = p
        .hom_ids()
        .map(|h| {
            let decl = p.hom_decl(h);
            let b = &base.gens[h.0 as usize];
            let mut m = b.clone();
            for _ in 1..copies {
                m = m.direct_sum(b);
            }
            let (u_cod, _) = &conj[decl.cod.0 as usize];
            let (_, u_dom_inv) = &conj[decl.dom.0 as usize];
            u_cod
                .mul(&m)
                .and_then(|x| x.mul(u_dom_inv))
                .expect("small conjugations stay in range")
        })
        .collect();
    MatrixModel { dims, gens }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{embed_hom, parse_sum, sigma_of};
    use rand::SeedableRng;

    fn load(pres: &str, model: &str) -> (Presentation, MatrixModel) {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/");
        let p =
            Presentation::parse(&std::fs::read_to_string(format!("{dir}{pres}")).unwrap()).unwrap();
        let m = MatrixModel::from_json(
            &p,
            &std::fs::read_to_string(format!("{dir}{model}")).unwrap(),
        )
        .unwrap();
        (p, m)
    }

    #[test]
    fn fixture_models_are_valid() {
        for (p, m) in [
            ("p1.gk", "m1.json"),
            ("p2.gk", "p2_perm.json"),
            ("p3.gk", "m3.json"),
            ("zero.gk", "zero.json"),
        ] {
            let (p, m) = load(p, m);
            let report = validate_model(&p, &m).unwrap();
            assert!(report.is_valid(), "{report}");
        }
    }

    #[test]
    fn m1_values() {
        let (p, m) = load("p1.gk", "m1.json");
        let s1 = p.split_id("S1").unwrap();
        assert!(sigma_matrix(&p, &m, s1).unwrap().is_identity());
        assert!(eval(&p, &m, &sigma_of(&p, s1)).unwrap().is_identity());
        let theta = parse_sum(&p, "theta(S1)").unwrap();
        assert!(eval(&p, &m, &theta).unwrap().is_identity());
        let empty = parse_sum(&p, "0(A,B)").unwrap();
        assert_eq!(eval(&p, &m, &empty).unwrap(), IntMatrix::zeros(1, 1));
        let bip = parse_sum(&p, "pA;iA + pB;iB").unwrap();
        assert!(eval(&p, &m, &bip).unwrap().is_identity());
        for h in p.hom_ids() {
            let h = Hom::Gen(h);
            assert_eq!(eval(&p, &m, &embed_hom(&p, h).unwrap()).unwrap(), m.hom(h));
        }
    }

    #[test]
    fn perm_model() {
        let (p, m) = load("p2.gk", "p2_perm.json");
        let inv = eval(&p, &m, &parse_sum(&p, "inv(c)").unwrap()).unwrap();
        let c = m.hom(p.resolve_hom("c").unwrap());
        assert_eq!(inv, c);
        assert!(eval(&p, &m, &parse_sum(&p, "inv(c);c").unwrap())
            .unwrap()
            .is_identity());
    }

    #[test]
    fn shape_errors_are_hard() {
        let p = Presentation::parse("object A\nobject B\nhom f : A -> B\n").unwrap();
        let bad = r#"{"dims": {"A": 1, "B": 2}, "gens": {"f": [[1, 0]]}}"#;
        assert!(matches!(
            MatrixModel::from_json(&p, bad),
            Err(ModelError::Shape { .. })
        ));
        let missing = r#"{"dims": {"A": 1}, "gens": {"f": [[1]]}}"#;
        assert!(matches!(
            MatrixModel::from_json(&p, missing),
            Err(ModelError::MissingDim(_))
        ));
        let extra = r#"{"dims": {"A": 1, "B": 1, "C": 1}, "gens": {"f": [[1]]}}"#;
        assert!(matches!(
            MatrixModel::from_json(&p, extra),
            Err(ModelError::Unknown { .. })
        ));
        let z = Presentation::parse("object Z zero\n").unwrap();
        assert!(matches!(
            MatrixModel::from_json(&z, r#"{"dims": {"Z": 1}, "gens": {}}"#),
            Err(ModelError::ZeroObjectDim(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let (p, m) = load("p3.gk", "m3.json");
        assert_eq!(MatrixModel::from_json(&p, &m.to_json(&p)).unwrap(), m);
    }

    #[test]
    fn random_models_stay_valid() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for (pres, model) in [
            ("p1.gk", "m1.json"),
            ("p3.gk", "m3.json"),
            ("p2.gk", "p2_perm.json"),
        ] {
            let (p, m) = load(pres, model);
            for copies in 1..=3 {
                let r = random_model(&p, &m, copies, &mut rng);
                let report = validate_model(&p, &r).unwrap();
                assert!(report.is_valid(), "{report}");
            }
        }
    }

    #[test]
    fn random_unimodular_inverse_is_exact() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for n in 0..6 {
            let (u, inv) = random_unimodular(&mut rng, n, 12);
            assert!(u.mul(&inv).unwrap().is_identity());
            assert!(u.is_unimodular());
        }
    }
}
