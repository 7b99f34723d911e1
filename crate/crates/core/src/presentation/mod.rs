//! Finite presentations of the source category.
//!
//! A [`Presentation`] declares objects, generator homomorphisms and a total
//! composition table, together with the extra structure the localized
//! category consumes: direct sums, corner embeddings, homotopic pairs,
//! split exact sequences and representative objects.
//!
//! Composition is written in diagrammatic order throughout: `x;y` is the
//! composite "first `x`, then `y`".

pub(crate) mod parse;
mod print;
mod validate;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

pub use parse::{parse_presentation, ParseError, Pos};
pub use validate::{ValidationReport, Violation};

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SumId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CornerId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SplitId(pub u32);

/// A homomorphism of the presentation: a declared generator or one of the
/// implicit identity and zero homomorphisms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Hom {
    Gen(HomId),
    Id(ObjId),
    Zero(ObjId, ObjId),
}

impl Hom {
    pub fn is_zero(self) -> bool {
        matches!(self, Hom::Zero(..))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectDecl {
    pub name: String,
    /// Set when this object plays the role of `A ⊗ K` for the named `A`.
    pub stabilization_of: Option<ObjId>,
    pub is_zero: bool,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomDecl {
    pub name: String,
    pub dom: ObjId,
    pub cod: ObjId,
    pub line: usize,
}

/// Declared composites of generator pairs. Identity and zero cases are
/// derived by [`Presentation::compose_lookup`] and never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompositionTable {
    entries: BTreeMap<(HomId, HomId), Hom>,
}

impl CompositionTable {
    pub fn get(&self, first: HomId, second: HomId) -> Option<Hom> {
        self.entries.get(&(first, second)).copied()
    }

    pub fn insert(&mut self, first: HomId, second: HomId, result: Hom) -> Option<Hom> {
        self.entries.insert((first, second), result)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((HomId, HomId), Hom)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `sum = left ⊕ right` with its canonical injections and projections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumDecl {
    pub sum: ObjId,
    pub left: ObjId,
    pub right: ObjId,
    pub i_left: HomId,
    pub i_right: HomId,
    pub p_left: HomId,
    pub p_right: HomId,
    pub line: usize,
}

/// A corner embedding `emb: A -> A_K` where `A_K` is tagged as the
/// stabilization of `A`. The corner is named after its embedding.
///
/// That the map really is `a ↦ a ⊗ e` for a rank one projection is an
/// assumption attached to the declaration; nothing here can check it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerDecl {
    pub emb: HomId,
    pub line: usize,
}

/// The endpoints of a homotopy. The homotopy itself is assumed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyDecl {
    pub f0: HomId,
    pub f1: HomId,
    pub line: usize,
}

/// A split exact sequence `0 -> A -f-> D -g-> B -> 0` with splitting `s`.
/// Exactness at `D` is assumed, only the equational shadow is checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitExactDecl {
    pub name: String,
    pub f: HomId,
    pub g: HomId,
    pub s: HomId,
    pub sum: SumId,
    pub line: usize,
}

/// Ties the corner `corner` on a represented object to the corner `target`
/// on its representative; `stab_iso` plays the role of `π ⊗ id`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerLink {
    pub corner: CornerId,
    pub target: CornerId,
    pub stab_iso: Hom,
}

/// Ties a split exact sequence to an isomorphic copy `target` whose data
/// lives on representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitLink {
    pub split: SplitId,
    pub target: SplitId,
    pub pi_a: Hom,
    pub pi_b: Hom,
    pub pi_d: Hom,
    /// `π_A ⊕ π_B`, from the old sum to the new one.
    pub sum_iso: Hom,
    /// Its inverse, running from the new sum back to the old one.
    pub sum_iso_inv: Hom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentativeDecl {
    pub object: ObjId,
    pub rep: ObjId,
    pub iso: Hom,
    pub iso_inv: Hom,
    pub corner_links: Vec<CornerLink>,
    pub split_links: Vec<SplitLink>,
    pub line: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("`{first}` and `{second}` are not composable ({mid_left} != {mid_right})")]
    NotComposable {
        first: String,
        second: String,
        mid_left: String,
        mid_right: String,
    },
    #[error("missing composition {first};{second}")]
    MissingComposition { first: String, second: String },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
}

#[derive(Clone, Debug, Default)]
pub struct Presentation {
    pub objects: Vec<ObjectDecl>,
    pub homs: Vec<HomDecl>,
    pub table: CompositionTable,
    pub sums: Vec<SumDecl>,
    pub corners: Vec<CornerDecl>,
    pub homotopies: Vec<HomotopyDecl>,
    pub splits: Vec<SplitExactDecl>,
    pub reps: Vec<RepresentativeDecl>,
    /// Uninterpreted label for the acting group.
    pub group_tag: Option<String>,
    obj_index: HashMap<String, ObjId>,
    hom_index: HashMap<String, HomId>,
    split_index: HashMap<String, SplitId>,
}

impl Presentation {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse_presentation(text)
    }

    pub fn validate(&self) -> ValidationReport {
        validate::validate_presentation(self)
    }

    pub fn to_dsl(&self) -> String {
        print::print_presentation(self)
    }

    pub(crate) fn rebuild_indices(&mut self) {
        self.obj_index = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.name.clone(), ObjId(i as u32)))
            .collect();
        self.hom_index = self
            .homs
            .iter()
            .enumerate()
            .map(|(i, h)| (h.name.clone(), HomId(i as u32)))
            .collect();
        self.split_index = self
            .splits
            .iter()
            .enumerate()
            .map(|(i, s)| (s.name.clone(), SplitId(i as u32)))
            .collect();
    }

    pub fn object(&self, id: ObjId) -> &ObjectDecl {
        &self.objects[id.0 as usize]
    }

    pub fn hom_decl(&self, id: HomId) -> &HomDecl {
        &self.homs[id.0 as usize]
    }

    pub fn sum(&self, id: SumId) -> &SumDecl {
        &self.sums[id.0 as usize]
    }

    pub fn corner(&self, id: CornerId) -> &CornerDecl {
        &self.corners[id.0 as usize]
    }

    pub fn split(&self, id: SplitId) -> &SplitExactDecl {
        &self.splits[id.0 as usize]
    }

    pub fn obj_name(&self, id: ObjId) -> &str {
        &self.object(id).name
    }

    pub fn object_id(&self, name: &str) -> Option<ObjId> {
        self.obj_index.get(name).copied()
    }

    pub fn hom_id(&self, name: &str) -> Option<HomId> {
        self.hom_index.get(name).copied()
    }

    pub fn split_id(&self, name: &str) -> Option<SplitId> {
        self.split_index.get(name).copied()
    }

    /// Corners are named after their embedding homomorphism.
    pub fn corner_id(&self, name: &str) -> Option<CornerId> {
        let hom = self.hom_id(name)?;
        self.corners
            .iter()
            .position(|c| c.emb == hom)
            .map(|i| CornerId(i as u32))
    }

    pub fn corner_name(&self, id: CornerId) -> &str {
        &self.hom_decl(self.corner(id).emb).name
    }

    pub fn sum_of_object(&self, obj: ObjId) -> Option<SumId> {
        self.sums
            .iter()
            .position(|s| s.sum == obj)
            .map(|i| SumId(i as u32))
    }

    pub fn object_ids(&self) -> impl Iterator<Item = ObjId> {
        (0..self.objects.len() as u32).map(ObjId)
    }

    pub fn hom_ids(&self) -> impl Iterator<Item = HomId> {
        (0..self.homs.len() as u32).map(HomId)
    }

    pub fn corner_ids(&self) -> impl Iterator<Item = CornerId> {
        (0..self.corners.len() as u32).map(CornerId)
    }

    pub fn split_ids(&self) -> impl Iterator<Item = SplitId> {
        (0..self.splits.len() as u32).map(SplitId)
    }

    pub fn sum_ids(&self) -> impl Iterator<Item = SumId> {
        (0..self.sums.len() as u32).map(SumId)
    }

    pub fn dom(&self, h: Hom) -> ObjId {
        match h {
            Hom::Gen(id) => self.hom_decl(id).dom,
            Hom::Id(o) => o,
            Hom::Zero(d, _) => d,
        }
    }

    pub fn cod(&self, h: Hom) -> ObjId {
        match h {
            Hom::Gen(id) => self.hom_decl(id).cod,
            Hom::Id(o) => o,
            Hom::Zero(_, c) => c,
        }
    }

    pub fn hom_name(&self, h: Hom) -> String {
        match h {
            Hom::Gen(id) => self.hom_decl(id).name.clone(),
            Hom::Id(o) => format!("id({})", self.obj_name(o)),
            Hom::Zero(d, c) => format!("0({},{})", self.obj_name(d), self.obj_name(c)),
        }
    }

    /// Resolves `NAME`, `id(OBJ)` or `0(OBJ,OBJ)`.
    pub fn resolve_hom(&self, text: &str) -> Result<Hom, PresentationError> {
        let text = text.trim();
        let unknown = |kind, name: &str| PresentationError::Unknown {
            kind,
            name: name.to_string(),
        };
        if let Some(inner) = text.strip_prefix("id(").and_then(|t| t.strip_suffix(')')) {
            let o = self
                .object_id(inner.trim())
                .ok_or_else(|| unknown("object", inner.trim()))?;
            return Ok(Hom::Id(o));
        }
        if let Some(inner) = text.strip_prefix("0(").and_then(|t| t.strip_suffix(')')) {
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| unknown("homomorphism", text))?;
            let a = self
                .object_id(a.trim())
                .ok_or_else(|| unknown("object", a.trim()))?;
            let b = self
                .object_id(b.trim())
                .ok_or_else(|| unknown("object", b.trim()))?;
            return Ok(Hom::Zero(a, b));
        }
        self.hom_id(text)
            .map(Hom::Gen)
            .ok_or_else(|| unknown("homomorphism", text))
    }

    /// Equality of homomorphisms, treating every homomorphism into or out of a
    /// zero object as zero.
    pub fn same_hom(&self, a: Hom, b: Hom) -> bool {
        self.normalize_hom(a) == self.normalize_hom(b)
    }

    /// Zero homomorphisms and identities of zero objects.
    pub fn is_zero_hom(&self, h: Hom) -> bool {
        match h {
            Hom::Zero(..) => true,
            Hom::Id(o) => self.object(o).is_zero,
            Hom::Gen(_) => false,
        }
    }

    fn normalize_hom(&self, h: Hom) -> Hom {
        match h {
            Hom::Zero(..) => h,
            _ => {
                let (d, c) = (self.dom(h), self.cod(h));
                if self.object(d).is_zero || self.object(c).is_zero {
                    Hom::Zero(d, c)
                } else {
                    h
                }
            }
        }
    }

    /// The composite `first;second`, i.e. `second ∘ first`.
    ///
    /// Identity and zero cases follow the unit and absorption laws; a
    /// composite through a zero object is zero unless the table says
    /// otherwise (validation flags that case).
    pub fn compose_lookup(&self, first: Hom, second: Hom) -> Result<Hom, PresentationError> {
        let mid = self.cod(first);
        if mid != self.dom(second) {
            return Err(PresentationError::NotComposable {
                first: self.hom_name(first),
                second: self.hom_name(second),
                mid_left: self.obj_name(mid).to_string(),
                mid_right: self.obj_name(self.dom(second)).to_string(),
            });
        }
        let (dom, cod) = (self.dom(first), self.cod(second));
        match (first, second) {
            (Hom::Zero(..), _) | (_, Hom::Zero(..)) => Ok(Hom::Zero(dom, cod)),
            (Hom::Id(_), other) | (other, Hom::Id(_)) => Ok(other),
            (Hom::Gen(a), Hom::Gen(b)) => match self.table.get(a, b) {
                Some(h) => Ok(h),
                None if self.object(mid).is_zero => Ok(Hom::Zero(dom, cod)),
                None => Err(PresentationError::MissingComposition {
                    first: self.hom_name(first),
                    second: self.hom_name(second),
                }),
            },
        }
    }

    /// Folds `compose_lookup` over a nonempty chain.
    pub fn compose_chain(&self, chain: &[Hom]) -> Result<Hom, PresentationError> {
        let (first, rest) = chain.split_first().expect("nonempty chain");
        rest.iter()
            .try_fold(*first, |acc, h| self.compose_lookup(acc, *h))
    }

    /// Objects of the representative set: everything not replaced by a
    /// different representative.
    pub fn is_representative(&self, obj: ObjId) -> bool {
        !self.reps.iter().any(|r| r.object == obj && r.rep != obj)
    }

    pub fn representative_of(&self, obj: ObjId) -> Option<&RepresentativeDecl> {
        self.reps.iter().find(|r| r.object == obj)
    }

    pub fn corner_link(&self, corner: CornerId) -> Option<(&RepresentativeDecl, &CornerLink)> {
        self.reps.iter().find_map(|r| {
            r.corner_links
                .iter()
                .find(|l| l.corner == corner)
                .map(|l| (r, l))
        })
    }

    pub fn split_link(&self, split: SplitId) -> Option<&SplitLink> {
        self.reps
            .iter()
            .flat_map(|r| r.split_links.iter())
            .find(|l| l.split == split)
    }

    /// Domain `A`, middle `D`, quotient `B` of a split exact sequence.
    pub fn split_objects(&self, id: SplitId) -> (ObjId, ObjId, ObjId) {
        let s = self.split(id);
        let f = self.hom_decl(s.f);
        let g = self.hom_decl(s.g);
        (f.dom, f.cod, g.cod)
    }

    /// The corner's base object `A` and stabilization `A_K`.
    pub fn corner_objects(&self, id: CornerId) -> (ObjId, ObjId) {
        let h = self.hom_decl(self.corner(id).emb);
        (h.dom, h.cod)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dsl())
    }
}
