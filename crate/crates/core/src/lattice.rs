//! The seven named normal subgroups, classification of elements, and exact
//! normal-closure descriptors.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::field::{FieldElement, FieldSpec};
use crate::matrices::{Element, FinitaryMatrix, MatrixError, Normal};
use crate::procedures::{center_witness, transvection_witness, CenterWitness, ProcedureError, TransvectionWitness, WitnessLetter};
use crate::unit_groups::{PairSubgroup, UnitGroupError, UnitSubgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error(transparent)]
    Procedure(#[from] ProcedureError),
    #[error(transparent)]
    UnitGroup(#[from] UnitGroupError),
    #[error("unknown lattice node {0:?}")]
    UnknownNode(String),
}

impl From<MatrixError> for LatticeError {
    fn from(e: MatrixError) -> Self {
        LatticeError::Procedure(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeNode {
    Trivial,
    Dsc,
    SLfr,
    GLfr,
    DscSLfr,
    DscGLfr,
    GLcf,
}

impl LatticeNode {
    pub const ALL: [LatticeNode; 7] = [
        LatticeNode::Trivial,
        LatticeNode::Dsc,
        LatticeNode::SLfr,
        LatticeNode::GLfr,
        LatticeNode::DscSLfr,
        LatticeNode::DscGLfr,
        LatticeNode::GLcf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LatticeNode::Trivial => "Trivial",
            LatticeNode::Dsc => "Dsc",
            LatticeNode::SLfr => "SLfr",
            LatticeNode::GLfr => "GLfr",
            LatticeNode::DscSLfr => "DscSLfr",
            LatticeNode::DscGLfr => "DscGLfr",
            LatticeNode::GLcf => "GLcf",
        }
    }

    /// Conventional mathematical notation.
    pub fn math_label(self) -> &'static str {
        match self {
            LatticeNode::Trivial => "{E}",
            LatticeNode::Dsc => "D_sc",
            LatticeNode::SLfr => "SL_fr",
            LatticeNode::GLfr => "GL_fr",
            LatticeNode::DscSLfr => "D_sc×SL_fr",
            LatticeNode::DscGLfr => "D_sc×GL_fr",
            LatticeNode::GLcf => "GL_cf",
        }
    }

    /// The nodes above or equal to `self`.
    fn up_set(self) -> &'static [LatticeNode] {
        use LatticeNode::*;
        match self {
            Trivial => &LatticeNode::ALL,
            Dsc => &[Dsc, DscSLfr, DscGLfr, GLcf],
            SLfr => &[SLfr, GLfr, DscSLfr, DscGLfr, GLcf],
            GLfr => &[GLfr, DscGLfr, GLcf],
            DscSLfr => &[DscSLfr, DscGLfr, GLcf],
            DscGLfr => &[DscGLfr, GLcf],
            GLcf => &[GLcf],
        }
    }

    /// Subgroup inclusion.
    pub fn le(self, other: LatticeNode) -> bool {
        self.up_set().contains(&other)
    }

    pub fn descriptor(self, spec: FieldSpec) -> NormalSubgroupDescriptor {
        let sandwich = |full| NormalSubgroupDescriptor::Sandwich(PairSubgroup::with_full(spec, full, Vec::new()).expect("full factors"));
        match self {
            LatticeNode::Trivial => NormalSubgroupDescriptor::Central(UnitSubgroup::trivial(spec)),
            LatticeNode::Dsc => NormalSubgroupDescriptor::Central(UnitSubgroup::full(spec)),
            LatticeNode::SLfr => sandwich([false, false]),
            LatticeNode::GLfr => sandwich([false, true]),
            LatticeNode::DscSLfr => sandwich([true, false]),
            LatticeNode::DscGLfr => sandwich([true, true]),
            LatticeNode::GLcf => NormalSubgroupDescriptor::Full,
        }
    }
}

impl fmt::Display for LatticeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeNode {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LatticeNode::ALL
            .into_iter()
            .find(|n| n.name().eq_ignore_ascii_case(s) || n.math_label() == s)
            .ok_or_else(|| LatticeError::UnknownNode(s.to_string()))
    }
}

/// A normal subgroup of `GL_cf`.
///
/// `Sandwich(S)` is the preimage of `S ≤ K*×K*` in `D_sc × GL_fr` under
/// `α·h ↦ (α, det ĥ)`; it always contains `SL_fr`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NormalSubgroupDescriptor {
    Central(UnitSubgroup),
    Sandwich(PairSubgroup),
    Full,
}

impl NormalSubgroupDescriptor {
    pub fn canonical(&self) -> Self {
        match self {
            NormalSubgroupDescriptor::Central(h) => NormalSubgroupDescriptor::Central(h.canonical()),
            NormalSubgroupDescriptor::Sandwich(s) => NormalSubgroupDescriptor::Sandwich(s.canonical()),
            NormalSubgroupDescriptor::Full => NormalSubgroupDescriptor::Full,
        }
    }

    /// The named node this descriptor equals, if any.
    pub fn named_node(&self) -> Option<LatticeNode> {
        let spec = match self {
            NormalSubgroupDescriptor::Central(h) => h.spec(),
            NormalSubgroupDescriptor::Sandwich(s) => s.spec(),
            NormalSubgroupDescriptor::Full => return Some(LatticeNode::GLcf),
        };
        LatticeNode::ALL.into_iter().find(|n| n.descriptor(spec) == *self)
    }
}

impl fmt::Display for NormalSubgroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.named_node() {
            return write!(f, "{}", n.math_label());
        }
        match self {
            NormalSubgroupDescriptor::Central(h) => {
                let gens: Vec<String> = h.canonical_generators().iter().map(ToString::to_string).collect();
                write!(f, "Central⟨{}⟩", gens.join(", "))
            }
            NormalSubgroupDescriptor::Sandwich(s) => {
                let [a, d] = s.full_flags();
                let mut gens: Vec<String> = s.canonical_generators().iter().map(|(x, y)| format!("({x}, {y})")).collect();
                if a {
                    gens.push("K*×1".into());
                }
                if d {
                    gens.push("1×K*".into());
                }
                write!(f, "Sandwich⟨{}⟩", gens.join(", "))
            }
            NormalSubgroupDescriptor::Full => write!(f, "GL_cf"),
        }
    }
}

/// Least named node containing `g`.
pub fn classify_minimal_node(g: &Element) -> Result<LatticeNode, LatticeError> {
    Ok(match g.normalize()? {
        Normal::Outside { .. } => LatticeNode::GLcf,
        Normal::InProduct(x) => {
            let scalar = !x.scalar().is_one();
            match (x.body().is_identity(), x.body().corner_det().is_one(), scalar) {
                (true, _, false) => LatticeNode::Trivial,
                (true, _, true) => LatticeNode::Dsc,
                (false, true, false) => LatticeNode::SLfr,
                (false, false, false) => LatticeNode::GLfr,
                (false, true, true) => LatticeNode::DscSLfr,
                (false, false, true) => LatticeNode::DscGLfr,
            }
        }
    })
}

/// `(α, det ĥ)` for `g = α·h`.
pub fn quotient_image(g: &Element) -> Result<(FieldElement, FieldElement), LatticeError> {
    match g.normalize()? {
        Normal::InProduct(x) => {
            let det = x.body().corner_det();
            Ok((x.scalar().clone(), det))
        }
        Normal::Outside { .. } => Err(ProcedureError::NotInProduct.into()),
    }
}

/// The normal closure of `gens` in `GL_cf`, in canonical form.
pub fn normal_closure(spec: FieldSpec, gens: &[Element]) -> Result<NormalSubgroupDescriptor, LatticeError> {
    let mut scalars = Vec::new();
    let mut images = Vec::new();
    let mut non_scalar = false;
    let mut outside = false;
    for g in gens {
        g.spec().ensure_same(&spec).map_err(MatrixError::from)?;
        match g.normalize()? {
            Normal::Outside { .. } => outside = true,
            Normal::InProduct(x) => {
                non_scalar |= !x.body().is_identity();
                scalars.push(x.scalar().clone());
                images.push((x.scalar().clone(), x.body().corner_det()));
            }
        }
    }
    let d = if outside {
        NormalSubgroupDescriptor::Full
    } else if non_scalar {
        NormalSubgroupDescriptor::Sandwich(PairSubgroup::new(spec, images)?)
    } else {
        NormalSubgroupDescriptor::Central(UnitSubgroup::new(spec, scalars)?)
    };
    Ok(d.canonical())
}

/// A certificate that the normal closure of `source` contains `SL_fr`:
/// a word of conjugates of `source^{±1}` equal to an elementary transvection.
///
/// Exponents in the word are balanced, so the scalar part of the source
/// cancels and the word replays against its finitary part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureWitness {
    pub source: FinitaryMatrix,
    pub scalar: FieldElement,
    pub transvection: TransvectionWitness,
}

impl ClosureWitness {
    pub fn verify(&self) -> bool {
        self.transvection.word.iter().map(|l| i64::from(l.exponent)).sum::<i64>() == 0 && self.transvection.verify(&self.source)
    }
}

/// Witness for a non-central `g` in `D_sc × GL_fr`, via the commutator
/// `c = [g, x]` with the center witness `x`; `c` has determinant 1.
pub fn closure_witness(g: &Element) -> Result<Option<ClosureWitness>, LatticeError> {
    let Normal::InProduct(sf) = g.normalize()? else {
        return Ok(None);
    };
    let CenterWitness::Witness { x, .. } = center_witness(g)? else {
        return Ok(None);
    };
    let h = sf.body();
    let c = h.inverse().try_mul(&x.inverse())?.try_mul(h)?.try_mul(&x)?;
    let inner = transvection_witness(&c)?;
    // y⁻¹ c y = (y⁻¹ g⁻¹ y)(y⁻¹ x⁻¹ g x y), and y⁻¹ c⁻¹ y is its reverse
    let mut word = Vec::with_capacity(2 * inner.word.len());
    for l in &inner.word {
        let y = &l.conjugator;
        let xy = x.try_mul(y)?;
        let pair = if l.exponent == 1 { [(y.clone(), -1), (xy, 1)] } else { [(xy, -1), (y.clone(), 1)] };
        word.extend(pair.into_iter().map(|(conjugator, exponent)| WitnessLetter { conjugator, exponent }));
    }
    let witness = ClosureWitness {
        source: h.clone(),
        scalar: sf.scalar().clone(),
        transvection: TransvectionWitness { target: inner.target, word },
    };
    if !witness.verify() {
        return Err(ProcedureError::Certification("closure witness failed replay".into()).into());
    }
    Ok(Some(witness))
}

/// [`normal_closure`] plus a transvection certificate for the first
/// non-central generator when the result is a sandwich subgroup.
pub fn normal_closure_with_witness(
    spec: FieldSpec,
    gens: &[Element],
) -> Result<(NormalSubgroupDescriptor, Option<ClosureWitness>), LatticeError> {
    let d = normal_closure(spec, gens)?;
    if !matches!(d, NormalSubgroupDescriptor::Sandwich(_)) {
        return Ok((d, None));
    }
    for g in gens {
        if let Some(w) = closure_witness(g)? {
            return Ok((d, Some(w)));
        }
    }
    Ok((d, None))
}

pub fn descriptor_contains(d: &NormalSubgroupDescriptor, g: &Element) -> Result<bool, LatticeError> {
    let normal = g.normalize()?;
    Ok(match (d, normal) {
        (NormalSubgroupDescriptor::Full, _) => true,
        (_, Normal::Outside { .. }) => false,
        (NormalSubgroupDescriptor::Central(h), Normal::InProduct(x)) => x.body().is_identity() && h.contains(x.scalar())?,
        (NormalSubgroupDescriptor::Sandwich(s), Normal::InProduct(x)) => s.contains(&(x.scalar().clone(), x.body().corner_det()))?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// The quotient is simple.
    Thin,
    /// The quotient is isomorphic to `K*`.
    Thick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelStyle {
    Names,
    Math,
}

impl FromStr for LabelStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "names" | "default" => Ok(LabelStyle::Names),
            "paper" | "math" => Ok(LabelStyle::Math),
            other => Err(format!("unknown label style {other:?}; expected names or math")),
        }
    }
}

/// The Hasse diagram of the named nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeGraph {
    pub nodes: Vec<LatticeNode>,
    /// `(lower, upper, kind)`.
    pub edges: Vec<(LatticeNode, LatticeNode, EdgeKind)>,
}

pub fn lattice_graph() -> LatticeGraph {
    use EdgeKind::*;
    use LatticeNode::*;
    LatticeGraph {
        nodes: LatticeNode::ALL.to_vec(),
        edges: vec![
            (Trivial, Dsc, Thick),
            (Trivial, SLfr, Thin),
            (Dsc, DscSLfr, Thin),
            (SLfr, GLfr, Thick),
            (SLfr, DscSLfr, Thick),
            (GLfr, DscGLfr, Thick),
            (DscSLfr, DscGLfr, Thick),
            (DscGLfr, GLcf, Thin),
        ],
    }
}

impl LatticeGraph {
    pub fn to_dot(&self, labels: LabelStyle) -> String {
        let mut out = String::from("graph lattice {\n  rankdir=BT;\n  node [shape=box];\n");
        for n in &self.nodes {
            let label = match labels {
                LabelStyle::Names => n.name(),
                LabelStyle::Math => n.math_label(),
            };
            out.push_str(&format!("  {} [label=\"{}\"];\n", n.name(), label));
        }
        for (a, b, kind) in &self.edges {
            let style = match kind {
                EdgeKind::Thick => "bold",
                EdgeKind::Thin => "solid",
            };
            out.push_str(&format!("  {} -- {} [style={}];\n", a.name(), b.name(), style));
        }
        out.push_str("}\n");
        out
    }

    /// Checks that the edges are exactly the covering pairs of the order.
    pub fn check(&self) -> Result<(), String> {
        let mut covers = Vec::new();
        for &a in &self.nodes {
            for &b in &self.nodes {
                let between = self.nodes.iter().any(|&c| c != a && c != b && a.le(c) && c.le(b));
                if a != b && a.le(b) && !between {
                    covers.push((a, b));
                }
            }
        }
        let mut edges: Vec<_> = self.edges.iter().map(|&(a, b, _)| (a, b)).collect();
        covers.sort();
        edges.sort();
        if covers != edges {
            return Err(format!("edges {edges:?} are not the covering pairs {covers:?}"));
        }
        let thick = self.edges.iter().filter(|e| e.2 == EdgeKind::Thick).count();
        if self.nodes.len() != 7 || self.edges.len() != 8 || thick != 5 {
            return Err(format!("expected 7 nodes, 8 edges, 5 thick; found {}, {}, {thick}", self.nodes.len(), self.edges.len()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::{DenseMatrix, ScaledFinitary, StringMatrix, Tail};

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn int(v: i64) -> FieldElement {
        FieldElement::from_int(q(), v)
    }

    fn e01() -> FinitaryMatrix {
        FinitaryMatrix::transvection(q(), 0, 1, int(1)).unwrap()
    }

    fn scaled(a: i64, h: FinitaryMatrix) -> Element {
        Element::from(ScaledFinitary::new(int(a), h).unwrap())
    }

    fn swap_tail() -> Element {
        Element::from(StringMatrix::new(q(), vec![], Tail::Periodic(DenseMatrix::from_ints(q(), &[&[0, 1], &[1, 0]]))).unwrap())
    }

    #[test]
    fn partial_order() {
        use LatticeNode::*;
        assert!(Trivial.le(GLcf) && Dsc.le(DscSLfr) && SLfr.le(DscSLfr) && GLfr.le(DscGLfr));
        assert!(!GLfr.le(DscSLfr) && !DscSLfr.le(GLfr));
        assert!(!Dsc.le(SLfr) && !SLfr.le(Dsc));
        for a in LatticeNode::ALL {
            assert!(a.le(a));
            for b in LatticeNode::ALL {
                if a != b && a.le(b) {
                    assert!(!b.le(a));
                }
            }
        }
    }

    #[test]
    fn classification_examples() {
        let id = Element::from(FinitaryMatrix::identity(q()));
        assert_eq!(classify_minimal_node(&id).unwrap(), LatticeNode::Trivial);
        assert_eq!(classify_minimal_node(&Element::from(e01())).unwrap(), LatticeNode::SLfr);
        assert_eq!(classify_minimal_node(&scaled(3, e01())).unwrap(), LatticeNode::DscSLfr);
        let d2 = FinitaryMatrix::diagonal(q(), &[int(2)]).unwrap();
        assert_eq!(classify_minimal_node(&Element::from(d2.clone())).unwrap(), LatticeNode::GLfr);
        assert_eq!(classify_minimal_node(&scaled(3, d2)).unwrap(), LatticeNode::DscGLfr);
        assert_eq!(classify_minimal_node(&scaled(5, FinitaryMatrix::identity(q()))).unwrap(), LatticeNode::Dsc);
        assert_eq!(classify_minimal_node(&swap_tail()).unwrap(), LatticeNode::GLcf);
    }

    #[test]
    fn quotient_image_examples() {
        assert_eq!(quotient_image(&Element::from(FinitaryMatrix::identity(q()))).unwrap(), (int(1), int(1)));
        assert_eq!(quotient_image(&scaled(3, e01())).unwrap(), (int(3), int(1)));
        assert_eq!(quotient_image(&Element::from(FinitaryMatrix::diagonal(q(), &[int(2)]).unwrap())).unwrap(), (int(1), int(2)));
        assert!(quotient_image(&swap_tail()).is_err());
    }

    #[test]
    fn closure_examples() {
        let id = Element::from(FinitaryMatrix::identity(q()));
        assert_eq!(normal_closure(q(), &[id]).unwrap(), LatticeNode::Trivial.descriptor(q()));
        assert_eq!(normal_closure(q(), &[]).unwrap(), LatticeNode::Trivial.descriptor(q()));
        let two = scaled(2, FinitaryMatrix::identity(q()));
        assert_eq!(normal_closure(q(), &[two]).unwrap(), NormalSubgroupDescriptor::Central(UnitSubgroup::new(q(), vec![int(2)]).unwrap()));
        let d2 = Element::from(FinitaryMatrix::diagonal(q(), &[int(2)]).unwrap());
        assert_eq!(normal_closure(q(), &[d2]).unwrap(), NormalSubgroupDescriptor::Sandwich(PairSubgroup::new(q(), vec![(int(1), int(2))]).unwrap()));
        let t = normal_closure(q(), &[Element::from(e01())]).unwrap();
        assert_eq!(t.named_node(), Some(LatticeNode::SLfr));
        assert_eq!(normal_closure(q(), &[swap_tail(), Element::from(e01())]).unwrap(), NormalSubgroupDescriptor::Full);
    }

    #[test]
    fn contains_examples() {
        assert!(descriptor_contains(&LatticeNode::SLfr.descriptor(q()), &Element::from(e01())).unwrap());
        let c2 = NormalSubgroupDescriptor::Central(UnitSubgroup::new(q(), vec![int(2)]).unwrap());
        let id = FinitaryMatrix::identity(q());
        assert!(descriptor_contains(&c2, &scaled(8, id.clone())).unwrap());
        assert!(!descriptor_contains(&c2, &scaled(3, id.clone())).unwrap());
        let s12 = NormalSubgroupDescriptor::Sandwich(PairSubgroup::new(q(), vec![(int(1), int(2))]).unwrap());
        assert!(!descriptor_contains(&s12, &scaled(3, id)).unwrap());
        assert!(descriptor_contains(&NormalSubgroupDescriptor::Full, &swap_tail()).unwrap());
    }

    #[test]
    fn named_descriptors_are_distinct() {
        for spec in [q(), FieldSpec::prime(5).unwrap()] {
            for a in LatticeNode::ALL {
                assert_eq!(a.descriptor(spec).named_node(), Some(a));
            }
        }
    }

    #[test]
    fn membership_is_monotone_in_the_order() {
        let samples = [
            Element::from(FinitaryMatrix::identity(q())),
            scaled(2, FinitaryMatrix::identity(q())),
            Element::from(e01()),
            Element::from(FinitaryMatrix::diagonal(q(), &[int(3)]).unwrap()),
            scaled(-1, e01()),
            scaled(5, FinitaryMatrix::diagonal(q(), &[int(7)]).unwrap()),
            swap_tail(),
        ];
        for g in &samples {
            let min = classify_minimal_node(g).unwrap();
            for x in LatticeNode::ALL {
                assert_eq!(descriptor_contains(&x.descriptor(q()), g).unwrap(), min.le(x), "{g:?} in {x}");
            }
        }
    }

    #[test]
    fn closure_witnesses_replay() {
        for g in [Element::from(e01()), scaled(3, FinitaryMatrix::diagonal(q(), &[int(2)]).unwrap())] {
            let (d, w) = normal_closure_with_witness(q(), &[g]).unwrap();
            assert!(matches!(d, NormalSubgroupDescriptor::Sandwich(_)));
            assert!(w.unwrap().verify());
        }
        let (_, w) = normal_closure_with_witness(q(), &[scaled(2, FinitaryMatrix::identity(q()))]).unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn graph_matches_order() {
        let g = lattice_graph();
        g.check().unwrap();
        let dot = g.to_dot(LabelStyle::Names);
        assert_eq!(dot.matches("style=bold").count(), 5);
        assert_eq!(dot.matches(" -- ").count(), 8);
        assert!(g.edges.contains(&(LatticeNode::DscGLfr, LatticeNode::GLcf, EdgeKind::Thin)));
        assert!(g.to_dot(LabelStyle::Math).contains("label=\"D_sc×GL_fr\""));
    }

    #[test]
    fn parse_nodes() {
        assert_eq!("slfr".parse::<LatticeNode>().unwrap(), LatticeNode::SLfr);
        assert_eq!("D_sc×SL_fr".parse::<LatticeNode>().unwrap(), LatticeNode::DscSLfr);
        assert!("nope".parse::<LatticeNode>().is_err());
    }
}
