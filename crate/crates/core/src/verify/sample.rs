//! Random elements for property suites and corpus building.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::field::{FieldElement, FieldSpec};
use crate::lattice::{classify_minimal_node, LatticeNode};
use crate::matrices::{DenseMatrix, Element, FinitaryMatrix, ScaledFinitary, StringMatrix, Tail, UpperTriangularOracle};
use crate::procedures::{d, det_decompose};

use super::VerifyError;

/// Non-identity units drawn for scalar parts over ℚ.
const RATIONAL_SCALARS: [(i64, i64); 10] = [(2, 1), (3, 1), (5, 1), (-1, 1), (-2, 1), (1, 2), (2, 3), (-3, 5), (7, 1), (-4, 9)];

const MAX_REJECTIONS: usize = 10_000;

/// An entry of height at most `height` over ℚ, or a uniform residue.
pub fn entry<R: Rng>(spec: FieldSpec, rng: &mut R, height: i64) -> FieldElement {
    match spec.modulus() {
        Some(p) => FieldElement::from_int(spec, rng.gen_range(0..p) as i64),
        None => {
            let num = rng.gen_range(-height..=height);
            let den = rng.gen_range(1..=height.max(1));
            FieldElement::from_ratio(spec, num, den).expect("positive denominator")
        }
    }
}

pub fn nonzero_entry<R: Rng>(spec: FieldSpec, rng: &mut R, height: i64) -> FieldElement {
    loop {
        let e = entry(spec, rng, height);
        if !e.is_zero() {
            return e;
        }
    }
}

/// A unit other than 1; `None` over GF(2).
pub fn scalar<R: Rng>(spec: FieldSpec, rng: &mut R) -> Option<FieldElement> {
    match spec.modulus() {
        Some(2) => None,
        Some(p) => Some(FieldElement::from_int(spec, rng.gen_range(2..p) as i64)),
        None => {
            let &(a, b) = RATIONAL_SCALARS.choose(rng).expect("nonempty pool");
            Some(FieldElement::from_ratio(spec, a, b).expect("pool entries are valid"))
        }
    }
}

/// A uniformly sized invertible `n×n` block with entries of bounded height.
pub fn invertible_block<R: Rng>(spec: FieldSpec, rng: &mut R, n: usize, height: i64) -> DenseMatrix {
    for _ in 0..MAX_REJECTIONS {
        let mut m = DenseMatrix::zeros(spec, n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, entry(spec, rng, height));
            }
        }
        if m.is_invertible() {
            return m;
        }
    }
    panic!("no invertible {n}×{n} block found");
}

/// Identity plus a sparse perturbation inside a random window `≤ window`; never `E`.
pub fn finitary<R: Rng>(spec: FieldSpec, rng: &mut R, window: usize, height: i64) -> FinitaryMatrix {
    let window = window.max(1);
    for _ in 0..MAX_REJECTIONS {
        let n = rng.gen_range(1..=window);
        let mut m = DenseMatrix::identity(spec, n);
        for _ in 0..rng.gen_range(1..=2 * n) {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            m.set(i, j, entry(spec, rng, height));
        }
        if let Ok(f) = FinitaryMatrix::from_corner(&m) {
            if !f.is_identity() {
                return f;
            }
        }
    }
    panic!("no finitary sample found");
}

pub fn finitary_det_one<R: Rng>(spec: FieldSpec, rng: &mut R, window: usize, height: i64) -> FinitaryMatrix {
    loop {
        let (_, s) = det_decompose(&finitary(spec, rng, window, height));
        if !s.is_identity() {
            return s;
        }
    }
}

/// A finitary matrix of determinant `≠ 1`; `None` over GF(2).
pub fn finitary_det_not_one<R: Rng>(spec: FieldSpec, rng: &mut R, window: usize, height: i64) -> Option<FinitaryMatrix> {
    let beta = scalar(spec, rng)?;
    let s = if window > 1 && rng.gen_bool(0.7) { finitary_det_one(spec, rng, window, height) } else { FinitaryMatrix::identity(spec) };
    Some(d(&beta).mul(&s))
}

/// A string whose blocks have size `≤ max_block`, with an identity or a
/// non-scalar periodic tail.
pub fn string<R: Rng>(spec: FieldSpec, rng: &mut R, periodic: bool, max_block: usize, height: i64) -> StringMatrix {
    let max_block = max_block.max(1);
    let mut blocks = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let k = rng.gen_range(1..=max_block);
        blocks.push(invertible_block(spec, rng, k, height));
    }
    let tail = if periodic {
        let b = rng.gen_range(1..=max_block);
        Tail::Periodic(invertible_block(spec, rng, b, height))
    } else {
        Tail::Identity
    };
    StringMatrix::new(spec, blocks, tail).expect("blocks are invertible")
}

/// A string with a non-scalar periodic tail block.
pub fn string_outside<R: Rng>(spec: FieldSpec, rng: &mut R, max_block: usize, height: i64) -> StringMatrix {
    loop {
        let s = string(spec, rng, true, max_block.max(2), height);
        if s.tail_scalar().is_none() {
            return s;
        }
    }
}

pub fn triangular_prefix<R: Rng>(spec: FieldSpec, rng: &mut R, max_size: usize, height: i64) -> UpperTriangularOracle {
    let n = rng.gen_range(1..=max_size.max(1));
    let mut m = DenseMatrix::zeros(spec, n, n);
    for j in 0..n {
        m.set(j, j, nonzero_entry(spec, rng, height));
        for i in 0..j {
            m.set(i, j, entry(spec, rng, height));
        }
    }
    UpperTriangularOracle::explicit(m).expect("upper triangular with nonzero diagonal")
}

/// An element whose least named node is `node`, checked before it is returned.
pub fn node_element<R: Rng>(spec: FieldSpec, rng: &mut R, node: LatticeNode, window: usize) -> Result<Element, VerifyError> {
    let unavailable = || VerifyError::Unsupported(format!("{node} has no elements outside smaller nodes over {spec}"));
    let height = 3;
    let e = match node {
        LatticeNode::Trivial => Element::from(FinitaryMatrix::identity(spec)),
        LatticeNode::Dsc => Element::from(ScaledFinitary::scalar_matrix(scalar(spec, rng).ok_or_else(unavailable)?)?),
        LatticeNode::SLfr => Element::from(finitary_det_one(spec, rng, window, height)),
        LatticeNode::GLfr => Element::from(finitary_det_not_one(spec, rng, window, height).ok_or_else(unavailable)?),
        LatticeNode::DscSLfr => {
            let a = scalar(spec, rng).ok_or_else(unavailable)?;
            Element::from(ScaledFinitary::new(a, finitary_det_one(spec, rng, window, height))?)
        }
        LatticeNode::DscGLfr => {
            let a = scalar(spec, rng).ok_or_else(unavailable)?;
            let h = finitary_det_not_one(spec, rng, window, height).ok_or_else(unavailable)?;
            Element::from(ScaledFinitary::new(a, h)?)
        }
        LatticeNode::GLcf => Element::from(string_outside(spec, rng, 3, height)),
    };
    let got = classify_minimal_node(&e)?;
    if got != node {
        return Err(VerifyError::Unsound(format!("sampler for {node} produced an element of {got}: {e:?}")));
    }
    Ok(e)
}
