//! Constructive procedures: scalar splitting, determinant decomposition,
//! conjugation with certified windows, center and transvection witnesses.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::field::{FieldElement, FieldError};
use crate::matrices::{DenseMatrix, Element, FinitaryMatrix, Generator, GroupWord, MatrixError, Normal, StringMatrix, UpperTriangularOracle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProcedureError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("element is not in D_sc × GL_fr")]
    NotInProduct,
    #[error("conjugator presentation gives no computable window bound")]
    WindowUndetermined,
    #[error("no transvection witness within depth {depth} and {states} states")]
    SearchExhausted { depth: usize, states: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("certification failed: {0}")]
    Certification(String),
}

impl From<FieldError> for ProcedureError {
    fn from(e: FieldError) -> Self {
        ProcedureError::Matrix(MatrixError::Field(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConjugatorKind {
    String,
    UpperTriangular,
    Finitary,
}

/// `x⁻¹·g·x` as a finitary matrix, with `m` such that it lies in `GL(m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugationResult {
    pub result: FinitaryMatrix,
    pub certified_window: usize,
    pub conjugator_kind: ConjugatorKind,
}

/// The unique `(α, h)` with `g = α·h` and `h` finitary.
pub fn scalar_split(g: &Element) -> Result<(FieldElement, FinitaryMatrix), ProcedureError> {
    match g.normalize()? {
        Normal::InProduct(x) => Ok(x.into_parts()),
        Normal::Outside { .. } => Err(ProcedureError::NotInProduct),
    }
}

/// `d(α) = diag(α, 1, 1, …)`.
pub fn d(alpha: &FieldElement) -> FinitaryMatrix {
    FinitaryMatrix::diagonal(alpha.spec(), std::slice::from_ref(alpha)).expect("d(α) needs α ≠ 0")
}

/// `g = d(α)·s` with `α = det ĝ` and `det ŝ = 1`.
pub fn det_decompose(g: &FinitaryMatrix) -> (FieldElement, FinitaryMatrix) {
    let alpha = g.corner_det();
    let inv = alpha.inv().expect("finitary determinant is a unit");
    let s = g.scale_row(0, &inv).expect("row scaling by a unit stays invertible");
    (alpha, s)
}

fn certify_columns(word: &GroupWord, result: &FinitaryMatrix, upto: usize) -> Result<(), ProcedureError> {
    for j in 0..upto {
        if word.column(j) != result.column(j) {
            return Err(ProcedureError::Certification(format!("column {j} of the conjugate disagrees with its finitary form")));
        }
    }
    Ok(())
}

/// `s⁻¹·g·s`, computed on the leading block of size `m`, the least partial
/// sum of the shape of `s` with `m ≥ n`.
pub fn conjugate_by_string(g: &FinitaryMatrix, s: &StringMatrix) -> Result<ConjugationResult, ProcedureError> {
    g.spec().ensure_same(&s.spec())?;
    let (_, m) = s.minimal_alignment(g.window());
    let sm = s.leading(m);
    let inv = sm.inverse().expect("aligned leading block of a string is invertible");
    let result = FinitaryMatrix::from_corner(&inv.mul(&g.corner(m)).mul(&sm))?;
    let word = GroupWord::from_letters(
        g.spec(),
        vec![(Generator::String(s.clone()), true), (Generator::Finitary(g.clone()), false), (Generator::String(s.clone()), false)],
    )?;
    // the block below row m is zero iff these columns agree with the m×m result
    certify_columns(&word, &result, m + s.tail_size())?;
    Ok(ConjugationResult { result, certified_window: m, conjugator_kind: ConjugatorKind::String })
}

/// `u⁻¹·g·u`. Columns `j ≥ b` of `u` avoid rows `< n`, where `g` is the
/// identity, so they are fixed; the remaining columns are computed lazily.
pub fn conjugate_by_triangular(g: &FinitaryMatrix, u: &UpperTriangularOracle) -> Result<ConjugationResult, ProcedureError> {
    g.spec().ensure_same(&u.spec())?;
    let n = g.window();
    let b = u.column_bound(n).ok_or(ProcedureError::WindowUndetermined)?;
    let word = GroupWord::from_letters(
        g.spec(),
        vec![(Generator::Triangular(u.clone()), true), (Generator::Finitary(g.clone()), false), (Generator::Triangular(u.clone()), false)],
    )?;
    let mut corner = DenseMatrix::zeros(g.spec(), b, b);
    for j in 0..b {
        for (i, v) in word.column(j) {
            if i >= b {
                return Err(ProcedureError::Certification(format!("column {j} reaches row {i} beyond the bound {b}")));
            }
            corner.set(i, j, v);
        }
    }
    let result = FinitaryMatrix::from_corner(&corner)?;
    certify_columns(&word, &result, b + 2)?;
    let certified_window = n.max(result.window());
    Ok(ConjugationResult { result, certified_window, conjugator_kind: ConjugatorKind::UpperTriangular })
}

pub fn conjugate_by_finitary(g: &FinitaryMatrix, x: &FinitaryMatrix) -> Result<ConjugationResult, ProcedureError> {
    let result = x.inverse().try_mul(g)?.try_mul(x)?;
    let certified_window = g.window().max(result.window());
    Ok(ConjugationResult { result, certified_window, conjugator_kind: ConjugatorKind::Finitary })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CenterWitness {
    Central,
    /// `g·x` and `x·g` differ in column `column`.
    Witness { x: FinitaryMatrix, column: usize },
}

/// Decides centrality; a non-central element gets a verified non-commuting
/// transvection or swap.
pub fn center_witness(g: &Element) -> Result<CenterWitness, ProcedureError> {
    let limit = match g.normalize()? {
        Normal::InProduct(x) if x.body().is_identity() => return Ok(CenterWitness::Central),
        Normal::InProduct(x) => x.body().window() + 1,
        Normal::Outside { scan_limit } => scan_limit.max(2),
    };
    let spec = g.spec();
    let mut first_diagonal: Option<(usize, FieldElement)> = None;
    let mut found = None;
    for a in 0..limit {
        let col = g.column(a);
        if let Some(&r) = col.keys().find(|&&r| r != a) {
            // g has entry (r, a); E + e_{ar} moves it into column r
            found = Some((FinitaryMatrix::transvection(spec, a, r, FieldElement::one(spec))?, r));
            break;
        }
        let value = col[&a].clone();
        match &first_diagonal {
            None => first_diagonal = Some((a, value)),
            Some((b, v)) if *v != value => {
                found = Some((FinitaryMatrix::swap(spec, *b, a), *b));
                break;
            }
            Some(_) => {}
        }
    }
    let (x, column) = found.ok_or_else(|| ProcedureError::Certification("non-scalar element showed no evidence".into()))?;
    let gx = g.apply(&x.column(column));
    let xg = Element::from(x.clone()).apply(&g.column(column));
    if gx == xg {
        return Err(ProcedureError::Certification(format!("candidate {x:?} commutes on column {column}")));
    }
    Ok(CenterWitness::Witness { x, column })
}

/// One factor `x⁻¹·g^ε·x` of a witness word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WitnessLetter {
    pub conjugator: FinitaryMatrix,
    pub exponent: i8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransvectionWitness {
    pub target: FinitaryMatrix,
    pub word: Vec<WitnessLetter>,
}

impl TransvectionWitness {
    /// True when the word replays against `g` to the target, which is an elementary transvection.
    pub fn verify(&self, g: &FinitaryMatrix) -> bool {
        self.target.as_transvection().is_some() && replay(g, &self.word).is_ok_and(|r| r == self.target)
    }
}

/// The product `∏ x_k⁻¹·g^{ε_k}·x_k` in word order.
pub fn replay(g: &FinitaryMatrix, word: &[WitnessLetter]) -> Result<FinitaryMatrix, ProcedureError> {
    let inv = g.inverse();
    let mut acc = FinitaryMatrix::identity(g.spec());
    for l in word {
        let power = match l.exponent {
            1 => g,
            -1 => &inv,
            e => return Err(ProcedureError::Precondition(format!("exponent {e} is not ±1"))),
        };
        let factor = l.conjugator.inverse().try_mul(power)?.try_mul(&l.conjugator)?;
        acc = acc.try_mul(&factor)?;
    }
    Ok(acc)
}

/// Search bounds of the fallback in [`transvection_witness`].
pub const SEARCH_DEPTH: usize = 6;
pub const SEARCH_STATES: usize = 200_000;

/// A word of conjugates of `g^{±1}` whose product is `E + e_{01}`.
///
/// The commutator `h = [g, t]` with an elementary `t` has `rank(h − E) ≤ 2`.
/// If the rank is 2, `t' = E + u'v'ᵀ` with `u'` fixed by `h` and `v' ⊥ u'`
/// gives `t'·h·t'⁻¹·h⁻¹ = E + u'·v'ᵀ(E − h⁻¹)`, a transvection, which a
/// change of basis makes elementary. A bounded breadth-first search is the
/// fallback; every result is replayed before it is returned.
pub fn transvection_witness(g: &FinitaryMatrix) -> Result<TransvectionWitness, ProcedureError> {
    if g.is_identity() {
        return Err(ProcedureError::Precondition("g must not be the identity".into()));
    }
    if !g.corner_det().is_one() {
        return Err(ProcedureError::Precondition("g must have determinant 1".into()));
    }
    if g.as_transvection().is_some() {
        let word = vec![WitnessLetter { conjugator: FinitaryMatrix::identity(g.spec()), exponent: 1 }];
        return Ok(TransvectionWitness { target: g.clone(), word });
    }
    if let Some(w) = classical_witness(g) {
        if w.verify(g) {
            return Ok(w);
        }
    }
    transvection_search(g, SEARCH_DEPTH, SEARCH_STATES)
}

fn is_rank_one(m: &DenseMatrix) -> bool {
    m.rank() == 1
}

fn outer(u: &[FieldElement], v: &[FieldElement]) -> DenseMatrix {
    let spec = u[0].spec();
    let rows = u.iter().map(|a| v.iter().map(|b| a * b).collect()).collect();
    DenseMatrix::from_rows(spec, rows).expect("rectangular")
}

fn classical_witness(g: &FinitaryMatrix) -> Option<TransvectionWitness> {
    let spec = g.spec();
    let n = (g.window() + 1).max(3);
    let id = DenseMatrix::identity(spec, n);
    let big = g.corner(n);
    let big_inv = big.inverse()?;

    // (conjugator, exponent) pairs over dense n×n matrices, and their product
    let (word, trans): (Vec<(DenseMatrix, i8)>, DenseMatrix) = if is_rank_one(&big.sub(&id)) {
        (vec![(id.clone(), 1)], big.clone())
    } else {
        let one = FieldElement::one(spec);
        let t = (0..n)
            .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
            .map(|(a, b)| {
                let mut t = id.clone();
                t.set(a, b, one.clone());
                t
            })
            .find(|t| t.mul(&big) != big.mul(t))?;
        let t_inv = t.inverse()?;
        let h = big_inv.mul(&t_inv).mul(&big).mul(&t);
        let h_minus = h.sub(&id);
        if is_rank_one(&h_minus) {
            (vec![(id.clone(), -1), (t, 1)], h)
        } else {
            let h_inv = h.inverse()?;
            let u = h_minus.kernel().into_iter().next()?;
            let perp = DenseMatrix::from_rows(spec, vec![u.clone()]).ok()?.kernel();
            let e_minus = id.sub(&h_inv);
            let v = perp.into_iter().find(|v| {
                let row = DenseMatrix::from_rows(spec, vec![v.clone()]).expect("row").mul(&e_minus);
                row.row(0).iter().any(|x| !x.is_zero())
            })?;
            let uv = outer(&u, &v);
            let tp = id.sub(&uv.scale(&FieldElement::from_int(spec, -1)));
            let tp_inv = id.sub(&uv);
            let trans = tp.mul(&h).mul(&tp_inv).mul(&h_inv);
            (vec![(tp_inv.clone(), -1), (t.mul(&tp_inv), 1), (t, -1), (id.clone(), 1)], trans)
        }
    };

    let x = elementary_basis(&trans.sub(&id))?;
    let word = word
        .into_iter()
        .map(|(c, e)| FinitaryMatrix::from_corner(&c.mul(&x)).ok().map(|conjugator| WitnessLetter { conjugator, exponent: e }))
        .collect::<Option<Vec<_>>>()?;
    let target = FinitaryMatrix::transvection(spec, 0, 1, FieldElement::one(spec)).ok()?;
    Some(TransvectionWitness { target, word })
}

/// For `D = u·wᵀ` with `wᵀu = 0`, an invertible `x` with `x·e₀ = u` and
/// `wᵀ·x = e₁ᵀ`, so that `x⁻¹(E + D)x = E + e_{01}`.
fn elementary_basis(dm: &DenseMatrix) -> Option<DenseMatrix> {
    let spec = dm.spec();
    let n = dm.rows();
    let k = (0..n).find(|&j| (0..n).any(|i| !dm.get(i, j).is_zero()))?;
    let u: Vec<FieldElement> = (0..n).map(|i| dm.get(i, k).clone()).collect();
    let r = (0..n).find(|&i| !u[i].is_zero())?;
    let ur_inv = u[r].inv().ok()?;
    let w: Vec<FieldElement> = (0..n).map(|j| dm.get(r, j) * &ur_inv).collect();
    let l = (0..n).find(|&j| !w[j].is_zero())?;
    let mut z = vec![FieldElement::zero(spec); n];
    z[l] = w[l].inv().ok()?;

    let mut kernel_basis = vec![u];
    for v in DenseMatrix::from_rows(spec, vec![w]).ok()?.kernel() {
        if kernel_basis.len() == n - 1 {
            break;
        }
        let mut trial = kernel_basis.clone();
        trial.push(v);
        if DenseMatrix::from_rows(spec, trial.clone()).ok()?.rank() == trial.len() {
            kernel_basis = trial;
        }
    }
    let mut columns = kernel_basis;
    columns.insert(1, z);
    let x = DenseMatrix::from_rows(spec, columns).ok()?.transpose();
    x.is_invertible().then_some(x)
}

fn is_elementary_transvection(m: &DenseMatrix) -> bool {
    let n = m.rows();
    let mut off = 0;
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j);
            if i == j {
                if !v.is_one() {
                    return false;
                }
            } else if !v.is_zero() {
                off += 1;
            }
        }
    }
    off == 1
}

/// Breadth-first search over products of at most `depth` conjugates of
/// `g^{±1}` by the pool `E`, `E ± e_{ij}`, swaps, in window `max(n, 3)`.
/// The first elementary transvection found in pool order wins.
pub fn transvection_search(g: &FinitaryMatrix, depth: usize, max_states: usize) -> Result<TransvectionWitness, ProcedureError> {
    let spec = g.spec();
    let n = g.window().max(3);
    let mut pool = vec![DenseMatrix::identity(spec, n)];
    for sign in [1, -1] {
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    let mut t = DenseMatrix::identity(spec, n);
                    t.set(a, b, FieldElement::from_int(spec, sign));
                    pool.push(t);
                }
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            pool.push(FinitaryMatrix::swap(spec, a, b).corner(n));
        }
    }
    let big = g.corner(n);
    let big_inv = big.inverse().expect("finitary");
    let mut letters = Vec::new();
    for x in &pool {
        let x_inv = x.inverse().expect("pool is invertible");
        for (e, p) in [(1i8, &big), (-1i8, &big_inv)] {
            letters.push((x.clone(), e, x_inv.mul(p).mul(x)));
        }
    }

    let exhausted = ProcedureError::SearchExhausted { depth, states: max_states };
    let start = DenseMatrix::identity(spec, n);
    // state -> (parent state, letter index)
    let mut seen: HashMap<DenseMatrix, Option<(DenseMatrix, usize)>> = HashMap::from([(start.clone(), None)]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((state, level)) = queue.pop_front() {
        if level == depth {
            continue;
        }
        for (k, (_, _, conj)) in letters.iter().enumerate() {
            let next = state.mul(conj);
            if seen.contains_key(&next) {
                continue;
            }
            seen.insert(next.clone(), Some((state.clone(), k)));
            if is_elementary_transvection(&next) {
                let mut path = Vec::new();
                let mut at = next.clone();
                while let Some(Some((parent, k))) = seen.get(&at) {
                    path.push(*k);
                    at = parent.clone();
                }
                path.reverse();
                let word = path
                    .into_iter()
                    .map(|k| WitnessLetter { conjugator: FinitaryMatrix::from_corner(&letters[k].0).expect("pool"), exponent: letters[k].1 })
                    .collect();
                let w = TransvectionWitness { target: FinitaryMatrix::from_corner(&next)?, word };
                if w.verify(g) {
                    return Ok(w);
                }
                return Err(ProcedureError::Certification("search result failed replay".into()));
            }
            if seen.len() >= max_states {
                return Err(exhausted);
            }
            queue.push_back((next, level + 1));
        }
    }
    Err(exhausted)
}

#[cfg(test)]
mod tests {
    use crate::field::FieldSpec;
    use super::*;
    use crate::matrices::{Tail, UpperTriangularOracle};
    use proptest::prelude::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn int(v: i64) -> FieldElement {
        FieldElement::from_int(q(), v)
    }

    fn frac(a: i64, b: i64) -> FieldElement {
        FieldElement::from_ratio(q(), a, b).unwrap()
    }

    fn e01() -> FinitaryMatrix {
        FinitaryMatrix::transvection(q(), 0, 1, int(1)).unwrap()
    }

    #[test]
    fn scalar_split_examples() {
        let three = Element::from(crate::matrices::ScaledFinitary::new(int(3), e01()).unwrap());
        assert_eq!(scalar_split(&three).unwrap(), (int(3), e01()));
        let d2 = FinitaryMatrix::diagonal(q(), &[int(2)]).unwrap();
        assert_eq!(scalar_split(&Element::from(d2.clone())).unwrap(), (int(1), d2));
        let s = StringMatrix::new(q(), vec![DenseMatrix::from_ints(q(), &[&[5, 1], &[0, 5]])], Tail::Periodic(DenseMatrix::from_ints(q(), &[&[0, 1], &[1, 0]]))).unwrap();
        assert_eq!(scalar_split(&Element::from(s)), Err(ProcedureError::NotInProduct));
    }

    #[test]
    fn det_decompose_examples() {
        assert_eq!(det_decompose(&FinitaryMatrix::identity(q())), (int(1), FinitaryMatrix::identity(q())));
        let g = FinitaryMatrix::diagonal(q(), &[int(2), int(3)]).unwrap();
        let (a, s) = det_decompose(&g);
        assert_eq!(a, int(6));
        assert_eq!(s, FinitaryMatrix::diagonal(q(), &[frac(1, 3), int(3)]).unwrap());
        assert_eq!(d(&a).mul(&s), g);
        assert_eq!(det_decompose(&e01()), (int(1), e01()));
    }

    #[test]
    fn conjugate_by_string_examples() {
        let swap = StringMatrix::new(q(), vec![DenseMatrix::from_ints(q(), &[&[0, 1], &[1, 0]])], Tail::Identity).unwrap();
        let r = conjugate_by_string(&FinitaryMatrix::identity(q()), &swap).unwrap();
        assert_eq!((r.result.is_identity(), r.certified_window), (true, 2));

        let g = FinitaryMatrix::diagonal(q(), &[int(2)]).unwrap();
        let r = conjugate_by_string(&g, &swap).unwrap();
        assert_eq!(r.certified_window, 2);
        assert_eq!(r.result, FinitaryMatrix::diagonal(q(), &[int(1), int(2)]).unwrap());

        let block = DenseMatrix::from_ints(q(), &[&[1, 1, 0], &[0, 1, 0], &[1, 0, 1]]);
        let s = StringMatrix::new(q(), vec![], Tail::Periodic(block.clone())).unwrap();
        let g2 = FinitaryMatrix::from_delta(q(), [(0, 1, int(2)), (1, 1, int(1))]).unwrap();
        let r = conjugate_by_string(&g2, &s).unwrap();
        assert_eq!(r.certified_window, 3);
        let expected = block.inverse().unwrap().mul(&g2.corner(3)).mul(&block);
        assert_eq!(r.result, FinitaryMatrix::from_corner(&expected).unwrap());
        assert_eq!(r.result.corner_det(), g2.corner_det());
    }

    #[test]
    fn conjugate_by_triangular_examples() {
        let u = UpperTriangularOracle::explicit(DenseMatrix::from_ints(q(), &[&[1, 1], &[0, 1]])).unwrap();
        let g = FinitaryMatrix::diagonal(q(), &[int(2)]).unwrap();
        let r = conjugate_by_triangular(&g, &u).unwrap();
        assert_eq!(r.certified_window, 2);
        assert_eq!(r.result.corner(2), DenseMatrix::from_ints(q(), &[&[2, 1], &[0, 1]]));
        assert!(conjugate_by_triangular(&FinitaryMatrix::identity(q()), &u).unwrap().result.is_identity());
        let id = UpperTriangularOracle::explicit(DenseMatrix::identity(q(), 2)).unwrap();
        assert_eq!(conjugate_by_triangular(&e01(), &id).unwrap().result, e01());

        let unbounded = UpperTriangularOracle::custom(q(), None, std::sync::Arc::new(|j| crate::matrices::basis(FieldSpec::rationals(), j))).unwrap();
        assert_eq!(conjugate_by_triangular(&g, &unbounded), Err(ProcedureError::WindowUndetermined));
    }

    #[test]
    fn triangular_conjugate_multiplies_back() {
        let u = UpperTriangularOracle::toeplitz(int(2), vec![int(1), int(-3)]).unwrap();
        let g = FinitaryMatrix::from_delta(q(), [(0, 2, int(1)), (2, 1, int(4)), (1, 1, int(2))]).unwrap();
        let r = conjugate_by_triangular(&g, &u).unwrap();
        let back = GroupWord::from_letters(
            q(),
            vec![(Generator::Triangular(u.clone()), false), (Generator::Finitary(r.result.clone()), false), (Generator::Triangular(u), true)],
        )
        .unwrap();
        for j in 0..r.certified_window + 3 {
            assert_eq!(back.column(j), g.column(j));
        }
        assert_eq!(r.result.corner_det(), g.corner_det());
    }

    #[test]
    fn center_witness_examples() {
        let five = Element::from(crate::matrices::ScaledFinitary::scalar_matrix(int(5)).unwrap());
        assert_eq!(center_witness(&five).unwrap(), CenterWitness::Central);
        let g = Element::from(FinitaryMatrix::diagonal(q(), &[int(2)]).unwrap());
        assert_eq!(center_witness(&g).unwrap(), CenterWitness::Witness { x: FinitaryMatrix::swap(q(), 0, 1), column: 0 });
        let g = Element::from(e01());
        assert_eq!(
            center_witness(&g).unwrap(),
            CenterWitness::Witness { x: FinitaryMatrix::transvection(q(), 1, 0, int(1)).unwrap(), column: 0 }
        );
        let p = StringMatrix::new(q(), vec![], Tail::Periodic(DenseMatrix::from_ints(q(), &[&[0, 1], &[1, 0]]))).unwrap();
        assert!(matches!(center_witness(&Element::from(p)).unwrap(), CenterWitness::Witness { .. }));
        let scalar_string = StringMatrix::new(q(), vec![], Tail::Periodic(DenseMatrix::identity(q(), 2).scale(&int(7)))).unwrap();
        assert_eq!(center_witness(&Element::from(scalar_string)).unwrap(), CenterWitness::Central);
        let d = StringMatrix::diagonal(q(), &[int(3), int(3)], Tail::Periodic(DenseMatrix::identity(q(), 1).scale(&int(3)))).unwrap();
        assert_eq!(center_witness(&Element::from(d)).unwrap(), CenterWitness::Central);
    }

    #[test]
    fn transvection_witness_examples() {
        let w = transvection_witness(&e01()).unwrap();
        assert_eq!(w.target, e01());
        assert!(w.verify(&e01()));

        let g = FinitaryMatrix::diagonal(q(), &[frac(1, 2), int(2)]).unwrap();
        let w = transvection_witness(&g).unwrap();
        assert!(w.word.len() <= 6);
        assert!(w.verify(&g));

        let f2 = FieldSpec::prime(2).unwrap();
        let cycle = FinitaryMatrix::from_corner(&DenseMatrix::from_ints(f2, &[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]])).unwrap();
        assert!(transvection_witness(&cycle).unwrap().verify(&cycle));
        assert!(transvection_search(&cycle, SEARCH_DEPTH, SEARCH_STATES).unwrap().verify(&cycle));

        assert!(matches!(transvection_witness(&FinitaryMatrix::identity(q())), Err(ProcedureError::Precondition(_))));
        assert!(matches!(
            transvection_witness(&FinitaryMatrix::diagonal(q(), &[int(2)]).unwrap()),
            Err(ProcedureError::Precondition(_))
        ));
    }

    #[test]
    fn search_reports_exhaustion() {
        let g = FinitaryMatrix::diagonal(q(), &[frac(1, 3), int(3)]).unwrap();
        assert_eq!(transvection_search(&g, 1, 10), Err(ProcedureError::SearchExhausted { depth: 1, states: 10 }));
    }

    #[test]
    fn replay_rejects_bad_exponent() {
        let word = [WitnessLetter { conjugator: e01(), exponent: 2 }];
        assert!(matches!(replay(&e01(), &word), Err(ProcedureError::Precondition(_))));
    }

    fn finitary_strategy(spec: FieldSpec, max_window: usize) -> impl Strategy<Value = FinitaryMatrix> {
        (1..=max_window)
            .prop_flat_map(|n| prop::collection::vec(-3i64..=3, n * n).prop_map(move |v| (n, v)))
            .prop_filter_map("singular", move |(n, v)| {
                let rows: Vec<&[i64]> = v.chunks(n).collect();
                FinitaryMatrix::from_corner(&DenseMatrix::from_ints(spec, &rows)).ok()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn det_decompose_round_trip(g in finitary_strategy(FieldSpec::rationals(), 6)) {
            let (a, s) = det_decompose(&g);
            prop_assert!(s.corner_det().is_one());
            prop_assert_eq!(d(&a).mul(&s), g);
        }

        #[test]
        fn det_is_multiplicative(g in finitary_strategy(FieldSpec::prime(5).unwrap(), 5), h in finitary_strategy(FieldSpec::prime(5).unwrap(), 5)) {
            prop_assert_eq!(det_decompose(&g.mul(&h)).0, &det_decompose(&g).0 * &det_decompose(&h).0);
        }

        #[test]
        fn string_alignment_is_minimal(g in finitary_strategy(FieldSpec::rationals(), 5), sizes in prop::collection::vec(1usize..4, 0..3), b in 1usize..4) {
            let blocks = sizes.iter().map(|&k| DenseMatrix::identity(q(), k)).collect();
            let s = StringMatrix::new(q(), blocks, Tail::Periodic(DenseMatrix::identity(q(), b))).unwrap();
            let r = conjugate_by_string(&g, &s).unwrap();
            let sums: Vec<usize> = s.shape().scan(0, |acc, k| { *acc += k; Some(*acc) }).take(20).collect();
            let least = *sums.iter().find(|&&m| m >= g.window()).unwrap();
            prop_assert_eq!(r.certified_window, least);
            prop_assert_eq!(r.result.corner_det(), g.corner_det());
        }

        #[test]
        fn transvection_witness_replays(g in finitary_strategy(FieldSpec::prime(3).unwrap(), 4)) {
            let (_, s) = det_decompose(&g);
            prop_assume!(!s.is_identity());
            let w = transvection_witness(&s).unwrap();
            prop_assert!(w.verify(&s));
        }

        #[test]
        fn center_witness_is_sound(g in finitary_strategy(FieldSpec::prime(7).unwrap(), 4), c in 1i64..7) {
            let spec = FieldSpec::prime(7).unwrap();
            let e = Element::from(crate::matrices::ScaledFinitary::new(FieldElement::from_int(spec, c), g.clone()).unwrap());
            let central = center_witness(&e).unwrap() == CenterWitness::Central;
            prop_assert_eq!(central, g.is_identity());
        }
    }
}
