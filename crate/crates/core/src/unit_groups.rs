//! Finitely generated subgroups of K* and K*×K*.
//!
//! Over ℚ the multiplicative group is `{±1} ⊕ ⊕_p ℤ`, so a tuple of nonzero
//! rationals becomes an integer vector of prime exponents plus one sign
//! coordinate per factor. The sign coordinate lives in ℤ/2, which is encoded
//! by adjoining the relation row `2·e_sign` to the generator lattice. Over
//! GF(p) each factor is cyclic of order `p − 1`: coordinates are discrete
//! logarithms to a fixed primitive root and the relation rows are
//! `(p − 1)·e_i`. In both cases a subgroup is a lattice containing the
//! relations, and its Hermite normal form is the canonical form.
//!
//! ℚ* is not finitely generated, so a factor may additionally be marked
//! *full*; the subgroup then contains that whole factor and the lattice only
//! tracks the remaining coordinates.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::field::{exponents_over, factor_rational_over, factor_u64, FieldElement, FieldError, FieldSpec};
use crate::hnf::hermite;

/// Discrete logarithms are found by exhaustion, so prime fields are capped here.
pub const MAX_DLOG_MODULUS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitGroupError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("modulus {0} is too large for exhaustive discrete logarithms")]
    ModulusTooLarge(u64),
}

/// Canonical data of a subgroup of (K*)^k: full-factor flags, the prime
/// support (ℚ only) and the HNF basis of the exponent lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Canon {
    pub full: Vec<bool>,
    pub primes: Vec<u64>,
    pub basis: Vec<Vec<BigInt>>,
}

/// Exponents `e` with `∏ gᵢ^{eᵢ} = x` on every factor not marked full.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub exponents: Vec<BigInt>,
}

fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = factor_u64(p - 1);
    (2..p)
        .find(|&r| {
            factors
                .iter()
                .all(|&(q, _)| FieldElement::from_int(FieldSpec::prime(p).unwrap(), r as i64).pow(((p - 1) / q) as i64).is_ok_and(|v| !v.is_one()))
        })
        .expect("prime fields have primitive roots")
}

/// `log_root(x)` in `[0, p − 1)` by walking the powers of the root.
fn discrete_log(x: &FieldElement, p: u64, root: u64) -> Result<u64, UnitGroupError> {
    let target = x.residue().expect("prime field element");
    if target == 0 {
        return Err(FieldError::ZeroInput.into());
    }
    let mut acc = 1u64;
    for k in 0..p - 1 {
        if acc == target {
            return Ok(k);
        }
        acc = acc * root % p;
    }
    unreachable!("root is primitive")
}

/// Coordinate system shared by the unit and pair subgroups.
struct Coords {
    spec: FieldSpec,
    full: Vec<bool>,
    primes: Vec<u64>,
    root: Option<u64>,
}

impl Coords {
    fn new(spec: FieldSpec, full: Vec<bool>, gens: &[Vec<FieldElement>], hint: &[u64]) -> Result<Self, UnitGroupError> {
        let mut root = None;
        let mut primes = BTreeSet::new();
        match spec.modulus() {
            Some(p) => {
                if p >= MAX_DLOG_MODULUS {
                    return Err(UnitGroupError::ModulusTooLarge(p));
                }
                root = Some(primitive_root(p));
            }
            None => {
                for g in gens {
                    for (c, x) in g.iter().enumerate() {
                        if !full[c] {
                            primes.extend(factor_rational_over(x, hint)?.exponents.keys());
                        }
                    }
                }
            }
        }
        Ok(Coords { spec, full, primes: primes.into_iter().collect(), root })
    }

    fn arity(&self) -> usize {
        self.full.len()
    }

    fn width(&self) -> usize {
        if self.spec.is_rationals() {
            self.primes.len() + 1
        } else {
            1
        }
    }

    fn active(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.arity()).filter(|&c| !self.full[c])
    }

    fn ncols(&self) -> usize {
        self.active().count() * self.width()
    }

    /// Exponent vector of `x`, or `None` when a prime falls outside the support.
    fn encode(&self, x: &[FieldElement]) -> Result<Option<Vec<BigInt>>, UnitGroupError> {
        let mut out = Vec::with_capacity(self.ncols());
        for c in self.active() {
            let v = &x[c];
            v.spec().ensure_same(&self.spec)?;
            if v.is_zero() {
                return Err(FieldError::ZeroInput.into());
            }
            match (self.spec.modulus(), self.root) {
                (Some(p), Some(r)) => out.push(BigInt::from(discrete_log(v, p, r)?)),
                _ => {
                    let Some(f) = exponents_over(v, &self.primes)? else {
                        return Ok(None);
                    };
                    out.extend(self.primes.iter().map(|q| BigInt::from(*f.exponents.get(q).unwrap_or(&0))));
                    out.push(BigInt::from((f.sign < 0) as i32));
                }
            }
        }
        Ok(Some(out))
    }

    fn relations(&self) -> Vec<Vec<BigInt>> {
        let n = self.ncols();
        let w = self.width();
        let modulus = match self.spec.modulus() {
            Some(p) => BigInt::from(p - 1),
            None => BigInt::from(2),
        };
        (0..n / w)
            .map(|k| {
                let mut row = vec![BigInt::zero(); n];
                row[k * w + w - 1] = modulus.clone();
                row
            })
            .collect()
    }

    fn decode(&self, row: &[BigInt]) -> Vec<FieldElement> {
        let w = self.width();
        let mut out = vec![FieldElement::one(self.spec); self.arity()];
        for (k, c) in self.active().enumerate() {
            let chunk = &row[k * w..(k + 1) * w];
            out[c] = match (self.spec.modulus(), self.root) {
                (Some(_), Some(r)) => {
                    FieldElement::from_int(self.spec, r as i64).pow(chunk[0].to_i64().unwrap()).unwrap()
                }
                _ => {
                    let mut v = FieldElement::one(self.spec);
                    for (q, e) in self.primes.iter().zip(chunk) {
                        let base = FieldElement::from_int(self.spec, *q as i64);
                        v = &v * &base.pow(e.to_i64().expect("desk-scale exponent")).unwrap();
                    }
                    if chunk[w - 1].is_odd() {
                        v = -&v;
                    }
                    v
                }
            };
        }
        out
    }

    fn canon(&self, gens: &[Vec<FieldElement>]) -> Result<Canon, UnitGroupError> {
        let mut rows = Vec::with_capacity(gens.len());
        for g in gens {
            rows.push(self.encode(g)?.expect("generators define the support"));
        }
        rows.extend(self.relations());
        let h = hermite(&rows, self.ncols());
        Ok(Canon { full: self.full.clone(), primes: self.primes.clone(), basis: h.rows })
    }

    /// Order of the element `g` restricted to the non-full factors; `None` if infinite.
    fn order(&self, g: &[FieldElement]) -> Option<BigInt> {
        let mut ord = BigInt::one();
        for c in self.active() {
            let x = &g[c];
            let o = match (self.spec.modulus(), self.root) {
                (Some(p), Some(r)) => {
                    let l = discrete_log(x, p, r).ok()?;
                    BigInt::from((p - 1) / (l.gcd(&(p - 1))))
                }
                _ => {
                    if x.is_one() {
                        BigInt::one()
                    } else if (-x).is_one() {
                        BigInt::from(2)
                    } else {
                        return None;
                    }
                }
            };
            ord = ord.lcm(&o);
        }
        Some(ord)
    }

    fn membership(&self, gens: &[Vec<FieldElement>], x: &[FieldElement]) -> Result<Option<Witness>, UnitGroupError> {
        let Some(target) = self.encode(x)? else {
            return Ok(None);
        };
        let mut rows = Vec::with_capacity(gens.len());
        for g in gens {
            rows.push(self.encode(g)?.expect("generators define the support"));
        }
        rows.extend(self.relations());
        let h = hermite(&rows, self.ncols());
        let Some(y) = h.solve(&target) else {
            return Ok(None);
        };
        let mut exponents = h.lift(&y);
        exponents.truncate(gens.len());
        for (e, g) in exponents.iter_mut().zip(gens) {
            if let Some(o) = self.order(g) {
                *e = e.mod_floor(&o);
            }
        }
        let w = Witness { exponents };
        assert!(self.replay(gens, &w) == self.mask(x), "membership witness failed replay");
        Ok(Some(w))
    }

    fn mask(&self, x: &[FieldElement]) -> Vec<FieldElement> {
        (0..self.arity())
            .map(|c| if self.full[c] { FieldElement::one(self.spec) } else { x[c].clone() })
            .collect()
    }

    fn replay(&self, gens: &[Vec<FieldElement>], w: &Witness) -> Vec<FieldElement> {
        let mut acc = vec![FieldElement::one(self.spec); self.arity()];
        for (g, e) in gens.iter().zip(&w.exponents) {
            let e = e.to_i64().expect("desk-scale exponent");
            for c in self.active() {
                acc[c] = &acc[c] * &g[c].pow(e).expect("nonzero generator");
            }
        }
        acc
    }
}

/// Shared implementation of unit and pair subgroups: generators in (K*)^arity.
#[derive(Clone)]
struct Generated {
    spec: FieldSpec,
    full: Vec<bool>,
    gens: Vec<Vec<FieldElement>>,
    canon: Canon,
}

impl Generated {
    fn new(spec: FieldSpec, full: Vec<bool>, gens: Vec<Vec<FieldElement>>) -> Result<Self, UnitGroupError> {
        Self::with_hint(spec, full, gens, &[])
    }

    /// `hint` lists primes known to cover most of the generators' support.
    fn with_hint(
        spec: FieldSpec,
        mut full: Vec<bool>,
        gens: Vec<Vec<FieldElement>>,
        hint: &[u64],
    ) -> Result<Self, UnitGroupError> {
        for g in &gens {
            for x in g {
                x.spec().ensure_same(&spec)?;
                if x.is_zero() {
                    return Err(FieldError::ZeroInput.into());
                }
            }
        }
        let mut gens = gens;
        // K* is cyclic for prime fields: replace full flags by a primitive root
        if let Some(p) = spec.modulus() {
            if p >= MAX_DLOG_MODULUS {
                return Err(UnitGroupError::ModulusTooLarge(p));
            }
            let r = FieldElement::from_int(spec, primitive_root(p) as i64);
            for c in 0..full.len() {
                if full[c] {
                    let mut g = vec![FieldElement::one(spec); full.len()];
                    g[c] = r.clone();
                    gens.push(g);
                    full[c] = false;
                }
            }
        }
        let coords = Coords::new(spec, full.clone(), &gens, hint)?;
        let canon = coords.canon(&gens)?;
        Ok(Generated { spec, full, gens, canon })
    }

    fn coords(&self) -> Coords {
        Coords {
            spec: self.spec,
            full: self.full.clone(),
            primes: self.canon.primes.clone(),
            root: self.spec.modulus().map(primitive_root),
        }
    }

    fn membership(&self, x: &[FieldElement]) -> Result<Option<Witness>, UnitGroupError> {
        self.coords().membership(&self.gens, x)
    }

    fn join(&self, other: &Generated) -> Result<Self, UnitGroupError> {
        self.spec.ensure_same(&other.spec)?;
        let full = self.full.iter().zip(&other.full).map(|(a, b)| *a || *b).collect();
        let gens = self.gens.iter().chain(&other.gens).cloned().collect();
        let mut hint: Vec<u64> = self.canon.primes.iter().chain(&other.canon.primes).copied().collect();
        hint.sort_unstable();
        hint.dedup();
        Generated::with_hint(self.spec, full, gens, &hint)
    }

    fn canonical_gens(&self) -> Vec<Vec<FieldElement>> {
        let coords = self.coords();
        self.canon
            .basis
            .iter()
            .map(|row| coords.decode(row))
            .filter(|g| !g.iter().all(FieldElement::is_one))
            .collect()
    }
}

/// A subgroup of K*, given by generators (and possibly all of K*).
#[derive(Clone)]
pub struct UnitSubgroup(Generated);

impl UnitSubgroup {
    pub fn new(spec: FieldSpec, gens: Vec<FieldElement>) -> Result<Self, UnitGroupError> {
        Generated::new(spec, vec![false], gens.into_iter().map(|g| vec![g]).collect()).map(UnitSubgroup)
    }

    pub fn trivial(spec: FieldSpec) -> Self {
        Self::new(spec, Vec::new()).expect("trivial subgroup")
    }

    /// All of K*.
    pub fn full(spec: FieldSpec) -> Self {
        UnitSubgroup(Generated::new(spec, vec![true], Vec::new()).expect("full subgroup"))
    }

    pub fn spec(&self) -> FieldSpec {
        self.0.spec
    }

    pub fn generators(&self) -> Vec<FieldElement> {
        self.0.gens.iter().map(|g| g[0].clone()).collect()
    }

    pub fn canon(&self) -> &Canon {
        &self.0.canon
    }

    pub fn is_trivial(&self) -> bool {
        !self.0.full[0] && self.0.canon.basis.iter().all(|r| self.0.coords().decode(r)[0].is_one())
    }

    /// Whether the subgroup is all of K*.
    pub fn is_full(&self) -> bool {
        self.0.full[0] || self.spec().modulus().is_some_and(|p| self.order() == Some(p - 1))
    }

    /// The order over GF(p); `None` over ℚ.
    pub fn order(&self) -> Option<u64> {
        let p = self.spec().modulus()?;
        // the HNF basis is the single row `d` with d | p − 1
        let d = self.0.canon.basis.first().and_then(|r| r[0].to_u64()).unwrap_or(p - 1);
        Some((p - 1) / d)
    }

    /// Membership of `x`; the witness exponents are over [`Self::generators`].
    pub fn membership(&self, x: &FieldElement) -> Result<Option<Witness>, UnitGroupError> {
        self.0.membership(std::slice::from_ref(x))
    }

    pub fn contains(&self, x: &FieldElement) -> Result<bool, UnitGroupError> {
        self.membership(x).map(|w| w.is_some())
    }

    pub fn join(&self, other: &UnitSubgroup) -> Result<Self, UnitGroupError> {
        self.0.join(&other.0).map(UnitSubgroup)
    }

    /// The same subgroup presented by its canonical basis.
    pub fn canonical(&self) -> Self {
        let gens = self.0.canonical_gens();
        UnitSubgroup(Generated::with_hint(self.spec(), self.0.full.clone(), gens, &self.0.canon.primes).expect("canonical basis"))
    }
}

impl PartialEq for UnitSubgroup {
    fn eq(&self, other: &Self) -> bool {
        self.spec() == other.spec() && self.0.canon == other.0.canon
    }
}

impl Eq for UnitSubgroup {}

impl std::hash::Hash for UnitSubgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.spec().hash(state);
        self.0.canon.hash(state);
    }
}

impl fmt::Debug for UnitSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.full[0] {
            return write!(f, "{}*", self.spec());
        }
        write!(f, "⟨")?;
        for (i, g) in self.0.canonical_gens().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", g[0])?;
        }
        write!(f, "⟩")
    }
}

/// A subgroup of K*×K*; the first coordinate is the scalar part, the second the determinant.
#[derive(Clone)]
pub struct PairSubgroup(Generated);

impl PairSubgroup {
    pub fn new(spec: FieldSpec, gens: Vec<(FieldElement, FieldElement)>) -> Result<Self, UnitGroupError> {
        Self::with_full(spec, [false, false], gens)
    }

    /// Generated by `gens` together with every factor whose flag is set.
    pub fn with_full(
        spec: FieldSpec,
        full: [bool; 2],
        gens: Vec<(FieldElement, FieldElement)>,
    ) -> Result<Self, UnitGroupError> {
        Generated::new(spec, full.to_vec(), gens.into_iter().map(|(a, b)| vec![a, b]).collect()).map(PairSubgroup)
    }

    pub fn trivial(spec: FieldSpec) -> Self {
        Self::new(spec, Vec::new()).expect("trivial subgroup")
    }

    pub fn spec(&self) -> FieldSpec {
        self.0.spec
    }

    pub fn generators(&self) -> Vec<(FieldElement, FieldElement)> {
        self.0.gens.iter().map(|g| (g[0].clone(), g[1].clone())).collect()
    }

    /// Full-factor flags after canonicalization (always false over GF(p)).
    pub fn full_flags(&self) -> [bool; 2] {
        [self.0.full[0], self.0.full[1]]
    }

    pub fn canon(&self) -> &Canon {
        &self.0.canon
    }

    pub fn membership(&self, x: &(FieldElement, FieldElement)) -> Result<Option<Witness>, UnitGroupError> {
        self.0.membership(&[x.0.clone(), x.1.clone()])
    }

    pub fn contains(&self, x: &(FieldElement, FieldElement)) -> Result<bool, UnitGroupError> {
        self.membership(x).map(|w| w.is_some())
    }

    pub fn join(&self, other: &PairSubgroup) -> Result<Self, UnitGroupError> {
        self.0.join(&other.0).map(PairSubgroup)
    }

    pub fn canonical(&self) -> Self {
        let gens = self.0.canonical_gens();
        PairSubgroup(Generated::with_hint(self.spec(), self.0.full.clone(), gens, &self.0.canon.primes).expect("canonical basis"))
    }

    /// Canonical generators, excluding the full factors.
    pub fn canonical_generators(&self) -> Vec<(FieldElement, FieldElement)> {
        self.0.canonical_gens().into_iter().map(|g| (g[0].clone(), g[1].clone())).collect()
    }
}

impl UnitSubgroup {
    pub fn canonical_generators(&self) -> Vec<FieldElement> {
        self.0.canonical_gens().into_iter().map(|g| g[0].clone()).collect()
    }
}

impl PartialEq for PairSubgroup {
    fn eq(&self, other: &Self) -> bool {
        self.spec() == other.spec() && self.0.canon == other.0.canon
    }
}

impl Eq for PairSubgroup {}

impl std::hash::Hash for PairSubgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.spec().hash(state);
        self.0.canon.hash(state);
    }
}

impl fmt::Debug for PairSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = self.full_flags();
        write!(f, "{}×{} · ⟨", if a { "K*" } else { "1" }, if b { "K*" } else { "1" })?;
        for (i, (x, y)) in self.canonical_generators().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({x}, {y})")?;
        }
        write!(f, "⟩")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> FieldElement {
        FieldElement::parse(FieldSpec::rationals(), s).unwrap()
    }

    fn qs(v: &[&str]) -> Vec<FieldElement> {
        v.iter().map(|s| q(s)).collect()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn gf7(v: i64) -> FieldElement {
        FieldElement::from_int(FieldSpec::prime(7).unwrap(), v)
    }

    #[test]
    fn unit_membership_examples() {
        let h = UnitSubgroup::new(FieldSpec::rationals(), qs(&["2", "3"])).unwrap();
        // 2^a 3^b = 8/9 forces a = 3, b = -2
        assert_eq!(h.membership(&q("8/9")).unwrap().unwrap().exponents, big(&[3, -2]));

        let h2 = UnitSubgroup::new(FieldSpec::rationals(), qs(&["2"])).unwrap();
        assert!(!h2.contains(&q("-1")).unwrap());
        assert!(!h2.contains(&q("3")).unwrap());

        // powers of 2 mod 7: 1, 2, 4
        let powers: Vec<i64> = (0..3).map(|k| 2i64.pow(k) % 7).collect();
        assert_eq!(powers.iter().position(|&x| x == 4), Some(2));
        let h7 = UnitSubgroup::new(FieldSpec::prime(7).unwrap(), vec![gf7(2)]).unwrap();
        assert_eq!(h7.membership(&gf7(4)).unwrap().unwrap().exponents, big(&[2]));
        assert!(!h7.contains(&gf7(3)).unwrap());
    }

    #[test]
    fn membership_errors() {
        let h = UnitSubgroup::new(FieldSpec::rationals(), qs(&["2"])).unwrap();
        assert_eq!(h.membership(&q("0")).unwrap_err(), UnitGroupError::Field(FieldError::ZeroInput));
        assert!(matches!(
            h.membership(&gf7(2)),
            Err(UnitGroupError::Field(FieldError::FieldMismatch(..)))
        ));
        assert!(UnitSubgroup::new(FieldSpec::rationals(), qs(&["0"])).is_err());
        let big_p = FieldSpec::prime(1_048_583).unwrap();
        assert!(matches!(UnitSubgroup::new(big_p, vec![]), Err(UnitGroupError::ModulusTooLarge(_))));
    }

    #[test]
    fn join_examples() {
        let h4 = UnitSubgroup::new(FieldSpec::rationals(), qs(&["4"])).unwrap();
        let h2 = UnitSubgroup::new(FieldSpec::rationals(), qs(&["2"])).unwrap();
        assert_eq!(h4.join(&h2).unwrap(), h2);
        assert_ne!(h4, h2);

        let one = UnitSubgroup::new(FieldSpec::rationals(), qs(&["1"])).unwrap();
        let h = UnitSubgroup::new(FieldSpec::rationals(), qs(&["-2/3", "5"])).unwrap();
        assert_eq!(one.join(&h).unwrap(), h);
        assert!(one.is_trivial());

        // 3 has order 6 mod 7: 3, 2, 6, 4, 5, 1
        let orbit: BTreeSet<i64> = (1..=6).map(|k| 3i64.pow(k) % 7).collect();
        assert_eq!(orbit.len(), 6);
        let f7 = FieldSpec::prime(7).unwrap();
        let j = UnitSubgroup::new(f7, vec![gf7(2)]).unwrap().join(&UnitSubgroup::new(f7, vec![gf7(3)]).unwrap()).unwrap();
        assert_eq!(j, UnitSubgroup::full(f7));
        assert_eq!(j.order(), Some(6));
        assert!(j.is_full());
    }

    #[test]
    fn sign_component() {
        let h = UnitSubgroup::new(FieldSpec::rationals(), qs(&["-2"])).unwrap();
        assert!(h.contains(&q("4")).unwrap());
        assert!(h.contains(&q("-1/8")).unwrap());
        assert!(!h.contains(&q("-4")).unwrap());
        let minus = UnitSubgroup::new(FieldSpec::rationals(), qs(&["-1"])).unwrap();
        assert_eq!(minus.membership(&q("-1")).unwrap().unwrap().exponents, big(&[1]));
        assert!(!minus.is_trivial());
    }

    #[test]
    fn full_rationals() {
        let full = UnitSubgroup::full(FieldSpec::rationals());
        assert!(full.contains(&q("-7/11")).unwrap());
        assert!(full.is_full());
        assert_eq!(full.join(&UnitSubgroup::new(FieldSpec::rationals(), qs(&["3"])).unwrap()).unwrap(), full);
    }

    #[test]
    fn pair_membership_examples() {
        let s = PairSubgroup::new(FieldSpec::rationals(), vec![(q("2"), q("2"))]).unwrap();
        assert_eq!(s.membership(&(q("1"), q("1"))).unwrap().unwrap().exponents, big(&[0]));
        assert!(!s.contains(&(q("4"), q("8"))).unwrap());
        assert_eq!(s.membership(&(q("4"), q("4"))).unwrap().unwrap().exponents, big(&[2]));
        assert!(PairSubgroup::trivial(FieldSpec::rationals()).contains(&(q("1"), q("1"))).unwrap());
    }

    #[test]
    fn pair_full_factors() {
        let spec = FieldSpec::rationals();
        let s = PairSubgroup::with_full(spec, [true, false], vec![(q("5"), q("3"))]).unwrap();
        assert!(s.contains(&(q("-2/7"), q("9"))).unwrap());
        assert!(!s.contains(&(q("1"), q("2"))).unwrap());
        // over GF(p) full flags become a primitive-root generator
        let f5 = FieldSpec::prime(5).unwrap();
        let a = PairSubgroup::with_full(f5, [true, false], vec![]).unwrap();
        let two = FieldElement::from_int(f5, 2);
        let one = FieldElement::one(f5);
        let b = PairSubgroup::new(f5, vec![(two.clone(), one.clone())]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.full_flags(), [false, false]);
    }

    #[test]
    fn pair_over_prime_field_is_not_a_product() {
        // the diagonal ⟨(2,2)⟩ in GF(5)*×GF(5)* has order 4
        let f5 = FieldSpec::prime(5).unwrap();
        let e = |v| FieldElement::from_int(f5, v);
        let s = PairSubgroup::new(f5, vec![(e(2), e(2))]).unwrap();
        let mut members = 0;
        for a in 1..5 {
            for b in 1..5 {
                members += s.contains(&(e(a), e(b))).unwrap() as usize;
                assert_eq!(s.contains(&(e(a), e(b))).unwrap(), a == b);
            }
        }
        assert_eq!(members, 4);
    }

    fn small_rational() -> impl Strategy<Value = FieldElement> {
        (
            prop::sample::select(vec![1i64, -1]),
            prop::collection::vec(-3i64..=3, 3),
        )
            .prop_map(|(s, e)| {
                let mut x = FieldElement::from_int(FieldSpec::rationals(), s);
                for (p, k) in [2, 3, 5].iter().zip(e) {
                    x = &x * &FieldElement::from_int(FieldSpec::rationals(), *p).pow(k).unwrap();
                }
                x
            })
    }

    proptest! {
        #[test]
        fn canonical_is_idempotent_and_order_free(gens in prop::collection::vec(small_rational(), 0..4)) {
            let spec = FieldSpec::rationals();
            let h = UnitSubgroup::new(spec, gens.clone()).unwrap();
            let c = h.canonical();
            prop_assert_eq!(&c, &h);
            prop_assert_eq!(c.canonical().canon().clone(), c.canon().clone());
            let mut rev = gens.clone();
            rev.reverse();
            prop_assert_eq!(UnitSubgroup::new(spec, rev).unwrap().canon().clone(), h.canon().clone());
            for g in &gens {
                prop_assert!(h.contains(g).unwrap());
            }
        }

        #[test]
        fn membership_is_a_congruence(gens in prop::collection::vec(small_rational(), 1..4), x in small_rational(), y in small_rational()) {
            let h = UnitSubgroup::new(FieldSpec::rationals(), gens).unwrap();
            if h.contains(&x).unwrap() && h.contains(&y).unwrap() {
                prop_assert!(h.contains(&(&x * &y)).unwrap());
                prop_assert!(h.contains(&x.inv().unwrap()).unwrap());
            }
        }

        #[test]
        fn prime_field_orders_divide(p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 101]), gens in prop::collection::vec(1i64..200, 0..3)) {
            let spec = FieldSpec::prime(p).unwrap();
            let gens: Vec<_> = gens.into_iter().map(|g| FieldElement::from_int(spec, g)).filter(|g| !g.is_zero()).collect();
            let h = UnitSubgroup::new(spec, gens.clone()).unwrap();
            let order = h.order().unwrap();
            prop_assert_eq!((p - 1) % order, 0);
            // order agrees with counting members
            let count = (1..p as i64).filter(|&v| h.contains(&FieldElement::from_int(spec, v)).unwrap()).count() as u64;
            prop_assert_eq!(count, order);
            prop_assert_eq!(h.canonical(), h);
        }
    }
}
