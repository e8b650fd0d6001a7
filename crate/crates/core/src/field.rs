//! Exact scalars: arbitrary-precision rationals and prime fields GF(p).
//!
//! Every matrix entry in the crate is a [`FieldElement`]. Elements carry
//! their [`FieldSpec`] so that mixing fields is detected instead of silently
//! producing garbage. The `std::ops` impls on references panic on a field
//! mismatch; the `try_*` methods report it as [`FieldError::FieldMismatch`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Largest modulus accepted for a prime field.
pub const MAX_MODULUS: u64 = 1 << 31;

/// Inputs to [`factor_rational`] must have numerator and denominator at most this.
pub const FACTOR_BOUND: u64 = 1_000_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields ({0} vs {1})")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("zero has no factorization or discrete logarithm")]
    ZeroInput,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported bound")]
    ModulusTooLarge(u64),
    #[error("{0} is outside the supported range for trial division")]
    OutOfRange(String),
    #[error("cannot parse {0:?} as a field element")]
    Parse(String),
    #[error("cannot parse {0:?} as a field; expected Q, GF(p) or Fp:p")]
    ParseField(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Kind {
    Rationals,
    Prime(u64),
}

/// The base field: ℚ or GF(p) with `p` prime and below [`MAX_MODULUS`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec(Kind);

impl FieldSpec {
    pub const fn rationals() -> Self {
        FieldSpec(Kind::Rationals)
    }

    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if p >= MAX_MODULUS {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(FieldSpec(Kind::Prime(p)))
    }

    pub fn is_rationals(&self) -> bool {
        matches!(self.0, Kind::Rationals)
    }

    /// The characteristic of a prime field; `None` for ℚ.
    pub fn modulus(&self) -> Option<u64> {
        match self.0 {
            Kind::Rationals => None,
            Kind::Prime(p) => Some(p),
        }
    }

    pub fn ensure_same(&self, other: &FieldSpec) -> Result<(), FieldError> {
        if self == other {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch(*self, *other))
        }
    }
}

/// Accepts `Q`, `GF(p)`, `GFp`, `Fp:p` and a bare prime `p`, case-insensitively.
impl std::str::FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        if matches!(t.as_str(), "q" | "rationals") {
            return Ok(FieldSpec::rationals());
        }
        let digits = t
            .strip_prefix("gf(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix("fp:"))
            .or_else(|| t.strip_prefix("gf"))
            .unwrap_or(&t);
        let p = digits.parse::<u64>().map_err(|_| FieldError::ParseField(s.to_string()))?;
        FieldSpec::prime(p)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Kind::Rationals => write!(f, "Q"),
            Kind::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Value {
    Rational(BigRational),
    Residue(u64),
}

/// An exact element of a [`FieldSpec`].
///
/// Rationals are kept normalized (coprime, positive denominator); residues
/// are kept in `[0, p)`. Derived equality is therefore value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    spec: FieldSpec,
    value: Value,
}

impl FieldElement {
    pub fn zero(spec: FieldSpec) -> Self {
        Self::from_int(spec, 0)
    }

    pub fn one(spec: FieldSpec) -> Self {
        Self::from_int(spec, 1)
    }

    pub fn from_int(spec: FieldSpec, v: i64) -> Self {
        let value = match spec.0 {
            Kind::Rationals => Value::Rational(BigRational::from_integer(BigInt::from(v))),
            Kind::Prime(p) => Value::Residue(v.rem_euclid(p as i64) as u64),
        };
        FieldElement { spec, value }
    }

    pub fn from_bigint(spec: FieldSpec, v: &BigInt) -> Self {
        match spec.0 {
            Kind::Rationals => FieldElement {
                spec,
                value: Value::Rational(BigRational::from_integer(v.clone())),
            },
            Kind::Prime(p) => {
                let r = v.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits");
                FieldElement { spec, value: Value::Residue(r) }
            }
        }
    }

    /// `num / den` in the given field.
    pub fn from_ratio(spec: FieldSpec, num: i64, den: i64) -> Result<Self, FieldError> {
        Self::from_int(spec, num).try_div(&Self::from_int(spec, den))
    }

    pub fn from_rational(q: BigRational) -> Self {
        FieldElement { spec: FieldSpec::rationals(), value: Value::Rational(q) }
    }

    /// Parses `"a"` or `"a/b"` (decimal integers, optional sign).
    pub fn parse(spec: FieldSpec, s: &str) -> Result<Self, FieldError> {
        let bad = || FieldError::Parse(s.to_string());
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Self::from_bigint(spec, &num).try_div(&Self::from_bigint(spec, &den))
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Rational(q) => q.is_zero(),
            Value::Residue(r) => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.value {
            Value::Rational(q) => q.is_one(),
            Value::Residue(r) => *r == 1,
        }
    }

    /// The underlying rational, when the field is ℚ.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.value {
            Value::Rational(q) => Some(q),
            Value::Residue(_) => None,
        }
    }

    /// The residue in `[0, p)`, when the field is GF(p).
    pub fn residue(&self) -> Option<u64> {
        match &self.value {
            Value::Rational(_) => None,
            Value::Residue(r) => Some(*r),
        }
    }

    /// Bit-length style height: max of |numerator| and denominator for ℚ, the residue for GF(p).
    pub fn height(&self) -> BigInt {
        match &self.value {
            Value::Rational(q) => q.numer().abs().max(q.denom().clone()),
            Value::Residue(r) => BigInt::from(*r),
        }
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.spec.ensure_same(&rhs.spec)?;
        Ok(self.add_unchecked(rhs))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.spec.ensure_same(&rhs.spec)?;
        Ok(self.add_unchecked(&rhs.neg_ref()))
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.spec.ensure_same(&rhs.spec)?;
        Ok(self.mul_unchecked(rhs))
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.spec.ensure_same(&rhs.spec)?;
        Ok(self.mul_unchecked(&rhs.inv()?))
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let value = match &self.value {
            Value::Rational(q) => Value::Rational(q.recip()),
            Value::Residue(r) => Value::Residue(mod_pow(*r, self.p() - 2, self.p())),
        };
        Ok(FieldElement { spec: self.spec, value })
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn pow(&self, e: i64) -> Result<Self, FieldError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let value = match &base.value {
            Value::Rational(q) => {
                let mut acc = BigRational::one();
                let mut b = q.clone();
                while k > 0 {
                    if k & 1 == 1 {
                        acc *= &b;
                    }
                    k >>= 1;
                    if k > 0 {
                        b = &b * &b;
                    }
                }
                Value::Rational(acc)
            }
            Value::Residue(r) => Value::Residue(mod_pow(*r, k, self.p())),
        };
        Ok(FieldElement { spec: self.spec, value })
    }

    fn p(&self) -> u64 {
        match self.spec.0 {
            Kind::Prime(p) => p,
            Kind::Rationals => unreachable!("residue arithmetic on ℚ"),
        }
    }

    fn neg_ref(&self) -> Self {
        let value = match &self.value {
            Value::Rational(q) => Value::Rational(-q),
            Value::Residue(r) => Value::Residue(if *r == 0 { 0 } else { self.p() - r }),
        };
        FieldElement { spec: self.spec, value }
    }

    fn add_unchecked(&self, rhs: &Self) -> Self {
        let value = match (&self.value, &rhs.value) {
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a + b),
            (Value::Residue(a), Value::Residue(b)) => Value::Residue((a + b) % self.p()),
            _ => unreachable!("spec checked"),
        };
        FieldElement { spec: self.spec, value }
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let value = match (&self.value, &rhs.value) {
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a * b),
            (Value::Residue(a), Value::Residue(b)) => Value::Residue(a * b % self.p()),
            _ => unreachable!("spec checked"),
        };
        FieldElement { spec: self.spec, value }
    }

    fn expect_same(&self, rhs: &Self) {
        if self.spec != rhs.spec {
            panic!("field mismatch: {} vs {}", self.spec, rhs.spec);
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Rational(q) => write!(f, "{q}"),
            Value::Residue(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.expect_same(rhs);
        self.add_unchecked(rhs)
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.expect_same(rhs);
        self.add_unchecked(&rhs.neg_ref())
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.expect_same(rhs);
        self.mul_unchecked(rhs)
    }
}

impl<'a> Div<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    /// Panics on division by zero or a field mismatch.
    fn div(self, rhs: &FieldElement) -> FieldElement {
        self.try_div(rhs).expect("field division")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization of a positive integer by trial division, ascending primes.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Sign and prime-exponent decomposition of a nonzero rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFactorization {
    /// `+1` or `-1`.
    pub sign: i8,
    /// Prime → nonzero exponent.
    pub exponents: BTreeMap<u64, i64>,
}

impl RationalFactorization {
    pub fn reconstruct(&self) -> BigRational {
        let mut num = BigInt::from(self.sign);
        let mut den = BigInt::one();
        for (&p, &e) in &self.exponents {
            let pp = num_traits::pow(BigInt::from(p), e.unsigned_abs() as usize);
            if e > 0 {
                num *= pp;
            } else {
                den *= pp;
            }
        }
        BigRational::new(num, den)
    }
}

/// Factors a nonzero rational whose numerator and denominator are at most [`FACTOR_BOUND`].
pub fn factor_rational(q: &FieldElement) -> Result<RationalFactorization, FieldError> {
    factor_rational_over(q, &[])
}

/// Like [`factor_rational`], but first divides out the primes in `known`;
/// only the remaining cofactor is subject to [`FACTOR_BOUND`].
pub fn factor_rational_over(q: &FieldElement, known: &[u64]) -> Result<RationalFactorization, FieldError> {
    let (mut exponents, sign, num, den) = split_known(q, known)?;
    let to_bounded = |v: &BigInt| -> Result<u64, FieldError> {
        v.to_u64()
            .filter(|&x| x <= FACTOR_BOUND)
            .ok_or_else(|| FieldError::OutOfRange(q.to_string()))
    };
    for (p, e) in factor_u64(to_bounded(&num)?) {
        *exponents.entry(p).or_insert(0) += e as i64;
    }
    for (p, e) in factor_u64(to_bounded(&den)?) {
        *exponents.entry(p).or_insert(0) -= e as i64;
    }
    exponents.retain(|_, e| *e != 0);
    Ok(RationalFactorization { sign, exponents })
}

/// Exponents of `q` at the primes in `known` when `q` is supported on them,
/// `None` when some other prime divides `q`. Never trial-divides.
pub fn exponents_over(q: &FieldElement, known: &[u64]) -> Result<Option<RationalFactorization>, FieldError> {
    let (mut exponents, sign, num, den) = split_known(q, known)?;
    if !num.is_one() || !den.is_one() {
        return Ok(None);
    }
    exponents.retain(|_, e| *e != 0);
    Ok(Some(RationalFactorization { sign, exponents }))
}

type Split = (BTreeMap<u64, i64>, i8, BigInt, BigInt);

fn split_known(q: &FieldElement, known: &[u64]) -> Result<Split, FieldError> {
    let r = q
        .as_rational()
        .ok_or(FieldError::FieldMismatch(q.spec(), FieldSpec::rationals()))?;
    if r.is_zero() {
        return Err(FieldError::ZeroInput);
    }
    let mut num = r.numer().abs();
    let mut den = r.denom().clone();
    let mut exponents = BTreeMap::new();
    for &p in known {
        let bp = BigInt::from(p);
        let mut e = 0i64;
        while (&num % &bp).is_zero() {
            num /= &bp;
            e += 1;
        }
        while (&den % &bp).is_zero() {
            den /= &bp;
            e -= 1;
        }
        exponents.insert(p, e);
    }
    let sign = if r.is_negative() { -1 } else { 1 };
    Ok((exponents, sign, num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> FieldElement {
        FieldElement::parse(FieldSpec::rationals(), s).unwrap()
    }

    #[test]
    fn field_names() {
        for (s, want) in [("Q", None), ("gf(5)", Some(5)), ("GF7", Some(7)), ("Fp:3", Some(3)), ("2", Some(2))] {
            assert_eq!(s.parse::<FieldSpec>().unwrap().modulus(), want, "{s}");
        }
        assert_eq!("GF(6)".parse::<FieldSpec>(), Err(FieldError::NotPrime(6)));
        assert!(matches!("R".parse::<FieldSpec>(), Err(FieldError::ParseField(_))));
    }

    fn gf(p: u64, v: i64) -> FieldElement {
        FieldElement::from_int(FieldSpec::prime(p).unwrap(), v)
    }

    #[test]
    fn spec_examples() {
        assert_eq!(&q("2/3") * &q("3/2"), q("1"));
        assert_eq!(&q("1/2") + &q("1/3"), q("5/6"));
        // brute force: the x with 4x ≡ 1 (mod 7)
        let brute = (0..7).find(|x| (4 * x) % 7 == 1).unwrap();
        assert_eq!(brute, 2);
        assert_eq!(gf(7, 4).inv().unwrap(), gf(7, brute));
    }

    #[test]
    fn normalization() {
        assert_eq!(q("6/-4").to_string(), "-3/2");
        assert_eq!(q(" 10 / 5 ").to_string(), "2");
        assert_eq!(gf(7, -1).residue(), Some(6));
        assert_eq!(FieldElement::parse(FieldSpec::prime(7).unwrap(), "1/3").unwrap(), gf(7, 5));
    }

    #[test]
    fn errors() {
        assert_eq!(q("0").inv(), Err(FieldError::DivisionByZero));
        assert!(matches!(q("1").try_add(&gf(5, 1)), Err(FieldError::FieldMismatch(..))));
        assert!(matches!(FieldSpec::prime(9), Err(FieldError::NotPrime(9))));
        assert!(matches!(FieldSpec::prime(1 << 31), Err(FieldError::ModulusTooLarge(_))));
        assert!(matches!(FieldElement::parse(FieldSpec::rationals(), "x"), Err(FieldError::Parse(_))));
        assert_eq!(FieldElement::parse(FieldSpec::rationals(), "1/0"), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn char_two_field() {
        let f2 = FieldSpec::prime(2).unwrap();
        let one = FieldElement::one(f2);
        assert!((&one + &one).is_zero());
        assert_eq!(-&one, one);
    }

    #[test]
    fn factor_examples() {
        let f = factor_rational(&q("8/9")).unwrap();
        assert_eq!(f.sign, 1);
        assert_eq!(f.exponents, BTreeMap::from([(2, 3), (3, -2)]));
        let f = factor_rational(&q("1")).unwrap();
        assert_eq!((f.sign, f.exponents.len()), (1, 0));
        let f = factor_rational(&q("-2")).unwrap();
        assert_eq!((f.sign, f.exponents), (-1, BTreeMap::from([(2, 1)])));
        assert_eq!(factor_rational(&q("0")), Err(FieldError::ZeroInput));
        assert!(matches!(factor_rational(&q("1000000000001")), Err(FieldError::OutOfRange(_))));
    }

    #[test]
    fn pow_matches_repeated_product() {
        let x = q("-3/2");
        let mut acc = q("1");
        for e in 0..6 {
            assert_eq!(x.pow(e).unwrap(), acc);
            assert_eq!(x.pow(-e).unwrap(), acc.inv().unwrap());
            acc = &acc * &x;
        }
        assert_eq!(gf(11, 2).pow(10).unwrap(), gf(11, 1));
    }

    fn rational() -> impl Strategy<Value = FieldElement> {
        (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| FieldElement::from_ratio(FieldSpec::rationals(), n, d).unwrap())
    }

    fn residue() -> impl Strategy<Value = FieldElement> {
        (0i64..101).prop_map(|v| gf(101, v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn rational_field_axioms(a in rational(), b in rational(), c in rational()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            if !a.is_zero() {
                prop_assert_eq!(a.inv().unwrap().inv().unwrap(), a.clone());
            }
        }

        #[test]
        fn prime_field_axioms(a in residue(), b in residue(), c in residue()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !a.is_zero() {
                prop_assert_eq!(a.inv().unwrap().inv().unwrap(), a.clone());
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn factorization_round_trips(n in -1_000_000i64..=1_000_000, d in 1i64..=1_000_000) {
            prop_assume!(n != 0);
            let x = FieldElement::from_ratio(FieldSpec::rationals(), n, d).unwrap();
            let f = factor_rational(&x).unwrap();
            prop_assert!(f.exponents.values().all(|&e| e != 0));
            prop_assert_eq!(&f.reconstruct(), x.as_rational().unwrap());
        }
    }
}
