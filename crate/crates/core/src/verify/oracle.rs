//! Brute-force normal closures in a fully enumerated `GL(n, F_p)`.

use std::collections::VecDeque;

use crate::field::{FieldElement, FieldSpec};
use crate::matrices::DenseMatrix;

use super::VerifyError;

/// Largest ambient group the oracle will enumerate.
pub const MAX_AMBIENT_ORDER: u64 = 20_000;

/// `|GL(n, F_p)| = ∏_{i<n} (pⁿ − pⁱ)`.
pub fn gl_order(n: usize, p: u64) -> u64 {
    let pn = p.saturating_pow(n as u32);
    (0..n as u32).fold(1u64, |acc, i| acc.saturating_mul(pn - p.pow(i)))
}

/// `GL(n, F_p)` with elements indexed `0..order`; index 0 is the identity.
pub struct SmallGl {
    n: usize,
    p: u64,
    /// Row-major entries of each element.
    entries: Vec<Vec<u8>>,
    /// Matrix code (base-p digits of the entries) to element index.
    index: Vec<u32>,
    inverse: Vec<u32>,
    /// Transvections `E + e_{ij}` and `diag(r, 1, …)` for a primitive root `r`.
    generators: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl SmallGl {
    pub fn new(n: usize, p: u64) -> Result<Self, VerifyError> {
        FieldSpec::prime(p)?;
        let order = gl_order(n, p);
        if n == 0 || order > MAX_AMBIENT_ORDER {
            return Err(VerifyError::AmbientTooLarge { n, p, order });
        }
        let codes = (p as usize).pow((n * n) as u32);
        let mut index = vec![ABSENT; codes];
        let mut entries = Vec::with_capacity(order as usize);
        let identity: Vec<u8> = (0..n * n).map(|k| u8::from(k / n == k % n)).collect();
        entries.push(identity.clone());
        for code in 0..codes {
            let m = decode(code, n * n, p);
            if m != identity && det_mod(&m, n, p) != 0 {
                entries.push(m);
            }
        }
        for (k, m) in entries.iter().enumerate() {
            index[encode(m, p)] = k as u32;
        }
        debug_assert_eq!(entries.len() as u64, order);
        let mut g = SmallGl { n, p, entries, index, inverse: Vec::new(), generators: Vec::new() };
        g.inverse = (0..g.order()).map(|a| g.find_inverse(a)).collect();

        let root = (1..p).find(|&r| (1..p - 1).all(|k| pow_mod(r, k, p) != 1)).unwrap_or(1);
        let mut gens = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let mut m = g.entries[0].clone();
                    m[i * n + j] = 1;
                    gens.push(g.lookup(&m));
                }
            }
        }
        if root != 1 {
            let mut m = g.entries[0].clone();
            m[0] = root as u8;
            gens.push(g.lookup(&m));
        }
        g.generators = gens;
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn order(&self) -> u32 {
        self.entries.len() as u32
    }

    pub fn entries(&self, a: u32) -> &[u8] {
        &self.entries[a as usize]
    }

    fn lookup(&self, m: &[u8]) -> u32 {
        self.index[encode(m, self.p)]
    }

    /// Index of an invertible matrix given by its entries mod `p`.
    pub fn index_of(&self, m: &[u8]) -> Option<u32> {
        (m.len() == self.n * self.n && m.iter().all(|&x| (x as u64) < self.p))
            .then(|| self.lookup(m))
            .filter(|&k| k != ABSENT)
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let (n, p) = (self.n, self.p as u32);
        let (x, y) = (&self.entries[a as usize], &self.entries[b as usize]);
        let mut code = 0usize;
        let mut place = 1usize;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0u32;
                for k in 0..n {
                    s += x[i * n + k] as u32 * y[k * n + j] as u32;
                }
                code += (s % p) as usize * place;
                place *= p as usize;
            }
        }
        self.index[code]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    fn find_inverse(&self, a: u32) -> u32 {
        let mut power = a;
        let mut prev = 0;
        while power != 0 {
            prev = power;
            power = self.mul(power, a);
        }
        prev
    }

    pub fn conjugate(&self, x: u32, by: u32) -> u32 {
        self.mul(self.mul(self.inv(by), x), by)
    }

    pub fn is_special(&self, a: u32) -> bool {
        det_mod(&self.entries[a as usize], self.n, self.p) == 1
    }

    /// Conjugacy class of `a`, by orbit search under the ambient generators.
    pub fn class(&self, a: u32) -> Vec<u32> {
        let mut seen = vec![false; self.order() as usize];
        seen[a as usize] = true;
        let mut out = vec![a];
        let mut queue = VecDeque::from([a]);
        while let Some(x) = queue.pop_front() {
            for &g in &self.generators {
                let y = self.conjugate(x, g);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out
    }

    /// Membership mask of the normal closure of `gens`.
    ///
    /// The conjugation-closed set is accumulated first; the subgroup it
    /// generates is grown one new generator at a time, and a final pass
    /// confirms closure under products and conjugation.
    pub fn normal_closure(&self, gens: &[u32]) -> Vec<bool> {
        let size = self.order() as usize;
        let mut in_class = vec![false; size];
        let mut class = Vec::new();
        for &g in gens {
            if !in_class[g as usize] {
                for c in self.class(g) {
                    if !in_class[c as usize] {
                        in_class[c as usize] = true;
                        class.push(c);
                    }
                }
            }
        }
        let mut member = vec![false; size];
        member[0] = true;
        let mut used: Vec<u32> = Vec::new();
        for &c in &class {
            if member[c as usize] {
                continue;
            }
            used.push(c);
            let mut elements: Vec<u32> = (0..size as u32).filter(|&k| member[k as usize]).collect();
            let mut frontier = 0;
            while frontier < elements.len() {
                let x = elements[frontier];
                frontier += 1;
                for &s in &used {
                    let y = self.mul(x, s);
                    if !member[y as usize] {
                        member[y as usize] = true;
                        elements.push(y);
                    }
                }
            }
        }
        for x in (0..size as u32).filter(|&k| member[k as usize]) {
            let closed = used.iter().all(|&s| member[self.mul(x, s) as usize]) && self.generators.iter().all(|&g| member[self.conjugate(x, g) as usize]);
            assert!(closed, "closure oracle failed its self-check");
        }
        member
    }

    pub fn to_dense(&self, a: u32) -> DenseMatrix {
        let spec = FieldSpec::prime(self.p).expect("prime");
        let n = self.n;
        let rows = (0..n).map(|i| (0..n).map(|j| FieldElement::from_int(spec, self.entries[a as usize][i * n + j] as i64)).collect()).collect();
        DenseMatrix::from_rows(spec, rows).expect("square")
    }

    pub fn from_dense(&self, m: &DenseMatrix) -> Option<u32> {
        if m.rows() != self.n || m.cols() != self.n || m.spec().modulus() != Some(self.p) {
            return None;
        }
        let entries: Vec<u8> = (0..self.n * self.n).map(|k| m.get(k / self.n, k % self.n).residue().expect("prime field") as u8).collect();
        self.index_of(&entries)
    }
}

fn decode(mut code: usize, len: usize, p: u64) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((code % p as usize) as u8);
        code /= p as usize;
    }
    out
}

fn encode(m: &[u8], p: u64) -> usize {
    m.iter().rev().fold(0usize, |acc, &x| acc * p as usize + x as usize)
}

fn pow_mod(b: u64, e: u64, p: u64) -> u64 {
    (0..e).fold(1, |acc, _| acc * b % p)
}

fn det_mod(m: &[u8], n: usize, p: u64) -> u64 {
    let mut a: Vec<u64> = m.iter().map(|&x| x as u64).collect();
    let mut det = 1u64;
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| a[r * n + c] != 0) else {
            return 0;
        };
        if r != c {
            for k in 0..n {
                a.swap(r * n + k, c * n + k);
            }
            det = (p - det) % p;
        }
        let pivot = a[c * n + c];
        det = det * pivot % p;
        let inv = pow_mod(pivot, p - 2, p);
        for r in c + 1..n {
            let f = a[r * n + c] * inv % p;
            if f != 0 {
                for k in c..n {
                    a[r * n + k] = (a[r * n + k] + p * p - f * a[c * n + k] % p) % p;
                }
            }
        }
    }
    det
}

/// The normal closure of `gens` in `GL(n, F_p)` as an explicit element list.
pub fn brute_force_closure(n: usize, p: u64, gens: &[DenseMatrix]) -> Result<Vec<DenseMatrix>, VerifyError> {
    let group = SmallGl::new(n, p)?;
    let mut idx = Vec::with_capacity(gens.len());
    for g in gens {
        idx.push(group.from_dense(g).ok_or_else(|| VerifyError::Unsupported(format!("{g:?} is not an invertible {n}×{n} matrix over GF({p})")))?);
    }
    let member = group.normal_closure(&idx);
    Ok((0..group.order()).filter(|&k| member[k as usize]).map(|k| group.to_dense(k)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(gl_order(3, 2), 168);
        assert_eq!(gl_order(3, 3), 11232);
        assert_eq!(gl_order(2, 5), 480);
        assert!(matches!(SmallGl::new(4, 2), Err(VerifyError::AmbientTooLarge { order: 20160, .. })));
        let g = SmallGl::new(2, 3).unwrap();
        assert_eq!(g.order(), 48);
        assert_eq!((0..g.order()).filter(|&a| g.is_special(a)).count(), 24);
        for a in 0..g.order() {
            assert_eq!(g.mul(a, g.inv(a)), 0);
        }
    }

    #[test]
    fn closure_examples() {
        let f2 = FieldSpec::prime(2).unwrap();
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(brute_force_closure(3, 2, &[DenseMatrix::identity(f2, 3)]).unwrap().len(), 1);
        let t = DenseMatrix::from_ints(f2, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(brute_force_closure(3, 2, &[t]).unwrap().len(), 168);
        let two = DenseMatrix::identity(f3, 3).scale(&FieldElement::from_int(f3, 2));
        assert_eq!(brute_force_closure(3, 3, &[two]).unwrap().len(), 2);
        let d = DenseMatrix::diagonal(f3, &[FieldElement::from_int(f3, 2), FieldElement::one(f3), FieldElement::one(f3)]);
        assert_eq!(brute_force_closure(3, 3, &[d]).unwrap().len(), 11232);
    }

    #[test]
    fn classes_partition_the_group() {
        let g = SmallGl::new(3, 2).unwrap();
        let mut seen = [false; 168];
        let mut sizes = Vec::new();
        for a in 0..168 {
            if !seen[a as usize] {
                let c = g.class(a);
                for &x in &c {
                    seen[x as usize] = true;
                }
                sizes.push(c.len());
            }
        }
        sizes.sort();
        // GL(3,2) = PSL(2,7) has class sizes 1, 21, 24, 24, 42, 56
        assert_eq!(sizes, vec![1, 21, 24, 24, 42, 56]);
    }
}
