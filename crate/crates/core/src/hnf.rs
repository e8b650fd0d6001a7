//! Row-style Hermite normal form over ℤ with a tracked unimodular transform.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone)]
pub(crate) struct Hnf {
    /// Nonzero rows in echelon form; pivots positive, entries above a pivot in `[0, pivot)`.
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
    /// `transform[k]` expresses `rows[k]` as an integer combination of the input rows.
    pub transform: Vec<Vec<BigInt>>,
}

fn axpy(dst: &mut [BigInt], q: &BigInt, src: &[BigInt]) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

pub(crate) fn hermite(input: &[Vec<BigInt>], ncols: usize) -> Hnf {
    let m = input.len();
    let mut a: Vec<Vec<BigInt>> = input.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..m)
        .map(|i| (0..m).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect();
    let mut pr = 0;
    let mut pivots = Vec::new();
    for c in 0..ncols {
        if pr == m {
            break;
        }
        loop {
            let best = (pr..m)
                .filter(|&r| !a[r][c].is_zero())
                .min_by(|&x, &y| a[x][c].abs().cmp(&a[y][c].abs()));
            let Some(best) = best else { break };
            a.swap(pr, best);
            u.swap(pr, best);
            let mut done = true;
            for r in pr + 1..m {
                if a[r][c].is_zero() {
                    continue;
                }
                let q = a[r][c].div_floor(&a[pr][c]);
                let (top, rest) = a.split_at_mut(r);
                axpy(&mut rest[0], &q, &top[pr]);
                let (top, rest) = u.split_at_mut(r);
                axpy(&mut rest[0], &q, &top[pr]);
                if !a[r][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[pr][c].is_zero() {
            continue;
        }
        if a[pr][c].is_negative() {
            for x in a[pr].iter_mut().chain(u[pr].iter_mut()) {
                *x = -&*x;
            }
        }
        for r in 0..pr {
            let q = a[r][c].div_floor(&a[pr][c]);
            if q.is_zero() {
                continue;
            }
            let (top, rest) = a.split_at_mut(pr);
            axpy(&mut top[r], &q, &rest[0]);
            let (top, rest) = u.split_at_mut(pr);
            axpy(&mut top[r], &q, &rest[0]);
        }
        pivots.push(c);
        pr += 1;
    }
    a.truncate(pr);
    u.truncate(pr);
    Hnf { rows: a, pivots, transform: u }
}

impl Hnf {
    /// Integer coefficients `y` over the HNF rows with `y · rows = x`, if any.
    pub fn solve(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut residual = x.to_vec();
        let mut y = Vec::with_capacity(self.rows.len());
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let (q, r) = residual[c].div_rem(&row[c]);
            if !r.is_zero() {
                return None;
            }
            axpy(&mut residual, &q, row);
            y.push(q);
        }
        residual.iter().all(Zero::is_zero).then_some(y)
    }

    /// Coefficients over the original input rows for a solution of `solve`.
    pub fn lift(&self, y: &[BigInt]) -> Vec<BigInt> {
        let m = self.transform.first().map_or(0, Vec::len);
        let mut out = vec![BigInt::zero(); m];
        for (yk, uk) in y.iter().zip(&self.transform) {
            for (o, v) in out.iter_mut().zip(uk) {
                *o += yk * v;
            }
        }
        out
    }
}
