//! Linear algebra modulo word-sized primes, with Chinese remaindering and
//! rational reconstruction for lifting results back to the rationals.

use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::Rational;

/// Prime below 2^31 with a precomputed Barrett constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prime {
    pub p: u64,
    m: u128,
}

impl Prime {
    pub fn new(p: u64) -> Self {
        assert!(p > 2 && p < (1 << 31));
        Prime { p, m: (1u128 << 64) / p as u128 }
    }

    #[inline(always)]
    pub fn reduce(&self, x: u64) -> u64 {
        let q = ((x as u128 * self.m) >> 64) as u64;
        let mut r = x - q * self.p;
        if r >= self.p {
            r -= self.p;
        }
        r
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }

    pub fn from_i64(&self, v: i64) -> u64 {
        let r = v.rem_euclid(self.p as i64);
        r as u64
    }

    pub fn from_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.p as i128) as u64
    }

    pub fn from_bigint(&self, v: &BigInt) -> u64 {
        if let Some(s) = v.to_i64() {
            return self.from_i64(s);
        }
        let r = v.mod_floor(&BigInt::from(self.p));
        r.to_u64().unwrap()
    }

    pub fn from_rational(&self, v: &Rational) -> Option<u64> {
        let d = self.from_bigint(v.denom());
        if d == 0 {
            return None;
        }
        Some(self.mul(self.from_bigint(v.numer()), self.inv(d)))
    }
}

fn is_prime(n: u64) -> bool {
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

/// Fixed list of distinct primes just below 2^31, largest first.
pub fn primes() -> &'static [Prime] {
    static P: OnceLock<Vec<Prime>> = OnceLock::new();
    P.get_or_init(|| {
        let mut out = Vec::new();
        let mut n: u64 = (1 << 31) - 1;
        while out.len() < 96 {
            if is_prime(n) {
                out.push(Prime::new(n));
            }
            n -= 2;
        }
        out
    })
}

/// Dense matrix over Z/p, row-major.
#[derive(Clone, Debug)]
pub struct ModMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

/// Output of Gauss-Jordan elimination mod p.
#[derive(Clone, Debug)]
pub struct ModRref {
    pub prime: Prime,
    pub cols: usize,
    pub pivots: Vec<usize>,
    /// Reduced rows (one per pivot), each of length `cols`.
    pub rows: Vec<Vec<u64>>,
}

impl ModMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ModMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    #[inline]
    pub fn at(&mut self, i: usize, j: usize) -> &mut u64 {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Full reduced row echelon form.
    pub fn rref(self, pr: Prime) -> ModRref {
        let ModMatrix { rows, cols, data } = self;
        let mut m: Vec<Vec<u64>> = data.chunks(cols.max(1)).take(rows).map(|c| c.to_vec()).collect();
        if cols == 0 {
            m.clear();
        }
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == m.len() {
                break;
            }
            let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
                continue;
            };
            m.swap(r, p);
            let inv = pr.inv(m[r][c]);
            for v in m[r][c..].iter_mut() {
                *v = pr.mul(*v, inv);
            }
            let (before, rest) = m.split_at_mut(r);
            let (prow, after) = rest.split_first_mut().unwrap();
            for row in before.iter_mut().chain(after.iter_mut()) {
                let f = row[c];
                if f == 0 {
                    continue;
                }
                let nf = pr.neg(f);
                eliminate(pr, &mut row[c..], &prow[c..], nf);
            }
            pivots.push(c);
            r += 1;
        }
        m.truncate(r);
        ModRref { prime: pr, cols, pivots, rows: m }
    }

    /// Rank only (row echelon, no back substitution).
    pub fn rank(self, pr: Prime) -> usize {
        let ModMatrix { rows, cols, data } = self;
        if cols == 0 {
            return 0;
        }
        let mut m: Vec<Vec<u64>> = data.chunks(cols).take(rows).map(|c| c.to_vec()).collect();
        let mut r = 0;
        for c in 0..cols {
            if r == m.len() {
                break;
            }
            let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
                continue;
            };
            m.swap(r, p);
            let inv = pr.inv(m[r][c]);
            for v in m[r][c..].iter_mut() {
                *v = pr.mul(*v, inv);
            }
            let (head, tail) = m.split_at_mut(r + 1);
            let prow = &head[r];
            for row in tail.iter_mut() {
                let f = row[c];
                if f != 0 {
                    eliminate(pr, &mut row[c..], &prow[c..], pr.neg(f));
                }
            }
            r += 1;
        }
        r
    }
}

#[inline]
fn eliminate(pr: Prime, row: &mut [u64], prow: &[u64], nf: u64) {
    for (x, &y) in row.iter_mut().zip(prow) {
        if y != 0 {
            *x = pr.reduce(*x + nf * y);
        }
    }
}

impl ModRref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Kernel vector attached to free column `f` (1 at `f`, zero at other free columns).
    pub fn kernel_vector(&self, f: usize) -> Vec<u64> {
        let mut v = vec![0; self.cols];
        v[f] = 1;
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            v[p] = self.prime.neg(row[f]);
        }
        v
    }
}

/// Incrementally maintained echelon basis of a subspace of (Z/p)^n.
#[derive(Clone, Debug)]
pub struct ModEchelon {
    pub prime: Prime,
    pub cols: usize,
    rows: Vec<(usize, Vec<u64>)>,
}

impl ModEchelon {
    pub fn new(prime: Prime, cols: usize) -> Self {
        ModEchelon { prime, cols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &mut [u64]) -> Option<usize> {
        let pr = self.prime;
        for (pc, row) in &self.rows {
            let f = v[*pc];
            if f != 0 {
                eliminate(pr, &mut v[*pc..], &row[*pc..], pr.neg(f));
            }
        }
        v.iter().position(|&x| x != 0)
    }

    /// Adds `v` if it is independent of the current rows; returns whether it was.
    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        assert_eq!(v.len(), self.cols);
        match self.reduce(&mut v) {
            None => false,
            Some(pc) => {
                let inv = self.prime.inv(v[pc]);
                for x in v[pc..].iter_mut() {
                    *x = self.prime.mul(*x, inv);
                }
                let pos = self.rows.partition_point(|(c, _)| *c < pc);
                self.rows.insert(pos, (pc, v));
                true
            }
        }
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w).is_none()
    }
}

/// Combines residues modulo distinct primes into a balanced representative.
pub fn crt(residues: &[u64], ps: &[Prime]) -> (BigInt, BigInt) {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (&r, pr) in residues.iter().zip(ps) {
        let p = BigInt::from(pr.p);
        // x + m*t = r (mod p)
        let xm = pr.from_bigint(&x);
        let mm = pr.from_bigint(&m);
        let t = pr.mul(pr.add(r, pr.neg(xm)), pr.inv(mm));
        x += &m * BigInt::from(t);
        m *= p;
    }
    (x, m)
}

/// Finds `a/b` with `a = b*x (mod m)` and `|a|, b <= sqrt(m/2)`.
pub fn rational_reconstruct(x: &BigInt, m: &BigInt) -> Option<Rational> {
    let x = x.mod_floor(m);
    if x.is_zero() {
        return Some(Rational::zero());
    }
    let bound = (m >> 1u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), x);
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if !r1.gcd(&t1).is_one() {
        return None;
    }
    let (num, den) = if t1.sign() == Sign::Minus { (-r1, -t1) } else { (r1, t1) };
    Some(Rational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn reconstruct_roundtrip() {
        let ps = &primes()[..3];
        for (n, d) in [(3i64, 7i64), (-22, 5), (0, 1), (123456, 789)] {
            let q = ratio(n, d);
            let res: Vec<u64> = ps.iter().map(|p| p.from_rational(&q).unwrap()).collect();
            let (x, m) = crt(&res, ps);
            assert_eq!(rational_reconstruct(&x, &m), Some(q));
        }
    }

    #[test]
    fn rref_rank() {
        let pr = primes()[0];
        let mut m = ModMatrix::zeros(3, 3);
        let vals = [[1, 2, 3], [2, 4, 6], [0, 1, 1]];
        for (i, r) in vals.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                *m.at(i, j) = v;
            }
        }
        assert_eq!(m.clone().rank(pr), 2);
        let rr = m.rref(pr);
        assert_eq!(rr.pivots, vec![0, 1]);
        assert_eq!(rr.free_columns(), vec![2]);
    }

    #[test]
    fn echelon_insert() {
        let pr = primes()[1];
        let mut e = ModEchelon::new(pr, 3);
        assert!(e.insert(vec![0, 1, 2]));
        assert!(e.insert(vec![1, 0, 0]));
        assert!(!e.insert(vec![2, 3, 6]));
        assert!(e.contains(&[1, 1, 2]));
    }
}
