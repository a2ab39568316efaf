//! Monomials of fixed degree and their ranking in graded lexicographic order.

use std::sync::OnceLock;

const TABLE: usize = 160;

fn table() -> &'static Vec<Vec<u64>> {
    static T: OnceLock<Vec<Vec<u64>>> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = vec![vec![0u64; TABLE]; TABLE];
        for n in 0..TABLE {
            t[n][0] = 1;
            for k in 1..=n {
                t[n][k] = t[n - 1][k - 1].saturating_add(t[n - 1][k]);
            }
        }
        t
    })
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    if n < TABLE {
        return table()[n][k];
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Number of monomials of degree `d` in `nvars` variables.
pub fn count_monomials(nvars: usize, d: usize) -> usize {
    if nvars == 0 {
        return usize::from(d == 0);
    }
    binomial(d + nvars - 1, nvars - 1) as usize
}

/// All exponent vectors of total degree `d`, ordered lexicographically from `x1^d` down.
pub fn homogeneous_monomials(nvars: usize, d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity(count_monomials(nvars, d));
    if nvars == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0u32; nvars];
    fill(&mut out, &mut cur, 0, d as u32);
    out
}

fn fill(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, i: usize, rem: u32) {
    if i + 1 == cur.len() {
        cur[i] = rem;
        out.push(cur.clone());
        return;
    }
    for v in (0..=rem).rev() {
        cur[i] = v;
        fill(out, cur, i + 1, rem - v);
    }
    cur[i] = 0;
}

/// Position of `e` inside `homogeneous_monomials(e.len(), |e|)`.
pub fn monomial_rank(e: &[u32]) -> usize {
    let n = e.len();
    let mut rem: usize = e.iter().map(|&x| x as usize).sum();
    let mut idx = 0usize;
    for i in 0..n.saturating_sub(1) {
        let ei = e[i] as usize;
        if rem > ei {
            // monomials whose i-th exponent is larger than e[i]
            idx += count_monomials(n - i, rem - ei - 1);
        }
        rem -= ei;
    }
    idx
}

pub fn degree(e: &[u32]) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lists() {
        assert_eq!(homogeneous_monomials(2, 0), vec![vec![0, 0]]);
        assert_eq!(
            homogeneous_monomials(2, 3),
            vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]]
        );
        assert_eq!(homogeneous_monomials(5, 5).len(), 126);
        assert_eq!(homogeneous_monomials(0, 0).len(), 1);
        assert!(homogeneous_monomials(0, 2).is_empty());
    }

    #[test]
    fn rank_inverts_enumeration() {
        for n in 1..6 {
            for d in 0..7 {
                for (i, m) in homogeneous_monomials(n, d).iter().enumerate() {
                    assert_eq!(monomial_rank(m), i);
                }
            }
        }
    }
}
