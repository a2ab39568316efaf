//! Univariate integer polynomials in `t`, used for characteristic polynomials.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Coefficients from the constant term upwards; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UPoly {
    coeffs: Vec<BigInt>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> UPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> UPoly {
        UPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> UPoly {
        UPoly { coeffs: Vec::new() }
    }

    pub fn one() -> UPoly {
        UPoly::from_i64(&[1])
    }

    /// `t - a`.
    pub fn linear_root(a: i64) -> UPoly {
        UPoly::from_i64(&[-a, 1])
    }

    /// `∏ (t - r)` over `roots`.
    pub fn from_roots(roots: &[i64]) -> UPoly {
        roots.iter().fold(UPoly::one(), |acc, &r| &acc * &UPoly::linear_root(r))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `t^i`.
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeffs_i64(&self) -> Vec<i64> {
        self.coeffs.iter().map(|c| c.to_i64().expect("coefficient fits in i64")).collect()
    }

    pub fn eval(&self, t: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Quotient and remainder by a monic-or-not divisor, if the division stays integral.
    pub fn div_rem(&self, d: &UPoly) -> Option<(UPoly, UPoly)> {
        let dd = d.degree()?;
        let lead = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Some((UPoly::zero(), self.clone()));
        }
        let mut q = vec![BigInt::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let (qi, r) = rem[i].div_rem(&lead);
            if !r.is_zero() {
                return None;
            }
            for (k, c) in d.coeffs.iter().enumerate() {
                rem[i - dd + k] -= &qi * c;
            }
            q[i - dd] = qi;
        }
        Some((UPoly::new(q), UPoly::new(rem)))
    }

    pub fn div_exact(&self, d: &UPoly) -> Option<UPoly> {
        let (q, r) = self.div_rem(d)?;
        r.is_zero().then_some(q)
    }

    /// Divisibility over Q (content-free comparison).
    pub fn divides(&self, other: &UPoly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        let lead = self.coeffs.last().unwrap().abs();
        let scale = UPoly::new(vec![num_traits::pow(lead, other.coeffs.len().max(1))]);
        (&scale * other).div_exact(self).is_some()
    }

    /// Integer roots, found among divisors of the lowest nonzero coefficient (plus 0).
    pub fn integer_roots(&self) -> Vec<BigInt> {
        let mut out = Vec::new();
        let Some(k) = self.coeffs.iter().position(|c| !c.is_zero()) else {
            return out;
        };
        if k > 0 {
            out.push(BigInt::zero());
        }
        let c0 = self.coeffs[k].abs();
        for d in divisors(&c0) {
            for r in [d.clone(), -d] {
                if self.eval(&r).is_zero() {
                    out.push(r);
                }
            }
        }
        out.sort();
        out
    }

    /// Irreducibility over Z for primitive polynomials of degree at most 3; `None` above that.
    pub fn is_irreducible(&self) -> Option<bool> {
        let deg = self.degree()?;
        let content = self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if deg == 0 {
            return Some(false);
        }
        if !content.is_one() {
            return Some(false);
        }
        match deg {
            1 => Some(true),
            2 => {
                let (c, b, a) = (&self.coeffs[0], &self.coeffs[1], &self.coeffs[2]);
                let disc: BigInt = b * b - BigInt::from(4) * a * c;
                if disc.is_negative() {
                    return Some(true);
                }
                let s = disc.sqrt();
                Some(&s * &s != disc)
            }
            3 => Some(!self.has_rational_root()),
            _ => None,
        }
    }

    fn has_rational_root(&self) -> bool {
        let lead = self.coeffs.last().unwrap().abs();
        let Some(k) = self.coeffs.iter().position(|c| !c.is_zero()) else {
            return true;
        };
        if k > 0 {
            return true;
        }
        let c0 = self.coeffs[0].abs();
        for p in divisors(&c0) {
            for q in divisors(&lead) {
                for num in [p.clone(), -p.clone()] {
                    // q^deg f(p/q)
                    let mut acc = BigInt::zero();
                    let deg = self.coeffs.len() - 1;
                    for (i, c) in self.coeffs.iter().enumerate() {
                        acc += c * num_traits::pow(num.clone(), i) * num_traits::pow(q.clone(), deg - i);
                    }
                    if acc.is_zero() {
                        return true;
                    }
                }
            }
        }
        false
    }

    pub fn format(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if mono.is_empty() {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{a}*{mono}"));
            }
        }
        s
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let e = &n / &d;
            if e != d {
                out.push(e);
            }
        }
        d += 1;
    }
    out
}

impl std::ops::Mul for &UPoly {
    type Output = UPoly;
    fn mul(self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UPoly::new(c)
    }
}

impl std::ops::Add for &UPoly {
    type Output = UPoly;
    fn add(self, o: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl std::ops::Sub for &UPoly {
    type Output = UPoly;
    fn sub(self, o: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format("t"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_and_division() {
        let p = UPoly::from_roots(&[1, 2, 3]);
        assert_eq!(p.coeffs_i64(), vec![-6, 11, -6, 1]);
        let q = p.div_exact(&UPoly::linear_root(1)).unwrap();
        assert_eq!(q, UPoly::from_roots(&[2, 3]));
        assert!(UPoly::linear_root(2).divides(&p));
        assert!(!UPoly::linear_root(4).divides(&p));
        assert_eq!(p.integer_roots(), vec![BigInt::from(1), BigInt::from(2), BigInt::from(3)]);
    }

    #[test]
    fn irreducibility() {
        assert_eq!(UPoly::from_i64(&[3, -3, 1]).is_irreducible(), Some(true));
        assert_eq!(UPoly::from_i64(&[26, -10, 1]).is_irreducible(), Some(true));
        assert_eq!(UPoly::from_roots(&[2, 2]).is_irreducible(), Some(false));
        assert_eq!(UPoly::from_i64(&[-2, 0, 0, 1]).is_irreducible(), Some(true));
        assert_eq!(UPoly::from_i64(&[1, 0, 0, 8]).is_irreducible(), Some(false));
    }

    #[test]
    fn display() {
        assert_eq!(UPoly::from_i64(&[26, -10, 1]).to_string(), "t^2 - 10*t + 26");
    }
}
