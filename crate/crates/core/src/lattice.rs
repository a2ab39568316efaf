//! Intersection lattice, Möbius function and characteristic polynomial.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::arrangement::{Arrangement, Flat, LinearForm};
use crate::error::{ArrError, Result};
use crate::upoly::UPoly;

/// Set of hyperplane indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Vec<u64>);

impl Bits {
    pub fn empty(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, &w) in self.0.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(k * 64 + b);
                w &= w - 1;
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct LatticeFlat {
    pub flat: Flat,
    /// Hyperplanes containing the flat.
    pub members: Bits,
    pub mobius: i64,
}

/// Flats grouped by codimension; level 0 is the ambient space.
#[derive(Clone, Debug)]
pub struct IntersectionLattice {
    pub dim: usize,
    pub n: usize,
    pub levels: Vec<Vec<LatticeFlat>>,
}

impl IntersectionLattice {
    pub fn build(a: &Arrangement) -> IntersectionLattice {
        let n = a.len();
        let dim = a.dim();
        let forms = a.forms();
        let top = LatticeFlat { flat: Flat::whole(dim), members: Bits::empty(n), mobius: 1 };
        let mut levels = vec![vec![top]];
        loop {
            let prev = levels.last().unwrap();
            let mut next: Vec<LatticeFlat> = Vec::new();
            let mut index: HashMap<Bits, usize> = HashMap::new();
            for x in prev {
                let mut done = x.members.clone();
                for h in 0..n {
                    if done.contains(h) {
                        continue;
                    }
                    let y = x.flat.meet(&forms[h]);
                    let mut members = x.members.clone();
                    for (k, f) in forms.iter().enumerate() {
                        if !members.contains(k) && (k == h || y.contained_in(f)) {
                            members.insert(k);
                            done.insert(k);
                        }
                    }
                    if !index.contains_key(&members) {
                        index.insert(members.clone(), next.len());
                        next.push(LatticeFlat { flat: y, members, mobius: 0 });
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort_by(|p, q| p.members.indices().cmp(&q.members.indices()));
            levels.push(next);
        }
        let mut lat = IntersectionLattice { dim, n, levels };
        lat.compute_mobius();
        lat
    }

    fn compute_mobius(&mut self) {
        for k in 1..self.levels.len() {
            for i in 0..self.levels[k].len() {
                let m = &self.levels[k][i].members;
                let mut s = 0i64;
                for lower in &self.levels[..k] {
                    for y in lower {
                        if y.members.is_subset(m) {
                            s += y.mobius;
                        }
                    }
                }
                self.levels[k][i].mobius = -s;
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, codim: usize) -> &[LatticeFlat] {
        self.levels.get(codim).map_or(&[], |v| v.as_slice())
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|v| v.len()).collect()
    }

    pub fn flats(&self) -> impl Iterator<Item = (usize, &LatticeFlat)> {
        self.levels.iter().enumerate().flat_map(|(k, v)| v.iter().map(move |x| (k, x)))
    }

    pub fn char_poly(&self) -> UPoly {
        let mut c = vec![BigInt::zero(); self.dim + 1];
        for (k, x) in self.flats() {
            c[self.dim - k] += x.mobius;
        }
        UPoly::new(c)
    }

    /// Locate a flat; returns its codimension and index in that level.
    pub fn find(&self, f: &Flat) -> Option<(usize, usize)> {
        let k = f.codim();
        self.level(k).iter().position(|x| x.flat == *f).map(|i| (k, i))
    }
}

/// `χ(𝒜;t)` with the Betti-number view.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPoly {
    pub dim: usize,
    pub poly: UPoly,
}

impl CharPoly {
    pub fn of(a: &Arrangement) -> CharPoly {
        CharPoly { dim: a.dim(), poly: IntersectionLattice::build(a).char_poly() }
    }

    /// `b_i = (-1)^i [t^{ℓ-i}] χ`.
    pub fn betti(&self, i: usize) -> Result<BigInt> {
        if i > self.dim {
            return Err(ArrError::IndexError { index: i, max: self.dim });
        }
        Ok(self.poly.coeff(self.dim - i).abs())
    }

    pub fn bettis(&self) -> Vec<BigInt> {
        (0..=self.dim).map(|i| self.betti(i).unwrap()).collect()
    }

    pub fn reduced(&self) -> Result<UPoly> {
        if self.poly.degree() == Some(0) {
            return Err(ArrError::EmptyArrangement);
        }
        Ok(self.poly.div_exact(&UPoly::linear_root(1)).expect("t-1 divides the characteristic polynomial"))
    }

    /// Coefficients of `χ₀` read as Betti numbers: `b_i^0`.
    pub fn betti0(&self, i: usize) -> Result<BigInt> {
        let r = self.reduced()?;
        if i + 1 > self.dim {
            return Err(ArrError::IndexError { index: i, max: self.dim - 1 });
        }
        Ok(r.coeff(self.dim - 1 - i).abs())
    }

    /// `π(𝒜;t) = Σ b_i t^i`.
    pub fn poincare(&self) -> UPoly {
        UPoly::new(self.bettis())
    }
}

pub fn char_poly(a: &Arrangement) -> UPoly {
    CharPoly::of(a).poly
}

pub fn reduced_char_poly(a: &Arrangement) -> Result<UPoly> {
    if a.is_empty() {
        return Err(ArrError::EmptyArrangement);
    }
    CharPoly::of(a).reduced()
}

pub fn betti(a: &Arrangement, i: usize) -> Result<BigInt> {
    CharPoly::of(a).betti(i)
}

/// `b₂(𝒜) = Σ_{X ∈ L₂} (|𝒜_X| − 1)`, computed from the rank-2 flats only.
pub fn b2(a: &Arrangement) -> i64 {
    let forms = a.forms();
    let n = forms.len();
    let mut seen: HashMap<Bits, ()> = HashMap::new();
    let mut total = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            let x = Flat::whole(a.dim()).meet(&forms[i]).meet(&forms[j]);
            let mut members = Bits::empty(n);
            for (k, f) in forms.iter().enumerate() {
                if x.contained_in(f) {
                    members.insert(k);
                }
            }
            if seen.insert(members.clone(), ()).is_none() {
                total += members.len() as i64 - 1;
            }
        }
    }
    total
}

/// Reduced second Betti number `b₂(𝒜) − |𝒜| + 1`.
pub fn b2_zero(a: &Arrangement) -> i64 {
    b2(a) - a.len() as i64 + 1
}

pub fn poincare_poly(a: &Arrangement) -> UPoly {
    CharPoly::of(a).poincare()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeletionRestriction {
    pub holds: bool,
    pub chi: UPoly,
    pub chi_deleted: UPoly,
    pub chi_restricted: UPoly,
}

/// `χ(𝒜) = χ(𝒜') − χ(𝒜^H)`, with all three computed from their own lattices.
pub fn deletion_restriction_check(a: &Arrangement, h: &LinearForm) -> Result<DeletionRestriction> {
    let del = a.delete(h)?;
    let res = a.restriction(h)?;
    let chi = char_poly(a);
    let chi_deleted = char_poly(&del);
    let chi_restricted = char_poly(&res);
    let holds = chi == &chi_deleted - &chi_restricted;
    Ok(DeletionRestriction { holds, chi, chi_deleted, chi_restricted })
}

/// Rank-2 flats on `H` cut out by exactly two hyperplanes.
pub fn complete_intersection_flats_on(a: &Arrangement, h: &LinearForm) -> Result<Vec<Flat>> {
    let hi = a.index_of(h).ok_or_else(|| ArrError::NotMember(h.to_string()))?;
    let lat = IntersectionLattice::build(a);
    Ok(lat
        .level(2)
        .iter()
        .filter(|x| x.members.contains(hi) && x.members.len() == 2)
        .map(|x| x.flat.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_lattice() {
        let lat = IntersectionLattice::build(&Arrangement::boolean(3));
        assert_eq!(lat.level_sizes(), vec![1, 3, 3, 1]);
        assert_eq!(lat.level(3)[0].mobius, -1);
        assert_eq!(lat.char_poly(), UPoly::from_roots(&[1, 1, 1]));
    }

    #[test]
    fn xyz_sum() {
        let a = Arrangement::from_int_rows(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 1]]).unwrap();
        let cp = CharPoly::of(&a);
        assert_eq!(cp.reduced().unwrap(), UPoly::from_i64(&[3, -3, 1]));
        assert_eq!(cp.betti(2).unwrap(), BigInt::from(6));
        assert_eq!(b2_zero(&a), 3);
        let h = LinearForm::from_ints(&[1, 1, 1]).unwrap();
        assert_eq!(complete_intersection_flats_on(&a, &h).unwrap().len(), 3);
        assert!(deletion_restriction_check(&a, &h).unwrap().holds);
    }

    #[test]
    fn poincare_of_boolean2() {
        assert_eq!(poincare_poly(&Arrangement::boolean(2)), UPoly::from_i64(&[1, 2, 1]));
        assert_eq!(poincare_poly(&Arrangement::empty(3)), UPoly::one());
    }
}
