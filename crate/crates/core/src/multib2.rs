//! Second Betti numbers of multiarrangements and the b₂-type equalities.

use serde::{Deserialize, Serialize};

use crate::arrangement::{Arrangement, Flat, LinearForm, Multiarrangement};
use crate::derivation::{find_free_basis, FreeBasisOutcome, SaitoCertificate};
use crate::error::{ArrError, Result};
use crate::lattice::{b2, IntersectionLattice};

#[derive(Clone, Debug)]
pub struct Rank2Exponents {
    pub d1: u32,
    pub d2: u32,
    pub certificate: SaitoCertificate,
}

/// Exponents of a multiarrangement of essential rank 2, certified by Saito's criterion.
pub fn rank2_exponents(m: &Multiarrangement) -> Result<Rank2Exponents> {
    let (ess, _) = m.essentialize();
    if ess.dim() != 2 {
        return Err(ArrError::RankError(format!("essential rank is {}, expected 2", ess.dim())));
    }
    match find_free_basis(&ess, ess.total())? {
        FreeBasisOutcome::Free(cert) => {
            let mut d = cert.degrees.clone();
            d.sort_unstable();
            Ok(Rank2Exponents { d1: d[0], d2: d[1], certificate: cert })
        }
        other => Err(ArrError::Invalid(format!("rank-2 multiarrangement not certified free: {other:?}"))),
    }
}

/// Rank-2 flats of the underlying arrangement.
fn rank2_flats(a: &Arrangement) -> Vec<Flat> {
    IntersectionLattice::build(a).level(2).iter().map(|x| x.flat.clone()).collect()
}

/// `b₂(𝒜,m) = Σ_{X∈L₂} d₁^X d₂^X`.
pub fn b2_multi(m: &Multiarrangement) -> Result<i64> {
    let mut s = 0i64;
    for x in rank2_flats(&m.base) {
        let e = rank2_exponents(&m.localization(&x)?)?;
        s += e.d1 as i64 * e.d2 as i64;
    }
    Ok(s)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct B2Report {
    pub b2: i64,
    pub b2_restricted: i64,
    pub b2_multi: i64,
    pub b2_zero: i64,
    pub size: usize,
    pub restricted_size: usize,
    pub b2_equality: bool,
    pub upper: bool,
    pub lower: bool,
}

impl B2Report {
    /// `b₂⁰(𝒜) − b₂(𝒜^H,m^H)`, never negative.
    pub fn upper_gap(&self) -> i64 {
        self.b2_zero - self.b2_multi
    }

    /// `b₂(𝒜^H,m^H) − b₂(𝒜^H) − (|𝒜^H|−1)(|𝒜|−|𝒜^H|−1)`, never negative.
    pub fn lower_gap(&self) -> i64 {
        let (n, h) = (self.size as i64, self.restricted_size as i64);
        self.b2_multi - self.b2_restricted - (h - 1) * (n - h - 1)
    }

    /// `b₂(𝒜) − b₂(𝒜^H) − |𝒜^H|(|𝒜|−|𝒜^H|)`, never negative.
    pub fn b2_gap(&self) -> i64 {
        let (n, h) = (self.size as i64, self.restricted_size as i64);
        self.b2 - self.b2_restricted - h * (n - h)
    }
}

/// The lattice-only test `b₂(𝒜) − b₂(𝒜^H) = |𝒜^H|(|𝒜| − |𝒜^H|)`.
pub fn b2_equality_holds(a: &Arrangement, h: &LinearForm) -> Result<bool> {
    if !a.contains(h) {
        return Err(ArrError::NotMember(h.to_string()));
    }
    let res = a.restriction(h)?;
    let (n, r) = (a.len() as i64, res.len() as i64);
    Ok(b2(a) - b2(&res) == r * (n - r))
}

pub fn b2_equality_check(a: &Arrangement, h: &LinearForm) -> Result<B2Report> {
    if !a.contains(h) {
        return Err(ArrError::NotMember(h.to_string()));
    }
    let res = a.restriction(h)?;
    let zr = a.ziegler_restriction(h)?;
    let mut r = B2Report {
        b2: b2(a),
        b2_restricted: b2(&res),
        b2_multi: b2_multi(&zr)?,
        b2_zero: b2(a) - a.len() as i64 + 1,
        size: a.len(),
        restricted_size: res.len(),
        b2_equality: false,
        upper: false,
        lower: false,
    };
    r.b2_equality = r.b2_gap() == 0;
    r.upper = r.upper_gap() == 0;
    r.lower = r.lower_gap() == 0;
    Ok(r)
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalB2 {
    /// Codimension-3 flat of `𝒜` inside `H`, i.e. a point of `L₂(𝒜^H)`.
    pub flat: String,
    pub report: B2Report,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalB2Report {
    pub locals: Vec<LocalB2>,
    pub all_b2_equality: bool,
    pub all_upper: bool,
    pub all_lower: bool,
}

/// Equality flags of `(𝒜_X, H)` for every `X ∈ L₂(𝒜^H)`.
pub fn b2_local_check(a: &Arrangement, h: &LinearForm) -> Result<LocalB2Report> {
    let hi = a.index_of(h).ok_or_else(|| ArrError::NotMember(h.to_string()))?;
    let lat = IntersectionLattice::build(a);
    let mut locals = Vec::new();
    for x in lat.level(3).iter().filter(|x| x.members.contains(hi)) {
        let loc = a.localization(&x.flat)?;
        locals.push(LocalB2 { flat: x.flat.format(), report: b2_equality_check(&loc, h)? });
    }
    Ok(LocalB2Report {
        all_b2_equality: locals.iter().all(|l| l.report.b2_equality),
        all_upper: locals.iter().all(|l| l.report.upper),
        all_lower: locals.iter().all(|l| l.report.lower),
        locals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn multi(rows: &[Vec<i64>], m: Vec<u32>) -> Multiarrangement {
        Multiarrangement::new(Arrangement::from_int_rows(2, rows).unwrap(), m).unwrap()
    }

    #[test]
    fn two_lines() {
        let e = rank2_exponents(&multi(&[vec![1, 0], vec![0, 1]], vec![3, 2])).unwrap();
        assert_eq!((e.d1, e.d2), (2, 3));
    }

    #[test]
    fn three_lines() {
        let rows = [vec![1, 0], vec![0, 1], vec![1, 1]];
        let e = rank2_exponents(&multi(&rows, vec![1, 1, 1])).unwrap();
        assert_eq!((e.d1, e.d2), (1, 2));
        let e = rank2_exponents(&multi(&rows, vec![2, 2, 2])).unwrap();
        assert_eq!((e.d1, e.d2), (3, 3));
    }

    #[test]
    fn rank_error() {
        let a = Arrangement::boolean(3).simple();
        assert!(matches!(rank2_exponents(&a), Err(ArrError::RankError(_))));
    }

    #[test]
    fn boolean_equality() {
        let a = Arrangement::boolean(4);
        let h = LinearForm::from_ints(&[1, 0, 0, 0]).unwrap();
        let r = b2_equality_check(&a, &h).unwrap();
        assert!(r.b2_equality && r.upper && r.lower);
        assert_eq!(r.b2, 6);
        assert!(b2_local_check(&a, &h).unwrap().all_b2_equality);
    }
}
