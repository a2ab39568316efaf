//! Central arrangements, multiarrangements and their elementary operations.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ArrError, Result};
use crate::matrix::rref;
use crate::poly::Poly;
use crate::rational::{format_rational, parse_rational, Rational};

/// Normal vector of a hyperplane: coprime integers, first nonzero entry positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    coeffs: Vec<BigInt>,
}

impl LinearForm {
    pub fn normalize(raw: &[Rational]) -> Result<LinearForm> {
        if raw.iter().all(|c| c.is_zero()) {
            return Err(ArrError::InvalidForm);
        }
        let mut den = BigInt::one();
        for c in raw {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = raw.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        Ok(Self::from_bigints(ints))
    }

    pub fn from_ints(raw: &[i64]) -> Result<LinearForm> {
        if raw.iter().all(|&c| c == 0) {
            return Err(ArrError::InvalidForm);
        }
        Ok(Self::from_bigints(raw.iter().map(|&c| BigInt::from(c)).collect()))
    }

    fn from_bigints(mut ints: Vec<BigInt>) -> LinearForm {
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        let first_neg = ints.iter().find(|c| !c.is_zero()).unwrap().is_negative();
        for c in ints.iter_mut() {
            *c = &*c / &g;
            if first_neg {
                *c = -&*c;
            }
        }
        LinearForm { coeffs: ints }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn rational_coeffs(&self) -> Vec<Rational> {
        self.coeffs.iter().map(|c| Rational::from_integer(c.clone())).collect()
    }

    pub fn to_poly(&self) -> Poly {
        Poly::linear(&self.rational_coeffs())
    }

    /// Index used for elimination on the hyperplane: largest |coefficient|, first on ties.
    pub fn pivot_variable(&self) -> usize {
        let mut best = 0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.abs() > self.coeffs[best].abs() {
                best = i;
            }
        }
        best
    }

    pub fn is_coordinate(&self) -> Option<usize> {
        let nz: Vec<usize> = (0..self.dim()).filter(|&i| !self.coeffs[i].is_zero()).collect();
        (nz.len() == 1).then(|| nz[0])
    }

    pub fn format_tuple(&self) -> String {
        self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
    }

    pub fn format_poly(&self, names: &[String]) -> String {
        self.to_poly().format_with(names)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.format_tuple())
    }
}

/// Finite set of distinct hyperplanes through the origin of Q^dim, in insertion order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrangement {
    dim: usize,
    forms: Vec<LinearForm>,
}

/// Hyperplanes with positive multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Multiarrangement {
    pub base: Arrangement,
    pub mult: Vec<u32>,
}

/// Coordinates chosen on a hyperplane `H` to express a restriction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionData {
    pub hyperplane: LinearForm,
    /// Eliminated variable.
    pub pivot: usize,
    /// For every form of the original arrangement other than `H`, the index of its trace.
    pub trace_of: Vec<Option<usize>>,
}

/// Projection `V -> V/T` used by essentialization: new coordinate k is `rows[k] . x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub rows: Vec<Vec<Rational>>,
    pub pivots: Vec<usize>,
}

impl Arrangement {
    pub fn new(dim: usize, forms: Vec<LinearForm>) -> Result<Arrangement> {
        let mut a = Arrangement { dim, forms: Vec::new() };
        for f in forms {
            if f.dim() != dim {
                return Err(ArrError::DimensionMismatch { expected: dim, found: f.dim() });
            }
            if !a.forms.contains(&f) {
                a.forms.push(f);
            }
        }
        Ok(a)
    }

    pub fn empty(dim: usize) -> Arrangement {
        Arrangement { dim, forms: Vec::new() }
    }

    pub fn from_int_rows(dim: usize, rows: &[Vec<i64>]) -> Result<Arrangement> {
        let forms = rows.iter().map(|r| LinearForm::from_ints(r)).collect::<Result<Vec<_>>>()?;
        Arrangement::new(dim, forms)
    }

    pub fn boolean(dim: usize) -> Arrangement {
        let rows: Vec<Vec<i64>> = (0..dim)
            .map(|i| (0..dim).map(|j| i64::from(i == j)).collect())
            .collect();
        Arrangement::from_int_rows(dim, &rows).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn forms(&self) -> &[LinearForm] {
        &self.forms
    }

    pub fn index_of(&self, h: &LinearForm) -> Option<usize> {
        self.forms.iter().position(|f| f == h)
    }

    pub fn contains(&self, h: &LinearForm) -> bool {
        self.index_of(h).is_some()
    }

    /// Same hyperplanes sorted; used as a memo key.
    pub fn canonical(&self) -> Arrangement {
        let mut forms = self.forms.clone();
        forms.sort();
        Arrangement { dim: self.dim, forms }
    }

    pub fn delete(&self, h: &LinearForm) -> Result<Arrangement> {
        let i = self.index_of(h).ok_or_else(|| ArrError::NotMember(h.to_string()))?;
        let mut forms = self.forms.clone();
        forms.remove(i);
        Ok(Arrangement { dim: self.dim, forms })
    }

    pub fn add(&self, h: &LinearForm) -> Result<Arrangement> {
        if h.dim() != self.dim {
            return Err(ArrError::DimensionMismatch { expected: self.dim, found: h.dim() });
        }
        if self.contains(h) {
            return Err(ArrError::AlreadyMember(h.to_string()));
        }
        let mut forms = self.forms.clone();
        forms.push(h.clone());
        Ok(Arrangement { dim: self.dim, forms })
    }

    pub fn subarrangement(&self, idx: &[usize]) -> Arrangement {
        Arrangement { dim: self.dim, forms: idx.iter().map(|&i| self.forms[i].clone()).collect() }
    }

    /// Hyperplanes containing the flat `x`.
    pub fn localization(&self, x: &Flat) -> Result<Arrangement> {
        if x.ambient_dim() != self.dim {
            return Err(ArrError::DimensionMismatch { expected: self.dim, found: x.ambient_dim() });
        }
        let loc: Vec<LinearForm> = self.forms.iter().filter(|f| x.contained_in(f)).cloned().collect();
        let sub = Arrangement { dim: self.dim, forms: loc };
        if Flat::from_forms(self.dim, sub.forms()) != *x {
            return Err(ArrError::NotAFlat);
        }
        Ok(sub)
    }

    pub fn restriction(&self, h: &LinearForm) -> Result<Arrangement> {
        Ok(self.restriction_data(h)?.0)
    }

    /// Restriction to `h` together with the coordinate bookkeeping.
    pub fn restriction_data(&self, h: &LinearForm) -> Result<(Arrangement, RestrictionData)> {
        let hi = self.index_of(h).ok_or_else(|| ArrError::NotMember(h.to_string()))?;
        let j = h.pivot_variable();
        let mut out = Arrangement::empty(self.dim - 1);
        let mut trace_of = vec![None; self.len()];
        for (i, f) in self.forms.iter().enumerate() {
            if i == hi {
                continue;
            }
            let t = trace_on(f, h, j).expect("distinct hyperplanes have a proper trace");
            let k = match out.index_of(&t) {
                Some(k) => k,
                None => {
                    out.forms.push(t);
                    out.len() - 1
                }
            };
            trace_of[i] = Some(k);
        }
        Ok((out, RestrictionData { hyperplane: h.clone(), pivot: j, trace_of }))
    }

    pub fn ziegler_restriction(&self, h: &LinearForm) -> Result<Multiarrangement> {
        let (base, data) = self.restriction_data(h)?;
        let mut mult = vec![0u32; base.len()];
        for k in data.trace_of.iter().flatten() {
            mult[*k] += 1;
        }
        Ok(Multiarrangement { base, mult })
    }

    /// Rank of the arrangement (codimension of the center).
    pub fn rank(&self) -> usize {
        Flat::from_forms(self.dim, &self.forms).codim()
    }

    pub fn is_essential(&self) -> bool {
        self.rank() == self.dim
    }

    pub fn essentialize(&self) -> (Arrangement, Embedding) {
        let center = Flat::from_forms(self.dim, &self.forms);
        let emb = Embedding { rows: center.rows.clone(), pivots: center.pivots.clone() };
        let r = emb.pivots.len();
        let mut out = Arrangement::empty(r);
        for f in &self.forms {
            let c: Vec<Rational> = emb.pivots.iter().map(|&p| Rational::from_integer(f.coeffs[p].clone())).collect();
            let g = LinearForm::normalize(&c).expect("form lies in the span of the arrangement");
            if !out.forms.contains(&g) {
                out.forms.push(g);
            }
        }
        (out, emb)
    }

    pub fn defining_polynomial(&self) -> Poly {
        let mut q = Poly::one(self.dim);
        for f in &self.forms {
            q = &q * &f.to_poly();
        }
        q
    }

    /// Resolves a pivot given as a 1-based index or as a coefficient tuple.
    pub fn resolve_pivot(&self, spec: &str) -> Result<LinearForm> {
        let s = spec.trim();
        let parts: Vec<&str> = s.split(|c: char| c.is_whitespace() || c == ',').filter(|p| !p.is_empty()).collect();
        if parts.len() == 1 {
            if let Ok(i) = parts[0].parse::<usize>() {
                if i >= 1 && i <= self.len() {
                    return Ok(self.forms[i - 1].clone());
                }
                if self.dim != 1 {
                    return Err(ArrError::UnknownPivot(spec.to_string()));
                }
            }
        }
        let coeffs: Vec<Rational> = parts
            .iter()
            .map(|p| parse_rational(p).ok_or_else(|| ArrError::UnknownPivot(spec.to_string())))
            .collect::<Result<_>>()?;
        if coeffs.len() != self.dim {
            return Err(ArrError::DimensionMismatch { expected: self.dim, found: coeffs.len() });
        }
        let f = LinearForm::normalize(&coeffs)?;
        if !self.contains(&f) {
            return Err(ArrError::UnknownPivot(spec.to_string()));
        }
        Ok(f)
    }

    pub fn simple(&self) -> Multiarrangement {
        Multiarrangement { base: self.clone(), mult: vec![1; self.len()] }
    }

    pub fn to_text(&self) -> String {
        self.simple().to_text()
    }

    pub fn format_product(&self) -> String {
        let names = default_names(self.dim);
        self.forms
            .iter()
            .map(|f| {
                let p = f.format_poly(&names);
                if f.is_coordinate().is_some() {
                    p
                } else {
                    format!("({p})")
                }
            })
            .collect::<Vec<_>>()
            .join("")
    }
}

/// Trace of `f` on `h` in the coordinates obtained by eliminating variable `j`.
fn trace_on(f: &LinearForm, h: &LinearForm, j: usize) -> Option<LinearForm> {
    let a = &h.coeffs;
    let b = &f.coeffs;
    let c: Vec<Rational> = (0..a.len())
        .filter(|&i| i != j)
        .map(|i| Rational::from_integer(&a[j] * &b[i] - &b[j] * &a[i]))
        .collect();
    LinearForm::normalize(&c).ok()
}

pub fn default_names(n: usize) -> Vec<String> {
    if n <= 5 {
        ["x", "y", "z", "w", "u"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

impl Multiarrangement {
    pub fn new(base: Arrangement, mult: Vec<u32>) -> Result<Multiarrangement> {
        if mult.len() != base.len() {
            return Err(ArrError::DimensionMismatch { expected: base.len(), found: mult.len() });
        }
        if mult.iter().any(|&m| m == 0) {
            return Err(ArrError::Invalid("multiplicities must be positive".into()));
        }
        Ok(Multiarrangement { base, mult })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn total(&self) -> u32 {
        self.mult.iter().sum()
    }

    pub fn is_simple(&self) -> bool {
        self.mult.iter().all(|&m| m == 1)
    }

    pub fn defining_polynomial(&self) -> Poly {
        let mut q = Poly::one(self.dim());
        for (f, &m) in self.base.forms().iter().zip(&self.mult) {
            q = &q * &f.to_poly().pow(m);
        }
        q
    }

    pub fn localization(&self, x: &Flat) -> Result<Multiarrangement> {
        let loc = self.base.localization(x)?;
        let mult = loc.forms().iter().map(|f| self.mult[self.base.index_of(f).unwrap()]).collect();
        Ok(Multiarrangement { base: loc, mult })
    }

    pub fn essentialize(&self) -> (Multiarrangement, Embedding) {
        let (ess, emb) = self.base.essentialize();
        let mut mult = vec![0u32; ess.len()];
        for (f, &m) in self.base.forms().iter().zip(&self.mult) {
            let c: Vec<Rational> = emb.pivots.iter().map(|&p| Rational::from_integer(f.coeffs()[p].clone())).collect();
            let g = LinearForm::normalize(&c).unwrap();
            mult[ess.index_of(&g).unwrap()] += m;
        }
        (Multiarrangement { base: ess, mult }, emb)
    }

    /// Text format: `dim l` header, then one form per line with optional `* m`.
    pub fn to_text(&self) -> String {
        let mut s = format!("dim {}\n", self.dim());
        for (f, &m) in self.base.forms().iter().zip(&self.mult) {
            s.push_str(&f.format_tuple());
            if m != 1 {
                s.push_str(&format!(" * {m}"));
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Multiarrangement> {
        let mut dim: Option<usize> = None;
        let mut forms: Vec<LinearForm> = Vec::new();
        let mut mult: Vec<u32> = Vec::new();
        let mut seen: HashMap<LinearForm, usize> = HashMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| ArrError::Parse { line: line_no, msg };
            let Some(d) = dim else {
                let mut it = line.split_whitespace();
                if it.next() != Some("dim") {
                    return Err(perr("expected header `dim <l>`".into()));
                }
                let v = it.next().ok_or_else(|| perr("missing dimension".into()))?;
                let v: usize = v.parse().map_err(|_| perr(format!("bad dimension `{v}`")))?;
                if it.next().is_some() {
                    return Err(perr("trailing tokens after dimension".into()));
                }
                dim = Some(v);
                continue;
            };
            let (coef_part, m) = match line.split_once('*') {
                Some((c, m)) => {
                    let m: u32 = m.trim().parse().map_err(|_| perr(format!("bad multiplicity `{}`", m.trim())))?;
                    if m == 0 {
                        return Err(perr("multiplicity must be positive".into()));
                    }
                    (c, m)
                }
                None => (line, 1),
            };
            let coeffs: Vec<Rational> = coef_part
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| parse_rational(t).ok_or_else(|| perr(format!("bad coefficient `{t}`"))))
                .collect::<Result<_>>()?;
            if coeffs.len() != d {
                return Err(perr(format!("expected {d} coefficients, found {}", coeffs.len())));
            }
            let f = LinearForm::normalize(&coeffs).map_err(|_| perr("all coefficients are zero".into()))?;
            match seen.get(&f) {
                Some(&k) => mult[k] += m,
                None => {
                    seen.insert(f.clone(), forms.len());
                    forms.push(f);
                    mult.push(m);
                }
            }
        }
        let dim = dim.ok_or(ArrError::Parse { line: 0, msg: "missing `dim` header".into() })?;
        Ok(Multiarrangement { base: Arrangement { dim, forms }, mult })
    }
}

/// Intersection of hyperplanes, identified by the reduced row echelon basis of its annihilator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Flat {
    dim: usize,
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Flat {
    pub fn whole(dim: usize) -> Flat {
        Flat { dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_forms(dim: usize, forms: &[LinearForm]) -> Flat {
        let rows: Vec<Vec<Rational>> = forms.iter().map(|f| f.rational_coeffs()).collect();
        Flat::from_rows(dim, rows)
    }

    pub fn from_rows(dim: usize, rows: Vec<Vec<Rational>>) -> Flat {
        if rows.is_empty() {
            return Flat::whole(dim);
        }
        let (red, pivots) = rref(rows);
        Flat { dim, rows: red, pivots }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn codim(&self) -> usize {
        self.rows.len()
    }

    pub fn dimension(&self) -> usize {
        self.dim - self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// Reduces `v` against the echelon rows; zero result means `v` is in the row span.
    fn reduce(&self, v: &mut [Rational]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
    }

    /// Whether the flat lies inside the hyperplane `f`.
    pub fn contained_in(&self, f: &LinearForm) -> bool {
        let mut v = f.rational_coeffs();
        self.reduce(&mut v);
        v.iter().all(|x| x.is_zero())
    }

    /// Intersection with the hyperplane `f`.
    pub fn meet(&self, f: &LinearForm) -> Flat {
        let mut v = f.rational_coeffs();
        self.reduce(&mut v);
        if v.iter().all(|x| x.is_zero()) {
            return self.clone();
        }
        let mut rows = self.rows.clone();
        rows.push(v);
        Flat::from_rows(self.dim, rows)
    }

    /// Whether `self` contains `other` as a subspace.
    pub fn contains_flat(&self, other: &Flat) -> bool {
        self.rows.iter().all(|r| {
            let mut v = r.clone();
            other.reduce(&mut v);
            v.iter().all(|x| x.is_zero())
        })
    }

    /// Integer matrix whose rows span the annihilator (each row scaled to coprime integers).
    pub fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        self.rows
            .iter()
            .map(|r| LinearForm::normalize(r).unwrap().coeffs().to_vec())
            .collect()
    }

    pub fn format(&self) -> String {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| r.iter().map(format_rational).collect::<Vec<_>>().join(" "))
            .collect();
        format!("[{}]", rows.join("; "))
    }

    /// Parses `a b c; d e f` (rows of defining forms) into a flat.
    pub fn parse(dim: usize, spec: &str) -> Result<Flat> {
        let mut rows = Vec::new();
        for part in spec.split(';') {
            let part = part.trim().trim_start_matches('[').trim_end_matches(']');
            if part.is_empty() {
                continue;
            }
            let r: Vec<Rational> = part
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| parse_rational(t).ok_or_else(|| ArrError::Invalid(format!("bad coefficient `{t}`"))))
                .collect::<Result<_>>()?;
            if r.len() != dim {
                return Err(ArrError::DimensionMismatch { expected: dim, found: r.len() });
            }
            rows.push(r);
        }
        Ok(Flat::from_rows(dim, rows))
    }
}

/// JSON-friendly view of an arrangement.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ArrangementJson {
    pub dim: usize,
    pub forms: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mult: Option<Vec<u32>>,
}

impl ArrangementJson {
    pub fn from_multi(m: &Multiarrangement) -> Self {
        ArrangementJson {
            dim: m.dim(),
            forms: m.base.forms().iter().map(|f| f.coeffs().iter().map(|c| c.to_string()).collect()).collect(),
            mult: (!m.is_simple()).then(|| m.mult.clone()),
        }
    }

    pub fn from_arrangement(a: &Arrangement) -> Self {
        Self::from_multi(&a.simple())
    }

    pub fn to_multi(&self) -> Result<Multiarrangement> {
        let forms = self
            .forms
            .iter()
            .map(|r| {
                let c: Vec<Rational> = r
                    .iter()
                    .map(|t| parse_rational(t).ok_or_else(|| ArrError::Invalid(format!("bad coefficient `{t}`"))))
                    .collect::<Result<_>>()?;
                LinearForm::normalize(&c)
            })
            .collect::<Result<Vec<_>>>()?;
        let base = Arrangement::new(self.dim, forms)?;
        let mult = self.mult.clone().unwrap_or_else(|| vec![1; base.len()]);
        Multiarrangement::new(base, mult)
    }

    pub fn to_arrangement(&self) -> Result<Arrangement> {
        Ok(self.to_multi()?.base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    #[test]
    fn normalization() {
        let f = LinearForm::normalize(&[ratio(1, 2), ratio(-1, 2), rat(0)]).unwrap();
        assert_eq!(f, LinearForm::from_ints(&[1, -1, 0]).unwrap());
        let g = LinearForm::normalize(&[rat(-2), rat(4), rat(-6)]).unwrap();
        assert_eq!(g, LinearForm::from_ints(&[1, -2, 3]).unwrap());
        assert_eq!(LinearForm::normalize(&[rat(0), rat(0), rat(0)]), Err(ArrError::InvalidForm));
    }

    #[test]
    fn restriction_of_xyz_sum() {
        let a = Arrangement::from_int_rows(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 1]]).unwrap();
        let z = LinearForm::from_ints(&[0, 0, 1]).unwrap();
        let r = a.restriction(&z).unwrap();
        assert_eq!(r, Arrangement::from_int_rows(2, &[vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap());
        let zr = a.ziegler_restriction(&z).unwrap();
        assert_eq!(zr.mult, vec![1, 1, 1]);
    }

    #[test]
    fn text_roundtrip() {
        let text = "dim 3\n1 0 0\n0 1 0 * 2\n1 -1 3\n";
        let m = Multiarrangement::parse(text).unwrap();
        assert_eq!(m.to_text(), text);
        let err = Multiarrangement::parse("dim 2\n1 0\n1 2 3\n").unwrap_err();
        assert_eq!(err, ArrError::Parse { line: 3, msg: "expected 2 coefficients, found 3".into() });
    }

    #[test]
    fn essentialization_of_two_planes() {
        let a = Arrangement::from_int_rows(3, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let (e, _) = a.essentialize();
        assert_eq!(e, Arrangement::boolean(2));
    }
}
