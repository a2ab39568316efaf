//! Logarithmic derivation modules `D(𝒜)`, `D_H(𝒜)` and `D(𝒜,m)` and the
//! computations built on them: Saito certificates, restriction maps,
//! minimal generators and free resolutions.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arrangement::{Arrangement, LinearForm, Multiarrangement};
use crate::error::{ArrError, Result};
use crate::graded::{
    certify_rank_at_most, exact_basis, first_nonzero, generic_rank, minimal_generators, resolve_from, FreeModule,
    FreeResolution, GeneratorSet, GradedElement, GradedSystem, Multiplier,
};
use crate::lattice::char_poly;
use crate::modular::{primes, ModEchelon, ModMatrix, Prime};
use crate::monomial::{count_monomials, homogeneous_monomials, monomial_rank};
use crate::poly::{var_names, Poly};
use crate::rational::Rational;
use crate::upoly::UPoly;

/// Which module of derivations is meant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleKind {
    /// `D(𝒜,m)`.
    Full,
    /// `D_H(𝒜) = {θ ∈ D(𝒜) : θ(α_H) = 0}`.
    Annihilating(LinearForm),
}

/// Graded system describing a derivation module.
#[derive(Clone, Debug)]
pub struct DerivationModule {
    pub multi: Multiarrangement,
    pub kind: ModuleKind,
    ambient: FreeModule,
}

impl DerivationModule {
    pub fn new(multi: Multiarrangement, kind: ModuleKind) -> Self {
        let l = multi.dim();
        DerivationModule { multi, kind, ambient: FreeModule::new(l, vec![0; l]) }
    }

    pub fn of(a: &Arrangement) -> Self {
        Self::new(a.simple(), ModuleKind::Full)
    }

    pub fn annihilating(a: &Arrangement, h: &LinearForm) -> Self {
        Self::new(a.simple(), ModuleKind::Annihilating(h.clone()))
    }

    pub fn of_multi(m: &Multiarrangement) -> Self {
        Self::new(m.clone(), ModuleKind::Full)
    }

    pub fn dim(&self) -> usize {
        self.multi.dim()
    }
}

/// Expansion of `(-L)^r` mod `p` for `L = Σ_{i≠j} a_i x_i`, as `(exponent, coefficient)` pairs in ℓ−1 variables.
fn neg_l_powers(a: &[u64], j: usize, r: usize, p: Prime) -> Vec<Vec<(Vec<u32>, u64)>> {
    let n = a.len() - 1;
    let l: Vec<u64> = (0..a.len()).filter(|&i| i != j).map(|i| p.neg(a[i])).collect();
    let mut out = vec![vec![(vec![0u32; n], 1u64)]];
    for _ in 0..r {
        let prev = out.last().unwrap();
        let mut acc: std::collections::HashMap<Vec<u32>, u64> = std::collections::HashMap::new();
        for (e, c) in prev {
            for (k, &lk) in l.iter().enumerate() {
                if lk == 0 {
                    continue;
                }
                let mut e2 = e.clone();
                e2[k] += 1;
                let v = acc.entry(e2).or_insert(0);
                *v = p.add(*v, p.mul(*c, lk));
            }
        }
        out.push(acc.into_iter().filter(|(_, c)| *c != 0).collect());
    }
    out
}

fn binom_mod(n: u32, k: u32, p: Prime) -> u64 {
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = p.mul(num, (n - i) as u64 % p.p);
        den = p.mul(den, (i + 1) as u64 % p.p);
    }
    p.mul(num, p.inv(den))
}

impl GradedSystem for DerivationModule {
    fn ambient(&self) -> &FreeModule {
        &self.ambient
    }

    fn constraints_mod(&self, d: u32, p: Prime) -> ModMatrix {
        let l = self.dim();
        let coords = self.ambient.coords(d);
        let mut blocks: Vec<Vec<(usize, usize, u64)>> = Vec::new();
        let mut row_base = 0usize;
        for (f, &m) in self.multi.base.forms().iter().zip(&self.multi.mult) {
            let a: Vec<u64> = f.coeffs().iter().map(|c| p.from_bigint(c)).collect();
            let j = f.pivot_variable();
            let kmax = m.min(d + 1);
            let powers = neg_l_powers(&a, j, d as usize, p);
            let aj_pow: Vec<u64> = (0..=d).map(|e| p.pow(a[j], e as u64)).collect();
            let mut entries = Vec::new();
            let mut block_offsets = Vec::new();
            let mut off = row_base;
            for k in 0..kmax {
                block_offsets.push(off);
                off += count_monomials(l - 1, (d - k) as usize);
            }
            for (col, (i, e)) in coords.iter().enumerate() {
                if a[*i] == 0 {
                    continue;
                }
                let ej = e[j];
                let rest: Vec<u32> = (0..l).filter(|&t| t != j).map(|t| e[t]).collect();
                let base_c = p.mul(a[*i], aj_pow[(d - ej) as usize]);
                for k in 0..kmax.min(ej + 1) {
                    let c = p.mul(base_c, binom_mod(ej, k, p));
                    for (pe, pc) in &powers[(ej - k) as usize] {
                        let mono: Vec<u32> = rest.iter().zip(pe).map(|(x, y)| x + y).collect();
                        let row = block_offsets[k as usize] + monomial_rank(&mono);
                        entries.push((row, col, p.mul(c, *pc)));
                    }
                }
            }
            row_base = off;
            blocks.push(entries);
        }
        let mut extra = Vec::new();
        if let ModuleKind::Annihilating(h) = &self.kind {
            let a: Vec<u64> = h.coeffs().iter().map(|c| p.from_bigint(c)).collect();
            for (col, (i, e)) in coords.iter().enumerate() {
                if a[*i] != 0 {
                    extra.push((row_base + monomial_rank(e), col, a[*i]));
                }
            }
            row_base += count_monomials(l, d as usize);
        }
        let mut mat = ModMatrix::zeros(row_base, coords.len());
        for (r, c, v) in blocks.into_iter().flatten().chain(extra) {
            let x = mat.at(r, c);
            *x = p.add(*x, v);
        }
        mat
    }

    fn contains(&self, d: u32, v: &[BigInt]) -> bool {
        let comps = self.ambient.to_polys(d, v);
        let d = Derivation { degree: d, components: comps };
        self.contains_derivation(&d)
    }
}

impl DerivationModule {
    pub fn contains_derivation(&self, theta: &Derivation) -> bool {
        for (f, &m) in self.multi.base.forms().iter().zip(&self.multi.mult) {
            let alpha = f.to_poly();
            let mut g = theta.apply(&f.rational_coeffs());
            for _ in 0..m {
                if g.is_zero() {
                    break;
                }
                match g.div_exact(&alpha) {
                    Some(q) => g = q,
                    None => return false,
                }
            }
        }
        if let ModuleKind::Annihilating(h) = &self.kind {
            if !theta.apply(&h.rational_coeffs()).is_zero() {
                return false;
            }
        }
        true
    }

    pub fn element(&self, theta: &Derivation) -> Option<GradedElement> {
        let coeffs = self.ambient.from_polys(theta.degree, &theta.components)?;
        Some(GradedElement { degree: theta.degree, coeffs })
    }

    pub fn derivation(&self, g: &GradedElement) -> Derivation {
        Derivation { degree: g.degree, components: self.ambient.to_polys(g.degree, &g.coeffs) }
    }

    /// Default degree bound `|m|` (at least 1).
    pub fn default_bound(&self) -> u32 {
        self.multi.total().max(1)
    }
}

/// `Σ f_i ∂_i` with homogeneous components of a common degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub degree: u32,
    pub components: Vec<Poly>,
}

impl Derivation {
    pub fn euler(l: usize) -> Derivation {
        Derivation { degree: 1, components: (0..l).map(|i| Poly::var(l, i)).collect() }
    }

    pub fn nvars(&self) -> usize {
        self.components.len()
    }

    /// `θ(α)` for a linear form with coefficients `a`.
    pub fn apply(&self, a: &[Rational]) -> Poly {
        let mut s = Poly::zero(self.nvars());
        for (c, f) in a.iter().zip(&self.components) {
            if !c.is_zero() {
                s = &s + &f.scale(c);
            }
        }
        s
    }

    pub fn format(&self) -> String {
        let names = var_names(self.nvars());
        let mut parts = Vec::new();
        for (i, f) in self.components.iter().enumerate() {
            if !f.is_zero() {
                parts.push(format!("({})*d{}", f.format_with(&names), names[i]));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    pub fn to_json(&self) -> DerivationJson {
        let names = var_names(self.nvars());
        DerivationJson { degree: self.degree, components: self.components.iter().map(|f| f.format_with(&names)).collect() }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DerivationJson {
    pub degree: u32,
    pub components: Vec<String>,
}

/// Checks `dim D(𝒜)_d = dim S_{d-1} + dim D_H(𝒜)_d` for `d` in `0..=max_degree`.
pub fn split_check(a: &Arrangement, h: &LinearForm, max_degree: u32) -> Result<bool> {
    let full = DerivationModule::of(a);
    let ann = DerivationModule::annihilating(a, h);
    let l = a.dim();
    for d in 0..=max_degree {
        let lhs = crate::graded::exact_dim(&full, d)?;
        let s = if d == 0 { 0 } else { count_monomials(l, (d - 1) as usize) };
        let rhs = crate::graded::exact_dim(&ann, d)?;
        if lhs != s + rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of Saito's criterion on ℓ candidate derivations.
#[derive(Clone, Debug)]
pub struct SaitoCertificate {
    pub candidates: Vec<Derivation>,
    pub degrees: Vec<u32>,
    /// `det = c·Q(𝒜,m)` when the degrees sum to `|m|`.
    pub constant: Option<Rational>,
    pub determinant: Option<Poly>,
    pub free: bool,
}

fn det_rational(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let pivot = m[c][c].clone();
        det *= &pivot;
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &pivot;
            for k in c..n {
                let t = &f * &m[c][k];
                m[r][k] -= t;
            }
        }
    }
    det
}

fn scramble(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn sample_points(l: usize, count: usize) -> Vec<Vec<Rational>> {
    (0..count)
        .map(|t| {
            (0..l)
                .map(|i| Rational::from_integer(BigInt::from(scramble((t * 64 + i) as u64) % 1009 + 1)))
                .collect()
        })
        .collect()
}

/// Saito's criterion with `det = c·Q` evaluated at sample points.
///
/// `Q` divides the determinant of any ℓ logarithmic derivations, so when the
/// degrees add up to `|m|` the determinant is `c·Q` and one evaluation at a
/// point off the arrangement yields `c`; further points are checked as well.
pub fn saito_check(multi: &Multiarrangement, candidates: &[Derivation]) -> Result<SaitoCertificate> {
    let l = multi.dim();
    if candidates.len() != l {
        return Err(ArrError::DimensionMismatch { expected: l, found: candidates.len() });
    }
    let module = DerivationModule::of_multi(multi);
    for (i, c) in candidates.iter().enumerate() {
        if c.nvars() != l || !module.contains_derivation(c) {
            return Err(ArrError::NotLogarithmic(format!("candidate {}", i + 1)));
        }
    }
    let degrees: Vec<u32> = candidates.iter().map(|c| c.degree).collect();
    let total: u32 = degrees.iter().sum();
    let q = multi.defining_polynomial();
    let mut cert = SaitoCertificate { candidates: candidates.to_vec(), degrees, constant: None, determinant: None, free: false };
    if total != multi.total() {
        return Ok(cert);
    }
    let mut constant: Option<Rational> = None;
    for pt in sample_points(l, 3) {
        let qv = q.eval(&pt);
        if qv.is_zero() {
            continue;
        }
        let m: Vec<Vec<Rational>> = candidates.iter().map(|c| c.components.iter().map(|f| f.eval(&pt)).collect()).collect();
        let c = det_rational(m) / qv;
        match &constant {
            None => constant = Some(c),
            Some(prev) if *prev != c => {
                return Err(ArrError::Invalid("determinant is not a multiple of Q".into()));
            }
            _ => {}
        }
    }
    let c = constant.ok_or_else(|| ArrError::Inconclusive("no sample point off the arrangement".into()))?;
    cert.free = !c.is_zero();
    cert.determinant = Some(q.scale(&c));
    cert.constant = Some(c);
    Ok(cert)
}

fn saito_from_elements(module: &DerivationModule, gens: &[GradedElement]) -> Result<SaitoCertificate> {
    let ders: Vec<Derivation> = gens.iter().map(|g| module.derivation(g)).collect();
    saito_check(&module.multi, &ders)
}

#[derive(Clone, Debug)]
pub enum FreeBasisOutcome {
    Free(SaitoCertificate),
    /// More than ℓ minimal generators, or ℓ of them with degrees summing past `|m|`.
    NotFree { generator_degrees: Vec<u32> },
    /// No decision up to the degree bound.
    NotFound { certified_up_to: u32 },
}

/// Greedy search for a Saito basis among minimal generators of increasing degree.
pub fn find_free_basis(multi: &Multiarrangement, bound: u32) -> Result<FreeBasisOutcome> {
    let l = multi.dim();
    let total = multi.total();
    let (ess, _) = multi.essentialize();
    let module = DerivationModule::of_multi(multi);
    let _ = ess;
    let mut verdict: Option<bool> = None;
    let gs = minimal_generators(&module, bound, None, &mut |gens| {
        let s: u32 = gens.iter().take(l).map(|g| g.degree).sum();
        if gens.len() > l || (gens.len() == l && s > total) {
            verdict = Some(false);
            return true;
        }
        if gens.len() == l && s == total && generic_rank(&module.ambient, gens) == l {
            verdict = Some(true);
            return true;
        }
        false
    })?;
    match verdict {
        Some(true) => {
            let cert = saito_from_elements(&module, &gs.gens)?;
            if cert.free {
                Ok(FreeBasisOutcome::Free(cert))
            } else {
                Err(ArrError::Invalid("independent generators failed Saito's criterion".into()))
            }
        }
        Some(false) => Ok(FreeBasisOutcome::NotFree { generator_degrees: gs.degrees() }),
        None => Ok(FreeBasisOutcome::NotFound { certified_up_to: gs.certified_up_to }),
    }
}

/// Exponents of a free (multi)arrangement, if certified.
pub fn exponents(multi: &Multiarrangement, bound: u32) -> Result<Option<Vec<u32>>> {
    match find_free_basis(multi, bound)? {
        FreeBasisOutcome::Free(c) => Ok(Some(c.degrees)),
        _ => Ok(None),
    }
}

/// `min{n : D_H(𝒜)_n ≠ 0}`.
pub fn mdr(a: &Arrangement, h: &LinearForm) -> Result<u32> {
    if !a.contains(h) {
        return Err(ArrError::NotMember(h.to_string()));
    }
    let module = DerivationModule::annihilating(a, h);
    match first_nonzero(&module, 0, a.len() as u32)? {
        Some(g) => Ok(g.degree),
        None => Err(ArrError::Inconclusive("no annihilating derivation up to |𝒜|".into())),
    }
}

/// Restriction maps to a hyperplane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RestrictionKind {
    /// `ρ^H : D(𝒜) → D(𝒜^H)`.
    Euler,
    /// `π^H : D_H(𝒜) → D(𝒜^H, m^H)`.
    Ziegler,
}

/// Data for restricting derivations to `H`.
pub struct RestrictionMap {
    pub kind: RestrictionKind,
    pub source: DerivationModule,
    pub target: DerivationModule,
    pivot: usize,
    alpha: Vec<Rational>,
}

impl RestrictionMap {
    pub fn new(kind: RestrictionKind, a: &Arrangement, h: &LinearForm) -> Result<Self> {
        let (res, _) = a.restriction_data(h)?;
        let (source, target) = match kind {
            RestrictionKind::Euler => (DerivationModule::of(a), DerivationModule::of(&res)),
            RestrictionKind::Ziegler => {
                (DerivationModule::annihilating(a, h), DerivationModule::of_multi(&a.ziegler_restriction(h)?))
            }
        };
        Ok(RestrictionMap { kind, source, target, pivot: h.pivot_variable(), alpha: h.rational_coeffs() })
    }

    /// `θ|_H` in the coordinates of the restriction, scaled by `a_j^deg`.
    pub fn apply(&self, theta: &Derivation) -> Derivation {
        let j = self.pivot;
        let l = theta.nvars();
        let aj = self.alpha[j].clone();
        let mut sub = Poly::zero(l);
        for i in 0..l {
            if i != j && !self.alpha[i].is_zero() {
                sub = &sub + &Poly::var(l, i).scale(&(-&self.alpha[i] / &aj));
            }
        }
        let scale = num_traits::pow(aj, theta.degree as usize);
        let comps = (0..l)
            .filter(|&i| i != j)
            .map(|i| theta.components[i].substitute(j, &sub).scale(&scale).remove_var(j))
            .collect();
        Derivation { degree: theta.degree, components: comps }
    }

    fn apply_element(&self, g: &GradedElement) -> GradedElement {
        let r = self.apply(&self.source.derivation(g));
        self.target.element(&r).expect("restriction has integral coefficients")
    }
}

/// Image of the degree-`d` piece under a restriction map.
#[derive(Clone, Debug, Serialize)]
pub struct ImageReport {
    pub degree: u32,
    pub image_dim: usize,
    pub target_dim: usize,
}

/// Surjectivity verdict with the per-degree comparison.
#[derive(Clone, Debug, Serialize)]
pub struct SurjectivityReport {
    pub kind: RestrictionKind,
    pub surjective: bool,
    /// Target generator degrees used for the check.
    pub target_generator_degrees: Vec<u32>,
    /// Verdict `true` holds if the target has no generators above this degree.
    pub certified_up_to: u32,
    pub failing_degree: Option<u32>,
    pub table: Vec<ImageReport>,
}

fn image_rows(map: &RestrictionMap, gens: &[GradedElement], d: u32) -> Vec<Vec<(usize, BigInt)>> {
    let target_amb = map.target.ambient.clone();
    let mut mult = Multiplier::new(&target_amb);
    let mut rows = Vec::new();
    for g in gens.iter().filter(|g| g.degree <= d) {
        if g.is_zero() {
            continue;
        }
        for mono in homogeneous_monomials(target_amb.nvars, (d - g.degree) as usize) {
            rows.push(mult.shift_sparse(g, &mono).into_iter().map(|(i, c)| (i, c.clone())).collect());
        }
    }
    rows
}

fn rank_mod(rows: &[Vec<(usize, BigInt)>], cols: usize, p: Prime) -> usize {
    let mut e = ModEchelon::new(p, cols);
    for r in rows {
        let mut v = vec![0u64; cols];
        for (i, c) in r {
            v[*i] = p.from_bigint(c);
        }
        e.insert(v);
    }
    e.rank()
}

/// `Im_d` against the target's degree-`d` piece for `d` in `0..=max_degree`.
pub fn restriction_image(kind: RestrictionKind, a: &Arrangement, h: &LinearForm, max_degree: u32) -> Result<Vec<ImageReport>> {
    let map = RestrictionMap::new(kind, a, h)?;
    let src = minimal_generators(&map.source, max_degree, None, &mut |_| false)?;
    let images: Vec<GradedElement> = src.gens.iter().map(|g| map.apply_element(g)).collect();
    let mut out = Vec::new();
    for d in 0..=max_degree {
        let target_dim = crate::graded::exact_dim(&map.target, d)?;
        let rows = image_rows(&map, &images, d);
        let image_dim = exact_rank(&map, &rows, d, target_dim)?;
        out.push(ImageReport { degree: d, image_dim, target_dim });
    }
    Ok(out)
}

/// Exact rank of image rows lying in the target's degree-`d` piece.
fn exact_rank(map: &RestrictionMap, rows: &[Vec<(usize, BigInt)>], d: u32, target_dim: usize) -> Result<usize> {
    let cols = map.target.ambient.dim(d);
    let p = primes()[0];
    let r = rank_mod(rows, cols, p);
    if r >= target_dim {
        return Ok(r);
    }
    let rr = map.target.constraints_mod(d, p).rref(p);
    if certify_rank_at_most(rows, &rr.free_columns(), r)? {
        Ok(r)
    } else {
        Err(ArrError::Inconclusive(format!("image rank in degree {d} not certified")))
    }
}

/// Decides whether the restriction map is onto, following the target's minimal generators.
pub fn surjectivity(kind: RestrictionKind, a: &Arrangement, h: &LinearForm, bound: Option<u32>) -> Result<SurjectivityReport> {
    let map = RestrictionMap::new(kind, a, h)?;
    let bound = bound.unwrap_or_else(|| map.target.default_bound());
    let tgt = minimal_generators(&map.target, bound, None, &mut |_| false)?;
    let maxdeg = tgt.gens.iter().map(|g| g.degree).max().unwrap_or(0);
    let src = minimal_generators(&map.source, maxdeg, None, &mut |_| false)?;
    let images: Vec<GradedElement> = src.gens.iter().map(|g| map.apply_element(g)).collect();
    for (g, im) in src.gens.iter().zip(&images) {
        if !map.target.contains(g.degree, &im.coeffs) {
            return Err(ArrError::Invalid("restricted derivation left the target module".into()));
        }
    }
    let mut table = Vec::new();
    let mut failing = None;
    for d in 0..=maxdeg {
        let target_dim = tgt.dims[d as usize];
        let rows = image_rows(&map, &images, d);
        let image_dim = exact_rank(&map, &rows, d, target_dim)?;
        table.push(ImageReport { degree: d, image_dim, target_dim });
        if image_dim < target_dim {
            failing = Some(d);
            break;
        }
    }
    Ok(SurjectivityReport {
        kind,
        surjective: failing.is_none(),
        target_generator_degrees: tgt.degrees(),
        certified_up_to: tgt.certified_up_to,
        failing_degree: failing,
        table,
    })
}

/// Minimal generators of a derivation module up to `bound` (default `|m|`).
pub fn generators(module: &DerivationModule, bound: Option<u32>) -> Result<GeneratorSet> {
    minimal_generators(module, bound.unwrap_or_else(|| module.default_bound()), None, &mut |_| false)
}

/// Minimal free resolution of `D(𝒜,m)` (or `D_H(𝒜)`).
pub fn resolution(module: &DerivationModule, bound: Option<u32>) -> Result<FreeResolution> {
    let bound = bound.unwrap_or_else(|| module.default_bound());
    let l = module.dim();
    let total = module.multi.total();
    let mut free = false;
    let top = minimal_generators(module, bound, None, &mut |gens| {
        let s: u32 = gens.iter().map(|g| g.degree).sum();
        if module.kind == ModuleKind::Full && gens.len() == l && s == total && generic_rank(&module.ambient, gens) == l {
            free = true;
            return true;
        }
        false
    })?;
    if free {
        // Saito: the generators found form a basis, nothing beyond the bound can appear.
        let cert = saito_from_elements(module, &top.gens)?;
        if !cert.free {
            return Err(ArrError::Invalid("independent generators failed Saito's criterion".into()));
        }
        let gens = top.gens.clone();
        return Ok(FreeResolution {
            shifts: vec![top.degrees()],
            maps: vec![gens],
            pd: 0,
            certified_up_to: u32::MAX,
            minimal: true,
            dims: top.dims,
        });
    }
    resolve_from(&module.ambient, top, bound)
}

/// `pd_S D(𝒜,m)`, computed on the essentialization.
pub fn projective_dimension(multi: &Multiarrangement, bound: Option<u32>) -> Result<(usize, u32)> {
    if multi.base.is_empty() {
        return Ok((0, u32::MAX));
    }
    let (ess, _) = multi.essentialize();
    let res = resolution(&DerivationModule::of_multi(&ess), bound)?;
    Ok((res.pd, res.certified_up_to))
}

pub fn pd_exact(a: &Arrangement) -> Result<usize> {
    Ok(projective_dimension(&a.simple(), None)?.0)
}

/// Shape data of a plus-one generated module.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SpogReport {
    pub plus_one_generated: bool,
    pub strict: bool,
    pub po_exponents: Vec<u32>,
    pub level: Option<u32>,
}

pub fn spog_from_resolution(res: &FreeResolution, l: usize) -> SpogReport {
    let none = SpogReport { plus_one_generated: false, strict: false, po_exponents: Vec::new(), level: None };
    if res.pd != 1 || res.shifts[0].len() != l + 1 || res.shifts[1].len() != 1 {
        return none;
    }
    let s = res.shifts[1][0];
    if s == 0 {
        return none;
    }
    let level = s - 1;
    let Some(pos) = res.shifts[0].iter().rposition(|&d| d == level) else {
        return none;
    };
    // coefficients of the syzygy on generators of degree `level` are linear forms
    let f1 = FreeModule::new(res.maps[1][0].coeffs.len().max(1), vec![]);
    let _ = f1;
    let syz = &res.maps[1][0];
    let src = FreeModule::new(res_nvars(res), res.shifts[0].clone());
    let comps = src.to_polys(syz.degree, &syz.coeffs);
    let strict = res.shifts[0].iter().enumerate().any(|(k, &d)| d == level && !comps[k].is_zero());
    let mut po: Vec<u32> = res.shifts[0].clone();
    po.remove(pos);
    SpogReport { plus_one_generated: true, strict, po_exponents: po, level: Some(level) }
}

fn res_nvars(res: &FreeResolution) -> usize {
    // the top map lives in Der S, whose rank equals the number of variables
    let g = &res.maps[0][0];
    let mut n = 1;
    while FreeModule::new(n, vec![0; n]).dim(g.degree) < g.coeffs.len() {
        n += 1;
    }
    n
}

/// SPOG test for `D(𝒜)`.
pub fn spog_detect(a: &Arrangement, bound: Option<u32>) -> Result<SpogReport> {
    let (ess, _) = a.essentialize();
    let res = resolution(&DerivationModule::of(&ess), bound)?;
    Ok(spog_from_resolution(&res, ess.dim()))
}

/// Terao's polynomial `B = ∏ α_L` over `L ∈ 𝒜'` outside the image of a section of `𝒜' → 𝒜^H`.
#[derive(Clone, Debug)]
pub struct TeraoB {
    pub b: Poly,
    pub threshold: usize,
    /// Indices into `𝒜` of the chosen section.
    pub section: Vec<usize>,
    restricted_factors: Vec<Poly>,
    hyperplane: LinearForm,
}

pub fn terao_b(a: &Arrangement, h: &LinearForm, section: Option<&[usize]>) -> Result<TeraoB> {
    let (res, data) = a.restriction_data(h)?;
    let section: Vec<usize> = match section {
        Some(s) => {
            if s.len() != res.len() {
                return Err(ArrError::BadSection(format!("expected {} entries", res.len())));
            }
            for (k, &i) in s.iter().enumerate() {
                if data.trace_of.get(i).copied().flatten() != Some(k) {
                    return Err(ArrError::BadSection(format!("entry {} does not restrict to trace {}", i, k + 1)));
                }
            }
            s.to_vec()
        }
        None => (0..res.len()).map(|k| data.trace_of.iter().position(|t| *t == Some(k)).unwrap()).collect(),
    };
    let hi = a.index_of(h).unwrap();
    let mut b = Poly::one(a.dim());
    let mut restricted_factors = Vec::new();
    for (i, f) in a.forms().iter().enumerate() {
        if i == hi || section.contains(&i) {
            continue;
        }
        b = &b * &f.to_poly();
        restricted_factors.push(res.forms()[data.trace_of[i].unwrap()].to_poly());
    }
    Ok(TeraoB { b, threshold: a.len() - 1 - res.len(), section, restricted_factors, hyperplane: h.clone() })
}

impl TeraoB {
    /// `θ(α_H) ∈ (α_H, B)`.
    pub fn ideal_contains(&self, theta: &Derivation) -> bool {
        let h = &self.hyperplane;
        let g = theta.apply(&h.rational_coeffs());
        let j = h.pivot_variable();
        let l = theta.nvars();
        let aj = Rational::from_integer(h.coeffs()[j].clone());
        let mut sub = Poly::zero(l);
        for i in 0..l {
            if i != j && !h.coeffs()[i].is_zero() {
                sub = &sub + &Poly::var(l, i).scale(&(-Rational::from_integer(h.coeffs()[i].clone()) / &aj));
            }
        }
        let mut r = g.substitute(j, &sub).remove_var(j);
        for f in &self.restricted_factors {
            if r.is_zero() {
                return true;
            }
            match r.div_exact(f) {
                Some(q) => r = q,
                None => return false,
            }
        }
        true
    }
}

/// Terao factorization check: `χ(𝒜;t) = ∏ (t - d_i)`.
pub fn factorization_matches(a: &Arrangement, exps: &[u32]) -> bool {
    let roots: Vec<i64> = exps.iter().map(|&d| d as i64).collect();
    char_poly(a) == UPoly::from_roots(&roots)
}

/// Exact basis of the degree-`d` piece as derivations.
pub fn graded_basis(module: &DerivationModule, d: u32) -> Result<Vec<Derivation>> {
    Ok(exact_basis(module, d)?.iter().map(|g| module.derivation(g)).collect())
}

/// Integer content removed and leading sign fixed, for display.
pub fn normalize_derivation(theta: &Derivation) -> Derivation {
    let mut all: Vec<Rational> = Vec::new();
    for c in &theta.components {
        for (_, v) in c.terms() {
            all.push(v.clone());
        }
    }
    let mut g = BigInt::zero();
    let mut den = BigInt::one();
    for v in &all {
        den = num_integer::Integer::lcm(&den, v.denom());
    }
    for v in &all {
        g = num_integer::Integer::gcd(&g, &(v.numer() * (&den / v.denom())));
    }
    if g.is_zero() {
        return theta.clone();
    }
    let first_neg = theta.components.iter().find_map(|c| c.leading().map(|(_, v)| v.is_negative())).unwrap_or(false);
    let mut s = Rational::new(den, g);
    if first_neg {
        s = -s;
    }
    Derivation { degree: theta.degree, components: theta.components.iter().map(|c| c.scale(&s)).collect() }
}
