//! Graded submodules of free modules over `Q[x1..xn]`, handled one homogeneous
//! degree at a time: kernels, minimal generators and minimal free resolutions.
//!
//! Linear algebra runs modulo word-sized primes. Every exact claim is backed by
//! one of three facts about an integer matrix `M` and a prime `p`:
//! `rank_p M <= rank_Q M`; integer vectors that are independent mod `p` are
//! independent over `Q`; and projection of `ker_Q M` onto the free columns of
//! the mod-`p` echelon form is injective.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{ArrError, Result};
use crate::modular::{crt, primes, rational_reconstruct, ModEchelon, ModMatrix, ModRref, Prime};
use crate::monomial::{count_monomials, homogeneous_monomials, monomial_rank};
use crate::poly::{Monomial, Poly};
use crate::rational::Rational;

/// `⊕_j S(-shift_j)` over `S = Q[x1..x_nvars]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeModule {
    pub nvars: usize,
    pub shifts: Vec<u32>,
}

impl FreeModule {
    pub fn new(nvars: usize, shifts: Vec<u32>) -> Self {
        FreeModule { nvars, shifts }
    }

    pub fn rank(&self) -> usize {
        self.shifts.len()
    }

    fn piece(&self, d: u32, j: usize) -> usize {
        if self.shifts[j] > d {
            0
        } else {
            count_monomials(self.nvars, (d - self.shifts[j]) as usize)
        }
    }

    pub fn dim(&self, d: u32) -> usize {
        (0..self.rank()).map(|j| self.piece(d, j)).sum()
    }

    pub fn offset(&self, d: u32, j: usize) -> usize {
        (0..j).map(|k| self.piece(d, k)).sum()
    }

    pub fn index(&self, d: u32, j: usize, e: &[u32]) -> usize {
        self.offset(d, j) + monomial_rank(e)
    }

    /// `(component, exponent)` for every coordinate of the degree-`d` piece.
    pub fn coords(&self, d: u32) -> Vec<(usize, Vec<u32>)> {
        let mut out = Vec::with_capacity(self.dim(d));
        for j in 0..self.rank() {
            if self.shifts[j] <= d {
                for e in homogeneous_monomials(self.nvars, (d - self.shifts[j]) as usize) {
                    out.push((j, e));
                }
            }
        }
        out
    }

    /// Components of an element as polynomials.
    pub fn to_polys(&self, d: u32, v: &[BigInt]) -> Vec<Poly> {
        let mut out = vec![Poly::zero(self.nvars); self.rank()];
        for ((j, e), c) in self.coords(d).into_iter().zip(v) {
            if !c.is_zero() {
                out[j].add_term(Monomial(e), Rational::from_integer(c.clone()));
            }
        }
        out
    }

    pub fn from_polys(&self, d: u32, comps: &[Poly]) -> Option<Vec<BigInt>> {
        let mut v = vec![BigInt::zero(); self.dim(d)];
        for (j, p) in comps.iter().enumerate() {
            for (m, c) in p.terms() {
                if !c.denom().is_one() || m.degree() + self.shifts[j] != d {
                    return None;
                }
                v[self.index(d, j, &m.0)] = c.numer().clone();
            }
        }
        Some(v)
    }
}

/// Homogeneous element of a free module.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedElement {
    pub degree: u32,
    pub coeffs: Vec<BigInt>,
}

impl GradedElement {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn support(&self) -> Vec<(usize, &BigInt)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
    }
}

/// Divides by the content and fixes the sign of the first nonzero entry.
pub fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for c in v.iter() {
        g = g.gcd(c);
    }
    if g.is_zero() {
        return;
    }
    if v.iter().find(|c| !c.is_zero()).unwrap().is_negative() {
        g = -g;
    }
    for c in v.iter_mut() {
        *c = &*c / &g;
    }
}

/// Integer vector from rationals (common denominator cleared, made primitive).
pub fn clear_denominators(v: &[Rational]) -> Vec<BigInt> {
    let mut den = BigInt::one();
    for c in v {
        den = den.lcm(c.denom());
    }
    let mut out: Vec<BigInt> = v.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    make_primitive(&mut out);
    out
}

/// Precomputed data for multiplying elements of a free module by monomials.
pub struct Multiplier<'a> {
    module: &'a FreeModule,
    coords: HashMap<u32, Vec<(usize, Vec<u32>)>>,
}

impl<'a> Multiplier<'a> {
    pub fn new(module: &'a FreeModule) -> Self {
        Multiplier { module, coords: HashMap::new() }
    }

    fn coords(&mut self, d: u32) -> &Vec<(usize, Vec<u32>)> {
        let m = self.module;
        self.coords.entry(d).or_insert_with(|| m.coords(d))
    }

    /// Sparse image of `x^mono * g` as `(index, coefficient)` pairs.
    pub fn shift_sparse<'b>(&mut self, g: &'b GradedElement, mono: &[u32]) -> Vec<(usize, &'b BigInt)> {
        let t: u32 = mono.iter().sum();
        let nd = g.degree + t;
        let module = self.module;
        let coords = self.coords(g.degree).clone();
        let mut out = Vec::new();
        let mut e2 = vec![0u32; module.nvars];
        for (i, c) in g.support() {
            let (j, e) = &coords[i];
            for k in 0..module.nvars {
                e2[k] = e[k] + mono[k];
            }
            out.push((module.index(nd, *j, &e2), c));
        }
        out
    }

    pub fn shift(&mut self, g: &GradedElement, mono: &[u32]) -> GradedElement {
        let t: u32 = mono.iter().sum();
        let nd = g.degree + t;
        let mut coeffs = vec![BigInt::zero(); self.module.dim(nd)];
        for (i, c) in self.shift_sparse(g, mono) {
            coeffs[i] = c.clone();
        }
        GradedElement { degree: nd, coeffs }
    }
}

/// A homogeneous linear system with an exact membership test.
pub trait LinearSystem {
    fn cols(&self) -> usize;
    fn matrix_mod(&self, p: Prime) -> ModMatrix;
    fn verify(&self, v: &[BigInt]) -> bool;
}

/// Graded submodule of a free module cut out degree by degree by integer linear constraints.
pub trait GradedSystem {
    fn ambient(&self) -> &FreeModule;
    /// Constraint matrix of the degree-`d` piece; columns are the ambient coordinates.
    fn constraints_mod(&self, d: u32, p: Prime) -> ModMatrix;
    /// Exact membership of a degree-`d` ambient element.
    fn contains(&self, d: u32, v: &[BigInt]) -> bool;
}

struct AtDegree<'a, G: ?Sized> {
    sys: &'a G,
    d: u32,
}

impl<G: GradedSystem + ?Sized> LinearSystem for AtDegree<'_, G> {
    fn cols(&self) -> usize {
        self.sys.ambient().dim(self.d)
    }
    fn matrix_mod(&self, p: Prime) -> ModMatrix {
        self.sys.constraints_mod(self.d, p)
    }
    fn verify(&self, v: &[BigInt]) -> bool {
        self.sys.contains(self.d, v)
    }
}

/// Dense integer matrix viewed as the system `A v = 0`.
pub struct IntegerMatrix {
    pub cols: usize,
    pub rows: Vec<Vec<BigInt>>,
}

impl LinearSystem for IntegerMatrix {
    fn cols(&self) -> usize {
        self.cols
    }
    fn matrix_mod(&self, p: Prime) -> ModMatrix {
        let mut m = ModMatrix::zeros(self.rows.len(), self.cols);
        for (i, r) in self.rows.iter().enumerate() {
            for (j, c) in r.iter().enumerate() {
                if !c.is_zero() {
                    *m.at(i, j) = p.from_bigint(c);
                }
            }
        }
        m
    }
    fn verify(&self, v: &[BigInt]) -> bool {
        self.rows.iter().all(|r| r.iter().zip(v).fold(BigInt::zero(), |acc, (a, b)| acc + a * b).is_zero())
    }
}

const PRIME_SCHEDULE: [usize; 11] = [1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 40];
const BASE_ATTEMPTS: usize = 3;

/// Exact kernel vectors attached to free columns chosen by `select` on the mod-`p` echelon form.
///
/// Each returned vector is verified by `sys.verify`; on failure the base prime is changed.
pub fn lift_kernel(
    sys: &dyn LinearSystem,
    select: &mut dyn FnMut(&ModRref) -> Vec<usize>,
) -> Result<(ModRref, Vec<Vec<BigInt>>)> {
    let ps = primes();
    for attempt in 0..BASE_ATTEMPTS {
        let base_prime = ps[attempt * 41 % ps.len()];
        let base = sys.matrix_mod(base_prime).rref(base_prime);
        let chosen = select(&base);
        if chosen.is_empty() {
            return Ok((base, Vec::new()));
        }
        if let Some(vs) = lift_columns(sys, &base, &chosen) {
            return Ok((base, vs));
        }
    }
    Err(ArrError::Inconclusive("kernel reconstruction did not verify".into()))
}

fn lift_columns(sys: &dyn LinearSystem, base: &ModRref, chosen: &[usize]) -> Option<Vec<Vec<BigInt>>> {
    let ps = primes();
    let rank = base.rank();
    // residues[c][r] for chosen column c and pivot row r, one entry per prime used
    let mut used: Vec<Prime> = vec![base.prime];
    let mut residues: Vec<Vec<Vec<u64>>> = chosen
        .iter()
        .map(|&f| base.rows.iter().map(|row| vec![row[f]]).collect())
        .collect();
    let mut next = 0usize;
    for &target in PRIME_SCHEDULE.iter() {
        while used.len() < target && next < ps.len() {
            let pr = ps[next];
            next += 1;
            if used.contains(&pr) {
                continue;
            }
            let rr = sys.matrix_mod(pr).rref(pr);
            if rr.pivots != base.pivots {
                continue;
            }
            for (ci, &f) in chosen.iter().enumerate() {
                for r in 0..rank {
                    residues[ci][r].push(rr.rows[r][f]);
                }
            }
            used.push(pr);
        }
        if used.len() < target {
            return None;
        }
        let mut out = Vec::with_capacity(chosen.len());
        let mut ok = true;
        'cols: for (ci, &f) in chosen.iter().enumerate() {
            let mut v = vec![Rational::zero(); base.cols];
            v[f] = Rational::one();
            for r in 0..rank {
                let (x, m) = crt(&residues[ci][r], &used);
                match rational_reconstruct(&x, &m) {
                    Some(q) => v[base.pivots[r]] = -q,
                    None => {
                        ok = false;
                        break 'cols;
                    }
                }
            }
            let iv = clear_denominators(&v);
            if !sys.verify(&iv) {
                ok = false;
                break;
            }
            out.push(iv);
        }
        if ok {
            return Some(out);
        }
    }
    None
}

/// Certified basis of the degree-`d` piece.
pub fn exact_basis(sys: &dyn GradedSystem, d: u32) -> Result<Vec<GradedElement>> {
    let at = AtDegree { sys, d };
    if at.cols() == 0 {
        return Ok(Vec::new());
    }
    let (_, vs) = lift_kernel(&at, &mut |rr| rr.free_columns())?;
    Ok(vs.into_iter().map(|coeffs| GradedElement { degree: d, coeffs }).collect())
}

/// Upper bound for the dimension of the degree-`d` piece (exact when it is zero).
pub fn dim_upper(sys: &dyn GradedSystem, d: u32) -> usize {
    let cols = sys.ambient().dim(d);
    if cols == 0 {
        return 0;
    }
    let p = primes()[0];
    cols - sys.constraints_mod(d, p).rank(p)
}

/// Certified dimension of the degree-`d` piece.
pub fn exact_dim(sys: &dyn GradedSystem, d: u32) -> Result<usize> {
    if dim_upper(sys, d) == 0 {
        return Ok(0);
    }
    Ok(exact_basis(sys, d)?.len())
}

/// Smallest degree in `[from, bound]` with a nonzero piece, with a witness.
pub fn first_nonzero(sys: &dyn GradedSystem, from: u32, bound: u32) -> Result<Option<GradedElement>> {
    for d in from..=bound {
        if dim_upper(sys, d) > 0 {
            let at = AtDegree { sys, d };
            let (_, vs) = lift_kernel(&at, &mut |rr| rr.free_columns().into_iter().take(1).collect())?;
            return Ok(vs.into_iter().next().map(|coeffs| GradedElement { degree: d, coeffs }));
        }
    }
    Ok(None)
}

/// Minimal homogeneous generators found degree by degree.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub gens: Vec<GradedElement>,
    /// Every generator of degree at most this is present.
    pub certified_up_to: u32,
    /// Dimension of the module in each degree `0..=certified_up_to`.
    pub dims: Vec<usize>,
    /// Search ended because the caller's stop condition fired.
    pub stopped: bool,
}

impl GeneratorSet {
    pub fn degrees(&self) -> Vec<u32> {
        self.gens.iter().map(|g| g.degree).collect()
    }
}

fn echelon_of_multiples(
    mult: &mut Multiplier,
    gens: &[GradedElement],
    d: u32,
    cols: usize,
    pr: Prime,
) -> (ModEchelon, Vec<(usize, Vec<u32>)>) {
    let mut ech = ModEchelon::new(pr, cols);
    let mut kept = Vec::new();
    for (gi, g) in gens.iter().enumerate() {
        if g.degree >= d {
            continue;
        }
        for mono in homogeneous_monomials(mult.module.nvars, (d - g.degree) as usize) {
            let mut row = vec![0u64; cols];
            for (i, c) in mult.shift_sparse(g, &mono) {
                row[i] = pr.from_bigint(c);
            }
            if ech.insert(row) {
                kept.push((gi, mono));
            }
        }
    }
    (ech, kept)
}

/// Degree-by-degree minimal generators up to `bound`.
///
/// `known_dims[d]`, when given, is the exact dimension of the degree-`d` piece and
/// replaces the rank computation of the constraint matrix.
pub fn minimal_generators(
    sys: &dyn GradedSystem,
    bound: u32,
    known_dims: Option<&[usize]>,
    stop: &mut dyn FnMut(&[GradedElement]) -> bool,
) -> Result<GeneratorSet> {
    let ambient = sys.ambient().clone();
    let mut mult = Multiplier::new(&ambient);
    let mut gens: Vec<GradedElement> = Vec::new();
    let mut dims = Vec::new();
    let p0 = primes()[0];
    for d in 0..=bound {
        let cols = ambient.dim(d);
        let k = match known_dims.and_then(|kd| kd.get(d as usize)) {
            Some(&k) => k,
            None if cols == 0 => 0,
            None => cols - sys.constraints_mod(d, p0).rank(p0),
        };
        dims.push(k);
        if k == 0 {
            continue;
        }
        let (ech, _) = echelon_of_multiples(&mut mult, &gens, d, cols, p0);
        let rw = ech.rank();
        if rw >= k {
            continue;
        }
        let need = k - rw;
        let at = AtDegree { sys, d };
        let lower = gens.clone();
        let (base, new) = lift_kernel(&at, &mut |rr: &ModRref| {
            let (mut e, _) = echelon_of_multiples(&mut Multiplier::new(&ambient), &lower, d, cols, rr.prime);
            let mut chosen = Vec::new();
            for f in rr.free_columns() {
                if chosen.len() == need {
                    break;
                }
                if e.insert(rr.kernel_vector(f)) {
                    chosen.push(f);
                }
            }
            chosen
        })?;
        if base.free_columns().len() != k || new.len() != need {
            return Err(ArrError::Inconclusive(format!("inconsistent kernel dimension in degree {d}")));
        }
        if rw > 0 {
            certify_span_rank(&mut mult, &gens, &base, rw, d)?;
        }
        for coeffs in new {
            gens.push(GradedElement { degree: d, coeffs });
        }
        if stop(&gens) {
            return Ok(GeneratorSet { gens, certified_up_to: d, dims, stopped: true });
        }
    }
    Ok(GeneratorSet { gens, certified_up_to: bound, dims, stopped: false })
}

/// Proves that the multiples of lower generators span a space of rank exactly `rw` over Q.
fn certify_span_rank(mult: &mut Multiplier, gens: &[GradedElement], base: &ModRref, rw: usize, d: u32) -> Result<()> {
    let mut rows = Vec::new();
    for g in gens.iter().filter(|g| g.degree < d) {
        for mono in homogeneous_monomials(mult.module.nvars, (d - g.degree) as usize) {
            rows.push(mult.shift_sparse(g, &mono).into_iter().map(|(i, c)| (i, c.clone())).collect());
        }
    }
    if certify_rank_at_most(&rows, &base.free_columns(), rw)? {
        Ok(())
    } else {
        Err(ArrError::Inconclusive(format!("could not certify span rank in degree {d}")))
    }
}

/// Shows `rank_Q(rows) <= r` for vectors lying in a kernel whose mod-`p` free columns are `free`.
///
/// Projection onto `free` is injective on the rational kernel, so it suffices to
/// exhibit `|free| - r` exact relations among the projected columns.
pub fn certify_rank_at_most(rows: &[Vec<(usize, BigInt)>], free: &[usize], r: usize) -> Result<bool> {
    if r >= free.len() {
        return Ok(true);
    }
    let pos: HashMap<usize, usize> = free.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let dense: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let mut v = vec![BigInt::zero(); free.len()];
            for (i, c) in row {
                if let Some(&k) = pos.get(i) {
                    v[k] = c.clone();
                }
            }
            v
        })
        .collect();
    let sys = IntegerMatrix { cols: free.len(), rows: dense };
    let (_, vs) = lift_kernel(&sys, &mut |rr| rr.free_columns())?;
    Ok(vs.len() >= free.len() - r)
}

/// Kernel of `F -> G`, `e_j ↦ images[j]`.
pub struct SyzygySystem {
    pub source: FreeModule,
    pub target: FreeModule,
    pub images: Vec<GradedElement>,
}

impl SyzygySystem {
    pub fn new(target: FreeModule, images: Vec<GradedElement>) -> Self {
        let source = FreeModule::new(target.nvars, images.iter().map(|g| g.degree).collect());
        SyzygySystem { source, target, images }
    }

    fn image_sparse(&self, d: u32) -> Vec<Vec<(usize, BigInt)>> {
        let mut mult = Multiplier::new(&self.target);
        let mut cols = Vec::with_capacity(self.source.dim(d));
        for (j, e) in self.source.coords(d) {
            let col: Vec<(usize, BigInt)> =
                mult.shift_sparse(&self.images[j], &e).into_iter().map(|(i, c)| (i, c.clone())).collect();
            cols.push(col);
        }
        cols
    }
}

impl GradedSystem for SyzygySystem {
    fn ambient(&self) -> &FreeModule {
        &self.source
    }

    fn constraints_mod(&self, d: u32, p: Prime) -> ModMatrix {
        let cols = self.image_sparse(d);
        let mut m = ModMatrix::zeros(self.target.dim(d), cols.len());
        for (c, col) in cols.iter().enumerate() {
            for (i, v) in col {
                *m.at(*i, c) = p.from_bigint(v);
            }
        }
        m
    }

    fn contains(&self, d: u32, v: &[BigInt]) -> bool {
        let cols = self.image_sparse(d);
        let mut acc = vec![BigInt::zero(); self.target.dim(d)];
        for (c, col) in cols.iter().enumerate() {
            if v[c].is_zero() {
                continue;
            }
            for (i, x) in col {
                acc[*i] += x * &v[c];
            }
        }
        acc.iter().all(|x| x.is_zero())
    }
}

/// Evaluates each component of a graded element at a point, modulo `p`.
pub fn evaluate_mod(module: &FreeModule, g: &GradedElement, point: &[u64], p: Prime) -> Vec<u64> {
    let mut out = vec![0u64; module.rank()];
    for ((j, e), c) in module.coords(g.degree).into_iter().zip(&g.coeffs) {
        if c.is_zero() {
            continue;
        }
        let mut t = p.from_bigint(c);
        for (x, &k) in point.iter().zip(&e) {
            if k > 0 {
                t = p.mul(t, p.pow(*x, k as u64));
            }
        }
        out[j] = p.add(out[j], t);
    }
    out
}

fn scramble(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Lower bound for the rank of the matrix whose columns are `gens`, over the fraction field.
pub fn generic_rank(module: &FreeModule, gens: &[GradedElement]) -> usize {
    let mut best = 0;
    for (trial, &p) in primes().iter().skip(5).take(3).enumerate() {
        // Scrambled coordinates: affine progressions lie on forms like `x1 - 2x2 + x3`.
        let point: Vec<u64> = (0..module.nvars).map(|i| scramble((trial * 64 + i) as u64) % p.p).collect();
        let mut m = ModMatrix::zeros(module.rank(), gens.len());
        for (c, g) in gens.iter().enumerate() {
            for (r, v) in evaluate_mod(module, g, &point, p).into_iter().enumerate() {
                *m.at(r, c) = v;
            }
        }
        best = best.max(m.rank(p));
        if best == gens.len().min(module.rank()) {
            break;
        }
    }
    best
}

/// Graded minimal free resolution `0 -> F_pd -> ... -> F_0 -> M -> 0`.
#[derive(Clone, Debug)]
pub struct FreeResolution {
    /// Generator degrees of each `F_i`.
    pub shifts: Vec<Vec<u32>>,
    /// Images of the basis of `F_i` in `F_{i-1}` (in the ambient module for `i = 0`).
    pub maps: Vec<Vec<GradedElement>>,
    pub pd: usize,
    pub certified_up_to: u32,
    pub minimal: bool,
    /// Dimensions of the resolved module in degrees `0..=certified_up_to`.
    pub dims: Vec<usize>,
}

impl FreeResolution {
    /// Alternating sum of free-module dimensions in degree `d`.
    pub fn hilbert(&self, nvars: usize, d: u32) -> i64 {
        let mut s = 0i64;
        for (i, sh) in self.shifts.iter().enumerate() {
            let f = FreeModule::new(nvars, sh.clone());
            let v = f.dim(d) as i64;
            s += if i % 2 == 0 { v } else { -v };
        }
        s
    }

    pub fn hilbert_consistent(&self, nvars: usize) -> bool {
        self.dims.iter().enumerate().all(|(d, &k)| self.hilbert(nvars, d as u32) == k as i64)
    }

    /// `S[-a] ⊕ S[-b]^2 ...` for step `i`.
    pub fn format_step(&self, i: usize) -> String {
        format_shifts(&self.shifts[i])
    }

    pub fn format(&self) -> String {
        let mut parts: Vec<String> = (0..self.shifts.len()).rev().map(|i| self.format_step(i)).collect();
        parts.insert(0, "0".into());
        parts.push("M".into());
        parts.push("0".into());
        parts.join(" -> ")
    }
}

pub fn format_shifts(sh: &[u32]) -> String {
    let mut counts: Vec<(u32, usize)> = Vec::new();
    let mut sorted = sh.to_vec();
    sorted.sort();
    for s in sorted {
        match counts.last_mut() {
            Some((t, c)) if *t == s => *c += 1,
            _ => counts.push((s, 1)),
        }
    }
    counts
        .iter()
        .map(|(s, c)| if *c == 1 { format!("S[-{s}]") } else { format!("S[-{s}]^{c}") })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Resolves the submodule described by `sys`, generators certified up to `bound`.
pub fn resolve(sys: &dyn GradedSystem, bound: u32) -> Result<FreeResolution> {
    let top = minimal_generators(sys, bound, None, &mut |_| false)?;
    resolve_from(sys.ambient(), top, bound)
}

/// Continues a resolution from known minimal generators of the module.
pub fn resolve_from(ambient: &FreeModule, top: GeneratorSet, bound: u32) -> Result<FreeResolution> {
    let nvars = ambient.nvars;
    let dims = top.dims.clone();
    let mut shifts = vec![top.degrees()];
    let mut maps = vec![top.gens.clone()];
    let mut target = ambient.clone();
    let mut images = top.gens;
    let mut prev_dims = dims.clone();
    loop {
        let i = shifts.len() - 1;
        if images.is_empty() || generic_rank(&target, &images) == images.len() {
            return Ok(FreeResolution { pd: i, shifts, maps, certified_up_to: bound, minimal: true, dims });
        }
        if i >= nvars {
            return Err(ArrError::Inconclusive("resolution longer than the number of variables".into()));
        }
        let syz = SyzygySystem::new(target.clone(), images.clone());
        let known: Vec<usize> = (0..=bound).map(|d| syz.source.dim(d) - prev_dims[d as usize]).collect();
        let gs = minimal_generators(&syz, bound, Some(&known), &mut |_| false)?;
        if gs.gens.is_empty() {
            return Err(ArrError::Inconclusive(format!(
                "syzygies of step {i} not generated in degree <= {bound}"
            )));
        }
        prev_dims = known;
        target = syz.source.clone();
        images = gs.gens.clone();
        shifts.push(gs.degrees());
        maps.push(gs.gens);
    }
}

/// Converts an integer to `i64`, saturating (reporting only).
pub fn to_i64_sat(x: &BigInt) -> i64 {
    x.to_i64().unwrap_or(if x.is_negative() { i64::MIN } else { i64::MAX })
}
