//! Saturation driver: bounds `pd 𝒜` from every rule that applies to `𝒜`, its
//! deletions, restrictions and localizations, within a depth budget.

use std::collections::HashMap;

use super::rules::{flats_in_h, all_flats};
use super::search::{df_certificate, ipd_certificate, SearchBudget};
use super::{leaf, node, Certificate, Conclusion, Context, Premise, Role, Witness};
use crate::arrangement::{Arrangement, LinearForm};
use crate::derivation::{pd_exact, RestrictionKind};
use crate::error::{ArrError, Result};

#[derive(Clone, Debug)]
pub struct InferOptions {
    /// Levels of deletion the driver recurses through.
    pub depth: usize,
    /// Allow algebraic leaves (Ziegler-restriction freeness/pd, surjectivity on rank-3 localizations).
    pub algebraic: bool,
    /// Try `𝒜 ∪ {αᵢ ± αⱼ}` as free supersets at the top level.
    pub additions: bool,
    /// Search the IPD classes at the top level.
    pub classes: bool,
    /// Also compute the exact pd for comparison.
    pub cross_check: bool,
}

impl Default for InferOptions {
    fn default() -> Self {
        InferOptions { depth: 2, algebraic: true, additions: true, classes: true, cross_check: false }
    }
}

#[derive(Clone, Debug)]
pub struct PdInference {
    pub lo: usize,
    pub hi: usize,
    pub certificate: Certificate,
    /// Exact pd from a free resolution, when cross-checking was requested.
    pub exact: Option<usize>,
}

impl PdInference {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

/// Best lower and upper bound certificates found so far.
#[derive(Clone, Debug)]
struct Bounds {
    lo: (usize, Certificate),
    hi: (usize, Certificate),
}

impl Bounds {
    fn exact(&self) -> Option<usize> {
        (self.lo.0 == self.hi.0).then_some(self.lo.0)
    }

    fn absorb(&mut self, c: Certificate) {
        if let Some((lo, hi)) = c.pd_range() {
            if lo > self.lo.0 {
                self.lo = (lo, c.clone());
            }
            if hi < self.hi.0 {
                self.hi = (hi, c);
            }
        }
    }

    /// Single certificate for the interval: the shared node or a combination of both.
    fn certificate(&self, ctx: &Context) -> Result<Certificate> {
        let (l, h) = (&self.lo.1, &self.hi.1);
        if l.pd_range() == Some((self.lo.0, self.hi.0)) {
            return Ok(l.clone());
        }
        if h.pd_range() == Some((self.lo.0, self.hi.0)) {
            return Ok(h.clone());
        }
        node("pd_combine", ctx, Role::Whole, vec![Premise::new(Role::Whole, l.clone()), Premise::new(Role::Whole, h.clone())], None)
    }
}

struct Driver {
    opts: InferOptions,
    memo: HashMap<(Arrangement, usize), Bounds>,
}

fn conclusion_is(c: &Certificate, f: impl Fn(&Conclusion) -> bool) -> bool {
    f(&c.conclusion)
}

impl Driver {
    fn bounds_cert(&self, a: &Arrangement, b: &Bounds) -> Result<Certificate> {
        b.certificate(&Context::single(a))
    }

    fn pd(&mut self, a: &Arrangement, depth: usize) -> Result<Bounds> {
        let key = (a.canonical(), depth);
        if let Some(b) = self.memo.get(&key) {
            return Ok(b.clone());
        }
        let b = self.pd_uncached(a, depth)?;
        self.memo.insert(key, b.clone());
        Ok(b)
    }

    fn pd_uncached(&mut self, a: &Arrangement, depth: usize) -> Result<Bounds> {
        let ctx = Context::single(a);
        let axiom = leaf::pd_bound(&a.simple())?;
        let cap = axiom.pd_range().unwrap().1;
        let mut b = Bounds { lo: (0, axiom.clone()), hi: (cap, axiom) };
        if b.exact().is_some() {
            return Ok(b);
        }
        // Combinatorial freeness and the rank-3 class of pd one.
        let df = df_certificate(a)?;
        if matches!(df.conclusion, Conclusion::Member { .. }) {
            b.absorb(node("sf_free", &ctx, Role::Whole, vec![Premise::new(Role::Whole, df)], None)?);
            return Ok(b);
        }
        if a.rank() == 3 {
            if let Some(c) = ipd_certificate(a, 1, &SearchBudget::default())? {
                b.absorb(c);
                return Ok(b);
            }
        }
        self.yoshinaga(a, &mut b)?;
        if b.exact().is_some() || depth == 0 {
            return Ok(b);
        }
        for h in a.canonical().forms() {
            self.along(a, h, depth, &mut b)?;
            if b.exact().is_some() {
                return Ok(b);
            }
        }
        Ok(b)
    }

    /// Freeness decided through the Ziegler restriction onto the first hyperplane.
    fn yoshinaga(&mut self, a: &Arrangement, b: &mut Bounds) -> Result<()> {
        for h in a.canonical().forms() {
            let pctx = Context::pair(a, h)?;
            let b2 = leaf::computed_b2(&pctx)?;
            let upper = matches!(&b2.conclusion, Conclusion::B2 { report } if report.upper);
            let mut prem = vec![Premise::new(Role::Whole, b2)];
            if upper {
                if !self.opts.algebraic {
                    continue;
                }
                let z = pctx.subject(&Role::ZieglerRestricted)?;
                match leaf::computed_freeness(&z) {
                    Ok(c) => prem.push(Premise::new(Role::ZieglerRestricted, c)),
                    Err(ArrError::Inconclusive(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
            b.absorb(node("yoshinaga", &pctx, Role::Whole, prem, None)?);
            return Ok(());
        }
        Ok(())
    }

    /// pd facts for every localization at flats of `L(𝒜^H)` with codimension in `codims`.
    fn localized(&mut self, a: &Arrangement, h: &LinearForm, deleted: bool, min_codim: usize, max_codim: usize, depth: usize) -> Result<Vec<Premise>> {
        let pctx = Context::pair(a, h)?;
        let mut out = Vec::new();
        for (c, x, center) in flats_in_h(a, h)? {
            if c < min_codim || c > max_codim || center {
                continue;
            }
            let role = if deleted { Role::DeletedLocalized { flat: x.format() } } else { Role::Localized { flat: x.format() } };
            let sub = pctx.subject(&role)?.base;
            let bb = self.pd(&sub, depth)?;
            out.push(Premise::new(role, self.bounds_cert(&sub, &bb)?));
        }
        Ok(out)
    }

    fn nmpd(&mut self, a: &Arrangement, h: &LinearForm, deleted: bool, global: &Bounds, depth: usize) -> Result<Option<Certificate>> {
        let pctx = Context::pair(a, h)?;
        let base_arr = if deleted { a.delete(h)? } else { a.clone() };
        let mut prem = vec![Premise::new(if deleted { Role::Deleted } else { Role::Whole }, self.bounds_cert(&base_arr, global)?)];
        prem.extend(self.localized(a, h, deleted, 4, global.hi.0 + 2, depth)?);
        Ok(node("nmpd_cond", &pctx, Role::Whole, prem, Some(Witness::Deleted { deleted })).ok())
    }

    fn local_surjectivity(&mut self, a: &Arrangement, h: &LinearForm, b2: &Certificate) -> Result<Option<Certificate>> {
        let pctx = Context::pair(a, h)?;
        if conclusion_is(b2, |c| matches!(c, Conclusion::B2 { report } if report.b2_equality)) {
            return Ok(Some(node("local_surjectivity_b2", &pctx, Role::Whole, vec![Premise::new(Role::Whole, b2.clone())], None)?));
        }
        let mut prem = Vec::new();
        for (c, x, _) in flats_in_h(a, h)? {
            if c != 3 {
                continue;
            }
            let loc = a.localization(&x)?;
            let lctx = Context::pair(&loc, h)?;
            let role = Role::Localized { flat: x.format() };
            if let Some(cs) = super::search::cs3_certificate(&loc, h)? {
                prem.push(Premise::new(role, cs));
                continue;
            }
            let dl = loc.delete(h)?;
            let dfree = df_certificate(&dl)?;
            if matches!(dfree.conclusion, Conclusion::Member { .. }) {
                let f = node("sf_free", &Context::single(&dl), Role::Whole, vec![Premise::new(Role::Whole, dfree)], None)?;
                prem.push(Premise::new(role, node("free_surjection", &lctx, Role::Whole, vec![Premise::new(Role::Deleted, f)], None)?));
                continue;
            }
            if !self.opts.algebraic {
                return Ok(None);
            }
            prem.push(Premise::new(role, leaf::computed_surjectivity(&lctx, RestrictionKind::Euler)?));
        }
        Ok(node("local_surjectivity", &pctx, Role::Whole, prem, None).ok())
    }

    fn along(&mut self, a: &Arrangement, h: &LinearForm, depth: usize, b: &mut Bounds) -> Result<()> {
        let l = a.rank();
        let pctx = Context::pair(a, h)?;
        let deleted = a.delete(h)?;
        let restricted = a.restriction(h)?;
        let d = self.pd(&deleted, depth - 1)?;
        let r = self.pd(&restricted, depth - 1)?;
        let dc = self.bounds_cert(&deleted, &d)?;
        let rc = self.bounds_cert(&restricted, &r)?;

        // Two of three free.
        if d.hi.0 == 0 && (r.hi.0 == 0 || r.lo.0 >= 1) {
            let chi = leaf::computed_chi_divides(&pctx)?;
            let prem = vec![Premise::new(Role::Deleted, dc.clone()), Premise::new(Role::Restricted, rc.clone()), Premise::new(Role::Whole, chi)];
            b.absorb(node("zero_table", &pctx, Role::Whole, prem, None)?);
            if b.exact().is_some() {
                return Ok(());
            }
        }

        let b2 = leaf::computed_b2(&pctx)?;
        let eq = conclusion_is(&b2, |c| matches!(c, Conclusion::B2 { report } if report.b2_equality));

        // Division theorem: needs A NMPD, which the current upper bound may already give.
        if eq {
            if let Some(n) = self.nmpd(a, h, false, b, depth - 1)? {
                let prem = vec![
                    Premise::new(Role::Whole, b2.clone()),
                    Premise::new(Role::Whole, n),
                    Premise::new(Role::Deleted, dc.clone()),
                    Premise::new(Role::Restricted, rc.clone()),
                ];
                if let Ok(c) = node("main_theorem", &pctx, Role::Whole, prem, None) {
                    b.absorb(c);
                }
            }
        }

        // Addition theorem along H.
        if b.exact().is_none() {
            if let Some(n) = self.nmpd(a, h, true, &d, depth - 1)? {
                if let Some(ls) = self.local_surjectivity(a, h, &b2)? {
                    if conclusion_is(&ls, |c| *c == Conclusion::LocalSurjectivity { value: true }) {
                        let prem = vec![
                            Premise::new(Role::Whole, n),
                            Premise::new(Role::Whole, ls),
                            Premise::new(Role::Deleted, dc.clone()),
                            Premise::new(Role::Restricted, rc.clone()),
                        ];
                        if let Ok(c) = node("pd_addition", &pctx, Role::Whole, prem, None) {
                            b.absorb(c);
                        }
                    }
                }
            }
        }

        // Maximal pd propagates from A' under the b2 equality.
        if b.exact().is_none() && eq && l >= 4 && d.lo.0 + 2 >= l {
            let mut prem = vec![Premise::new(Role::Whole, b2.clone()), Premise::new(Role::Deleted, dc.clone())];
            for (c, x, center) in all_flats(a) {
                if c < 3 || center {
                    continue;
                }
                let loc = a.localization(&x)?;
                let bb = self.pd(&loc, depth - 1)?;
                prem.push(Premise::new(Role::Localized { flat: x.format() }, self.bounds_cert(&loc, &bb)?));
            }
            if let Ok(c) = node("max_pd", &pctx, Role::Whole, prem, None) {
                b.absorb(c);
            }
        }

        // Yoshinaga-type bound from the Ziegler restriction.
        if b.exact().is_none() && self.opts.algebraic && l >= 5 {
            let loc = self.localized(a, h, false, 3, l, depth - 1)?;
            if loc.iter().all(|p| p.cert.pd_range().is_some_and(|r| r.1 == 0)) {
                if let Ok(lf) = node("local_freeness", &pctx, Role::Whole, loc, None) {
                    let z = pctx.subject(&Role::ZieglerRestricted)?;
                    if let Ok(zc) = leaf::computed_pd(&z) {
                        let prem = vec![Premise::new(Role::Whole, lf.clone()), Premise::new(Role::ZieglerRestricted, zc.clone())];
                        if let Ok(c) = node("yoshinaga_pd", &pctx, Role::Whole, prem, Some(Witness::Clause { clause: 1 })) {
                            b.absorb(c);
                        }
                        let prem = vec![
                            Premise::new(Role::Whole, lf),
                            Premise::new(Role::ZieglerRestricted, zc),
                            Premise::new(Role::Whole, b2.clone()),
                            Premise::new(Role::Restricted, rc.clone()),
                        ];
                        if let Ok(c) = node("yoshinaga_pd", &pctx, Role::Whole, prem, Some(Witness::Clause { clause: 2 })) {
                            b.absorb(c);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `pd 𝒜 ≤ 1` from a free superset `𝒜 ∪ {L}` with `L = αᵢ ± αⱼ`.
    fn additions(&mut self, a: &Arrangement, b: &mut Bounds) -> Result<()> {
        let forms = a.canonical().forms().to_vec();
        for i in 0..forms.len() {
            for j in i + 1..forms.len() {
                for sign in [1i64, -1] {
                    let raw: Vec<crate::rational::Rational> = forms[i]
                        .rational_coeffs()
                        .iter()
                        .zip(forms[j].rational_coeffs())
                        .map(|(x, y)| x + &(y * crate::rational::Rational::from_integer(sign.into())))
                        .collect();
                    let Ok(f) = LinearForm::normalize(&raw) else { continue };
                    if a.contains(&f) {
                        continue;
                    }
                    let big = a.add(&f)?;
                    let df = df_certificate(&big)?;
                    if !matches!(df.conclusion, Conclusion::Member { .. }) {
                        continue;
                    }
                    let free = node("sf_free", &Context::single(&big), Role::Whole, vec![Premise::new(Role::Whole, df)], None)?;
                    let pctx = Context::pair(&big, &f)?;
                    b.absorb(node("spog_deletion", &pctx, Role::Deleted, vec![Premise::new(Role::Whole, free)], None)?);
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}

/// Tightest pd interval the rules certify for `𝒜`.
pub fn infer_pd(a: &Arrangement, opts: &InferOptions) -> Result<PdInference> {
    let mut drv = Driver { opts: opts.clone(), memo: HashMap::new() };
    let mut b = drv.pd(a, opts.depth)?;
    if b.exact().is_none() && opts.additions && b.hi.0 > 1 {
        drv.additions(a, &mut b)?;
    }
    if b.exact().is_none() && opts.classes {
        for k in b.lo.0..=b.hi.0 {
            if let Some(c) = ipd_certificate(a, k, &SearchBudget::default())? {
                b.absorb(c);
                break;
            }
        }
    }
    let certificate = b.certificate(&Context::single(a))?;
    let exact = if opts.cross_check { Some(pd_exact(a)?) } else { None };
    Ok(PdInference { lo: b.lo.0, hi: b.hi.0, certificate, exact })
}
