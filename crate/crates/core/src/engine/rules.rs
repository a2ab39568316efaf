//! The rule table. `derive` is shared by certificate construction and replay.

use num_traits::{ToPrimitive, Zero};

use super::{form_from_json, Certificate, Class, Conclusion, Context, PathStep, Role, Witness};
use crate::arrangement::{Arrangement, Flat, Multiarrangement};
use crate::derivation::{find_free_basis, projective_dimension, surjectivity, FreeBasisOutcome, RestrictionKind};
use crate::error::{ArrError, Result};
use crate::lattice::{char_poly, IntersectionLattice};
use crate::multib2::{b2_equality_check, b2_equality_holds, B2Report};
use crate::upoly::UPoly;

const AMBIGUITY: &str = "ambiguity: class clause read with a bound inner index (NMPD of A') and j >= 2";

fn bad(rule: &str, msg: impl Into<String>) -> ArrError {
    ArrError::Invalid(format!("rule `{rule}`: {}", msg.into()))
}

fn need(ok: bool, rule: &str, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(bad(rule, msg))
    }
}

/// Largest possible projective dimension: `rank − 2`, or 0.
pub(crate) fn pd_cap(m: &Multiarrangement) -> usize {
    m.base.rank().saturating_sub(2)
}

/// Exponents read off a fully split `χ(𝒜;t) = ∏(t − dᵢ)`.
pub(crate) fn chi_exponents(a: &Arrangement) -> Option<Vec<u32>> {
    let mut p = char_poly(a);
    let mut out = Vec::new();
    while p.degree().unwrap_or(0) > 0 {
        let r = p.integer_roots().into_iter().find(|r| r >= &0.into())?;
        p = p.div_exact(&UPoly::linear_root(r.to_i64()?))?;
        out.push(r.to_u32()?);
    }
    out.sort_unstable();
    Some(out)
}

/// Flats of `L(𝒜)` contained in `H`, as (codimension, flat, is the center).
pub(crate) fn flats_in_h(a: &Arrangement, h: &crate::arrangement::LinearForm) -> Result<Vec<(usize, Flat, bool)>> {
    let hi = a.index_of(h).ok_or_else(|| ArrError::NotMember(h.to_string()))?;
    let lat = IntersectionLattice::build(a);
    let r = lat.rank();
    let mut out = Vec::new();
    for c in 1..=r {
        for x in lat.level(c).iter().filter(|x| x.members.contains(hi)) {
            out.push((c, x.flat.clone(), c == r));
        }
    }
    Ok(out)
}

/// All flats of `L(𝒜)` other than the ambient space, as (codimension, flat, is the center).
pub(crate) fn all_flats(a: &Arrangement) -> Vec<(usize, Flat, bool)> {
    let lat = IntersectionLattice::build(a);
    let r = lat.rank();
    let mut out = Vec::new();
    for c in 1..=r {
        for x in lat.level(c) {
            out.push((c, x.flat.clone(), c == r));
        }
    }
    out
}

struct Facts<'a> {
    ctx: &'a Context,
    prems: &'a [Certificate],
    rule: &'a str,
}

impl<'a> Facts<'a> {
    fn role_eq(&self, a: &Role, b: &Role) -> bool {
        let flat = |s: &str| self.ctx.flat(s).ok();
        match (a, b) {
            (Role::Localized { flat: x }, Role::Localized { flat: y })
            | (Role::DeletedLocalized { flat: x }, Role::DeletedLocalized { flat: y }) => {
                flat(x).is_some() && flat(x) == flat(y)
            }
            _ => a == b,
        }
    }

    fn on(&'a self, role: &'a Role) -> impl Iterator<Item = &'a Conclusion> + 'a {
        self.prems
            .iter()
            .filter(move |p| p.link.as_ref().is_some_and(|l| self.role_eq(l, role)))
            .map(|p| &p.conclusion)
    }

    fn any(&self, role: &Role, pred: impl Fn(&Conclusion) -> bool) -> bool {
        self.on(role).any(pred)
    }

    fn has_pd(&self, role: &Role) -> bool {
        self.on(role).any(|c| c.pd_range().is_some())
    }

    /// Intersection of all pd facts on `role`, within `[0, rank − 2]`.
    fn pd(&self, role: &Role) -> Result<(usize, usize)> {
        let mut lo = 0;
        let mut hi = pd_cap(&self.ctx.subject(role)?);
        for (l, h) in self.on(role).filter_map(|c| c.pd_range()) {
            lo = lo.max(l);
            hi = hi.min(h);
        }
        if lo > hi {
            return Err(bad(self.rule, format!("premises on {role} contradict each other")));
        }
        Ok((lo, hi))
    }

    fn free(&self, role: &Role) -> Option<Vec<u32>> {
        self.on(role).find_map(|c| match c {
            Conclusion::Free { exponents } => Some(exponents.clone()),
            _ => None,
        })
    }

    fn b2(&self) -> Option<&'a B2Report> {
        self.prems.iter().filter(|p| p.link == Some(Role::Whole)).find_map(|p| match &p.conclusion {
            Conclusion::B2 { report } => Some(report),
            _ => None,
        })
    }

    fn b2_equality(&self) -> bool {
        self.b2().is_some_and(|r| r.b2_equality)
    }

    fn flag(&self, c: &Conclusion) -> bool {
        self.any(&Role::Whole, |x| x == c)
    }

    fn member(&self, role: &Role, pred: impl Fn(&Class) -> bool) -> bool {
        self.any(role, |c| matches!(c, Conclusion::Member { class } if pred(class)))
    }

    fn ipd_level(&self, role: &Role) -> Option<usize> {
        self.on(role).find_map(|c| match c {
            Conclusion::Member { class: Class::Ipd { k, .. } } => Some(*k),
            _ => None,
        })
    }

    fn stair_free(&self, role: &Role) -> bool {
        self.member(role, |c| matches!(c, Class::Df | Class::Sf | Class::Ipd { k: 0, .. }))
    }
}

fn pd_conclusion(rule: &str, subject: &Multiarrangement, lo: usize, hi: usize) -> Result<Conclusion> {
    let hi = hi.min(pd_cap(subject));
    if lo > hi {
        return Err(bad(rule, format!("derived an empty pd interval [{lo}, {hi}]")));
    }
    Ok(Conclusion::Pd { lo, hi })
}

/// Convex hull of `f(x, y)` over `x ∈ [a.0, a.1]`, `y ∈ [b.0, b.1]`.
fn hull(a: (usize, usize), b: (usize, usize), f: impl Fn(usize, usize) -> (usize, usize)) -> (usize, usize) {
    let mut lo = usize::MAX;
    let mut hi = 0;
    for x in a.0..=a.1 {
        for y in b.0..=b.1 {
            let (l, h) = f(x, y);
            lo = lo.min(l);
            hi = hi.max(h);
        }
    }
    (lo, hi)
}

fn multiset_minus(big: &[u32], small: &[u32]) -> Option<Vec<u32>> {
    let mut rest = big.to_vec();
    for d in small {
        let i = rest.iter().position(|x| x == d)?;
        rest.remove(i);
    }
    Some(rest)
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v
}

/// Exponents of `target` in the addition–deletion triple, from the other two.
fn add_del_exponents(target: &Role, w: Option<&Vec<u32>>, d: Option<&Vec<u32>>, r: Option<&Vec<u32>>) -> Option<Vec<u32>> {
    match target {
        Role::Whole => {
            let (d, r) = (d?, r?);
            let rest = multiset_minus(d, r)?;
            (rest.len() == 1).then(|| sorted([r.clone(), vec![rest[0] + 1]].concat()))
        }
        Role::Deleted => {
            let (w, r) = (w?, r?);
            let rest = multiset_minus(w, r)?;
            (rest.len() == 1 && rest[0] >= 1).then(|| sorted([r.clone(), vec![rest[0] - 1]].concat()))
        }
        Role::Restricted => {
            let (w, d) = (w?, d?);
            for (i, &x) in w.iter().enumerate() {
                let mut lowered = w.clone();
                if x == 0 {
                    continue;
                }
                lowered[i] = x - 1;
                if sorted(lowered) == sorted(d.clone()) {
                    let mut r = w.clone();
                    r.remove(i);
                    return Some(sorted(r));
                }
            }
            None
        }
        _ => None,
    }
}

fn map_witness(rule: &str, w: Option<&Witness>) -> Result<RestrictionKind> {
    match w {
        Some(Witness::Map { map }) => Ok(*map),
        _ => Err(bad(rule, "missing map witness")),
    }
}

fn clause_witness(rule: &str, w: Option<&Witness>) -> Result<u32> {
    match w {
        Some(Witness::Clause { clause }) => Ok(*clause),
        _ => Err(bad(rule, "missing clause witness")),
    }
}

/// Divisional flag check; rank ≤ 2 needs no step.
pub(crate) fn check_flag(a: &Arrangement, forms: &[crate::arrangement::LinearForm]) -> Result<bool> {
    let mut cur = a.clone();
    if forms.len() != cur.rank().saturating_sub(2) {
        return Ok(false);
    }
    for f in forms {
        if !cur.contains(f) || !b2_equality_holds(&cur, f)? {
            return Ok(false);
        }
        cur = cur.restriction(f)?;
    }
    Ok(true)
}

fn saito_free(a: &Arrangement) -> Result<bool> {
    if a.is_empty() {
        return Ok(true);
    }
    let m = a.simple();
    Ok(matches!(find_free_basis(&m, m.total())?, FreeBasisOutcome::Free(_)))
}

/// Replays a stair-free path; returns the failing step and reason on error.
pub(crate) fn check_path(a: &Arrangement, steps: &[PathStep]) -> Result<()> {
    let mut cur = a.clone();
    for (i, s) in steps.iter().enumerate() {
        let fail = |reason: &str| ArrError::PathInvalid { index: i, reason: reason.to_string() };
        match s {
            PathStep::Restrict { form } => {
                let f = form_from_json(form).map_err(|e| fail(&e.to_string()))?;
                if !cur.contains(&f) {
                    return Err(fail("restriction hyperplane not in the arrangement"));
                }
                if !b2_equality_holds(&cur, &f)? {
                    return Err(fail("b2 equality fails"));
                }
                cur = cur.restriction(&f)?;
            }
            PathStep::Add { form } | PathStep::Delete { form } => {
                let f = form_from_json(form).map_err(|e| fail(&e.to_string()))?;
                let next = match s {
                    PathStep::Add { .. } => cur.add(&f),
                    _ => cur.delete(&f),
                }
                .map_err(|e| fail(&e.to_string()))?;
                if !saito_free(&cur)? || !saito_free(&next)? {
                    return Err(fail("free path step between non-free arrangements"));
                }
                cur = next;
            }
        }
    }
    if cur.rank() > 2 {
        return Err(ArrError::PathInvalid { index: steps.len(), reason: "path ends above rank 2".into() });
    }
    Ok(())
}

pub(crate) fn derive(
    rule: &str,
    ctx: &Context,
    target: &Role,
    prems: &[Certificate],
    witness: Option<&Witness>,
) -> Result<(Conclusion, Vec<String>)> {
    let f = Facts { ctx, prems, rule };
    let subject = ctx.subject(target)?;
    let l = ctx.rank();
    let mut notes = Vec::new();
    let whole = Role::Whole;
    let conclusion = match rule {
        // ---- leaves ----
        "computed_pd" => {
            need(*target == whole, rule, "leaf must target the whole context")?;
            let (pd, cert) = projective_dimension(&subject, None)?;
            if cert != u32::MAX {
                notes.push(format!("resolution certified up to degree {cert}"));
            }
            pd_conclusion(rule, &subject, pd, pd)?
        }
        "computed_freeness" => {
            need(*target == whole, rule, "leaf must target the whole context")?;
            if subject.base.is_empty() {
                Conclusion::Free { exponents: vec![0; subject.dim()] }
            } else {
                match find_free_basis(&subject, subject.total())? {
                    FreeBasisOutcome::Free(c) => Conclusion::Free { exponents: sorted(c.degrees) },
                    FreeBasisOutcome::NotFree { .. } => pd_conclusion(rule, &subject, 1, usize::MAX)?,
                    FreeBasisOutcome::NotFound { certified_up_to } => {
                        return Err(ArrError::Inconclusive(format!("freeness undecided up to degree {certified_up_to}")))
                    }
                }
            }
        }
        "pd_bound" => pd_conclusion(rule, &subject, 0, usize::MAX)?,
        "computed_b2" => {
            need(*target == whole, rule, "leaf must target the whole context")?;
            Conclusion::B2 { report: b2_equality_check(ctx.simple()?, ctx.h()?)? }
        }
        "computed_chi_divides" => {
            need(*target == whole, rule, "leaf must target the whole context")?;
            let a = ctx.simple()?;
            let r = a.restriction(ctx.h()?)?;
            Conclusion::ChiDivides { value: char_poly(&r).divides(&char_poly(a)) }
        }
        "computed_surjectivity" => {
            need(*target == whole, rule, "leaf must target the whole context")?;
            let map = map_witness(rule, witness)?;
            let rep = surjectivity(map, ctx.simple()?, ctx.h()?, None)?;
            notes.push(format!("target generators certified up to degree {}", rep.certified_up_to));
            Conclusion::Surjective { map, value: rep.surjective }
        }
        "df_flag" => {
            need(*target == whole, rule, "leaf must target the whole context")?;
            let forms = match witness {
                Some(Witness::Flag { forms }) => forms.iter().map(|v| form_from_json(v)).collect::<Result<Vec<_>>>()?,
                _ => return Err(bad(rule, "missing flag witness")),
            };
            need(check_flag(ctx.simple()?, &forms)?, rule, "not a divisional flag")?;
            Conclusion::Member { class: Class::Df }
        }
        "df_exhaustive" => {
            need(*target == whole, rule, "leaf must target the whole context")?;
            let a = ctx.simple()?;
            need(super::search::divisional_flag(a)?.is_none(), rule, "a divisional flag exists")?;
            Conclusion::NotMember { class: Class::Df }
        }
        "sf_path" => {
            need(*target == whole, rule, "leaf must target the whole context")?;
            let steps = match witness {
                Some(Witness::Path { steps }) => steps,
                _ => return Err(bad(rule, "missing path witness")),
            };
            check_path(ctx.simple()?, steps)?;
            Conclusion::Member { class: Class::Sf }
        }
        "ipd_low_rank" => {
            let r = subject.base.rank();
            need(subject.is_simple() && r <= 2, rule, "rank above 2")?;
            Conclusion::Member { class: Class::Ipd { k: 0, i: r } }
        }
        "ipd1_irreducible" => {
            need(*target == whole && l == 3, rule, "needs rank 3")?;
            let (e, _) = ctx.simple()?.essentialize();
            let chi0 = char_poly(&e).div_exact(&UPoly::linear_root(1)).ok_or_else(|| bad(rule, "t-1 does not divide chi"))?;
            need(chi0.is_irreducible() == Some(true), rule, "reduced characteristic polynomial is reducible")?;
            Conclusion::Member { class: Class::Ipd { k: 1, i: 3 } }
        }
        "cs3_multiplicity" => {
            need(*target == whole && l == 3, rule, "needs rank 3")?;
            let zr = ctx.simple()?.ziegler_restriction(ctx.h()?)?;
            need(zr.mult.iter().filter(|&&m| m > 1).count() <= 1, rule, "two points of multiplicity above one")?;
            Conclusion::Member { class: Class::Cs3 }
        }

        // ---- freeness ----
        "terao_factorization" | "sf_free" => {
            let a = subject.base.clone();
            need(subject.is_simple(), rule, "needs a simple arrangement")?;
            if rule == "sf_free" {
                need(f.stair_free(target), rule, "no stair-free premise")?;
            } else {
                need(f.pd(target)?.1 == 0, rule, "no freeness premise")?;
            }
            let exps = chi_exponents(&a).ok_or_else(|| bad(rule, "characteristic polynomial does not split over Z"))?;
            Conclusion::Free { exponents: exps }
        }
        "addition_deletion" => {
            let (w, d, r) = (f.free(&Role::Whole), f.free(&Role::Deleted), f.free(&Role::Restricted));
            let e = add_del_exponents(target, w.as_ref(), d.as_ref(), r.as_ref())
                .ok_or_else(|| bad(rule, "exponents of the two free members are not compatible"))?;
            Conclusion::Free { exponents: e }
        }
        "division" => {
            need(*target == whole, rule, "targets A")?;
            need(f.b2_equality(), rule, "needs the b2 equality")?;
            let r = f.free(&Role::Restricted).ok_or_else(|| bad(rule, "needs A^H free"))?;
            let rep = f.b2().unwrap();
            Conclusion::Free { exponents: sorted([r, vec![(rep.size - rep.restricted_size) as u32]].concat()) }
        }
        "yoshinaga" => {
            need(*target == whole, rule, "targets A")?;
            let rep = f.b2().ok_or_else(|| bad(rule, "needs the b2 report"))?;
            if !rep.upper {
                pd_conclusion(rule, &subject, 1, usize::MAX)?
            } else if let Some(z) = f.free(&Role::ZieglerRestricted) {
                Conclusion::Free { exponents: sorted([vec![1], z].concat()) }
            } else {
                need(f.pd(&Role::ZieglerRestricted)?.0 >= 1, rule, "needs the Ziegler restriction's freeness decided")?;
                pd_conclusion(rule, &subject, 1, usize::MAX)?
            }
        }

        // ---- projective dimension ----
        "pd_combine" => {
            need(f.has_pd(target), rule, "no pd premise")?;
            let (lo, hi) = f.pd(target)?;
            pd_conclusion(rule, &subject, lo, hi)?
        }
        "localization_bound" => {
            need(matches!(target, Role::Localized { .. }), rule, "targets a localization")?;
            let (_, hi) = f.pd(&whole)?;
            pd_conclusion(rule, &subject, 0, hi)?
        }
        "ipd_pd" => {
            let k = f.ipd_level(target).ok_or_else(|| bad(rule, "no IPD membership"))?;
            pd_conclusion(rule, &subject, k, k)?
        }
        "spog_deletion" => {
            need(*target == Role::Deleted, rule, "targets A'")?;
            need(f.pd(&whole)?.1 == 0, rule, "needs A free")?;
            pd_conclusion(rule, &subject, 0, 1)?
        }
        "pd_addition" | "pd_deletion" | "pd_restriction" => {
            need(f.flag(&Conclusion::Nmpd { deleted: true }), rule, "needs A' NMPD along H")?;
            need(f.flag(&Conclusion::LocalSurjectivity { value: true }), rule, "needs local surjectivity")?;
            let (wr, dr, rr) = (f.pd(&whole)?, f.pd(&Role::Deleted)?, f.pd(&Role::Restricted)?);
            let (target_ok, lo, hi) = match rule {
                "pd_addition" => {
                    need(f.has_pd(&Role::Deleted) && f.has_pd(&Role::Restricted), rule, "needs pd of A' and A^H")?;
                    let (lo, hi) = hull(dr, rr, |k, r| if r == k { (0, k + 1) } else if r > k { (r + 1, r + 1) } else { (k, k) });
                    (*target == whole, lo, hi)
                }
                "pd_deletion" => {
                    need(f.has_pd(&whole) && f.has_pd(&Role::Restricted), rule, "needs pd of A and A^H")?;
                    let (lo, hi) = hull(wr, rr, |k, r| if r + 1 == k { (0, k) } else if r + 1 > k { (r, r) } else { (k, k) });
                    (*target == Role::Deleted, lo, hi)
                }
                _ => {
                    need(f.has_pd(&whole) && f.has_pd(&Role::Deleted), rule, "needs pd of A and A'")?;
                    let (lo, hi) = hull(wr, dr, |w, k| if w < k { (k, k) } else if w == k { (0, k) } else { (w - 1, w - 1) });
                    (*target == Role::Restricted, lo, hi)
                }
            };
            need(target_ok, rule, "wrong target")?;
            pd_conclusion(rule, &subject, lo, hi)?
        }
        "main_theorem" => {
            need(f.b2_equality(), rule, "needs the b2 equality")?;
            need(f.flag(&Conclusion::Nmpd { deleted: false }), rule, "needs A NMPD along H")?;
            need(l >= 3, rule, "needs rank at least 3")?;
            let (wr, dr, rr) = (f.pd(&whole)?, f.pd(&Role::Deleted)?, f.pd(&Role::Restricted)?);
            let shared = (dr.0.max(rr.0).max(wr.0), dr.1.min(rr.1).min(l - 3));
            match target {
                Role::Whole => pd_conclusion(rule, &subject, 0, shared.1)?,
                Role::Deleted | Role::Restricted => pd_conclusion(rule, &subject, shared.0, shared.1)?,
                _ => return Err(bad(rule, "wrong target")),
            }
        }
        "zero_table" => {
            let (wr, dr, rr) = (f.pd(&whole)?, f.pd(&Role::Deleted)?, f.pd(&Role::Restricted)?);
            let divides = f.any(&whole, |c| matches!(c, Conclusion::ChiDivides { .. })).then(|| f.flag(&Conclusion::ChiDivides { value: true }));
            let by_chi = |d: Option<bool>| match d {
                Some(true) => (0, 0),
                Some(false) => (1, 1),
                None => (0, 1),
            };
            let (lo, hi) = match target {
                Role::Restricted => {
                    need(wr.1 == 0 && dr.1 == 0, rule, "needs A and A' free")?;
                    (0, 0)
                }
                Role::Deleted => {
                    need(wr.1 == 0 && rr.1 == 0, rule, "needs A and A^H free")?;
                    by_chi(divides)
                }
                Role::Whole => {
                    need(dr.1 == 0, rule, "needs A' free")?;
                    if rr.1 == 0 {
                        by_chi(divides)
                    } else {
                        need(rr.0 >= 1, rule, "needs the freeness of A^H decided")?;
                        (2, usize::MAX)
                    }
                }
                _ => return Err(bad(rule, "wrong target")),
            };
            pd_conclusion(rule, &subject, lo, hi)?
        }
        "max_pd" => {
            need(*target == whole, rule, "targets A")?;
            need(l >= 2 && f.pd(&Role::Deleted)?.0 >= l - 2, rule, "needs A' of maximal pd")?;
            need(f.b2_equality(), rule, "needs the b2 equality")?;
            for (c, x, center) in all_flats(ctx.simple()?) {
                if c < 3 || center {
                    continue;
                }
                let role = Role::Localized { flat: x.format() };
                need(f.has_pd(&role) && f.pd(&role)?.1 + 2 < c, rule, &format!("needs pd A_X < {} at X = {}", c - 2, x.format()))?;
            }
            notes.push("flats of codimension at most 2 are excluded from the localization condition".into());
            pd_conclusion(rule, &subject, l - 2, l - 2)?
        }
        "yoshinaga_pd" => {
            need(l >= 4, rule, "needs rank at least 4")?;
            need(f.flag(&Conclusion::LocallyFree), rule, "needs A locally free along H")?;
            let z = f.pd(&Role::ZieglerRestricted)?;
            need(f.has_pd(&Role::ZieglerRestricted) && z.1 + 3 < l, rule, "needs pd of the Ziegler restriction not maximal")?;
            match clause_witness(rule, witness)? {
                1 => {
                    need(*target == whole, rule, "targets A")?;
                    pd_conclusion(rule, &subject, 0, z.1)?
                }
                2 => {
                    need(*target == whole, rule, "targets A")?;
                    need(f.b2().is_some_and(|r| r.lower), rule, "needs the lower b2 equality")?;
                    let r = f.pd(&Role::Restricted)?;
                    need(f.has_pd(&Role::Restricted) && r.1 + 3 < l, rule, "needs pd A^H not maximal")?;
                    pd_conclusion(rule, &subject, 0, r.1)?
                }
                3 => {
                    need(*target == whole, rule, "targets A")?;
                    Conclusion::Surjective { map: RestrictionKind::Ziegler, value: true }
                }
                _ => return Err(bad(rule, "unknown clause")),
            }
        }
        "pi_surjective_delete" => {
            need(*target == Role::Deleted, rule, "targets A'")?;
            need(f.flag(&Conclusion::Surjective { map: RestrictionKind::Ziegler, value: true }), rule, "needs the Ziegler restriction onto")?;
            let (lo, hi) = f.pd(&whole)?;
            let bound = if lo >= 1 { hi } else { hi.max(1) };
            pd_conclusion(rule, &subject, 0, bound)?
        }

        // ---- surjectivity and local conditions ----
        "free_surjection" => {
            need(f.pd(&Role::Deleted)?.1 == 0, rule, "needs A' free")?;
            Conclusion::Surjective { map: RestrictionKind::Euler, value: true }
        }
        "local_surjectivity_b2" => {
            need(f.b2_equality(), rule, "needs the b2 equality")?;
            Conclusion::LocalSurjectivity { value: true }
        }
        "local_surjectivity" => {
            let mut value = true;
            for (c, x, _) in flats_in_h(ctx.simple()?, ctx.h()?)? {
                if c != 3 {
                    continue;
                }
                let role = Role::Localized { flat: x.format() };
                let yes = f.any(&role, |c| {
                    matches!(c, Conclusion::Surjective { map: RestrictionKind::Euler, value: true } | Conclusion::Member { class: Class::Cs3 })
                });
                let no = f.any(&role, |c| matches!(c, Conclusion::Surjective { map: RestrictionKind::Euler, value: false }));
                need(yes || no, rule, &format!("no surjectivity fact at X = {}", x.format()))?;
                value &= yes;
            }
            Conclusion::LocalSurjectivity { value }
        }
        "surjectivity_b2" => {
            let map = map_witness(rule, witness)?;
            need(f.flag(&Conclusion::Nmpd { deleted: false }), rule, "needs A NMPD along H")?;
            need(f.b2_equality(), rule, "needs the b2 equality")?;
            Conclusion::Surjective { map, value: true }
        }
        "rho_surjective_b2" => {
            need(f.flag(&Conclusion::Nmpd { deleted: true }), rule, "needs A' NMPD along H")?;
            need(f.b2_equality(), rule, "needs the b2 equality")?;
            Conclusion::Surjective { map: RestrictionKind::Euler, value: true }
        }
        "rho_local" => {
            need(f.flag(&Conclusion::Nmpd { deleted: true }), rule, "needs A' NMPD along H")?;
            let v = f.flag(&Conclusion::LocalSurjectivity { value: true });
            need(v || f.flag(&Conclusion::LocalSurjectivity { value: false }), rule, "needs local surjectivity decided")?;
            Conclusion::Surjective { map: RestrictionKind::Euler, value: v }
        }
        "pi_surjective_multi_b2" => {
            need(f.flag(&Conclusion::Nmpd { deleted: false }), rule, "needs A NMPD along H")?;
            need(l >= 3 && f.pd(&whole)?.1 + 3 <= l, rule, "needs pd A <= rank - 3")?;
            let rep = f.b2().ok_or_else(|| bad(rule, "needs the b2 report"))?;
            Conclusion::Surjective { map: RestrictionKind::Ziegler, value: rep.upper }
        }
        "nmpd_cond" => {
            let deleted = match witness {
                Some(Witness::Deleted { deleted }) => *deleted,
                _ => return Err(bad(rule, "missing deleted witness")),
            };
            let base = if deleted { Role::Deleted } else { whole.clone() };
            let (_, k) = f.pd(&base)?;
            for (c, x, _) in flats_in_h(ctx.simple()?, ctx.h()?)? {
                if c < 4 || c > k + 2 {
                    continue;
                }
                let role = if deleted {
                    Role::DeletedLocalized { flat: x.format() }
                } else {
                    Role::Localized { flat: x.format() }
                };
                need(f.has_pd(&role) && f.pd(&role)?.1 + 2 < c, rule, &format!("needs pd < {} at X = {}", c - 2, x.format()))?;
            }
            Conclusion::Nmpd { deleted }
        }
        "local_freeness" => {
            for (c, x, center) in flats_in_h(ctx.simple()?, ctx.h()?)? {
                if c < 3 || center || (c == 3 && f.b2_equality()) {
                    continue;
                }
                let role = Role::Localized { flat: x.format() };
                need(f.has_pd(&role) && f.pd(&role)?.1 == 0, rule, &format!("needs A_X free at X = {}", x.format()))?;
            }
            Conclusion::LocallyFree
        }

        // ---- classes ----
        "df_is_sf" => {
            need(f.member(target, |c| *c == Class::Df), rule, "needs DF")?;
            Conclusion::Member { class: Class::Sf }
        }
        "cs3" => {
            need(*target == whole && l == 3, rule, "needs rank 3")?;
            match clause_witness(rule, witness)? {
                1 => need(f.member(&Role::Deleted, |c| *c == Class::Df), rule, "needs A' in DF")?,
                3 => need(f.b2_equality(), rule, "needs the b2 equality")?,
                _ => return Err(bad(rule, "unknown clause")),
            }
            Conclusion::Member { class: Class::Cs3 }
        }
        "ipd0" => {
            let r = subject.base.rank();
            need(r >= 3, rule, "rank at most 2 is handled by ipd_low_rank")?;
            let ok = if r == 3 { f.member(target, |c| *c == Class::Df) } else { f.member(target, |c| matches!(c, Class::Df | Class::Sf)) };
            need(ok, rule, "needs DF (rank 3) or SF")?;
            Conclusion::Member { class: Class::Ipd { k: 0, i: r } }
        }
        "ipd1_df" => {
            need(*target == whole && l == 3, rule, "needs rank 3")?;
            need(f.member(&Role::Deleted, |c| *c == Class::Df), rule, "needs A' in DF")?;
            let a = ctx.simple()?;
            let (e, _) = a.essentialize();
            let chi0 = char_poly(&e).div_exact(&UPoly::linear_root(1)).ok_or_else(|| bad(rule, "t-1 does not divide chi"))?;
            let t = a.restriction(ctx.h()?)?.len() as i64 - 1;
            need(!chi0.eval(&t.into()).is_zero(), rule, "chi_0(|A^H| - 1) vanishes")?;
            Conclusion::Member { class: Class::Ipd { k: 1, i: 3 } }
        }
        "ipd1_sf" => {
            need(*target == whole && l >= 4, rule, "needs rank at least 4")?;
            need(f.stair_free(&Role::Deleted) && f.stair_free(&Role::Restricted), rule, "needs A' and A^H stair-free")?;
            need(f.flag(&Conclusion::ChiDivides { value: false }), rule, "needs chi(A^H) not dividing chi(A)")?;
            Conclusion::Member { class: Class::Ipd { k: 1, i: l } }
        }
        "ipd_k0" => {
            need(*target == whole && l >= 4, rule, "needs rank at least 4")?;
            need(f.stair_free(&Role::Deleted), rule, "needs A' in IPD_0")?;
            let k = f.ipd_level(&Role::Restricted).ok_or_else(|| bad(rule, "needs A^H in some IPD class"))? + 1;
            need(k >= 2, rule, "k = 1 is covered by ipd1_sf")?;
            Conclusion::Member { class: Class::Ipd { k, i: l } }
        }
        "ipd_k1" => {
            need(*target == whole && l >= 4, rule, "needs rank at least 4")?;
            let k = f.ipd_level(&Role::Restricted).ok_or_else(|| bad(rule, "needs A^H in some IPD class"))? + 1;
            let kd = f.ipd_level(&Role::Deleted).ok_or_else(|| bad(rule, "needs A' in some IPD class"))?;
            need(kd + 2 <= k, rule, "needs pd A' <= k - 2")?;
            for (c, x, center) in flats_in_h(ctx.simple()?, ctx.h()?)? {
                if c == 3 {
                    let role = Role::Localized { flat: x.format() };
                    need(f.member(&role, |c| *c == Class::Cs3), rule, &format!("needs (A_X, H) in CS3 at X = {}", x.format()))?;
                } else if c >= 4 && !center && kd + 2 >= c {
                    let role = Role::DeletedLocalized { flat: x.format() };
                    let ok = f.ipd_level(&role).is_some_and(|m| m + 2 < c);
                    need(ok, rule, &format!("needs A'_X in IPD below {} at X = {}", c - 2, x.format()))?;
                }
            }
            notes.push(AMBIGUITY.into());
            Conclusion::Member { class: Class::Ipd { k, i: l } }
        }
        "ipd_k2" => {
            need(*target == whole && l >= 4, rule, "needs rank at least 4")?;
            need(f.b2_equality(), rule, "needs the b2 equality")?;
            need(f.ipd_level(&Role::Deleted) == Some(l - 2), rule, "needs A' in IPD of maximal level")?;
            for (c, x, center) in all_flats(ctx.simple()?) {
                if c < 3 || center {
                    continue;
                }
                let role = Role::Localized { flat: x.format() };
                let ok = f.ipd_level(&role).is_some_and(|m| m + 2 < c);
                need(ok, rule, &format!("needs A_X in IPD below {} at X = {}", c - 2, x.format()))?;
            }
            notes.push("maximal clause uses the localization hypotheses of the maximal-pd propagation".into());
            Conclusion::Member { class: Class::Ipd { k: l - 2, i: l } }
        }
        other => return Err(ArrError::Invalid(format!("unknown rule `{other}`"))),
    };
    Ok((conclusion, notes))
}
