//! Searches producing class-membership certificates: DF flags, SF paths,
//! CS₃ sufficient conditions and the recursive IPD clauses.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::rules::{check_flag, chi_exponents, flats_in_h, all_flats};
use super::{form_json, leaf, node, Certificate, Class, Conclusion, Context, PathStep, Premise, Role, Witness};
use crate::arrangement::{Arrangement, LinearForm};
use crate::derivation::{find_free_basis, FreeBasisOutcome};
use crate::error::{ArrError, Result};
use crate::multib2::b2_equality_holds;

#[derive(Clone, Debug)]
pub struct SearchBudget {
    /// Recursion depth for the IPD clauses that recurse on `𝒜'`.
    pub depth: usize,
    /// Also look for stair-free paths through free deletions when no divisional flag exists.
    pub free_paths: bool,
    /// Candidate hyperplanes the stair-free search may add (original coordinates only).
    pub pool: Vec<LinearForm>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { depth: 2, free_paths: false, pool: Vec::new() }
    }
}

fn df_search(a: &Arrangement, dead: &mut HashSet<Arrangement>) -> Result<Option<Vec<LinearForm>>> {
    if a.rank() <= 2 {
        return Ok(Some(Vec::new()));
    }
    let key = a.canonical();
    if dead.contains(&key) {
        return Ok(None);
    }
    for h in key.forms() {
        if b2_equality_holds(a, h)? {
            if let Some(mut rest) = df_search(&a.restriction(h)?, dead)? {
                rest.insert(0, h.clone());
                return Ok(Some(rest));
            }
        }
    }
    dead.insert(key);
    Ok(None)
}

/// Depth-first search for a divisional flag; `None` after exhausting all flags.
pub fn divisional_flag(a: &Arrangement) -> Result<Option<Vec<LinearForm>>> {
    df_search(a, &mut HashSet::new())
}

/// DF membership with its flag, or non-membership after exhaustive search.
pub fn df_certificate(a: &Arrangement) -> Result<Certificate> {
    let ctx = Context::single(a);
    match divisional_flag(a)? {
        Some(flag) => {
            debug_assert!(check_flag(a, &flag)?);
            let w = Witness::Flag { forms: flag.iter().map(form_json).collect() };
            node("df_flag", &ctx, Role::Whole, vec![], Some(w))
        }
        None => node("df_exhaustive", &ctx, Role::Whole, vec![], None),
    }
}

fn is_free(a: &Arrangement) -> Result<bool> {
    if a.is_empty() {
        return Ok(true);
    }
    let m = a.simple();
    Ok(matches!(find_free_basis(&m, m.total())?, FreeBasisOutcome::Free(_)))
}

struct PathSearch<'a> {
    pool: &'a [LinearForm],
    seen: HashSet<Arrangement>,
    free: HashMap<Arrangement, bool>,
}

impl PathSearch<'_> {
    fn free(&mut self, a: &Arrangement) -> Result<bool> {
        let key = a.canonical();
        if let Some(&v) = self.free.get(&key) {
            return Ok(v);
        }
        let v = is_free(a)?;
        self.free.insert(key, v);
        Ok(v)
    }

    /// `original` is true while no restriction has happened, so pool forms still apply.
    fn go(&mut self, a: &Arrangement, original: bool) -> Result<Option<Vec<PathStep>>> {
        if a.rank() <= 2 {
            return Ok(Some(Vec::new()));
        }
        if !self.seen.insert(a.canonical()) {
            return Ok(None);
        }
        for h in a.canonical().forms() {
            if b2_equality_holds(a, h)? {
                if let Some(mut rest) = self.go(&a.restriction(h)?, false)? {
                    rest.insert(0, PathStep::Restrict { form: form_json(h) });
                    return Ok(Some(rest));
                }
            }
        }
        if !self.free(a)? {
            return Ok(None);
        }
        for h in a.canonical().forms() {
            let next = a.delete(h)?;
            if self.free(&next)? {
                if let Some(mut rest) = self.go(&next, original)? {
                    rest.insert(0, PathStep::Delete { form: form_json(h) });
                    return Ok(Some(rest));
                }
            }
        }
        if original {
            for f in self.pool.to_vec() {
                if a.contains(&f) || f.dim() != a.dim() {
                    continue;
                }
                let next = a.add(&f)?;
                if self.free(&next)? {
                    if let Some(mut rest) = self.go(&next, true)? {
                        rest.insert(0, PathStep::Add { form: form_json(&f) });
                        return Ok(Some(rest));
                    }
                }
            }
        }
        Ok(None)
    }
}

/// SF membership: a divisional flag converted to SF, or a verified path.
pub fn sf_certificate(a: &Arrangement, budget: &SearchBudget) -> Result<Option<Certificate>> {
    let ctx = Context::single(a);
    let df = df_certificate(a)?;
    if matches!(df.conclusion, Conclusion::Member { .. }) {
        return Ok(Some(node("df_is_sf", &ctx, Role::Whole, vec![Premise::new(Role::Whole, df)], None)?));
    }
    if !budget.free_paths && budget.pool.is_empty() {
        return Ok(None);
    }
    let mut s = PathSearch { pool: &budget.pool, seen: HashSet::new(), free: HashMap::new() };
    match s.go(a, true)? {
        Some(steps) => Ok(Some(node("sf_path", &ctx, Role::Whole, vec![], Some(Witness::Path { steps }))?)),
        None => Ok(None),
    }
}

/// Sufficient conditions for `(𝒜, H) ∈ CS₃`; `None` when none applies.
pub fn cs3_certificate(a: &Arrangement, h: &LinearForm) -> Result<Option<Certificate>> {
    if a.rank() != 3 {
        return Err(ArrError::RankError(format!("CS3 needs rank 3, got {}", a.rank())));
    }
    let ctx = Context::pair(a, h)?;
    if let Ok(c) = node("cs3_multiplicity", &ctx, Role::Whole, vec![], None) {
        return Ok(Some(c));
    }
    let b2 = leaf::computed_b2(&ctx)?;
    if matches!(&b2.conclusion, Conclusion::B2 { report } if report.b2_equality) {
        return Ok(Some(node("cs3", &ctx, Role::Whole, vec![Premise::new(Role::Whole, b2)], Some(Witness::Clause { clause: 3 }))?));
    }
    let df = df_certificate(&a.delete(h)?)?;
    if matches!(df.conclusion, Conclusion::Member { .. }) {
        let prem = vec![Premise::new(Role::Deleted, df)];
        return Ok(Some(node("cs3", &ctx, Role::Whole, prem, Some(Witness::Clause { clause: 1 }))?));
    }
    Ok(None)
}

fn ipd_class(c: &Certificate) -> Option<usize> {
    match c.conclusion {
        Conclusion::Member { class: Class::Ipd { k, .. } } => Some(k),
        _ => None,
    }
}

struct IpdSearch {
    budget: SearchBudget,
    memo: HashMap<(Arrangement, usize), Option<Certificate>>,
    sf: HashMap<Arrangement, Option<Certificate>>,
}

impl IpdSearch {
    fn sf(&mut self, a: &Arrangement) -> Result<Option<Certificate>> {
        let key = a.canonical();
        if let Some(c) = self.sf.get(&key) {
            return Ok(c.clone());
        }
        let c = sf_certificate(a, &SearchBudget { pool: Vec::new(), ..self.budget.clone() })?;
        self.sf.insert(key, c.clone());
        Ok(c)
    }

    fn ipd(&mut self, a: &Arrangement, k: usize, depth: usize) -> Result<Option<Certificate>> {
        let key = (a.canonical(), k);
        if let Some(c) = self.memo.get(&key) {
            return Ok(c.clone());
        }
        let c = self.ipd_uncached(a, k, depth)?;
        // Depth-limited failures are not definitive; only cache successes and depth-independent cases.
        if c.is_some() || k <= 1 {
            self.memo.insert(key, c.clone());
        }
        Ok(c)
    }

    fn ipd_uncached(&mut self, a: &Arrangement, k: usize, depth: usize) -> Result<Option<Certificate>> {
        let r = a.rank();
        let ctx = Context::single(a);
        if r <= 2 {
            return if k == 0 { Ok(Some(node("ipd_low_rank", &ctx, Role::Whole, vec![], None)?)) } else { Ok(None) };
        }
        if k > r - 2 {
            return Ok(None);
        }
        if k == 0 {
            let sf = if r == 3 {
                let df = df_certificate(a)?;
                matches!(df.conclusion, Conclusion::Member { .. }).then_some(df)
            } else {
                self.sf(a)?
            };
            return match sf {
                Some(c) => Ok(Some(node("ipd0", &ctx, Role::Whole, vec![Premise::new(Role::Whole, c)], None)?)),
                None => Ok(None),
            };
        }
        if k == 1 && r == 3 {
            if let Ok(c) = node("ipd1_irreducible", &ctx, Role::Whole, vec![], None) {
                return Ok(Some(c));
            }
            for h in a.canonical().forms() {
                let pctx = Context::pair(a, h)?;
                let df = df_certificate(&a.delete(h)?)?;
                if !matches!(df.conclusion, Conclusion::Member { .. }) {
                    continue;
                }
                if let Ok(c) = node("ipd1_df", &pctx, Role::Whole, vec![Premise::new(Role::Deleted, df)], None) {
                    return Ok(Some(c));
                }
            }
            return Ok(None);
        }
        if k == 1 {
            for h in a.canonical().forms() {
                let pctx = Context::pair(a, h)?;
                let chi = leaf::computed_chi_divides(&pctx)?;
                if chi.conclusion != (Conclusion::ChiDivides { value: false }) {
                    continue;
                }
                let Some(d) = self.sf(&a.delete(h)?)? else { continue };
                let Some(rr) = self.sf(&a.restriction(h)?)? else { continue };
                let prem = vec![Premise::new(Role::Whole, chi), Premise::new(Role::Deleted, d), Premise::new(Role::Restricted, rr)];
                return Ok(Some(node("ipd1_sf", &pctx, Role::Whole, prem, None)?));
            }
            return Ok(None);
        }
        if depth == 0 {
            return Ok(None);
        }
        for h in a.canonical().forms() {
            if let Some(c) = self.clause0(a, h, k, depth)? {
                return Ok(Some(c));
            }
        }
        for h in a.canonical().forms() {
            if let Some(c) = self.clause1(a, h, k, depth)? {
                return Ok(Some(c));
            }
        }
        if k == r - 2 {
            for h in a.canonical().forms() {
                if let Some(c) = self.clause2(a, h, depth)? {
                    return Ok(Some(c));
                }
            }
        }
        Ok(None)
    }

    fn clause0(&mut self, a: &Arrangement, h: &LinearForm, k: usize, depth: usize) -> Result<Option<Certificate>> {
        let pctx = Context::pair(a, h)?;
        let Some(rr) = self.ipd(&a.restriction(h)?, k - 1, depth - 1)? else { return Ok(None) };
        let Some(d) = self.ipd(&a.delete(h)?, 0, depth - 1)? else { return Ok(None) };
        let prem = vec![Premise::new(Role::Deleted, d), Premise::new(Role::Restricted, rr)];
        Ok(Some(node("ipd_k0", &pctx, Role::Whole, prem, None)?))
    }

    fn clause1(&mut self, a: &Arrangement, h: &LinearForm, k: usize, depth: usize) -> Result<Option<Certificate>> {
        let pctx = Context::pair(a, h)?;
        let flats = flats_in_h(a, h)?;
        let mut prem = Vec::new();
        for (c, x, _) in &flats {
            if *c != 3 {
                continue;
            }
            let loc = a.localization(x)?;
            match cs3_certificate(&loc, h)? {
                Some(cert) => prem.push(Premise::new(Role::Localized { flat: x.format() }, cert)),
                None => return Ok(None),
            }
        }
        let Some(rr) = self.ipd(&a.restriction(h)?, k - 1, depth - 1)? else { return Ok(None) };
        prem.push(Premise::new(Role::Restricted, rr));
        let deleted = a.delete(h)?;
        let mut found = None;
        for j in 2..=k {
            if let Some(d) = self.ipd(&deleted, k - j, depth - 1)? {
                found = Some((k - j, d));
                break;
            }
        }
        let Some((kd, d)) = found else { return Ok(None) };
        prem.push(Premise::new(Role::Deleted, d));
        for (c, x, center) in &flats {
            if *c < 4 || *center || kd + 2 < *c {
                continue;
            }
            let role = Role::DeletedLocalized { flat: x.format() };
            let sub = pctx.subject(&role)?.base;
            let mut got = None;
            for m in 0..c - 2 {
                if let Some(cert) = self.ipd(&sub, m, depth - 1)? {
                    got = Some(cert);
                    break;
                }
            }
            match got {
                Some(cert) => prem.push(Premise::new(role, cert)),
                None => return Ok(None),
            }
        }
        Ok(node("ipd_k1", &pctx, Role::Whole, prem, None).ok())
    }

    fn clause2(&mut self, a: &Arrangement, h: &LinearForm, depth: usize) -> Result<Option<Certificate>> {
        let r = a.rank();
        let pctx = Context::pair(a, h)?;
        let b2 = leaf::computed_b2(&pctx)?;
        if !matches!(&b2.conclusion, Conclusion::B2 { report } if report.b2_equality) {
            return Ok(None);
        }
        let deleted = a.delete(h)?;
        if deleted.rank() != r {
            return Ok(None);
        }
        let mut prem = vec![Premise::new(Role::Whole, b2)];
        for (c, x, center) in all_flats(a) {
            if c < 3 || center {
                continue;
            }
            let loc = a.localization(&x)?;
            let mut got = None;
            for m in 0..c - 2 {
                if let Some(cert) = self.ipd(&loc, m, depth - 1)? {
                    got = Some(cert);
                    break;
                }
            }
            match got {
                Some(cert) => prem.push(Premise::new(Role::Localized { flat: x.format() }, cert)),
                None => return Ok(None),
            }
        }
        let Some(d) = self.ipd(&deleted, r - 2, depth - 1)? else { return Ok(None) };
        prem.push(Premise::new(Role::Deleted, d));
        Ok(node("ipd_k2", &pctx, Role::Whole, prem, None).ok())
    }
}

/// IPD_k membership certificate, with the pd fact it implies at the root.
pub fn ipd_certificate(a: &Arrangement, k: usize, budget: &SearchBudget) -> Result<Option<Certificate>> {
    let mut s = IpdSearch { budget: budget.clone(), memo: HashMap::new(), sf: HashMap::new() };
    let Some(member) = s.ipd(a, k, budget.depth)? else { return Ok(None) };
    debug_assert_eq!(ipd_class(&member), Some(k));
    Ok(Some(node("ipd_pd", &Context::single(a), Role::Whole, vec![Premise::new(Role::Whole, member)], None)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub rank: usize,
    pub df: Certificate,
    pub sf: Option<Certificate>,
    /// Free exponents implied by DF/SF membership.
    pub exponents: Option<Vec<u32>>,
    /// First IPD level with a membership certificate.
    pub ipd: Option<(usize, Certificate)>,
    /// Levels searched without success.
    pub ipd_failed: Vec<usize>,
}

/// DF, SF and IPD membership; `only` restricts the IPD search to one level.
pub fn classify(a: &Arrangement, only: Option<usize>, budget: &SearchBudget) -> Result<Classification> {
    let df = df_certificate(a)?;
    let sf = sf_certificate(a, budget)?;
    let exponents = sf.as_ref().and_then(|_| chi_exponents(a));
    let r = a.rank();
    let levels: Vec<usize> = match only {
        Some(k) => vec![k],
        None => (0..=r.saturating_sub(2)).collect(),
    };
    let mut ipd = None;
    let mut failed = Vec::new();
    for k in levels {
        match ipd_certificate(a, k, budget)? {
            Some(c) => {
                ipd = Some((k, c));
                break;
            }
            None => failed.push(k),
        }
    }
    Ok(Classification { rank: r, df, sf, exponents, ipd, ipd_failed: failed })
}
