//! Rule engine for projective dimension, freeness and surjectivity facts.
//!
//! Every fact is a [`Certificate`] node: a rule name, the arrangement it talks
//! about, the premises it was derived from and the conclusion. [`verify`]
//! replays a certificate bottom-up, recomputing leaves and re-deriving every
//! conclusion, so a certificate read back from JSON is checked independently
//! of how it was produced.

mod infer;
mod rules;
mod search;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arrangement::{Arrangement, ArrangementJson, Flat, LinearForm, Multiarrangement};
use crate::derivation::RestrictionKind;
use crate::error::{ArrError, Result};
use crate::multib2::B2Report;
use crate::rational::{parse_rational, Rational};

pub use infer::{infer_pd, InferOptions, PdInference};
pub use search::{
    classify, cs3_certificate, df_certificate, divisional_flag, ipd_certificate, sf_certificate, Classification,
    SearchBudget,
};

/// Where a premise sits relative to the `(𝒜, H)` pair of its parent node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum Role {
    Whole,
    Deleted,
    Restricted,
    ZieglerRestricted,
    Localized { flat: String },
    DeletedLocalized { flat: String },
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Whole => write!(f, "A"),
            Role::Deleted => write!(f, "A'"),
            Role::Restricted => write!(f, "A^H"),
            Role::ZieglerRestricted => write!(f, "(A^H,m^H)"),
            Role::Localized { flat } => write!(f, "A_X, X = {flat}"),
            Role::DeletedLocalized { flat } => write!(f, "A'_X, X = {flat}"),
        }
    }
}

/// Combinatorially defined classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Class {
    /// Divisionally free.
    Df,
    /// Stair-free.
    Sf,
    /// `(𝒜, H)` with `ℓ = 3` whose Euler restriction is combinatorially surjective.
    Cs3,
    /// Inductively of projective dimension `k`, rank `i`.
    Ipd { k: usize, i: usize },
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class::Df => write!(f, "DF"),
            Class::Sf => write!(f, "SF"),
            Class::Cs3 => write!(f, "CS3"),
            Class::Ipd { k, i } => write!(f, "IPD_{k}^{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Conclusion {
    /// `lo ≤ pd ≤ hi`.
    Pd { lo: usize, hi: usize },
    Free { exponents: Vec<u32> },
    Surjective { map: RestrictionKind, value: bool },
    /// `ρ^H_X` surjective for every `X ∈ L₂(𝒜^H)`.
    LocalSurjectivity { value: bool },
    B2 { report: B2Report },
    /// Whether `χ(𝒜^H;t)` divides `χ(𝒜;t)`.
    ChiDivides { value: bool },
    /// `𝒜` (or `𝒜'` when `deleted`) is NMPD along `H`.
    Nmpd { deleted: bool },
    /// `𝒜_X` free for every `X ∈ L(𝒜^H)` other than the center.
    LocallyFree,
    Member { class: Class },
    NotMember { class: Class },
}

impl Conclusion {
    /// Facts about the pair `(𝒜, H)` rather than about `𝒜` alone.
    pub fn is_pair_fact(&self) -> bool {
        match self {
            Conclusion::Pd { .. } | Conclusion::Free { .. } => false,
            Conclusion::Member { class } | Conclusion::NotMember { class } => *class == Class::Cs3,
            _ => true,
        }
    }

    pub fn pd_range(&self) -> Option<(usize, usize)> {
        match self {
            Conclusion::Pd { lo, hi } => Some((*lo, *hi)),
            Conclusion::Free { .. } => Some((0, 0)),
            _ => None,
        }
    }
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conclusion::Pd { lo, hi } if lo == hi => write!(f, "pd = {lo}"),
            Conclusion::Pd { lo, hi } => write!(f, "{lo} <= pd <= {hi}"),
            Conclusion::Free { exponents } => write!(f, "free with exponents {exponents:?}"),
            Conclusion::Surjective { map, value } => {
                let name = match map {
                    RestrictionKind::Euler => "Euler restriction",
                    RestrictionKind::Ziegler => "Ziegler restriction",
                };
                write!(f, "{name} {}surjective", if *value { "" } else { "not " })
            }
            Conclusion::LocalSurjectivity { value } => {
                write!(f, "{}locally surjective in codimension three", if *value { "" } else { "not " })
            }
            Conclusion::B2 { report } => write!(
                f,
                "b2 equality {}, upper {}, lower {}",
                report.b2_equality, report.upper, report.lower
            ),
            Conclusion::ChiDivides { value } => write!(f, "chi(A^H) {} chi(A)", if *value { "divides" } else { "does not divide" }),
            Conclusion::Nmpd { deleted } => write!(f, "{} NMPD along H", if *deleted { "A'" } else { "A" }),
            Conclusion::LocallyFree => write!(f, "locally free along H"),
            Conclusion::Member { class } => write!(f, "member of {class}"),
            Conclusion::NotMember { class } => write!(f, "not a member of {class}"),
        }
    }
}

/// One step of a stair-free path, in the coordinates of the current arrangement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum PathStep {
    Restrict { form: Vec<String> },
    Add { form: Vec<String> },
    Delete { form: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// Hyperplanes restricted to in turn, each in the coordinates of the previous restriction.
    Flag { forms: Vec<Vec<String>> },
    Path { steps: Vec<PathStep> },
    Map { map: RestrictionKind },
    Clause { clause: u32 },
    Deleted { deleted: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextJson {
    pub arrangement: ArrangementJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperplane: Option<Vec<String>>,
}

/// The arrangement (and optional distinguished hyperplane) a node is about.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    pub arrangement: Multiarrangement,
    pub hyperplane: Option<LinearForm>,
}

pub fn form_json(f: &LinearForm) -> Vec<String> {
    f.coeffs().iter().map(|c| c.to_string()).collect()
}

pub fn form_from_json(v: &[String]) -> Result<LinearForm> {
    let c: Vec<Rational> = v
        .iter()
        .map(|t| parse_rational(t).ok_or_else(|| ArrError::Invalid(format!("bad coefficient `{t}`"))))
        .collect::<Result<_>>()?;
    LinearForm::normalize(&c)
}

impl Context {
    pub fn single(a: &Arrangement) -> Context {
        Context { arrangement: a.simple(), hyperplane: None }
    }

    pub fn multi(m: &Multiarrangement) -> Context {
        Context { arrangement: m.clone(), hyperplane: None }
    }

    pub fn pair(a: &Arrangement, h: &LinearForm) -> Result<Context> {
        if !a.contains(h) {
            return Err(ArrError::NotMember(h.to_string()));
        }
        Ok(Context { arrangement: a.simple(), hyperplane: Some(h.clone()) })
    }

    pub fn to_json(&self) -> ContextJson {
        ContextJson {
            arrangement: ArrangementJson::from_multi(&self.arrangement),
            hyperplane: self.hyperplane.as_ref().map(form_json),
        }
    }

    pub fn from_json(j: &ContextJson) -> Result<Context> {
        let arrangement = j.arrangement.to_multi()?;
        let hyperplane = j.hyperplane.as_deref().map(form_from_json).transpose()?;
        if let Some(h) = &hyperplane {
            if !arrangement.base.contains(h) {
                return Err(ArrError::NotMember(h.to_string()));
            }
        }
        Ok(Context { arrangement, hyperplane })
    }

    /// The underlying simple arrangement; errors on multiarrangements.
    pub fn simple(&self) -> Result<&Arrangement> {
        if !self.arrangement.is_simple() {
            return Err(ArrError::NotApplicable("rule needs a simple arrangement".into()));
        }
        Ok(&self.arrangement.base)
    }

    pub fn h(&self) -> Result<&LinearForm> {
        self.hyperplane.as_ref().ok_or_else(|| ArrError::NotApplicable("rule needs a distinguished hyperplane".into()))
    }

    /// Rank of the arrangement; plays the role of `ℓ` in every rule.
    pub fn rank(&self) -> usize {
        self.arrangement.base.rank()
    }

    pub fn flat(&self, spec: &str) -> Result<Flat> {
        Flat::parse(self.arrangement.dim(), spec)
    }

    pub fn subject(&self, role: &Role) -> Result<Multiarrangement> {
        Ok(match role {
            Role::Whole => self.arrangement.clone(),
            Role::Deleted => self.simple()?.delete(self.h()?)?.simple(),
            Role::Restricted => self.simple()?.restriction(self.h()?)?.simple(),
            Role::ZieglerRestricted => self.simple()?.ziegler_restriction(self.h()?)?,
            Role::Localized { flat } => self.arrangement.localization(&self.flat(flat)?)?,
            Role::DeletedLocalized { flat } => {
                let x = self.flat(flat)?;
                let a = self.simple()?;
                if a.localization(&x).is_err() {
                    return Err(ArrError::NotAFlat);
                }
                let forms = a.delete(self.h()?)?.forms().iter().filter(|f| x.contained_in(f)).cloned().collect();
                Arrangement::new(a.dim(), forms)?.simple()
            }
        })
    }
}

/// Sorted (form, multiplicity) pairs; two subjects agree when these agree.
fn canonical_pairs(m: &Multiarrangement) -> (usize, Vec<(LinearForm, u32)>) {
    let mut v: Vec<(LinearForm, u32)> = m.base.forms().iter().cloned().zip(m.mult.iter().copied()).collect();
    v.sort();
    (m.dim(), v)
}

pub fn same_subject(a: &Multiarrangement, b: &Multiarrangement) -> bool {
    canonical_pairs(a) == canonical_pairs(b)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub rule: String,
    pub subject: ArrangementJson,
    pub context: ContextJson,
    pub target: Role,
    /// Role of this node inside its parent; `None` at the root.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link: Option<Role>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<Certificate>,
    pub conclusion: Conclusion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn pd_range(&self) -> Option<(usize, usize)> {
        self.conclusion.pd_range()
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(|p| p.size()).sum::<usize>()
    }

    /// Distinct rule names used anywhere in the tree, sorted.
    pub fn rules_used(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_rules(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_rules(&self, out: &mut Vec<String>) {
        out.push(self.rule.clone());
        for p in &self.premises {
            p.collect_rules(out);
        }
    }

    fn with_link(mut self, role: Role) -> Certificate {
        self.link = Some(role);
        self
    }

    /// Indented one-line-per-node rendering.
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.render_into(0, &mut s);
        s
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        let who = match &self.link {
            Some(r) => format!("[{r}] "),
            None => String::new(),
        };
        out.push_str(&format!("{}{}{}  ({})\n", "  ".repeat(depth), who, self.conclusion, self.rule));
        for n in &self.notes {
            out.push_str(&format!("{}  note: {}\n", "  ".repeat(depth), n));
        }
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
    }
}

/// A premise attached to a role of the parent context.
#[derive(Clone, Debug)]
pub struct Premise {
    pub role: Role,
    pub cert: Certificate,
}

impl Premise {
    pub fn new(role: Role, cert: Certificate) -> Premise {
        Premise { role, cert }
    }
}

/// Builds a node: checks the premises fit the context and derives the conclusion.
pub fn node(rule: &str, ctx: &Context, target: Role, premises: Vec<Premise>, witness: Option<Witness>) -> Result<Certificate> {
    let subject = ctx.subject(&target)?;
    let premises: Vec<Certificate> = premises.into_iter().map(|p| p.cert.with_link(p.role)).collect();
    for p in &premises {
        check_link(ctx, p)?;
    }
    let (conclusion, notes) = rules::derive(rule, ctx, &target, &premises, witness.as_ref())?;
    Ok(Certificate {
        rule: rule.to_string(),
        subject: ArrangementJson::from_multi(&subject),
        context: ctx.to_json(),
        target,
        link: None,
        premises,
        conclusion,
        witness,
        notes,
    })
}

fn check_link(ctx: &Context, p: &Certificate) -> Result<()> {
    let role = p.link.as_ref().ok_or_else(|| ArrError::Invalid(format!("premise `{}` has no role", p.rule)))?;
    let expected = ctx.subject(role)?;
    if !same_subject(&expected, &p.subject.to_multi()?) {
        return Err(ArrError::Invalid(format!("premise `{}` is not about {role}", p.rule)));
    }
    if p.conclusion.is_pair_fact() {
        let pctx = Context::from_json(&p.context)?;
        if p.target != Role::Whole || pctx.hyperplane != ctx.hyperplane {
            return Err(ArrError::Invalid(format!("premise `{}` is about a different hyperplane", p.rule)));
        }
    }
    Ok(())
}

/// Replays a certificate: recomputes every leaf and re-derives every conclusion.
pub fn verify(cert: &Certificate) -> Result<()> {
    let ctx = Context::from_json(&cert.context)?;
    if !same_subject(&ctx.subject(&cert.target)?, &cert.subject.to_multi()?) {
        return Err(ArrError::Invalid(format!("node `{}`: subject does not match its context", cert.rule)));
    }
    for p in &cert.premises {
        verify(p)?;
        check_link(&ctx, p)?;
    }
    let (conclusion, _) = rules::derive(&cert.rule, &ctx, &cert.target, &cert.premises, cert.witness.as_ref())?;
    if conclusion != cert.conclusion {
        return Err(ArrError::Invalid(format!(
            "node `{}`: recorded conclusion `{}` but rule derives `{}`",
            cert.rule, cert.conclusion, conclusion
        )));
    }
    Ok(())
}

/// Leaf and single-step constructors used by the searches.
pub mod leaf {
    use super::*;

    pub fn computed_pd(m: &Multiarrangement) -> Result<Certificate> {
        node("computed_pd", &Context::multi(m), Role::Whole, vec![], None)
    }

    pub fn computed_freeness(m: &Multiarrangement) -> Result<Certificate> {
        node("computed_freeness", &Context::multi(m), Role::Whole, vec![], None)
    }

    pub fn pd_bound(m: &Multiarrangement) -> Result<Certificate> {
        node("pd_bound", &Context::multi(m), Role::Whole, vec![], None)
    }

    pub fn computed_b2(ctx: &Context) -> Result<Certificate> {
        node("computed_b2", ctx, Role::Whole, vec![], None)
    }

    pub fn computed_chi_divides(ctx: &Context) -> Result<Certificate> {
        node("computed_chi_divides", ctx, Role::Whole, vec![], None)
    }

    pub fn computed_surjectivity(ctx: &Context, map: RestrictionKind) -> Result<Certificate> {
        node("computed_surjectivity", ctx, Role::Whole, vec![], Some(Witness::Map { map }))
    }
}
