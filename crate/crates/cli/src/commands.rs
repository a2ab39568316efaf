use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context as _, Result};
use serde_json::{json, Value};

use arr_core::arrangement::{ArrangementJson, Flat};
use arr_core::catalog;
use arr_core::derivation::{
    find_free_basis, projective_dimension, resolution, surjectivity, DerivationModule, FreeBasisOutcome,
    RestrictionKind,
};
use arr_core::engine::{classify, infer_pd, leaf, verify, Certificate, Conclusion, InferOptions, SearchBudget};
use arr_core::lattice::{CharPoly, IntersectionLattice};
use arr_core::multib2::{b2_equality_check, b2_multi, rank2_exponents};
use arr_core::upoly::UPoly;

use crate::input::Input;
use crate::{Cmd, ExamplesCmd, MapArg, FORMAT_VERSION};

pub struct Report {
    pub command: &'static str,
    pub input: Option<Value>,
    pub result: Value,
    pub text: String,
    pub inconclusive: bool,
}

impl Report {
    fn new(command: &'static str, input: Option<&Input>, result: Value, text: String) -> Report {
        Report { command, input: input.map(Input::to_json), result, text, inconclusive: false }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let doc = json!({
            "format_version": FORMAT_VERSION,
            "command": self.command,
            "input": self.input,
            "inconclusive": self.inconclusive,
            "result": self.result,
        });
        std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n").with_context(|| format!("writing {}", path.display()))
    }
}

pub fn run(cmd: &Cmd) -> Result<Report> {
    match cmd {
        Cmd::Chi { file } => chi(&Input::load(file)?),
        Cmd::Lattice { file } => lattice(&Input::load(file)?),
        Cmd::B2 { file, pivot } => b2(&Input::load(file)?, pivot),
        Cmd::Ziegler { file, pivot } => ziegler(&Input::load(file)?, pivot),
        Cmd::Free { file, degree_bound } => free(&Input::load(file)?, *degree_bound),
        Cmd::Pd { file, exact, infer, both } => pd(&Input::load(file)?, *exact || *both, *infer || *both),
        Cmd::Classify { file, ipd } => classify_cmd(&Input::load(file)?, *ipd),
        Cmd::Restrict { file, pivot } => restrict(&Input::load(file)?, pivot),
        Cmd::Localize { file, flat } => localize(&Input::load(file)?, flat),
        Cmd::Resolve { file } => resolve(&Input::load(file)?),
        Cmd::Surject { file, pivot, map } => surject(&Input::load(file)?, pivot, *map),
        Cmd::Verify { cert } => verify_cmd(cert),
        Cmd::Examples { action } => examples(action.as_ref()),
    }
}

fn poly_json(p: &UPoly) -> Value {
    json!({
        "text": p.format("t"),
        "coefficients_ascending": p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    })
}

/// `(t-a)(t-b)...` when χ splits over the integers.
fn factored(p: &UPoly) -> Option<String> {
    let mut rest = p.clone();
    let mut roots = Vec::new();
    for r in p.integer_roots() {
        let lin = UPoly::new(vec![-r.clone(), 1.into()]);
        while let Some(q) = rest.div_exact(&lin) {
            roots.push(r.clone());
            rest = q;
        }
    }
    if rest.degree() != Some(0) {
        return None;
    }
    roots.sort();
    let mut s = if rest.coeff(0) == 1.into() { String::new() } else { rest.coeff(0).to_string() };
    let mut i = 0;
    while i < roots.len() {
        let r = &roots[i];
        let k = roots[i..].iter().take_while(|x| *x == r).count();
        let base = if *r == 0.into() { "t".to_string() } else { format!("(t - {r})") };
        s.push_str(&base);
        if k > 1 {
            write!(s, "^{k}").unwrap();
        }
        i += k;
    }
    Some(s)
}

fn chi(inp: &Input) -> Result<Report> {
    let a = inp.simple()?;
    let cp = CharPoly::of(a);
    let p = arr_core::lattice::char_poly(a);
    let betti: Vec<String> = cp.bettis().iter().map(|b| b.to_string()).collect();
    let mut text = format!("chi(t) = {}\n", p.format("t"));
    if let Some(f) = factored(&p) {
        writeln!(text, "factored: {f}")?;
    }
    writeln!(text, "betti: {}", betti.join(" "))?;
    let result = json!({ "chi": poly_json(&p), "factored": factored(&p), "betti": betti });
    Ok(Report::new("chi", Some(inp), result, text))
}

fn lattice(inp: &Input) -> Result<Report> {
    let a = inp.simple()?;
    let lat = IntersectionLattice::build(a);
    let mut text = format!("rank {}, flats per codimension {:?}\n", lat.rank(), lat.level_sizes());
    let mut levels = Vec::new();
    for c in 1..=lat.rank() {
        let mut flats = Vec::new();
        for x in lat.level(c) {
            let members: Vec<usize> = x.members.indices().iter().map(|i| i + 1).collect();
            writeln!(text, "codim {c}: {:?} mu = {}", members, x.mobius)?;
            flats.push(json!({ "members": members, "mobius": x.mobius, "flat": x.flat.format() }));
        }
        levels.push(json!({ "codim": c, "flats": flats }));
    }
    let result = json!({ "rank": lat.rank(), "sizes": lat.level_sizes(), "levels": levels });
    Ok(Report::new("lattice", Some(inp), result, text))
}

fn b2(inp: &Input, pivot: &str) -> Result<Report> {
    let a = inp.simple()?;
    let h = a.resolve_pivot(pivot)?;
    let r = b2_equality_check(a, &h)?;
    let text = format!(
        "H = {}\nb2 = {}\nb2(A^H) = {}\nb2^0 = {}\nb2(A^H, m^H) = {}\n|A| = {}, |A^H| = {}\nb2-equality: {}\nupper: {}\nlower: {}\n",
        h.format_tuple(),
        r.b2,
        r.b2_restricted,
        r.b2_zero,
        r.b2_multi,
        r.size,
        r.restricted_size,
        r.b2_equality,
        r.upper,
        r.lower
    );
    let result = json!({ "pivot": h.format_tuple(), "report": r });
    Ok(Report::new("b2", Some(inp), result, text))
}

fn ziegler(inp: &Input, pivot: &str) -> Result<Report> {
    let a = inp.simple()?;
    let h = a.resolve_pivot(pivot)?;
    let z = a.ziegler_restriction(&h)?;
    let mut text = z.to_text();
    writeln!(text, "total multiplicity {}", z.total())?;
    let b2m = b2_multi(&z)?;
    writeln!(text, "b2(A^H, m^H) = {b2m}")?;
    let exps = if z.essentialize().0.dim() == 2 {
        let e = rank2_exponents(&z)?;
        writeln!(text, "exponents ({}, {})", e.d1, e.d2)?;
        Some(vec![e.d1, e.d2])
    } else {
        None
    };
    let result = json!({
        "pivot": h.format_tuple(),
        "restriction": ArrangementJson::from_multi(&z),
        "total": z.total(),
        "b2_multi": b2m,
        "rank2_exponents": exps,
    });
    Ok(Report::new("ziegler", Some(inp), result, text))
}

fn free(inp: &Input, bound: Option<u32>) -> Result<Report> {
    let m = &inp.multi;
    let bound = bound.unwrap_or(m.total());
    let out = find_free_basis(m, bound)?;
    let (text, result, inconclusive) = match out {
        FreeBasisOutcome::Free(c) => {
            let mut degrees = c.degrees.clone();
            degrees.sort();
            let mut text = format!("free, exponents {degrees:?}\n");
            for d in &c.candidates {
                writeln!(text, "  [{}] {}", d.degree, d.format())?;
            }
            if let Some(k) = &c.constant {
                writeln!(text, "det = {k} * Q")?;
            }
            let basis: Vec<Value> = c.candidates.iter().map(|d| json!(d.to_json())).collect();
            let result = json!({
                "verdict": "free",
                "exponents": degrees,
                "basis": basis,
                "determinant_constant": c.constant.as_ref().map(|k| k.to_string()),
            });
            (text, result, false)
        }
        FreeBasisOutcome::NotFree { generator_degrees } => (
            format!("not free, minimal generator degrees {generator_degrees:?}\n"),
            json!({ "verdict": "not_free", "generator_degrees": generator_degrees }),
            false,
        ),
        FreeBasisOutcome::NotFound { certified_up_to } => (
            format!("inconclusive: no decision up to degree {certified_up_to}\n"),
            json!({ "verdict": "inconclusive", "certified_up_to": certified_up_to }),
            true,
        ),
    };
    let mut r = Report::new("free", Some(inp), result, text);
    r.inconclusive = inconclusive;
    Ok(r)
}

fn pd(inp: &Input, exact: bool, infer: bool) -> Result<Report> {
    let mut text = String::new();
    let mut result = serde_json::Map::new();
    let mut certs = serde_json::Map::new();
    let mut exact_pd = None;
    let mut inconclusive = false;
    if exact {
        let (p, cert_deg) = projective_dimension(&inp.multi, None)?;
        let c = leaf::computed_pd(&inp.multi)?;
        write!(text, "exact pd = {p}")?;
        if cert_deg != u32::MAX {
            write!(text, " (resolution certified up to degree {cert_deg})")?;
        }
        text.push('\n');
        result.insert("exact".into(), json!(p));
        certs.insert("exact".into(), serde_json::to_value(&c)?);
        exact_pd = Some(p);
    }
    if infer {
        let a = inp.simple()?;
        let r = infer_pd(a, &InferOptions::default())?;
        verify(&r.certificate)?;
        if r.lo == r.hi {
            writeln!(text, "inferred pd = {}", r.lo)?;
        } else {
            writeln!(text, "inferred pd in [{}, {}]", r.lo, r.hi)?;
            inconclusive = exact_pd.is_none();
        }
        writeln!(text, "rules: {}", r.certificate.rules_used().join(", "))?;
        text.push_str(&r.certificate.render());
        result.insert("inferred".into(), json!({ "lo": r.lo, "hi": r.hi }));
        certs.insert("inferred".into(), serde_json::to_value(&r.certificate)?);
        if let Some(p) = exact_pd {
            let agree = r.lo <= p && p <= r.hi;
            writeln!(text, "certificates agree: {agree}")?;
            result.insert("agree".into(), json!(agree));
            if !agree {
                bail!("inferred range [{}, {}] excludes the exact pd {p}", r.lo, r.hi);
            }
        }
    }
    result.insert("certificates".into(), Value::Object(certs));
    let mut rep = Report::new("pd", Some(inp), Value::Object(result), text);
    rep.inconclusive = inconclusive;
    Ok(rep)
}

fn classify_cmd(inp: &Input, ipd: Option<usize>) -> Result<Report> {
    let a = inp.simple()?;
    let c = classify(a, ipd, &SearchBudget::default())?;
    let yes = |b: bool| if b { "yes" } else { "no" };
    let df = matches!(c.df.conclusion, Conclusion::Member { .. });
    let mut text = format!("rank {}\nDF: {}\nSF: {}\n", c.rank, c.df.conclusion, yes(c.sf.is_some()));
    if let Some(e) = &c.exponents {
        writeln!(text, "exponents {e:?}")?;
    }
    match &c.ipd {
        Some((k, cert)) => writeln!(text, "IPD: level {k}, pd = {k} ({})", cert.premises[0].conclusion)?,
        None => writeln!(text, "IPD: no certificate at levels {:?}", c.ipd_failed)?,
    }
    let mut certs = serde_json::Map::new();
    certs.insert("df".into(), serde_json::to_value(&c.df)?);
    if let Some(sf) = &c.sf {
        certs.insert("sf".into(), serde_json::to_value(sf)?);
    }
    if let Some((_, cert)) = &c.ipd {
        certs.insert("ipd".into(), serde_json::to_value(cert)?);
    }
    let result = json!({
        "rank": c.rank,
        "df": df,
        "sf": c.sf.is_some(),
        "exponents": c.exponents,
        "ipd_level": c.ipd.as_ref().map(|(k, _)| k),
        "ipd_failed": c.ipd_failed,
        "certificates": certs,
    });
    let mut rep = Report::new("classify", Some(inp), result, text);
    rep.inconclusive = c.ipd.is_none();
    Ok(rep)
}

fn restrict(inp: &Input, pivot: &str) -> Result<Report> {
    let a = inp.simple()?;
    let h = a.resolve_pivot(pivot)?;
    let r = a.restriction(&h)?;
    let p = arr_core::lattice::char_poly(&r);
    let mut text = r.to_text();
    writeln!(text, "|A^H| = {}\nchi(A^H) = {}", r.len(), p.format("t"))?;
    let result = json!({
        "pivot": h.format_tuple(),
        "restriction": ArrangementJson::from_multi(&r.simple()),
        "size": r.len(),
        "chi": poly_json(&p),
    });
    Ok(Report::new("restrict", Some(inp), result, text))
}

fn localize(inp: &Input, spec: &str) -> Result<Report> {
    let x = Flat::parse(inp.multi.dim(), spec)?;
    let l = inp.multi.localization(&x)?;
    let mut text = l.to_text();
    writeln!(text, "|A_X| = {}, rank {}", l.base.len(), l.base.rank())?;
    let result = json!({
        "flat": x.format(),
        "localization": ArrangementJson::from_multi(&l),
        "rank": l.base.rank(),
    });
    Ok(Report::new("localize", Some(inp), result, text))
}

fn resolve(inp: &Input) -> Result<Report> {
    let r = resolution(&DerivationModule::of_multi(&inp.multi), None)?;
    let mut text = format!("{}\npd = {}\n", r.format(), r.pd);
    if r.certified_up_to != u32::MAX {
        writeln!(text, "generators certified up to degree {}", r.certified_up_to)?;
    }
    let result = json!({
        "shifts": r.shifts,
        "pd": r.pd,
        "display": r.format(),
        "certified_up_to": (r.certified_up_to != u32::MAX).then_some(r.certified_up_to),
    });
    Ok(Report::new("resolve", Some(inp), result, text))
}

fn surject(inp: &Input, pivot: &str, map: MapArg) -> Result<Report> {
    let a = inp.simple()?;
    let h = a.resolve_pivot(pivot)?;
    let kind = match map {
        MapArg::Euler => RestrictionKind::Euler,
        MapArg::Ziegler => RestrictionKind::Ziegler,
    };
    let r = surjectivity(kind, a, &h, None)?;
    let name = match map {
        MapArg::Euler => "rho^H",
        MapArg::Ziegler => "pi^H",
    };
    let mut text = format!("{name} surjective: {}\n", r.surjective);
    if let Some(d) = r.failing_degree {
        writeln!(text, "image misses a generator in degree {d}")?;
    }
    writeln!(text, "target generator degrees {:?}", r.target_generator_degrees)?;
    let result = json!({ "pivot": h.format_tuple(), "report": r });
    Ok(Report::new("surject", Some(inp), result, text))
}

/// Certificates at the root of a file, or under `result.certificates` of a report.
fn certificates(doc: &Value) -> Result<Vec<(String, Certificate)>> {
    if doc.get("rule").is_some() {
        return Ok(vec![("certificate".into(), serde_json::from_value(doc.clone())?)]);
    }
    let Some(map) = doc.pointer("/result/certificates").and_then(Value::as_object) else {
        bail!("no certificates found");
    };
    map.iter().map(|(k, v)| Ok((k.clone(), serde_json::from_value(v.clone()).with_context(|| format!("certificate `{k}`"))?))).collect()
}

fn verify_cmd(path: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(v) = doc.get("format_version") {
        if v != &json!(FORMAT_VERSION) {
            bail!("unsupported format_version {v}");
        }
    }
    let mut out = String::new();
    let mut checked = Vec::new();
    for (name, c) in certificates(&doc)? {
        verify(&c).with_context(|| format!("certificate `{name}` failed replay"))?;
        writeln!(out, "{name}: ok ({} nodes, {})", c.size(), c.conclusion)?;
        checked.push(json!({ "name": name, "nodes": c.size(), "conclusion": c.conclusion.to_string() }));
    }
    Ok(Report::new("verify", None, json!({ "verified": checked }), out))
}

fn examples(action: Option<&ExamplesCmd>) -> Result<Report> {
    match action {
        None | Some(ExamplesCmd::List) => {
            let es = catalog::entries();
            let mut text = String::new();
            for e in &es {
                writeln!(text, "{:<12} dim {}  |A| = {:<3} {}", e.name, e.arrangement.dim(), e.arrangement.len(), e.description)?;
            }
            text.push_str("booleanL     coordinate hyperplanes in dimension L\n");
            text.push_str("genericL-N   N generic hyperplanes in dimension L\n");
            let list: Vec<Value> = es
                .iter()
                .map(|e| {
                    json!({
                        "name": e.name,
                        "dim": e.arrangement.dim(),
                        "size": e.arrangement.len(),
                        "description": e.description,
                        "pivot": e.pivot.as_ref().map(|h| h.format_tuple()),
                    })
                })
                .collect();
            Ok(Report::new("examples", None, json!({ "examples": list }), text))
        }
        Some(ExamplesCmd::Dump { name }) => {
            let e = catalog::lookup(name)?;
            let text = format!("# {}: {}\n{}", e.name, e.description, e.arrangement.to_text());
            let result = json!({
                "name": e.name,
                "description": e.description,
                "arrangement": ArrangementJson::from_multi(&e.arrangement.simple()),
            });
            Ok(Report::new("examples", None, result, text))
        }
    }
}
