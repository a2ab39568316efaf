use arr_core::arrangement::{ArrangementJson, Flat, LinearForm};
use arr_core::catalog::lookup;
use arr_core::derivation::RestrictionKind;
use arr_core::engine::{
    classify, df_certificate, infer_pd, ipd_certificate, leaf, node, verify, Certificate, Class, Conclusion, Context,
    InferOptions, Premise, Role, SearchBudget, Witness,
};
use arr_core::error::ArrError;

fn cat(name: &str) -> arr_core::arrangement::Arrangement {
    lookup(name).unwrap().arrangement
}

fn infer(name: &str) -> (usize, usize, Certificate) {
    let r = infer_pd(&cat(name), &InferOptions::default()).unwrap();
    verify(&r.certificate).unwrap();
    (r.lo, r.hi, r.certificate)
}

#[test]
fn infer_small_catalog() {
    for (name, pd) in [("xyz-sum", 1), ("boolean4", 0), ("braid", 0), ("xyzw-sum", 2), ("b9", 1), ("b-plus", 0)] {
        let (lo, hi, _) = infer(name);
        assert_eq!((lo, hi), (pd, pd), "{name}");
    }
}

#[test]
fn infer_er_is_free_through_yoshinaga() {
    let (lo, hi, c) = infer("er");
    assert_eq!((lo, hi), (0, 0));
    assert!(c.rules_used().iter().any(|r| r == "yoshinaga"));
}

#[test]
fn infer_ipd1_five() {
    let (lo, hi, _) = infer("ipd1-5");
    assert_eq!((lo, hi), (1, 1));
}

fn ipd_member(name: &str, k: usize) -> Certificate {
    let c = ipd_certificate(&cat(name), k, &SearchBudget::default()).unwrap().expect("membership");
    verify(&c).unwrap();
    c
}

#[test]
fn ipd_memberships() {
    for (name, k, i) in [("braid-plus", 2, 4), ("ipd1-5", 1, 5), ("ipd3-5", 3, 5)] {
        let c = ipd_member(name, k);
        assert_eq!(c.pd_range(), Some((k, k)), "{name}");
        assert_eq!(c.premises[0].conclusion, Conclusion::Member { class: Class::Ipd { k, i } }, "{name}");
    }
}

#[test]
fn braid_is_divisionally_free() {
    let c = df_certificate(&cat("braid")).unwrap();
    assert_eq!(c.conclusion, Conclusion::Member { class: Class::Df });
    let c = df_certificate(&cat("xyz-sum")).unwrap();
    assert_eq!(c.conclusion, Conclusion::NotMember { class: Class::Df });
    verify(&c).unwrap();
}

#[test]
fn classify_braid_plus() {
    let r = classify(&cat("braid-plus"), None, &SearchBudget::default()).unwrap();
    assert_eq!(r.df.conclusion, Conclusion::NotMember { class: Class::Df });
    let (k, c) = r.ipd.expect("ipd class");
    assert_eq!(k, 2);
    verify(&c).unwrap();
}

/// xyzw-sum along x1: the exact pd is maximal, so NMPD cannot be derived.
#[test]
fn xyzw_sum_nmpd_fails() {
    let a = cat("xyzw-sum");
    let h = LinearForm::from_ints(&[1, 0, 0, 0]).unwrap();
    let ctx = Context::pair(&a, &h).unwrap();
    let center = Flat::from_forms(4, a.forms()).format();
    let role = Role::Localized { flat: center };
    let local = leaf::computed_pd(&ctx.subject(&role).unwrap()).unwrap();
    assert_eq!(local.pd_range(), Some((2, 2)));
    let whole = leaf::computed_pd(&a.simple()).unwrap();
    let err = node(
        "nmpd_cond",
        &ctx,
        Role::Whole,
        vec![Premise::new(Role::Whole, whole), Premise::new(role, local)],
        Some(Witness::Deleted { deleted: false }),
    );
    assert!(matches!(err, Err(ArrError::Invalid(_))), "{err:?}");

    let b2 = leaf::computed_b2(&ctx).unwrap();
    let err = node(
        "surjectivity_b2",
        &ctx,
        Role::Whole,
        vec![Premise::new(Role::Whole, b2)],
        Some(Witness::Map { map: RestrictionKind::Ziegler }),
    );
    assert!(matches!(err, Err(ArrError::Invalid(_))));

    let s = leaf::computed_surjectivity(&ctx, RestrictionKind::Ziegler).unwrap();
    assert_eq!(s.conclusion, Conclusion::Surjective { map: RestrictionKind::Ziegler, value: false });
}

#[test]
fn certificate_json_round_trip() {
    let (_, _, c) = infer("xyzw-sum");
    let text = serde_json::to_string_pretty(&c).unwrap();
    let back: Certificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, c);
    verify(&back).unwrap();
}

#[test]
fn tampered_certificates_are_rejected() {
    let (_, _, c) = infer("xyzw-sum");

    let mut t = c.clone();
    t.conclusion = Conclusion::Pd { lo: 0, hi: 0 };
    assert!(verify(&t).is_err());

    let mut t = c.clone();
    t.premises[0].subject = ArrangementJson::from_multi(&cat("xyz-sum").simple());
    assert!(verify(&t).is_err());

    let mut t = c;
    t.rule = "max_pd".into();
    assert!(verify(&t).is_err());
}

#[test]
fn premises_must_match_their_role() {
    let a = cat("braid");
    let wrong = df_certificate(&cat("boolean4")).unwrap();
    let r = node("sf_free", &Context::single(&a), Role::Whole, vec![Premise::new(Role::Whole, wrong)], None);
    assert!(r.is_err());
}

#[test]
fn multiarrangement_context_rejects_pair_rules() {
    let m = arr_core::arrangement::Multiarrangement::parse("dim 2\n1 0 * 2\n0 1\n1 1\n").unwrap();
    let ctx = Context::multi(&m);
    assert!(leaf::computed_b2(&ctx).is_err());
    let c = leaf::computed_freeness(&m).unwrap();
    assert_eq!(c.conclusion, Conclusion::Free { exponents: vec![2, 2] });
}
