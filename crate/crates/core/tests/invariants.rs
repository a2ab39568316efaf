use num_bigint::BigInt;
use proptest::prelude::*;

use arr_core::arrangement::{Arrangement, LinearForm};
use arr_core::derivation::{
    factorization_matches, find_free_basis, graded_basis, pd_exact, split_check, surjectivity, Derivation,
    DerivationModule, FreeBasisOutcome, RestrictionKind,
};
use arr_core::lattice::{b2, char_poly, CharPoly, IntersectionLattice};
use arr_core::multib2::{b2_equality_check, b2_equality_holds};
use arr_core::upoly::UPoly;

fn arrangement(dim: usize, max: usize) -> impl Strategy<Value = Arrangement> {
    prop::collection::vec(prop::collection::vec(-2i64..=2, dim), 1..=max).prop_filter_map("degenerate", move |rows| {
        let forms: Vec<LinearForm> = rows.iter().filter_map(|r| LinearForm::from_ints(r).ok()).collect();
        let a = Arrangement::new(dim, forms).ok()?;
        (a.len() >= 2).then_some(a)
    })
}

/// Whitney's formula `χ(t) = Σ_{S ⊆ 𝒜} (−1)^{|S|} t^{ℓ − r(S)}`.
fn whitney(a: &Arrangement) -> UPoly {
    let n = a.len();
    let mut c = vec![BigInt::from(0); a.dim() + 1];
    for mask in 0u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let r = a.subarrangement(&idx).rank();
        let sign = if idx.len() % 2 == 0 { 1 } else { -1 };
        c[a.dim() - r] += sign;
    }
    UPoly::new(c)
}

fn times(f: &LinearForm, theta: &Derivation) -> Derivation {
    let p = f.to_poly();
    Derivation { degree: theta.degree + 1, components: theta.components.iter().map(|c| &p * c).collect() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chi_matches_whitney(a in arrangement(3, 7)) {
        prop_assert_eq!(char_poly(&a), whitney(&a));
    }

    #[test]
    fn chi_vanishes_at_one(a in arrangement(4, 7)) {
        prop_assert!(UPoly::linear_root(1).divides(&char_poly(&a)));
    }

    #[test]
    fn mobius_signs_alternate(a in arrangement(4, 7)) {
        let lat = IntersectionLattice::build(&a);
        for (c, x) in lat.flats() {
            let s = if c % 2 == 0 { 1 } else { -1 };
            prop_assert!(s * x.mobius > 0);
        }
    }

    #[test]
    fn b2_from_rank_two_flats(a in arrangement(4, 8)) {
        let betti = CharPoly::of(&a).betti(2).unwrap();
        prop_assert_eq!(BigInt::from(b2(&a)), betti);
    }

    #[test]
    fn deletion_restriction(a in arrangement(3, 7), k in 0usize..7) {
        let h = a.forms()[k % a.len()].clone();
        let del = char_poly(&a.delete(&h).unwrap());
        let res = char_poly(&a.restriction(&h).unwrap());
        prop_assert_eq!(char_poly(&a), &del - &res);
    }

    #[test]
    fn b2_gaps(a in arrangement(3, 7), k in 0usize..7) {
        let h = a.forms()[k % a.len()].clone();
        let r = b2_equality_check(&a, &h).unwrap();
        prop_assert!(r.upper_gap() >= 0 && r.lower_gap() >= 0);
        prop_assert_eq!(r.b2_gap(), r.upper_gap() + r.lower_gap());
        prop_assert_eq!(r.b2_equality, r.upper && r.lower);
        prop_assert_eq!(r.b2_equality, b2_equality_holds(&a, &h).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn euler_splitting(a in arrangement(3, 6), k in 0usize..6) {
        let h = a.forms()[k % a.len()].clone();
        prop_assert!(split_check(&a, &h, a.len() as u32).unwrap());
    }

    #[test]
    fn free_implies_factorization(a in arrangement(3, 6)) {
        if let FreeBasisOutcome::Free(c) = find_free_basis(&a.simple(), a.len() as u32).unwrap() {
            prop_assert_eq!(c.degrees.iter().sum::<u32>() as usize, a.len());
            prop_assert!(factorization_matches(&a, &c.degrees));
        }
    }

    #[test]
    fn pd_bounds(a in arrangement(4, 6)) {
        let pd = pd_exact(&a).unwrap();
        prop_assert!(pd <= a.rank().saturating_sub(2));
        let lat = IntersectionLattice::build(&a);
        for (c, x) in lat.flats() {
            if c == 3 {
                let local = a.localization(&x.flat).unwrap();
                prop_assert!(pd_exact(&local).unwrap() <= pd);
            }
        }
    }

    #[test]
    fn deletion_multiplies_into(a in arrangement(3, 6), k in 0usize..6, d in 1u32..4) {
        let h = a.forms()[k % a.len()].clone();
        let del = a.delete(&h).unwrap();
        let big = DerivationModule::of(&a);
        for theta in graded_basis(&DerivationModule::of(&del), d).unwrap() {
            prop_assert!(big.contains_derivation(&times(&h, &theta)));
        }
    }

    #[test]
    fn ziegler_surjective_implies_upper(a in arrangement(3, 6), k in 0usize..6) {
        let h = a.forms()[k % a.len()].clone();
        if surjectivity(RestrictionKind::Ziegler, &a, &h, None).unwrap().surjective {
            prop_assert!(b2_equality_check(&a, &h).unwrap().upper);
        }
    }
}
