use arr_core::catalog;
use arr_core::derivation::{
    find_free_basis, generators, mdr, pd_exact, surjectivity, DerivationModule, FreeBasisOutcome, RestrictionKind,
};
use arr_core::graded::exact_dim;
use arr_core::matrix::ExactMatrix;
use arr_core::monomial::homogeneous_monomials;
use arr_core::poly::Monomial;
use arr_core::{Arrangement, LinearForm, Poly, Rational};

fn h(r: &[i64]) -> LinearForm {
    LinearForm::from_ints(r).unwrap()
}

#[test]
fn xyz_sum_generators() {
    let a = catalog::boolean_plus_sum(3);
    let g = generators(&DerivationModule::of(&a), None).unwrap();
    assert_eq!(g.degrees(), vec![1, 2, 2, 2]);
    assert_eq!(pd_exact(&a).unwrap(), 1);
}

#[test]
fn braid_is_free() {
    let a = catalog::braid_type();
    match find_free_basis(&a.simple(), a.len() as u32).unwrap() {
        FreeBasisOutcome::Free(c) => assert_eq!(c.degrees, vec![1, 2, 3, 4]),
        o => panic!("{o:?}"),
    }
}

#[test]
fn ziegler_pair() {
    let x = h(&[1, 0, 0]);
    let a1 = catalog::ziegler_one();
    let a2 = catalog::ziegler_two();
    assert_eq!(exact_dim(&DerivationModule::annihilating(&a1, &x), 5).unwrap(), 1);
    assert_eq!(exact_dim(&DerivationModule::annihilating(&a2, &x), 5).unwrap(), 0);
    assert_eq!(mdr(&a1, &x).unwrap(), 5);
    assert_eq!(mdr(&a2, &x).unwrap(), 6);
    assert_eq!(generators(&DerivationModule::of(&a1), None).unwrap().degrees(), vec![1, 5, 6, 6, 6]);
    // D(𝒜₂)_5 = S_4·θ_E and dim D(𝒜₂)_6 = 27 = 21 + 6, so six generators in degree 6
    assert_eq!(generators(&DerivationModule::of(&a2), None).unwrap().degrees(), vec![1, 6, 6, 6, 6, 6, 6]);
    assert!(surjectivity(RestrictionKind::Euler, &a1, &x, None).unwrap().surjective);
    assert!(!surjectivity(RestrictionKind::Euler, &a2, &x, None).unwrap().surjective);
}

/// Dimension of `D(𝒜)_d` (or `D_H`) from exact rational linear algebra on substituted forms.
fn naive_dim(a: &Arrangement, h: Option<&LinearForm>, d: u32) -> usize {
    let l = a.dim();
    let monos = homogeneous_monomials(l, d as usize);
    let unknowns: Vec<(usize, Vec<u32>)> = (0..l).flat_map(|i| monos.iter().map(move |e| (i, e.clone()))).collect();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut push_conditions = |images: Vec<Poly>| {
        let mut keys: Vec<Monomial> = Vec::new();
        for p in &images {
            for (m, _) in p.terms() {
                if !keys.contains(m) {
                    keys.push(m.clone());
                }
            }
        }
        for k in keys {
            rows.push(images.iter().map(|p| p.coeff(&k)).collect());
        }
    };
    for f in a.forms() {
        let c = f.rational_coeffs();
        let j = f.pivot_variable();
        let mut sub = Poly::zero(l);
        for i in 0..l {
            if i != j {
                sub = &sub + &Poly::var(l, i).scale(&(-&c[i] / &c[j]));
            }
        }
        let images = unknowns
            .iter()
            .map(|(i, e)| Poly::monomial(Monomial(e.clone()), c[*i].clone()).substitute(j, &sub))
            .collect();
        push_conditions(images);
    }
    if let Some(h) = h {
        let c = h.rational_coeffs();
        push_conditions(unknowns.iter().map(|(i, e)| Poly::monomial(Monomial(e.clone()), c[*i].clone())).collect());
    }
    if rows.is_empty() {
        return unknowns.len();
    }
    unknowns.len() - ExactMatrix::from_rows(&rows).rank()
}

#[test]
fn dimensions_match_naive_oracle() {
    let x = h(&[1, 0, 0]);
    for a in [catalog::ziegler_one(), catalog::ziegler_two(), catalog::boolean_plus_sum(3)] {
        for d in 0..=6 {
            assert_eq!(exact_dim(&DerivationModule::of(&a), d).unwrap(), naive_dim(&a, None, d), "D_{d}");
            assert_eq!(exact_dim(&DerivationModule::annihilating(&a, &x), d).unwrap(), naive_dim(&a, Some(&x), d), "D_H_{d}");
        }
    }
}

#[test]
fn ziegler_two_degree_six_count() {
    let a2 = catalog::ziegler_two();
    assert_eq!(arr_core::lattice::char_poly(&a2), arr_core::lattice::char_poly(&catalog::ziegler_one()));
    assert_eq!(naive_dim(&a2, None, 5), 15);
    assert_eq!(naive_dim(&a2, None, 6), 27);
    assert_eq!(naive_dim(&catalog::ziegler_one(), None, 5), 16);
}
