use arr_core::catalog;
use arr_core::lattice::{b2, b2_zero, char_poly, deletion_restriction_check, CharPoly, IntersectionLattice};
use arr_core::upoly::UPoly;
use arr_core::{Arrangement, LinearForm};

#[test]
fn boolean4_chi() {
    assert_eq!(char_poly(&Arrangement::boolean(4)), UPoly::from_roots(&[1, 1, 1, 1]));
}

#[test]
fn braid_chi() {
    assert_eq!(char_poly(&catalog::braid_type()), UPoly::from_roots(&[1, 2, 3, 4]));
}

#[test]
fn er_restriction_chi() {
    let er = catalog::edelman_reiner();
    let h = catalog::edelman_reiner_pivot();
    let r = er.restriction(&h).unwrap();
    assert_eq!(r.len(), 15);
    let expected = &UPoly::from_roots(&[1, 4]) * &UPoly::from_i64(&[26, -10, 1]);
    assert_eq!(char_poly(&r), expected);
    assert_eq!(b2(&er), 170);
    assert_eq!(b2(&r), 80);
    assert_eq!(IntersectionLattice::build(&er).level(1).len(), 21);
}

#[test]
fn b9_betti() {
    let b = catalog::b9();
    assert_eq!(b2(&b), 30);
    assert_eq!(b2_zero(&b), 22);
}

#[test]
fn braid_plus_restriction() {
    let a = catalog::braid_plus();
    let h = LinearForm::from_ints(&[1, 1, 1, 1]).unwrap();
    let r = a.restriction(&h).unwrap();
    assert_eq!(CharPoly::of(&r).reduced().unwrap(), UPoly::from_i64(&[26, -9, 1]));
}

#[test]
fn er_deletion_restriction() {
    let er = catalog::edelman_reiner();
    assert!(deletion_restriction_check(&er, &catalog::edelman_reiner_pivot()).unwrap().holds);
}
