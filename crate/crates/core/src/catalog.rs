//! Built-in example arrangements.

use crate::arrangement::{Arrangement, LinearForm};
use crate::error::{ArrError, Result};

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub arrangement: Arrangement,
    /// Distinguished hyperplane used by the worked example, if any.
    pub pivot: Option<LinearForm>,
}

fn rows(dim: usize, rs: &[&[i64]]) -> Arrangement {
    Arrangement::from_int_rows(dim, &rs.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn form(r: &[i64]) -> LinearForm {
    LinearForm::from_ints(r).unwrap()
}

fn entry(name: &str, description: &str, arrangement: Arrangement, pivot: Option<&[i64]>) -> CatalogEntry {
    CatalogEntry {
        name: name.to_string(),
        description: description.to_string(),
        arrangement,
        pivot: pivot.map(form),
    }
}

/// `xyzw` times all differences of coordinates.
pub fn braid_type() -> Arrangement {
    let mut a = Arrangement::boolean(4);
    for i in 0..4 {
        for j in i + 1..4 {
            let mut r = vec![0; 4];
            r[i] = 1;
            r[j] = -1;
            a = a.add(&form(&r)).unwrap();
        }
    }
    a
}

pub fn braid_plus() -> Arrangement {
    braid_type().add(&form(&[1, 1, 1, 1])).unwrap()
}

/// `x1x2x3x4(x1−x2)(x2−x3)(x1−x3)(x1−x4)(x2−x3−x4)`.
pub fn b9() -> Arrangement {
    rows(
        4,
        &[
            &[1, 0, 0, 0],
            &[0, 1, 0, 0],
            &[0, 0, 1, 0],
            &[0, 0, 0, 1],
            &[1, -1, 0, 0],
            &[0, 1, -1, 0],
            &[1, 0, -1, 0],
            &[1, 0, 0, -1],
            &[0, 1, -1, -1],
        ],
    )
}

pub fn b_plus() -> Arrangement {
    b9().add(&form(&[0, 1, 0, -1])).unwrap()
}

/// Coordinate hyperplanes plus `x1 + … + xℓ`.
pub fn boolean_plus_sum(dim: usize) -> Arrangement {
    Arrangement::boolean(dim).add(&form(&vec![1; dim])).unwrap()
}

/// `xyzwu(x+w)(x+y+z+w)`.
pub fn ipd1_five() -> Arrangement {
    let mut a = Arrangement::boolean(5);
    a = a.add(&form(&[1, 0, 0, 1, 0])).unwrap();
    a.add(&form(&[1, 1, 1, 1, 0])).unwrap()
}

pub fn ipd3_five() -> Arrangement {
    ipd1_five().add(&form(&[0, 1, 0, -1, -1])).unwrap()
}

/// Coordinate hyperplanes and the 16 forms `x1 ± x2 ± x3 ± x4 ± x5`.
pub fn edelman_reiner() -> Arrangement {
    let mut a = Arrangement::boolean(5);
    for mask in 0..16 {
        let mut r = vec![1i64; 5];
        for k in 0..4 {
            if mask >> k & 1 == 1 {
                r[k + 1] = -1;
            }
        }
        a = a.add(&form(&r)).unwrap();
    }
    a
}

pub fn edelman_reiner_pivot() -> LinearForm {
    form(&[1, -1, -1, -1, -1])
}

fn ziegler_common() -> Vec<&'static [i64]> {
    vec![&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1], &[2, 1, 1], &[2, 3, 1], &[2, 3, 4]]
}

pub fn ziegler_one() -> Arrangement {
    let mut r = ziegler_common();
    r.push(&[1, 0, 3]);
    r.push(&[1, 2, 3]);
    rows(3, &r)
}

pub fn ziegler_two() -> Arrangement {
    let mut r = ziegler_common();
    r.push(&[3, 0, 5]);
    r.push(&[3, 4, 5]);
    rows(3, &r)
}

/// `n` hyperplanes in general position, normals on the moment curve `(1, i, i², …)`.
pub fn generic(dim: usize, n: usize) -> Arrangement {
    let rs: Vec<Vec<i64>> = (1..=n as i64).map(|i| (0..dim as u32).map(|k| i.pow(k)).collect()).collect();
    Arrangement::from_int_rows(dim, &rs).unwrap()
}

pub fn entries() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for l in 1..=6 {
        out.push(entry(&format!("boolean{l}"), &format!("coordinate hyperplanes in dimension {l}"), Arrangement::boolean(l), None));
    }
    out.push(entry("braid", "xyzw and all coordinate differences; free with exponents (1,2,3,4)", braid_type(), None));
    out.push(entry("braid-plus", "braid arrangement plus x+y+z+w; projective dimension 2", braid_plus(), Some(&[1, 1, 1, 1])));
    out.push(entry("b9", "x1x2x3x4(x1-x2)(x2-x3)(x1-x3)(x1-x4)(x2-x3-x4); projective dimension 1", b9(), Some(&[0, 0, 0, 1])));
    out.push(entry("b-plus", "b9 plus x2-x4; free with exponents (1,3,3,3)", b_plus(), Some(&[0, 1, 0, -1])));
    out.push(entry("xyz-sum", "xyz(x+y+z)", boolean_plus_sum(3), Some(&[1, 1, 1])));
    out.push(entry("xyzw-sum", "xyzw(x+y+z+w); maximal projective dimension", boolean_plus_sum(4), Some(&[1, 1, 1, 1])));
    out.push(entry("x5-sum", "x1x2x3x4x5(x1+...+x5)", boolean_plus_sum(5), Some(&[1, 1, 1, 1, 1])));
    out.push(entry("ipd1-5", "xyzwu(x+w)(x+y+z+w); projective dimension 1", ipd1_five(), Some(&[1, 1, 1, 1, 0])));
    out.push(entry("ipd3-5", "ipd1-5 plus y-w-u", ipd3_five(), Some(&[0, 1, 0, -1, -1])));
    out.push(entry("er", "Edelman-Reiner: x1..x5 and x1±x2±x3±x4±x5; free with exponents (1,5,5,5,5)", edelman_reiner(), Some(&[1, -1, -1, -1, -1])));
    out.push(entry("ziegler1", "Ziegler pair, first member; same lattice as ziegler2", ziegler_one(), Some(&[1, 0, 0])));
    out.push(entry("ziegler2", "Ziegler pair, second member; same lattice as ziegler1", ziegler_two(), Some(&[1, 0, 0])));
    out
}

/// Looks up an entry; `genericL-N` and `booleanL` are generated on demand.
pub fn lookup(name: &str) -> Result<CatalogEntry> {
    if let Some(e) = entries().into_iter().find(|e| e.name == name) {
        return Ok(e);
    }
    if let Some(rest) = name.strip_prefix("generic") {
        if let Some((l, n)) = rest.split_once('-') {
            if let (Ok(l), Ok(n)) = (l.parse::<usize>(), n.parse::<usize>()) {
                if l >= 1 && n >= 1 {
                    return Ok(entry(name, &format!("{n} generic hyperplanes in dimension {l}"), generic(l, n), None));
                }
            }
        }
    }
    if let Some(l) = name.strip_prefix("boolean").and_then(|l| l.parse::<usize>().ok()) {
        if l >= 1 {
            return Ok(entry(name, &format!("coordinate hyperplanes in dimension {l}"), Arrangement::boolean(l), None));
        }
    }
    Err(ArrError::Invalid(format!("unknown example `{name}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(braid_type().len(), 10);
        assert_eq!(b9().len(), 9);
        assert_eq!(edelman_reiner().len(), 21);
        assert_eq!(ziegler_one().len(), 9);
        assert_eq!(generic(4, 7).len(), 7);
        assert!(lookup("generic3-5").is_ok());
        assert!(lookup("nope").is_err());
    }
}
