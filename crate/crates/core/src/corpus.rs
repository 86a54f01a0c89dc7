//! Small named spaces, sheaves, complexes and resolutions used as worked
//! examples and test fixtures.

use std::collections::BTreeMap;

use crate::exactalg::{FpGroup, GroupHom, IntMatrix};
use crate::finspace::{build_space, FiniteSpace};
use crate::godement::{godement_resolution, Resolution};
use crate::sheaves::{build_sheaf, constant_sheaf, direct_sum_sheaf, skyscraper, zero_sheaf, Sheaf, SheafHom};
use crate::spectral::{DoubleComplex, SheafComplex};
use crate::{Error, Result};

pub const SPACES: [&str; 5] = ["point", "sierpinski", "discrete2", "pseudocircle", "sphere2"];

/// `(space, sheaf)` names of the bundled sheaves.
pub const SHEAVES: [(&str, &str); 13] = [
    ("point", "constZ"),
    ("sierpinski", "constZ"),
    ("sierpinski", "mod3"),
    ("sierpinski", "sky_0"),
    ("discrete2", "constZ2"),
    ("discrete2", "sky_u"),
    ("pseudocircle", "constZ"),
    ("pseudocircle", "constZ2"),
    ("pseudocircle", "mobius"),
    ("pseudocircle", "sky_c"),
    ("pseudocircle", "zero"),
    ("sphere2", "constZ"),
    ("sphere2", "zero"),
];

pub const RESOLUTIONS: [&str; 2] = ["sierpinski_skyscrapers", "pseudocircle_constant_term"];

pub const DOUBLE_COMPLEXES: [&str; 4] = ["zero_square", "exact_square", "one_row", "hidden_extension"];

pub fn space(name: &str) -> Option<FiniteSpace> {
    let x = match name {
        "point" => build_space(&["pt"], &[]),
        "sierpinski" => build_space(&["0", "1"], &[("1", "0")]),
        "discrete2" => build_space(&["u", "v"], &[]),
        "pseudocircle" => build_space(&["a", "b", "c", "d"], &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")]),
        // two open points, two circle points, two closed points
        "sphere2" => {
            let mut leq = Vec::new();
            for (lo, hi) in [(["a", "b"], ["c", "d"]), (["c", "d"], ["e", "f"])] {
                for l in lo {
                    for h in hi {
                        leq.push((l, h));
                    }
                }
            }
            build_space(&["a", "b", "c", "d", "e", "f"], &leq)
        }
        _ => return None,
    };
    Some(x.expect("bundled space"))
}

/// Sheaves available on any space: `constZ`, `constZ2`, `zero` and `sky_<p>`
/// (`Z` on the closure of `p`); plus `mod3` on `sierpinski` and `mobius` on
/// `pseudocircle`.
pub fn sheaf(x: &FiniteSpace, space_name: &str, name: &str) -> Result<Sheaf> {
    let z = FpGroup::free(1);
    match (space_name, name) {
        (_, "constZ") => Ok(constant_sheaf(x, &z)),
        (_, "constZ2") => Ok(constant_sheaf(x, &FpGroup::cyclic(2))),
        (_, "zero") => Ok(zero_sheaf(x)),
        (_, s) if s.starts_with("sky_") => skyscraper(x, x.point(&s[4..])?, &z),
        ("sierpinski", "mod3") => {
            let (c, o) = (x.point("0")?, x.point("1")?);
            let mut stalks = vec![FpGroup::trivial(); 2];
            stalks[c] = z.clone();
            stalks[o] = FpGroup::cyclic(3);
            let r = GroupHom::new(z, FpGroup::cyclic(3), IntMatrix::identity(1))?;
            build_sheaf(x, stalks, vec![(c, o, r)])
        }
        ("pseudocircle", "mobius") => {
            let p = |n: &str| x.point(n);
            let maps = vec![
                (p("c")?, p("a")?, GroupHom::identity(z.clone())),
                (p("c")?, p("b")?, GroupHom::identity(z.clone())),
                (p("d")?, p("a")?, GroupHom::identity(z.clone())),
                (p("d")?, p("b")?, GroupHom::scalar(z.clone(), -1)),
            ];
            build_sheaf(x, vec![z; 4], maps)
        }
        _ => Err(Error::UnknownName(format!("{space_name}/{name}"))),
    }
}

/// A bundled `(space, sheaf)` pair.
#[derive(Clone, Debug)]
pub struct Entry {
    pub space_name: &'static str,
    pub sheaf_name: &'static str,
    pub sheaf: Sheaf,
}

pub fn entries() -> Vec<Entry> {
    SHEAVES
        .iter()
        .map(|&(s, f)| {
            let x = space(s).unwrap();
            Entry { space_name: s, sheaf_name: f, sheaf: sheaf(&x, s, f).expect("bundled sheaf") }
        })
        .collect()
}

/// `Z` skyscrapers at every closed point of every bundled space.
pub fn closed_point_skyscrapers() -> Vec<(String, Sheaf)> {
    let mut out = Vec::new();
    for s in SPACES {
        let x = space(s).unwrap();
        for p in x.points().filter(|&p| x.is_closed_point(p)) {
            out.push((format!("{s}/sky_{}", x.name(p)), skyscraper(&x, p, &FpGroup::free(1)).unwrap()));
        }
    }
    out
}

/// `single_<sheaf>` is `0 → F → 0`; `godement_<sheaf>` is its Godement
/// resolution through `C^{kmax+1}`.
pub fn complex(x: &FiniteSpace, space_name: &str, name: &str, kmax: usize) -> Result<SheafComplex> {
    if let Some(f) = name.strip_prefix("single_") {
        return Ok(SheafComplex::single(&sheaf(x, space_name, f)?));
    }
    if let Some(f) = name.strip_prefix("godement_") {
        let res = godement_resolution(&sheaf(x, space_name, f)?, kmax).resolution;
        return SheafComplex::new(res.terms, res.differentials);
    }
    Err(Error::UnknownName(name.to_string()))
}

/// The bundled hand-built resolutions.
pub fn resolution(name: &str) -> Option<Resolution> {
    match name {
        "sierpinski_skyscrapers" => Some(sierpinski_skyscrapers()),
        "pseudocircle_constant_term" => {
            let x = space("pseudocircle").unwrap();
            let f = constant_sheaf(&x, &FpGroup::free(1));
            let id = SheafHom::identity(&f);
            Some(Resolution::new(f.clone(), vec![f], id, Vec::new(), false).unwrap())
        }
        _ => None,
    }
}

/// Small bundled double complexes:
///
/// - `zero_square`: `Z` in each cell of a `2 × 2` square, all maps zero.
/// - `exact_square`: the same square with identity maps.
/// - `one_row`: `Z --0--> Z --3--> Z` in row zero.
/// - `hidden_extension`: total `H^1 = Z/4` whose `p`-filtration splits it
///   into two copies of `Z/2`.
pub fn double_complex(name: &str) -> Option<DoubleComplex> {
    let z = FpGroup::free(1);
    let id = GroupHom::identity(z.clone());
    let square = vec![vec![z.clone(), z.clone()], vec![z.clone(), z.clone()]];
    let k = match name {
        "zero_square" => DoubleComplex::new(square, BTreeMap::new(), BTreeMap::new()),
        "exact_square" => DoubleComplex::new(
            square,
            BTreeMap::from([((0, 0), id.clone()), ((1, 0), id.clone())]),
            BTreeMap::from([((0, 0), id.clone()), ((0, 1), id)]),
        ),
        "one_row" => DoubleComplex::new(
            vec![vec![z.clone()], vec![z.clone()], vec![z.clone()]],
            BTreeMap::new(),
            BTreeMap::from([((1, 0), GroupHom::scalar(z, 3))]),
        ),
        "hidden_extension" => {
            let z2 = FpGroup::free(2);
            let row = |v: [i64; 2]| IntMatrix::from_i64_rows(&[v.to_vec()], 2).expect("one row");
            DoubleComplex::new(
                vec![vec![z2.clone(), z.clone()], vec![z.clone(), FpGroup::trivial()]],
                BTreeMap::from([((0, 0), GroupHom::new(z2.clone(), z.clone(), row([-2, 4])).expect("map"))]),
                BTreeMap::from([((0, 0), GroupHom::new(z2, z, row([1, 0])).expect("map"))]),
            )
        }
        _ => return None,
    };
    Some(k.expect("bundled double complex"))
}

/// `0 → Z → sky_1 ⊕ sky_0 → sky_0 → 0` on the Sierpiński space, with
/// `s ↦ (s, 2s)` and `(x, y) ↦ y - 2x` at the closed point.
fn sierpinski_skyscrapers() -> Resolution {
    let x = space("sierpinski").unwrap();
    let z = FpGroup::free(1);
    let (c, o) = (x.point("0").unwrap(), x.point("1").unwrap());
    let f = constant_sheaf(&x, &z);
    let l0 = direct_sum_sheaf(&[&skyscraper(&x, o, &z).unwrap(), &skyscraper(&x, c, &z).unwrap()]).unwrap();
    let l1 = skyscraper(&x, c, &z).unwrap();
    let m = |rows: &[Vec<i64>], cols| IntMatrix::from_i64_rows(rows, cols).unwrap();
    let mut aug = vec![None, None];
    aug[c] = Some(GroupHom::new(z.clone(), l0.stalk(c).clone(), m(&[vec![1], vec![2]], 1)).unwrap());
    aug[o] = Some(GroupHom::new(z.clone(), l0.stalk(o).clone(), m(&[vec![1]], 1)).unwrap());
    let mut d = vec![None, None];
    d[c] = Some(GroupHom::new(l0.stalk(c).clone(), l1.stalk(c).clone(), m(&[vec![-2, 1]], 2)).unwrap());
    d[o] = Some(GroupHom::zero(l0.stalk(o).clone(), l1.stalk(o).clone()));
    let aug = SheafHom::new(f.clone(), l0.clone(), aug.into_iter().map(Option::unwrap).collect()).unwrap();
    let d = SheafHom::new(l0.clone(), l1.clone(), d.into_iter().map(Option::unwrap).collect()).unwrap();
    Resolution::new(f, vec![l0, l1], aug, vec![d], false).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn everything_builds() {
        assert!(entries().len() >= 10);
        for s in SPACES {
            assert!(space(s).is_some());
        }
        for r in RESOLUTIONS {
            assert!(resolution(r).unwrap().is_exact().unwrap());
        }
        for d in DOUBLE_COMPLEXES {
            assert!(double_complex(d).is_some());
        }
        assert_eq!(space("sphere2").unwrap().height(), 2);
    }
}
