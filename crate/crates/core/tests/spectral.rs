mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sheaf_core::corpus;
use sheaf_core::exactalg::{cohomology_at, FpGroup, GroupHom, IntMatrix, Invariants};
use sheaf_core::godement::sheaf_cohomology;
use sheaf_core::sheaves::{constant_sheaf, SheafHom};
use sheaf_core::spectral::*;
use sheaf_core::Error;

use common::{inv, invariants_of};
use sheaf_core::random::random_double_complex;

fn z() -> FpGroup {
    FpGroup::free(1)
}

/// `H^n` of `⊕_{p+q=n} K^{p,q}` with `D = δ + (-1)^p d`, assembled here
/// block by block.
fn oracle_total(k: &DoubleComplex) -> Vec<Invariants> {
    let top = k.pmax() + k.qmax();
    let cells = |n: usize| -> Vec<(usize, usize)> {
        (0..=k.pmax()).filter(|&p| n >= p && n - p <= k.qmax()).map(|p| (p, n - p)).collect()
    };
    let group = |n: usize| FpGroup::direct_sum(&cells(n).iter().map(|&(p, q)| k.cell(p, q)).collect::<Vec<_>>());
    let width = |p: usize, q: usize| k.cell(p, q).ngens();
    let d = |n: usize| -> GroupHom {
        let (src, tgt) = (group(n), group(n + 1));
        let mut m = IntMatrix::zeros(tgt.ngens(), src.ngens());
        let mut col = 0;
        for (p, q) in cells(n) {
            let mut row = 0;
            for (p2, q2) in cells(n + 1) {
                let block = if (p2, q2) == (p + 1, q) {
                    Some(k.d_horiz(p, q).matrix().clone())
                } else if (p2, q2) == (p, q + 1) {
                    let v = k.d_vert(p, q).matrix().clone();
                    Some(if p % 2 == 1 { v.neg() } else { v })
                } else {
                    None
                };
                if let Some(b) = block {
                    m.set_block(row, col, &b);
                }
                row += width(p2, q2);
            }
            col += width(p, q);
        }
        GroupHom::new(src, tgt, m).unwrap()
    };
    (0..=top)
        .map(|n| {
            let incoming = if n == 0 { GroupHom::zero(FpGroup::trivial(), group(0)) } else { d(n - 1) };
            cohomology_at(&incoming, &d(n)).unwrap().group().invariants().clone()
        })
        .collect()
}

/// `E_1` of the `p`-filtration: vertical cohomology cell by cell.
fn oracle_e1_by_p(k: &DoubleComplex) -> Vec<Vec<Invariants>> {
    (0..=k.pmax())
        .map(|p| {
            (0..=k.qmax())
                .map(|q| {
                    let incoming = if q == 0 { GroupHom::zero(FpGroup::trivial(), k.cell(p, 0)) } else { k.d_vert(p, q - 1).clone() };
                    cohomology_at(&incoming, k.d_vert(p, q)).unwrap().group().invariants().clone()
                })
                .collect()
        })
        .collect()
}

fn square(vert: BTreeMap<(usize, usize), GroupHom>, horiz: BTreeMap<(usize, usize), GroupHom>) -> Result<DoubleComplex, Error> {
    DoubleComplex::new(vec![vec![z(), z()], vec![z(), z()]], vert, horiz)
}

#[test]
fn total_complex_examples() {
    let k = DoubleComplex::new(vec![vec![z()], vec![z()], vec![z()]], BTreeMap::new(), BTreeMap::from([((1, 0), GroupHom::scalar(z(), 3))])).unwrap();
    let tc = total_complex(&k).unwrap();
    let h: Vec<Invariants> = (0..3).map(|n| tc.complex.cohomology(n).invariants().clone()).collect();
    assert_eq!(h, [inv(1, &[]), inv(0, &[]), inv(0, &[3])]);
    assert_eq!(h, oracle_total(&k));

    let id = GroupHom::identity(z());
    let exact = square(
        BTreeMap::from([((0, 0), id.clone()), ((1, 0), id.clone())]),
        BTreeMap::from([((0, 0), id.clone()), ((0, 1), id.clone())]),
    )
    .unwrap();
    assert!(oracle_total(&exact).iter().all(Invariants::is_trivial));
    let ss = spectral_sequence(&exact, Axis::ByP, 4).unwrap();
    assert!(ss.page(1).support().is_empty());

    let zero = square(BTreeMap::new(), BTreeMap::new()).unwrap();
    assert_eq!(oracle_total(&zero).iter().map(|i| i.rank).collect::<Vec<_>>(), [1, 2, 1]);
}

#[test]
fn sign_violation() {
    let id = GroupHom::identity(z());
    let commuting = square(
        BTreeMap::from([((0, 0), id.clone()), ((1, 0), id.clone())]),
        BTreeMap::from([((0, 0), id.clone()), ((0, 1), id.clone())]),
    )
    .unwrap();
    assert!(matches!(total_complex_with(&commuting, SignRule::Unsigned), Err(Error::SignViolation(_))));
    let twisted = square(
        BTreeMap::from([((0, 0), id.clone()), ((1, 0), id.clone())]),
        BTreeMap::from([((0, 0), id.clone()), ((0, 1), id.neg())]),
    );
    assert!(matches!(twisted, Err(Error::SignViolation(_))));
}

#[test]
fn empty_middle_cell() {
    let cells = vec![vec![FpGroup::trivial(), z()], vec![z(), z()]];
    let k = DoubleComplex::new(cells, BTreeMap::new(), BTreeMap::from([((0, 1), GroupHom::identity(z()))])).unwrap();
    for axis in [Axis::ByP, Axis::ByQ] {
        let ss = spectral_sequence(&k, axis, 4).unwrap();
        assert_eq!(invariants_of(&ss.total), oracle_total(&k));
        assert!(ss.recurrence_failures().is_empty());
        assert!(ss.convergence_failures().is_empty());
    }
    assert_eq!(oracle_total(&k), [inv(0, &[]), inv(1, &[]), inv(0, &[])]);
}

#[test]
fn page_range_is_checked() {
    let k = square(BTreeMap::new(), BTreeMap::new()).unwrap();
    assert_eq!(stabilization_bound(&k), 3);
    assert_eq!(spectral_sequence(&k, Axis::ByP, 2).unwrap_err(), Error::NotStabilized { requested: 2, bound: 3 });
    let ss = spectral_sequence(&k, Axis::ByP, 3).unwrap();
    assert_eq!(ss.pages.len(), 4);
    assert_eq!(ss.bidegree(2), (2, -1));
    assert_eq!(spectral_sequence(&k, Axis::ByQ, 3).unwrap().bidegree(2), (-1, 2));
}

#[test]
fn cohomology_sheaves_examples() {
    let x = corpus::space("pseudocircle").unwrap();
    let f = constant_sheaf(&x, &z());
    let h = cohomology_sheaves(&SheafComplex::single(&f)).unwrap();
    assert_eq!(h.len(), 1);
    assert!(h[0].stalks_isomorphic(&f));
    let zero = SheafComplex::new(vec![f.clone(), f.clone()], vec![SheafHom::zero(&f, &f)]).unwrap();
    let h = cohomology_sheaves(&zero).unwrap();
    assert!(h.iter().all(|s| s.stalks_isomorphic(&f)));
    let l = corpus::complex(&x, "pseudocircle", "godement_constZ", 2).unwrap();
    let h = cohomology_sheaves(&l).unwrap();
    assert!(h[0].stalks_isomorphic(&f));
    assert!(h[1..3].iter().all(|s| s.is_zero()));
}

#[test]
fn hypercohomology_examples() {
    let x = corpus::space("pseudocircle").unwrap();
    let single = corpus::complex(&x, "pseudocircle", "single_constZ", 2).unwrap();
    let godement = corpus::complex(&x, "pseudocircle", "godement_constZ", 2).unwrap();
    let zero = corpus::complex(&x, "pseudocircle", "single_zero", 2).unwrap();
    let expected = [inv(1, &[]), inv(1, &[]), inv(0, &[])];
    assert_eq!(invariants_of(&hypercohomology(&x, &single, 2).unwrap().groups), expected);
    let h = hypercohomology(&x, &godement, 2).unwrap();
    assert_eq!(invariants_of(&h.groups), expected);
    assert!(h.by_q.support(1, Some(2)).iter().all(|&(p, _)| p == 0));
    assert!(h.by_p.support(1, Some(2)).iter().all(|&(_, q)| q == 0));
    assert!(hypercohomology(&x, &zero, 2).unwrap().groups.iter().all(FpGroup::is_trivial));
}

#[test]
fn hypercohomology_of_single_sheaves() {
    for e in corpus::entries() {
        let x = e.sheaf.space().clone();
        let h = hypercohomology(&x, &SheafComplex::single(&e.sheaf), 2).unwrap();
        assert_eq!(invariants_of(&h.groups), invariants_of(&sheaf_cohomology(&e.sheaf, 2)), "{}/{}", e.space_name, e.sheaf_name);
        assert_eq!(invariants_of(&h.by_p.total[..3]), oracle_total(&h.double)[..3]);
        assert!(h.by_p.degeneration_page(Some(2)) <= 2);
        assert!(h.by_p.extension_flags.iter().all(|&n| n > 2));
    }
}

#[test]
fn acyclic_resolution_examples() {
    let r = corpus::resolution("sierpinski_skyscrapers").unwrap();
    let rep = acyclic_resolution_check(&r, 1).unwrap();
    assert!(rep.holds());
    assert_eq!(invariants_of(&rep.sections_cohomology), [inv(1, &[]), inv(0, &[])]);

    let r = corpus::resolution("pseudocircle_constant_term").unwrap();
    let rep = acyclic_resolution_check(&r, 2).unwrap();
    assert_eq!(rep.verdict, AcyclicVerdict::NotAcyclic { term: 0, degree: 1 });
    assert!(!rep.groups_agree);

    for e in corpus::entries() {
        let r = sheaf_core::godement::godement_resolution(&e.sheaf, 2).resolution;
        let rep = acyclic_resolution_check(&r, 2).unwrap();
        assert!(rep.holds() && rep.rows_concentrated && rep.columns_concentrated, "{}/{}", e.space_name, e.sheaf_name);
    }
}

#[test]
fn short_resolution_is_rejected() {
    let x = corpus::space("pseudocircle").unwrap();
    let f = constant_sheaf(&x, &z());
    let r = sheaf_core::godement::godement_resolution(&f, 1).resolution;
    assert!(matches!(acyclic_resolution_check(&r, 2), Err(Error::NotAResolution(_))));
}

fn check_pages(k: &DoubleComplex) -> Result<(), TestCaseError> {
    let total = oracle_total(k);
    let e1 = oracle_e1_by_p(k);
    for axis in [Axis::ByP, Axis::ByQ] {
        let ss = spectral_sequence(k, axis, stabilization_bound(k)).unwrap();
        prop_assert_eq!(&invariants_of(&ss.total), &total);
        prop_assert!(ss.recurrence_failures().is_empty());
        prop_assert!(ss.convergence_failures().is_empty());
        prop_assert!(ss.differentials_well_formed());
        prop_assert!(ss.rank_sums_agree());
        for n in 0..total.len() {
            let mut parts = Vec::new();
            for p in 0..=k.pmax().min(n) {
                if n - p <= k.qmax() {
                    parts.push(ss.einf[p][n - p].invariants().clone());
                }
            }
            let split = Invariants::direct_sum(parts.iter()) == total[n];
            prop_assert_eq!(split, !ss.extension_flags.contains(&n));
        }
        if axis == Axis::ByP {
            for p in 0..=k.pmax() {
                for q in 0..=k.qmax() {
                    prop_assert_eq!(ss.page(1).group(p, q).invariants(), &e1[p][q]);
                }
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_complexes_converge(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = random_double_complex(&mut rng);
        check_pages(&k)?;
        check_pages(&k.transpose())?;
    }
}
