mod common;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sheaf_core::exactalg::*;

use common::inv;
use sheaf_core::random::random_unimodular;

fn m(rows: &[Vec<i64>], cols: usize) -> IntMatrix {
    IntMatrix::from_i64_rows(rows, cols).unwrap()
}

fn hom(src: &FpGroup, tgt: &FpGroup, rows: &[Vec<i64>]) -> GroupHom {
    GroupHom::new(src.clone(), tgt.clone(), m(rows, src.ngens())).unwrap()
}

/// `d_1 ⋯ d_k` as the gcd of all `k × k` minors.
fn minor_gcd(a: &IntMatrix, k: usize) -> BigInt {
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        (0..n).flat_map(|last| subsets(last, k - 1).into_iter().map(move |mut s| {
            s.push(last);
            s
        }))
        .collect()
    }
    let mut g = BigInt::zero();
    for rs in subsets(a.rows(), k) {
        for cs in subsets(a.cols(), k) {
            let mut sub = IntMatrix::zeros(k, k);
            for (i, &r) in rs.iter().enumerate() {
                for (j, &c) in cs.iter().enumerate() {
                    sub[(i, j)] = a[(r, c)].clone();
                }
            }
            g = g.gcd(&sub.determinant().unwrap());
        }
    }
    g
}

#[test]
fn snf_two_by_two() {
    let a = m(&[vec![2, 4], vec![6, 8]], 2);
    assert_eq!(smith_diagonal(&a), vec![int(2), int(4)]);
    assert_eq!(minor_gcd(&a, 1), int(2));
    assert_eq!(minor_gcd(&a, 2), int(8));
}

#[test]
fn snf_identity_and_zero() {
    let s = smith_normal_form(&IntMatrix::identity(3));
    assert!(s.s.is_identity() && s.u.is_identity() && s.v.is_identity());
    let z = smith_normal_form(&IntMatrix::zeros(2, 3));
    assert!(z.s.is_zero());
    assert_eq!(z.rank, 0);
}

#[test]
fn invariants_examples() {
    let g = FpGroup::new(2, m(&[vec![2, 0], vec![0, 3]], 2)).unwrap();
    assert_eq!(g.invariants(), &inv(0, &[6]));
    // brute-force: exactly six distinct cosets
    assert_eq!(g.enumerate_elements(100).unwrap().len(), 6);
    assert_eq!(FpGroup::free(2).invariants(), &inv(2, &[]));
    let t = FpGroup::new(1, m(&[vec![1]], 1)).unwrap();
    assert!(t.is_trivial());
    assert!(t.torsion().is_empty());
}

#[test]
fn hom_parts_examples() {
    let z = FpGroup::free(1);
    let p = hom_parts(&GroupHom::scalar(z.clone(), 2));
    assert!(p.kernel.group().is_trivial());
    assert_eq!(p.image.group().invariants(), &inv(1, &[]));
    assert_eq!(p.cokernel.group().invariants(), &inv(0, &[2]));

    let p = hom_parts(&GroupHom::zero(z.clone(), z.clone()));
    assert_eq!(p.kernel.group().invariants(), &inv(1, &[]));
    assert!(p.image.group().is_trivial());
    assert_eq!(p.cokernel.group().invariants(), &inv(1, &[]));

    let (z4, z2) = (FpGroup::cyclic(4), FpGroup::cyclic(2));
    let f = hom(&z4, &z2, &[vec![1]]);
    // enumerate the four source elements
    let elems = z4.enumerate_elements(10).unwrap();
    assert_eq!(elems.len(), 4);
    let in_kernel = elems.iter().filter(|x| z2.is_zero(&f.apply(x))).count();
    assert_eq!(in_kernel, 2);
    let p = hom_parts(&f);
    assert_eq!(p.kernel.group().invariants(), &inv(0, &[2]));
    assert_eq!(p.image.group().invariants(), &inv(0, &[2]));
    assert!(p.cokernel.group().is_trivial());
    assert!(!p.injective && p.surjective);
}

#[test]
fn subgroup_lattice_examples() {
    let z2 = FpGroup::free(2);
    let a = Subgroup::new(z2.clone(), vec![int_vec(&[2, 0])]).unwrap();
    let b = Subgroup::new(z2.clone(), vec![int_vec(&[0, 3])]).unwrap();
    let l = subgroup_lattice(&a, &b).unwrap();
    assert_eq!(l.sum.lattice().rank(), 2);
    let q = Subgroup::whole(z2.clone()).quotient(&l.sum).unwrap();
    assert_eq!(q.group().invariants(), &inv(0, &[6]));
    assert!(l.intersection.as_group().group().is_trivial());
    assert!(!l.a_in_b && !l.b_in_a);

    let l = subgroup_lattice(&a, &a).unwrap();
    assert!(l.sum.same_subgroup(&a).unwrap() && l.intersection.same_subgroup(&a).unwrap());
    assert!(l.a_in_b && l.b_in_a);

    let z = FpGroup::free(1);
    let a = Subgroup::new(z.clone(), vec![int_vec(&[2])]).unwrap();
    let b = Subgroup::new(z.clone(), vec![int_vec(&[3])]).unwrap();
    let l = subgroup_lattice(&a, &b).unwrap();
    assert!(l.sum.same_subgroup(&Subgroup::whole(z.clone())).unwrap());
    let six = Subgroup::new(z, vec![int_vec(&[6])]).unwrap();
    assert!(l.intersection.same_subgroup(&six).unwrap());
}

#[test]
fn preimage_examples() {
    let z = FpGroup::free(1);
    let two = GroupHom::scalar(z.clone(), 2);
    let four = Subgroup::new(z.clone(), vec![int_vec(&[4])]).unwrap();
    let pre = preimage(&two, &four).unwrap();
    assert!(pre.same_subgroup(&Subgroup::new(z.clone(), vec![int_vec(&[2])]).unwrap()).unwrap());
    let full = preimage(&two, &Subgroup::whole(z.clone())).unwrap();
    assert!(full.same_subgroup(&Subgroup::whole(z.clone())).unwrap());

    let z2 = FpGroup::free(2);
    let proj = hom(&z2, &z, &[vec![1, 0]]);
    let ker = preimage(&proj, &Subgroup::zero(z)).unwrap();
    assert!(ker.same_subgroup(&Subgroup::new(z2, vec![int_vec(&[0, 1])]).unwrap()).unwrap());
}

#[test]
fn cohomology_at_examples() {
    let z = FpGroup::free(1);
    let two = GroupHom::scalar(z.clone(), 2);
    let zero = GroupHom::zero(z.clone(), z.clone());
    assert_eq!(cohomology_at(&two, &zero).unwrap().group().invariants(), &inv(0, &[2]));
    let to_trivial = GroupHom::zero(z.clone(), FpGroup::trivial());
    assert!(cohomology_at(&GroupHom::identity(z.clone()), &to_trivial).unwrap().group().is_trivial());
    assert_eq!(cohomology_at(&zero, &zero).unwrap().group().invariants(), &inv(1, &[]));
    assert!(cohomology_at(&two, &two).is_err());
}

fn small_matrix(max: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(-20i64..=20, r * c).prop_map(move |v| {
            IntMatrix::from_vec(r, c, v.into_iter().map(BigInt::from).collect()).unwrap()
        })
    })
}

fn small_group() -> impl Strategy<Value = FpGroup> {
    (1usize..=3, 0usize..=3).prop_flat_map(|(n, r)| {
        prop::collection::vec(-6i64..=6, n * r).prop_map(move |v| {
            FpGroup::new(n, IntMatrix::from_vec(r, n, v.into_iter().map(BigInt::from).collect()).unwrap()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_factorization(a in small_matrix(6)) {
        let s = smith_normal_form(&a);
        prop_assert_eq!(&(&s.u * &a) * &s.v, s.s.clone());
        prop_assert!(s.u.determinant().unwrap().abs().is_one());
        prop_assert!(s.v.determinant().unwrap().abs().is_one());
        let d = s.diagonal();
        for w in d.windows(2) {
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && (&w[1] % &w[0]).is_zero()));
        }
        for i in 0..s.s.rows() {
            for j in 0..s.s.cols() {
                if i != j {
                    prop_assert!(s.s[(i, j)].is_zero());
                }
            }
        }
    }

    #[test]
    fn snf_matches_minor_oracle(a in small_matrix(3)) {
        let d = smith_diagonal(&a);
        let mut prod = BigInt::one();
        for (k, dk) in d.iter().enumerate() {
            prod *= dk;
            prop_assert_eq!(&prod, &minor_gcd(&a, k + 1));
        }
    }

    #[test]
    fn invariants_survive_basis_change(g in small_group(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unimodular(&mut rng, g.ngens());
        let h = FpGroup::new(g.ngens(), g.relations() * &u.transpose()).unwrap();
        prop_assert_eq!(g.invariants(), h.invariants());
        for w in g.torsion().windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
    }

    #[test]
    fn hom_parts_sequences_are_exact(n in 1usize..=3, h in small_group(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unimodular(&mut rng, h.ngens().max(n));
        let mut a = IntMatrix::zeros(h.ngens(), n);
        for i in 0..h.ngens() {
            for j in 0..n {
                a[(i, j)] = u[(i, j)].clone();
            }
        }
        let src = FpGroup::free(n);
        let f = GroupHom::new(src.clone(), h.clone(), a).unwrap();
        let p = hom_parts(&f);
        let incl = p.kernel.inclusion().unwrap();
        let to_image = SubQuotient::whole(src.clone()).induced(&p.image, f.matrix()).unwrap();
        prop_assert!(cohomology_at(&incl, &to_image).unwrap().group().is_trivial());
        prop_assert!(hom_parts(&incl).injective);
        prop_assert!(hom_parts(&to_image).surjective);
        let coker = p.cokernel.projection().unwrap();
        prop_assert!(cohomology_at(&f, &coker).unwrap().group().is_trivial());
        prop_assert!(hom_parts(&coker).surjective);
    }

    #[test]
    fn lattice_is_modular(
        a in prop::collection::vec(-5i64..=5, 3),
        b in prop::collection::vec(-5i64..=5, 6),
        c in prop::collection::vec(-5i64..=5, 3),
    ) {
        let z3 = FpGroup::free(3);
        let a = Subgroup::new(z3.clone(), vec![int_vec(&a)]).unwrap();
        let b = Subgroup::new(z3.clone(), vec![int_vec(&b[..3]), int_vec(&b[3..])]).unwrap();
        // modularity needs a ⊆ c
        let c = a.sum(&Subgroup::new(z3, vec![int_vec(&c)]).unwrap()).unwrap();
        let l = subgroup_lattice(&a, &b).unwrap();
        prop_assert!(a.is_subgroup_of(&l.sum).unwrap());
        prop_assert!(l.intersection.is_subgroup_of(&a).unwrap());
        let left = a.sum(&b.intersection(&c).unwrap()).unwrap();
        let right = a.sum(&b).unwrap().intersection(&c).unwrap();
        prop_assert!(left.same_subgroup(&right).unwrap());
    }
}
