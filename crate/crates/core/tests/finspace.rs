use proptest::prelude::*;
use sheaf_core::corpus;
use sheaf_core::finspace::{build_space, FiniteSpace, OpenSet};
use sheaf_core::Error;

fn names(x: &FiniteSpace, u: &OpenSet) -> Vec<String> {
    u.members().iter().map(|&p| x.name(p).to_string()).collect()
}

/// All subsets of the points that are closed under going down, by brute force.
fn brute_force_opens(x: &FiniteSpace) -> Vec<Vec<usize>> {
    let n = x.len();
    (0u32..1 << n)
        .map(|mask| (0..n).filter(|&p| mask >> p & 1 == 1).collect::<Vec<_>>())
        .filter(|s| s.iter().all(|&p| x.points().all(|q| !x.leq(q, p) || s.contains(&q))))
        .collect()
}

#[test]
fn pseudocircle() {
    let x = corpus::space("pseudocircle").unwrap();
    assert_eq!(x.height(), 1);
    assert_eq!(names(&x, &x.minimal_open_named("c").unwrap()), ["a", "b", "c"]);
    assert_eq!(names(&x, &x.minimal_open_named("a").unwrap()), ["a"]);
    let mut chains: Vec<Vec<String>> = x
        .chains(1)
        .iter()
        .map(|c| c.points.iter().map(|&p| x.name(p).to_string()).collect())
        .collect();
    chains.sort();
    assert_eq!(chains, [["a", "c"], ["a", "d"], ["b", "c"], ["b", "d"]]);
    assert_eq!(x.chains(0).len(), 4);
    assert!(x.chains(2).is_empty());
}

#[test]
fn pseudocircle_opens_match_brute_force() {
    let x = corpus::space("pseudocircle").unwrap();
    let opens = x.enumerate_opens(4096).unwrap();
    let mut brute = brute_force_opens(&x);
    brute.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    let got: Vec<Vec<usize>> = opens.iter().map(|u| u.members().to_vec()).collect();
    assert_eq!(got, brute);
    // ∅, {a}, {b}, {a,b}, {a,b,c}, {a,b,d}, X
    assert_eq!(got.len(), 7);
}

#[test]
fn sierpinski() {
    let x = corpus::space("sierpinski").unwrap();
    assert_eq!(names(&x, &x.minimal_open_named("1").unwrap()), ["1"]);
    assert_eq!(names(&x, &x.minimal_open_named("0").unwrap()).len(), 2);
    let opens: Vec<Vec<String>> = x.enumerate_opens(16).unwrap().iter().map(|u| names(&x, u)).collect();
    assert_eq!(opens, vec![vec![], vec!["1".to_string()], vec!["0".to_string(), "1".to_string()]]);
}

#[test]
fn discrete_space_has_all_subsets() {
    let x = corpus::space("discrete2").unwrap();
    assert_eq!(x.enumerate_opens(16).unwrap().len(), 4);
    assert_eq!(x.height(), 0);
}

#[test]
fn cycles_are_rejected() {
    match build_space(&["a", "b"], &[("a", "b"), ("b", "a")]) {
        Err(Error::NotAntisymmetric { cycle }) => assert_eq!(cycle, ["a", "b", "a"]),
        other => panic!("expected NotAntisymmetric, got {other:?}"),
    }
}

#[test]
fn cap_is_enforced() {
    let x = corpus::space("sphere2").unwrap();
    let n = x.count_opens() as usize;
    assert!(x.enumerate_opens(n).is_ok());
    assert!(matches!(x.enumerate_opens(n - 1), Err(Error::TooManyOpens { .. })));
}

/// A random partial order on up to `n` points: `i ⪯ j` only for `i < j`.
fn random_space(n: usize) -> impl Strategy<Value = FiniteSpace> {
    (1..=n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let pts: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
            let mut pairs = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if bits[i * n + j] && bits[j * n + i] {
                        pairs.push((pts[i].clone(), pts[j].clone()));
                    }
                }
            }
            build_space(&pts, &pairs).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn minimal_opens_are_least(x in random_space(8)) {
        let opens = x.enumerate_opens(4096).unwrap();
        let brute = brute_force_opens(&x);
        prop_assert_eq!(opens.len(), brute.len());
        prop_assert_eq!(x.count_opens() as usize, brute.len());
        for p in x.points() {
            let up = x.minimal_open(p);
            prop_assert!(x.is_open(up.members()) && up.contains(p));
            for u in opens.iter().filter(|u| u.contains(p)) {
                prop_assert!(up.is_subset(u));
            }
        }
    }

    #[test]
    fn unions_and_intersections_are_open(x in random_space(7), i in any::<usize>(), j in any::<usize>()) {
        let opens = x.enumerate_opens(4096).unwrap();
        let (u, v) = (&opens[i % opens.len()], &opens[j % opens.len()]);
        prop_assert!(x.is_open(u.union(v).members()));
        prop_assert!(x.is_open(u.intersection(v).members()));
    }

    #[test]
    fn opens_are_unions_of_minimal_opens(x in random_space(7)) {
        for u in x.enumerate_opens(4096).unwrap() {
            let mut cover = x.empty_open();
            for &p in u.members() {
                let up = x.minimal_open(p);
                prop_assert!(up.is_subset(&u));
                cover = cover.union(&up);
            }
            prop_assert_eq!(cover, u);
        }
    }

    #[test]
    fn chains_are_strict(x in random_space(7), k in 0usize..4) {
        for c in x.chains(k) {
            prop_assert_eq!(c.degree(), k);
            for w in c.points.windows(2) {
                prop_assert!(x.lt(w[0], w[1]));
            }
        }
        prop_assert_eq!(x.chains(x.height() + 1).len(), 0);
        prop_assert!(!x.chains(x.height()).is_empty());
    }
}
