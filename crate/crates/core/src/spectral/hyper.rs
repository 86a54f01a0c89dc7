//! Hypercohomology through the Godement double complex, and the
//! acyclic-resolution comparison.

use std::collections::BTreeMap;

use super::complex::SheafComplex;
use super::double::{total_complex, DoubleComplex};
use super::pages::{spectral_sequence_of, stabilization_bound, Axis, SpectralPages};
use crate::error::{Error, Result};
use crate::exactalg::FpGroup;
use crate::finspace::FiniteSpace;
use crate::godement::{godement_resolution, godement_resolution_map, sheaf_cohomology, Resolution};
use crate::sheaves::{global_sections, sections_map, Sections};

#[derive(Clone, Debug)]
pub struct Hypercohomology {
    /// `H^k(X, L^•)` for `0 ≤ k ≤ kmax`.
    pub groups: Vec<FpGroup>,
    pub double: DoubleComplex,
    pub by_p: SpectralPages,
    pub by_q: SpectralPages,
    pub kmax: usize,
}

/// `Γ(X, C^p L^q)` for `p ≤ kmax + 1` and every term of `L`.
pub fn godement_double_complex(x: &FiniteSpace, l: &SheafComplex, kmax: usize) -> Result<DoubleComplex> {
    if l.terms().iter().any(|t| t.space() != x) {
        return Err(Error::ChainMismatch("complex lives on a different space".into()));
    }
    let res: Vec<_> = l.terms().iter().map(|t| godement_resolution(t, kmax)).collect();
    let secs: Vec<Vec<Sections>> =
        res.iter().map(|r| r.terms().iter().map(global_sections).collect()).collect();
    let pmax = kmax + 1;
    let cells: Vec<Vec<FpGroup>> =
        (0..=pmax).map(|p| secs.iter().map(|col| col[p].group().clone()).collect()).collect();
    let mut horiz = BTreeMap::new();
    for (q, r) in res.iter().enumerate() {
        for (p, d) in r.differentials().iter().enumerate() {
            horiz.insert((p, q), sections_map(d, &secs[q][p], &secs[q][p + 1])?);
        }
    }
    let mut vert = BTreeMap::new();
    for (q, d) in l.differentials().iter().enumerate() {
        let maps = godement_resolution_map(d, &res[q], &res[q + 1])?;
        for (p, m) in maps.iter().enumerate() {
            vert.insert((p, q), sections_map(m, &secs[q][p], &secs[q + 1][p])?);
        }
    }
    DoubleComplex::new(cells, vert, horiz)
}

pub fn hypercohomology(x: &FiniteSpace, l: &SheafComplex, kmax: usize) -> Result<Hypercohomology> {
    let double = godement_double_complex(x, l, kmax)?;
    let tc = total_complex(&double)?;
    let rmax = stabilization_bound(&double);
    let by_p = spectral_sequence_of(&double, &tc, Axis::ByP, rmax)?;
    let by_q = spectral_sequence_of(&double, &tc, Axis::ByQ, rmax)?;
    let groups = (0..=kmax).map(|k| tc.complex.cohomology(k)).collect();
    Ok(Hypercohomology { groups, double, by_p, by_q, kmax })
}

/// Whether a term of a resolution has vanishing higher cohomology.
#[derive(Clone, Debug)]
pub struct TermAcyclicity {
    pub term: usize,
    /// `H^k(X, L^term)` for `0 ≤ k ≤ kmax`.
    pub cohomology: Vec<FpGroup>,
    /// Lowest positive degree with nonzero cohomology.
    pub failing_degree: Option<usize>,
}

impl TermAcyclicity {
    pub fn acyclic(&self) -> bool {
        self.failing_degree.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AcyclicVerdict {
    /// Every term is acyclic and `H^k(X, F) ≅ h^k(L^•(X))` through `kmax`.
    Isomorphic,
    NotAcyclic { term: usize, degree: usize },
    /// All terms acyclic, yet the groups differ in this degree.
    Mismatch { degree: usize },
}

#[derive(Clone, Debug)]
pub struct AcyclicReport {
    pub terms: Vec<TermAcyclicity>,
    /// `h^k(L^•(X))`.
    pub sections_cohomology: Vec<FpGroup>,
    /// `H^k(X, F)`.
    pub sheaf_cohomology: Vec<FpGroup>,
    /// The two lists agree degreewise, whatever the terms.
    pub groups_agree: bool,
    pub verdict: AcyclicVerdict,
    /// `E_1` of the `p`-filtration lives in row `q = 0` (degrees `≤ kmax`).
    pub rows_concentrated: bool,
    /// `E_1` of the `q`-filtration lives in column `p = 0` (degrees `≤ kmax`).
    pub columns_concentrated: bool,
    pub hyper: Hypercohomology,
}

impl AcyclicReport {
    pub fn holds(&self) -> bool {
        self.verdict == AcyclicVerdict::Isomorphic
    }
}

pub fn acyclic_resolution_check(r: &Resolution, kmax: usize) -> Result<AcyclicReport> {
    if r.truncated && r.terms.len() < kmax + 2 {
        return Err(Error::NotAResolution(format!(
            "truncated after {} terms, degree {kmax} needs {}",
            r.terms.len(),
            kmax + 2
        )));
    }
    let failures = r.exactness_failures()?;
    if let Some(&(k, p)) = failures.first() {
        let x = r.base.space();
        return Err(Error::NotAResolution(format!("not exact at position {k}, point {}", x.name(p))));
    }
    let terms: Vec<TermAcyclicity> = r
        .terms
        .iter()
        .enumerate()
        .map(|(term, l)| {
            let cohomology = sheaf_cohomology(l, kmax);
            let failing_degree = (1..=kmax).find(|&k| !cohomology[k].is_trivial());
            TermAcyclicity { term, cohomology, failing_degree }
        })
        .collect();
    let complex = r.global_sections_complex()?;
    let sections_cohomology: Vec<FpGroup> = (0..=kmax).map(|k| complex.cohomology(k)).collect();
    let sheaf_coh = sheaf_cohomology(&r.base, kmax);
    let mismatch = (0..=kmax).find(|&k| !sections_cohomology[k].is_isomorphic(&sheaf_coh[k]));
    let verdict = match (terms.iter().find(|t| !t.acyclic()), mismatch) {
        (Some(t), _) => AcyclicVerdict::NotAcyclic { term: t.term, degree: t.failing_degree.unwrap() },
        (None, Some(degree)) => AcyclicVerdict::Mismatch { degree },
        (None, None) => AcyclicVerdict::Isomorphic,
    };
    let l = SheafComplex::new(r.terms.clone(), r.differentials.clone())?;
    let hyper = hypercohomology(r.base.space(), &l, kmax)?;
    let rows_concentrated = hyper.by_p.support(1, Some(kmax)).iter().all(|&(_, q)| q == 0);
    let columns_concentrated = hyper.by_q.support(1, Some(kmax)).iter().all(|&(p, _)| p == 0);
    Ok(AcyclicReport {
        terms,
        sections_cohomology,
        sheaf_cohomology: sheaf_coh,
        groups_agree: mismatch.is_none(),
        verdict,
        rows_concentrated,
        columns_concentrated,
        hyper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finspace::build_space;
    use crate::godement::godement_resolution;
    use crate::sheaves::{constant_sheaf, zero_sheaf};

    fn circle() -> FiniteSpace {
        build_space(&["a", "b", "c", "d"], &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")]).unwrap()
    }

    #[test]
    fn single_sheaf_matches_sheaf_cohomology() {
        let x = circle();
        let f = constant_sheaf(&x, &FpGroup::free(1));
        let h = hypercohomology(&x, &SheafComplex::single(&f), 2).unwrap();
        let ranks: Vec<usize> = h.groups.iter().map(|g| g.rank()).collect();
        assert_eq!(ranks, [1, 1, 0]);
        assert!(h.by_p.support(1, Some(2)).iter().all(|&(_, q)| q == 0));
        assert!(h.by_p.degeneration_page(Some(2)) <= 2);
        assert!(h.by_p.extension_flags.is_empty());
    }

    #[test]
    fn zero_complex() {
        let x = circle();
        let h = hypercohomology(&x, &SheafComplex::single(&zero_sheaf(&x)), 1).unwrap();
        assert!(h.groups.iter().all(|g| g.is_trivial()));
    }

    #[test]
    fn godement_resolution_passes() {
        let x = circle();
        let f = constant_sheaf(&x, &FpGroup::free(1));
        let res = godement_resolution(&f, 1).resolution;
        let rep = acyclic_resolution_check(&res, 1).unwrap();
        assert!(rep.holds());
        assert!(rep.rows_concentrated && rep.columns_concentrated);
    }
}
