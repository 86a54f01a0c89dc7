//! First-quadrant double complexes and their total complexes.

use std::collections::BTreeMap;

use super::complex::GroupComplex;
use crate::error::{Error, Result};
use crate::exactalg::{FpGroup, GroupHom, IntMatrix};

/// Bigraded groups `K^{p,q}` for `0 ≤ p ≤ pmax`, `0 ≤ q ≤ qmax` with a
/// vertical differential `d : K^{p,q} → K^{p,q+1}` and a horizontal one
/// `δ : K^{p,q} → K^{p+1,q}` satisfying `d² = 0`, `δ² = 0`, `dδ = δd`.
#[derive(Clone, Debug)]
pub struct DoubleComplex {
    pmax: usize,
    qmax: usize,
    cells: Vec<Vec<FpGroup>>,
    vert: Vec<Vec<GroupHom>>,
    horiz: Vec<Vec<GroupHom>>,
}

impl DoubleComplex {
    /// `cells[p][q]`; maps missing from `vert` / `horiz` (keyed by source
    /// cell) are zero.
    pub fn new(
        cells: Vec<Vec<FpGroup>>,
        vert: BTreeMap<(usize, usize), GroupHom>,
        horiz: BTreeMap<(usize, usize), GroupHom>,
    ) -> Result<DoubleComplex> {
        let pmax = cells.len().checked_sub(1).ok_or_else(|| Error::DimensionMismatch("no columns".into()))?;
        let qmax = cells[0].len().checked_sub(1).ok_or_else(|| Error::DimensionMismatch("no rows".into()))?;
        if cells.iter().any(|c| c.len() != qmax + 1) {
            return Err(Error::DimensionMismatch("columns of unequal height".into()));
        }
        let get = |p: usize, q: usize| cells.get(p).and_then(|c| c.get(q)).cloned().unwrap_or_else(FpGroup::trivial);
        let take = |maps: BTreeMap<(usize, usize), GroupHom>, dp: usize, dq: usize, name: &str| {
            for &(p, q) in maps.keys() {
                if p > pmax || q > qmax {
                    return Err(Error::DimensionMismatch(format!("{name} map at ({p},{q}) outside the bounds")));
                }
            }
            let mut out = Vec::with_capacity(pmax + 1);
            for p in 0..=pmax {
                let mut col = Vec::with_capacity(qmax + 1);
                for q in 0..=qmax {
                    let (src, tgt) = (get(p, q), get(p + dp, q + dq));
                    let m = match maps.get(&(p, q)) {
                        Some(m) => {
                            if m.source() != &src || m.target() != &tgt {
                                return Err(Error::ChainMismatch(format!(
                                    "{name} map at ({p},{q}) does not connect the cells"
                                )));
                            }
                            m.clone()
                        }
                        None => GroupHom::zero(src, tgt),
                    };
                    col.push(m);
                }
                out.push(col);
            }
            Ok(out)
        };
        let vert = take(vert, 0, 1, "vertical")?;
        let horiz = take(horiz, 1, 0, "horizontal")?;
        let k = DoubleComplex { pmax, qmax, cells, vert, horiz };
        k.validate()?;
        Ok(k)
    }

    fn validate(&self) -> Result<()> {
        for p in 0..=self.pmax {
            for q in 0..=self.qmax {
                if q + 1 <= self.qmax && !self.vert[p][q + 1].compose_unchecked(&self.vert[p][q]).is_zero() {
                    return Err(Error::NotAComplex(format!("d² ≠ 0 at ({p},{q})")));
                }
                if p + 1 <= self.pmax && !self.horiz[p + 1][q].compose_unchecked(&self.horiz[p][q]).is_zero() {
                    return Err(Error::NotAComplex(format!("δ² ≠ 0 at ({p},{q})")));
                }
                if p + 1 <= self.pmax && q + 1 <= self.qmax {
                    let dh = self.vert[p + 1][q].compose_unchecked(&self.horiz[p][q]);
                    let hd = self.horiz[p][q + 1].compose_unchecked(&self.vert[p][q]);
                    if !dh.same_map(&hd) {
                        return Err(Error::SignViolation(format!("dδ ≠ δd at ({p},{q})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn pmax(&self) -> usize {
        self.pmax
    }

    pub fn qmax(&self) -> usize {
        self.qmax
    }

    /// `K^{p,q}`; trivial outside the bounds.
    pub fn cell(&self, p: usize, q: usize) -> FpGroup {
        self.cells.get(p).and_then(|c| c.get(q)).cloned().unwrap_or_else(FpGroup::trivial)
    }

    /// `d : K^{p,q} → K^{p,q+1}`.
    pub fn d_vert(&self, p: usize, q: usize) -> &GroupHom {
        &self.vert[p][q]
    }

    /// `δ : K^{p,q} → K^{p+1,q}`.
    pub fn d_horiz(&self, p: usize, q: usize) -> &GroupHom {
        &self.horiz[p][q]
    }

    /// The double complex with `p` and `q` exchanged.
    pub fn transpose(&self) -> DoubleComplex {
        let cells = (0..=self.qmax).map(|q| (0..=self.pmax).map(|p| self.cells[p][q].clone()).collect()).collect();
        let vert = (0..=self.qmax).map(|q| (0..=self.pmax).map(|p| self.horiz[p][q].clone()).collect()).collect();
        let horiz = (0..=self.qmax).map(|q| (0..=self.pmax).map(|p| self.vert[p][q].clone()).collect()).collect();
        DoubleComplex { pmax: self.qmax, qmax: self.pmax, cells, vert, horiz }
    }
}

/// Sign used for the vertical part of the total differential.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignRule {
    /// `D = δ + (-1)^p d`.
    Alternating,
    /// `D = δ + d`, which fails to square to zero once `dδ ≠ 0`.
    Unsigned,
}

/// `K^n = ⊕_{p+q=n} K^{p,q}` with cells ordered by increasing `p`.
#[derive(Clone, Debug)]
pub struct TotalComplex {
    pub complex: GroupComplex,
    /// `cells[n]` lists `(p, q, offset)` for the summands of `K^n`.
    pub cells: Vec<Vec<(usize, usize, usize)>>,
}

impl TotalComplex {
    /// Offset of cell `(p, q)` inside `K^{p+q}`.
    pub fn offset(&self, p: usize, q: usize) -> Option<usize> {
        self.cells.get(p + q)?.iter().find(|c| c.0 == p && c.1 == q).map(|c| c.2)
    }
}

pub fn total_complex(k: &DoubleComplex) -> Result<TotalComplex> {
    total_complex_with(k, SignRule::Alternating)
}

pub fn total_complex_with(k: &DoubleComplex, rule: SignRule) -> Result<TotalComplex> {
    let nmax = k.pmax + k.qmax;
    let mut cells = Vec::with_capacity(nmax + 1);
    let mut groups = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        let mut list = Vec::new();
        let mut parts = Vec::new();
        let mut off = 0;
        for p in 0..=k.pmax.min(n) {
            let q = n - p;
            if q > k.qmax {
                continue;
            }
            list.push((p, q, off));
            off += k.cells[p][q].ngens();
            parts.push(k.cells[p][q].clone());
        }
        cells.push(list);
        groups.push(FpGroup::direct_sum(&parts));
    }
    let mut maps = Vec::with_capacity(nmax);
    for n in 0..nmax {
        let mut m = IntMatrix::zeros(groups[n + 1].ngens(), groups[n].ngens());
        for &(p, q, off) in &cells[n] {
            for &(p2, q2, off2) in &cells[n + 1] {
                let block = if p2 == p + 1 && q2 == q {
                    k.horiz[p][q].matrix().clone()
                } else if p2 == p && q2 == q + 1 {
                    let d = k.vert[p][q].matrix();
                    if rule == SignRule::Alternating && p % 2 == 1 {
                        d.neg()
                    } else {
                        d.clone()
                    }
                } else {
                    continue;
                };
                m.set_block(off2, off, &block);
            }
        }
        maps.push(GroupHom::new(groups[n].clone(), groups[n + 1].clone(), m)?);
    }
    let complex = GroupComplex::new(groups, maps).map_err(|e| match e {
        Error::NotAComplex(msg) => Error::SignViolation(msg),
        e => e,
    })?;
    Ok(TotalComplex { complex, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> FpGroup {
        FpGroup::free(1)
    }

    fn id() -> GroupHom {
        GroupHom::identity(z())
    }

    #[test]
    fn zero_square_ranks() {
        let cells = vec![vec![z(), z()], vec![z(), z()]];
        let k = DoubleComplex::new(cells, BTreeMap::new(), BTreeMap::new()).unwrap();
        let t = total_complex(&k).unwrap();
        let ranks: Vec<usize> = (0..3).map(|n| t.complex.cohomology(n).rank()).collect();
        assert_eq!(ranks, [1, 2, 1]);
    }

    #[test]
    fn exact_columns_square() {
        let cells = vec![vec![z(), z()], vec![z(), z()]];
        let vert = BTreeMap::from([((0, 0), id()), ((1, 0), id())]);
        let horiz = BTreeMap::from([((0, 0), id()), ((0, 1), id())]);
        let k = DoubleComplex::new(cells, vert, horiz).unwrap();
        let t = total_complex(&k).unwrap();
        assert!((0..3).all(|n| t.complex.cohomology(n).is_trivial()));
        // without the sign, D² = 2dδ ≠ 0
        assert!(matches!(total_complex_with(&k, SignRule::Unsigned), Err(Error::SignViolation(_))));
    }

    #[test]
    fn non_commuting_rejected() {
        let cells = vec![vec![z(), z()], vec![z(), z()]];
        let vert = BTreeMap::from([((0, 0), id()), ((1, 0), id())]);
        let horiz = BTreeMap::from([((0, 0), id()), ((0, 1), GroupHom::scalar(z(), 2))]);
        assert!(matches!(DoubleComplex::new(cells, vert, horiz), Err(Error::SignViolation(_))));
    }

    #[test]
    fn single_row() {
        let cells = vec![vec![z()], vec![z()]];
        let horiz = BTreeMap::from([((0, 0), GroupHom::scalar(z(), 3))]);
        let k = DoubleComplex::new(cells, BTreeMap::new(), horiz).unwrap();
        let t = total_complex(&k).unwrap();
        assert!(t.complex.cohomology(0).is_trivial());
        assert_eq!(t.complex.cohomology(1).invariants(), FpGroup::cyclic(3).invariants());
    }
}
