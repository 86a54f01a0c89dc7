//! Spectral sequences of a double complex for either filtration, computed as
//! subquotients of the total complex.

use std::collections::HashMap;

use super::double::{total_complex, DoubleComplex, TotalComplex};
use crate::error::{Error, Result};
use crate::exactalg::{cohomology_at, image_of, preimage, unit, FpGroup, GroupHom, Invariants, SubQuotient, Subgroup};

/// Which index the total complex is filtered by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    /// `F_s = ⊕_{p ≥ s} K^{p,•}`; `d_r` has bidegree `(r, 1-r)`.
    ByP,
    /// `F_s = ⊕_{q ≥ s} K^{•,q}`; `d_r` has bidegree `(1-r, r)`.
    ByQ,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::ByP => "by_p",
            Axis::ByQ => "by_q",
        }
    }
}

/// `d_r` out of one cell.
#[derive(Clone, Debug)]
pub struct PageMap {
    pub target: (usize, usize),
    pub map: GroupHom,
}

/// `E_r` with its differential; indexed `[p][q]` for either axis.
#[derive(Clone, Debug)]
pub struct Page {
    pub r: usize,
    pub groups: Vec<Vec<FpGroup>>,
    /// `None` where the target cell lies outside the bounds.
    pub differentials: Vec<Vec<Option<PageMap>>>,
}

impl Page {
    pub fn group(&self, p: usize, q: usize) -> &FpGroup {
        &self.groups[p][q]
    }

    fn outgoing(&self, p: usize, q: usize) -> GroupHom {
        match &self.differentials[p][q] {
            Some(d) => d.map.clone(),
            None => GroupHom::zero(self.groups[p][q].clone(), FpGroup::trivial()),
        }
    }

    fn incoming(&self, p: usize, q: usize) -> GroupHom {
        for (p0, col) in self.differentials.iter().enumerate() {
            for (q0, d) in col.iter().enumerate() {
                if let Some(d) = d {
                    if d.target == (p, q) && (p0, q0) != (p, q) {
                        return d.map.clone();
                    }
                }
            }
        }
        GroupHom::zero(FpGroup::trivial(), self.groups[p][q].clone())
    }

    /// Cells with a nonzero group.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (p, col) in self.groups.iter().enumerate() {
            for (q, g) in col.iter().enumerate() {
                if !g.is_trivial() {
                    out.push((p, q));
                }
            }
        }
        out
    }

    pub fn all_differentials_zero(&self) -> bool {
        self.differentials.iter().flatten().flatten().all(|d| d.map.is_zero())
    }
}

#[derive(Clone, Debug)]
pub struct SpectralPages {
    pub axis: Axis,
    pub pmax: usize,
    pub qmax: usize,
    /// `pages[r]` for `0 ≤ r ≤ rmax`.
    pub pages: Vec<Page>,
    /// The page at the stabilization bound.
    pub einf: Vec<Vec<FpGroup>>,
    /// `F_s H^n / F_{s+1} H^n` for the induced filtration on `H_D`.
    pub graded_total: Vec<Vec<FpGroup>>,
    /// `H_D^n` for `0 ≤ n ≤ pmax + qmax`.
    pub total: Vec<FpGroup>,
    /// Degrees `n` where `H_D^n` and `⊕ einf^{p,n-p}` have different torsion.
    pub extension_flags: Vec<usize>,
    pub bound: usize,
}

impl SpectralPages {
    pub fn page(&self, r: usize) -> &Page {
        &self.pages[r]
    }

    /// Bidegree of `d_r` for this axis as `(Δp, Δq)`.
    pub fn bidegree(&self, r: usize) -> (i64, i64) {
        let r = r as i64;
        match self.axis {
            Axis::ByP => (r, 1 - r),
            Axis::ByQ => (1 - r, r),
        }
    }

    /// Cells `(r, p, q)` where `E_{r+1}` differs from the cohomology of
    /// `(E_r, d_r)`.
    pub fn recurrence_failures(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for w in self.pages.windows(2) {
            let (cur, next) = (&w[0], &w[1]);
            for p in 0..=self.pmax {
                for q in 0..=self.qmax {
                    let h = cohomology_at(&cur.incoming(p, q), &cur.outgoing(p, q));
                    let ok = matches!(&h, Ok(h) if h.group().invariants() == next.groups[p][q].invariants());
                    if !ok {
                        out.push((cur.r, p, q));
                    }
                }
            }
        }
        out
    }

    /// Every stored `d_r` has the right bidegree and squares to zero.
    pub fn differentials_well_formed(&self) -> bool {
        for page in &self.pages {
            let (dp, dq) = self.bidegree(page.r);
            for p in 0..=self.pmax {
                for q in 0..=self.qmax {
                    let Some(d) = &page.differentials[p][q] else { continue };
                    if d.target != ((p as i64 + dp) as usize, (q as i64 + dq) as usize) {
                        return false;
                    }
                    if let Some(d2) = &page.differentials[d.target.0][d.target.1] {
                        if d.target != (p, q) && !d2.map.compose_unchecked(&d.map).is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Cells where `einf` and `graded_total` have different invariants.
    pub fn convergence_failures(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in 0..=self.pmax {
            for q in 0..=self.qmax {
                if self.einf[p][q].invariants() != self.graded_total[p][q].invariants() {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// `rank H_D^n = Σ rank einf` on every antidiagonal.
    pub fn rank_sums_agree(&self) -> bool {
        (0..self.total.len()).all(|n| {
            let sum: usize = self.antidiagonal(n).map(|(p, q)| self.einf[p][q].rank()).sum();
            sum == self.total[n].rank()
        })
    }

    fn antidiagonal(&self, n: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..=self.pmax.min(n)).filter(move |&p| n - p <= self.qmax).map(move |p| (p, n - p))
    }

    /// Smallest `r ≥ 1` from which every differential vanishes. With a
    /// degree limit only differentials between total degrees `≤ limit` count.
    pub fn degeneration_page(&self, limit: Option<usize>) -> usize {
        let mut first = self.pages.len();
        for page in self.pages.iter().skip(1).rev() {
            let zero = (0..=self.pmax).all(|p| {
                (0..=self.qmax).all(|q| match &page.differentials[p][q] {
                    Some(d) => d.map.is_zero() || limit.is_some_and(|l| p + q + 1 > l),
                    None => true,
                })
            });
            if !zero {
                break;
            }
            first = page.r;
        }
        first
    }

    /// Cells of page `r` with nonzero groups in total degrees `≤ limit`.
    pub fn support(&self, r: usize, limit: Option<usize>) -> Vec<(usize, usize)> {
        self.pages[r].support().into_iter().filter(|&(p, q)| limit.is_none_or(|l| p + q <= l)).collect()
    }
}

/// `max(pmax, qmax) + 2`.
pub fn stabilization_bound(k: &DoubleComplex) -> usize {
    k.pmax().max(k.qmax()) + 2
}

pub fn spectral_sequence(k: &DoubleComplex, axis: Axis, rmax: usize) -> Result<SpectralPages> {
    let bound = stabilization_bound(k);
    if rmax < bound {
        return Err(Error::NotStabilized { requested: rmax, bound });
    }
    let tc = total_complex(k)?;
    spectral_sequence_of(k, &tc, axis, rmax)
}

/// As [`spectral_sequence`], reusing an already assembled total complex.
pub fn spectral_sequence_of(k: &DoubleComplex, tc: &TotalComplex, axis: Axis, rmax: usize) -> Result<SpectralPages> {
    let bound = stabilization_bound(k);
    if rmax < bound {
        return Err(Error::NotStabilized { requested: rmax, bound });
    }
    let mut eng = Engine::new(k, tc, axis);
    let (pmax, qmax) = (k.pmax(), k.qmax());
    let mut pages = Vec::with_capacity(rmax + 1);
    for r in 0..=rmax {
        let mut sqs: Vec<Vec<SubQuotient>> = Vec::with_capacity(pmax + 1);
        for p in 0..=pmax {
            sqs.push((0..=qmax).map(|q| eng.page_cell(r, p, q)).collect::<Result<_>>()?);
        }
        let (dp, dq) = match axis {
            Axis::ByP => (r as i64, 1 - r as i64),
            Axis::ByQ => (1 - r as i64, r as i64),
        };
        let mut differentials = Vec::with_capacity(pmax + 1);
        for p in 0..=pmax {
            let mut col = Vec::with_capacity(qmax + 1);
            for q in 0..=qmax {
                let (tp, tq) = (p as i64 + dp, q as i64 + dq);
                if tp < 0 || tq < 0 || tp > pmax as i64 || tq > qmax as i64 {
                    col.push(None);
                    continue;
                }
                let (tp, tq) = (tp as usize, tq as usize);
                let d = tc.complex.differential(p + q).matrix();
                let map = sqs[p][q].induced(&sqs[tp][tq], d)?;
                col.push(Some(PageMap { target: (tp, tq), map }));
            }
            differentials.push(col);
        }
        let groups = sqs.iter().map(|c| c.iter().map(|s| s.group().clone()).collect()).collect();
        pages.push(Page { r, groups, differentials });
    }
    let einf = pages[bound].groups.clone();
    let mut graded_total = Vec::with_capacity(pmax + 1);
    for p in 0..=pmax {
        graded_total.push((0..=qmax).map(|q| eng.graded_cell(p, q)).collect::<Result<Vec<_>>>()?);
    }
    let nmax = pmax + qmax;
    let total: Vec<FpGroup> = (0..=nmax).map(|n| tc.complex.cohomology(n)).collect();
    let mut out = SpectralPages {
        axis,
        pmax,
        qmax,
        pages,
        einf,
        graded_total,
        total,
        extension_flags: Vec::new(),
        bound,
    };
    out.extension_flags = (0..=nmax)
        .filter(|&n| {
            let graded = Invariants::direct_sum(out.antidiagonal(n).map(|(p, q)| out.einf[p][q].invariants()));
            graded.torsion != out.total[n].invariants().torsion
        })
        .collect();
    Ok(out)
}

/// Filtration subgroups of the total complex, with `Z(s, t, n) =
/// {x ∈ F_s K^n : Dx ∈ F_t K^{n+1}}` memoized.
struct Engine<'a> {
    k: &'a DoubleComplex,
    tc: &'a TotalComplex,
    axis: Axis,
    smax: i64,
    nmax: usize,
    /// `D_n`, with a zero map out of the top degree.
    d: Vec<GroupHom>,
    filt: HashMap<(i64, usize), Subgroup>,
    cycles: HashMap<(i64, i64, usize), Subgroup>,
}

impl<'a> Engine<'a> {
    fn new(k: &'a DoubleComplex, tc: &'a TotalComplex, axis: Axis) -> Engine<'a> {
        let nmax = k.pmax() + k.qmax();
        let mut d: Vec<GroupHom> = tc.complex.differentials().to_vec();
        d.push(GroupHom::zero(tc.complex.term(nmax).clone(), FpGroup::trivial()));
        let smax = match axis {
            Axis::ByP => k.pmax(),
            Axis::ByQ => k.qmax(),
        } as i64;
        Engine { k, tc, axis, smax, nmax, d, filt: HashMap::new(), cycles: HashMap::new() }
    }

    fn s_of(&self, p: usize, q: usize) -> i64 {
        match self.axis {
            Axis::ByP => p as i64,
            Axis::ByQ => q as i64,
        }
    }

    fn clamp(&self, s: i64) -> i64 {
        s.clamp(0, self.smax + 1)
    }

    /// `F_s K^n`, or the zero subgroup of the top term when `n = nmax + 1`.
    fn filtration(&mut self, s: i64, n: usize) -> Subgroup {
        let s = self.clamp(s);
        if let Some(f) = self.filt.get(&(s, n)) {
            return f.clone();
        }
        let f = if n > self.nmax {
            Subgroup::zero(FpGroup::trivial())
        } else {
            let group = self.tc.complex.term(n).clone();
            let mut gens = Vec::new();
            for &(p, q, off) in &self.tc.cells[n] {
                if self.s_of(p, q) >= s {
                    let width = self.k.cell(p, q).ngens();
                    gens.extend((off..off + width).map(|i| unit(group.ngens(), i)));
                }
            }
            Subgroup::new(group, gens).expect("unit vectors have the right length")
        };
        self.filt.insert((s, n), f.clone());
        f
    }

    fn cycles(&mut self, s: i64, t: i64, n: usize) -> Result<Subgroup> {
        let s = self.clamp(s);
        let t = self.clamp(t.max(s));
        if t == s {
            return Ok(self.filtration(s, n));
        }
        if let Some(z) = self.cycles.get(&(s, t, n)) {
            return Ok(z.clone());
        }
        let fs = self.filtration(s, n);
        let ft = self.filtration(t, n + 1);
        let z = preimage(&self.d[n], &ft)?.intersection(&fs)?;
        self.cycles.insert((s, t, n), z.clone());
        Ok(z)
    }

    /// `D (Z(s, t, n-1))` inside `K^n`.
    fn boundaries(&mut self, s: i64, t: i64, n: usize) -> Result<Subgroup> {
        if n == 0 {
            return Ok(Subgroup::zero(self.tc.complex.term(0).clone()));
        }
        let z = self.cycles(s, t, n - 1)?;
        image_of(&self.d[n - 1], &z)
    }

    /// `E_r^{s,n} = Z_r^s / (Z_{r-1}^{s+1} + D Z_{r-1}^{s-r+1})`.
    fn page_cell(&mut self, r: usize, p: usize, q: usize) -> Result<SubQuotient> {
        let (s, n, r) = (self.s_of(p, q), p + q, r as i64);
        let num = self.cycles(s, s + r, n)?;
        let den = self.cycles(s + 1, s + r, n)?.sum(&self.boundaries(s - r + 1, s, n)?)?;
        num.quotient(&den)
    }

    /// `(Z_∞^s + B) / (Z_∞^{s+1} + B)` with `B = im D`.
    fn graded_cell(&mut self, p: usize, q: usize) -> Result<FpGroup> {
        let (s, n) = (self.s_of(p, q), p + q);
        let top = self.smax + 1;
        let b = self.boundaries(-1, -1, n)?;
        let num = self.cycles(s, top, n)?.sum(&b)?;
        let den = self.cycles(s + 1, top, n)?.sum(&b)?;
        Ok(num.quotient(&den)?.group().clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn z() -> FpGroup {
        FpGroup::free(1)
    }

    #[test]
    fn one_row_degenerates_at_two() {
        let cells = vec![vec![z()], vec![z()], vec![z()]];
        let horiz = BTreeMap::from([((0, 0), GroupHom::scalar(z(), 2))]);
        let k = DoubleComplex::new(cells, BTreeMap::new(), horiz).unwrap();
        let ss = spectral_sequence(&k, Axis::ByP, 5).unwrap();
        assert!(ss.page(2).support().iter().all(|&(_, q)| q == 0));
        assert_eq!(ss.page(2).group(1, 0), &FpGroup::cyclic(2));
        assert_eq!(ss.page(2).group(2, 0).rank(), 1);
        assert!(ss.degeneration_page(None) <= 2);
        assert!(ss.recurrence_failures().is_empty());
        assert!(ss.convergence_failures().is_empty());
        assert!(ss.extension_flags.is_empty());
    }

    #[test]
    fn exact_columns_vanish() {
        let cells = vec![vec![z(), z()], vec![z(), z()]];
        let id = GroupHom::identity(z());
        let vert = BTreeMap::from([((0, 0), id.clone()), ((1, 0), id.clone())]);
        let horiz = BTreeMap::from([((0, 0), id.clone()), ((0, 1), id)]);
        let k = DoubleComplex::new(cells, vert, horiz).unwrap();
        let ss = spectral_sequence(&k, Axis::ByP, 4).unwrap();
        assert!(ss.page(1).support().is_empty());
        assert!(ss.einf.iter().flatten().all(|g| g.is_trivial()));
        assert!(ss.total.iter().all(|g| g.is_trivial()));
    }

    #[test]
    fn not_stabilized() {
        let k = DoubleComplex::new(vec![vec![z(), z()], vec![z(), z()]], BTreeMap::new(), BTreeMap::new()).unwrap();
        assert_eq!(
            spectral_sequence(&k, Axis::ByQ, 2).unwrap_err(),
            Error::NotStabilized { requested: 2, bound: 3 }
        );
    }

    #[test]
    fn zero_square_is_split() {
        let k = DoubleComplex::new(vec![vec![z(), z()], vec![z(), z()]], BTreeMap::new(), BTreeMap::new()).unwrap();
        let ss = spectral_sequence(&k, Axis::ByP, 4).unwrap();
        assert!(ss.extension_flags.is_empty());
        assert!(ss.rank_sums_agree());
        assert!(ss.differentials_well_formed());
    }

    #[test]
    fn hidden_extension_is_flagged() {
        // H^1 = Z/4 generated by the (0,1) cell, twice which is the (1,0) cell
        let z2 = FpGroup::free(2);
        let cells = vec![vec![z2.clone(), z()], vec![z(), FpGroup::trivial()]];
        let row = |v: &[i64]| crate::exactalg::IntMatrix::from_i64_rows(&[v.to_vec()], 2).unwrap();
        let vert = BTreeMap::from([((0, 0), GroupHom::new(z2.clone(), z(), row(&[-2, 4])).unwrap())]);
        let horiz = BTreeMap::from([((0, 0), GroupHom::new(z2, z(), row(&[1, 0])).unwrap())]);
        let k = DoubleComplex::new(cells, vert, horiz).unwrap();
        let by_p = spectral_sequence(&k, Axis::ByP, 4).unwrap();
        assert_eq!(by_p.total[1], FpGroup::cyclic(4));
        assert_eq!(by_p.einf[1][0], FpGroup::cyclic(2));
        assert_eq!(by_p.einf[0][1], FpGroup::cyclic(2));
        assert_eq!(by_p.extension_flags, [1]);
        let by_q = spectral_sequence(&k, Axis::ByQ, 4).unwrap();
        assert_eq!(by_q.einf[0][1], FpGroup::cyclic(4));
        assert!(by_q.extension_flags.is_empty());
        for ss in [&by_p, &by_q] {
            assert!(ss.recurrence_failures().is_empty());
            assert!(ss.convergence_failures().is_empty());
            assert!(ss.differentials_well_formed());
        }
    }
}
