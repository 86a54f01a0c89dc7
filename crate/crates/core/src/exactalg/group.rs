//! Finitely presented abelian groups and homomorphisms between them.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::lattice::{unit, Lattice};
use super::matrix::{IntMatrix, IntVector};
use super::snf::{smith_diagonal, smith_normal_form};
use crate::error::{Error, Result};

/// Isomorphism class of a finitely generated abelian group:
/// `Z^rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_t` with `d_i | d_{i+1}` and `d_i >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Invariants {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl Invariants {
    pub fn trivial() -> Self {
        Invariants { rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        Invariants { rank, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Invariants of a direct sum `Z/m_1 ⊕ Z/m_2 ⊕ ...` where a modulus of
    /// zero contributes a free summand and a modulus of one nothing.
    pub fn from_moduli<'a>(moduli: impl IntoIterator<Item = &'a BigInt>) -> Self {
        let mut rank = 0;
        let mut tors = Vec::new();
        for m in moduli {
            let m = m.abs();
            if m.is_zero() {
                rank += 1;
            } else if !m.is_one() {
                tors.push(m);
            }
        }
        let torsion = if tors.len() <= 1 {
            tors
        } else {
            let n = tors.len();
            let diag = IntMatrix::diagonal(n, n, &tors);
            smith_diagonal(&diag).into_iter().filter(|d| !d.is_one()).collect()
        };
        Invariants { rank, torsion }
    }

    /// Invariants of a direct sum of groups with these invariants.
    pub fn direct_sum<'a>(parts: impl IntoIterator<Item = &'a Invariants>) -> Self {
        let mut rank = 0;
        let mut moduli = Vec::new();
        for p in parts {
            rank += p.rank;
            moduli.extend(p.torsion.iter().cloned());
        }
        let mut inv = Invariants::from_moduli(moduli.iter());
        inv.rank += rank;
        inv
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.rank == 0).then(|| self.torsion.iter().product())
    }
}

impl fmt::Display for Invariants {
    /// Renders as `Z^r ⊕ Z/d1 ⊕ ...`, with `0` for the trivial group.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Coordinate normalizer: `y = change · x`, with `y_i` read modulo
/// `moduli[i]` (a modulus of zero means the coordinate is free).
#[derive(Debug)]
struct Normalizer {
    change: Option<IntMatrix>,
    moduli: Vec<BigInt>,
}

#[derive(Debug)]
struct GroupData {
    ngens: usize,
    relations: IntMatrix,
    normal: Normalizer,
    invariants: Invariants,
    relation_lattice: std::sync::OnceLock<Lattice>,
}

/// A finitely presented abelian group `Z^n / rowspan(relations)`.
///
/// Equality (`==`) compares presentations. Use [`FpGroup::is_isomorphic`]
/// for semantic comparison.
#[derive(Clone)]
pub struct FpGroup(Arc<GroupData>);

/// Returns the diagonal of `relations` if every nonzero row has exactly one
/// nonzero entry in a column used by no other row.
fn diagonal_moduli(ngens: usize, relations: &IntMatrix) -> Option<Vec<BigInt>> {
    let mut moduli = vec![BigInt::zero(); ngens];
    let mut seen = vec![false; ngens];
    for i in 0..relations.rows() {
        let mut hit = None;
        for (j, x) in relations.row(i).iter().enumerate() {
            if !x.is_zero() {
                if hit.is_some() {
                    return None;
                }
                hit = Some((j, x.abs()));
            }
        }
        if let Some((j, m)) = hit {
            if seen[j] {
                return None;
            }
            seen[j] = true;
            moduli[j] = m;
        }
    }
    Some(moduli)
}

impl FpGroup {
    /// Group with `ngens` generators subject to the rows of `relations`.
    pub fn new(ngens: usize, relations: IntMatrix) -> Result<FpGroup> {
        if relations.cols() != ngens {
            return Err(Error::DimensionMismatch(format!(
                "relation matrix has {} columns for {ngens} generators",
                relations.cols()
            )));
        }
        let normal = match diagonal_moduli(ngens, &relations) {
            Some(moduli) => Normalizer { change: None, moduli },
            None => {
                // relation lattice = column span of R^T; y = U x diagonalizes it
                let snf = smith_normal_form(&relations.transpose());
                let mut moduli = snf.diagonal();
                moduli.resize(ngens, BigInt::zero());
                Normalizer { change: Some(snf.u), moduli }
            }
        };
        let invariants = Invariants::from_moduli(normal.moduli.iter());
        Ok(FpGroup(Arc::new(GroupData {
            ngens,
            relations,
            normal,
            invariants,
            relation_lattice: Default::default(),
        })))
    }

    /// `Z^n`.
    pub fn free(n: usize) -> FpGroup {
        FpGroup::new(n, IntMatrix::zeros(0, n)).expect("free group")
    }

    /// The trivial group in canonical form: no generators, no relations.
    pub fn trivial() -> FpGroup {
        FpGroup::free(0)
    }

    /// `Z/m` (for `m = 0` this is `Z`).
    pub fn cyclic(m: i64) -> FpGroup {
        FpGroup::from_invariants(&Invariants::from_moduli([&BigInt::from(m)]))
    }

    /// Canonical presentation `Z/d_1 ⊕ ... ⊕ Z/d_t ⊕ Z^r`: torsion generators
    /// first, then free ones.
    pub fn from_invariants(inv: &Invariants) -> FpGroup {
        let t = inv.torsion.len();
        let n = t + inv.rank;
        let mut rel = IntMatrix::zeros(t, n);
        for (i, d) in inv.torsion.iter().enumerate() {
            rel[(i, i)] = d.clone();
        }
        FpGroup::new(n, rel).expect("canonical presentation")
    }

    /// Presentation with one generator per modulus (zero for free).
    pub fn from_moduli(moduli: &[BigInt]) -> FpGroup {
        let rows: Vec<usize> = (0..moduli.len()).filter(|&i| !moduli[i].is_zero()).collect();
        let mut rel = IntMatrix::zeros(rows.len(), moduli.len());
        for (r, &i) in rows.iter().enumerate() {
            rel[(r, i)] = moduli[i].clone();
        }
        FpGroup::new(moduli.len(), rel).expect("diagonal presentation")
    }

    /// Direct sum with block-diagonal relations; generators are concatenated.
    pub fn direct_sum(parts: &[FpGroup]) -> FpGroup {
        let blocks: Vec<&IntMatrix> = parts.iter().map(|g| g.relations()).collect();
        let n = parts.iter().map(|g| g.ngens()).sum();
        FpGroup::new(n, IntMatrix::block_diagonal(&blocks)).expect("direct sum")
    }

    pub fn ngens(&self) -> usize {
        self.0.ngens
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.0.relations
    }

    pub fn invariants(&self) -> &Invariants {
        &self.0.invariants
    }

    pub fn rank(&self) -> usize {
        self.0.invariants.rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.0.invariants.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.0.invariants.is_trivial()
    }

    pub fn is_isomorphic(&self, other: &FpGroup) -> bool {
        self.invariants() == other.invariants()
    }

    /// Lattice spanned by the relations inside `Z^ngens`.
    pub fn relation_lattice(&self) -> &Lattice {
        self.0
            .relation_lattice
            .get_or_init(|| Lattice::span(self.ngens(), self.relations().to_rows()))
    }

    pub fn zero_element(&self) -> IntVector {
        vec![BigInt::zero(); self.ngens()]
    }

    pub fn generator(&self, i: usize) -> IntVector {
        unit(self.ngens(), i)
    }

    /// Canonical coordinates of `x`: equal for two vectors exactly when they
    /// represent the same element.
    pub fn normal_form(&self, x: &[BigInt]) -> IntVector {
        assert_eq!(x.len(), self.ngens(), "element length mismatch");
        let normal = &self.0.normal;
        let y = match &normal.change {
            Some(c) => c.mul_vec(x),
            None => x.to_vec(),
        };
        y.into_iter()
            .zip(&normal.moduli)
            .map(|(v, m)| if m.is_zero() { v } else { v.mod_floor(m) })
            .collect()
    }

    pub fn is_zero(&self, x: &[BigInt]) -> bool {
        assert_eq!(x.len(), self.ngens(), "element length mismatch");
        let normal = &self.0.normal;
        let check = |v: &BigInt, m: &BigInt| {
            if m.is_zero() {
                v.is_zero()
            } else {
                v.is_multiple_of(m)
            }
        };
        match &normal.change {
            Some(c) => c.mul_vec(x).iter().zip(&normal.moduli).all(|(v, m)| check(v, m)),
            None => x.iter().zip(&normal.moduli).all(|(v, m)| check(v, m)),
        }
    }

    pub fn elements_equal(&self, x: &[BigInt], y: &[BigInt]) -> bool {
        let diff: IntVector = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.is_zero(&diff)
    }

    /// Enumerates all elements of a finite group in normal form; `None` for
    /// infinite groups or groups larger than `limit`.
    pub fn enumerate_elements(&self, limit: usize) -> Option<Vec<IntVector>> {
        let order = self.invariants().order()?;
        if order > BigInt::from(limit) {
            return None;
        }
        // walk the box of normal-form coordinates and map back
        let normal = &self.0.normal;
        let inverse = normal.change.as_ref().map(invert_unimodular);
        let mut out = Vec::new();
        let mut cur = vec![BigInt::zero(); self.ngens()];
        loop {
            let x = match &inverse {
                Some(inv) => inv.mul_vec(&cur),
                None => cur.clone(),
            };
            out.push(self.normal_form(&x));
            // odometer over coordinates with modulus >= 2
            let mut i = 0;
            loop {
                if i == cur.len() {
                    out.sort();
                    out.dedup();
                    return Some(out);
                }
                let m = &normal.moduli[i];
                if m.is_zero() || m.is_one() {
                    i += 1;
                    continue;
                }
                cur[i] += 1;
                if &cur[i] < m {
                    break;
                }
                cur[i] = BigInt::zero();
                i += 1;
            }
        }
    }
}

/// Inverse of a unimodular matrix.
pub fn invert_unimodular(m: &IntMatrix) -> IntMatrix {
    // U M V = I for unimodular M, so M^-1 = V U
    let snf = smith_normal_form(m);
    debug_assert!(snf.s.is_identity(), "matrix is not unimodular");
    &snf.v * &snf.u
}

impl PartialEq for FpGroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.ngens == other.0.ngens && self.0.relations == other.0.relations)
    }
}

impl Eq for FpGroup {}

impl fmt::Debug for FpGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpGroup({} gens, rels {}; ≅ {})", self.ngens(), self.relations(), self.invariants())
    }
}

impl fmt::Display for FpGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.invariants())
    }
}

/// Homomorphism `source → target` given on generators by a
/// `target.ngens() × source.ngens()` matrix.
#[derive(Clone, Debug)]
pub struct GroupHom {
    source: FpGroup,
    target: FpGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    /// Validates that every source relation maps into the target relations.
    pub fn new(source: FpGroup, target: FpGroup, matrix: IntMatrix) -> Result<GroupHom> {
        if matrix.shape() != (target.ngens(), source.ngens()) {
            return Err(Error::IllFormedHom(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.ngens(),
                source.ngens()
            )));
        }
        for i in 0..source.relations().rows() {
            let image = matrix.mul_vec(source.relations().row(i));
            if !target.is_zero(&image) {
                return Err(Error::IllFormedHom(format!(
                    "source relation {i} does not map to zero"
                )));
            }
        }
        Ok(GroupHom { source, target, matrix })
    }

    /// Skips the well-definedness check; callers guarantee it by construction.
    pub(crate) fn new_unchecked(source: FpGroup, target: FpGroup, matrix: IntMatrix) -> GroupHom {
        debug_assert_eq!(matrix.shape(), (target.ngens(), source.ngens()));
        GroupHom { source, target, matrix }
    }

    pub fn zero(source: FpGroup, target: FpGroup) -> GroupHom {
        let matrix = IntMatrix::zeros(target.ngens(), source.ngens());
        GroupHom { source, target, matrix }
    }

    pub fn identity(group: FpGroup) -> GroupHom {
        let matrix = IntMatrix::identity(group.ngens());
        GroupHom { source: group.clone(), target: group, matrix }
    }

    /// Multiplication by `k` on `group`.
    pub fn scalar(group: FpGroup, k: i64) -> GroupHom {
        let matrix = IntMatrix::identity(group.ngens()).scale(&BigInt::from(k));
        GroupHom { source: group.clone(), target: group, matrix }
    }

    pub fn source(&self) -> &FpGroup {
        &self.source
    }

    pub fn target(&self) -> &FpGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[BigInt]) -> IntVector {
        self.matrix.mul_vec(x)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &GroupHom) -> Result<GroupHom> {
        if first.target != self.source {
            return Err(Error::ChainMismatch(
                "target of the first map is not the source of the second".into(),
            ));
        }
        let m = &self.matrix * &first.matrix;
        GroupHom::new(first.source.clone(), self.target.clone(), m)
    }

    pub(crate) fn compose_unchecked(&self, first: &GroupHom) -> GroupHom {
        let m = &self.matrix * &first.matrix;
        GroupHom { source: first.source.clone(), target: self.target.clone(), matrix: m }
    }

    pub fn add(&self, other: &GroupHom) -> Result<GroupHom> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::ChainMismatch("cannot add maps between different groups".into()));
        }
        Ok(GroupHom {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.add(&other.matrix)?,
        })
    }

    pub fn neg(&self) -> GroupHom {
        GroupHom { source: self.source.clone(), target: self.target.clone(), matrix: self.matrix.neg() }
    }

    /// Semantic equality: both maps agree on every generator.
    pub fn same_map(&self, other: &GroupHom) -> bool {
        self.source.ngens() == other.source.ngens()
            && self.target == other.target
            && (0..self.source.ngens()).all(|j| {
                let diff: IntVector = (0..self.target.ngens())
                    .map(|i| &self.matrix[(i, j)] - &other.matrix[(i, j)])
                    .collect();
                self.target.is_zero(&diff)
            })
    }

    pub fn is_zero(&self) -> bool {
        (0..self.source.ngens()).all(|j| self.target.is_zero(&self.matrix.column(j)))
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.same_map(&GroupHom::identity(self.source.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::matrix::{int, int_vec};

    #[test]
    fn invariants_of_diag_2_3() {
        let g = FpGroup::new(2, IntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 3]], 2).unwrap())
            .unwrap();
        assert_eq!(g.rank(), 0);
        assert_eq!(g.torsion(), &[int(6)]);
        // brute force: six distinct cosets, and (1,1) has order 6
        let elems = g.enumerate_elements(100).unwrap();
        assert_eq!(elems.len(), 6);
        let gen = int_vec(&[1, 1]);
        let order = (1..=6)
            .find(|&k| g.is_zero(&gen.iter().map(|x| x * k).collect::<Vec<_>>()))
            .unwrap();
        assert_eq!(order, 6);
    }

    #[test]
    fn free_and_collapsed() {
        let g = FpGroup::free(2);
        assert_eq!(g.invariants(), &Invariants::free(2));
        let t = FpGroup::new(1, IntMatrix::from_i64_rows(&[vec![1]], 1).unwrap()).unwrap();
        assert!(t.is_trivial());
        assert!(t.torsion().is_empty());
    }

    #[test]
    fn non_diagonal_presentation() {
        // <x, y | 2x + 4y, 6x + 8y>  ≅ Z/2 ⊕ Z/4
        let g = FpGroup::new(2, IntMatrix::from_i64_rows(&[vec![2, 4], vec![6, 8]], 2).unwrap())
            .unwrap();
        assert_eq!(g.torsion(), &[int(2), int(4)]);
        assert_eq!(g.enumerate_elements(100).unwrap().len(), 8);
        assert!(g.is_zero(&int_vec(&[2, 4])));
        assert!(g.is_zero(&int_vec(&[2, 0])));
        assert!(!g.is_zero(&int_vec(&[0, 2])));
    }

    #[test]
    fn ill_formed_hom_rejected() {
        // Z/2 -> Z sending the generator to 1 is not well defined
        let z2 = FpGroup::cyclic(2);
        let z = FpGroup::free(1);
        let m = IntMatrix::from_i64_rows(&[vec![1]], 1).unwrap();
        assert!(matches!(GroupHom::new(z2.clone(), z.clone(), m), Err(Error::IllFormedHom(_))));
        let ok = IntMatrix::from_i64_rows(&[vec![1]], 1).unwrap();
        assert!(GroupHom::new(z, z2, ok).is_ok());
    }

    #[test]
    fn rendering() {
        assert_eq!(Invariants::trivial().to_string(), "0");
        assert_eq!(FpGroup::free(1).to_string(), "Z");
        let inv = Invariants { rank: 2, torsion: vec![int(2), int(4)] };
        assert_eq!(inv.to_string(), "Z^2 ⊕ Z/2 ⊕ Z/4");
    }

    #[test]
    fn direct_sum_invariants() {
        let g = FpGroup::direct_sum(&[FpGroup::cyclic(4), FpGroup::cyclic(6), FpGroup::free(1)]);
        assert_eq!(g.invariants(), &Invariants { rank: 1, torsion: vec![int(2), int(12)] });
    }
}
