//! Subgroups, subquotients, kernels, images and cohomology.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::group::{FpGroup, GroupHom};
use super::lattice::{combine, integer_kernel, unit, Lattice};
use super::matrix::{IntMatrix, IntVector};
use super::snf::smith_normal_form;
use crate::error::{Error, Result};

/// A subgroup of `ambient` generated by the given elements.
///
/// The subgroup is identified with its preimage lattice in `Z^ngens`, which
/// always contains the relations of the ambient group.
#[derive(Clone, Debug)]
pub struct Subgroup {
    ambient: FpGroup,
    generators: Vec<IntVector>,
    lattice: Lattice,
}

impl Subgroup {
    pub fn new(ambient: FpGroup, generators: Vec<IntVector>) -> Result<Subgroup> {
        let n = ambient.ngens();
        if let Some(g) = generators.iter().find(|g| g.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "generator of length {} in a group with {n} generators",
                g.len()
            )));
        }
        let lattice = Lattice::span(n, generators.iter().cloned()).sum(ambient.relation_lattice());
        Ok(Subgroup { ambient, generators, lattice })
    }

    fn from_lattice(ambient: FpGroup, lattice: Lattice) -> Subgroup {
        let generators = lattice.basis().to_vec();
        Subgroup { ambient, generators, lattice }
    }

    pub fn whole(ambient: FpGroup) -> Subgroup {
        let n = ambient.ngens();
        Subgroup::from_lattice(ambient, Lattice::full(n))
    }

    pub fn zero(ambient: FpGroup) -> Subgroup {
        let lattice = ambient.relation_lattice().clone();
        Subgroup { ambient, generators: Vec::new(), lattice }
    }

    pub fn ambient(&self) -> &FpGroup {
        &self.ambient
    }

    pub fn generators(&self) -> &[IntVector] {
        &self.generators
    }

    /// Preimage lattice in `Z^ngens`.
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.lattice.contains(x)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> Result<bool> {
        self.same_ambient(other)?;
        Ok(other.lattice.contains_lattice(&self.lattice))
    }

    pub fn same_subgroup(&self, other: &Subgroup) -> Result<bool> {
        self.same_ambient(other)?;
        Ok(self.lattice == other.lattice)
    }

    fn same_ambient(&self, other: &Subgroup) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch);
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subgroup) -> Result<Subgroup> {
        self.same_ambient(other)?;
        Ok(Subgroup::from_lattice(self.ambient.clone(), self.lattice.sum(&other.lattice)))
    }

    pub fn intersection(&self, other: &Subgroup) -> Result<Subgroup> {
        self.same_ambient(other)?;
        Ok(Subgroup::from_lattice(
            self.ambient.clone(),
            self.lattice.intersection(&other.lattice),
        ))
    }

    /// The subgroup as an abstract group.
    pub fn as_group(&self) -> SubQuotient {
        SubQuotient::from_lattices(self.ambient.clone(), self.lattice.clone(), self.ambient.relation_lattice().clone())
    }

    /// `self / smaller`; fails unless `smaller ⊆ self`.
    pub fn quotient(&self, smaller: &Subgroup) -> Result<SubQuotient> {
        self.same_ambient(smaller)?;
        if !self.lattice.contains_lattice(&smaller.lattice) {
            return Err(Error::DimensionMismatch("denominator is not a subgroup of numerator".into()));
        }
        Ok(SubQuotient::from_lattices(self.ambient.clone(), self.lattice.clone(), smaller.lattice.clone()))
    }
}

/// Result of [`subgroup_lattice`].
#[derive(Clone, Debug)]
pub struct SubgroupLattice {
    pub sum: Subgroup,
    pub intersection: Subgroup,
    pub a_in_b: bool,
    pub b_in_a: bool,
}

/// Sum, intersection and containment relations of two subgroups.
pub fn subgroup_lattice(a: &Subgroup, b: &Subgroup) -> Result<SubgroupLattice> {
    Ok(SubgroupLattice {
        sum: a.sum(b)?,
        intersection: a.intersection(b)?,
        a_in_b: a.is_subgroup_of(b)?,
        b_in_a: b.is_subgroup_of(a)?,
    })
}

/// A subquotient `A / B` of an ambient group, with `B ⊆ A ⊆ ambient`, put in
/// canonical form `Z/d_1 ⊕ ... ⊕ Z/d_t ⊕ Z^r`.
///
/// Both `A` and `B` are stored as preimage lattices in `Z^ngens`. Elements of
/// the canonical group lift to elements of `A` (well defined modulo `B`), and
/// elements of `A` project to the canonical group.
#[derive(Clone, Debug)]
pub struct SubQuotient {
    ambient: FpGroup,
    numerator: Lattice,
    group: FpGroup,
    /// Rows of the change of basis `U` (in numerator coordinates) that survive.
    projector: IntMatrix,
    moduli: Vec<BigInt>,
    lifts: Vec<IntVector>,
    /// Lifts of generators that die in the quotient; they span `B` modulo `s·lifts`.
    dead_lifts: Vec<IntVector>,
}

impl SubQuotient {
    /// `span(num) + R` over `span(den) + R`, where `R` are the ambient
    /// relations.
    pub fn new(ambient: FpGroup, num: &[IntVector], den: &[IntVector]) -> Result<SubQuotient> {
        let n = ambient.ngens();
        if let Some(g) = num.iter().chain(den).find(|g| g.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "element of length {} in a group with {n} generators",
                g.len()
            )));
        }
        let rel = ambient.relation_lattice();
        let a = Lattice::span(n, num.iter().cloned()).sum(rel);
        let b = Lattice::span(n, den.iter().cloned()).sum(rel);
        if !a.contains_lattice(&b) {
            return Err(Error::DimensionMismatch("denominator is not contained in numerator".into()));
        }
        Ok(SubQuotient::from_lattices(ambient, a, b))
    }

    /// Caller guarantees `R ⊆ b ⊆ a`.
    pub(crate) fn from_lattices(ambient: FpGroup, a: Lattice, b: Lattice) -> SubQuotient {
        let n = ambient.ngens();
        let ra = a.rank();
        let coords: Vec<IntVector> = b
            .basis()
            .iter()
            .map(|v| a.coordinates(v).expect("denominator inside numerator"))
            .collect();
        let c = IntMatrix::from_columns(ra, &coords);
        let snf = smith_normal_form(&c);
        let diag = snf.diagonal();
        let modulus = |i: usize| diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        let mut kept = Vec::new();
        let mut dead = Vec::new();
        for i in 0..ra {
            if modulus(i).is_one() {
                dead.push(i);
            } else {
                kept.push(i);
            }
        }
        let lift = |i: usize| combine(n, a.basis(), &snf.u_inv.column(i));
        let lifts: Vec<IntVector> = kept.iter().map(|&i| lift(i)).collect();
        let dead_lifts: Vec<IntVector> = dead.iter().map(|&i| lift(i)).collect();
        let moduli: Vec<BigInt> = kept.iter().map(|&i| modulus(i)).collect();
        let mut projector = IntMatrix::zeros(kept.len(), ra);
        for (r, &i) in kept.iter().enumerate() {
            for j in 0..ra {
                projector[(r, j)] = snf.u[(i, j)].clone();
            }
        }
        let group = FpGroup::from_moduli(&moduli);
        SubQuotient { ambient, numerator: a, group, projector, moduli, lifts, dead_lifts }
    }

    /// The whole ambient group, rewritten in canonical form.
    pub fn whole(ambient: FpGroup) -> SubQuotient {
        let n = ambient.ngens();
        let rel = ambient.relation_lattice().clone();
        SubQuotient::from_lattices(ambient, Lattice::full(n), rel)
    }

    pub fn ambient(&self) -> &FpGroup {
        &self.ambient
    }

    /// The canonical group.
    pub fn group(&self) -> &FpGroup {
        &self.group
    }

    pub fn numerator(&self) -> &Lattice {
        &self.numerator
    }

    /// Lift of canonical generator `i` into the ambient group.
    pub fn lift_generator(&self, i: usize) -> &IntVector {
        &self.lifts[i]
    }

    pub fn lifts(&self) -> &[IntVector] {
        &self.lifts
    }

    /// Lift of an arbitrary element of the canonical group.
    pub fn lift(&self, y: &[BigInt]) -> IntVector {
        combine(self.ambient.ngens(), &self.lifts, y)
    }

    /// Canonical coordinates of `x`, or `None` if `x` is not in the numerator.
    pub fn try_project(&self, x: &[BigInt]) -> Option<IntVector> {
        let c = self.numerator.coordinates(x)?;
        let y = self.projector.mul_vec(&c);
        Some(
            y.into_iter()
                .zip(&self.moduli)
                .map(|(v, m)| if m.is_zero() { v } else { v.mod_floor(m) })
                .collect(),
        )
    }

    pub fn project(&self, x: &[BigInt]) -> IntVector {
        self.try_project(x).expect("element outside the numerator")
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.numerator.contains(x)
    }

    /// Whether `x` (in the numerator) lies in the denominator.
    pub fn is_zero_class(&self, x: &[BigInt]) -> bool {
        self.try_project(x).is_some_and(|y| self.group.is_zero(&y))
    }

    /// Inclusion of the canonical group into the ambient group. Only a
    /// homomorphism when the denominator is trivial in the ambient group.
    pub fn inclusion(&self) -> Result<GroupHom> {
        let m = IntMatrix::from_columns(self.ambient.ngens(), &self.lifts);
        GroupHom::new(self.group.clone(), self.ambient.clone(), m)
    }

    /// Projection from the ambient group. Only defined when the numerator is
    /// everything.
    pub fn projection(&self) -> Result<GroupHom> {
        let n = self.ambient.ngens();
        let cols: Option<Vec<IntVector>> = (0..n).map(|j| self.try_project(&unit(n, j))).collect();
        let cols = cols.ok_or_else(|| {
            Error::IllFormedHom("numerator is a proper subgroup; no projection".into())
        })?;
        let m = IntMatrix::from_columns(self.group.ngens(), &cols);
        GroupHom::new(self.ambient.clone(), self.group.clone(), m)
    }

    /// The map `self → target` induced by the ambient matrix `m`
    /// (`target.ambient.ngens × self.ambient.ngens`). Fails if `m` does not
    /// carry numerator into numerator and denominator into denominator.
    pub fn induced(&self, target: &SubQuotient, m: &IntMatrix) -> Result<GroupHom> {
        if m.shape() != (target.ambient.ngens(), self.ambient.ngens()) {
            return Err(Error::DimensionMismatch(format!(
                "induced map matrix is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                target.ambient.ngens(),
                self.ambient.ngens()
            )));
        }
        for d in &self.dead_lifts {
            if !target.is_zero_class(&m.mul_vec(d)) {
                return Err(Error::IllFormedHom("denominator not carried into denominator".into()));
            }
        }
        let mut cols = Vec::with_capacity(self.lifts.len());
        for l in &self.lifts {
            let y = target
                .try_project(&m.mul_vec(l))
                .ok_or_else(|| Error::IllFormedHom("numerator not carried into numerator".into()))?;
            cols.push(y);
        }
        let mat = IntMatrix::from_columns(target.group.ngens(), &cols);
        GroupHom::new(self.group.clone(), target.group.clone(), mat)
    }
}

/// Kernel, image and cokernel of a homomorphism.
#[derive(Clone, Debug)]
pub struct HomParts {
    pub kernel: SubQuotient,
    pub image: SubQuotient,
    pub cokernel: SubQuotient,
    pub injective: bool,
    pub surjective: bool,
}

/// Generators (in `Z^ngens` of the source) of `f^{-1}(L)` for a lattice `L`
/// in the target containing the target relations.
fn preimage_lattice(f: &GroupHom, target_lattice: &Lattice) -> Lattice {
    let n = f.source().ngens();
    let m = f.target().ngens();
    let basis = target_lattice.basis();
    // [A | -E] (x, y) = 0
    let mut big = IntMatrix::zeros(m, n + basis.len());
    big.set_block(0, 0, f.matrix());
    for (j, b) in basis.iter().enumerate() {
        for i in 0..m {
            big[(i, n + j)] = -&b[i];
        }
    }
    let ker = integer_kernel(&big);
    Lattice::span(n, ker.into_iter().map(|mut v| {
        v.truncate(n);
        v
    }))
}

fn image_lattice(f: &GroupHom) -> Lattice {
    let m = f.target().ngens();
    Lattice::span(m, f.matrix().columns()).sum(f.target().relation_lattice())
}

pub fn kernel(f: &GroupHom) -> SubQuotient {
    let src = f.source().clone();
    let k = preimage_lattice(f, f.target().relation_lattice());
    let rel = src.relation_lattice().clone();
    SubQuotient::from_lattices(src, k, rel)
}

pub fn image(f: &GroupHom) -> SubQuotient {
    let tgt = f.target().clone();
    let rel = tgt.relation_lattice().clone();
    SubQuotient::from_lattices(tgt, image_lattice(f), rel)
}

pub fn cokernel(f: &GroupHom) -> SubQuotient {
    let tgt = f.target().clone();
    let n = tgt.ngens();
    SubQuotient::from_lattices(tgt, Lattice::full(n), image_lattice(f))
}

pub fn hom_parts(f: &GroupHom) -> HomParts {
    let kernel = kernel(f);
    let image = image(f);
    let cokernel = cokernel(f);
    let injective = kernel.group().is_trivial();
    let surjective = cokernel.group().is_trivial();
    HomParts { kernel, image, cokernel, injective, surjective }
}

/// Preimage of a subgroup of the target.
pub fn preimage(f: &GroupHom, sub: &Subgroup) -> Result<Subgroup> {
    if sub.ambient() != f.target() {
        return Err(Error::AmbientMismatch);
    }
    let lat = preimage_lattice(f, sub.lattice());
    Ok(Subgroup::from_lattice(f.source().clone(), lat))
}

/// Image of a subgroup of the source.
pub fn image_of(f: &GroupHom, sub: &Subgroup) -> Result<Subgroup> {
    if sub.ambient() != f.source() {
        return Err(Error::AmbientMismatch);
    }
    let gens: Vec<IntVector> = sub.generators().iter().map(|g| f.apply(g)).collect();
    Subgroup::new(f.target().clone(), gens)
}

/// `ker g / im f` for `A --f--> B --g--> C`.
pub fn cohomology_at(f: &GroupHom, g: &GroupHom) -> Result<SubQuotient> {
    if f.target() != g.source() {
        return Err(Error::ChainMismatch("maps do not compose".into()));
    }
    let gf = g.compose_unchecked(f);
    if !gf.is_zero() {
        return Err(Error::NotAComplex("composite of consecutive maps is nonzero".into()));
    }
    let b = g.source().clone();
    let ker = preimage_lattice(g, g.target().relation_lattice());
    Ok(SubQuotient::from_lattices(b, ker, image_lattice(f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::group::Invariants;
    use crate::exactalg::matrix::{int, int_vec};
    use proptest::prelude::*;

    fn hom(src: &FpGroup, tgt: &FpGroup, rows: &[Vec<i64>]) -> GroupHom {
        GroupHom::new(src.clone(), tgt.clone(), IntMatrix::from_i64_rows(rows, src.ngens()).unwrap())
            .unwrap()
    }

    #[test]
    fn times_two_on_z() {
        let z = FpGroup::free(1);
        let parts = hom_parts(&hom(&z, &z, &[vec![2]]));
        assert!(parts.kernel.group().is_trivial());
        assert_eq!(parts.image.group().invariants(), &Invariants::free(1));
        assert_eq!(parts.cokernel.group().torsion(), &[int(2)]);
        assert!(parts.injective && !parts.surjective);
    }

    #[test]
    fn reduction_mod_four() {
        let z = FpGroup::free(1);
        let z4 = FpGroup::cyclic(4);
        let parts = hom_parts(&hom(&z, &z4, &[vec![1]]));
        assert!(parts.surjective && !parts.injective);
        assert_eq!(parts.kernel.group().invariants(), &Invariants::free(1));
        // kernel generated by 4
        assert_eq!(parts.kernel.lift_generator(0).iter().map(|x| x * x).sum::<BigInt>(), int(16));
    }

    #[test]
    fn z2_into_z4() {
        let z2 = FpGroup::cyclic(2);
        let z4 = FpGroup::cyclic(4);
        let parts = hom_parts(&hom(&z2, &z4, &[vec![2]]));
        assert!(parts.injective);
        assert_eq!(parts.cokernel.group().torsion(), &[int(2)]);
    }

    #[test]
    fn cohomology_of_sequence() {
        // Z --2--> Z --0--> Z: H = Z/2 in the middle
        let z = FpGroup::free(1);
        let h = cohomology_at(&hom(&z, &z, &[vec![2]]), &hom(&z, &z, &[vec![0]])).unwrap();
        assert_eq!(h.group().torsion(), &[int(2)]);
        let bad = cohomology_at(&hom(&z, &z, &[vec![2]]), &hom(&z, &z, &[vec![1]]));
        assert!(matches!(bad, Err(Error::NotAComplex(_))));
    }

    #[test]
    fn lattice_of_subgroups_in_z() {
        let z = FpGroup::free(1);
        let a = Subgroup::new(z.clone(), vec![int_vec(&[4])]).unwrap();
        let b = Subgroup::new(z.clone(), vec![int_vec(&[6])]).unwrap();
        let l = subgroup_lattice(&a, &b).unwrap();
        assert!(l.sum.contains(&int_vec(&[2])) && !l.sum.contains(&int_vec(&[1])));
        assert!(l.intersection.contains(&int_vec(&[12])) && !l.intersection.contains(&int_vec(&[6])));
        assert!(!l.a_in_b && !l.b_in_a);
        let other = Subgroup::zero(FpGroup::free(2));
        assert!(matches!(subgroup_lattice(&a, &other), Err(Error::AmbientMismatch)));
    }

    #[test]
    fn lift_project_roundtrip() {
        let g = FpGroup::new(2, IntMatrix::from_i64_rows(&[vec![2, 4], vec![6, 8]], 2).unwrap())
            .unwrap();
        let w = SubQuotient::whole(g.clone());
        assert_eq!(w.group().torsion(), &[int(2), int(4)]);
        let p = w.projection().unwrap();
        let i = w.inclusion().unwrap();
        assert!(p.compose(&i).unwrap().is_identity());
        assert!(i.compose(&p).unwrap().is_identity());
    }

    fn small_hom() -> impl Strategy<Value = GroupHom> {
        let moduli = (0usize..=3, proptest::collection::vec(0i64..=6, 3))
            .prop_map(|(n, mods)| mods[..n].iter().map(|&m| BigInt::from(m)).collect::<Vec<_>>());
        (moduli.clone(), moduli).prop_flat_map(|(ma, mb)| {
            let len = ma.len() * mb.len();
            proptest::collection::vec(-5i64..=5, len).prop_map(move |data| {
                let a = FpGroup::from_moduli(&ma);
                let b = FpGroup::from_moduli(&mb);
                let mut m = IntMatrix::zeros(mb.len(), ma.len());
                for (i, mi) in mb.iter().enumerate() {
                    for (j, mj) in ma.iter().enumerate() {
                        let mut x = BigInt::from(data[i * ma.len() + j]);
                        // generator j has order mj; its image must be killed by mj
                        if !mj.is_zero() {
                            x *= if mi.is_zero() { BigInt::zero() } else { mi / mi.gcd(mj) };
                        }
                        m[(i, j)] = x;
                    }
                }
                GroupHom::new(a, b, m).unwrap()
            })
        })
    }

    fn order_of(inv: &Invariants) -> Option<BigInt> {
        inv.order()
    }

    proptest! {
        #[test]
        fn first_isomorphism_theorem(f in small_hom()) {
            let parts = hom_parts(&f);
            // |A| = |ker| |im| and |B| = |im| |coker| for finite groups
            if let (Some(a), Some(k), Some(i)) = (
                order_of(f.source().invariants()),
                order_of(parts.kernel.group().invariants()),
                order_of(parts.image.group().invariants()),
            ) {
                prop_assert_eq!(a, k * i);
            }
            prop_assert_eq!(
                f.source().rank(),
                parts.kernel.group().rank() + parts.image.group().rank()
            );
            prop_assert_eq!(
                f.target().rank(),
                parts.image.group().rank() + parts.cokernel.group().rank()
            );
            // kernel generators map to zero; image generators lie in the image
            for l in parts.kernel.lifts() {
                prop_assert!(f.target().is_zero(&f.apply(l)));
            }
        }
    }
}
