//! Sheaves on finite spaces as functors on the specialization order.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactalg::{kernel, FpGroup, GroupHom, IntMatrix, IntVector, SubQuotient};
use crate::finspace::{FiniteSpace, OpenSet};

#[derive(Debug)]
struct SheafData {
    space: FiniteSpace,
    stalks: Vec<FpGroup>,
    /// `restrict[p][q]` is the map `stalk(p) → stalk(q)` for `q ⪯ p`.
    restrict: Vec<Vec<Option<GroupHom>>>,
}

/// A sheaf of abelian groups: a stalk at every point and a restriction
/// `stalk(p) → stalk(q)` for every `q ⪯ p`, functorial along the order.
#[derive(Clone)]
pub struct Sheaf(Arc<SheafData>);

/// Builds a sheaf from stalks and restrictions given as `(p, q, map)` with
/// `q ⪯ p` and `map: stalk(p) → stalk(q)`.
///
/// Every covering pair needs a map; other pairs are derived as composites,
/// and any explicitly given ones are checked against the composites.
pub fn build_sheaf(
    space: &FiniteSpace,
    stalks: Vec<FpGroup>,
    restrictions: Vec<(usize, usize, GroupHom)>,
) -> Result<Sheaf> {
    let n = space.len();
    if stalks.len() != n {
        return Err(Error::DimensionMismatch(format!("{} stalks for {n} points", stalks.len())));
    }
    let mut restrict: Vec<Vec<Option<GroupHom>>> = vec![vec![None; n]; n];
    for (p, q, map) in restrictions {
        if p >= n || q >= n {
            return Err(Error::UnknownPoint(format!("#{}", p.max(q))));
        }
        if !space.leq(q, p) {
            return Err(Error::NotComparable(space.name(p).into(), space.name(q).into()));
        }
        if map.source() != &stalks[p] || map.target() != &stalks[q] {
            return Err(Error::IllFormedHom(format!(
                "restriction {}:{} does not connect the stalks",
                space.name(p),
                space.name(q)
            )));
        }
        restrict[p][q] = Some(map);
    }
    for p in 0..n {
        match &restrict[p][p] {
            Some(m) if !m.is_identity() => {
                let name = space.name(p).to_string();
                return Err(Error::FunctorialityViolation { triple: vec![name.clone(), name.clone(), name] });
            }
            Some(_) => {}
            None => restrict[p][p] = Some(GroupHom::identity(stalks[p].clone())),
        }
    }
    for &(q, p) in space.covers() {
        if restrict[p][q].is_none() {
            return Err(Error::MissingRestriction(space.name(p).into(), space.name(q).into()));
        }
    }
    // fill composites: q ⋖ r ⪯ p
    loop {
        let mut changed = false;
        let mut missing = false;
        for p in 0..n {
            for q in 0..n {
                if !space.lt(q, p) || restrict[p][q].is_some() {
                    continue;
                }
                let route = space
                    .covers()
                    .iter()
                    .find(|&&(lo, r)| lo == q && space.leq(r, p) && restrict[p][r].is_some());
                match route {
                    Some(&(_, r)) => {
                        let m = restrict[r][q].as_ref().unwrap().compose_unchecked(restrict[p][r].as_ref().unwrap());
                        restrict[p][q] = Some(m);
                        changed = true;
                    }
                    None => missing = true,
                }
            }
        }
        if !missing || !changed {
            break;
        }
    }
    for p in 0..n {
        for r in 0..n {
            if !space.lt(r, p) {
                continue;
            }
            for q in 0..n {
                if !space.lt(q, r) {
                    continue;
                }
                let direct = restrict[p][q].as_ref().expect("composites filled");
                let via = restrict[r][q].as_ref().unwrap().compose_unchecked(restrict[p][r].as_ref().unwrap());
                if !direct.same_map(&via) {
                    return Err(Error::FunctorialityViolation {
                        triple: vec![space.name(p).into(), space.name(r).into(), space.name(q).into()],
                    });
                }
            }
        }
    }
    Ok(Sheaf(Arc::new(SheafData { space: space.clone(), stalks, restrict })))
}

/// Every stalk `g`, identity restrictions.
pub fn constant_sheaf(space: &FiniteSpace, g: &FpGroup) -> Sheaf {
    let stalks = vec![g.clone(); space.len()];
    let maps = space
        .covers()
        .iter()
        .map(|&(q, p)| (p, q, GroupHom::identity(g.clone())))
        .collect();
    build_sheaf(space, stalks, maps).expect("constant sheaf")
}

/// Stalk `g` on the closure of `{p}` (the points `q` with `p ⪯ q`), zero
/// elsewhere; identity restrictions inside the support.
pub fn skyscraper(space: &FiniteSpace, p: usize, g: &FpGroup) -> Result<Sheaf> {
    if p >= space.len() {
        return Err(Error::UnknownPoint(format!("#{p}")));
    }
    let support: Vec<bool> = space.points().map(|q| space.leq(p, q)).collect();
    let stalks: Vec<FpGroup> = space
        .points()
        .map(|q| if support[q] { g.clone() } else { FpGroup::trivial() })
        .collect();
    let maps = space
        .covers()
        .iter()
        .map(|&(lo, hi)| {
            let m = if support[lo] && support[hi] {
                GroupHom::identity(g.clone())
            } else {
                GroupHom::zero(stalks[hi].clone(), stalks[lo].clone())
            };
            (hi, lo, m)
        })
        .collect();
    build_sheaf(space, stalks, maps)
}

pub fn zero_sheaf(space: &FiniteSpace) -> Sheaf {
    constant_sheaf(space, &FpGroup::trivial())
}

impl Sheaf {
    pub fn space(&self) -> &FiniteSpace {
        &self.0.space
    }

    pub fn stalk(&self, p: usize) -> &FpGroup {
        &self.0.stalks[p]
    }

    pub fn stalks(&self) -> &[FpGroup] {
        &self.0.stalks
    }

    /// Restriction `stalk(p) → stalk(q)`; panics unless `q ⪯ p`.
    pub fn restrict(&self, p: usize, q: usize) -> &GroupHom {
        self.0.restrict[p][q].as_ref().unwrap_or_else(|| {
            panic!("{} is not below {}", self.space().name(q), self.space().name(p))
        })
    }

    pub fn try_restrict(&self, p: usize, q: usize) -> Result<&GroupHom> {
        self.0.restrict[p][q]
            .as_ref()
            .ok_or_else(|| Error::NotComparable(self.space().name(p).into(), self.space().name(q).into()))
    }

    /// Restrictions along covering pairs, as `(p, q, map)`.
    pub fn covering_restrictions(&self) -> Vec<(usize, usize, GroupHom)> {
        self.space().covers().iter().map(|&(q, p)| (p, q, self.restrict(p, q).clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.stalks.iter().all(FpGroup::is_trivial)
    }

    /// Structural equality: same space, presentations and restriction matrices.
    pub fn same_sheaf(&self, other: &Sheaf) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        self.space() == other.space()
            && self.0.stalks == other.0.stalks
            && self.space().covers().iter().all(|&(q, p)| {
                self.restrict(p, q).matrix() == other.restrict(p, q).matrix()
            })
    }

    /// Stalkwise isomorphism classes agree; a cheap necessary condition
    /// for isomorphism of sheaves.
    pub fn stalks_isomorphic(&self, other: &Sheaf) -> bool {
        self.space() == other.space()
            && self.0.stalks.iter().zip(&other.0.stalks).all(|(a, b)| a.is_isomorphic(b))
    }
}

impl PartialEq for Sheaf {
    fn eq(&self, other: &Self) -> bool {
        self.same_sheaf(other)
    }
}

impl fmt::Debug for Sheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.space();
        let mut m = f.debug_map();
        for p in x.points() {
            m.entry(&x.name(p), &self.stalk(p).invariants().to_string());
        }
        m.finish()
    }
}

/// A morphism of sheaves, given by natural stalk maps.
#[derive(Clone, Debug)]
pub struct SheafHom {
    source: Sheaf,
    target: Sheaf,
    maps: Vec<GroupHom>,
}

impl SheafHom {
    /// Checks that each stalk map connects the stalks and that the maps
    /// commute with restrictions along every covering pair.
    pub fn new(source: Sheaf, target: Sheaf, maps: Vec<GroupHom>) -> Result<SheafHom> {
        let x = source.space().clone();
        if target.space() != &x {
            return Err(Error::ChainMismatch("sheaves live on different spaces".into()));
        }
        if maps.len() != x.len() {
            return Err(Error::DimensionMismatch(format!("{} stalk maps for {} points", maps.len(), x.len())));
        }
        for (p, m) in maps.iter().enumerate() {
            if m.source() != source.stalk(p) || m.target() != target.stalk(p) {
                return Err(Error::IllFormedHom(format!("stalk map at {} does not connect the stalks", x.name(p))));
            }
        }
        let hom = SheafHom { source, target, maps };
        if let Some((p, q)) = hom.naturality_failure() {
            return Err(Error::NaturalityViolation(format!("{}:{}", x.name(p), x.name(q))));
        }
        Ok(hom)
    }

    pub(crate) fn new_unchecked(source: Sheaf, target: Sheaf, maps: Vec<GroupHom>) -> SheafHom {
        SheafHom { source, target, maps }
    }

    fn naturality_failure(&self) -> Option<(usize, usize)> {
        self.source.space().covers().iter().find_map(|&(q, p)| {
            let a = self.maps[q].compose_unchecked(self.source.restrict(p, q));
            let b = self.target.restrict(p, q).compose_unchecked(&self.maps[p]);
            (!a.same_map(&b)).then_some((p, q))
        })
    }

    pub fn identity(f: &Sheaf) -> SheafHom {
        let maps = f.stalks().iter().map(|g| GroupHom::identity(g.clone())).collect();
        SheafHom { source: f.clone(), target: f.clone(), maps }
    }

    pub fn zero(source: &Sheaf, target: &Sheaf) -> SheafHom {
        let maps = source
            .stalks()
            .iter()
            .zip(target.stalks())
            .map(|(a, b)| GroupHom::zero(a.clone(), b.clone()))
            .collect();
        SheafHom { source: source.clone(), target: target.clone(), maps }
    }

    /// Multiplication by `k` on every stalk.
    pub fn scalar(f: &Sheaf, k: i64) -> SheafHom {
        let maps = f.stalks().iter().map(|g| GroupHom::scalar(g.clone(), k)).collect();
        SheafHom { source: f.clone(), target: f.clone(), maps }
    }

    pub fn source(&self) -> &Sheaf {
        &self.source
    }

    pub fn target(&self) -> &Sheaf {
        &self.target
    }

    pub fn stalk_map(&self, p: usize) -> &GroupHom {
        &self.maps[p]
    }

    pub fn stalk_maps(&self) -> &[GroupHom] {
        &self.maps
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &SheafHom) -> Result<SheafHom> {
        if !first.target.same_sheaf(&self.source) {
            return Err(Error::ChainMismatch("target of the first map is not the source of the second".into()));
        }
        let maps = self.maps.iter().zip(&first.maps).map(|(b, a)| b.compose_unchecked(a)).collect();
        Ok(SheafHom { source: first.source.clone(), target: self.target.clone(), maps })
    }

    pub fn add(&self, other: &SheafHom) -> Result<SheafHom> {
        let maps = self.maps.iter().zip(&other.maps).map(|(a, b)| a.add(b)).collect::<Result<Vec<_>>>()?;
        Ok(SheafHom { source: self.source.clone(), target: self.target.clone(), maps })
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(GroupHom::is_zero)
    }

    pub fn same_map(&self, other: &SheafHom) -> bool {
        self.maps.len() == other.maps.len() && self.maps.iter().zip(&other.maps).all(|(a, b)| a.same_map(b))
    }
}

/// Sections over an open set, as compatible families of germs.
#[derive(Clone, Debug)]
pub struct Sections {
    open: OpenSet,
    /// Offsets of each member's stalk inside the product of stalks.
    offsets: Vec<usize>,
    product: FpGroup,
    sub: SubQuotient,
    projections: Vec<GroupHom>,
}

impl Sections {
    /// The section group, in canonical form.
    pub fn group(&self) -> &FpGroup {
        self.sub.group()
    }

    pub fn open(&self) -> &OpenSet {
        &self.open
    }

    /// `∏_{p ∈ U} stalk(p)`.
    pub fn product(&self) -> &FpGroup {
        &self.product
    }

    /// The section group as a subgroup of the product.
    pub fn subquotient(&self) -> &SubQuotient {
        &self.sub
    }

    /// Evaluation at the `i`th member of the open set.
    pub fn projection(&self, i: usize) -> &GroupHom {
        &self.projections[i]
    }

    /// Evaluation at point `p`, if `p` lies in the open set.
    pub fn projection_at(&self, p: usize) -> Option<&GroupHom> {
        self.open.position(p).map(|i| &self.projections[i])
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    /// The family of germs of a section.
    pub fn family(&self, s: &[BigInt]) -> IntVector {
        self.sub.lift(s)
    }
}

/// `Γ(U, F)`: families `(s_p)_{p ∈ U}` with `restrict(p→q)(s_p) = s_q` along
/// every covering pair in `U`. Covering pairs suffice because restrictions
/// compose.
pub fn sections(f: &Sheaf, u: &OpenSet) -> Result<Sections> {
    let x = f.space();
    if !x.is_open(u.members()) {
        return Err(Error::NotOpen(x.describe(u)));
    }
    let members = u.members();
    let mut offsets = Vec::with_capacity(members.len());
    let mut total = 0;
    for &p in members {
        offsets.push(total);
        total += f.stalk(p).ngens();
    }
    let parts: Vec<FpGroup> = members.iter().map(|&p| f.stalk(p).clone()).collect();
    let product = FpGroup::direct_sum(&parts);
    let pairs: Vec<(usize, usize)> =
        x.covers().iter().copied().filter(|&(_, p)| u.contains(p)).collect();
    let pair_groups: Vec<FpGroup> = pairs.iter().map(|&(q, _)| f.stalk(q).clone()).collect();
    let constraint_target = FpGroup::direct_sum(&pair_groups);
    let mut m = IntMatrix::zeros(constraint_target.ngens(), total);
    let mut row = 0;
    for &(q, p) in &pairs {
        let (iq, ip) = (u.position(q).expect("open set"), u.position(p).unwrap());
        m.set_block(row, offsets[ip], f.restrict(p, q).matrix());
        let k = f.stalk(q).ngens();
        for t in 0..k {
            m[(row + t, offsets[iq] + t)] -= 1;
        }
        row += k;
    }
    let constraint = GroupHom::new_unchecked(product.clone(), constraint_target, m);
    let sub = kernel(&constraint);
    let projections = members
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let k = f.stalk(p).ngens();
            let cols: Vec<IntVector> =
                sub.lifts().iter().map(|l| l[offsets[i]..offsets[i] + k].to_vec()).collect();
            let mat = IntMatrix::from_columns(k, &cols);
            GroupHom::new_unchecked(sub.group().clone(), f.stalk(p).clone(), mat)
        })
        .collect();
    Ok(Sections { open: u.clone(), offsets, product, sub, projections })
}

/// `Γ(X, F)`.
pub fn global_sections(f: &Sheaf) -> Sections {
    sections(f, &f.space().whole()).expect("whole space is open")
}

/// Restriction of sections `Γ(U, F) → Γ(V, F)` for `V ⊆ U`.
pub fn restriction_map(f: &Sheaf, from: &Sections, to: &Sections) -> Result<GroupHom> {
    if !to.open.is_subset(&from.open) {
        return Err(Error::NotOpen(format!(
            "{} is not contained in {}",
            f.space().describe(&to.open),
            f.space().describe(&from.open)
        )));
    }
    let mut m = IntMatrix::zeros(to.product.ngens(), from.product.ngens());
    for (j, &p) in to.open.members().iter().enumerate() {
        let i = from.open.position(p).expect("subset");
        for t in 0..f.stalk(p).ngens() {
            m[(to.offsets[j] + t, from.offsets[i] + t)] = BigInt::from(1);
        }
    }
    from.sub.induced(&to.sub, &m)
}

/// `Γ(U, φ)`: the map on sections induced by a sheaf morphism.
pub fn sections_map(phi: &SheafHom, from: &Sections, to: &Sections) -> Result<GroupHom> {
    if from.open != to.open {
        return Err(Error::ChainMismatch("section groups over different open sets".into()));
    }
    let blocks: Vec<&IntMatrix> = from.open.members().iter().map(|&p| phi.stalk_map(p).matrix()).collect();
    from.sub.induced(&to.sub, &IntMatrix::block_diagonal(&blocks))
}
