//! The Godement resolution, sheaf cohomology, flasque sheaves, partitions
//! of unity and the chain-complex oracle for derived limits.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactalg::{cokernel, hom_parts, FpGroup, GroupHom, IntMatrix, SubQuotient};
use crate::finspace::{FiniteSpace, OpenSet, DEFAULT_OPENS_CAP};
use crate::sheaves::{
    build_sheaf, global_sections, is_exact_sequence, restriction_map, sections, sections_map, subquotient_sheaf,
    Sheaf, SheafHom,
};
use crate::spectral::GroupComplex;

/// `C⁰F`: stalk `∏_{q ∈ U_p} F_q` at `p`, restrictions are coordinate
/// projections.
pub fn godement_sheaf(f: &Sheaf) -> Sheaf {
    let x = f.space();
    let opens: Vec<OpenSet> = x.points().map(|p| x.minimal_open(p)).collect();
    let offsets = product_offsets(f, &opens);
    let stalks: Vec<FpGroup> = opens
        .iter()
        .map(|u| FpGroup::direct_sum(&u.members().iter().map(|&q| f.stalk(q).clone()).collect::<Vec<_>>()))
        .collect();
    let maps = x
        .covers()
        .iter()
        .map(|&(lo, hi)| {
            let mut m = IntMatrix::zeros(stalks[lo].ngens(), stalks[hi].ngens());
            for (j, &q) in opens[lo].members().iter().enumerate() {
                let i = opens[hi].position(q).expect("U_lo ⊆ U_hi");
                for t in 0..f.stalk(q).ngens() {
                    m[(offsets[lo][j] + t, offsets[hi][i] + t)] = BigInt::from(1);
                }
            }
            (hi, lo, GroupHom::new_unchecked(stalks[hi].clone(), stalks[lo].clone(), m))
        })
        .collect();
    build_sheaf(x, stalks, maps).expect("coordinate projections are functorial")
}

fn product_offsets(f: &Sheaf, opens: &[OpenSet]) -> Vec<Vec<usize>> {
    opens
        .iter()
        .map(|u| {
            u.members()
                .iter()
                .scan(0, |acc, &q| {
                    let o = *acc;
                    *acc += f.stalk(q).ngens();
                    Some(o)
                })
                .collect()
        })
        .collect()
}

/// The unit `F → C⁰F`: a germ at `p` goes to its restrictions over `U_p`.
pub fn godement_unit(f: &Sheaf, c0: &Sheaf) -> SheafHom {
    let x = f.space();
    let maps = x
        .points()
        .map(|p| {
            let u = x.minimal_open(p);
            let blocks: Vec<&IntMatrix> = u.members().iter().map(|&q| f.restrict(p, q).matrix()).collect();
            let mut m = IntMatrix::zeros(c0.stalk(p).ngens(), f.stalk(p).ngens());
            let mut row = 0;
            for b in blocks {
                m.set_block(row, 0, b);
                row += b.rows();
            }
            GroupHom::new_unchecked(f.stalk(p).clone(), c0.stalk(p).clone(), m)
        })
        .collect();
    SheafHom::new_unchecked(f.clone(), c0.clone(), maps)
}

/// `C⁰φ : C⁰F → C⁰G`, block diagonal over `U_p`.
pub fn godement_map(phi: &SheafHom, c0_source: &Sheaf, c0_target: &Sheaf) -> SheafHom {
    let x = phi.source().space();
    let maps = x
        .points()
        .map(|p| {
            let u = x.minimal_open(p);
            let blocks: Vec<&IntMatrix> = u.members().iter().map(|&q| phi.stalk_map(q).matrix()).collect();
            GroupHom::new_unchecked(
                c0_source.stalk(p).clone(),
                c0_target.stalk(p).clone(),
                IntMatrix::block_diagonal(&blocks),
            )
        })
        .collect();
    SheafHom::new_unchecked(c0_source.clone(), c0_target.clone(), maps)
}

/// `0 → F → C⁰F → Q¹ → 0`.
#[derive(Clone, Debug)]
pub struct GodementStep {
    pub input: Sheaf,
    pub c0: Sheaf,
    pub unit: SheafHom,
    pub quotient: Sheaf,
    pub projection: SheafHom,
    cokernels: Vec<SubQuotient>,
}

pub fn godement_step(f: &Sheaf) -> GodementStep {
    let c0 = godement_sheaf(f);
    let unit = godement_unit(f, &c0);
    let cokernels: Vec<SubQuotient> = unit.stalk_maps().iter().map(cokernel).collect();
    let quotient = subquotient_sheaf(&c0, &cokernels).expect("quotient of a natural map");
    let maps = cokernels.iter().map(|s| s.projection().expect("cokernel projection")).collect();
    let projection = SheafHom::new_unchecked(c0.clone(), quotient.clone(), maps);
    GodementStep { input: f.clone(), c0, unit, quotient, projection, cokernels }
}

/// The maps `C⁰φ` and `Q¹φ` induced by `φ : F → G` between two steps.
pub fn godement_step_map(phi: &SheafHom, from: &GodementStep, to: &GodementStep) -> Result<(SheafHom, SheafHom)> {
    if !phi.source().same_sheaf(&from.input) || !phi.target().same_sheaf(&to.input) {
        return Err(Error::ChainMismatch("morphism does not connect the step inputs".into()));
    }
    let c0 = godement_map(phi, &from.c0, &to.c0);
    let x = phi.source().space();
    let q = x
        .points()
        .map(|p| from.cokernels[p].induced(&to.cokernels[p], c0.stalk_map(p).matrix()))
        .collect::<Result<Vec<_>>>()?;
    Ok((c0, SheafHom::new_unchecked(from.quotient.clone(), to.quotient.clone(), q)))
}

/// An augmented complex `0 → F → L⁰ → L¹ → ...`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub base: Sheaf,
    pub terms: Vec<Sheaf>,
    pub augmentation: SheafHom,
    /// `differentials[k] : L^k → L^{k+1}`.
    pub differentials: Vec<SheafHom>,
    /// The last term is only the start of a longer resolution; exactness
    /// at it is not expected.
    pub truncated: bool,
}

impl Resolution {
    pub fn new(
        base: Sheaf,
        terms: Vec<Sheaf>,
        augmentation: SheafHom,
        differentials: Vec<SheafHom>,
        truncated: bool,
    ) -> Result<Resolution> {
        if terms.is_empty() || differentials.len() + 1 != terms.len() {
            return Err(Error::ChainMismatch(format!(
                "{} differentials for {} terms",
                differentials.len(),
                terms.len()
            )));
        }
        if !augmentation.source().same_sheaf(&base) || !augmentation.target().same_sheaf(&terms[0]) {
            return Err(Error::ChainMismatch("augmentation does not connect F and L⁰".into()));
        }
        let mut chain = vec![augmentation.clone()];
        chain.extend(differentials.iter().cloned());
        for (k, w) in chain.windows(2).enumerate() {
            if !w[1].compose(&w[0])?.is_zero() {
                return Err(Error::NotAComplex(format!("composite at position {k} is nonzero")));
            }
        }
        Ok(Resolution { base, terms, augmentation, differentials, truncated })
    }

    /// Stalkwise exactness of `0 → F → L⁰ → ... → L^m (→ 0)`; the final
    /// position is skipped for truncated resolutions.
    pub fn exactness_failures(&self) -> Result<Vec<(usize, usize)>> {
        let x = self.base.space();
        let zero = crate::sheaves::zero_sheaf(x);
        let mut chain = vec![SheafHom::zero(&zero, &self.base), self.augmentation.clone()];
        chain.extend(self.differentials.iter().cloned());
        if !self.truncated {
            chain.push(SheafHom::zero(self.terms.last().unwrap(), &zero));
        }
        Ok(is_exact_sequence(&chain)?.failures)
    }

    pub fn is_exact(&self) -> Result<bool> {
        Ok(self.exactness_failures()?.is_empty())
    }

    /// The complex of global sections `L⁰(X) → L¹(X) → ...`.
    pub fn global_sections_complex(&self) -> Result<GroupComplex> {
        global_sections_complex(&self.terms, &self.differentials)
    }
}

/// `Γ(X, ·)` applied to a complex of sheaves.
pub fn global_sections_complex(terms: &[Sheaf], differentials: &[SheafHom]) -> Result<GroupComplex> {
    let secs: Vec<_> = terms.iter().map(global_sections).collect();
    let groups = secs.iter().map(|s| s.group().clone()).collect();
    let maps = differentials
        .iter()
        .enumerate()
        .map(|(k, d)| sections_map(d, &secs[k], &secs[k + 1]))
        .collect::<Result<Vec<_>>>()?;
    GroupComplex::new(groups, maps)
}

/// The Godement resolution through `C^{kmax+1}F`, with its steps.
#[derive(Clone, Debug)]
pub struct GodementResolution {
    pub resolution: Resolution,
    /// `steps[k]` is `0 → Q^k → C^k F → Q^{k+1} → 0` with `Q^0 = F`.
    pub steps: Vec<GodementStep>,
}

impl GodementResolution {
    pub fn terms(&self) -> &[Sheaf] {
        &self.resolution.terms
    }

    pub fn differentials(&self) -> &[SheafHom] {
        &self.resolution.differentials
    }
}

pub fn godement_resolution(f: &Sheaf, kmax: usize) -> GodementResolution {
    let mut steps = Vec::with_capacity(kmax + 2);
    let mut current = f.clone();
    for _ in 0..=kmax + 1 {
        let step = godement_step(&current);
        current = step.quotient.clone();
        steps.push(step);
    }
    let terms: Vec<Sheaf> = steps.iter().map(|s| s.c0.clone()).collect();
    let differentials: Vec<SheafHom> = steps
        .windows(2)
        .map(|w| w[1].unit.compose(&w[0].projection).expect("splice"))
        .collect();
    let resolution = Resolution {
        base: f.clone(),
        terms,
        augmentation: steps[0].unit.clone(),
        differentials,
        truncated: true,
    };
    GodementResolution { resolution, steps }
}

/// `C^k φ` for every term, induced by `φ : F → G` through the resolutions.
pub fn godement_resolution_map(
    phi: &SheafHom,
    from: &GodementResolution,
    to: &GodementResolution,
) -> Result<Vec<SheafHom>> {
    let mut current = phi.clone();
    let mut out = Vec::with_capacity(from.steps.len());
    for (a, b) in from.steps.iter().zip(&to.steps) {
        let (c, q) = godement_step_map(&current, a, b)?;
        out.push(c);
        current = q;
    }
    Ok(out)
}

/// `H^0 ... H^kmax` as the cohomology of `Γ(X, C^• F)`.
pub fn sheaf_cohomology(f: &Sheaf, kmax: usize) -> Vec<FpGroup> {
    let res = godement_resolution(f, kmax);
    let complex = res.resolution.global_sections_complex().expect("Godement complex");
    (0..=kmax).map(|k| complex.cohomology(k)).collect()
}

/// Degrees `0..=kmax` of the complex `C^k = ∏_{p_0 ≺ ... ≺ p_k} F_{p_0}` with
/// `(δc)(σ) = Σ_j (-1)^j c(σ without p_j)`, where the `j = 0` term is
/// carried to `F_{p_0}` by the restriction from `p_1`.
pub fn lim_higher_oracle(f: &Sheaf, kmax: usize) -> Vec<FpGroup> {
    let x = f.space();
    let chains: Vec<Vec<_>> = (0..=kmax + 1).map(|k| x.chains(k)).collect();
    let groups: Vec<FpGroup> = chains
        .iter()
        .map(|cs| FpGroup::direct_sum(&cs.iter().map(|c| f.stalk(c.first()).clone()).collect::<Vec<_>>()))
        .collect();
    let offsets: Vec<Vec<usize>> = chains
        .iter()
        .map(|cs| {
            cs.iter()
                .scan(0, |acc, c| {
                    let o = *acc;
                    *acc += f.stalk(c.first()).ngens();
                    Some(o)
                })
                .collect()
        })
        .collect();
    let mut maps = Vec::new();
    for k in 0..=kmax {
        let mut m = IntMatrix::zeros(groups[k + 1].ngens(), groups[k].ngens());
        for (row_idx, sigma) in chains[k + 1].iter().enumerate() {
            let p0 = sigma.first();
            let r0 = offsets[k + 1][row_idx];
            for j in 0..sigma.points.len() {
                let face = sigma.face(j);
                let col_idx = chains[k].binary_search(&face).expect("faces are chains");
                let c0 = offsets[k][col_idx];
                let sign = if j % 2 == 0 { 1 } else { -1 };
                let block = if j == 0 {
                    f.restrict(face.first(), p0).matrix().clone()
                } else {
                    IntMatrix::identity(f.stalk(p0).ngens())
                };
                for a in 0..block.rows() {
                    for b in 0..block.cols() {
                        let v = &block[(a, b)] * sign;
                        m[(r0 + a, c0 + b)] += v;
                    }
                }
            }
        }
        maps.push(GroupHom::new_unchecked(groups[k].clone(), groups[k + 1].clone(), m));
    }
    let complex = GroupComplex::new(groups, maps).expect("coface identities");
    (0..=kmax).map(|k| complex.cohomology(k)).collect()
}

/// Whether `Γ(X, F) → Γ(U, F)` is onto for every open `U`; returns the
/// first open set where it fails.
pub fn flasque_witness(f: &Sheaf, cap: usize) -> Result<Option<OpenSet>> {
    let x = f.space();
    let opens = x.enumerate_opens(cap)?;
    let whole = global_sections(f);
    for u in opens {
        let s = sections(f, &u)?;
        if !hom_parts(&restriction_map(f, &whole, &s)?).surjective {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

pub fn is_flasque(f: &Sheaf, cap: usize) -> Result<bool> {
    Ok(flasque_witness(f, cap)?.is_none())
}

pub fn is_flasque_default(f: &Sheaf) -> Result<bool> {
    is_flasque(f, DEFAULT_OPENS_CAP)
}

/// Result of [`verify_partition_of_unity`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionReport {
    /// `supp η_α ⊆ U_α` for every `α`.
    pub supports_contained: bool,
    /// `Σ_α η_{α,p} = 1` at every point.
    pub sums_to_identity: bool,
    /// Indices `α` whose support leaves `U_α`.
    pub bad_supports: Vec<usize>,
    /// Points where the stalk maps do not sum to the identity.
    pub bad_points: Vec<usize>,
}

impl PartitionReport {
    pub fn valid(&self) -> bool {
        self.supports_contained && self.sums_to_identity
    }
}

/// Points where `η` has a nonzero stalk map.
pub fn support(eta: &SheafHom) -> Vec<usize> {
    eta.source().space().points().filter(|&p| !eta.stalk_map(p).is_zero()).collect()
}

pub fn verify_partition_of_unity(f: &Sheaf, cover: &[OpenSet], etas: &[SheafHom]) -> Result<PartitionReport> {
    let x = f.space();
    if cover.len() != etas.len() {
        return Err(Error::DimensionMismatch(format!("{} endomorphisms for {} cover elements", etas.len(), cover.len())));
    }
    check_covers_space(x, cover)?;
    let etas = etas
        .iter()
        .map(|e| SheafHom::new(e.source().clone(), e.target().clone(), e.stalk_maps().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    if etas.iter().any(|e| !e.source().same_sheaf(f) || !e.target().same_sheaf(f)) {
        return Err(Error::ChainMismatch("partition maps must be endomorphisms of the sheaf".into()));
    }
    let bad_supports: Vec<usize> = etas
        .iter()
        .enumerate()
        .filter(|(a, e)| support(e).iter().any(|&p| !cover[*a].contains(p)))
        .map(|(a, _)| a)
        .collect();
    let bad_points: Vec<usize> = x
        .points()
        .filter(|&p| {
            let mut sum = GroupHom::zero(f.stalk(p).clone(), f.stalk(p).clone());
            for e in &etas {
                sum = sum.add(e.stalk_map(p)).expect("same stalks");
            }
            !sum.is_identity()
        })
        .collect();
    Ok(PartitionReport {
        supports_contained: bad_supports.is_empty(),
        sums_to_identity: bad_points.is_empty(),
        bad_supports,
        bad_points,
    })
}

fn check_covers_space(x: &FiniteSpace, cover: &[OpenSet]) -> Result<()> {
    let mut union = x.empty_open();
    for c in cover {
        if !x.is_open(c.members()) {
            return Err(Error::NotOpen(x.describe(c)));
        }
        union = union.union(c);
    }
    if union.len() != x.len() {
        return Err(Error::NotACover(format!("union {} misses points", x.describe(&union))));
    }
    Ok(())
}
