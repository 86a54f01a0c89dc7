//! Kernel, image and quotient sheaves, exact sequences and left exactness
//! of sections.

use super::sheaf::{sections, sections_map, Sheaf, SheafHom};
use crate::error::{Error, Result};
use crate::exactalg::{cohomology_at, hom_parts, FpGroup, GroupHom, IntMatrix, SubQuotient};
use crate::finspace::OpenSet;

/// The sheaf whose stalk at `p` is the subquotient `sqs[p]` of the stalk
/// of `ambient`, with restrictions induced from those of `ambient`.
pub fn subquotient_sheaf(ambient: &Sheaf, sqs: &[SubQuotient]) -> Result<Sheaf> {
    let x = ambient.space();
    let stalks: Vec<FpGroup> = sqs.iter().map(|s| s.group().clone()).collect();
    let maps = x
        .covers()
        .iter()
        .map(|&(q, p)| Ok((p, q, sqs[p].induced(&sqs[q], ambient.restrict(p, q).matrix())?)))
        .collect::<Result<Vec<_>>>()?;
    super::sheaf::build_sheaf(x, stalks, maps)
}

/// Stalkwise kernel, image and cokernel of a sheaf morphism.
#[derive(Clone, Debug)]
pub struct SheafHomParts {
    pub kernel: Sheaf,
    pub image: Sheaf,
    /// Target modulo image.
    pub quotient: Sheaf,
    pub kernel_inclusion: SheafHom,
    pub image_inclusion: SheafHom,
    /// Corestriction of the morphism onto its image.
    pub onto_image: SheafHom,
    pub quotient_projection: SheafHom,
    pub injective: bool,
    pub surjective: bool,
}

pub fn sheaf_hom_parts(phi: &SheafHom) -> Result<SheafHomParts> {
    let src = phi.source();
    let tgt = phi.target();
    let x = src.space();
    // revalidate naturality: morphisms built internally skip the check
    let phi = SheafHom::new(src.clone(), tgt.clone(), phi.stalk_maps().to_vec())?;
    let parts: Vec<_> = x.points().map(|p| hom_parts(phi.stalk_map(p))).collect();
    let ker_sq: Vec<SubQuotient> = parts.iter().map(|h| h.kernel.clone()).collect();
    let im_sq: Vec<SubQuotient> = parts.iter().map(|h| h.image.clone()).collect();
    let coker_sq: Vec<SubQuotient> = parts.iter().map(|h| h.cokernel.clone()).collect();
    let kernel = subquotient_sheaf(src, &ker_sq)?;
    let image = subquotient_sheaf(tgt, &im_sq)?;
    let quotient = subquotient_sheaf(tgt, &coker_sq)?;
    let kernel_inclusion = SheafHom::new_unchecked(
        kernel.clone(),
        src.clone(),
        ker_sq.iter().map(|s| s.inclusion()).collect::<Result<_>>()?,
    );
    let image_inclusion = SheafHom::new_unchecked(
        image.clone(),
        tgt.clone(),
        im_sq.iter().map(|s| s.inclusion()).collect::<Result<_>>()?,
    );
    let onto_image = SheafHom::new_unchecked(
        src.clone(),
        image.clone(),
        x.points()
            .map(|p| {
                let whole = SubQuotient::whole(src.stalk(p).clone());
                let m = whole.induced(&im_sq[p], phi.stalk_map(p).matrix())?;
                Ok(m.compose_unchecked(&whole.projection()?))
            })
            .collect::<Result<_>>()?,
    );
    let quotient_projection = SheafHom::new_unchecked(
        tgt.clone(),
        quotient.clone(),
        coker_sq.iter().map(|s| s.projection()).collect::<Result<_>>()?,
    );
    Ok(SheafHomParts {
        injective: parts.iter().all(|h| h.injective),
        surjective: parts.iter().all(|h| h.surjective),
        kernel,
        image,
        quotient,
        kernel_inclusion,
        image_inclusion,
        onto_image,
        quotient_projection,
    })
}

/// Result of [`is_exact_sequence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    pub exact: bool,
    /// `(position, point)` pairs where the stalk sequence is not exact.
    /// Position `k` is the term between `maps[k-1]` and `maps[k]`.
    pub failures: Vec<(usize, usize)>,
}

/// Checks exactness at every interior term, stalk by stalk.
pub fn is_exact_sequence(maps: &[SheafHom]) -> Result<ExactnessReport> {
    for (k, w) in maps.windows(2).enumerate() {
        if !w[0].target().same_sheaf(w[1].source()) {
            return Err(Error::ChainMismatch(format!("maps {k} and {} do not compose", k + 1)));
        }
    }
    let mut failures = Vec::new();
    for (k, w) in maps.windows(2).enumerate() {
        for p in w[0].source().space().points() {
            let ok = match cohomology_at(w[0].stalk_map(p), w[1].stalk_map(p)) {
                Ok(h) => h.group().is_trivial(),
                Err(Error::NotAComplex(_)) => false,
                Err(e) => return Err(e),
            };
            if !ok {
                failures.push((k + 1, p));
            }
        }
    }
    Ok(ExactnessReport { exact: failures.is_empty(), failures })
}

/// `0 → E → F → G → 0`, padded with zero sheaves at both ends. Positions in
/// the report are 1 for `E`, 2 for `F` and 3 for `G`.
pub fn is_short_exact(f: &SheafHom, g: &SheafHom) -> Result<ExactnessReport> {
    let zero = super::sheaf::zero_sheaf(f.source().space());
    let maps = [
        SheafHom::zero(&zero, f.source()),
        f.clone(),
        g.clone(),
        SheafHom::zero(g.target(), &zero),
    ];
    is_exact_sequence(&maps)
}

/// Result of [`sections_left_exactness`].
#[derive(Clone, Debug)]
pub struct LeftExactnessReport {
    /// `0 → E(U) → F(U) → G(U)` is exact.
    pub left_exact: bool,
    /// `F(U) → G(U)` is onto.
    pub surjective: bool,
    /// `E(U)`, `F(U)`, `G(U)`.
    pub sections: [FpGroup; 3],
    pub maps: [GroupHom; 2],
    /// `G(U) / im F(U)`.
    pub cokernel: FpGroup,
}

/// Applies `Γ(U, ·)` to a short exact sequence `0 → E → F → G → 0`.
pub fn sections_left_exactness(f: &SheafHom, g: &SheafHom, u: &OpenSet) -> Result<LeftExactnessReport> {
    let rep = is_short_exact(f, g)?;
    if !rep.exact {
        let x = f.source().space();
        let (k, p) = rep.failures[0];
        return Err(Error::NotExactInput(format!("position {k} at point {}", x.name(p))));
    }
    let se = sections(f.source(), u)?;
    let sf = sections(f.target(), u)?;
    let sg = sections(g.target(), u)?;
    let gf = sections_map(f, &se, &sf)?;
    let gg = sections_map(g, &sf, &sg)?;
    let injective = hom_parts(&gf).injective;
    let middle = cohomology_at(&gf, &gg)?;
    let tail = hom_parts(&gg);
    Ok(LeftExactnessReport {
        left_exact: injective && middle.group().is_trivial(),
        surjective: tail.surjective,
        sections: [se.group().clone(), sf.group().clone(), sg.group().clone()],
        maps: [gf, gg],
        cokernel: tail.cokernel.group().clone(),
    })
}

/// Block-diagonal stalk maps `⊕ F_i → ⊕ G_i` for a family of morphisms.
pub fn direct_sum_hom(source: &Sheaf, target: &Sheaf, parts: &[&SheafHom]) -> Result<SheafHom> {
    let x = source.space();
    let maps = x
        .points()
        .map(|p| {
            let blocks: Vec<&IntMatrix> = parts.iter().map(|h| h.stalk_map(p).matrix()).collect();
            GroupHom::new(source.stalk(p).clone(), target.stalk(p).clone(), IntMatrix::block_diagonal(&blocks))
        })
        .collect::<Result<Vec<_>>>()?;
    SheafHom::new(source.clone(), target.clone(), maps)
}

/// Stalkwise direct sum of sheaves on a common space.
pub fn direct_sum_sheaf(parts: &[&Sheaf]) -> Result<Sheaf> {
    let x = parts.first().ok_or_else(|| Error::DimensionMismatch("empty direct sum".into()))?.space();
    if parts.iter().any(|f| f.space() != x) {
        return Err(Error::ChainMismatch("sheaves live on different spaces".into()));
    }
    let stalks: Vec<FpGroup> = x
        .points()
        .map(|p| FpGroup::direct_sum(&parts.iter().map(|f| f.stalk(p).clone()).collect::<Vec<_>>()))
        .collect();
    let maps = x
        .covers()
        .iter()
        .map(|&(q, p)| {
            let blocks: Vec<&IntMatrix> = parts.iter().map(|f| f.restrict(p, q).matrix()).collect();
            (p, q, GroupHom::new_unchecked(stalks[p].clone(), stalks[q].clone(), IntMatrix::block_diagonal(&blocks)))
        })
        .collect();
    super::sheaf::build_sheaf(x, stalks, maps)
}
