//! Presheaves tabulated over every open set: stalks as direct limits,
//! sheafification and the equalizer test for the sheaf axioms.

use std::collections::HashMap;

use num_bigint::BigInt;

use super::sheaf::{build_sheaf, restriction_map, sections, sections_map, Sections, Sheaf, SheafHom};
use crate::error::{Error, Result};
use crate::exactalg::{cohomology_at, hom_parts, FpGroup, GroupHom, IntMatrix};
use crate::finspace::{FiniteSpace, OpenSet};

/// A presheaf given by a group on every open set and a restriction for
/// every inclusion `V ⊆ U`.
#[derive(Clone, Debug)]
pub struct PresheafTable {
    space: FiniteSpace,
    opens: Vec<OpenSet>,
    index: HashMap<OpenSet, usize>,
    groups: Vec<FpGroup>,
    /// Keyed by `(U, V)` as indices into `opens`, for `V ⊆ U`.
    restrict: HashMap<(usize, usize), GroupHom>,
}

impl PresheafTable {
    /// Validates a table over all opens of `space` (enumerated under `cap`).
    /// `groups` follows the enumeration order; `restrictions` holds
    /// `(U, V, map)` with `V ⊆ U` for every such pair.
    pub fn new(
        space: &FiniteSpace,
        cap: usize,
        groups: Vec<FpGroup>,
        restrictions: Vec<(OpenSet, OpenSet, GroupHom)>,
    ) -> Result<PresheafTable> {
        let opens = space.enumerate_opens(cap)?;
        if groups.len() != opens.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} groups for {} open sets",
                groups.len(),
                opens.len()
            )));
        }
        let index: HashMap<OpenSet, usize> = opens.iter().cloned().enumerate().map(|(i, u)| (u, i)).collect();
        let mut restrict = HashMap::new();
        for (u, v, map) in restrictions {
            let (Some(&iu), Some(&iv)) = (index.get(&u), index.get(&v)) else {
                return Err(Error::NotOpen(format!("{} or {}", space.describe(&u), space.describe(&v))));
            };
            if !v.is_subset(&u) {
                return Err(Error::NotComparable(space.describe(&u), space.describe(&v)));
            }
            if map.source() != &groups[iu] || map.target() != &groups[iv] {
                return Err(Error::IllFormedHom(format!(
                    "restriction {} → {} does not connect the groups",
                    space.describe(&u),
                    space.describe(&v)
                )));
            }
            restrict.insert((iu, iv), map);
        }
        let table = PresheafTable { space: space.clone(), opens, index, groups, restrict };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        let n = self.opens.len();
        let sub = |v: usize, u: usize| self.opens[v].is_subset(&self.opens[u]);
        for u in 0..n {
            for v in 0..n {
                if sub(v, u) && !self.restrict.contains_key(&(u, v)) {
                    return Err(Error::MissingRestriction(
                        self.space.describe(&self.opens[u]),
                        self.space.describe(&self.opens[v]),
                    ));
                }
            }
            if !self.restrict[&(u, u)].is_identity() {
                let d = self.space.describe(&self.opens[u]);
                return Err(Error::FunctorialityViolation { triple: vec![d.clone(), d.clone(), d] });
            }
        }
        for u in 0..n {
            for v in (0..n).filter(|&v| sub(v, u)) {
                for w in (0..n).filter(|&w| sub(w, v)) {
                    let via = self.restrict[&(v, w)].compose_unchecked(&self.restrict[&(u, v)]);
                    if !via.same_map(&self.restrict[&(u, w)]) {
                        return Err(Error::FunctorialityViolation {
                            triple: [u, v, w].iter().map(|&i| self.space.describe(&self.opens[i])).collect(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds a table from per-open groups and a rule for restrictions.
    pub fn from_fn(
        space: &FiniteSpace,
        cap: usize,
        group: impl Fn(&OpenSet) -> FpGroup,
        restriction: impl Fn(&OpenSet, &OpenSet, &FpGroup, &FpGroup) -> GroupHom,
    ) -> Result<PresheafTable> {
        let opens = space.enumerate_opens(cap)?;
        let groups: Vec<FpGroup> = opens.iter().map(&group).collect();
        let mut restrictions = Vec::new();
        for (iu, u) in opens.iter().enumerate() {
            for (iv, v) in opens.iter().enumerate() {
                if v.is_subset(u) {
                    let m = restriction(u, v, &groups[iu], &groups[iv]);
                    restrictions.push((u.clone(), v.clone(), m));
                }
            }
        }
        PresheafTable::new(space, cap, groups, restrictions)
    }

    /// The table of section groups of a sheaf.
    pub fn from_sheaf(f: &Sheaf, cap: usize) -> Result<PresheafTable> {
        let x = f.space();
        let opens = x.enumerate_opens(cap)?;
        let secs: Vec<Sections> = opens.iter().map(|u| sections(f, u)).collect::<Result<_>>()?;
        let groups: Vec<FpGroup> = secs.iter().map(|s| s.group().clone()).collect();
        let mut restrictions = Vec::new();
        for (iu, u) in opens.iter().enumerate() {
            for (iv, v) in opens.iter().enumerate() {
                if v.is_subset(u) {
                    restrictions.push((u.clone(), v.clone(), restriction_map(f, &secs[iu], &secs[iv])?));
                }
            }
        }
        PresheafTable::new(x, cap, groups, restrictions)
    }

    /// Constant functions with values in `g`: `P(U) = g` for nonempty `U`,
    /// `P(∅) = 0`. Not a sheaf once the space is disconnected.
    pub fn constant_functions(space: &FiniteSpace, g: &FpGroup, cap: usize) -> Result<PresheafTable> {
        PresheafTable::from_fn(
            space,
            cap,
            |u| if u.is_empty() { FpGroup::trivial() } else { g.clone() },
            |_, v, a, b| {
                if v.is_empty() {
                    GroupHom::zero(a.clone(), b.clone())
                } else {
                    GroupHom::identity(a.clone())
                }
            },
        )
    }

    pub fn zero(space: &FiniteSpace, cap: usize) -> Result<PresheafTable> {
        PresheafTable::from_fn(space, cap, |_| FpGroup::trivial(), |_, _, a, b| GroupHom::zero(a.clone(), b.clone()))
    }

    /// `g` on the whole space, zero on every other open set.
    pub fn global_only(space: &FiniteSpace, g: &FpGroup, cap: usize) -> Result<PresheafTable> {
        let n = space.len();
        let is_whole = move |u: &OpenSet| u.len() == n;
        PresheafTable::from_fn(
            space,
            cap,
            |u| if is_whole(u) { g.clone() } else { FpGroup::trivial() },
            |u, v, a, b| {
                if is_whole(u) && is_whole(v) {
                    GroupHom::identity(a.clone())
                } else {
                    GroupHom::zero(a.clone(), b.clone())
                }
            },
        )
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn opens(&self) -> &[OpenSet] {
        &self.opens
    }

    pub fn open_index(&self, u: &OpenSet) -> Result<usize> {
        self.index.get(u).copied().ok_or_else(|| Error::NotOpen(self.space.describe(u)))
    }

    pub fn group(&self, u: &OpenSet) -> Result<&FpGroup> {
        Ok(&self.groups[self.open_index(u)?])
    }

    pub fn group_at(&self, i: usize) -> &FpGroup {
        &self.groups[i]
    }

    /// Restriction `P(U) → P(V)`.
    pub fn restriction(&self, u: &OpenSet, v: &OpenSet) -> Result<&GroupHom> {
        let key = (self.open_index(u)?, self.open_index(v)?);
        self.restrict
            .get(&key)
            .ok_or_else(|| Error::NotComparable(self.space.describe(u), self.space.describe(v)))
    }
}

/// The stalk at `p`: the direct limit over opens containing `p`, attained
/// at the minimal open `U_p`.
pub fn stalk_of_table(table: &PresheafTable, p: &str) -> Result<FpGroup> {
    let p = table.space.point(p)?;
    Ok(table.group(&table.space.minimal_open(p))?.clone())
}

/// The associated sheaf together with the unit `θ_U : P(U) → Γ(U, P⁺)`.
#[derive(Clone, Debug)]
pub struct Sheafification {
    pub sheaf: Sheaf,
    /// Indexed like [`PresheafTable::opens`].
    pub unit: Vec<GroupHom>,
    pub sections: Vec<Sections>,
}

pub fn sheafify(table: &PresheafTable) -> Result<Sheafification> {
    let x = &table.space;
    let min_opens: Vec<OpenSet> = x.points().map(|p| x.minimal_open(p)).collect();
    let stalks: Vec<FpGroup> =
        min_opens.iter().map(|u| table.group(u).cloned()).collect::<Result<_>>()?;
    let mut maps = Vec::new();
    for &(q, p) in x.covers() {
        maps.push((p, q, table.restriction(&min_opens[p], &min_opens[q])?.clone()));
    }
    let sheaf = build_sheaf(x, stalks, maps)?;
    let mut unit = Vec::with_capacity(table.opens.len());
    let mut secs = Vec::with_capacity(table.opens.len());
    for (i, u) in table.opens.iter().enumerate() {
        let s = sections(&sheaf, u)?;
        // s ↦ (s|_{U_p})_{p ∈ U}
        let blocks: Vec<IntMatrix> = u
            .members()
            .iter()
            .map(|&p| table.restriction(u, &min_opens[p]).map(|r| r.matrix().clone()))
            .collect::<Result<_>>()?;
        let src = &table.groups[i];
        let mut m = IntMatrix::zeros(s.product().ngens(), src.ngens());
        for (k, b) in blocks.iter().enumerate() {
            m.set_block(s.offset(k), 0, b);
        }
        let whole = crate::exactalg::SubQuotient::whole(src.clone());
        let theta = whole.induced(s.subquotient(), &m)?;
        // rewrite the source back in the table's presentation
        let theta = theta.compose_unchecked(&whole.projection()?);
        unit.push(theta);
        secs.push(s);
    }
    Ok(Sheafification { sheaf, unit, sections: secs })
}

/// Whether every unit map is an isomorphism (true exactly for sheaves).
pub fn unit_is_isomorphism(sh: &Sheafification) -> bool {
    sh.unit.iter().all(|t| {
        let parts = hom_parts(t);
        parts.injective && parts.surjective
    })
}

/// Extends a presheaf morphism `φ_U : P(U) → Γ(U, G)` into a sheaf `G` to
/// the unique sheaf morphism `φ⁺ : P⁺ → G` with `φ⁺ ∘ θ = φ`.
///
/// `phi` is indexed like the table's opens and `g_sections[i]` must be
/// `Γ(opens[i], G)`.
pub fn sheafify_hom(
    table: &PresheafTable,
    sh: &Sheafification,
    g: &Sheaf,
    g_sections: &[Sections],
    phi: &[GroupHom],
) -> Result<SheafHom> {
    let x = &table.space;
    check_presheaf_hom(table, g, g_sections, phi)?;
    let maps = x
        .points()
        .map(|p| {
            let i = table.open_index(&x.minimal_open(p))?;
            let eval = g_sections[i].projection_at(p).expect("p lies in U_p");
            Ok(eval.compose_unchecked(&phi[i]))
        })
        .collect::<Result<Vec<_>>>()?;
    SheafHom::new(sh.sheaf.clone(), g.clone(), maps)
}

fn check_presheaf_hom(table: &PresheafTable, g: &Sheaf, g_sections: &[Sections], phi: &[GroupHom]) -> Result<()> {
    let n = table.opens.len();
    if phi.len() != n || g_sections.len() != n {
        return Err(Error::DimensionMismatch(format!("expected {n} components")));
    }
    for (&(u, v), r) in &table.restrict {
        let rg = restriction_map(g, &g_sections[u], &g_sections[v])?;
        if !rg.compose_unchecked(&phi[u]).same_map(&phi[v].compose_unchecked(r)) {
            return Err(Error::NaturalityViolation(format!(
                "{} → {}",
                table.space.describe(&table.opens[u]),
                table.space.describe(&table.opens[v])
            )));
        }
    }
    Ok(())
}

/// Whether `ψ ∘ θ = φ` on every open set, for a sheaf morphism `ψ : P⁺ → G`.
pub fn factors_through_unit(sh: &Sheafification, g_sections: &[Sections], phi: &[GroupHom], psi: &SheafHom) -> Result<bool> {
    for (i, theta) in sh.unit.iter().enumerate() {
        let on_sections = sections_map(psi, &sh.sections[i], &g_sections[i])?;
        if !on_sections.compose_unchecked(theta).same_map(&phi[i]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of [`check_sheaf_axioms`] on one cover.
#[derive(Clone, Debug)]
pub struct AxiomReport {
    /// `r : P(U) → ∏ P(U_i)` is injective.
    pub uniqueness: bool,
    /// `ker δ = im r`.
    pub gluing: bool,
    /// `ker r`.
    pub ambiguity: FpGroup,
    /// `ker δ / im r`: compatible families that fail to glue.
    pub obstruction: FpGroup,
}

/// Runs `0 → P(U) → ∏ P(U_i) → ∏_{i<j} P(U_i ∩ U_j)` with
/// `(δω)_ij = ω_j| − ω_i|`.
pub fn check_sheaf_axioms(table: &PresheafTable, u: &OpenSet, cover: &[OpenSet]) -> Result<AxiomReport> {
    let x = &table.space;
    let iu = table.open_index(u)?;
    let mut union = x.empty_open();
    for c in cover {
        if !x.is_open(c.members()) || !c.is_subset(u) {
            return Err(Error::NotACover(format!("{} is not an open subset of {}", x.describe(c), x.describe(u))));
        }
        union = union.union(c);
    }
    if &union != u {
        return Err(Error::NotACover(format!("union {} differs from {}", x.describe(&union), x.describe(u))));
    }
    let parts: Vec<FpGroup> = cover.iter().map(|c| table.group(c).cloned()).collect::<Result<_>>()?;
    let product = FpGroup::direct_sum(&parts);
    let offsets: Vec<usize> = parts
        .iter()
        .scan(0, |acc, g| {
            let o = *acc;
            *acc += g.ngens();
            Some(o)
        })
        .collect();
    let mut r = IntMatrix::zeros(product.ngens(), table.groups[iu].ngens());
    for (i, c) in cover.iter().enumerate() {
        r.set_block(offsets[i], 0, table.restriction(u, c)?.matrix());
    }
    let mut pairs = Vec::new();
    for i in 0..cover.len() {
        for j in i + 1..cover.len() {
            pairs.push((i, j, cover[i].intersection(&cover[j])));
        }
    }
    let overlap_groups: Vec<FpGroup> = pairs.iter().map(|(_, _, w)| table.group(w).cloned()).collect::<Result<_>>()?;
    let overlaps = FpGroup::direct_sum(&overlap_groups);
    let mut delta = IntMatrix::zeros(overlaps.ngens(), product.ngens());
    let mut row = 0;
    for (k, (i, j, w)) in pairs.iter().enumerate() {
        let rj = table.restriction(&cover[*j], w)?.matrix();
        let ri = table.restriction(&cover[*i], w)?.matrix().neg();
        delta.set_block(row, offsets[*j], rj);
        delta.set_block(row, offsets[*i], &ri);
        row += overlap_groups[k].ngens();
    }
    let r = GroupHom::new(table.groups[iu].clone(), product.clone(), r)?;
    let delta = GroupHom::new(product, overlaps, delta)?;
    let ambiguity = hom_parts(&r).kernel.group().clone();
    let obstruction = cohomology_at(&r, &delta)?.group().clone();
    Ok(AxiomReport {
        uniqueness: ambiguity.is_trivial(),
        gluing: obstruction.is_trivial(),
        ambiguity,
        obstruction,
    })
}

/// The cover `{U_p : p ∈ U}` by minimal open sets.
pub fn minimal_open_cover(space: &FiniteSpace, u: &OpenSet) -> Vec<OpenSet> {
    u.members().iter().map(|&p| space.minimal_open(p)).collect()
}

/// Evaluates an element of `P(U)` at the stalk of `p`.
pub fn germ(table: &PresheafTable, u: &OpenSet, p: usize, s: &[BigInt]) -> Result<Vec<BigInt>> {
    Ok(table.restriction(u, &table.space.minimal_open(p))?.apply(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::Invariants;
    use crate::finspace::build_space;

    fn discrete2() -> FiniteSpace {
        let none: Vec<(&str, &str)> = Vec::new();
        build_space(&["x", "y"], &none).unwrap()
    }

    #[test]
    fn constant_functions_fail_to_glue() {
        let x = discrete2();
        let z = FpGroup::free(1);
        let p = PresheafTable::constant_functions(&x, &z, 16).unwrap();
        assert_eq!(stalk_of_table(&p, "x").unwrap().invariants(), &Invariants::free(1));
        let whole = x.whole();
        let cover = vec![x.open_set([0]).unwrap(), x.open_set([1]).unwrap()];
        let rep = check_sheaf_axioms(&p, &whole, &cover).unwrap();
        assert!(rep.uniqueness);
        assert!(!rep.gluing);
        assert_eq!(rep.obstruction.invariants(), &Invariants::free(1));
        let sh = sheafify(&p).unwrap();
        assert_eq!(sh.sections.last().unwrap().group().invariants(), &Invariants::free(2));
        assert!(!unit_is_isomorphism(&sh));
    }

    #[test]
    fn global_only_vanishes_on_stalks() {
        let x = discrete2();
        let p = PresheafTable::global_only(&x, &FpGroup::free(1), 16).unwrap();
        assert!(stalk_of_table(&p, "x").unwrap().is_trivial());
        let sh = sheafify(&p).unwrap();
        assert!(sh.sheaf.is_zero());
    }

    #[test]
    fn not_a_cover() {
        let x = discrete2();
        let p = PresheafTable::zero(&x, 16).unwrap();
        let err = check_sheaf_axioms(&p, &x.whole(), &[x.open_set([0]).unwrap()]);
        assert!(matches!(err, Err(Error::NotACover(_))));
    }
}
