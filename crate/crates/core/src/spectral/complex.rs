//! Cochain complexes of groups and of sheaves.

use crate::error::{Error, Result};
use crate::exactalg::{cohomology_at, FpGroup, GroupHom, SubQuotient};
use crate::sheaves::{subquotient_sheaf, Sheaf, SheafHom};

/// `C^0 → C^1 → ... → C^m` with `d_k ∘ d_{k-1} = 0`.
#[derive(Clone, Debug)]
pub struct GroupComplex {
    terms: Vec<FpGroup>,
    differentials: Vec<GroupHom>,
}

impl GroupComplex {
    /// `differentials[k] : terms[k] → terms[k+1]`.
    pub fn new(terms: Vec<FpGroup>, differentials: Vec<GroupHom>) -> Result<GroupComplex> {
        if differentials.len() + 1 != terms.len().max(1) {
            return Err(Error::ChainMismatch(format!(
                "{} differentials for {} terms",
                differentials.len(),
                terms.len()
            )));
        }
        for (k, d) in differentials.iter().enumerate() {
            if d.source() != &terms[k] || d.target() != &terms[k + 1] {
                return Err(Error::ChainMismatch(format!("differential {k} does not connect terms {k} and {}", k + 1)));
            }
        }
        for (k, w) in differentials.windows(2).enumerate() {
            if !w[1].compose_unchecked(&w[0]).is_zero() {
                return Err(Error::NotAComplex(format!("d_{} ∘ d_{k} ≠ 0", k + 1)));
            }
        }
        Ok(GroupComplex { terms, differentials })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, k: usize) -> &FpGroup {
        &self.terms[k]
    }

    pub fn terms(&self) -> &[FpGroup] {
        &self.terms
    }

    pub fn differential(&self, k: usize) -> &GroupHom {
        &self.differentials[k]
    }

    pub fn differentials(&self) -> &[GroupHom] {
        &self.differentials
    }

    /// `d_k`, with zero maps off the ends.
    fn incoming(&self, k: usize) -> GroupHom {
        if k == 0 {
            GroupHom::zero(FpGroup::trivial(), self.terms[0].clone())
        } else {
            self.differentials[k - 1].clone()
        }
    }

    fn outgoing(&self, k: usize) -> GroupHom {
        self.differentials
            .get(k)
            .cloned()
            .unwrap_or_else(|| GroupHom::zero(self.terms[k].clone(), FpGroup::trivial()))
    }

    /// `ker d_k / im d_{k-1}` as a subquotient of `C^k`.
    pub fn cohomology_subquotient(&self, k: usize) -> SubQuotient {
        cohomology_at(&self.incoming(k), &self.outgoing(k)).expect("validated complex")
    }

    /// `h^k`, zero outside the stored range.
    pub fn cohomology(&self, k: usize) -> FpGroup {
        if k >= self.terms.len() {
            return FpGroup::trivial();
        }
        self.cohomology_subquotient(k).group().clone()
    }
}

/// `L^0 → L^1 → ... → L^m`, composites zero on every stalk.
#[derive(Clone, Debug)]
pub struct SheafComplex {
    terms: Vec<Sheaf>,
    differentials: Vec<SheafHom>,
}

impl SheafComplex {
    pub fn new(terms: Vec<Sheaf>, differentials: Vec<SheafHom>) -> Result<SheafComplex> {
        if terms.is_empty() || differentials.len() + 1 != terms.len() {
            return Err(Error::ChainMismatch(format!(
                "{} differentials for {} terms",
                differentials.len(),
                terms.len()
            )));
        }
        let x = terms[0].space();
        if terms.iter().any(|t| t.space() != x) {
            return Err(Error::ChainMismatch("terms live on different spaces".into()));
        }
        for (k, d) in differentials.iter().enumerate() {
            if !d.source().same_sheaf(&terms[k]) || !d.target().same_sheaf(&terms[k + 1]) {
                return Err(Error::ChainMismatch(format!("differential {k} does not connect terms {k} and {}", k + 1)));
            }
        }
        for (k, w) in differentials.windows(2).enumerate() {
            if !w[1].compose(&w[0])?.is_zero() {
                return Err(Error::NotAComplex(format!("d_{} ∘ d_{k} ≠ 0", k + 1)));
            }
        }
        Ok(SheafComplex { terms, differentials })
    }

    /// `0 → F → 0`, concentrated in degree 0.
    pub fn single(f: &Sheaf) -> SheafComplex {
        SheafComplex { terms: vec![f.clone()], differentials: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, k: usize) -> &Sheaf {
        &self.terms[k]
    }

    pub fn terms(&self) -> &[Sheaf] {
        &self.terms
    }

    pub fn differential(&self, k: usize) -> &SheafHom {
        &self.differentials[k]
    }

    pub fn differentials(&self) -> &[SheafHom] {
        &self.differentials
    }
}

/// The cohomology sheaves `H^k(L)`, computed stalkwise with induced
/// restrictions.
pub fn cohomology_sheaves(l: &SheafComplex) -> Result<Vec<Sheaf>> {
    let x = l.terms[0].space();
    (0..l.len())
        .map(|k| {
            let term = &l.terms[k];
            let sqs = x
                .points()
                .map(|p| {
                    let incoming = if k == 0 {
                        GroupHom::zero(FpGroup::trivial(), term.stalk(p).clone())
                    } else {
                        l.differentials[k - 1].stalk_map(p).clone()
                    };
                    let outgoing = match l.differentials.get(k) {
                        Some(d) => d.stalk_map(p).clone(),
                        None => GroupHom::zero(term.stalk(p).clone(), FpGroup::trivial()),
                    };
                    cohomology_at(&incoming, &outgoing)
                })
                .collect::<Result<Vec<_>>>()?;
            subquotient_sheaf(term, &sqs)
        })
        .collect()
}
