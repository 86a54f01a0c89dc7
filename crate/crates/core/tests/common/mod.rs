#![allow(dead_code)]

use num_bigint::BigInt;
use sheaf_core::exactalg::{FpGroup, Invariants};

pub fn invariants_of(groups: &[FpGroup]) -> Vec<Invariants> {
    groups.iter().map(|g| g.invariants().clone()).collect()
}

/// `Z^r ⊕ Z/t1 ⊕ ...` from a rank and torsion list.
pub fn inv(rank: usize, torsion: &[i64]) -> Invariants {
    let mut moduli: Vec<BigInt> = torsion.iter().map(|&t| BigInt::from(t)).collect();
    moduli.extend(std::iter::repeat(BigInt::from(0)).take(rank));
    Invariants::from_moduli(moduli.iter())
}

