//! Sublattices of `Z^n` in column echelon form, integer kernels and exact
//! solving.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::{IntMatrix, IntVector};

/// A sublattice of `Z^n` given by a basis in column echelon form.
///
/// Basis column `j` has its first nonzero entry (positive) at row
/// `pivots[j]`, and pivot rows are strictly increasing.
#[derive(Clone, Debug)]
pub struct Lattice {
    dim: usize,
    basis: Vec<IntVector>,
    pivots: Vec<usize>,
}

/// Column echelon form `E = M·V` with `V` unimodular.
pub struct ColumnEchelon {
    pub lattice: Lattice,
    /// Columns spanning the integer kernel of `M`.
    pub kernel: Vec<IntVector>,
}

fn round_quotient(a: &BigInt, p: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (a * &two + p).div_floor(&(p * &two))
}

fn col_axpy(dst: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= s * q;
        }
    }
}

fn echelon(dim: usize, gens: Vec<IntVector>, want_kernel: bool) -> ColumnEchelon {
    let k = gens.len();
    let mut cols = gens;
    let mut trans: Vec<IntVector> = if want_kernel {
        (0..k).map(|j| (0..k).map(|i| BigInt::from((i == j) as i64)).collect()).collect()
    } else {
        Vec::new()
    };
    let mut pivots = Vec::new();
    let mut c = 0;
    for row in 0..dim {
        if c == k {
            break;
        }
        loop {
            // smallest nonzero entry among the remaining columns
            let mut best: Option<usize> = None;
            for j in c..k {
                let x = &cols[j][row];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some(b) if cols[b][row].magnitude() <= x.magnitude() => {}
                    _ => best = Some(j),
                }
            }
            let Some(b) = best else { break };
            cols.swap(c, b);
            if want_kernel {
                trans.swap(c, b);
            }
            let mut done = true;
            for j in c + 1..k {
                if cols[j][row].is_zero() {
                    continue;
                }
                let q = round_quotient(&cols[j][row], &cols[c][row]);
                let (lo, hi) = cols.split_at_mut(j);
                col_axpy(&mut hi[0], &lo[c], &q);
                if want_kernel {
                    let (lo, hi) = trans.split_at_mut(j);
                    col_axpy(&mut hi[0], &lo[c], &q);
                }
                done &= cols[j][row].is_zero();
            }
            if done {
                if cols[c][row].is_negative() {
                    for x in &mut cols[c] {
                        *x = -&*x;
                    }
                    if want_kernel {
                        for x in &mut trans[c] {
                            *x = -&*x;
                        }
                    }
                }
                // reduce earlier basis columns at this pivot row
                for j in 0..c {
                    if cols[j][row].is_zero() {
                        continue;
                    }
                    let q = cols[j][row].div_floor(&cols[c][row]);
                    if q.is_zero() {
                        continue;
                    }
                    let (lo, hi) = cols.split_at_mut(c);
                    col_axpy(&mut lo[j], &hi[0], &q);
                    if want_kernel {
                        let (lo, hi) = trans.split_at_mut(c);
                        col_axpy(&mut lo[j], &hi[0], &q);
                    }
                }
                pivots.push(row);
                c += 1;
                break;
            }
        }
    }
    let kernel = if want_kernel { trans.split_off(c) } else { Vec::new() };
    cols.truncate(c);
    ColumnEchelon { lattice: Lattice { dim, basis: cols, pivots }, kernel }
}

impl Lattice {
    /// The lattice spanned by `gens`, each a vector of length `dim`.
    pub fn span(dim: usize, gens: impl IntoIterator<Item = IntVector>) -> Lattice {
        let gens: Vec<IntVector> = gens.into_iter().filter(|g| g.iter().any(|x| !x.is_zero())).collect();
        debug_assert!(gens.iter().all(|g| g.len() == dim));
        echelon(dim, gens, false).lattice
    }

    pub fn zero(dim: usize) -> Lattice {
        Lattice { dim, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(dim: usize) -> Lattice {
        Lattice::span(dim, (0..dim).map(|i| unit(dim, i)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[IntVector] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(self.dim, &self.basis)
    }

    /// Coordinates of `x` in the echelon basis, or `None` if `x` is not in
    /// the lattice.
    pub fn coordinates(&self, x: &[BigInt]) -> Option<IntVector> {
        assert_eq!(x.len(), self.dim, "vector length mismatch");
        let mut rest = x.to_vec();
        let mut coords = Vec::with_capacity(self.basis.len());
        let mut next_row = 0;
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if rest[next_row..p].iter().any(|v| !v.is_zero()) {
                return None;
            }
            let (q, r) = rest[p].div_rem(&b[p]);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                col_axpy(&mut rest, b, &q);
            }
            coords.push(q);
            next_row = p + 1;
        }
        if rest.iter().any(|v| !v.is_zero()) {
            return None;
        }
        Some(coords)
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.coordinates(x).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        Lattice::span(self.dim, self.basis.iter().chain(&other.basis).cloned())
    }

    pub fn intersection(&self, other: &Lattice) -> Lattice {
        let dim = self.dim;
        if self.basis.is_empty() || other.basis.is_empty() {
            return Lattice::zero(dim);
        }
        // a·A = b·B  <=>  [A | -B](a, b) = 0
        let mut gens = self.basis.clone();
        gens.extend(other.basis.iter().map(|b| b.iter().map(|x| -x).collect()));
        let kernel = echelon(dim, gens, true).kernel;
        let r = self.basis.len();
        Lattice::span(
            dim,
            kernel.iter().map(|k| combine(dim, &self.basis, &k[..r])),
        )
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.contains_lattice(other) && other.contains_lattice(self)
    }
}

/// `Σ coeffs[j] * vecs[j]`.
pub fn combine(dim: usize, vecs: &[IntVector], coeffs: &[BigInt]) -> IntVector {
    let mut out = vec![BigInt::zero(); dim];
    for (v, c) in vecs.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            if !x.is_zero() {
                *o += x * c;
            }
        }
    }
    out
}

pub fn unit(dim: usize, i: usize) -> IntVector {
    let mut v = vec![BigInt::zero(); dim];
    v[i] = BigInt::from(1);
    v
}

/// Echelon form of the columns of `m` together with a kernel basis.
pub fn column_echelon(m: &IntMatrix) -> ColumnEchelon {
    echelon(m.rows(), m.columns(), true)
}

/// Basis of `{x in Z^cols : m·x = 0}`.
pub fn integer_kernel(m: &IntMatrix) -> Vec<IntVector> {
    column_echelon(m).kernel
}
