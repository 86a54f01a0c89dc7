//! Smith normal form with unimodular transforms.
//!
//! Pivoting picks the nonzero entry of least absolute value in the remaining
//! block, ties broken by lowest `(row, col)`. The output is deterministic for
//! a fixed input.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;

/// Result of [`smith_normal_form`]: `u * m * v == s`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

impl Snf {
    /// Diagonal of `s`, of length `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s[(i, i)].clone()).collect()
    }
}

/// Computes `(U, S, V)` with `U·M·V = S`, `U` and `V` unimodular and `S`
/// diagonal with nonnegative entries `s_1 | s_2 | ...`.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let mut calc = SnfCalc::new(m);
    calc.run();
    calc.finish()
}

/// Diagonal entries only; skips transform bookkeeping.
pub fn smith_diagonal(m: &IntMatrix) -> Vec<BigInt> {
    let mut calc = SnfCalc::new(m);
    calc.track = false;
    calc.run();
    let n = calc.rows.min(calc.cols);
    (0..n).map(|i| calc.a[i][i].clone()).collect()
}

struct SnfCalc {
    rows: usize,
    cols: usize,
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    u_inv: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    track: bool,
    rank: usize,
}

fn identity_rows(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect()
}

/// Nearest-integer quotient `round(a / p)` for `p > 0`.
fn round_quotient(a: &BigInt, p: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (a * &two + p).div_floor(&(p * &two))
}

impl SnfCalc {
    fn new(m: &IntMatrix) -> Self {
        let (rows, cols) = m.shape();
        SnfCalc {
            rows,
            cols,
            a: m.to_rows(),
            u: identity_rows(rows),
            u_inv: identity_rows(rows),
            v: identity_rows(cols),
            track: true,
            rank: 0,
        }
    }

    fn finish(self) -> Snf {
        let to_matrix = |rows: Vec<Vec<BigInt>>, n: usize| {
            IntMatrix::from_rows(&rows, n).expect("square transform")
        };
        Snf {
            s: to_matrix(self.a, self.cols),
            u: to_matrix(self.u, self.rows),
            u_inv: to_matrix(self.u_inv, self.rows),
            v: to_matrix(self.v, self.cols),
            rank: self.rank,
        }
    }

    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.a[bi][bj].magnitude() <= x.magnitude() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        self.a.swap(i, k);
        if self.track {
            self.u.swap(i, k);
            for row in &mut self.u_inv {
                row.swap(i, k);
            }
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        if j == k {
            return;
        }
        for row in &mut self.a {
            row.swap(j, k);
        }
        if self.track {
            for row in &mut self.v {
                row.swap(j, k);
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -&*x;
        }
        if self.track {
            for x in &mut self.u[i] {
                *x = -&*x;
            }
            for row in &mut self.u_inv {
                row[i] = -&row[i];
            }
        }
    }

    /// row_i -= q * row_t
    fn row_sub(&mut self, i: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let (src, dst) = two_rows(&mut self.a, t, i);
        axpy(dst, src, q);
        if self.track {
            let (src, dst) = two_rows(&mut self.u, t, i);
            axpy(dst, src, q);
            // inverse: column t += q * column i
            for row in &mut self.u_inv {
                let add = &row[i] * q;
                row[t] += add;
            }
        }
    }

    /// col_j -= q * col_t
    fn col_sub(&mut self, j: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for row in &mut self.a {
            let sub = &row[t] * q;
            row[j] -= sub;
        }
        if self.track {
            for row in &mut self.v {
                let sub = &row[t] * q;
                row[j] -= sub;
            }
        }
    }

    fn run(&mut self) {
        let n = self.rows.min(self.cols);
        let mut t = 0;
        while t < n {
            let Some((i, j)) = self.pivot(t) else { break };
            self.swap_rows(t, i);
            self.swap_cols(t, j);
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
            let p = self.a[t][t].clone();
            let mut clean = true;
            for i in t + 1..self.rows {
                if self.a[i][t].is_zero() {
                    continue;
                }
                let q = round_quotient(&self.a[i][t], &p);
                self.row_sub(i, t, &q);
                clean &= self.a[i][t].is_zero();
            }
            for j in t + 1..self.cols {
                if self.a[t][j].is_zero() {
                    continue;
                }
                let q = round_quotient(&self.a[t][j], &p);
                self.col_sub(j, t, &q);
                clean &= self.a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // enforce p | every remaining entry
            let offender = (t + 1..self.rows)
                .find(|&i| (t + 1..self.cols).any(|j| !self.a[i][j].is_multiple_of(&p)));
            if let Some(i) = offender {
                // row_t += row_i
                self.row_sub(t, i, &BigInt::from(-1));
                continue;
            }
            t += 1;
        }
        self.rank = t;
    }
}

fn two_rows<T>(v: &mut [Vec<T>], src: usize, dst: usize) -> (&Vec<T>, &mut Vec<T>) {
    assert_ne!(src, dst);
    if src < dst {
        let (lo, hi) = v.split_at_mut(dst);
        (&lo[src], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(src);
        (&hi[0], &mut lo[dst])
    }
}

fn axpy(dst: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= s * q;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::matrix::int;
    use proptest::prelude::*;

    fn check(m: &IntMatrix) -> Snf {
        let snf = smith_normal_form(m);
        assert_eq!(&(&snf.u * m) * &snf.v, snf.s, "U M V = S");
        assert_eq!(&snf.u * &snf.u_inv, IntMatrix::identity(m.rows()));
        assert!(snf.u.determinant().unwrap().magnitude() == &1u32.into());
        assert!(snf.v.determinant().unwrap().magnitude() == &1u32.into());
        let d = snf.diagonal();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if i != j {
                    assert!(snf.s[(i, j)].is_zero());
                }
            }
        }
        for w in d.windows(2) {
            assert!(!w[0].is_negative());
            if !w[0].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]), "divisibility {:?}", d);
            } else {
                assert!(w[1].is_zero());
            }
        }
        snf
    }

    #[test]
    fn two_by_two_example() {
        // gcd of entries is 2, the 2x2 minor is |16 - 24| = 8
        let m = IntMatrix::from_i64_rows(&[vec![2, 4], vec![6, 8]], 2).unwrap();
        let snf = check(&m);
        assert_eq!(snf.diagonal(), vec![int(2), int(4)]);
    }

    #[test]
    fn identity_and_zero() {
        let id = IntMatrix::identity(3);
        let snf = check(&id);
        assert_eq!(snf.s, id);
        assert!(snf.u.is_identity() && snf.v.is_identity());

        let z = IntMatrix::zeros(2, 3);
        let snf = check(&z);
        assert!(snf.s.is_zero());
        assert_eq!(snf.rank, 0);
    }

    #[test]
    fn coprime_diagonal_merges() {
        let m = IntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 3]], 2).unwrap();
        assert_eq!(check(&m).diagonal(), vec![int(1), int(6)]);
        assert_eq!(smith_diagonal(&m), vec![int(1), int(6)]);
    }

    #[test]
    fn deterministic() {
        let m = IntMatrix::from_i64_rows(&[vec![4, -6, 10], vec![3, 9, -12], vec![7, 1, 5]], 3)
            .unwrap();
        let a = smith_normal_form(&m);
        let b = smith_normal_form(&m);
        assert_eq!((a.u, a.s, a.v), (b.u, b.s, b.v));
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (0usize..=6, 0usize..=6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-20i64..=20, r * c).prop_map(move |data| {
                IntMatrix::from_vec(r, c, data.into_iter().map(BigInt::from).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn snf_identities(m in small_matrix()) {
            check(&m);
        }

        #[test]
        fn diagonal_matches_full(m in small_matrix()) {
            prop_assert_eq!(smith_diagonal(&m), smith_normal_form(&m).diagonal());
        }
    }
}
