//! Random test inputs: unimodular matrices and first-quadrant double
//! complexes with prescribed size limits.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::Rng;

use crate::exactalg::{invert_unimodular, FpGroup, GroupHom, IntMatrix};
use crate::spectral::DoubleComplex;

/// A random unimodular `n × n` matrix built from elementary operations.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, n: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            m[(0, 0)] = BigInt::from(-1);
        }
        return m;
    }
    for _ in 0..rng.gen_range(0..=2 * n) {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let k = BigInt::from(rng.gen_range(-2i64..=2));
        for c in 0..n {
            let v = &m[(j, c)] * &k;
            m[(i, c)] += v;
        }
    }
    m
}

/// Building block of a random double complex: cells carrying one generator
/// each and scalar maps between them.
struct Piece {
    cells: Vec<((usize, usize), i64)>,
    /// `(from, to, scalar)` indices into `cells`.
    arrows: Vec<(usize, usize, i64)>,
}

fn scalar<R: Rng + ?Sized>(rng: &mut R) -> i64 {
    [1, 1, 2, 3, -1, -2][rng.gen_range(0..6)]
}

fn random_piece<R: Rng + ?Sized>(rng: &mut R, pmax: usize, qmax: usize) -> Piece {
    let p = rng.gen_range(0..=pmax);
    let q = rng.gen_range(0..=qmax);
    let kind = rng.gen_range(0..5);
    match kind {
        1 if p < pmax => Piece { cells: vec![((p, q), 0), ((p + 1, q), 0)], arrows: vec![(0, 1, scalar(rng))] },
        2 if q < qmax => Piece { cells: vec![((p, q), 0), ((p, q + 1), 0)], arrows: vec![(0, 1, scalar(rng))] },
        3 if p < pmax && q < qmax => {
            let (a, c, t) = (scalar(rng), scalar(rng), scalar(rng));
            // δ = a, d = c out of the corner; d = c t, δ = a t into the far corner
            Piece {
                cells: vec![((p, q), 0), ((p + 1, q), 0), ((p, q + 1), 0), ((p + 1, q + 1), 0)],
                arrows: vec![(0, 1, a), (0, 2, c), (1, 3, c * t), (2, 3, a * t)],
            }
        }
        4 if p < pmax && q >= 1 => {
            // sources s_i = (p+i, q-i) map right to t_i = s_i + (1,0); s_{i+1}
            // maps up into t_i as well
            let len = rng.gen_range(2..=3).min(pmax - p).min(q + 1);
            let mut cells = Vec::new();
            let mut arrows = Vec::new();
            for i in 0..len {
                cells.push(((p + i, q - i), 0));
                cells.push(((p + i + 1, q - i), 0));
                arrows.push((2 * i, 2 * i + 1, scalar(rng)));
                if i > 0 {
                    arrows.push((2 * i, 2 * i - 1, scalar(rng)));
                }
            }
            Piece { cells, arrows }
        }
        _ => {
            let t = [0, 0, 0, 2, 3][rng.gen_range(0..5)];
            Piece { cells: vec![((p, q), t)], arrows: Vec::new() }
        }
    }
}

/// A random first-quadrant double complex with bounds at most `4 × 4` and
/// at most three generators per cell: a sum of elementary pieces followed by
/// a random change of basis in every cell.
pub fn random_double_complex<R: Rng + ?Sized>(rng: &mut R) -> DoubleComplex {
    let pmax = rng.gen_range(0..=3);
    let qmax = rng.gen_range(0..=3);
    let mut width = vec![vec![0usize; qmax + 1]; pmax + 1];
    // per cell: torsion of each generator
    let mut gens: Vec<Vec<Vec<i64>>> = vec![vec![Vec::new(); qmax + 1]; pmax + 1];
    // (p,q,i) -> (p',q',j) scalar
    let mut arrows: Vec<((usize, usize, usize), (usize, usize, usize), i64)> = Vec::new();
    for _ in 0..rng.gen_range(1..=12) {
        let piece = random_piece(rng, pmax, qmax);
        let mut need = width.clone();
        for &((p, q), _) in &piece.cells {
            need[p][q] += 1;
        }
        if need.iter().flatten().any(|&w| w > 3) {
            continue;
        }
        let index: Vec<(usize, usize, usize)> = piece
            .cells
            .iter()
            .map(|&((p, q), t)| {
                gens[p][q].push(t);
                width[p][q] += 1;
                (p, q, width[p][q] - 1)
            })
            .collect();
        for &(a, b, k) in &piece.arrows {
            arrows.push((index[a], index[b], k));
        }
    }
    let change: Vec<Vec<IntMatrix>> =
        (0..=pmax).map(|p| (0..=qmax).map(|q| random_unimodular(rng, width[p][q])).collect()).collect();
    let mut cells = Vec::new();
    for p in 0..=pmax {
        let mut col = Vec::new();
        for q in 0..=qmax {
            let n = width[p][q];
            let tors: Vec<usize> = (0..n).filter(|&i| gens[p][q][i] != 0).collect();
            let mut rel = IntMatrix::zeros(tors.len(), n);
            for (r, &i) in tors.iter().enumerate() {
                rel[(r, i)] = BigInt::from(gens[p][q][i]);
            }
            // new coordinates y = U x carry relation rows r to U r
            let rel = &rel * &change[p][q].transpose();
            col.push(FpGroup::new(n, rel).unwrap());
        }
        cells.push(col);
    }
    let mut raw: BTreeMap<((usize, usize), (usize, usize)), IntMatrix> = BTreeMap::new();
    for &((p, q, i), (p2, q2, j), k) in &arrows {
        let m = raw
            .entry(((p, q), (p2, q2)))
            .or_insert_with(|| IntMatrix::zeros(width[p2][q2], width[p][q]));
        m[(j, i)] += BigInt::from(k);
    }
    let mut vert = BTreeMap::new();
    let mut horiz = BTreeMap::new();
    for (((p, q), (p2, q2)), m) in raw {
        let m = &(&change[p2][q2] * &m) * &invert_unimodular(&change[p][q]);
        let hom = GroupHom::new(cells[p][q].clone(), cells[p2][q2].clone(), m).unwrap();
        if p2 == p {
            vert.insert((p, q), hom);
        } else {
            horiz.insert((p, q), hom);
        }
    }
    DoubleComplex::new(cells, vert, horiz).unwrap()
}
