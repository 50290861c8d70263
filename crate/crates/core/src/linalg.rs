//! Dense linear algebra over ℚ: reduced row echelon form, rank, nullspace,
//! inverse. Used for body matrices and for the commutant computations.

use num_traits::{One, Zero};

use crate::grassmann::Rational;

pub type QMatrix = Vec<Vec<Rational>>;

pub fn zeros(rows: usize, cols: usize) -> QMatrix {
    vec![vec![Rational::zero(); cols]; rows]
}

pub fn identity(n: usize) -> QMatrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

pub fn mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    let mut out = zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for (k, aik) in row.iter().enumerate().take(inner) {
            if aik.is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[k][j].is_zero() {
                    out[i][j] += aik * &b[k][j];
                }
            }
        }
    }
    out
}

/// In-place reduction to reduced row echelon form; returns pivot columns.
pub fn rref(m: &mut QMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, y) in m[i][c..cols].iter_mut().zip(&pivot_row[c..cols]) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMatrix) -> usize {
    let mut w = m.clone();
    rref(&mut w).len()
}

/// Basis of the right nullspace `{x : m x = 0}`.
pub fn nullspace(m: &QMatrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut w = m.clone();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -w[r][f].clone();
            }
            v
        })
        .collect()
}

pub fn inverse(m: &QMatrix) -> Option<QMatrix> {
    let n = m.len();
    let mut aug: QMatrix = m
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}
