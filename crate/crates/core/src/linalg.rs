//! Exact rational and integer linear algebra at desk scale (dimensions <= ~20).
//!
//! Provides the integer-kernel computation behind the rational-independence
//! tests, Hermite-form lattice bases, and small rational solves used by the
//! structure-constant pipeline.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::Exact;

pub type RatMatrix = Vec<Vec<BigRational>>;

/// Reduced row echelon form, in place; returns pivot column indices.
pub fn rref(m: &mut RatMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
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
                for j in 0..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    m.retain(|row| row.iter().any(|x| !x.is_zero()));
    pivots
}

/// Basis of the lattice `{ v in Z^c : A v = 0 }` for an integer matrix.
///
/// Column-style Hermite reduction on `A` while mirroring the column
/// operations on an identity matrix; the transform columns under the zero
/// columns of the reduced `A` form a basis of the kernel lattice.
pub fn integer_kernel(a: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let rows = a.len();
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    for row in &m {
        debug_assert_eq!(row.len(), cols);
    }
    let mut u: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    // u is stored as columns: u[j] is the j-th column of the transform.
    let mut lead = 0usize;
    for r in 0..rows {
        if lead >= cols {
            break;
        }
        // euclidean elimination across columns lead..cols on row r
        loop {
            let mut best: Option<usize> = None;
            for j in lead..cols {
                if !m[r][j].is_zero() {
                    best = match best {
                        None => Some(j),
                        Some(b) => {
                            if m[r][j].magnitude() < m[r][b].magnitude() {
                                Some(j)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            let Some(p) = best else { break };
            // move pivot column to `lead`
            if p != lead {
                for row in m.iter_mut() {
                    row.swap(p, lead);
                }
                u.swap(p, lead);
            }
            let mut done = true;
            let pivot = m[r][lead].clone();
            for j in (lead + 1)..cols {
                if m[r][j].is_zero() {
                    continue;
                }
                let q = m[r][j].div_floor(&pivot);
                if !q.is_zero() {
                    for row in m.iter_mut() {
                        let t = &row[lead] * &q;
                        row[j] -= t;
                    }
                    for i in 0..cols {
                        let t = &u[lead][i] * &q;
                        u[j][i] -= t;
                    }
                }
                if !m[r][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !m[r][lead].is_zero() {
            lead += 1;
        }
    }
    // columns lead..cols of m are zero on all rows processed; verify and emit
    let mut basis = Vec::new();
    for j in lead..cols {
        if m.iter().all(|row| row[j].is_zero()) {
            basis.push(u[j].clone());
        }
    }
    basis
}

/// Kernel lattice of a rational matrix: scale each row to integers first.
pub fn rational_integer_kernel(a: &RatMatrix, cols: usize) -> Vec<Vec<BigInt>> {
    let scaled: Vec<Vec<BigInt>> = a
        .iter()
        .map(|row| {
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter()
                .map(|x| (x * BigRational::from(lcm.clone())).to_integer())
                .collect()
        })
        .collect();
    integer_kernel(&scaled, cols)
}

/// Integer vectors `m` with `M m = 0`, where `M` has [`Exact`] entries.
///
/// Each entry is expanded over the radical basis: one rational constraint
/// row per matrix row and per squarefree `d` in the row's support
/// (including the rational part `d = 1`).
pub fn rational_kernel(m: &[Vec<Exact>]) -> Vec<Vec<BigInt>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut constraints: RatMatrix = Vec::new();
    for row in m {
        assert_eq!(row.len(), cols, "ragged matrix");
        let mut support: Vec<u64> = vec![1];
        for entry in row {
            for d in entry.radical_support() {
                if !support.contains(&d) {
                    support.push(d);
                }
            }
        }
        for d in support {
            let crow: Vec<BigRational> = row.iter().map(|e| e.coefficient(d)).collect();
            if crow.iter().any(|x| !x.is_zero()) {
                constraints.push(crow);
            }
        }
    }
    if constraints.is_empty() {
        // no constraints: kernel is all of Z^cols
        return (0..cols)
            .map(|i| {
                (0..cols)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
    }
    rational_integer_kernel(&constraints, cols)
}

/// Row-style Hermite form of the lattice spanned by the given integer rows;
/// returns the nonzero rows (a basis of the lattice).
pub fn hermite_basis(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let mut pivot_row = 0usize;
    for c in 0..cols {
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..m.len() {
                if !m[i][c].is_zero() {
                    best = match best {
                        None => Some(i),
                        Some(b) => {
                            if m[i][c].magnitude() < m[b][c].magnitude() {
                                Some(i)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            let Some(p) = best else { break };
            m.swap(pivot_row, p);
            let mut done = true;
            let pivot = m[pivot_row][c].clone();
            for i in (pivot_row + 1)..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&pivot);
                if !q.is_zero() {
                    for j in 0..cols {
                        let t = &m[pivot_row][j] * &q;
                        m[i][j] -= t;
                    }
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < m.len() && !m[pivot_row][c].is_zero() {
            if m[pivot_row][c].is_negative() {
                for x in m[pivot_row].iter_mut() {
                    *x = -x.clone();
                }
            }
            // reduce entries above the pivot into canonical range
            let pivot = m[pivot_row][c].clone();
            for i in 0..pivot_row {
                let q = m[i][c].div_floor(&pivot);
                if !q.is_zero() {
                    for j in 0..cols {
                        let t = &m[pivot_row][j] * &q;
                        m[i][j] -= t;
                    }
                }
            }
            pivot_row += 1;
        }
    }
    m.truncate(pivot_row);
    m
}

/// Inverse of a square rational matrix by Gauss-Jordan.
pub fn invert(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let mut aug: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "not square");
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !aug[i][c].is_zero())?;
        aug.swap(c, p);
        let inv = aug[c][c].recip();
        for x in aug[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != c && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in 0..2 * n {
                    let t = &aug[c][j] * &f;
                    aug[i][j] -= t;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_vec(m: &RatMatrix, v: &[BigRational]) -> Vec<BigRational> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .fold(BigRational::zero(), |acc, x| acc + x)
        })
        .collect()
}

/// Apply a rational matrix to a vector of [`Exact`] scalars.
pub fn mat_vec_exact(m: &RatMatrix, v: &[Exact]) -> Vec<Exact> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .map(|(a, b)| b.scale(a))
                .fold(Exact::default(), |acc, x| acc + x)
        })
        .collect()
}
