//! Exact linear algebra over the rationals by fraction-free (Bareiss)
//! elimination.
//!
//! Rows are scaled to integers up front; elimination then keeps every entry
//! an integer by dividing each update by the previous pivot, which is exact.
//! Pivots are the first nonzero entry at or below the current row, so results
//! are deterministic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::series::{common_denominator, ExactRational};

/// Row echelon form with integer entries.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<Vec<BigInt>>,
    /// Pivot column of each of the first `rank` rows.
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Solves for the pivot variables given values of the free ones.
    /// `rhs_col` names an augmented column, if any.
    fn back_substitute(&self, free_values: &[(usize, BigRational)], rhs_col: Option<usize>) -> Vec<BigRational> {
        let n = rhs_col.unwrap_or(self.cols);
        let mut x = vec![BigRational::zero(); n];
        for (c, v) in free_values {
            x[*c] = v.clone();
        }
        for (r, &p) in self.pivots.iter().enumerate().rev() {
            let row = &self.rows[r];
            let mut acc = match rhs_col {
                Some(c) => BigRational::from_integer(row[c].clone()),
                None => BigRational::zero(),
            };
            for (j, xj) in x.iter().enumerate().take(n).skip(p + 1) {
                if !row[j].is_zero() && !xj.is_zero() {
                    acc -= xj * &row[j];
                }
            }
            x[p] = acc / &row[p];
        }
        x
    }
}

/// Scales a rational row by the lcm of its denominators.
pub fn integer_row(row: &[ExactRational]) -> Vec<BigInt> {
    let d = common_denominator(row);
    row.iter().map(|x| x.numer() * (&d / x.denom())).collect()
}

/// Fraction-free elimination to row echelon form.
pub fn echelon(mut m: Vec<Vec<BigInt>>) -> Echelon {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (top, bottom) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = &pivot_row[c];
        for row in bottom.iter_mut() {
            let factor = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let mut v = pivot * &row[j];
                if !factor.is_zero() && !pivot_row[j].is_zero() {
                    v -= &factor * &pivot_row[j];
                }
                row[j] = v / &prev;
            }
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    Echelon { rows: m, pivots, cols }
}

pub fn echelon_rational(a: &[Vec<ExactRational>]) -> Echelon {
    echelon(a.iter().map(|r| integer_row(r)).collect())
}

pub fn rank(a: &[Vec<ExactRational>]) -> usize {
    echelon_rational(a).rank()
}

/// One solution of `A x = b` (free variables set to zero), or `None` when
/// the system is inconsistent.
pub fn solve(a: &[Vec<ExactRational>], b: &[ExactRational]) -> Option<Vec<ExactRational>> {
    assert_eq!(a.len(), b.len(), "row count mismatch");
    let cols = a.first().map_or(0, Vec::len);
    let aug: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut full = row.clone();
            full.push(bi.clone());
            integer_row(&full)
        })
        .collect();
    let e = echelon(aug);
    if e.pivots.last() == Some(&cols) {
        return None;
    }
    let mut e = e;
    e.cols = cols;
    Some(e.back_substitute(&[], Some(cols)))
}

/// Smallest row index `k` such that rows `0..=k` are already inconsistent,
/// or `None` if the whole system is consistent.
pub fn first_inconsistent_row(a: &[Vec<ExactRational>], b: &[ExactRational]) -> Option<usize> {
    if solve(a, b).is_some() {
        return None;
    }
    let (mut lo, mut hi) = (0, a.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if solve(&a[..=mid], &b[..=mid]).is_some() {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// Basis of the right nullspace, one vector per free column, each with a 1
/// in its free column.
pub fn nullspace(a: &[Vec<ExactRational>]) -> Vec<Vec<ExactRational>> {
    let e = echelon_rational(a);
    e.free_columns()
        .into_iter()
        .map(|f| e.back_substitute(&[(f, BigRational::one())], None))
        .collect()
}

/// Reduced row echelon form over the rationals, with each pivot equal to 1.
pub fn rref(a: &[Vec<ExactRational>]) -> (Vec<Vec<ExactRational>>, Vec<usize>) {
    let e = echelon_rational(a);
    let cols = e.cols;
    let mut out: Vec<Vec<ExactRational>> = e.rows[..e.rank()]
        .iter()
        .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
        .collect();
    for (i, &p) in e.pivots.iter().enumerate().rev() {
        let inv = out[i][p].recip();
        for x in out[i].iter_mut() {
            *x *= &inv;
        }
        for k in 0..i {
            let f = out[k][p].clone();
            if f.is_zero() {
                continue;
            }
            for j in p..cols {
                let v = &f * &out[i][j];
                out[k][j] -= v;
            }
        }
    }
    (out, e.pivots)
}
