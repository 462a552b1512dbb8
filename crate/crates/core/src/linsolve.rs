//! Exact Gauss-Jordan elimination: a rational version and a fraction-free
//! integer version. Both choose the same pivot columns for the same order, so
//! they return the same particular solution.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::Rational;

/// Order in which columns are offered as pivot columns. Different orders
/// leave different variables free on singular systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotOrder {
    #[default]
    Natural,
    Reversed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub x: Vec<Rational>,
    pub rank: usize,
    /// Non-pivot columns, ascending; their variables are set to zero.
    pub free: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inconsistent {
    pub row: usize,
}

/// Solves `a x = b` exactly for a square or rectangular `a`, returning the
/// particular solution with every free variable set to zero.
///
/// Pivot rows are chosen as the first row at or below the current one with a
/// nonzero entry in the pivot column; no magnitude-based pivoting is needed
/// in exact arithmetic.
pub fn solve(a: &[Vec<Rational>], b: &[Rational], order: PivotOrder) -> Result<LinearSolution, Inconsistent> {
    let rows = a.len();
    assert_eq!(rows, b.len(), "right-hand side length mismatch");
    let cols = a.first().map_or(0, Vec::len);

    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), cols, "ragged matrix");
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let column_order: Vec<usize> = match order {
        PivotOrder::Natural => (0..cols).collect(),
        PivotOrder::Reversed => (0..cols).rev().collect(),
    };

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for &c in &column_order {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(r, p);

        let inv = aug[r][c].recip();
        for v in aug[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = aug[r].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }

    if let Some(row) = (r..rows).find(|&i| !aug[i][cols].is_zero()) {
        return Err(Inconsistent { row });
    }

    let mut x = vec![Rational::zero(); cols];
    let mut is_pivot = vec![false; cols];
    for &(row, c) in &pivots {
        x[c] = aug[row][cols].clone();
        is_pivot[c] = true;
    }
    let free = (0..cols).filter(|&c| !is_pivot[c]).collect();
    Ok(LinearSolution { x, rank: pivots.len(), free })
}

/// Fraction-free Gauss-Jordan on an integer system.
///
/// Every update `row_i <- (pivot * row_i - a_ic * row_r) / previous_pivot`
/// divides exactly, so entries stay integers (they are minors of the
/// augmented matrix) and no gcd is ever taken. The only rational step is the
/// final back-substitution `x_c = rhs_r / a_rc`.
pub fn solve_integer(a: &[Vec<BigInt>], b: &[BigInt], order: PivotOrder) -> Result<LinearSolution, Inconsistent> {
    let rows = a.len();
    assert_eq!(rows, b.len(), "right-hand side length mismatch");
    let cols = a.first().map_or(0, Vec::len);

    let mut aug: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), cols, "ragged matrix");
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let column_order: Vec<usize> = match order {
        PivotOrder::Natural => (0..cols).collect(),
        PivotOrder::Reversed => (0..cols).rev().collect(),
    };

    let mut previous = BigInt::one();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for &c in &column_order {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(r, p);
        let pivot_row = aug[r].clone();
        let pivot = pivot_row[c].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                let num = &pivot * &*v - &factor * pv;
                let (q, rem) = num.div_rem(&previous);
                assert!(rem.is_zero(), "fraction-free step must divide exactly");
                *v = q;
            }
        }
        previous = pivot;
        pivots.push((r, c));
        r += 1;
    }

    if let Some(row) = (r..rows).find(|&i| !aug[i][cols].is_zero()) {
        return Err(Inconsistent { row });
    }

    let mut x = vec![Rational::zero(); cols];
    let mut is_pivot = vec![false; cols];
    for &(row, c) in &pivots {
        x[c] = Rational::new(aug[row][cols].clone(), aug[row][c].clone());
        is_pivot[c] = true;
    }
    let free = (0..cols).filter(|&c| !is_pivot[c]).collect();
    Ok(LinearSolution { x, rank: pivots.len(), free })
}
