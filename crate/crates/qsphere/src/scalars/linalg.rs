//! Exact Gaussian elimination over Q(s).

use super::QScalar;

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut [Vec<QScalar>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
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
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x = &*x - &(&f * p);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<QScalar>]) -> usize {
    let mut w = m.to_vec();
    rref(&mut w).len()
}

/// One solution of `A x = b`, or `None` when the system is inconsistent.
pub fn solve(a: &[Vec<QScalar>], b: &[QScalar]) -> Option<Vec<QScalar>> {
    let n = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<QScalar>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![QScalar::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][n].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{mu, nu};

    #[test]
    fn solves_two_by_two() {
        let a = vec![vec![mu(), QScalar::one()], vec![QScalar::one(), nu()]];
        let x = vec![QScalar::q(), QScalar::from_int(3)];
        let b: Vec<QScalar> = a
            .iter()
            .map(|r| &(&r[0] * &x[0]) + &(&r[1] * &x[1]))
            .collect();
        assert_eq!(solve(&a, &b).unwrap(), x);
        assert_eq!(rank(&a), 2);
    }

    #[test]
    fn detects_inconsistency() {
        let a = vec![vec![QScalar::one()], vec![QScalar::one()]];
        let b = vec![QScalar::zero(), QScalar::one()];
        assert!(solve(&a, &b).is_none());
    }
}
