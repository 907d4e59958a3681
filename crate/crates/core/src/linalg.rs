//! Exact linear algebra over the rationals via fraction-free (Bareiss) elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Row echelon form of an integer matrix, computed fraction-free.
///
/// Every entry stays an integer minor of the input, so no rational arithmetic
/// is needed until back-substitution.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rows: Vec<Vec<BigInt>>,
    /// Pivot column of each nonzero row, in order.
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Scales each row by the lcm of its denominators.
pub fn clear_denominators(m: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| {
            let l = row
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter()
                .map(|x| x.numer() * (&l / x.denom()))
                .collect()
        })
        .collect()
}

pub fn bareiss(mut a: Vec<Vec<BigInt>>, cols: usize) -> Echelon {
    let nrows = a.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    Echelon {
        rows: a,
        pivots,
        cols,
    }
}

pub fn echelon(m: &[Vec<BigRational>], cols: usize) -> Echelon {
    bareiss(clear_denominators(m), cols)
}

pub fn rank(m: &[Vec<BigRational>], cols: usize) -> usize {
    echelon(m, cols).rank()
}

/// Solves the pivot variables given values for every non-pivot column.
fn back_substitute(e: &Echelon, x: &mut [BigRational]) {
    for (i, &c) in e.pivots.iter().enumerate().rev() {
        let row = &e.rows[i];
        let mut s = BigRational::zero();
        for j in c + 1..e.cols {
            if !row[j].is_zero() && !x[j].is_zero() {
                s += BigRational::from_integer(row[j].clone()) * &x[j];
            }
        }
        x[c] = -s / BigRational::from_integer(row[c].clone());
    }
}

/// Basis of the right nullspace `{x : m x = 0}`, one vector per free column.
pub fn nullspace(m: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let e = echelon(m, cols);
    let mut is_pivot = vec![false; cols];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = vec![BigRational::zero(); cols];
            x[f] = BigRational::one();
            back_substitute(&e, &mut x);
            x
        })
        .collect()
}

/// One solution of `a x = b`, or `None` when inconsistent.
pub fn solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let cols = a.first().map_or(0, Vec::len);
    let aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(-bi.clone());
            r
        })
        .collect();
    let e = echelon(&aug, cols + 1);
    if e.pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols + 1];
    x[cols] = BigRational::one();
    back_substitute(&e, &mut x);
    x.truncate(cols);
    Some(x)
}

/// Scales a rational vector to a primitive integer vector whose first nonzero entry is positive.
pub fn primitive_integer(v: &[BigRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    let sign = if ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    ints.into_iter().map(|x| x / &g * &sign).collect()
}

pub fn mat_vec(m: &[Vec<BigRational>], x: &[BigRational]) -> Vec<BigRational> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn qm(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&m, 3), 2);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 1);
        assert!(mat_vec(&m, &ns[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = qm(&[&[2, 1], &[1, 3]]);
        let x = solve(&a, &[q(5), q(10)]).unwrap();
        assert_eq!(x, vec![q(1), q(3)]);
        let singular = qm(&[&[1, 1], &[2, 2]]);
        assert!(solve(&singular, &[q(1), q(3)]).is_none());
    }

    #[test]
    fn primitive_scaling() {
        let v = vec![
            BigRational::new((-3).into(), 4.into()),
            BigRational::new(3.into(), 2.into()),
            q(0),
        ];
        let p = primitive_integer(&v);
        assert_eq!(p, vec![BigInt::from(1), BigInt::from(-2), BigInt::from(0)]);
    }

    proptest! {
        #[test]
        fn nullspace_vectors_are_annihilated(
            entries in proptest::collection::vec(-5i64..=5, 12),
            rows in 1usize..4,
        ) {
            let cols = 12 / rows.max(1);
            let m: Vec<Vec<BigRational>> = entries
                .chunks(cols)
                .take(rows)
                .map(|c| c.iter().map(|&x| q(x)).collect())
                .collect();
            let ns = nullspace(&m, cols);
            prop_assert_eq!(ns.len() + rank(&m, cols), cols);
            for v in &ns {
                prop_assert!(mat_vec(&m, v).iter().all(Zero::is_zero));
            }
        }
    }
}
