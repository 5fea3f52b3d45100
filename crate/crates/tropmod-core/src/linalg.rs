//! Exact integer and rational linear algebra on small dense matrices.
//!
//! Storage types are `i64`; every elimination runs over `BigInt` or
//! `BigRational` and converts back with an overflow check.

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Row-major integer matrix. A matrix with `r` rows and `c` columns stores
/// `r` vectors of length `c`; zero-row matrices carry their column count
/// implicitly wherever it matters.
pub type IMat = Vec<Vec<i64>>;

pub fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn from_big(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(|x| x.to_i64().ok_or(Error::Overflow)).collect()
}

pub fn to_rat(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
}

pub fn big_to_rat(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i128 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

pub fn dot_big(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat_int(a: &[i64], p: &[BigRational]) -> BigRational {
    a.iter().zip(p).map(|(&x, y)| y * BigInt::from(x)).fold(BigRational::zero(), |s, t| s + t)
}

fn narrow(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow)
}

/// `m * v` for an `r x c` matrix.
pub fn mat_vec(m: &IMat, v: &[i64]) -> Result<Vec<i64>> {
    m.iter().map(|row| narrow(dot(row, v))).collect()
}

/// `v^T * m`, i.e. the pullback of a covector on the target.
pub fn vec_mat(v: &[i64], m: &IMat, cols: usize) -> Result<Vec<i64>> {
    (0..cols).map(|j| narrow(v.iter().zip(m).map(|(&x, row)| x as i128 * row[j] as i128).sum())).collect()
}

/// `a * b` where `a` is `r x k` and `b` is `k x c`.
pub fn mat_mul(a: &IMat, b: &IMat, c: usize) -> Result<IMat> {
    a.iter().map(|row| (0..c).map(|j| narrow(row.iter().zip(b).map(|(&x, brow)| x as i128 * brow[j] as i128).sum())).collect()).collect()
}

pub fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn transpose(m: &IMat, cols: usize) -> IMat {
    (0..cols).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

pub fn columns(m: &IMat, cols: usize) -> Vec<Vec<i64>> {
    transpose(m, cols)
}

pub fn from_columns(cols: &[Vec<i64>], rows: usize) -> IMat {
    (0..rows).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

pub fn gcd_slice(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Divides by the gcd of the entries; the zero vector is returned unchanged.
pub fn primitive_big(v: &[BigInt]) -> Vec<BigInt> {
    let g = gcd_slice(v);
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g <= 1 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

pub fn is_zero(v: &[i64]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// Reduced row echelon form over Q. Returns the nonzero rows and the pivot columns.
pub fn rref(rows: &[Vec<BigRational>], ncols: usize) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank_int(rows: &[Vec<i64>], ncols: usize) -> usize {
    let rows: Vec<_> = rows.iter().map(|r| to_rat(r)).collect();
    rref(&rows, ncols).1.len()
}

pub fn rank_big(rows: &[Vec<BigInt>], ncols: usize) -> usize {
    let rows: Vec<_> = rows.iter().map(|r| big_to_rat(r)).collect();
    rref(&rows, ncols).1.len()
}

/// Basis of the rational kernel `{x : rows * x = 0}`, scaled to primitive integer vectors.
pub fn nullspace(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let rows: Vec<_> = rows.iter().map(|r| big_to_rat(r)).collect();
    let (m, pivots) = rref(&rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (row, &p) in m.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            let den = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            let ints: Vec<BigInt> = v.iter().map(|x| (x * &den).to_integer()).collect();
            primitive_big(&ints)
        })
        .collect()
}

/// Basis of the integer kernel `{x in Z^n : rows * x = 0}` by unimodular column
/// reduction. The basis is saturated and returned in Hermite normal form.
pub fn integer_kernel(rows: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let mut w: Vec<Vec<BigInt>> = rows.to_vec();
    // u[j] is the j-th column of the transformation
    let mut u: Vec<Vec<BigInt>> = (0..n).map(|j| (0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut c = 0;
    for i in 0..w.len() {
        if c == n {
            break;
        }
        for j in (c + 1)..n {
            if w[i][j].is_zero() {
                continue;
            }
            let a = w[i][c].clone();
            let b = w[i][j].clone();
            let eg = a.extended_gcd(&b);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let (ag, bg) = (&a / &g, &b / &g);
            let new_c = |col_c: &BigInt, col_j: &BigInt| &x * col_c + &y * col_j;
            let new_j = |col_c: &BigInt, col_j: &BigInt| &bg * col_c - &ag * col_j;
            for row in w.iter_mut() {
                let (vc, vj) = (row[c].clone(), row[j].clone());
                row[c] = new_c(&vc, &vj);
                row[j] = new_j(&vc, &vj);
            }
            let (uc, uj) = (u[c].clone(), u[j].clone());
            u[c] = uc.iter().zip(&uj).map(|(p, q)| new_c(p, q)).collect();
            u[j] = uc.iter().zip(&uj).map(|(p, q)| new_j(p, q)).collect();
        }
        if !w[i][c].is_zero() {
            c += 1;
        }
    }
    hnf(&u[c..], n)
}

/// Row Hermite normal form of the lattice spanned by `rows`; zero rows dropped.
pub fn hnf(rows: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut r = 0;
    for c in 0..n {
        if r == m.len() {
            break;
        }
        loop {
            // pick the row with smallest nonzero |entry| in column c
            let Some(p) = (r..m.len()).filter(|&i| !m[i][c].is_zero()).min_by_key(|&i| m[i][c].abs()) else {
                break;
            };
            m.swap(r, p);
            let mut done = true;
            for i in (r + 1)..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[r][c]);
                let pr = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pr) {
                    *x -= &q * y;
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < m.len() && !m[r][c].is_zero() {
            if m[r][c].is_negative() {
                for x in m[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..r {
                let q = m[i][c].div_floor(&m[r][c]);
                if !q.is_zero() {
                    let pr = m[r].clone();
                    for (x, y) in m[i].iter_mut().zip(&pr) {
                        *x -= &q * y;
                    }
                }
            }
            r += 1;
        }
    }
    m.truncate(r);
    m
}

/// Canonical basis of `span_Q(vectors) ∩ Z^n`.
pub fn saturated_span(vectors: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let orth = nullspace(vectors, n);
    integer_kernel(&orth, n)
}

/// Solves `sum_j c_j * cols[j] = x` exactly. `cols` must be linearly independent.
pub fn solve(cols: &[Vec<BigRational>], x: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = x.len();
    let k = cols.len();
    let aug: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(x[i].clone());
            row
        })
        .collect();
    let (m, pivots) = rref(&aug, k + 1);
    if pivots.contains(&k) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); k];
    for (row, &p) in m.iter().zip(&pivots) {
        sol[p] = row[k].clone();
    }
    Some(sol)
}

/// Integer version of [`solve`]; `None` when the system is inconsistent or
/// the solution is not integral.
pub fn solve_int(cols: &[Vec<i64>], x: &[i64]) -> Option<Vec<i64>> {
    let cols: Vec<_> = cols.iter().map(|c| to_rat(c)).collect();
    let sol = solve(&cols, &to_rat(x))?;
    sol.iter().map(|q| if q.is_integer() { q.to_integer().to_i64() } else { None }).collect()
}

/// Solves `a * m = b` for `m` with `a` injective, column by column.
/// `a` is `r x k`, `b` is `r x c`; returns the `k x c` integer matrix.
pub fn solve_mat(a: &IMat, k: usize, b: &IMat, c: usize) -> Option<IMat> {
    let acols = columns(a, k);
    let bcols = columns(b, c);
    let mut out = Vec::with_capacity(c);
    for col in &bcols {
        out.push(solve_int(&acols, col)?);
    }
    Some(from_columns(&out, k))
}

pub fn det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        for i in (c + 1)..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[c][c];
                let pr = a[c].clone();
                for (x, y) in a[i].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
    }
    d
}

/// gcd of the maximal minors of an `r x k` matrix with `r >= k`. It equals 1
/// exactly when the columns span a saturated sublattice of rank `k`.
pub fn maximal_minor_gcd(m: &IMat, k: usize) -> BigInt {
    let r = m.len();
    if k == 0 {
        return BigInt::one();
    }
    let mut g = BigInt::zero();
    for rows in (0..r).combinations(k) {
        let sub: Vec<Vec<BigRational>> = rows.iter().map(|&i| to_rat(&m[i])).collect();
        g = g.gcd(&det(&sub).to_integer());
        if g.is_one() {
            break;
        }
    }
    g
}

/// Inverse of a unimodular integer matrix, if it is one.
pub fn unimodular_inverse(m: &IMat) -> Option<IMat> {
    let n = m.len();
    let id = identity(n);
    let inv = solve_mat(m, n, &id, n)?;
    let check = mat_mul(m, &inv, n).ok()?;
    (check == id).then_some(inv)
}
