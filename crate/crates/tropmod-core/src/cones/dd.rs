//! Double description: extreme rays and lineality of `{x : A x >= 0}`.
//!
//! Adjacency of rays is decided by the combinatorial test on zero sets.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{dot_big, primitive_big};

pub const DEFAULT_DIM_CAP: usize = 8;

/// The dimension cap, overridable through `TROPMOD_DIM_CAP`.
pub fn dim_cap() -> usize {
    std::env::var("TROPMOD_DIM_CAP").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_DIM_CAP)
}

pub fn check_rank(rank: usize) -> Result<()> {
    let cap = dim_cap();
    if rank > cap {
        return Err(Error::DimensionTooLarge { rank, cap });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray {
    v: Vec<BigInt>,
    zeros: Bits,
}

pub struct Generators {
    pub lineality: Vec<Vec<BigInt>>,
    pub rays: Vec<Vec<BigInt>>,
}

/// Lineality basis and extreme rays (primitive, sorted) of `{x in R^n : a.x >= 0 for a in ineqs}`.
pub fn extreme_rays(ineqs: &[Vec<BigInt>], n: usize) -> Result<Generators> {
    check_rank(n)?;
    let m = ineqs.len();
    let mut lin: Vec<Vec<BigInt>> = (0..n).map(|j| (0..n).map(|i| BigInt::from(i64::from(i == j))).collect()).collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (k, a) in ineqs.iter().enumerate() {
        if let Some(j) = lin.iter().position(|l| !dot_big(a, l).is_zero()) {
            let mut l0 = lin.remove(j);
            let mut al0 = dot_big(a, &l0);
            if al0.is_negative() {
                l0 = l0.iter().map(|x| -x).collect();
                al0 = -al0;
            }
            let project = |v: &[BigInt]| -> Vec<BigInt> {
                let av = dot_big(a, v);
                primitive_big(&v.iter().zip(&l0).map(|(x, y)| &al0 * x - &av * y).collect::<Vec<_>>())
            };
            lin = lin.iter().map(|l| project(l)).collect();
            for r in rays.iter_mut() {
                r.v = project(&r.v);
                r.zeros.set(k);
            }
            let mut zeros = Bits::new(m);
            for i in 0..k {
                zeros.set(i);
            }
            rays.push(Ray { v: l0, zeros });
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|r| dot_big(a, &r.v)).collect();
        let mut next: Vec<Ray> = Vec::new();
        for (r, val) in rays.iter().zip(&vals) {
            if val.is_zero() {
                let mut zeros = r.zeros.clone();
                zeros.set(k);
                next.push(Ray { v: r.v.clone(), zeros });
            } else if val.is_positive() {
                next.push(Ray { v: r.v.clone(), zeros: r.zeros.clone() });
            }
        }
        for (p, vp) in rays.iter().zip(&vals) {
            if !vp.is_positive() {
                continue;
            }
            for (q, vq) in rays.iter().zip(&vals) {
                if !vq.is_negative() {
                    continue;
                }
                let common = p.zeros.and(&q.zeros);
                let adjacent = rays.iter().all(|r| std::ptr::eq(r, p) || std::ptr::eq(r, q) || !common.subset_of(&r.zeros));
                if !adjacent {
                    continue;
                }
                let w: Vec<BigInt> = q.v.iter().zip(&p.v).map(|(x, y)| vp * x - vq * y).collect();
                let mut zeros = common;
                zeros.set(k);
                next.push(Ray { v: primitive_big(&w), zeros });
            }
        }
        rays = next;
    }
    let mut out: Vec<Vec<BigInt>> = rays.into_iter().map(|r| primitive_big(&r.v)).collect();
    out.sort();
    out.dedup();
    Ok(Generators { lineality: lin, rays: out })
}
