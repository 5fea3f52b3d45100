use std::collections::BTreeSet;

use itertools::Itertools;

use super::canonical::{canonical_form, canonical_graph, CanonicalForm};
use super::MarkedGraph;
use crate::error::{Error, Result};

fn check_pair(g: u32, n: u32) -> Result<()> {
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Error::UnstablePair { g, n });
    }
    Ok(())
}

fn connected(nv: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; nv];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Compositions of `total` into `parts` nonnegative parts.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Representatives of all isomorphism classes of stable graphs of type `(g, n)`,
/// sorted by edge count and then canonical form.
pub fn enumerate_stable(g: u32, n: u32) -> Result<Vec<MarkedGraph>> {
    check_pair(g, n)?;
    let max_v = (2 * g + n - 2) as usize;
    let mut found: BTreeSet<(usize, CanonicalForm)> = BTreeSet::new();
    for b1 in 0..=g {
        for nv in 1..=max_v {
            let ne = nv - 1 + b1 as usize;
            let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|a| (a..nv).map(move |b| (a, b))).collect();
            let mut shapes: BTreeSet<CanonicalForm> = BTreeSet::new();
            for edges in pairs.iter().copied().combinations_with_replacement(ne) {
                if !connected(nv, &edges) {
                    continue;
                }
                let bare = MarkedGraph::new(vec![0; nv], edges.clone(), vec![]).unwrap();
                let val: Vec<usize> = (0..nv).map(|v| bare.valence(v)).collect();
                // a vertex of valence below 3 needs weight or legs
                let deficit: u32 = val.iter().map(|&d| 3u32.saturating_sub(d as u32)).sum();
                if deficit > n + 3 * (g - b1) {
                    continue;
                }
                if !shapes.insert(canonical_form(&bare)) {
                    continue;
                }
                for weights in compositions(g - b1, nv) {
                    for assignment in leg_assignments(n, nv) {
                        let legs: Vec<(u32, usize)> = assignment.iter().enumerate().map(|(i, &v)| (i as u32 + 1, v)).collect();
                        let cand = MarkedGraph::new(weights.clone(), edges.clone(), legs).unwrap();
                        if cand.is_stable() {
                            found.insert((ne, canonical_form(&cand)));
                        }
                    }
                }
            }
        }
    }
    Ok(found.into_iter().map(|(_, f)| canonical_graph(&f)).collect())
}

/// Stable graphs that are not a proper contraction of another stable graph.
pub fn enumerate_maximal(g: u32, n: u32) -> Result<Vec<MarkedGraph>> {
    let all = enumerate_stable(g, n)?;
    let mut contracted: BTreeSet<CanonicalForm> = BTreeSet::new();
    for h in &all {
        for e in 0..h.num_edges() {
            contracted.insert(canonical_form(&h.contract(&[e]).0));
        }
    }
    Ok(all.into_iter().filter(|x| !contracted.contains(&canonical_form(x))).collect())
}

/// All maps from `n` legs to `nv` vertices.
fn leg_assignments(n: u32, nv: usize) -> Vec<Vec<usize>> {
    (0..n).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|a| {
                (0..nv).map(move |v| {
                    let mut b = a.clone();
                    b.push(v);
                    b
                })
            })
            .collect()
    })
}
