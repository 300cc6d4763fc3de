//! Maximum antichains of `L(m, n)` by Dilworth's theorem: a largest
//! antichain has as many elements as a smallest chain cover, which is
//! `N - ν` for a maximum matching `ν` of the strict comparability graph
//! split into a left and a right copy.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::{all_partitions, Partition};
use crate::error::{integrity_err, Error, Result};
use crate::sets::binomial;

/// Largest lattice the matching is run on.
pub const ANTICHAIN_LIMIT: u128 = 2000;

#[derive(Clone, Debug, Serialize)]
pub struct Antichain {
    pub size: usize,
    pub witness: Vec<Partition>,
}

/// Strict up-sets, by breadth-first search over upper covers.
fn strict_up_sets(elems: &[Partition]) -> Vec<Vec<usize>> {
    let index: HashMap<&Partition, usize> = elems.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let covers: Vec<Vec<usize>> = elems
        .iter()
        .map(|p| p.upper_covers().iter().map(|q| index[q]).collect())
        .collect();
    (0..elems.len())
        .map(|s| {
            let mut seen = vec![false; elems.len()];
            let mut queue: VecDeque<usize> = covers[s].iter().copied().collect();
            let mut up = Vec::new();
            while let Some(x) = queue.pop_front() {
                if !std::mem::replace(&mut seen[x], true) {
                    up.push(x);
                    queue.extend(&covers[x]);
                }
            }
            up.sort_unstable();
            up
        })
        .collect()
}

const FREE: usize = usize::MAX;

struct Matching<'a> {
    adj: &'a [Vec<usize>],
    left: Vec<usize>,
    right: Vec<usize>,
    dist: Vec<usize>,
}

impl Matching<'_> {
    /// Hopcroft–Karp.
    fn run(adj: &[Vec<usize>], n: usize) -> Matching<'_> {
        let mut m = Matching {
            adj,
            left: vec![FREE; n],
            right: vec![FREE; n],
            dist: vec![0; n],
        };
        while m.layer() {
            for u in 0..n {
                if m.left[u] == FREE {
                    m.augment(u);
                }
            }
        }
        m
    }

    fn layer(&mut self) -> bool {
        let mut queue = VecDeque::new();
        for u in 0..self.left.len() {
            if self.left[u] == FREE {
                self.dist[u] = 0;
                queue.push_back(u);
            } else {
                self.dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                match self.right[v] {
                    FREE => found = true,
                    w if self.dist[w] == usize::MAX => {
                        self.dist[w] = self.dist[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        found
    }

    fn augment(&mut self, u: usize) -> bool {
        for idx in 0..self.adj[u].len() {
            let v = self.adj[u][idx];
            let w = self.right[v];
            if w == FREE || (self.dist[w] == self.dist[u] + 1 && self.augment(w)) {
                self.left[u] = v;
                self.right[v] = u;
                return true;
            }
        }
        self.dist[u] = usize::MAX;
        false
    }

    fn size(&self) -> usize {
        self.left.iter().filter(|&&v| v != FREE).count()
    }

    /// Kőnig: with `Z` the vertices reachable from free left vertices by
    /// alternating paths, `{x : x_L ∈ Z, x_R ∉ Z}` is a maximum antichain.
    fn antichain(&self) -> Vec<usize> {
        let n = self.left.len();
        let (mut zl, mut zr) = (vec![false; n], vec![false; n]);
        let mut queue: VecDeque<usize> = (0..n).filter(|&u| self.left[u] == FREE).collect();
        for &u in &queue {
            zl[u] = true;
        }
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if !zr[v] && self.left[u] != v {
                    zr[v] = true;
                    let w = self.right[v];
                    if w != FREE && !zl[w] {
                        zl[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        (0..n).filter(|&x| zl[x] && !zr[x]).collect()
    }
}

/// Exact largest antichain of `L(m, n)` with one witness.
pub fn max_antichain(m: u32, n: u32) -> Result<Antichain> {
    let size = binomial((m + n) as u64, m as u64);
    if size.is_none_or(|s| s > ANTICHAIN_LIMIT) {
        return Err(Error::ScaleGuard(format!(
            "L({m}, {n}) has more than {ANTICHAIN_LIMIT} elements; matching is not attempted"
        )));
    }
    let elems = all_partitions(m, n)?;
    let up = strict_up_sets(&elems);
    let matching = Matching::run(&up, elems.len());
    let chosen = matching.antichain();
    let expected = elems.len() - matching.size();
    if chosen.len() != expected {
        return Err(integrity_err!(
            "witness has {} elements but the matching bound is {expected}",
            chosen.len()
        ));
    }
    for (a, &x) in chosen.iter().enumerate() {
        if let Some(&y) = chosen[a + 1..]
            .iter()
            .find(|&&y| up[x].binary_search(&y).is_ok() || up[y].binary_search(&x).is_ok())
        {
            return Err(integrity_err!(
                "witness contains the comparable pair {} and {}",
                elems[x],
                elems[y]
            ));
        }
    }
    Ok(Antichain {
        size: expected,
        witness: chosen.into_iter().map(|i| elems[i].clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::rank_sizes;

    #[test]
    fn small_lattices() {
        let a = max_antichain(2, 3).unwrap();
        assert_eq!(a.size, 2);
        assert_eq!(a.witness.len(), 2);
        assert_eq!(max_antichain(2, 2).unwrap().size, 2);
        for k in 2..=4 {
            let mid = rank_sizes(k, k).unwrap()[(k * k / 2) as usize];
            assert_eq!(max_antichain(k, k).unwrap().size as u128, mid);
        }
    }

    #[test]
    fn chain_has_width_one() {
        assert_eq!(max_antichain(1, 7).unwrap().size, 1);
    }

    #[test]
    fn guard() {
        assert!(matches!(max_antichain(7, 7), Err(Error::ScaleGuard(_))));
    }
}
