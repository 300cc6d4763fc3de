//! The Young lattice `L(m, n)` of partitions with at most `m` parts, each at
//! most `n`, and its link to k-sets of `[2k]` under the LC order.
//!
//! Partitions are stored as nondecreasing part lists padded with zeros,
//! e.g. `(0, 2)` for the partition 2 in `L(2, 3)`, so that `φ` is literally
//! `x_i - i`.

mod antichain;
mod bounds;
mod probe;

use std::fmt;

use serde::Serialize;

use crate::error::{domain_err, param_err, Error, Result};
use crate::sets::{binomial, KSet};

pub use antichain::{max_antichain, Antichain, ANTICHAIN_LIMIT};
pub use bounds::{theorem1_report, BoundsRow, BOUNDS_CSV_HEADER};
pub use probe::{supersaturation_probe, ProbeRow, ProbeStrategy, PROBE_CSV_HEADER, PROBE_LIMIT};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Partition {
    parts: Vec<u32>,
    n: u32,
}

impl Partition {
    pub fn new(n: u32, parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(param_err!("a partition in L(m, n) needs m >= 1 parts"));
        }
        if parts.windows(2).any(|w| w[0] > w[1]) {
            return Err(domain_err!("parts {parts:?} are not nondecreasing"));
        }
        if parts.last().is_some_and(|&x| x > n) {
            return Err(domain_err!("parts {parts:?} exceed the bound {n}"));
        }
        Ok(Partition { parts, n })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn m(&self) -> u32 {
        self.parts.len() as u32
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn rank(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// `(x_i)^c = (n - x_{m-i+1})`, the rank-reversing involution.
    pub fn complement(&self) -> Partition {
        Partition {
            parts: self.parts.iter().rev().map(|x| self.n - x).collect(),
            n: self.n,
        }
    }

    /// Componentwise order; `None` across different lattices.
    pub fn leq(&self, other: &Partition) -> Option<bool> {
        (self.m() == other.m() && self.n == other.n)
            .then(|| self.parts.iter().zip(&other.parts).all(|(a, b)| a <= b))
    }

    pub(crate) fn upper_covers(&self) -> Vec<Partition> {
        let m = self.parts.len();
        (0..m)
            .filter(|&i| {
                self.parts[i] < self.n && (i + 1 == m || self.parts[i] < self.parts[i + 1])
            })
            .map(|i| {
                let mut p = self.parts.clone();
                p[i] += 1;
                Partition {
                    parts: p,
                    n: self.n,
                }
            })
            .collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n < 10 {
            self.parts.iter().try_for_each(|x| write!(f, "{x}"))
        } else {
            let s: Vec<String> = self.parts.iter().map(u32::to_string).collect();
            write!(f, "({})", s.join(","))
        }
    }
}

fn check_dims(m: u32, n: u32) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(param_err!("L(m, n) needs m, n >= 1, got L({m}, {n})"));
    }
    Ok(())
}

/// Every element of `L(m, n)` in lexicographic order of parts.
pub fn all_partitions(m: u32, n: u32) -> Result<Vec<Partition>> {
    check_dims(m, n)?;
    let size = binomial((m + n) as u64, m as u64).filter(|&s| s <= 50_000_000);
    if size.is_none() {
        return Err(Error::ScaleGuard(format!(
            "L({m}, {n}) is too large to list"
        )));
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; m as usize];
    loop {
        out.push(Partition {
            parts: cur.clone(),
            n,
        });
        // next nondecreasing sequence: bump the last part that can grow and
        // reset everything after it to the same value
        let Some(i) = (0..m as usize).rev().find(|&i| cur[i] < n) else {
            break;
        };
        let v = cur[i] + 1;
        cur[i..].fill(v);
    }
    Ok(out)
}

/// `p_0, ..., p_{mn}`: coefficients of the Gaussian binomial `[m+n, m]_q`.
///
/// Uses `p(m, n, j) = p(m-1, n, j) + p(m, n-1, j-m)`: either the smallest
/// part is zero, or one can be taken off every part.
pub fn rank_sizes(m: u32, n: u32) -> Result<Vec<u128>> {
    check_dims(m, n)?;
    let overflow = || Error::ScaleGuard(format!("rank sizes of L({m}, {n}) overflow 128 bits"));
    // row[b] holds the rank vector of L(a, b) for the current a
    let mut row: Vec<Vec<u128>> = (0..=n).map(|_| vec![1u128]).collect();
    for a in 1..=m as usize {
        let mut next: Vec<Vec<u128>> = vec![vec![1u128]];
        for b in 1..=n as usize {
            let mut v = vec![0u128; a * b + 1];
            for (j, &c) in row[b].iter().enumerate() {
                v[j] = c;
            }
            for (j, &c) in next[b - 1].iter().enumerate() {
                v[j + a] = v[j + a].checked_add(c).ok_or_else(overflow)?;
            }
            next.push(v);
        }
        row = next;
    }
    Ok(row.pop().expect("n >= 1"))
}

pub fn is_palindromic(v: &[u128]) -> bool {
    v.iter().eq(v.iter().rev())
}

pub fn is_unimodal(v: &[u128]) -> bool {
    let peak = v
        .iter()
        .enumerate()
        .max_by_key(|(_, x)| **x)
        .map_or(0, |(i, _)| i);
    v[..=peak].windows(2).all(|w| w[0] <= w[1]) && v[peak..].windows(2).all(|w| w[0] >= w[1])
}

/// `φ(F) = (x_i - i)`, from k-sets of `[2k]` to `L(k, k)`.
pub fn phi(f: &KSet) -> Result<Partition> {
    let k = f.k();
    if f.n() != 2 * k {
        return Err(param_err!(
            "φ takes k-sets of [2k]; {f} lives on [{}]",
            f.n()
        ));
    }
    let parts = f.elements().iter().zip(1..).map(|(&x, i)| x - i).collect();
    Ok(Partition { parts, n: k })
}

/// `φ^{-1}(λ) = (x_i + i)`.
pub fn phi_inv(p: &Partition) -> Result<KSet> {
    if p.m() != p.n() {
        return Err(param_err!(
            "φ^-1 takes partitions in L(k, k), got L({}, {})",
            p.m(),
            p.n()
        ));
    }
    let elems: Vec<u32> = p.parts.iter().zip(1..).map(|(&x, i)| x + i).collect();
    KSet::new(2 * p.n(), elems)
}

/// `|P_k|`: pairs of complementary k-subsets of `[2k]` both summing to
/// `k(2k+1)/2`, counted by a subset-sum table over (size, sum).
pub fn pk_count(k: u32) -> Result<u128> {
    if k == 0 || k % 2 == 1 {
        return Err(domain_err!(
            "balanced pairs are only defined for even k >= 2, got k = {k}"
        ));
    }
    let target = (k * (2 * k + 1) / 2) as usize;
    let overflow = || Error::ScaleGuard(format!("|P_k| overflows 128 bits at k = {k}"));
    // dp[c][s]: c-subsets of the elements seen so far with sum s
    let mut dp = vec![vec![0u128; target + 1]; k as usize + 1];
    dp[0][0] = 1;
    for x in 1..=2 * k as usize {
        for c in (1..=k as usize).rev() {
            for s in (x..=target).rev() {
                let add = dp[c - 1][s - x];
                if add != 0 {
                    dp[c][s] = dp[c][s].checked_add(add).ok_or_else(overflow)?;
                }
            }
        }
    }
    Ok(dp[k as usize][target] / 2)
}

/// `|P_k| · 2πk² / (2^{2k} √3)`, which tends to 1 for even `k`.
pub fn prodinger_ratio(k: u32) -> Result<f64> {
    let pk = pk_count(k)? as f64;
    let k = k as f64;
    Ok(pk * 2.0 * std::f64::consts::PI * k * k / (2f64.powf(2.0 * k) * 3f64.sqrt()))
}

/// CSV rows `m,n,j,p_j`.
pub fn ranks_csv(m: u32, n: u32) -> Result<String> {
    let mut out = String::from("m,n,j,p_j\n");
    for (j, p) in rank_sizes(m, n)?.iter().enumerate() {
        out.push_str(&format!("{m},{n},{j},{p}\n"));
    }
    Ok(out)
}
