//! Comparable-pair densities `e(G[U]) / (k² |U|)` in `L(k, k)`, where `G`
//! joins every comparable pair. Measurements only.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{all_partitions, Partition};
use crate::error::{param_err, Error, Result};
use crate::sets::binomial;

/// Largest `C(2k, k)` the probe accepts.
pub const PROBE_LIMIT: u128 = 100_000;

pub const PROBE_CSV_HEADER: &str =
    "k,size,strategy,samples,seed,min_density,mean_density,threshold,below_threshold";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeStrategy {
    /// Uniformly random subsets of the requested size.
    Uniform,
    /// The middle rank layer and its neighbours, added alternately
    /// outward until the requested size is reached.
    MiddleLayers,
    /// The whole lattice.
    Full,
}

impl std::fmt::Display for ProbeStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProbeStrategy::Uniform => "uniform",
            ProbeStrategy::MiddleLayers => "middle-layers",
            ProbeStrategy::Full => "full",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub k: u32,
    pub size: usize,
    pub strategy: ProbeStrategy,
    pub samples: usize,
    pub seed: Option<u64>,
    pub min_density: f64,
    pub mean_density: f64,
    /// `k^{-3/2} C(2k, k)`, the scale of the largest antichain.
    pub threshold: f64,
    pub below_threshold: bool,
}

impl ProbeRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.k,
            self.size,
            self.strategy,
            self.samples,
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.min_density,
            self.mean_density,
            self.threshold,
            self.below_threshold
        )
    }
}

/// Comparable pairs among `elems[i]` for `i` in `subset`.
fn comparable_pairs(elems: &[Partition], subset: &[usize]) -> u64 {
    let mut by_rank: Vec<(u32, &[u32])> = subset
        .iter()
        .map(|&i| (elems[i].rank(), elems[i].parts()))
        .collect();
    by_rank.sort_unstable();
    let mut count = 0;
    for (a, &(ra, pa)) in by_rank.iter().enumerate() {
        for &(rb, pb) in &by_rank[a + 1..] {
            if rb > ra && pa.iter().zip(pb).all(|(x, y)| x <= y) {
                count += 1;
            }
        }
    }
    count
}

/// Pairs `λ <= μ` (including `λ = μ`) in `L(m, n)`, counted part by part
/// over the last values `(λ_i, μ_i)`.
#[allow(clippy::needless_range_loop)]
pub fn comparable_pairs_full(m: u32, n: u32) -> u128 {
    let n = n as usize;
    // ways[a][b]: prefixes ending in λ_i = a, μ_i = b with a <= b
    let mut ways = vec![vec![0u128; n + 1]; n + 1];
    for a in 0..=n {
        for b in a..=n {
            ways[a][b] = 1;
        }
    }
    for _ in 1..m {
        // next[a][b] = Σ_{a' <= a, b' <= b, a' <= b'} ways[a'][b']
        let mut pre = vec![vec![0u128; n + 2]; n + 2];
        for a in 0..=n {
            for b in 0..=n {
                pre[a + 1][b + 1] = ways[a][b] + pre[a][b + 1] + pre[a + 1][b] - pre[a][b];
            }
        }
        let mut next = vec![vec![0u128; n + 1]; n + 1];
        for a in 0..=n {
            for b in a..=n {
                next[a][b] = pre[a + 1][b + 1];
            }
        }
        ways = next;
    }
    ways.iter().flatten().sum()
}

fn density(edges: u64, k: u32, size: usize) -> f64 {
    if size == 0 {
        0.0
    } else {
        edges as f64 / ((k * k) as f64 * size as f64)
    }
}

/// Rows for uniform subsets of each requested size, the middle layers
/// grown to each size, and the full lattice.
pub fn supersaturation_probe(
    k: u32,
    sizes: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<ProbeRow>> {
    let total = binomial(2 * k as u64, k as u64)
        .filter(|&c| c <= PROBE_LIMIT)
        .ok_or_else(|| {
            Error::ScaleGuard(format!("L({k}, {k}) has more than {PROBE_LIMIT} elements"))
        })?;
    if k == 0 {
        return Err(param_err!("the probe needs k >= 1"));
    }
    let total = total as usize;
    if let Some(s) = sizes.iter().find(|&&s| s == 0 || s > total) {
        return Err(param_err!("subset size {s} is outside [1, {total}]"));
    }
    let elems = all_partitions(k, k)?;
    let threshold = (k as f64).powf(-1.5) * total as f64;
    let row = |size: usize, strategy, samples, seed, min_density, mean_density| ProbeRow {
        k,
        size,
        strategy,
        samples,
        seed,
        min_density,
        mean_density,
        threshold,
        below_threshold: (size as f64) < threshold,
    };

    let mut rows = Vec::new();
    for &size in sizes {
        if samples > 0 {
            let densities: Vec<f64> = (0..samples)
                .into_par_iter()
                .map(|s| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(s as u64);
                    let subset = index::sample(&mut rng, total, size).into_vec();
                    density(comparable_pairs(&elems, &subset), k, size)
                })
                .collect();
            let min = densities.iter().copied().fold(f64::INFINITY, f64::min);
            let mean = densities.iter().sum::<f64>() / samples as f64;
            rows.push(row(
                size,
                ProbeStrategy::Uniform,
                samples,
                Some(seed),
                min,
                mean,
            ));
        }

        let mid = k * k / 2;
        let mut order = vec![mid];
        for d in 1..=mid {
            order.push(mid + d);
            order.push(mid - d);
        }
        order.retain(|&r| r <= k * k);
        let mut subset = Vec::new();
        for r in order {
            if subset.len() >= size {
                break;
            }
            subset.extend((0..elems.len()).filter(|&i| elems[i].rank() == r));
        }
        let d = density(comparable_pairs(&elems, &subset), k, subset.len());
        rows.push(row(
            subset.len(),
            ProbeStrategy::MiddleLayers,
            1,
            None,
            d,
            d,
        ));
    }

    let full_edges = comparable_pairs_full(k, k) - total as u128;
    let d = full_edges as f64 / ((k * k) as f64 * total as f64);
    rows.push(row(total, ProbeStrategy::Full, 1, None, d, d));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_count_matches_pairwise() {
        for k in 1..=6 {
            let elems = all_partitions(k, k).unwrap();
            let all: Vec<usize> = (0..elems.len()).collect();
            let strict = comparable_pairs_full(k, k) - elems.len() as u128;
            assert_eq!(strict, comparable_pairs(&elems, &all) as u128, "k = {k}");
        }
        // L(2, 3): 10 elements
        let elems = all_partitions(2, 3).unwrap();
        let all: Vec<usize> = (0..10).collect();
        assert_eq!(
            comparable_pairs_full(2, 3) - 10,
            comparable_pairs(&elems, &all) as u128
        );
    }

    #[test]
    fn middle_layer_alone_is_an_antichain() {
        let rows = supersaturation_probe(4, &[1], 0, 0).unwrap();
        let layer = rows
            .iter()
            .find(|r| r.strategy == ProbeStrategy::MiddleLayers)
            .unwrap();
        assert_eq!(layer.size, 8);
        assert_eq!(layer.min_density, 0.0);
        assert!(layer.below_threshold);
    }

    #[test]
    fn probe_is_reproducible() {
        let a = supersaturation_probe(4, &[9], 20, 11).unwrap();
        let b = supersaturation_probe(4, &[9], 20, 11).unwrap();
        assert_eq!(a[0].min_density, b[0].min_density);
        assert_eq!(a[0].mean_density, b[0].mean_density);
        assert!(supersaturation_probe(10, &[5], 1, 0).is_err());
        assert!(supersaturation_probe(3, &[21], 1, 0).is_err());
    }
}
