//! Bound arithmetic for `|M_k|`, kept in log2 since the bounds themselves
//! are doubly exponential.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::{pk_count, prodinger_ratio, rank_sizes};
use crate::error::{param_err, Result};
use crate::sets::binomial;

const LN2: f64 = std::f64::consts::LN_2;

/// Relative tolerance for comparing log2 quantities.
const LOG_TOL: f64 = 1e-9;

/// Largest `k` whose lattice counts still fit in 128 bits.
pub const MAX_BOUNDS_K: u32 = 60;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub k: u32,
    /// `½ C(k-1, ⌊k/2⌋)`
    pub log2_lower: f64,
    /// `½ C(2k, k)`
    pub log2_upper: f64,
    /// `(1/9) k^{-3/2} C(2k, k)`, valid only for large k
    pub log2_lower_asym: f64,
    /// `7 log2(k) k^{-3/2} C(2k, k)`, valid only for large k
    pub log2_upper_asym: f64,
    /// Largest rank of `L(k, k)`, the antichain size `q`.
    pub antichain_q: u128,
    /// `log2 Σ_{i=1}^{q} C(C(2k,k), i)`
    pub log2_antichain_bound: f64,
    pub mk: Option<u128>,
    pub log2_mk: Option<f64>,
    pub pk: Option<u128>,
    pub prodinger: Option<f64>,
    /// Whether the known count sits inside the all-k bounds and under the
    /// antichain bound; `None` when the count is unknown.
    pub sandwich: Option<bool>,
}

pub const BOUNDS_CSV_HEADER: &str = "k,log2_lower,log2_upper,log2_lower_asym,log2_upper_asym,antichain_q,log2_antichain_bound,mk,log2_mk,pk,prodinger_ratio,sandwich";

impl BoundsRow {
    pub fn csv_row(&self) -> String {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(T::to_string).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.k,
            self.log2_lower,
            self.log2_upper,
            self.log2_lower_asym,
            self.log2_upper_asym,
            self.antichain_q,
            self.log2_antichain_bound,
            opt(&self.mk),
            opt(&self.log2_mk),
            opt(&self.pk),
            opt(&self.prodinger),
            opt(&self.sandwich)
        )
    }
}

fn ln_binomial(n: f64, i: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(i + 1.0) - ln_gamma(n - i + 1.0)
}

/// `log2 Σ_{i=1}^{q} C(n, i)` for `q <= n/2`, where the terms grow with
/// `i`: summed from `i = q` down, each term relative to the last via
/// `C(n, i-1) / C(n, i) = i / (n - i + 1)`, until the rest cannot matter.
fn log2_binomial_prefix(n: u128, q: u128) -> f64 {
    let (nf, top) = (n as f64, ln_binomial(n as f64, q as f64));
    let (mut acc, mut cur) = (0.0, 1.0);
    let mut i = q;
    while i >= 1 && cur > 1e-30 {
        acc += cur;
        cur *= i as f64 / (nf - i as f64 + 1.0);
        i -= 1;
    }
    (top + acc.ln()) / LN2
}

fn leq_tol(a: f64, b: f64) -> bool {
    a <= b + LOG_TOL * b.abs().max(1.0)
}

/// One row per `k` in `kmin..=kmax`, using `counts` for the known values
/// of `|M_k|`.
pub fn theorem1_report(
    kmin: u32,
    kmax: u32,
    counts: &BTreeMap<u32, u128>,
) -> Result<Vec<BoundsRow>> {
    if kmin < 2 || kmin > kmax || kmax > MAX_BOUNDS_K {
        return Err(param_err!(
            "bounds need 2 <= kmin <= kmax <= {MAX_BOUNDS_K}, got {kmin}..={kmax}"
        ));
    }
    (kmin..=kmax)
        .map(|k| {
            let central_exact = binomial(2 * k as u64, k as u64).expect("k <= 60");
            let central = central_exact as f64;
            let kf = k as f64;
            let scale = kf.powf(-1.5) * central;
            let q = *rank_sizes(k, k)?.iter().max().expect("nonempty");
            let log2_antichain_bound = log2_binomial_prefix(central_exact, q);
            let log2_lower = 0.5 * binomial(k as u64 - 1, k as u64 / 2).expect("small") as f64;
            let log2_upper = 0.5 * central;
            let mk = counts.get(&k).copied();
            let log2_mk = mk.map(|c| (c as f64).log2());
            let (pk, prodinger) = if k % 2 == 0 {
                (Some(pk_count(k)?), Some(prodinger_ratio(k)?))
            } else {
                (None, None)
            };
            Ok(BoundsRow {
                k,
                log2_lower,
                log2_upper,
                log2_lower_asym: scale / 9.0,
                log2_upper_asym: 7.0 * kf.log2() * scale,
                antichain_q: q,
                log2_antichain_bound,
                mk,
                log2_mk,
                pk,
                prodinger,
                sandwich: log2_mk.map(|l| {
                    leq_tol(log2_lower, l)
                        && leq_tol(l, log2_upper)
                        && leq_tol(l, log2_antichain_bound)
                }),
            })
        })
        .collect()
}
