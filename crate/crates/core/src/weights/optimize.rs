use rayon::prelude::*;
use serde::Serialize;

use super::{family_weight, is_trivial_weight, WeightFn, REL_MARGIN};
use crate::enumerate::enumerate_mlcifs;
use crate::error::{domain_err, param_err, Result};
use crate::extension::extend_fast;
use crate::family::Family;
use crate::sets::GroundParams;

#[derive(Clone, Debug, Serialize)]
pub struct WeightedFamily {
    #[serde(serialize_with = "as_record")]
    pub family: Family,
    pub weight: f64,
}

fn as_record<S: serde::Serializer>(f: &Family, s: S) -> std::result::Result<S::Ok, S::Error> {
    f.to_record().serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct Optimum {
    pub k: u32,
    pub n: u32,
    /// Every MLCIF on `[n]` with its weight, in the order of `M_k`.
    pub table: Vec<WeightedFamily>,
    /// Indices into `table` within relative tolerance of the maximum.
    pub argmax: Vec<usize>,
    pub max_weight: f64,
    pub unique: bool,
    /// `(max - runner_up) / max`, when there is a runner-up.
    pub gap: Option<f64>,
    pub warnings: Vec<String>,
}

impl Optimum {
    pub fn winners(&self) -> impl Iterator<Item = &WeightedFamily> {
        self.argmax.iter().map(|&i| &self.table[i])
    }

    /// The canonical index of the winner, if the optimum is a single
    /// canonical family.
    pub fn unique_canonical(&self) -> Option<u32> {
        match self.argmax.as_slice() {
            [i] if self.unique => self.table[*i].family.canonical_index(),
            _ => None,
        }
    }
}

/// Maximizes `ω` over all of `M_k`, extended to `[n]`.
pub fn optimize(k: u32, n: u32, w: &WeightFn) -> Result<Optimum> {
    let mk = enumerate_mlcifs(k)?;
    optimize_over(&mk, k, n, w)
}

/// As [`optimize`], over a precomputed `M_k` (families on `[2k]`).
pub fn optimize_over(mk: &[Family], k: u32, n: u32, w: &WeightFn) -> Result<Optimum> {
    GroundParams::for_families(k, n)?;
    if w.n() != n {
        return Err(param_err!("ω is defined on [{}], expected [{n}]", w.n()));
    }
    if let Some(f) = mk.iter().find(|f| f.k() != k || f.n() != 2 * k) {
        return Err(param_err!("{f} is not a family on [{}] of {k}-sets", 2 * k));
    }
    let extended = mk
        .par_iter()
        .map(|f| extend_fast(f, n))
        .collect::<Result<Vec<_>>>()?;
    rank_families(k, n, extended, w)
}

/// Weighs families already on `[n]` and picks the maximum.
pub(crate) fn rank_families(
    k: u32,
    n: u32,
    families: Vec<Family>,
    w: &WeightFn,
) -> Result<Optimum> {
    if is_trivial_weight(w, k, n)? {
        return Err(domain_err!(
            "ω is trivial: every canonical family, and hence every MLCIF, weighs zero"
        ));
    }
    let mut warnings = Vec::new();
    if !w.is_increasing() {
        warnings.push("ω is not increasing; the optimum need not be canonical".to_string());
    }

    let table = families
        .into_par_iter()
        .map(|family| {
            let weight = family_weight(&family, w)?;
            Ok(WeightedFamily { family, weight })
        })
        .collect::<Result<Vec<_>>>()?;

    let max_weight = table
        .iter()
        .map(|e| e.weight)
        .fold(f64::NEG_INFINITY, f64::max);
    let floor = max_weight - REL_MARGIN * max_weight.abs();
    let argmax: Vec<usize> = (0..table.len())
        .filter(|&i| table[i].weight >= floor)
        .collect();
    let runner_up = table
        .iter()
        .enumerate()
        .filter(|(i, _)| !argmax.contains(i))
        .map(|(_, e)| e.weight)
        .fold(None, |acc: Option<f64>, x| {
            Some(acc.map_or(x, |a| a.max(x)))
        });
    let gap = runner_up.map(|r| (max_weight - r) / max_weight);
    Ok(Optimum {
        k,
        n,
        unique: argmax.len() == 1,
        table,
        argmax,
        max_weight,
        gap,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::make_omega_i;

    #[test]
    fn all_ones_picks_the_star() {
        let w = WeightFn::constant(144, 1.0).unwrap();
        let opt = optimize(2, 144, &w).unwrap();
        assert_eq!(opt.unique_canonical(), Some(1));
        assert_eq!(opt.max_weight, 143.0);
        let other: Vec<f64> = opt
            .table
            .iter()
            .map(|e| e.weight)
            .filter(|&x| x != 143.0)
            .collect();
        assert_eq!(other, vec![3.0]);
    }

    #[test]
    fn omega_two_picks_second_canonical() {
        let opt = optimize(2, 144, &make_omega_i(2, 144).unwrap()).unwrap();
        assert_eq!(opt.unique_canonical(), Some(2));
        assert!(opt.warnings.is_empty());
    }

    #[test]
    fn trivial_weight_is_refused() {
        let w = WeightFn::steps(144, &[(144, 1.0)]).unwrap();
        assert!(optimize(2, 144, &w).is_err());
        assert!(optimize(2, 143, &WeightFn::constant(144, 1.0).unwrap()).is_err());
    }

    #[test]
    fn non_increasing_warns() {
        let mut v = vec![1.0; 10];
        v[0] = 5.0;
        let opt = optimize(2, 10, &WeightFn::dense(v).unwrap()).unwrap();
        assert_eq!(opt.warnings.len(), 1);
    }
}
