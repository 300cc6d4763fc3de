//! Product-form weights on k-sets and exact family weights at large `n`.
//!
//! A weight function gives each element of `[n]` a nonnegative value; a set
//! weighs the product of its elements and a family the sum over its sets.
//! Families are never materialized here: a down-set `LC(B)` is summed by a
//! prefix-sum recurrence, and a union of down-sets by inclusion–exclusion
//! over meets of boundary sets.

mod optimize;
mod verify;

use std::collections::BTreeMap;
use std::ops::{Add, Mul};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain_err, param_err, Error, Result};
use crate::family::{canonical_family, Family};
use crate::sets::{meet_unchecked, GroundParams, KSet};

pub use optimize::{optimize, optimize_over, Optimum};
pub use verify::{
    random_increasing_weight, theorem_threshold, verify_increasing_theorems, CLAIM_BEATEN,
    CLAIM_BOUND, CLAIM_OPTIMUM,
};

/// Relative slack used for every strict-inequality and argmax decision.
pub const REL_MARGIN: f64 = 1e-9;

/// Boundary size above which inclusion–exclusion is refused.
pub const MAX_IE_BOUNDARY: usize = 25;

#[derive(Clone, Debug, PartialEq)]
pub struct WeightFn {
    /// `values[x - 1] = ω(x)`
    values: Vec<f64>,
}

impl WeightFn {
    pub fn dense(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(param_err!("a weight function needs n >= 1 values"));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(domain_err!(
                "ω({}) = {v} is not a nonnegative finite number",
                i + 1
            ));
        }
        Ok(WeightFn { values })
    }

    pub fn constant(n: u32, c: f64) -> Result<Self> {
        Self::dense(vec![c; n as usize])
    }

    /// Piecewise-constant: `ω(j)` is the value of the last step with
    /// `from <= j`, and 0 before the first step.
    pub fn steps(n: u32, steps: &[(u32, f64)]) -> Result<Self> {
        if steps.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(param_err!("step thresholds must be strictly increasing"));
        }
        if let Some((from, _)) = steps.iter().find(|(f, _)| *f == 0 || *f > n) {
            return Err(param_err!("step threshold {from} is outside [1, {n}]"));
        }
        let mut values = vec![0.0; n as usize];
        for (idx, &(from, v)) in steps.iter().enumerate() {
            let end = steps.get(idx + 1).map_or(n, |s| s.0 - 1);
            values[from as usize - 1..end as usize].fill(v);
        }
        Self::dense(values)
    }

    pub fn n(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn at(&self, x: u32) -> f64 {
        self.values[x as usize - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::dense(self.values.iter().map(|v| v * c).collect())
    }

    /// Run-length steps, the compact file form.
    pub fn to_steps(&self) -> Vec<(u32, f64)> {
        let mut out: Vec<(u32, f64)> = Vec::new();
        for (i, &v) in self.values.iter().enumerate() {
            if out.last().is_none_or(|&(_, last)| last != v) {
                out.push((i as u32 + 1, v));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let file = WeightFile::Steps {
            n: self.n(),
            steps: self
                .to_steps()
                .into_iter()
                .map(|(from, value)| Step { from, value })
                .collect(),
        };
        serde_json::to_string(&file).expect("weight files always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        match serde_json::from_str::<WeightFile>(s)? {
            WeightFile::Dense { n, dense } => {
                if dense.len() != n as usize {
                    return Err(param_err!(
                        "dense weight list has {} entries, expected n = {n}",
                        dense.len()
                    ));
                }
                Self::dense(dense)
            }
            WeightFile::Steps { n, steps } => Self::steps(
                n,
                &steps.iter().map(|s| (s.from, s.value)).collect::<Vec<_>>(),
            ),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum WeightFile {
    Dense { n: u32, dense: Vec<f64> },
    Steps { n: u32, steps: Vec<Step> },
}

#[derive(Serialize, Deserialize)]
struct Step {
    from: u32,
    value: f64,
}

fn check_fits(f: &KSet, w: &WeightFn) -> Result<()> {
    if f.n() > w.n() {
        return Err(param_err!(
            "{f} lives on [{}] but ω is only defined on [{}]",
            f.n(),
            w.n()
        ));
    }
    Ok(())
}

/// `∏_{x ∈ F} ω(x)`.
pub fn weight_of_set(f: &KSet, w: &WeightFn) -> Result<f64> {
    check_fits(f, w)?;
    Ok(f.elements().iter().map(|&x| w.at(x)).product())
}

/// `Σ_{G <=_LC B} value(G)` for a product weight, by
/// `D(i, t) = ω(t) · Σ_{s < t} D(i-1, s)` restricted to `t <= b_i`.
fn downset_sum<T>(b: &KSet, zero: T, elem: impl Fn(u32) -> T) -> T
where
    T: Copy + Add<Output = T> + Mul<Output = T>,
{
    let e = b.elements();
    let top = *e.last().unwrap() as usize;
    // layer[t] = D(i, t) for t in 1..=top (index 0 unused)
    let mut layer = vec![zero; top + 1];
    for (t, slot) in layer.iter_mut().enumerate().take(e[0] as usize + 1).skip(1) {
        *slot = elem(t as u32);
    }
    for &bound in &e[1..] {
        let mut next = vec![zero; top + 1];
        let mut prefix = zero;
        for t in 1..=bound as usize {
            next[t] = elem(t as u32) * prefix;
            prefix = prefix + layer[t];
        }
        layer = next;
    }
    layer.into_iter().fold(zero, |a, b| a + b)
}

/// Exact `Σ_{G <=_LC B} ω(G)` in `O(n k)`.
pub fn downset_weight(b: &KSet, w: &WeightFn) -> Result<f64> {
    check_fits(b, w)?;
    Ok(downset_sum(b, 0.0, |x| w.at(x)))
}

/// `|LC(B)|`, exactly.
pub fn downset_count(b: &KSet) -> u128 {
    downset_sum(b, 0u128, |_| 1u128)
}

/// Signed down-set terms whose weighted sum is the weight of
/// `⋃ LC(B_i)`: adding `B` to a union contributes `+LC(B)` and subtracts
/// the old terms met with `B`.
pub fn inclusion_exclusion_terms(boundary: &[KSet]) -> Result<BTreeMap<KSet, i64>> {
    if boundary.len() > MAX_IE_BOUNDARY {
        return Err(Error::ScaleGuard(format!(
            "{} boundary sets exceed the inclusion–exclusion cap of {MAX_IE_BOUNDARY}; sum the members directly instead",
            boundary.len()
        )));
    }
    let mut terms: BTreeMap<KSet, i64> = BTreeMap::new();
    for b in boundary {
        let mut delta: BTreeMap<KSet, i64> = BTreeMap::new();
        *delta.entry(b.clone()).or_default() += 1;
        for (m, c) in &terms {
            *delta.entry(meet_unchecked(m, b)).or_default() -= c;
        }
        for (m, c) in delta {
            *terms.entry(m).or_default() += c;
        }
        terms.retain(|_, c| *c != 0);
    }
    Ok(terms)
}

/// `ω(F)` for a family given by its boundary, via inclusion–exclusion.
pub fn family_weight(f: &Family, w: &WeightFn) -> Result<f64> {
    let terms = inclusion_exclusion_terms(f.boundary())?;
    let mut total = 0.0;
    for (m, c) in &terms {
        total += *c as f64 * downset_weight(m, w)?;
    }
    Ok(total)
}

/// `ω(F)` by summing every member; needs a materializable family.
pub fn family_weight_direct(f: &Family, w: &WeightFn) -> Result<f64> {
    let mut total = 0.0;
    for m in f.members()? {
        total += weight_of_set(m, w)?;
    }
    Ok(total)
}

/// `ω_i(j) = 0` for `j < i`, else 1.
pub fn make_omega_i(i: u32, n: u32) -> Result<WeightFn> {
    if i == 0 || i > n {
        return Err(param_err!("threshold {i} is outside [1, {n}]"));
    }
    WeightFn::steps(n, &[(i, 1.0)]).or_else(|_| unreachable!())
}

/// `ω(<i>)` for every `i ∈ [k]`.
pub fn canonical_weights(k: u32, w: &WeightFn) -> Result<Vec<f64>> {
    let params = GroundParams::for_families(k, w.n())?;
    (1..=k)
        .map(|i| family_weight(&canonical_family(i, params)?, w))
        .collect()
}

/// Every MLCIF weighs zero iff every canonical family does, since each
/// member of an MLCIF lies in some canonical family.
pub fn is_trivial_weight(w: &WeightFn, k: u32, n: u32) -> Result<bool> {
    if w.n() != n {
        return Err(param_err!("ω is defined on [{}], expected [{n}]", w.n()));
    }
    Ok(canonical_weights(k, w)?.iter().all(|&x| x == 0.0))
}

/// Draws `n` increments and prefix-sums them; see
/// [`random_increasing_weight`] for the distribution.
pub(crate) fn prefix_sum(increments: &[f64]) -> Vec<f64> {
    increments
        .iter()
        .scan(0.0, |acc, d| {
            *acc += d;
            Some(*acc)
        })
        .collect()
}

pub(crate) fn small_int<R: Rng>(rng: &mut R, hi: u32) -> f64 {
    rng.gen_range(1..=hi) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{all_ksets, down_set};

    fn ks(n: u32, e: &[u32]) -> KSet {
        KSet::new(n, e.to_vec()).unwrap()
    }

    fn w1234() -> WeightFn {
        WeightFn::dense(vec![1.0, 2.0, 3.0, 4.0]).unwrap()
    }

    #[test]
    fn set_weight_examples() {
        let one = WeightFn::constant(7, 1.0).unwrap();
        for f in all_ksets(GroundParams::new(3, 7).unwrap()) {
            assert_eq!(weight_of_set(&f, &one).unwrap(), 1.0);
        }
        assert_eq!(weight_of_set(&ks(4, &[2, 3]), &w1234()).unwrap(), 6.0);
        let w2 = make_omega_i(2, 144).unwrap();
        assert_eq!(weight_of_set(&ks(144, &[1, 5]), &w2).unwrap(), 0.0);
        assert!(weight_of_set(&ks(5, &[1, 5]), &w1234()).is_err());
    }

    #[test]
    fn downset_worked_value() {
        assert_eq!(downset_weight(&ks(4, &[2, 3]), &w1234()).unwrap(), 11.0);
        let b = ks(5, &[1, 2, 3]);
        let w = WeightFn::dense(vec![2.0, 3.0, 5.0, 7.0, 11.0]).unwrap();
        assert_eq!(downset_weight(&b, &w).unwrap(), 30.0);
    }

    #[test]
    fn downset_count_matches_enumeration() {
        for k in 1..=3 {
            for n in k..=10 {
                for b in all_ksets(GroundParams::new(k, n).unwrap()) {
                    assert_eq!(downset_count(&b), down_set(&b).len() as u128, "{b}");
                    let one = WeightFn::constant(n, 1.0).unwrap();
                    assert_eq!(downset_weight(&b, &one).unwrap(), down_set(&b).len() as f64);
                }
            }
        }
    }

    #[test]
    fn family_weight_examples() {
        let p = GroundParams::new(2, 4).unwrap();
        let c1 = canonical_family(1, p).unwrap();
        assert_eq!(family_weight(&c1, &w1234()).unwrap(), 9.0);
        assert_eq!(family_weight_direct(&c1, &w1234()).unwrap(), 9.0);

        let p = GroundParams::new(4, 12).unwrap();
        let (b1, b2) = (ks(12, &[1, 2, 11, 12]), ks(12, &[2, 4, 5, 12]));
        let fam = Family::from_boundary(p, vec![b1.clone(), b2.clone()]).unwrap();
        let terms = inclusion_exclusion_terms(fam.boundary()).unwrap();
        let expect: BTreeMap<KSet, i64> = [(b1, 1), (b2, 1), (ks(12, &[1, 2, 5, 12]), -1)]
            .into_iter()
            .collect();
        assert_eq!(terms, expect);
        let w = WeightFn::dense((1..=12).map(|x| x as f64).collect()).unwrap();
        assert_eq!(
            family_weight(&fam, &w).unwrap(),
            family_weight_direct(&fam, &w).unwrap()
        );
    }

    #[test]
    fn ie_cap() {
        let p = GroundParams::new(13, 26).unwrap();
        // 26 pairwise incomparable 13-sets: two blocks of consecutive sets
        // shifted against each other are fine; use a simple antichain
        let anti: Vec<KSet> = all_ksets(GroundParams::new(13, 26).unwrap())
            .filter(|s| crate::sets::element_sum(s) == 13 * 27 / 2 + 7)
            .take(26)
            .collect();
        let fam = Family::from_boundary(p, anti).unwrap();
        let w = WeightFn::constant(26, 1.0).unwrap();
        assert!(matches!(family_weight(&fam, &w), Err(Error::ScaleGuard(_))));
    }

    #[test]
    fn omega_i_examples() {
        assert_eq!(
            make_omega_i(1, 5).unwrap(),
            WeightFn::constant(5, 1.0).unwrap()
        );
        assert_eq!(make_omega_i(2, 4).unwrap().values(), &[0.0, 1.0, 1.0, 1.0]);
        let w = make_omega_i(3, 9).unwrap();
        assert!(w.is_increasing());
        for f in all_ksets(GroundParams::new(3, 9).unwrap()) {
            let expect = if f.elements()[0] >= 3 { 1.0 } else { 0.0 };
            assert_eq!(weight_of_set(&f, &w).unwrap(), expect);
        }
    }

    #[test]
    fn triviality() {
        assert!(is_trivial_weight(&WeightFn::constant(4, 0.0).unwrap(), 2, 4).unwrap());
        assert!(!is_trivial_weight(&WeightFn::constant(4, 1.0).unwrap(), 2, 4).unwrap());
        let last_only = WeightFn::steps(144, &[(144, 1.0)]).unwrap();
        assert!(is_trivial_weight(&last_only, 2, 144).unwrap());
        // {143,144} weighs 1 but lies in no MLCIF
        assert!(is_trivial_weight(&WeightFn::steps(144, &[(143, 1.0)]).unwrap(), 2, 144).unwrap());
        assert!(!is_trivial_weight(&WeightFn::steps(144, &[(2, 1.0)]).unwrap(), 2, 144).unwrap());
    }

    #[test]
    fn weight_file_forms() {
        let w =
            WeightFn::from_json(r#"{"n":6,"steps":[{"from":1,"value":0},{"from":3,"value":1}]}"#)
                .unwrap();
        assert_eq!(w.values(), &[0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(WeightFn::from_json(&w.to_json()).unwrap(), w);
        let d = WeightFn::from_json(r#"{"n":3,"dense":[1,2,2.5]}"#).unwrap();
        assert_eq!(d.values(), &[1.0, 2.0, 2.5]);
        assert!(WeightFn::from_json(r#"{"n":4,"dense":[1,2]}"#).is_err());
        assert!(WeightFn::from_json(r#"{"n":2,"dense":[1,-2]}"#).is_err());
        assert!(WeightFn::from_json(
            r#"{"n":4,"steps":[{"from":3,"value":1},{"from":2,"value":2}]}"#
        )
        .is_err());
        let late = WeightFn::steps(4, &[(3, 2.0)]).unwrap();
        assert_eq!(late.values(), &[0.0, 0.0, 2.0, 2.0]);
    }
}
