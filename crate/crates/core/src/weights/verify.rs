use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::optimize::rank_families;
use super::{canonical_weights, is_trivial_weight, prefix_sum, small_int, WeightFn, REL_MARGIN};
use crate::enumerate::enumerate_mlcifs;
use crate::error::{param_err, Result};
use crate::extension::extend_fast;
use crate::family::{type_of, Family, TypeTag};
use crate::report::{VerificationReport, Witness};
use crate::sets::{binomial, GroundParams};

/// Passes closer than this to the margin policy get a warning note.
const NEAR_MARGIN: f64 = 1e-6;

pub const CLAIM_BOUND: &str = "non-canonical-weight-bound";
pub const CLAIM_BEATEN: &str = "canonical-beats-non-canonical";
pub const CLAIM_OPTIMUM: &str = "optimum-is-canonical";

/// Smallest `n` for which the increasing-weight results are checked:
/// `3 k^3 C(2k, k)`.
pub fn theorem_threshold(k: u32) -> Option<u32> {
    let c = binomial(2 * k as u64, k as u64)?;
    (3 * (k as u128).pow(3)).checked_mul(c)?.try_into().ok()
}

/// `1 / C(2k, k)`.
fn c_k(k: u32) -> f64 {
    1.0 / binomial(2 * k as u64, k as u64).expect("C(2k, k) fits for supported k") as f64
}

/// A random increasing non-trivial weight on `[n]`.
///
/// Increments at positions `1..=2k+1` are 0 with probability 1/2 and
/// otherwise uniform on `{1,..,4}`; later increments are 0 except with
/// probability `4/n`, when they are uniform on `{1,..,4}`. The weight is
/// the prefix sum of the increments, so all values are small integers.
/// Trivial draws are rejected and redrawn from the same stream.
pub fn random_increasing_weight<R: Rng>(k: u32, n: u32, rng: &mut R) -> Result<WeightFn> {
    GroundParams::for_families(k, n)?;
    let late_p = (4.0 / n as f64).min(1.0);
    loop {
        let inc: Vec<f64> = (1..=n)
            .map(|j| {
                let p = if j <= 2 * k + 1 { 0.5 } else { late_p };
                if rng.gen_bool(p) {
                    small_int(rng, 4)
                } else {
                    0.0
                }
            })
            .collect();
        let w = WeightFn::dense(prefix_sum(&inc))?;
        if !is_trivial_weight(&w, k, n)? {
            return Ok(w);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TheoremCheck {
    Bound,
    Beaten,
    Optimum,
}

struct Outcome {
    check: TheoremCheck,
    ok: bool,
    margin: f64,
    typeless: bool,
    witness: Witness,
}

fn relative_gap(bound: f64, value: f64) -> f64 {
    if bound > 0.0 {
        (bound - value) / bound
    } else {
        f64::NEG_INFINITY
    }
}

fn check_sample(
    k: u32,
    n: u32,
    seed: u64,
    sample: usize,
    families: &[(Family, TypeTag)],
) -> Result<Vec<Outcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample as u64);
    let w = random_increasing_weight(k, n, &mut rng)?;
    let canon = canonical_weights(k, &w)?;
    let total: f64 = canon.iter().sum();
    let best_canon = canon.iter().copied().fold(0.0, f64::max);
    let c = c_k(k);

    let opt = rank_families(k, n, families.iter().map(|(f, _)| f.clone()).collect(), &w)?;
    let mut out = Vec::new();
    for (entry, (f, tag)) in opt.table.iter().zip(families) {
        if f.canonical_index().is_some() {
            continue;
        }
        let value = entry.weight;
        let (bound, typeless) = match tag {
            TypeTag::Typeless => (total / k as f64, true),
            TypeTag::Type(i) => (
                (1.0 - c) * canon[*i as usize - 1] + c * total / k as f64,
                false,
            ),
        };
        let margin = relative_gap(bound, value);
        out.push(Outcome {
            check: TheoremCheck::Bound,
            ok: margin > REL_MARGIN,
            margin,
            typeless,
            witness: Witness::new(format!(
                "sample {sample}: {tag} family weighs {value} against bound {bound}"
            ))
            .family(f)
            .margin(margin),
        });
        let margin = relative_gap(best_canon, value);
        out.push(Outcome {
            check: TheoremCheck::Beaten,
            ok: margin > REL_MARGIN,
            margin,
            typeless,
            witness: Witness::new(format!(
                "sample {sample}: family weighs {value}, best canonical weighs {best_canon}"
            ))
            .family(f)
            .margin(margin),
        });
    }

    let best_other = opt
        .table
        .iter()
        .filter(|e| e.family.canonical_index().is_none())
        .map(|e| e.weight)
        .fold(None, |acc: Option<f64>, x| {
            Some(acc.map_or(x, |a| a.max(x)))
        });
    let margin = best_other.map_or(1.0, |o| relative_gap(opt.max_weight, o));
    let all_canonical = opt.winners().all(|e| e.family.canonical_index().is_some());
    let mut witness = Witness::new(format!(
        "sample {sample}: optimum {} with weight {}",
        opt.winners()
            .map(|e| e.family.to_string())
            .collect::<Vec<_>>()
            .join(" | "),
        opt.max_weight
    ));
    if let Some(e) = opt.winners().find(|e| e.family.canonical_index().is_none()) {
        witness = witness.family(&e.family);
    }
    out.push(Outcome {
        check: TheoremCheck::Optimum,
        ok: all_canonical && margin > REL_MARGIN,
        margin,
        typeless: false,
        witness: witness.margin(margin),
    });
    Ok(out)
}

/// Samples increasing weights and checks, for every non-canonical MLCIF
/// on `[n]`: the biased-average upper bound on its weight, that some
/// canonical family outweighs it, and that every optimum is canonical.
///
/// Returns one report per property, in the order bound, beaten, optimum.
pub fn verify_increasing_theorems(
    k: u32,
    n: u32,
    samples: usize,
    seed: u64,
) -> Result<Vec<VerificationReport>> {
    let threshold = theorem_threshold(k).ok_or_else(|| param_err!("k = {k} is too large"))?;
    if n < threshold {
        return Err(param_err!(
            "n = {n} is below the required bound 3k^3 C(2k,k) = {threshold} for k = {k}"
        ));
    }
    let mk = enumerate_mlcifs(k)?;
    let families = mk
        .par_iter()
        .map(|f| {
            let g = extend_fast(f, n)?;
            let tag = type_of(&g)?;
            Ok((g, tag))
        })
        .collect::<Result<Vec<_>>>()?;

    let per_sample = (0..samples)
        .into_par_iter()
        .map(|s| check_sample(k, n, seed, s, &families))
        .collect::<Result<Vec<_>>>()?;

    let make = |claim, statement| {
        VerificationReport::new(claim, statement)
            .with_k(k)
            .with_n(n)
            .with_seed(seed, samples)
    };
    let mut reports = vec![
        make(
            CLAIM_BOUND,
            "a non-canonical MLCIF weighs less than its biased average of canonical weights",
        ),
        make(
            CLAIM_BEATEN,
            "every non-canonical MLCIF is outweighed by some canonical family",
        ),
        make(
            CLAIM_OPTIMUM,
            "every optimal MLCIF for an increasing weight is canonical",
        ),
    ];
    let (mut typeless, mut typed) = (0u64, 0u64);
    for outcome in per_sample.into_iter().flatten() {
        let r = &mut reports[outcome.check as usize];
        if outcome.check == TheoremCheck::Bound {
            if outcome.typeless {
                typeless += 1;
            } else {
                typed += 1;
            }
        }
        r.margin(outcome.margin);
        let w = outcome.witness;
        r.check(outcome.ok, || w);
    }

    let non_canonical = families
        .iter()
        .filter(|(f, _)| f.canonical_index().is_none())
        .count();
    for r in &mut reports[..2] {
        if non_canonical == 0 {
            r.note(format!("vacuous: every MLCIF for k = {k} is canonical"));
        }
    }
    reports[0].note(format!(
        "{non_canonical} non-canonical families; {typeless} typeless and {typed} typed bound checks"
    ));
    for r in &mut reports {
        if let Some(m) = r.min_margin {
            if r.passed() && m < NEAR_MARGIN {
                r.note(format!(
                    "warning: smallest margin {m:.3e} is close to the 1e-9 policy"
                ));
            }
        }
    }
    Ok(reports)
}
