//! Extending an MLCIF on `[2k]` to the unique MLCIF on `[n]` containing it.
//!
//! Two routes. [`extend_greedy`] materializes `C([n], k)` and adds addable
//! sets until nothing more fits; it is the ground truth at small `n`.
//! [`extend_fast`] works on boundaries only: it expands every boundary set
//! by pushing its tail to the top of `[n]` and keeps the maximal results,
//! so it runs at any `n`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::enumerate::greedy_fill;
use crate::error::{domain_err, integrity_err, param_err, Error, Result};
use crate::family::{check_family, check_members, Family, MATERIALIZE_LIMIT};
use crate::sets::{all_ksets, leq, GroundParams, KSet};

/// `{x_1, ..., x_j} ∪ [n-k+j+1, n]`, defined when exactly `k - j` elements of
/// `F` exceed `k + j`.
pub fn expand_set(f: &KSet, j: u32, n: u32) -> Result<KSet> {
    let k = f.k();
    if n < f.n() || n < 2 * k {
        return Err(param_err!(
            "target ground {n} is below the set's ground {} or 2k = {}",
            f.n(),
            2 * k
        ));
    }
    if !expansion_valid(f, j) {
        return Err(domain_err!(
            "j = {j} is not valid for {f}; valid j: {:?}",
            valid_expansions(f)
        ));
    }
    let elems = f.elements()[..j as usize]
        .iter()
        .copied()
        .chain(n - k + j + 1..=n)
        .collect();
    Ok(KSet::from_sorted(n, elems))
}

/// Largest `C(n, k)` at which [`extend_fast`] also checks its output member by
/// member.
const FULL_CHECK_LIMIT: u128 = 5_000;

fn expansion_valid(f: &KSet, j: u32) -> bool {
    let k = f.k();
    (1..=k).contains(&j) && k - f.count_at_most(k + j) == k - j
}

/// Every `j` for which [`expand_set`] applies to `F`.
pub fn valid_expansions(f: &KSet) -> Vec<u32> {
    (1..=f.k()).filter(|&j| expansion_valid(f, j)).collect()
}

fn check_input(f: &Family, n: u32) -> Result<GroundParams> {
    let GroundParams { k, n: m } = f.params();
    let target = GroundParams::for_families(k, n)?;
    f.params().require_family_range()?;
    if n < m {
        return Err(param_err!("cannot extend from [{m}] down to [{n}]"));
    }
    Ok(target)
}

fn materializable(params: GroundParams) -> Result<()> {
    if params.universe_size().is_none_or(|s| s > MATERIALIZE_LIMIT) {
        return Err(Error::ScaleGuard(format!(
            "C(n, k) is too large for greedy extension at ({params})"
        )));
    }
    Ok(())
}

fn lifted_members(f: &Family, n: u32) -> Result<BTreeSet<KSet>> {
    f.members()?.iter().map(|m| m.with_ground(n)).collect()
}

/// Greedy fixed point: repeatedly add the lexicographically least LC-minimal
/// set meeting every member. Any left-compressed intersecting superset of
/// `f` sits inside the unique maximal one, so the order does not matter.
pub fn extend_greedy(f: &Family, n: u32) -> Result<Family> {
    extend_greedy_by(f, n, |_| 0)
}

/// [`extend_greedy`] with a seeded random choice among the candidates.
pub fn extend_greedy_shuffled(f: &Family, n: u32, seed: u64) -> Result<Family> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    extend_greedy_by(f, n, move |c| rng.gen_range(0..c.len()))
}

fn extend_greedy_by(f: &Family, n: u32, pick: impl FnMut(&[KSet]) -> usize) -> Result<Family> {
    let params = check_input(f, n)?;
    materializable(params)?;
    let start = lifted_members(f, n)?;
    let flags = check_members(params, &start.iter().cloned().collect::<Vec<_>>())?;
    if !flags.intersecting || !flags.left_compressed {
        return Err(domain_err!("{f} is not left-compressed and intersecting"));
    }
    let filled = greedy_fill(params, start, pick);
    let v: Vec<KSet> = filled.into_iter().collect();
    Family::from_members(params, &v)
}

/// Boundary-only extension.
///
/// Candidates are the boundary sets of `f` (viewed in `[n]`) and all their
/// valid expansions; the result is their maximal elements. A verification
/// pass then checks the output is intersecting and contains `f`.
pub fn extend_fast(f: &Family, n: u32) -> Result<Family> {
    let params = check_input(f, n)?;
    let mut cands = BTreeSet::new();
    for b in f.boundary() {
        cands.insert(b.with_ground(n)?);
        for j in valid_expansions(b) {
            cands.insert(expand_set(b, j, n)?);
        }
    }
    let cands: Vec<KSet> = cands.into_iter().collect();
    let maximal: Vec<KSet> = cands
        .iter()
        .filter(|c| !cands.iter().any(|d| d != *c && leq(c, d)))
        .cloned()
        .collect();
    let out = Family::from_sorted_antichain(params, maximal);

    if !out.is_intersecting_by_boundary() {
        return Err(integrity_err!(
            "fast extension of {f} to [{n}] is not intersecting: {out}"
        ));
    }
    for b in f.boundary() {
        let lifted = b.with_ground(n)?;
        if !out.contains(&lifted) {
            return Err(integrity_err!(
                "fast extension of {f} to [{n}] lost boundary set {b}"
            ));
        }
    }
    if params
        .universe_size()
        .is_some_and(|s| s <= FULL_CHECK_LIMIT)
    {
        let flags = check_family(&out)?;
        if !flags.is_mlcif() {
            return Err(integrity_err!(
                "fast extension of {f} to [{n}] is not an MLCIF: {flags:?}"
            ));
        }
    }
    Ok(out)
}

/// Every maximal left-compressed intersecting family on `[n]`, found by
/// direct search over down-sets of `C([n], k)`. Independent of `M_k`.
pub fn mlcifs_on_n(k: u32, n: u32) -> Result<Vec<Family>> {
    let params = GroundParams::for_families(k, n)?;
    let size = params.universe_size().unwrap_or(u128::MAX);
    if size > 128 {
        return Err(Error::ScaleGuard(format!(
            "direct search over C({n},{k}) = {size} sets refused (limit 128)"
        )));
    }
    // a linear extension of the LC order: sort by element sum
    let mut sets: Vec<KSet> = all_ksets(params).collect();
    sets.sort_by_key(|s| (crate::sets::element_sum(s), s.clone()));
    let bit = |s: &KSet| -> u128 { 1u128 << sets.iter().position(|t| t == s).unwrap() };
    let lower: Vec<u128> = sets
        .iter()
        .map(|s| s.lower_covers().iter().map(bit).fold(0, |a, b| a | b))
        .collect();
    let disjoint: Vec<u128> = sets
        .iter()
        .map(|s| {
            sets.iter()
                .enumerate()
                .filter(|(_, t)| !s.intersects(t))
                .fold(0u128, |a, (j, _)| a | 1 << j)
        })
        .collect();
    let all_mask: u128 = if sets.len() == 128 {
        u128::MAX
    } else {
        (1u128 << sets.len()) - 1
    };

    struct Ctx<'a> {
        lower: &'a [u128],
        disjoint: &'a [u128],
        all: u128,
    }
    // Decide sets in order. `chosen` is down-closed among decided sets.
    fn rec(ctx: &Ctx, i: usize, chosen: u128, out: &mut Vec<u128>) {
        if i == ctx.lower.len() {
            // maximal iff every LC-minimal non-member is blocked by a member
            let maximal = (0..ctx.lower.len()).all(|g| {
                chosen >> g & 1 == 1 || ctx.lower[g] & !chosen != 0 || ctx.disjoint[g] & chosen != 0
            });
            if maximal {
                out.push(chosen);
            }
            return;
        }
        let addable = ctx.lower[i] & !chosen == 0 && ctx.disjoint[i] & chosen == 0;
        if addable {
            rec(ctx, i + 1, chosen | 1 << i, out);
        }
        // Leaving out an addable set is only viable if some later set that
        // is disjoint from it may still join.
        let later = ctx.all & !((1u128 << i << 1).wrapping_sub(1));
        if !addable || ctx.disjoint[i] & later != 0 {
            rec(ctx, i + 1, chosen, out);
        }
    }
    let ctx = Ctx {
        lower: &lower,
        disjoint: &disjoint,
        all: all_mask,
    };
    let mut found = Vec::new();
    rec(&ctx, 0, 0, &mut found);
    let mut fams: Vec<Family> = found
        .into_iter()
        .map(|m| {
            let members: Vec<KSet> = (0..sets.len())
                .filter(|&j| m >> j & 1 == 1)
                .map(|j| sets[j].clone())
                .collect();
            Family::from_members(params, &members)
        })
        .collect::<Result<_>>()?;
    fams.sort();
    Ok(fams)
}

pub fn count_mlcifs_on_n(k: u32, n: u32) -> Result<usize> {
    Ok(mlcifs_on_n(k, n)?.len())
}
