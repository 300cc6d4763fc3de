//! Exhaustive enumeration of `M_k`, the k-uniform MLCIFs on `[2k]`.
//!
//! On `[2k]` two k-sets are disjoint exactly when they are complements, so
//! an MLCIF picks one set from each complementary pair and is closed
//! downward. The search branches on undecided pairs and propagates:
//!
//! * `F` in  ⇒ everything below `F` in, and `F^c` out;
//! * `F` out ⇒ everything above `F` out, and `F^c` in.
//!
//! Every propagated state extends to an MLCIF, so each leaf of the search
//! is one family and there are no dead ends.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{domain_err, integrity_err, param_err, Error, Result};
use crate::family::{check_members, Family};
use crate::sets::{all_ksets, binomial, complement_in_2k, element_sum, leq, GroundParams, KSet};

/// Fixed-width bitset over the universe `C([2k], k)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn or_assign(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    fn meets(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + b)
            })
        })
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// `C([2k], k)` indexed by colex rank, with down-set and up-set bitmaps.
pub(crate) struct Universe {
    pub(crate) params: GroundParams,
    pub(crate) sets: Vec<KSet>,
    comp: Vec<usize>,
    down: Vec<Bits>,
    up: Vec<Bits>,
    upper_covers: Vec<Vec<usize>>,
}

/// Colex rank `sum_i C(x_i - 1, i)`.
pub fn colex_rank(f: &KSet) -> usize {
    f.elements()
        .iter()
        .enumerate()
        .map(|(i, &x)| binomial(x as u64 - 1, i as u64 + 1).unwrap() as usize)
        .sum()
}

impl Universe {
    pub(crate) fn new(k: u32) -> Result<Self> {
        let params = GroundParams::for_families(k, 2 * k)?;
        let size = params
            .universe_size()
            .filter(|&s| s <= 20_000)
            .ok_or_else(|| {
                Error::ScaleGuard(format!(
                    "C({}, {k}) is too large for bitmap propagation",
                    2 * k
                ))
            })? as usize;
        let mut sets: Vec<KSet> = all_ksets(params).collect();
        sets.sort_by_key(colex_rank);
        debug_assert!(sets.iter().enumerate().all(|(i, s)| colex_rank(s) == i));
        let index: HashMap<&KSet, usize> = sets.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let comp = sets
            .iter()
            .map(|s| index[&complement_in_2k(s).unwrap()])
            .collect();
        let mut down = vec![Bits::new(size); size];
        let mut up = vec![Bits::new(size); size];
        for (i, a) in sets.iter().enumerate() {
            for (j, b) in sets.iter().enumerate() {
                if leq(a, b) {
                    down[j].set(i);
                    up[i].set(j);
                }
            }
        }
        let upper_covers = sets
            .iter()
            .map(|s| s.upper_covers().iter().map(|c| index[c]).collect())
            .collect();
        Ok(Universe {
            params,
            sets,
            comp,
            down,
            up,
            upper_covers,
        })
    }

    fn len(&self) -> usize {
        self.sets.len()
    }

    /// Closes `(inn, out)` under the propagation rules. A set landing on
    /// both sides is an integrity error.
    fn propagate(&self, inn: &mut Bits, out: &mut Bits) -> Result<()> {
        loop {
            let (mut next_in, mut next_out) = (inn.clone(), out.clone());
            for f in inn.ones() {
                next_in.or_assign(&self.down[f]);
                next_out.set(self.comp[f]);
            }
            for f in out.ones() {
                next_out.or_assign(&self.up[f]);
                next_in.set(self.comp[f]);
            }
            if next_in == *inn && next_out == *out {
                break;
            }
            *inn = next_in;
            *out = next_out;
        }
        if inn.meets(out) {
            let bad = inn.ones().find(|&i| out.get(i)).unwrap();
            return Err(integrity_err!(
                "propagation put {} both in and out",
                self.sets[bad]
            ));
        }
        Ok(())
    }

    fn family_of(&self, inn: &Bits) -> Family {
        let mut boundary: Vec<KSet> = inn
            .ones()
            .filter(|&i| self.upper_covers[i].iter().all(|&c| !inn.get(c)))
            .map(|i| self.sets[i].clone())
            .collect();
        boundary.sort();
        Family::from_sorted_antichain(self.params, boundary)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Representative,
    Complement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairState {
    Undecided,
    /// Settled by comparability or propagation before any branching.
    Forced(Side),
    /// Settled by a search decision.
    Chosen(Side),
}

/// One complementary pair `{F, F^c}`; the representative is the member with
/// the smaller element sum (lexicographically smaller on ties).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairDecision {
    pub representative: KSet,
    pub complement: KSet,
    pub state: PairState,
}

#[derive(Clone, Debug)]
pub struct PartialAssignment {
    pub k: u32,
    pub pairs: Vec<PairDecision>,
}

impl PartialAssignment {
    pub fn undecided(&self) -> impl Iterator<Item = &PairDecision> {
        self.pairs
            .iter()
            .filter(|p| p.state == PairState::Undecided)
    }

    pub fn undecided_count(&self) -> usize {
        self.undecided().count()
    }

    /// Sets decided to be in every MLCIF.
    pub fn forced_in(&self) -> Vec<KSet> {
        let mut v: Vec<KSet> = self
            .pairs
            .iter()
            .filter_map(|p| match p.state {
                PairState::Forced(Side::Representative) => Some(p.representative.clone()),
                PairState::Forced(Side::Complement) => Some(p.complement.clone()),
                _ => None,
            })
            .collect();
        v.sort();
        v
    }

    pub fn forced_out(&self) -> Vec<KSet> {
        let mut v: Vec<KSet> = self
            .pairs
            .iter()
            .filter_map(|p| match p.state {
                PairState::Forced(Side::Representative) => Some(p.complement.clone()),
                PairState::Forced(Side::Complement) => Some(p.representative.clone()),
                _ => None,
            })
            .collect();
        v.sort();
        v
    }
}

/// Representative index of every pair, in universe order.
fn pair_reps(u: &Universe) -> Vec<usize> {
    (0..u.len())
        .filter(|&i| {
            let j = u.comp[i];
            let (si, sj) = (element_sum(&u.sets[i]), element_sum(&u.sets[j]));
            si < sj || (si == sj && u.sets[i] < u.sets[j])
        })
        .collect()
}

/// Initial propagation: comparable pairs go to their smaller member, then
/// the rules are closed to a fixed point.
fn forced_state(u: &Universe) -> Result<(Bits, Bits)> {
    let (mut inn, mut out) = (Bits::new(u.len()), Bits::new(u.len()));
    for r in pair_reps(u) {
        let c = u.comp[r];
        if leq(&u.sets[r], &u.sets[c]) {
            inn.set(r);
        } else if leq(&u.sets[c], &u.sets[r]) {
            inn.set(c);
        }
    }
    u.propagate(&mut inn, &mut out)?;
    Ok((inn, out))
}

pub fn forced_assignments(k: u32) -> Result<PartialAssignment> {
    let u = Universe::new(k)?;
    let (inn, out) = forced_state(&u)?;
    let pairs = pair_reps(&u)
        .into_iter()
        .map(|r| {
            let c = u.comp[r];
            let state = if inn.get(r) && out.get(c) {
                PairState::Forced(Side::Representative)
            } else if inn.get(c) && out.get(r) {
                PairState::Forced(Side::Complement)
            } else {
                PairState::Undecided
            };
            PairDecision {
                representative: u.sets[r].clone(),
                complement: u.sets[c].clone(),
                state,
            }
        })
        .collect();
    Ok(PartialAssignment { k, pairs })
}

/// Limits for [`enumerate_mlcifs_with`].
#[derive(Clone, Copy, Debug)]
pub struct EnumConfig {
    /// Required for `k > 5`.
    pub allow_large: bool,
    /// Search nodes allowed before the run aborts.
    pub node_budget: u64,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            allow_large: false,
            node_budget: 20_000_000,
        }
    }
}

pub const DEFAULT_MAX_K: u32 = 5;

/// All of `M_k` with the default limits.
pub fn enumerate_mlcifs(k: u32) -> Result<Vec<Family>> {
    enumerate_mlcifs_with(k, &EnumConfig::default())
}

struct Search<'a> {
    u: &'a Universe,
    /// Undecided pair representatives, most unbalanced sums first.
    order: Vec<usize>,
    nodes: AtomicU64,
    budget: u64,
    aborted: AtomicBool,
}

impl Search<'_> {
    fn next_pair(&self, inn: &Bits, out: &Bits, from: usize) -> Option<(usize, usize)> {
        (from..self.order.len())
            .map(|p| (p, self.order[p]))
            .find(|&(_, r)| !inn.get(r) && !out.get(r))
    }

    fn tick(&self) -> Result<()> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed);
        if n >= self.budget || self.aborted.load(Ordering::Relaxed) {
            self.aborted.store(true, Ordering::Relaxed);
            return Err(Error::Aborted(format!(
                "search exceeded its budget of {} nodes for k = {}",
                self.budget, self.u.params.k
            )));
        }
        Ok(())
    }

    fn children(
        &self,
        inn: &Bits,
        out: &Bits,
        pos: usize,
    ) -> Result<Option<Vec<(Bits, Bits, usize)>>> {
        let Some((p, r)) = self.next_pair(inn, out, pos) else {
            return Ok(None);
        };
        let mut kids = Vec::with_capacity(2);
        for choice in [r, self.u.comp[r]] {
            self.tick()?;
            let (mut i2, mut o2) = (inn.clone(), out.clone());
            i2.set(choice);
            self.u.propagate(&mut i2, &mut o2)?;
            kids.push((i2, o2, p + 1));
        }
        Ok(Some(kids))
    }

    fn dfs(&self, inn: Bits, out: Bits, pos: usize, leaves: &mut Vec<Bits>) -> Result<()> {
        match self.children(&inn, &out, pos)? {
            None => leaves.push(inn),
            Some(kids) => {
                for (i2, o2, p2) in kids {
                    self.dfs(i2, o2, p2, leaves)?;
                }
            }
        }
        Ok(())
    }
}

/// Every MLCIF on `[2k]`, each exactly once, sorted canonically.
///
/// Subtrees below a shallow frontier of decisions run in parallel on the
/// current rayon pool; the result is sorted, so it does not depend on the
/// schedule.
pub fn enumerate_mlcifs_with(k: u32, cfg: &EnumConfig) -> Result<Vec<Family>> {
    if k == 0 {
        return Err(param_err!("k must be positive"));
    }
    if k > DEFAULT_MAX_K && !cfg.allow_large {
        return Err(Error::ScaleGuard(format!(
            "k = {k} exceeds {DEFAULT_MAX_K}; pass the large-k override to try anyway"
        )));
    }
    let u = Universe::new(k)?;
    let (inn, out) = forced_state(&u)?;
    let reps = pair_reps(&u);
    let twice_mid = (k * (2 * k + 1)) as i64;
    let mut order: Vec<usize> = reps
        .into_iter()
        .filter(|&r| !inn.get(r) && !out.get(r))
        .collect();
    order.sort_by_key(|&r| {
        let skew = (2 * element_sum(&u.sets[r]) as i64 - twice_mid).abs();
        (std::cmp::Reverse(skew), u.sets[r].clone())
    });
    let search = Search {
        u: &u,
        order,
        nodes: AtomicU64::new(0),
        budget: cfg.node_budget,
        aborted: AtomicBool::new(false),
    };

    // breadth-first to a frontier wide enough to keep the pool busy
    let want = 8 * rayon::current_num_threads().max(1);
    let mut leaves = Vec::new();
    let mut frontier = vec![(inn, out, 0usize)];
    while !frontier.is_empty() && frontier.len() < want {
        let mut next = Vec::new();
        for (i, o, p) in frontier {
            match search.children(&i, &o, p)? {
                None => leaves.push(i),
                Some(kids) => next.extend(kids),
            }
        }
        frontier = next;
    }
    let subtrees: Vec<Vec<Bits>> = frontier
        .into_par_iter()
        .map(|(i, o, p)| {
            let mut v = Vec::new();
            search.dfs(i, o, p, &mut v).map(|_| v)
        })
        .collect::<Result<_>>()?;
    leaves.extend(subtrees.into_iter().flatten());

    let mut fams: Vec<Family> = leaves
        .iter()
        .map(|inn| {
            if inn.count() * 2 != u.len() {
                return Err(integrity_err!(
                    "leaf with {} of {} sets is not one-per-pair",
                    inn.count(),
                    u.len()
                ));
            }
            Ok(u.family_of(inn))
        })
        .collect::<Result<_>>()?;
    fams.sort();
    let before = fams.len();
    fams.dedup();
    if fams.len() != before {
        return Err(integrity_err!(
            "search produced {} duplicate families",
            before - fams.len()
        ));
    }
    Ok(fams)
}

/// Independent oracle: tries every one-per-pair selection and keeps the
/// left-compressed ones. Refuses `k > 3`.
pub fn brute_force_mlcifs(k: u32) -> Result<BTreeSet<Family>> {
    if k == 0 {
        return Err(param_err!("k must be positive"));
    }
    if k > 3 {
        return Err(Error::ScaleGuard(format!(
            "brute force over 2^(C(2k,k)/2) selections refused for k = {k}"
        )));
    }
    let n = 2 * k;
    let params = GroundParams::new(k, n)?;
    let all: Vec<Vec<u32>> = all_ksets(params).map(|s| s.elements().to_vec()).collect();
    let comp = |s: &[u32]| -> Vec<u32> { (1..=n).filter(|x| !s.contains(x)).collect() };
    let pairs: Vec<(Vec<u32>, Vec<u32>)> = all
        .iter()
        .filter(|s| **s < comp(s))
        .map(|s| (s.clone(), comp(s)))
        .collect();
    let mut out = BTreeSet::new();
    for sel in 0u64..1 << pairs.len() {
        let chosen: HashSet<Vec<u32>> = pairs
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                if sel >> i & 1 == 0 {
                    a.clone()
                } else {
                    b.clone()
                }
            })
            .collect();
        // closed under moving any single element down by one
        let closed = chosen.iter().all(|s| {
            (0..s.len()).all(|i| {
                let floor = if i == 0 { 0 } else { s[i - 1] };
                if s[i] - 1 == floor {
                    return true;
                }
                let mut t = s.clone();
                t[i] -= 1;
                chosen.contains(&t)
            })
        });
        if closed {
            let members: Vec<KSet> = chosen
                .into_iter()
                .map(|s| KSet::new(n, s).unwrap())
                .collect();
            out.insert(Family::from_members(params, &members)?);
        }
    }
    Ok(out)
}

/// Grows a left-compressed intersecting member set to a maximal one by
/// repeatedly adding an LC-minimal non-member that meets every member.
/// `pick` chooses among the lexicographically sorted candidates.
pub(crate) fn greedy_fill(
    params: GroundParams,
    mut members: BTreeSet<KSet>,
    mut pick: impl FnMut(&[KSet]) -> usize,
) -> BTreeSet<KSet> {
    let universe: Vec<KSet> = all_ksets(params).collect();
    loop {
        let cands: Vec<KSet> = universe
            .iter()
            .filter(|g| {
                !members.contains(*g)
                    && g.lower_covers().iter().all(|c| members.contains(c))
                    && members.iter().all(|m| m.intersects(g))
            })
            .cloned()
            .collect();
        if cands.is_empty() {
            return members;
        }
        let i = pick(&cands);
        members.insert(cands[i].clone());
    }
}

fn require_lc_intersecting(params: GroundParams, members: &[KSet]) -> Result<()> {
    let flags = check_members(params, members)?;
    if !flags.intersecting || !flags.left_compressed {
        return Err(domain_err!(
            "seed is not a left-compressed intersecting family ({flags:?})"
        ));
    }
    Ok(())
}

/// Deterministic maximal completion: always adds the lexicographically
/// least addable LC-minimal set.
pub fn complete(seed: &Family) -> Result<Family> {
    let params = seed.params();
    let members = seed.members()?;
    require_lc_intersecting(params, members)?;
    let filled = greedy_fill(params, members.iter().cloned().collect(), |_| 0);
    let v: Vec<KSet> = filled.into_iter().collect();
    Family::from_members(params, &v)
}

/// Maps `F ∈ M_k` into `M_{k+1}`: adjoin `2k+2` to every member, close
/// downward, complete. Distinct inputs give distinct outputs.
pub fn lift(f: &Family) -> Result<Family> {
    let GroundParams { k, n } = f.params();
    if n != 2 * k {
        return Err(domain_err!(
            "lift expects a family on [2k], got ({})",
            f.params()
        ));
    }
    let params = GroundParams::new(k + 1, 2 * k + 2)?;
    let raised: Vec<KSet> = f
        .boundary()
        .iter()
        .map(|b| {
            let mut e = b.elements().to_vec();
            e.push(2 * k + 2);
            KSet::from_sorted(2 * k + 2, e)
        })
        .collect();
    let seed = Family::from_members(params, &raised)?;
    complete(&seed)
}

/// Complementary pairs of `[2k]` whose two sets both sum to `k(2k+1)/2`,
/// smaller set first. `k` must be even.
pub fn balanced_pairs(k: u32) -> Result<Vec<(KSet, KSet)>> {
    if k == 0 || k % 2 == 1 {
        return Err(domain_err!(
            "balanced pairs need a positive even k, got {k}"
        ));
    }
    let params = GroundParams::new(k, 2 * k)?;
    let target = (k as u64 * (2 * k as u64 + 1)) / 2;
    Ok(all_ksets(params)
        .filter(|s| element_sum(s) == target)
        .filter_map(|s| {
            let c = complement_in_2k(&s).unwrap();
            (s < c).then_some((s, c))
        })
        .collect())
}

/// Completes `LC(selection)` where `selection` holds one set from every
/// balanced pair.
pub fn pk_selection_family(k: u32, selection: &[KSet]) -> Result<Family> {
    let pairs = balanced_pairs(k)?;
    let params = GroundParams::new(k, 2 * k)?;
    if selection.len() != pairs.len() {
        return Err(domain_err!(
            "selection has {} sets but there are {} balanced pairs",
            selection.len(),
            pairs.len()
        ));
    }
    let chosen: HashSet<&KSet> = selection.iter().collect();
    for (a, b) in &pairs {
        if chosen.contains(a) == chosen.contains(b) {
            return Err(domain_err!(
                "selection must contain exactly one of {a} and {b}"
            ));
        }
    }
    let seed = Family::from_members(params, selection)?;
    let flags = check_members(params, seed.members()?)?;
    if !flags.intersecting || !flags.left_compressed {
        return Err(integrity_err!(
            "down-closure of a balanced selection is not intersecting: {seed}"
        ));
    }
    complete(&seed)
}
