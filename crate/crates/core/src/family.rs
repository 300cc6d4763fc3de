//! Families of k-sets stored by their boundary antichain.
//!
//! A left-compressed family is the union of the down-sets of its
//! LC-maximal members, so the boundary alone identifies it. Member lists are
//! only materialized on demand.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain_err, integrity_err, param_err, Error, Result};
use crate::sets::{
    all_ksets, complement_in_2k, cross_intersecting_unchecked, down_set, index_unchecked, leq,
    z_set, GroundParams, KSet,
};

/// Largest member count we are willing to materialize.
pub const MATERIALIZE_LIMIT: u128 = 2_000_000;

pub struct Family {
    params: GroundParams,
    boundary: Vec<KSet>,
    members: OnceLock<Vec<KSet>>,
}

impl Family {
    /// Wraps an antichain. Fails if two sets are comparable or the
    /// parameters disagree.
    pub fn from_boundary(params: GroundParams, mut boundary: Vec<KSet>) -> Result<Self> {
        check_params(params, &boundary)?;
        if boundary.is_empty() {
            return Err(domain_err!("a family needs at least one boundary set"));
        }
        boundary.sort();
        boundary.dedup();
        for (i, a) in boundary.iter().enumerate() {
            for b in &boundary[i + 1..] {
                if leq(a, b) || leq(b, a) {
                    return Err(domain_err!(
                        "boundary is not an antichain: {a} and {b} are comparable"
                    ));
                }
            }
        }
        Ok(Self::from_sorted_antichain(params, boundary))
    }

    pub(crate) fn from_sorted_antichain(params: GroundParams, boundary: Vec<KSet>) -> Self {
        Family {
            params,
            boundary,
            members: OnceLock::new(),
        }
    }

    /// The left-compressed family whose members are exactly `members`'
    /// down-closure. The boundary is read off as the LC-maximal sets.
    pub fn from_members(params: GroundParams, members: &[KSet]) -> Result<Self> {
        let boundary = boundary_of(members)?;
        Self::from_boundary(params, boundary)
    }

    pub fn params(&self) -> GroundParams {
        self.params
    }

    pub fn k(&self) -> u32 {
        self.params.k
    }

    pub fn n(&self) -> u32 {
        self.params.n
    }

    pub fn boundary(&self) -> &[KSet] {
        &self.boundary
    }

    /// Membership without materializing: `G` is in the family iff it lies
    /// under some boundary set.
    pub fn contains(&self, g: &KSet) -> bool {
        g.params() == self.params && self.boundary.iter().any(|b| leq(g, b))
    }

    /// Sorted member list, computed once.
    pub fn members(&self) -> Result<&[KSet]> {
        if let Some(m) = self.members.get() {
            return Ok(m);
        }
        let bound = self.params.universe_size().unwrap_or(u128::MAX);
        if bound > MATERIALIZE_LIMIT {
            // the family itself may still be small
            let total: u128 = self
                .boundary
                .iter()
                .map(crate::weights::downset_count)
                .sum();
            if total > MATERIALIZE_LIMIT {
                return Err(Error::ScaleGuard(format!(
                    "family on ({}) has up to {total} members; refusing to materialize",
                    self.params
                )));
            }
        }
        let mut all = BTreeSet::new();
        for b in &self.boundary {
            all.extend(down_set(b));
        }
        let _ = self.members.set(all.into_iter().collect());
        Ok(self.members.get().expect("just set"))
    }

    /// `Some(i)` iff this is the canonical family `<i>`.
    pub fn canonical_index(&self) -> Option<u32> {
        if self.boundary.len() != 1 || self.params.n < 2 * self.params.k {
            return None;
        }
        let b = &self.boundary[0];
        (1..=self.k()).find(|&i| z_set(i, self.params).map(|z| &z == b).unwrap_or(false))
    }

    /// Intersecting test on the boundary alone (pairwise cross-intersection
    /// of the down-sets), valid at any `n`.
    pub fn is_intersecting_by_boundary(&self) -> bool {
        let b = &self.boundary;
        (0..b.len()).all(|i| (i..b.len()).all(|j| cross_intersecting_unchecked(&b[i], &b[j])))
    }

    pub fn to_record(&self) -> FamilyRecord {
        FamilyRecord {
            k: self.params.k,
            n: self.params.n,
            boundary: self
                .boundary
                .iter()
                .map(|b| b.elements().to_vec())
                .collect(),
        }
    }

    pub fn from_record(rec: &FamilyRecord) -> Result<Self> {
        let params = GroundParams::new(rec.k, rec.n)?;
        let boundary = rec
            .boundary
            .iter()
            .map(|e| KSet::new(rec.n, e.clone()))
            .collect::<Result<Vec<_>>>()?;
        if let Some(b) = boundary.iter().find(|b| b.k() != rec.k) {
            return Err(param_err!(
                "boundary set {b} does not have {} elements",
                rec.k
            ));
        }
        Self::from_boundary(params, boundary)
    }

    /// Canonical one-line JSON, e.g. `{"k":2,"n":4,"boundary":[[1,4]]}`.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("records always serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        let rec: FamilyRecord = serde_json::from_str(line)?;
        Self::from_record(&rec)
    }
}

fn check_params(params: GroundParams, sets: &[KSet]) -> Result<()> {
    GroundParams::new(params.k, params.n)?;
    if let Some(s) = sets.iter().find(|s| s.params() != params) {
        return Err(param_err!(
            "{s} has parameters ({}), expected ({params})",
            s.params()
        ));
    }
    Ok(())
}

impl Clone for Family {
    fn clone(&self) -> Self {
        Family {
            params: self.params,
            boundary: self.boundary.clone(),
            members: self.members.clone(),
        }
    }
}

impl PartialEq for Family {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params && self.boundary == other.boundary
    }
}

impl Eq for Family {}

impl Hash for Family {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.params.hash(state);
        self.boundary.hash(state);
    }
}

impl PartialOrd for Family {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: parameters, then boundary lists lexicographically.
impl Ord for Family {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.params, &self.boundary).cmp(&(other.params, &other.boundary))
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Family({}; {:?})", self.params, self.boundary)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.boundary.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "LC{b}")?;
        }
        Ok(())
    }
}

/// Interchange form of a family (one JSON object per line in `.jsonl` files).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub k: u32,
    pub n: u32,
    pub boundary: Vec<Vec<u32>>,
}

/// Union of the down-sets of `antichain`, materialized.
pub fn down_closure(antichain: &[KSet], params: GroundParams) -> Result<Family> {
    check_params(params, antichain)?;
    let fam = Family::from_members(params, antichain)?;
    fam.members()?;
    Ok(fam)
}

/// The LC-maximal sets among `members`, sorted.
pub fn boundary_of(members: &[KSet]) -> Result<Vec<KSet>> {
    if members.is_empty() {
        return Err(domain_err!("the empty family has no boundary"));
    }
    let params = members[0].params();
    check_params(params, members)?;
    let mut sorted: Vec<&KSet> = members.iter().collect();
    sorted.sort();
    sorted.dedup();
    let present: HashSet<&KSet> = sorted.iter().copied().collect();
    // In a left-compressed family a set is maximal iff no upper cover is
    // present; for arbitrary input fall back to the pairwise scan.
    let closed = sorted
        .iter()
        .all(|m| m.lower_covers().iter().all(|c| present.contains(c)));
    let out = if closed {
        sorted
            .iter()
            .filter(|m| m.upper_covers().iter().all(|c| !present.contains(c)))
            .map(|m| (*m).clone())
            .collect()
    } else {
        sorted
            .iter()
            .filter(|m| !sorted.iter().any(|o| o != *m && leq(m, o)))
            .map(|m| (*m).clone())
            .collect()
    };
    Ok(out)
}

/// Result of [`check_family`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyFlags {
    pub intersecting: bool,
    pub left_compressed: bool,
    pub maximal: bool,
}

impl FamilyFlags {
    pub fn is_mlcif(&self) -> bool {
        self.intersecting && self.left_compressed && self.maximal
    }
}

pub fn check_family(f: &Family) -> Result<FamilyFlags> {
    check_members(f.params(), f.members()?)
}

/// Checks an explicit member list, which need not be left-compressed.
///
/// `maximal` means no k-set outside the family can be added together with
/// its down-set while staying intersecting. It is only meaningful when the
/// other two flags hold.
pub fn check_members(params: GroundParams, members: &[KSet]) -> Result<FamilyFlags> {
    params.require_family_range()?;
    check_params(params, members)?;
    if params.universe_size().is_none_or(|s| s > MATERIALIZE_LIMIT) {
        return Err(Error::ScaleGuard(format!(
            "C(n,k) too large for a member-level check at ({params})"
        )));
    }
    let present: HashSet<&KSet> = members.iter().collect();

    let pairwise = members
        .iter()
        .enumerate()
        .all(|(i, a)| members[i..].iter().all(|b| a.intersects(b)));
    if params.n == 2 * params.k {
        // on [2k] two k-sets are disjoint exactly when they are complements
        let by_complement = members
            .iter()
            .all(|m| !present.contains(&complement_in_2k(m).unwrap()));
        if by_complement != pairwise {
            return Err(integrity_err!(
                "pairwise ({pairwise}) and complement ({by_complement}) intersecting tests disagree"
            ));
        }
    }

    let left_compressed = members
        .iter()
        .all(|m| m.lower_covers().iter().all(|c| present.contains(c)));

    // Minimal non-members first; if any non-member is addable then some
    // minimal non-member below it is, and that one only needs to meet
    // every current member.
    let maximal = !all_ksets(params).any(|g| {
        !present.contains(&g)
            && g.lower_covers().iter().all(|c| present.contains(c))
            && members.iter().all(|m| m.intersects(&g))
    });

    Ok(FamilyFlags {
        intersecting: pairwise,
        left_compressed,
        maximal,
    })
}

/// The i-th canonical family `<i> = LC(Z_i)`.
pub fn canonical_family(i: u32, params: GroundParams) -> Result<Family> {
    let z = z_set(i, params)?;
    Ok(Family::from_sorted_antichain(params, vec![z]))
}

/// Membership in `<i>` via its defining predicate `|F ∩ [2i-1]| >= i`.
pub fn in_canonical_by_count(f: &KSet, i: u32) -> bool {
    f.count_at_most(2 * i - 1) >= i
}

/// `|F ∩ [2k+1, n]| = k - ι(F)`.
pub fn is_strong(f: &KSet) -> Result<bool> {
    let params = f.params();
    params.require_family_range()?;
    let idx = index_unchecked(f).ok_or_else(|| domain_err!("{f} has no index"))?;
    Ok(strong_with_index(f, idx))
}

fn strong_with_index(f: &KSet, idx: u32) -> bool {
    let k = f.k();
    let above = k - f.count_at_most(2 * k);
    above == k - idx
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TypeTag {
    Type(u32),
    Typeless,
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeTag::Type(i) => write!(f, "type {i}"),
            TypeTag::Typeless => f.write_str("typeless"),
        }
    }
}

/// Common index of the strong sets of an MLCIF, or typeless.
///
/// Works from the boundary at any `n`. A strong set `F` of index `i` forces
/// `{x_1..x_i} ∪ [n-k+i+1, n]` into the family, which is again strong of
/// index `i`, so only those candidates are scanned. Two strong sets of
/// different index raise an integrity error.
pub fn type_of(f: &Family) -> Result<TypeTag> {
    let params = f.params();
    params.require_family_range()?;
    if !f.is_intersecting_by_boundary() {
        return Err(domain_err!("{f} is not intersecting, so not an MLCIF"));
    }
    if params.universe_size().is_some_and(|s| s <= 50_000) {
        let flags = check_family(f)?;
        if !flags.is_mlcif() {
            return Err(domain_err!("{f} is not an MLCIF ({flags:?})"));
        }
    }
    let indices = strong_indices(f);
    match indices.as_slice() {
        [] => Ok(TypeTag::Typeless),
        [i] => Ok(TypeTag::Type(*i)),
        _ => Err(integrity_err!("{f} has strong sets of indices {indices:?}")),
    }
}

/// Distinct indices of strong members, via the top-block candidates.
pub fn strong_indices(f: &Family) -> Vec<u32> {
    let GroundParams { k, n } = f.params();
    let mut found = Vec::new();
    for i in 1..=k {
        // candidate prefix p_1 < ... < p_i with p_j <= i + j - 1
        let prefix_bound = KSet::from_sorted(2 * i - 1, (i..=2 * i - 1).collect());
        let hit = down_set(&prefix_bound).into_iter().any(|p| {
            let elems: Vec<u32> = p
                .elements()
                .iter()
                .copied()
                .chain(n - k + i + 1..=n)
                .collect();
            if elems.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            let cand = KSet::from_sorted(n, elems);
            index_unchecked(&cand) == Some(i) && strong_with_index(&cand, i) && f.contains(&cand)
        });
        if hit {
            found.push(i);
        }
    }
    found
}
