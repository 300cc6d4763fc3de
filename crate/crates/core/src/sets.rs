//! k-subsets of `[n]` and the left-compression order on them.
//!
//! `G <=_LC F` holds when the i-th smallest element of `G` is at most the
//! i-th smallest element of `F` for every `i`. Everything else in the crate
//! is built on the handful of operations here.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{param_err, Result};

/// Uniformity `k` and ground-set size `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundParams {
    pub k: u32,
    pub n: u32,
}

impl GroundParams {
    pub fn new(k: u32, n: u32) -> Result<Self> {
        if k == 0 {
            return Err(param_err!("k must be positive"));
        }
        if n < k {
            return Err(param_err!("n = {n} is smaller than k = {k}"));
        }
        Ok(GroundParams { k, n })
    }

    /// Parameters valid for family-level work, which needs `n >= 2k`.
    pub fn for_families(k: u32, n: u32) -> Result<Self> {
        let p = Self::new(k, n)?;
        p.require_family_range()?;
        Ok(p)
    }

    pub fn require_family_range(&self) -> Result<()> {
        if self.n < 2 * self.k {
            return Err(param_err!(
                "n = {} is below 2k = {}; every k-set family is trivially optimal there",
                self.n,
                2 * self.k
            ));
        }
        Ok(())
    }

    /// `C(n, k)`, or `None` on overflow.
    pub fn universe_size(&self) -> Option<u128> {
        binomial(self.n as u64, self.k as u64)
    }
}

impl fmt::Display for GroundParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={}, n={}", self.k, self.n)
    }
}

/// Exact binomial coefficient, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// A k-element subset of `[n]`, stored as its strictly increasing elements.
///
/// For `n <= 128` a bitmask view (bit `x - 1` set for element `x`) is kept
/// alongside and used on the fast paths.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KSet {
    elems: Vec<u32>,
    n: u32,
    mask: Option<u128>,
}

impl KSet {
    pub fn new(n: u32, elems: impl Into<Vec<u32>>) -> Result<Self> {
        let elems = elems.into();
        if elems.is_empty() {
            return Err(param_err!("a k-set needs at least one element"));
        }
        if elems[0] < 1 {
            return Err(param_err!("elements must be at least 1, got {:?}", elems));
        }
        if elems.windows(2).any(|w| w[0] >= w[1]) {
            return Err(param_err!(
                "elements must be strictly increasing, got {:?}",
                elems
            ));
        }
        if *elems.last().unwrap() > n {
            return Err(param_err!(
                "element {} exceeds n = {n}",
                elems.last().unwrap()
            ));
        }
        Ok(Self::from_sorted(n, elems))
    }

    /// Caller guarantees `elems` is strictly increasing inside `[1, n]`.
    pub(crate) fn from_sorted(n: u32, elems: Vec<u32>) -> Self {
        debug_assert!(!elems.is_empty());
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(elems[0] >= 1 && *elems.last().unwrap() <= n);
        let mask = (n <= 128).then(|| elems.iter().fold(0u128, |m, &x| m | 1u128 << (x - 1)));
        KSet { elems, n, mask }
    }

    /// Builds from an unsorted list of distinct elements.
    pub fn from_unsorted(n: u32, mut elems: Vec<u32>) -> Result<Self> {
        elems.sort_unstable();
        Self::new(n, elems)
    }

    /// `{1, ..., k}`, the bottom of the order.
    pub fn bottom(k: u32, n: u32) -> Result<Self> {
        GroundParams::new(k, n)?;
        Ok(Self::from_sorted(n, (1..=k).collect()))
    }

    /// `{n-k+1, ..., n}`, the top of the order.
    pub fn top(k: u32, n: u32) -> Result<Self> {
        GroundParams::new(k, n)?;
        Ok(Self::from_sorted(n, (n - k + 1..=n).collect()))
    }

    pub fn k(&self) -> u32 {
        self.elems.len() as u32
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn params(&self) -> GroundParams {
        GroundParams {
            k: self.k(),
            n: self.n,
        }
    }

    pub fn elements(&self) -> &[u32] {
        &self.elems
    }

    pub fn mask(&self) -> Option<u128> {
        self.mask
    }

    pub fn contains(&self, x: u32) -> bool {
        match self.mask {
            Some(m) => (1..=self.n).contains(&x) && m >> (x - 1) & 1 == 1,
            None => self.elems.binary_search(&x).is_ok(),
        }
    }

    /// `|F ∩ [t]|`.
    pub fn count_at_most(&self, t: u32) -> u32 {
        self.elems.partition_point(|&x| x <= t) as u32
    }

    /// The same elements viewed inside `[n]`.
    pub fn with_ground(&self, n: u32) -> Result<Self> {
        if *self.elems.last().unwrap() > n {
            return Err(param_err!("{self} does not fit in [{n}]"));
        }
        Ok(Self::from_sorted(n, self.elems.clone()))
    }

    pub fn intersects(&self, other: &KSet) -> bool {
        if let (Some(a), Some(b)) = (self.mask, other.mask) {
            return a & b != 0;
        }
        let (mut i, mut j) = (0, 0);
        while i < self.elems.len() && j < other.elems.len() {
            match self.elems[i].cmp(&other.elems[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// Sets covered by `self` in the LC order: one element moved down by one.
    pub fn lower_covers(&self) -> Vec<KSet> {
        let mut out = Vec::new();
        for i in 0..self.elems.len() {
            let floor = if i == 0 { 0 } else { self.elems[i - 1] };
            if self.elems[i] - 1 > floor {
                let mut e = self.elems.clone();
                e[i] -= 1;
                out.push(Self::from_sorted(self.n, e));
            }
        }
        out
    }

    /// Sets covering `self` in the LC order: one element moved up by one.
    pub fn upper_covers(&self) -> Vec<KSet> {
        let mut out = Vec::new();
        let k = self.elems.len();
        for i in 0..k {
            let ceil = if i + 1 == k {
                self.n + 1
            } else {
                self.elems[i + 1]
            };
            if self.elems[i] + 1 < ceil {
                let mut e = self.elems.clone();
                e[i] += 1;
                out.push(Self::from_sorted(self.n, e));
            }
        }
        out
    }
}

impl fmt::Debug for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.elems.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

/// Serialized as a JSON array of ascending integers; `n` travels with the
/// enclosing record.
impl Serialize for KSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elems.serialize(s)
    }
}

fn same_params(a: &KSet, b: &KSet) -> Result<()> {
    if a.params() != b.params() {
        return Err(param_err!(
            "mismatched parameters: {a} has ({}) but {b} has ({})",
            a.params(),
            b.params()
        ));
    }
    Ok(())
}

/// Componentwise comparison; assumes matching parameters.
#[inline]
pub(crate) fn leq(g: &KSet, f: &KSet) -> bool {
    debug_assert_eq!(g.params(), f.params());
    g.elems.iter().zip(&f.elems).all(|(y, x)| y <= x)
}

/// `G <=_LC F`, componentwise on the sorted elements.
pub fn lc_leq(g: &KSet, f: &KSet) -> Result<bool> {
    same_params(g, f)?;
    Ok(leq(g, f))
}

/// `G <=_LC F` in prefix-count form: `|G ∩ [t]| >= |F ∩ [t]|` for every `t`.
///
/// Runs on the bitmask view when both sets have one.
pub fn lc_leq_prefix(g: &KSet, f: &KSet) -> Result<bool> {
    same_params(g, f)?;
    if let (Some(gm), Some(fm)) = (g.mask, f.mask) {
        let (mut cg, mut cf) = (0u32, 0u32);
        let mut rest = gm | fm;
        while rest != 0 {
            let bit = rest.trailing_zeros();
            cg += (gm >> bit & 1) as u32;
            cf += (fm >> bit & 1) as u32;
            if cg < cf {
                return Ok(false);
            }
            rest &= rest - 1;
        }
        return Ok(true);
    }
    let mut points: Vec<u32> = g.elems.iter().chain(&f.elems).copied().collect();
    points.sort_unstable();
    points.dedup();
    Ok(points
        .iter()
        .all(|&t| g.count_at_most(t) >= f.count_at_most(t)))
}

/// `[2k] \ F`; requires `n = 2k`.
pub fn complement_in_2k(f: &KSet) -> Result<KSet> {
    if f.n != 2 * f.k() {
        return Err(param_err!("complement needs n = 2k, got {}", f.params()));
    }
    let elems = (1..=f.n).filter(|&x| !f.contains(x)).collect();
    Ok(KSet::from_sorted(f.n, elems))
}

/// Componentwise minimum, the greatest lower bound in the LC order.
pub fn meet(a: &KSet, b: &KSet) -> Result<KSet> {
    same_params(a, b)?;
    Ok(meet_unchecked(a, b))
}

pub(crate) fn meet_unchecked(a: &KSet, b: &KSet) -> KSet {
    let elems = a
        .elems
        .iter()
        .zip(&b.elems)
        .map(|(x, y)| *x.min(y))
        .collect();
    KSet::from_sorted(a.n, elems)
}

/// `Z_i = [i, 2i-1] ∪ [n-k+i+1, n]`, the unique boundary set of the i-th
/// canonical family.
pub fn z_set(i: u32, params: GroundParams) -> Result<KSet> {
    params.require_family_range()?;
    let GroundParams { k, n } = params;
    if i == 0 || i > k {
        return Err(param_err!("index {i} is outside [1, {k}]"));
    }
    let elems = (i..=2 * i - 1).chain(n - k + i + 1..=n).collect();
    Ok(KSet::from_sorted(n, elems))
}

/// Least `i` with `F <=_LC Z_i`, if any.
pub fn index_of(f: &KSet) -> Result<Option<u32>> {
    let params = f.params();
    params.require_family_range()?;
    Ok(index_unchecked(f))
}

/// `F <=_LC Z_i` iff `x_j <= i + j - 1` for `j <= i` and the remaining
/// `k - i` elements fit under the top block, which they always do.
pub(crate) fn index_unchecked(f: &KSet) -> Option<u32> {
    let k = f.k();
    (1..=k).find(|&i| (0..i as usize).all(|j| f.elems[j] <= i + j as u32))
}

/// Sum of the elements.
pub fn element_sum(f: &KSet) -> u64 {
    f.elems.iter().map(|&x| x as u64).sum()
}

/// True iff `LC(A)` and `LC(B)` are cross-intersecting, i.e. no `G <=_LC A`
/// is disjoint from some `H <=_LC B`.
///
/// A disjoint pair exists iff `|A ∩ [t]| + |B ∩ [t]| <= t` for every `t`
/// (deadline scheduling), so the families cross-intersect iff that count
/// exceeds `t` somewhere.
pub fn lc_cross_intersecting(a: &KSet, b: &KSet) -> Result<bool> {
    same_params(a, b)?;
    Ok(cross_intersecting_unchecked(a, b))
}

pub(crate) fn cross_intersecting_unchecked(a: &KSet, b: &KSet) -> bool {
    let (ae, be) = (&a.elems, &b.elems);
    let (mut i, mut j) = (0usize, 0usize);
    while i < ae.len() || j < be.len() {
        let t = match (ae.get(i), be.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < ae.len() && ae[i] == t {
            i += 1;
        }
        while j < be.len() && be[j] == t {
            j += 1;
        }
        if (i + j) as u32 > t {
            return true;
        }
    }
    false
}

/// All k-subsets of `[n]` in lexicographic order.
pub fn all_ksets(params: GroundParams) -> KSetIter {
    KSetIter {
        params,
        next: Some((1..=params.k).collect()),
    }
}

pub struct KSetIter {
    params: GroundParams,
    next: Option<Vec<u32>>,
}

impl Iterator for KSetIter {
    type Item = KSet;

    fn next(&mut self) -> Option<KSet> {
        let cur = self.next.take()?;
        let GroundParams { k, n } = self.params;
        let k = k as usize;
        let mut succ = cur.clone();
        // rightmost position that can still move up
        if let Some(i) = (0..k).rev().find(|&i| succ[i] < n - (k - 1 - i) as u32) {
            succ[i] += 1;
            for j in i + 1..k {
                succ[j] = succ[j - 1] + 1;
            }
            self.next = Some(succ);
        }
        Some(KSet::from_sorted(n, cur))
    }
}

/// Every set in `LC(B)`, in lexicographic order.
pub fn down_set(b: &KSet) -> Vec<KSet> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(b.elems.len());
    fn rec(b: &KSet, cur: &mut Vec<u32>, out: &mut Vec<KSet>) {
        let i = cur.len();
        if i == b.elems.len() {
            out.push(KSet::from_sorted(b.n, cur.clone()));
            return;
        }
        let lo = cur.last().map_or(1, |&x| x + 1);
        for x in lo..=b.elems[i] {
            cur.push(x);
            rec(b, cur, out);
            cur.pop();
        }
    }
    rec(b, &mut cur, &mut out);
    out
}
