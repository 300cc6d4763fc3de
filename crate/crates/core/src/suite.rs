//! Named verification suites. Each suite gathers the checks for one area
//! into [`VerificationReport`]s; the aggregate fails iff any report fails.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::enumerate::{
    balanced_pairs, brute_force_mlcifs, enumerate_mlcifs, lift, pk_selection_family, DEFAULT_MAX_K,
};
use crate::error::{Error, Result};
use crate::extension::{count_mlcifs_on_n, extend_fast, extend_greedy};
use crate::family::{
    boundary_of, canonical_family, check_family, down_closure, is_strong, type_of, Family, TypeTag,
};
use crate::report::{Status, VerificationReport, Witness};
use crate::sets::{
    all_ksets, binomial, complement_in_2k, index_of, lc_leq, z_set, GroundParams, KSet,
};
use crate::store::{read_a300099, sha256_hex, Cache, VERSION};
use crate::weights::{make_omega_i, optimize_over, theorem_threshold, verify_increasing_theorems};
use crate::young::{
    is_palindromic, is_unimodal, max_antichain, phi, phi_inv, pk_count, prodinger_ratio,
    rank_sizes, supersaturation_probe,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    EnumerateOracle,
    FamilyProperties,
    Boundary,
    Types,
    Extension,
    Theorem1,
    Theorem2,
    Young,
    Probe,
}

impl SuiteName {
    pub const ALL: [SuiteName; 9] = [
        SuiteName::EnumerateOracle,
        SuiteName::FamilyProperties,
        SuiteName::Boundary,
        SuiteName::Types,
        SuiteName::Extension,
        SuiteName::Theorem1,
        SuiteName::Theorem2,
        SuiteName::Young,
        SuiteName::Probe,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::EnumerateOracle => "enumerate-oracle",
            SuiteName::FamilyProperties => "family-properties",
            SuiteName::Boundary => "boundary",
            SuiteName::Types => "types",
            SuiteName::Extension => "extension",
            SuiteName::Theorem1 => "theorem1",
            SuiteName::Theorem2 => "theorem2",
            SuiteName::Young => "young",
            SuiteName::Probe => "probe",
        }
    }

    /// Suites whose checks draw random samples and so need a seed.
    pub fn is_randomized(&self) -> bool {
        matches!(self, SuiteName::Theorem2 | SuiteName::Probe)
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|n| n.as_str()).collect();
                Error::Usage(format!(
                    "unknown suite '{s}'; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteParams {
    pub k: Option<u32>,
    pub n: Option<u32>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    /// External `|M_k|` values; `data/a300099.txt` when unset.
    pub oeis: Option<PathBuf>,
    /// Reuse and fill the `M_k` cache instead of always enumerating.
    pub cache: Option<Cache>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: SuiteName,
    pub reports: Vec<VerificationReport>,
    pub status: Status,
    pub wall_time_secs: f64,
    pub version: String,
    pub input_digests: BTreeMap<String, String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Fail if any report fails, empirical if every report is, pass otherwise.
pub fn aggregate(reports: &[VerificationReport]) -> Status {
    if reports.iter().any(|r| r.status == Status::Fail) {
        Status::Fail
    } else if !reports.is_empty() && reports.iter().all(|r| r.status == Status::Empirical) {
        Status::Empirical
    } else {
        Status::Pass
    }
}

struct Runner {
    params: SuiteParams,
    mk: BTreeMap<u32, Vec<Family>>,
    digests: BTreeMap<String, String>,
}

impl Runner {
    fn mk(&mut self, k: u32) -> Result<&[Family]> {
        if !self.mk.contains_key(&k) {
            let families = match &self.params.cache {
                Some(cache) => cache.load_or_enumerate(k, &Default::default())?.0,
                None => enumerate_mlcifs(k)?,
            };
            let body: String = families.iter().map(|f| f.to_json_line() + "\n").collect();
            self.digests
                .insert(format!("mk/{k}"), sha256_hex(body.as_bytes()));
            self.mk.insert(k, families);
        }
        Ok(&self.mk[&k])
    }

    fn k_or(&self, default: u32, max: u32) -> Result<u32> {
        let k = self.params.k.unwrap_or(default);
        if k == 0 || k > max {
            return Err(Error::Param(format!(
                "this suite runs for 1 <= k <= {max}, got k = {k}"
            )));
        }
        Ok(k)
    }

    fn seed(&self, suite: SuiteName) -> Result<u64> {
        self.params.seed.ok_or_else(|| {
            Error::Usage(format!(
                "suite {suite} is randomized and needs an explicit --seed"
            ))
        })
    }
}

fn report(claim: &str, statement: &str) -> VerificationReport {
    VerificationReport::new(claim, statement)
}

/// Runs one suite. Randomized suites need `params.seed`.
pub fn run_suite(name: SuiteName, params: SuiteParams) -> Result<SuiteResult> {
    let start = Instant::now();
    let mut runner = Runner {
        params,
        mk: BTreeMap::new(),
        digests: BTreeMap::new(),
    };
    let p = &runner.params;
    let described = format!(
        "k={:?} n={:?} samples={:?} seed={:?}",
        p.k, p.n, p.samples, p.seed
    );
    runner
        .digests
        .insert("params".into(), sha256_hex(described.as_bytes()));
    let reports = match name {
        SuiteName::EnumerateOracle => enumerate_oracle(&mut runner)?,
        SuiteName::FamilyProperties => family_properties(&mut runner)?,
        SuiteName::Boundary => boundary(&mut runner)?,
        SuiteName::Types => types(&mut runner)?,
        SuiteName::Extension => extension(&mut runner)?,
        SuiteName::Theorem1 => theorem1(&mut runner)?,
        SuiteName::Theorem2 => theorem2(&mut runner)?,
        SuiteName::Young => young(&mut runner)?,
        SuiteName::Probe => probe(&mut runner)?,
    };
    Ok(SuiteResult {
        suite: name,
        status: aggregate(&reports),
        reports,
        wall_time_secs: start.elapsed().as_secs_f64(),
        version: VERSION.to_string(),
        input_digests: runner.digests,
    })
}

fn enumerate_oracle(r: &mut Runner) -> Result<Vec<VerificationReport>> {
    let k = r.k_or(3, DEFAULT_MAX_K)?;
    let mut oracle = report(
        "enumeration-matches-oracle",
        "the enumerator and the brute-force oracle return the same MLCIFs",
    )
    .with_k(k.min(3));
    for j in 1..=k.min(3) {
        let fast: BTreeSet<Family> = r.mk(j)?.iter().cloned().collect();
        let slow = brute_force_mlcifs(j)?;
        let extra: Vec<&Family> = fast.symmetric_difference(&slow).collect();
        oracle.check(extra.is_empty(), || {
            Witness::new(format!(
                "k = {j}: {} families found by only one method",
                extra.len()
            ))
            .family(extra[0])
        });
        oracle.note(format!("|M_{j}| = {}", fast.len()));
    }

    let mut small = report(
        "small-counts",
        "|M_1| = 1 and M_2 consists of LC({1,4}) and LC({2,3})",
    );
    let m1: Vec<Vec<KSet>> = r.mk(1)?.iter().map(|f| f.boundary().to_vec()).collect();
    small.check(m1 == vec![vec![KSet::new(2, vec![1])?]], || {
        Witness::new(format!("M_1 = {m1:?}"))
    });
    let m2: Vec<Vec<KSet>> = r.mk(2)?.iter().map(|f| f.boundary().to_vec()).collect();
    let expect = vec![
        vec![KSet::new(4, vec![1, 4])?],
        vec![KSet::new(4, vec![2, 3])?],
    ];
    small.check(m2 == expect, || Witness::new(format!("M_2 = {m2:?}")));

    let path = r
        .params
        .oeis
        .clone()
        .unwrap_or_else(|| PathBuf::from("data/a300099.txt"));
    let mut oeis = report(
        "oeis-cross-check",
        "enumerated counts agree with the externally supplied A300099 values",
    )
    .with_k(k);
    match read_a300099(&path)? {
        None => {
            oeis = oeis.skip(format!(
                "warning: {} not found; external cross-check skipped",
                path.display()
            ));
        }
        Some(values) => {
            r.digests
                .insert("a300099".into(), sha256_hex(&std::fs::read(&path)?));
            for j in 1..=k {
                let count = r.mk(j)?.len() as u128;
                match values.get(&j) {
                    Some(&v) => oeis.check(v == count, || {
                        Witness::new(format!("k = {j}: enumerated {count}, file says {v}"))
                    }),
                    None => oeis.note(format!("no external value for k = {j}")),
                }
            }
            if oeis.checks == 0 {
                oeis =
                    oeis.skip("warning: the external file has no values for the enumerated range");
            }
        }
    }
    Ok(vec![oracle, small, oeis])
}

fn family_properties(r: &mut Runner) -> Result<Vec<VerificationReport>> {
    let k = r.k_or(4, DEFAULT_MAX_K)?;
    let mut flags = report(
        "mlcif-flags",
        "every enumerated family is intersecting, left-compressed and maximal",
    )
    .with_k(k);
    let mut pairs = report(
        "one-per-pair",
        "every enumerated family holds exactly one set of each complementary pair",
    )
    .with_k(k);
    let mut round = report(
        "boundary-roundtrip",
        "boundary and down-closure are mutually inverse",
    )
    .with_k(k);
    for j in 1..=k {
        let params = GroundParams::new(j, 2 * j)?;
        let half = binomial(2 * j as u64, j as u64).expect("small") / 2;
        for f in r.mk(j)?.to_vec() {
            let fl = check_family(&f)?;
            flags.check(fl.is_mlcif(), || {
                Witness::new(format!("flags {fl:?}")).family(&f)
            });
            let members = f.members()?;
            let present: HashSet<&KSet> = members.iter().collect();
            let one_each = members.len() as u128 == half
                && members
                    .iter()
                    .all(|m| !present.contains(&complement_in_2k(m).expect("n = 2k")));
            pairs.check(one_each, || {
                Witness::new(format!("{} members", members.len())).family(&f)
            });
            let b = boundary_of(members)?;
            let closed = down_closure(&b, params)?;
            round.check(b == f.boundary() && closed.members()? == members, || {
                Witness::new("boundary or closure differs").family(&f)
            });
        }
    }
    Ok(vec![flags, pairs, round])
}

fn boundary(r: &mut Runner) -> Result<Vec<VerificationReport>> {
    let k = r.k_or(4, DEFAULT_MAX_K)?;
    let mut single = report(
        "single-boundary-iff-canonical",
        "the MLCIFs with one boundary set are exactly the canonical families, each with boundary {Z_i}",
    )
    .with_k(k);
    let mut index = report(
        "index-exists",
        "every member of an MLCIF lies below some Z_i",
    )
    .with_k(k);
    for j in 1..=k {
        let params = GroundParams::new(j, 2 * j)?;
        let canon: BTreeSet<Family> = (1..=j)
            .map(|i| canonical_family(i, params))
            .collect::<Result<_>>()?;
        let found: BTreeSet<Family> = r
            .mk(j)?
            .iter()
            .filter(|f| f.boundary().len() == 1)
            .cloned()
            .collect();
        let diff: Vec<&Family> = canon.symmetric_difference(&found).collect();
        single.check(diff.is_empty(), || {
            Witness::new(format!(
                "k = {j}: {} single-boundary or canonical families unmatched",
                diff.len()
            ))
            .family(diff[0])
        });
        for f in r.mk(j)?.to_vec() {
            if f.boundary().len() == 1 {
                let i = f.canonical_index();
                let z_ok = i.is_some_and(|i| z_set(i, params).is_ok_and(|z| f.boundary()[0] == z));
                single.check(z_ok, || {
                    Witness::new("single boundary set is not a Z_i").family(&f)
                });
            }
            let missing = f
                .members()?
                .iter()
                .find(|m| index_of(m).ok().flatten().is_none())
                .cloned();
            index.check(missing.is_none(), || {
                Witness::new(format!("{} has no index", missing.unwrap())).family(&f)
            });
        }
        single.note(format!("k = {j}: {} single-boundary families", found.len()));
    }
    Ok(vec![single, index])
}

/// Strong indices by scanning every member, independent of the
/// candidate shortcut in [`type_of`].
fn strong_indices_by_scan(f: &Family) -> Result<BTreeSet<u32>> {
    let mut out = BTreeSet::new();
    for m in f.members()? {
        if is_strong(m)? {
            out.insert(index_of(m)?.expect("members of an MLCIF have an index"));
        }
    }
    Ok(out)
}

fn types(r: &mut Runner) -> Result<Vec<VerificationReport>> {
    let k = r.k_or(4, 4)?;
    let mut worked = report(
        "worked-type-examples",
        "the two k = 4, n = 12 examples have type 3 and no type",
    )
    .with_k(4)
    .with_n(12);
    let p = GroundParams::new(4, 12)?;
    let ks = |e: &[u32]| KSet::new(12, e.to_vec());
    let typed = Family::from_boundary(p, vec![ks(&[1, 2, 11, 12])?, ks(&[2, 4, 5, 12])?])?;
    let typeless = Family::from_boundary(p, vec![ks(&[1, 4, 11, 12])?, ks(&[2, 3, 4, 12])?])?;
    for (f, want) in [(&typed, TypeTag::Type(3)), (&typeless, TypeTag::Typeless)] {
        let is_mlcif = check_family(f)?.is_mlcif();
        let got = type_of(f)?;
        worked.check(is_mlcif && got == want, || {
            Witness::new(format!("got {got}, MLCIF: {is_mlcif}")).family(f)
        });
    }

    let mut common = report(
        "strong-index-common",
        "all strong sets of an MLCIF share one index",
    )
    .with_k(k);
    let mut maximal = report(
        "strong-index-maximal",
        "no member has a larger index than a strong set",
    )
    .with_k(k);
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for j in 1..=k {
        for f in r.mk(j)?.to_vec() {
            for n in 2 * j..=2 * j + 3 {
                let g = extend_fast(&f, n)?;
                let tag = match type_of(&g) {
                    Ok(t) => t,
                    Err(Error::Integrity(e)) => {
                        common.check(false, || Witness::new(e).family(&g));
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                *counts.entry(format!("k={j} {tag}")).or_default() += 1;
                let scan = strong_indices_by_scan(&g)?;
                let agrees = match tag {
                    TypeTag::Typeless => scan.is_empty(),
                    TypeTag::Type(i) => scan.len() == 1 && scan.contains(&i),
                };
                common.check(agrees, || {
                    Witness::new(format!("n = {n}: {tag} but strong indices {scan:?}")).family(&g)
                });
                if let TypeTag::Type(i) = tag {
                    let top = g
                        .boundary()
                        .iter()
                        .filter_map(|b| index_of(b).ok().flatten())
                        .max()
                        .unwrap_or(0);
                    maximal.check(top <= i, || {
                        Witness::new(format!("n = {n}: member index {top} above type {i}"))
                            .family(&g)
                    });
                }
            }
        }
    }
    common.note(format!("n ranges over 2k..=2k+3; {counts:?}"));
    Ok(vec![worked, common, maximal])
}

fn extension(r: &mut Runner) -> Result<Vec<VerificationReport>> {
    let k = r.k_or(3, 4)?;
    let mut agree = report(
        "extension-routes-agree",
        "greedy and expansion-based extension give the same MLCIF",
    )
    .with_k(k);
    for j in 2..=k {
        for f in r.mk(j)?.to_vec() {
            for n in 2 * j..=2 * j + 3 {
                let (greedy, fast) = (extend_greedy(&f, n)?, extend_fast(&f, n)?);
                agree.check(greedy == fast, || {
                    Witness::new(format!("n = {n}: greedy {greedy} vs fast {fast}")).family(&f)
                });
            }
        }
    }
    let mut unique = report(
        "extension-unique",
        "the number of MLCIFs on [n] equals |M_k| for every n >= 2k",
    );
    let cases: Vec<(u32, u32)> = (4..=8).map(|n| (2, n)).chain([(3, 6), (3, 7)]).collect();
    for (j, n) in cases {
        let direct = count_mlcifs_on_n(j, n)?;
        let mk = r.mk(j)?.len();
        unique.check(direct == mk, || {
            Witness::new(format!("k = {j}, n = {n}: {direct} on [n] vs |M_k| = {mk}"))
        });
    }
    Ok(vec![agree, unique])
}

fn theorem1(r: &mut Runner) -> Result<Vec<VerificationReport>> {
    let k = r.k_or(4, DEFAULT_MAX_K)?;
    let counts: BTreeMap<u32, u128> = (1..=k)
        .map(|j| Ok((j, r.mk(j)?.len() as u128)))
        .collect::<Result<_>>()?;
    let mut sandwich = report(
        "mlcif-count-bounds",
        "2^{C(k-1, floor(k/2))/2} <= |M_k| <= 2^{C(2k,k)/2}",
    )
    .with_k(k);
    if k >= 2 {
        for row in crate::young::theorem1_report(2, k, &counts)? {
            sandwich.check(row.sandwich == Some(true), || {
                Witness::new(format!(
                    "k = {}: log2 |M_k| = {:?} outside [{}, {}]",
                    row.k, row.log2_mk, row.log2_lower, row.log2_upper
                ))
            });
            sandwich.note(format!(
                "k = {}: {} <= log2 |M_k| = {:.6} <= {} (antichain bound {:.6})",
                row.k,
                row.log2_lower,
                row.log2_mk.unwrap_or(f64::NAN),
                row.log2_upper,
                row.log2_antichain_bound
            ));
        }
    } else {
        sandwich = sandwich.skip("the bounds are stated for k >= 2");
    }

    let mut monotone = report("count-monotone", "|M_k| <= |M_{k+1}|").with_k(k);
    for j in 1..k {
        let (a, b) = (counts[&j], counts[&(j + 1)]);
        monotone.check(a <= b, || {
            Witness::new(format!("|M_{j}| = {a} > |M_{}| = {b}", j + 1))
        });
    }

    let mut inj = report(
        "lift-injective",
        "the lift M_k -> M_{k+1} is well defined and injective",
    )
    .with_k(k.min(4));
    for j in 1..k.min(4) {
        let next: HashSet<Family> = r.mk(j + 1)?.iter().cloned().collect();
        let mut seen: BTreeMap<Family, Family> = BTreeMap::new();
        for f in r.mk(j)?.to_vec() {
            let g = lift(&f)?;
            inj.check(next.contains(&g), || {
                Witness::new(format!("lift {g} is not in M_{}", j + 1)).family(&f)
            });
            if let Some(prev) = seen.insert(g.clone(), f.clone()) {
                inj.check(false, || {
                    Witness::new(format!("{prev} and {f} both lift to {g}")).family(&f)
                });
            }
        }
    }
    Ok(vec![sandwich, monotone, inj])
}

fn theorem2(r: &mut Runner) -> Result<Vec<VerificationReport>> {
    let seed = r.seed(SuiteName::Theorem2)?;
    let k = r.k_or(2, 3)?;
    let threshold = theorem_threshold(k).expect("k <= 3");
    let n = r.params.n.unwrap_or(threshold);
    let samples = r.params.samples.unwrap_or(100);
    let mut reports = verify_increasing_theorems(k, n, samples, seed)?;

    let mut unique = report(
        "threshold-weight-unique-optimum",
        "<i> is the unique optimum for the weight 1[j >= i]",
    )
    .with_k(k)
    .with_n(n);
    let mk = r.mk(k)?.to_vec();
    for i in 1..=k {
        let opt = optimize_over(&mk, k, n, &make_omega_i(i, n)?)?;
        unique.check(opt.unique_canonical() == Some(i), || {
            let winners: Vec<String> = opt.winners().map(|e| e.family.to_string()).collect();
            Witness::new(format!(
                "i = {i}: optimum {winners:?}, unique: {}",
                opt.unique
            ))
        });
        if let Some(gap) = opt.gap {
            unique.margin(gap);
        }
    }
    reports.push(unique);
    Ok(reports)
}

fn young(r: &mut Runner) -> Result<Vec<VerificationReport>> {
    let mut iso = report(
        "lc-young-isomorphism",
        "φ(F) = (x_i - i) is an order isomorphism onto L(k, k)",
    )
    .with_k(5);
    for k in 1..=5 {
        let sets: Vec<KSet> = all_ksets(GroundParams::new(k, 2 * k)?).collect();
        let images = sets.iter().map(phi).collect::<Result<Vec<_>>>()?;
        for (f, p) in sets.iter().zip(&images) {
            let back = phi_inv(p)?;
            let sum: u64 = f.elements().iter().map(|&x| x as u64).sum();
            iso.check(
                &back == f && p.rank() as u64 + (k * (k + 1) / 2) as u64 == sum,
                || Witness::new(format!("φ roundtrip or rank shift fails at {f}")),
            );
        }
        let mut agree = true;
        for (a, pa) in sets.iter().zip(&images) {
            for (b, pb) in sets.iter().zip(&images) {
                agree &= lc_leq(a, b)? == pa.leq(pb).unwrap_or(false);
            }
        }
        iso.check(agree, || {
            Witness::new(format!("order disagreement at k = {k}"))
        });
    }

    let mut ranks = report(
        "young-rank-symmetric-unimodal",
        "rank sizes of L(m, n) are palindromic, unimodal and sum to C(m+n, m)",
    );
    let l23 = rank_sizes(2, 3)?;
    ranks.check(l23 == [1, 1, 2, 2, 2, 1, 1], || {
        Witness::new(format!("L(2,3) ranks {l23:?}"))
    });
    for m in 1..=8 {
        for n in 1..=8 {
            let v = rank_sizes(m, n)?;
            let total = binomial((m + n) as u64, m as u64).expect("small");
            ranks.check(
                is_palindromic(&v) && is_unimodal(&v) && v.iter().sum::<u128>() == total,
                || Witness::new(format!("L({m},{n}) ranks {v:?}")),
            );
        }
    }

    let mut sperner = report(
        "young-sperner",
        "the largest antichain of L(m, n) is a largest rank layer",
    );
    for m in 1..=12u32 {
        for n in 1..=12u32 {
            if binomial((m + n) as u64, m as u64).expect("small") > 300 {
                continue;
            }
            let a = max_antichain(m, n)?;
            let top = *rank_sizes(m, n)?.iter().max().expect("nonempty");
            sperner.check(a.size as u128 == top, || {
                Witness::new(format!("L({m},{n}): antichain {} vs rank {top}", a.size))
            });
        }
    }

    let mut middle = report(
        "balanced-pairs-middle-rank",
        "2|P_k| is the middle rank size of L(k, k)",
    );
    for k in (2..=12).step_by(2) {
        let (pk, mid) = (pk_count(k)?, rank_sizes(k, k)?[(k * k / 2) as usize]);
        middle.check(2 * pk == mid, || {
            Witness::new(format!("k = {k}: 2|P_k| = {} vs {mid}", 2 * pk))
        });
    }

    let mut lower = report(
        "balanced-lower-bound",
        "choosing one set from each balanced pair gives 2^{|P_k|} distinct MLCIFs",
    );
    for k in [2u32, 4] {
        let pairs = balanced_pairs(k)?;
        let mk: HashSet<Family> = r.mk(k)?.iter().cloned().collect();
        let mut built = HashSet::new();
        for bits in 0u32..(1 << pairs.len()) {
            let sel: Vec<KSet> = pairs
                .iter()
                .enumerate()
                .map(|(i, (a, b))| {
                    if bits >> i & 1 == 0 {
                        a.clone()
                    } else {
                        b.clone()
                    }
                })
                .collect();
            let f = pk_selection_family(k, &sel)?;
            lower.check(mk.contains(&f), || {
                Witness::new(format!("k = {k}: completion is not in M_k")).family(&f)
            });
            built.insert(f);
        }
        let expect = 1usize << pairs.len();
        lower.check(
            built.len() == expect && pairs.len() as u128 == pk_count(k)?,
            || {
                Witness::new(format!(
                    "k = {k}: {} distinct families from {} pairs",
                    built.len(),
                    pairs.len()
                ))
            },
        );
        lower.check(expect <= mk.len(), || {
            Witness::new(format!(
                "k = {k}: 2^|P_k| = {expect} > |M_k| = {}",
                mk.len()
            ))
        });
        lower.note(format!(
            "k = {k}: |P_k| = {}, 2^|P_k| = {expect}, |M_k| = {}",
            pairs.len(),
            mk.len()
        ));
    }

    let mut asym = report(
        "balanced-pair-asymptotic",
        "r(k) = |P_k| 2πk² / (2^{2k} √3) tends to 1 over even k",
    );
    let rs: Vec<(u32, f64)> = (2..=40)
        .step_by(2)
        .map(|k| Ok((k, prodinger_ratio(k)?)))
        .collect::<Result<_>>()?;
    let r_at = |k| rs.iter().find(|(j, _)| *j == k).expect("computed").1;
    let (r10, r40) = (r_at(10), r_at(40));
    asym.check((r40 - 1.0).abs() < (r10 - 1.0).abs(), || {
        Witness::new(format!("r(10) = {r10}, r(40) = {r40}"))
    });
    asym.check((0.8..=1.2).contains(&r40), || {
        Witness::new(format!("r(40) = {r40} outside [0.8, 1.2]"))
    });
    asym.note(format!(
        "r: {}",
        rs.iter()
            .filter(|(k, _)| k % 10 == 0)
            .map(|(k, v)| format!("r({k}) = {v:.6}"))
            .collect::<Vec<_>>()
            .join(", ")
    ));
    Ok(vec![iso, ranks, sperner, middle, lower, asym])
}

fn probe(r: &mut Runner) -> Result<Vec<VerificationReport>> {
    let seed = r.seed(SuiteName::Probe)?;
    let kmax = r.k_or(6, 9)?;
    let samples = r.params.samples.unwrap_or(100);
    let mut rep = report(
        "supersaturation-probe",
        "comparable-pair densities e(U) / (k²|U|) in L(k, k); measurements only, no verdict",
    )
    .with_k(kmax)
    .with_seed(seed, samples)
    .empirical();
    for k in 2..=kmax {
        let total = binomial(2 * k as u64, k as u64).expect("small") as f64;
        let t = ((k as f64).powf(-1.5) * total).ceil() as usize;
        let sizes: Vec<usize> = [t, 2 * t]
            .into_iter()
            .filter(|&s| s as f64 <= total)
            .collect();
        for row in supersaturation_probe(k, &sizes, samples, seed)? {
            rep.checks += 1;
            rep.note(format!(
                "k = {} {} |U| = {}: min {:.6}, mean {:.6}{}",
                row.k,
                row.strategy,
                row.size,
                row.min_density,
                row.mean_density,
                if row.below_threshold {
                    " (below k^-3/2 C(2k,k))"
                } else {
                    ""
                }
            ));
        }
    }
    Ok(vec![rep])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for n in SuiteName::ALL {
            assert_eq!(n.as_str().parse::<SuiteName>().unwrap(), n);
        }
        assert!(matches!("nope".parse::<SuiteName>(), Err(Error::Usage(_))));
    }

    #[test]
    fn aggregate_rules() {
        let pass = report("a", "a");
        let mut fail = report("b", "b");
        fail.check(false, || Witness::new("x"));
        let emp = report("c", "c").empirical();
        let skip = report("d", "d").skip("none");
        assert_eq!(aggregate(&[pass.clone(), emp.clone()]), Status::Pass);
        assert_eq!(aggregate(std::slice::from_ref(&emp)), Status::Empirical);
        assert_eq!(aggregate(&[skip, pass, emp, fail]), Status::Fail);
    }

    #[test]
    fn randomized_suites_need_a_seed() {
        assert!(matches!(
            run_suite(SuiteName::Theorem2, SuiteParams::default()),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn boundary_suite_k4() {
        let res = run_suite(
            SuiteName::Boundary,
            SuiteParams {
                k: Some(4),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(res.status, Status::Pass);
        assert!(res.reports[0]
            .notes
            .iter()
            .any(|n| n == "k = 4: 4 single-boundary families"));
        let back = SuiteResult::from_json(&res.to_json().unwrap()).unwrap();
        assert_eq!(back, res);
    }
}
