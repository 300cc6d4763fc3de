//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.

#![allow(clippy::mutable_key_type)]

use std::collections::{BTreeSet, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mlcif::enumerate::{
    brute_force_mlcifs, enumerate_mlcifs, enumerate_mlcifs_with, lift, EnumConfig,
};
use mlcif::extension::{count_mlcifs_on_n, extend_fast, extend_greedy};
use mlcif::family::{
    boundary_of, canonical_family, check_family, down_closure, type_of, Family, TypeTag,
};
use mlcif::report::Status;
use mlcif::sets::{all_ksets, binomial, complement_in_2k, lc_leq, z_set, GroundParams, KSet};
use mlcif::suite::{run_suite, SuiteName, SuiteParams};
use mlcif::weights::{
    downset_weight, family_weight, family_weight_direct, make_omega_i, optimize,
    random_increasing_weight, theorem_threshold, verify_increasing_theorems, WeightFn,
    CLAIM_OPTIMUM, REL_MARGIN,
};
use mlcif::young::{
    all_partitions, max_antichain, phi, phi_inv, pk_count, prodinger_ratio, rank_sizes,
};

type Outcome = Result<String, String>;
type Criterion<'a> = (
    &'static str,
    Option<Duration>,
    Box<dyn Fn() -> Outcome + 'a>,
);

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn e(err: mlcif::Error) -> String {
    err.to_string()
}

fn ks(n: u32, elems: &[u32]) -> KSet {
    KSet::new(n, elems.to_vec()).unwrap()
}

fn mk_all(kmax: u32) -> Vec<Vec<Family>> {
    (0..=kmax)
        .map(|k| {
            if k == 0 {
                Vec::new()
            } else {
                enumerate_mlcifs_with(k, &EnumConfig::default()).unwrap()
            }
        })
        .collect()
}

fn oracle_equivalence() -> Outcome {
    for k in 1..=3 {
        let fast: BTreeSet<Family> = enumerate_mlcifs(k).map_err(e)?.into_iter().collect();
        let brute = brute_force_mlcifs(k).map_err(e)?;
        ensure(fast == brute, || {
            format!(
                "k = {k}: {} enumerated vs {} by brute force",
                fast.len(),
                brute.len()
            )
        })?;
    }
    let m1 = enumerate_mlcifs(1).map_err(e)?;
    ensure(m1.len() == 1, || format!("|M_1| = {}", m1.len()))?;
    let m2: BTreeSet<Vec<KSet>> = enumerate_mlcifs(2)
        .map_err(e)?
        .iter()
        .map(|f| f.boundary().to_vec())
        .collect();
    let want = BTreeSet::from([vec![ks(4, &[1, 4])], vec![ks(4, &[2, 3])]]);
    ensure(m2 == want, || format!("M_2 boundaries {m2:?}"))?;
    Ok("|M_1| = 1, |M_2| = 2, M_3 equals the brute-force set".into())
}

fn count_bounds(mk: &[Vec<Family>]) -> Outcome {
    let kmax = mk.len() as u32 - 1;
    let mut detail = Vec::new();
    for k in 2..=kmax {
        let count = mk[k as usize].len() as f64;
        let lower = 0.5 * binomial(k as u64 - 1, k as u64 / 2).unwrap() as f64;
        let upper = 0.5 * binomial(2 * k as u64, k as u64).unwrap() as f64;
        ensure(lower <= count.log2() && count.log2() <= upper, || {
            format!(
                "k = {k}: log2 |M_k| = {} outside [{lower}, {upper}]",
                count.log2()
            )
        })?;
        detail.push(format!("{}", mk[k as usize].len()));
    }
    for k in 1..kmax as usize {
        ensure(mk[k].len() <= mk[k + 1].len(), || {
            format!("|M_{k}| > |M_{}|", k + 1)
        })?;
    }
    for k in 1..=3usize {
        let next: HashSet<&Family> = mk[k + 1].iter().collect();
        let mut images = HashSet::new();
        for f in &mk[k] {
            let g = lift(f).map_err(e)?;
            ensure(next.contains(&g), || {
                format!("lift of {f} is {g}, not in M_{}", k + 1)
            })?;
            ensure(images.insert(g), || format!("lift is not injective at {f}"))?;
        }
    }
    Ok(format!(
        "|M_k| = {} for k = 2..={kmax}; monotone; lift injective for k <= 3",
        detail.join(", ")
    ))
}

fn family_properties(mk: &[Vec<Family>]) -> Outcome {
    let mut total = 0;
    for k in 1..=4u32 {
        let params = GroundParams::new(k, 2 * k).unwrap();
        let pairs: Vec<(KSet, KSet)> = all_ksets(params)
            .filter_map(|s| {
                let c = complement_in_2k(&s).unwrap();
                (s < c).then_some((s, c))
            })
            .collect();
        for f in &mk[k as usize] {
            let flags = check_family(f).map_err(e)?;
            ensure(flags.is_mlcif(), || format!("{f}: {flags:?}"))?;
            for (a, b) in &pairs {
                ensure(f.contains(a) != f.contains(b), || {
                    format!("{f} has both or neither of {a}, {b}")
                })?;
            }
            let members = f.members().map_err(e)?;
            let back = down_closure(&boundary_of(members).map_err(e)?, params).map_err(e)?;
            ensure(back.members().map_err(e)? == members, || {
                format!("{f}: members do not roundtrip")
            })?;
            ensure(
                boundary_of(back.members().map_err(e)?).map_err(e)? == f.boundary(),
                || format!("{f}: boundary does not roundtrip"),
            )?;
            total += 1;
        }
    }
    Ok(format!("{total} families for k <= 4"))
}

fn extension_agrees(mk: &[Vec<Family>]) -> Outcome {
    let mut checks = 0;
    for k in 2..=3u32 {
        for n in 2 * k..=2 * k + 3 {
            for f in &mk[k as usize] {
                let (a, b) = (
                    extend_fast(f, n).map_err(e)?,
                    extend_greedy(f, n).map_err(e)?,
                );
                ensure(a == b, || format!("{f} to [{n}]: fast {a}, greedy {b}"))?;
                checks += 1;
            }
        }
    }
    for (k, ns) in [(2u32, 4..=8u32), (3, 6..=7)] {
        for n in ns {
            let c = count_mlcifs_on_n(k, n).map_err(e)?;
            ensure(c == mk[k as usize].len(), || {
                format!("k = {k}, n = {n}: {c} MLCIFs on [n]")
            })?;
        }
    }
    Ok(format!(
        "{checks} route comparisons; direct counts match |M_k|"
    ))
}

fn single_boundary(mk: &[Vec<Family>]) -> Outcome {
    for k in 1..=4u32 {
        let params = GroundParams::new(k, 2 * k).unwrap();
        let single: BTreeSet<&Family> = mk[k as usize]
            .iter()
            .filter(|f| f.boundary().len() == 1)
            .collect();
        let canonical: Vec<Family> = (1..=k)
            .map(|i| canonical_family(i, params).unwrap())
            .collect();
        ensure(
            single.len() == k as usize && canonical.iter().all(|c| single.contains(c)),
            || format!("k = {k}: single-boundary families {single:?}"),
        )?;
        for (i, c) in (1..=k).zip(&canonical) {
            ensure(c.boundary() == [z_set(i, params).unwrap()], || {
                format!("<{i}> has boundary {:?}", c.boundary())
            })?;
        }
    }
    Ok("exactly the k canonical families, boundary {Z_i}, for k <= 4".into())
}

fn types(mk: &[Vec<Family>]) -> Outcome {
    let p = GroundParams::new(4, 12).unwrap();
    let fam =
        |b: &[&[u32]]| Family::from_boundary(p, b.iter().map(|e| ks(12, e)).collect()).unwrap();
    let a = type_of(&fam(&[&[1, 2, 11, 12], &[2, 4, 5, 12]])).map_err(e)?;
    ensure(a == TypeTag::Type(3), || format!("first example is {a}"))?;
    let b = type_of(&fam(&[&[1, 4, 11, 12], &[2, 3, 4, 12]])).map_err(e)?;
    ensure(b == TypeTag::Typeless, || format!("second example is {b}"))?;
    let mut checked = 0;
    for k in 1..=4u32 {
        for n in 2 * k..=2 * k + 3 {
            for f in &mk[k as usize] {
                type_of(&extend_fast(f, n).map_err(e)?)
                    .map_err(|err| format!("{f} on [{n}]: {err}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "type 3 and typeless examples reproduce; {checked} type computations without conflict"
    ))
}

/// Recomputes the optimum for every sample by direct member summation.
fn k2_optimum_by_hand(samples: usize, seed: u64) -> Result<(), String> {
    let families: Vec<Family> = enumerate_mlcifs(2)
        .map_err(e)?
        .iter()
        .map(|f| extend_fast(f, 144).unwrap())
        .collect();
    for s in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        let w = random_increasing_weight(2, 144, &mut rng).map_err(e)?;
        let weights: Vec<f64> = families
            .iter()
            .map(|f| family_weight_direct(f, &w).unwrap())
            .collect();
        let max = weights.iter().copied().fold(f64::MIN, f64::max);
        for (f, wt) in families.iter().zip(&weights) {
            if *wt >= max * (1.0 - REL_MARGIN) {
                ensure(f.canonical_index().is_some(), || {
                    format!("sample {s}: {f} is optimal")
                })?;
            }
        }
    }
    Ok(())
}

fn increasing_weights() -> Outcome {
    let mut notes = Vec::new();
    for (k, samples) in [(2u32, 100usize), (3, 25)] {
        let n = theorem_threshold(k).unwrap();
        let reports = verify_increasing_theorems(k, n, samples, 7).map_err(e)?;
        for r in &reports {
            ensure(r.status == Status::Pass, || format!("k = {k}: {r}"))?;
            if let Some(m) = r.min_margin {
                ensure(m > REL_MARGIN, || {
                    format!("k = {k}: {} margin {m:e}", r.claim)
                })?;
            }
        }
        let opt = reports.iter().find(|r| r.claim == CLAIM_OPTIMUM).unwrap();
        ensure(opt.checks == samples as u64, || {
            format!("k = {k}: {} optimum checks", opt.checks)
        })?;
        let margins: Vec<String> = reports
            .iter()
            .map(|r| r.min_margin.map_or("-".into(), |m| format!("{m:.3}")))
            .collect();
        notes.push(format!(
            "k = {k}, n = {n}: min margins {}",
            margins.join("/")
        ));
    }
    k2_optimum_by_hand(100, 7)?;
    Ok(notes.join("; "))
}

fn threshold_weights() -> Outcome {
    for k in 2..=3u32 {
        let n = theorem_threshold(k).unwrap();
        for i in 1..=k {
            let opt = optimize(k, n, &make_omega_i(i, n).map_err(e)?).map_err(e)?;
            ensure(opt.unique && opt.unique_canonical() == Some(i), || {
                format!(
                    "k = {k}, i = {i}: argmax {:?}, unique {}",
                    opt.argmax, opt.unique
                )
            })?;
        }
    }
    Ok("omega_i selects exactly <i> for k = 2, 3".into())
}

fn weight_engine(mk: &[Vec<Family>]) -> Outcome {
    let w = WeightFn::dense(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    let v = downset_weight(&ks(4, &[2, 3]), &w).map_err(e)?;
    ensure(v == 11.0, || format!("downset weight {v}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let w = WeightFn::dense((0..10).map(|_| rng.gen_range(0.0..4.0)).collect()).unwrap();
        for k in 1..=3u32 {
            for n in 2 * k..=10 {
                let w = WeightFn::dense(w.values()[..n as usize].to_vec()).unwrap();
                for f in &mk[k as usize] {
                    let g = extend_fast(f, n).map_err(e)?;
                    let (ie, direct) = (
                        family_weight(&g, &w).map_err(e)?,
                        family_weight_direct(&g, &w).map_err(e)?,
                    );
                    let rel = (ie - direct).abs() / direct.abs().max(f64::MIN_POSITIVE);
                    worst = worst.max(rel);
                    ensure(rel <= 1e-12 || (ie - direct).abs() <= 1e-300, || {
                        format!("{g}: {ie} vs {direct}")
                    })?;
                }
            }
        }
    }
    Ok(format!(
        "worst relative difference {worst:.2e}; worked value 11"
    ))
}

fn young_lattice(mk: &[Vec<Family>]) -> Outcome {
    // 00,01,02,03,11,12,13,22,23,33 ranked by part sum
    let listing = ["00", "01", "02", "03", "11", "12", "13", "22", "23", "33"];
    let mut from_listing = vec![0u128; 7];
    for s in listing {
        from_listing[s.bytes().map(|b| (b - b'0') as usize).sum::<usize>()] += 1;
    }
    ensure(rank_sizes(2, 3).map_err(e)? == from_listing, || {
        format!("L(2,3) ranks {from_listing:?}")
    })?;

    for k in 1..=5u32 {
        let sets: Vec<KSet> = all_ksets(GroundParams::new(k, 2 * k).unwrap()).collect();
        let images: Vec<_> = sets.iter().map(|s| phi(s).unwrap()).collect();
        let lattice: BTreeSet<_> = all_partitions(k, k).map_err(e)?.into_iter().collect();
        ensure(
            images.iter().cloned().collect::<BTreeSet<_>>() == lattice,
            || format!("k = {k}: phi not onto"),
        )?;
        for (s, p) in sets.iter().zip(&images) {
            ensure(phi_inv(p).map_err(e)? == *s, || {
                format!("phi_inv(phi({s})) != {s}")
            })?;
        }
        for (a, pa) in sets.iter().zip(&images) {
            for (b, pb) in sets.iter().zip(&images) {
                ensure(pa.leq(pb) == Some(lc_leq(a, b).unwrap()), || {
                    format!("order differs on {a}, {b}")
                })?;
            }
        }
    }

    let mut lattices = 0;
    for m in 1..=298u32 {
        for n in 1..=298u32 {
            if binomial((m + n) as u64, m as u64).is_none_or(|c| c > 300) {
                continue;
            }
            let width = *rank_sizes(m, n).map_err(e)?.iter().max().unwrap();
            let a = max_antichain(m, n).map_err(e)?;
            ensure(a.size as u128 == width, || {
                format!("L({m},{n}): antichain {} vs rank {width}", a.size)
            })?;
            lattices += 1;
        }
    }

    for k in (2..=12u32).step_by(2) {
        let mid = rank_sizes(k, k).map_err(e)?[(k * k / 2) as usize];
        let pk = pk_count(k).map_err(e)?;
        ensure(2 * pk == mid, || {
            format!("k = {k}: 2|P_k| = {} but middle rank {mid}", 2 * pk)
        })?;
    }
    let p2 = pk_count(2).map_err(e)?;
    ensure(p2 == 1 && 1u128 << p2 == mk[2].len() as u128, || {
        format!("|P_2| = {p2}, |M_2| = {}", mk[2].len())
    })?;
    Ok(format!(
        "phi exhaustive for k <= 5; Sperner on {lattices} lattices; 2^|P_2| = |M_2| = 2"
    ))
}

fn prodinger_trend() -> Outcome {
    let r = |k| prodinger_ratio(k).map_err(e);
    let (r10, r40) = (r(10)?, r(40)?);
    for k in (2..=40).step_by(2) {
        r(k)?;
    }
    ensure((r40 - 1.0).abs() < (r10 - 1.0).abs(), || {
        format!("r(10) = {r10}, r(40) = {r40}")
    })?;
    ensure((0.8..=1.2).contains(&r40), || format!("r(40) = {r40}"))?;
    let probe = run_suite(
        SuiteName::Probe,
        SuiteParams {
            k: Some(6),
            seed: Some(1),
            samples: Some(20),
            ..Default::default()
        },
    )
    .map_err(e)?;
    ensure(
        probe.status == Status::Empirical
            && probe.reports.iter().all(|r| r.status == Status::Empirical),
        || format!("probe status {}", probe.status),
    )?;
    let rows: u64 = probe.reports.iter().map(|r| r.checks).sum();
    ensure(rows > 0, || "probe produced no densities".into())?;
    Ok(format!("r(10) = {r10:.6}, r(40) = {r40:.6}; probe emitted {rows} empirical density rows for k <= 6"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mk = mk_all(5);
    let enum_time = start.elapsed();
    let criteria: Vec<Criterion> = vec![
        (
            "oracle equivalence",
            Some(Duration::from_secs(10)),
            Box::new(oracle_equivalence),
        ),
        (
            "count bounds, monotonicity, lift",
            None,
            Box::new(|| count_bounds(&mk)),
        ),
        (
            "family properties",
            Some(Duration::from_secs(60)),
            Box::new(|| family_properties(&mk)),
        ),
        (
            "extension",
            Some(Duration::from_secs(120)),
            Box::new(|| extension_agrees(&mk)),
        ),
        (
            "single boundary iff canonical",
            None,
            Box::new(|| single_boundary(&mk)),
        ),
        ("types", None, Box::new(|| types(&mk))),
        (
            "increasing weights at the threshold",
            Some(Duration::from_secs(600)),
            Box::new(increasing_weights),
        ),
        ("omega_i unique optimum", None, Box::new(threshold_weights)),
        ("weight engine", None, Box::new(|| weight_engine(&mk))),
        (
            "young lattice",
            Some(Duration::from_secs(120)),
            Box::new(|| young_lattice(&mk)),
        ),
        (
            "balanced-pair asymptotics and probe",
            None,
            Box::new(prodinger_trend),
        ),
    ];
    println!("enumerated M_1..M_5 in {:.2} s", enum_time.as_secs_f64());
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let took = t.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) => match limit {
                Some(l) if took > *l => (false, format!("{d}; took longer than {} s", l.as_secs())),
                _ => (true, d),
            },
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {:>2} {}: {name} ({:.2} s) {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
