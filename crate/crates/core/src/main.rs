use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use mlcif::config::Config;
use mlcif::enumerate::{enumerate_mlcifs_with, EnumConfig, DEFAULT_MAX_K};
use mlcif::extension::{extend_fast, extend_greedy};
use mlcif::family::{type_of, Family};
use mlcif::report::{Status, CSV_HEADER};
use mlcif::sets::{binomial, GroundParams};
use mlcif::store::{read_a300099, Cache, CACHE_ENV};
use mlcif::suite::{run_suite, SuiteName, SuiteParams};
use mlcif::weights::{family_weight, optimize_over, WeightFn};
use mlcif::young::{
    max_antichain, pk_count, prodinger_ratio, ranks_csv, supersaturation_probe, theorem1_report,
    BOUNDS_CSV_HEADER, PROBE_CSV_HEADER,
};
use mlcif::{Error, Result};

#[derive(Parser)]
#[command(
    name = "mlcif",
    version,
    about = "Maximal left-compressed intersecting families"
)]
struct Cli {
    /// Worker threads (default: $MLCIF_THREADS, then the config file, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML config file; flags and environment variables override it.
    #[arg(long, global = true, env = "MLCIF_CONFIG")]
    config: Option<PathBuf>,
    /// Cache directory (default: $MLCIF_CACHE_DIR, then ./.mlcif-cache).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Always enumerate; neither read nor write the cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate M_k as family JSONL.
    Enumerate {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        count_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Permit k above the default limit.
        #[arg(long)]
        allow_large: bool,
        /// Search nodes before aborting.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Extend families on [2k] to [n].
    Extend {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
        /// Family JSONL to extend (default: all of M_k).
        #[arg(long)]
        family: Option<PathBuf>,
        #[command(flatten)]
        route: Route,
    },
    /// Weigh families under ω.
    Weigh {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        omega: PathBuf,
        #[arg(long)]
        family: Option<PathBuf>,
    },
    /// Find the heaviest MLCIF on [n] under ω.
    Optimize {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        omega: PathBuf,
        /// Print the full result as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Young lattice L(m, n) computations.
    Young {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        what: YoungWhat,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Subset sizes for --probe (default: the antichain scale and twice it).
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
    },
    /// Bounds table for |M_k| as CSV.
    Bounds {
        #[arg(long)]
        kmax: u32,
        #[arg(long, default_value_t = 2)]
        kmin: u32,
        /// Enumerate |M_k| up to this k for the sandwich column.
        #[arg(long, default_value_t = 4)]
        enumerate_up_to: u32,
        /// External |M_k| values.
        #[arg(long)]
        oeis: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct Route {
    #[arg(long)]
    fast: bool,
    #[arg(long)]
    greedy: bool,
    /// Run both routes and fail if they disagree.
    #[arg(long)]
    both: bool,
}

#[derive(Args)]
#[group(multiple = false)]
struct YoungWhat {
    /// Rank sizes as CSV (the default).
    #[arg(long)]
    ranks: bool,
    #[arg(long)]
    antichain: bool,
    /// |P_k| and its normalized ratio; needs m = n even.
    #[arg(long)]
    pk: bool,
    /// Comparable-pair densities; needs m = n.
    #[arg(long)]
    probe: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the suite result as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write one CSV row per report.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// External |M_k| values (default: data/a300099.txt).
    #[arg(long)]
    oeis: Option<PathBuf>,
}

struct Ctx {
    config: Config,
    cache: Option<Cache>,
}

impl Ctx {
    fn mk(&self, k: u32, cfg: &EnumConfig) -> Result<Vec<Family>> {
        match &self.cache {
            Some(c) if k <= DEFAULT_MAX_K || cfg.allow_large => Ok(c.load_or_enumerate(k, cfg)?.0),
            _ => enumerate_mlcifs_with(k, cfg),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let start = Instant::now();
    let code = match run(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) | Error::Param(_) | Error::ScaleGuard(_) => 2,
                _ => 1,
            }
        }
    };
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    ExitCode::from(code)
}

fn run(cli: Cli) -> Result<bool> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(t) = config.threads(cli.threads)? {
        if t == 0 {
            return Err(Error::Usage("the thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Usage(format!("cannot configure threads: {e}")))?;
    }
    let cache = if cli.no_cache {
        None
    } else if let Some(dir) = &cli.cache_dir {
        Some(Cache::at(dir))
    } else if std::env::var_os(CACHE_ENV).is_none() && config.cache_dir.is_some() {
        config.cache_dir.clone().map(Cache::at)
    } else {
        Some(Cache::from_env())
    };
    let ctx = Ctx { config, cache };
    let mut out = io::stdout().lock();
    match cli.cmd {
        Command::Enumerate {
            k,
            count_only,
            out: path,
            allow_large,
            budget,
        } => {
            let mut cfg = EnumConfig {
                allow_large,
                ..EnumConfig::default()
            };
            if let Some(b) = budget {
                cfg.node_budget = b;
            }
            let mk = ctx.mk(k, &cfg)?;
            if count_only {
                writeln!(out, "{}", mk.len())?;
            } else {
                let body: String = mk.iter().map(|f| f.to_json_line() + "\n").collect();
                match path {
                    Some(p) => fs::write(p, body)?,
                    None => out.write_all(body.as_bytes())?,
                }
            }
            Ok(true)
        }
        Command::Extend {
            k,
            n,
            family,
            route,
        } => {
            let families = input_families(&ctx, k, family.as_deref())?;
            let mut agree = true;
            for f in &families {
                let ext = if route.greedy {
                    extend_greedy(f, n)?
                } else if route.both {
                    let (a, b) = (extend_fast(f, n)?, extend_greedy(f, n)?);
                    if a != b {
                        agree = false;
                        eprintln!("disagreement for {f}: fast {a}, greedy {b}");
                    }
                    a
                } else {
                    extend_fast(f, n)?
                };
                writeln!(out, "{}", ext.to_json_line())?;
            }
            if route.both {
                let status = if agree { Status::Pass } else { Status::Fail };
                writeln!(
                    out,
                    "[{status}] extension-routes-agree: greedy and fast extension give the same unique MLCIF on [n] (k={k}, n={n}, checks={})",
                    families.len()
                )?;
            }
            Ok(agree)
        }
        Command::Weigh {
            k,
            n,
            omega,
            family,
        } => {
            let w = WeightFn::read(&omega)?;
            for f in input_families(&ctx, k, family.as_deref())? {
                let f = if f.n() < n { extend_fast(&f, n)? } else { f };
                if f.n() != n {
                    return Err(Error::Param(format!("{f} lives on [{}], not [{n}]", f.n())));
                }
                let rec = f.to_record();
                let line = json!({"k": rec.k, "n": rec.n, "boundary": rec.boundary, "weight": family_weight(&f, &w)?});
                writeln!(out, "{line}")?;
            }
            Ok(true)
        }
        Command::Optimize { k, n, omega, json } => {
            let w = WeightFn::read(&omega)?;
            let mk = ctx.mk(k, &EnumConfig::default())?;
            let opt = optimize_over(&mk, k, n, &w)?;
            for warning in &opt.warnings {
                eprintln!("warning: {warning}");
            }
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&opt)?)?;
                return Ok(true);
            }
            for (i, row) in opt.table.iter().enumerate() {
                let mark = if opt.argmax.contains(&i) { "*" } else { " " };
                let tag = match row.family.canonical_index() {
                    Some(c) => format!("<{c}>"),
                    None => type_of(&row.family)
                        .map(|t| t.to_string())
                        .unwrap_or_default(),
                };
                writeln!(out, "{mark} {:<24} {tag:<9} {}", row.weight, row.family)?;
            }
            writeln!(out, "max weight: {}", opt.max_weight)?;
            writeln!(out, "unique: {}", opt.unique)?;
            if let Some(g) = opt.gap {
                writeln!(out, "relative gap: {g:.6e}")?;
            }
            match opt.unique_canonical() {
                Some(i) => writeln!(out, "optimum: canonical <{i}>")?,
                None => writeln!(out, "optimum: not a unique canonical family")?,
            }
            Ok(true)
        }
        Command::Verify(args) => verify(&ctx, args, &mut out),
        Command::Young {
            m,
            n,
            what,
            samples,
            seed,
            sizes,
        } => {
            if what.antichain {
                let a = max_antichain(m, n)?;
                writeln!(out, "size: {}", a.size)?;
                for p in &a.witness {
                    writeln!(out, "{:?}", p.parts())?;
                }
            } else if what.pk {
                if m != n {
                    return Err(Error::Param(format!(
                        "--pk needs m = n, got m = {m}, n = {n}"
                    )));
                }
                writeln!(out, "k,pk,prodinger_ratio")?;
                writeln!(out, "{m},{},{}", pk_count(m)?, prodinger_ratio(m)?)?;
            } else if what.probe {
                if m != n {
                    return Err(Error::Param(format!(
                        "--probe needs m = n, got m = {m}, n = {n}"
                    )));
                }
                let seed = seed.or(ctx.config.seed).unwrap_or_else(|| {
                    let s = rand::random();
                    eprintln!("seed: {s}");
                    s
                });
                let sizes = if sizes.is_empty() {
                    default_probe_sizes(m)
                } else {
                    sizes
                };
                let samples = samples.or(ctx.config.samples).unwrap_or(100);
                writeln!(out, "{PROBE_CSV_HEADER}")?;
                for row in supersaturation_probe(m, &sizes, samples, seed)? {
                    writeln!(out, "{}", row.csv_row())?;
                }
                eprintln!("densities are measurements only; no claim is checked");
            } else {
                out.write_all(ranks_csv(m, n)?.as_bytes())?;
            }
            Ok(true)
        }
        Command::Bounds {
            kmax,
            kmin,
            enumerate_up_to,
            oeis,
        } => {
            let mut counts = BTreeMap::new();
            if let Some(path) = oeis.or_else(|| ctx.config.oeis.clone()) {
                match read_a300099(&path)? {
                    Some(v) => counts.extend(v),
                    None => eprintln!(
                        "warning: {} not found; using enumerated counts only",
                        path.display()
                    ),
                }
            }
            for k in 1..=enumerate_up_to.min(kmax).min(DEFAULT_MAX_K) {
                counts.insert(k, ctx.mk(k, &EnumConfig::default())?.len() as u128);
            }
            let rows = theorem1_report(kmin, kmax, &counts)?;
            writeln!(out, "{BOUNDS_CSV_HEADER}")?;
            for row in &rows {
                writeln!(out, "{}", row.csv_row())?;
            }
            Ok(rows.iter().all(|r| r.sandwich != Some(false)))
        }
    }
}

fn default_probe_sizes(k: u32) -> Vec<usize> {
    let total = binomial(2 * k as u64, k as u64).unwrap_or(u128::MAX) as f64;
    let t = ((k as f64).powf(-1.5) * total).ceil().max(1.0) as usize;
    [t, 2 * t]
        .into_iter()
        .filter(|&s| s as f64 <= total)
        .collect()
}

/// Families from a JSONL file, or all of `M_k`.
fn input_families(ctx: &Ctx, k: u32, path: Option<&Path>) -> Result<Vec<Family>> {
    let Some(path) = path else {
        return ctx.mk(k, &EnumConfig::default());
    };
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
    {
        let f = Family::from_json_line(line)
            .map_err(|e| Error::Param(format!("{} line {}: {e}", path.display(), i + 1)))?;
        if f.k() != k {
            return Err(Error::Param(format!(
                "{} line {}: family has k = {}, expected {k}",
                path.display(),
                i + 1,
                f.k()
            )));
        }
        GroundParams::for_families(k, f.n())?;
        out.push(f);
    }
    Ok(out)
}

fn verify(ctx: &Ctx, args: VerifyArgs, out: &mut impl Write) -> Result<bool> {
    let name: SuiteName = args.suite.parse()?;
    let seed = args.seed.or(ctx.config.seed);
    if name.is_randomized() && seed.is_none() {
        return Err(Error::Usage(format!(
            "suite {name} is randomized; pass --seed for a reproducible run"
        )));
    }
    let params = SuiteParams {
        k: args.k,
        n: args.n,
        samples: args.samples.or(ctx.config.samples),
        seed,
        oeis: args.oeis.or_else(|| ctx.config.oeis.clone()),
        cache: ctx.cache.clone(),
    };
    let result = run_suite(name, params)?;
    for r in &result.reports {
        writeln!(out, "{r}")?;
    }
    writeln!(out, "suite {}: {}", result.suite, result.status)?;
    eprintln!("suite wall time: {:.3} s", result.wall_time_secs);
    if let Some(p) = args.json {
        fs::write(p, result.to_json()? + "\n")?;
    }
    if let Some(p) = args.csv {
        let body: String = std::iter::once(CSV_HEADER.to_string())
            .chain(result.reports.iter().map(|r| r.csv_row()))
            .map(|l| l + "\n")
            .collect();
        fs::write(p, body)?;
    }
    Ok(result.passed())
}
