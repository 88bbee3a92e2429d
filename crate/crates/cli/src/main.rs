//! Command-line front end: builds, verifies, and reports on the
//! interpolating objects.

use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thetatilt_cli::{
    atomic_write, character_line, format_weight, BuildKey, ObjectFile, RootSection, TraceFile,
    VerifyReport,
};
use thetatilt_core::analysis::{is_tilting_at_level, weyl_multiplicities};
use thetatilt_core::builder::{build_s_theta_capped, ThetaMode, ThetaSpec};
use thetatilt_core::hatops::{verify_comrel, verify_easypeasy};
use thetatilt_core::rootdata::{RootSystem, RootSystemSpec};
use thetatilt_core::xobj::{check_theta_standard, check_x1, check_x2, check_x3};
use thetatilt_core::{GradedObject, PrimeConfig, Weight};

#[derive(Parser)]
#[command(name = "thetatilt", version, about = "Exact engine for interpolating families between Weyl and tilting objects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the object for a root system, prime, highest weight, and level set.
    Build {
        /// Root system label: A1, A1xA1, A2, B2, G2.
        #[arg(long, conflicts_with = "cartan")]
        root: Option<String>,
        /// Custom Cartan matrix as JSON, e.g. "[[2,-1],[-1,2]]".
        #[arg(long)]
        cartan: Option<String>,
        /// Odd prime p (p ≠ 3 with a G2 component).
        #[arg(long)]
        p: u64,
        /// Highest weight in fundamental coordinates, comma separated.
        #[arg(long)]
        lambda: String,
        /// Level set: "empty", "all", or a comma-separated list like "1,2".
        #[arg(long, default_value = "empty")]
        theta: String,
        /// Include level 0 (τ₀ = v − 1) in finite level sets.
        #[arg(long)]
        tau0: bool,
        /// Override the computed relevance bound on cyclotomic levels.
        #[arg(long)]
        max_level: Option<u32>,
        /// Output path for the object file.
        #[arg(long)]
        out: PathBuf,
        /// Output path for the trace file (default: <out>.trace.json).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Reuse previously built objects keyed by the configuration hash.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Verify the axioms and Θ-standardness of a stored object.
    Verify {
        #[arg(long, name = "in")]
        input: PathBuf,
        #[arg(long, default_value = "empty")]
        theta: String,
        #[arg(long)]
        tau0: bool,
        #[arg(long)]
        max_level: Option<u32>,
    },
    /// Print the character table and Weyl multiplicities of a stored object.
    Char {
        #[arg(long, name = "in")]
        input: PathBuf,
    },
    /// Decide tilting after base change to the level-l localization.
    Tilting {
        #[arg(long, name = "in")]
        input: PathBuf,
        #[arg(long)]
        level: u32,
    },
    /// Run the symbolic identity self-tests.
    SelftestIdentities {
        /// Bound on the divided-power exponents in the sweep.
        #[arg(long, default_value_t = 4)]
        max: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn env_level_cap() -> Option<u32> {
    std::env::var("THETA_TILT_MAX_LEVEL").ok().and_then(|s| s.parse().ok())
}

fn parse_lambda(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| format!("bad lambda entry '{t}': {e}")))
        .collect()
}

fn parse_theta(s: &str, tau0: bool) -> Result<ThetaSpec, String> {
    let spec = match s.trim() {
        "empty" | "" => ThetaSpec::empty(),
        "all" => ThetaSpec::all(),
        list => {
            let levels: Result<Vec<u32>, String> = list
                .split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|e| format!("bad level '{t}': {e}")))
                .collect();
            ThetaSpec::finite(levels?)
        }
    };
    Ok(ThetaSpec { include_tau0: tau0, ..spec })
}

fn load_object(path: &Path) -> Result<GradedObject, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file = ObjectFile::from_json(&text).map_err(|e| e.to_string())?;
    file.into_object().map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Build { root, cartan, p, lambda, theta, tau0, max_level, out, trace, cache_dir } => {
            let root_section = match (&root, &cartan) {
                (Some(label), None) => RootSection::Label(label.clone()),
                (None, Some(json)) => {
                    let m: Vec<Vec<i64>> =
                        serde_json::from_str(json).map_err(|e| format!("bad cartan: {e}"))?;
                    RootSection::Cartan { cartan: m }
                }
                _ => return Err("exactly one of --root or --cartan is required".into()),
            };
            let rs = match &root_section {
                RootSection::Label(l) => RootSystem::new(RootSystemSpec::Label(l.clone())),
                RootSection::Cartan { cartan } => {
                    RootSystem::new(RootSystemSpec::Cartan(cartan.clone()))
                }
            }
            .map_err(|e| e.to_string())?;
            let cfg = PrimeConfig::new(p, rs.has_g2_component()).map_err(|e| e.to_string())?;
            let lam = Weight(parse_lambda(&lambda)?);
            if lam.rank() != rs.rank() {
                return Err(format!("lambda has {} coordinates, expected {}", lam.rank(), rs.rank()));
            }
            let spec = parse_theta(&theta, tau0)?;
            let cap = max_level.or_else(env_level_cap);
            let trace_path =
                trace.unwrap_or_else(|| out.with_extension("trace.json"));
            // Cache lookup.
            let key = BuildKey {
                root: &root_section,
                p,
                lambda: lam.coords(),
                theta: &theta,
                tau0,
                max_level: cap,
            }
            .sha256();
            if let Some(dir) = &cache_dir {
                let cached = dir.join(format!("{key}.json"));
                let cached_trace = dir.join(format!("{key}.trace.json"));
                if cached.is_file() && cached_trace.is_file() {
                    std::fs::copy(&cached, &out).map_err(|e| e.to_string())?;
                    std::fs::copy(&cached_trace, &trace_path).map_err(|e| e.to_string())?;
                    println!("reused cached build {key}");
                    return Ok(ExitCode::SUCCESS);
                }
            }
            let (obj, build_trace) = match build_s_theta_capped(&rs, &cfg, &lam, &spec, cap) {
                Ok(x) => x,
                Err(thetatilt_core::Error::Internal(msg)) => {
                    eprintln!("internal verification failure: {msg}");
                    return Ok(ExitCode::from(1));
                }
                Err(e) => return Err(e.to_string()),
            };
            let file = ObjectFile::from_object(&obj);
            let hash = file.sha256();
            let trace_file = TraceFile::new(&build_trace, hash.clone());
            atomic_write(&out, &file.to_json()).map_err(|e| e.to_string())?;
            atomic_write(&trace_path, &trace_file.to_json()).map_err(|e| e.to_string())?;
            if let Some(dir) = &cache_dir {
                atomic_write(&dir.join(format!("{key}.json")), &file.to_json())
                    .map_err(|e| e.to_string())?;
                atomic_write(&dir.join(format!("{key}.trace.json")), &trace_file.to_json())
                    .map_err(|e| e.to_string())?;
            }
            println!(
                "built {} (total rank {}, sha256 {})",
                out.display(),
                build_trace.total_rank(),
                hash
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { input, theta, tau0, max_level } => {
            let obj = load_object(&input)?;
            let spec = parse_theta(&theta, tau0)?;
            let cap = max_level.or_else(env_level_cap);
            let levels = resolve_levels(&obj, &spec, cap);
            let x1 = match check_x1(&obj) {
                Ok(()) => "pass".to_string(),
                Err(e) => format!("fail: {e}"),
            };
            let x2 = match check_x2(&obj).map_err(|e| e.to_string())? {
                Ok(()) => "pass".to_string(),
                Err(w) => format!(
                    "fail at mu={}, alpha={}, beta={}, m={}, n={}",
                    format_weight(&w.mu),
                    w.alpha,
                    w.beta,
                    w.m,
                    w.n
                ),
            };
            let x3 = match check_x3(&obj).map_err(|e| e.to_string())? {
                Ok(()) => "pass".to_string(),
                Err(f) => format!("fail: {f:?}"),
            };
            let theta_standard = match check_theta_standard(&obj, &levels).map_err(|e| e.to_string())? {
                Ok(()) => "pass".to_string(),
                Err(thetatilt_core::xobj::AxiomFailure::ThetaStandard { mu, witness }) => {
                    let w: Vec<String> = witness.iter().map(|x| x.canonical_string()).collect();
                    format!("fail at mu={} witness [{}]", format_weight(&mu), w.join(", "))
                }
                Err(f) => format!("fail: {f:?}"),
            };
            let pass = [&x1, &x2, &x3, &theta_standard].iter().all(|s| *s == "pass");
            let report = VerifyReport { x1, x2, x3, theta_standard, pass };
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Char { input } => {
            let obj = load_object(&input)?;
            let line = character_line(&obj).map_err(|e| e.to_string())?;
            println!("{line}");
            // Dimension summary per Weyl constituent.
            let mults = weyl_multiplicities(&obj.character(), obj.rs()).map_err(|e| e.to_string())?;
            let total: u64 = obj.character().dim();
            println!("total rank {total}, {} Weyl constituents", mults.values().sum::<u64>());
            Ok(ExitCode::SUCCESS)
        }
        Command::Tilting { input, level } => {
            if level == 0 {
                return Err("tilting levels start at 1".into());
            }
            let obj = load_object(&input)?;
            let verdict = is_tilting_at_level(&obj, level).map_err(|e| e.to_string())?;
            println!("{verdict}");
            Ok(ExitCode::SUCCESS)
        }
        Command::SelftestIdentities { max } => {
            let mut all_ok = true;
            let lbound = (2 * max).max(8) as i64;
            let mut comrel_count = 0u64;
            for d in 1..=3u32 {
                for m in 1..=max {
                    for n in 1..=max {
                        for l in -lbound..=lbound {
                            comrel_count += 1;
                            if !verify_comrel(m, n, l, d, (m + n + 2) as usize) {
                                println!("comrel FAIL at m={m} n={n} l={l} d={d}");
                                all_ok = false;
                            }
                        }
                    }
                }
            }
            println!("comrel: {comrel_count} cases {}", if all_ok { "pass" } else { "FAIL" });
            let mut easy_ok = true;
            let abound = (2 * max).max(8) as i64;
            let mut easy_count = 0u64;
            for d in 1..=3u32 {
                for a in -abound..=abound {
                    for b in -abound..=abound {
                        for c in 0..=abound as u32 {
                            easy_count += 1;
                            if !verify_easypeasy(a, b, c, d) {
                                println!("easypeasy FAIL at a={a} b={b} c={c} d={d}");
                                easy_ok = false;
                            }
                        }
                    }
                }
            }
            println!("easypeasy: {easy_count} cases {}", if easy_ok { "pass" } else { "FAIL" });
            Ok(if all_ok && easy_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

/// The level set used by verification: the spec's levels confined to the
/// object's relevant range (and the optional cap).
fn resolve_levels(obj: &GradedObject, spec: &ThetaSpec, cap: Option<u32>) -> Vec<u32> {
    let mut all = obj.relevant_levels();
    if let Some(c) = cap {
        all.retain(|&l| l <= c);
    }
    match &spec.mode {
        ThetaMode::All => {
            let mut v = all;
            if spec.include_tau0 {
                v.insert(0, 0);
            }
            v
        }
        ThetaMode::Finite(set) => set
            .iter()
            .copied()
            .filter(|&l| (l >= 1 || spec.include_tau0) && all.last().map(|&b| l <= b).unwrap_or(l == 0))
            .collect(),
    }
}
