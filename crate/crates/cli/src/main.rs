//! pvzeta: exact local zeta integrals of prehomogeneous vector spaces.
//!
//! Exit codes: 0 success, 1 a mathematical verification failed (an exact
//! identity has a counterexample, gamma factors disagree, a reconstruction
//! fails holdout), 2 usage or input errors.

mod config;
mod report;

use clap::{Args, Parser, Subcommand};
use config::Config;
use pvzeta_core::arith::LaurentRat;
use pvzeta_core::error::Error as CoreError;
use pvzeta_core::orbits::{self, SweepField};
use pvzeta_core::pvs::SpaceId;
use pvzeta_core::schwartz::AdditiveCharacter;
use pvzeta_core::zeta_padic::{self, AnsatzSearch, CensusOptions, Strategy};
use pvzeta_core::zeta_real::{self, OrbitFilter, QuadratureSpec};
use pvzeta_core::{gamma, Rat};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(name = "pvzeta", version, about = "exact local zeta integrals of prehomogeneous vector spaces")]
struct Cli {
    /// Print results as JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Config file with `key = value` defaults (flags win; PVZETA_THREADS
    /// overrides the thread count over everything).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for census enumeration.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Catalog operations.
    Catalog {
        #[command(subcommand)]
        sub: CatalogCmd,
    },
    /// Exact identity checks.
    Check {
        #[command(subcommand)]
        sub: CheckCmd,
    },
    /// Relative invariant evaluation.
    Invariant {
        #[command(subcommand)]
        sub: InvariantCmd,
    },
    /// Orbit classification and stabilizer-torus verification.
    Orbit {
        #[command(subcommand)]
        sub: OrbitCmd,
    },
    /// Exact valuation census of |f| on Z_p^n.
    Census(CensusArgs),
    /// Reconstruct Z(t) from a census file.
    Zeta(ZetaArgs),
    /// Archimedean zeta integral in the convergent range.
    ZetaReal(ZetaRealArgs),
    /// Fourier transform self-tests (involution, Plancherel).
    Fourier {
        #[command(subcommand)]
        sub: FourierCmd,
    },
    /// Extract the scalar gamma factor from the functional equation.
    Gamma(GammaArgs),
    /// Least-squares probe of the gamma matrix on the cube space.
    GammaProbe(GammaProbeArgs),
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// List the catalog spaces.
    List,
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Verify f(x rho(g)) = omega(g) f(x) on random integer data.
    Eigenchar {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum InvariantCmd {
    /// Evaluate the basic relative invariant at a rational point.
    Eval {
        #[arg(long)]
        space: String,
        /// Comma-separated rational coordinates, e.g. 1,0,0,1.
        #[arg(long)]
        point: String,
    },
}

#[derive(Subcommand)]
enum OrbitCmd {
    /// Classify a cube point into its orbit label.
    Classify {
        #[arg(long, default_value = "cube-split")]
        space: String,
        /// fp:P for a prime P, or q
        #[arg(long)]
        field: String,
        /// Comma-separated integer coordinates (8 for the cube).
        #[arg(long)]
        point: String,
    },
    /// Verify the boundary stabilizer-torus characters exactly.
    VerifyLfe {
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Re-classify random group translates of a representative.
    Sweep {
        #[arg(long)]
        point: String,
        /// fp:P for a prime P, or q
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long)]
    space: String,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    mmax: u32,
    /// direct | branch-lift | monte-carlo
    #[arg(long, default_value = "branch-lift")]
    strategy: String,
    /// Point budget for exact enumeration.
    #[arg(long)]
    budget: Option<u128>,
    /// Monte Carlo samples (strategy monte-carlo).
    #[arg(long)]
    samples: Option<u64>,
    /// Monte Carlo valuation precision (strategy monte-carlo).
    #[arg(long)]
    precision_k: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Restrict to the coset center + p^level Z_p^n.
    #[arg(long)]
    center: Option<String>,
    #[arg(long, default_value_t = 0)]
    level: u32,
    /// Census cache file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ZetaArgs {
    /// Census cache file (see `pvzeta census --out`).
    #[arg(long)]
    census: PathBuf,
    #[arg(long, default_value_t = 1)]
    num_deg: usize,
    #[arg(long, default_value_t = 2)]
    den_deg: usize,
    #[arg(long, default_value_t = 2)]
    holdout: usize,
    /// Structured denominator search (igusa) instead of free Pade fitting.
    #[arg(long)]
    ansatz: Option<String>,
}

#[derive(Args)]
struct ZetaRealArgs {
    #[arg(long)]
    space: String,
    #[arg(long)]
    s: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Restrict to a sign stratum of f: + or -.
    #[arg(long)]
    orbit: Option<String>,
    /// Override the conservative convergent-range bound on s.
    #[arg(long)]
    min_s: Option<f64>,
}

#[derive(Subcommand)]
enum FourierCmd {
    /// Involution and Plancherel identities on a random corpus.
    Check {
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
    },
}

#[derive(Args)]
struct GammaArgs {
    #[arg(long)]
    space: String,
    #[arg(long)]
    p: u64,
    /// Report gamma in the half-density normalization (argument shifted by
    /// lambda_0; folded exactly when lambda_0 is integral).
    #[arg(long)]
    half_density: bool,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct GammaProbeArgs {
    #[arg(long, default_value_t = 2)]
    p: u64,
    /// Truncation depth of the stratified series (valuations <= m-trunc).
    /// Depth 2 makes the dual-side censuses six levels deep and takes
    /// minutes; depth 0-1 answers in seconds but only sees valuation-0
    /// strata.
    #[arg(long, default_value_t = 1)]
    m_trunc: u32,
    /// Comma-separated Re(lambda) sample points.
    #[arg(long, default_value = "7,7.5,8")]
    lambda: String,
    /// dominant | parity | square | square-even (strata of the open orbit;
    /// `dominant` fits the single valuation-0 class and always answers
    /// quickly, the finer partitions may honestly report rank deficiency
    /// until the truncation depth sees their strata)
    #[arg(long, default_value = "dominant")]
    signatures: String,
    #[arg(long, default_value_t = 5)]
    seed: u64,
    #[arg(long)]
    budget: Option<u128>,
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

/// Errors that are verification failures (exit 1) rather than usage errors.
fn verification_failure(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::InconsistentGamma { .. }
            | CoreError::HoldoutMismatch { .. }
            | CoreError::NoFit
            | CoreError::RankDeficient
    )
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let threads = config::resolve_threads(cli.threads, &config)?;
    let json = cli.json;
    match cli.command {
        Command::Catalog { sub: CatalogCmd::List } => catalog_list(json),
        Command::Check {
            sub: CheckCmd::Eigenchar { space, trials, seed },
        } => check_eigenchar(json, &space, trials, seed),
        Command::Invariant {
            sub: InvariantCmd::Eval { space, point },
        } => invariant_eval(json, &space, &point),
        Command::Orbit { sub } => orbit_cmd(json, sub),
        Command::Census(args) => census_cmd(json, args, threads, &config),
        Command::Zeta(args) => zeta_cmd(json, args),
        Command::ZetaReal(args) => zeta_real_cmd(json, args, &config),
        Command::Fourier {
            sub: FourierCmd::Check { trials, seed, tolerance },
        } => fourier_check_cmd(json, trials, seed, tolerance),
        Command::Gamma(args) => gamma_cmd(json, args, threads, &config),
        Command::GammaProbe(args) => gamma_probe_cmd(json, args, threads),
    }
}

fn parse_space(s: &str) -> Result<SpaceId, String> {
    SpaceId::parse(s).ok_or_else(|| format!("unknown space `{s}` (tate, matrix2, cube-split)"))
}

fn parse_rational_list(s: &str) -> Result<Vec<Rat>, String> {
    s.split(',')
        .map(|part| {
            let part = part.trim();
            if let Some((n, d)) = part.split_once('/') {
                let n = pvzeta_core::Int::from_str(n.trim()).map_err(|e| e.to_string())?;
                let d = pvzeta_core::Int::from_str(d.trim()).map_err(|e| e.to_string())?;
                if d == pvzeta_core::Int::from(0) {
                    return Err("zero denominator".into());
                }
                Ok(Rat::new(n, d))
            } else {
                pvzeta_core::Int::from_str(part)
                    .map(Rat::from)
                    .map_err(|e| e.to_string())
            }
        })
        .collect()
}

fn parse_int_list(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|part| part.trim().parse::<i64>().map_err(|e| e.to_string()))
        .collect()
}

fn parse_field(s: &str) -> Result<SweepField, String> {
    if s == "q" || s == "Q" {
        return Ok(SweepField::Q);
    }
    if let Some(p) = s.strip_prefix("fp:") {
        let p = p.parse::<u64>().map_err(|e| e.to_string())?;
        return Ok(SweepField::Fp(p));
    }
    Err(format!("unknown field `{s}` (expected fp:<prime> or q)"))
}

fn emit<T: serde::Serialize>(json: bool, value: &T, text: impl FnOnce()) -> Result<(), String> {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(value).map_err(|e| e.to_string())?
        );
    } else {
        text();
    }
    Ok(())
}

fn catalog_list(json: bool) -> Result<ExitCode, String> {
    let entries: Vec<report::CatalogEntryJson> = pvzeta_core::pvs::catalog()
        .iter()
        .map(|d| report::CatalogEntryJson {
            id: d.id.as_str().to_string(),
            dim: d.dim,
            invariant_degree: d.invariant_degree,
            density_shift: report::rat_string(&d.density_shift),
            basic_invariant_terms: d.basic_invariant.terms.len(),
        })
        .collect();
    let out = report::CatalogJson { spaces: entries };
    emit(json, &out, || {
        println!("{:<12} {:>4} {:>8} {:>8}", "id", "dim", "deg f", "lambda0");
        for e in &out.spaces {
            println!(
                "{:<12} {:>4} {:>8} {:>8}",
                e.id, e.dim, e.invariant_degree, e.density_shift
            );
        }
    })?;
    Ok(ExitCode::SUCCESS)
}

fn check_eigenchar(json: bool, space: &str, trials: u64, seed: u64) -> Result<ExitCode, String> {
    let space = parse_space(space)?;
    let rep = pvzeta_core::invariants::check_eigencharacter(space, trials, seed);
    let out = report::EigencharJson {
        space: space.as_str().into(),
        trials: rep.trials,
        failures: rep.failures,
        counterexample_point: rep
            .counterexample
            .as_ref()
            .map(|(pt, _)| pt.iter().map(report::rat_string).collect()),
    };
    emit(json, &out, || {
        println!(
            "eigencharacter identity on {}: {} trials, {} failures",
            out.space, out.trials, out.failures
        );
    })?;
    Ok(if rep.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn invariant_eval(json: bool, space: &str, point: &str) -> Result<ExitCode, String> {
    let space = parse_space(space)?;
    let coords = parse_rational_list(point)?;
    let value = pvzeta_core::invariants::eval_invariant(
        space,
        &pvzeta_core::pvs::Point(coords.clone()),
    )
    .map_err(|e| e.to_string())?;
    let out = report::InvariantEvalJson {
        space: space.as_str().into(),
        point: coords.iter().map(report::rat_string).collect(),
        value: report::rat_string(&value),
    };
    emit(json, &out, || println!("f(x) = {}", out.value))?;
    Ok(ExitCode::SUCCESS)
}

fn orbit_cmd(json: bool, sub: OrbitCmd) -> Result<ExitCode, String> {
    match sub {
        OrbitCmd::Classify { space, field, point } => {
            let space = parse_space(&space)?;
            if space != SpaceId::CubeSplit {
                return Err("orbit classification is defined for cube-split".into());
            }
            let coords = parse_int_list(&point)?;
            let field = parse_field(&field)?;
            let label = match field {
                SweepField::Fp(p) => {
                    orbits::classify_fp(p, &coords).map_err(|e| e.to_string())?
                }
                SweepField::Q => {
                    let pt = pvzeta_core::pvs::Point(
                        coords.iter().map(|&c| pvzeta_core::rat_int(c)).collect(),
                    );
                    orbits::classify_q(&pt).map_err(|e| e.to_string())?
                }
            };
            let out = report::OrbitClassifyJson {
                space: space.as_str().into(),
                field: field.to_string(),
                point: coords,
                label: label.to_string(),
            };
            emit(json, &out, || println!("{}", out.label))?;
            Ok(ExitCode::SUCCESS)
        }
        OrbitCmd::VerifyLfe { trials, seed } => {
            let rep = orbits::verify_hypothesis_lfe(trials, seed);
            let out = report::LfeJson {
                rows: rep
                    .rows
                    .iter()
                    .map(|r| report::LfeRowJson {
                        row: r.label.to_string(),
                        trials: r.trials,
                        failures: r.failures,
                    })
                    .collect(),
                total_failures: rep.total_failures(),
            };
            emit(json, &out, || {
                for r in &out.rows {
                    println!("{:<16} trials {:>6} failures {}", r.row, r.trials, r.failures);
                }
            })?;
            Ok(if rep.total_failures() == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        OrbitCmd::Sweep {
            point,
            field,
            trials,
            seed,
        } => {
            let coords = parse_int_list(&point)?;
            let field = parse_field(&field)?;
            let rep = orbits::orbit_stability_sweep(&coords, field, trials, seed)
                .map_err(|e| e.to_string())?;
            let out = report::SweepJson {
                representative: coords,
                field: field.to_string(),
                trials: rep.trials,
                base_label: rep.base_label.to_string(),
                label_changes: rep.label_changes,
            };
            emit(json, &out, || {
                println!(
                    "{} over {}: {} trials, {} label changes",
                    out.base_label, out.field, out.trials, out.label_changes
                );
            })?;
            Ok(if rep.label_changes == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn census_cmd(
    json: bool,
    args: CensusArgs,
    threads: usize,
    config: &Config,
) -> Result<ExitCode, String> {
    let space = parse_space(&args.space)?;
    let strategy = Strategy::parse(&args.strategy)
        .ok_or_else(|| format!("unknown strategy `{}`", args.strategy))?;
    let budget = match args.budget {
        Some(b) => b,
        None => match config.get::<u128>("census.budget")? {
            Some(b) => b,
            None => config
                .get::<u128>("global.budget")?
                .unwrap_or(1_000_000_000),
        },
    };
    let opts = CensusOptions { budget, threads };
    let census = match strategy {
        Strategy::MonteCarlo => {
            if args.center.is_some() {
                return Err("monte-carlo does not support coset restriction".into());
            }
            let samples = match args.samples {
                Some(s) => s,
                None => config
                    .get::<u64>("census.samples")?
                    .ok_or("monte-carlo needs --samples")?,
            };
            let k = match args.precision_k {
                Some(k) => k,
                None => config
                    .get::<u32>("census.precision_k")?
                    .ok_or("monte-carlo needs --precision-k")?,
            };
            let seed = args.seed.unwrap_or(1);
            zeta_padic::census_monte_carlo(space, args.p, args.mmax, samples, k, seed, &opts)
                .map_err(|e| e.to_string())?
        }
        _ => {
            let center = match &args.center {
                Some(c) => parse_int_list(c)?,
                None => vec![0; space.dim()],
            };
            zeta_padic::census_exact_on_coset(
                space, args.p, &center, args.level, args.mmax, strategy, &opts,
            )
            .map_err(|e| e.to_string())?
        }
    };
    zeta_padic::write_census_file(&args.out, &census).map_err(|e| e.to_string())?;
    let file = zeta_padic::CensusFile::from_census(&census);
    emit(json, &file, || {
        println!(
            "wrote {} entries to {}",
            census.entries.len(),
            args.out.display()
        );
        for e in &census.entries {
            let tag = if e.exact { "exact" } else { "mc" };
            println!("c_{} = {}/{} [{tag}]", e.m, e.c.numer(), e.c.denom());
        }
    })?;
    Ok(ExitCode::SUCCESS)
}

fn zeta_cmd(json: bool, args: ZetaArgs) -> Result<ExitCode, String> {
    let census = zeta_padic::read_census_file(&args.census).map_err(|e| e.to_string())?;
    let result = if let Some(kind) = &args.ansatz {
        if kind != "igusa" {
            return Err(format!("unknown ansatz `{kind}` (expected igusa)"));
        }
        zeta_padic::zeta_from_census_ansatz(
            &census,
            args.num_deg,
            args.holdout,
            &AnsatzSearch::default(),
        )
    } else {
        zeta_padic::zeta_from_census(&census, args.num_deg, args.den_deg, args.holdout)
    };
    match result {
        Ok(z) => {
            let laurent = LaurentRat::from_fun(z.zeta.clone());
            let out = report::ZetaJson {
                space: census.space.as_str().into(),
                p: census.p,
                zeta: report::RationalFunctionJson::from_laurent(&laurent),
                holdout_verified: z.holdout_verified,
                validated_extras: z.validated_extras,
                poles: z.pole_list.iter().map(report::rat_string).collect(),
                ansatz: z.ansatz.clone(),
            };
            emit(json, &out, || {
                println!("Z(t) = {}", z.zeta);
                println!(
                    "holdout verified: {} ({} extra coefficients)",
                    z.holdout_verified, z.validated_extras
                );
                if !z.pole_list.is_empty() {
                    let poles: Vec<String> =
                        z.pole_list.iter().map(report::rat_string).collect();
                    println!("rational poles: t = {}", poles.join(", "));
                }
                if let Some(a) = &z.ansatz {
                    println!("denominator shape: {a}");
                }
            })?;
            Ok(if z.holdout_verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Err(e) if verification_failure(&e) => {
            eprintln!("reconstruction failed: {e}");
            Ok(ExitCode::from(1))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn zeta_real_cmd(json: bool, args: ZetaRealArgs, config: &Config) -> Result<ExitCode, String> {
    let space = parse_space(&args.space)?;
    let filter = match args.orbit.as_deref() {
        None => None,
        Some("+") => Some(OrbitFilter::Positive),
        Some("-") => Some(OrbitFilter::Negative),
        Some(other) => return Err(format!("unknown orbit filter `{other}` (+ or -)")),
    };
    let mut spec = QuadratureSpec::default();
    if let Some(v) = config.get::<f64>("zeta_real.abs_tol")? {
        spec.abs_tol = v;
    }
    if let Some(v) = config.get::<f64>("zeta_real.rel_tol")? {
        spec.rel_tol = v;
    }
    if let Some(v) = config.get::<u64>("zeta_real.max_evals")? {
        spec.max_evals = v;
    }
    let sample = zeta_real::zeta_real(space, args.s, args.sigma, &spec, filter, args.min_s)
        .map_err(|e| e.to_string())?;
    let out = report::ZetaRealJson {
        space: space.as_str().into(),
        s: args.s,
        sigma: args.sigma,
        orbit_filter: filter.map(|f| {
            match f {
                OrbitFilter::Positive => "+",
                OrbitFilter::Negative => "-",
            }
            .to_string()
        }),
        value: sample.value.re,
        est_error: sample.est_error,
        evals: sample.evals,
    };
    emit(json, &out, || {
        println!(
            "Z(s={}) = {:.15e}  (est err {:.2e})",
            args.s, out.value, out.est_error
        );
    })?;
    Ok(ExitCode::SUCCESS)
}

fn fourier_check_cmd(
    json: bool,
    trials: u64,
    seed: u64,
    tolerance: f64,
) -> Result<ExitCode, String> {
    let (inv, plan) =
        pvzeta_core::schwartz::fourier_check(trials, seed).map_err(|e| e.to_string())?;
    let pass = inv < tolerance && plan < tolerance;
    let out = report::FourierCheckJson {
        trials,
        seed,
        max_involution_error: inv,
        max_plancherel_drift: plan,
        tolerance,
        pass,
    };
    emit(json, &out, || {
        println!("involution max error:   {inv:.3e}");
        println!("plancherel max drift:   {plan:.3e}");
        println!(
            "tolerance:              {tolerance:.1e}  ({})",
            if pass { "pass" } else { "FAIL" }
        );
    })?;
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn gamma_cmd(
    json: bool,
    args: GammaArgs,
    threads: usize,
    config: &Config,
) -> Result<ExitCode, String> {
    let space = parse_space(&args.space)?;
    let tolerance = match args.tolerance {
        Some(t) => t,
        None => config.get::<f64>("gamma.tolerance")?.unwrap_or(1e-9),
    };
    let opts = CensusOptions {
        budget: 1_000_000_000,
        threads,
    };
    let fns = gamma::default_test_functions(space, args.p).map_err(|e| e.to_string())?;
    match gamma::gamma_extract(
        space,
        args.p,
        &fns,
        &AdditiveCharacter::standard(),
        args.half_density,
        tolerance,
        &opts,
    ) {
        Ok(rep) => {
            let out = report::GammaJson {
                space: space.as_str().into(),
                p: args.p,
                gamma_t_power: rep.gamma.shift,
                gamma_num: report::poly_strings(rep.gamma.fun.num()),
                gamma_den: report::poly_strings(rep.gamma.fun.den()),
                residual: rep.residual,
                test_functions: rep.test_functions,
                unconfirmed: rep.unconfirmed,
                dual_shift: report::rat_string(&rep.dual_shift),
                half_density_shift: rep.half_density_shift.as_ref().map(report::rat_string),
                half_density_folded: rep.half_density_folded,
            };
            emit(json, &out, || {
                println!("gamma(t) = {}", rep.gamma);
                println!(
                    "residual over {} test functions: {:.3e}",
                    rep.test_functions, rep.residual
                );
                if let Some(l0) = &rep.half_density_shift {
                    if rep.half_density_folded {
                        println!(
                            "half-density normalization folded in (lambda_0 = {})",
                            report::rat_string(l0)
                        );
                    } else {
                        println!(
                            "half-density gamma is gamma(p^lambda_0 t) with lambda_0 = {}",
                            report::rat_string(l0)
                        );
                    }
                }
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Err(e) if verification_failure(&e) => {
            eprintln!("gamma extraction failed: {e}");
            Ok(ExitCode::from(1))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn gamma_probe_cmd(json: bool, args: GammaProbeArgs, threads: usize) -> Result<ExitCode, String> {
    let lambda: Vec<f64> = args
        .lambda
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let signatures = match args.signatures.as_str() {
        "dominant" => vec![gamma::dominant_signature(args.p)],
        "parity" => gamma::parity_signatures(args.p),
        "square" => gamma::square_class_signatures(args.p),
        // the cube has no odd-valuation mass at shallow depth (c_1 = 0), so
        // the even square-class strata are the useful shallow default
        "square-even" => gamma::square_class_signatures(args.p)
            .into_iter()
            .filter(|s| s.parity == 0)
            .collect(),
        other => return Err(format!("unknown signatures `{other}`")),
    };
    let opts = CensusOptions {
        budget: args.budget.unwrap_or(4_000_000_000),
        threads,
    };
    let fns = gamma::default_probe_test_functions(
        args.p,
        signatures.len() * signatures.len() + 2,
        args.seed,
    )
    .map_err(|e| e.to_string())?;
    match gamma::gamma_matrix_probe(
        args.p,
        &lambda,
        &fns,
        &signatures,
        args.m_trunc,
        &AdditiveCharacter::standard(),
        &opts,
    ) {
        Ok(rep) => {
            let out = report::GammaProbeJson {
                p: rep.p,
                signatures: rep.signatures.clone(),
                lambda_samples: rep.lambda_samples.clone(),
                residuals: rep.residuals.clone(),
                skipped_samples: rep.skipped_samples,
                truncation_bound: rep.truncation_bound,
                test_functions: rep.test_functions,
                m_trunc: rep.m_trunc,
            };
            emit(json, &out, || {
                println!("signatures: {}", rep.signatures.join(", "));
                for (l, r) in rep.lambda_samples.iter().zip(&rep.residuals) {
                    println!("lambda = {l}: residual {r:.3e}");
                }
                println!("series truncation bound: {:.3e}", rep.truncation_bound);
                if rep.skipped_samples > 0 {
                    println!("skipped {} divergent sample(s)", rep.skipped_samples);
                }
                if rep.residuals.iter().any(|r| *r > 1e-3) {
                    println!(
                        "note: residuals of order one mean these strata do not satisfy a \
                         matrix functional equation at this truncation depth; the probe \
                         makes no claim that they enumerate the open orbits"
                    );
                }
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Err(e) if verification_failure(&e) => {
            eprintln!("probe failed: {e}");
            Ok(ExitCode::from(1))
        }
        Err(e) => Err(e.to_string()),
    }
}
