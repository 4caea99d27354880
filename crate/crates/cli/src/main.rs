//! Command-line surface for the recoverability verifier: seeded campaigns
//! over the corollary cases, single-instance checks from JSON files, Renyi
//! limit tables, and functoriality audits.
//!
//! Exit codes: 0 all pass, 2 any inconclusive/fail verdict, 1 runtime error,
//! 64 usage or configuration error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use recoverability::error::Error;
use recoverability::io::{
    fmt_f64, fmt_nats, read_json, write_json, ChannelJson, InstanceJson, MatrixJson,
};
use recoverability::verify::{
    build_instance, check_corollary_with_instance, check_functoriality, check_limits,
    check_lower, check_upper, CaseAux, CaseParams, CaseTag, CheckReport, FunctKind, Instance,
    TSearchConfig, Verdict,
};

const EXIT_OK: u8 = 0;
const EXIT_RUNTIME: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "recov",
    version,
    about = "Verify recoverability lower/upper bounds and the derived entropy inequalities on small quantum systems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a seeded verification campaign over corollary cases
    Run(CampaignArgs),
    /// Check a single (rho, sigma, channel) triple loaded from JSON files
    Check(CheckArgs),
    /// Tabulate the Renyi difference over an alpha grid per instance
    Limits(CampaignArgs),
    /// Audit the normalization/parallel/serial recovery identities
    Functoriality(FunctArgs),
}

#[derive(Args, Clone)]
struct CampaignArgs {
    /// JSON campaign config; flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Case tags (comma separated or repeated):
    /// ssa, concavity, joint_convexity, discord, holevo, multipartite, qec, sequential
    #[arg(long, value_delimiter = ',')]
    case: Vec<String>,
    /// Subsystem dims applied to every selected case, e.g. 2,2,2
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Trials per case
    #[arg(long)]
    trials: Option<usize>,
    /// Campaign seed; trial j of case i uses stream (i << 32) | j
    #[arg(long)]
    seed: Option<u64>,
    /// Symmetric search window bound for the rotation parameter t
    #[arg(long = "t-range")]
    t_range: Option<f64>,
    /// Coarse grid point count (odd, so t = 0 is always sampled)
    #[arg(long = "t-points")]
    t_points: Option<usize>,
    /// Alpha grid for the limits table, comma separated
    #[arg(long = "alpha-grid", value_delimiter = ',')]
    alpha_grid: Vec<f64>,
    /// Output directory for reports
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct CheckArgs {
    /// State matrix JSON ({"rows","cols","re","im"})
    #[arg(long)]
    rho: Option<PathBuf>,
    /// Reference PSD operator matrix JSON
    #[arg(long)]
    sigma: Option<PathBuf>,
    /// Channel JSON ({"in","out","kraus":[...]})
    #[arg(long)]
    channel: Option<PathBuf>,
    /// A persisted instance JSON (alternative to the three files above)
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Label recorded in the report
    #[arg(long, default_value = "custom")]
    case: String,
    /// Also run the positive-definite upper-bound check
    #[arg(long)]
    upper: bool,
    #[arg(long = "t-range")]
    t_range: Option<f64>,
    #[arg(long = "t-points")]
    t_points: Option<usize>,
}

#[derive(Args, Clone)]
struct FunctArgs {
    /// normalization | parallel | serial; all three when omitted
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Campaign configuration; the JSON config file mirrors this exactly.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CampaignConfig {
    cases: Vec<String>,
    /// Per-case subsystem dimension overrides.
    dims: BTreeMap<String, Vec<usize>>,
    trials: usize,
    seed: u64,
    t_range: f64,
    t_points: usize,
    refine_iters: usize,
    alpha_grid: Vec<f64>,
    out_dir: PathBuf,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            cases: Vec::new(),
            dims: BTreeMap::new(),
            trials: 10,
            seed: 0,
            t_range: 10.0,
            t_points: 401,
            refine_iters: 40,
            alpha_grid: vec![0.6, 0.75, 0.9, 0.99, 0.999, 1.001, 1.01, 1.1, 2.0],
            out_dir: PathBuf::from("reports"),
        }
    }
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            msg: msg.into(),
        }
    }

    fn runtime(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_RUNTIME,
            msg: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        // input-shaped problems are usage errors; numerical ones are runtime
        let code = match &e {
            Error::InvalidParameter(_)
            | Error::Shape(_)
            | Error::InvalidState(_)
            | Error::InvalidChannel(_)
            | Error::InvalidMeasurement(_)
            | Error::NotHermitian { .. }
            | Error::NotPsd { .. }
            | Error::Support
            | Error::Json(_)
            | Error::Io(_) => EXIT_USAGE,
            _ => EXIT_RUNTIME,
        };
        Self {
            code,
            msg: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not errors
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::from(EXIT_OK);
            }
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let outcome = match cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Check(args) => cmd_check(args),
        Cmd::Limits(args) => cmd_limits(args),
        Cmd::Functoriality(args) => cmd_functoriality(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn load_config(args: &CampaignArgs) -> Result<CampaignConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => read_json::<CampaignConfig>(path)
            .map_err(|e| Failure::usage(format!("cannot load config {}: {e}", path.display())))?,
        None => CampaignConfig::default(),
    };
    if !args.case.is_empty() {
        cfg.cases = args.case.clone();
    }
    if let Some(dims) = &args.dims {
        for case in &cfg.cases {
            cfg.dims.insert(case.clone(), dims.clone());
        }
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.t_range {
        cfg.t_range = t;
    }
    if let Some(p) = args.t_points {
        cfg.t_points = p;
    }
    if !args.alpha_grid.is_empty() {
        cfg.alpha_grid = args.alpha_grid.clone();
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    if cfg.cases.is_empty() {
        return Err(Failure::usage(
            "no cases selected; pass --case or a config file with a non-empty case list",
        ));
    }
    if cfg.trials < 1 {
        return Err(Failure::usage("trials must be at least 1"));
    }
    Ok(cfg)
}

fn resolve_cases(cfg: &CampaignConfig) -> Result<Vec<CaseTag>, Failure> {
    cfg.cases
        .iter()
        .map(|s| {
            s.parse::<CaseTag>()
                .map_err(|e| Failure::usage(e.to_string()))
        })
        .collect()
}

fn search_config(cfg: &CampaignConfig) -> Result<TSearchConfig, Failure> {
    let t = TSearchConfig {
        t_max: cfg.t_range,
        coarse_points: cfg.t_points,
        refine_iters: cfg.refine_iters,
    };
    t.validate().map_err(|e| Failure::usage(e.to_string()))?;
    Ok(t)
}

fn params_for(case: CaseTag, cfg: &CampaignConfig) -> CaseParams {
    let mut params = CaseParams::defaults_for(case);
    if let Some(dims) = cfg.dims.get(case.as_str()) {
        params.dims = dims.clone();
    }
    params
}

fn trial_rng(seed: u64, case_idx: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((case_idx as u64) << 32) | trial as u64);
    rng
}

#[derive(Serialize)]
struct TrialRecord {
    trial: usize,
    #[serde(flatten)]
    report: CheckReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance: Option<InstanceJson>,
}

fn csv_row(report: &CheckReport, trial: usize) -> String {
    let dims = report
        .dims
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("x");
    format!(
        "{},{},{},{},{},{},{},{},{}\n",
        report.case,
        trial,
        report.seed,
        dims,
        fmt_nats(report.delta),
        fmt_nats(report.bound),
        fmt_f64(report.witness_t),
        fmt_f64(report.deficit),
        report.verdict
    )
}

fn cmd_run(args: CampaignArgs) -> Result<u8, Failure> {
    let cfg = load_config(&args)?;
    let cases = resolve_cases(&cfg)?;
    let tcfg = search_config(&cfg)?;
    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| Failure::usage(format!("cannot create {}: {e}", cfg.out_dir.display())))?;

    let jobs: Vec<(usize, CaseTag, usize)> = cases
        .iter()
        .enumerate()
        .flat_map(|(ci, &case)| (0..cfg.trials).map(move |t| (ci, case, t)))
        .collect();

    let results: Vec<Result<TrialRecord, Failure>> = jobs
        .par_iter()
        .map(|&(ci, case, trial)| {
            let mut rng = trial_rng(cfg.seed, ci, trial);
            let params = params_for(case, &cfg);
            let (report, inst) = check_corollary_with_instance(case, &params, &tcfg, &mut rng)
                .map_err(Failure::from)?;
            Ok(TrialRecord {
                trial,
                report: report.with_seed(cfg.seed),
                instance: inst.as_ref().map(InstanceJson::from_instance),
            })
        })
        .collect();

    let mut csv = String::from("case,trial,seed,dims,delta,bound,witness_t,deficit,verdict\n");
    let mut worst = Verdict::Pass;
    let mut per_case: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for r in results {
        let record = r?;
        csv.push_str(&csv_row(&record.report, record.trial));
        let entry = per_case.entry(record.report.case.clone()).or_insert((0, 0));
        entry.1 += 1;
        if record.report.verdict == Verdict::Pass {
            entry.0 += 1;
        } else {
            worst = Verdict::Inconclusive;
        }
        let path = cfg
            .out_dir
            .join(format!("{}_{:04}.json", record.report.case, record.trial));
        write_json(&path, &record).map_err(Failure::from)?;
    }
    std::fs::write(cfg.out_dir.join("report.csv"), &csv).map_err(|e| Failure::runtime(e.to_string()))?;

    for (case, (pass, total)) in &per_case {
        println!("case {case}: {pass}/{total} pass");
    }
    println!("reports written to {}", cfg.out_dir.display());
    Ok(if worst == Verdict::Pass {
        EXIT_OK
    } else {
        EXIT_INCONCLUSIVE
    })
}

fn cmd_check(args: CheckArgs) -> Result<u8, Failure> {
    let inst = if let Some(path) = &args.instance {
        if args.rho.is_some() || args.sigma.is_some() || args.channel.is_some() {
            return Err(Failure::usage(
                "--instance conflicts with --rho/--sigma/--channel",
            ));
        }
        load_instance(path, &args.case)?
    } else {
        let (rho_path, sigma_path, channel_path) =
            match (&args.rho, &args.sigma, &args.channel) {
                (Some(r), Some(s), Some(c)) => (r, s, c),
                _ => {
                    return Err(Failure::usage(
                        "pass --instance, or all of --rho, --sigma and --channel",
                    ))
                }
            };
        let rho = read_json::<MatrixJson>(rho_path)
            .map_err(|e| Failure::usage(format!("{}: {e}", rho_path.display())))?
            .to_mat()
            .map_err(Failure::from)?;
        let sigma = read_json::<MatrixJson>(sigma_path)
            .map_err(|e| Failure::usage(format!("{}: {e}", sigma_path.display())))?
            .to_mat()
            .map_err(Failure::from)?;
        let channel = read_json::<ChannelJson>(channel_path)
            .map_err(|e| Failure::usage(format!("{}: {e}", channel_path.display())))?
            .to_map()
            .map_err(Failure::from)?;
        // the state itself must be a valid density operator
        recoverability::quantum::DensityOperator::from_matrix("S", rho.clone())
            .map_err(Failure::from)?;
        let inst = Instance {
            case: args.case.clone(),
            interpretation: "Delta = D(rho||sigma) - D(N(rho)||N(sigma))".into(),
            dims: vec![rho.nrows()],
            rho,
            sigma,
            channel,
            aux: CaseAux::None,
        };
        inst.validate().map_err(Failure::from)?;
        inst
    };

    let mut tcfg = TSearchConfig::default();
    if let Some(t) = args.t_range {
        tcfg.t_max = t;
    }
    if let Some(p) = args.t_points {
        tcfg.coarse_points = p;
    }
    tcfg.validate().map_err(|e| Failure::usage(e.to_string()))?;

    let report = if args.upper {
        check_upper(&inst, &tcfg).map_err(Failure::from)?
    } else {
        check_lower(&inst, &tcfg).map_err(Failure::from)?
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&report).map_err(|e| Failure::runtime(e.to_string()))?
    );
    eprintln!(
        "case {}: verdict {} (delta = {}, bound = {}, witness t = {}, deficit = {})",
        report.case,
        report.verdict,
        fmt_nats(report.delta),
        fmt_nats(report.bound),
        fmt_f64(report.witness_t),
        fmt_f64(report.deficit)
    );
    Ok(match report.verdict {
        Verdict::Pass => EXIT_OK,
        _ => EXIT_INCONCLUSIVE,
    })
}

fn load_instance(path: &Path, case: &str) -> Result<Instance, Failure> {
    let json = read_json::<InstanceJson>(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let mut inst = json.to_instance().map_err(Failure::from)?;
    if case != "custom" {
        inst.case = case.to_string();
    }
    Ok(inst)
}

fn cmd_limits(args: CampaignArgs) -> Result<u8, Failure> {
    let cfg = load_config(&args)?;
    let cases = resolve_cases(&cfg)?;
    if cases.contains(&CaseTag::Sequential) {
        return Err(Failure::usage(
            "the sequential case has no channel instance; limits needs channel cases",
        ));
    }
    let tcfg = search_config(&cfg)?;
    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| Failure::usage(format!("cannot create {}: {e}", cfg.out_dir.display())))?;

    let jobs: Vec<(usize, CaseTag, usize)> = cases
        .iter()
        .enumerate()
        .flat_map(|(ci, &case)| (0..cfg.trials).map(move |t| (ci, case, t)))
        .collect();

    let results: Vec<Result<(usize, recoverability::verify::LimitReport), Failure>> = jobs
        .par_iter()
        .map(|&(ci, case, trial)| {
            let mut rng = trial_rng(cfg.seed, ci, trial);
            let params = params_for(case, &cfg);
            let inst = build_instance(case, &params, &mut rng).map_err(Failure::from)?;
            let rep = check_limits(&inst, &cfg.alpha_grid, &tcfg).map_err(Failure::from)?;
            Ok((trial, rep))
        })
        .collect();

    let mut csv = String::from("case,trial,alpha,delta_tilde,delta,extrapolated\n");
    let mut all_ok = true;
    for r in results {
        let (trial, rep) = r?;
        for (a, v) in rep.alphas.iter().zip(&rep.values) {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                rep.case,
                trial,
                fmt_f64(*a),
                fmt_f64(*v),
                fmt_nats(rep.delta),
                fmt_f64(rep.extrapolated)
            ));
        }
        if !rep.limit_ok || !rep.chain_ok || rep.dmax_ok == Some(false) {
            all_ok = false;
        }
    }
    let path = cfg.out_dir.join("limits.csv");
    std::fs::write(&path, &csv).map_err(|e| Failure::runtime(e.to_string()))?;
    println!("limits table written to {}", path.display());
    Ok(if all_ok { EXIT_OK } else { EXIT_INCONCLUSIVE })
}

fn cmd_functoriality(args: FunctArgs) -> Result<u8, Failure> {
    let kinds: Vec<FunctKind> = match &args.kind {
        Some(k) => vec![k.parse().map_err(|e: Error| Failure::usage(e.to_string()))?],
        None => vec![
            FunctKind::Normalization,
            FunctKind::Parallel,
            FunctKind::Serial,
        ],
    };
    if args.trials < 1 {
        return Err(Failure::usage("trials must be at least 1"));
    }
    let mut all_pass = true;
    for (ki, kind) in kinds.iter().enumerate() {
        let mut passes = 0usize;
        let mut worst: f64 = 0.0;
        for trial in 0..args.trials {
            let mut rng = trial_rng(args.seed, ki, trial);
            let rep = check_functoriality(*kind, &mut rng).map_err(Failure::from)?;
            if rep.verdict == Verdict::Pass {
                passes += 1;
            } else {
                all_pass = false;
            }
            worst = worst.max(rep.bound.value());
        }
        println!(
            "{}: {passes}/{} pass (max Choi mismatch {})",
            kind.as_str(),
            args.trials,
            fmt_f64(worst)
        );
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_INCONCLUSIVE })
}
