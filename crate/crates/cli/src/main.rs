use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;
use serde_json::{json, Value};

use satprob::config::{DEFAULT_ENUMERATION_BUDGET, DEFAULT_ORACLE_VAR_CAP};
use satprob::decision::oracle_decide;
use satprob::dimacs::{parse_dimacs_with, serialize_dimacs, serialize_dimacs_line, ParseOptions, ParsedDimacs};
use satprob::interval::{interval_bounding_decide, interval_reduction_decide, sigma_by_expansion};
use satprob::kernel::{
    collapse_threshold, kernelize, locality_constant, locality_decide, sunflower_collapsing_decide,
    LocalityPreset,
};
use satprob::majmaj::{build_majmaj_formula, majmaj_decide, majmaj_oracle, MajMajInstance};
use satprob::oracle::sigma_exact_capped;
use satprob::spectrum::{
    dyadic_grid, empirical_gap, enumerate_spectrum, export_figure_data, known_gap, write_figure_csv,
    GapBound, GapProvenance,
};
use satprob::trichotomy::{classify, reduce_to_sat_decide, target_may_exist, ClassEvidence};
use satprob::{CnfFormula, Decision, Dyadic, Limits, Mode, Threshold, Verdict};

const EXIT_NEGATIVE: u8 = 10;
const EXIT_USAGE: u8 = 2;
const EXIT_LIMIT: u8 = 3;
const EXIT_ERROR: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "satprob", version, about = "Exact satisfaction-probability threshold decisions for k-CNF formulas")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Exit with status 10 when a yes/no query is answered "no".
    #[arg(long, global = true)]
    exit_code_verdict: bool,
    /// Largest variable count the brute-force oracle may enumerate.
    #[arg(long, default_value_t = DEFAULT_ORACLE_VAR_CAP, global = true)]
    oracle_cap: usize,
    /// Upper bound on enumerated subsets, search nodes and candidate formulas.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET, global = true)]
    budget: u64,
    /// Worker threads for parallel sections (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Drop tautological clauses from DIMACS input instead of rejecting it.
    #[arg(long, global = true)]
    drop_tautologies: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact satisfaction probability of a DIMACS formula.
    Sigma {
        #[arg(long, value_enum, default_value_t = SigmaMethod::Auto)]
        method: SigmaMethod,
        /// DIMACS file, or `-` for standard input.
        file: PathBuf,
    },
    /// Decide σ(φ) against a threshold δ.
    Decide(DecideArgs),
    /// Collapse sunflowers and print the kernel.
    Kernelize {
        /// Collapse sunflowers with more than H petals.
        #[arg(long, required_unless_present = "gap", conflicts_with = "gap")]
        h: Option<u32>,
        /// Derive H from a spectral gap instead.
        #[arg(long)]
        gap: Option<Dyadic>,
        file: PathBuf,
    },
    /// Enumerate achievable probabilities of small k-CNFs.
    Spectrum {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        max_vars: usize,
        /// Also write membership and classification over a dyadic grid as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// The CSV grid is m/2^E for m = 0..=2^E (defaults to --max-vars).
        #[arg(long)]
        grid_exp: Option<u32>,
    },
    /// Complexity of deciding σ(φ) > δ for k-CNFs.
    Classify {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: Threshold,
        /// Variable bound for the witness search.
        #[arg(long, default_value_t = 7)]
        search_vars: usize,
    },
    /// Does a majority of X-assignments leave a majority of satisfying Y-extensions?
    Majmaj {
        /// Counting variables, e.g. `1,2,5`. Falls back to `c x-vars` lines in the file.
        #[arg(long, value_delimiter = ',')]
        x_vars: Option<Vec<u32>>,
        /// Largest bad subset size (defaults to the number of projected clauses).
        #[arg(long = "C")]
        c: Option<usize>,
        /// Also run the enumerating reference and report disagreement as an error.
        #[arg(long)]
        check: bool,
        file: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SigmaMethod {
    /// Oracle when the formula fits the cap, expansion otherwise.
    Auto,
    Oracle,
    Expansion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Ge,
    Gt,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Sunflower,
    Interval,
    /// Interval reduction for `ge`; the backdoor reduction to l-SAT for `gt` and `eq`.
    Reduction,
    Locality,
    /// The backdoor reduction to l-SAT.
    Backdoor,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GapPolicy {
    CertifiedOnly,
    AllowEmpirical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    Listing,
    Lemma,
}

#[derive(Args, Debug)]
struct DecideArgs {
    #[arg(long)]
    delta: Threshold,
    #[arg(long, value_enum, default_value_t = ModeArg::Ge)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Algo::Reduction)]
    algo: Algo,
    /// Spectral gap below δ, as M/2^E. Treated as asserted by the caller.
    #[arg(long)]
    gap: Option<Dyadic>,
    /// Where a gap may come from when --gap is absent.
    #[arg(long, value_enum, default_value_t = GapPolicy::CertifiedOnly)]
    gap_policy: GapPolicy,
    /// Variable bound of the sample used for empirical gaps.
    #[arg(long, default_value_t = 5)]
    gap_vars: usize,
    /// Width bound k used for gaps and thresholds (defaults to the widest clause).
    #[arg(long)]
    k: Option<usize>,
    /// Locality constant: largest subset size checked.
    #[arg(long = "C")]
    c: Option<usize>,
    /// How to derive C from the gap when --C is absent.
    #[arg(long, value_enum, default_value_t = Preset::Lemma)]
    locality_preset: Preset,
    /// Target width l of the backdoor reduction.
    #[arg(long, default_value_t = 2)]
    l: usize,
    /// Re-verify a JSON decision against the formula instead of deciding.
    #[arg(long, value_name = "JSON")]
    verify_certificate: Option<PathBuf>,
    file: PathBuf,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(satprob::Error),
}

impl From<satprob::Error> for CliError {
    fn from(e: satprob::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// What a subcommand produced: text, JSON, and the yes/no answer for boolean queries.
struct Output {
    text: String,
    json: Value,
    answer: Option<bool>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            warn!("could not size the worker pool: {e}");
        }
    }
    match run(&cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            let written = match cli.format {
                Format::Text => write!(stdout, "{}", out.text),
                Format::Json => writeln!(stdout, "{}", serde_json::to_string_pretty(&out.json).expect("valid JSON")),
            };
            if written.is_err() {
                return ExitCode::from(EXIT_ERROR);
            }
            if cli.exit_code_verdict && out.answer == Some(false) {
                ExitCode::from(EXIT_NEGATIVE)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                e if e.is_resource_limit() => EXIT_LIMIT,
                satprob::Error::InvalidArgument(_) => EXIT_USAGE,
                _ => EXIT_ERROR,
            })
        }
    }
}

fn run(cli: &Cli) -> CliResult<Output> {
    let limits = Limits { oracle_var_cap: cli.oracle_cap, enumeration_budget: cli.budget };
    let opts = ParseOptions { drop_tautologies: cli.drop_tautologies };
    match &cli.command {
        Command::Sigma { method, file } => cmd_sigma(&read_formula(file, opts)?.formula, *method, &limits),
        Command::Decide(args) => cmd_decide(args, read_formula(&args.file, opts)?.formula, &limits),
        Command::Kernelize { h, gap, file } => cmd_kernelize(&read_formula(file, opts)?.formula, *h, gap.as_ref()),
        Command::Spectrum { k, max_vars, csv, grid_exp } => {
            cmd_spectrum(*k, *max_vars, csv.as_deref(), grid_exp.unwrap_or(*max_vars as u32), &limits)
        }
        Command::Classify { k, delta, search_vars } => cmd_classify(*k, delta, *search_vars, &limits),
        Command::Majmaj { x_vars, c, check, file } => {
            let parsed = read_formula(file, opts)?;
            let xs = match (x_vars, parsed.x_vars) {
                (Some(x), _) => x.clone(),
                (None, Some(x)) => x,
                (None, None) => {
                    return Err(CliError::Usage("no counting variables: pass --x-vars or add a `c x-vars` line".into()))
                }
            };
            cmd_majmaj(MajMajInstance::new(parsed.formula, xs), *c, *check, &limits)
        }
    }
}

fn read_formula(path: &Path, opts: ParseOptions) -> CliResult<ParsedDimacs> {
    let bytes = if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        buf
    } else {
        fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?
    };
    Ok(parse_dimacs_with(&bytes, opts)?)
}

fn cmd_sigma(phi: &CnfFormula, method: SigmaMethod, limits: &Limits) -> CliResult<Output> {
    let nvars = phi.vars().len();
    let use_oracle = match method {
        SigmaMethod::Oracle => true,
        SigmaMethod::Expansion => false,
        SigmaMethod::Auto => nvars <= limits.oracle_var_cap,
    };
    let (sigma, name) = if use_oracle {
        (sigma_exact_capped(phi, None, limits.oracle_var_cap)?, "oracle")
    } else {
        (sigma_by_expansion(phi), "expansion")
    };
    Ok(Output {
        text: format!("{sigma}\n"),
        json: json!({ "sigma": sigma, "vars": nvars, "method": name }),
        answer: None,
    })
}

fn resolve_gap(args: &DecideArgs, k: usize, limits: &Limits) -> CliResult<GapBound> {
    if let Some(g) = &args.gap {
        if g.is_zero() {
            return Err(CliError::Usage("--gap must be positive".into()));
        }
        return Ok(GapBound {
            gap: g.clone(),
            provenance: GapProvenance::Asserted,
            citation: "supplied on the command line".into(),
        });
    }
    if let Some(g) = known_gap(k, &args.delta) {
        return Ok(g);
    }
    if args.gap_policy == GapPolicy::AllowEmpirical {
        if let Some(g) = empirical_gap(k, &args.delta, args.gap_vars, limits.enumeration_budget)? {
            warn!("using an empirical gap ({}); the verdict is only as sound as that sample", g.gap);
            return Ok(g);
        }
        return Err(CliError::Usage(format!(
            "no {k}-CNF value below δ = {} over {} variables; pass --gap",
            args.delta, args.gap_vars
        )));
    }
    Err(CliError::Usage(format!(
        "no certified gap below δ = {} for k = {k}; pass --gap or --gap-policy allow-empirical",
        args.delta
    )))
}

fn cmd_decide(args: &DecideArgs, phi: CnfFormula, limits: &Limits) -> CliResult<Output> {
    let k = args.k.unwrap_or_else(|| phi.width_bound());
    let phi = if k == phi.width_bound() { phi } else { phi.rebound(k)? };
    if let Some(path) = &args.verify_certificate {
        return verify_certificate(path, &phi, &args.delta, limits);
    }
    let mode = match args.mode {
        ModeArg::Ge => Mode::Ge,
        ModeArg::Gt => Mode::Gt,
        ModeArg::Eq => Mode::Eq,
    };
    let delta = &args.delta;
    let mut gap_bound = None;
    let decision = match (mode, args.algo) {
        (_, Algo::Oracle) => oracle_decide(&phi, delta, mode, limits.oracle_var_cap)?,
        (Mode::Ge, Algo::Reduction) => interval_reduction_decide(&phi, delta),
        (Mode::Ge, Algo::Sunflower) => {
            let g = resolve_gap(args, k, limits)?;
            let d = sunflower_collapsing_decide(&phi, delta, &g.gap, limits)?;
            gap_bound = Some(g);
            d
        }
        (Mode::Ge, Algo::Interval) => {
            let g = resolve_gap(args, k, limits)?;
            let d = interval_bounding_decide(&phi, delta, &g.gap)?;
            gap_bound = Some(g);
            d
        }
        (Mode::Ge, Algo::Locality) => {
            let c = match args.c {
                Some(c) => c,
                None => {
                    let g = resolve_gap(args, k, limits)?;
                    let preset = match args.locality_preset {
                        Preset::Listing => LocalityPreset::Listing,
                        Preset::Lemma => LocalityPreset::Lemma,
                    };
                    let c = locality_constant(k as u32, &g.gap, preset)?;
                    gap_bound = Some(g);
                    usize::try_from(c).unwrap_or(usize::MAX)
                }
            };
            locality_decide(&phi, delta, c, limits)?
        }
        (Mode::Ge, Algo::Backdoor) => {
            return Err(CliError::Usage("the backdoor reduction answers --mode gt or eq".into()))
        }
        (_, Algo::Reduction | Algo::Backdoor) => {
            if args.l == 0 || args.l > k.max(1) {
                return Err(CliError::Usage(format!("--l must lie in 1..={}", k.max(1))));
            }
            let exp = delta.as_dyadic().map(|d| d.exponent() as usize).unwrap_or(0);
            if delta.as_dyadic().is_some() && target_may_exist(k, delta, args.l, exp.max(k)) {
                warn!("δ may be a {k}-target for {}-CNFs; satisfiability falls back to general search", args.l);
            }
            let g = resolve_gap(args, k, limits)?;
            let d = reduce_to_sat_decide(&phi, delta, args.l, &g.gap, limits)?;
            gap_bound = Some(g);
            d
        }
        (_, algo) => {
            return Err(CliError::Usage(format!(
                "--algo {} answers --mode ge only; use reduction, backdoor or oracle",
                algo.to_possible_value().expect("no skipped variants").get_name()
            )))
        }
    };
    let answer = match mode {
        Mode::Ge => decision.verdict == Verdict::Ge,
        Mode::Gt => decision.verdict == Verdict::Gt,
        Mode::Eq => decision.verdict == Verdict::Eq,
    };
    let mut text = format!("{}\n", decision.verdict);
    text += &format!("algorithm: {}\n", serde_json::to_value(decision.algorithm)?.as_str().unwrap_or("?"));
    if let Some(g) = &gap_bound {
        text += &format!("gap: {} ({}: {})\n", g.gap, g.provenance, g.citation);
    }
    let json = json!({
        "delta": delta,
        "mode": format!("{:?}", args.mode).to_lowercase(),
        "answer": answer,
        "decision": decision,
        "gap": gap_bound,
    });
    Ok(Output { text, json, answer: Some(answer) })
}

fn verify_certificate(path: &Path, phi: &CnfFormula, delta: &Threshold, limits: &Limits) -> CliResult<Output> {
    let raw: Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    let inner = raw.get("decision").cloned().unwrap_or(raw);
    let decision: Decision = serde_json::from_value(inner)?;
    let ok = decision.verify(phi, delta, limits.oracle_var_cap)?;
    Ok(Output {
        text: format!("certificate {}\n", if ok { "verified" } else { "rejected" }),
        json: json!({ "verified": ok, "verdict": decision.verdict }),
        answer: Some(ok),
    })
}

fn cmd_kernelize(phi: &CnfFormula, h: Option<u32>, gap: Option<&Dyadic>) -> CliResult<Output> {
    let h = match (h, gap) {
        (Some(h), _) => h,
        (None, Some(g)) => collapse_threshold(phi.width_bound() as u32, g)?,
        (None, None) => return Err(CliError::Usage("pass --h or --gap".into())),
    };
    let kr = kernelize(phi, h);
    let mut text = format!("c h {}\n", kr.h);
    for step in &kr.trace {
        let core = step.core.to_dimacs().iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
        text += &format!("c collapse core [{core}] link {}\n", step.link_size);
    }
    text += &serialize_dimacs(&kr.kernel);
    Ok(Output { text, json: serde_json::to_value(&kr)?, answer: None })
}

fn cmd_spectrum(k: usize, max_vars: usize, csv: Option<&Path>, grid_exp: u32, limits: &Limits) -> CliResult<Output> {
    let sample = enumerate_spectrum(k, max_vars, limits.enumeration_budget)?;
    let mut text = String::new();
    for e in &sample.entries {
        text += &format!("{}\t{}\n", e.value, serialize_dimacs_line(&e.witness));
    }
    if let Some(path) = csv {
        if grid_exp > 16 {
            return Err(CliError::Usage("--grid-exp must be at most 16".into()));
        }
        let rows = export_figure_data(k, max_vars, &dyadic_grid(grid_exp), limits.enumeration_budget)?;
        let file = fs::File::create(path)?;
        write_figure_csv(&rows, io::BufWriter::new(file))?;
    }
    Ok(Output { text, json: serde_json::to_value(&sample)?, answer: None })
}

fn cmd_classify(k: usize, delta: &Threshold, search_vars: usize, limits: &Limits) -> CliResult<Output> {
    let c = classify(k, delta, search_vars, limits.enumeration_budget)?;
    let mut text = format!("{}\n", c.class);
    let mut witness_dimacs = Value::Null;
    match &c.evidence {
        ClassEvidence::Witness { witness } => {
            let dimacs = serialize_dimacs(&witness.omega);
            text += &format!("c witness for l = {}\n", witness.l);
            text += &dimacs;
            witness_dimacs = Value::String(dimacs);
        }
        ClassEvidence::NonDyadic => text += "c δ is not dyadic\n",
        ClassEvidence::Hole => text += "c δ lies strictly between 1 - 2^-k and 1\n",
        ClassEvidence::NoShortClauseDecomposition => text += "c no decomposition into short and long clauses reaches δ\n",
        ClassEvidence::SearchBound { max_vars, budget_exhausted } => {
            text += &format!("c no witness over {max_vars} variables");
            text += if *budget_exhausted { " (budget exhausted)\n" } else { "\n" };
        }
    }
    let mut json = serde_json::to_value(&c)?;
    json["witness_dimacs"] = witness_dimacs;
    Ok(Output { text, json, answer: None })
}

fn cmd_majmaj(inst: MajMajInstance, c: Option<usize>, check: bool, limits: &Limits) -> CliResult<Output> {
    let c = c.unwrap_or_else(|| inst.projections().len().max(1));
    let omega = build_majmaj_formula(&inst, c, limits)?;
    let answer = majmaj_decide(&inst, c, limits)?;
    if check {
        let reference = majmaj_oracle(&inst, limits)?;
        if reference != answer {
            return Err(CliError::Core(satprob::Error::InvalidArgument(format!(
                "C = {c} is too small: the reduction answered {answer}, enumeration answered {reference}"
            ))));
        }
    }
    Ok(Output {
        text: format!("{answer}\n"),
        json: json!({
            "answer": answer,
            "C": c,
            "omega": omega.omega,
            "bad_subsets": omega.bad_subsets.len(),
        }),
        answer: Some(answer),
    })
}
