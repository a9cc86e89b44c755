use std::f64::consts::{FRAC_PI_2, PI};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use causal_chain::correspondence::classify_eigenstates;
use causal_chain::game::{
    build_w_general, classical_bound, cyclic_rows, two_party_outcome, validate_process, BlochVector, TermAxes,
};
use causal_chain::phase::OrderParameters;
use causal_chain::sweep::{format_sig15, run_sweep, write_records, Backend, OutputFormat, SweepConfig};
use causal_chain::verify::{run_verification, VerifyLevel, VerifyOptions};

#[derive(Parser)]
#[command(name = "causal-chain", version, about = "Spin-chain / causal-game correspondence toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep θ for an N-site chain and emit one record per grid point.
    Sweep(SweepArgs),
    /// Run the built-in consistency checks.
    Verify(VerifyArgs),
    /// Classify the 16 eigenstates of the four-site chain by their best K_avg.
    Classify(ClassifyArgs),
    /// Evaluate the guessing game on a process matrix.
    Game(GameArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Dense,
    Fermion,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Number of chain sites (even, at least 4).
    #[arg(long = "n")]
    n_sites: usize,
    #[arg(long, default_value_t = 65)]
    steps: usize,
    /// Lower end of the θ range in radians.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta_min: f64,
    /// Upper end of the θ range in radians [default: π/2].
    #[arg(long, allow_negative_numbers = true)]
    theta_max: Option<f64>,
    /// Read --theta-min and --theta-max as multiples of π.
    #[arg(long)]
    over_pi: bool,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    backend: BackendArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
    level: LevelArg,
    /// Flip the correlation-matrix sign to exercise the oracle check.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Interior grid points on (0, π/2).
    #[arg(long, default_value_t = 65)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GameArgs {
    #[arg(long, default_value_t = 2)]
    parties: usize,
    /// Angle in radians; sets f0 = cosθ, f1 = sinθ.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "theta_over_pi")]
    theta: Option<f64>,
    /// Angle as a multiple of π.
    #[arg(long, allow_negative_numbers = true)]
    theta_over_pi: Option<f64>,
    /// Two-body weight; overrides the θ value.
    #[arg(long, allow_negative_numbers = true, requires = "f1")]
    f0: Option<f64>,
    /// Three-body weight; overrides the θ value.
    #[arg(long, allow_negative_numbers = true, requires = "f0")]
    f1: Option<f64>,
    /// Take f0 = C_zz and f1 = m_x from the ground state of the 2𝒩-site chain.
    #[arg(long, conflicts_with_all = ["f0", "f1"])]
    from_chain: bool,
}

fn open_output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sweep(args: SweepArgs) -> anyhow::Result<ExitCode> {
    let scale = if args.over_pi { PI } else { 1.0 };
    let config = SweepConfig {
        n_sites: args.n_sites,
        theta_min: args.theta_min * scale,
        theta_max: args.theta_max.map_or(FRAC_PI_2, |t| t * scale),
        steps: args.steps,
        backend: match args.backend {
            BackendArg::Dense => Backend::Dense,
            BackendArg::Fermion => Backend::Fermion,
            BackendArg::Auto => Backend::Auto,
        },
        output: args.output.clone(),
        format: args.format.into(),
    };
    let records = run_sweep(&config)?;
    let mut out = open_output(&config.output)?;
    write_records(&records, config.format, &mut out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let results = run_verification(VerifyOptions {
        level: match args.level {
            LevelArg::Quick => VerifyLevel::Quick,
            LevelArg::Full => VerifyLevel::Full,
        },
        inject_sign_fault: args.inject_fault,
    });
    let mut failed = 0;
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!r.passed);
        println!("{tag}  {:<45} {} ({:.2}s)", r.name, r.detail, r.seconds);
    }
    println!("{} of {} checks passed", results.len() - failed, results.len());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn classify(args: ClassifyArgs) -> anyhow::Result<ExitCode> {
    if args.steps == 0 {
        bail!("steps must be positive");
    }
    let grid: Vec<f64> = (1..=args.steps)
        .map(|k| k as f64 * FRAC_PI_2 / (args.steps + 1) as f64)
        .collect();
    let report = classify_eigenstates(&grid)?;
    let mut out = open_output(&args.output)?;
    match args.format {
        FormatArg::Json => {
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
        }
        FormatArg::Csv => {
            writeln!(out, "rank,max_k_avg,argmax_theta,flagged")?;
            for e in &report.entries {
                writeln!(
                    out,
                    "{},{},{},{}",
                    e.rank,
                    format_sig15(e.max_k_avg),
                    format_sig15(e.argmax_theta),
                    e.flagged
                )?;
            }
        }
    }
    out.flush()?;
    eprintln!(
        "{} of {} eigenstates exceed {} (ranks {:?})",
        report.flagged_ranks().len(),
        report.entries.len(),
        report.bound,
        report.flagged_ranks()
    );
    Ok(ExitCode::SUCCESS)
}

fn game(args: GameArgs) -> anyhow::Result<ExitCode> {
    let n = args.parties;
    let theta = args.theta.or(args.theta_over_pi.map(|t| t * PI));
    let (f0, f1) = if args.from_chain {
        let Some(t) = theta else { bail!("--from-chain needs --theta or --theta-over-pi") };
        let p = OrderParameters::compute(2 * n, t)?;
        (p.c_zz, p.m_x)
    } else if let (Some(f0), Some(f1)) = (args.f0, args.f1) {
        (f0, f1)
    } else if let Some(t) = theta {
        (t.cos(), t.sin())
    } else {
        bail!("give --theta, --theta-over-pi or --f0/--f1");
    };
    let outcome = if n == 2 {
        let w = build_w_general(2, f0, f1, TermAxes::TWO_PARTY, 1, 1)?;
        report_validity(&w)?;
        two_party_outcome(&w, BlochVector::MIXED)?
    } else {
        let w = build_w_general(n, f0, f1, TermAxes::CYCLIC, n, n)?;
        report_validity(&w)?;
        cyclic_rows(&w)?.outcome()
    };
    let bound = classical_bound(n)?;
    println!("parties   {n}");
    println!("f0        {}", format_sig15(f0));
    println!("f1        {}", format_sig15(f1));
    println!("P_left    {}", format_sig15(outcome.p_left));
    println!("P_right   {}", format_sig15(outcome.p_right));
    println!("P_total   {}", format_sig15(outcome.p_total));
    println!("bound     {}", format_sig15(bound.p_total));
    println!("{}", if outcome.violates(bound.p_total) { "VIOLATION" } else { "no violation" });
    Ok(ExitCode::SUCCESS)
}

fn report_validity(w: &causal_chain::game::ProcessMatrix) -> anyhow::Result<()> {
    let r = validate_process(w)?;
    println!(
        "W check   hermiticity {:.2e}, trace deviation {:.2e}, min eigenvalue {:.3e}{}",
        r.hermiticity_residual,
        r.trace_deviation,
        r.min_eigenvalue,
        if r.is_valid(1e-10) { "" } else { "  (not a valid process matrix)" }
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::Classify(a) => classify(a),
        Command::Game(a) => game(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
