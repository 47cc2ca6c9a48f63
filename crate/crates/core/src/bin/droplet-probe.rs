use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use droplet_probe::config::{OutDir, RunConfig, WORKERS_ENV};
use droplet_probe::run::{self, ForwardCase, RunLog};
use droplet_probe::Error;

#[derive(Parser)]
#[command(name = "droplet-probe", version, about = "Droplet-probed bulk-modulus imaging")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run config; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved config and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Newtonian-potential eigen table as CSV.
    EigTable {
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        /// Output directory (prints to stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Manufactured-solution checks of both forward solvers.
    ValidateForward {
        #[command(flatten)]
        common: Common,
        /// Run one case only (both by default).
        #[arg(long, value_enum)]
        case: Option<ForwardCase>,
        /// Collocation points (overrides the config).
        #[arg(long)]
        n: Option<usize>,
        /// Collocation seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Scan droplet positions and write the contrast grid.
    Scan {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        quiet: bool,
    },
    /// Reconstruct k0 from a contrast grid for every configured noise level.
    Invert {
        #[command(flatten)]
        common: Common,
        /// Contrast grid (overrides `input` in the config).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-noise-level comparison table and slice exports.
    Report {
        /// `reconstruction_tau*.json` files written by `invert`.
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(common: &Common) -> droplet_probe::Result<RunConfig> {
    match &common.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn execute(cli: Cli) -> droplet_probe::Result<()> {
    match cli.command {
        Command::EigTable { n_max, out } => {
            let cfg = RunConfig::default();
            let (_, bytes) = run::eig_table_csv(n_max, &cfg.hash())?;
            match out {
                Some(dir) => {
                    run::write_eig_table(&OutDir::create(&dir)?, &bytes)?;
                }
                None => print!("{}", String::from_utf8_lossy(&bytes)),
            }
        }
        Command::ValidateForward {
            common,
            case,
            n,
            seed,
            out,
        } => {
            let mut cfg = load(&common)?;
            if let Some(n) = n {
                cfg.collocation.n = n;
            }
            if let Some(seed) = seed {
                cfg.collocation.seed = seed;
            }
            if common.print_config {
                println!("{}", cfg.to_json());
                return Ok(());
            }
            cfg.validate()?;
            let out = OutDir::create(&out)?;
            let mut log = RunLog::start("validate-forward", &cfg.hash());
            let v = run::validate_forward(&cfg, case)?;
            run::write_validation(&out, &v)?;
            for c in &v.cases {
                log.note(format!("{:?} L2 {:.4} pass={}", c.case, c.report.l2_error, c.pass));
            }
            print!("{}", String::from_utf8_lossy(&v.csv()?));
            for c in v.cases.iter().filter(|c| !c.pass) {
                eprintln!("warning: {:?} case misses its thresholds", c.case);
            }
            log.finish(&out)?;
        }
        Command::Scan { common, out, quiet } => {
            let cfg = load(&common)?;
            if common.print_config {
                println!("{}", cfg.to_json());
                return Ok(());
            }
            cfg.validate()?;
            let out = OutDir::create(&out)?;
            let mut log = RunLog::start("scan", &cfg.hash());
            let (xi, report) = run::scan(&cfg, !quiet)?;
            run::write_scan(&out, &xi, &report)?;
            log.note(format!("scanned {} positions", xi.values.len()));
            log.finish(&out)?;
        }
        Command::Invert { common, input, out } => {
            let mut cfg = load(&common)?;
            if input.is_some() {
                cfg.input = input;
            }
            if common.print_config {
                println!("{}", cfg.to_json());
                return Ok(());
            }
            cfg.validate()?;
            let xi = run::load_input(&cfg)?;
            let out = OutDir::create(&out)?;
            let mut log = RunLog::start("invert", &cfg.hash());
            for r in run::invert(&cfg, &xi, &out)? {
                let slice = r.slice.as_ref().map_or(f64::NAN, |m| m.gre);
                log.note(format!("tau {} GRE slice {slice:.4} interior {:.4}", r.tau, r.interior.gre));
                println!("tau = {:<6} GRE slice = {slice:.4}  interior = {:.4}", r.tau, r.interior.gre);
            }
            log.finish(&out)?;
        }
        Command::Report { inputs, out } => {
            if inputs.is_empty() {
                return Err(Error::Domain("report needs at least one input".into()));
            }
            let out = OutDir::create(&out)?;
            for p in run::report(&inputs, &out)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: invalid worker count {n}");
            return ExitCode::from(2);
        }
    }
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match &e {
                Error::Config(_) => 2,
                e if e.is_precondition() => 3,
                _ => 4,
            })
        }
    }
}
