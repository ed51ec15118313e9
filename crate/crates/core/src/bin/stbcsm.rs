use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use stbcsm::config::{parse_config, RunConfig, Scheme, CONFIG_ENV};
use stbcsm::montecarlo::Progress;
use stbcsm::report::{self, Comparison};
use stbcsm::transceiver::Detector;

#[derive(Parser)]
#[command(
    name = "stbcsm",
    version,
    about = "STBC spatial modulation link simulator"
)]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    /// Silence progress on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    #[arg(long, global = true)]
    scheme: Option<String>,
    #[arg(long = "Nt", alias = "nt", global = true)]
    nt: Option<usize>,
    #[arg(long = "Na", alias = "na", global = true)]
    na: Option<usize>,
    #[arg(long = "M", alias = "m", global = true)]
    m: Option<usize>,
    #[arg(long, value_enum, global = true)]
    detector: Option<DetectorArg>,
    /// Comma-separated SNR grid in dB.
    #[arg(long, value_delimiter = ',', global = true)]
    snr: Option<Vec<f64>>,
    #[arg(long, global = true)]
    max_frames: Option<u64>,
    #[arg(long, global = true)]
    target_errors: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectorArg {
    JointMl,
    TwoStep,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo BER over the SNR grid.
    Sweep,
    /// Analytic bounds against a two-step simulation.
    Bound,
    /// Side-by-side scheme comparisons.
    Compare {
        #[arg(long, group = "which")]
        table2: bool,
        #[arg(long, group = "which")]
        fig4: bool,
        #[arg(long, group = "which")]
        fig5: bool,
        #[arg(long, group = "which")]
        fig8: bool,
    },
    /// LED positions and LoS gains.
    Geometry,
    /// Activation patterns and their labels.
    Patterns,
    /// Codeword structure of the configured code.
    Codebook,
    /// Print the effective config as JSON.
    Config,
}

fn load(cli: &Cli) -> stbcsm::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => parse_config(p)?,
        None => RunConfig::default(),
    };
    let o = &cli.overrides;
    if let Some(s) = &o.scheme {
        cfg.scheme = s.parse::<Scheme>()?;
    }
    if let Some(v) = o.nt {
        cfg.nt = v;
        if cfg
            .room
            .led_positions
            .as_ref()
            .is_some_and(|l| l.len() != v)
        {
            cfg.room.led_positions = None;
        }
    }
    cfg.na = o.na.unwrap_or(cfg.na);
    cfg.m = o.m.unwrap_or(cfg.m);
    if let Some(d) = o.detector {
        cfg.detector = match d {
            DetectorArg::JointMl => Detector::JointMl,
            DetectorArg::TwoStep => Detector::TwoStep,
        };
    }
    if let Some(s) = &o.snr {
        cfg.sweep.snr_db = s.clone();
    }
    cfg.sweep.max_frames = o.max_frames.unwrap_or(cfg.sweep.max_frames);
    cfg.sweep.target_errors = o.target_errors.unwrap_or(cfg.sweep.target_errors);
    cfg.sweep.master_seed = o.seed.unwrap_or(cfg.sweep.master_seed);
    cfg.sweep.workers = o.workers.unwrap_or(cfg.sweep.workers);
    if o.output.is_some() {
        cfg.output = o.output.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> stbcsm::Result<()> {
    let cfg = load(cli)?;
    let quiet = cli.quiet;
    let mut progress = |p: Progress| {
        if !quiet {
            eprint!(
                "\r[{}/{}] {:>7.2} dB  frames {:>10}  errors {:>8}",
                p.point + 1,
                p.points,
                p.snr_db,
                p.frames,
                p.bit_errors
            );
        }
    };
    let text = match &cli.command {
        Command::Sweep => {
            let r = report::simulate(&cfg, &mut progress)?;
            report::sweep_csv(&cfg, &r)?
        }
        Command::Bound => {
            let rows = report::bound_rows(&cfg, &mut progress)?;
            if let Some(r) = rows.iter().find(|r| !r.dominates()) {
                eprintln!(
                    "\nwarning: bound {:e} below simulated BER {:e} at {} dB",
                    r.ber_bound, r.sim_ber, r.snr_db
                );
            }
            report::bound_csv(&cfg, &rows)?
        }
        Command::Compare {
            table2,
            fig4,
            fig5,
            fig8,
        } => {
            let which = match (table2, fig4, fig5, fig8) {
                (true, ..) => Comparison::Table2,
                (_, true, ..) => Comparison::Fig4,
                (_, _, true, _) => Comparison::Fig5,
                (_, _, _, true) => Comparison::Fig8,
                _ => Comparison::Fig4,
            };
            report::compare_csv(&cfg, which, &mut progress)?
        }
        Command::Geometry => report::geometry_csv(&cfg)?,
        Command::Patterns => report::patterns_csv(&cfg)?,
        Command::Codebook => report::codebook_text(&cfg)?,
        Command::Config => cfg.to_json() + "\n",
    };
    if !quiet {
        eprintln!();
    }
    match &cfg.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
