//! `diamond`: sweeps, figure reproduction and verification for the diamond spin cluster.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use diamond_core::figure::{self, FigureId};
use diamond_core::model;
use diamond_core::sweep::{self, Measure, SweepConfigFile, SweepError, TimeAxis};
use diamond_core::verify;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "diamond", version, about = "Entanglement dynamics of the Ising-Heisenberg diamond spin cluster")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate measures on a uniform time grid and write CSV.
    Sweep(SweepArgs),
    /// Render a predefined plot as CSV and SVG.
    Figure {
        /// Figure id (2a, 2b, 3a..3d, 4a..4d, 5) or `all`.
        id: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run the closed-form vs numerical cross-check battery.
    Verify {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Shift one closed-form energy by 1e-3 (negative control).
        #[arg(long, hide = true)]
        corrupt_energy: Option<usize>,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// JSON file with SweepConfig fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    j: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    jz: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    j0: Option<f64>,
    /// Set J0 = ratio * (Jz - J).
    #[arg(long, allow_hyphen_values = true)]
    ratio: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    h: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    hp: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid points including both ends.
    #[arg(long)]
    steps: Option<usize>,
    /// Comma-separated: c_ab, e_ab_12, e_a, e_1, eof_ab, eof_12.
    #[arg(long, value_delimiter = ',')]
    measures: Option<Vec<String>>,
    #[arg(long)]
    log_base: Option<f64>,
    #[arg(long)]
    out: Option<String>,
    /// t, jz_minus_j or j0.
    #[arg(long)]
    time_axis: Option<String>,
    /// Also evaluate closed forms and report the largest deviation.
    #[arg(long)]
    compare_closed_form: bool,
}

impl SweepArgs {
    fn to_layer(&self) -> Result<SweepConfigFile, SweepError> {
        Ok(SweepConfigFile {
            j: self.j,
            jz: self.jz,
            j0: self.j0,
            h: self.h,
            hp: self.hp,
            ratio: self.ratio,
            t_max: self.t_max,
            steps: self.steps,
            measures: self
                .measures
                .as_ref()
                .map(|ms| ms.iter().map(|m| m.parse::<Measure>()).collect())
                .transpose()?,
            log_base: self.log_base,
            output_path: self.out.clone(),
            time_axis: self.time_axis.as_deref().map(str::parse::<TimeAxis>).transpose()?,
            compare_closed_form: self.compare_closed_form.then_some(true),
        })
    }
}

fn run_sweep(args: &SweepArgs) -> anyhow::Result<ExitCode> {
    let base = match &args.config {
        Some(path) => {
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return Ok(config_error(format!("cannot read {}: {e}", path.display()))),
            };
            match SweepConfigFile::from_json(&text) {
                Ok(f) => f,
                Err(e) => return Ok(config_error(e)),
            }
        }
        None => SweepConfigFile::default(),
    };
    let cfg = match args.to_layer().and_then(|layer| base.merge(layer).resolve()) {
        Ok(c) => c,
        Err(e) => return Ok(config_error(e)),
    };
    let series = match sweep::run_sweep(&cfg) {
        Ok(s) => s,
        Err(e @ SweepError::ConfigInvalid { .. }) => return Ok(config_error(e)),
        Err(e) => return Err(e.into()),
    };
    let file = fs::File::create(&cfg.output_path).with_context(|| format!("creating {}", cfg.output_path))?;
    sweep::write_csv(&series, BufWriter::new(file))?;
    println!("wrote {} ({} points)", cfg.output_path, cfg.steps);
    for s in &series {
        if let Some(dev) = s.closed_form_max_deviation {
            println!("{}: max |pipeline - closed form| = {dev:.3e}", s.measure);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_figure(id: &str, out_dir: &Path) -> anyhow::Result<ExitCode> {
    let ids = if id == "all" {
        FigureId::ALL.to_vec()
    } else {
        match id.parse::<FigureId>() {
            Ok(f) => vec![f],
            Err(e) => return Ok(config_error(e)),
        }
    };
    for f in ids {
        for path in figure::reproduce_figure(f, out_dir)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_verify(seed: u64, samples: usize, corrupt: Option<usize>) -> ExitCode {
    if samples == 0 {
        return config_error("samples must be at least 1");
    }
    let report = match corrupt {
        Some(index) if index >= model::DIM => {
            return config_error(format!("energy index {index} out of range"));
        }
        Some(index) => verify::verify_with_table(seed, samples, |p| {
            model::analytic_eigensystem(p).with_energy_offset(index, 1e-3)
        }),
        None => verify::verify(seed, samples),
    };
    print!("{}", report.render());
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    }
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_CONFIG)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Sweep(args) => run_sweep(args),
        Command::Figure { id, out_dir } => run_figure(id, out_dir),
        Command::Verify {
            seed,
            samples,
            corrupt_energy,
        } => Ok(run_verify(*seed, *samples, *corrupt_energy)),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}
