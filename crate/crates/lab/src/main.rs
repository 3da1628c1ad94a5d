use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod config;
mod error;
mod experiments;
mod table;

use config::ExperimentConfig;
use error::LabError;
use experiments::{Lab, Section};

/// Numerical experiments on the Cesàro operator on L²(0,1).
#[derive(Debug, Parser)]
#[command(name = "cesaro-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Subcommand)]
enum Command {
    /// Operator norms of C, I - C and S_t
    Norm,
    /// Algebraic identities and the Fourier conjugation
    Identities,
    /// Resolvent residuals and norm formula over the λ list
    Resolvent,
    /// Norm decay, semigroup law, continuity, generator and Laplace checks
    Semigroup,
    /// Spectral measure mass, moments, cyclicity and density tables
    Spectral,
    /// Invariance catalog, block decomposition and the phase-symbol example
    Invariant,
    /// Data tables for the density and φ_t plots
    Figures,
    /// Every subcommand above
    All,
}

#[derive(Debug, Clone, Default, Args)]
struct Overrides {
    /// File of `key = value` lines
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (falls back to $CESARO_LAB_OUT, then ./lab-out)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Graded panels toward each endpoint
    #[arg(long, global = true)]
    panels: Option<usize>,
    #[arg(long, global = true)]
    nodes_per_panel: Option<usize>,
    /// Half width of the line grid
    #[arg(long, global = true)]
    line_width: Option<f64>,
    /// Points of the line grid (power of two)
    #[arg(long, global = true)]
    fft_size: Option<usize>,
    /// Tolerance for residual checks
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated semigroup times
    #[arg(long = "t", global = true, allow_hyphen_values = true)]
    t_list: Option<String>,
    /// Comma-separated spectral parameters such as `0.5+0.1i,-1`
    #[arg(long = "lambda", global = true, allow_hyphen_values = true)]
    lambda_list: Option<String>,
}

impl Overrides {
    fn resolve(&self) -> Result<ExperimentConfig, LabError> {
        let mut c = ExperimentConfig::default();
        if let Some(path) = &self.config {
            c.apply_file(path)?;
        }
        let flag = |e: String| LabError::Config(e);
        if let Some(v) = self.panels {
            c.panels = v;
        }
        if let Some(v) = self.nodes_per_panel {
            c.nodes_per_panel = v;
        }
        if let Some(v) = self.line_width {
            c.line_width = v;
        }
        if let Some(v) = self.fft_size {
            c.fft_size = v;
        }
        if let Some(v) = self.tol {
            c.tol = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.t_list {
            c.set("t", v).map_err(flag)?;
        }
        if let Some(v) = &self.lambda_list {
            c.set("lambda", v).map_err(flag)?;
        }
        if let Some(v) = &self.out {
            c.out = Some(v.clone());
        }
        c.validate()?;
        Ok(c)
    }
}

fn run_one(lab: &Lab, command: Command) -> Section {
    match command {
        Command::Norm => lab.norm(),
        Command::Identities => lab.identities(),
        Command::Resolvent => lab.resolvent(),
        Command::Semigroup => lab.semigroup(),
        Command::Spectral => lab.spectral(),
        Command::Invariant => lab.invariant(),
        Command::Figures => lab.figures(),
        Command::All => unreachable!("expanded by the caller"),
    }
}

const ALL: [Command; 7] = [
    Command::Norm,
    Command::Identities,
    Command::Resolvent,
    Command::Semigroup,
    Command::Spectral,
    Command::Invariant,
    Command::Figures,
];

fn run(cli: &Cli) -> Result<bool, LabError> {
    let config = cli.overrides.resolve()?;
    let out = config.out_dir();
    let lab = Lab::new(config)?;
    let commands: Vec<Command> = if cli.command == Command::All { ALL.to_vec() } else { vec![cli.command] };
    // independent sections run concurrently; the report keeps command order
    let sections: Vec<Section> = std::thread::scope(|scope| {
        let lab = &lab;
        let handles: Vec<_> = commands.iter().map(|&c| scope.spawn(move || run_one(lab, c))).collect();
        handles.into_iter().map(|h| h.join().expect("experiment thread panicked")).collect()
    });

    fs::create_dir_all(&out).map_err(|e| LabError::io(&out, e))?;
    let mut report = String::new();
    let mut failures = Vec::new();
    let mut total = 0;
    for sec in &sections {
        let mut lines: Vec<(bool, String)> = Vec::new();
        for t in &sec.tables {
            t.write_to(&out)?;
            if !t.is_finite() {
                lines.push((false, format!("table {} is finite", t.name)));
            }
        }
        for c in &sec.checks {
            let text = if c.detail.is_empty() { c.name.clone() } else { format!("{}: {}", c.name, c.detail) };
            lines.push((c.pass, text));
        }
        for (pass, text) in lines {
            total += 1;
            report.push_str(if pass { "PASS " } else { "FAIL " });
            report.push_str(&text);
            report.push('\n');
            if !pass {
                failures.push(text);
            }
        }
    }
    report.push_str(&format!("{} of {total} checks passed\n", total - failures.len()));
    let path = out.join("report.txt");
    fs::write(&path, &report).map_err(|e| LabError::io(&path, e))?;
    print!("{report}");
    for f in &failures {
        eprintln!("failed: {f}");
    }
    Ok(failures.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("cesaro-lab: {e}");
            ExitCode::from(2)
        }
    }
}
