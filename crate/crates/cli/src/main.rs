use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qgbound_cli::config::{parse_field, parse_format, parse_param, parse_scenarios, ConfigError, ConfigFile};
use qgbound_cli::{emit, scenarios, ScenarioConfig};

#[derive(Parser)]
#[command(name = "qgbound", about = "Quantum geometric tensor and Cramér-Rao bound checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate geometry and bounds along a k-path or grid and emit a table.
    Sweep(Opts),
    /// Run every bound suite; exit 1 on any violation.
    Check(Opts),
    /// Print the determinant-zero cases of the three-operator relation.
    Counterexamples(Opts),
    /// Mixed-state estimation bounds on seeded random families.
    EstimationDemo(Opts),
    /// Print the version.
    Version,
}

#[derive(Args)]
struct Opts {
    /// JSON configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// ti3d or two-band.
    #[arg(long)]
    model: Option<String>,
    /// Model parameters as key=value, e.g. --params M=-0.3 A=2.87.
    #[arg(long, num_args = 1..)]
    params: Vec<String>,
    /// Zeeman field x,y,z.
    #[arg(long, allow_hyphen_values = true)]
    field: Option<String>,
    /// High-symmetry points, e.g. GXMRG.
    #[arg(long)]
    path: Option<String>,
    /// Points per path segment.
    #[arg(long)]
    points: Option<usize>,
    /// Comma-separated scenario list.
    #[arg(long)]
    scenarios: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output path, or - for stdout.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Multiplies the relative tolerances.
    #[arg(long)]
    tol_scale: Option<f64>,
}

impl Opts {
    fn resolve(&self) -> Result<ScenarioConfig, ConfigError> {
        let base = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let params = if self.params.is_empty() {
            None
        } else {
            Some(self.params.iter().map(|s| parse_param(s)).collect::<Result<_, _>>()?)
        };
        let over = ConfigFile {
            model: self.model.clone(),
            params,
            field: self.field.as_deref().map(parse_field).transpose()?,
            path: self.path.clone(),
            points: self.points,
            scenarios: self.scenarios.as_deref().map(parse_scenarios).transpose()?,
            tol_scale: self.tol_scale,
            format: self.format.as_deref().map(parse_format).transpose()?,
            out: self.out.clone(),
            seed: self.seed,
            ..Default::default()
        };
        let mut merged = base.merge(over);
        if self.path.is_some() || self.points.is_some() {
            merged.grid = None;
        }
        ScenarioConfig::resolve(merged)
    }
}

enum Failure {
    Config(ConfigError),
    Other(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<qgbound::Error> for Failure {
    fn from(e: qgbound::Error) -> Self {
        match e {
            qgbound::Error::Config(m) => Failure::Config(ConfigError::new("config", m)),
            e => Failure::Other(e.to_string()),
        }
    }
}

impl From<emit::EmitError> for Failure {
    fn from(e: emit::EmitError) -> Self {
        Failure::Other(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

fn open_out(out: &str) -> io::Result<Box<dyn Write>> {
    if out == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        Ok(Box::new(BufWriter::new(File::create(out)?)))
    }
}

fn write_text(out: &str, text: &str) -> Result<(), Failure> {
    let mut w = open_out(out)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Version => {
            println!("qgbound {}", env!("CARGO_PKG_VERSION"));
            Ok(true)
        }
        Command::Sweep(o) => {
            let cfg = o.resolve()?;
            let pts = scenarios::sweep(&cfg)?;
            let rows: Vec<_> = pts.into_iter().map(|p| p.row).collect();
            emit::emit(&rows, cfg.format, open_out(&cfg.out)?)?;
            Ok(true)
        }
        Command::Check(o) => {
            let cfg = o.resolve()?;
            let summary = scenarios::check(&cfg)?;
            write_text(&cfg.out, &summary.render())?;
            Ok(summary.passed())
        }
        Command::Counterexamples(o) => {
            let cfg = o.resolve()?;
            let c = scenarios::counterexamples(&cfg)?;
            write_text(&cfg.out, &c.text)?;
            Ok(c.all_zero)
        }
        Command::EstimationDemo(o) => {
            let cfg = o.resolve()?;
            let d = scenarios::estimation_demo(&cfg)?;
            write_text(&cfg.out, &d.text)?;
            Ok(d.passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
