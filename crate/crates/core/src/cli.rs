//! Command-line front end.
//!
//! Exit status is 0 on success, 1 for data problems (parse errors, dataset
//! violations, degenerate inputs) and 2 for usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::dataset::{validate_dataset, SpatialDataset, WeightParams};
use crate::detect::{compare_models, detect_outliers, site_weights, Mode};
use crate::error::Error;
use crate::fixtures::write_fixtures;
use crate::io::{
    load_edges, load_polygons, load_sites, render_report, write_report, Format, Report,
};
use crate::neighborhood::{neighbors, Regime};

const EXIT_DATA: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "spatial-outlier",
    version,
    about = "Weighted-neighborhood spatial outlier detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a dataset and list every problem found
    Validate {
        #[command(flatten)]
        input: Input,
    },
    /// Print the neighbor set of every site
    Neighbors {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Print the weight of effect of every neighbor
    Weights {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "weighted")]
        mode: Mode,
    },
    /// Score every site and flag outliers
    Detect {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        attribute: String,
        #[arg(long, default_value = "weighted")]
        mode: Mode,
        #[command(flatten)]
        output: Output,
    },
    /// Run the classical and weighted models and compare their errors
    Compare {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        attribute: String,
        #[command(flatten)]
        output: Output,
    },
    /// Write the bundled example datasets
    Fixtures {
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
#[group(id = "input", required = true, multiple = true)]
struct Input {
    /// Point sites CSV: id,x,y,<attributes>
    #[arg(long, conflicts_with = "polygons")]
    sites: Option<PathBuf>,
    /// Edges CSV: from,to,length,cost
    #[arg(long, requires = "sites")]
    edges: Option<PathBuf>,
    /// Polygons JSON
    #[arg(long)]
    polygons: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// buffer, graph, polygon or combined
    #[arg(long)]
    regime: Option<Regime>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long)]
    cost_limit: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    theta: f64,
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
}

enum Failure {
    Usage(String),
    Data(String),
    /// Downstream reader went away, as with `| head`.
    ClosedPipe,
}

fn closed_pipe(e: &std::io::Error) -> bool {
    e.kind() == std::io::ErrorKind::BrokenPipe
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Write(ref io) if closed_pipe(io) => Failure::ClosedPipe,
            Error::InvalidParams(_) | Error::RegimeMismatch { .. } | Error::UnknownAttribute(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        if closed_pipe(&e) {
            return Failure::ClosedPipe;
        }
        Failure::Data(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

/// Runs the CLI against the process's stdout and stderr.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = if e.use_stderr() {
                e.render().to_string()
            } else {
                e.render().ansi().to_string()
            };
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) | Err(Failure::ClosedPipe) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_DATA
        }
    }
}

fn load(input: &Input) -> Result<SpatialDataset, Failure> {
    if let Some(path) = &input.polygons {
        return Ok(SpatialDataset::from_polygons(load_polygons(path)?));
    }
    let sites = input
        .sites
        .as_ref()
        .ok_or_else(|| Failure::Usage("one of --sites or --polygons is required".into()))?;
    let edges = match &input.edges {
        Some(p) => load_edges(p)?,
        None => Vec::new(),
    };
    Ok(SpatialDataset::from_points(load_sites(sites)?, edges))
}

fn load_valid(input: &Input, err: &mut dyn Write) -> Result<SpatialDataset, Failure> {
    let dataset = load(input)?;
    let violations = validate_dataset(&dataset);
    if violations.is_empty() {
        return Ok(dataset);
    }
    for v in &violations {
        writeln!(err, "{v}")?;
    }
    Err(Failure::Data(format!(
        "{} dataset violations",
        violations.len()
    )))
}

impl ParamArgs {
    fn resolve(&self, dataset: &SpatialDataset) -> Result<(WeightParams, Regime), Failure> {
        let mut params = WeightParams::default()
            .with_gamma(self.gamma)
            .with_theta(self.theta);
        if self.alpha.is_some() || self.beta.is_some() || self.delta.is_some() {
            params = params.with_coefficients(
                self.alpha.unwrap_or(0.0),
                self.beta.unwrap_or(0.0),
                self.delta.unwrap_or(0.0),
            );
        }
        params.radius = self.radius;
        params.cost_limit = self.cost_limit;
        params.validate()?;

        let regime = match (self.regime, dataset.polygons().is_some()) {
            (Some(r), _) => r,
            (None, true) => Regime::Polygon,
            (None, false) if self.radius.is_some() => Regime::Combined,
            (None, false) if !dataset.edges().is_empty() => Regime::Graph,
            (None, false) => {
                return Err(Failure::Usage(
                    "point data needs --radius, --edges or an explicit --regime".into(),
                ))
            }
        };
        let polygon_data = dataset.polygons().is_some();
        if (regime == Regime::Polygon) != polygon_data {
            return Err(Error::RegimeMismatch {
                regime: regime.name(),
                kind: dataset.kind().name(),
            }
            .into());
        }
        if matches!(regime, Regime::Buffer | Regime::Combined) && params.radius.is_none() {
            return Err(Failure::Usage(format!(
                "the {regime} regime needs --radius"
            )));
        }
        Ok((params, regime))
    }
}

fn emit(report: Report<'_>, output: &Output, out: &mut dyn Write) -> CliResult {
    match &output.out {
        Some(path) => write_report(report, output.format, Some(path))?,
        None => render_report(report, output.format, out)?,
    }
    Ok(())
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match command {
        Command::Validate { input } => {
            let dataset = load(&input)?;
            let violations = validate_dataset(&dataset);
            for v in &violations {
                writeln!(out, "{v}")?;
            }
            if violations.is_empty() {
                writeln!(
                    out,
                    "ok: {} {} sites, {} edges",
                    dataset.len(),
                    dataset.kind().name(),
                    dataset.edges().len()
                )?;
                Ok(())
            } else {
                Err(Failure::Data(format!("{} violations", violations.len())))
            }
        }
        Command::Neighbors { input, params } => {
            let dataset = load_valid(&input, err)?;
            let (params, regime) = params.resolve(&dataset)?;
            let mut ids: Vec<_> = dataset.site_ids().into_iter().cloned().collect();
            ids.sort();
            for id in ids {
                let found: Vec<String> = neighbors(&dataset, &id, regime, &params)?
                    .iter()
                    .map(ToString::to_string)
                    .collect();
                writeln!(out, "{id}: {}", found.join(" "))?;
            }
            Ok(())
        }
        Command::Weights {
            input,
            params,
            mode,
        } => {
            let dataset = load_valid(&input, err)?;
            let (params, regime) = params.resolve(&dataset)?;
            let mut ids: Vec<_> = dataset.site_ids().into_iter().cloned().collect();
            ids.sort();
            writeln!(out, "center,neighbor,weight")?;
            for id in ids {
                if let Some(w) = site_weights(&dataset, &id, regime, &params, mode)? {
                    for (n, weight) in &w.entries {
                        writeln!(out, "{id},{n},{weight:.6}")?;
                    }
                }
            }
            Ok(())
        }
        Command::Detect {
            input,
            params,
            attribute,
            mode,
            output,
        } => {
            let dataset = load_valid(&input, err)?;
            let (params, regime) = params.resolve(&dataset)?;
            let result = detect_outliers(&dataset, &attribute, &params, regime, mode)?;
            let flagged: Vec<String> = result.outliers().iter().map(ToString::to_string).collect();
            writeln!(
                err,
                "{mode} {regime}: {} of {} scored sites flagged: {}",
                flagged.len(),
                result.scores.len(),
                flagged.join(" ")
            )?;
            emit(Report::Detection(&result), &output, out)
        }
        Command::Compare {
            input,
            params,
            attribute,
            output,
        } => {
            let dataset = load_valid(&input, err)?;
            let (params, regime) = params.resolve(&dataset)?;
            let classical =
                detect_outliers(&dataset, &attribute, &params, regime, Mode::Classical)?;
            let weighted = detect_outliers(&dataset, &attribute, &params, regime, Mode::Weighted)?;
            let report = compare_models(&classical, &weighted)?;
            emit(Report::Comparison(&report), &output, out)
        }
        Command::Fixtures { out: dir } => {
            for path in write_fixtures(&dir)? {
                writeln!(out, "{}", path.display())?;
            }
            Ok(())
        }
    }
}
