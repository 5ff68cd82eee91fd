//! Command-line parsing and execution.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use cindex_core::components::{
    component_scores, composite_scores, fit_pca, varimax_rotate, ComponentModel, Retention,
    RotationResult,
};
use cindex_core::entropy;
use cindex_core::preprocess::{minmax_normalize, zscore_standardize, JudgmentMatrix};
use cindex_core::scoring::evaluate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use crate::config::{load_config, EvaluationConfig, OutputFormat, Rotation};
use crate::dataset::{parse_table, write_matrix_csv};
use crate::error::{CliError, Result};
use crate::report::{
    component_summary, render_json, score_rows, scores_csv, scree_csv, scree_points, weight_rows,
    weights_csv, ComponentInputs, ComponentSummary, Provenance, Report,
};

#[derive(Debug, Parser)]
#[command(
    name = "cindex",
    version,
    about = "Entropy-weighted composite index evaluation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weights, scores, grades and ranks, plus a component summary.
    Evaluate(CommonArgs),
    /// Entropy weight table only.
    Weights(CommonArgs),
    /// Min-max normalized matrix.
    Normalize(CommonArgs),
    /// Principal-component summary and scree data.
    Pca(ComponentArgs),
    /// Principal components followed by varimax rotation.
    Factor(ComponentArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Dataset CSV: header row, object labels in the first column.
    #[arg(long)]
    pub data: PathBuf,
    /// Evaluation config JSON; defaults to all-benefit indicators.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the config's output format.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct ComponentArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Cumulative explained-variance target for retention.
    #[arg(long, conflicts_with = "retain")]
    pub threshold: Option<f64>,
    /// Keep exactly this many components.
    #[arg(long)]
    pub retain: Option<usize>,
    /// Also write scree data as CSV to this path.
    #[arg(long)]
    pub scree: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to `stderr`; results go to the output
/// file or `stdout`.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match run(&cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

struct Inputs {
    config: EvaluationConfig,
    judgment: JudgmentMatrix,
    /// Header of the dataset's label column, echoed in CSV output.
    label_header: String,
    provenance: Provenance,
    format: OutputFormat,
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn load_inputs(args: &CommonArgs) -> Result<Inputs> {
    let data_bytes = read_bytes(&args.data)?;
    let table = parse_table(&args.data, &data_bytes)?;
    let (config, config_sha256) = match &args.config {
        Some(path) => (load_config(path)?, Some(sha256_hex(&read_bytes(path)?))),
        None => (EvaluationConfig::with_indicators(&table.headers), None),
    };
    let judgment = table.to_judgment(&config)?;
    let format = match args.format {
        Some(FormatArg::Json) => OutputFormat::Json,
        Some(FormatArg::Csv) => OutputFormat::Csv,
        None => config.output_format,
    };
    Ok(Inputs {
        provenance: Provenance {
            data_sha256: sha256_hex(&data_bytes),
            config_sha256,
            config: config.to_json(),
        },
        config,
        judgment,
        label_header: table.label_header,
        format,
    })
}

/// Everything one component analysis produces.
struct ComponentRun {
    indicators: Vec<String>,
    excluded: Vec<String>,
    model: ComponentModel,
    composite: Vec<f64>,
    rotation: Option<(RotationResult, Vec<f64>)>,
}

fn run_components(
    x: &JudgmentMatrix,
    excluded: Vec<String>,
    retention: Retention,
    rotate: bool,
) -> Result<ComponentRun> {
    let zx = zscore_standardize(x)?;
    let model = fit_pca(&zx, retention)?;
    let y = component_scores(zx.values(), &model.eigvec_basis)?;
    let composite = composite_scores(&y, model.retained_ratios())?.0;
    let rotation = if rotate && x.n_indicators() >= 2 {
        let rot = varimax_rotate(&model.loadings)?;
        let rotated_scores = y.matmul(&rot.rotation)?;
        let f = composite_scores(&rotated_scores, &rot.rotated_variance_shares)?.0;
        Some((rot, f))
    } else {
        None
    };
    Ok(ComponentRun {
        indicators: x.indicators().iter().map(|i| i.name.clone()).collect(),
        excluded,
        model,
        composite,
        rotation,
    })
}

fn summarize(run: &ComponentRun, objects: &[String], retention: Retention) -> ComponentSummary {
    let retention = match retention {
        Retention::Threshold(t) => format!("cumulative explained ratio >= {t}"),
        Retention::Count(k) => format!("fixed count {k}"),
    };
    component_summary(ComponentInputs {
        indicators: &run.indicators,
        excluded: run.excluded.clone(),
        objects,
        retention,
        model: &run.model,
        composite: &run.composite,
        rotation: run.rotation.as_ref().map(|(r, f)| (r, f.as_slice())),
    })
}

/// A rendered output and where it goes.
struct Output {
    path: Option<PathBuf>,
    bytes: Vec<u8>,
}

pub fn run(command: &Command, stdout: &mut dyn Write) -> Result<()> {
    let outputs = match command {
        Command::Evaluate(args) => cmd_evaluate(args)?,
        Command::Weights(args) => cmd_weights(args)?,
        Command::Normalize(args) => cmd_normalize(args)?,
        Command::Pca(args) => cmd_components(args, "pca", false)?,
        Command::Factor(args) => cmd_components(args, "factor", true)?,
    };
    for out in outputs {
        match out.path {
            Some(path) => write_atomically(&path, &out.bytes)?,
            None => stdout
                .write_all(&out.bytes)
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })?,
        }
    }
    Ok(())
}

fn cmd_evaluate(args: &CommonArgs) -> Result<Vec<Output>> {
    let inputs = load_inputs(args)?;
    let x = &inputs.judgment;
    let evaluation = evaluate(x, &inputs.config.grade_scale)?;
    let names: Vec<&str> = x.indicators().iter().map(|i| i.name.as_str()).collect();
    let weights = weight_rows(&names, &evaluation.entropy);
    let scores = score_rows(&evaluation.cards);

    let bytes = match inputs.format {
        OutputFormat::Csv => scores_csv(&scores),
        OutputFormat::Json => {
            // Constant indicators carry no variance; analyse the rest.
            let constant = x.constant_columns();
            let keep: Vec<usize> = (0..x.n_indicators())
                .filter(|j| !constant.contains(j))
                .collect();
            let excluded = constant
                .iter()
                .map(|&j| x.indicators()[j].name.clone())
                .collect();
            let retention = Retention::Threshold(inputs.config.retention_threshold);
            let run = run_components(
                &x.select(&keep)?,
                excluded,
                retention,
                inputs.config.rotation == Rotation::Varimax,
            )?;
            let mut report = Report::new("evaluate", inputs.provenance);
            report.weights = Some(weights);
            report.scores = Some(scores);
            report.components = Some(summarize(&run, x.objects(), retention));
            render_json(&report)
        }
    };
    Ok(vec![Output {
        path: args.out.clone(),
        bytes,
    }])
}

fn cmd_weights(args: &CommonArgs) -> Result<Vec<Output>> {
    let inputs = load_inputs(args)?;
    let x = &inputs.judgment;
    let analysis = entropy::analyze(&minmax_normalize(x))?;
    let names: Vec<&str> = x.indicators().iter().map(|i| i.name.as_str()).collect();
    let rows = weight_rows(&names, &analysis);
    let bytes = match inputs.format {
        OutputFormat::Csv => weights_csv(&rows),
        OutputFormat::Json => {
            let mut report = Report::new("weights", inputs.provenance);
            report.weights = Some(rows);
            render_json(&report)
        }
    };
    Ok(vec![Output {
        path: args.out.clone(),
        bytes,
    }])
}

fn cmd_normalize(args: &CommonArgs) -> Result<Vec<Output>> {
    let inputs = load_inputs(args)?;
    let x = &inputs.judgment;
    let r = minmax_normalize(x);
    let names: Vec<String> = x.indicators().iter().map(|i| i.name.clone()).collect();
    let bytes = match inputs.format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            write_matrix_csv(
                &mut buf,
                &inputs.label_header,
                x.objects(),
                &names,
                r.values(),
            )
            .expect("writing to memory");
            buf
        }
        OutputFormat::Json => {
            let mut report = Report::new("normalize", inputs.provenance);
            report.normalized = Some(
                x.objects()
                    .iter()
                    .enumerate()
                    .map(|(i, o)| crate::report::LoadingRow {
                        indicator: o.clone(),
                        values: r
                            .values()
                            .row(i)
                            .iter()
                            .copied()
                            .map(crate::report::fixed6)
                            .collect(),
                    })
                    .collect(),
            );
            render_json(&report)
        }
    };
    Ok(vec![Output {
        path: args.out.clone(),
        bytes,
    }])
}

fn cmd_components(
    args: &ComponentArgs,
    command: &'static str,
    rotate: bool,
) -> Result<Vec<Output>> {
    let inputs = load_inputs(&args.common)?;
    let retention = match (args.threshold, args.retain) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "--threshold and --retain are mutually exclusive".into(),
            ))
        }
        (Some(t), None) => {
            if !(t > 0.0 && t <= 1.0) {
                return Err(CliError::Usage(format!(
                    "--threshold {t} is outside (0, 1]"
                )));
            }
            Retention::Threshold(t)
        }
        (None, Some(k)) => Retention::Count(k),
        (None, None) => Retention::Threshold(inputs.config.retention_threshold),
    };
    let x = &inputs.judgment;
    let run = run_components(x, Vec::new(), retention, rotate)?;
    let summary = summarize(&run, x.objects(), retention);
    let scree = scree_csv(&scree_points(&run.model));
    let main = match inputs.format {
        OutputFormat::Csv => scree.clone(),
        OutputFormat::Json => {
            let mut report = Report::new(command, inputs.provenance);
            report.components = Some(summary);
            render_json(&report)
        }
    };
    let mut outputs = vec![Output {
        path: args.common.out.clone(),
        bytes: main,
    }];
    if let Some(path) = &args.scree {
        outputs.push(Output {
            path: Some(path.clone()),
            bytes: scree,
        });
    }
    Ok(outputs)
}

/// Writes via a temporary file in the target directory, so a failed run
/// never leaves a partial file behind.
fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
