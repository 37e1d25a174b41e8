//! Command-line interface for the `iaa` binary.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::attributes::{AgreementLoop, AttributeOptions, PerimeterMode, QuartileMethod};
use crate::curve::MembershipCurve;
use crate::demo;
use crate::error::{Error, Result};
use crate::interval::{load_dataset, DatasetFormat, IntervalDataset, IntervalSet};
use crate::parallel::Execution;
use crate::plot;
use crate::similarity::{fuzzy_numbers, similarity_matrix, RangeSpec, WeightVector, FEATURE_NAMES};
use crate::weights::{learn_weights, GeneratorConfig, LearnConfig};

/// Environment variable holding the default directory for `plot` output.
pub const OUTPUT_DIR_ENV: &str = "IAA_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "iaa",
    version,
    about = "Interval agreement fuzzy numbers and their similarity"
)]
pub struct Cli {
    /// Run every stage on a single thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build one membership curve per item and write them as JSON.
    Build {
        #[command(flatten)]
        input: InputArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute the attributes of every item.
    Attrs {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        variant: VariantArgs,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        output_format: TableFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Pairwise similarity matrix of all items.
    Sim {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        variant: VariantArgs,
        /// `global:MIN:MAX` or `local`.
        #[arg(long, default_value = "local")]
        range: RangeSpec,
        /// JSON weight file; the built-in weights are used otherwise.
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        output_format: TableFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Learn feature weights from randomly generated interval sets.
    Weights(WeightsArgs),
    /// Reproduce the bundled film example and compare with published values.
    Demo {
        #[arg(long, value_enum, default_value_t = Variants::Default)]
        variants: Variants,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        output_format: ReportFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Export an SVG step plot and a breakpoint CSV for every curve.
    Plot {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, env = OUTPUT_DIR_ENV, default_value = "plots")]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Dataset file (CSV grid of `l:r` cells, or JSON).
    pub input: PathBuf,
    /// Input format; guessed from the extension when omitted.
    #[arg(long)]
    pub format: Option<DatasetFormat>,
    /// Use columns (sources) as the items instead of rows.
    #[arg(long)]
    pub transpose: bool,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct VariantArgs {
    #[arg(long, default_value_t = PerimeterMode::default())]
    pub perimeter: PerimeterMode,
    #[arg(long, default_value_t = QuartileMethod::default())]
    pub quartiles: QuartileMethod,
    #[arg(long = "ar-loop", default_value_t = AgreementLoop::default())]
    pub agreement_loop: AgreementLoop,
}

impl From<VariantArgs> for AttributeOptions {
    fn from(v: VariantArgs) -> Self {
        Self {
            perimeter: v.perimeter,
            quartiles: v.quartiles,
            agreement_loop: v.agreement_loop,
        }
    }
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    #[arg(long, default_value_t = 500)]
    pub sets: usize,
    #[arg(long, default_value_t = 3)]
    pub min_intervals: usize,
    #[arg(long, default_value_t = 10)]
    pub max_intervals: usize,
    #[arg(long, default_value_t = 1.0)]
    pub value_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub value_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub crisp_probability: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Pairs sampled per repeat.
    #[arg(long, default_value_t = 100_000)]
    pub pairs: usize,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    /// Use the correlation matrix instead of the covariance matrix.
    #[arg(long)]
    pub standardize: bool,
    /// Defaults to `global` over the value range.
    #[arg(long)]
    pub range: Option<RangeSpec>,
    #[command(flatten)]
    pub variant: VariantArgs,
    /// Weight JSON destination; standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Stability report CSV destination.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variants {
    Default,
    All,
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Io(io) => Error::Ingest(format!("{}: {io}", path.display())),
        other => other,
    }
}

fn load_input(args: &InputArgs) -> Result<IntervalDataset> {
    let format = args
        .format
        .unwrap_or_else(|| DatasetFormat::from_path(&args.input));
    let file = fs::File::open(&args.input).map_err(|e| with_path(&args.input, e.into()))?;
    let data = load_dataset(io::BufReader::new(file), format)?;
    Ok(if args.transpose {
        data.transpose()
    } else {
        data
    })
}

fn load_sets(args: &InputArgs) -> Result<Vec<IntervalSet>> {
    Ok(load_input(args)?.row_sets())
}

fn load_weights(path: Option<&Path>) -> Result<WeightVector> {
    match path {
        None => Ok(WeightVector::DEFAULT),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| with_path(p, e.into()))?;
            WeightVector::from_json(&text)
        }
    }
}

/// Runs `body` against the output file, or standard output when `None`.
fn emit(output: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match output {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            let mut file =
                io::BufWriter::new(fs::File::create(path).map_err(|e| with_path(path, e.into()))?);
            body(&mut file)?;
            file.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn write_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn attrs_csv(
    out: &mut dyn Write,
    labels: &[String],
    rows: &[crate::attributes::AttributeSummary],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "label",
        "area",
        "perimeter",
        "centroid_x",
        "centroid_y",
        "height",
        "agreement_ratio",
        "min",
        "q1",
        "q2",
        "q3",
        "max",
    ])?;
    for (label, a) in labels.iter().zip(rows) {
        let mut rec = vec![
            label.clone(),
            a.area.to_string(),
            a.perimeter.to_string(),
            a.centroid_x.to_string(),
            a.centroid_y.to_string(),
            a.height.to_string(),
            a.agreement_ratio.to_string(),
        ];
        rec.extend(a.quartiles.as_array().iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match cli.command {
        Command::Build { input, output } => {
            let curves: Vec<MembershipCurve> = load_sets(&input)?
                .iter()
                .map(MembershipCurve::from_set)
                .collect();
            emit(output.as_deref(), |out| {
                write_json(out, &json!({ "curves": curves }))
            })
        }
        Command::Attrs {
            input,
            variant,
            output_format,
            output,
        } => {
            let items = fuzzy_numbers(&load_sets(&input)?, variant.into(), exec)?;
            let labels: Vec<String> = items.iter().map(|f| f.label().to_string()).collect();
            let rows: Vec<_> = items.iter().map(|f| *f.attributes()).collect();
            emit(output.as_deref(), |out| match output_format {
                TableFormat::Csv => attrs_csv(out, &labels, &rows),
                TableFormat::Json => {
                    let items: Vec<_> = labels
                        .iter()
                        .zip(&rows)
                        .map(|(l, a)| json!({ "label": l, "attributes": a }))
                        .collect();
                    write_json(out, &json!({ "items": items }))
                }
            })
        }
        Command::Sim {
            input,
            variant,
            range,
            weights,
            output_format,
            output,
        } => {
            let w = load_weights(weights.as_deref())?;
            let items = fuzzy_numbers(&load_sets(&input)?, variant.into(), exec)?;
            let matrix = similarity_matrix(&items, &w, range, exec);
            emit(output.as_deref(), |out| match output_format {
                TableFormat::Csv => matrix.write_csv(out),
                TableFormat::Json => write_json(out, &serde_json::to_value(&matrix)?),
            })
        }
        Command::Weights(args) => run_weights(args, exec),
        Command::Demo {
            variants,
            weights,
            output_format,
            output,
        } => {
            let w = load_weights(weights.as_deref())?;
            let opts = match variants {
                Variants::Default => vec![AttributeOptions::default()],
                Variants::All => AttributeOptions::all(),
            };
            let report = demo::run_demo(&opts, &w, exec)?;
            emit(output.as_deref(), |out| match output_format {
                ReportFormat::Text => Ok(out.write_all(demo::render_text(&report).as_bytes())?),
                ReportFormat::Json => write_json(out, &serde_json::to_value(&report)?),
            })
        }
        Command::Plot { input, out_dir } => {
            let curves: Vec<MembershipCurve> = load_sets(&input)?
                .iter()
                .map(MembershipCurve::from_set)
                .collect();
            let written = plot::export_curves(&curves, &out_dir)?;
            for p in written {
                println!("{}", p.display());
            }
            Ok(())
        }
    }
}

fn run_weights(args: WeightsArgs, exec: Execution) -> Result<()> {
    let generator = GeneratorConfig {
        set_count: args.sets,
        min_intervals: args.min_intervals,
        max_intervals: args.max_intervals,
        value_min: args.value_min,
        value_max: args.value_max,
        crisp_probability: args.crisp_probability,
        seed: args.seed,
    };
    generator.validate()?;
    let cfg = LearnConfig {
        range: args.range.unwrap_or_else(|| generator.global_range()),
        generator,
        pair_count: args.pairs,
        repeats: args.repeats,
        standardize: args.standardize,
        attributes: args.variant.into(),
    };
    let learned = learn_weights(&cfg, exec)?;
    emit(args.output.as_deref(), |out| {
        write_json(out, &learned.weights.to_json())
    })?;
    match args.report {
        Some(path) => emit(Some(&path), |out| learned.write_report(out)),
        None => {
            let mut err = io::stderr().lock();
            writeln!(
                err,
                "{:<20} {:>12} {:>12} {:>12}",
                "feature", "weight", "mean |w|", "std |w|"
            )?;
            for (f, name) in FEATURE_NAMES.iter().enumerate() {
                writeln!(
                    err,
                    "{name:<20} {:>12.6} {:>12.6} {:>12.6}",
                    learned.weights.as_array()[f],
                    learned.mean_abs[f],
                    learned.std_abs[f]
                )?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_variant_and_range_flags() {
        let cli = Cli::try_parse_from([
            "iaa",
            "sim",
            "x.csv",
            "--range",
            "global:1:10",
            "--perimeter",
            "literal",
            "--ar-loop",
            "to1",
        ])
        .unwrap();
        match cli.command {
            Command::Sim { range, variant, .. } => {
                assert_eq!(
                    range,
                    RangeSpec::Global {
                        min: 1.0,
                        max: 10.0
                    }
                );
                let o: AttributeOptions = variant.into();
                assert_eq!(o.perimeter, PerimeterMode::Literal);
                assert_eq!(o.agreement_loop, AgreementLoop::To1);
            }
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["iaa", "sim", "x.csv", "--range", "global:3"]).is_err());
    }
}
