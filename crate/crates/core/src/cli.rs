//! Command-line front end.
//!
//! Each command returns the text destined for standard output; files named
//! by `--out` are written here. Exit codes: 0 success, 1 output failure,
//! 2 usage error, 3 unreadable or malformed input, 4 precondition violated.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cost_model::{all_cost_lines, ConditionKind, CostLine, ThresholdChoiceMethod};
use crate::curves::{method_curve, Density, PiecewiseLinearCurve, Weight, DEFAULT_GRID};
use crate::dataset::{load_dataset, write_dataset, LabelMapping, ScoredDataset};
use crate::error::Error;
use crate::exec::Execution;
use crate::report::{compare, compare_tsv, metrics, MetricsOptions};
use crate::roc::{roc_curve, RocPointRecord};
use crate::svg::{cost_panel, roc_panel, PlotSpec};
use crate::synth::{generate, Family, Fixture, GeneratorSpec};

#[derive(Debug, Parser)]
#[command(name = "costspace", version, about = "ROC and cost-space analysis of scoring classifiers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// AUC, AUCH, Brier score and per-method expected losses as JSON.
    Metrics(MetricsArgs),
    /// SVG plot of ROC and cost space, with a JSON sidecar of the geometry.
    Curves(CurvesArgs),
    /// Generate a fixture or synthetic dataset.
    Synth(SynthArgs),
    /// Rank several datasets by expected loss under one method.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Args)]
pub struct LabelArgs {
    /// Label token mapped to class 0 (positive).
    #[arg(long)]
    pub positive_label: Option<String>,
    /// Label token mapped to class 1; defaults to the other of `0`/`1`.
    #[arg(long, requires = "positive_label")]
    pub negative_label: Option<String>,
}

impl LabelArgs {
    fn mapping(&self) -> LabelMapping {
        match &self.positive_label {
            Some(p) => LabelMapping::with_positive(p, self.negative_label.as_deref()),
            None => LabelMapping::default(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct WeightArgs {
    /// Condition weight: `uniform` or `file:<density.csv>`.
    #[arg(long, default_value = "uniform")]
    pub weight: String,
    /// Quadrature points for non-uniform weights.
    #[arg(long, default_value_t = DEFAULT_GRID, value_parser = parse_grid)]
    pub grid: usize,
}

fn parse_grid(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(g) if g >= 2 => Ok(g),
        _ => Err(format!("expected an integer >= 2, got {s:?}")),
    }
}

impl WeightArgs {
    fn load(&self) -> Result<Weight, CliError> {
        if self.weight == "uniform" {
            return Ok(Weight::Uniform);
        }
        let Some(path) = self.weight.strip_prefix("file:") else {
            return Err(CliError::usage(format!(
                "--weight expects `uniform` or `file:<path>`, got {:?}",
                self.weight
            )));
        };
        let file = fs::File::open(path).map_err(|e| CliError::input(format!("{path}: {e}")))?;
        let density = Density::read(file).map_err(|e| CliError::input(format!("{path}: {e}")))?;
        Ok(Weight::Density(density))
    }
}

fn parse_method(s: &str) -> Result<ThresholdChoiceMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Space {
    Roc,
    Cost,
    Skew,
}

impl Space {
    fn kind(self) -> Option<ConditionKind> {
        match self {
            Space::Roc => None,
            Space::Cost => Some(ConditionKind::CostProportion),
            Space::Skew => Some(ConditionKind::Skew),
        }
    }
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    pub input: PathBuf,
    /// Extra fixed methods to report, e.g. `fixed:0.5,rate:0.3`.
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    pub methods: Vec<ThresholdChoiceMethod>,
    #[command(flatten)]
    pub labels: LabelArgs,
    #[command(flatten)]
    pub weight: WeightArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    pub input: PathBuf,
    /// Methods drawn in cost space; none gives a ROC-only plot.
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    pub methods: Vec<ThresholdChoiceMethod>,
    #[arg(long, value_enum, default_value_t = Space::Cost)]
    pub space: Space,
    #[command(flatten)]
    pub labels: LabelArgs,
    /// SVG output; the sidecar goes next to it with a `.json` extension.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, conflicts_with = "family")]
    pub fixture: Option<String>,
    /// perfect, worst, alternating or random.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub n0: usize,
    #[arg(long, default_value_t = 20)]
    pub n1: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(required = true, num_args = 2..)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value = "rate-driven", value_parser = parse_method)]
    pub method: ThresholdChoiceMethod,
    #[arg(long, value_enum, default_value_t = Space::Skew)]
    pub space: Space,
    #[command(flatten)]
    pub labels: LabelArgs,
    #[command(flatten)]
    pub weight: WeightArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub const OUTPUT: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const INPUT: i32 = 3;
    pub const PRECONDITION: i32 = 4;

    fn usage(message: String) -> Self {
        CliError { code: Self::USAGE, message }
    }

    fn input(message: String) -> Self {
        CliError { code: Self::INPUT, message }
    }

    fn output(path: &Path, e: std::io::Error) -> Self {
        CliError {
            code: Self::OUTPUT,
            message: format!("{}: {e}", path.display()),
        }
    }

    fn from_error(context: Option<&Path>, e: Error) -> Self {
        let code = match &e {
            e if e.is_input_error() => Self::INPUT,
            Error::UnknownFixture(_) | Error::UnknownMethod(_) | Error::InvalidSpec(_) => Self::USAGE,
            _ => Self::PRECONDITION,
        };
        let message = match context {
            Some(p) => format!("{}: {e}", p.display()),
            None => e.to_string(),
        };
        CliError { code, message }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn load(path: &Path, labels: &LabelArgs) -> Result<ScoredDataset, CliError> {
    load_dataset(path, &labels.mapping()).map_err(|e| CliError::from_error(Some(path), e))
}

/// Writes `text` to `out` and returns nothing for standard output, or
/// returns `text` when there is no output path.
fn emit(text: String, out: Option<&Path>) -> Result<String, CliError> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::output(path, e))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Metrics(a) => cmd_metrics(a),
        Command::Curves(a) => cmd_curves(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Compare(a) => cmd_compare(a),
    }
}

pub fn cmd_metrics(a: &MetricsArgs) -> Result<String, CliError> {
    let d = load(&a.input, &a.labels)?;
    let opts = MetricsOptions {
        methods: a.methods.clone(),
        weight: a.weight.load()?,
        grid: a.weight.grid,
        exec: Execution::default(),
    };
    let report = metrics(&d, &opts).map_err(|e| CliError::from_error(Some(&a.input), e))?;
    emit(report.to_json() + "\n", a.out.as_deref())
}

#[derive(Serialize)]
struct CostLineRecord {
    t_lo: Option<f64>,
    t_hi: Option<f64>,
    loss_at_0: f64,
    loss_at_1: f64,
}

impl From<&CostLine> for CostLineRecord {
    fn from(l: &CostLine) -> Self {
        let finite = |x: f64| x.is_finite().then_some(x);
        CostLineRecord {
            t_lo: finite(l.threshold.lo),
            t_hi: finite(l.threshold.hi),
            loss_at_0: l.loss_at_0,
            loss_at_1: l.loss_at_1,
        }
    }
}

#[derive(Serialize)]
struct CurvesSidecar {
    roc: Vec<RocPointRecord>,
    hull: Vec<RocPointRecord>,
    kind: Option<ConditionKind>,
    cost_lines: Vec<CostLineRecord>,
    curves: Vec<PiecewiseLinearCurve>,
}

/// Sidecar path: the SVG path with its extension replaced by `.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

pub fn cmd_curves(a: &CurvesArgs) -> Result<String, CliError> {
    let sidecar = sidecar_path(&a.out);
    if sidecar == a.out {
        return Err(CliError::usage("--out must not end in .json".into()));
    }
    let d = load(&a.input, &a.labels)?;
    let fail = |e| CliError::from_error(Some(&a.input), e);
    let roc = roc_curve(&d).map_err(fail)?;
    let mut panels = vec![roc_panel(&roc)];
    let mut data = CurvesSidecar {
        roc: roc.export(),
        hull: roc.convex_hull().export(),
        kind: None,
        cost_lines: Vec::new(),
        curves: Vec::new(),
    };
    if let (Some(kind), false) = (a.space.kind(), a.methods.is_empty()) {
        let lines = all_cost_lines(&d, kind);
        let curves = Execution::default()
            .map(&a.methods, |m| method_curve(&d, m, kind))
            .into_iter()
            .collect::<Result<Vec<_>, _>>()
            .map_err(fail)?;
        panels.push(cost_panel(kind, &lines, &curves));
        data.kind = Some(kind);
        data.cost_lines = lines.iter().map(CostLineRecord::from).collect();
        data.curves = curves;
    }
    let svg = PlotSpec::new(panels).render();
    let json = serde_json::to_string_pretty(&data).expect("sidecar serializes") + "\n";
    fs::write(&a.out, svg).map_err(|e| CliError::output(&a.out, e))?;
    fs::write(&sidecar, json).map_err(|e| CliError::output(&sidecar, e))?;
    Ok(String::new())
}

pub fn cmd_synth(a: &SynthArgs) -> Result<String, CliError> {
    let fail = |e| CliError::from_error(None, e);
    let spec = match (&a.fixture, &a.family) {
        (Some(f), _) => GeneratorSpec::fixture(f.parse::<Fixture>().map_err(fail)?),
        (None, Some(family)) => {
            let family: Family = family.parse().map_err(fail)?;
            if family == Family::Fixture {
                return Err(CliError::usage("use --fixture <id> to generate a fixture".into()));
            }
            GeneratorSpec {
                seed: a.seed,
                ..GeneratorSpec::new(family, a.n0, a.n1)
            }
        }
        (None, None) => return Err(CliError::usage("synth needs --fixture or --family".into())),
    };
    let d = generate(&spec).map_err(fail)?;
    let mut buf = Vec::new();
    write_dataset(&mut buf, &d).expect("writing to memory cannot fail");
    emit(String::from_utf8(buf).expect("dataset text is UTF-8"), a.out.as_deref())
}

pub fn cmd_compare(a: &CompareArgs) -> Result<String, CliError> {
    let Some(kind) = a.space.kind() else {
        return Err(CliError::usage("compare works in cost or skew space".into()));
    };
    let weight = a.weight.load()?;
    let mut inputs = Vec::with_capacity(a.inputs.len());
    for path in &a.inputs {
        let d = load(path, &a.labels)?;
        inputs.push((path.display().to_string(), d));
    }
    // surface per-file precondition failures with the file name
    for (path, (_, d)) in a.inputs.iter().zip(&inputs) {
        method_curve(d, &a.method, kind).map_err(|e| CliError::from_error(Some(path), e))?;
    }
    let rows = compare(&inputs, &a.method, kind, &weight, a.weight.grid, Execution::default())
        .map_err(|e| CliError::from_error(None, e))?;
    emit(compare_tsv(&rows), a.out.as_deref())
}
