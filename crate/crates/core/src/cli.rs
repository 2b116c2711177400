//! Command-line surface. `execute` returns the document and the diagnostics
//! separately so `main` can route them to stdout and stderr.

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::catalog::{build, parse_cycles_in, split_spec_list, CatalogGroup, GroupSpec, KNOWN_GROUPS};
use crate::cm::Orientation;
use crate::error::Error;
use crate::perm::DEFAULT_SUBGROUP_SEARCH_CAP;
use crate::pipeline::{
    aggregate_pairs, classification_table, merge, run, threads_from_env, DeltaChoice, RunOptions,
};
use crate::render::{render_aggregate, render_classification, render_group_list, render_records, Format, Meta};

#[derive(Debug, Parser)]
#[command(name = "cmred", version, about = "Reduction types of CM abelian varieties modulo p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correspondence table of decomposition types and BT1 decompositions.
    Reduce(ReduceArgs),
    /// Quasi-polarized indecomposable pieces of a given half-order.
    Classify(ClassifyArgs),
    /// (p-rank, a-number) / decomposition-type pairs over several groups.
    Aggregate(AggregateArgs),
    /// Catalog of group constructions.
    ListGroups(FormatArg),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    Forward,
    Reverse,
    /// The calibrated orientation.
    Auto,
}

impl OrientationArg {
    fn resolve(self) -> Orientation {
        match self {
            OrientationArg::Forward => Orientation::Forward,
            OrientationArg::Reverse => Orientation::Reverse,
            OrientationArg::Auto => Orientation::CALIBRATED,
        }
    }
}

#[derive(Debug, Args)]
pub struct FormatArg {
    #[arg(long, value_enum, default_value = "md")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Also reduce imprimitive CM types.
    #[arg(long)]
    pub include_imprimitive: bool,
    /// Largest group order for which subgroups are searched.
    #[arg(long, default_value_t = DEFAULT_SUBGROUP_SEARCH_CAP)]
    pub subgroup_cap: usize,
    #[arg(long, value_enum, default_value = "auto")]
    pub orientation: OrientationArg,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("dimension").required(true).multiple(true).args(["g", "delta"]))]
pub struct ReduceArgs {
    /// Group spec, e.g. builtin:G40_12 or product:alternating:4,cyclic:2.
    #[arg(long)]
    pub group: String,
    /// Dimension; Δ ranges over subgroups of order |G|/2g.
    #[arg(long)]
    pub g: Option<usize>,
    /// Generators of Δ in cycle notation, `;`-separated.
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long, value_enum, default_value = "md")]
    pub format: Format,
    /// Keep one row per (ι, Δ, S¹, σ).
    #[arg(long)]
    pub no_dedup: bool,
    /// Attach a witness (ι, Δ, S¹, σ) to each row.
    #[arg(long)]
    pub verbose_provenance: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub g: usize,
    #[arg(long, value_enum, default_value = "md")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    #[arg(long)]
    pub g: usize,
    /// Group specs separated by `;`; may be repeated.
    #[arg(long, required = true)]
    pub groups: Vec<String>,
    #[arg(long, value_enum, default_value = "md")]
    pub format: Format,
    #[command(flatten)]
    pub run: RunArgs,
}

/// Result of one invocation.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: Vec<String>,
    pub code: i32,
}

/// Exit code for an error: 3 for capacity, 1 for failed internal checks,
/// 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity { .. } => 3,
        Error::Internal(_) => 1,
        _ => 2,
    }
}

fn flag_error(flag: &str, e: Error) -> (String, Error) {
    (format!("{flag}: {e}"), e)
}

type Failure = (String, Error);

pub fn execute(cli: Cli) -> Outcome {
    let mut warnings = Vec::new();
    match dispatch(cli.command, &mut warnings) {
        Ok(stdout) => Outcome {
            stdout,
            stderr: warnings,
            code: 0,
        },
        Err((message, e)) => {
            warnings.push(format!("error: {message}"));
            Outcome {
                stdout: String::new(),
                stderr: warnings,
                code: exit_code(&e),
            }
        }
    }
}

fn load_group(flag: &str, spec: &GroupSpec, warnings: &mut Vec<String>) -> Result<CatalogGroup, Failure> {
    if let Some(known) = KNOWN_GROUPS
        .iter()
        .find(|k| k.construction == Some(spec.to_string().as_str()) && k.note.contains("best-effort"))
    {
        warnings.push(format!("warning: {spec} stands for {} ({})", known.gap_label, known.note));
    }
    build(spec).map_err(|e| flag_error(flag, e))
}

fn run_options(args: &RunArgs, dedup: bool, provenance: bool) -> Result<RunOptions, Failure> {
    Ok(RunOptions {
        include_imprimitive: args.include_imprimitive,
        dedup,
        provenance,
        subgroup_cap: args.subgroup_cap,
        orientation: args.orientation.resolve(),
        threads: threads_from_env().map_err(|e| flag_error("CMRED_THREADS", e))?,
    })
}

fn run_flags(args: &RunArgs) -> Vec<String> {
    let mut flags = Vec::new();
    if args.include_imprimitive {
        flags.push("include-imprimitive".to_string());
    }
    if args.subgroup_cap != DEFAULT_SUBGROUP_SEARCH_CAP {
        flags.push(format!("subgroup-cap {}", args.subgroup_cap));
    }
    flags
}

fn dispatch(command: Command, warnings: &mut Vec<String>) -> Result<String, Failure> {
    match command {
        Command::Reduce(args) => reduce(args, warnings),
        Command::Classify(args) => {
            if args.g == 0 {
                return Err(flag_error("--g", Error::InvalidInput("g must be positive".into())));
            }
            let mut meta = Meta::new("classify", Orientation::CALIBRATED.name());
            meta.g = Some(args.g);
            render_classification(&meta, &classification_table(args.g), args.format).map_err(|e| flag_error("output", e))
        }
        Command::Aggregate(args) => aggregate(args, warnings),
        Command::ListGroups(args) => {
            let meta = Meta::new("list-groups", Orientation::CALIBRATED.name());
            render_group_list(&meta, args.format).map_err(|e| flag_error("output", e))
        }
    }
}

fn reduce(args: ReduceArgs, warnings: &mut Vec<String>) -> Result<String, Failure> {
    let spec: GroupSpec = args.group.parse().map_err(|e| flag_error("--group", e))?;
    let group = load_group("--group", &spec, warnings)?;
    let choice = match &args.delta {
        Some(text) => {
            let gens = parse_cycles_in(text, group.group.degree()).map_err(|e| flag_error("--delta", e))?;
            DeltaChoice::Explicit(gens)
        }
        None => DeltaChoice::Dimension(args.g.expect("clap requires --g or --delta")),
    };
    let options = run_options(&args.run, !args.no_dedup, args.verbose_provenance)?;
    let flag = if args.delta.is_some() { "--delta" } else { "--g" };
    let out = run(&group.group, &group.label, &choice, &options).map_err(|e| flag_error(flag, e))?;
    if let (Some(g), Some(record)) = (args.g, out.records.first()) {
        if record.g != g {
            return Err(flag_error(
                "--g",
                Error::InvalidInput(format!("--delta has index {}, which is dimension {}, not {g}", 2 * record.g, record.g)),
            ));
        }
    }
    warnings.extend(out.warnings.iter().map(|w| format!("warning: {w}")));

    let mut meta = Meta::new("reduce", options.orientation.name());
    meta.group = Some(group.label.clone());
    meta.g = args.g.or(out.records.first().map(|r| r.g));
    meta.delta = args.delta.clone();
    meta.flags = run_flags(&args.run);
    if args.no_dedup {
        meta.flags.push("no-dedup".into());
    }
    render_records(&meta, &out.records, args.format).map_err(|e| flag_error("output", e))
}

fn aggregate(args: AggregateArgs, warnings: &mut Vec<String>) -> Result<String, Failure> {
    if args.g == 0 {
        return Err(flag_error("--g", Error::InvalidInput("g must be positive".into())));
    }
    let mut specs = Vec::new();
    for list in &args.groups {
        specs.extend(split_spec_list(list).map_err(|e| flag_error("--groups", e))?);
    }
    let options = run_options(&args.run, true, false)?;
    let mut runs = Vec::new();
    let mut labels = Vec::new();
    for spec in &specs {
        let group = load_group("--groups", spec, warnings)?;
        let out = run(&group.group, &group.label, &DeltaChoice::Dimension(args.g), &options)
            .map_err(|e| flag_error(&format!("--groups ({spec})"), e))?;
        warnings.extend(out.warnings.iter().map(|w| format!("warning: {}: {w}", group.label)));
        labels.push(group.label);
        runs.push(out.records);
    }
    let records = merge(runs);
    let pairs = aggregate_pairs(&records);
    let mut meta = Meta::new("aggregate", options.orientation.name());
    meta.group = Some(labels.join("; "));
    meta.g = Some(args.g);
    meta.flags = run_flags(&args.run);
    render_aggregate(&meta, args.g, &pairs, args.format).map_err(|e| flag_error("output", e))
}
