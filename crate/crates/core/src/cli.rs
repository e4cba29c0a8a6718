//! Command-line surface of the `pfas` binary.
//!
//! Exit codes: 0 on success, 1 on validation or input errors, 2 on usage errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{
    extend_catalog, load_carbon_profile, load_config, load_stack, Config, LoadedStack,
    StackDocument, StackSource, SCHEMA_VERSION,
};
use crate::error::{ConfigIssue, Error};
use crate::pfas::DesignParams;
use crate::process::{Catalog, ProcessClass, StepCounts};
use crate::report::{
    to_json, CarbonInput, Format, Inputs, Report, ReportBody, StackInput, Table, TrendReport,
};
use crate::scenario::{
    compare_metrics, compose_soc, normalize_trend, sweep_beol, CarbonSettings, Evaluator,
    TrendSeries,
};

/// Reference data on PFAS uses across electronics; documentation only.
pub const PFAS_USES_JSON: &str = include_str!("../data/pfas_uses.json");

#[derive(Debug, Parser)]
#[command(
    name = "pfas",
    version,
    about = "PFAS-containing lithography layers, step counts, litho energy and embodied carbon for IC metal stacks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Configuration document (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output format: table, csv or json.
    #[arg(long, global = true)]
    pub format: Option<Format>,

    /// Carbon profile document with the five carbon parameters.
    #[arg(long, global = true)]
    pub carbon_profile: Option<PathBuf>,

    /// Reject unknown keys in input documents instead of warning.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Args, Default)]
pub struct StackArgs {
    /// Preset name (asap7, n7-euv, n7-duv) or path to a stack document.
    #[arg(long)]
    pub stack: Option<String>,

    /// Die area in cm².
    #[arg(long, allow_negative_numbers = true)]
    pub area: Option<f64>,

    /// Fab yield in (0, 1].
    #[arg(long = "yield", allow_negative_numbers = true)]
    pub fab_yield: Option<f64>,
}

#[derive(Debug, Args, Default)]
#[group(multiple = false)]
pub struct Retention {
    /// Keep power-grid layers when truncating the stack.
    #[arg(long)]
    pub retain_power_grid: bool,

    /// Drop power-grid layers as well (routing-only BEOL analysis).
    #[arg(long)]
    pub beol_only: bool,
}

impl Retention {
    fn resolve(&self, configured: Option<bool>) -> bool {
        if self.retain_power_grid {
            true
        } else if self.beol_only {
            false
        } else {
            configured.unwrap_or(true)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportKind {
    /// Patterning process catalog (steps and masks per process).
    Processes,
    /// A stack document (requires --stack); re-ingestable with --stack <path>.
    Stack,
    /// Static reference table of PFAS uses in electronics.
    PfasUses,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-layer and total PFAS layers, steps, litho energy, chip PFAS and carbon.
    Analyze {
        #[command(flatten)]
        stack: StackArgs,
    },
    /// Compare two stacks (a = --stack, b = --against).
    Compare {
        #[command(flatten)]
        stack: StackArgs,
        /// Preset or stack document to compare against.
        #[arg(long)]
        against: Option<String>,
    },
    /// Truncate the BEOL at each target layer.
    Sweep {
        #[command(flatten)]
        stack: StackArgs,
        /// Comma-separated BEOL layers, e.g. M7,M5,M3.
        #[arg(long, value_delimiter = ',')]
        targets: Vec<String>,
        #[command(flatten)]
        retention: Retention,
    },
    /// SoC composition under a routing-layer limit (blocks come from --config).
    Soc {
        #[command(flatten)]
        stack: StackArgs,
        /// Highest routing layer any block may use.
        #[arg(long)]
        target: Option<String>,
        #[command(flatten)]
        retention: Retention,
    },
    /// Normalize a per-node series to a reference node.
    Trend {
        /// Reference node.
        #[arg(long = "ref")]
        reference: Option<String>,
        /// Data point as NODE=VALUE; repeatable.
        #[arg(long = "point", value_parser = parse_point)]
        points: Vec<(String, f64)>,
    },
    /// Export reference data as documents.
    ExportCatalog {
        #[arg(long, value_enum, default_value = "processes")]
        kind: ExportKind,
        /// Stack to export with --kind stack.
        #[arg(long)]
        stack: Option<String>,
    },
}

fn parse_point(s: &str) -> Result<(String, f64), String> {
    let (node, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NODE=VALUE, got `{s}`"))?;
    let value = value
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((node.trim().to_string(), value))
}

/// Result of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Model(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

type CliResult<T> = Result<T, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: rendered,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: rendered,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut warnings = Vec::new();
    match execute(&cli, &mut warnings) {
        Ok(stdout) => Outcome {
            code: 0,
            stdout,
            stderr: render_warnings(&warnings),
        },
        Err(Failure::Usage(msg)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("{}error: {msg}\n", render_warnings(&warnings)),
        },
        Err(Failure::Model(e)) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("{}error: {e}\n", render_warnings(&warnings)),
        },
    }
}

fn render_warnings(warnings: &[ConfigIssue]) -> String {
    warnings.iter().map(|w| format!("warning: {w}\n")).collect()
}

struct Session {
    cfg: Config,
    strict: bool,
}

impl Session {
    fn open(cli: &Cli, warnings: &mut Vec<ConfigIssue>) -> CliResult<Self> {
        let mut cfg = match &cli.config {
            Some(path) => {
                let parsed = load_config(path, cli.strict)?;
                warnings.extend(parsed.warnings);
                parsed.value
            }
            None => Config::default(),
        };
        if let Some(path) = &cli.carbon_profile {
            let profile = load_carbon_profile(path, cli.strict)?;
            warnings.extend(profile.warnings);
            cfg.carbon = Some(CarbonSettings {
                params: profile.value.carbon,
                band: profile
                    .value
                    .carbon_intensity_range
                    .map(|[lo, hi]| (lo, hi)),
            });
        }
        Ok(Self {
            cfg,
            strict: cli.strict,
        })
    }

    /// Loads a stack named on the command line; paths resolve against the
    /// working directory.
    fn load_arg(&mut self, arg: &str, warnings: &mut Vec<ConfigIssue>) -> CliResult<LoadedStack> {
        let parsed = load_stack(&StackSource::from_arg(arg), Path::new(""), self.strict)?;
        warnings.extend(parsed.warnings);
        let issues = extend_catalog(&mut self.cfg.catalog, &parsed.value.processes, "processes");
        if !issues.is_empty() {
            return Err(Error::Config(issues).into());
        }
        self.cfg
            .custom_processes
            .extend(parsed.value.processes.iter().cloned());
        Ok(parsed.value)
    }

    fn primary_stack(
        &mut self,
        args: &StackArgs,
        warnings: &mut Vec<ConfigIssue>,
    ) -> CliResult<LoadedStack> {
        match &args.stack {
            Some(arg) => self.load_arg(arg, warnings),
            None => self.cfg.stack.clone().ok_or_else(|| {
                Failure::Usage(
                    "no stack given: pass --stack <preset|path> or a --config with a stack section"
                        .into(),
                )
            }),
        }
    }

    fn design(&self, args: &StackArgs) -> CliResult<DesignParams> {
        let base = self.cfg.design;
        let design = DesignParams {
            area_cm2: args.area.or(base.map(|d| d.area_cm2)).unwrap_or(1.0),
            fab_yield: args.fab_yield.or(base.map(|d| d.fab_yield)).unwrap_or(1.0),
        };
        design.validate()?;
        Ok(design)
    }

    fn evaluator(&self, design: DesignParams) -> Evaluator<'_> {
        let eval = Evaluator::new(&self.cfg.catalog, design).with_weights(self.cfg.weights);
        match self.cfg.carbon {
            Some(c) => eval.with_carbon(c),
            None => eval,
        }
    }

    fn inputs(&self, stacks: &[&LoadedStack], design: Option<DesignParams>) -> Inputs {
        Inputs {
            stacks: stacks
                .iter()
                .map(|l| StackInput {
                    source: l.source.clone(),
                    stack: l.stack.clone(),
                })
                .collect(),
            design,
            energy_weights: self.cfg.weights,
            carbon: self.cfg.carbon.map(|c| CarbonInput {
                params: c.params,
                carbon_intensity_range: c.band.map(|(lo, hi)| [lo, hi]),
            }),
            custom_processes: self.cfg.custom_processes.clone(),
        }
    }
}

fn execute(cli: &Cli, warnings: &mut Vec<ConfigIssue>) -> CliResult<String> {
    if let Command::ExportCatalog { kind, stack } = &cli.command {
        return export(cli, *kind, stack.as_deref(), warnings);
    }
    let mut session = Session::open(cli, warnings)?;
    let report = match &cli.command {
        Command::Analyze { stack } => {
            let loaded = session.primary_stack(stack, warnings)?;
            let design = session.design(stack)?;
            let evaluation = session.evaluator(design).evaluate(&loaded.stack)?;
            Report::new(
                session.inputs(&[&loaded], Some(design)),
                ReportBody::Analyze(evaluation),
            )
        }
        Command::Compare { stack, against } => {
            let a = session.primary_stack(stack, warnings)?;
            let b = match against {
                Some(arg) => session.load_arg(arg, warnings)?,
                None => session.cfg.compare.clone().ok_or_else(|| {
                    Failure::Usage(
                        "no comparison stack: pass --against or a config with a compare section"
                            .into(),
                    )
                })?,
            };
            let design = session.design(stack)?;
            let eval = session.evaluator(design);
            let result = compare_metrics(eval.metrics(&a.stack)?, eval.metrics(&b.stack)?);
            Report::new(
                session.inputs(&[&a, &b], Some(design)),
                ReportBody::Compare(result),
            )
        }
        Command::Sweep {
            stack,
            targets,
            retention,
        } => {
            let loaded = session.primary_stack(stack, warnings)?;
            let section = session.cfg.sweep.clone();
            let targets = if targets.is_empty() {
                section
                    .as_ref()
                    .map(|s| s.targets.clone())
                    .unwrap_or_default()
            } else {
                targets.clone()
            };
            if targets.is_empty() {
                return Err(Failure::Usage(
                    "no sweep targets: pass --targets M7,M5,... or a config with a sweep section"
                        .into(),
                ));
            }
            let retain = retention.resolve(section.and_then(|s| s.retain_power_grid));
            let design = session.design(stack)?;
            let result = sweep_beol(&loaded.stack, &targets, retain, &session.evaluator(design))?;
            Report::new(
                session.inputs(&[&loaded], Some(design)),
                ReportBody::Sweep(result),
            )
        }
        Command::Soc {
            stack,
            target,
            retention,
        } => {
            let loaded = session.primary_stack(stack, warnings)?;
            let section = session.cfg.soc.clone().ok_or_else(|| {
                Failure::Usage("soc needs a --config with a soc section listing the blocks".into())
            })?;
            let target = target.clone().unwrap_or(section.target_top.clone());
            let retain = retention.resolve(section.retain_power_grid);
            let design = session.design(stack)?;
            let result = compose_soc(
                &section.blocks,
                &loaded.stack,
                &target,
                retain,
                &session.evaluator(design),
            )?;
            let mut inputs = session.inputs(&[&loaded], Some(design));
            // die area comes from the blocks; only yield is an input here
            inputs.design = Some(DesignParams {
                area_cm2: result.baseline_area_cm2,
                fab_yield: design.fab_yield,
            });
            Report::new(inputs, ReportBody::Soc(result))
        }
        Command::Trend { reference, points } => {
            let configured = session.cfg.trend.clone();
            let series = if points.is_empty() {
                configured.as_ref().map(|t| t.series.clone()).ok_or_else(|| {
                    Failure::Usage("no trend data: pass --point NODE=VALUE or a config with a trend section".into())
                })?
            } else {
                TrendSeries::new(points.iter().cloned())
            };
            let reference = reference
                .clone()
                .or_else(|| configured.and_then(|t| t.reference))
                .ok_or_else(|| Failure::Usage("no reference node: pass --ref <node>".into()))?;
            let normalized = normalize_trend(&series, &reference)?;
            Report::new(
                session.inputs(&[], None),
                ReportBody::Trend(TrendReport {
                    reference,
                    input: series,
                    normalized,
                }),
            )
        }
        Command::ExportCatalog { .. } => unreachable!("handled above"),
    };
    Ok(report.render(cli.format.unwrap_or(Format::Table))?)
}

/// Machine-readable process catalog.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CatalogDocument {
    pub schema_version: u32,
    pub kind: &'static str,
    pub processes: Vec<ProcessClass>,
}

pub fn catalog_document(catalog: &Catalog) -> CatalogDocument {
    CatalogDocument {
        schema_version: SCHEMA_VERSION,
        kind: "process_catalog",
        processes: catalog.processes(),
    }
}

fn export(
    cli: &Cli,
    kind: ExportKind,
    stack: Option<&str>,
    warnings: &mut Vec<ConfigIssue>,
) -> CliResult<String> {
    let format = cli.format.unwrap_or(Format::Json);
    match kind {
        ExportKind::Processes => {
            let session = Session::open(cli, warnings)?;
            let doc = catalog_document(&session.cfg.catalog);
            match format {
                Format::Json => Ok(to_json(&doc)?),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    let mut header = vec!["id", "exposure"];
                    header.extend(StepCounts::LABELS);
                    header.push("masks");
                    w.write_record(&header).map_err(Error::from)?;
                    for p in &doc.processes {
                        w.write_record(process_row(p, u32::to_string))
                            .map_err(Error::from)?;
                    }
                    Ok(crate::report::finish(w)?)
                }
                Format::Table => {
                    let rows = doc
                        .processes
                        .iter()
                        .map(|p| process_row(p, u32::to_string))
                        .collect();
                    Ok(Table::new(
                        &[
                            "Process", "Exposure", "DryEtch", "Litho.", "Metal.", "Metr.",
                            "WetEtch", "Dep.", "# Masks",
                        ],
                        rows,
                    )
                    .render())
                }
            }
        }
        ExportKind::Stack => {
            let arg = stack
                .map(str::to_string)
                .ok_or_else(|| Failure::Usage("--kind stack needs --stack <preset|path>".into()))?;
            let mut session = Session::open(cli, warnings)?;
            let loaded = session.load_arg(&arg, warnings)?;
            crate::stack::validate_stack(&loaded.stack, &session.cfg.catalog)?;
            let mut doc = StackDocument::from_stack(&loaded.stack);
            doc.processes = loaded.processes;
            match format {
                Format::Json => Ok(to_json(&doc)?),
                _ => Err(Failure::Usage(
                    "stack documents are exported as json only".into(),
                )),
            }
        }
        ExportKind::PfasUses => match format {
            Format::Json => Ok(PFAS_USES_JSON.to_string()),
            _ => Err(Failure::Usage(
                "the PFAS uses reference is exported as json only".into(),
            )),
        },
    }
}

fn process_row(p: &ProcessClass, fmt: fn(&u32) -> String) -> Vec<String> {
    let mut row = vec![p.id.clone(), p.exposure.to_string()];
    row.extend(p.steps.as_array().iter().map(fmt));
    row.push(fmt(&p.masks));
    row
}
