//! Configuration documents (JSON) and their validation.
//!
//! A config names one stack source plus fab, design and optional scenario
//! sections. Stack files and carbon profiles are separate documents that carry
//! their own `schema_version`.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::carbon::CarbonParams;
use crate::error::{ConfigIssue, Error, Result};
use crate::pfas::DesignParams;
use crate::process::{Catalog, EnergyWeights, ProcessClass};
use crate::scenario::{CarbonSettings, SocBlock, TrendSeries};
use crate::stack::{preset, validate_stack, StackSpec, PRESET_NAMES};

pub const SCHEMA_VERSION: u32 = 1;

/// Where a stack comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StackSource {
    Preset(String),
    Path(PathBuf),
    Inline(StackSpec),
}

impl StackSource {
    /// Preset name if it is one, file path otherwise.
    pub fn from_arg(arg: &str) -> Self {
        if PRESET_NAMES.contains(&arg.to_ascii_lowercase().as_str()) {
            StackSource::Preset(arg.to_string())
        } else {
            StackSource::Path(arg.into())
        }
    }

    pub fn describe(&self) -> String {
        match self {
            StackSource::Preset(name) => format!("preset:{name}"),
            StackSource::Path(p) => format!("file:{}", p.display()),
            StackSource::Inline(s) => format!("inline:{}", s.technology_node),
        }
    }
}

/// On-disk stack document. Custom processes it lists are registered before
/// the layers are resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackDocument {
    pub schema_version: u32,
    pub technology_node: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub processes: Vec<ProcessClass>,
    pub layers: Vec<crate::stack::LayerSpec>,
}

impl StackDocument {
    pub fn from_stack(stack: &StackSpec) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            technology_node: stack.technology_node.clone(),
            processes: Vec::new(),
            layers: stack.layers.clone(),
        }
    }

    pub fn stack(&self) -> StackSpec {
        StackSpec::new(self.technology_node.clone(), self.layers.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarbonProfile {
    pub schema_version: u32,
    pub carbon: CarbonParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carbon_intensity_range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FabSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_weights: Option<EnergyWeights>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carbon: Option<CarbonParams>,
    /// [renewable, coal] carbon intensity in kg CO2e/kWh.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carbon_intensity_range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSection {
    pub against: StackSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSection {
    pub targets: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retain_power_grid: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocSection {
    pub target_top: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retain_power_grid: Option<bool>,
    pub blocks: Vec<SocBlock>,
}

/// A trend point is either a literal value or the PFAS layer count of a stack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPointSource {
    pub node: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stack: Option<StackSource>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    pub points: Vec<TrendPointSource>,
}

/// Raw configuration document as written by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigDocument {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stack: Option<StackSource>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub processes: Vec<ProcessClass>,
    #[serde(default)]
    pub fab: FabSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub soc: Option<SocSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trend: Option<TrendSection>,
}

/// A parsed value plus the non-fatal issues found along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<ConfigIssue>,
}

/// Deserializes `text`, rejecting (strict) or reporting (lenient) unknown keys.
pub fn parse_document<T: DeserializeOwned>(text: &str, strict: bool) -> Result<Parsed<T>> {
    let mut unknown = Vec::new();
    let mut de = serde_json::Deserializer::from_str(text);
    let mut record = |path: serde_ignored::Path<'_>| unknown.push(path.to_string());
    let ignored = serde_ignored::Deserializer::new(&mut de, &mut record);
    let value: T = serde_path_to_error::deserialize(ignored).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        let location = match (path.as_str(), inner.line()) {
            (".", 0) => "document".to_string(),
            (".", line) => format!("line {line}, column {}", inner.column()),
            (p, 0) => p.to_string(),
            (p, line) => format!("{p} (line {line}, column {})", inner.column()),
        };
        Error::Config(vec![ConfigIssue {
            location,
            message: strip_position(&inner.to_string()),
        }])
    })?;
    de.end().map_err(|e| {
        Error::Config(vec![ConfigIssue {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: "trailing characters after document".into(),
        }])
    })?;

    let issues: Vec<ConfigIssue> = unknown
        .into_iter()
        .map(|path| ConfigIssue {
            // serde_ignored marks Option::Some with a `?` segment
            location: path
                .split('.')
                .filter(|seg| *seg != "?")
                .collect::<Vec<_>>()
                .join("."),
            message: "unknown key".into(),
        })
        .collect();
    if strict && !issues.is_empty() {
        return Err(Error::Config(issues));
    }
    Ok(Parsed {
        value,
        warnings: issues,
    })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads a stack document from disk.
pub fn load_stack_document(path: &Path, strict: bool) -> Result<Parsed<StackDocument>> {
    let parsed: Parsed<StackDocument> =
        parse_document(&read(path)?, strict).map_err(|e| prefix(e, path))?;
    check_version(parsed.value.schema_version).map_err(|e| prefix(e, path))?;
    Ok(parsed)
}

pub fn load_carbon_profile(path: &Path, strict: bool) -> Result<Parsed<CarbonProfile>> {
    let parsed: Parsed<CarbonProfile> =
        parse_document(&read(path)?, strict).map_err(|e| prefix(e, path))?;
    let p = &parsed.value;
    let mut issues = Vec::new();
    if let Err(e) = check_version(p.schema_version) {
        issues.extend(flatten(e, ""));
    }
    if let Err(e) = p.carbon.validate() {
        issues.extend(flatten(e, "carbon"));
    }
    if let Some(range) = p.carbon_intensity_range {
        issues.extend(check_range(range, "carbon_intensity_range"));
    }
    if !issues.is_empty() {
        return Err(prefix(Error::Config(issues), path));
    }
    Ok(parsed)
}

fn prefix(err: Error, path: &Path) -> Error {
    match err {
        Error::Config(issues) => Error::Config(
            issues
                .into_iter()
                .map(|i| ConfigIssue {
                    location: format!("{}: {}", path.display(), i.location),
                    message: i.message,
                })
                .collect(),
        ),
        other => other,
    }
}

fn check_version(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Config(vec![ConfigIssue {
            location: "schema_version".into(),
            message: format!("unsupported schema_version {v} (expected {SCHEMA_VERSION})"),
        }]));
    }
    Ok(())
}

/// Turns any error into located issues under `location`.
fn flatten(err: Error, location: &str) -> Vec<ConfigIssue> {
    let join = |inner: &str| match (location.is_empty(), inner.is_empty()) {
        (true, _) => inner.to_string(),
        (false, true) => location.to_string(),
        (false, false) => format!("{location}.{inner}"),
    };
    match err {
        Error::Config(issues) => issues
            .into_iter()
            .map(|i| ConfigIssue {
                location: join(&i.location),
                message: i.message,
            })
            .collect(),
        Error::Validation { violations, .. } => violations
            .into_iter()
            .map(|v| ConfigIssue {
                location: join(&format!("layers[{}]", v.layer)),
                message: format!("[{}] {}", v.rule.as_str(), v.message),
            })
            .collect(),
        Error::Domain { field, message } => vec![ConfigIssue {
            location: join(&field),
            message,
        }],
        other => vec![ConfigIssue {
            location: join(""),
            message: other.to_string(),
        }],
    }
}

fn check_range([lo, hi]: [f64; 2], location: &str) -> Vec<ConfigIssue> {
    let mut issues = Vec::new();
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0) {
        issues.push(ConfigIssue {
            location: location.into(),
            message: format!("carbon intensities must be finite and >= 0, got [{lo}, {hi}]"),
        });
    } else if lo > hi {
        issues.push(ConfigIssue {
            location: location.into(),
            message: format!("range is inverted: {lo} > {hi}"),
        });
    }
    issues
}

/// A stack after loading, with the processes its document registered.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedStack {
    pub source: String,
    pub stack: StackSpec,
    pub processes: Vec<ProcessClass>,
}

/// Resolves a stack source relative to `base_dir`.
pub fn load_stack(
    source: &StackSource,
    base_dir: &Path,
    strict: bool,
) -> Result<Parsed<LoadedStack>> {
    let describe = source.describe();
    match source {
        StackSource::Preset(name) => Ok(Parsed {
            value: LoadedStack {
                source: describe,
                stack: preset(name)?,
                processes: Vec::new(),
            },
            warnings: Vec::new(),
        }),
        StackSource::Inline(stack) => Ok(Parsed {
            value: LoadedStack {
                source: describe,
                stack: stack.clone(),
                processes: Vec::new(),
            },
            warnings: Vec::new(),
        }),
        StackSource::Path(p) => {
            let path = if p.is_absolute() {
                p.clone()
            } else {
                base_dir.join(p)
            };
            let doc = load_stack_document(&path, strict)?;
            Ok(Parsed {
                value: LoadedStack {
                    source: describe,
                    stack: doc.value.stack(),
                    processes: doc.value.processes,
                },
                warnings: doc.warnings,
            })
        }
    }
}

/// Registers every process in `extra`, reporting collisions as issues.
pub fn extend_catalog(
    catalog: &mut Catalog,
    extra: &[ProcessClass],
    location: &str,
) -> Vec<ConfigIssue> {
    extra
        .iter()
        .enumerate()
        .filter_map(|(i, p)| {
            catalog
                .register(p.clone())
                .err()
                .map(|e| flatten(e, &format!("{location}[{i}]")))
        })
        .flatten()
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedTrend {
    pub reference: Option<String>,
    pub series: TrendSeries,
}

/// A fully validated configuration: stacks loaded, catalog extended, ranges checked.
#[derive(Debug, Clone)]
pub struct Config {
    pub catalog: Catalog,
    pub custom_processes: Vec<ProcessClass>,
    pub stack: Option<LoadedStack>,
    pub design: Option<DesignParams>,
    pub weights: EnergyWeights,
    pub carbon: Option<CarbonSettings>,
    pub compare: Option<LoadedStack>,
    pub sweep: Option<SweepSection>,
    pub soc: Option<SocSection>,
    pub trend: Option<ResolvedTrend>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            catalog: Catalog::new(),
            custom_processes: Vec::new(),
            stack: None,
            design: None,
            weights: EnergyWeights::default(),
            carbon: None,
            compare: None,
            sweep: None,
            soc: None,
            trend: None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    pub strict: bool,
    /// Directory relative stack paths resolve against.
    pub base_dir: PathBuf,
}

struct Sink<'a> {
    opts: &'a ParseOptions,
    warnings: &'a mut Vec<ConfigIssue>,
    issues: &'a mut Vec<ConfigIssue>,
}

impl Sink<'_> {
    fn load(
        &mut self,
        source: &StackSource,
        location: &str,
        cfg: &mut Config,
    ) -> Option<LoadedStack> {
        match load_stack(source, &self.opts.base_dir, self.opts.strict) {
            Ok(p) => {
                self.warnings.extend(p.warnings);
                let loc = format!("{location}.processes");
                self.issues
                    .extend(extend_catalog(&mut cfg.catalog, &p.value.processes, &loc));
                cfg.custom_processes
                    .extend(p.value.processes.iter().cloned());
                Some(p.value)
            }
            Err(e) => {
                self.issues.extend(flatten(e, location));
                None
            }
        }
    }
}

/// Parses and validates a configuration document, collecting every problem.
pub fn parse_config(text: &str, opts: &ParseOptions) -> Result<Parsed<Config>> {
    let Parsed {
        value: doc,
        mut warnings,
    } = parse_document::<ConfigDocument>(text, opts.strict)?;
    let mut issues = Vec::new();
    if let Err(e) = check_version(doc.schema_version) {
        issues.extend(flatten(e, ""));
    }

    let mut cfg = Config::default();
    issues.extend(extend_catalog(
        &mut cfg.catalog,
        &doc.processes,
        "processes",
    ));
    cfg.custom_processes = doc.processes.clone();

    let mut sink = Sink {
        opts,
        warnings: &mut warnings,
        issues: &mut issues,
    };
    cfg.stack = doc
        .stack
        .as_ref()
        .and_then(|s| sink.load(s, "stack", &mut cfg));
    cfg.compare = doc
        .compare
        .as_ref()
        .and_then(|c| sink.load(&c.against, "compare.against", &mut cfg));
    let mut trend_points = Vec::new();
    if let Some(trend) = &doc.trend {
        for (i, p) in trend.points.iter().enumerate() {
            let loc = format!("trend.points[{i}]");
            match (&p.value, &p.stack) {
                (Some(v), None) => trend_points.push((p.node.clone(), Some(*v), None)),
                (None, Some(src)) => {
                    let loaded = sink.load(src, &format!("{loc}.stack"), &mut cfg);
                    trend_points.push((p.node.clone(), None, loaded));
                }
                _ => sink.issues.push(ConfigIssue {
                    location: loc,
                    message: "exactly one of `value` or `stack` is required".into(),
                }),
            }
        }
    }

    for (loaded, loc) in [(&cfg.stack, "stack"), (&cfg.compare, "compare.against")] {
        if let Some(l) = loaded {
            if let Err(e) = validate_stack(&l.stack, &cfg.catalog) {
                issues.extend(flatten(e, loc));
            }
        }
    }

    if let Some(design) = doc.design {
        match design.validate() {
            Ok(()) => cfg.design = Some(design),
            Err(e) => issues.extend(flatten(e, "design")),
        }
    }
    if let Some(w) = doc.fab.energy_weights {
        match w.validate() {
            Ok(()) => cfg.weights = w,
            Err(e) => issues.extend(flatten(e, "fab.energy_weights")),
        }
    }
    if let Some(range) = doc.fab.carbon_intensity_range {
        issues.extend(check_range(range, "fab.carbon_intensity_range"));
        if doc.fab.carbon.is_none() {
            issues.push(ConfigIssue {
                location: "fab.carbon_intensity_range".into(),
                message: "requires fab.carbon parameters".into(),
            });
        }
    }
    if let Some(params) = doc.fab.carbon {
        match params.validate() {
            Ok(()) => {
                cfg.carbon = Some(CarbonSettings {
                    params,
                    band: doc.fab.carbon_intensity_range.map(|[lo, hi]| (lo, hi)),
                })
            }
            Err(e) => issues.extend(flatten(e, "fab.carbon")),
        }
    }

    if let Some(trend) = &doc.trend {
        let mut points = Vec::new();
        for (node, value, loaded) in trend_points {
            match (value, loaded) {
                (Some(v), _) => points.push((node, v)),
                (None, Some(l)) => {
                    match crate::pfas::stack_metrics(&l.stack, &cfg.catalog, &cfg.weights) {
                        Ok(m) => points.push((node, f64::from(m.total_pfas_layers))),
                        Err(e) => issues.extend(flatten(e, "trend.points")),
                    }
                }
                (None, None) => {}
            }
        }
        cfg.trend = Some(ResolvedTrend {
            reference: trend.reference.clone(),
            series: TrendSeries::new(points),
        });
    }
    cfg.sweep = doc.sweep;
    cfg.soc = doc.soc;

    if !issues.is_empty() {
        return Err(Error::Config(issues));
    }
    Ok(Parsed {
        value: cfg,
        warnings,
    })
}

/// Reads and parses a config file; relative paths resolve next to it.
pub fn load_config(path: &Path, strict: bool) -> Result<Parsed<Config>> {
    let text = read(path)?;
    let opts = ParseOptions {
        strict,
        base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    parse_config(&text, &opts).map_err(|e| prefix(e, path))
}
