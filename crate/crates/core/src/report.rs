//! Report documents and their table / CSV / JSON renderings.
//!
//! JSON carries full precision; the human table rounds to 6 significant digits.
//! Object keys follow struct declaration order so reports diff cleanly.

use std::fmt::Write as _;

use serde::Serialize;

use crate::carbon::{CarbonParams, CarbonResult};
use crate::config::SCHEMA_VERSION;
use crate::error::Result;
use crate::pfas::{DesignParams, StackMetrics};
use crate::process::{EnergyWeights, ProcessClass, StepCounts};
use crate::scenario::{
    ComparisonResult, Evaluation, SocReport, SweepPoint, SweepResult, TrendSeries,
};
use crate::stack::{Region, StackSpec};

pub const TOOL_NAME: &str = "pfas";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!(
                "unknown format `{other}` (expected table, csv or json)"
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: TOOL_NAME,
            version: TOOL_VERSION,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StackInput {
    pub source: String,
    pub stack: StackSpec,
}

#[derive(Debug, Clone, Serialize)]
pub struct CarbonInput {
    pub params: CarbonParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carbon_intensity_range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Inputs {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub stacks: Vec<StackInput>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignParams>,
    pub energy_weights: EnergyWeights,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carbon: Option<CarbonInput>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub custom_processes: Vec<ProcessClass>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendReport {
    pub reference: String,
    pub input: TrendSeries,
    pub normalized: TrendSeries,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
#[allow(clippy::large_enum_variant)]
pub enum ReportBody {
    Analyze(Evaluation),
    Compare(ComparisonResult),
    Sweep(SweepResult),
    Soc(SocReport),
    Trend(TrendReport),
}

impl ReportBody {
    pub fn command(&self) -> &'static str {
        match self {
            ReportBody::Analyze(_) => "analyze",
            ReportBody::Compare(_) => "compare",
            ReportBody::Sweep(_) => "sweep",
            ReportBody::Soc(_) => "soc",
            ReportBody::Trend(_) => "trend",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub command: &'static str,
    pub inputs: Inputs,
    pub result: ReportBody,
}

impl Report {
    pub fn new(inputs: Inputs, result: ReportBody) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo::default(),
            command: result.command(),
            inputs,
            result,
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => to_json(self),
            Format::Csv => self.to_csv(),
            Format::Table => Ok(self.to_table()),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.result {
            ReportBody::Analyze(e) => {
                let stack = self.inputs.stacks.first().map(|s| &s.stack);
                layer_csv(&mut w, stack, &e.metrics)?;
            }
            ReportBody::Compare(c) => compare_csv(&mut w, c)?,
            ReportBody::Sweep(s) => sweep_csv(&mut w, s)?,
            ReportBody::Soc(s) => soc_csv(&mut w, s)?,
            ReportBody::Trend(t) => {
                w.write_record(["node", "value", "normalized"])?;
                for (raw, norm) in t.input.points.iter().zip(&t.normalized.points) {
                    w.write_record([raw.node.clone(), num(raw.value), num(norm.value)])?;
                }
            }
        }
        finish(w)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        match &self.result {
            ReportBody::Analyze(e) => {
                if let Some(s) = self.inputs.stacks.first() {
                    let _ = writeln!(out, "Stack: {} ({})", s.stack.technology_node, s.source);
                    out.push_str(&layer_table(&s.stack, &e.metrics));
                }
                out.push_str(&evaluation_summary(e));
            }
            ReportBody::Compare(c) => out.push_str(&compare_table(c, &self.inputs.stacks)),
            ReportBody::Sweep(s) => out.push_str(&sweep_table(s)),
            ReportBody::Soc(s) => out.push_str(&soc_table(s)),
            ReportBody::Trend(t) => {
                let _ = writeln!(out, "Normalized to {}", t.reference);
                let rows = t
                    .input
                    .points
                    .iter()
                    .zip(&t.normalized.points)
                    .map(|(r, n)| vec![r.node.clone(), sig6(r.value), sig6(n.value)])
                    .collect();
                out.push_str(&Table::new(&["Node", "Value", "Normalized"], rows).render());
            }
        }
        out
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Full-precision number for machine output.
fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn opt6(v: Option<f64>) -> String {
    v.map(sig6).unwrap_or_else(|| "-".into())
}

/// Rounds to 6 significant digits and drops trailing zeros.
pub fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    if !(-5..15).contains(&magnitude) {
        return format!("{v:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub(crate) fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn layer_csv(
    w: &mut csv::Writer<Vec<u8>>,
    stack: Option<&StackSpec>,
    m: &StackMetrics,
) -> Result<()> {
    let mut header = vec![
        "region",
        "layer",
        "pitch_nm",
        "metal_process",
        "via_process",
    ];
    header.extend(StepCounts::LABELS);
    header.extend(["litho_steps", "litho_energy", "pfas_layers"]);
    w.write_record(&header)?;
    for lm in &m.per_layer {
        let spec = stack.and_then(|s| s.layer(&lm.layer));
        let mut row = vec![
            lm.region.to_string(),
            lm.layer.clone(),
            spec.and_then(|l| l.pitch_nm).map(num).unwrap_or_default(),
            spec.and_then(|l| l.metal_process.clone())
                .unwrap_or_default(),
            spec.and_then(|l| l.via_process.clone()).unwrap_or_default(),
        ];
        row.extend(lm.total_steps.as_array().iter().map(u32::to_string));
        row.extend([
            lm.litho_steps.to_string(),
            num(lm.litho_energy),
            lm.pfas_layers.to_string(),
        ]);
        w.write_record(&row)?;
    }
    let mut total = vec![
        "TOTAL".to_string(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
    ];
    total.extend(m.total_steps.as_array().iter().map(u32::to_string));
    total.extend([
        m.total_steps.litho.to_string(),
        num(m.total_litho_energy),
        m.total_pfas_layers.to_string(),
    ]);
    w.write_record(&total)?;
    Ok(())
}

fn compare_rows(c: &ComparisonResult) -> Vec<(String, f64, f64, Option<f64>)> {
    let ratio = |a: f64, b: f64| (b != 0.0).then(|| a / b);
    let mut rows = vec![(
        "total_pfas_layers".to_string(),
        f64::from(c.a.total_pfas_layers),
        f64::from(c.b.total_pfas_layers),
        c.ratio_pfas,
    )];
    for r in Region::ALL {
        rows.push((
            format!("{r}_pfas_layers"),
            f64::from(c.a.region(r)),
            f64::from(c.b.region(r)),
            c.region_ratios.get(&r).copied(),
        ));
    }
    rows.push((
        "euv_masks".into(),
        f64::from(c.a.euv_masks()),
        f64::from(c.b.euv_masks()),
        ratio(f64::from(c.a.euv_masks()), f64::from(c.b.euv_masks())),
    ));
    rows.push((
        "duv_masks".into(),
        f64::from(c.a.duv_masks()),
        f64::from(c.b.duv_masks()),
        ratio(f64::from(c.a.duv_masks()), f64::from(c.b.duv_masks())),
    ));
    rows.push((
        "litho_steps".into(),
        f64::from(c.a.litho_steps()),
        f64::from(c.b.litho_steps()),
        c.ratio_litho_steps,
    ));
    rows.push((
        "total_steps".into(),
        f64::from(c.a.total_steps.total()),
        f64::from(c.b.total_steps.total()),
        c.ratio_total_steps,
    ));
    rows.push((
        "litho_energy".into(),
        c.a.total_litho_energy,
        c.b.total_litho_energy,
        c.ratio_litho_energy,
    ));
    rows
}

fn compare_csv(w: &mut csv::Writer<Vec<u8>>, c: &ComparisonResult) -> Result<()> {
    w.write_record(["metric", "a", "b", "ratio_a_over_b"])?;
    for (name, a, b, r) in compare_rows(c) {
        w.write_record([name, num(a), num(b), opt(r)])?;
    }
    w.write_record([
        "percent_reduction".to_string(),
        String::new(),
        String::new(),
        opt(c.percent_reduction),
    ])?;
    Ok(())
}

fn compare_table(c: &ComparisonResult, stacks: &[StackInput]) -> String {
    let name = |i: usize, fallback: &str| {
        stacks
            .get(i)
            .map(|s| s.stack.technology_node.clone())
            .unwrap_or_else(|| fallback.into())
    };
    let (a, b) = (name(0, "a"), name(1, "b"));
    let rows = compare_rows(c)
        .into_iter()
        .map(|(n, va, vb, r)| vec![n, sig6(va), sig6(vb), opt6(r)])
        .collect();
    let mut out = Table::new(&["Metric", &a, &b, "Ratio"], rows).render();
    let _ = writeln!(
        out,
        "PFAS-containing layers: {b} uses {} fewer than {a}",
        c.percent_reduction
            .map(|p| format!("{}%", sig6(p * 100.0)))
            .unwrap_or_else(|| "-".into())
    );
    out
}

const SWEEP_HEADER: [&str; 13] = [
    "kind",
    "top_routing_layer",
    "total_pfas_layers",
    "routing_beol_pfas",
    "feol_pfas",
    "mol_pfas",
    "beol_pfas",
    "litho_steps",
    "litho_energy",
    "chip_pfas",
    "carbon_kg",
    "carbon_low_kg",
    "carbon_high_kg",
];

fn sweep_row(kind: &str, p: &SweepPoint) -> Vec<String> {
    let m = &p.evaluation.metrics;
    let (c, lo, hi) = carbon_cols(p.evaluation.carbon.as_ref());
    vec![
        kind.to_string(),
        p.top_routing_layer.clone(),
        m.total_pfas_layers.to_string(),
        p.routing_beol_pfas.to_string(),
        m.region(Region::Feol).to_string(),
        m.region(Region::Mol).to_string(),
        m.region(Region::Beol).to_string(),
        m.litho_steps().to_string(),
        num(m.total_litho_energy),
        num(p.evaluation.chip_pfas.value),
        opt(c),
        opt(lo),
        opt(hi),
    ]
}

fn carbon_cols(c: Option<&CarbonResult>) -> (Option<f64>, Option<f64>, Option<f64>) {
    match c {
        None => (None, None, None),
        Some(c) => (
            Some(c.embodied_kg),
            c.band.map(|b| b.low_kg),
            c.band.map(|b| b.high_kg),
        ),
    }
}

fn sweep_csv(w: &mut csv::Writer<Vec<u8>>, s: &SweepResult) -> Result<()> {
    w.write_record(SWEEP_HEADER)?;
    w.write_record(sweep_row("baseline", &s.baseline))?;
    for p in &s.points {
        w.write_record(sweep_row("target", p))?;
    }
    Ok(())
}

fn sweep_table(s: &SweepResult) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "BEOL sweep ({})",
        if s.retain_power_grid {
            "power-grid layers retained"
        } else {
            "routing layers only"
        }
    );
    let row6 = |kind: &str, p: &SweepPoint| {
        let m = &p.evaluation.metrics;
        let (c, lo, hi) = carbon_cols(p.evaluation.carbon.as_ref());
        vec![
            kind.to_string(),
            p.top_routing_layer.clone(),
            m.total_pfas_layers.to_string(),
            p.routing_beol_pfas.to_string(),
            m.region(Region::Beol).to_string(),
            m.litho_steps().to_string(),
            sig6(m.total_litho_energy),
            sig6(p.evaluation.chip_pfas.value),
            opt6(c),
            match (lo, hi) {
                (Some(l), Some(h)) => format!("{} - {}", sig6(l), sig6(h)),
                _ => "-".into(),
            },
        ]
    };
    let mut rows = vec![row6("baseline", &s.baseline)];
    rows.extend(s.points.iter().map(|p| row6("target", p)));
    out.push_str(
        &Table::new(
            &[
                "",
                "Top",
                "# PFAS_litho",
                "Routing BEOL",
                "BEOL",
                "# Litho steps",
                "E_litho",
                "Chip PFAS",
                "Carbon kg",
                "Carbon band kg",
            ],
            rows,
        )
        .render(),
    );
    for p in &s.points {
        let base = f64::from(s.baseline.total_pfas_layers());
        let here = f64::from(p.total_pfas_layers());
        if here > 0.0 {
            let _ = writeln!(
                out,
                "{} -> {}: {}x fewer PFAS-containing layers overall",
                s.baseline.top_routing_layer,
                p.top_routing_layer,
                sig6(base / here)
            );
        }
    }
    for pair in s.points.windows(2) {
        if let Some(r) = s.routing_ratio(&pair[0].top_routing_layer, &pair[1].top_routing_layer) {
            let _ = writeln!(
                out,
                "{} -> {}: {}x fewer routing BEOL PFAS layers",
                pair[0].top_routing_layer,
                pair[1].top_routing_layer,
                sig6(r)
            );
        }
    }
    out
}

fn soc_csv(w: &mut csv::Writer<Vec<u8>>, s: &SocReport) -> Result<()> {
    w.write_record([
        "block",
        "required_top_layer",
        "constrained_top_layer",
        "overhead",
        "baseline_area_cm2",
        "constrained_area_cm2",
    ])?;
    for b in &s.blocks {
        w.write_record([
            b.name.clone(),
            b.required_top_layer.clone(),
            b.constrained_top_layer.clone(),
            num(b.overhead),
            num(b.baseline_area_cm2),
            num(b.constrained_area_cm2),
        ])?;
    }
    w.write_record([
        "TOTAL".to_string(),
        String::new(),
        s.chip_top_layer.clone(),
        num(s.area_increase + 1.0),
        num(s.baseline_area_cm2),
        num(s.constrained_area_cm2),
    ])?;
    Ok(())
}

fn soc_table(s: &SocReport) -> String {
    let rows = s
        .blocks
        .iter()
        .map(|b| {
            vec![
                b.name.clone(),
                b.required_top_layer.clone(),
                b.constrained_top_layer.clone(),
                sig6(b.overhead),
                sig6(b.baseline_area_cm2),
                sig6(b.constrained_area_cm2),
            ]
        })
        .collect();
    let mut out = format!(
        "SoC routed to {} (chip top layer {}, power grid {})\n",
        s.target_top,
        s.chip_top_layer,
        if s.retain_power_grid {
            "retained"
        } else {
            "dropped"
        }
    );
    out.push_str(
        &Table::new(
            &[
                "Block",
                "Required",
                "Constrained",
                "Overhead",
                "Area cm2",
                "New area cm2",
            ],
            rows,
        )
        .render(),
    );
    let _ = writeln!(
        out,
        "Total area: {} -> {} cm2 ({}% increase)",
        sig6(s.baseline_area_cm2),
        sig6(s.constrained_area_cm2),
        sig6(s.area_increase * 100.0)
    );
    let _ = writeln!(
        out,
        "# PFAS_litho: {} -> {} ({}x)",
        s.baseline.metrics.total_pfas_layers,
        s.constrained.metrics.total_pfas_layers,
        opt6(s.pfas_layer_ratio)
    );
    let _ = writeln!(
        out,
        "Chip PFAS: {} -> {} ({}x)",
        sig6(s.baseline.chip_pfas.value),
        sig6(s.constrained.chip_pfas.value),
        opt6(s.chip_pfas_ratio)
    );
    if let (Some(a), Some(b)) = (&s.baseline.carbon, &s.constrained.carbon) {
        let _ = writeln!(
            out,
            "Embodied carbon: {} -> {} kg CO2e",
            sig6(a.embodied_kg),
            sig6(b.embodied_kg)
        );
    }
    out
}

fn layer_table(stack: &StackSpec, m: &StackMetrics) -> String {
    let mut rows: Vec<Vec<String>> = m
        .per_layer
        .iter()
        .map(|lm| {
            let spec = stack.layer(&lm.layer);
            vec![
                lm.region.to_string(),
                lm.layer.clone(),
                spec.and_then(|l| l.pitch_nm)
                    .map(sig6)
                    .unwrap_or_else(|| "-".into()),
                spec.and_then(|l| l.metal_process.clone())
                    .unwrap_or_else(|| "-".into()),
                spec.and_then(|l| l.via_process.clone())
                    .unwrap_or_else(|| "-".into()),
                lm.litho_steps.to_string(),
                sig6(lm.litho_energy),
                lm.pfas_layers.to_string(),
            ]
        })
        .collect();
    rows.push(vec![
        "Total".into(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        m.litho_steps().to_string(),
        sig6(m.total_litho_energy),
        m.total_pfas_layers.to_string(),
    ]);
    Table::new(
        &[
            "Region",
            "Layer",
            "M_pitch",
            "Metal",
            "Via",
            "# Litho steps",
            "E_litho",
            "# PFAS_litho",
        ],
        rows,
    )
    .render()
}

fn evaluation_summary(e: &Evaluation) -> String {
    let m = &e.metrics;
    let mut out = String::new();
    let regions: Vec<String> = m
        .by_region
        .iter()
        .map(|(r, v)| format!("{r} {v}"))
        .collect();
    let exposures: Vec<String> = m
        .by_exposure
        .iter()
        .map(|(x, v)| format!("{x} {v}"))
        .collect();
    let steps: Vec<String> = StepCounts::LABELS
        .iter()
        .zip(m.total_steps.as_array())
        .map(|(l, v)| format!("{l} {v}"))
        .collect();
    let _ = writeln!(out, "PFAS layers by region: {}", regions.join(", "));
    let _ = writeln!(out, "Masks by exposure: {}", exposures.join(", "));
    let _ = writeln!(
        out,
        "Steps: {} (total {})",
        steps.join(", "),
        m.total_steps.total()
    );
    let c = &e.chip_pfas;
    let _ = writeln!(
        out,
        "Chip PFAS: {} layer*cm2 (area {} cm2, yield {})",
        sig6(c.value),
        sig6(c.area_cm2),
        sig6(c.fab_yield)
    );
    if let Some(carbon) = &e.carbon {
        let _ = write!(
            out,
            "Embodied carbon: {} kg CO2e at CI {}",
            sig6(carbon.embodied_kg),
            sig6(carbon.carbon_intensity)
        );
        if let Some(b) = carbon.band {
            let _ = write!(
                out,
                " (band {} - {} kg for CI {} - {})",
                sig6(b.low_kg),
                sig6(b.high_kg),
                sig6(b.ci_low),
                sig6(b.ci_high)
            );
        }
        out.push('\n');
    }
    out
}

/// Plain-text table with left-aligned text and right-aligned numbers.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    pub fn render(&self) -> String {
        let cols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate().take(cols) {
                widths[i] = widths[i].max(cell.chars().count());
            }
        }
        let numeric = |s: &str| !s.is_empty() && s.parse::<f64>().is_ok();
        // a column is numeric when any body cell is; its header aligns right too
        let numeric_col: Vec<bool> = (0..cols)
            .map(|i| {
                self.rows
                    .iter()
                    .any(|r| r.get(i).is_some_and(|c| numeric(c)))
            })
            .collect();
        let line = |cells: &[String], header: bool| {
            let mut s = cells
                .iter()
                .enumerate()
                .take(cols)
                .map(|(i, c)| {
                    let right = if header { numeric_col[i] } else { numeric(c) };
                    if right {
                        format!("{c:>w$}", w = widths[i])
                    } else {
                        format!("{c:<w$}", w = widths[i])
                    }
                })
                .collect::<Vec<_>>()
                .join("  ");
            s.truncate(s.trim_end().len());
            s.push('\n');
            s
        };
        let mut out = line(&self.header, true);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&line(&rule, false));
        for row in &self.rows {
            out.push_str(&line(row, false));
        }
        out
    }
}
