//! Trade-off scenarios: stack comparison, BEOL layer-reduction sweeps, SoC
//! composition under a routing-layer limit, and cross-node trend normalization.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::carbon::{carbon_band, embodied_carbon, CarbonParams, CarbonResult};
use crate::error::{Error, Result};
use crate::pfas::{chip_pfas, stack_metrics, ChipPfas, DesignParams, StackMetrics};
use crate::process::{Catalog, EnergyWeights};
use crate::stack::{parse_metal_label, validate_stack, Region, StackSpec};

/// Carbon parameters plus an optional carbon-intensity range to band over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarbonSettings {
    pub params: CarbonParams,
    pub band: Option<(f64, f64)>,
}

/// Everything needed to turn a stack into metrics, chip PFAS and carbon.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    pub catalog: &'a Catalog,
    pub weights: EnergyWeights,
    pub design: DesignParams,
    pub carbon: Option<CarbonSettings>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub metrics: StackMetrics,
    pub chip_pfas: ChipPfas,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carbon: Option<CarbonResult>,
}

impl<'a> Evaluator<'a> {
    pub fn new(catalog: &'a Catalog, design: DesignParams) -> Self {
        Self {
            catalog,
            weights: EnergyWeights::default(),
            design,
            carbon: None,
        }
    }

    pub fn with_weights(mut self, weights: EnergyWeights) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_carbon(mut self, carbon: CarbonSettings) -> Self {
        self.carbon = Some(carbon);
        self
    }

    pub fn metrics(&self, stack: &StackSpec) -> Result<StackMetrics> {
        validate_stack(stack, self.catalog)?;
        stack_metrics(stack, self.catalog, &self.weights)
    }

    pub fn evaluate(&self, stack: &StackSpec) -> Result<Evaluation> {
        self.evaluate_with(stack, &self.design)
    }

    fn evaluate_with(&self, stack: &StackSpec, design: &DesignParams) -> Result<Evaluation> {
        let metrics = self.metrics(stack)?;
        let chip_pfas = chip_pfas(&metrics, design)?;
        let carbon = self
            .carbon
            .map(|c| match c.band {
                Some((lo, hi)) => carbon_band(&metrics, design, &c.params, lo, hi),
                None => embodied_carbon(&metrics, design, &c.params),
            })
            .transpose()?;
        Ok(Evaluation {
            metrics,
            chip_pfas,
            carbon,
        })
    }
}

fn ratio(a: f64, b: f64) -> Option<f64> {
    (b != 0.0).then(|| a / b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonResult {
    pub a: StackMetrics,
    pub b: StackMetrics,
    /// pfas(a) / pfas(b); absent when b has no PFAS-containing layers.
    pub ratio_pfas: Option<f64>,
    /// (pfas(a) - pfas(b)) / pfas(a); absent when a has none.
    pub percent_reduction: Option<f64>,
    /// Only regions where b is non-zero.
    pub region_ratios: BTreeMap<Region, f64>,
    pub ratio_litho_steps: Option<f64>,
    pub ratio_total_steps: Option<f64>,
    pub ratio_litho_energy: Option<f64>,
}

pub fn compare_stacks(
    a: &StackSpec,
    b: &StackSpec,
    catalog: &Catalog,
    weights: &EnergyWeights,
) -> Result<ComparisonResult> {
    validate_stack(a, catalog)?;
    validate_stack(b, catalog)?;
    let a = stack_metrics(a, catalog, weights)?;
    let b = stack_metrics(b, catalog, weights)?;
    Ok(compare_metrics(a, b))
}

pub fn compare_metrics(a: StackMetrics, b: StackMetrics) -> ComparisonResult {
    let pa = f64::from(a.total_pfas_layers);
    let pb = f64::from(b.total_pfas_layers);
    let region_ratios = Region::ALL
        .iter()
        .filter_map(|&r| ratio(f64::from(a.region(r)), f64::from(b.region(r))).map(|v| (r, v)))
        .collect();
    ComparisonResult {
        ratio_pfas: ratio(pa, pb),
        percent_reduction: ratio(pa - pb, pa),
        region_ratios,
        ratio_litho_steps: ratio(f64::from(a.litho_steps()), f64::from(b.litho_steps())),
        ratio_total_steps: ratio(
            f64::from(a.total_steps.total()),
            f64::from(b.total_steps.total()),
        ),
        ratio_litho_energy: ratio(a.total_litho_energy, b.total_litho_energy),
        a,
        b,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub top_routing_layer: String,
    /// Layer names of the stack variant, bottom-up.
    pub layers: Vec<String>,
    /// PFAS layers in BEOL layers not tagged `power_grid`.
    pub routing_beol_pfas: u32,
    #[serde(flatten)]
    pub evaluation: Evaluation,
    #[serde(skip)]
    pub variant: StackSpec,
}

impl SweepPoint {
    pub fn total_pfas_layers(&self) -> u32 {
        self.evaluation.metrics.total_pfas_layers
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub retain_power_grid: bool,
    pub baseline: SweepPoint,
    /// Descending by target layer.
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn point(&self, label: &str) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.top_routing_layer == label)
    }

    pub fn routing_series(&self) -> Vec<u32> {
        self.points.iter().map(|p| p.routing_beol_pfas).collect()
    }

    /// routing PFAS of `from` over routing PFAS of `to`.
    pub fn routing_ratio(&self, from: &str, to: &str) -> Option<f64> {
        let (f, t) = (self.point(from)?, self.point(to)?);
        ratio(
            f64::from(f.routing_beol_pfas),
            f64::from(t.routing_beol_pfas),
        )
    }

    /// Baseline total PFAS layers over the total at `label`.
    pub fn overall_ratio(&self, label: &str) -> Option<f64> {
        let p = self.point(label)?;
        ratio(
            f64::from(self.baseline.total_pfas_layers()),
            f64::from(p.total_pfas_layers()),
        )
    }
}

fn routing_beol_pfas(stack: &StackSpec, metrics: &StackMetrics) -> u32 {
    stack
        .layers
        .iter()
        .zip(&metrics.per_layer)
        .filter(|(l, _)| l.region == Region::Beol && !l.is_power_grid())
        .map(|(_, m)| m.pfas_layers)
        .sum()
}

fn sweep_point(
    eval: &Evaluator<'_>,
    label: String,
    variant: StackSpec,
    design: &DesignParams,
) -> Result<SweepPoint> {
    let evaluation = eval.evaluate_with(&variant, design)?;
    Ok(SweepPoint {
        top_routing_layer: label,
        layers: variant.layers.iter().map(|l| l.name.clone()).collect(),
        routing_beol_pfas: routing_beol_pfas(&variant, &evaluation.metrics),
        evaluation,
        variant,
    })
}

/// Resolves a target label to a BEOL index that exists in `stack`.
fn beol_target(stack: &StackSpec, target: &str) -> Result<u32> {
    let unknown = || Error::UnknownTarget {
        target: target.to_string(),
        available: stack
            .beol_layers()
            .map(|l| l.name.as_str())
            .collect::<Vec<_>>()
            .join(", "),
    };
    let k = parse_metal_label(target.trim()).ok_or_else(unknown)?;
    if stack.beol_layers().any(|l| l.beol_index() == Some(k)) {
        Ok(k)
    } else {
        Err(unknown())
    }
}

/// One sweep point per target (deduplicated, highest layer first), plus the
/// unmodified stack as baseline.
pub fn sweep_beol<S: AsRef<str>>(
    stack: &StackSpec,
    targets: &[S],
    retain_power_grid: bool,
    eval: &Evaluator<'_>,
) -> Result<SweepResult> {
    validate_stack(stack, eval.catalog)?;
    let mut tops = targets
        .iter()
        .map(|t| beol_target(stack, t.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    tops.sort_unstable_by(|a, b| b.cmp(a));
    tops.dedup();

    let baseline_label = stack
        .top_metal()
        .map(|k| format!("M{k}"))
        .unwrap_or_default();
    let baseline = sweep_point(eval, baseline_label, stack.clone(), &eval.design)?;
    let points = tops
        .into_iter()
        .map(|k| {
            sweep_point(
                eval,
                format!("M{k}"),
                stack.truncated(k, retain_power_grid),
                &eval.design,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        retain_power_grid,
        baseline,
        points,
    })
}

/// A block of an SoC floorplan and its area cost of routing below its natural
/// top layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocBlock {
    pub name: String,
    pub baseline_area_cm2: f64,
    pub required_top_layer: String,
    /// Target layer label to multiplicative area factor (>= 1).
    #[serde(default)]
    pub area_overhead: BTreeMap<String, f64>,
}

impl SocBlock {
    fn validate(&self) -> Result<u32> {
        if !(self.baseline_area_cm2.is_finite() && self.baseline_area_cm2 > 0.0) {
            return Err(Error::domain(
                &format!("blocks.{}.baseline_area_cm2", self.name),
                format!("must be > 0, got {}", self.baseline_area_cm2),
            ));
        }
        for (layer, &f) in &self.area_overhead {
            if !(f.is_finite() && f >= 1.0) {
                return Err(Error::domain(
                    &format!("blocks.{}.area_overhead.{layer}", self.name),
                    format!("overhead factor must be >= 1, got {f}"),
                ));
            }
        }
        parse_metal_label(&self.required_top_layer).ok_or_else(|| {
            Error::domain(
                &format!("blocks.{}.required_top_layer", self.name),
                format!("expected M<k>, got `{}`", self.required_top_layer),
            )
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockOutcome {
    pub name: String,
    pub required_top_layer: String,
    pub constrained_top_layer: String,
    pub overhead: f64,
    pub baseline_area_cm2: f64,
    pub constrained_area_cm2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SocReport {
    pub target_top: String,
    pub retain_power_grid: bool,
    /// Highest routing layer any block still needs after the constraint.
    pub chip_top_layer: String,
    pub blocks: Vec<BlockOutcome>,
    pub baseline_area_cm2: f64,
    pub constrained_area_cm2: f64,
    /// Relative growth of total SoC area.
    pub area_increase: f64,
    pub baseline: Evaluation,
    pub constrained: Evaluation,
    /// Baseline PFAS layers over constrained PFAS layers.
    pub pfas_layer_ratio: Option<f64>,
    /// Baseline chip PFAS over constrained chip PFAS (includes area overhead).
    pub chip_pfas_ratio: Option<f64>,
}

/// Routes every block at most up to `target_top`. The whole die shares one
/// mask set, so the chip keeps the highest layer any block still uses.
/// Die area is the sum of block areas; yield comes from the evaluator.
pub fn compose_soc(
    blocks: &[SocBlock],
    chip_stack: &StackSpec,
    target_top: &str,
    retain_power_grid: bool,
    eval: &Evaluator<'_>,
) -> Result<SocReport> {
    if blocks.is_empty() {
        return Err(Error::domain(
            "blocks",
            "at least one SoC block is required",
        ));
    }
    validate_stack(chip_stack, eval.catalog)?;
    let target = beol_target(chip_stack, target_top)?;

    let mut outcomes = Vec::with_capacity(blocks.len());
    let mut chip_top = 0;
    for block in blocks {
        let required = block.validate()?;
        let constrained = required.min(target);
        let overhead = if required > target {
            *block
                .area_overhead
                .get(&format!("M{target}"))
                .ok_or_else(|| Error::MissingOverhead {
                    block: block.name.clone(),
                    required: block.required_top_layer.clone(),
                    target: format!("M{target}"),
                })?
        } else {
            1.0
        };
        chip_top = chip_top.max(constrained);
        outcomes.push(BlockOutcome {
            name: block.name.clone(),
            required_top_layer: block.required_top_layer.clone(),
            constrained_top_layer: format!("M{constrained}"),
            overhead,
            baseline_area_cm2: block.baseline_area_cm2,
            constrained_area_cm2: block.baseline_area_cm2 * overhead,
        });
    }

    let baseline_area: f64 = outcomes.iter().map(|b| b.baseline_area_cm2).sum();
    let constrained_area: f64 = outcomes.iter().map(|b| b.constrained_area_cm2).sum();
    let base_design = DesignParams::new(baseline_area, eval.design.fab_yield)?;
    let new_design = DesignParams::new(constrained_area, eval.design.fab_yield)?;

    let baseline = eval.evaluate_with(chip_stack, &base_design)?;
    let constrained = eval.evaluate_with(
        &chip_stack.truncated(chip_top, retain_power_grid),
        &new_design,
    )?;

    Ok(SocReport {
        target_top: format!("M{target}"),
        retain_power_grid,
        chip_top_layer: format!("M{chip_top}"),
        area_increase: constrained_area / baseline_area - 1.0,
        baseline_area_cm2: baseline_area,
        constrained_area_cm2: constrained_area,
        pfas_layer_ratio: ratio(
            f64::from(baseline.metrics.total_pfas_layers),
            f64::from(constrained.metrics.total_pfas_layers),
        ),
        chip_pfas_ratio: ratio(baseline.chip_pfas.value, constrained.chip_pfas.value),
        blocks: outcomes,
        baseline,
        constrained,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub node: String,
    pub value: f64,
}

/// Values per technology node, in caller order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSeries {
    /// Node the values are normalized to, once normalized.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    pub points: Vec<TrendPoint>,
}

impl TrendSeries {
    pub fn new(points: impl IntoIterator<Item = (String, f64)>) -> Self {
        Self {
            reference: None,
            points: points
                .into_iter()
                .map(|(node, value)| TrendPoint { node, value })
                .collect(),
        }
    }

    pub fn value(&self, node: &str) -> Option<f64> {
        self.points.iter().find(|p| p.node == node).map(|p| p.value)
    }
}

/// Divides every value by the value at `reference`.
pub fn normalize_trend(series: &TrendSeries, reference: &str) -> Result<TrendSeries> {
    let base = series
        .value(reference)
        .ok_or_else(|| Error::MissingReference(reference.to_string()))?;
    if base == 0.0 {
        return Err(Error::ZeroReference(reference.to_string()));
    }
    Ok(TrendSeries {
        reference: Some(reference.to_string()),
        points: series
            .points
            .iter()
            .map(|p| TrendPoint {
                node: p.node.clone(),
                value: p.value / base,
            })
            .collect(),
    })
}
