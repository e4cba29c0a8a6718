//! Stack-level PFAS aggregation and chip-level scaling.
//!
//! The wafer-level proxy is the number of lithography masks: every mask is one
//! application of photoresist and its anti-reflective and top coats. The chip
//! level value scales that count by die area over fab yield, so the unit is
//! PFAS-containing layer times cm². It is a comparative proxy, not a mass.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::{Catalog, EnergyWeights, ExposureClass, StepCounts};
use crate::stack::{derive_layer_metrics, LayerMetrics, Region, StackSpec};

/// Unit label attached to [`ChipPfas::value`].
pub const CHIP_PFAS_UNIT: &str = "pfas_layer_cm2";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StackMetrics {
    pub technology_node: String,
    pub total_pfas_layers: u32,
    pub by_region: BTreeMap<Region, u32>,
    pub by_exposure: BTreeMap<ExposureClass, u32>,
    pub total_steps: StepCounts,
    pub total_litho_energy: f64,
    pub per_layer: Vec<LayerMetrics>,
}

impl StackMetrics {
    pub fn empty(technology_node: impl Into<String>) -> Self {
        Self {
            technology_node: technology_node.into(),
            total_pfas_layers: 0,
            by_region: Region::ALL.iter().map(|&r| (r, 0)).collect(),
            by_exposure: ExposureClass::ALL.iter().map(|&e| (e, 0)).collect(),
            total_steps: StepCounts::ZERO,
            total_litho_energy: 0.0,
            per_layer: Vec::new(),
        }
    }

    /// Appends one layer and folds it into every total.
    pub fn push(&mut self, layer: LayerMetrics) {
        self.total_pfas_layers += layer.pfas_layers;
        *self.by_region.entry(layer.region).or_insert(0) += layer.pfas_layers;
        for (&exposure, &masks) in &layer.masks_by_exposure {
            *self.by_exposure.entry(exposure).or_insert(0) += masks;
        }
        self.total_steps += layer.total_steps;
        self.total_litho_energy += layer.litho_energy;
        self.per_layer.push(layer);
    }

    pub fn region(&self, region: Region) -> u32 {
        self.by_region.get(&region).copied().unwrap_or(0)
    }

    pub fn euv_masks(&self) -> u32 {
        self.by_exposure
            .get(&ExposureClass::Euv)
            .copied()
            .unwrap_or(0)
    }

    pub fn duv_masks(&self) -> u32 {
        self.by_exposure
            .iter()
            .filter(|(e, _)| !e.is_euv())
            .map(|(_, &m)| m)
            .sum()
    }

    pub fn litho_steps(&self) -> u32 {
        self.total_steps.litho
    }

    pub fn layer(&self, name: &str) -> Option<&LayerMetrics> {
        self.per_layer.iter().find(|l| l.layer == name)
    }
}

/// Aggregates per-layer metrics in stack order.
pub fn stack_metrics(
    stack: &StackSpec,
    catalog: &Catalog,
    weights: &EnergyWeights,
) -> Result<StackMetrics> {
    let mut out = StackMetrics::empty(stack.technology_node.clone());
    for layer in &stack.layers {
        out.push(derive_layer_metrics(layer, catalog, weights)?);
    }
    Ok(out)
}

/// Category-wise step sums over every layer's metal and via process.
pub fn step_totals(stack: &StackSpec, catalog: &Catalog) -> Result<StepCounts> {
    stack
        .layers
        .iter()
        .flat_map(|l| l.metal_process.iter().chain(l.via_process.iter()))
        .map(|id| catalog.lookup(id).map(|p| p.steps))
        .sum()
}

/// Die area and fab yield for one design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignParams {
    pub area_cm2: f64,
    #[serde(rename = "yield")]
    pub fab_yield: f64,
}

impl DesignParams {
    pub fn new(area_cm2: f64, fab_yield: f64) -> Result<Self> {
        let d = Self {
            area_cm2,
            fab_yield,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.area_cm2.is_finite() && self.area_cm2 > 0.0) {
            return Err(Error::domain(
                "area_cm2",
                format!("die area must be > 0 cm², got {}", self.area_cm2),
            ));
        }
        if !(self.fab_yield > 0.0 && self.fab_yield <= 1.0) {
            return Err(Error::domain(
                "yield",
                format!("fab yield must be in (0, 1], got {}", self.fab_yield),
            ));
        }
        Ok(())
    }

    /// Area charged per good die: area / yield.
    pub fn effective_area(&self) -> f64 {
        self.area_cm2 / self.fab_yield
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChipPfas {
    pub value: f64,
    pub unit: &'static str,
    pub technology_node: String,
    pub total_pfas_layers: u32,
    pub area_cm2: f64,
    #[serde(rename = "yield")]
    pub fab_yield: f64,
}

/// `total_pfas_layers × area / yield`.
pub fn chip_pfas(metrics: &StackMetrics, design: &DesignParams) -> Result<ChipPfas> {
    design.validate()?;
    Ok(ChipPfas {
        value: f64::from(metrics.total_pfas_layers) * design.area_cm2 / design.fab_yield,
        unit: CHIP_PFAS_UNIT,
        technology_node: metrics.technology_node.clone(),
        total_pfas_layers: metrics.total_pfas_layers,
        area_cm2: design.area_cm2,
        fab_yield: design.fab_yield,
    })
}
