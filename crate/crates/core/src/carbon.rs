//! Parameterized embodied-carbon estimate.
//!
//! Per good cm² of silicon the fab pays electricity for lithography (the only
//! stack-sensitive term) plus a flat per-area energy, direct process-gas
//! emissions and materials procurement:
//!
//! ```text
//! kg CO2e = area / yield × (CI × (e_litho × E_litho + e_base) + gas + material)
//! ```
//!
//! No constants are built in. Every parameter comes from the caller.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pfas::{DesignParams, StackMetrics};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarbonParams {
    /// kg CO2e per kWh of fab electricity.
    pub carbon_intensity: f64,
    /// kWh per unit of relative litho energy, per cm².
    pub energy_per_unit_litho: f64,
    /// kWh per cm² for everything other than lithography.
    pub energy_per_area_base: f64,
    /// kg CO2e per cm² of direct gas emissions.
    pub gas_per_area: f64,
    /// kg CO2e per cm² of procured materials.
    pub material_per_area: f64,
}

impl CarbonParams {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("carbon_intensity", self.carbon_intensity),
            ("energy_per_unit_litho", self.energy_per_unit_litho),
            ("energy_per_area_base", self.energy_per_area_base),
            ("gas_per_area", self.gas_per_area),
            ("material_per_area", self.material_per_area),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::domain(
                    field,
                    format!("must be finite and >= 0, got {v}"),
                ));
            }
        }
        Ok(())
    }

    pub fn with_intensity(self, carbon_intensity: f64) -> Self {
        Self {
            carbon_intensity,
            ..self
        }
    }

    /// kg CO2e per cm² before area/yield scaling.
    fn per_area(&self, litho_energy: f64) -> f64 {
        self.carbon_intensity
            * (self.energy_per_unit_litho * litho_energy + self.energy_per_area_base)
            + self.gas_per_area
            + self.material_per_area
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarbonBand {
    pub ci_low: f64,
    pub ci_high: f64,
    pub low_kg: f64,
    pub high_kg: f64,
}

impl CarbonBand {
    pub fn width(&self) -> f64 {
        self.high_kg - self.low_kg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarbonResult {
    pub embodied_kg: f64,
    pub carbon_intensity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band: Option<CarbonBand>,
}

pub fn embodied_carbon(
    metrics: &StackMetrics,
    design: &DesignParams,
    params: &CarbonParams,
) -> Result<CarbonResult> {
    design.validate()?;
    params.validate()?;
    Ok(CarbonResult {
        embodied_kg: design.effective_area() * params.per_area(metrics.total_litho_energy),
        carbon_intensity: params.carbon_intensity,
        band: None,
    })
}

/// Evaluates [`embodied_carbon`] at `params.carbon_intensity` and at both ends
/// of `[ci_low, ci_high]`.
pub fn carbon_band(
    metrics: &StackMetrics,
    design: &DesignParams,
    params: &CarbonParams,
    ci_low: f64,
    ci_high: f64,
) -> Result<CarbonResult> {
    if ci_low > ci_high {
        return Err(Error::InvertedRange {
            low: ci_low,
            high: ci_high,
        });
    }
    let mut result = embodied_carbon(metrics, design, params)?;
    let low = embodied_carbon(metrics, design, &params.with_intensity(ci_low))?;
    let high = embodied_carbon(metrics, design, &params.with_intensity(ci_high))?;
    result.band = Some(CarbonBand {
        ci_low,
        ci_high,
        low_kg: low.embodied_kg,
        high_kg: high.embodied_kg,
    });
    Ok(result)
}
