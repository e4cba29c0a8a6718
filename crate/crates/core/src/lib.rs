//! Design-time model of PFAS-containing lithography layers for IC metal stacks.
//!
//! The number of lithography masks is used as the PFAS proxy: each mask is a
//! coat of photoresist plus anti-reflective and top coats. From a stack of
//! FEOL/MOL/BEOL layers and the patterning process of each metal and via, the
//! crate derives mask counts, fabrication step counts, relative lithography
//! energy, chip-level PFAS (scaled by area and yield) and a parameterized
//! embodied-carbon estimate, and runs trade-off scenarios on top.
//!
//! ```
//! use pfas_core::{asap7_preset, stack_metrics, Catalog, EnergyWeights};
//!
//! let m = stack_metrics(&asap7_preset(), &Catalog::new(), &EnergyWeights::default()).unwrap();
//! assert_eq!(m.total_pfas_layers, 29);
//! ```

pub mod carbon;
pub mod cli;
pub mod config;
pub mod error;
pub mod pfas;
pub mod process;
pub mod report;
pub mod scenario;
pub mod stack;

pub use carbon::{carbon_band, embodied_carbon, CarbonBand, CarbonParams, CarbonResult};
pub use error::{ConfigIssue, Error, Result, Rule, Violation};
pub use pfas::{chip_pfas, stack_metrics, step_totals, ChipPfas, DesignParams, StackMetrics};
pub use process::{
    lookup_process, mask_energy, Catalog, EnergyWeights, ExposureClass, ProcessClass, StepCounts,
};
pub use scenario::{
    compare_stacks, compose_soc, normalize_trend, sweep_beol, CarbonSettings, ComparisonResult,
    Evaluation, Evaluator, SocBlock, SocReport, SweepPoint, SweepResult, TrendPoint, TrendSeries,
};
pub use stack::{
    asap7_preset, derive_layer_metrics, n7_fixture, preset, validate_stack, LayerMetrics,
    LayerSpec, LayerTag, N7Variant, Region, StackSpec, ValidatedStack,
};
