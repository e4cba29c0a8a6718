//! Layer and stack schema (FEOL / MOL / BEOL), built-in presets, validation and
//! per-layer metric derivation.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Rule, Violation};
use crate::process::{
    Catalog, EnergyWeights, ExposureClass, ProcessClass, StepCounts, ARFI_LE, ARFI_LE2, ARFI_SADP,
    ARFI_SAQP, EUV_LE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    #[serde(rename = "FEOL")]
    Feol,
    #[serde(rename = "MOL")]
    Mol,
    #[serde(rename = "BEOL")]
    Beol,
}

impl Region {
    pub const ALL: [Region; 3] = [Region::Feol, Region::Mol, Region::Beol];

    pub fn as_str(self) -> &'static str {
        match self {
            Region::Feol => "FEOL",
            Region::Mol => "MOL",
            Region::Beol => "BEOL",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerTag {
    Routing,
    PowerGrid,
}

/// One fabricated layer: a metal pattern, a via pattern, or both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub name: String,
    pub region: Region,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pitch_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metal_process: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub via_process: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub tags: BTreeSet<LayerTag>,
}

impl LayerSpec {
    pub fn new(name: impl Into<String>, region: Region) -> Self {
        Self {
            name: name.into(),
            region,
            pitch_nm: None,
            metal_process: None,
            via_process: None,
            tags: BTreeSet::new(),
        }
    }

    pub fn pitch(mut self, nm: f64) -> Self {
        self.pitch_nm = Some(nm);
        self
    }

    pub fn metal(mut self, id: &str) -> Self {
        self.metal_process = Some(id.to_string());
        self
    }

    pub fn via(mut self, id: &str) -> Self {
        self.via_process = Some(id.to_string());
        self
    }

    pub fn tag(mut self, tag: LayerTag) -> Self {
        self.tags.insert(tag);
        self
    }

    pub fn is_power_grid(&self) -> bool {
        self.tags.contains(&LayerTag::PowerGrid)
    }

    /// `k` for a BEOL layer named `M<k>` (k >= 1).
    pub fn beol_index(&self) -> Option<u32> {
        if self.region != Region::Beol {
            return None;
        }
        parse_metal_label(&self.name)
    }

    fn process_ids(&self) -> impl Iterator<Item = &str> {
        self.metal_process
            .iter()
            .chain(self.via_process.iter())
            .map(String::as_str)
    }
}

/// Parses `M<k>` with k >= 1.
pub fn parse_metal_label(label: &str) -> Option<u32> {
    let digits = label.strip_prefix('M')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|&k| k >= 1)
}

/// Ordered stack: FEOL first, then MOL, then BEOL bottom-up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackSpec {
    pub technology_node: String,
    pub layers: Vec<LayerSpec>,
}

impl StackSpec {
    pub fn new(technology_node: impl Into<String>, layers: Vec<LayerSpec>) -> Self {
        Self {
            technology_node: technology_node.into(),
            layers,
        }
    }

    pub fn layer(&self, name: &str) -> Option<&LayerSpec> {
        self.layers.iter().find(|l| l.name == name)
    }

    pub fn beol_layers(&self) -> impl Iterator<Item = &LayerSpec> {
        self.layers.iter().filter(|l| l.region == Region::Beol)
    }

    /// Number of BEOL metal layers.
    pub fn metal_layer_count(&self) -> usize {
        self.beol_layers().count()
    }

    /// Highest BEOL index present.
    pub fn top_metal(&self) -> Option<u32> {
        self.beol_layers().filter_map(LayerSpec::beol_index).max()
    }

    /// Highest BEOL index among layers not tagged `power_grid`.
    pub fn top_routing_metal(&self) -> Option<u32> {
        self.beol_layers()
            .filter(|l| !l.is_power_grid())
            .filter_map(LayerSpec::beol_index)
            .max()
    }

    /// Keeps every FEOL/MOL layer and the BEOL layers up to `M<top>`; with
    /// `retain_power_grid`, power-grid layers above `top` are kept as well.
    pub fn truncated(&self, top: u32, retain_power_grid: bool) -> StackSpec {
        let layers = self
            .layers
            .iter()
            .filter(|l| match l.beol_index() {
                None if l.region != Region::Beol => true,
                None => retain_power_grid && l.is_power_grid(),
                Some(k) => k <= top || (retain_power_grid && l.is_power_grid()),
            })
            .cloned()
            .collect();
        StackSpec {
            technology_node: self.technology_node.clone(),
            layers,
        }
    }

    /// FEOL and MOL layers only.
    pub fn front_end(&self) -> StackSpec {
        StackSpec {
            technology_node: self.technology_node.clone(),
            layers: self
                .layers
                .iter()
                .filter(|l| l.region != Region::Beol)
                .cloned()
                .collect(),
        }
    }
}

/// A stack whose every process id resolved against a catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedStack {
    spec: StackSpec,
    resolved: Vec<(Option<ProcessClass>, Option<ProcessClass>)>,
}

impl ValidatedStack {
    pub fn spec(&self) -> &StackSpec {
        &self.spec
    }

    pub fn into_spec(self) -> StackSpec {
        self.spec
    }

    /// (metal, via) process records, one pair per layer.
    pub fn processes(&self) -> &[(Option<ProcessClass>, Option<ProcessClass>)] {
        &self.resolved
    }
}

/// Checks every stack rule and reports all violations at once.
pub fn validate_stack(stack: &StackSpec, catalog: &Catalog) -> Result<ValidatedStack> {
    let mut violations = Vec::new();
    let mut push = |layer: &LayerSpec, rule: Rule, message: String| {
        violations.push(Violation {
            layer: layer.name.clone(),
            rule,
            message,
        })
    };

    let mut seen = HashSet::new();
    let mut prev_region: Option<Region> = None;
    let mut prev_beol: Option<u32> = None;

    for layer in &stack.layers {
        if layer.metal_process.is_none() && layer.via_process.is_none() {
            push(
                layer,
                Rule::MissingProcess,
                "neither metal_process nor via_process is set".into(),
            );
        }
        for id in layer.process_ids() {
            if !catalog.contains(id) {
                push(
                    layer,
                    Rule::UnknownProcess,
                    format!(
                        "unknown process `{id}` (known: {})",
                        catalog.ids().join(", ")
                    ),
                );
            }
        }
        if let Some(p) = layer.pitch_nm {
            if !(p.is_finite() && p > 0.0) {
                push(
                    layer,
                    Rule::InvalidPitch,
                    format!("pitch_nm must be > 0, got {p}"),
                );
            }
        }
        if let Some(prev) = prev_region {
            if layer.region < prev {
                push(
                    layer,
                    Rule::RegionOrder,
                    format!("{} layer follows a {} layer", layer.region, prev),
                );
            }
        }
        prev_region = Some(layer.region);

        let duplicate = !seen.insert(layer.name.as_str());
        if duplicate {
            push(layer, Rule::DuplicateName, "layer name already used".into());
        }
        if layer.region == Region::Beol {
            match layer.beol_index() {
                None => push(
                    layer,
                    Rule::BeolName,
                    "BEOL layers must be named M<k> with k >= 1".into(),
                ),
                Some(k) => {
                    if let Some(prev) = prev_beol.filter(|&p| k <= p && !duplicate) {
                        push(
                            layer,
                            Rule::BeolOrder,
                            format!("M{k} appears after M{prev}"),
                        );
                    }
                    prev_beol = Some(k);
                }
            }
        }
    }

    if !violations.is_empty() {
        return Err(Error::Validation {
            stack: stack.technology_node.clone(),
            violations,
        });
    }

    let resolved = stack
        .layers
        .iter()
        .map(|l| -> Result<_> {
            let metal = l
                .metal_process
                .as_deref()
                .map(|id| catalog.lookup(id))
                .transpose()?;
            let via = l
                .via_process
                .as_deref()
                .map(|id| catalog.lookup(id))
                .transpose()?;
            Ok((metal, via))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ValidatedStack {
        spec: stack.clone(),
        resolved,
    })
}

/// Derived counts for one layer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerMetrics {
    pub layer: String,
    pub region: Region,
    pub litho_steps: u32,
    pub total_steps: StepCounts,
    pub masks: u32,
    pub pfas_layers: u32,
    pub litho_energy: f64,
    pub masks_by_exposure: BTreeMap<ExposureClass, u32>,
}

pub fn derive_layer_metrics(
    layer: &LayerSpec,
    catalog: &Catalog,
    weights: &EnergyWeights,
) -> Result<LayerMetrics> {
    let processes = layer
        .process_ids()
        .map(|id| catalog.lookup(id))
        .collect::<Result<Vec<_>>>()?;
    Ok(metrics_from_processes(layer, processes.iter(), weights))
}

pub(crate) fn metrics_from_processes<'a>(
    layer: &LayerSpec,
    processes: impl Iterator<Item = &'a ProcessClass>,
    weights: &EnergyWeights,
) -> LayerMetrics {
    let mut total_steps = StepCounts::ZERO;
    let mut masks = 0;
    let mut litho_energy = 0.0;
    let mut masks_by_exposure = BTreeMap::new();
    for p in processes {
        total_steps += p.steps;
        masks += p.masks;
        litho_energy += p.mask_energy(weights);
        *masks_by_exposure.entry(p.exposure).or_insert(0) += p.masks;
    }
    LayerMetrics {
        layer: layer.name.clone(),
        region: layer.region,
        litho_steps: total_steps.litho,
        total_steps,
        masks,
        pfas_layers: masks,
        litho_energy,
        masks_by_exposure,
    }
}

pub const ASAP7_NODE: &str = "7nm-ASAP7";

/// The ASAP7 FEOL/MOL/BEOL stack: EUV single exposure for the critical layers
/// and M1-M3, SADP with LE-2 vias for M4-M7, and single-exposure immersion
/// for the M8-M9 power grid. FEOL doping masks are not included.
pub fn asap7_preset() -> StackSpec {
    use LayerTag::{PowerGrid, Routing};
    use Region::{Beol, Feol, Mol};

    let mut layers = vec![
        LayerSpec::new("Fin", Feol).pitch(27.0).metal(ARFI_SAQP),
        LayerSpec::new("Active", Feol).pitch(108.0).metal(EUV_LE),
        LayerSpec::new("Gate", Feol).pitch(54.0).metal(ARFI_SADP),
        LayerSpec::new("SDT", Feol).pitch(54.0).metal(EUV_LE),
        LayerSpec::new("LISD", Mol).pitch(54.0).metal(EUV_LE),
        LayerSpec::new("LIG", Mol).pitch(54.0).metal(EUV_LE),
        LayerSpec::new("VIA0", Mol).pitch(25.0).via(EUV_LE),
    ];
    let beol: [(u32, f64, &str, &str, LayerTag); 9] = [
        (1, 36.0, EUV_LE, EUV_LE, Routing),
        (2, 36.0, EUV_LE, EUV_LE, Routing),
        (3, 36.0, EUV_LE, EUV_LE, Routing),
        (4, 48.0, ARFI_SADP, ARFI_LE2, Routing),
        (5, 48.0, ARFI_SADP, ARFI_LE2, Routing),
        (6, 64.0, ARFI_SADP, ARFI_LE2, Routing),
        (7, 64.0, ARFI_SADP, ARFI_LE2, Routing),
        (8, 80.0, ARFI_LE, ARFI_LE, PowerGrid),
        (9, 80.0, ARFI_LE, ARFI_LE, PowerGrid),
    ];
    layers.extend(beol.iter().map(|&(k, pitch, metal, via, tag)| {
        LayerSpec::new(format!("M{k}"), Beol)
            .pitch(pitch)
            .metal(metal)
            .via(via)
            .tag(tag)
    }));
    StackSpec::new(ASAP7_NODE, layers)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum N7Variant {
    Euv,
    Duv,
}

/// 7 nm comparison stacks. The EUV variant is the ASAP7 preset; the DUV
/// variant is a reconstructed immersion multi-patterning flow that replaces
/// every EUV single exposure with ArFi LE-2, SADP or single LE.
pub fn n7_fixture(variant: N7Variant) -> StackSpec {
    let mut stack = asap7_preset();
    if variant == N7Variant::Euv {
        stack.technology_node = "7nm-EUV".into();
        return stack;
    }
    stack.technology_node = "7nm-DUV".into();
    for layer in &mut stack.layers {
        let (metal, via) = match layer.name.as_str() {
            "Active" | "SDT" | "LISD" => (Some(ARFI_LE2), None),
            "LIG" => (Some(ARFI_LE), None),
            "VIA0" => (None, Some(ARFI_LE2)),
            "M1" | "M2" | "M3" => (Some(ARFI_SADP), Some(ARFI_LE2)),
            _ => continue,
        };
        if let Some(m) = metal {
            layer.metal_process = Some(m.into());
        }
        if let Some(v) = via {
            layer.via_process = Some(v.into());
        }
    }
    stack
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 3] = ["asap7", "n7-euv", "n7-duv"];

pub fn preset(name: &str) -> Result<StackSpec> {
    match name.to_ascii_lowercase().as_str() {
        "asap7" => Ok(asap7_preset()),
        "n7-euv" | "n7_euv" => Ok(n7_fixture(N7Variant::Euv)),
        "n7-duv" | "n7_duv" => Ok(n7_fixture(N7Variant::Duv)),
        _ => Err(Error::UnknownPreset(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metrics(name: &str) -> LayerMetrics {
        let stack = asap7_preset();
        derive_layer_metrics(
            stack.layer(name).unwrap(),
            &Catalog::new(),
            &EnergyWeights::default(),
        )
        .unwrap()
    }

    #[test]
    fn preset_shape() {
        let s = asap7_preset();
        assert_eq!(s.layers.len(), 16);
        assert_eq!(s.metal_layer_count(), 9);
        let m5 = s.layer("M5").unwrap();
        assert_eq!(m5.metal_process.as_deref(), Some(ARFI_SADP));
        assert_eq!(m5.via_process.as_deref(), Some(ARFI_LE2));
        assert_eq!(m5.pitch_nm, Some(48.0));
        let via0 = s.layer("VIA0").unwrap();
        assert_eq!(via0.metal_process, None);
        assert_eq!(via0.pitch_nm, Some(25.0));
        assert!(s.layer("M8").unwrap().is_power_grid());
        assert!(!s.layer("M7").unwrap().is_power_grid());
        assert!(validate_stack(&s, &Catalog::new()).is_ok());
    }

    #[test]
    fn layer_rows() {
        let m1 = metrics("M1");
        assert_eq!(
            (m1.litho_steps, m1.litho_energy, m1.pfas_layers),
            (6, 20.0, 2)
        );
        let m4 = metrics("M4");
        assert_eq!(
            (m4.litho_steps, m4.litho_energy, m4.pfas_layers),
            (9, 3.0, 3)
        );
        let fin = metrics("Fin");
        assert_eq!(
            (fin.litho_steps, fin.litho_energy, fin.pfas_layers),
            (2, 1.0, 1)
        );
    }

    #[test]
    fn pitch_does_not_change_counts() {
        let cat = Catalog::new();
        let w = EnergyWeights::default();
        let a = LayerSpec::new("M4", Region::Beol)
            .pitch(48.0)
            .metal(ARFI_SADP)
            .via(ARFI_LE2);
        let b = a.clone().pitch(960.0);
        let (ma, mb) = (
            derive_layer_metrics(&a, &cat, &w).unwrap(),
            derive_layer_metrics(&b, &cat, &w).unwrap(),
        );
        assert_eq!(ma, mb);
    }

    fn violations(stack: &StackSpec) -> Vec<Violation> {
        match validate_stack(stack, &Catalog::new()) {
            Err(Error::Validation { violations, .. }) => violations,
            Err(e) => panic!("unexpected error {e}"),
            Ok(_) => vec![],
        }
    }

    #[test]
    fn beol_out_of_order() {
        let mut s = asap7_preset();
        s.layers.swap(7, 8); // M2 before M1
        let v = violations(&s);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::BeolOrder);
        assert_eq!(v[0].layer, "M1");
    }

    #[test]
    fn unknown_process_names_layer() {
        let mut s = asap7_preset();
        s.layers[9].metal_process = Some("ArFi_LE9".into());
        let v = violations(&s);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::UnknownProcess);
        assert_eq!(v[0].layer, "M3");
        assert!(v[0].message.contains("ArFi_LE9"));
    }

    #[test]
    fn single_field_mutations_give_one_violation() {
        type Mutation = fn(&mut StackSpec);
        let cases: Vec<(Mutation, Rule)> = vec![
            (|s| s.layers[6].via_process = None, Rule::MissingProcess),
            (
                |s| s.layers[3].metal_process = Some("nope".into()),
                Rule::UnknownProcess,
            ),
            (|s| s.layers[12].pitch_nm = Some(0.0), Rule::InvalidPitch),
            (|s| s.layers[12].name = "M1".into(), Rule::DuplicateName),
            (|s| s.layers[12].name = "Metal6".into(), Rule::BeolName),
            (|s| s.layers[6].region = Region::Feol, Rule::RegionOrder),
            (|s| s.layers[10].name = "M12".into(), Rule::BeolOrder),
        ];
        for (i, (mutate, rule)) in cases.into_iter().enumerate() {
            let mut s = asap7_preset();
            mutate(&mut s);
            let rules: Vec<Rule> = violations(&s).iter().map(|v| v.rule).collect();
            assert_eq!(rules, vec![rule], "case {i}");
        }
    }

    #[test]
    fn collects_all_violations() {
        let mut s = asap7_preset();
        s.layers[0].metal_process = None;
        s.layers[9].via_process = Some("bogus".into());
        s.layers[15].name = "M8".into();
        assert_eq!(violations(&s).len(), 3);
    }

    #[test]
    fn duv_fixture_substitutions() {
        let duv = n7_fixture(N7Variant::Duv);
        assert_eq!(
            duv.layer("Active").unwrap().metal_process.as_deref(),
            Some(ARFI_LE2)
        );
        assert_eq!(
            duv.layer("LIG").unwrap().metal_process.as_deref(),
            Some(ARFI_LE)
        );
        assert_eq!(
            duv.layer("VIA0").unwrap().via_process.as_deref(),
            Some(ARFI_LE2)
        );
        assert_eq!(
            duv.layer("M2").unwrap().metal_process.as_deref(),
            Some(ARFI_SADP)
        );
        let cat = Catalog::new();
        let w = EnergyWeights::default();
        for l in &duv.layers {
            let m = derive_layer_metrics(l, &cat, &w).unwrap();
            assert!(
                !m.masks_by_exposure.contains_key(&ExposureClass::Euv),
                "{}",
                l.name
            );
        }
        assert_eq!(n7_fixture(N7Variant::Euv).layers, asap7_preset().layers);
    }

    #[test]
    fn truncation() {
        let s = asap7_preset();
        let t = s.truncated(3, true);
        let names: Vec<_> = t.beol_layers().map(|l| l.name.as_str()).collect();
        assert_eq!(names, ["M1", "M2", "M3", "M8", "M9"]);
        let t = s.truncated(5, false);
        assert_eq!(t.top_metal(), Some(5));
        assert_eq!(t.layers.len(), 12);
        assert_eq!(s.truncated(9, false), s);
        assert_eq!(s.top_routing_metal(), Some(7));
    }

    #[test]
    fn metal_labels() {
        assert_eq!(parse_metal_label("M1"), Some(1));
        assert_eq!(parse_metal_label("M12"), Some(12));
        assert_eq!(parse_metal_label("M0"), None);
        assert_eq!(parse_metal_label("M"), None);
        assert_eq!(parse_metal_label("m3"), None);
        assert_eq!(parse_metal_label("M+3"), None);
    }

    #[test]
    fn presets_by_name() {
        for name in PRESET_NAMES {
            assert!(preset(name).is_ok());
        }
        assert!(matches!(preset("n3"), Err(Error::UnknownPreset(_))));
    }
}
