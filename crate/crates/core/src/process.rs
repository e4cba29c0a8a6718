//! Patterning process classes and their per-category fabrication step counts.
//!
//! The nine built-in classes cover single exposure, litho-etch multi-patterning
//! (LE-N), and the spacer-based SADP / SAQP flows for dry ArF, immersion ArF and
//! EUV lithography. A [`Catalog`] resolves a process id to its record; user
//! registered processes live only in the catalog instance that registered them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Step counts per fabrication category for one patterning pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StepCounts {
    pub dry_etch: u32,
    pub litho: u32,
    pub metallization: u32,
    pub metrology: u32,
    pub wet_etch: u32,
    pub deposition: u32,
}

impl StepCounts {
    pub const ZERO: StepCounts = StepCounts::new(0, 0, 0, 0, 0, 0);

    /// Arguments follow the column order DryEtch, Litho, Metal, Metr, WetEtch, Dep.
    pub const fn new(
        dry_etch: u32,
        litho: u32,
        metallization: u32,
        metrology: u32,
        wet_etch: u32,
        deposition: u32,
    ) -> Self {
        Self {
            dry_etch,
            litho,
            metallization,
            metrology,
            wet_etch,
            deposition,
        }
    }

    pub fn total(&self) -> u32 {
        self.as_array().iter().sum()
    }

    pub fn as_array(&self) -> [u32; 6] {
        [
            self.dry_etch,
            self.litho,
            self.metallization,
            self.metrology,
            self.wet_etch,
            self.deposition,
        ]
    }

    /// Column labels matching [`StepCounts::as_array`].
    pub const LABELS: [&'static str; 6] = [
        "dry_etch",
        "litho",
        "metallization",
        "metrology",
        "wet_etch",
        "deposition",
    ];
}

impl Add for StepCounts {
    type Output = StepCounts;

    fn add(self, rhs: StepCounts) -> StepCounts {
        StepCounts {
            dry_etch: self.dry_etch + rhs.dry_etch,
            litho: self.litho + rhs.litho,
            metallization: self.metallization + rhs.metallization,
            metrology: self.metrology + rhs.metrology,
            wet_etch: self.wet_etch + rhs.wet_etch,
            deposition: self.deposition + rhs.deposition,
        }
    }
}

impl AddAssign for StepCounts {
    fn add_assign(&mut self, rhs: StepCounts) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for StepCounts {
    fn sum<I: Iterator<Item = StepCounts>>(iter: I) -> StepCounts {
        iter.fold(StepCounts::ZERO, Add::add)
    }
}

/// Light source of the exposure tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExposureClass {
    /// Dry 193 nm (ArF).
    DuvDry,
    /// Immersion 193 nm (ArFi).
    DuvImmersion,
    /// 13.5 nm.
    Euv,
}

impl ExposureClass {
    pub const ALL: [ExposureClass; 3] = [Self::DuvDry, Self::DuvImmersion, Self::Euv];

    pub fn is_euv(self) -> bool {
        matches!(self, Self::Euv)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::DuvDry => "DUV_DRY",
            Self::DuvImmersion => "DUV_IMMERSION",
            Self::Euv => "EUV",
        }
    }
}

impl fmt::Display for ExposureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One patterning process: step counts, masks, and exposure class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessClass {
    pub id: String,
    pub steps: StepCounts,
    pub masks: u32,
    pub exposure: ExposureClass,
}

impl ProcessClass {
    pub fn new(
        id: impl Into<String>,
        steps: StepCounts,
        masks: u32,
        exposure: ExposureClass,
    ) -> Self {
        Self {
            id: id.into(),
            steps,
            masks,
            exposure,
        }
    }

    /// Relative lithography energy of this process under `weights`.
    pub fn mask_energy(&self, weights: &EnergyWeights) -> f64 {
        mask_energy(self, weights)
    }
}

/// Relative exposure energy per mask, split by EUV and DUV tools.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyWeights {
    pub per_euv_mask: f64,
    pub per_duv_mask: f64,
}

impl Default for EnergyWeights {
    /// An EUV exposure costs ten DUV exposures.
    fn default() -> Self {
        Self {
            per_euv_mask: 10.0,
            per_duv_mask: 1.0,
        }
    }
}

impl EnergyWeights {
    pub fn new(per_euv_mask: f64, per_duv_mask: f64) -> Result<Self> {
        let w = Self {
            per_euv_mask,
            per_duv_mask,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("per_euv_mask", self.per_euv_mask),
            ("per_duv_mask", self.per_duv_mask),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain {
                    field: field.into(),
                    message: format!("energy weight must be finite and > 0, got {v}"),
                });
            }
        }
        Ok(())
    }

    pub fn for_exposure(&self, exposure: ExposureClass) -> f64 {
        if exposure.is_euv() {
            self.per_euv_mask
        } else {
            self.per_duv_mask
        }
    }
}

/// `masks × per_euv_mask` for EUV processes, `masks × per_duv_mask` otherwise.
pub fn mask_energy(process: &ProcessClass, weights: &EnergyWeights) -> f64 {
    f64::from(process.masks) * weights.for_exposure(process.exposure)
}

pub const ARF_LE: &str = "ArF_LE";
pub const ARFI_LE: &str = "ArFi_LE";
pub const ARFI_LE2: &str = "ArFi_LE2";
pub const ARFI_LE3: &str = "ArFi_LE3";
pub const ARFI_LE4: &str = "ArFi_LE4";
pub const ARFI_SADP: &str = "ArFi_SADP";
pub const ARFI_SAQP: &str = "ArFi_SAQP";
pub const EUV_LE: &str = "EUV_LE";
pub const EUV_SA_LE2: &str = "EUV_SA_LE2";

// (id, DryEtch, Litho, Metal, Metr, WetEtch, Dep, masks, exposure)
type Row = (&'static str, [u32; 6], u32, ExposureClass);

const BUILTIN_ROWS: [Row; 9] = [
    (ARF_LE, [1, 3, 1, 2, 3, 0], 1, ExposureClass::DuvDry),
    (ARFI_LE, [1, 3, 1, 3, 3, 0], 1, ExposureClass::DuvImmersion),
    (ARFI_LE2, [3, 6, 1, 7, 3, 1], 2, ExposureClass::DuvImmersion),
    (
        ARFI_LE3,
        [4, 9, 1, 10, 3, 1],
        3,
        ExposureClass::DuvImmersion,
    ),
    (
        ARFI_LE4,
        [5, 12, 1, 13, 3, 1],
        4,
        ExposureClass::DuvImmersion,
    ),
    (
        ARFI_SADP,
        [3, 3, 1, 5, 5, 3],
        1,
        ExposureClass::DuvImmersion,
    ),
    (
        ARFI_SAQP,
        [3, 2, 1, 7, 7, 10],
        1,
        ExposureClass::DuvImmersion,
    ),
    (EUV_LE, [1, 3, 1, 3, 3, 0], 1, ExposureClass::Euv),
    (EUV_SA_LE2, [5, 6, 1, 8, 7, 3], 2, ExposureClass::Euv),
];

/// Ids of the built-in processes, in table order.
pub const BUILTIN_IDS: [&str; 9] = [
    ARF_LE, ARFI_LE, ARFI_LE2, ARFI_LE3, ARFI_LE4, ARFI_SADP, ARFI_SAQP, EUV_LE, EUV_SA_LE2,
];

fn builtin(id: &str) -> Option<ProcessClass> {
    BUILTIN_ROWS
        .iter()
        .find(|r| r.0 == id)
        .map(|&(id, s, masks, exposure)| {
            ProcessClass::new(
                id,
                StepCounts::new(s[0], s[1], s[2], s[3], s[4], s[5]),
                masks,
                exposure,
            )
        })
}

/// All nine built-in processes, in table order.
pub fn builtin_processes() -> Vec<ProcessClass> {
    BUILTIN_IDS.iter().filter_map(|id| builtin(id)).collect()
}

/// Process lookup table: the immutable built-ins plus per-instance extensions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Catalog {
    custom: BTreeMap<String, ProcessClass>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, id: &str) -> Result<ProcessClass> {
        builtin(id)
            .or_else(|| self.custom.get(id).cloned())
            .ok_or_else(|| Error::UnknownProcess {
                id: id.to_string(),
                known: self.ids().join(", "),
            })
    }

    pub fn contains(&self, id: &str) -> bool {
        BUILTIN_IDS.contains(&id) || self.custom.contains_key(id)
    }

    pub fn register(&mut self, custom: ProcessClass) -> Result<()> {
        if BUILTIN_IDS.contains(&custom.id.as_str()) || self.custom.contains_key(&custom.id) {
            return Err(Error::ProcessCollision(custom.id));
        }
        if custom.id.trim().is_empty() {
            return Err(Error::InvalidProcess {
                id: custom.id,
                message: "id must not be empty".into(),
            });
        }
        if custom.masks < 1 {
            return Err(Error::InvalidProcess {
                id: custom.id,
                message: "masks must be >= 1".into(),
            });
        }
        self.custom.insert(custom.id.clone(), custom);
        Ok(())
    }

    /// Builder-style [`Catalog::register`].
    pub fn with(mut self, custom: ProcessClass) -> Result<Self> {
        self.register(custom)?;
        Ok(self)
    }

    /// Built-ins in table order, then registered processes sorted by id.
    pub fn ids(&self) -> Vec<String> {
        BUILTIN_IDS
            .iter()
            .map(|s| s.to_string())
            .chain(self.custom.keys().cloned())
            .collect()
    }

    pub fn processes(&self) -> Vec<ProcessClass> {
        let mut all = builtin_processes();
        all.extend(self.custom.values().cloned());
        all
    }
}

/// Free-function form of [`Catalog::lookup`] against the built-in table.
pub fn lookup_process(id: &str) -> Result<ProcessClass> {
    Catalog::new().lookup(id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        let le3 = lookup_process("ArFi_LE3").unwrap();
        assert_eq!(le3.steps, StepCounts::new(4, 9, 1, 10, 3, 1));
        assert_eq!(le3.masks, 3);
        assert_eq!(le3.exposure, ExposureClass::DuvImmersion);

        let sa = lookup_process("EUV_SA_LE2").unwrap();
        assert_eq!(sa.steps, StepCounts::new(5, 6, 1, 8, 7, 3));
        assert_eq!(sa.masks, 2);
        assert_eq!(sa.exposure, ExposureClass::Euv);

        let saqp = lookup_process("ArFi_SAQP").unwrap();
        assert_eq!(saqp.masks, 1);
        assert_eq!(saqp.steps.deposition, 10);
    }

    #[test]
    fn unknown_lists_known_ids() {
        let err = lookup_process("ArFi_LE9").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("ArFi_LE9"));
        assert!(msg.contains("EUV_SA_LE2"));
    }

    #[test]
    fn register_extension() {
        let mut cat = Catalog::new();
        let le5 = ProcessClass::new(
            "ArFi_LE5",
            StepCounts::new(6, 15, 1, 16, 3, 1),
            5,
            ExposureClass::DuvImmersion,
        );
        cat.register(le5.clone()).unwrap();
        assert_eq!(cat.lookup("ArFi_LE5").unwrap(), le5);
        // other instances unaffected
        assert!(Catalog::new().lookup("ArFi_LE5").is_err());
        assert!(matches!(cat.register(le5), Err(Error::ProcessCollision(_))));
    }

    #[test]
    fn register_rejects_builtin_and_zero_masks() {
        let mut cat = Catalog::new();
        let clash = ProcessClass::new(EUV_LE, StepCounts::ZERO, 1, ExposureClass::Euv);
        assert!(matches!(
            cat.register(clash),
            Err(Error::ProcessCollision(_))
        ));
        let bad = ProcessClass::new("X", StepCounts::ZERO, 0, ExposureClass::Euv);
        assert!(matches!(
            cat.register(bad),
            Err(Error::InvalidProcess { .. })
        ));
        assert_eq!(cat.lookup(EUV_LE).unwrap(), lookup_process(EUV_LE).unwrap());
    }

    #[test]
    fn mask_energy_rule() {
        let w = EnergyWeights::default();
        assert_eq!(mask_energy(&lookup_process(EUV_LE).unwrap(), &w), 10.0);
        assert_eq!(mask_energy(&lookup_process(ARFI_LE2).unwrap(), &w), 2.0);
        assert_eq!(mask_energy(&lookup_process(ARFI_SADP).unwrap(), &w), 1.0);
        assert_eq!(mask_energy(&lookup_process(ARF_LE).unwrap(), &w), 1.0);
        assert_eq!(mask_energy(&lookup_process(EUV_SA_LE2).unwrap(), &w), 20.0);
    }

    #[test]
    fn le_masks_monotone() {
        let masks: Vec<u32> = [ARFI_LE, ARFI_LE2, ARFI_LE3, ARFI_LE4]
            .iter()
            .map(|id| lookup_process(id).unwrap().masks)
            .collect();
        assert!(masks.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(masks, vec![1, 2, 3, 4]);
    }

    #[test]
    fn weights_reject_nonpositive() {
        assert!(EnergyWeights::new(0.0, 1.0).is_err());
        assert!(EnergyWeights::new(10.0, f64::NAN).is_err());
    }

    #[test]
    fn step_total() {
        assert_eq!(lookup_process(ARFI_SADP).unwrap().steps.total(), 20);
    }
}
