//! C ABI over `pfas-core`.
//!
//! Objects are opaque handles created by `pfas_*_new`/`pfas_stack_from_*` and
//! released with the matching `*_free`. Every fallible call returns a
//! [`PfasStatus`]; on failure `pfas_last_error_message` describes the error
//! for the calling thread. Strings returned through out-parameters are owned
//! by the caller and released with `pfas_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pfas_core::config::{extend_catalog, parse_document, StackDocument};
use pfas_core::report::{to_json, Inputs, Report, ReportBody, StackInput};
use pfas_core::{
    preset, Catalog, DesignParams, EnergyWeights, Error, Evaluator, ExposureClass, ProcessClass,
    Region, StackSpec,
};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfasStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    UnknownProcess = 3,
    UnknownPreset = 4,
    Validation = 5,
    Domain = 6,
    Parse = 7,
    Conflict = 8,
    Internal = 99,
}

/// Exposure class of a patterning process.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PfasExposure {
    #[default]
    DuvDry = 0,
    DuvImmersion = 1,
    Euv = 2,
}

impl From<ExposureClass> for PfasExposure {
    fn from(e: ExposureClass) -> Self {
        match e {
            ExposureClass::DuvDry => PfasExposure::DuvDry,
            ExposureClass::DuvImmersion => PfasExposure::DuvImmersion,
            ExposureClass::Euv => PfasExposure::Euv,
        }
    }
}

/// One catalog row. `steps` is ordered dry etch, litho, metallization,
/// metrology, wet etch, deposition.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PfasProcessInfo {
    pub steps: [u32; 6],
    pub masks: u32,
    pub exposure: PfasExposure,
}

/// Stack-level totals.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PfasTotals {
    pub total_pfas_layers: u32,
    pub feol_pfas_layers: u32,
    pub mol_pfas_layers: u32,
    pub beol_pfas_layers: u32,
    pub euv_masks: u32,
    pub duv_masks: u32,
    pub litho_steps: u32,
    pub total_steps: u32,
    pub litho_energy: f64,
}

/// Opaque process catalog: the built-in processes plus registered custom ones.
pub struct PfasCatalog {
    inner: Catalog,
}

/// Opaque layer stack.
pub struct PfasStack {
    inner: StackSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> PfasStatus {
    match err {
        Error::UnknownProcess { .. } => PfasStatus::UnknownProcess,
        Error::UnknownPreset(_) => PfasStatus::UnknownPreset,
        Error::Validation { .. } => PfasStatus::Validation,
        Error::ProcessCollision(_) => PfasStatus::Conflict,
        Error::Config(_) | Error::Json(_) | Error::Csv(_) => PfasStatus::Parse,
        _ => PfasStatus::Domain,
    }
}

struct Fail(PfasStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PfasStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PfasStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PfasStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(PfasStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Fail(
            PfasStatus::InvalidUtf8,
            format!("{name} is not valid UTF-8"),
        )
    })
}

fn null(name: &str) -> Fail {
    Fail(PfasStatus::NullPointer, format!("{name} is null"))
}

fn builtin() -> &'static Catalog {
    static BUILTIN: std::sync::OnceLock<Catalog> = std::sync::OnceLock::new();
    BUILTIN.get_or_init(Catalog::new)
}

unsafe fn catalog_or_builtin<'a>(catalog: *const PfasCatalog) -> &'a Catalog {
    if catalog.is_null() {
        builtin()
    } else {
        &(*catalog).inner
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pfas_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates a catalog holding the built-in processes.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pfas_catalog_new(out: *mut *mut PfasCatalog) -> PfasStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(PfasCatalog {
            inner: Catalog::new(),
        }));
        Ok(())
    })
}

/// # Safety
/// `catalog` must come from `pfas_catalog_new` or be null.
#[no_mangle]
pub unsafe extern "C" fn pfas_catalog_free(catalog: *mut PfasCatalog) {
    if !catalog.is_null() {
        drop(Box::from_raw(catalog));
    }
}

/// Registers a custom process given as a JSON object.
///
/// # Safety
/// `catalog` must be a live handle and `json` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pfas_catalog_register_json(
    catalog: *mut PfasCatalog,
    json: *const c_char,
) -> PfasStatus {
    guard(|| {
        let catalog = catalog.as_mut().ok_or_else(|| null("catalog"))?;
        let text = str_arg(json, "json")?;
        let process = parse_document::<ProcessClass>(text, true)?.value;
        catalog.inner.register(process)?;
        Ok(())
    })
}

/// Looks up a process by id. A null catalog means the built-in processes.
///
/// # Safety
/// `id` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pfas_lookup_process(
    catalog: *const PfasCatalog,
    id: *const c_char,
    out: *mut PfasProcessInfo,
) -> PfasStatus {
    guard(|| {
        let id = str_arg(id, "id")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let p = catalog_or_builtin(catalog).lookup(id)?;
        *out = PfasProcessInfo {
            steps: p.steps.as_array(),
            masks: p.masks,
            exposure: p.exposure.into(),
        };
        Ok(())
    })
}

/// Creates a stack from a preset name (`asap7`, `n7-euv`, `n7-duv`).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pfas_stack_from_preset(
    name: *const c_char,
    out: *mut *mut PfasStack,
) -> PfasStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = preset(name)?;
        *out = Box::into_raw(Box::new(PfasStack { inner }));
        Ok(())
    })
}

/// Creates a stack from a stack document. Custom processes in the document
/// are registered into `catalog`, which must then be non-null.
///
/// # Safety
/// `catalog` must be a live handle or null, `json` a NUL-terminated string
/// and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pfas_stack_from_json(
    catalog: *mut PfasCatalog,
    json: *const c_char,
    out: *mut *mut PfasStack,
) -> PfasStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let doc = parse_document::<StackDocument>(text, true)?.value;
        if !doc.processes.is_empty() {
            let catalog = catalog.as_mut().ok_or_else(|| {
                Fail(
                    PfasStatus::NullPointer,
                    "document defines processes but catalog is null".into(),
                )
            })?;
            let issues = extend_catalog(&mut catalog.inner, &doc.processes, "processes");
            if !issues.is_empty() {
                return Err(Error::Config(issues).into());
            }
        }
        *out = Box::into_raw(Box::new(PfasStack { inner: doc.stack() }));
        Ok(())
    })
}

/// # Safety
/// `stack` must come from a `pfas_stack_from_*` call or be null.
#[no_mangle]
pub unsafe extern "C" fn pfas_stack_free(stack: *mut PfasStack) {
    if !stack.is_null() {
        drop(Box::from_raw(stack));
    }
}

/// Validates the stack and fills `out` with its totals under the default
/// energy weights. A null catalog means the built-in processes.
///
/// # Safety
/// `stack` must be a live handle, `catalog` live or null, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pfas_stack_metrics(
    stack: *const PfasStack,
    catalog: *const PfasCatalog,
    out: *mut PfasTotals,
) -> PfasStatus {
    guard(|| {
        let stack = stack.as_ref().ok_or_else(|| null("stack"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let eval = Evaluator::new(
            catalog_or_builtin(catalog),
            DesignParams {
                area_cm2: 1.0,
                fab_yield: 1.0,
            },
        );
        let m = eval.metrics(&stack.inner)?;
        *out = PfasTotals {
            total_pfas_layers: m.total_pfas_layers,
            feol_pfas_layers: m.region(Region::Feol),
            mol_pfas_layers: m.region(Region::Mol),
            beol_pfas_layers: m.region(Region::Beol),
            euv_masks: m.euv_masks(),
            duv_masks: m.duv_masks(),
            litho_steps: m.litho_steps(),
            total_steps: m.total_steps.total(),
            litho_energy: m.total_litho_energy,
        };
        Ok(())
    })
}

/// Chip-level PFAS: PFAS layers × area / yield, in layer·cm².
///
/// # Safety
/// `stack` must be a live handle, `catalog` live or null, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pfas_chip_pfas(
    stack: *const PfasStack,
    catalog: *const PfasCatalog,
    area_cm2: f64,
    fab_yield: f64,
    out: *mut f64,
) -> PfasStatus {
    guard(|| {
        let stack = stack.as_ref().ok_or_else(|| null("stack"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let design = DesignParams::new(area_cm2, fab_yield)?;
        let eval = Evaluator::new(catalog_or_builtin(catalog), design);
        *out = eval.evaluate(&stack.inner)?.chip_pfas.value;
        Ok(())
    })
}

/// Full analysis report as JSON, identical in shape to `pfas analyze --format json`.
///
/// # Safety
/// `stack` must be a live handle, `catalog` live or null, `out` valid.
/// Free the returned string with `pfas_string_free`.
#[no_mangle]
pub unsafe extern "C" fn pfas_analyze_json(
    stack: *const PfasStack,
    catalog: *const PfasCatalog,
    area_cm2: f64,
    fab_yield: f64,
    out: *mut *mut c_char,
) -> PfasStatus {
    guard(|| {
        let stack = stack.as_ref().ok_or_else(|| null("stack"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let catalog = catalog_or_builtin(catalog);
        let design = DesignParams::new(area_cm2, fab_yield)?;
        let evaluation = Evaluator::new(catalog, design).evaluate(&stack.inner)?;
        let custom = catalog
            .processes()
            .into_iter()
            .filter(|p| !pfas_core::process::BUILTIN_IDS.contains(&p.id.as_str()))
            .collect();
        let inputs = Inputs {
            stacks: vec![StackInput {
                source: "ffi".into(),
                stack: stack.inner.clone(),
            }],
            design: Some(design),
            energy_weights: EnergyWeights::default(),
            carbon: None,
            custom_processes: custom,
        };
        let json = to_json(&Report::new(inputs, ReportBody::Analyze(evaluation)))?;
        *out = CString::new(json)
            .map_err(|_| Fail(PfasStatus::Internal, "report contains NUL".into()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn pfas_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
