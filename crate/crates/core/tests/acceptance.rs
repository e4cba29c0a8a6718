//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::path::PathBuf;
use std::process::ExitCode;

use pfas_core::cli;
use pfas_core::config::load_config;
use pfas_core::process::BUILTIN_IDS;
use pfas_core::{
    asap7_preset, carbon_band, chip_pfas, compare_stacks, compose_soc, derive_layer_metrics,
    embodied_carbon, lookup_process, n7_fixture, normalize_trend, stack_metrics, sweep_beol,
    CarbonParams, Catalog, DesignParams, EnergyWeights, Evaluator, ExposureClass, N7Variant,
    Region, TrendSeries,
};
use proptest::prelude::*;
use proptest::test_runner::{Config as RunnerConfig, TestRunner};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($msg)+)),
        }
    };
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn config(name: &str) -> String {
    root()
        .join("configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn runner() -> TestRunner {
    TestRunner::new(RunnerConfig {
        cases: 256,
        failure_persistence: None,
        ..RunnerConfig::default()
    })
}

// Step counts are dry etch, litho, metallization, metrology, wet etch, deposition.
const TABLE_II: [(&str, [u32; 6], u32, ExposureClass); 9] = [
    ("ArF_LE", [1, 3, 1, 2, 3, 0], 1, ExposureClass::DuvDry),
    (
        "ArFi_LE",
        [1, 3, 1, 3, 3, 0],
        1,
        ExposureClass::DuvImmersion,
    ),
    (
        "ArFi_LE2",
        [3, 6, 1, 7, 3, 1],
        2,
        ExposureClass::DuvImmersion,
    ),
    (
        "ArFi_LE3",
        [4, 9, 1, 10, 3, 1],
        3,
        ExposureClass::DuvImmersion,
    ),
    (
        "ArFi_LE4",
        [5, 12, 1, 13, 3, 1],
        4,
        ExposureClass::DuvImmersion,
    ),
    (
        "ArFi_SADP",
        [3, 3, 1, 5, 5, 3],
        1,
        ExposureClass::DuvImmersion,
    ),
    (
        "ArFi_SAQP",
        [3, 2, 1, 7, 7, 10],
        1,
        ExposureClass::DuvImmersion,
    ),
    ("EUV_LE", [1, 3, 1, 3, 3, 0], 1, ExposureClass::Euv),
    ("EUV_SA_LE2", [5, 6, 1, 8, 7, 3], 2, ExposureClass::Euv),
];

// Layer, litho steps, E_litho, PFAS layers.
const TABLE_IV: [(&str, u32, f64, u32); 16] = [
    ("Fin", 2, 1.0, 1),
    ("Active", 3, 10.0, 1),
    ("Gate", 3, 1.0, 1),
    ("SDT", 3, 10.0, 1),
    ("LISD", 3, 10.0, 1),
    ("LIG", 3, 10.0, 1),
    ("VIA0", 3, 10.0, 1),
    ("M1", 6, 20.0, 2),
    ("M2", 6, 20.0, 2),
    ("M3", 6, 20.0, 2),
    ("M4", 9, 3.0, 3),
    ("M5", 9, 3.0, 3),
    ("M6", 9, 3.0, 3),
    ("M7", 9, 3.0, 3),
    ("M8", 6, 2.0, 2),
    ("M9", 6, 2.0, 2),
];

fn c1_table_ii() -> Check {
    ensure!(
        BUILTIN_IDS.len() == TABLE_II.len(),
        "catalog has {} built-ins",
        BUILTIN_IDS.len()
    );
    for (id, steps, masks, exposure) in TABLE_II {
        let p = lookup_process(id).map_err(|e| e.to_string())?;
        ensure!(
            p.steps.as_array() == steps,
            "{id}: steps {:?} != {steps:?}",
            p.steps.as_array()
        );
        ensure!(p.masks == masks, "{id}: masks {} != {masks}", p.masks);
        ensure!(p.exposure == exposure, "{id}: exposure {:?}", p.exposure);
    }
    let out = cli::run(["pfas", "export-catalog", "--format", "json"]);
    ensure!(
        out.code == 0,
        "export-catalog exited {}: {}",
        out.code,
        out.stderr
    );
    let golden = std::fs::read_to_string(root().join("crates/core/tests/golden/catalog.json"))
        .map_err(|e| e.to_string())?;
    ensure!(
        out.stdout == golden,
        "export-catalog output differs from golden file"
    );
    Ok(())
}

fn c2_table_iv() -> Check {
    let stack = asap7_preset();
    ensure!(
        stack.layers.len() == TABLE_IV.len(),
        "preset has {} layers",
        stack.layers.len()
    );
    let catalog = Catalog::new();
    let weights = EnergyWeights::default();
    for (layer, (name, litho, energy, pfas)) in stack.layers.iter().zip(TABLE_IV) {
        ensure!(layer.name == name, "layer order: {} != {name}", layer.name);
        let m = derive_layer_metrics(layer, &catalog, &weights).map_err(|e| e.to_string())?;
        ensure!(
            m.litho_steps == litho,
            "{name}: litho steps {} != {litho}",
            m.litho_steps
        );
        ensure!(
            m.litho_energy == energy,
            "{name}: E_litho {} != {energy}",
            m.litho_energy
        );
        ensure!(
            m.pfas_layers == pfas,
            "{name}: PFAS {} != {pfas}",
            m.pfas_layers
        );
    }
    Ok(())
}

fn c3_aggregates() -> Check {
    // column sums of the table above, split by region row ranges
    let sum = |r: std::ops::Range<usize>| TABLE_IV[r].iter().map(|row| row.3).sum::<u32>();
    let (feol, mol, beol) = (sum(0..4), sum(4..7), sum(7..16));
    let litho: u32 = TABLE_IV.iter().map(|r| r.1).sum();
    let energy: f64 = TABLE_IV.iter().map(|r| r.2).sum();
    ensure!(
        (feol, mol, beol, litho, energy) == (4, 3, 22, 86, 128.0),
        "oracle sums drifted"
    );

    let m = stack_metrics(&asap7_preset(), &Catalog::new(), &EnergyWeights::default())
        .map_err(|e| e.to_string())?;
    ensure!(
        m.region(Region::Feol) == feol,
        "FEOL {}",
        m.region(Region::Feol)
    );
    ensure!(
        m.region(Region::Mol) == mol,
        "MOL {}",
        m.region(Region::Mol)
    );
    ensure!(
        m.region(Region::Beol) == beol,
        "BEOL {}",
        m.region(Region::Beol)
    );
    ensure!(m.total_pfas_layers == 29, "total {}", m.total_pfas_layers);
    ensure!(m.litho_steps() == litho, "litho steps {}", m.litho_steps());
    ensure!(
        m.total_litho_energy == energy,
        "energy {}",
        m.total_litho_energy
    );
    ensure!(
        (m.euv_masks(), m.duv_masks()) == (11, 18),
        "EUV/DUV {}/{}",
        m.euv_masks(),
        m.duv_masks()
    );
    Ok(())
}

fn c4_routing_ratios() -> Check {
    let catalog = Catalog::new();
    let eval = Evaluator::new(&catalog, DesignParams::new(1.0, 1.0).unwrap());
    let r = sweep_beol(&asap7_preset(), &["M7", "M5", "M3"], false, &eval)
        .map_err(|e| e.to_string())?;
    let series: Vec<u32> = ["M7", "M5", "M3"]
        .iter()
        .map(|t| r.point(t).unwrap().routing_beol_pfas)
        .collect();
    ensure!(series == [18, 12, 6], "routing BEOL PFAS {series:?}");
    for (from, to, want) in [("M7", "M3", 3.0), ("M7", "M5", 1.5), ("M5", "M3", 2.0)] {
        let got = r.routing_ratio(from, to).ok_or("missing ratio")?;
        ensure!(got == want, "{from}/{to} = {got}, want {want}");
    }
    Ok(())
}

fn c5_overall_ratio() -> Check {
    let catalog = Catalog::new();
    let eval = Evaluator::new(&catalog, DesignParams::new(1.0, 1.0).unwrap());
    let r = sweep_beol(&asap7_preset(), &["M3"], true, &eval).map_err(|e| e.to_string())?;
    let m3 = r.point("M3").ok_or("no M3 point")?.total_pfas_layers();
    ensure!(
        r.baseline.total_pfas_layers() == 29 && m3 == 17,
        "29 vs {m3}"
    );
    let ratio = r.overall_ratio("M3").ok_or("no ratio")?;
    ensure!((29.0 / 17.0 - ratio).abs() < 1e-12, "ratio {ratio}");
    ensure!(
        (1.65..=1.75).contains(&ratio),
        "ratio {ratio} outside [1.65, 1.75]"
    );
    Ok(())
}

fn c6_euv_vs_duv() -> Check {
    let r = compare_stacks(
        &n7_fixture(N7Variant::Duv),
        &n7_fixture(N7Variant::Euv),
        &Catalog::new(),
        &EnergyWeights::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure!(
        (r.a.total_pfas_layers, r.b.total_pfas_layers) == (36, 29),
        "DUV {} EUV {}",
        r.a.total_pfas_layers,
        r.b.total_pfas_layers
    );
    let pct = r.percent_reduction.ok_or("no reduction")?;
    ensure!((pct - 7.0 / 36.0).abs() < 1e-12, "reduction {pct}");
    ensure!(
        (0.16..=0.20).contains(&pct),
        "reduction {pct} outside 18% +/- 2 pts"
    );
    Ok(())
}

fn c7_chip_pfas() -> Check {
    let m = stack_metrics(&asap7_preset(), &Catalog::new(), &EnergyWeights::default())
        .map_err(|e| e.to_string())?;
    let strategy = (1e-4f64..1e3, 1e-3f64..=1.0, 1e-2f64..1e2, 1e-3f64..=1.0);
    runner()
        .run(&strategy, |(area, y, k, y2)| {
            let base = chip_pfas(
                &m,
                &DesignParams {
                    area_cm2: area,
                    fab_yield: y,
                },
            )
            .unwrap()
            .value;
            let scaled = chip_pfas(
                &m,
                &DesignParams {
                    area_cm2: area * k,
                    fab_yield: y,
                },
            )
            .unwrap()
            .value;
            prop_assert!(((scaled - k * base) / (k * base)).abs() < 1e-9);
            let other = chip_pfas(
                &m,
                &DesignParams {
                    area_cm2: area,
                    fab_yield: y2,
                },
            )
            .unwrap()
            .value;
            prop_assert!(((other * y2 - base * y) / (base * y)).abs() < 1e-9);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    for (area, y) in [
        (1.0, 0.0),
        (1.0, -0.5),
        (1.0, 1.01),
        (1.0, f64::NAN),
        (0.0, 0.9),
        (-1.0, 0.9),
    ] {
        ensure!(
            chip_pfas(
                &m,
                &DesignParams {
                    area_cm2: area,
                    fab_yield: y
                }
            )
            .is_err(),
            "area {area} yield {y} accepted"
        );
    }
    Ok(())
}

fn carbon_params() -> impl Strategy<Value = CarbonParams> {
    (
        0.0f64..2.0,
        0.0f64..1.0,
        0.0f64..5.0,
        0.0f64..2.0,
        0.0f64..2.0,
    )
        .prop_map(|(ci, l, b, g, m)| CarbonParams {
            carbon_intensity: ci,
            energy_per_unit_litho: l,
            energy_per_area_base: b,
            gas_per_area: g,
            material_per_area: m,
        })
}

fn c8_carbon() -> Check {
    let catalog = Catalog::new();
    let w = EnergyWeights::default();
    let euv =
        stack_metrics(&n7_fixture(N7Variant::Euv), &catalog, &w).map_err(|e| e.to_string())?;
    let duv =
        stack_metrics(&n7_fixture(N7Variant::Duv), &catalog, &w).map_err(|e| e.to_string())?;
    let design = DesignParams::new(0.8, 0.9).unwrap();

    // monotone in every parameter
    runner()
        .run(
            &(carbon_params(), 0usize..5, 0.0f64..1.0),
            |(p, field, delta)| {
                let mut q = p;
                match field {
                    0 => q.carbon_intensity += delta,
                    1 => q.energy_per_unit_litho += delta,
                    2 => q.energy_per_area_base += delta,
                    3 => q.gas_per_area += delta,
                    _ => q.material_per_area += delta,
                }
                let a = embodied_carbon(&euv, &design, &p).unwrap().embodied_kg;
                let b = embodied_carbon(&euv, &design, &q).unwrap().embodied_kg;
                prop_assert!(b >= a);
                Ok(())
            },
        )
        .map_err(|e| e.to_string())?;

    // coal end above renewable end whenever the electricity term is nonzero
    runner()
        .run(&(carbon_params(), 0.01f64..1.0), |(p, lit)| {
            let p = CarbonParams {
                energy_per_unit_litho: lit,
                ..p
            };
            let band = carbon_band(&euv, &design, &p, 0.02, 0.82)
                .unwrap()
                .band
                .unwrap();
            prop_assert!(band.high_kg > band.low_kg);
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    // litho-only model: carbon ratio equals litho-energy ratio
    runner()
        .run(&(0.01f64..2.0, 0.01f64..1.0), |(ci, lit)| {
            let p = CarbonParams {
                carbon_intensity: ci,
                energy_per_unit_litho: lit,
                energy_per_area_base: 0.0,
                gas_per_area: 0.0,
                material_per_area: 0.0,
            };
            let a = embodied_carbon(&euv, &design, &p).unwrap().embodied_kg;
            let b = embodied_carbon(&duv, &design, &p).unwrap().embodied_kg;
            let want = euv.total_litho_energy / duv.total_litho_energy;
            prop_assert!(((a / b - want) / want).abs() < 1e-9);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(())
}

fn c9_soc() -> Check {
    let cfg = load_config(&PathBuf::from(config("soc_camel.json")), true)
        .map_err(|e| e.to_string())?
        .value;
    let soc = cfg.soc.ok_or("config has no soc section")?;
    let stack = cfg.stack.ok_or("config has no stack")?.stack;
    let eval = Evaluator::new(&cfg.catalog, DesignParams::new(1.0, 1.0).unwrap());
    let r = compose_soc(&soc.blocks, &stack, &soc.target_top, true, &eval)
        .map_err(|e| e.to_string())?;
    // oracle: only the Cortex-M0 share grows, by 47%
    let share = 0.051 / (0.051 + 0.5 + 0.449);
    let want = share * 0.47;
    ensure!(
        (r.area_increase - want).abs() < 1e-12,
        "increase {} vs oracle {want}",
        r.area_increase
    );
    ensure!(
        (r.area_increase - 0.024).abs() <= 0.001,
        "increase {} outside 2.4% +/- 0.1 pt",
        r.area_increase
    );
    Ok(())
}

fn c10_trend() -> Check {
    let s = TrendSeries::new([("28nm".to_string(), 20.0), ("7nm".to_string(), 29.0)]);
    let n = normalize_trend(&s, "28nm").map_err(|e| e.to_string())?;
    ensure!(
        n.value("28nm") == Some(1.0),
        "reference maps to {:?}",
        n.value("28nm")
    );
    ensure!(
        n.value("7nm") == Some(1.45),
        "7nm maps to {:?}",
        n.value("7nm")
    );
    let series = prop::collection::vec(1e-6f64..1e6, 1..8);
    runner()
        .run(&(series, any::<prop::sample::Index>()), |(values, idx)| {
            let s = TrendSeries::new(
                values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (format!("n{i}"), *v)),
            );
            let reference = format!("n{}", idx.index(values.len()));
            let once = normalize_trend(&s, &reference).unwrap();
            prop_assert_eq!(once.value(&reference), Some(1.0));
            let twice = normalize_trend(&once, &reference).unwrap();
            prop_assert_eq!(once, twice);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(())
}

fn c11_determinism() -> Check {
    let invocations: Vec<Vec<String>> = vec![
        vec![
            "analyze".into(),
            "--config".into(),
            config("asap7_analyze.json"),
        ],
        vec![
            "compare".into(),
            "--config".into(),
            config("n7_compare.json"),
        ],
        vec![
            "sweep".into(),
            "--config".into(),
            config("systolic_sweep.json"),
        ],
        vec!["soc".into(), "--config".into(), config("soc_camel.json")],
        vec!["trend".into(), "--config".into(), config("trend.json")],
        vec![
            "analyze".into(),
            "--stack".into(),
            "asap7".into(),
            "--carbon-profile".into(),
            config("carbon_profile.json"),
        ],
        vec!["export-catalog".into()],
        vec![
            "export-catalog".into(),
            "--kind".into(),
            "stack".into(),
            "--stack".into(),
            "n7-duv".into(),
        ],
        vec!["export-catalog".into(), "--kind".into(), "pfas-uses".into()],
    ];
    for args in invocations {
        let run = || {
            let mut argv = vec!["pfas".to_string()];
            argv.extend(args.iter().cloned());
            argv.extend(["--format".to_string(), "json".to_string()]);
            cli::run(argv)
        };
        let (first, second) = (run(), run());
        ensure!(
            first.code == 0,
            "{args:?} exited {}: {}",
            first.code,
            first.stderr
        );
        ensure!(!first.stdout.is_empty(), "{args:?} printed nothing");
        serde_json::from_str::<serde_json::Value>(&first.stdout)
            .map_err(|e| format!("{args:?}: {e}"))?;
        ensure!(
            first.stdout.as_bytes() == second.stdout.as_bytes(),
            "{args:?} output differs between runs"
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (
            "process catalog matches reference table and golden export",
            c1_table_ii,
        ),
        (
            "ASAP7 per-layer litho steps, energy and PFAS layers",
            c2_table_iv,
        ),
        (
            "ASAP7 region totals, litho steps, energy and exposure split",
            c3_aggregates,
        ),
        (
            "routing BEOL reduction ratios 3.0 / 1.5 / 2.0",
            c4_routing_ratios,
        ),
        (
            "overall M3 reduction with power grid retained",
            c5_overall_ratio,
        ),
        ("EUV vs DUV 7nm PFAS layer reduction", c6_euv_vs_duv),
        (
            "chip PFAS linear in area, inverse in yield, domain checks",
            c7_chip_pfas,
        ),
        (
            "carbon monotonicity, band ordering, litho-only ratio",
            c8_carbon,
        ),
        ("SoC area increase from Cortex-M0 overhead", c9_soc),
        ("trend normalization reference and idempotence", c10_trend),
        ("byte-identical JSON across repeated runs", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("PASS  {:>2}  {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2}  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
