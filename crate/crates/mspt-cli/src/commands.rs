use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use mspt::anomaly::{anomaly_matrix, flux_insertion, realizability, region_matrices, scenario, SCENARIO_NAMES};
use mspt::config::{BlockConfig, EnsembleConfig, Expectations, SCHEMA_VERSION};
use mspt::ensemble::{linear_correlator, renyi2_correlator, symmetry_report, EnsembleSpec, Operator, WindingRule};
use mspt::wire::blocks::{block, BLOCK_NAMES};
use mspt::wire::{enumerate_symmetric_vertices, max_gappable_set, VertexVector, WireArray};
use mspt::Error;

use crate::{BlockSource, Common, EnsembleOverrides};

pub struct Outcome {
    pub ok: bool,
    pub summary: String,
}

pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Invalid { .. }
            | Error::UnknownMode(_)
            | Error::UnknownGenerator(_)
            | Error::UnknownScenario(_)
            | Error::Capacity(_)
            | Error::Dimension(_) => 2,
            _ => 1,
        };
        CliError { code, message: e.to_string() }
    }
}

fn config_error(message: impl Into<String>) -> CliError {
    CliError { code: 2, message: message.into() }
}

type CliResult = Result<Outcome, CliError>;

fn write(out: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| config_error(format!("cannot create {}: {e}", out.display())))?;
    let path = out.join(name);
    fs::write(&path, contents).map_err(|e| config_error(format!("cannot write {}: {e}", path.display())))
}

fn write_json(out: &Path, name: &str, v: &Value) -> Result<(), CliError> {
    write(out, name, &(serde_json::to_string_pretty(v).expect("json value") + "\n"))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))
}

struct LoadedBlock {
    label: String,
    array: WireArray,
    expect: Expectations,
    config: Value,
}

fn load_block(source: &BlockSource, builtin: impl Fn(&str) -> Result<(WireArray, Expectations), Error>) -> Result<LoadedBlock, CliError> {
    match (&source.scenario, &source.file) {
        (Some(name), None) => {
            let (array, expect) = builtin(name)?;
            Ok(LoadedBlock { label: name.clone(), array, expect, config: json!({ "scenario": name }) })
        }
        (None, Some(path)) => {
            let text = read(path)?;
            let cfg = BlockConfig::from_json(&text)?;
            let array = cfg.to_wire_array()?;
            Ok(LoadedBlock {
                label: path.display().to_string(),
                array,
                expect: cfg.expect.clone().unwrap_or_default(),
                config: serde_json::to_value(&cfg).expect("config serializes"),
            })
        }
        _ => Err(config_error("give exactly one of --scenario or --file")),
    }
}

fn dense(v: &[VertexVector], a: &WireArray) -> Vec<Vec<i64>> {
    v.iter().map(|x| x.to_dense(a).expect("vertex of this block")).collect()
}

pub fn gap_scan(source: &BlockSource, bound: i64, common: &Common) -> CliResult {
    let loaded = load_block(source, |name| {
        if !BLOCK_NAMES.contains(&name) {
            return Err(Error::UnknownScenario(format!("{name} (blocks: {})", BLOCK_NAMES.join(", "))));
        }
        Ok((block(name)?, Expectations::default()))
    })?;
    let a = &loaded.array;
    let e = enumerate_symmetric_vertices(a, bound)?;
    let g = max_gappable_set(a, bound)?;
    let mut ok = true;
    if let Some(r) = loaded.expect.rank {
        ok &= r == e.rank();
    }
    if let Some(f) = loaded.expect.fully_gapped {
        ok &= f == g.fully_gapped;
    }
    let modes: Vec<&str> = a.modes.iter().map(|m| m.id.as_str()).collect();
    let summary = json!({
        "version": mspt::VERSION,
        "config": { "source": loaded.config, "bound": bound },
        "modes": modes,
        "rank": e.rank(),
        "basis": dense(&e.basis, a),
        "solutions": e.solutions.len(),
        "truncated": e.truncated,
        "gappable_set": dense(&g.vertices, a),
        "fully_gapped": g.fully_gapped,
        "exhaustive": g.exhaustive,
        "expectations_met": ok,
    });
    let mut csv = format!("{}\n", modes.join(","));
    for row in dense(&e.basis, a) {
        writeln!(csv, "{}", row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")).expect("string");
    }
    write_json(&common.out, "gap_scan.json", &summary)?;
    write(&common.out, "gap_scan_basis.csv", &csv)?;
    Ok(Outcome {
        ok,
        summary: format!(
            "gap-scan {}: rank {} basis {:?} fully_gapped={}",
            loaded.label,
            e.rank(),
            dense(&e.basis, a),
            g.fully_gapped
        ),
    })
}

pub fn anomaly(source: &BlockSource, common: &Common) -> CliResult {
    let loaded = load_block(source, |name| {
        if !SCENARIO_NAMES.contains(&name) {
            return Err(Error::UnknownScenario(format!("{name} (scenarios: {})", SCENARIO_NAMES.join(", "))));
        }
        let s = scenario(name)?;
        let e = Expectations {
            closed_realizable: Some(s.expected.closed_realizable),
            open_realizable: Some(s.expected.open_realizable),
            ..Default::default()
        };
        Ok((s.set, e))
    })?;
    let a = &loaded.array;
    let matrix = anomaly_matrix(a);
    let verdict = realizability(a);
    let flux = a.generators.iter().map(|g| flux_insertion(a, &g.name)).collect::<Result<Vec<_>, _>>()?;
    let forced = source.scenario.as_deref().and_then(|n| scenario(n).ok()).and_then(|s| s.forced_top_self_anomaly());
    let mut ok = true;
    if let Some(c) = loaded.expect.closed_realizable {
        ok &= c == verdict.closed_realizable;
    }
    if let Some(o) = loaded.expect.open_realizable {
        ok &= o == verdict.open_realizable;
    }
    let summary = json!({
        "version": mspt::VERSION,
        "config": loaded.config,
        "anomaly_matrix": matrix,
        "region_matrices": region_matrices(a),
        "closed_realizable": verdict.closed_realizable,
        "open_realizable": verdict.open_realizable,
        "violated_entries": verdict.violated_entries,
        "forced_top_self_anomaly": forced,
        "flux_insertion": flux,
        "expectations_met": ok,
    });
    let mut csv = format!("generator,{}\n", matrix.generators.join(","));
    for (g, row) in matrix.generators.iter().zip(&matrix.entries) {
        writeln!(csv, "{g},{}", row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")).expect("string");
    }
    write_json(&common.out, "anomaly.json", &summary)?;
    write(&common.out, "anomaly_matrix.csv", &csv)?;
    Ok(Outcome {
        ok,
        summary: format!(
            "anomaly {}: closed_realizable={} open_realizable={}",
            loaded.label, verdict.closed_realizable, verdict.open_realizable
        ),
    })
}

pub fn spectral_flow(n: usize, m: f64, wilson: f64, windings: &[i64], common: &Common) -> CliResult {
    let rows = mspt::gaussian::spectral_flow(n, 1.0, m, wilson, windings)?;
    let mut csv = String::from("winding,particles,delta_q,gap\n");
    for r in &rows {
        writeln!(csv, "{},{},{},{:.12e}", r.winding, r.particles, r.delta_q, r.gap).expect("string");
    }
    let ok = rows.iter().all(|r| r.delta_q == r.winding);
    write(&common.out, "spectral_flow.csv", &csv)?;
    write_json(
        &common.out,
        "spectral_flow.json",
        &json!({
            "version": mspt::VERSION,
            "config": { "n": n, "m": m, "wilson": wilson, "velocity": 1.0, "w": windings },
            "rows": rows,
            "delta_q_equals_w": ok,
        }),
    )?;
    let flow: Vec<String> = rows.iter().map(|r| format!("{}:{}", r.winding, r.delta_q)).collect();
    Ok(Outcome { ok, summary: format!("spectral-flow N={n}: w:ΔQ {}", flow.join(" ")) })
}

fn load_ensemble(o: &EnsembleOverrides) -> Result<EnsembleConfig, CliError> {
    let mut cfg = match &o.file {
        Some(path) => EnsembleConfig::from_json(&read(path)?)?,
        None => {
            let seed = o.seed.ok_or_else(|| config_error("--seed is required without --file"))?;
            EnsembleConfig::from_spec(&EnsembleSpec::new(96, 200, seed))
        }
    };
    if let Some(v) = o.seed {
        cfg.seed = v;
    }
    if let Some(v) = o.n {
        cfg.n = v;
    }
    if let Some(v) = o.m {
        cfg.m = v;
    }
    if let Some(v) = o.g {
        cfg.g = v;
    }
    if let Some(v) = o.w {
        cfg.winding = WindingRule::Fixed(v);
    }
    if let Some(v) = o.samples {
        cfg.samples = v;
    }
    if let Some(v) = o.wilson {
        cfg.wilson = v;
    }
    if let Some(v) = o.pairs {
        cfg.pair_budget = v;
    }
    cfg.schema_version = SCHEMA_VERSION;
    cfg.spec().validate()?;
    Ok(cfg)
}

pub fn edge_corr(o: &EnsembleOverrides, operator: &str, common: &Common) -> CliResult {
    let op = Operator::parse(operator)?;
    let cfg = load_ensemble(o)?;
    let spec = cfg.spec();
    let est = match op {
        Operator::Renyi2 => renyi2_correlator(&spec)?,
        _ => linear_correlator(&spec, op)?,
    };
    let mut summary = est.summary_json();
    summary["version"] = json!(mspt::VERSION);
    summary["config"] = serde_json::to_value(&cfg).expect("config serializes");
    let stem = format!("{}_correlator", op.name().to_lowercase());
    write(&common.out, &format!("{stem}.csv"), &est.csv())?;
    write_json(&common.out, &format!("{stem}.json"), &summary)?;
    Ok(Outcome {
        ok: true,
        summary: format!(
            "edge-corr {}: {:?} {:.4} (R² {:.4}, margin {:.4}) from {} samples",
            op.name(),
            est.fit.model,
            est.fit.exponent_or_length,
            est.fit.r2,
            est.fit.margin,
            est.sampling.valid
        ),
    })
}

pub fn symmetry_check(o: &EnsembleOverrides, common: &Common) -> CliResult {
    let cfg = load_ensemble(o)?;
    let r = symmetry_report(&cfg.spec(), cfg.generator, cfg.angle, cfg.orbit_average)?;
    let summary = json!({
        "version": mspt::VERSION,
        "config": cfg,
        "strong": r.strong,
        "weak": r.weak,
        "charge_sectors": r.charge_sectors,
        "orbit_averaged": r.orbit_averaged,
        "sampling": r.sampling,
    });
    write_json(&common.out, "symmetry_check.json", &summary)?;
    Ok(Outcome {
        ok: true,
        summary: format!(
            "symmetry-check {:?}: strong={} weak={} sectors {:?}",
            r.generator, r.strong.pass, r.weak.pass, r.charge_sectors
        ),
    })
}

pub fn verify_all(seed: u64, pairs: usize, common: &Common) -> CliResult {
    let out = mspt::verify::run_all(seed, pairs);
    for (name, contents) in &out.files {
        write(&common.out, name, contents)?;
    }
    let mut lines = String::new();
    for c in &out.report.criteria {
        writeln!(lines, "  [{}] {} {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.name).expect("string");
    }
    eprint!("{lines}");
    let passed = out.report.criteria.iter().filter(|c| c.pass).count();
    Ok(Outcome {
        ok: out.report.all_pass,
        summary: format!("verify-all seed {seed}: {passed}/{} criteria pass", out.report.criteria.len()),
    })
}
