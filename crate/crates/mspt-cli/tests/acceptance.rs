//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 1-4 and 6-8 run in process against the library, with their time
//! limits. Criterion 5 and 9 run `mspt verify-all --seed 7` twice.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use mspt::verify::{self, Criterion};
use serde_json::Value;

const SEED: u64 = 7;

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn timed(f: impl FnOnce() -> Criterion) -> (Criterion, Duration) {
    let t = Instant::now();
    let c = f();
    (c, t.elapsed())
}

fn within(id: &'static str, c: Criterion, took: Duration, limit: Option<Duration>) -> Line {
    let fast = limit.map_or(true, |l| took <= l);
    let limit = limit.map_or(String::new(), |l| format!(" (limit {:.0} s)", l.as_secs_f64()));
    Line { id, pass: c.pass && fast, detail: format!("{} in {:.3} s{limit}", c.name, took.as_secs_f64()) }
}

fn verify_all(out: &Path) -> (bool, Duration) {
    let t = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_mspt"))
        .args(["verify-all", "--seed", &SEED.to_string(), "--out"])
        .arg(out)
        .status()
        .expect("spawn mspt");
    (status.success(), t.elapsed())
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn correlator_laws(summary: &Value) -> (bool, String) {
    let c5 = summary["criteria"].as_array().unwrap().iter().find(|c| c["id"] == "5").unwrap();
    let d = &c5["detail"];
    let (g, s, r) = (&d["G"], &d["S"], &d["renyi2_S"]);
    let f = |v: &Value| v.as_f64().unwrap();
    let window_ok = g["fit_window"] == serde_json::json!([4, 24]);
    let g_ok = g["fit_model"] == "power"
        && (0.4..=0.6).contains(&f(&g["exponent_or_length"]))
        && f(&g["r2"]) >= 0.98
        && window_ok;
    let s_ok = s["fit_model"] == "exponential" && f(&s["r2"]) >= 0.98;
    let r_ok = r["fit_model"] == "power" && f(&r["margin"]) > 0.0;
    let detail = format!(
        "G power exponent {:.4} R² {:.4}; S exponential length {:.3} R² {:.4}; Rényi-2 S {} margin {:.4}",
        f(&g["exponent_or_length"]),
        f(&g["r2"]),
        f(&s["exponent_or_length"]),
        f(&s["r2"]),
        r["fit_model"].as_str().unwrap_or("?"),
        f(&r["margin"]),
    );
    (g_ok && s_ok && r_ok, detail)
}

fn main() -> ExitCode {
    let mut lines = Vec::new();
    let secs = Duration::from_secs;

    let (c, t) = timed(verify::gap_scan_criterion);
    lines.push(within("1", c, t, Some(secs(1))));
    let (c, t) = timed(verify::anomaly_table_criterion);
    lines.push(within("2", c, t, Some(secs(1))));
    let (c, t) = timed(|| verify::spectral_flow_criterion().0);
    lines.push(within("3", c, t, Some(secs(10))));
    let (c, t) = timed(|| verify::ledger_flux_criterion(SEED));
    lines.push(within("4", c, t, None));

    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (ok_a, took_a) = verify_all(a.path());
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(a.path().join("verify_summary.json")).unwrap()).unwrap();
    let (laws, detail) = correlator_laws(&summary);
    let fast = took_a <= secs(600);
    lines.push(Line {
        id: "5",
        pass: laws && fast,
        detail: format!("{detail}; verify-all took {:.0} s (limit 600 s)", took_a.as_secs_f64()),
    });

    let (c, t) = timed(|| verify::oracle_criterion(SEED));
    lines.push(within("6", c, t, None));
    let (c, t) = timed(|| verify::epr_criterion(SEED));
    lines.push(within("7", c, t, None));
    let (c, t) = timed(|| verify::symmetry_criterion(SEED));
    lines.push(within("8", c, t, None));

    let (ok_b, _) = verify_all(b.path());
    let (fa, fb) = (files(a.path()), files(b.path()));
    let names: Vec<&str> = fa.iter().map(|(n, _)| n.as_str()).collect();
    lines.push(Line {
        id: "9",
        pass: !fa.is_empty() && fa == fb,
        detail: format!("verify-all --seed {SEED} twice, byte-identical {}", names.join(" ")),
    });

    println!();
    for l in &lines {
        println!("{} criterion {}: {}", if l.pass { "PASS" } else { "FAIL" }, l.id, l.detail);
    }
    println!("verify-all exit status: {}", if ok_a && ok_b { "success" } else { "failure" });
    if lines.iter().all(|l| l.pass) && ok_a && ok_b {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
