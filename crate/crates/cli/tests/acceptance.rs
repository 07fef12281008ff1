//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! summary is always printed; exits non-zero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;
use zb_cli::verify::*;

const SEED: u64 = 20240611;

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

struct Outcome {
    passed: bool,
    note: String,
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or(f64::NAN)
}

fn from_check(r: zb_cli::error::CliResult<(bool, Value)>, judge: impl Fn(&Value) -> (bool, String)) -> Outcome {
    match r {
        Ok((reported, detail)) => {
            let (ok, note) = judge(&detail);
            Outcome {
                passed: ok && reported,
                note,
            }
        }
        Err(e) => Outcome {
            passed: false,
            note: format!("error: {e}"),
        },
    }
}

fn rows_agree(detail: &Value, keys: &[&str]) -> bool {
    detail["rows"]
        .as_array()
        .is_some_and(|rows| rows.iter().all(|r| keys.iter().all(|k| r[*k] == r["expected"])))
}

fn c1() -> Outcome {
    from_check(maxwell_phases(), |d| {
        let ok = d["rows"].as_array().is_some_and(|rows| {
            rows.len() == 4
                && rows.iter().all(|r| {
                    r["nu"] == r["expected_nu"]
                        && r["chern_hsp"] == r["expected_chern"]
                        && r["chern_plaquette"] == r["expected_chern"]
                })
        });
        let ch: Vec<String> = d["rows"].as_array().unwrap().iter().map(|r| r["chern_plaquette"].to_string()).collect();
        (ok, format!("Ch = {{{}}}", ch.join(", ")))
    })
}

fn c2() -> Outcome {
    from_check(closed_forms(SEED, 100), |d| {
        let (a, b) = (num(d, "spin1_max_deviation"), num(d, "chiral_max_deviation"));
        (
            a < 1e-8 && b < 1e-8 && d["trials"] == 100,
            format!(
                "max |dr| spin-1 {a:.1e}, chiral {b:.1e}; adjacent amplitude = {} x ladder element",
                num(d, "adjacent_amplitude_prefactor")
            ),
        )
    })
}

fn c3() -> Outcome {
    from_check(transition_reversal(), |d| {
        let ok = rows_agree(d, &["packet", "exact"]);
        (ok, format!("M = 1.9 -> {}, M = 2.1 -> {}", d["rows"][0]["packet"], d["rows"][1]["packet"]))
    })
}

fn c4() -> Outcome {
    from_check(selection_rule(SEED, 100), |d| {
        let spins = d["spins"].as_array().cloned().unwrap_or_default();
        let worst = spins.iter().map(|s| num(s, "max_spurious")).fold(0.0, f64::max);
        let ok = spins.len() == 5
            && spins
                .iter()
                .all(|s| num(s, "max_spurious") < 1e-10 && s["dominant_matches"] == true && s["trials"] == 100);
        (ok, format!("J = 1/2..5/2, worst non-adjacent power {worst:.1e}"))
    })
}

fn c5() -> Outcome {
    from_check(winding_cross_check(), |d| {
        let ok = d["grid"] == 40 && rows_agree(d, &["hsp", "numerical"]);
        let w: Vec<String> = d["rows"].as_array().unwrap().iter().map(|r| r["numerical"].to_string()).collect();
        (ok, format!("w(M = -4..4) = {{{}}}", w.join(", ")))
    })
}

fn c6() -> Outcome {
    from_check(kane_mele_z2(SEED, 50), |d| {
        let ok = d["samples"] == 50 && d["mismatches"].as_array().is_some_and(|m| m.is_empty()) && num(d, "ramp_end") == 0.05;
        (
            ok,
            format!(
                "{} samples ({} topological), ramp min gap {:.3}",
                d["samples"],
                d["topological"],
                num(d, "ramp_min_gap")
            ),
        )
    })
}

fn c7() -> Outcome {
    from_check(scaling_laws(SEED, 100), |d| {
        let slope = num(d, "amplitude_exponent");
        let ok = (slope + 1.0).abs() <= 0.01
            && num(d, "frequency_worst_offset_in_bins") <= 1.0
            && num(d, "reversal_max_deviation") < 1e-10;
        (
            ok,
            format!(
                "exponent {slope:.6}, reversal {:.1e}",
                num(d, "reversal_max_deviation")
            ),
        )
    })
}

fn c8() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = dir.path().join("verify.json");
    std::fs::write(&config, format!("{{\"command\": \"verify\", \"seed\": {SEED}}}")).unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_zb"))
            .args(["verify", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .env_remove("ZB_SEED")
            .output()
            .expect("spawn zb");
        (status.status.code(), std::fs::read(out.join("verify.json")).ok())
    };
    let (a, b) = (run("first"), run("second"));
    let same = a.1.is_some() && a.1 == b.1;
    Outcome {
        passed: same && a.0 == Some(0) && b.0 == Some(0),
        note: format!("exit codes {:?}/{:?}, reports identical: {same}", a.0, b.0),
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 Maxwell phase table", c1, Some(Duration::from_secs(30))),
        ("2 closed-form/oracle equivalence", c2, None),
        ("3 direction reversal at the transition", c3, Some(Duration::from_secs(10))),
        ("4 selection rule", c4, None),
        ("5 3D winding cross-check", c5, Some(Duration::from_secs(120))),
        ("6 Kane-Mele Z2", c6, None),
        ("7 scaling laws", c7, None),
        ("8 determinism", c8, None),
    ];
    let mut failed = 0;
    for (name, f, budget) in criteria {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let passed = outcome.passed && in_time;
        failed += usize::from(!passed);
        let budget = budget.map(|b| format!(" / {}s", b.as_secs())).unwrap_or_default();
        println!(
            "criterion {name}: {} ({:.2}s{budget}) {}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            outcome.note
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
