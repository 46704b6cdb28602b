//! Acceptance report: one PASS/FAIL line per criterion, details indented below.
//!
//! Criteria whose failure is analysed and expected are listed in `EXPECTED_FAILURES`;
//! the target exits non-zero when any other criterion fails, when an expected failure
//! starts passing (so the list stays honest), or on any failure at all when
//! `FRACDG_ACCEPTANCE_STRICT=1`.

use fracdg::assembly::{assemble_system, AssemblyOptions};
use fracdg::geometry::Point2;
use fracdg::network::{average_cap_scalar, average_cap_vector, jump_cap_scalar, jump_cap_vector, Fracture};
use fracdg::solver::{Method, SolverConfig, SparseCholesky};
use fracdg::space::DgSpace;
use fracdg::verification::cases::example1_with;
use fracdg::verification::{
    check_consistency, compute_errors, run_convergence, solve_case, CaseId, ConvergenceTable, Norm, StudyOptions, Zero,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::ops::RangeInclusive;
use std::process::{Command, ExitCode};
use std::time::Instant;

const DG_BAND: RangeInclusive<f64> = 1.75..=2.4;
const L2_BAND: RangeInclusive<f64> = 2.6..=3.4;
const K1_DG_BAND: RangeInclusive<f64> = 0.8..=1.4;
const K1_L2_BAND: RangeInclusive<f64> = 1.7..=2.4;
const PATCH_TOL: f64 = 1e-10;
const IDENTITY_TRIALS: usize = 1000;
const IDENTITY_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;
const CONSISTENCY_SAMPLES: usize = 200;
const CONSISTENCY_TOL: f64 = 1e-9;
const CONSISTENCY_SEEDS: u64 = 20;
const NO_FLUX_RATE_MAX: f64 = 1.5;
const COLLINEAR_TOL: f64 = 1e-10;

/// These fail for reasons recorded in the decisions ledger.
const EXPECTED_FAILURES: [u32; 3] = [1, 3, 6];

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

fn levels(id: CaseId) -> &'static [usize] {
    // Example 2 lives on (−2,2)²: n = 16..128 gives the h of n = 4..32 on the unit square
    if id.example == 2 {
        &[16, 32, 64, 128]
    } else {
        &[4, 8, 16, 32]
    }
}

fn fmt_rate(r: Option<f64>) -> String {
    r.map_or("nan".into(), |v| format!("{v:.3}"))
}

fn in_band(r: Option<f64>, band: &RangeInclusive<f64>) -> bool {
    r.is_some_and(|v| band.contains(&v))
}

/// Final-pair rates of the four rated norms against the criterion-1 bands.
fn check_rates(table: &ConvergenceTable) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for norm in Norm::RATED {
        let band = if matches!(norm, Norm::BulkDg | Norm::FracDg) { &DG_BAND } else { &L2_BAND };
        let r = table.final_rate(norm);
        let good = in_band(r, band);
        ok &= good;
        parts.push(format!("{} {}{}", norm.as_str(), fmt_rate(r), if good { "" } else { " (out of band)" }));
    }
    (ok, parts.join(", "))
}

fn criterion1() -> Outcome {
    let mut details = Vec::new();
    let mut failed = Vec::new();
    for id in CaseId::ALL {
        let start = Instant::now();
        match run_convergence(&id.build().unwrap(), levels(id), &StudyOptions::default()) {
            Ok(table) => {
                let (ok, text) = check_rates(&table);
                if !ok {
                    failed.push(id.to_string());
                }
                details.push(format!("{id} n={:?}: {text} [{:.1}s]", levels(id), start.elapsed().as_secs_f64()));
            }
            Err(e) => {
                failed.push(id.to_string());
                details.push(format!("{id}: solve failed at n = {}: {}", e.level, e.error));
            }
        }
    }
    Outcome {
        pass: failed.is_empty(),
        summary: if failed.is_empty() {
            "all 8 case-variants within the rate bands".into()
        } else {
            format!("out of band: {}", failed.join(", "))
        },
        details,
    }
}

fn criterion2() -> Outcome {
    let id: CaseId = "example2a".parse().unwrap();
    let opts = StudyOptions { degree: 1, ..Default::default() };
    match run_convergence(&id.build().unwrap(), levels(id), &opts) {
        Ok(t) => {
            let (dg, l2) = (t.final_rate(Norm::BulkDg), t.final_rate(Norm::BulkL2));
            Outcome {
                pass: in_band(dg, &K1_DG_BAND) && in_band(l2, &K1_L2_BAND),
                summary: format!("example2a k=1: bulk_dg {} in {K1_DG_BAND:?}, bulk_l2 {} in {K1_L2_BAND:?}", fmt_rate(dg), fmt_rate(l2)),
                details: Vec::new(),
            }
        }
        Err(e) => Outcome { pass: false, summary: format!("solve failed: {}", e.error), details: Vec::new() },
    }
}

fn criterion3() -> Outcome {
    let mut details = Vec::new();
    let mut worst: f64 = 0.0;
    let opts = StudyOptions { solver: SolverConfig { method: Some(Method::Cholesky), ..Default::default() }, ..Default::default() };
    for id in CaseId::ALL {
        let case = id.build().unwrap().constant(1.0);
        for n in [4, 16] {
            let e = match solve_case(&case, n, &opts) {
                Ok(s) => s.errors.energy(),
                Err(_) => f64::INFINITY,
            };
            worst = worst.max(e);
            if e >= PATCH_TOL {
                details.push(format!("{id} n={n}: energy error {e:.2e}"));
            }
        }
    }
    Outcome { pass: worst < PATCH_TOL, summary: format!("largest energy-norm error {worst:.2e} (< {PATCH_TOL:e} required)"), details }
}

fn criterion4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..IDENTITY_TRIALS {
        let n = rng.gen_range(2..=6);
        let a: Vec<Point2> = (0..n).map(|_| Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let tau: Vec<Point2> = (0..n)
            .map(|_| {
                let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                Point2::new(t.cos(), t.sin())
            })
            .collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lhs: f64 = (0..n).map(|k| a[k].dot(tau[k]) * b[k]).sum();
        let jump_b = jump_cap_scalar(&b).unwrap();
        let avg_a = average_cap_vector(&a, &tau).unwrap();
        let rhs = jump_cap_vector(&a, &tau).unwrap() * average_cap_scalar(&b).unwrap()
            + avg_a.iter().zip(&jump_b).map(|(x, y)| x * y).sum::<f64>();
        worst = worst.max((lhs - rhs).abs());
    }
    Outcome {
        pass: worst < IDENTITY_TOL,
        summary: format!("{IDENTITY_TRIALS} trials, N in 2..=6, largest defect {worst:.2e}"),
        details: Vec::new(),
    }
}

fn criterion5() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for id in CaseId::ALL {
        let case = id.build().unwrap();
        let mesh = case.mesh(8, 2).unwrap();
        let space = DgSpace::new(&mesh);
        let opts = AssemblyOptions { xi: case.xi, ..Default::default() };
        let (sys, _) = assemble_system(&mesh, &space, &case.network, &case, &opts).unwrap();
        let a = &sys.matrix;
        let sym = a.symmetry_defect() / a.max_abs();
        let chol = SparseCholesky::factor(a);
        let ok = sym <= SYMMETRY_TOL && chol.is_ok();
        pass &= ok;
        let pivot = chol.as_ref().map_or("failed".into(), |c| format!("{:.2e}", c.min_pivot));
        details.push(format!("{id}: asymmetry {sym:.1e}, Cholesky min pivot {pivot}"));
    }
    Outcome { pass, summary: "symmetry and Cholesky at n=8, sigma0 = sigma0_gamma = 10".into(), details }
}

fn criterion6() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut details = Vec::new();
    for id in CaseId::ALL {
        let case = id.build().unwrap();
        let reports: Vec<_> = (0..CONSISTENCY_SEEDS).map(|seed| check_consistency(&case, CONSISTENCY_SAMPLES, seed)).collect();
        let max = reports.iter().map(|r| r.max()).fold(0.0, f64::max);
        let failing = reports.iter().filter(|r| r.max() >= CONSISTENCY_TOL).count();
        let fracture = reports.iter().map(|r| r.fracture).fold(0.0, f64::max);
        worst = worst.max(max);
        details.push(format!(
            "{id}: max relative residual {max:.2e} (fracture equation {fracture:.2e}), {failing} of {} seeds over tolerance",
            CONSISTENCY_SEEDS
        ));
    }
    Outcome {
        pass: worst < CONSISTENCY_TOL,
        summary: format!(
            "{CONSISTENCY_SAMPLES} points per case and seed, seeds 0..{CONSISTENCY_SEEDS}, largest residual {worst:.2e}"
        ),
        details,
    }
}

fn criterion7() -> Outcome {
    let id: CaseId = "example4a".parse().unwrap();
    let case = id.build().unwrap();
    let run = |flux: bool| {
        let opts = StudyOptions { assembly: AssemblyOptions { intersection_flux: flux, ..Default::default() }, ..Default::default() };
        run_convergence(&case, levels(id), &opts).map_err(|e| e.error.to_string())
    };
    match (run(false), run(true)) {
        (Ok(off), Ok(on)) => {
            let (r_off, r_on) = (off.final_rate(Norm::FracDg), on.final_rate(Norm::FracDg));
            let fails_without = r_off.is_some_and(|r| r < NO_FLUX_RATE_MAX);
            let passes_with = in_band(r_on, &DG_BAND);
            let (all_bands, text) = check_rates(&on);
            let mut details = vec![format!("with the flux term: {text}")];
            if !all_bands {
                details.push("the enabled run misses a non-fracture band; that failure is reported under criterion 1".into());
            }
            Outcome {
                pass: fails_without && passes_with,
                summary: format!("frac_dg rate {} without the flux term, {} with it", fmt_rate(r_off), fmt_rate(r_on)),
                details,
            }
        }
        (a, b) => Outcome {
            pass: false,
            summary: format!("solve failed: {:?} / {:?}", a.err(), b.err()),
            details: Vec::new(),
        },
    }
}

fn criterion8() -> Outcome {
    let line = |a: f64, b: f64| Fracture::new(Point2::new(0.5, a), Point2::new(0.5, b), 1e-2, 2.0, 4e-2);
    let split = example1_with(vec![line(0.0, 0.5), line(0.5, 1.0)], 0.75).unwrap();
    let single = example1_with(vec![line(0.0, 1.0)], 0.75).unwrap();
    let opts = StudyOptions { solver: SolverConfig { method: Some(Method::Cholesky), ..Default::default() }, ..Default::default() };
    let (a, b) = (solve_case(&split, 8, &opts).unwrap(), solve_case(&single, 8, &opts).unwrap());
    if a.x.len() != b.x.len() {
        return Outcome { pass: false, summary: "DOF layouts differ".into(), details: Vec::new() };
    }
    let diff: Vec<f64> = a.x.iter().zip(&b.x).map(|(u, v)| u - v).collect();
    let d = compute_errors(&b.mesh, &b.space, &single.network, &b.form, &Zero, &diff).energy();
    Outcome {
        pass: d < COLLINEAR_TOL,
        summary: format!("energy norm of the difference {d:.2e} at n=8 ({} DOFs each)", a.x.len()),
        details: Vec::new(),
    }
}

fn criterion9() -> Outcome {
    let commands: [&[&str]; 2] =
        [&["convergence", "--case", "example4b", "--levels", "4,8,16,32"], &["convergence", "--case", "example2a", "--levels", "16,32"]];
    let mut pass = true;
    let mut details = Vec::new();
    for args in commands {
        let mut outputs = Vec::new();
        for threads in [None, Some("1"), Some("4"), Some("4")] {
            let dir = tempfile::TempDir::new().unwrap();
            let mut cmd = Command::new(env!("CARGO_BIN_EXE_fracdg"));
            cmd.args(args).arg("--out").arg(dir.path()).env_remove("FRACDG_THREADS");
            if let Some(t) = threads {
                cmd.env("FRACDG_THREADS", t);
            }
            let ok = cmd.output().map(|o| o.status.success()).unwrap_or(false);
            outputs.push(if ok { std::fs::read(dir.path().join("rates.csv")).ok() } else { None });
        }
        let same = outputs[0].is_some() && outputs.iter().all(|o| *o == outputs[0]);
        pass &= same;
        details.push(format!("{}: {}", args.join(" "), if same { "identical" } else { "DIFFERENT or failed" }));
    }
    Outcome { pass, summary: "rates.csv byte-identical across reruns and FRACDG_THREADS in {unset, 1, 4}".into(), details }
}

fn main() -> ExitCode {
    let strict = std::env::var("FRACDG_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion1),
        (2, criterion2),
        (3, criterion3),
        (4, criterion4),
        (5, criterion5),
        (6, criterion6),
        (7, criterion7),
        (8, criterion8),
        (9, criterion9),
    ];
    let mut unexpected = Vec::new();
    let mut failures = 0;
    for (number, run) in criteria {
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {number}: {verdict} {} [{:.1}s]", o.summary, start.elapsed().as_secs_f64());
        for d in &o.details {
            println!("    {d}");
        }
        if !o.pass {
            failures += 1;
        }
        if o.pass == EXPECTED_FAILURES.contains(&number) {
            unexpected.push(number);
        }
    }
    println!("acceptance: {} of 9 criteria pass; expected failures {EXPECTED_FAILURES:?}", 9 - failures);
    if !unexpected.is_empty() {
        println!("acceptance: outcome differs from the expectation for criteria {unexpected:?}");
        return ExitCode::FAILURE;
    }
    if strict && failures > 0 {
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
