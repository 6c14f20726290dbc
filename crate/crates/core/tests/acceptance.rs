//! Acceptance suite. Each test checks one criterion at its stated tolerance
//! and runtime budget and prints a single `PASS`/`FAIL` line to stdout,
//! bypassing the test harness's output capture. Criteria run one at a time
//! so runtimes and timings are not skewed by each other.

mod common;

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use common::*;
use multilayer_heat::assembly::assemble_system;
use multilayer_heat::band::BandMatrix;
use multilayer_heat::bench::convergence::ConvergenceCase;
use multilayer_heat::bench::counts::verify_op_counts;
use multilayer_heat::bench::{bench, BenchScenario, RowStatus};
use multilayer_heat::conditioning::pd_to_td;
use multilayer_heat::materials::{MaterialModel, MaterialSet, Polynomial};
use multilayer_heat::mesh::{LayerSpec, RadialMesh};
use multilayer_heat::scalar::Scalar;
use multilayer_heat::solvers::exact::{exact_solve_pd, exact_solve_td, residual_is_zero_pd, residual_is_zero_td};
use multilayer_heat::solvers::{solve_pd_lu, solve_pd_modified, solve_td_thomas, SolverId};
use multilayer_heat::time_stepper::{advance, ShiftMode, StepConfig, TemperatureField};
use multilayer_heat::Error;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

static SERIAL: Mutex<()> = Mutex::new(());

fn report(id: u32, title: &str, pass: bool, elapsed: Duration, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("{verdict} [{id}] {title} ({:.2} s): {detail}\n", elapsed.as_secs_f64());
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(pass, "criterion {id} failed: {detail}");
}

#[test]
fn c1_solvers_match_dense_oracle() {
    let _serial = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut systems = 0;
    for n in [10, 100, 1000] {
        for k in [0, 1, 3] {
            for _ in 0..200 {
                let system = random_penta(&mut rng, n, k);
                let reference = oracle(&system);
                let td = pd_to_td(&system).unwrap();
                for x in [
                    solve_pd_lu(&system).unwrap().solution,
                    solve_pd_modified(&system).unwrap().solution,
                    solve_td_thomas(&td).unwrap().solution,
                ] {
                    worst = worst.max(rel_err(&x, &reference));
                }
                systems += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-12 && elapsed < Duration::from_secs(10);
    report(
        1,
        "oracle equivalence",
        pass,
        elapsed,
        &format!("{systems} systems, worst relative error {worst:.2e} (limit 1e-12, budget 10 s)"),
    );
}

#[test]
fn c2_exact_solvers_are_exact() {
    let _serial = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut all_zero = true;
    for (n, k) in [(10, 0), (10, 3), (100, 1), (1000, 3), (2000, 11)] {
        let system = random_int_penta(&mut rng, n, k);
        let pd = exact_solve_pd(&system).unwrap();
        let td_system = pd_to_td(&system).unwrap();
        let td = exact_solve_td(&td_system).unwrap();
        all_zero &= residual_is_zero_pd(&system, &pd.values);
        all_zero &= residual_is_zero_td(&td_system, &td.values);
        all_zero &= pd.values == td.values;
        if n <= 100 {
            all_zero &= exact_oracle(&system).as_ref() == Some(&pd.values);
        }
    }

    let scenario = BenchScenario {
        n_values: vec![1000, 2000],
        solvers: vec![SolverId::Spdm, SolverId::Stdm],
        reps: 1,
        ..BenchScenario::default()
    };
    let bench_zero = bench(&scenario)
        .unwrap()
        .rows
        .iter()
        .all(|r| r.status == RowStatus::Ok && r.err_inf == Some(0.0));

    let mut deferred_ok = true;
    for _ in 0..20 {
        let system = zero_minor_tri(&mut rng, 40);
        let float = system.map(Scalar::to_f64_lossy);
        let numeric_breaks = matches!(solve_td_thomas(&float), Err(Error::Breakdown { row: 1, .. }));
        let exact = exact_solve_td(&system).unwrap();
        deferred_ok &= numeric_breaks
            && exact.deferred_zeros == vec![1]
            && residual_is_zero_td(&system, &exact.values)
            && exact_oracle(&system).as_ref() == Some(&exact.values);
    }

    let elapsed = start.elapsed();
    let pass = all_zero && bench_zero && deferred_ok && elapsed < Duration::from_secs(30);
    report(
        2,
        "exactness",
        pass,
        elapsed,
        &format!(
            "zero residuals up to N=2000: {all_zero}; benchmark error 0 at N=1000,2000: {bench_zero}; \
             zero-minor case via deferred pivot with Thomas breakdown: {deferred_ok} (budget 30 s)"
        ),
    );
}

#[test]
fn c3_benchmark_accuracy() {
    let _serial = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let scenario = BenchScenario {
        n_values: vec![1_000, 10_000, 100_000],
        k: 11,
        solvers: SolverId::NUMERICAL.to_vec(),
        reps: 1,
        ..BenchScenario::default()
    };
    let rows = bench(&scenario).unwrap().rows;
    let worst = rows.iter().map(|r| r.err_inf.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    let pass = rows.len() == 9 && rows.iter().all(|r| r.status == RowStatus::Ok) && worst <= 5e-15;
    let detail: Vec<String> = rows
        .iter()
        .map(|r| format!("{}@{}={:.2e}", r.solver, r.n, r.err_inf.unwrap_or(f64::NAN)))
        .collect();
    report(3, "benchmark accuracy", pass, start.elapsed(), &format!("max {worst:.2e} (limit 5e-15); {}", detail.join(" ")));
}

#[test]
fn c4_operation_count_slopes() {
    let _serial = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let scenario = BenchScenario {
        n_values: vec![1_000, 2_000, 4_000],
        k: 11,
        ..BenchScenario::default()
    };
    let counts = verify_op_counts(&scenario).unwrap();
    let elapsed = start.elapsed();
    let detail: Vec<String> = counts
        .checks
        .iter()
        .map(|c| {
            format!(
                "{} slopes {:?} (expected {}), constant {} (reference {})",
                c.solver, c.slopes, c.expected_slope, c.constant, c.reference_constant
            )
        })
        .collect();
    let k = &counts.k_slope;
    let pass = counts.pass && elapsed < Duration::from_secs(5);
    report(
        4,
        "operation-count slopes",
        pass,
        elapsed,
        &format!(
            "{}; MNPDM K {}->{} adds {} (expected {})",
            detail.join("; "),
            k.k_low,
            k.k_high,
            k.mnpdm_diff,
            k.expected_diff
        ),
    );
}

#[test]
fn c5_timing_order_and_scaling() {
    let _serial = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let scenario = BenchScenario {
        n_values: vec![10_000, 100_000],
        k: 11,
        solvers: SolverId::NUMERICAL.to_vec(),
        reps: 31,
        ..BenchScenario::default()
    };
    let report_rows = bench(&scenario).unwrap();
    let wall = |n, s| report_rows.row(n, s).and_then(|r| r.wall_s).unwrap();
    let (npdm, mnpdm, ntdm) = (wall(100_000, SolverId::Npdm), wall(100_000, SolverId::Mnpdm), wall(100_000, SolverId::Ntdm));
    let ordered = ntdm < mnpdm && mnpdm < npdm;
    let ratios: Vec<(SolverId, f64)> = SolverId::NUMERICAL
        .iter()
        .map(|&s| (s, wall(100_000, s) / wall(10_000, s)))
        .collect();
    let scaled = ratios.iter().all(|(_, r)| (5.0..=20.0).contains(r));
    let elapsed = start.elapsed();
    let pass = ordered && scaled && elapsed < Duration::from_secs(120);
    let ratio_text: Vec<String> = ratios.iter().map(|(s, r)| format!("{s} {r:.2}")).collect();
    report(
        5,
        "timing order and scaling",
        pass,
        elapsed,
        &format!(
            "median s at N=1e5: NTDM {ntdm:.3e}, MNPDM {mnpdm:.3e}, NPDM {npdm:.3e} (order NTDM<MNPDM<NPDM: {ordered}); \
             1e5/1e4 ratios {} (range [5, 20]: {scaled})",
            ratio_text.join(", ")
        ),
    );
}

#[test]
fn c6_convergence_order() {
    let _serial = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for case in ConvergenceCase::ALL {
        let r = case.run(SolverId::Ntdm, 1).unwrap();
        let ok = case.meets_expectation(&r);
        pass &= ok;
        detail.push(format!(
            "{} min pairwise {:.3}, fitted {:.3} ({})",
            case.as_str(),
            r.min_order(),
            r.fitted_order,
            if ok { "ok" } else { "miss" }
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(120);
    report(
        6,
        "convergence order",
        pass,
        elapsed,
        &format!("{} (uniform >= 1.9, randomized <= 1.4)", detail.join("; ")),
    );
}

fn nonlinear_pair() -> (Vec<LayerSpec>, MaterialSet) {
    let layers = vec![
        LayerSpec::new(1.0, 1.3, "a", 7),
        LayerSpec::new(1.3, 1.9, "b", 9),
        LayerSpec::new(1.9, 2.2, "a", 5),
    ];
    let materials = MaterialSet::new()
        .with(
            "a",
            MaterialModel {
                lambda: Polynomial::new(vec![2.0, 0.4]),
                ..MaterialModel::constant(3.0, 1.1, 2.0, 0.0)
            },
        )
        .with(
            "b",
            MaterialModel {
                cv: Polynomial::new(vec![1.0, 0.05]),
                ..MaterialModel::constant(1.5, 1.0, 0.7, 0.0)
            },
        );
    (layers, materials)
}

#[test]
fn c7_conservation_and_consistency() {
    let _serial = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let (layers, materials) = nonlinear_pair();
    let mesh = mesh_of(&layers);

    let c = 1.7;
    let mut invariant = true;
    for (solver, shift) in [
        (SolverId::Npdm, ShiftMode::None),
        (SolverId::Mnpdm, ShiftMode::Pentadiagonal),
        (SolverId::Ntdm, ShiftMode::Tridiagonal),
        (SolverId::Spdm, ShiftMode::None),
    ] {
        let cfg = StepConfig::new(0.02, solver).with_shift(shift);
        let mut u = TemperatureField::constant(mesh.len(), c);
        for _ in 0..100 {
            u = advance(&mesh, &materials, &u, &cfg).unwrap().0;
        }
        invariant &= u.values.iter().all(|&v| v == c);
    }

    let exact_mesh = RadialMesh::<BigRational>::from_layers(&layers).unwrap();
    let ones = vec![q(1); exact_mesh.len()];
    let guess: Vec<BigRational> = (0..exact_mesh.len()).map(|i| q(1 + (i as i64 % 4))).collect();
    let system = assemble_system(&exact_mesh, &materials, &guess, &guess, &q(1), None).unwrap();
    let applied = system.matrix.apply(&ones);
    let n = exact_mesh.len();
    let annihilated = [0, n - 1]
        .into_iter()
        .chain(exact_mesh.contacts().iter().copied())
        .all(|r| applied[r] == q(0));

    let linear = MaterialSet::new()
        .with("a", MaterialModel::constant(3.0, 1.1, 2.0, 0.0))
        .with("b", MaterialModel::constant(1.5, 1.0, 0.7, 0.0));
    let u0 = TemperatureField::new(mesh.nodes().iter().map(|r| 1.0 + (r - 1.6).powi(2)).collect(), 0.0);
    let tau = 0.005;
    let plain = advance(&mesh, &linear, &u0, &StepConfig::new(tau, SolverId::Npdm)).unwrap().0.values;
    let mut worst: f64 = 0.0;
    for (solver, shift) in [
        (SolverId::Npdm, ShiftMode::Pentadiagonal),
        (SolverId::Mnpdm, ShiftMode::Pentadiagonal),
        (SolverId::Ntdm, ShiftMode::Pentadiagonal),
        (SolverId::Ntdm, ShiftMode::Tridiagonal),
    ] {
        let mut cfg = StepConfig::new(tau, solver).with_shift(shift);
        cfg.max_picard = 10_000;
        let shifted = advance(&mesh, &linear, &u0, &cfg).unwrap().0.values;
        worst = worst.max(rel_err(&shifted, &plain));
    }

    let pass = invariant && annihilated && worst <= 1e-11;
    report(
        7,
        "conservation and consistency",
        pass,
        start.elapsed(),
        &format!(
            "constant field unchanged over 100 steps: {invariant}; boundary/contact rows annihilate constants: \
             {annihilated}; shifted fixed point vs unshifted {worst:.2e} (limit 1e-11)"
        ),
    );
}

#[test]
fn c8_declared_not_reproducible() {
    let _serial = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let huge = BenchScenario {
        n_values: vec![100_000_000],
        ..BenchScenario::default()
    };
    let refused = matches!(huge.validate(), Err(Error::Config(_)));
    let opted_in = BenchScenario {
        allow_huge: true,
        ..huge
    }
    .validate()
    .is_ok();
    report(
        8,
        "declared not reproducible",
        refused && opted_in,
        start.elapsed(),
        &format!(
            "absolute wall-clock values are hardware-specific and not compared; the N=1e8 row is refused by \
             default ({refused}) and needs --allow-huge ({opted_in}); criteria 4 and 5 stand in for them"
        ),
    );
}
