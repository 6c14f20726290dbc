use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use multilayer_heat::bench::convergence::{ManufacturedSolution, MeshKind, StudyConfig};
use multilayer_heat::bench::{
    bench, convergence_study, emit, verify_op_counts, BenchScenario, ConvergenceCase, ConvergenceReport, RowStatus,
    RunMetadata,
};
use multilayer_heat::config::Config;
use multilayer_heat::solvers::SolverId;
use multilayer_heat::time_stepper::{run, TemperatureField};
use multilayer_heat::{Error, Result};

#[derive(Parser)]
#[command(name = "mlheat", version, about = "Multilayer cylinder heat conduction: band solver benchmarks and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time and check every solver on constructed-solution systems.
    Bench(Common),
    /// Check the operation-count slopes in N and K.
    VerifyCounts(Common),
    /// Manufactured-solution spatial convergence study.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Built-in cases to run (single-layer, two-layer, randomized).
        #[arg(long, value_delimiter = ',', value_parser = parse_case)]
        case: Vec<ConvergenceCase>,
    },
    /// Time-step the configured problem and write the trajectory.
    Simulate(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// TOML file with layers and materials, optionally `[simulate]` and `[bench]`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated system sizes; `1e5` style is accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    n: Vec<usize>,
    /// Number of contact nodes in the benchmark geometry.
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated solver names or `all`.
    #[arg(long, value_delimiter = ',')]
    solvers: Vec<String>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (CSV, or JSON for verify-counts).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest N handed to the exact solvers.
    #[arg(long)]
    exact_cap: Option<usize>,
    /// Permit N above 10^7.
    #[arg(long)]
    allow_huge: bool,
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1e18 => Ok(v as usize),
        _ => Err(format!("'{s}' is not a non-negative integer")),
    }
}

fn parse_case(s: &str) -> std::result::Result<ConvergenceCase, String> {
    ConvergenceCase::ALL
        .into_iter()
        .find(|c| c.as_str() == s)
        .ok_or_else(|| format!("unknown case '{s}'"))
}

fn parse_solvers(names: &[String]) -> Result<Vec<SolverId>> {
    if names.iter().any(|s| s.eq_ignore_ascii_case("all")) {
        return Ok(SolverId::ALL.to_vec());
    }
    names.iter().map(|s| s.parse()).collect()
}

fn load_config(common: &Common) -> Result<Option<Config>> {
    common.config.as_deref().map(Config::load).transpose()
}

fn scenario(common: &Common, config: Option<&Config>, default_n: &[usize]) -> Result<BenchScenario> {
    let mut s = config.and_then(|c| c.bench.clone()).unwrap_or_else(|| BenchScenario {
        n_values: default_n.to_vec(),
        ..BenchScenario::default()
    });
    if !common.n.is_empty() {
        s.n_values = common.n.clone();
    }
    if !common.solvers.is_empty() {
        s.solvers = parse_solvers(&common.solvers)?;
    }
    if let Some(k) = common.k {
        s.k = k;
    }
    if let Some(reps) = common.reps {
        s.reps = reps;
    }
    if let Some(seed) = common.seed {
        s.seed = seed;
    }
    if let Some(cap) = common.exact_cap {
        s.exact_cap = cap;
    }
    s.allow_huge |= common.allow_huge;
    s.validate()?;
    Ok(s)
}

fn run_bench(common: &Common) -> Result<bool> {
    let config = load_config(common)?;
    let s = scenario(common, config.as_ref(), &BenchScenario::default().n_values)?;
    let report = bench(&s)?;
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("bench.csv"));
    let meta = RunMetadata::for_report(&report);
    emit(&report, &out, &mut std::io::stdout().lock(), Some(&meta))?;
    for (n, rows) in &report.extended_rows {
        if *rows > 0 {
            println!("N = {n}: reduced shift extended {rows} rows");
        }
    }
    println!("wrote {} and {}", out.display(), out.with_extension("json").display());
    Ok(report.rows.iter().all(|r| !matches!(r.status, RowStatus::Failed(_))))
}

fn run_verify_counts(common: &Common) -> Result<bool> {
    let config = load_config(common)?;
    let s = scenario(common, config.as_ref(), &[1_000, 2_000, 4_000])?;
    let report = verify_op_counts(&s)?;
    println!("K = {}", report.k);
    for c in &report.checks {
        let counts: Vec<String> = c.counts.iter().map(|(n, v)| format!("{n}:{v}")).collect();
        println!(
            "{:>6}  slope {:>2}  measured {:?}  constant {} (reference {})  counts [{}]  {}",
            c.solver.as_str(),
            c.expected_slope,
            c.slopes,
            c.constant,
            c.reference_constant,
            counts.join(", "),
            verdict(c.pass)
        );
    }
    let k = &report.k_slope;
    println!(
        "K {} -> {} at N = {}: MNPDM +{} (expected +{}), NPDM +{}  {}",
        k.k_low,
        k.k_high,
        k.n,
        k.mnpdm_diff,
        k.expected_diff,
        k.npdm_diff,
        verdict(k.pass)
    );
    if let Some(out) = &common.out {
        let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.into()))?;
        std::fs::write(out, json)?;
    }
    Ok(report.pass)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn print_levels(label: &str, report: &ConvergenceReport, csv: &mut Option<csv::Writer<std::fs::File>>) -> Result<()> {
    println!("{label}");
    println!("{:>6} {:>6} {:>12} {:>12} {:>7} {:>12}", "factor", "N", "h_max", "tau", "steps", "err_inf");
    for l in &report.levels {
        println!(
            "{:>6} {:>6} {:>12.5e} {:>12.5e} {:>7} {:>12.5e}",
            l.factor, l.n, l.h_max, l.tau, l.steps, l.err_inf
        );
        if let Some(w) = csv {
            w.write_record([
                label.to_string(),
                l.factor.to_string(),
                l.n.to_string(),
                format!("{:e}", l.h_max),
                format!("{:e}", l.tau),
                l.steps.to_string(),
                format!("{:e}", l.err_inf),
            ])
            .map_err(|e| Error::Io(e.into()))?;
        }
    }
    let pairs: Vec<String> = report.pair_orders.iter().map(|p| format!("{p:.3}")).collect();
    println!(
        "orders [{}]  fitted {:.3}{}",
        pairs.join(", "),
        report.fitted_order,
        if report.conclusive { "" } else { "  (error not monotone)" }
    );
    Ok(())
}

fn run_converge(common: &Common, cases: &[ConvergenceCase]) -> Result<bool> {
    let config = load_config(common)?;
    let solvers = if common.solvers.is_empty() {
        vec![SolverId::Ntdm]
    } else {
        parse_solvers(&common.solvers)?
    };
    let seed = common.seed.unwrap_or(1);
    let mut csv = match &common.out {
        Some(p) => {
            let mut w = csv::Writer::from_path(p).map_err(|e| Error::Io(e.into()))?;
            w.write_record(["case", "factor", "N", "h_max", "tau", "steps", "err_inf"])
                .map_err(|e| Error::Io(e.into()))?;
            Some(w)
        }
        None => None,
    };
    let mut pass = true;
    for &solver in &solvers {
        if let Some(cfg) = &config {
            let solution = ManufacturedSolution::new(&cfg.layers, &cfg.materials, 1.0, 1.0)?;
            let study = StudyConfig {
                solver,
                mesh: MeshKind::PiecewiseUniform,
                ..StudyConfig::default()
            };
            let report = convergence_study(&cfg.layers, &cfg.materials, &solution, &study)?;
            print_levels(&format!("config/{solver}"), &report, &mut csv)?;
            let ok = ConvergenceCase::TwoLayer.meets_expectation(&report);
            println!("{}\n", verdict(ok));
            pass &= ok;
            continue;
        }
        let selected = if cases.is_empty() { &ConvergenceCase::ALL[..] } else { cases };
        for &case in selected {
            let report = case.run(solver, seed)?;
            print_levels(&format!("{}/{solver}", case.as_str()), &report, &mut csv)?;
            let ok = case.meets_expectation(&report);
            println!("{}\n", verdict(ok));
            pass &= ok;
        }
    }
    if let Some(w) = &mut csv {
        w.flush()?;
    }
    Ok(pass)
}

fn run_simulate(common: &Common) -> Result<bool> {
    let config = load_config(common)?.ok_or_else(|| Error::Config("simulate needs --config".into()))?;
    let mut sim = config
        .simulate
        .clone()
        .ok_or_else(|| Error::Config("config has no [simulate] section".into()))?;
    match parse_solvers(&common.solvers)?.as_slice() {
        [] => {}
        [one] => sim.solver = *one,
        _ => return Err(Error::Config("simulate takes a single solver".into())),
    }
    let cfg = sim.step_config();
    cfg.validate()?;
    let mesh = config.mesh()?;
    let trajectory = run(&mesh, &config.materials, &sim.initial_field(&mesh), &cfg, sim.steps, sim.stride)?;
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("trajectory.csv"));
    write_trajectory(&out, mesh.nodes(), &trajectory)?;
    let last = trajectory.last().expect("trajectory holds the initial field");
    let (lo, hi) = last
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let mut stdout = std::io::stdout().lock();
    writeln!(
        stdout,
        "{} nodes, {} steps of {} with {} ({:?} shift); t = {}: u in [{lo}, {hi}]",
        mesh.len(),
        sim.steps,
        cfg.tau,
        cfg.solver,
        cfg.shift,
        last.time
    )?;
    writeln!(stdout, "wrote {} ({} snapshots)", out.display(), trajectory.len())?;
    Ok(true)
}

fn write_trajectory(
    path: &Path,
    nodes: &[f64],
    trajectory: &[TemperatureField],
) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.into()))?;
    w.write_record(["time", "node", "r", "u"]).map_err(|e| Error::Io(e.into()))?;
    for field in trajectory {
        for (i, (r, u)) in nodes.iter().zip(&field.values).enumerate() {
            w.write_record([field.time.to_string(), i.to_string(), r.to_string(), format!("{u:e}")])
                .map_err(|e| Error::Io(e.into()))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Bench(c) => run_bench(c),
        Command::VerifyCounts(c) => run_verify_counts(c),
        Command::Converge { common, case } => run_converge(common, case),
        Command::Simulate(c) => run_simulate(c),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
