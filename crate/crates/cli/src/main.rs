//! `opwave`: config-driven runner for the spectral operator-kernel pipeline,
//! the classical reference solvers, and the claim-verification harness.
//!
//! Exit codes: 0 completed (including measured-only findings), 2 config
//! error, 3 oracle self-test failure, 4 numerical abort.

mod config;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use opwave_core::{
    analytic_oracle, compare, condition_check, crank_nicolson, matrix_elements, oracle_selftest,
    run_verify, schrodinger_general_solution, split_step, ComplexField, Deriv,
    Error as CoreError, EvolutionParams64, KernelOperators, KernelSetup, OracleCase,
    QuadratureRule,
};

const EXIT_CONFIG: i32 = 2;
const EXIT_ORACLE: i32 = 3;
const EXIT_NUMERICAL: i32 = 4;

#[derive(Parser)]
#[command(name = "opwave", version, about = "Spectral operator-kernel propagation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Flat dotted-key overrides, e.g. --set grids.n=2048
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Gram matrix and the no-real-roots side condition for the basis.
    BasisCheck(ConfigArgs),
    /// Hamiltonian matrix elements with symmetry/by-parts diagnostics.
    Hmatrix(ConfigArgs),
    /// Kernel coefficients, mu matrix, and the propagation symbol.
    Kernel(ConfigArgs),
    /// Constructed general solution evolved to the configured time.
    Propagate(ConfigArgs),
    /// Classical reference solvers on the configured problem.
    Reference(ConfigArgs),
    /// All claim checks; emits the findings report.
    Verify(ConfigArgs),
    /// Compare two exported field CSVs.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

fn main() {
    std::process::exit(run(Cli::parse()));
}

fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::BasisCheck(args) => with_config(&args, cmd_basis_check),
        Command::Hmatrix(args) => with_config(&args, cmd_hmatrix),
        Command::Kernel(args) => with_config(&args, cmd_kernel),
        Command::Propagate(args) => with_config(&args, cmd_propagate),
        Command::Reference(args) => with_config(&args, cmd_reference),
        Command::Verify(args) => with_config(&args, cmd_verify),
        Command::Compare { a, b } => cmd_compare(&a, &b).map_err(|e| (EXIT_CONFIG, e)),
    };
    match outcome {
        Ok(()) => 0,
        Err((code, err)) => {
            eprintln!("error: {err:#}");
            code
        }
    }
}

type CmdResult = std::result::Result<(), (i32, anyhow::Error)>;

fn with_config(args: &ConfigArgs, f: impl FnOnce(&RunConfig) -> Result<()>) -> CmdResult {
    let config = RunConfig::load(&args.config, &args.overrides).map_err(|e| (EXIT_CONFIG, e))?;
    f(&config).map_err(|e| (exit_code_for(&e), e))
}

/// Map library failures onto the documented exit codes.
fn exit_code_for(err: &anyhow::Error) -> i32 {
    if let Some(core) = err.downcast_ref::<CoreError>() {
        match core {
            CoreError::OracleSelfTest { .. } => EXIT_ORACLE,
            CoreError::NonFinite(_) | CoreError::SolverDiverged { .. } => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    } else {
        EXIT_NUMERICAL
    }
}

fn out_dir(config: &RunConfig) -> Result<PathBuf> {
    let dir = PathBuf::from(&config.output_dir);
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    Ok(dir)
}

fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn cmd_basis_check(config: &RunConfig) -> Result<()> {
    let dir = out_dir(config)?;
    let family = config.family()?;
    let report = condition_check(
        &family,
        config.spatial_grid()?,
        config.frequency_grid()?,
        config.kernel.epsilon,
    )?;
    write_artifact(&dir, "gram.csv", &opwave_core::export::matrix_csv(&report.gram))?;
    let json = serde_json::json!({
        "family": family.describe(),
        "epsilon": config.kernel.epsilon,
        "min_abs_ft": report.min_abs_ft,
        "condition_i_satisfied": report.condition_i_satisfied,
        "gram_hermitian_deviation": report.gram.hermitian_deviation(),
        "artifacts": ["gram.csv"],
    });
    write_artifact(&dir, "condition_report.json", &serde_json::to_string_pretty(&json)?)?;
    for (k, (&min_abs, &ok)) in report
        .min_abs_ft
        .iter()
        .zip(&report.condition_i_satisfied)
        .enumerate()
    {
        println!("condition-i element {k}: min|e^| = {min_abs:.3e} satisfied = {ok}");
    }
    Ok(())
}

fn cmd_hmatrix(config: &RunConfig) -> Result<()> {
    let dir = out_dir(config)?;
    let quad = QuadratureRule::TrapezoidOnGrid(config.spatial_grid()?);
    let r = matrix_elements(&config.family()?, &config.potential()?, &quad)?;
    write_artifact(&dir, "hamiltonian.csv", &opwave_core::export::matrix_csv(r.entries()))?;
    println!(
        "hmatrix: N = {} symmetry = {:.3e} by-parts = {:.3e} -> hamiltonian.csv",
        r.n_modes(),
        r.symmetry_deviation(),
        r.by_parts_max_diff()
    );
    Ok(())
}

fn cmd_kernel(config: &RunConfig) -> Result<()> {
    let dir = out_dir(config)?;
    let quad = QuadratureRule::TrapezoidOnGrid(config.spatial_grid()?);
    let r = matrix_elements(&config.family()?, &config.potential()?, &quad)?;
    let setup = KernelSetup::new(
        config.family()?,
        r,
        config.frequency_grid()?,
        config.kernel.epsilon,
        None,
    )?;
    let ops = KernelOperators::build(setup)?;
    write_artifact(&dir, "kernel_k.csv", &opwave_core::export::matrix_csv(&ops.coeffs.k))?;
    write_artifact(&dir, "kernel_mu.csv", &opwave_core::export::matrix_csv(&ops.coeffs.mu))?;
    write_artifact(&dir, "symbol.csv", &opwave_core::export::field_csv(ops.symbol.field()))?;
    let mut artifacts = vec![
        "kernel_k.csv".to_string(),
        "kernel_mu.csv".to_string(),
        "symbol.csv".to_string(),
    ];
    for (s, h) in ops.h_symbols.iter().enumerate() {
        let name = format!("h_symbol_{s:02}.csv");
        write_artifact(&dir, &name, &opwave_core::export::field_csv(h))?;
        artifacts.push(name);
    }
    let json = serde_json::json!({
        "family": ops.setup.family().describe(),
        "epsilon": config.kernel.epsilon,
        "discarded_mass": ops.coeffs.discarded_mass,
        "symbol_cross_check_max_abs": ops.symbol.cross_check_max_abs(),
        "artifacts": artifacts,
    });
    write_artifact(&dir, "kernel_report.json", &serde_json::to_string_pretty(&json)?)?;
    println!(
        "kernel: N = {} cross-check = {:.3e} max discarded mass = {:.3e}",
        ops.setup.n_modes(),
        ops.symbol.cross_check_max_abs(),
        ops.coeffs
            .discarded_mass
            .iter()
            .cloned()
            .fold(0.0f64, f64::max)
    );
    Ok(())
}

fn cmd_propagate(config: &RunConfig) -> Result<()> {
    let dir = out_dir(config)?;
    let sg = config.spatial_grid()?;
    let family = config.family()?;
    let f = ComplexField::from_fn_spatial(sg, |x| family.eval(0, x, Deriv::D0).unwrap());
    let quad = QuadratureRule::TrapezoidOnGrid(sg);
    let (psi, prov) = schrodinger_general_solution(
        &f,
        &family,
        &config.potential()?,
        config.frequency_grid()?,
        &quad,
        config.evolution.t,
        config.kernel.epsilon,
        config.kernel.growth_cap,
    )?;
    let psi_name = format!("psi_t{:.6}.csv", config.evolution.t);
    write_artifact(&dir, &psi_name, &opwave_core::export::field_csv(&psi))?;
    write_artifact(&dir, "symbol.csv", &opwave_core::export::field_csv(prov.symbol.field()))?;
    let json = serde_json::json!({
        "family": family.describe(),
        "n_modes": prov.n_modes,
        "epsilon": prov.epsilon,
        "t": config.evolution.t,
        "discarded_mass": prov.discarded_mass,
        "overflow_flagged_fraction": prov.overflow.fraction,
        "symbol_cross_check_max_abs": prov.symbol_cross_check_max_abs,
        "artifacts": [psi_name, "symbol.csv"],
    });
    write_artifact(&dir, "provenance.json", &serde_json::to_string_pretty(&json)?)?;
    println!(
        "propagate: t = {} overflow fraction = {:.3} -> provenance.json",
        config.evolution.t, prov.overflow.fraction
    );
    Ok(())
}

fn cmd_reference(config: &RunConfig) -> Result<()> {
    let dir = out_dir(config)?;
    let sg = config.spatial_grid()?;
    let family = config.family()?;
    let potential = config.potential()?;
    let params: EvolutionParams64 = config.evolution_params()?;
    let f = ComplexField::from_fn_spatial(sg, |x| family.eval(0, x, Deriv::D0).unwrap());

    let mut report = serde_json::Map::new();
    let mut artifacts = Vec::new();
    match crank_nicolson(&f, &potential, &params) {
        Ok((u, step_report)) => {
            write_artifact(&dir, "reference_cn.csv", &opwave_core::export::field_csv(&u))?;
            artifacts.push("reference_cn.csv".to_string());
            report.insert("cn_finite".into(), serde_json::json!(true));
            report.insert(
                "cn_max_step_growth".into(),
                serde_json::json!(step_report.max_step_growth),
            );
            // closed-form cross-check where one applies: the hermite ground
            // state is pi^(-1/4) times the unit Gaussian the oracle evolves
            if matches!(potential, opwave_core::Potential::Zero)
                && matches!(family, opwave_core::BasisFamily::Hermite { .. })
            {
                if let Ok(exact) = analytic_oracle(
                    OracleCase::FreeGaussianHeat,
                    &params,
                    params.total_time(),
                    sg,
                ) {
                    let amp = std::f64::consts::PI.powf(-0.25);
                    let scaled = exact.scale(opwave_core::C64::new(amp, 0.0));
                    let m = compare(&u, &scaled)?;
                    report.insert("cn_vs_oracle_rel_l2".into(), serde_json::json!(m.rel_l2));
                }
            }
            println!(
                "reference cn: completed {} steps, max growth {:.3e}",
                step_report.steps, step_report.max_step_growth
            );
        }
        Err(CoreError::SolverDiverged { step }) => {
            report.insert("cn_finite".into(), serde_json::json!(false));
            report.insert("cn_failed_step".into(), serde_json::json!(step));
            println!("reference cn: diverged at step {step} (reported, expected for ill-posed runs)");
        }
        Err(e) => return Err(e.into()),
    }
    match split_step(&f, &potential, &params) {
        Ok((u, step_report)) => {
            write_artifact(&dir, "reference_ss.csv", &opwave_core::export::field_csv(&u))?;
            artifacts.push("reference_ss.csv".to_string());
            report.insert("ss_finite".into(), serde_json::json!(true));
            report.insert(
                "ss_max_step_growth".into(),
                serde_json::json!(step_report.max_step_growth),
            );
            println!(
                "reference split-step: completed {} steps, max multiplier {:.3e}",
                step_report.steps, step_report.max_step_growth
            );
        }
        Err(CoreError::SolverDiverged { step }) => {
            report.insert("ss_finite".into(), serde_json::json!(false));
            report.insert("ss_failed_step".into(), serde_json::json!(step));
            println!(
                "reference split-step: diverged at step {step} (reported, expected for ill-posed runs)"
            );
        }
        Err(e) => return Err(e.into()),
    }
    report.insert("artifacts".into(), serde_json::json!(artifacts));
    write_artifact(
        &dir,
        "reference_report.json",
        &serde_json::to_string_pretty(&serde_json::Value::Object(report))?,
    )?;
    Ok(())
}

fn cmd_verify(config: &RunConfig) -> Result<()> {
    let dir = out_dir(config)?;
    oracle_selftest()?;
    let spec = config.verify_spec()?;
    let mut output = run_verify(&spec)?;
    output.report.run.generated_at_unix = Some(unix_now());
    for artifact in &output.artifacts {
        write_artifact(&dir, &artifact.path, &artifact.content)?;
    }
    write_artifact(&dir, "findings.json", &serde_json::to_string_pretty(&output.report)?)?;
    for record in &output.report.records {
        let headline = [
            "rel_l2",
            "rel_residual",
            "kernel_expansion_max_rel",
            "max_entry_drift",
            "satisfied_count",
            "rel_l2_cn",
            "cn_failed_step",
        ]
        .iter()
        .find_map(|k| record.metrics.get(*k).map(|v| format!("{k}={v:.3e}")))
        .unwrap_or_default();
        println!(
            "{}: verdict={} {}",
            record.claim.as_str(),
            record.verdict.as_str(),
            headline
        );
    }
    println!("findings written to {}", dir.join("findings.json").display());
    Ok(())
}

fn cmd_compare(a: &Path, b: &Path) -> Result<()> {
    let fa = opwave_core::export::parse_field_csv(
        &std::fs::read_to_string(a).with_context(|| format!("cannot read {}", a.display()))?,
    )?;
    let fb = opwave_core::export::parse_field_csv(
        &std::fs::read_to_string(b).with_context(|| format!("cannot read {}", b.display()))?,
    )?;
    let m = compare(&fa, &fb)?;
    let json = serde_json::json!({
        "rel_l2": m.rel_l2,
        "max_abs": m.max_abs,
        "overlap_re": m.overlap.re,
        "overlap_im": m.overlap.im,
    });
    println!("{}", serde_json::to_string_pretty(&json)?);
    Ok(())
}
