//! Thin command-line front end over the library: run scenarios, verify the
//! property suite, recompute metrics from recorded runs, and print averaging
//! baselines.
//!
//! Exit codes: 0 success, 2 scenario parse/validation failure, 3 simulation
//! abort or artifact I/O failure, 4 property-suite failure.

use clap::{Parser, Subcommand};
use netvmo::runner::{self, RunError};
use netvmo::scenario::{self, ScenarioError};
use netvmo::{metrics, se3};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "netvmo", version, about = "Distributed pose-averaging observer simulator for camera networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write series.csv and summary.txt
    Simulate {
        /// Scenario file
        scenario: PathBuf,
        /// Output directory for the artifacts
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Override the mutual feedback gain k_s
        #[arg(long)]
        ks: Option<f64>,
        /// Override the visual feedback gain k_e
        #[arg(long)]
        ke: Option<f64>,
        /// Override the integration step (seconds)
        #[arg(long)]
        dt: Option<f64>,
        /// Override the simulated horizon (seconds)
        #[arg(long)]
        tfinal: Option<f64>,
    },
    /// Run the seeded property-check suite
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Recompute analysis metrics from a recorded series.csv
    Report {
        series: PathBuf,
        scenario: PathBuf,
    },
    /// Print the averaging baseline of a scenario
    Mean { scenario: PathBuf },
}

const EXIT_SCENARIO: u8 = 2;
const EXIT_SIMULATION: u8 = 3;
const EXIT_SUITE: u8 = 4;

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

fn scenario_failure(e: ScenarioError) -> (u8, String) {
    (EXIT_SCENARIO, e.to_string())
}

fn run_failure(e: RunError) -> (u8, String) {
    let code = match &e {
        RunError::Scenario(_) | RunError::CsvParse { .. } | RunError::Read { .. } => EXIT_SCENARIO,
        RunError::Simulation(_) | RunError::Write { .. } | RunError::Graph(_)
        | RunError::Metrics(_) => EXIT_SIMULATION,
    };
    (code, e.to_string())
}

fn dispatch(command: Command) -> Result<(), (u8, String)> {
    match command {
        Command::Simulate { scenario: path, out, ks, ke, dt, tfinal } => {
            let mut s = scenario::load_scenario(&path).map_err(scenario_failure)?;
            if let Some(ks) = ks {
                s.gains.k_s = ks;
            }
            if let Some(ke) = ke {
                s.gains.k_e = ke;
            }
            if let Some(dt) = dt {
                s.integration.dt = dt;
            }
            if let Some(tfinal) = tfinal {
                s.integration.t_final = tfinal;
            }
            let reparsed = scenario::parse_scenario(&scenario::serialize(&s))
                .map_err(scenario_failure)?;
            let artifacts = runner::run(&reparsed, &out).map_err(run_failure)?;
            println!("wrote {}", artifacts.series_path.display());
            println!("wrote {}", artifacts.summary_path.display());
            println!(
                "settled U_p = {:.6e}, settled U_R = {:.6e} over the last {:.0}% of the run",
                artifacts.summary.settled_u_p,
                artifacts.summary.settled_u_r,
                100.0 * artifacts.summary.tail_fraction,
            );
            Ok(())
        }
        Command::Verify { seed, trials } => {
            let report = runner::property_suite(seed, trials);
            print!("{}", report.render());
            if report.passed {
                Ok(())
            } else {
                Err((EXIT_SUITE, "property-check suite failed".into()))
            }
        }
        Command::Report { series, scenario: path } => {
            let s = scenario::load_scenario(&path).map_err(scenario_failure)?;
            let text = runner::report_from_csv(&series, &s).map_err(run_failure)?;
            print!("{text}");
            Ok(())
        }
        Command::Mean { scenario: path } => {
            let s = scenario::load_scenario(&path).map_err(scenario_failure)?;
            let (net, _, _) = scenario::build(&s).map_err(scenario_failure)?;
            let b = metrics::baseline(&net, s.analysis.zeta_margin)
                .map_err(|e| (EXIT_SCENARIO, e.to_string()))?;
            let p = b.g_star.position;
            println!("p_star = {} {} {}", p[0], p[1], p[2]);
            match se3::log_so3(&b.g_star.rotation) {
                Ok(xi) => println!("xitheta_star = {} {} {}", xi[0], xi[1], xi[2]),
                Err(_) => println!("xitheta_star = nan nan nan"),
            }
            println!("rho_p = {}", b.rho_p);
            println!("rho_R = {}", b.rho_r);
            println!("phi_m = {}", b.phi_m);
            println!("zeta = {}", b.zeta);
            println!("beta = {}", b.beta);
            Ok(())
        }
    }
}
