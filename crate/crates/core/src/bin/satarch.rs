use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use satarch_core::bench::{
    cmd_optimize, cmd_report, cmd_simulate, cmd_sweep, cmd_train, emergence, ExperimentPlan, Family, SweepCase,
    SweepSpec,
};
use satarch_core::scenario::{baseline_chemical, baseline_electric, load_scenario};
use satarch_core::{Error, Result, Scenario};

#[derive(Parser)]
#[command(name = "satarch", version, about = "Satellite architecting under on-orbit refueling")]
struct Cli {
    /// Scenario file, or `chemical` / `electric` for the built-in baselines.
    #[arg(long, global = true, default_value = "chemical")]
    scenario: String,
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo replicates per design point.
    #[arg(long, global = true)]
    replicates: Option<usize>,
    /// Output directory (default `out/<scenario name>`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// CI profile: 100 replicates, population 50, 100 generations.
    #[arg(long, global = true)]
    fast: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the training-grid campaign and write d1.csv / d2.csv.
    Simulate,
    /// Fit and score all kernels, save models and scores.
    Train,
    /// Optimize the saved surrogates, write front.csv and heatmaps.
    Optimize,
    /// Run the whole pipeline per parametric-study case.
    Sweep {
        #[arg(long, value_enum, default_value = "chemical")]
        family: FamilyArg,
        /// Comma-separated cases: `cap-cost` for chemical, `cost` for electric.
        /// Defaults to the full table.
        #[arg(long)]
        cases: Option<String>,
    },
    /// Summarize a finished directory into report.txt.
    Report,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Chemical,
    Electric,
}

fn scenario_from(arg: &str) -> Result<Scenario> {
    match arg {
        "chemical" | "baseline_chemical" => Ok(baseline_chemical()),
        "electric" | "baseline_electric" => Ok(baseline_electric()),
        path => load_scenario(Path::new(path)),
    }
}

fn parse_cases(family: Family, text: &str) -> Result<Vec<SweepCase>> {
    let bad = |s: &str| Error::Invariant {
        key: "cases".into(),
        reason: format!("cannot parse `{s}`"),
    };
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let nums = s
                .split('-')
                .map(|n| n.parse::<usize>().map_err(|_| bad(s)))
                .collect::<Result<Vec<_>>>()?;
            match (family, nums.as_slice()) {
                (Family::Chemical, [capacity, cost]) => Ok(SweepCase {
                    capacity: *capacity,
                    cost: *cost,
                }),
                (Family::Electric, [cost]) => Ok(SweepCase {
                    capacity: 1,
                    cost: *cost,
                }),
                _ => Err(bad(s)),
            }
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    let scenario = scenario_from(&cli.scenario)?;
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(scenario.name.clone().unwrap_or_else(|| "scenario".into())));
    let mut plan = ExperimentPlan::new(scenario, cli.seed, out)?;
    if cli.fast {
        plan = plan.fast();
    }
    if let Some(n) = cli.replicates {
        plan.replicates = n;
    }
    plan.validate()?;

    match cli.cmd {
        Cmd::Simulate => {
            let rows = cmd_simulate(&plan)?;
            println!("wrote {} points to {}", rows.len(), plan.out_dir.display());
        }
        Cmd::Train => print!("{}", cmd_train(&plan)?.render()),
        Cmd::Optimize => {
            let front = cmd_optimize(&plan)?;
            println!(
                "front: {} solutions, propellant-reduced emergence: {}",
                front.len(),
                emergence(&plan, &front)?
            );
        }
        Cmd::Sweep { family, cases } => {
            let family = match family {
                FamilyArg::Chemical => Family::Chemical,
                FamilyArg::Electric => Family::Electric,
            };
            let mut spec = match family {
                Family::Chemical => SweepSpec::chemical_full(),
                Family::Electric => SweepSpec::electric_full(),
            };
            if let Some(text) = cases {
                spec.cases = parse_cases(family, &text)?;
            }
            for r in cmd_sweep(&plan, &spec)? {
                println!("{:<20} emergence={}", r.name, r.emergence);
            }
        }
        Cmd::Report => print!("{}", cmd_report(&plan)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
