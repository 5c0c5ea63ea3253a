//! Command-line front end: build verification strategies, print test
//! counts and thresholds, run Monte Carlo simulations, and emit the data
//! behind the entanglement-detection figures as CSV.
//!
//! Human-readable results go to stdout; machine CSV/JSON goes behind
//! `--out`. Every command is deterministic given its flags and seed
//! (`--seed`, falling back to the `ENTVERIFY_SEED` environment variable).
//! Errors exit nonzero with a single `error: ...` line on stderr.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use entverify_core::counting::{self, Scenario};
use entverify_core::robustness::{ppt_beta_witness, robustness_quantities, SchmidtVector};
use entverify_core::sim::{self, NoisyStateModel};
use entverify_core::strategy::{mub_strategy, Strategy};

#[derive(Parser)]
#[command(
    name = "entverify",
    version,
    about = "Verification strategies and test counts for maximally entangled states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an MUB strategy, classify it, and optionally homogenize it.
    Strategy(StrategyArgs),
    /// Evaluate a test-count formula.
    Count(CountArgs),
    /// Emit the data behind the entanglement-detection figures as CSV.
    Figure(FigureArgs),
    /// Simulate the protocol on a noisy state and estimate the fidelity.
    Simulate(SimulateArgs),
    /// Robustness quantities of a bipartite pure state.
    Robustness(RobustnessArgs),
}

#[derive(Args)]
struct StrategyArgs {
    /// Local dimension.
    #[arg(long)]
    d: usize,
    /// Number of mutually unbiased bases (2..=3 for any d, up to d+1 for prime d).
    #[arg(long)]
    g: usize,
    /// Homogenize to this beta by mixing in the trivial test.
    #[arg(long)]
    lambda: Option<f64>,
    /// Write the strategy as JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    Nonadversarial,
    AdversarialSingular,
    AdversarialHomogeneous,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, value_enum)]
    scenario: ScenarioArg,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    delta: f64,
    /// Spectral gap ν(Ω) (nonadversarial / adversarial-singular).
    #[arg(long, conflicts_with_all = ["lambda", "d"])]
    nu: Option<f64>,
    /// Homogeneous parameter λ = β(Ω) (adversarial-homogeneous).
    #[arg(long, conflicts_with = "d")]
    lambda: Option<f64>,
    /// Use the optimal strategy for this dimension: ν = d/(d+1), λ = 1/(d+1).
    #[arg(long)]
    d: Option<usize>,
    /// Append the result as a CSV row to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FigureArgs {
    /// Which figure: `ed` (tests vs dimension) or `ed-one-test` (λ± interval).
    name: String,
    #[arg(long)]
    delta: f64,
    /// Largest dimension in the sweep (`ed`: default 100; `ed-one-test`: d*+50).
    #[arg(long)]
    d_max: Option<u64>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Depolarized,
    Worst,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    g: usize,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    n: u64,
    /// RNG seed; falls back to ENTVERIFY_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "depolarized")]
    model: ModelArg,
    /// Homogenize the strategy to this beta before simulating.
    #[arg(long)]
    lambda: Option<f64>,
    /// Write the run result and estimates as JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RobustnessArgs {
    /// Comma-separated Schmidt coefficients, e.g. 0.8944,0.4472.
    #[arg(long, conflicts_with = "d")]
    schmidt: Option<String>,
    /// Use the maximally entangled state of this dimension.
    #[arg(long)]
    d: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Strategy(args) => cmd_strategy(args),
        Command::Count(args) => cmd_count(args),
        Command::Figure(args) => cmd_figure(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Robustness(args) => cmd_robustness(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {}", message.replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}

/// Twelve significant digits, stable across platforms.
fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn write_output(path: &PathBuf, contents: &str) -> Result<(), String> {
    fs::write(path, contents).map_err(|e| format!("writing {}: {e}", path.display()))
}

fn build_cli_strategy(d: usize, g: usize, lambda: Option<f64>) -> Result<Strategy, String> {
    let base = mub_strategy(d, g).map_err(|e| e.to_string())?;
    match lambda {
        Some(lambda) => base.homogenize(lambda).map_err(|e| e.to_string()),
        None => Ok(base),
    }
}

fn cmd_strategy(args: StrategyArgs) -> Result<(), String> {
    let strategy = build_cli_strategy(args.d, args.g, args.lambda)?;
    let flags = strategy.flags();
    println!(
        "strategy: d={} g={} tests={}",
        args.d,
        args.g,
        strategy.tests().len()
    );
    println!("beta = {}", fmt_float(strategy.beta()));
    println!("nu   = {}", fmt_float(strategy.nu()));
    println!(
        "flags: parsimonious={} optimal={} perfect={} homogeneous={} singular={}",
        flags.parsimonious, flags.optimal, flags.perfect, flags.homogeneous, flags.singular
    );
    if let Some((test, p)) = strategy.tests().iter().find(|(t, _)| t.is_trivial()) {
        let _ = test;
        println!("trivial test probability p = {}", fmt_float(*p));
    }
    if let Some(out) = args.out {
        let json = serde_json::to_string_pretty(&strategy.to_json()).map_err(|e| e.to_string())?;
        write_output(&out, &json)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_count(args: CountArgs) -> Result<(), String> {
    let scenario = match args.scenario {
        ScenarioArg::Nonadversarial => Scenario::Nonadversarial,
        ScenarioArg::AdversarialSingular => Scenario::AdversarialSingular,
        ScenarioArg::AdversarialHomogeneous => Scenario::AdversarialHomogeneous,
    };
    let (epsilon, delta) = (args.epsilon, args.delta);
    let parameter = match (args.nu, args.lambda, args.d) {
        (Some(nu), None, None) => nu,
        (None, Some(lambda), None) => lambda,
        (None, None, Some(d)) => match scenario {
            Scenario::AdversarialHomogeneous => 1.0 / (d as f64 + 1.0),
            _ => d as f64 / (d as f64 + 1.0),
        },
        _ => return Err("give exactly one of --nu, --lambda, --d".into()),
    };

    let (n, detail) = match scenario {
        Scenario::Nonadversarial => {
            let n = counting::tests_nonadversarial(epsilon, delta, parameter)
                .map_err(|e| e.to_string())?;
            let one = counting::one_test_nonadversarial(epsilon, delta, parameter);
            (n, format!("one_test={one}"))
        }
        Scenario::AdversarialSingular => {
            let n = counting::tests_adversarial_singular(epsilon, delta, parameter)
                .map_err(|e| e.to_string())?;
            (n, "branch=min{(1-δ)/(νδε), 1/(δε)-1}".to_string())
        }
        Scenario::AdversarialHomogeneous => {
            let plan = counting::tests_adversarial_homogeneous(epsilon, delta, parameter)
                .map_err(|e| e.to_string())?;
            (
                plan.tests,
                format!(
                    "k_star={} one_test={}",
                    plan.k_star.unwrap_or(0),
                    plan.one_test
                ),
            )
        }
    };

    let label = match scenario {
        Scenario::Nonadversarial => "nonadversarial",
        Scenario::AdversarialSingular => "adversarial-singular",
        Scenario::AdversarialHomogeneous => "adversarial-homogeneous",
    };
    println!(
        "scenario={label} epsilon={} delta={} parameter={}",
        fmt_float(epsilon),
        fmt_float(delta),
        fmt_float(parameter)
    );
    println!("N = {n}   ({detail})");

    if let Some(out) = args.out {
        let mut csv = String::from("scenario,epsilon,delta,parameter,n\r\n");
        let _ = writeln!(
            csv,
            "{label},{},{},{},{n}\r",
            fmt_float(epsilon),
            fmt_float(delta),
            fmt_float(parameter)
        );
        write_output(&out, &csv)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn figure_ed(delta: f64, d_max: u64) -> Result<String, String> {
    let mut csv = String::from("d,n_nonadversarial,n_adversarial\r\n");
    for d in 2..=d_max {
        let n_nonadv = counting::entanglement_tests_nonadversarial_optimal(d as usize, delta)
            .map_err(|e| e.to_string())?;
        // Fig. 3's homogeneous choice β(Ω) = 2/(d+1).
        let lambda = 2.0 / (d as f64 + 1.0);
        let n_adv = counting::entanglement_tests_adversarial(d as usize, delta, lambda)
            .map_err(|e| e.to_string())?;
        let _ = writeln!(csv, "{d},{n_nonadv},{n_adv}\r");
    }
    Ok(csv)
}

fn figure_ed_one_test(delta: f64, d_max: Option<u64>) -> Result<String, String> {
    let threshold = counting::one_test_threshold(delta).map_err(|e| e.to_string())?;
    let d_star = threshold.d_star;
    let last = d_max.unwrap_or(d_star + 50).max(d_star);
    let mut csv = String::from(
        "d,lambda_minus,lambda_plus,two_over_d_plus_1,one_minus_sqrt_one_minus_delta,one_over_d_plus_1\r\n",
    );
    for d in d_star..=last {
        let (lo, hi) = threshold.lambda_bounds(d).map_err(|e| e.to_string())?;
        let df = d as f64;
        let _ = writeln!(
            csv,
            "{d},{},{},{},{},{}\r",
            fmt_float(lo),
            fmt_float(hi),
            fmt_float(2.0 / (df + 1.0)),
            fmt_float(1.0 - (1.0 - delta).sqrt()),
            fmt_float(1.0 / (df + 1.0))
        );
    }
    Ok(csv)
}

fn cmd_figure(args: FigureArgs) -> Result<(), String> {
    let csv = match args.name.as_str() {
        "ed" => figure_ed(args.delta, args.d_max.unwrap_or(100)),
        "ed-one-test" => figure_ed_one_test(args.delta, args.d_max),
        other => Err(format!(
            "unknown figure `{other}` (expected `ed` or `ed-one-test`)"
        )),
    }?;
    match args.out {
        Some(out) => {
            write_output(&out, &csv)?;
            println!("wrote {}", out.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), String> {
    let seed = args.seed.unwrap_or_else(|| {
        std::env::var("ENTVERIFY_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(0)
    });
    let strategy = build_cli_strategy(args.d, args.g, args.lambda)?;
    let model: NoisyStateModel = match args.model {
        ModelArg::Depolarized => {
            sim::depolarized_state(args.d, args.epsilon).map_err(|e| e.to_string())?
        }
        ModelArg::Worst => sim::worst_case_state(&strategy, args.epsilon),
    };
    let run = sim::run_protocol(&strategy, &model, args.n, seed).map_err(|e| e.to_string())?;
    let analytic = sim::analytic_pass_probability(&strategy, &model);

    println!(
        "simulate: d={} g={} model={} n={} seed={seed}",
        args.d,
        args.g,
        match args.model {
            ModelArg::Depolarized => "depolarized",
            ModelArg::Worst => "worst",
        },
        args.n
    );
    println!("passes   = {}/{}", run.passes, run.trials);
    println!("empirical rate = {}", fmt_float(run.pass_rate()));
    println!("analytic rate  = {}", fmt_float(analytic));

    let mut estimate_json = serde_json::Value::Null;
    if strategy.flags().optimal {
        let (estimate, stderr) =
            sim::estimate_fidelity(&strategy, &run).map_err(|e| e.to_string())?;
        println!(
            "fidelity estimate = {} ± {}",
            fmt_float(estimate),
            fmt_float(stderr)
        );
        estimate_json = serde_json::json!({ "fidelity": estimate, "stderr": stderr });
    } else {
        println!("fidelity estimate skipped (strategy not optimal)");
    }

    if let Some(out) = args.out {
        let json = serde_json::json!({
            "run": run.to_json(),
            "analytic_rate": analytic,
            "estimate": estimate_json,
        });
        let text = serde_json::to_string_pretty(&json).map_err(|e| e.to_string())?;
        write_output(&out, &text)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_robustness(args: RobustnessArgs) -> Result<(), String> {
    let schmidt = match (args.schmidt, args.d) {
        (Some(list), None) => {
            let coeffs: Result<Vec<f64>, _> =
                list.split(',').map(|s| s.trim().parse::<f64>()).collect();
            SchmidtVector::new(coeffs.map_err(|e| format!("parsing --schmidt: {e}"))?)
                .map_err(|e| e.to_string())?
        }
        (None, Some(d)) => SchmidtVector::maximally_entangled(d).map_err(|e| e.to_string())?,
        _ => return Err("give exactly one of --schmidt, --d".into()),
    };
    let report = robustness_quantities(&schmidt);
    println!("d = {}, D = {}", schmidt.dim(), report.big_d);
    println!("E_R = {}", fmt_float(report.e_r));
    println!("R   = {}", fmt_float(report.random_robustness));
    println!("T   = {}", fmt_float(report.t));
    println!(
        "beta lower bound (separable)   = {}",
        fmt_float(report.beta_lower_separable)
    );
    println!(
        "beta lower bound (homogeneous) = {}",
        fmt_float(report.beta_lower_homogeneous)
    );
    match ppt_beta_witness(&schmidt) {
        Ok(witness) => println!(
            "PPT witness (-min eigenvalue of partial transpose) = {}",
            fmt_float(witness)
        ),
        Err(e) => println!("PPT witness skipped: {e}"),
    }
    Ok(())
}
