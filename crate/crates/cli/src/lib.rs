//! The `cockedhat` command-line driver.

pub mod commands;
pub mod config;
pub mod error;
pub mod model_spec;
pub mod scenario_file;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{
    CommandKind, CounterexampleArg, ExperimentConfig, FormulationArg, KindArg, QuantityArg,
    ScenarioSource,
};
use crate::error::{CliError, CliResult};
use crate::model_spec::parse_angle;
use crate::scenario_file::parse_pair;

/// Environment variable holding the worker-thread count.
pub const THREADS_ENV: &str = "COCKEDHAT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "cockedhat",
    version,
    about = "Cocked-hat probability experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario file (`P x y` per site, `F x y` for the target).
    #[arg(long, conflicts_with_all = ["points", "target"])]
    scenario: Option<PathBuf>,
    /// Inline sites as `x,y;x,y;...`.
    #[arg(long, requires = "target", allow_hyphen_values = true)]
    points: Option<String>,
    /// Inline target as `x,y`.
    #[arg(long, requires = "points", allow_hyphen_values = true)]
    target: Option<String>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// CSV report path.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Write the experiment config as JSON before running it.
    #[arg(long)]
    save_config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo estimate of a hat or unbounded-cell probability.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, allow_hyphen_values = true)]
        model: String,
        #[arg(long, value_enum, default_value_t = QuantityArg::Hat)]
        quantity: QuantityArg,
        #[arg(long, value_enum, default_value_t = FormulationArg::Constrained)]
        formulation: FormulationArg,
        #[arg(long, default_value_t = commands::DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact probability by enumerating two-ray selections.
    Exact {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, allow_hyphen_values = true)]
        model: String,
        #[arg(long, value_enum, default_value_t = QuantityArg::Hat)]
        quantity: QuantityArg,
        #[arg(long, value_enum, default_value_t = FormulationArg::Constrained)]
        formulation: FormulationArg,
        /// Largest site count enumerated.
        #[arg(long, default_value_t = cocked_hat::estimators::DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tangent-circle reduction and special selections.
    Special {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, allow_hyphen_values = true, requires = "scenario")]
        model: Option<String>,
        /// Generate a random valid two-ray configuration with this many sites.
        #[arg(long, conflicts_with_all = ["scenario", "points"])]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = cocked_hat::estimators::DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build and verify a counterexample configuration.
    Counterexample {
        #[arg(value_enum, ignore_case = true)]
        id: CounterexampleArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Count the regions of a line arrangement.
    Regions {
        /// A line as `X,Y,ANGLE`; repeat for more lines.
        #[arg(long = "line", required = true, allow_hyphen_values = true)]
        lines: Vec<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Generate a random scenario with a validated error model.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = KindArg::Interval)]
        kind: KindArg,
        /// Restrict to one hull case (three sites only).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        case: Option<u8>,
        #[arg(long, short)]
        output: PathBuf,
        #[arg(long)]
        save_config: Option<PathBuf>,
    },
    /// The eight sign selections of a three-site two-ray model.
    Table {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, allow_hyphen_values = true)]
        model: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run an experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn scenario_source(args: ScenarioArgs) -> CliResult<Option<ScenarioSource>> {
    if let Some(path) = args.scenario {
        return Ok(Some(ScenarioSource::File(path)));
    }
    let (Some(points), Some(target)) = (args.points, args.target) else {
        return Ok(None);
    };
    let bad = |m: String| CliError::Usage(format!("inline scenario: {m}"));
    let points = points
        .split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| parse_pair(p).map(|q| [q.x, q.y]))
        .collect::<Result<Vec<_>, _>>()
        .map_err(bad)?;
    let t = parse_pair(&target).map_err(bad)?;
    Ok(Some(ScenarioSource::Inline {
        points,
        target: [t.x, t.y],
    }))
}

fn parse_line(text: &str) -> CliResult<[f64; 3]> {
    let bad = |m: String| CliError::Usage(format!("--line {text:?}: {m}"));
    let parts: Vec<&str> = text.split(',').collect();
    let [x, y, a] = parts[..] else {
        return Err(bad("expected X,Y,ANGLE".into()));
    };
    let coord = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad(format!("{s:?} is not a finite number")))
    };
    Ok([coord(x)?, coord(y)?, parse_angle(a).map_err(bad)?])
}

/// The config a command line denotes, plus where to save it.
fn to_config(command: Command) -> CliResult<(ExperimentConfig, Option<PathBuf>)> {
    let mut c;
    let save = match command {
        Command::Simulate {
            scenario,
            model,
            quantity,
            formulation,
            trials,
            seed,
            out,
        } => {
            c = ExperimentConfig::new(CommandKind::Simulate);
            c.scenario = scenario_source(scenario)?;
            c.model = Some(model);
            c.quantity = Some(quantity);
            c.formulation = Some(formulation);
            c.trials = Some(trials);
            c.seed = Some(seed);
            c.output = out.output;
            out.save_config
        }
        Command::Exact {
            scenario,
            model,
            quantity,
            formulation,
            cap,
            out,
        } => {
            c = ExperimentConfig::new(CommandKind::Exact);
            c.scenario = scenario_source(scenario)?;
            c.model = Some(model);
            c.quantity = Some(quantity);
            c.formulation = Some(formulation);
            c.cap = Some(cap);
            c.output = out.output;
            out.save_config
        }
        Command::Special {
            scenario,
            model,
            n,
            seed,
            cap,
            out,
        } => {
            c = ExperimentConfig::new(CommandKind::Special);
            c.scenario = scenario_source(scenario)?;
            c.model = model;
            c.n = n;
            c.seed = seed;
            c.cap = Some(cap);
            c.output = out.output;
            out.save_config
        }
        Command::Counterexample { id, out } => {
            c = ExperimentConfig::new(CommandKind::Counterexample);
            c.counterexample = Some(id);
            c.output = out.output;
            out.save_config
        }
        Command::Regions { lines, out } => {
            c = ExperimentConfig::new(CommandKind::Regions);
            c.lines = lines
                .iter()
                .map(|l| parse_line(l))
                .collect::<CliResult<_>>()?;
            c.output = out.output;
            out.save_config
        }
        Command::Gen {
            n,
            seed,
            kind,
            case,
            output,
            save_config,
        } => {
            c = ExperimentConfig::new(CommandKind::Gen);
            c.n = Some(n);
            c.seed = Some(seed);
            c.kind = Some(kind);
            c.case = case;
            c.output = Some(output);
            save_config
        }
        Command::Table {
            scenario,
            model,
            out,
        } => {
            c = ExperimentConfig::new(CommandKind::Table);
            c.scenario = scenario_source(scenario)?;
            c.model = Some(model);
            c.output = out.output;
            out.save_config
        }
        Command::Run { config } => {
            c = ExperimentConfig::load(&config)?;
            None
        }
    };
    Ok((c, save))
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            CliError::Usage(format!("{THREADS_ENV}={value:?} is not a positive integer"))
        })?;
    // A pool built earlier in the same process stays in force.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    configure_threads()?;
    let (config, save) = to_config(cli.command)?;
    if let Some(path) = save {
        config.save(&path)?;
    }
    commands::execute(&config, out)
}

/// Parse `args` (program name first), run, and return the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["cockedhat"];
        argv.extend_from_slice(args);
        let code = run_with(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn inline_exact() {
        let (code, out, _) = run_capture(&[
            "exact",
            "--points",
            "0,1;-0.8660254037844386,-0.5;0.8660254037844386,-0.5",
            "--target",
            "0,0",
            "--model",
            "tworay:±10deg",
        ]);
        assert_eq!(code, 0);
        assert!(out.starts_with("2/8 = 0.25\n"), "{out}");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_capture(&["frobnicate"]).0, 2);
        assert_eq!(run_capture(&["exact", "--model", "tworay:±10deg"]).0, 2);
        assert_eq!(run_capture(&["regions", "--line", "1,2"]).0, 2);
        let (code, _, err) = run_capture(&[
            "exact", "--points", "0,1", "--target", "0,0", "--model", "gauss:1",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("gauss"), "{err}");
        assert_eq!(run_capture(&["--help"]).0, 0);
    }

    #[test]
    fn validation_errors_exit_one() {
        let (code, _, err) = run_capture(&[
            "exact",
            "--points",
            "0,1;-0.8660254037844386,-0.5;0.8660254037844386,-0.5",
            "--target",
            "0,0",
            "--model",
            "tworay:±80deg",
        ]);
        assert_eq!(code, 1, "{err}");
    }

    #[test]
    fn regions_and_counterexample() {
        let (code, out, _) = run_capture(&[
            "regions",
            "--line",
            "0,0,0",
            "--line",
            "0,0,90deg",
            "--line",
            "0,1,45deg",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "regions: 7\n");
        let (code, out, _) = run_capture(&["counterexample", "CE1"]);
        assert_eq!(code, 0);
        assert_eq!(
            out,
            "conjunction 1/8, conditional 1/1, properties: 4/4 verified\n"
        );
    }

    #[test]
    fn special_generates() {
        let (code, out, _) = run_capture(&["special", "--n", "4", "--seed", "7"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("special selections: 8 of 16\n"), "{out}");
    }
}
