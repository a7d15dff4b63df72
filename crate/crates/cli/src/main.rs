//! Command-line front door: parse, build, solve, synthesize, render.
//!
//! Exit codes: 0 success, 1 parse/usage error, 2 build error,
//! 3 solver non-convergence (values are still printed, flagged on stderr).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use smgshield_core::game::Direction;
use smgshield_core::model::{build_game, parse_model, BuildOptions, Value};
use smgshield_core::oracle::{oracle_value, Objective, OracleBudget};
use smgshield_core::property::{
    parse_property, parse_props_file, BoundPath, BoundProperty, Property, ShieldAnnotation,
};
use smgshield_core::shields::{
    synthesize_optimal, synthesize_post_safety, synthesize_pre_safety, Threshold,
};
use smgshield_core::solver::{evaluate, SolveResult, SolverParams};
use smgshield_core::StochasticGame;
use smgshield_core::generators::{
    gen_ctf, gen_virus, gen_warehouse, CtfParams, VirusParams, WarehouseParams,
};

const EXIT_PARSE: u8 = 1;
const EXIT_BUILD: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "smgshield",
    about = "Solve turn-based stochastic multi-player games and synthesize shields",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate properties on a model and print their values.
    Check(RunArgs),
    /// Synthesize and render the shield a property's annotation describes.
    Shield(RunArgs),
    /// Emit one of the built-in case-study models.
    Generate {
        #[command(subcommand)]
        kind: GenKind,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Model file.
    #[arg(short, long)]
    model: PathBuf,
    /// Property string (overrides --props-file if both are given).
    #[arg(short, long)]
    prop: Option<String>,
    /// Property file, one property per line, `#` comments.
    #[arg(long)]
    props_file: Option<PathBuf>,
    /// Constant overrides, `name=value` (repeatable, comma-separable).
    #[arg(long = "const", value_name = "NAME=VALUE", value_delimiter = ',')]
    constants: Vec<String>,
    /// Value-iteration convergence threshold.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    /// Iteration cap for unbounded objectives.
    #[arg(long = "max-iter", default_value_t = 1_000_000)]
    max_iter: usize,
    /// Gain-estimation window for mean-payoff objectives.
    #[arg(long = "lra-window", default_value_t = 100)]
    lra_window: usize,
    /// Gain-settling tolerance for mean-payoff objectives.
    #[arg(long = "lra-tol", default_value_t = 1e-4)]
    lra_tol: f64,
    /// Write the rendered shield here instead of stdout (shield command).
    #[arg(long)]
    export_shield: Option<PathBuf>,
    /// Write the coalition strategy, one `state_id action_id action_label`
    /// line per state.
    #[arg(long)]
    export_strategy: Option<PathBuf>,
    /// Write the explicit-game dump.
    #[arg(long)]
    export_game: Option<PathBuf>,
    /// Turn deadlock states into self-loops instead of failing.
    #[arg(long)]
    fix_deadlocks: bool,
    /// State-space cap for the builder.
    #[arg(long, default_value_t = 5_000_000)]
    state_limit: usize,
    /// Print model and solver statistics to stderr.
    #[arg(long)]
    stats: bool,
    /// Cross-check values against the brute-force oracle (small games).
    #[arg(long)]
    oracle: bool,
    /// Solver thread count (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum GenKind {
    /// Virus-spreading game on an m x n grid.
    Virus {
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Attack success probability.
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        /// Clean success probability.
        #[arg(long, default_value_t = 0.2)]
        c: f64,
        #[command(flatten)]
        out: GenOut,
    },
    /// Capture-the-fuel robots on an N x N grid.
    Ctf {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Movement failure probability.
        #[arg(long = "pfail", default_value_t = 0.1)]
        p_failure: f64,
        #[command(flatten)]
        out: GenOut,
    },
    /// Warehouse floor with an adversarial second robot.
    Warehouse {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 14)]
        horizon: u32,
        #[arg(long, default_value_t = 0.9)]
        lambda: f64,
        #[arg(long = "waiting-penalty", default_value_t = 1.0)]
        waiting_penalty: f64,
        #[command(flatten)]
        out: GenOut,
    },
}

#[derive(Args)]
struct GenOut {
    /// Output file; stdout when omitted or with --print.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Print to stdout even if --output is given.
    #[arg(long)]
    print: bool,
}

/// An error carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.cmd {
        Cmd::Check(args) => cmd_check(&args),
        Cmd::Shield(args) => cmd_shield(&args),
        Cmd::Generate { kind } => cmd_generate(&kind),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

/// `name=value` override strings into typed constant bindings.
fn parse_constants(specs: &[String]) -> Result<BTreeMap<String, Value>, Failure> {
    let mut out = BTreeMap::new();
    for spec in specs {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| fail(EXIT_PARSE, format!("bad constant override `{spec}`, expected name=value")))?;
        let value = value.trim();
        let parsed = if let Ok(i) = value.parse::<i64>() {
            Value::Int(i)
        } else if let Ok(d) = value.parse::<f64>() {
            Value::Double(d)
        } else if let Ok(b) = value.parse::<bool>() {
            Value::Bool(b)
        } else {
            return Err(fail(EXIT_PARSE, format!("bad constant value `{value}`")));
        };
        out.insert(name.trim().to_string(), parsed);
    }
    Ok(out)
}

fn load_game(args: &RunArgs) -> Result<StochasticGame, Failure> {
    let text = std::fs::read_to_string(&args.model).map_err(|e| {
        fail(EXIT_BUILD, format!("cannot read model {}: {e}", args.model.display()))
    })?;
    let ast = parse_model(&text)
        .map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", args.model.display())))?;
    let options = BuildOptions {
        constants: parse_constants(&args.constants)?,
        fix_deadlocks: args.fix_deadlocks,
        state_limit: args.state_limit,
    };
    let game = build_game(&ast, &options)
        .map_err(|e| fail(EXIT_BUILD, format!("{}: {e}", args.model.display())))?;
    if let Some(path) = &args.export_game {
        write_file(path, &game.dump())?;
    }
    Ok(game)
}

fn load_properties(args: &RunArgs) -> Result<Vec<Property>, Failure> {
    if let Some(text) = &args.prop {
        if args.props_file.is_some() {
            eprintln!("warning: --prop overrides --props-file");
        }
        return Ok(vec![parse_property(text)
            .map_err(|e| fail(EXIT_PARSE, e.to_string()))?]);
    }
    if let Some(path) = &args.props_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| fail(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))?;
        let props = parse_props_file(&text)
            .map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
        if props.is_empty() {
            return Err(fail(EXIT_PARSE, format!("{} contains no properties", path.display())));
        }
        return Ok(props);
    }
    Err(fail(EXIT_PARSE, "a property is required (--prop or --props-file)"))
}

fn solver_params(args: &RunArgs) -> SolverParams {
    SolverParams {
        epsilon: args.epsilon,
        max_iterations: args.max_iter,
        lra_window: args.lra_window,
        lra_gain_tolerance: args.lra_tol,
    }
}

fn setup_threads(args: &RunArgs) -> Result<(), Failure> {
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| fail(EXIT_PARSE, format!("cannot configure {threads} threads: {e}")))?;
    }
    Ok(())
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    std::fs::write(path, content)
        .map_err(|e| fail(EXIT_BUILD, format!("cannot write {}: {e}", path.display())))
}

/// Shortest decimal form with 6 significant digits.
fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let decimals = (5 - v.abs().log10().floor() as i64).max(0) as usize;
    format!("{v:.decimals$}")
}

fn export_strategy(
    path: &Path,
    game: &StochasticGame,
    result: &SolveResult,
) -> Result<(), Failure> {
    let mut out = String::new();
    for (s, choice) in result.strategy.choice.iter().enumerate() {
        if let Some(i) = choice {
            let c = &game.states[s].choices[*i];
            out.push_str(&format!("{s} {} {}\n", c.action_id, c.action_label));
        }
    }
    write_file(path, &out)
}

fn print_stats(game: &StochasticGame, result: &SolveResult) {
    eprintln!("states: {}", game.num_states());
    eprintln!("choices: {}", game.num_choices());
    eprintln!("transitions: {}", game.num_transitions());
    eprintln!("iterations: {}", result.iterations);
}

/// Cross-check one solved property against the brute-force oracle.
fn run_oracle(game: &StochasticGame, prop: &BoundProperty, solved: f64) {
    let objective = match &prop.path {
        BoundPath::Finally(target) => Objective::Reach(target.clone()),
        BoundPath::Until(a, b) => Objective::Until(a.clone(), b.clone()),
        BoundPath::GloballyBounded(safe, k) => Objective::BoundedSafety(safe.clone(), *k),
        BoundPath::SteadyState => {
            Objective::Lra(prop.reward_name.clone().expect("reward property"))
        }
        other => {
            eprintln!("oracle: unsupported path operator for {other:?}");
            return;
        }
    };
    let direction = if prop.quantifier.is_max() {
        Direction::Max
    } else {
        Direction::Min
    };
    match oracle_value(game, &prop.coalition, &objective, direction, &OracleBudget::default()) {
        Ok(values) => {
            let v = values[game.initial_state];
            eprintln!("oracle: {} (|delta| = {:.3e})", sig6(v), (v - solved).abs());
        }
        Err(e) => eprintln!("oracle: {e}"),
    }
}

fn cmd_check(args: &RunArgs) -> Result<(), Failure> {
    setup_threads(args)?;
    let started = Instant::now();
    let game = load_game(args)?;
    let properties = load_properties(args)?;
    let params = solver_params(args);
    let mut all_converged = true;
    for property in &properties {
        let bound = property
            .bind(&game)
            .map_err(|e| fail(EXIT_BUILD, format!("{property}: {e}")))?;
        let result = evaluate(&game, &bound, &params)
            .map_err(|e| fail(EXIT_BUILD, format!("{property}: {e}")))?;
        println!("Result: {}", sig6(result.values[game.initial_state]));
        if !result.converged {
            eprintln!("warning: {property}: solver did not converge");
            all_converged = false;
        }
        if args.stats {
            print_stats(&game, &result);
        }
        if args.oracle {
            run_oracle(&game, &bound, result.values[game.initial_state]);
        }
        if let Some(path) = &args.export_strategy {
            export_strategy(path, &game, &result)?;
        }
    }
    eprintln!("wall time: {:.3}s", started.elapsed().as_secs_f64());
    if all_converged {
        Ok(())
    } else {
        Err(fail(EXIT_NOT_CONVERGED, String::new()))
    }
}

fn cmd_shield(args: &RunArgs) -> Result<(), Failure> {
    setup_threads(args)?;
    let started = Instant::now();
    let game = load_game(args)?;
    let properties = load_properties(args)?;
    let property = properties
        .iter()
        .find(|p| p.shield != ShieldAnnotation::None)
        .ok_or_else(|| {
            fail(
                EXIT_PARSE,
                "no shield annotation found; prefix the property with \
                 <PreSafety, gamma=..>, <PostSafety, lambda=..> or <Optimal>",
            )
        })?;
    let bound = property
        .bind(&game)
        .map_err(|e| fail(EXIT_BUILD, format!("{property}: {e}")))?;
    let params = solver_params(args);
    let result = evaluate(&game, &bound, &params)
        .map_err(|e| fail(EXIT_BUILD, format!("{property}: {e}")))?;

    let coalition = &bound.coalition;
    let shield_err = |e: smgshield_core::shields::ShieldError| fail(EXIT_BUILD, e.to_string());
    let (text, states, corrected) = match property.shield {
        ShieldAnnotation::PreSafety { gamma } => {
            let shield =
                synthesize_pre_safety(&game, coalition, &result, Threshold::Absolute { gamma })
                    .map_err(shield_err)?;
            let blocked = shield.blocked_count(&game);
            (shield.render(&game), shield.rows.len(), blocked)
        }
        ShieldAnnotation::PostSafety { lambda } => {
            let shield =
                synthesize_post_safety(&game, coalition, &result, Threshold::Relative { lambda })
                    .map_err(shield_err)?;
            let corrected = shield.corrected_count();
            (shield.render(&game), shield.rows.len(), corrected)
        }
        ShieldAnnotation::Optimal => {
            let shield = synthesize_optimal(&game, coalition, &result).map_err(shield_err)?;
            let corrected = shield.corrected_count();
            (shield.render(&game), shield.rows.len(), corrected)
        }
        ShieldAnnotation::None => unreachable!("filtered above"),
    };

    match &args.export_shield {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    let verb = if matches!(property.shield, ShieldAnnotation::PreSafety { .. }) {
        "blocked"
    } else {
        "corrected"
    };
    eprintln!("shield covers {states} states, {corrected} actions {verb}");
    if args.stats {
        print_stats(&game, &result);
    }
    if let Some(path) = &args.export_strategy {
        export_strategy(path, &game, &result)?;
    }
    eprintln!("wall time: {:.3}s", started.elapsed().as_secs_f64());
    if result.converged {
        Ok(())
    } else {
        eprintln!("warning: {property}: solver did not converge");
        Err(fail(EXIT_NOT_CONVERGED, String::new()))
    }
}

fn cmd_generate(kind: &GenKind) -> Result<(), Failure> {
    let (text, out) = match kind {
        GenKind::Virus { m, n, a, c, out } => (
            gen_virus(&VirusParams {
                m: *m,
                n: *n,
                a: *a,
                c: *c,
            }),
            out,
        ),
        GenKind::Ctf { n, p_failure, out } => (
            gen_ctf(&CtfParams {
                n: *n,
                p_failure: *p_failure,
            }),
            out,
        ),
        GenKind::Warehouse {
            n,
            horizon,
            lambda,
            waiting_penalty,
            out,
        } => (
            gen_warehouse(&WarehouseParams {
                n: *n,
                horizon: *horizon,
                lambda: *lambda,
                waiting_penalty: *waiting_penalty,
            }),
            out,
        ),
    };
    let text = text.map_err(|e| fail(EXIT_PARSE, e.to_string()))?;
    match &out.output {
        Some(path) => {
            write_file(path, &text)?;
            if out.print {
                print!("{text}");
            }
        }
        None => print!("{text}"),
    }
    Ok(())
}
