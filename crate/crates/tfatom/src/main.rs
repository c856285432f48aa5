use clap::{Args, Parser, Subcommand};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use tfatom::correction::{delta_e_closed, delta_e_oracle, schwinger_coefficient, HARTREE_EV};
use tfatom::quadrature::tf_moments;
use tfatom::report;
use tfatom::tf_solver::{solve_tf, TfParams};
use tfatom::verify::run_full_suite;
use tfatom::TfError;

#[derive(Parser)]
#[command(name = "tfatom", about = "Thomas-Fermi atom solver and Z^(5/3) quantum correction")]
struct Cli {
    /// Optional key=value file overriding solver defaults
    /// (x_max, x_switch, rel_tol, abs_tol)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the screening function and export the grid
    Solve(SolveArgs),
    /// Compute the three moment integrals of f
    Moments {
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Compute the quantum correction, closed form and direct oracle
    Correction {
        /// Comma-separated nuclear charges
        #[arg(long, value_delimiter = ',', required = true)]
        z: Vec<f64>,
        /// Report energies in eV instead of hartree
        #[arg(long)]
        ev: bool,
    },
    /// CSV sweep of the correction over a Z list or START:END range
    Sweep {
        #[arg(long, required = true)]
        z: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full invariant suite and print a pass/fail table
    Verify {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    xmax: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn load_params(config: Option<&PathBuf>) -> Result<TfParams, TfError> {
    let mut params = TfParams::default();
    if let Some(path) = config {
        let text = fs::read_to_string(path)?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                TfError::InvalidInput(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let value: f64 = value.trim().parse().map_err(|_| {
                TfError::InvalidInput(format!("config line {}: bad number", lineno + 1))
            })?;
            match key.trim() {
                "x_max" => params.x_max = value,
                "x_switch" => params.x_switch = value,
                "rel_tol" => params.rel_tol = value,
                "abs_tol" => params.abs_tol = value,
                other => {
                    return Err(TfError::InvalidInput(format!(
                        "config line {}: unknown key {other}",
                        lineno + 1
                    )))
                }
            }
        }
    }
    Ok(params)
}

fn parse_z_spec(spec: &str) -> Result<Vec<f64>, TfError> {
    let list: Vec<f64> = if let Some((a, b)) = spec.split_once(':') {
        let (a, b): (i64, i64) = (
            a.parse()
                .map_err(|_| TfError::InvalidInput(format!("bad Z range start in {spec}")))?,
            b.parse()
                .map_err(|_| TfError::InvalidInput(format!("bad Z range end in {spec}")))?,
        );
        if a > b {
            return Err(TfError::InvalidInput(format!("empty Z range {spec}")));
        }
        (a..=b).map(|z| z as f64).collect()
    } else {
        spec.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| TfError::InvalidInput(format!("bad Z value {s}")))
            })
            .collect::<Result<_, _>>()?
    };
    validate_z_list(&list)?;
    Ok(list)
}

fn validate_z_list(zs: &[f64]) -> Result<(), TfError> {
    if zs.is_empty() {
        return Err(TfError::InvalidInput("Z list is empty".into()));
    }
    for &z in zs {
        if !z.is_finite() || z < 1.0 {
            return Err(TfError::InvalidInput(format!("Z must be >= 1, got {z}")));
        }
    }
    Ok(())
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), TfError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, TfError> {
    let mut params = load_params(cli.config.as_ref())?;
    match &cli.command {
        Command::Solve(args) => {
            if let Some(xmax) = args.xmax {
                params.x_max = xmax;
            }
            if let Some(tol) = args.tol {
                params.rel_tol = tol;
            }
            let sol = solve_tf(&params)?;
            let text = match args.format {
                Format::Csv => report::solution_csv(&sol),
                Format::Json => report::solution_json(&sol) + "\n",
            };
            emit(args.out.as_ref(), &text)?;
        }
        Command::Moments { tol } => {
            let sol = solve_tf(&params)?;
            let m = tf_moments(&sol, *tol)?;
            println!("{}", report::moments_json(&m, sol.b));
        }
        Command::Correction { z, ev } => {
            validate_z_list(z)?;
            let sol = solve_tf(&params)?;
            let m = tf_moments(&sol, 1e-9)?;
            let c = schwinger_coefficient(&m);
            let closed = delta_e_closed(z, c);
            let oracle = delta_e_oracle(&sol, z, 1e-8)?;
            let factor = ev.then_some(HARTREE_EV);
            println!("{}", report::correction_json(&closed, &oracle, factor));
        }
        Command::Sweep { z, out } => {
            let zs = parse_z_spec(z)?;
            let sol = solve_tf(&params)?;
            let m = tf_moments(&sol, 1e-9)?;
            let c = schwinger_coefficient(&m);
            let closed = delta_e_closed(&zs, c);
            let oracle = delta_e_oracle(&sol, &zs, 1e-8)?;
            emit(out.as_ref(), &report::sweep_csv(&closed, &oracle))?;
        }
        Command::Verify { json } => {
            let rows = run_full_suite()?;
            if *json {
                println!("{}", report::verify_json(&rows));
            } else {
                print!("{}", report::verify_table(&rows));
            }
            return Ok(rows.iter().all(|r| r.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e @ TfError::InvalidInput(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
