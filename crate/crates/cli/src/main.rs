use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use roughbloch::experiment::{parse_config, preset, run_experiment, sweep, ExperimentConfig};
use roughbloch::postprocess::{convergence_rates, csv_row, Axis, ConvergenceTable, CSV_HEADER};
use roughbloch::solver::PreconditionerKind;
use roughbloch::Error;

/// Helmholtz scattering by rough surfaces via the Floquet-Bloch transform.
#[derive(Parser)]
#[command(name = "roughbloch", version)]
struct Cli {
    /// Log verbosity (-v info, -vv debug with GMRES iteration log).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    /// Worker threads (defaults to ROUGHBLOCH_THREADS, then all cores).
    #[arg(long, global = true, env = "ROUGHBLOCH_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configuration in a key = value file.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run one of the four reference setups.
    Example {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long = "N")]
        n: Option<usize>,
        /// ilu0 (default) or block_lu.
        #[arg(long)]
        preconditioner: Option<PreconditionerKind>,
        /// Append the result row to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run every (h, N) pair and write a CSV table.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Preset used when no config file is given.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        example: Option<u8>,
        #[arg(long = "h-list", value_delimiter = ',', default_values_t = vec![0.16, 0.08, 0.04, 0.02])]
        h_list: Vec<f64>,
        #[arg(long = "N-list", value_delimiter = ',', default_values_t = vec![10, 20, 40, 80])]
        n_list: Vec<usize>,
        /// Overrides the preconditioner of the config or preset.
        #[arg(long)]
        preconditioner: Option<PreconditionerKind>,
        /// Output CSV (defaults to stdout).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Least-squares convergence slope from a CSV table.
    Rates {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        axis: String,
        /// Also write "x err" lines for plotting.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_env("RUST_LOG").init();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot set thread count: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let stage = e.stage().unwrap_or("roughbloch");
            eprintln!("error [{stage}]: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_config(path: &Path) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).at("config"))?;
    parse_config(&text).map_err(|e| e.at("config"))
}

fn solve_and_print(cfg: &ExperimentConfig, csv: Option<&Path>) -> Result<(), Error> {
    let report = run_experiment(cfg)?;
    println!("{CSV_HEADER}");
    println!("{}", csv_row(&report.row));
    eprintln!(
        "coupling {}, preconditioned residual {:.2e}, true residual {:.2e}, data window tail {:.1e}",
        report.coupling.map_or("none".to_string(), |c| format!("{c:?}")),
        report.residual, report.true_residual, report.tail_ratio
    );
    if let Some(path) = csv {
        let fresh = !path.exists();
        let mut f = File::options().create(true).append(true).open(path)?;
        if fresh {
            writeln!(f, "{CSV_HEADER}")?;
        }
        writeln!(f, "{}", csv_row(&report.row))?;
    }
    Ok(())
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Solve { config } => {
            let cfg = load_config(&config)?;
            let out = cfg.output.clone();
            solve_and_print(&cfg, out.as_deref())
        }
        Command::Example { which, h, n, preconditioner, csv } => {
            let mut cfg = preset(which as usize)?;
            if let Some(p) = preconditioner {
                cfg.solver.preconditioner = p;
            }
            if let Some(h) = h {
                cfg.h = h;
            }
            if let Some(n) = n {
                cfg.n = n;
            }
            solve_and_print(&cfg, csv.as_deref())
        }
        Command::Sweep { config, example, h_list, n_list, preconditioner, csv } => {
            let mut cfg = match (config, example) {
                (Some(path), _) => load_config(&path)?,
                (None, Some(which)) => preset(which as usize)?,
                (None, None) => return Err(Error::Parameter("sweep needs --config or --example".into()).at("config")),
            };
            if let Some(p) = preconditioner {
                cfg.solver.preconditioner = p;
            }
            let (cells, table) = sweep(&cfg, &h_list, &n_list);
            for cell in &cells {
                if let Err(e) = &cell.result {
                    eprintln!("N = {}, h = {}: {e}", cell.n, cell.h);
                }
            }
            match csv {
                Some(path) => table.write_csv(File::create(path)?)?,
                None => table.write_csv(io::stdout().lock())?,
            }
            Ok(())
        }
        Command::Rates { csv, axis, plot } => {
            let axis: Axis = axis.parse()?;
            let table = ConvergenceTable::read_csv(BufReader::new(File::open(csv)?))?;
            let slope = convergence_rates(&table, axis)?;
            println!("{slope:.4}");
            if let Some(path) = plot {
                table.write_rate_file(axis, File::create(path)?)?;
            }
            Ok(())
        }
    }
}
