use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ordpde_cli::{run, SolveOptions};

#[derive(Parser)]
#[command(
    name = "ordpde",
    version,
    about = "Order completion solver for D_y u + F(x, y, u, D_x u) = 0"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    Characteristics,
}

#[derive(Subcommand)]
enum Command {
    /// Build the approximating sequence and write CSV fields and reports.
    Solve {
        spec: PathBuf,
        /// Output directory (overrides `out` in the problem file).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write u_N.svg and decay.svg.
        #[arg(long)]
        svg: bool,
        /// Evaluation grid cells (overrides `nx`, `ny`).
        #[arg(long, num_args = 2, value_names = ["NX", "NY"])]
        grid: Option<Vec<usize>>,
    },
    /// Check a quasilinear problem against the characteristics oracle.
    Compare {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "characteristics")]
        oracle: Oracle,
    },
    /// Parse and validate a problem file.
    Check { spec: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stderr = std::io::stderr();
    if let Err(e) = run::configure_threads(std::env::var("ORDPDE_THREADS").ok().as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(run::EXIT_CONFIG as u8);
    }
    let code = match cli.command {
        Command::Solve { spec, out, svg, grid } => {
            let opts = SolveOptions {
                out,
                svg,
                grid: grid.map(|g| (g[0], g[1])),
            };
            run::solve(&spec, &opts, &mut stderr)
        }
        Command::Compare {
            spec,
            oracle: Oracle::Characteristics,
        } => run::compare(&spec, &mut stderr),
        Command::Check { spec } => run::check(&spec, &mut std::io::stdout(), &mut stderr),
    };
    ExitCode::from(code as u8)
}
