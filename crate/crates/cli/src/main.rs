mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Failure;
use crate::manifest::RunManifest;

#[derive(Parser, Debug)]
#[command(name = "bm", version, about = "Exact Banach-Mazur certificates for cubes, cross-polytopes and planar bodies")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the run manifest here instead of standard error.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub(crate) enum Command {
    /// Verify r C ⊆ T(C*) ⊆ C for a matrix T.
    Certify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        r: String,
        /// Rescale columns to unit max-norm before certifying.
        #[arg(long)]
        normalize: bool,
    },
    /// Write the 192 optimal 3x3 matrices and a manifest.
    EnumNice {
        #[arg(long)]
        out: PathBuf,
    },
    /// Random-restart search for operators with a small ratio.
    Search {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        max_denominator: Option<u64>,
        /// TOML file with search settings; flags take precedence.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Asymmetry constant and Minkowski center of a polygon.
    Asym {
        #[arg(long)]
        polygon: PathBuf,
    },
    /// Vertices of the pentagon K(r, k).
    Pentagon {
        #[arg(long)]
        r: String,
        #[arg(long)]
        k: String,
        #[arg(long)]
        json: bool,
    },
    /// Certify d(K(r, k), L) = r for a symmetric polygon L.
    Equidist {
        #[arg(long)]
        r: String,
        #[arg(long)]
        k: String,
        #[arg(long)]
        body: PathBuf,
    },
    /// Certify a grid of (r, k, body) combinations; CSV output.
    EquidistSweep {
        #[arg(long)]
        grid: PathBuf,
    },
    /// Sample parallelograms between r C_2 and C_2 and count corner vertices; CSV output.
    Lemma2d {
        #[arg(long)]
        r: String,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Corner-cube occupancy for a 3x3 operator certifying at 5/9.
    Claim3d {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Markdown table of search results against known values.
    Report {
        /// Inclusive range such as 2..4.
        #[arg(long, default_value = "2..4")]
        dims: String,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .expect("thread pool configured once");
    }

    let mut manifest = RunManifest::new(&argv);
    let result = commands::run(&cli.command, &mut manifest);
    let code = match result {
        Ok(out) => {
            print!("{}", out.stdout);
            manifest.finish(0, &out.summary);
            0
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            manifest.finish(2, &msg);
            2
        }
        Err(Failure::Property { stdout, summary }) => {
            print!("{stdout}");
            manifest.finish(1, &summary);
            1
        }
    };
    if let Err(e) = manifest.emit(cli.manifest.as_deref()) {
        eprintln!("error: cannot write manifest: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
