//! `schelling` — experiment runner. Subcommands cover lattice simulation,
//! the limiting flow, lattice/limit coupling, terminal run structure, stable
//! shapes, and occupation-measure scans; all outputs are hash-stamped CSVs
//! plus a JSON run summary.

use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

use schelling_cli::artifacts::RunDir;
use schelling_cli::commands::{self, RunError};
use schelling_cli::config;
use schelling_cli::{Kind, Overlay, RunConfig, Status};

#[derive(Parser)]
#[command(
    name = "schelling",
    version,
    about = "Simulation and numerical-analysis laboratory for plurality dynamics and their scaling limit",
    after_help = "Exit codes: 0 done, 1 runtime failure (partial outputs removed), 2 invalid \
                  configuration (diagnostic names the field or line), 3 inconclusive.\n\
                  Relative --out paths resolve under $SCHELLING_OUT when it is set.\n\
                  Precedence: built-in defaults < --preset < --config file < flags."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Event-driven lattice dynamics over a (w, seed) matrix
    Simulate(Flags),
    /// Forward-Euler integration of the limiting flow from a chosen datum
    Solve(Flags),
    /// Coupled lattice/limit runs measuring the sup-norm gap over time
    Couple(Flags),
    /// Terminal run structure of stabilized 1-D dynamics
    #[command(name = "final-configs")]
    FinalConfigs(Flags),
    /// Box erosion to a stable shape, with an optional exhaustive
    /// minimal-diameter search
    #[command(name = "stable-shape")]
    StableShape(Flags),
    /// Supremum of occupation band measures over a dyadic Lipschitz family
    Occupation(Flags),
}

impl Cmd {
    fn split(&self) -> (Kind, &Flags) {
        match self {
            Cmd::Simulate(f) => (Kind::Simulate, f),
            Cmd::Solve(f) => (Kind::Solve, f),
            Cmd::Couple(f) => (Kind::Couple, f),
            Cmd::FinalConfigs(f) => (Kind::FinalConfigs, f),
            Cmd::StableShape(f) => (Kind::StableShape, f),
            Cmd::Occupation(f) => (Kind::Occupation, f),
        }
    }
}

/// Every knob, as an optional overlay over the per-subcommand defaults;
/// unset flags leave the preset/file/default value in place.
#[derive(Args)]
struct Flags {
    /// Config file: flat key-value TOML with [model]/[grid]/[numerics]/[run]
    /// sections; flags override file values
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Named parameter bundle — simulate: demo-1d, demo-2d; final-configs:
    /// demo-final-1d; solve: constant, sawtooth, gaussian
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Dimension N (default: 1; stable-shape default: 2)
    #[arg(long, value_name = "N")]
    n: Option<usize>,

    /// Number of opinions M (default: 2)
    #[arg(long, value_name = "M")]
    m: Option<u8>,

    /// Window sizes, comma-separated (default: 3; couple: 50,100;
    /// final-configs: 1,2,3; stable-shape: 1)
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    w: Option<Vec<u32>>,

    /// Neighborhood norm: inf or a finite exponent >= 1 (default: inf)
    #[arg(long, value_name = "P")]
    p: Option<String>,

    /// Window closure: closed = 2w+1 nodes per axis, open = 2w-1
    /// (default: closed)
    #[arg(long, value_name = "RULE")]
    closure: Option<String>,

    /// Torus width in rescaled units; 1-D lattices get r*w nodes
    /// (default: 15; couple: 14; solve and occupation: 4)
    #[arg(long, value_name = "R")]
    r: Option<f64>,

    /// Explicit lattice side for n >= 2 (default: unset; demo-2d preset: 28)
    #[arg(long, value_name = "SIDE")]
    side: Option<usize>,

    /// Grid cells per unit length, h = 1/cells (default: 256;
    /// occupation: 4096; couple: one cell per lattice site)
    #[arg(long, value_name = "CELLS")]
    cells: Option<usize>,

    /// Flow horizon T (default: 1; solve: 1.5)
    #[arg(long, value_name = "T")]
    t: Option<f64>,

    /// Euler step (default: h/4)
    #[arg(long, value_name = "DT")]
    dt: Option<f64>,

    /// Lattice time horizon for event-driven runs (default: 1000;
    /// demo-2d preset: 60)
    #[arg(long, value_name = "H")]
    horizon: Option<f64>,

    /// Band half-widths, comma-separated
    /// (default: 0.1,0.05,0.025,0.0125)
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    eps: Option<Vec<f64>>,

    /// Lipschitz sup/slope budget K of the test-function class (default: 2)
    #[arg(long, value_name = "K")]
    budget: Option<f64>,

    /// Dyadic level k: test functions take values in 2^-k * Z (default: 6)
    #[arg(long, value_name = "LEVEL")]
    level: Option<u32>,

    /// Random test functions sampled beyond the stress battery (default: 40)
    #[arg(long, value_name = "COUNT")]
    samples: Option<usize>,

    /// Greedy refinement sweeps per band width (default: 8)
    #[arg(long, value_name = "SWEEPS")]
    local_steps: Option<usize>,

    /// Solver initial datum: constant, sawtooth, gaussian
    /// (default: sawtooth)
    #[arg(long, value_name = "NAME")]
    data: Option<String>,

    /// Level of constant initial data (default: 0.1)
    #[arg(long, value_name = "A")]
    amp: Option<f64>,

    /// Erosion start: half-side of the initial box
    /// (default: 2^(2n) * w^(n+1))
    #[arg(long, value_name = "R")]
    radius: Option<u32>,

    /// Erosion victim order: lex or random (default: lex)
    #[arg(long, value_name = "RULE")]
    rule: Option<String>,

    /// Also run the exhaustive minimal-diameter search (default: off)
    #[arg(long, action = ArgAction::SetTrue)]
    min_diameter: bool,

    /// Diameter cap for the minimal-diameter search (default: 8)
    #[arg(long, value_name = "D")]
    search_cap: Option<u32>,

    /// Key coupled initial opinions by site, so nested resolutions share
    /// their noise (default: true)
    #[arg(long, value_name = "BOOL")]
    shared_init: Option<bool>,

    /// Base RNG seed (default: 0)
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,

    /// Replicates, using seeds seed..seed+N-1 (default: 1;
    /// final-configs: 20; couple and occupation: 5)
    #[arg(long, value_name = "N")]
    seeds: Option<usize>,

    /// Output directory (default: runs/<subcommand>); relative paths
    /// resolve under $SCHELLING_OUT
    #[arg(long, value_name = "DIR")]
    out: Option<String>,

    /// Force single-threaded scheduling; artifact bytes are
    /// schedule-independent either way (default: off)
    #[arg(long, action = ArgAction::SetTrue)]
    sequential: bool,
}

impl Flags {
    fn overlay(&self) -> Overlay {
        Overlay {
            n: self.n,
            m: self.m,
            w: self.w.clone(),
            p: self.p.clone(),
            closure: self.closure.clone(),
            r: self.r,
            side: self.side,
            cells: self.cells,
            t: self.t,
            dt: self.dt,
            horizon: self.horizon,
            eps: self.eps.clone(),
            budget: self.budget,
            level: self.level,
            samples: self.samples,
            local_steps: self.local_steps,
            data: self.data.clone(),
            amp: self.amp,
            radius: self.radius,
            rule: self.rule.clone(),
            min_diameter: if self.min_diameter { Some(true) } else { None },
            search_cap: self.search_cap,
            shared_init: self.shared_init,
            seed: self.seed,
            seeds: self.seeds,
            out: self.out.clone(),
            sequential: if self.sequential { Some(true) } else { None },
        }
    }
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = Cli::parse();
    let (kind, flags) = cli.cmd.split();

    let mut cfg = RunConfig::defaults(kind);
    if let Some(name) = &flags.preset {
        match RunConfig::preset(kind, name) {
            Ok(ov) => cfg.apply(&ov),
            Err(e) => {
                eprintln!("{e}");
                return 2;
            }
        }
    }
    if let Some(path) = &flags.config {
        match config::parse_file(path) {
            Ok(ov) => cfg.apply(&ov),
            Err(e) => {
                eprintln!("{e}");
                return 2;
            }
        }
    }
    cfg.apply(&flags.overlay());
    if let Err(e) = cfg.validate() {
        eprintln!("{e}");
        return 2;
    }

    let mut dir = match RunDir::create(&cfg) {
        Ok(dir) => dir,
        Err(e) => {
            eprintln!("output: {e}");
            return 1;
        }
    };
    match commands::dispatch(&cfg, &mut dir) {
        Ok((status, headline)) => {
            let code = match &status {
                Status::Done => 0,
                Status::Inconclusive(why) => {
                    eprintln!("inconclusive: {why}");
                    3
                }
            };
            match dir.finish(&cfg, &status, headline) {
                Ok(path) => {
                    println!("summary: {}", path.display());
                    code
                }
                Err(e) => {
                    eprintln!("summary: {e}");
                    1
                }
            }
        }
        Err(RunError::Rejected(msg)) => {
            dir.discard();
            eprintln!("config: {msg}");
            2
        }
        Err(RunError::Runtime(msg)) => {
            dir.discard();
            eprintln!("error: {msg}");
            1
        }
    }
}
