//! `zb` command-line driver.

pub mod commands;
pub mod config;
pub mod error;
pub mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::commands::*;
use crate::config::{CommandTag, RunConfig};
use crate::error::{CliError, CliResult};
use crate::verify::{run_verify, VERIFY_FILE};

#[derive(Debug, Parser)]
#[command(name = "zb", version, about = "Zitterbewegung trajectories and band topology")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Band energies along the default high-symmetry path.
    Bands(Common),
    /// Trajectory and spectrum; prints the rotation index.
    Zb(Common),
    /// Invariant report as JSON.
    Invariants(Common),
    /// Invariant and local indices across a parameter sweep.
    PhaseDiagram(Common),
    /// Reproduction checks; exits with 3 on failure.
    Verify(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory [default: config output.dir, else "."]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads [default: available parallelism]
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Evaluate sweep points at phase transitions instead of skipping them.
    #[arg(long)]
    pub allow_critical: bool,
}

impl Command {
    fn parts(&self) -> (CommandTag, &Common) {
        match self {
            Command::Bands(c) => (CommandTag::Bands, c),
            Command::Zb(c) => (CommandTag::Zb, c),
            Command::Invariants(c) => (CommandTag::Invariants, c),
            Command::PhaseDiagram(c) => (CommandTag::PhaseDiagram, c),
            Command::Verify(c) => (CommandTag::Verify, c),
        }
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

fn execute(tag: CommandTag, cfg: &RunConfig, out: &Path, allow_critical: bool) -> CliResult<()> {
    let mut stdout = std::io::stdout().lock();
    match tag {
        CommandTag::Bands => {
            let model = cfg.build_model()?;
            write_file(out, BANDS_FILE, &bands_csv(&model, cfg.bands.points_per_segment)?)?;
        }
        CommandTag::Zb => {
            let model = cfg.build_model()?;
            let run = run_zb(&model, cfg.dynamics()?)?;
            let mut traj = Vec::new();
            run.trajectory.write_csv(&mut traj)?;
            let mut spec = Vec::new();
            run.spectrum.write_csv(&mut spec)?;
            write_file(out, TRAJECTORY_FILE, &String::from_utf8(traj).expect("ascii"))?;
            write_file(out, SPECTRUM_FILE, &String::from_utf8(spec).expect("ascii"))?;
            writeln!(stdout, "{}", run.rotation_index)?;
        }
        CommandTag::Invariants => {
            let model = cfg.build_model()?;
            let json = to_json(&run_invariants(&model, cfg)?);
            write_file(out, INVARIANTS_FILE, &json)?;
            write!(stdout, "{json}")?;
        }
        CommandTag::PhaseDiagram => {
            let pd = run_phase_diagram(cfg, allow_critical)?;
            for v in &pd.skipped {
                eprintln!("skipped {} = {v}: transition point (use --allow-critical)", pd.param);
            }
            write_file(out, PHASE_FILE, &pd.to_csv())?;
        }
        CommandTag::Verify => {
            let seed = cfg.require_seed()?;
            let report = run_verify(seed, &cfg.verify);
            write_file(out, VERIFY_FILE, &to_json(&report))?;
            for c in &report.checks {
                writeln!(stdout, "{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.name)?;
            }
            if !report.passed {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
                return Err(CliError::Verification(failed.join(", ")));
            }
        }
    }
    Ok(())
}

/// Runs one invocation; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let (tag, common) = cli.command.parts();
    let result = (|| {
        let cfg = RunConfig::load(&common.config)?;
        cfg.check_command(tag)?;
        let out = common
            .out
            .clone()
            .or_else(|| cfg.output.dir.clone())
            .unwrap_or_else(|| PathBuf::from("."));
        let mut pool = rayon::ThreadPoolBuilder::new();
        match common.jobs {
            Some(0) => return Err(CliError::Config("--jobs must be positive".into())),
            Some(n) => pool = pool.num_threads(n),
            None => {}
        }
        let pool = pool.build().map_err(|e| CliError::Runtime(e.to_string()))?;
        pool.install(|| execute(tag, &cfg, &out, common.allow_critical))
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("zb: {e}");
            e.exit_code()
        }
    }
}
