//! Argument parsing.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use skilift_core::passes::parse_passes;
use skilift_core::CostModel;

use crate::commands::{self, BenchArgs, Emit, Format, Global, Mode, Outcome, QpeArgs, ScheduleArgs, SynthArgs, VerifyArgs};

/// Environment variable overriding the dense simulator qubit cap.
pub const SIM_CAP_ENV: &str = "SKILIFT_SIM_CAP";

#[derive(Debug, Parser)]
#[command(name = "skilift", version, about = "Synthesize and check parallel Trotter-Suzuki phase estimation circuits")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for every randomized path.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = CostArg::LatticeSurgery)]
    pub cost_model: CostArg,
    /// Directory for circuit, schedule and metrics files.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
    /// Comma-separated passes (expand, parallelize, consolidate, merge,
    /// lower), `all` or `none`. Default: all, except `qpe` which uses
    /// expand so the state fits the simulator.
    #[arg(long, global = true)]
    pub passes: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CostArg {
    Circuit,
    LatticeSurgery,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Optimized,
    Baseline,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EmitArg {
    Circuit,
    Distribution,
    Energy,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize product-formula circuits and their metrics.
    Synth {
        hamiltonian: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Optimized)]
        mode: ModeArg,
        /// Precision qubits controlling the evolution.
        #[arg(long, default_value_t = 1)]
        b: usize,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    /// Build a stage schedule, or check one with --verify.
    Schedule {
        hamiltonian: Option<PathBuf>,
        /// Dense synthetic input with this many orbitals.
        #[arg(long, conflicts_with = "hamiltonian")]
        m: Option<usize>,
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Check a schedule or circuit file, or a Hamiltonian's optimized step.
    Verify {
        file: Option<PathBuf>,
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    /// Baseline against optimized depth and width on a dense synthetic
    /// Hamiltonian, without building whole circuits.
    Bench {
        #[arg(long, default_value_t = 120)]
        m: usize,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        b: Vec<usize>,
        /// Fail unless the comparison windows hold.
        #[arg(long)]
        check: bool,
    },
    /// Phase estimation by dense simulation.
    Qpe {
        hamiltonian: PathBuf,
        #[arg(long, default_value_t = 4)]
        b: usize,
        /// Evolution time per unit of the precision register; defaults to
        /// pi over a bound on the spectral radius.
        #[arg(long)]
        t1: Option<f64>,
        #[arg(long, default_value_t = 40)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        shots: usize,
        /// `ground` or an occupation string such as 1100.
        #[arg(long, default_value = "ground")]
        init: String,
        #[arg(long, value_enum, default_value_t = EmitArg::Energy)]
        emit: EmitArg,
        /// Lower end of the energy readout window.
        #[arg(long, allow_negative_numbers = true)]
        e_min: Option<f64>,
    },
}

impl GlobalArgs {
    pub fn resolve(&self) -> Result<Global, commands::CommandError> {
        let passes = self.passes.as_deref().map(parse_passes).transpose()?;
        Ok(Global {
            seed: self.seed,
            cost_model: match self.cost_model {
                CostArg::Circuit => CostModel::CIRCUIT,
                CostArg::LatticeSurgery => CostModel::LATTICE_SURGERY,
            },
            output_dir: self.output_dir.clone(),
            format: match self.format {
                FormatArg::Json => Format::Json,
                FormatArg::Text => Format::Text,
            },
            passes,
        })
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<(Global, Outcome), commands::CommandError> {
    let g = cli.global.resolve()?;
    let out = match &cli.command {
        Command::Synth { hamiltonian, mode, b, t, steps } => commands::synth(
            &g,
            &SynthArgs {
                hamiltonian: hamiltonian.clone(),
                mode: match mode {
                    ModeArg::Optimized => Mode::Optimized,
                    ModeArg::Baseline => Mode::Baseline,
                    ModeArg::Both => Mode::Both,
                },
                b: *b,
                t: *t,
                steps: *steps,
            },
        )?,
        Command::Schedule { hamiltonian, m, verify } => {
            commands::schedule(&g, &ScheduleArgs { hamiltonian: hamiltonian.clone(), m: *m, verify: verify.clone() })?
        }
        Command::Verify { file, hamiltonian, t, steps } => commands::verify(
            &g,
            &VerifyArgs { file: file.clone(), hamiltonian: hamiltonian.clone(), t: *t, steps: *steps },
        )?,
        Command::Bench { m, b, check } => commands::bench(&g, &BenchArgs { m: *m, b: b.clone(), check: *check })?,
        Command::Qpe { hamiltonian, b, t1, steps, shots, init, emit, e_min } => commands::qpe(
            &g,
            &QpeArgs {
                hamiltonian: hamiltonian.clone(),
                b: *b,
                t1: *t1,
                steps: *steps,
                shots: *shots,
                init: init.clone(),
                emit: match emit {
                    EmitArg::Circuit => Emit::Circuit,
                    EmitArg::Distribution => Emit::Distribution,
                    EmitArg::Energy => Emit::Energy,
                },
                e_min: *e_min,
            },
        )?,
    };
    Ok((g, out))
}

/// Reads the simulator cap override, if set.
pub fn sim_cap_from_env() -> Result<Option<usize>, String> {
    match std::env::var(SIM_CAP_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| format!("{SIM_CAP_ENV} must be a qubit count, got `{v}`")),
        Err(_) => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["skilift", "bench", "--m", "8", "--b", "1,2", "--cost-model", "circuit", "--passes", "expand,lower"]).unwrap();
        let g = cli.global.resolve().unwrap();
        assert_eq!(g.cost_model, CostModel::CIRCUIT);
        assert_eq!(g.passes.unwrap().len(), 2);
        assert!(matches!(cli.command, Command::Bench { ref b, .. } if *b == vec![1, 2]));
    }

    #[test]
    fn bad_pass_name_is_an_error() {
        let cli = Cli::try_parse_from(["skilift", "--passes", "fuse", "bench"]).unwrap();
        assert!(cli.global.resolve().is_err());
    }
}
