//! Library face of the experiment runner; `main` is a thin wrapper so the
//! whole surface stays testable in-process.

pub mod generic;
pub mod output;
pub mod presets;

use clap::{Args, Parser, Subcommand};

/// Chain experiments over logit dynamics: named presets plus generic
/// exact / simulation / birth-death / metastability operations.
#[derive(Debug, Parser)]
#[command(name = "logitdyn", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a named experiment preset and report pass/fail assertions.
    Preset {
        /// One of the preset names; see `preset --list`.
        name: String,
        #[command(flatten)]
        args: PresetArgs,
    },
    /// Exact dense-regime operations on a game's chain.
    Exact(generic::ExactArgs),
    /// Monte Carlo trajectories and hitting-time samples.
    Simulate(generic::SimulateArgs),
    /// Birth-and-death chain analysis.
    Bd(generic::BdArgs),
    /// Metastability certificates and pseudo-mixing measurements.
    Meta(generic::MetaArgs),
}

/// Scale and parameter overrides shared by the presets. Every preset picks
/// the subset it understands and validates ranges itself.
#[derive(Debug, Clone, Args, Default)]
pub struct PresetArgs {
    /// Player count override.
    #[arg(long)]
    pub n: Option<usize>,
    /// Rationality level override.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Total-variation budget for window checks.
    #[arg(long = "eps-tv")]
    pub eps_tv: Option<f64>,
    /// Escape rate of the three-state chain.
    #[arg(long = "chain-eps")]
    pub chain_eps: Option<f64>,
    /// Coordination payoff `a` (own 0 vs other 0).
    #[arg(long)]
    pub a: Option<f64>,
    /// Coordination payoff `b` (own 1 vs other 1).
    #[arg(long)]
    pub b: Option<f64>,
    /// Coordination payoff `c` (own 0 vs other 1).
    #[arg(long)]
    pub c: Option<f64>,
    /// Coordination payoff `d` (own 1 vs other 0).
    #[arg(long)]
    pub d: Option<f64>,
    /// Exponent knob for polynomial-window presets.
    #[arg(long = "c-exponent")]
    pub c_exponent: Option<f64>,
    /// Start magnetization for convergence runs.
    #[arg(long = "start-magnetization", allow_hyphen_values = true)]
    pub start_magnetization: Option<i64>,
    /// Zero-count threshold for cluster presets.
    #[arg(long = "cluster-zeros")]
    pub cluster_zeros: Option<usize>,
    /// Slack parameter for hitting-horizon presets.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Evolution horizon override.
    #[arg(long)]
    pub steps: Option<u64>,
    /// Monte Carlo replica count.
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Random-table sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Master seed for anything randomized.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output directory (default `$LOGITDYN_OUT_DIR`, then `./out`).
    #[arg(long = "out-dir")]
    pub out_dir: Option<String>,
    /// Print the machine-readable summary JSON to stdout.
    #[arg(long)]
    pub json: bool,
}

/// Process-style outcome of a run: the summary plus exit code.
pub struct RunOutcome {
    pub text: String,
    pub json: Option<String>,
    pub pass: bool,
}

pub fn run(cli: Cli) -> Result<RunOutcome, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Preset { name, args } => {
            if name == "list" {
                return Ok(RunOutcome {
                    text: presets::PRESET_NAMES.join("\n") + "\n",
                    json: None,
                    pass: true,
                });
            }
            let out_dir = output::resolve_out_dir(args.out_dir.as_deref());
            let summary = presets::run_preset(&name, &args, &out_dir)?;
            Ok(RunOutcome {
                text: summary.render_text(),
                json: args.json.then(|| summary.to_json()),
                pass: summary.pass,
            })
        }
        Command::Exact(args) => generic::run_exact(args),
        Command::Simulate(args) => generic::run_simulate(args),
        Command::Bd(args) => generic::run_bd(args),
        Command::Meta(args) => generic::run_meta(args),
    }
}
