//! Generic subcommands: dispatch any library operation from flags, write
//! the result as CSV/JSON, succeed iff the operation did.

use clap::Args;

use logitdyn::absorb::{absorbing_hit_probability, expected_absorption_time, hitting_time_cdf};
use logitdyn::bd::{
    exit_time_expectation, hit_cdf_1d, ruin_bound_geometric, ruin_probability,
    ruin_probability_constant_rates,
};
use logitdyn::csvio;
use logitdyn::dist::{restricted_distribution, tv_distance, Distribution};
use logitdyn::game::GameSpec;
use logitdyn::logit::{build_transition_matrix, gibbs_distribution, LogitKernel};
use logitdyn::matrix::{bottleneck_ratio, evolve};
use logitdyn::meta::{certify_exact, pseudo_mix_time};
use logitdyn::projection::{
    ehrenfest, lumped_birth_death, magnetization_chain, or_projection, BirthDeathChain,
};
use logitdyn::sim::{hitting_time_samples, run_trajectories, SimConfig};

use crate::output::{resolve_out_dir, write_file, Summary};
use crate::RunOutcome;

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

/// Game selection flags shared by the generic subcommands. Either a full
/// JSON spec or the individual fields.
#[derive(Debug, Clone, Args)]
pub struct GameArgs {
    /// Full game spec as JSON: {"family":"or"|"ising"|"ring","n":..,"beta":..,...}.
    #[arg(long = "game-json")]
    pub game_json: Option<String>,
    /// Family name: or | ising | ring.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
}

impl GameArgs {
    pub fn build(&self) -> AnyResult<GameSpec> {
        if let Some(json) = &self.game_json {
            return Ok(GameSpec::from_json(json)?);
        }
        let family = self
            .family
            .as_deref()
            .ok_or("missing --family (or --game-json)")?;
        let n = self.n.ok_or("missing --n")?;
        let beta = self.beta.ok_or("missing --beta")?;
        Ok(match family {
            "or" => GameSpec::or(n, beta)?,
            "ising" => GameSpec::ising(n, beta)?,
            "ring" => GameSpec::ring(
                n,
                beta,
                self.a.ok_or("ring game requires --a")?,
                self.b.ok_or("ring game requires --b")?,
                self.c.ok_or("ring game requires --c")?,
                self.d.ok_or("ring game requires --d")?,
            )?,
            other => return Err(format!("unknown family `{other}`").into()),
        })
    }
}

/// Subset selector: `all-ones`, `all-zeros`, `weight>=K`, `adjacent-zeros`
/// (at least two adjacent zeros on the ring), or a comma list of indices.
pub fn parse_subset(spec: &str, n: usize) -> AnyResult<Vec<usize>> {
    let dim = 1usize << n;
    let states = match spec {
        "all-ones" => vec![dim - 1],
        "all-zeros" => vec![0],
        "adjacent-zeros" | "R" => (0..dim)
            .filter(|&x| (0..n).any(|i| (x >> i) & 1 == 0 && (x >> ((i + 1) % n)) & 1 == 0))
            .collect(),
        s if s.starts_with("weight>=") => {
            let k: usize = s["weight>=".len()..]
                .parse()
                .map_err(|e| format!("bad weight bound in `{s}`: {e}"))?;
            (0..dim)
                .filter(|&x| (x as u32).count_ones() as usize >= k)
                .collect()
        }
        list => list
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad state index `{tok}`: {e}").into())
            })
            .collect::<AnyResult<Vec<usize>>>()?,
    };
    if states.iter().any(|&s| s >= dim) {
        return Err(format!("subset `{spec}` has states outside 0..{dim}").into());
    }
    if states.is_empty() {
        return Err(format!("subset `{spec}` is empty").into());
    }
    Ok(states)
}

fn finish(summary: Summary, json: bool) -> AnyResult<RunOutcome> {
    Ok(RunOutcome {
        text: summary.render_text(),
        json: json.then(|| summary.to_json()),
        pass: summary.pass,
    })
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// One of: matrix | gibbs | drift-curve | tv-between-starts |
    /// bottleneck | hit-probability | hit-cdf | absorption-time | lump-weight.
    #[arg(long)]
    pub op: String,
    /// Subset selector for bottleneck / restricted operations.
    #[arg(long)]
    pub subset: Option<String>,
    /// Second subset (hit-probability's competing target).
    #[arg(long = "subset-b")]
    pub subset_b: Option<String>,
    /// Start state index.
    #[arg(long)]
    pub start: Option<usize>,
    /// Second start (tv-between-starts).
    #[arg(long = "start-b")]
    pub start_b: Option<usize>,
    /// Evolution horizon.
    #[arg(long, default_value_t = 100)]
    pub steps: u64,
    #[arg(long = "out-dir")]
    pub out_dir: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

pub fn run_exact(args: ExactArgs) -> AnyResult<RunOutcome> {
    let game = args.game.build()?;
    let out = resolve_out_dir(args.out_dir.as_deref());
    let mut s = Summary::new(
        &format!("exact:{}", args.op),
        args.seed,
        serde_json::json!({"game": game.to_json(), "steps": args.steps}),
    );
    match args.op.as_str() {
        "matrix" => {
            let p = build_transition_matrix(&game)?;
            write_file(&out, "matrix.csv", &csvio::matrix_to_csv(&p), &mut s)?;
        }
        "gibbs" => {
            let pi = gibbs_distribution(&game)?;
            write_file(&out, "gibbs.csv", &csvio::distribution_to_csv(&pi), &mut s)?;
        }
        "drift-curve" => {
            // Drift of the Gibbs law (flat) or of a point mass via --start.
            let kernel = LogitKernel::new(&game)?;
            let mu = match args.start {
                Some(x) => Distribution::point(kernel.space().count(), x)?,
                None => gibbs_distribution(&game)?,
            };
            let cert = certify_exact("mu", &mu, &kernel.to_sparse(), f64::INFINITY, args.steps)?;
            write_file(
                &out,
                "drift_curve.csv",
                &csvio::curve_to_csv(cert.drift_curve.as_ref().unwrap()),
                &mut s,
            )?;
        }
        "tv-between-starts" => {
            let kernel = LogitKernel::new(&game)?;
            let dim = kernel.space().count();
            let xa = args.start.ok_or("missing --start")?;
            let xb = args.start_b.ok_or("missing --start-b")?;
            let sparse = kernel.to_sparse();
            let mut a = Distribution::point(dim, xa)?;
            let mut b = Distribution::point(dim, xb)?;
            let mut curve = vec![tv_distance(&a, &b)?];
            for _ in 1..=args.steps {
                a = evolve(&a, &sparse, 1)?;
                b = evolve(&b, &sparse, 1)?;
                curve.push(tv_distance(&a, &b)?);
            }
            write_file(
                &out,
                "tv_between_starts.csv",
                &csvio::curve_to_csv(&curve),
                &mut s,
            )?;
        }
        "bottleneck" => {
            let subset = parse_subset(args.subset.as_deref().ok_or("missing --subset")?, game.n())?;
            let p = build_transition_matrix(&game)?;
            let pi = gibbs_distribution(&game)?;
            let bn = bottleneck_ratio(&p, &pi, &subset)?;
            let pi_s = restricted_distribution(&pi, &subset)?;
            let drift = tv_distance(&evolve(&pi_s, &p, 1)?, &pi_s)?;
            s.push(crate::output::Assertion::close(
                "bottleneck-equals-restricted-drift",
                drift,
                bn,
                1e-12,
            ));
            let mut text = String::from("quantity,value\n");
            text.push_str(&format!("bottleneck,{}\n", csvio::fmt_f64(bn)));
            text.push_str(&format!("restricted_drift,{}\n", csvio::fmt_f64(drift)));
            write_file(&out, "bottleneck.csv", &text, &mut s)?;
        }
        "hit-probability" => {
            let p = build_transition_matrix(&game)?;
            let a_set = parse_subset(args.subset.as_deref().ok_or("missing --subset")?, game.n())?;
            let b_set = parse_subset(
                args.subset_b.as_deref().ok_or("missing --subset-b")?,
                game.n(),
            )?;
            let start = args.start.ok_or("missing --start")?;
            let h = absorbing_hit_probability(&p, &a_set, &b_set, start)?;
            let mut text = String::from("quantity,value\n");
            text.push_str(&format!("hit_probability,{}\n", csvio::fmt_f64(h)));
            write_file(&out, "hit_probability.csv", &text, &mut s)?;
        }
        "hit-cdf" => {
            let p = build_transition_matrix(&game)?;
            let targets =
                parse_subset(args.subset.as_deref().ok_or("missing --subset")?, game.n())?;
            let start = args.start.ok_or("missing --start")?;
            let cdf = hitting_time_cdf(&p, &targets, start, args.steps)?;
            write_file(&out, "hit_cdf.csv", &csvio::cdf_to_csv(&cdf), &mut s)?;
        }
        "absorption-time" => {
            let p = build_transition_matrix(&game)?;
            let targets =
                parse_subset(args.subset.as_deref().ok_or("missing --subset")?, game.n())?;
            let start = args.start.ok_or("missing --start")?;
            let m = expected_absorption_time(&p, &targets, start)?;
            let mut text = String::from("quantity,value\n");
            text.push_str(&format!("expected_absorption_time,{}\n", csvio::fmt_f64(m)));
            write_file(&out, "absorption_time.csv", &text, &mut s)?;
        }
        "lump-weight" => {
            let (bd, dev) = lumped_birth_death(&game)?;
            s.push(crate::output::Assertion::close(
                "weight-lumping-deviation",
                dev,
                0.0,
                1e-12,
            ));
            write_file(
                &out,
                "lumped_chain.csv",
                &csvio::bd_chain_to_csv(&bd),
                &mut s,
            )?;
        }
        other => return Err(format!("unknown exact op `{other}`").into()),
    }
    finish(s, args.json)
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Start state index (profile bits packed little-endian).
    #[arg(long, default_value_t = 0)]
    pub start: usize,
    #[arg(long, default_value_t = 1_000)]
    pub steps: u64,
    #[arg(long, default_value_t = 8)]
    pub replicas: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Snapshot stride for the trajectory CSV.
    #[arg(long = "record-every", default_value_t = 1)]
    pub record_every: u64,
    /// Optional hitting target (subset selector); switches to hitting-time
    /// sampling with `--steps` as the cap.
    #[arg(long = "hit-target")]
    pub hit_target: Option<String>,
    #[arg(long = "out-dir")]
    pub out_dir: Option<String>,
    #[arg(long)]
    pub json: bool,
}

pub fn run_simulate(args: SimulateArgs) -> AnyResult<RunOutcome> {
    let game = args.game.build()?;
    logitdyn::sim::ensure_simulable(&game)?;
    let out = resolve_out_dir(args.out_dir.as_deref());
    let mut s = Summary::new(
        "simulate",
        args.seed,
        serde_json::json!({
            "game": game.to_json(),
            "start": args.start,
            "steps": args.steps,
            "replicas": args.replicas,
            "record_every": args.record_every,
        }),
    );
    match &args.hit_target {
        Some(target_spec) => {
            let targets = parse_subset(target_spec, game.n())?;
            let mask: std::collections::HashSet<usize> = targets.into_iter().collect();
            let samples = hitting_time_samples(
                &game,
                args.start,
                move |x| mask.contains(&x),
                args.steps,
                args.replicas,
                args.seed,
            )?;
            write_file(
                &out,
                "hitting_samples.csv",
                &csvio::hitting_samples_to_csv(&samples),
                &mut s,
            )?;
        }
        None => {
            let config = SimConfig {
                steps: args.steps,
                replicas: args.replicas,
                seed: args.seed,
                record_every: args.record_every,
            };
            let trajectories = run_trajectories(&game, args.start, &config)?;
            write_file(
                &out,
                "trajectories.csv",
                &csvio::trajectories_to_csv(&trajectories),
                &mut s,
            )?;
        }
    }
    finish(s, args.json)
}

#[derive(Debug, Args)]
pub struct BdArgs {
    /// Chain selector: `ehrenfest` | `or-projection` | `magnetization` | `file:<path>`.
    #[arg(long)]
    pub chain: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// One of: ruin | ruin-closed | exit-time | cdf.
    #[arg(long)]
    pub op: String,
    #[arg(long)]
    pub start: Option<usize>,
    /// Closed-form rates (ruin-closed).
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Hitting targets as comma-separated chain indices (cdf).
    #[arg(long)]
    pub targets: Option<String>,
    #[arg(long = "t-max", default_value_t = 1_000)]
    pub t_max: u64,
    #[arg(long = "out-dir")]
    pub out_dir: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

fn build_bd_chain(args: &BdArgs) -> AnyResult<BirthDeathChain> {
    match args.chain.as_str() {
        "ehrenfest" => Ok(ehrenfest(args.n.ok_or("missing --n")?)?),
        "or-projection" => Ok(or_projection(
            args.n.ok_or("missing --n")?,
            args.beta.ok_or("missing --beta")?,
        )?),
        "magnetization" => Ok(magnetization_chain(
            args.n.ok_or("missing --n")?,
            args.beta.ok_or("missing --beta")?,
        )?),
        other => {
            if let Some(path) = other.strip_prefix("file:") {
                let text = std::fs::read_to_string(path)?;
                Ok(csvio::bd_chain_from_csv(&text)?)
            } else {
                Err(format!("unknown chain `{other}`").into())
            }
        }
    }
}

pub fn run_bd(args: BdArgs) -> AnyResult<RunOutcome> {
    let out = resolve_out_dir(args.out_dir.as_deref());
    let mut s = Summary::new(
        &format!("bd:{}", args.op),
        args.seed,
        serde_json::json!({"chain": args.chain, "n": args.n, "beta": args.beta}),
    );
    match args.op.as_str() {
        "ruin-closed" => {
            let n = args.n.ok_or("missing --n")?;
            let h = args.start.ok_or("missing --start")?;
            let v = ruin_probability_constant_rates(
                n,
                h,
                args.eps.ok_or("missing --eps")?,
                args.delta.ok_or("missing --delta")?,
            )?;
            if v.degenerate {
                s.warn("degenerate rates: the exit side is forced, not solved");
            }
            let mut text = String::from("quantity,value\n");
            text.push_str(&format!(
                "ruin_probability,{}\n",
                csvio::fmt_f64(v.probability)
            ));
            write_file(&out, "ruin_closed.csv", &text, &mut s)?;
        }
        "ruin" => {
            let chain = build_bd_chain(&args)?;
            let h = args.start.ok_or("missing --start")?;
            let v = ruin_probability(&chain, h)?;
            let mut text = String::from("quantity,value\n");
            text.push_str(&format!("ruin_probability,{}\n", csvio::fmt_f64(v)));
            write_file(&out, "ruin.csv", &text, &mut s)?;
        }
        "ruin-bound" => {
            let chain = build_bd_chain(&args)?;
            let h = args.start.ok_or("missing --start")?;
            let alpha = args.eps.ok_or("missing --eps (used as alpha)")?;
            let bound = ruin_bound_geometric(&chain, h, alpha)?;
            let exact = 1.0 - ruin_probability(&chain, h)?;
            s.push(crate::output::Assertion::at_most(
                "geometric-bound-dominates",
                exact,
                bound,
            ));
            let mut text = String::from("quantity,value\n");
            text.push_str(&format!("bound,{}\n", csvio::fmt_f64(bound)));
            text.push_str(&format!("exact,{}\n", csvio::fmt_f64(exact)));
            write_file(&out, "ruin_bound.csv", &text, &mut s)?;
        }
        "exit-time" => {
            let chain = build_bd_chain(&args)?;
            let h = args.start.ok_or("missing --start")?;
            let m = exit_time_expectation(&chain, h)?;
            let mut text = String::from("quantity,value\n");
            text.push_str(&format!("expected_exit_time,{}\n", csvio::fmt_f64(m)));
            write_file(&out, "exit_time.csv", &text, &mut s)?;
        }
        "cdf" => {
            let chain = build_bd_chain(&args)?;
            let start = args.start.ok_or("missing --start")?;
            let targets: Vec<usize> = args
                .targets
                .as_deref()
                .ok_or("missing --targets")?
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| format!("bad target: {e}"))?;
            let cdf = hit_cdf_1d(&chain, &targets, start, args.t_max)?;
            write_file(&out, "bd_hit_cdf.csv", &csvio::cdf_to_csv(&cdf), &mut s)?;
        }
        other => return Err(format!("unknown bd op `{other}`").into()),
    }
    finish(s, args.json)
}

#[derive(Debug, Args)]
pub struct MetaArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Distribution selector: `gibbs` | `uniform` | `point:<idx>` |
    /// `restricted:<subset>` | `consensus-mix:<d>`.
    #[arg(long, default_value = "gibbs")]
    pub mu: String,
    /// One of: certify | pseudo-mix.
    #[arg(long)]
    pub op: String,
    #[arg(long = "epsilon-tv", default_value_t = 0.1)]
    pub epsilon_tv: f64,
    #[arg(long, default_value_t = 1_000)]
    pub horizon: u64,
    /// Start subset for pseudo-mix.
    #[arg(long)]
    pub starts: Option<String>,
    #[arg(long = "out-dir")]
    pub out_dir: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

fn build_mu(spec: &str, game: &GameSpec, dim: usize) -> AnyResult<Distribution> {
    if spec == "gibbs" {
        return Ok(gibbs_distribution(game)?);
    }
    if spec == "uniform" {
        return Ok(Distribution::uniform(dim));
    }
    if let Some(idx) = spec.strip_prefix("point:") {
        return Ok(Distribution::point(dim, idx.parse()?)?);
    }
    if let Some(sub) = spec.strip_prefix("restricted:") {
        let subset = parse_subset(sub, game.n())?;
        return Ok(restricted_distribution(
            &gibbs_distribution(game)?,
            &subset,
        )?);
    }
    if let Some(d) = spec.strip_prefix("consensus-mix:") {
        let d: usize = d.parse()?;
        let w = d as f64 / game.n() as f64;
        return Ok(Distribution::mix(
            &Distribution::point(dim, 0)?,
            &Distribution::point(dim, dim - 1)?,
            w,
        )?);
    }
    Err(format!("unknown distribution selector `{spec}`").into())
}

pub fn run_meta(args: MetaArgs) -> AnyResult<RunOutcome> {
    let game = args.game.build()?;
    let kernel = LogitKernel::new(&game)?;
    let sparse = kernel.to_sparse();
    let dim = kernel.space().count();
    let out = resolve_out_dir(args.out_dir.as_deref());
    let mut s = Summary::new(
        &format!("meta:{}", args.op),
        args.seed,
        serde_json::json!({
            "game": game.to_json(),
            "mu": args.mu,
            "epsilon_tv": args.epsilon_tv,
            "horizon": args.horizon,
        }),
    );
    let mu = build_mu(&args.mu, &game, dim)?;
    match args.op.as_str() {
        "certify" => {
            let mut cert = certify_exact(&args.mu, &mu, &sparse, args.epsilon_tv, args.horizon)?;
            if let Some(curve) = &cert.drift_curve {
                write_file(&out, "drift_curve.csv", &csvio::curve_to_csv(curve), &mut s)?;
                cert.curve_file = Some("drift_curve.csv".into());
            }
            s.push(crate::output::Assertion::close(
                "certificate-valid",
                if cert.valid { 1.0 } else { 0.0 },
                1.0,
                0.0,
            ));
            let mut slim = cert.clone();
            slim.drift_curve = None;
            write_file(&out, "certificate.json", &slim.to_json(), &mut s)?;
        }
        "pseudo-mix" => {
            let starts = parse_subset(args.starts.as_deref().ok_or("missing --starts")?, game.n())?;
            let report = pseudo_mix_time(
                &args.mu,
                &mu,
                &sparse,
                &starts,
                args.epsilon_tv,
                args.horizon,
            )?;
            s.push(crate::output::Assertion::close(
                "pseudo-mixing-concluded",
                if report.t_found.is_some() { 1.0 } else { 0.0 },
                1.0,
                0.0,
            ));
            write_file(&out, "pseudo_mix_report.json", &report.to_json(), &mut s)?;
        }
        other => return Err(format!("unknown meta op `{other}`").into()),
    }
    finish(s, args.json)
}
