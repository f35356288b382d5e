use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use uqc_core::info::mean_entropy;
use uqc_core::scheme::{c2_entanglement_fidelity, compress_c2, C1Scheme};
use uqc_core::source::{check_consistency, check_stationarity, ergodicity_gap, QuantumSource};
use uqc_core::universal::{assemble_with, override_schedule, BuildOptions, JoinMethod, JoinOptions};
use uqc_core::{ComplexMatrix, Error as CoreError};

use uqc::cache::CachedSource;
use uqc::config::ExperimentConfig;
use uqc::experiment::run_and_save;
use uqc::export::{file_names, load_projector, save_projector, write_matrix};
use uqc::spec::{read_spec, ChannelSpec, SourceSpec};

/// Universal compression of stationary quantum sources.
///
/// Source and channel specs are JSON, given inline or as `@file.json`.
#[derive(Parser)]
#[command(name = "uqc", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Von Neumann entropies S(ρ_n) and the entropy-rate estimate.
    Entropy {
        source: String,
        /// Block lengths (comma separated).
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
        n: Vec<usize>,
    },
    /// Consistency, stationarity and ergodicity diagnostics, optionally for
    /// the image of the source under a channel as well.
    CheckErgodic {
        source: String,
        #[arg(long)]
        channel: Option<String>,
        /// Length of the Cesàro average.
        #[arg(long = "N", default_value_t = 2000)]
        big_n: usize,
        /// Sites carrying each observable.
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Largest marginal used by the consistency checks.
        #[arg(long, default_value_t = 6)]
        max_sites: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Builds q for n blocks of l sites at block rate R and writes it out.
    BuildProjector {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        n: usize,
        #[arg(long = "R")]
        big_r: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sidecar path; grids go next to it.
        #[arg(long)]
        out: PathBuf,
        /// Context order of the code ordering.
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, value_enum, default_value_t = JoinArg::Lie)]
        join: JoinArg,
        /// Stable-rank budget for `--join haar`.
        #[arg(long, default_value_t = 32)]
        budget: usize,
        /// Largest accepted invariance residual of the join.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Applies a stored projector to a source marginal.
    Compress {
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Projector sidecar written by build-projector.
        #[arg(long)]
        projector: PathBuf,
        #[arg(long)]
        source: String,
        /// Prefix for the output state grids.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Runs a JSON experiment config and writes the CSV report and its JSON
    /// mirror.
    Run {
        config: PathBuf,
        /// CSV path, overriding the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    C1,
    C2,
}

#[derive(Clone, Copy, ValueEnum)]
enum JoinArg {
    Lie,
    Haar,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for numerical non-convergence of the orbit join, 1 otherwise.
fn exit_code(e: &anyhow::Error) -> u8 {
    let numerical = e.chain().any(|c| {
        matches!(
            c.downcast_ref::<CoreError>(),
            Some(CoreError::NonConvergence { .. } | CoreError::InvarianceViolated(_))
        )
    });
    if numerical {
        2
    } else {
        1
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Entropy { source, n } => entropy(&source, &n)?,
        Cmd::CheckErgodic {
            source,
            channel,
            big_n,
            m,
            max_sites,
            seed,
        } => check_ergodic(&source, channel.as_deref(), big_n, m, max_sites, seed)?,
        Cmd::BuildProjector {
            d,
            l,
            n,
            big_r,
            seed,
            out,
            k,
            join,
            budget,
            tolerance,
        } => {
            let sched = override_schedule(l * n, d, big_r / l as f64, l, n, big_r)?;
            let opts = BuildOptions {
                context_order: k,
                join: JoinOptions {
                    method: match join {
                        JoinArg::Lie => JoinMethod::LieClosure,
                        JoinArg::Haar => JoinMethod::HaarSaturation { budget },
                    },
                    tolerance,
                    ..JoinOptions::default()
                },
            };
            let up = assemble_with(sched, &opts, &mut ChaCha8Rng::seed_from_u64(seed))?;
            let meta = save_projector(&out, &up, seed)?;
            println!("{}", serde_json::to_string_pretty(&meta)?);
        }
        Cmd::Compress {
            scheme,
            projector,
            source,
            out,
        } => compress(scheme, &projector, &source, out)?,
        Cmd::Experiment(ExperimentCmd::Run { config, out }) => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = run_and_save(&cfg, out.as_deref())?;
            if report.has_numerical_failure() {
                eprintln!("error: some rows failed in the orbit join");
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn build_source(arg: &str) -> Result<QuantumSource> {
    read_spec::<SourceSpec>(arg)?.build()
}

fn entropy(arg: &str, ns: &[usize]) -> Result<()> {
    let src = build_source(arg)?;
    let est = mean_entropy(&src, ns)?;
    println!("n\tS(rho_n)\tS(rho_n)/n");
    for &(n, s) in &est.values {
        println!("{n}\t{:.10}\t{:.10}", s * n as f64, s);
    }
    println!("rate_estimate\t{:.10}", est.extrapolated);
    if let Some(a) = est.analytic {
        println!("analytic_rate\t{a:.10}");
    }
    Ok(())
}

fn diagnostics(src: &QuantumSource, big_n: usize, m: usize, max_sites: usize, seed: u64) -> Result<serde_json::Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Each marginal is needed by several (m, i) pairs.
    let cached = CachedSource::new(src.clone());
    let mut consistency = 0.0f64;
    let mut stationarity = 0.0f64;
    for total in 2..=max_sites {
        for i in 1..total {
            consistency = consistency.max(check_consistency(&cached, total - i, i, 4, &mut rng)?);
            stationarity = stationarity.max(check_stationarity(&cached, total - i, i, 4, &mut rng)?);
        }
    }
    // a = b = |0…0⟩⟨0…0| on m sites.
    let dim = src.site_dim().pow(m as u32);
    let mut a = ComplexMatrix::zeros(dim, dim);
    a[(0, 0)] = uqc_core::C64::new(1.0, 0.0);
    let rep = ergodicity_gap(src, &a, &a, m, big_n)?;
    Ok(json!({
        "stationary": src.is_stationary(),
        "consistency_deviation": consistency,
        "stationarity_deviation": stationarity,
        "max_sites": max_sites,
        "ergodicity": {
            "m": rep.m,
            "N": rep.n,
            "cesaro": rep.cesaro,
            "product": rep.product,
            "gap": rep.gap(),
            "weak_mixing": rep.weak_mixing,
            "tail": rep.tail,
            "decay_slope": rep.decay_slope,
        },
    }))
}

fn check_ergodic(arg: &str, channel: Option<&str>, big_n: usize, m: usize, max_sites: usize, seed: u64) -> Result<()> {
    ensure!(max_sites >= 2, "--max-sites must be at least 2");
    let src = build_source(arg)?;
    let mut out = json!({ "source": diagnostics(&src, big_n, m, max_sites, seed)? });
    if let Some(c) = channel {
        let ch = read_spec::<ChannelSpec>(c)?;
        let image = QuantumSource::channel_transformed(src, ch.build()?)?;
        out["channel"] = json!(ch.label());
        out["image"] = diagnostics(&image, big_n, m, max_sites, seed)?;
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn compress(scheme: SchemeArg, projector: &std::path::Path, arg: &str, out: Option<PathBuf>) -> Result<()> {
    let (p, meta) = load_projector(projector)?;
    let src = build_source(arg)?;
    if src.site_dim() != meta.d {
        bail!("source has site dimension {}, projector was built for {}", src.site_dim(), meta.d);
    }
    let rho = src.marginal(meta.sites).context("source marginal")?;
    let accept = p.trace_with(rho.matrix())?.re;
    let (state, fe, name) = match scheme {
        SchemeArg::C1 => {
            let s = C1Scheme::new(p)?;
            (s.apply(&rho)?, s.entanglement_fidelity(&rho)?, "c1")
        }
        SchemeArg::C2 => (compress_c2(&p, &rho)?, c2_entanglement_fidelity(&p, &rho)?, "c2"),
    };
    let mut report = json!({
        "scheme": name,
        "sites": meta.sites,
        "rank": meta.rank,
        "accept_prob": accept,
        "entanglement_fidelity": fe,
        "achieved_rate": (meta.rank as f64).log2() / meta.sites as f64,
        "output_trace": state.matrix().trace().re,
    });
    if let Some(prefix) = out {
        let (_, re, im) = file_names(&prefix);
        write_matrix(&re, &im, state.matrix())?;
        report["output_re"] = json!(re);
        report["output_im"] = json!(im);
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
