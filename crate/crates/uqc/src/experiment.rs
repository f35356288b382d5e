//! Experiment runs: for every source and block length, build (or reuse) the
//! universal projector and evaluate acceptance, fidelity and rate.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use uqc_core::scheme::{c1_entanglement_fidelity, c1_entanglement_fidelity_diagonal};
use uqc_core::source::QuantumSource;
use uqc_core::universal::{assemble_with, override_schedule, schedule, BuildOptions, Schedule, UniversalProjector};
use uqc_core::{tol, Error as CoreError};

use crate::cache::SharedCache;
use crate::config::{ExperimentConfig, Scheme};
use crate::export::{JoinInfo, ScheduleInfo};

pub const CSV_HEADER: [&str; 8] = [
    "source",
    "n",
    "r",
    "accept_prob",
    "entanglement_fidelity",
    "achieved_rate",
    "wall_ms",
    "error",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub source: String,
    pub n: usize,
    pub r: f64,
    pub accept_prob: Option<f64>,
    pub entanglement_fidelity: Option<f64>,
    pub achieved_rate: Option<f64>,
    pub wall_ms: Option<f64>,
    pub error: Option<String>,
    /// Projector details, JSON only.
    pub schedule: Option<ScheduleInfo>,
    pub rank: Option<usize>,
    pub join: Option<JoinInfo>,
    /// Set when the row failed inside the orbit join.
    #[serde(skip)]
    pub numerical_failure: bool,
}

impl ReportRow {
    fn csv_record(&self) -> [String; 8] {
        let f = |x: Option<f64>| x.map(|v| format!("{v}")).unwrap_or_default();
        [
            self.source.clone(),
            self.n.to_string(),
            format!("{}", self.r),
            f(self.accept_prob),
            f(self.entanglement_fidelity),
            f(self.achieved_rate),
            f(self.wall_ms),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    pub hermitian: f64,
    pub trace: f64,
    pub span_rank: f64,
    pub projector_leq: f64,
    pub join_tolerance: f64,
    pub zero_overlap: f64,
    pub dim_cap: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub seed: u64,
    pub scheme: Scheme,
    pub config: ExperimentConfig,
    pub tolerances: Tolerances,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn has_numerical_failure(&self) -> bool {
        self.rows.iter().any(|r| r.numerical_failure)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        for row in &self.rows {
            out.write_record(row.csv_record())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Writes `path` (CSV) and the JSON mirror at `path` with extension
    /// `.json`.
    pub fn save(&self, path: &Path) -> Result<PathBuf> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        std::fs::write(path, self.to_csv_string()?).with_context(|| format!("writing {}", path.display()))?;
        let json = path.with_extension("json");
        std::fs::write(&json, self.to_json_string()?).with_context(|| format!("writing {}", json.display()))?;
        Ok(json)
    }
}

/// Everything the projector depends on; the source does not enter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct BuildKey {
    d: usize,
    m: usize,
    l: usize,
    n: usize,
    big_r: u64,
    r: u64,
    context_order: usize,
}

impl BuildKey {
    fn new(s: &Schedule, context_order: usize) -> Self {
        Self {
            d: s.d,
            m: s.m,
            l: s.l,
            n: s.n,
            big_r: s.big_r.to_bits(),
            r: s.r.to_bits(),
            context_order,
        }
    }

    /// Deterministic per-build seed; independent of row order and threads.
    fn seed(&self, master: u64) -> u64 {
        [self.d as u64, self.m as u64, self.l as u64, self.n as u64, self.big_r, self.r, self.context_order as u64]
            .iter()
            .fold(master, |h, &x| (h ^ x).wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(29))
    }
}

type Built = std::result::Result<Arc<UniversalProjector>, CoreError>;

/// Runs the experiment; rows follow the config order (sources, then each
/// source through each channel, then `n`).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let mut jobs: Vec<(String, std::result::Result<QuantumSource, String>)> = Vec::new();
    for named in &cfg.sources {
        let base = named.source.build().map_err(|e| format!("{e:#}"));
        jobs.push((named.id.clone(), base.clone()));
        for ch in &cfg.channels {
            let id = format!("{}+{}", named.id, ch.label());
            let src = base.clone().and_then(|b| {
                let c = ch.build().map_err(|e| format!("{e:#}"))?;
                QuantumSource::channel_transformed(b, c).map_err(|e| e.to_string())
            });
            jobs.push((id, src));
        }
    }
    let ns = cfg.n_range.values();
    let work: Vec<(usize, usize)> = (0..jobs.len()).flat_map(|j| ns.iter().map(move |&n| (j, n))).collect();
    let cache: SharedCache<BuildKey, Built> = SharedCache::new();
    let rows = work
        .par_iter()
        .map(|&(j, n)| run_row(cfg, &jobs[j].0, &jobs[j].1, n, &cache))
        .collect();
    Ok(Report {
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        scheme: cfg.scheme,
        config: cfg.clone(),
        tolerances: Tolerances {
            hermitian: tol::HERMITIAN,
            trace: tol::TRACE,
            span_rank: tol::SPAN_RANK,
            projector_leq: tol::PROJECTOR_LEQ,
            join_tolerance: cfg.join.tolerance,
            zero_overlap: 1e-12,
            dim_cap: tol::DIM_CAP,
        },
        rows,
    })
}

fn schedule_for(cfg: &ExperimentConfig, d: usize, m: usize) -> uqc_core::Result<Schedule> {
    match cfg.schedule_override {
        Some(o) => {
            let big_r = o.big_r.unwrap_or(o.l as f64 * cfg.r);
            override_schedule(m, d, cfg.r, o.l, m / o.l, big_r)
        }
        None => schedule(m, d, cfg.r),
    }
}

fn run_row(
    cfg: &ExperimentConfig,
    id: &str,
    src: &std::result::Result<QuantumSource, String>,
    m: usize,
    cache: &SharedCache<BuildKey, Built>,
) -> ReportRow {
    let start = Instant::now();
    let mut row = ReportRow {
        source: id.to_owned(),
        n: m,
        r: cfg.r,
        accept_prob: None,
        entanglement_fidelity: None,
        achieved_rate: None,
        wall_ms: None,
        error: None,
        schedule: None,
        rank: None,
        join: None,
        numerical_failure: false,
    };
    if let Err(e) = evaluate(cfg, src, m, cache, &mut row) {
        row.numerical_failure = matches!(
            e.downcast_ref::<CoreError>(),
            Some(CoreError::NonConvergence { .. } | CoreError::InvarianceViolated(_))
        );
        row.error = Some(format!("{e:#}"));
    }
    if cfg.timing {
        row.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    row
}

fn evaluate(
    cfg: &ExperimentConfig,
    src: &std::result::Result<QuantumSource, String>,
    m: usize,
    cache: &SharedCache<BuildKey, Built>,
    row: &mut ReportRow,
) -> Result<()> {
    let src = src.as_ref().map_err(|e| anyhow::anyhow!("source: {e}"))?;
    let sched = schedule_for(cfg, src.site_dim(), m)?;
    row.schedule = Some((&sched).into());
    let key = BuildKey::new(&sched, cfg.context_order);
    let opts = BuildOptions {
        context_order: cfg.context_order,
        join: cfg.join.options(),
    };
    let up = cache.get_or_insert_with(key.clone(), || {
        let mut rng = ChaCha8Rng::seed_from_u64(key.seed(cfg.seed));
        assemble_with(sched, &opts, &mut rng).map(Arc::new)
    })?;
    row.rank = Some(up.w().rank());
    row.join = Some((&up.join).into());
    row.achieved_rate = Some(up.trace_log_rate());
    let accept = up.acceptance_probability(src)?;
    row.accept_prob = Some(accept);
    row.entanglement_fidelity = Some(match cfg.scheme {
        Scheme::C1 => c1_fidelity(&up, src)?,
        Scheme::C2 => {
            // Single Kraus operator q/√tr(qρ), so F_e = tr(qρ).
            if accept <= 1e-12 {
                return Err(CoreError::ZeroOverlap(accept).into());
            }
            accept
        }
    });
    Ok(())
}

fn c1_fidelity(up: &UniversalProjector, src: &QuantumSource) -> uqc_core::Result<f64> {
    let m = up.m();
    // The flag must live in range(q) on all m sites, so padding forces q.
    let padded;
    let q = if up.schedule.pad() == 0 {
        up.w()
    } else {
        padded = up.q()?;
        &padded
    };
    match src.diagonal_marginal(m)? {
        Some(probs) => c1_entanglement_fidelity_diagonal(q, &probs),
        None => c1_entanglement_fidelity(q, &src.marginal(m)?),
    }
}

/// Runs the experiment and writes CSV and JSON to `out` (or the configured
/// output, or stdout for the CSV when neither is set).
pub fn run_and_save(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Report> {
    let report = run_experiment(cfg)?;
    match out.map(Path::to_owned).or_else(|| cfg.output.clone()) {
        Some(path) => {
            report.save(&path)?;
        }
        None => report.write_csv(std::io::stdout().lock())?,
    }
    Ok(report)
}
