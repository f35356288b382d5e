//! JSON descriptions of sources and channels.
//!
//! ```json
//! {"kind": "iid", "diag": [0.9, 0.1]}
//! {"kind": "iid_matrix", "re": [[0.75, 0.25], [0.25, 0.25]]}
//! {"kind": "classical", "process": {"kind": "markov", "transition": [[0.9, 0.1], [0.2, 0.8]]}}
//! {"kind": "channel", "inner": {...}, "channel": {"kind": "depolarizing", "p": 0.25}}
//! ```

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use uqc_core::channel::KrausChannel;
use uqc_core::process::ClassicalProcess;
use uqc_core::source::{QuantumAlphabet, QuantumSource};
use uqc_core::{ComplexMatrix, DensityOperator, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    /// `ρ₁ = diag(diag)`.
    Iid { diag: Vec<f64> },
    /// `ρ₁ = re + i·im`.
    IidMatrix {
        re: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<Vec<f64>>>,
    },
    /// Letters placed by a classical process; computational basis unless
    /// `alphabet` lists `[re, im]` components for each letter.
    Classical {
        process: ProcessSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alphabet: Option<Vec<Vec<[f64; 2]>>>,
    },
    Channel {
        inner: Box<SourceSpec>,
        channel: ChannelSpec,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessSpec {
    /// `P(0) = p`.
    Bernoulli { p: f64 },
    Iid { probs: Vec<f64> },
    Markov {
        transition: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial: Option<Vec<f64>>,
    },
    Periodic { alphabet_size: usize, cycle: Vec<usize> },
    Mixture { weights: Vec<f64>, components: Vec<ProcessSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Identity { d: usize },
    Depolarizing { p: f64 },
    Dephasing { p: f64 },
    AmplitudeDamping { gamma: f64 },
    Kraus { d: usize, ops: Vec<MatrixSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixSpec {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        complex_matrix(&self.re, self.im.as_deref())
    }
}

fn complex_matrix(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<ComplexMatrix> {
    let rows = re.len();
    let cols = re.first().map_or(0, Vec::len);
    if re.iter().any(|r| r.len() != cols) {
        bail!("matrix rows have different lengths");
    }
    if let Some(im) = im {
        if im.len() != rows || im.iter().any(|r| r.len() != cols) {
            bail!("real and imaginary parts have different shapes");
        }
    }
    let data = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .map(|(i, j)| C64::new(re[i][j], im.map_or(0.0, |m| m[i][j])))
        .collect();
    Ok(ComplexMatrix::from_vec(rows, cols, data)?)
}

impl ProcessSpec {
    pub fn build(&self) -> Result<ClassicalProcess> {
        Ok(match self {
            ProcessSpec::Bernoulli { p } => ClassicalProcess::bernoulli(*p)?,
            ProcessSpec::Iid { probs } => ClassicalProcess::iid(probs.clone())?,
            ProcessSpec::Markov { transition, initial } => {
                let l = transition.len();
                if transition.iter().any(|r| r.len() != l) {
                    bail!("transition matrix must be square");
                }
                let flat = transition.concat();
                match initial {
                    Some(init) => ClassicalProcess::markov_with_initial(flat, init.clone())?,
                    None => ClassicalProcess::markov(flat)?,
                }
            }
            ProcessSpec::Periodic { alphabet_size, cycle } => {
                ClassicalProcess::periodic(*alphabet_size, cycle.clone())?
            }
            ProcessSpec::Mixture { weights, components } => ClassicalProcess::mixture(
                weights.clone(),
                components.iter().map(ProcessSpec::build).collect::<Result<_>>()?,
            )?,
        })
    }
}

impl ChannelSpec {
    pub fn build(&self) -> Result<KrausChannel> {
        Ok(match self {
            ChannelSpec::Identity { d } => KrausChannel::identity(*d),
            ChannelSpec::Depolarizing { p } => KrausChannel::depolarizing(*p)?,
            ChannelSpec::Dephasing { p } => KrausChannel::dephasing(*p)?,
            ChannelSpec::AmplitudeDamping { gamma } => KrausChannel::amplitude_damping(*gamma)?,
            ChannelSpec::Kraus { d, ops } => KrausChannel::checked(
                *d,
                ops.iter().map(MatrixSpec::to_matrix).collect::<Result<_>>()?,
            )?,
        })
    }

    /// Short label used in report source ids.
    pub fn label(&self) -> String {
        match self {
            ChannelSpec::Identity { .. } => "identity".into(),
            ChannelSpec::Depolarizing { p } => format!("depolarizing({p})"),
            ChannelSpec::Dephasing { p } => format!("dephasing({p})"),
            ChannelSpec::AmplitudeDamping { gamma } => format!("amplitude_damping({gamma})"),
            ChannelSpec::Kraus { ops, .. } => format!("kraus[{}]", ops.len()),
        }
    }
}

impl SourceSpec {
    pub fn build(&self) -> Result<QuantumSource> {
        Ok(match self {
            SourceSpec::Iid { diag } => QuantumSource::iid(DensityOperator::diagonal(diag)?),
            SourceSpec::IidMatrix { re, im } => {
                QuantumSource::iid(DensityOperator::new(complex_matrix(re, im.as_deref())?)?)
            }
            SourceSpec::Classical { process, alphabet } => {
                let p = process.build()?;
                let a = match alphabet {
                    None => QuantumAlphabet::computational(p.alphabet_size()),
                    Some(vs) => QuantumAlphabet::new(
                        vs.iter()
                            .map(|v| v.iter().map(|&[re, im]| C64::new(re, im)).collect())
                            .collect(),
                    )?,
                };
                QuantumSource::classically_correlated(p, a)?
            }
            SourceSpec::Channel { inner, channel } => {
                QuantumSource::channel_transformed(inner.build()?, channel.build()?)?
            }
        })
    }
}

/// Reads a spec given inline as JSON or as `@path` to a JSON file.
pub fn read_spec<T: for<'de> Deserialize<'de>>(arg: &str) -> Result<T> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(Path::new(path))
            .with_context(|| format!("reading {path}"))?,
        None => arg.to_owned(),
    };
    serde_json::from_str(&text).context("parsing JSON spec")
}
