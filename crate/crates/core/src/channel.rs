//! Memoryless binary-input output-symmetric channels: BSC and BI-AWGN.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::density::{QuantizationSpec, QuantizedDensity, DEFAULT_DELTA, DEFAULT_SPAN_SIGMAS, DEFAULT_TAIL_TOLERANCE};
use crate::tanner::Codeword;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Channel {
    /// Binary symmetric channel with crossover probability `p`.
    Bsc { p: f64 },
    /// `y = (-1)^x + N(0, sigma²)`.
    BiAwgn { sigma: f64 },
}

/// Log-likelihood ratios `ln f(y|0)/f(y|1)`; every entry is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlrVector(Vec<f64>);

impl LlrVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("LLR entry {i} is not finite")));
        }
        Ok(LlrVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for LlrVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl Channel {
    pub fn bsc(p: f64) -> Result<Self> {
        let ch = Channel::Bsc { p };
        ch.validate()?;
        Ok(ch)
    }

    pub fn bi_awgn(sigma: f64) -> Result<Self> {
        let ch = Channel::BiAwgn { sigma };
        ch.validate()?;
        Ok(ch)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Channel::Bsc { p } if !(p > 0.0 && p < 0.5) => Err(Error::InvalidArgument(format!(
                "BSC crossover must lie in (0, 1/2), got {p}"
            ))),
            Channel::BiAwgn { sigma } if !(sigma > 0.0 && sigma.is_finite()) => Err(
                Error::InvalidArgument(format!("noise deviation must be positive, got {sigma}")),
            ),
            _ => Ok(()),
        }
    }

    /// `ln((1-p)/p)` for the BSC, `None` for continuous outputs.
    pub fn bsc_llr_magnitude(&self) -> Option<f64> {
        match *self {
            Channel::Bsc { p } => Some(((1.0 - p) / p).ln()),
            Channel::BiAwgn { .. } => None,
        }
    }

    /// Transmit `x`. BSC outputs are 0/1 as reals.
    pub fn sample(&self, x: &Codeword, seed: u64) -> Vec<f64> {
        self.sample_with(x.bits(), &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, bits: &[u8], rng: &mut R) -> Vec<f64> {
        match *self {
            Channel::Bsc { p } => bits
                .iter()
                .map(|&b| {
                    let flip = rng.random::<f64>() < p;
                    f64::from(b ^ u8::from(flip))
                })
                .collect(),
            Channel::BiAwgn { sigma } => bits
                .iter()
                .map(|&b| {
                    let z: f64 = rng.sample(StandardNormal);
                    let sign = if b == 0 { 1.0 } else { -1.0 };
                    sign + sigma * z
                })
                .collect(),
        }
    }

    pub fn llr(&self, y: &[f64]) -> LlrVector {
        let v = match *self {
            Channel::Bsc { p } => {
                let l = ((1.0 - p) / p).ln();
                y.iter().map(|&yi| if yi == 0.0 { l } else { -l }).collect()
            }
            Channel::BiAwgn { sigma } => y.iter().map(|&yi| 2.0 * yi / (sigma * sigma)).collect(),
        };
        LlrVector(v)
    }

    /// One positively scaled LLR drawn under `x = 0`: `1 + N(0, sigma²)` for
    /// the BI-AWGN, `±1` for the BSC.
    pub fn sample_scaled_llr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Channel::Bsc { p } => {
                if rng.random::<f64>() < p {
                    -1.0
                } else {
                    1.0
                }
            }
            Channel::BiAwgn { sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                1.0 + sigma * z
            }
        }
    }

    /// Quantized density of the scaled LLR under `x = 0` on `grid`. For the
    /// BSC the two point masses `±1` are snapped to the nearest grid points.
    pub fn llr_density(&self, grid: &QuantizationSpec) -> Result<QuantizedDensity> {
        self.validate()?;
        match *self {
            Channel::Bsc { p } => QuantizedDensity::from_point_masses(
                grid.delta,
                &[(-1.0, p), (1.0, 1.0 - p)],
                grid.tail_tolerance,
            ),
            Channel::BiAwgn { sigma } => QuantizedDensity::gaussian(1.0, sigma, grid),
        }
    }

    /// Grid of step `delta` spanning `1 ± span_sigmas·σ` (BI-AWGN) or `[-1, 1]`
    /// (BSC).
    pub fn default_grid(&self, delta: f64, span_sigmas: f64, tail_tolerance: f64) -> Result<QuantizationSpec> {
        match *self {
            Channel::Bsc { .. } => QuantizationSpec::covering(delta, -1.0, 1.0, tail_tolerance),
            Channel::BiAwgn { sigma } => QuantizationSpec::covering(
                delta,
                1.0 - span_sigmas * sigma,
                1.0 + span_sigmas * sigma,
                tail_tolerance,
            ),
        }
    }

    pub fn default_density(&self) -> Result<QuantizedDensity> {
        let delta = match self {
            Channel::Bsc { .. } => 1.0,
            Channel::BiAwgn { .. } => DEFAULT_DELTA,
        };
        self.llr_density(&self.default_grid(delta, DEFAULT_SPAN_SIGMAS, DEFAULT_TAIL_TOLERANCE)?)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::Bsc { p } => write!(f, "bsc:{p}"),
            Channel::BiAwgn { sigma } => write!(f, "biawgn:{sigma}"),
        }
    }
}

impl FromStr for Channel {
    type Err = Error;

    /// `bsc:0.05` or `biawgn:0.7`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, param) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("channel spec `{s}` is not KIND:PARAM")))?;
        let v: f64 = param
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad channel parameter `{param}`")))?;
        match kind.trim().to_ascii_lowercase().as_str() {
            "bsc" => Channel::bsc(v),
            "biawgn" | "awgn" => Channel::bi_awgn(v),
            other => Err(Error::Parse(format!("unknown channel `{other}`"))),
        }
    }
}
