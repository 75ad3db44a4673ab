//! Monte-Carlo PAM channel with additive white Gaussian noise.
//!
//! Each symbol of a codeword is sent as its amplitude level, perturbed by
//! i.i.d. `N(0, sigma²)` noise, rounded to the nearest integer (halves away
//! from zero) and handed to the matching decoder. Trial `k` draws from its
//! own ChaCha20 stream (`seed`, stream `k`), so results do not depend on
//! thread scheduling or on how many trials follow.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{decode_binary, decode_qary, encode_binary, encode_qary, message_len, MessageVector};
use crate::constructions::{explicit_decode, explicit_radius, ExplicitCode};
use crate::{PaError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodecKind {
    Binary,
    Qary,
    Explicit,
}

impl std::str::FromStr for CodecKind {
    type Err = PaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(CodecKind::Binary),
            "qary" => Ok(CodecKind::Qary),
            "explicit" => Ok(CodecKind::Explicit),
            _ => Err(PaError::invalid(format!("unknown codec {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Noise standard deviation in amplitude levels.
    pub sigma: f64,
    pub trials: u64,
    pub seed: u64,
    /// When set, quantized errors are clamped to `[-clip, clip]`.
    pub clip: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub codec: CodecKind,
    pub n: usize,
    pub d: usize,
    /// Alphabet size; ignored by the explicit codec.
    pub q: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub trials: u64,
    /// Coordinates whose quantized value differs from the sent symbol.
    pub symbol_errors_pre_decode: u64,
    /// Trials whose decoded message differs from the sent one.
    pub block_decode_failures: u64,
    /// Wrong message digits; for the explicit codec the digits are the
    /// codeword coordinates themselves.
    pub message_digit_errors: u64,
    pub symbols_per_trial: usize,
    pub digits_per_trial: usize,
    pub symbol_error_rate: f64,
    pub block_failure_rate: f64,
    pub digit_error_rate: f64,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    symbols: u64,
    blocks: u64,
    digits: u64,
}

impl std::ops::Add for Tally {
    type Output = Tally;

    fn add(self, o: Tally) -> Tally {
        Tally {
            symbols: self.symbols + o.symbols,
            blocks: self.blocks + o.blocks,
            digits: self.digits + o.digits,
        }
    }
}

fn rate(count: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

/// Rounds half away from zero and applies the optional clamp.
pub fn quantize(sent: i64, noise: f64, clip: Option<u32>) -> i64 {
    let mut err = noise.round() as i64;
    if let Some(c) = clip {
        err = err.clamp(-(c as i64), c as i64);
    }
    sent + err
}

enum Prepared {
    Chain { k: usize },
    Explicit,
}

pub fn simulate(params: &CodeParams, cfg: &ChannelConfig) -> Result<SimStats> {
    let CodeParams { codec, n, d, q } = *params;
    if !(cfg.sigma >= 0.0 && cfg.sigma.is_finite()) {
        return Err(PaError::invalid(format!("sigma must be finite and >= 0, got {}", cfg.sigma)));
    }
    if cfg.trials < 1 {
        return Err(PaError::invalid("trials must be >= 1"));
    }
    let prepared = match codec {
        CodecKind::Binary => Prepared::Chain {
            k: message_len(n, d, 2)?,
        },
        CodecKind::Qary => Prepared::Chain {
            k: message_len(n, d, q)?,
        },
        CodecKind::Explicit => {
            ExplicitCode::new(n, d)?;
            Prepared::Explicit
        }
    };
    let q = if codec == CodecKind::Binary { 2 } else { q };
    let normal = Normal::new(0.0, cfg.sigma).map_err(|e| PaError::invalid(e.to_string()))?;

    let run_trial = |trial: u64| -> Result<Tally> {
        let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
        rng.set_stream(trial);
        let (sent_digits, word): (Vec<u32>, Vec<u32>) = match &prepared {
            Prepared::Chain { k } => {
                let digits: Vec<u32> = (0..*k).map(|_| rng.random_range(0..q as u32)).collect();
                let msg = MessageVector::new(digits.clone(), q)?;
                let word = match codec {
                    CodecKind::Binary => encode_binary(&msg, n, d)?,
                    _ => encode_qary(&msg, n, d, q)?,
                };
                (digits, word.into_vec())
            }
            Prepared::Explicit => {
                // uniform codeword: shuffle each residue class independently
                let mut word = vec![0u32; n];
                for c in 1..=d {
                    let mut class: Vec<u32> = (c..=n).step_by(d).map(|v| v as u32).collect();
                    class.shuffle(&mut rng);
                    for (slot, v) in class.into_iter().enumerate() {
                        word[c - 1 + slot * d] = v;
                    }
                }
                (word.clone(), word)
            }
        };
        let received: Vec<i64> = word
            .iter()
            .map(|&v| {
                let noise = if cfg.sigma == 0.0 { 0.0 } else { normal.sample(&mut rng) };
                quantize(v as i64, noise, cfg.clip)
            })
            .collect();
        let symbols = word
            .iter()
            .zip(&received)
            .filter(|(&s, &r)| s as i64 != r)
            .count() as u64;
        let decoded: Vec<i64> = match codec {
            CodecKind::Binary => decode_binary(&received, n, d)?.digits.into_iter().map(i64::from).collect(),
            CodecKind::Qary => decode_qary(&received, n, d, q)?.digits.into_iter().map(i64::from).collect(),
            CodecKind::Explicit => explicit_decode(n, d, &received)?.values,
        };
        let digits = sent_digits
            .iter()
            .zip(&decoded)
            .filter(|(&s, &r)| s as i64 != r)
            .count() as u64;
        Ok(Tally {
            symbols,
            blocks: (digits > 0) as u64,
            digits,
        })
    };

    let total = (0..cfg.trials)
        .into_par_iter()
        .map(run_trial)
        .try_reduce(Tally::default, |a, b| Ok(a + b))?;

    let digits_per_trial = match &prepared {
        Prepared::Chain { k } => *k,
        Prepared::Explicit => n,
    };
    Ok(SimStats {
        trials: cfg.trials,
        symbol_errors_pre_decode: total.symbols,
        block_decode_failures: total.blocks,
        message_digit_errors: total.digits,
        symbols_per_trial: n,
        digits_per_trial,
        symbol_error_rate: rate(total.symbols, cfg.trials * n as u64),
        block_failure_rate: rate(total.blocks, cfg.trials),
        digit_error_rate: rate(total.digits, cfg.trials * digits_per_trial as u64),
    })
}

/// Clip radius under which `codec` decodes every word correctly.
pub fn guaranteed_clip(params: &CodeParams) -> u32 {
    match params.codec {
        CodecKind::Explicit => explicit_radius(params.d) as u32,
        CodecKind::Binary | CodecKind::Qary => ((params.d.max(1) - 1) / 2) as u32,
    }
}
