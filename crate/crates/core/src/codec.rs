//! Direct message encoding into chain codes, without materializing the code.
//!
//! A word of the q-ary chain code of length `n` is fixed by choosing, at each
//! position `i ≤ n − (q−1)d`, one of the extension points of level
//! `ν = n − i`. Prepending `m` and shifting every value `≥ m` is the same as
//! taking the `m`-th smallest of the values not used so far, which is what the
//! encoders below do. The last `(q−1)d` positions receive the remaining values
//! in increasing order.

use serde::{Deserialize, Serialize};

use crate::constructions::chain_points;
use crate::{PaError, Permutation, Result};

/// Digits in `[0, q−1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MessageVector {
    pub digits: Vec<u32>,
    pub q: usize,
}

impl MessageVector {
    pub fn new(digits: Vec<u32>, q: usize) -> Result<Self> {
        if q < 2 {
            return Err(PaError::invalid(format!("alphabet size must be >= 2, got {q}")));
        }
        if let Some(&x) = digits.iter().find(|&&x| x as usize >= q) {
            return Err(PaError::invalid(format!("digit {x} out of range for q={q}")));
        }
        Ok(MessageVector { digits, q })
    }

    pub fn binary(digits: Vec<u32>) -> Result<Self> {
        MessageVector::new(digits, 2)
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }
}

/// Number of message digits carried by a q-ary chain word: `n − (q−1)d`.
pub fn message_len(n: usize, d: usize, q: usize) -> Result<usize> {
    if q < 2 || d < 1 {
        return Err(PaError::invalid(format!(
            "codec needs q >= 2 and d >= 1, got q={q} d={d}"
        )));
    }
    n.checked_sub((q - 1) * d).ok_or_else(|| {
        PaError::invalid(format!("codec needs n >= (q-1)d = {}, got n={n}", (q - 1) * d))
    })
}

fn check_message(x: &MessageVector, n: usize, d: usize, q: usize) -> Result<usize> {
    let k = message_len(n, d, q)?;
    if x.q != q {
        return Err(PaError::invalid(format!(
            "message alphabet q={} does not match code alphabet q={q}",
            x.q
        )));
    }
    if x.len() != k {
        return Err(PaError::invalid(format!(
            "message has {} digits, the ({n},{d}) code over q={q} takes {k}",
            x.len()
        )));
    }
    Ok(k)
}

fn check_received(y: &[i64], n: usize) -> Result<()> {
    if y.len() != n {
        return Err(PaError::invalid(format!(
            "received word has length {}, expected {n}",
            y.len()
        )));
    }
    Ok(())
}

/// Binary encoder: pads `x` with `d` zeros and scans `i = 1..=n`, emitting
/// `t + 1` on a zero (then `t += 1`) and `n − i + t + 1` on a one.
pub fn encode_binary(x: &MessageVector, n: usize, d: usize) -> Result<Permutation> {
    check_message(x, n, d, 2)?;
    let mut t = 0u32;
    let values = (1..=n as u32)
        .map(|i| match x.digits.get(i as usize - 1) {
            Some(1) => n as u32 - i + t + 1,
            _ => {
                t += 1;
                t
            }
        })
        .collect();
    Ok(Permutation::from_vec_unchecked(values))
}

/// Binary decoder over positions `1..=n−d`: `x_i = 0` (and `t += 1`) when
/// `y_i < (n−i)/2 + t + 1`, otherwise `x_i = 1`. Trailing positions are not read.
/// An error of magnitude below `(n−i)/2` at each position `i ≤ n−d` is corrected.
pub fn decode_binary(y: &[i64], n: usize, d: usize) -> Result<MessageVector> {
    check_received(y, n)?;
    let k = message_len(n, d, 2)?;
    let mut t = 0i64;
    let digits = y[..k]
        .iter()
        .enumerate()
        .map(|(idx, &yi)| {
            let gap = (n - (idx + 1)) as i64;
            // y_i < gap/2 + t + 1, scaled by 2
            if 2 * yi < gap + 2 * (t + 1) {
                t += 1;
                0
            } else {
                1
            }
        })
        .collect();
    Ok(MessageVector { digits, q: 2 })
}

/// q-ary encoder: digit `x_i` selects point `s_{x_i+1}` of
/// [`chain_points`]`(n − i, q)`, i.e. the `s`-th smallest unused value.
pub fn encode_qary(x: &MessageVector, n: usize, d: usize, q: usize) -> Result<Permutation> {
    check_message(x, n, d, q)?;
    let mut pool: Vec<u32> = (1..=n as u32).collect();
    let mut values = Vec::with_capacity(n);
    for (idx, &digit) in x.digits.iter().enumerate() {
        let s = chain_points(n - (idx + 1), q)[digit as usize];
        values.push(pool.remove(s - 1));
    }
    values.extend(pool);
    Ok(Permutation::from_vec_unchecked(values))
}

/// q-ary decoder: at each position picks the candidate value nearest to the
/// observation. At an exact midpoint the larger candidate wins, which makes
/// `q = 2` coincide with [`decode_binary`]. Candidates at one position are at
/// least `d` apart, so errors of magnitude `≤ (d−1)/2` are corrected.
pub fn decode_qary(y: &[i64], n: usize, d: usize, q: usize) -> Result<MessageVector> {
    check_received(y, n)?;
    let k = message_len(n, d, q)?;
    let mut pool: Vec<u32> = (1..=n as u32).collect();
    let mut digits = Vec::with_capacity(k);
    for (idx, &yi) in y[..k].iter().enumerate() {
        let points = chain_points(n - (idx + 1), q);
        let mut best = 0usize;
        let mut best_dist = u64::MAX;
        for (j, &s) in points.iter().enumerate() {
            let dist = (pool[s - 1] as i64).abs_diff(yi);
            // candidates ascend, so `<=` hands ties to the larger one
            if dist <= best_dist {
                best = j;
                best_dist = dist;
            }
        }
        pool.remove(points[best] - 1);
        digits.push(best as u32);
    }
    Ok(MessageVector { digits, q })
}
