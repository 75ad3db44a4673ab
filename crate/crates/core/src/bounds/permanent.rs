//! Permanents of banded 0-1 matrices.
//!
//! `V(n, d)` counts permutations with `|π_i − i| ≤ d` for every `i`, which is
//! the permanent of the `n × n` matrix with ones where `|i − j| ≤ d`. Rows are
//! assigned one at a time; the state is the set of used columns inside the
//! sliding window `[i − d, i + d]`. Column `i − d` must be taken by the time
//! row `i` is placed, since no later row reaches it.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::{PaError, Result};

fn check_band(d: usize, max_band: usize) -> Result<()> {
    if d > max_band {
        return Err(PaError::resource(format!(
            "band half-width {d} exceeds the permanent DP limit {max_band}"
        )));
    }
    Ok(())
}

/// `V(k, d)` for every `k` in `0..=n_max`, from one sweep with no right
/// boundary: after `k` rows the state "columns `k−d+1..=k` used, none beyond"
/// is exactly a permutation of `[k]` inside the band.
pub fn band_permanents(n_max: usize, d: usize, max_band: usize) -> Result<Vec<BigUint>> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(BigUint::one());
    if d == 0 {
        out.extend((1..=n_max).map(|_| BigUint::one()));
        return Ok(out);
    }
    check_band(d, max_band)?;

    let width = 2 * d + 1;
    let closed: u32 = (1 << d) - 1;
    // columns 1−d..=0 do not exist; mark them used
    let mut states: HashMap<u32, BigUint> = HashMap::from([(closed, BigUint::one())]);
    for _ in 1..=n_max {
        let mut next: HashMap<u32, BigUint> = HashMap::with_capacity(states.len());
        for (mask, count) in &states {
            for bit in 0..width {
                let placed = mask | (1 << bit);
                if placed == *mask || placed & 1 == 0 {
                    continue;
                }
                *next.entry(placed >> 1).or_insert_with(BigUint::zero) += count;
            }
        }
        states = next;
        out.push(states.get(&closed).cloned().unwrap_or_default());
    }
    Ok(out)
}

/// Largest `n` handled by the subset DP, which is used when the band is wide.
const SUBSET_MAX_N: usize = 20;

/// `V(n, d)` by a DP over the set of used columns; row `popcount(mask)` is
/// placed next. Costs `2^n · (2d+1)` steps regardless of `d`.
fn subset_permanent(n: usize, d: usize) -> BigUint {
    let mut counts = vec![0u128; 1 << n];
    counts[0] = 1;
    for mask in 0usize..(1 << n) {
        let c = counts[mask];
        if c == 0 {
            continue;
        }
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        for col in row.saturating_sub(d)..n.min(row + d + 1) {
            if mask & (1 << col) == 0 {
                counts[mask | (1 << col)] += c;
            }
        }
    }
    BigUint::from(counts[(1 << n) - 1])
}

/// Exact `V(n, d)` with the band guard `max_band`; `d ≥ n − 1` short-circuits to `n!`.
pub fn ball_size_guarded(n: usize, d: usize, max_band: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(PaError::invalid("ball size needs n >= 1"));
    }
    if d + 1 >= n {
        return Ok(crate::constructions::factorial(n));
    }
    if n <= SUBSET_MAX_N && d > 4 {
        return Ok(subset_permanent(n, d));
    }
    let counts = band_permanents(n, d, max_band)?;
    Ok(counts[n].clone())
}
