//! Ball sizes, sphere-packing and covering bounds, growth-rate estimates and
//! the best-known-bounds table.

mod cache;
mod permanent;
mod table;

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::constructions::factorial;
use crate::{Limits, PaError, Result};

pub use cache::{BallTable, SearchRegistry};
pub use permanent::{ball_size_guarded, band_permanents};
pub use table::{best_known_lower, BoundRecord, Provenance, Registered};

fn memo() -> &'static Mutex<HashMap<(usize, usize), BigUint>> {
    static MEMO: OnceLock<Mutex<HashMap<(usize, usize), BigUint>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// `V(n, d)`: permutations of `[n]` within Chebyshev distance `d` of the
/// identity, i.e. the permanent of the banded 0-1 matrix. Memoized per process.
pub fn ball_size(n: usize, d: usize) -> Result<BigUint> {
    let d = d.min(n.saturating_sub(1));
    if let Some(v) = memo().lock().unwrap().get(&(n, d)) {
        return Ok(v.clone());
    }
    let v = ball_size_guarded(n, d, Limits::default().max_band)?;
    memo().lock().unwrap().insert((n, d), v.clone());
    Ok(v)
}

fn div_ceil(a: &BigUint, b: &BigUint) -> BigUint {
    let q = a / b;
    if (&q * b) == *a {
        q
    } else {
        q + 1u32
    }
}

/// `⌈n! / V(n, d−1)⌉`, the size every maximal `(n, d)` PA reaches. Needs `n > d ≥ 2`.
pub fn gilbert_lower(n: usize, d: usize) -> Result<BigUint> {
    if !(n > d && d >= 2) {
        return Err(PaError::Precondition {
            theorem: "the Gilbert-type bound",
            detail: format!("needs n > d >= 2, got n={n} d={d}"),
        });
    }
    Ok(div_ceil(&factorial(n), &ball_size(n, d - 1)?))
}

/// `⌊(n+r)! / V(n+r, ⌊(d+r−1)/2⌋)⌋`.
///
/// `r = 0` is the plain packing bound (`n > d ≥ 1`). `r = 1` is its shifted
/// form for even `d` with `2d ≥ n > d ≥ 2`. Larger `r` chains the
/// `P(n,d) ≤ P(n+1,d+1)` step and needs `2d ≥ n > d`.
pub fn hamming_upper(n: usize, d: usize, r: usize) -> Result<BigUint> {
    if !(n > d && d >= 1) {
        return Err(PaError::Precondition {
            theorem: "the Hamming-type bound",
            detail: format!("needs n > d >= 1, got n={n} d={d}"),
        });
    }
    if r == 1 && !(d.is_multiple_of(2) && d >= 2 && n <= 2 * d) {
        return Err(PaError::Precondition {
            theorem: "the shifted Hamming-type bound",
            detail: format!("needs d even and 2d >= n > d >= 2, got n={n} d={d}"),
        });
    }
    if r >= 2 && n > 2 * d {
        return Err(PaError::Precondition {
            theorem: "the iterated shifted Hamming-type bound",
            detail: format!("needs 2d >= n > d, got n={n} d={d}"),
        });
    }
    let m = n + r;
    Ok(factorial(m) / ball_size(m, (d + r - 1) / 2)?)
}

/// Smallest of [`hamming_upper`] over `r ∈ {0, 1}` where applicable, with the
/// `r` that achieved it (`r = 0` on ties).
pub fn hamming_upper_best(n: usize, d: usize) -> Result<(BigUint, usize)> {
    let plain = hamming_upper(n, d, 0)?;
    match hamming_upper(n, d, 1) {
        Ok(shifted) if shifted < plain => Ok((shifted, 1)),
        _ => Ok((plain, 0)),
    }
}

/// `ln m!` as a sum of logarithms.
pub fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|k| (k as f64).ln()).sum()
}

/// `[(2d+1)!]^{n/(2d+1)}`, the row-sum bound on the band permanent.
pub fn vupper_bound(n: usize, d: usize) -> f64 {
    let w = 2 * d + 1;
    (n as f64 / w as f64 * ln_factorial(w)).exp()
}

/// Growth base `[(2d+1)!]^{1/(2d+1)}` bounding `μ_d`.
pub fn vupper_base(d: usize) -> f64 {
    vupper_bound(1, d)
}

/// `n! / [(2d−1)!]^{n/(2d−1)}`: the Gilbert-type bound with `V` replaced by
/// its row-sum estimate. Needs `n > d ≥ 1`.
pub fn corollary_lower(n: usize, d: usize) -> Result<f64> {
    if !(n > d && d >= 1) {
        return Err(PaError::invalid(format!(
            "corollary bound needs n > d >= 1, got n={n} d={d}"
        )));
    }
    let w = 2 * d - 1;
    Ok((ln_factorial(n) - n as f64 / w as f64 * ln_factorial(w)).exp())
}

/// `a / b` as a float, for big integers of similar magnitude.
pub fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    if b.is_zero() {
        return f64::INFINITY;
    }
    let shift = a.bits().max(b.bits()).saturating_sub(62);
    let (a, b) = (a >> shift, b >> shift);
    a.to_f64().unwrap_or(f64::INFINITY) / b.to_f64().unwrap_or(f64::INFINITY)
}

/// Ratio estimate of `μ_d = lim V(n,d)^{1/n}`.
#[derive(Debug, Clone, Serialize)]
pub struct MuEstimate {
    pub d: usize,
    pub n_max: usize,
    /// `V(n_max, d) / V(n_max − 1, d)`.
    pub estimate: f64,
    /// `(n, V(n,d)/V(n−1,d))` for `n = 2..=n_max`.
    pub ratios: Vec<(usize, f64)>,
    /// Change of the ratio over the final step.
    pub last_change: f64,
    /// `[(2d+1)!]^{1/(2d+1)}`.
    pub upper: f64,
}

pub fn mu_estimate(d: usize, n_max: usize, limits: &Limits) -> Result<MuEstimate> {
    if d < 1 || n_max < 3 {
        return Err(PaError::invalid(format!(
            "mu estimate needs d >= 1 and n_max >= 3, got d={d} n_max={n_max}"
        )));
    }
    let counts = band_permanents(n_max, d, limits.max_band)?;
    let ratios: Vec<(usize, f64)> = (2..=n_max)
        .map(|n| (n, big_ratio(&counts[n], &counts[n - 1])))
        .collect();
    let estimate = ratios[ratios.len() - 1].1;
    let last_change = (estimate - ratios[ratios.len() - 2].1).abs();
    Ok(MuEstimate {
        d,
        n_max,
        estimate,
        ratios,
        last_change,
        upper: vupper_base(d),
    })
}
