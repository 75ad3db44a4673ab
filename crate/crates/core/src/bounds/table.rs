//! Best-known lower and upper bounds on `P(n, d)` over a grid.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{gilbert_lower, hamming_upper_best};
use crate::constructions::{factorial, ExplicitCode};
use crate::{PaError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Explicit,
    FirstRecursive,
    C2b1,
    Tr1,
    Greedy,
    Gilbert,
    HammingR0,
    HammingR1,
    Exact,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::Explicit => "explicit",
            Provenance::FirstRecursive => "first-recursive",
            Provenance::C2b1 => "c2b1",
            Provenance::Tr1 => "tr1",
            Provenance::Greedy => "greedy",
            Provenance::Gilbert => "gilbert",
            Provenance::HammingR0 => "hamming-r0",
            Provenance::HammingR1 => "hamming-r1",
            Provenance::Exact => "exact",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Provenance {
    type Err = PaError;

    fn from_str(s: &str) -> Result<Self> {
        use Provenance::*;
        [
            Explicit,
            FirstRecursive,
            C2b1,
            Tr1,
            Greedy,
            Gilbert,
            HammingR0,
            HammingR1,
            Exact,
        ]
        .into_iter()
        .find(|p| p.tag() == s)
        .ok_or_else(|| PaError::Parse(format!("unknown provenance tag {s:?}")))
    }
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// One cell of the bounds table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub n: usize,
    pub d: usize,
    #[serde(with = "decimal")]
    pub lower: BigUint,
    pub lower_provenance: Provenance,
    #[serde(with = "decimal")]
    pub upper: BigUint,
    pub upper_provenance: Provenance,
}

impl BoundRecord {
    pub const CSV_HEADER: &'static str = "n,d,lower,lower_provenance,upper,upper_provenance";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n, self.d, self.lower, self.lower_provenance, self.upper, self.upper_provenance
        )
    }

    pub fn from_csv_row(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 6 {
            return Err(PaError::Parse(format!("expected 6 fields in {line:?}")));
        }
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| PaError::Parse(format!("bad integer {s:?}")))
        };
        let big = |s: &str| {
            s.parse::<BigUint>()
                .map_err(|_| PaError::Parse(format!("bad count {s:?}")))
        };
        Ok(BoundRecord {
            n: num(f[0])?,
            d: num(f[1])?,
            lower: big(f[2])?,
            lower_provenance: f[3].parse()?,
            upper: big(f[4])?,
            upper_provenance: f[5].parse()?,
        })
    }
}

/// A size achieved by a search, fed into [`best_known_lower`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Registered {
    pub n: usize,
    pub d: usize,
    #[serde(with = "decimal")]
    pub size: BigUint,
    /// [`Provenance::Greedy`] or [`Provenance::Exact`]; exact sizes pin the upper bound too.
    pub method: Provenance,
}

impl Registered {
    pub fn greedy(n: usize, d: usize, size: u64) -> Self {
        Registered {
            n,
            d,
            size: size.into(),
            method: Provenance::Greedy,
        }
    }

    pub fn exact(n: usize, d: usize, size: u64) -> Self {
        Registered {
            n,
            d,
            size: size.into(),
            method: Provenance::Exact,
        }
    }
}

struct Cell {
    lower: BigUint,
    lower_provenance: Provenance,
}

impl Cell {
    fn offer(&mut self, value: BigUint, provenance: Provenance) -> bool {
        if value > self.lower {
            self.lower = value;
            self.lower_provenance = provenance;
            true
        } else {
            false
        }
    }
}

/// Lower/upper bounds on `P(n, d)` for `1 ≤ d ≤ min(n, d_max)`, `n ≤ n_max`.
///
/// Lower bounds are seeded with the explicit construction, the Gilbert-type
/// bound and `registered` search results, then propagated to a fixed point
/// with `P(n+1,d) ≥ (⌊n/d⌋+1)P(n,d)` (`n > d`), `P(n+1,d+1) ≥ P(n,d)`
/// (`d < n ≤ 2d`) and `P(rn,rd) ≥ P(n,d)^r` (`n > d`). A value only replaces
/// the current one when strictly larger, and cells are visited in ascending
/// `(n, d)`, so provenance is reproducible. Upper bounds come from the
/// Hamming-type bounds, `P(n,n) = 1`, and registered exact values.
pub fn best_known_lower(
    n_max: usize,
    d_max: usize,
    registered: &[Registered],
) -> Result<Vec<BoundRecord>> {
    if n_max < 1 || d_max < 1 {
        return Err(PaError::invalid("grid limits must be positive"));
    }
    let mut grid: BTreeMap<(usize, usize), Cell> = BTreeMap::new();
    for n in 1..=n_max {
        for d in 1..=n.min(d_max) {
            let code = ExplicitCode::new(n, d)?;
            let mut cell = Cell {
                lower: code.cardinality().clone(),
                lower_provenance: Provenance::Explicit,
            };
            if n > d && d >= 2 {
                cell.offer(gilbert_lower(n, d)?, Provenance::Gilbert);
            }
            grid.insert((n, d), cell);
        }
    }
    for reg in registered {
        if let Some(cell) = grid.get_mut(&(reg.n, reg.d)) {
            cell.offer(reg.size.clone(), reg.method);
        }
    }

    loop {
        let mut changed = false;
        let keys: Vec<(usize, usize)> = grid.keys().copied().collect();
        for (n, d) in keys {
            let mut offers: Vec<(BigUint, Provenance)> = Vec::new();
            if n >= 2 && n - 1 > d {
                if let Some(src) = grid.get(&(n - 1, d)) {
                    offers.push((&src.lower * ((n - 1) / d + 1), Provenance::C2b1));
                }
            }
            if d >= 2 && d - 1 < n - 1 && n - 1 <= 2 * (d - 1) {
                if let Some(src) = grid.get(&(n - 1, d - 1)) {
                    offers.push((src.lower.clone(), Provenance::Tr1));
                }
            }
            for r in 2..=d {
                if n % r == 0 && d % r == 0 && n / r > d / r {
                    if let Some(src) = grid.get(&(n / r, d / r)) {
                        offers.push((src.lower.pow(r as u32), Provenance::FirstRecursive));
                    }
                }
            }
            let cell = grid.get_mut(&(n, d)).expect("cell exists");
            for (value, provenance) in offers {
                changed |= cell.offer(value, provenance);
            }
        }
        if !changed {
            break;
        }
    }

    let mut out = Vec::with_capacity(grid.len());
    for ((n, d), cell) in grid {
        let (mut upper, mut upper_provenance) = if d == n {
            (BigUint::one(), Provenance::Exact)
        } else {
            let (value, r) = hamming_upper_best(n, d)?;
            let tag = if r == 0 {
                Provenance::HammingR0
            } else {
                Provenance::HammingR1
            };
            (value, tag)
        };
        if d == 1 {
            debug_assert_eq!(upper, factorial(n));
        }
        for reg in registered.iter().filter(|r| r.n == n && r.d == d) {
            if reg.method == Provenance::Exact && reg.size < upper {
                upper = reg.size.clone();
                upper_provenance = Provenance::Exact;
            }
        }
        if cell.lower > upper {
            return Err(PaError::invalid(format!(
                "P({n},{d}): lower bound {} ({}) exceeds upper bound {upper} ({upper_provenance})",
                cell.lower, cell.lower_provenance
            )));
        }
        out.push(BoundRecord {
            n,
            d,
            lower: cell.lower,
            lower_provenance: cell.lower_provenance,
            upper,
            upper_provenance,
        });
    }
    Ok(out)
}
