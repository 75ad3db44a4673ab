//! Permutations of `[n] = {1, ..., n}`, the Chebyshev metric and PA validation.
//!
//! Values are stored 1-based. Composition follows `(π∘σ)_i = π_{σ_i}`.
//! Relabeling values is an isometry: `d(ι, σ) == d(π, σ∘π)` for every `π`,
//! i.e. the product "first π, then σ". Balls therefore have the same size
//! around every center.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{PaError, Result};

/// A bijection of `[n]`, stored as the sequence `(π_1, ..., π_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation {
    values: Vec<u32>,
}

/// True iff `values` contains every integer of `1..=values.len()` exactly once.
pub fn is_permutation(values: &[u32]) -> bool {
    let n = values.len();
    let mut seen = vec![false; n + 1];
    for &v in values {
        let v = v as usize;
        if v == 0 || v > n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

impl Permutation {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        if values.is_empty() {
            return Err(PaError::invalid("a permutation must have length n >= 1"));
        }
        if !is_permutation(&values) {
            return Err(PaError::invalid(format!(
                "({}) is not a permutation of [{}]",
                join(&values),
                values.len()
            )));
        }
        Ok(Permutation { values })
    }

    /// Caller guarantees `values` is a bijection of `[len]`.
    pub(crate) fn from_vec_unchecked(values: Vec<u32>) -> Self {
        debug_assert!(!values.is_empty() && is_permutation(&values));
        Permutation { values }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "identity of length 0");
        Permutation {
            values: (1..=n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for the `len`/`is_empty` pairing convention.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.values
    }

    /// Value at 1-based position `i`.
    pub fn at(&self, i: usize) -> u32 {
        self.values[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.values.iter().enumerate().all(|(i, &v)| v as usize == i + 1)
    }

    /// `(self∘other)_i = self_{other_i}`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(length_mismatch(self.len(), other.len()));
        }
        let values = other
            .values
            .iter()
            .map(|&j| self.values[j as usize - 1])
            .collect();
        Ok(Permutation { values })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.len()];
        for (i, &v) in self.values.iter().enumerate() {
            inv[v as usize - 1] = i as u32 + 1;
        }
        Permutation { values: inv }
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = PaError;

    fn try_from(values: Vec<u32>) -> Result<Self> {
        Permutation::new(values)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Self {
        p.values
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.values))
    }
}

impl FromStr for Permutation {
    type Err = PaError;

    fn from_str(s: &str) -> Result<Self> {
        Permutation::new(parse_list(s)?)
    }
}

pub(crate) fn join<T: fmt::Display>(values: &[T]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses a comma-separated list of integers. Surrounding whitespace and an
/// optional pair of parentheses are tolerated.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    let s = s.trim();
    let s = s
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .unwrap_or(s);
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|_| PaError::Parse(format!("bad integer {:?} in {:?}", tok.trim(), s)))
        })
        .collect()
}

/// Rearranges `xs` into the lexicographically next permutation; returns
/// false (leaving `xs` sorted ascending) after the last one.
pub fn next_permutation<T: Ord>(xs: &mut [T]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        xs.reverse();
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

fn length_mismatch(a: usize, b: usize) -> PaError {
    PaError::invalid(format!("length mismatch: {a} vs {b}"))
}

#[inline]
pub(crate) fn distance_slices(a: &[u32], b: &[u32]) -> usize {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| x.abs_diff(y))
        .max()
        .unwrap_or(0) as usize
}

/// `max_j |a_j − b_j|`.
pub fn chebyshev_distance(a: &Permutation, b: &Permutation) -> Result<usize> {
    if a.len() != b.len() {
        return Err(length_mismatch(a.len(), b.len()));
    }
    Ok(distance_slices(&a.values, &b.values))
}

/// Minimum pairwise Chebyshev distance of a word list.
pub fn min_distance(words: &[Permutation]) -> Result<usize> {
    if words.len() < 2 {
        return Err(PaError::invalid(format!(
            "min_distance needs at least 2 words, got {}",
            words.len()
        )));
    }
    let n = words[0].len();
    if let Some(w) = words.iter().find(|w| w.len() != n) {
        return Err(length_mismatch(n, w.len()));
    }
    let mut best = usize::MAX;
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            best = best.min(distance_slices(&a.values, &b.values));
        }
    }
    Ok(best)
}

/// A list of equal-length permutations with a declared minimum distance.
///
/// Word order is insertion order. The distance invariant is not enforced on
/// construction; use [`validate_pa`] (or [`PermutationArray::checked`]).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationArray {
    pub n: usize,
    pub d: usize,
    pub words: Vec<Permutation>,
}

impl PermutationArray {
    pub fn new(n: usize, d: usize, words: Vec<Permutation>) -> Self {
        PermutationArray { n, d, words }
    }

    /// Builds the array and fails unless it validates.
    pub fn checked(n: usize, d: usize, words: Vec<Permutation>) -> Result<Self> {
        let pa = PermutationArray { n, d, words };
        let report = validate_pa(&pa);
        if report.is_valid() {
            Ok(pa)
        } else {
            Err(PaError::invalid(format!("not an ({n},{d}) PA: {report}")))
        }
    }

    pub fn singleton(word: Permutation, d: usize) -> Self {
        PermutationArray {
            n: word.len(),
            d,
            words: vec![word],
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Actual minimum distance, or `None` for fewer than two words.
    pub fn min_distance(&self) -> Option<usize> {
        min_distance(&self.words).ok()
    }

    /// Header line `n=<n> d=<d> size=<M>` followed by one word per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={} d={} size={}\n", self.n, self.d, self.words.len());
        for w in &self.words {
            out.push_str(&w.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the text format. Rows must be permutations; distance claims are
    /// not checked here.
    pub fn from_text(text: &str) -> Result<Self> {
        let raw = RawArray::from_text(text)?;
        let words = raw
            .rows
            .into_iter()
            .map(Permutation::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(PermutationArray::new(raw.n, raw.d, words))
    }
}

/// A parsed PA file whose rows have not yet been checked to be permutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawArray {
    pub n: usize,
    pub d: usize,
    pub rows: Vec<Vec<u32>>,
}

impl RawArray {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| PaError::Parse("empty PA file".into()))?;
        let mut fields = HashMap::new();
        for tok in header.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| PaError::Parse(format!("bad header token {tok:?}")))?;
            let v: usize = v
                .parse()
                .map_err(|_| PaError::Parse(format!("bad header value {tok:?}")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| PaError::Parse(format!("header is missing {k}=")))
        };
        let (n, d, size) = (get("n")?, get("d")?, get("size")?);
        let rows = lines.map(parse_list::<u32>).collect::<Result<Vec<_>>>()?;
        if rows.len() != size {
            return Err(PaError::Parse(format!(
                "header declares size={size} but {} rows follow",
                rows.len()
            )));
        }
        Ok(RawArray { n, d, rows })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    WrongLength { index: usize, len: usize },
    NotAPermutation { index: usize },
    Duplicate { first: usize, second: usize },
    TooClose { first: usize, second: usize, distance: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WrongLength { index, len } => write!(f, "word {index} has length {len}"),
            Violation::NotAPermutation { index } => write!(f, "word {index} is not a permutation"),
            Violation::Duplicate { first, second } => {
                write!(f, "words {first} and {second} are equal")
            }
            Violation::TooClose {
                first,
                second,
                distance,
            } => write!(f, "words {first} and {second} are at distance {distance}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "invalid: {}", parts.join("; "))
    }
}

/// Checks every PA invariant and reports each violation found.
pub fn validate_pa(pa: &PermutationArray) -> ValidationReport {
    let rows: Vec<&[u32]> = pa.words.iter().map(|w| w.as_slice()).collect();
    validate_slices(pa.n, pa.d, &rows)
}

/// Like [`validate_pa`] for rows that may not be permutations.
pub fn validate_rows(n: usize, d: usize, rows: &[Vec<u32>]) -> ValidationReport {
    let rows: Vec<&[u32]> = rows.iter().map(|r| r.as_slice()).collect();
    validate_slices(n, d, &rows)
}

fn validate_slices(n: usize, d: usize, rows: &[&[u32]]) -> ValidationReport {
    let mut violations = Vec::new();
    let mut good = Vec::with_capacity(rows.len());
    for (index, row) in rows.iter().enumerate() {
        if row.len() != n {
            violations.push(Violation::WrongLength {
                index,
                len: row.len(),
            });
        } else if !is_permutation(row) {
            violations.push(Violation::NotAPermutation { index });
        } else {
            good.push(index);
        }
    }
    for (k, &i) in good.iter().enumerate() {
        for &j in &good[k + 1..] {
            let dist = distance_slices(rows[i], rows[j]);
            if dist == 0 {
                violations.push(Violation::Duplicate {
                    first: i,
                    second: j,
                });
            } else if dist < d {
                violations.push(Violation::TooClose {
                    first: i,
                    second: j,
                    distance: dist,
                });
            }
        }
    }
    ValidationReport { violations }
}
