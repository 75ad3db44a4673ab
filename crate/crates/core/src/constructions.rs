//! PA constructions: the residue-class code, interleaving recursion, prefix
//! extension and chain codes.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::perm::{is_permutation, next_permutation, validate_pa};
use crate::{Limits, PaError, Permutation, PermutationArray, Result};

pub(crate) fn factorial(m: usize) -> BigUint {
    (1..=m as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// Lazy handle on `{π ∈ S_n : π_i ≡ i (mod d) for all i}`.
///
/// With `n = a·d + b`, `0 ≤ b < d`, residue classes `1..=b` hold `a + 1`
/// positions and the rest hold `a`, so the code has
/// `((a+1)!)^b (a!)^(d−b)` words.
///
/// Ordering used by [`ExplicitCode::unrank`]: within class `c` the values
/// `c, c+d, ...` are laid onto positions `c, c+d, ...` in lexicographic
/// order of arrangements (factorial number system); the class indices are
/// combined in mixed radix with class 1 most significant.
#[derive(Debug, Clone)]
pub struct ExplicitCode {
    n: usize,
    d: usize,
    a: usize,
    b: usize,
    class_factorials: Vec<BigUint>,
    cardinality: BigUint,
}

impl ExplicitCode {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if d < 1 || d > n {
            return Err(PaError::invalid(format!(
                "explicit code needs 1 <= d <= n, got n={n} d={d}"
            )));
        }
        let (a, b) = (n / d, n % d);
        let class_factorials: Vec<BigUint> =
            (1..=d).map(|c| factorial(if c <= b { a + 1 } else { a })).collect();
        let cardinality = class_factorials.iter().product();
        Ok(ExplicitCode {
            n,
            d,
            a,
            b,
            class_factorials,
            cardinality,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `(a, b)` with `n = a·d + b`.
    pub fn quotient_remainder(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn cardinality(&self) -> &BigUint {
        &self.cardinality
    }

    /// Closed form `((a+1)!)^b (a!)^(d−b)`, computed independently of the
    /// per-class product.
    pub fn formula_cardinality(&self) -> BigUint {
        let big = factorial(self.a + 1).pow(self.b as u32);
        let small = factorial(self.a).pow((self.d - self.b) as u32);
        big * small
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        p.len() == self.n
            && p.as_slice()
                .iter()
                .enumerate()
                .all(|(i, &v)| (v as usize) % self.d == (i + 1) % self.d)
    }

    fn class_members(&self, c: usize) -> Vec<u32> {
        (c..=self.n).step_by(self.d).map(|v| v as u32).collect()
    }

    pub fn unrank(&self, k: &BigUint) -> Result<Permutation> {
        if k >= &self.cardinality {
            return Err(PaError::Range(format!(
                "index {k} >= cardinality {}",
                self.cardinality
            )));
        }
        let mut rest = k.clone();
        let mut class_index = vec![BigUint::zero(); self.d];
        for c in (0..self.d).rev() {
            class_index[c] = &rest % &self.class_factorials[c];
            rest /= &self.class_factorials[c];
        }
        let mut values = vec![0u32; self.n];
        for c in 1..=self.d {
            let mut pool = self.class_members(c);
            let m = pool.len();
            let mut idx = class_index[c - 1].clone();
            for (slot, pos) in (c..=self.n).step_by(self.d).enumerate() {
                let radix = factorial(m - 1 - slot);
                let digit = (&idx / &radix).to_usize().expect("digit < m");
                idx %= &radix;
                values[pos - 1] = pool.remove(digit);
            }
        }
        Ok(Permutation::from_vec_unchecked(values))
    }

    /// Inverse of [`ExplicitCode::unrank`].
    pub fn rank(&self, p: &Permutation) -> Result<BigUint> {
        if !self.contains(p) {
            return Err(PaError::invalid(format!(
                "({p}) is not a word of the explicit ({},{}) code",
                self.n, self.d
            )));
        }
        let mut k = BigUint::zero();
        for c in 1..=self.d {
            let mut pool = self.class_members(c);
            let m = pool.len();
            let mut idx = BigUint::zero();
            for (slot, pos) in (c..=self.n).step_by(self.d).enumerate() {
                let v = p.at(pos);
                let digit = pool.iter().position(|&x| x == v).expect("member of class");
                pool.remove(digit);
                idx += factorial(m - 1 - slot) * digit;
            }
            k = k * &self.class_factorials[c - 1] + idx;
        }
        Ok(k)
    }

    /// All words in rank order. Fails when the code exceeds `limit` words.
    pub fn enumerate(&self, limit: u64) -> Result<ExplicitIter> {
        if self.cardinality > BigUint::from(limit) {
            return Err(PaError::resource(format!(
                "explicit ({},{}) code has {} words, above the materialization limit {limit}",
                self.n, self.d, self.cardinality
            )));
        }
        Ok(ExplicitIter {
            n: self.n,
            d: self.d,
            classes: (1..=self.d).map(|c| self.class_members(c)).collect(),
            done: false,
        })
    }

    pub fn materialize(&self, limit: u64) -> Result<PermutationArray> {
        let words = self.enumerate(limit)?.collect();
        Ok(PermutationArray::new(self.n, self.d, words))
    }
}

/// Odometer over the per-class arrangements; the last class turns fastest.
pub struct ExplicitIter {
    n: usize,
    d: usize,
    classes: Vec<Vec<u32>>,
    done: bool,
}

impl Iterator for ExplicitIter {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.done {
            return None;
        }
        let mut values = vec![0u32; self.n];
        for (c, class) in self.classes.iter().enumerate() {
            for (slot, &v) in class.iter().enumerate() {
                values[c + slot * self.d] = v;
            }
        }
        self.done = true;
        for class in self.classes.iter_mut().rev() {
            if next_permutation(class) {
                self.done = false;
                break;
            }
        }
        Some(Permutation::from_vec_unchecked(values))
    }
}

/// Result of per-coordinate decoding of the explicit code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExplicitDecoding {
    /// Decoded coordinates; may fall outside `[n]` under heavy noise.
    pub values: Vec<i64>,
    /// Set when `values` is a permutation of `[n]`.
    pub permutation: Option<Permutation>,
    /// Largest per-coordinate error magnitude that is always corrected.
    pub radius: usize,
}

/// Guaranteed per-coordinate correction radius of the explicit decoder.
pub fn explicit_radius(d: usize) -> usize {
    if d % 2 == 1 {
        (d - 1) / 2
    } else {
        (d / 2).saturating_sub(1)
    }
}

/// Moves each coordinate to the nearest integer congruent to its position
/// modulo `d`. For odd `d` the correction term lies in `[−(d−1)/2, (d−1)/2]`;
/// for even `d` it lies in `[−(d/2 − 1), d/2]`.
pub fn explicit_decode(n: usize, d: usize, received: &[i64]) -> Result<ExplicitDecoding> {
    if d < 1 || d > n {
        return Err(PaError::invalid(format!(
            "explicit decoder needs 1 <= d <= n, got n={n} d={d}"
        )));
    }
    if received.len() != n {
        return Err(PaError::invalid(format!(
            "received word has length {}, expected {n}",
            received.len()
        )));
    }
    let modulus = d as i64;
    let upper = (d / 2) as i64;
    let values: Vec<i64> = received
        .iter()
        .enumerate()
        .map(|(i, &sigma)| {
            let mut shift = (i as i64 + 1 - sigma).rem_euclid(modulus);
            if shift > upper {
                shift -= modulus;
            }
            sigma + shift
        })
        .collect();
    let permutation = if values.iter().all(|&v| v >= 1 && v <= n as i64) {
        let as_u32: Vec<u32> = values.iter().map(|&v| v as u32).collect();
        is_permutation(&as_u32).then(|| Permutation::from_vec_unchecked(as_u32))
    } else {
        None
    };
    Ok(ExplicitDecoding {
        values,
        permutation,
        radius: explicit_radius(d),
    })
}

fn checked_size(base: u64, exp: usize, limit: u64, what: &str) -> Result<u64> {
    let too_big = || {
        PaError::resource(format!(
            "{what} would have {base}^{exp} words, above the materialization limit {limit}"
        ))
    };
    let size = u32::try_from(exp)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .ok_or_else(too_big)?;
    if size > limit {
        return Err(too_big());
    }
    Ok(size)
}

/// Interleaving recursion: every ordered `r`-tuple of words `π^(0..r)` gives
/// the word `ρ_0 | ρ_1 | ... | ρ_{r−1}` with `ρ_j = r·π^(j) − j`. The result is
/// an `(r·n, r·d)` PA of size `|c|^r`.
pub fn first_recursive(c: &PermutationArray, r: usize, limits: &Limits) -> Result<PermutationArray> {
    if r < 2 {
        return Err(PaError::invalid(format!("r must be >= 2, got {r}")));
    }
    if c.is_empty() {
        return Err(PaError::invalid("input PA is empty"));
    }
    let report = validate_pa(c);
    if !report.is_valid() {
        return Err(PaError::invalid(format!("input PA is {report}")));
    }
    let m = c.len();
    checked_size(m as u64, r, limits.max_words, "first recursive construction")?;

    let n = c.n;
    let mut words = Vec::new();
    let mut tuple = vec![0usize; r];
    loop {
        let mut values = Vec::with_capacity(r * n);
        for (j, &w) in tuple.iter().enumerate() {
            values.extend(
                c.words[w]
                    .as_slice()
                    .iter()
                    .map(|&v| r as u32 * v - j as u32),
            );
        }
        words.push(Permutation::from_vec_unchecked(values));

        let mut pos = r;
        loop {
            if pos == 0 {
                return Ok(PermutationArray::new(r * n, r * c.d, words));
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < m {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

/// `φ_m(π) = (m, π'_1, ..., π'_n)` with `π'_i = π_i` if `π_i < m` and
/// `π_i + 1` otherwise. Always a permutation of `[n+1]`.
pub fn phi(p: &Permutation, m: usize) -> Result<Permutation> {
    let n = p.len();
    if m < 1 || m > n + 1 {
        return Err(PaError::invalid(format!(
            "phi needs 1 <= m <= n+1 = {}, got m={m}",
            n + 1
        )));
    }
    let m = m as u32;
    let mut values = Vec::with_capacity(n + 1);
    values.push(m);
    values.extend(p.as_slice().iter().map(|&v| if v < m { v } else { v + 1 }));
    Ok(Permutation::from_vec_unchecked(values))
}

pub const SPACED_RULE: &str = "the spaced extension rule (s_{j+1} - s_j >= d)";
pub const DIAGONAL_RULE: &str = "the diagonal extension rule (s = [m] with n - d < m <= d + 1)";

/// Which extension result justified the declared distance of `extend`'s output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtendRule {
    /// Points spaced at least `d` apart keep distance `d`.
    Spaced,
    /// A single point in `(n - d, d + 1]` raises the distance to `d + 1`.
    Diagonal,
}

/// `C[s_1, ..., s_t] = {φ_{s_j}(π) : π ∈ C}`.
///
/// When `s = [d]` and `n ≤ 2d` the output is declared an `(n+1, d+1)` PA;
/// otherwise the points must be spaced at least `d` apart and the output is
/// an `(n+1, d)` PA. Words are ordered by `j`, then by their order in `c`.
pub fn extend(c: &PermutationArray, s: &[usize]) -> Result<PermutationArray> {
    let (pa, _) = extend_with_rule(c, s)?;
    Ok(pa)
}

pub fn extend_with_rule(c: &PermutationArray, s: &[usize]) -> Result<(PermutationArray, ExtendRule)> {
    let (n, d) = (c.n, c.d);
    if s.is_empty() {
        return Err(PaError::invalid("extension point list is empty"));
    }
    if s.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PaError::invalid(format!(
            "extension points must be strictly increasing, got {s:?}"
        )));
    }
    if s[0] < 1 || s[s.len() - 1] > n + 1 {
        return Err(PaError::invalid(format!(
            "extension points must lie in [1, {}], got {s:?}",
            n + 1
        )));
    }
    // phi_m lifts the gap between values on either side of m, so the
    // single point must separate every value <= n - d from every value > d
    let diagonal = s.len() == 1 && d >= 1 && n < s[0] + d && s[0] <= d + 1;
    let rule = if diagonal {
        ExtendRule::Diagonal
    } else if s.windows(2).all(|w| w[1] - w[0] >= d) {
        ExtendRule::Spaced
    } else {
        return Err(PaError::Precondition {
            theorem: SPACED_RULE,
            detail: format!(
                "points {s:?} are closer than d={d}, and {DIAGONAL_RULE} does not apply (n={n})"
            ),
        });
    };
    let mut words = Vec::with_capacity(s.len() * c.len());
    for &m in s {
        for w in &c.words {
            words.push(phi(w, m)?);
        }
    }
    let declared = match rule {
        ExtendRule::Spaced => d,
        ExtendRule::Diagonal => d + 1,
    };
    Ok((PermutationArray::new(n + 1, declared, words), rule))
}

/// Extension points that grow an `(n, d)` PA to an `(n+1, d)` PA with
/// `⌊n/d⌋ + 1` times as many words: `1, 1+d, 1+2d, ...` and finally `n+1`.
pub fn growth_points(n: usize, d: usize) -> Result<Vec<usize>> {
    if !(n > d && d >= 1) {
        return Err(PaError::Precondition {
            theorem: "the growth bound P(n+1,d) >= (floor(n/d)+1) P(n,d)",
            detail: format!("needs n > d >= 1, got n={n} d={d}"),
        });
    }
    let t = n / d + 1;
    let mut s: Vec<usize> = (0..t - 1).map(|j| j * d + 1).collect();
    s.push(n + 1);
    Ok(s)
}

/// Extension points of the q-ary chain recursion at level `ν`:
/// `s_j = (j−1)⌊ν/(q−1)⌋ + 1` for `j < q`, and `s_q = ν + 1`.
pub fn chain_points(nu: usize, q: usize) -> Vec<usize> {
    debug_assert!(q >= 2 && nu >= q - 1);
    let step = nu / (q - 1);
    let mut s: Vec<usize> = (0..q - 1).map(|j| j * step + 1).collect();
    s.push(nu + 1);
    s
}

/// A chain code `C_n` with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainCode {
    pub n: usize,
    pub d: usize,
    pub q: usize,
    pub words: PermutationArray,
}

impl ChainCode {
    pub fn size(&self) -> usize {
        self.words.len()
    }
}

/// Binary chain code: `C_d = {ι_d}`, `C_{ν+1} = C_ν[1, ν+1]`.
pub fn build_chain_binary(n: usize, d: usize, limits: &Limits) -> Result<ChainCode> {
    build_chain_qary(n, d, 2, limits)
}

/// q-ary chain code: starts from the identity of length `(q−1)d` and applies
/// [`extend`] with [`chain_points`] up to length `n`. Size `q^(n−(q−1)d)`.
pub fn build_chain_qary(n: usize, d: usize, q: usize, limits: &Limits) -> Result<ChainCode> {
    if q < 2 || d < 1 {
        return Err(PaError::invalid(format!(
            "chain code needs q >= 2 and d >= 1, got q={q} d={d}"
        )));
    }
    let base = (q - 1) * d;
    if n < base {
        return Err(PaError::invalid(format!(
            "chain code needs n >= (q-1)d = {base}, got n={n}"
        )));
    }
    checked_size(q as u64, n - base, limits.max_words, "chain code")
        .map_err(|e| PaError::resource(format!("{e}; use the codec module to encode directly")))?;

    let mut code = PermutationArray::singleton(Permutation::identity(base), d);
    for nu in base..n {
        code = extend(&code, &chain_points(nu, q))?;
    }
    Ok(ChainCode { n, d, q, words: code })
}
