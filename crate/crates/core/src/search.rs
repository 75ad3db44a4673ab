//! Lexicographic greedy search and an exact maximum-PA oracle.

use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::perm::next_permutation;
use crate::{Limits, PaError, Permutation, PermutationArray, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMethod {
    Greedy,
    Exact,
}

impl fmt::Display for SearchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMethod::Greedy => "greedy",
            SearchMethod::Exact => "exact",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub n: usize,
    pub d: usize,
    pub size: usize,
    pub words: PermutationArray,
    pub method: SearchMethod,
    /// Wall-clock time; excluded from serialized output so runs compare byte for byte.
    #[serde(skip)]
    pub elapsed: Duration,
    pub permutations_scanned: u64,
}

fn check_params(n: usize, d: usize, max_n: usize, what: &str) -> Result<()> {
    if n < 1 || d < 1 {
        return Err(PaError::invalid(format!(
            "{what} needs n >= 1 and d >= 1, got n={n} d={d}"
        )));
    }
    if n > max_n {
        return Err(PaError::resource(format!(
            "{what} over S_{n} exceeds the limit n <= {max_n}"
        )));
    }
    Ok(())
}

#[inline]
fn far_enough(a: &[u8], b: &[u8], d: u8) -> bool {
    a.iter().zip(b).any(|(&x, &y)| x.abs_diff(y) >= d)
}

fn to_permutation(w: &[u8]) -> Permutation {
    Permutation::from_vec_unchecked(w.iter().map(|&v| v as u32).collect())
}

/// Scans `S_n` in lexicographic order starting from the identity and keeps
/// every permutation at distance `≥ d` from all words kept so far.
pub fn greedy_lex(n: usize, d: usize, limits: &Limits) -> Result<SearchResult> {
    check_params(n, d, limits.greedy_max_n, "greedy search")?;
    if n > u8::MAX as usize {
        return Err(PaError::resource("greedy search supports n <= 255"));
    }
    let start = Instant::now();
    let mut cur: Vec<u8> = (1..=n as u8).collect();
    let mut chosen: Vec<u8> = Vec::new();
    let mut scanned = 0u64;
    let dd = d.min(255) as u8;
    loop {
        scanned += 1;
        // recent words are lexicographically closest, so test them first
        if chosen.rchunks_exact(n).all(|w| far_enough(w, &cur, dd)) {
            chosen.extend_from_slice(&cur);
        }
        if !next_permutation(&mut cur) {
            break;
        }
    }
    let words: Vec<Permutation> = chosen.chunks_exact(n).map(to_permutation).collect();
    Ok(SearchResult {
        n,
        d,
        size: words.len(),
        words: PermutationArray::new(n, d, words),
        method: SearchMethod::Greedy,
        elapsed: start.elapsed(),
        permutations_scanned: scanned,
    })
}

#[derive(Clone)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(len: usize) -> Self {
        BitSet(vec![0; len.div_ceil(64)])
    }

    fn full(len: usize) -> Self {
        let mut s = BitSet::new(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn and(&self, other: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn and_not_assign(&mut self, other: &BitSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            })
        })
    }
}

/// Branch-and-bound maximum clique with a greedy-coloring bound.
struct CliqueSearch<'a> {
    adj: &'a [BitSet],
    best: Vec<usize>,
    current: Vec<usize>,
}

impl CliqueSearch<'_> {
    /// Greedy coloring of `cand` in vertex order; returns `(vertex, color)`
    /// with colors nondecreasing.
    fn color(&self, cand: &BitSet) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut uncolored = cand.clone();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut avail = uncolored.clone();
            loop {
                let first = avail.iter().next();
                let Some(v) = first else { break };
                avail.remove(v);
                avail.and_not_assign(&self.adj[v]);
                uncolored.remove(v);
                out.push((v, color));
            }
        }
        out
    }

    fn expand(&mut self, mut cand: BitSet) {
        let order = self.color(&cand);
        for &(v, color) in order.iter().rev() {
            if self.current.len() + color <= self.best.len() {
                return;
            }
            self.current.push(v);
            let next = cand.and(&self.adj[v]);
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            cand.remove(v);
        }
    }
}

/// Exact `P(n, d)` by maximum clique search on the graph over `S_n` whose
/// edges join permutations at distance `≥ d`.
///
/// Permuting positions is an isometry that acts transitively on `S_n`, so
/// some maximum PA contains the identity; the search runs on the identity's
/// neighbourhood. The witness starts with the identity.
pub fn exact_max_pa(n: usize, d: usize, limits: &Limits) -> Result<SearchResult> {
    check_params(n, d, limits.exact_max_n, "exact search")?;
    let start = Instant::now();
    let mut cur: Vec<u8> = (1..=n as u8).collect();
    let identity = cur.clone();
    let dd = d.min(255) as u8;
    let mut vertices: Vec<Vec<u8>> = Vec::new();
    let mut scanned = 0u64;
    loop {
        scanned += 1;
        if far_enough(&identity, &cur, dd) {
            vertices.push(cur.clone());
        }
        if !next_permutation(&mut cur) {
            break;
        }
    }
    let m = vertices.len();
    let mut adj = vec![BitSet::new(m); m];
    for i in 0..m {
        for j in i + 1..m {
            if far_enough(&vertices[i], &vertices[j], dd) {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
    }
    let mut search = CliqueSearch {
        adj: &adj,
        best: Vec::new(),
        current: Vec::new(),
    };
    if m > 0 {
        search.expand(BitSet::full(m));
    }
    let mut clique = search.best;
    clique.sort_unstable();
    let mut words = vec![to_permutation(&identity)];
    words.extend(clique.into_iter().map(|v| to_permutation(&vertices[v])));
    Ok(SearchResult {
        n,
        d,
        size: words.len(),
        words: PermutationArray::new(n, d, words),
        method: SearchMethod::Exact,
        elapsed: start.elapsed(),
        permutations_scanned: scanned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{gilbert_lower, hamming_upper};
    use crate::validate_pa;
    use num_bigint::BigUint;

    fn p(v: &[u32]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn greedy_trace_n3_d2() {
        let r = greedy_lex(3, 2, &Limits::default()).unwrap();
        assert_eq!(r.size, 3);
        assert_eq!(r.words.words, vec![p(&[1, 2, 3]), p(&[2, 3, 1]), p(&[3, 1, 2])]);
        assert_eq!(r.permutations_scanned, 6);
    }

    #[test]
    fn greedy_guards() {
        assert!(matches!(
            greedy_lex(13, 2, &Limits::default()),
            Err(PaError::Resource(_))
        ));
        assert!(greedy_lex(3, 0, &Limits::default()).is_err());
        assert!(matches!(
            exact_max_pa(7, 2, &Limits::default()),
            Err(PaError::Resource(_))
        ));
    }

    /// Reference greedy with the plain metric, no early exits or reordering.
    fn naive_greedy(n: usize, d: usize) -> Vec<Permutation> {
        let mut cur: Vec<u32> = (1..=n as u32).collect();
        let mut chosen: Vec<Permutation> = Vec::new();
        loop {
            let w = p(&cur);
            if chosen
                .iter()
                .all(|c| crate::chebyshev_distance(c, &w).unwrap() >= d)
            {
                chosen.push(w);
            }
            if !next_permutation(&mut cur) {
                return chosen;
            }
        }
    }

    #[test]
    fn greedy_matches_naive_and_gilbert() {
        let limits = Limits::default();
        for n in 2..=7 {
            for d in 1..n {
                let r = greedy_lex(n, d, &limits).unwrap();
                assert_eq!(r.words.words, naive_greedy(n, d), "n={n} d={d}");
                assert!(validate_pa(&r.words).is_valid());
                if d >= 2 {
                    assert!(BigUint::from(r.size) >= gilbert_lower(n, d).unwrap());
                }
            }
        }
    }

    #[test]
    fn greedy_is_deterministic() {
        let limits = Limits::default();
        let a = serde_json::to_string(&greedy_lex(6, 3, &limits).unwrap()).unwrap();
        let b = serde_json::to_string(&greedy_lex(6, 3, &limits).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    /// Independent exhaustive check: does some `(n, d)` PA of size `k` exist?
    fn exists_pa(all: &[Vec<u32>], d: usize, k: usize, from: usize, chosen: &mut Vec<usize>) -> bool {
        if chosen.len() == k {
            return true;
        }
        if chosen.len() + (all.len() - from) < k {
            return false;
        }
        for i in from..all.len() {
            let ok = chosen
                .iter()
                .all(|&c| crate::perm::distance_slices(&all[c], &all[i]) >= d);
            if ok {
                chosen.push(i);
                if exists_pa(all, d, k, i + 1, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    fn deepening_max(n: usize, d: usize) -> usize {
        let mut cur: Vec<u32> = (1..=n as u32).collect();
        let mut all = vec![cur.clone()];
        while next_permutation(&mut cur) {
            all.push(cur.clone());
        }
        let mut k = 1;
        while exists_pa(&all, d, k + 1, 0, &mut Vec::new()) {
            k += 1;
        }
        k
    }

    #[test]
    fn exact_agrees_with_deepening_search() {
        let limits = Limits::default();
        for n in 1..=4 {
            for d in 1..=n + 1 {
                let r = exact_max_pa(n, d, &limits).unwrap();
                assert_eq!(r.size, deepening_max(n, d), "n={n} d={d}");
                assert!(validate_pa(&r.words).is_valid());
            }
        }
    }

    #[test]
    fn exact_small_values() {
        let limits = Limits::default();
        for n in 1..=5 {
            assert_eq!(exact_max_pa(n, n, &limits).unwrap().size, 1);
        }
        for d in 2..=5 {
            assert_eq!(exact_max_pa(d + 1, d, &limits).unwrap().size, 3, "d={d}");
        }
        assert_eq!(exact_max_pa(5, 3, &limits).unwrap().size, 10);
        assert_eq!(exact_max_pa(4, 1, &limits).unwrap().size, 24);
    }

    #[test]
    fn ten_word_five_three_array() {
        let words: Vec<Permutation> = [
            [5, 4, 1, 3, 2], [2, 5, 4, 3, 1], [3, 4, 2, 1, 5], [1, 2, 3, 5, 4], [4, 1, 3, 2, 5],
            [4, 1, 2, 5, 3], [2, 5, 1, 4, 3], [1, 3, 5, 2, 4], [3, 2, 5, 4, 1], [5, 3, 4, 1, 2],
        ]
        .iter()
        .map(|w| Permutation::new(w.to_vec()).unwrap())
        .collect();
        assert!(validate_pa(&PermutationArray::new(5, 3, words)).is_valid());
    }

    #[test]
    fn exact_between_greedy_and_hamming() {
        let limits = Limits::default();
        // (6,2) and (6,3) are beyond the clique search's reach
        let cells = (2..=5).flat_map(|n| (2..n).map(move |d| (n, d))).chain([(6, 4), (6, 5)]);
        for (n, d) in cells {
            {
                let exact = exact_max_pa(n, d, &limits).unwrap();
                let greedy = greedy_lex(n, d, &limits).unwrap();
                assert!(exact.size >= greedy.size);
                assert!(validate_pa(&exact.words).is_valid());
                assert!(BigUint::from(exact.size) <= hamming_upper(n, d, 0).unwrap());
            }
        }
    }

    #[test]
    #[ignore = "several minutes; run with --ignored"]
    fn exact_seven_five() {
        let limits = Limits {
            exact_max_n: 7,
            ..Limits::default()
        };
        let r = exact_max_pa(7, 5, &limits).unwrap();
        assert!(r.size >= 9);
        assert!(validate_pa(&r.words).is_valid());
    }
}
