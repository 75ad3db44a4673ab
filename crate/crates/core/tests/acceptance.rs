//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Runs without the libtest harness so every line is printed even when all
//! criteria pass.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use chebyshev_pa::bounds::{
    ball_size, best_known_lower, big_ratio, gilbert_lower, hamming_upper, mu_estimate, vupper_base, Provenance,
    Registered,
};
use chebyshev_pa::channel::{self, ChannelConfig, CodeParams, CodecKind};
use chebyshev_pa::codec::{decode_binary, encode_binary, MessageVector};
use chebyshev_pa::constructions::{
    extend_with_rule, first_recursive, growth_points, ExplicitCode, ExtendRule,
};
use chebyshev_pa::perm::next_permutation;
use chebyshev_pa::search::{exact_max_pa, greedy_lex};
use chebyshev_pa::{cli, validate_pa, Limits, Permutation, PermutationArray};

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            ok: true,
            detail: String::new(),
        }
    }

    fn check(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.ok = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(&what.into());
        }
    }

    fn note(&mut self, what: impl AsRef<str>) {
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(what.as_ref());
    }
}

fn all_perms(n: usize) -> Vec<Vec<u32>> {
    let mut cur: Vec<u32> = (1..=n as u32).collect();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn brute_ball(n: usize, d: usize) -> u64 {
    all_perms(n)
        .iter()
        .filter(|p| p.iter().enumerate().all(|(i, &v)| (i as i64 + 1 - v as i64).unsigned_abs() as usize <= d))
        .count() as u64
}

fn dist(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).map(|(x, y)| x.abs_diff(*y) as usize).max().unwrap_or(0)
}

fn pairwise_min(words: &[Vec<u32>]) -> Option<usize> {
    let mut best = None;
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            let d = dist(a, b);
            best = Some(best.map_or(d, |m: usize| m.min(d)));
        }
    }
    best
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn c1_ball_sizes() -> Outcome {
    let mut o = Outcome::new();
    for (n, d, want) in [(11, 2, 11854u64), (12, 3, 563172)] {
        let (v, t) = timed(|| ball_size(n, d).unwrap());
        o.check(v == BigUint::from(want), format!("V({n},{d}) = {v}, expected {want}"));
        o.check(t < Duration::from_secs(1), format!("V({n},{d}) took {t:?}"));
    }
    if !o.ok {
        o.note(format!(
            "the expected values equal V(12,2) = {} and V(13,3) = {}",
            ball_size(12, 2).unwrap(),
            ball_size(13, 3).unwrap()
        ));
    }
    o
}

fn c2_hamming() -> Outcome {
    let mut o = Outcome::new();
    for (r, want) in [(0, 3367u64), (1, 850)] {
        let v = hamming_upper(11, 6, r).unwrap();
        o.check(v == BigUint::from(want), format!("r={r}: {v}, expected {want}"));
    }
    if !o.ok {
        o.note("the expected values divide by V(12,2) and V(13,3); see criterion 1");
    }
    o
}

fn c3_brute_force() -> Outcome {
    let mut o = Outcome::new();
    let mut mismatches = 0;
    for n in 1..=8 {
        for d in 0..=n {
            if ball_size(n, d).unwrap() != BigUint::from(brute_ball(n, d)) {
                mismatches += 1;
                o.check(false, format!("mismatch at ({n},{d})"));
            }
        }
    }
    o.note(format!("{mismatches} mismatches"));
    o
}

fn c4_mu() -> Outcome {
    let mut o = Outcome::new();
    let (_, t) = timed(|| {
        for (d, want, tol) in [(1, 1.61803, 1e-4), (2, 2.33355, 1e-3), (3, 3.06177, 1e-2)] {
            let est = mu_estimate(d, 40, &Limits::default()).unwrap();
            o.check(
                (est.estimate - want).abs() <= tol,
                format!("mu_{d} = {:.6}, expected {want} within {tol}", est.estimate),
            );
            o.check(est.estimate <= vupper_base(d), format!("mu_{d} above the upper bound"));
        }
    });
    o.check(t < Duration::from_secs(60), format!("took {t:?}"));
    o
}

fn c5_greedy() -> Outcome {
    let mut o = Outcome::new();
    let cells = [
        (3, 2, 3),
        (4, 2, 6),
        (5, 2, 29),
        (6, 2, 90),
        (7, 2, 582),
        (4, 3, 3),
        (5, 3, 9),
        (6, 3, 20),
        (7, 3, 84),
        (5, 4, 3),
        (7, 4, 28),
    ];
    let (_, t) = timed(|| {
        for (n, d, want) in cells {
            let r = greedy_lex(n, d, &Limits::default()).unwrap();
            o.check(r.size == want, format!("({n},{d}) gave {}, expected {want}", r.size));
            let g = gilbert_lower(n, d).unwrap();
            o.check(BigUint::from(r.size) >= g, format!("({n},{d}) below the Gilbert bound {g}"));
        }
    });
    o.check(t < Duration::from_secs(600), format!("took {t:?}"));
    o
}

fn c6_exact() -> Outcome {
    let mut o = Outcome::new();
    let mut cells = vec![(3, 2, 3), (4, 3, 3), (5, 4, 3), (5, 3, 9)];
    cells.extend((1..=5).map(|n| (n, n, 1)));
    for (n, d, want) in cells {
        let (r, t) = timed(|| exact_max_pa(n, d, &Limits::default()).unwrap());
        o.check(r.size == want, format!("P({n},{d}) = {}, expected {want}", r.size));
        o.check(validate_pa(&r.words).is_valid(), format!("({n},{d}) witness invalid"));
        o.check(t < Duration::from_secs(30), format!("({n},{d}) took {t:?}"));
        if (n, d) == (5, 3) && r.size > want {
            let words: Vec<String> = r.words.words.iter().map(|w| format!("({w})")).collect();
            o.note(format!("witness {}", words.join(" ")));
        }
    }
    o
}

fn c7_explicit() -> Outcome {
    let mut o = Outcome::new();
    for n in 1..=8 {
        let perms = all_perms(n);
        for d in 1..=n {
            let code = ExplicitCode::new(n, d).unwrap();
            let (a, b) = (n / d, n % d);
            let fact = |m: usize| (1..=m).map(BigUint::from).product::<BigUint>();
            let formula = fact(a + 1).pow(b as u32) * fact(a).pow((d - b) as u32);
            let residue = perms
                .iter()
                .filter(|p| p.iter().enumerate().all(|(i, &v)| (v as usize) % d == (i + 1) % d))
                .count();
            o.check(code.cardinality() == &formula, format!("({n},{d}) cardinality"));
            o.check(BigUint::from(residue) == formula, format!("({n},{d}) residue count {residue}"));
            let words: Vec<Vec<u32>> = code
                .materialize(1 << 20)
                .unwrap()
                .words
                .into_iter()
                .map(Permutation::into_vec)
                .collect();
            o.check(words.len() == residue, format!("({n},{d}) materialized {}", words.len()));
            if d == 1 {
                let distinct: HashSet<&Vec<u32>> = words.iter().collect();
                o.check(distinct.len() == words.len(), format!("({n},1) duplicates"));
            } else if let Some(m) = pairwise_min(&words) {
                o.check(m >= d, format!("({n},{d}) min distance {m}"));
            }
        }
    }
    let code = ExplicitCode::new(30, 2).unwrap();
    let ratio = big_ratio(code.cardinality(), &(BigUint::from(1u32) << 28usize));
    o.check((6.36e15..=6.38e15).contains(&ratio), format!("ratio {ratio:.4e}"));
    o.note(format!("|C(30,2)|/2^28 = {ratio:.4e}"));
    o
}

fn c8_codec() -> Outcome {
    let mut o = Outcome::new();
    let mut decodes = 0u64;
    for d in 2..=4 {
        for k in 1..=12 {
            let n = k + d;
            let mags: Vec<i64> = (1..=k).map(|i| ((n - i - 1) / 2) as i64).collect();
            let active: Vec<usize> = (0..k).filter(|&i| mags[i] > 0).collect();
            let mut image = Vec::with_capacity(1 << k);
            for m in 0u32..(1 << k) {
                let digits: Vec<u32> = (0..k).map(|i| (m >> (k - 1 - i)) & 1).collect();
                let x = MessageVector::binary(digits.clone()).unwrap();
                let y: Vec<i64> = encode_binary(&x, n, d).unwrap().as_slice().iter().map(|&v| v as i64).collect();
                image.push(y.iter().map(|&v| v as u32).collect::<Vec<u32>>());
                for signs in 0u32..(1 << active.len()) {
                    let mut noisy = y.clone();
                    for (b, &i) in active.iter().enumerate() {
                        noisy[i] += if signs >> b & 1 == 1 { mags[i] } else { -mags[i] };
                    }
                    decodes += 1;
                    if decode_binary(&noisy, n, d).unwrap().digits != digits {
                        o.check(false, format!("(n={n},d={d}) message {m} pattern {signs}"));
                    }
                }
                if decode_binary(&y, n, d).unwrap().digits != digits {
                    o.check(false, format!("(n={n},d={d}) clean decode of {m}"));
                }
            }
            let distinct: HashSet<&Vec<u32>> = image.iter().collect();
            o.check(distinct.len() == image.len(), format!("(n={n},d={d}) not injective"));
            if let Some(m) = pairwise_min(&image) {
                o.check(m >= d, format!("(n={n},d={d}) image distance {m}"));
            }
        }
    }
    o.note(format!("{decodes} noisy decodes"));
    o
}

fn random_pa(rng: &mut StdRng, n: usize, d: usize, max: usize) -> PermutationArray {
    let mut perms = all_perms(n);
    perms.shuffle(rng);
    let mut words: Vec<Vec<u32>> = Vec::new();
    for p in perms {
        if words.len() == max {
            break;
        }
        if words.iter().all(|w| dist(w, &p) >= d) {
            words.push(p);
        }
    }
    let words = words.into_iter().map(|w| Permutation::new(w).unwrap()).collect();
    PermutationArray::new(n, d, words)
}

fn check_array(o: &mut Outcome, what: &str, out: &PermutationArray, n: usize, d: usize, size: usize) {
    o.check(
        (out.n, out.d, out.len()) == (n, d, size),
        format!("{what}: got ({},{}) size {}, expected ({n},{d}) size {size}", out.n, out.d, out.len()),
    );
    o.check(validate_pa(out).is_valid(), format!("{what}: distance below {d}"));
}

fn c9_theorems() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = StdRng::seed_from_u64(2024);
    let limits = Limits::default();
    for _ in 0..1000 {
        // spaced extension
        let n = rng.random_range(2..=6);
        let d = rng.random_range(1..n);
        let c = random_pa(&mut rng, n, d, 12);
        let mut s = vec![rng.random_range(1..=n + 1)];
        while rng.random_bool(0.6) {
            let next = s[s.len() - 1] + d + rng.random_range(0..2);
            if next > n + 1 {
                break;
            }
            s.push(next);
        }
        let (out, rule) = extend_with_rule(&c, &s).unwrap();
        let want_d = if rule == ExtendRule::Diagonal { d + 1 } else { d };
        check_array(&mut o, "spaced", &out, n + 1, want_d, s.len() * c.len());

        // diagonal extension, n <= 2d
        let d = rng.random_range(1..=3);
        let n = rng.random_range(d + 1..=2 * d);
        let c = random_pa(&mut rng, n, d, 12);
        let m = rng.random_range(n - d + 1..=d + 1);
        let (out, rule) = extend_with_rule(&c, &[m]).unwrap();
        o.check(rule == ExtendRule::Diagonal, format!("diagonal rule not chosen for n={n} d={d} m={m}"));
        check_array(&mut o, "diagonal", &out, n + 1, d + 1, c.len());

        // growth points
        let n = rng.random_range(2..=6);
        let d = rng.random_range(1..n);
        let c = random_pa(&mut rng, n, d, 12);
        let out = extend_with_rule(&c, &growth_points(n, d).unwrap()).unwrap().0;
        check_array(&mut o, "growth", &out, n + 1, d, (n / d + 1) * c.len());

        // P(n+1,d+1) >= P(n,d) for d < n <= 2d
        let d = rng.random_range(1..=3);
        let n = rng.random_range(d + 1..=2 * d);
        let c = random_pa(&mut rng, n, d, 12);
        let out = extend_with_rule(&c, &[d + 1]).unwrap().0;
        check_array(&mut o, "distance step", &out, n + 1, d + 1, c.len());

        // interleaving
        let r = rng.random_range(2..=3);
        let n = rng.random_range(1..=4);
        let d = rng.random_range(1..=n);
        let c = random_pa(&mut rng, n, d, if r == 2 { 8 } else { 4 });
        let out = first_recursive(&c, r, &limits).unwrap();
        check_array(&mut o, "interleave", &out, r * n, r * d, c.len().pow(r as u32));
    }

    let seeds = [Registered::greedy(7, 4, 28), Registered::greedy(7, 2, 582)];
    let table = best_known_lower(10, 7, &seeds).unwrap();
    let cell = |n: usize, d: usize| table.iter().find(|r| r.n == n && r.d == d).unwrap();
    o.check(cell(8, 5).lower >= BigUint::from(28u32), "P(8,5) < 28");
    o.check(cell(10, 7).lower >= BigUint::from(28u32), "P(10,7) < 28");
    let c = cell(8, 2);
    o.check(
        c.lower == BigUint::from(2328u32) && c.lower_provenance == Provenance::C2b1,
        format!("(8,2) = {} via {}", c.lower, c.lower_provenance),
    );
    o
}

fn c10_excluded() -> Outcome {
    let mut o = Outcome::new();
    o.note("greedy for d >= 5 at n = d+4, d+5 and exact P(7,5) are outside CI; exact(7,5) runs with --ignored");
    o
}

fn c11_channel() -> Outcome {
    let mut o = Outcome::new();
    for (codec, n, d, q) in [
        (CodecKind::Binary, 12, 3, 2),
        (CodecKind::Qary, 12, 3, 3),
        (CodecKind::Explicit, 12, 3, 0),
    ] {
        let params = CodeParams { codec, n, d, q };
        let cfg = ChannelConfig {
            sigma: 0.0,
            trials: 1000,
            seed: 1,
            clip: None,
        };
        let s = channel::simulate(&params, &cfg).unwrap();
        o.check(
            s.symbol_errors_pre_decode + s.block_decode_failures + s.message_digit_errors == 0,
            format!("{codec:?} has errors at sigma 0"),
        );
    }

    let params = CodeParams {
        codec: CodecKind::Explicit,
        n: 15,
        d: 5,
        q: 0,
    };
    let cfg = ChannelConfig {
        sigma: 2.0,
        trials: 10_000,
        seed: 5,
        clip: Some(2),
    };
    let s = channel::simulate(&params, &cfg).unwrap();
    o.check(s.block_decode_failures == 0, format!("{} clipped block failures", s.block_decode_failures));
    o.check(s.symbol_errors_pre_decode > 0, "clipped run saw no symbol errors");

    let args = [
        "chebyshev-pa", "--no-cache", "simulate", "--codec", "qary", "--n", "14", "--d", "3", "--q", "3",
        "--sigma", "0.9", "--trials", "3000", "--seed", "77", "--format", "json",
    ];
    let run = || {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cli::run(args, &mut out, &mut err);
        (code, out)
    };
    let (a, b) = (run(), run());
    o.check(a.0 == 0 && b.0 == 0, "simulate exited nonzero");
    o.check(a.1 == b.1 && !a.1.is_empty(), "JSON output differs between runs");
    o
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("ball sizes", c1_ball_sizes),
        ("Hamming bounds", c2_hamming),
        ("ball size vs brute force", c3_brute_force),
        ("growth-rate estimates", c4_mu),
        ("greedy table", c5_greedy),
        ("exact oracle", c6_exact),
        ("explicit code", c7_explicit),
        ("binary codec", c8_codec),
        ("extension and interleaving properties", c9_theorems),
        ("excluded items", c10_excluded),
        ("channel simulator", c11_channel),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (o, t) = timed(f);
        let status = if o.ok { "PASS" } else { "FAIL" };
        failed += usize::from(!o.ok);
        let detail = if o.detail.is_empty() { String::new() } else { format!(": {}", o.detail) };
        println!("{status} {:>2} {name} [{:.2}s]{detail}", i + 1, t.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
