//! Independent reference computations shared by the integration tests and
//! the acceptance suite. Nothing here calls into the numeric code under
//! test.
#![allow(dead_code)]

use std::path::PathBuf;

use mt_streams::stats::WordSource;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("core")
        .join("tests")
        .join("fixtures")
}

/// Outputs of the reference C implementation for `seed`.
pub fn reference_outputs(seed: u32) -> Vec<u32> {
    let path = fixture_dir().join(format!("mt19937ar_seed{seed}.txt"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    text.lines().map(|l| l.trim().parse().unwrap()).collect()
}

pub const REFERENCE_SEEDS: [u32; 4] = [0, 1, 4357, 5489];

/// ln Γ(k/2) for a positive integer k, by the recursions
/// Γ(n+1) = nΓ(n) from Γ(1) = 1 and Γ(1/2) = √π.
pub fn ln_gamma_half(k: u32) -> f64 {
    assert!(k > 0);
    let (mut x, mut acc) = if k.is_multiple_of(2) {
        (1.0, 0.0)
    } else {
        (0.5, 0.5 * std::f64::consts::PI.ln())
    };
    let target = k as f64 / 2.0;
    while x < target {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

#[allow(clippy::too_many_arguments)]
fn simpson_adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_adaptive(f, a, m, fa, flm, fm, left, tol, depth - 1)
        + simpson_adaptive(f, m, b, fm, frm, fb, right, tol, depth - 1)
}

/// Adaptive Simpson quadrature over `pieces` equal subintervals.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, pieces: usize, tol: f64) -> f64 {
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (flo, fmid, fhi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
            simpson_adaptive(&f, lo, hi, flo, fmid, fhi, whole, tol, 20)
        })
        .sum()
}

/// Upper tail of the chi-square law with `df` degrees of freedom,
/// integrating the density after substituting y = u².
pub fn chi2_sf_oracle(x: f64, df: u32) -> f64 {
    let k = df as f64;
    let ln_norm = (k / 2.0) * 2f64.ln() + ln_gamma_half(df);
    // density of u = sqrt(y): 2 u^(k-1) e^(-u²/2) / norm
    let g = |u: f64| {
        if u <= 0.0 {
            return if df == 1 { 2.0 * (-ln_norm).exp() } else { 0.0 };
        }
        (2f64.ln() + (k - 1.0) * u.ln() - 0.5 * u * u - ln_norm).exp()
    };
    let s = x.sqrt();
    let mode = (k - 1.0).max(0.0).sqrt();
    let top = s.max(mode) + 40.0;
    if x < k {
        1.0 - integrate(g, 0.0, s, 256, 1e-15)
    } else {
        integrate(g, s, top, 512, 1e-15)
    }
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

fn poisson_log_pmf(j: u64, lambda: f64) -> f64 {
    j as f64 * lambda.ln() - lambda - ln_factorial(j)
}

/// (P[X <= k], P[X >= k]) for X ~ Poisson(lambda), by direct summation.
pub fn poisson_tails_oracle(k: u64, lambda: f64) -> (f64, f64) {
    let left: f64 = (0..=k).map(|j| poisson_log_pmf(j, lambda).exp()).sum();
    let mut right = 0.0;
    let mut j = k;
    loop {
        let term = poisson_log_pmf(j, lambda).exp();
        right += term;
        if j as f64 > lambda && term < 1e-20 * right.max(1e-300) {
            break;
        }
        j += 1;
    }
    (left.min(1.0), right.min(1.0))
}

/// (x, df) grid for the chi-square oracle.
pub fn chi2_grid() -> Vec<(f64, u32)> {
    let mut grid = Vec::new();
    for df in [1u32, 2, 3, 5, 10, 31, 100, 1023] {
        for q in [0.2, 0.8, 1.0, 1.4, 2.2] {
            grid.push((q * df as f64 + 0.5, df));
        }
    }
    grid
}

/// (k, lambda) grid for the Poisson oracle.
pub fn poisson_grid() -> Vec<(u64, f64)> {
    let mut grid = Vec::new();
    for lambda in [0.5f64, 3.0, 12.0, 64.0, 256.0, 1024.0] {
        let sd = lambda.sqrt();
        for z in [-3.0, -1.0, 0.0, 1.5, 4.0] {
            let k = (lambda + z * sd).round().max(0.0) as u64;
            grid.push((k, lambda));
        }
    }
    grid
}

/// Shortest LFSR generating `bits`, by trying every connection polynomial.
pub fn brute_force_complexity(bits: &[u8]) -> usize {
    let n = bits.len();
    for l in 0..=n {
        for taps in 0u32..(1 << l) {
            let ok = (l..n).all(|j| {
                let mut s = 0;
                for i in 1..=l {
                    if taps >> (i - 1) & 1 == 1 {
                        s ^= bits[j - i];
                    }
                }
                s == bits[j]
            });
            if ok {
                return l;
            }
        }
    }
    unreachable!()
}

/// Counts of (H, M, R) over all 2^l walks of length l.
pub fn enumerate_walks(l: usize) -> (Vec<u64>, Vec<u64>, Vec<u64>) {
    let (mut h, mut m, mut r) = (vec![0; l + 1], vec![0; l + 1], vec![0; l / 2 + 1]);
    for pattern in 0u64..(1 << l) {
        let (mut s, mut ups, mut max, mut returns) = (0i64, 0, 0i64, 0);
        for i in 0..l {
            if pattern >> i & 1 == 1 {
                s += 1;
                ups += 1;
            } else {
                s -= 1;
            }
            max = max.max(s);
            if s == 0 {
                returns += 1;
            }
        }
        h[ups] += 1;
        m[max as usize] += 1;
        r[returns] += 1;
    }
    (h, m, r)
}

/// Empirical probability that `streams` segments of `length` draws from a
/// full-period LCG modulo 2^16, started at random states, share a state.
pub fn overlap_monte_carlo(streams: usize, length: usize, trials: usize, seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    const A: u32 = 25173;
    const C: u32 = 13849;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut seen = vec![0u32; 1 << 16];
    let mut hits = 0usize;
    for trial in 1..=trials as u32 {
        let mut overlap = false;
        'streams: for _ in 0..streams {
            let mut x: u32 = rng.gen_range(0..1 << 16);
            for _ in 0..length {
                if seen[x as usize] == trial {
                    overlap = true;
                    break 'streams;
                }
                seen[x as usize] = trial;
                x = (A.wrapping_mul(x).wrapping_add(C)) & 0xffff;
            }
        }
        hits += overlap as usize;
    }
    hits as f64 / trials as f64
}

/// 64-bit SplitMix mixer truncated to its low 32 bits. Its output bits have
/// generic linear complexity, so it serves as a passing control.
pub struct SplitMix32(pub u64);

impl WordSource for SplitMix32 {
    fn next_word(&mut self) -> u32 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        (z ^ (z >> 31)) as u32
    }
}

/// One-sample KS statistic against Uniform[0,1], computed independently
/// of the library.
pub fn ks_d(samples: &[f64]) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max)
}
