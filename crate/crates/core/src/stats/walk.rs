//! RandomWalk1: simple ±1 walks built from stream bits.
//!
//! For each walk of `l` steps three statistics are recorded: the number of
//! up-steps `H`, the running maximum `M` and the number of returns to zero
//! `R`. Their exact laws come from dynamic programming over walk states and
//! are compared with the empirical counts of `N` walks by chi-square.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::pvalue::{chi2_merged, chi2_pvalue};
use super::stream::{StreamView, WordSource};
use crate::error::{Error, Result};

/// Exact distributions of `H` (index 0..=l), `M` (0..=l) and `R` (0..=l/2).
#[derive(Debug, Clone, PartialEq)]
pub struct WalkNull {
    pub steps: usize,
    pub h: Vec<f64>,
    pub m: Vec<f64>,
    pub r: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkStats {
    pub h: usize,
    pub m: usize,
    pub r: usize,
}

/// Statistics of one walk whose steps are `bits` (1 = up).
pub fn walk_stats(bits: impl IntoIterator<Item = u8>) -> WalkStats {
    let (mut s, mut h, mut m, mut r) = (0i64, 0, 0i64, 0);
    for b in bits {
        if b == 1 {
            s += 1;
            h += 1;
        } else {
            s -= 1;
        }
        m = m.max(s);
        if s == 0 {
            r += 1;
        }
    }
    WalkStats {
        h,
        m: m as usize,
        r,
    }
}

fn dp_up_steps(l: usize) -> Vec<f64> {
    let mut dist = vec![0.0; l + 1];
    dist[0] = 1.0;
    for j in 0..l {
        for h in (0..=j).rev() {
            let p = dist[h] * 0.5;
            dist[h + 1] += p;
            dist[h] = p;
        }
    }
    dist
}

/// Joint law of (position, running max), marginalised onto the max.
fn dp_maximum(l: usize) -> Vec<f64> {
    let width = l + 1;
    let origin = l as i64;
    let idx = |s: i64, m: usize| (s + origin) as usize * width + m;
    let mut cur = vec![0.0; (2 * l + 1) * width];
    let mut next = cur.clone();
    cur[idx(0, 0)] = 1.0;
    for j in 0..l as i64 {
        for s in (-j..=j).step_by(2) {
            let m_lo = s.max(0) as usize;
            for m in m_lo..=j as usize {
                let p = cur[idx(s, m)];
                if p == 0.0 {
                    continue;
                }
                let half = p * 0.5;
                let up_max = if s + 1 > m as i64 {
                    (s + 1) as usize
                } else {
                    m
                };
                next[idx(s + 1, up_max)] += half;
                next[idx(s - 1, m)] += half;
                cur[idx(s, m)] = 0.0;
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    let mut dist = vec![0.0; l + 1];
    let last = l as i64;
    for s in (-last..=last).step_by(2) {
        for (m, d) in dist.iter_mut().enumerate() {
            *d += cur[idx(s, m)];
        }
    }
    dist
}

/// Joint law of (position, zero count), marginalised onto the count.
fn dp_returns(l: usize) -> Vec<f64> {
    let width = l / 2 + 1;
    let origin = l as i64;
    let idx = |s: i64, r: usize| (s + origin) as usize * width + r;
    let mut cur = vec![0.0; (2 * l + 1) * width];
    let mut next = cur.clone();
    cur[idx(0, 0)] = 1.0;
    for j in 0..l as i64 {
        let r_hi = (j as usize / 2).min(width - 1);
        for s in (-j..=j).step_by(2) {
            for r in 0..=r_hi {
                let p = cur[idx(s, r)];
                if p == 0.0 {
                    continue;
                }
                let half = p * 0.5;
                for ns in [s - 1, s + 1] {
                    let nr = r + (ns == 0) as usize;
                    next[idx(ns, nr)] += half;
                }
                cur[idx(s, r)] = 0.0;
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    let mut dist = vec![0.0; width];
    let last = l as i64;
    for s in (-last..=last).step_by(2) {
        for (r, d) in dist.iter_mut().enumerate() {
            *d += cur[idx(s, r)];
        }
    }
    dist
}

/// Computes the exact null laws for walks of `l` steps.
pub fn walk_null(l: usize) -> WalkNull {
    WalkNull {
        steps: l,
        h: dp_up_steps(l),
        m: dp_maximum(l),
        r: dp_returns(l),
    }
}

/// Process-wide cache; the laws for long walks take a moment to build, so
/// concurrent callers wait for the first builder instead of repeating it.
pub fn cached_walk_null(l: usize) -> Arc<WalkNull> {
    type Slot = Arc<OnceLock<Arc<WalkNull>>>;
    static CACHE: OnceLock<Mutex<HashMap<usize, Slot>>> = OnceLock::new();
    let slot = CACHE
        .get_or_init(Default::default)
        .lock()
        .unwrap()
        .entry(l)
        .or_default()
        .clone();
    slot.get_or_init(|| Arc::new(walk_null(l))).clone()
}

pub fn validate(walks: usize, steps: usize) -> Result<()> {
    if walks < 1000 {
        return Err(Error::Params(format!(
            "RandomWalk1 needs at least 1000 walks, got {walks}"
        )));
    }
    if steps % 2 == 1 {
        return Err(Error::Params(format!("walk length {steps} must be even")));
    }
    if !(8..=4096).contains(&steps) {
        return Err(Error::Params(format!(
            "walk length {steps} outside 8..=4096"
        )));
    }
    Ok(())
}

fn chi2_against(observed: &[u64], probs: &[f64], walks: usize) -> f64 {
    let expected: Vec<f64> = probs.iter().map(|p| p * walks as f64).collect();
    match chi2_merged(observed, &expected) {
        Some((stat, df)) => chi2_pvalue(stat, df),
        // a single merged cell carries no information
        None => 0.5,
    }
}

/// p-values for `H`, `M` and `R` from histograms over `walks` walks.
pub fn walk_pvalues(
    null: &WalkNull,
    h: &[u64],
    m: &[u64],
    r: &[u64],
    walks: usize,
) -> Vec<(String, f64)> {
    vec![
        ("H".to_string(), chi2_against(h, &null.h, walks)),
        ("M".to_string(), chi2_against(m, &null.m, walks)),
        ("R".to_string(), chi2_against(r, &null.r, walks)),
    ]
}

pub fn random_walk_test<S: WordSource>(
    view: &mut StreamView<S>,
    walks: usize,
    steps: usize,
) -> Result<Vec<(String, f64)>> {
    validate(walks, steps)?;
    let null = cached_walk_null(steps);
    let mut h = vec![0u64; steps + 1];
    let mut m = vec![0u64; steps + 1];
    let mut r = vec![0u64; steps / 2 + 1];
    for _ in 0..walks {
        let stats = walk_stats((0..steps).map(|_| view.next_bit()));
        h[stats.h] += 1;
        m[stats.m] += 1;
        r[stats.r] += 1;
    }
    Ok(walk_pvalues(&null, &h, &m, &r, walks))
}
