//! ClosePairs: minimum toroidal distance among `n` points in `[0,1)^t`.
//!
//! The number of pairs closer than `x` is close to Poisson with mean
//! `n(n-1)/2 * V_t * x^t`, so `exp(-λ(D))` is uniform under the null.

use std::f64::consts::PI;

use super::pvalue::ln_gamma;
use super::stream::{StreamView, WordSource};
use crate::error::{Error, Result};

#[inline]
fn torus_dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = (x - y).abs();
            let d = d.min(1.0 - d);
            d * d
        })
        .sum()
}

fn brute_force_min(points: &[f64], t: usize) -> f64 {
    let n = points.len() / t;
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            best = best.min(torus_dist2(
                &points[i * t..(i + 1) * t],
                &points[j * t..(j + 1) * t],
            ));
        }
    }
    best.sqrt()
}

/// Minimal pairwise toroidal Euclidean distance. `points` holds `n` points
/// of dimension `t`, row-major.
pub fn min_torus_distance(points: &[f64], t: usize) -> f64 {
    assert!(t >= 1 && points.len().is_multiple_of(t));
    let n = points.len() / t;
    if n < 2 {
        return f64::INFINITY;
    }
    let grid = ((n as f64).powf(1.0 / t as f64).floor() as usize).min(1 << 16);
    if grid < 3 {
        return brute_force_min(points, t);
    }

    let cell_of = |p: &[f64]| -> usize {
        p.iter().rev().fold(0usize, |acc, &x| {
            acc * grid + ((x * grid as f64) as usize).min(grid - 1)
        })
    };
    let n_cells = grid.pow(t as u32);
    // counting sort of points by cell
    let mut start = vec![0usize; n_cells + 1];
    let cells: Vec<usize> = (0..n)
        .map(|i| cell_of(&points[i * t..(i + 1) * t]))
        .collect();
    for &c in &cells {
        start[c + 1] += 1;
    }
    for c in 0..n_cells {
        start[c + 1] += start[c];
    }
    let mut fill = start.clone();
    let mut order = vec![0usize; n];
    for (i, &c) in cells.iter().enumerate() {
        order[fill[c]] = i;
        fill[c] += 1;
    }

    let offsets: Vec<Vec<i64>> = (0..3usize.pow(t as u32))
        .map(|mut code| {
            (0..t)
                .map(|_| {
                    let o = (code % 3) as i64 - 1;
                    code /= 3;
                    o
                })
                .collect()
        })
        .collect();

    let mut best = f64::INFINITY;
    let mut coords = vec![0usize; t];
    for i in 0..n {
        let p = &points[i * t..(i + 1) * t];
        let mut c = cells[i];
        for k in coords.iter_mut() {
            *k = c % grid;
            c /= grid;
        }
        for off in &offsets {
            let neighbor = coords.iter().zip(off).rev().fold(0usize, |acc, (&k, &o)| {
                acc * grid + (k as i64 + o).rem_euclid(grid as i64) as usize
            });
            for &j in &order[start[neighbor]..start[neighbor + 1]] {
                if j > i {
                    best = best.min(torus_dist2(p, &points[j * t..(j + 1) * t]));
                }
            }
        }
    }
    let best = best.sqrt();
    if best < 1.0 / grid as f64 {
        best
    } else {
        brute_force_min(points, t)
    }
}

/// Volume of the unit ball in `t` dimensions.
pub fn unit_ball_volume(t: usize) -> f64 {
    let h = t as f64 / 2.0;
    (h * PI.ln() - ln_gamma(h + 1.0)).exp()
}

/// `λ(x) = n(n-1)/2 * V_t * x^t`.
pub fn close_pairs_mean(n: usize, t: usize, x: f64) -> f64 {
    let n = n as f64;
    n * (n - 1.0) / 2.0 * unit_ball_volume(t) * x.powi(t as i32)
}

pub fn validate(n: usize, t: usize) -> Result<()> {
    if n < 1 << 8 {
        return Err(Error::Params(format!("ClosePairs needs n >= 256, got {n}")));
    }
    if !(2..=8).contains(&t) {
        return Err(Error::Params(format!(
            "ClosePairs dimension {t} outside 2..=8"
        )));
    }
    Ok(())
}

pub fn close_pairs_test<S: WordSource>(
    view: &mut StreamView<S>,
    n: usize,
    t: usize,
) -> Result<Vec<(String, f64)>> {
    validate(n, t)?;
    let points: Vec<f64> = (0..n * t).map(|_| view.next_uniform()).collect();
    let d = min_torus_distance(&points, t);
    let p = (-close_pairs_mean(n, t, d)).exp();
    Ok(vec![("min_distance".to_string(), p)])
}
