//! CollisionOver: overlapping t-tuples dropped into `d^t` cells.

use super::pvalue::{mid_pvalue, poisson_pmf, poisson_two_sided_pvalue};
use super::stream::{StreamView, WordSource};
use crate::error::{Error, Result};

/// Largest cell count tracked with a bitmap; beyond it indices are sorted.
const BITMAP_LIMIT: u64 = 1 << 27;

pub fn cell_count(d: u64, t: u32) -> Option<u64> {
    d.checked_pow(t)
}

/// Number of collisions `n - occupied cells` among the `n` overlapping
/// `t`-tuples of `uniforms` (which must hold `n + t - 1` values).
pub fn count_collisions(uniforms: &[f64], d: u64, t: u32) -> usize {
    let t = t as usize;
    assert!(uniforms.len() >= t);
    let n = uniforms.len() + 1 - t;
    let k = cell_count(d, t as u32).expect("cell count overflows u64");
    let coords: Vec<u64> = uniforms.iter().map(|&u| (u * d as f64) as u64).collect();
    let cells = (0..n).map(|i| {
        coords[i..i + t]
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * d + c)
    });
    let occupied = if k <= BITMAP_LIMIT {
        let mut seen = vec![0u64; (k as usize).div_ceil(64)];
        let mut occupied = 0;
        for c in cells {
            let (w, b) = ((c / 64) as usize, c % 64);
            if seen[w] >> b & 1 == 0 {
                seen[w] |= 1 << b;
                occupied += 1;
            }
        }
        occupied
    } else {
        let mut all: Vec<u64> = cells.collect();
        all.sort_unstable();
        all.dedup();
        all.len()
    };
    n - occupied
}

pub fn expected_collisions(n: usize, k: u64) -> f64 {
    let n = n as f64;
    n * (n - 1.0) / (2.0 * k as f64)
}

pub fn validate(n: usize, d: u64, t: u32) -> Result<()> {
    if n < 1 << 10 {
        return Err(Error::Params(format!(
            "CollisionOver needs n >= 1024, got {n}"
        )));
    }
    if d < 2 || t < 1 {
        return Err(Error::Params(format!(
            "CollisionOver needs d >= 2 and t >= 1, got d={d} t={t}"
        )));
    }
    match cell_count(d, t) {
        Some(k) if k >= 4 * n as u64 => Ok(()),
        _ => Err(Error::Params(format!(
            "CollisionOver d^t must be at least 4n (sparse regime); d={d} t={t} n={n}"
        ))),
    }
}

pub fn collision_over_test<S: WordSource>(
    view: &mut StreamView<S>,
    n: usize,
    d: u64,
    t: u32,
) -> Result<Vec<(String, f64)>> {
    validate(n, d, t)?;
    let uniforms: Vec<f64> = (0..n + t as usize - 1)
        .map(|_| view.next_uniform())
        .collect();
    let collisions = count_collisions(&uniforms, d, t);
    let lambda = expected_collisions(n, cell_count(d, t).unwrap());
    let (left, right) = poisson_two_sided_pvalue(collisions as u64, lambda);
    let atom = poisson_pmf(collisions as u64, lambda);
    Ok(vec![(
        "collisions".to_string(),
        mid_pvalue(left, right, atom),
    )])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn tiny_case_matches_hash_count() {
        let u = [0.1, 0.3, 0.12, 0.9, 0.6, 0.55, 0.26, 0.95];
        let distinct: HashSet<u64> = u.iter().map(|&x| (x * 4.0) as u64).collect();
        assert_eq!(count_collisions(&u, 4, 1), 8 - distinct.len());
        assert_eq!(count_collisions(&u, 4, 1), 4);
    }

    #[test]
    fn overlapping_pairs_brute_force() {
        let mut x = 12345u64;
        let u: Vec<f64> = (0..500)
            .map(|_| {
                x = x
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                (x >> 11) as f64 / (1u64 << 53) as f64
            })
            .collect();
        for (d, t) in [(8u64, 2u32), (4, 3), (3, 4)] {
            let tuples: Vec<Vec<u64>> = (0..u.len() + 1 - t as usize)
                .map(|i| {
                    u[i..i + t as usize]
                        .iter()
                        .map(|&v| (v * d as f64) as u64)
                        .collect()
                })
                .collect();
            let distinct: HashSet<&Vec<u64>> = tuples.iter().collect();
            assert_eq!(count_collisions(&u, d, t), tuples.len() - distinct.len());
        }
    }

    #[test]
    fn large_cell_space_uses_sort_path() {
        let u: Vec<f64> = (0..100).map(|i| ((i * 37) % 100) as f64 / 100.0).collect();
        // d^t = 2^30 > bitmap limit
        assert_eq!(count_collisions(&u, 1 << 15, 2), 0);
        let dup = vec![0.25; 10];
        assert_eq!(count_collisions(&dup, 1 << 15, 2), 8);
    }

    #[test]
    fn all_distinct_cells_give_left_tail() {
        let lambda = expected_collisions(1 << 16, 1 << 24);
        let (left, right) = poisson_two_sided_pvalue(0, lambda);
        assert!((left / (-lambda).exp() - 1.0).abs() < 1e-12);
        assert_eq!(right, 1.0);
        assert!(mid_pvalue(left, right, poisson_pmf(0, lambda)) > 1.0 - 1e-10);
    }

    #[test]
    fn sparse_regime_enforced() {
        assert!(validate(1 << 14, 1024, 2).is_ok());
        assert!(validate(1 << 14, 256, 2).is_ok());
        assert!(validate(1 << 14, 255, 2).is_err());
        assert!(validate(512, 1024, 2).is_err());
        assert!(validate(1 << 14, u64::MAX, 3).is_err());
    }
}
