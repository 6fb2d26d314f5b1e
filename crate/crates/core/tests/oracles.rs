mod common;

use common::*;
use mt_streams::partition::overlap_probability;
use mt_streams::stats::complexity::{berlekamp_massey, complexity_probability};
use mt_streams::stats::pvalue::{chi2_pvalue, poisson_two_sided_pvalue};
use mt_streams::stats::walk::walk_null;

#[test]
fn chi2_matches_quadrature() {
    let grid = chi2_grid();
    assert!(grid.len() >= 20);
    for (x, df) in grid {
        let want = chi2_sf_oracle(x, df);
        let got = chi2_pvalue(x, df);
        assert!(
            (got - want).abs() <= 1e-10,
            "x={x} df={df}: {got} vs {want}"
        );
    }
}

#[test]
fn quadrature_oracle_closed_forms() {
    // df = 2: e^{-x/2}
    for x in [0.1, 1.0, 4.0, 20.0] {
        assert!((chi2_sf_oracle(x, 2) - (-x / 2.0f64).exp()).abs() < 1e-12);
    }
}

#[test]
fn poisson_matches_summation() {
    let grid = poisson_grid();
    assert!(grid.len() >= 20);
    for (k, lambda) in grid {
        let (want_l, want_r) = poisson_tails_oracle(k, lambda);
        let (l, r) = poisson_two_sided_pvalue(k, lambda);
        assert!(
            (l - want_l).abs() <= 1e-10,
            "k={k} λ={lambda}: {l} vs {want_l}"
        );
        assert!(
            (r - want_r).abs() <= 1e-10,
            "k={k} λ={lambda}: {r} vs {want_r}"
        );
    }
}

#[test]
fn complexity_law_n10_is_exhaustive() {
    let n = 10;
    let mut counts = vec![0u64; n + 1];
    for pattern in 0u32..(1 << n) {
        let bits: Vec<u8> = (0..n).map(|i| (pattern >> i & 1) as u8).collect();
        let l = brute_force_complexity(&bits);
        assert_eq!(berlekamp_massey(&bits), l, "{bits:?}");
        counts[l] += 1;
    }
    for (l, &c) in counts.iter().enumerate() {
        assert_eq!(complexity_probability(n, l) * 1024.0, c as f64, "l={l}");
    }
}

#[test]
fn walk_laws_l16_are_exhaustive() {
    let l = 16;
    let (h, m, r) = enumerate_walks(l);
    let null = walk_null(l);
    let scale = (1u64 << l) as f64;
    let as_prob = |c: &[u64]| c.iter().map(|&x| x as f64 / scale).collect::<Vec<_>>();
    assert_eq!(null.h, as_prob(&h));
    assert_eq!(null.m, as_prob(&m));
    assert_eq!(null.r, as_prob(&r));
}

#[test]
fn overlap_against_toy_generator() {
    let empirical = overlap_monte_carlo(8, 256, 100_000, 7);
    let approx = overlap_probability(16, 8, 256);
    let rel = (approx - empirical).abs() / empirical;
    assert!(rel <= 0.2, "approx {approx} empirical {empirical}");
}

#[test]
fn overlap_degenerate_and_monotone() {
    assert_eq!(overlap_probability(19937, 1, 1 << 40), 0.0);
    assert_eq!(overlap_probability(16, 100, 0), 0.0);
    assert_eq!(overlap_probability(19937, 4096, 1 << 40), 0.0);
    let ks = [1u64, 2, 8, 64, 4096, 1 << 20];
    let ls = [0u64, 1, 100, 1 << 20, 1 << 40, u64::MAX];
    let ps = [8u32, 16, 32, 61, 64, 128, 19937];
    for &p in &ps {
        for &k in &ks {
            for w in ls.windows(2) {
                assert!(overlap_probability(p, k, w[0]) <= overlap_probability(p, k, w[1]));
            }
        }
        for &l in &ls {
            for w in ks.windows(2) {
                assert!(overlap_probability(p, w[0], l) <= overlap_probability(p, w[1], l));
            }
        }
    }
    for &k in &ks {
        for &l in &ls {
            for w in ps.windows(2) {
                assert!(overlap_probability(w[0], k, l) >= overlap_probability(w[1], k, l));
            }
        }
    }
}
