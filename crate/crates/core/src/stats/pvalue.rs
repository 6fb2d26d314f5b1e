//! Distribution tails used to turn test statistics into p-values.

use std::f64::consts::PI;

const EPS: f64 = 1e-17;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 1_000_000;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    if x >= 10.0 {
        return (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + stirling_tail(x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `ln Γ(a) - [(a - 1/2) ln a - a + ln(2π)/2]`, valid for `a >= 10`.
fn stirling_tail(a: f64) -> f64 {
    let inv = 1.0 / a;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0
        - inv2
            * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))))
}

/// `ln(1 + t) - t` without cancellation near zero.
fn log1pmx(t: f64) -> f64 {
    if t.abs() >= 0.5 {
        return t.ln_1p() - t;
    }
    let mut power = t * t;
    let mut sum = 0.0;
    let mut k = 2.0;
    let mut sign = -1.0;
    loop {
        let term = sign * power / k;
        sum += term;
        if term.abs() <= EPS * sum.abs() {
            break;
        }
        power *= t;
        sign = -sign;
        k += 1.0;
    }
    sum
}

/// `x^a e^-x / Γ(a)`, formed in a way that stays accurate for large `a`.
fn gamma_prefix(a: f64, x: f64) -> f64 {
    if a < 10.0 {
        (a * x.ln() - x - ln_gamma(a)).exp()
    } else {
        let t = (x - a) / a;
        (a * log1pmx(t) + 0.5 * (a / (2.0 * PI)).ln() - stirling_tail(a)).exp()
    }
}

fn lower_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut n = 1.0;
    for _ in 0..MAX_ITER {
        term *= x / (a + n);
        sum += term;
        if term < sum * EPS {
            break;
        }
        n += 1.0;
    }
    sum * gamma_prefix(a, x)
}

fn upper_fraction(a: f64, x: f64) -> f64 {
    // modified Lentz
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h * gamma_prefix(a, x)
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        lower_series(a, x).min(1.0)
    } else {
        (1.0 - upper_fraction(a, x)).clamp(0.0, 1.0)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        (1.0 - lower_series(a, x)).clamp(0.0, 1.0)
    } else {
        upper_fraction(a, x).min(1.0)
    }
}

/// Right-tail p-value `P(χ²_df >= x)`.
pub fn chi2_pvalue(x: f64, df: u32) -> f64 {
    assert!(df >= 1, "chi-square needs at least one degree of freedom");
    if x <= 0.0 {
        return 1.0;
    }
    gamma_q(df as f64 / 2.0, x / 2.0)
}

/// `(P(X <= observed), P(X >= observed))` for `X ~ Poisson(lambda)`.
pub fn poisson_two_sided_pvalue(observed: u64, lambda: f64) -> (f64, f64) {
    assert!(lambda > 0.0, "Poisson mean must be positive");
    let k = observed as f64;
    let left = gamma_q(k + 1.0, lambda);
    let right = if observed == 0 {
        1.0
    } else {
        gamma_p(k, lambda)
    };
    (left, right)
}

/// `P(X = observed)` for `X ~ Poisson(lambda)`.
pub fn poisson_pmf(observed: u64, lambda: f64) -> f64 {
    let k = observed as f64;
    (k * lambda.ln() - lambda - ln_gamma(k + 1.0)).exp()
}

/// Mid-p value `P(X > x) + P(X = x)/2` of a discrete statistic, from its
/// tails `left = P(X <= x)`, `right = P(X >= x)` and the atom `P(X = x)`.
/// The smaller tail is used directly so extreme values keep their
/// precision.
pub fn mid_pvalue(left: f64, right: f64, atom: f64) -> f64 {
    if right <= left {
        (right - 0.5 * atom).max(0.0)
    } else {
        (1.0 - (left - 0.5 * atom)).min(1.0)
    }
}

/// Survival function of the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        let y = -PI * PI / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for j in 1..=20 {
            let odd = (2 * j - 1) as f64;
            sum += (odd * odd * y).exp();
        }
        (1.0 - (2.0 * PI).sqrt() / lambda * sum).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        let mut sign = 1.0;
        for j in 1..=100 {
            let jf = j as f64;
            let term = (-2.0 * jf * jf * lambda * lambda).exp();
            sum += sign * term;
            if term < 1e-300 {
                break;
            }
            sign = -sign;
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// Kolmogorov–Smirnov statistic `D` of samples against Uniform[0, 1].
pub fn ks_statistic(samples: &[f64]) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let lo = u - i as f64 / n;
            let hi = (i + 1) as f64 / n - u;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

/// Two-sided KS p-value against Uniform[0, 1], using the asymptotic
/// Kolmogorov law with Stephens' small-sample correction.
pub fn ks_uniform_pvalue(samples: &[f64]) -> f64 {
    assert!(samples.len() >= 10, "KS needs at least 10 samples");
    let d = ks_statistic(samples);
    let sqrt_n = (samples.len() as f64).sqrt();
    kolmogorov_sf((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)
}

/// Chi-square statistic after merging adjacent cells, in ascending index
/// order, until every expected count reaches 5. A short final group is
/// folded into the one before it. Returns `(statistic, degrees of freedom)`;
/// `None` when fewer than two groups remain.
pub fn chi2_merged(observed: &[u64], expected: &[f64]) -> Option<(f64, u32)> {
    assert_eq!(observed.len(), expected.len());
    let mut groups: Vec<(f64, f64)> = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for (&o, &e) in observed.iter().zip(expected) {
        o_acc += o as f64;
        e_acc += e;
        if e_acc >= 5.0 {
            groups.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if o_acc > 0.0 || e_acc > 0.0 {
        match groups.last_mut() {
            Some(last) => {
                last.0 += o_acc;
                last.1 += e_acc;
            }
            None => groups.push((o_acc, e_acc)),
        }
    }
    if groups.len() < 2 {
        return None;
    }
    let stat = groups.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    Some((stat, groups.len() as u32 - 1))
}
