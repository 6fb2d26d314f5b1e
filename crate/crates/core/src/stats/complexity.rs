//! Linear complexity via Berlekamp–Massey, and the LinearComp test.
//!
//! Every output bit of an F2-linear generator satisfies the generator's
//! characteristic recurrence, so its linear complexity can never exceed the
//! state dimension (19937 for MT19937). A random sequence of length `n` has
//! complexity close to `n/2`; comparing the two exposes the linearity.

use super::pvalue::mid_pvalue;
use super::stream::{StreamView, WordSource};
use crate::error::{Error, Result};

/// Bits packed LSB-first into 64-bit words.
struct PackedBits {
    words: Vec<u64>,
}

impl PackedBits {
    fn zeros(bits: usize) -> Self {
        Self {
            words: vec![0; bits / 64 + 2],
        }
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    /// 64 bits starting at bit `pos`.
    #[inline]
    fn window(&self, pos: usize) -> u64 {
        let (w, b) = (pos / 64, pos % 64);
        let lo = self.words[w] >> b;
        if b == 0 {
            lo
        } else {
            lo | self.words.get(w + 1).map_or(0, |&hi| hi << (64 - b))
        }
    }

    /// `self ^= other << shift`, touching only the first `other_words` words of `other`.
    fn xor_shifted(&mut self, other: &PackedBits, other_words: usize, shift: usize) {
        let (ws, bs) = (shift / 64, shift % 64);
        for i in 0..other_words {
            let w = other.words[i];
            if w == 0 {
                continue;
            }
            let dst = i + ws;
            if dst >= self.words.len() {
                break;
            }
            self.words[dst] ^= w << bs;
            if bs > 0 && dst + 1 < self.words.len() {
                self.words[dst + 1] ^= w >> (64 - bs);
            }
        }
    }
}

/// Runs Berlekamp–Massey over `bits` (each 0 or 1), calling `observe` with
/// the linear complexity of every prefix. Returns the final complexity.
fn run_bm(bits: &[u8], mut observe: impl FnMut(usize)) -> usize {
    let n = bits.len();
    // reversed[j] = bits[n - 1 - j], so the taps of step t line up with a
    // forward window starting at n - 1 - t.
    let mut reversed = PackedBits::zeros(n + 64);
    for (i, &b) in bits.iter().enumerate() {
        if b & 1 == 1 {
            reversed.set(n - 1 - i);
        }
    }
    let mut conn = PackedBits::zeros(n + 64);
    let mut prev = PackedBits::zeros(n + 64);
    let mut scratch = vec![0u64; conn.words.len()];
    conn.set(0);
    prev.set(0);
    let mut l = 0usize;
    let mut prev_l = 0usize;
    let mut gap = 1usize;

    for t in 0..n {
        let base = n - 1 - t;
        let full_words = (l + 1) / 64;
        let mut acc = 0u64;
        for w in 0..full_words {
            acc ^= conn.words[w] & reversed.window(base + 64 * w);
        }
        let rem = (l + 1) % 64;
        if rem > 0 {
            let mask = (1u64 << rem) - 1;
            acc ^= conn.words[full_words] & reversed.window(base + 64 * full_words) & mask;
        }
        let discrepancy = acc.count_ones() & 1;

        if discrepancy == 0 {
            gap += 1;
        } else if 2 * l <= t {
            let len = conn.words.len();
            let keep = (l / 64 + 2).min(len);
            scratch[..keep].copy_from_slice(&conn.words[..keep]);
            conn.xor_shifted(&prev, prev_l / 64 + 1, gap);
            let new_l = t + 1 - l;
            let stale = (prev_l / 64 + 2).min(len);
            prev.words[..keep].copy_from_slice(&scratch[..keep]);
            if stale > keep {
                prev.words[keep..stale].fill(0);
            }
            prev_l = l;
            l = new_l;
            gap = 1;
        } else {
            conn.xor_shifted(&prev, prev_l / 64 + 1, gap);
            gap += 1;
        }
        observe(l);
    }
    l
}

/// Length of the shortest LFSR generating `bits`.
pub fn berlekamp_massey(bits: &[u8]) -> usize {
    run_bm(bits, |_| {})
}

/// Linear complexity of every prefix of `bits`.
pub fn linear_complexity_profile(bits: &[u8]) -> Vec<usize> {
    let mut out = Vec::with_capacity(bits.len());
    run_bm(bits, |l| out.push(l));
    out
}

/// `P(L_n = l)` for a uniformly random sequence of `n` bits.
pub fn complexity_probability(n: usize, l: usize) -> f64 {
    if l > n {
        return 0.0;
    }
    if l == 0 {
        return (-(n as f64)).exp2();
    }
    let exponent = (2 * n - 2 * l).min(2 * l - 1) as f64 - n as f64;
    exponent.exp2()
}

/// `(P(L_n <= l), P(L_n >= l))` under the random-sequence null.
pub fn complexity_tails(n: usize, l: usize) -> (f64, f64) {
    let left: f64 = (0..=l.min(n)).map(|j| complexity_probability(n, j)).sum();
    let right: f64 = (l..=n).map(|j| complexity_probability(n, j)).sum();
    (left.min(1.0), right.min(1.0))
}

/// Linear complexity of bit `bit_offset` (0 = most significant) of the next
/// `n_bits` outputs.
pub fn stream_complexity<S: WordSource>(
    view: &mut StreamView<S>,
    n_bits: usize,
    bit_offset: u32,
) -> usize {
    let shift = 31 - bit_offset;
    let bits: Vec<u8> = (0..n_bits)
        .map(|_| ((view.next_bits32() >> shift) & 1) as u8)
        .collect();
    berlekamp_massey(&bits)
}

pub fn validate(n_bits: usize, bit_offset: u32) -> Result<()> {
    if n_bits < 1000 {
        return Err(Error::Params(format!(
            "LinearComp needs n_bits >= 1000, got {n_bits}"
        )));
    }
    if bit_offset > 31 {
        return Err(Error::Params(format!(
            "bit_offset {bit_offset} outside 0..=31"
        )));
    }
    Ok(())
}

/// LinearComp: complexity of one bit lane against its exact null law.
pub fn linear_comp_test<S: WordSource>(
    view: &mut StreamView<S>,
    n_bits: usize,
    bit_offset: u32,
) -> Result<Vec<(String, f64)>> {
    validate(n_bits, bit_offset)?;
    let l = stream_complexity(view, n_bits, bit_offset);
    let (left, right) = complexity_tails(n_bits, l);
    let atom = complexity_probability(n_bits, l);
    Ok(vec![(
        "saturation".to_string(),
        mid_pvalue(left, right, atom),
    )])
}
