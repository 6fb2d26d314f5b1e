//! Browser bindings for a few mt-streams operations.

use mt_streams::mt::MtState;
use mt_streams::partition::overlap_probability;
use mt_streams::stats::complexity::linear_complexity_profile;
use mt_streams::stats::walk::{walk_null, walk_stats};
use wasm_bindgen::prelude::*;

/// Overlap probability for `streams` substreams of `2^e` draws,
/// `e = 0..=max_log2_length`.
#[wasm_bindgen]
pub fn overlap_curve(period_log2: u32, streams: u32, max_log2_length: u32) -> Vec<f64> {
    (0..=max_log2_length.min(63))
        .map(|e| overlap_probability(period_log2, streams as u64, 1u64 << e))
        .collect()
}

fn output_bits(seed: u32, bit_offset: u32, n_bits: usize) -> Vec<u8> {
    let mut mt = MtState::init_genrand(seed);
    let shift = 31 - bit_offset.min(31);
    (0..n_bits)
        .map(|_| (mt.next_u32() >> shift & 1) as u8)
        .collect()
}

/// Linear complexity of each prefix of one output bit of the indexed
/// status `seed`, sampled every `stride` bits.
#[wasm_bindgen]
pub fn complexity_profile(seed: u32, bit_offset: u32, n_bits: u32, stride: u32) -> Vec<u32> {
    let bits = output_bits(seed, bit_offset, n_bits as usize);
    linear_complexity_profile(&bits)
        .into_iter()
        .step_by(stride.max(1) as usize)
        .map(|l| l as u32)
        .collect()
}

/// Null law of the walk maximum followed by the observed frequencies over
/// `walks` walks of `steps` steps from the indexed status `seed`; both
/// halves have `steps + 1` entries.
#[wasm_bindgen]
pub fn walk_maximum(seed: u32, walks: u32, steps: u32) -> Vec<f64> {
    let steps = (steps.clamp(2, 512) / 2 * 2) as usize;
    let null = walk_null(steps);
    let mut mt = MtState::init_genrand(seed);
    let mut counts = vec![0u64; steps + 1];
    let mut word = 0u32;
    let mut left = 0;
    for _ in 0..walks {
        let bits = (0..steps).map(|_| {
            if left == 0 {
                word = mt.next_u32();
                left = 32;
            }
            left -= 1;
            (word >> left & 1) as u8
        });
        counts[walk_stats(bits).m] += 1;
    }
    let total = walks.max(1) as f64;
    null.m
        .into_iter()
        .chain(counts.into_iter().map(|c| c as f64 / total))
        .collect()
}
