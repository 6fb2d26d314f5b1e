//! Bit-exact 32-bit Mersenne Twister (MT19937).
//!
//! The generator status is a plain value: 624 words plus a read index.
//! Seeding follows the 2002 `init_genrand` routine, so the output for any
//! 32-bit seed matches the reference `mt19937ar` code word for word.

use crate::error::Error;

/// Number of 32-bit words in the generator status.
pub const STATE_WORDS: usize = 624;
const SHIFT_M: usize = 397;
const MATRIX_A: u32 = 0x9908_b0df;
const UPPER_MASK: u32 = 0x8000_0000;
const LOWER_MASK: u32 = 0x7fff_ffff;
const INIT_MULTIPLIER: u32 = 1_812_433_253;

/// Bytes of word payload in a status (624 x 4).
pub const STATE_PAYLOAD_BYTES: usize = STATE_WORDS * 4;

/// Full MT19937 status: the `mt[]` array and the `mti` index.
///
/// `mti == 624` means the next draw performs a twist first.
#[derive(Clone, PartialEq, Eq)]
pub struct MtState {
    mt: [u32; STATE_WORDS],
    mti: usize,
}

impl std::fmt::Debug for MtState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MtState")
            .field("mt[0..4]", &&self.mt[..4])
            .field("mti", &self.mti)
            .finish()
    }
}

impl MtState {
    /// Builds a status from raw words and an index, rejecting out-of-range
    /// indices and arrays whose recurrence state is zero (a fixed point).
    ///
    /// The recurrence never reads the low 31 bits of `mt[0]`, so only its top
    /// bit counts toward the 19937-bit state.
    pub fn from_parts(mt: [u32; STATE_WORDS], mti: usize) -> Result<Self, Error> {
        if mti > STATE_WORDS {
            return Err(Error::InvalidIndex(mti));
        }
        if mt[0] & UPPER_MASK == 0 && mt[1..].iter().all(|&w| w == 0) {
            return Err(Error::ZeroState);
        }
        Ok(Self { mt, mti })
    }

    /// Seeds the status with the 2002 initialization recurrence.
    pub fn init_genrand(seed: u32) -> Self {
        let mut mt = [0u32; STATE_WORDS];
        mt[0] = seed;
        for i in 1..STATE_WORDS {
            let prev = mt[i - 1];
            mt[i] = INIT_MULTIPLIER
                .wrapping_mul(prev ^ (prev >> 30))
                .wrapping_add(i as u32);
        }
        Self {
            mt,
            mti: STATE_WORDS,
        }
    }

    pub fn words(&self) -> &[u32; STATE_WORDS] {
        &self.mt
    }

    pub fn index(&self) -> usize {
        self.mti
    }

    /// Regenerates all 624 words and resets the index to 0.
    pub fn twist(&mut self) {
        let mt = &mut self.mt;
        for kk in 0..STATE_WORDS {
            let y = (mt[kk] & UPPER_MASK) | (mt[(kk + 1) % STATE_WORDS] & LOWER_MASK);
            let mag = if y & 1 == 1 { MATRIX_A } else { 0 };
            mt[kk] = mt[(kk + SHIFT_M) % STATE_WORDS] ^ (y >> 1) ^ mag;
        }
        self.mti = 0;
    }

    /// Returns the next tempered output (`genrand_int32`).
    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        if self.mti >= STATE_WORDS {
            self.twist();
        }
        let y = self.mt[self.mti];
        self.mti += 1;
        temper(y)
    }

    /// Returns the next output scaled onto [0, 1) by 2^-32.
    #[inline]
    pub fn next_real(&mut self) -> f64 {
        to_unit_real(self.next_u32())
    }

    /// Skips `n` draws. Observably identical to calling `next_u32` `n` times.
    pub fn advance(&mut self, n: u64) {
        let remaining = (STATE_WORDS - self.mti) as u64;
        if n <= remaining {
            self.mti += n as usize;
            return;
        }
        let n = n - remaining;
        let blocks = n / STATE_WORDS as u64;
        let rest = (n % STATE_WORDS as u64) as usize;
        for _ in 0..blocks {
            self.twist();
        }
        self.mti = STATE_WORDS;
        if rest > 0 {
            self.twist();
            self.mti = rest;
        }
    }
}

/// Output tempering: a GF(2)-linear bijection on 32-bit words.
#[inline]
pub fn temper(mut y: u32) -> u32 {
    y ^= y >> 11;
    y ^= (y << 7) & 0x9d2c_5680;
    y ^= (y << 15) & 0xefc6_0000;
    y ^= y >> 18;
    y
}

/// Inverse of [`temper`].
pub fn untemper(mut y: u32) -> u32 {
    y = undo_right_shift_xor(y, 18);
    y = undo_left_shift_xor_and(y, 15, 0xefc6_0000);
    y = undo_left_shift_xor_and(y, 7, 0x9d2c_5680);
    undo_right_shift_xor(y, 11)
}

fn undo_right_shift_xor(y: u32, shift: u32) -> u32 {
    let mut x = y;
    for _ in 0..(32 / shift + 1) {
        x = y ^ (x >> shift);
    }
    x
}

fn undo_left_shift_xor_and(y: u32, shift: u32, mask: u32) -> u32 {
    let mut x = y;
    for _ in 0..(32 / shift + 1) {
        x = y ^ ((x << shift) & mask);
    }
    x
}

/// Maps a 32-bit output onto [0, 1) by exact scaling with 2^-32.
#[inline]
pub fn to_unit_real(x: u32) -> f64 {
    x as f64 * (1.0 / 4_294_967_296.0)
}
