use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::mt::{to_unit_real, MtState};

/// Anything that emits 32-bit words.
pub trait WordSource {
    fn next_word(&mut self) -> u32;
}

impl WordSource for MtState {
    #[inline]
    fn next_word(&mut self) -> u32 {
        self.next_u32()
    }
}

/// How a test consumes the generator.
///
/// `Int` reads raw 32-bit outputs and derives uniforms from them; `Real`
/// reads binary64 uniforms and derives bits from `floor(u * 2^32)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Int,
    Real,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Int => "int",
            Mode::Real => "real",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "int" => Ok(Mode::Int),
            "real" => Ok(Mode::Real),
            other => Err(Error::Params(format!("unknown mode `{other}`"))),
        }
    }
}

/// A cursor over a generator, in one of the two consumption modes.
#[derive(Debug, Clone)]
pub struct StreamView<S = MtState> {
    source: S,
    mode: Mode,
    draws: u64,
    bit_word: u32,
    bits_left: u32,
}

impl<S: WordSource> StreamView<S> {
    pub fn new(source: S, mode: Mode) -> Self {
        Self {
            source,
            mode,
            draws: 0,
            bit_word: 0,
            bits_left: 0,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Number of generator outputs consumed so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        self.draws += 1;
        to_unit_real(self.source.next_word())
    }

    /// Next 32 bits of the stream, most significant first.
    #[inline]
    pub fn next_bits32(&mut self) -> u32 {
        match self.mode {
            Mode::Int => {
                self.draws += 1;
                self.source.next_word()
            }
            Mode::Real => {
                let u = self.next_uniform();
                (u * 4_294_967_296.0).floor() as u32
            }
        }
    }

    /// One bit of a continuous MSB-first bit stream.
    #[inline]
    pub fn next_bit(&mut self) -> u8 {
        if self.bits_left == 0 {
            self.bit_word = self.next_bits32();
            self.bits_left = 32;
        }
        self.bits_left -= 1;
        ((self.bit_word >> self.bits_left) & 1) as u8
    }
}
