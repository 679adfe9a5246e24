//! Fixed-point DSP kernels whose multiplications run on the array.
//!
//! Samples are sign-magnitude: the array multiplies magnitudes and the sign
//! is an XOR outside it. Additions go through gate-level CMOS ripple-carry
//! adders so that their switching is charged like the multiplier's.
//!
//! Two datapath modes share the same hardware. `Full8` runs one 8x8
//! product per array invocation. `Split44` configures the array as two 4-bit
//! segments and issues two products per invocation on 4-bit operands; the
//! accumulator narrows to 8 bits with the adder carry chains cut to match.

mod bench;
mod datapath;
mod fft;
mod fir;
pub mod reference;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bench::{
    bench_fft, bench_fft_on, bench_fir, bench_fir_on, BenchReport, FftBench, FftWorkload, FirBench, FirWorkload,
    FFT_BENCH_VECTORS, FIR_BENCH_SAMPLES,
};
pub use datapath::{ripple_adder, AdderUnit, RegisterBank, MAX_ACC_BITS};
pub use fft::{fft4, fft4_stream, twiddle_sequence, FftConfig, FftOutput, TwiddleMode, Twiddles};
pub use fir::{fir_filter, FirConfig, FirOutput, TAPS};

/// Array width of the DSP datapath.
pub const DATAPATH_BITS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DspPlan {
    #[serde(rename = "8")]
    Full8,
    #[serde(rename = "4+4")]
    Split44,
}

impl DspPlan {
    pub fn label(self) -> &'static str {
        match self {
            DspPlan::Full8 => "8",
            DspPlan::Split44 => "4+4",
        }
    }

    pub fn from_label(s: &str) -> Option<DspPlan> {
        match s {
            "8" => Some(DspPlan::Full8),
            "4+4" => Some(DspPlan::Split44),
            _ => None,
        }
    }

    pub fn widths(self) -> &'static [usize] {
        match self {
            DspPlan::Full8 => &[8],
            DspPlan::Split44 => &[4, 4],
        }
    }

    /// Operand magnitude bits.
    pub fn operand_bits(self) -> u32 {
        match self {
            DspPlan::Full8 => 8,
            DspPlan::Split44 => 4,
        }
    }

    /// Default accumulator magnitude bits; results saturate to
    /// `±(2^acc - 1)`.
    pub fn acc_bits(self) -> u32 {
        2 * self.operand_bits()
    }

    /// Fraction bits of the twiddle format.
    pub fn frac_bits(self) -> u32 {
        self.operand_bits() - 1
    }

    /// Products per array invocation.
    pub fn lanes(self) -> usize {
        self.widths().len()
    }

    pub fn max_operand(self) -> u64 {
        (1 << self.operand_bits()) - 1
    }
}

impl std::fmt::Display for DspPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Sign-magnitude sample. Zero is always non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FixedSample {
    pub negative: bool,
    pub magnitude: u64,
}

impl FixedSample {
    pub const ZERO: FixedSample = FixedSample {
        negative: false,
        magnitude: 0,
    };

    pub fn new(negative: bool, magnitude: u64) -> Self {
        FixedSample {
            negative: negative && magnitude != 0,
            magnitude,
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::new(v < 0, v.unsigned_abs())
    }

    pub fn to_i64(self) -> i64 {
        let m = self.magnitude as i64;
        if self.negative {
            -m
        } else {
            m
        }
    }

    /// Rejects magnitudes that need more than `width` bits.
    pub fn check_width(self, width: u32) -> Result<Self> {
        if width < 64 && self.magnitude >> width != 0 {
            return Err(Error::SampleOverflow {
                magnitude: self.magnitude,
                width,
            });
        }
        Ok(self)
    }

    /// Clamps the magnitude to `max`.
    pub fn saturate(self, max: u64) -> Self {
        Self::new(self.negative, self.magnitude.min(max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ComplexSample {
    pub re: FixedSample,
    pub im: FixedSample,
}

impl ComplexSample {
    pub fn new(re: i64, im: i64) -> Self {
        ComplexSample {
            re: FixedSample::from_i64(re),
            im: FixedSample::from_i64(im),
        }
    }

    pub fn to_i64(self) -> (i64, i64) {
        (self.re.to_i64(), self.im.to_i64())
    }

    pub fn check_width(self, width: u32) -> Result<Self> {
        self.re.check_width(width)?;
        self.im.check_width(width)?;
        Ok(self)
    }
}

/// Drops the low `bits` of the magnitude, keeping the sign.
impl std::ops::Shr<u32> for FixedSample {
    type Output = Self;

    fn shr(self, bits: u32) -> Self {
        Self::new(self.negative, self.magnitude >> bits)
    }
}

impl std::ops::Shr<u32> for ComplexSample {
    type Output = Self;

    fn shr(self, bits: u32) -> Self {
        ComplexSample {
            re: self.re >> bits,
            im: self.im >> bits,
        }
    }
}
