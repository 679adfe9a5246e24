//! Plain integer versions of the kernels, for checking the array datapaths.
//! Same quantization rules, no gates.

use crate::error::Result;

use super::fft::{twiddle_sequence, FftConfig};
use super::fir::FirConfig;
use super::{ComplexSample, FixedSample};

fn clamp(v: i64, bits: u32) -> i64 {
    let max = (1i64 << bits) - 1;
    v.clamp(-max, max)
}

/// Product of two signed values with the magnitude truncated by `shift`.
fn scaled_mul(x: i64, y: i64, shift: u32) -> i64 {
    let p = x * y;
    p.signum() * (p.abs() >> shift)
}

pub fn reference_fir(cfg: &FirConfig, samples: &[FixedSample]) -> Result<Vec<FixedSample>> {
    let c: Vec<i64> = cfg.taps()?.iter().map(|s| s.to_i64()).collect();
    let acc = cfg.acc_bits()?;
    let mut hist = [0i64; 4];
    let mut out = Vec::with_capacity(samples.len());
    for s in samples {
        let x = s.check_width(cfg.plan.operand_bits())?.to_i64();
        hist = [x, hist[0], hist[1], hist[2]];
        let left = clamp(c[0] * hist[0] + c[1] * hist[1], acc);
        let right = clamp(c[2] * hist[2] + c[3] * hist[3], acc);
        out.push(FixedSample::from_i64(clamp(left + right, acc)));
    }
    Ok(out)
}

pub fn reference_fft4_stream(cfg: &FftConfig, vectors: &[[ComplexSample; 4]]) -> Result<Vec<[ComplexSample; 4]>> {
    let bits = cfg.plan.operand_bits();
    let acc = cfg.acc_bits()?;
    let frac = cfg.plan.frac_bits();
    let op_max = (1i64 << bits) - 1;

    let add = |a: (i64, i64), b: (i64, i64)| (clamp(a.0 + b.0, acc), clamp(a.1 + b.1, acc));
    let sub = |a: (i64, i64), b: (i64, i64)| (clamp(a.0 - b.0, acc), clamp(a.1 - b.1, acc));
    let mul = |a: (i64, i64), w: (i64, i64)| {
        let (ar, ai) = (a.0.clamp(-op_max, op_max), a.1.clamp(-op_max, op_max));
        let re = scaled_mul(w.0, ar, frac) - scaled_mul(w.1, ai, frac);
        let im = scaled_mul(w.0, ai, frac) + scaled_mul(w.1, ar, frac);
        (clamp(re, acc), clamp(im, acc))
    };

    let twiddles = twiddle_sequence(cfg, vectors.len());
    let mut out = Vec::with_capacity(vectors.len());
    for (v, tw) in vectors.iter().zip(twiddles) {
        let mut x = [(0, 0); 4];
        for (slot, c) in x.iter_mut().zip(v) {
            *slot = c.check_width(bits)?.to_i64();
        }
        for w in [tw.w0, tw.w1] {
            w.check_width(bits)?;
        }
        let (a0, a1) = (add(x[0], x[2]), sub(x[0], x[2]));
        let (a2, a3) = (add(x[1], x[3]), sub(x[1], x[3]));
        let b2 = mul(a2, tw.w0.to_i64());
        let b3 = mul(a3, tw.w1.to_i64());
        let bins = [add(a0, b2), add(a1, b3), sub(a0, b2), sub(a1, b3)];
        out.push(bins.map(|(re, im)| ComplexSample::new(re, im)));
    }
    Ok(out)
}

pub fn reference_fft4(cfg: &FftConfig, x: [ComplexSample; 4]) -> Result<[ComplexSample; 4]> {
    Ok(reference_fft4_stream(cfg, &[x])?[0])
}
