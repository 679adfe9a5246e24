use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{reference, CostModel, CostReport};
use crate::error::Result;

use super::fft::{fft4_stream, FftConfig, TwiddleMode};
use super::fir::{fir_filter, FirConfig, TAPS};
use super::{ComplexSample, DspPlan, FixedSample, DATAPATH_BITS};

pub const FIR_BENCH_SAMPLES: usize = 1000;
pub const FFT_BENCH_VECTORS: usize = 1000;

/// 8-bit and 4+4 runs of one kernel on the same workload. The 4+4 run sees
/// the 8-bit workload with the low four bits of every magnitude dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub kernel: String,
    pub items: usize,
    pub full8: CostReport,
    /// Carries `ratios` against `full8` and the published ratios.
    pub split44: CostReport,
    pub saturations_full8: usize,
    pub saturations_split44: usize,
}

impl BenchReport {
    /// Whether the 4+4 mode beats the 8-bit mode on delay and power.
    pub fn split_wins(&self) -> bool {
        self.split44.delay_s < self.full8.delay_s && self.split44.avg_power_w < self.full8.avg_power_w
    }
}

fn narrow(plan: DspPlan) -> u32 {
    DATAPATH_BITS as u32 - plan.operand_bits()
}

fn sample8(rng: &mut ChaCha8Rng) -> FixedSample {
    FixedSample::new(rng.gen(), rng.gen_range(0..=255))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirWorkload {
    /// 8-bit signed coefficients.
    pub coefficients: Vec<i64>,
    /// 8-bit samples.
    pub samples: Vec<FixedSample>,
}

impl FirWorkload {
    pub fn random(seed: u64, samples: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coefficients = (0..TAPS).map(|_| sample8(&mut rng).to_i64()).collect();
        let samples = (0..samples).map(|_| sample8(&mut rng)).collect();
        FirWorkload { coefficients, samples }
    }

    pub fn validate(&self) -> Result<()> {
        FirConfig::new(self.coefficients.clone(), DspPlan::Full8).taps()?;
        for s in &self.samples {
            s.check_width(DATAPATH_BITS as u32)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FftWorkload {
    /// 8-bit complex input vectors.
    pub vectors: Vec<[ComplexSample; 4]>,
    pub twiddles: TwiddleMode,
}

impl FftWorkload {
    /// Random inputs and random twiddles, both derived from `seed`.
    pub fn random(seed: u64, vectors: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vectors = (0..vectors)
            .map(|_| {
                std::array::from_fn(|_| ComplexSample {
                    re: sample8(&mut rng),
                    im: sample8(&mut rng),
                })
            })
            .collect();
        FftWorkload {
            vectors,
            twiddles: TwiddleMode::Random { seed: rng.gen() },
        }
    }

    pub fn validate(&self) -> Result<()> {
        for v in &self.vectors {
            for c in v {
                c.check_width(DATAPATH_BITS as u32)?;
            }
        }
        Ok(())
    }
}

/// Outputs of both modes next to the cost comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct FirBench {
    pub report: BenchReport,
    pub full8: Vec<FixedSample>,
    pub split44: Vec<FixedSample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FftBench {
    pub report: BenchReport,
    pub full8: Vec<[ComplexSample; 4]>,
    pub split44: Vec<[ComplexSample; 4]>,
}

pub fn bench_fir_on(model: &CostModel, work: &FirWorkload, sample_rate_hz: f64) -> Result<FirBench> {
    work.validate()?;
    let run = |plan: DspPlan| {
        let drop = narrow(plan);
        let coeffs = work
            .coefficients
            .iter()
            .map(|&c| (FixedSample::from_i64(c) >> drop).to_i64())
            .collect();
        let cfg = FirConfig {
            sample_rate_hz,
            ..FirConfig::new(coeffs, plan)
        };
        let xs: Vec<_> = work.samples.iter().map(|&x| x >> drop).collect();
        fir_filter(&cfg, &xs, model)
    };
    let full = run(DspPlan::Full8)?;
    let split = run(DspPlan::Split44)?;
    let report = BenchReport {
        kernel: "fir".into(),
        items: work.samples.len(),
        split44: split.cost.compared_to(&full.cost, Some(reference::FIR_4P4_VS_8))?,
        full8: full.cost,
        saturations_full8: full.saturations,
        saturations_split44: split.saturations,
    };
    Ok(FirBench {
        report,
        full8: full.outputs,
        split44: split.outputs,
    })
}

pub fn bench_fft_on(model: &CostModel, work: &FftWorkload, sample_rate_hz: f64) -> Result<FftBench> {
    work.validate()?;
    let run = |plan: DspPlan| {
        let drop = narrow(plan);
        let cfg = FftConfig {
            sample_rate_hz,
            ..FftConfig::new(plan, work.twiddles)
        };
        let xs: Vec<_> = work.vectors.iter().map(|v| v.map(|c| c >> drop)).collect();
        fft4_stream(&cfg, &xs, model)
    };
    let full = run(DspPlan::Full8)?;
    let split = run(DspPlan::Split44)?;
    let report = BenchReport {
        kernel: "fft4".into(),
        items: work.vectors.len(),
        split44: split.cost.compared_to(&full.cost, Some(reference::FFT_4P4_VS_8))?,
        full8: full.cost,
        saturations_full8: full.saturations,
        saturations_split44: split.saturations,
    };
    Ok(FftBench {
        report,
        full8: full.bins,
        split44: split.bins,
    })
}

/// Seeded random FIR comparison at 100 MHz.
pub fn bench_fir(model: &CostModel, seed: u64, samples: usize) -> Result<BenchReport> {
    Ok(bench_fir_on(model, &FirWorkload::random(seed, samples), 100e6)?.report)
}

/// Seeded random FFT comparison at 100 MHz.
pub fn bench_fft(model: &CostModel, seed: u64, vectors: usize) -> Result<BenchReport> {
    Ok(bench_fft_on(model, &FftWorkload::random(seed, vectors), 100e6)?.report)
}
