use serde::{Deserialize, Serialize};

use crate::cost::{CostModel, CostReport};
use crate::error::{Error, Result};

use super::datapath::{adder_width, check_acc_bits, sat_add, AdderUnit, MultUnit, RegisterBank, MAX_ACC_BITS};
use super::{DspPlan, FixedSample, DATAPATH_BITS};

pub const TAPS: usize = 4;

/// Four-tap direct-form FIR, `y[k] = sum c[t] * x[k - t]`.
///
/// The two tap pairs are summed first and the pair sums second, saturating
/// to the accumulator range after every addition. There is no fractional
/// rescaling of the output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirConfig {
    /// Signed coefficients, magnitudes within the mode's operand width.
    pub coefficients: Vec<i64>,
    pub plan: DspPlan,
    /// Saturation width of every addition, in magnitude bits. Defaults to
    /// twice the operand width (16 in 8-bit mode, 8 in 4+4).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acc_bits: Option<u32>,
    /// One output per clock at this rate.
    #[serde(default = "default_rate")]
    pub sample_rate_hz: f64,
}

pub(crate) fn default_rate() -> f64 {
    100e6
}

pub(crate) fn check_rate(hz: f64) -> Result<()> {
    if hz > 0.0 && hz.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTechConstants(format!("sample_rate_hz must be positive, got {hz}")))
    }
}

impl FirConfig {
    pub fn new(coefficients: Vec<i64>, plan: DspPlan) -> Self {
        FirConfig {
            coefficients,
            plan,
            acc_bits: None,
            sample_rate_hz: default_rate(),
        }
    }

    /// Effective saturation width.
    pub fn acc_bits(&self) -> Result<u32> {
        check_acc_bits(self.acc_bits, self.plan)
    }

    /// Coefficients as samples, checked against the mode's operand width.
    pub fn taps(&self) -> Result<[FixedSample; TAPS]> {
        check_rate(self.sample_rate_hz)?;
        self.acc_bits()?;
        if self.coefficients.len() != TAPS {
            return Err(Error::TapCount(self.coefficients.len()));
        }
        let mut out = [FixedSample::ZERO; TAPS];
        for (slot, &c) in out.iter_mut().zip(&self.coefficients) {
            *slot = FixedSample::from_i64(c).check_width(self.plan.operand_bits())?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirOutput {
    pub outputs: Vec<FixedSample>,
    /// Additions that hit the accumulator limit.
    pub saturations: usize,
    pub cost: CostReport,
}

struct Fir {
    plan: DspPlan,
    max: i64,
    coeffs: [FixedSample; TAPS],
    line: [FixedSample; TAPS],
    mults: Vec<MultUnit>,
    adders: [AdderUnit; 3],
    line_regs: Vec<RegisterBank>,
    out_reg: RegisterBank,
    saturations: usize,
}

impl Fir {
    fn new(cfg: &FirConfig, model: &CostModel) -> Result<Self> {
        let plan = cfg.plan;
        let units = TAPS / plan.lanes();
        let reg = model.tech().register;
        let sample_bits = DATAPATH_BITS as u32 + 1;
        let coeffs = cfg.taps()?;
        let acc = cfg.acc_bits()?;
        Ok(Fir {
            plan,
            max: (1 << acc) - 1,
            coeffs,
            line: [FixedSample::ZERO; TAPS],
            mults: (0..units).map(|_| MultUnit::new(plan, model)).collect::<Result<_>>()?,
            adders: std::array::from_fn(|_| AdderUnit::new(adder_width(acc), model)),
            line_regs: (0..TAPS).map(|_| RegisterBank::new(sample_bits, reg)).collect(),
            out_reg: RegisterBank::new(MAX_ACC_BITS + 1, reg),
            saturations: 0,
        })
    }

    fn push(&mut self, x: FixedSample) -> Result<FixedSample> {
        let x = x.check_width(self.plan.operand_bits())?;
        self.line.rotate_right(1);
        self.line[0] = x;
        for (r, &s) in self.line_regs.iter_mut().zip(&self.line) {
            r.clock_sample(s);
        }

        let pairs: Vec<_> = self.coeffs.iter().copied().zip(self.line).collect();
        let mut products = Vec::with_capacity(TAPS);
        for (unit, chunk) in self.mults.iter_mut().zip(pairs.chunks(self.plan.lanes())) {
            products.extend(unit.multiply(chunk)?);
        }
        let p: Vec<i64> = products.iter().map(|s| s.to_i64()).collect();

        let max = self.max;
        let [a0, a1, a2] = &mut self.adders;
        let (s01, f0) = sat_add(a0, p[0], p[1], max);
        let (s23, f1) = sat_add(a1, p[2], p[3], max);
        let (y, f2) = sat_add(a2, s01, s23, max);
        self.saturations += f0 as usize + f1 as usize + f2 as usize;

        let y = FixedSample::from_i64(y);
        self.out_reg.clock_sample(y);
        Ok(y)
    }

    fn report(&self, cfg: &FirConfig, outputs: usize, model: &CostModel) -> CostReport {
        let reg = model.tech().register;
        let delay = reg.delay + self.mults[0].delay() + 2.0 * self.adders[0].delay();
        let energy = self.mults.iter().map(MultUnit::energy).sum::<f64>()
            + self.adders.iter().map(AdderUnit::energy).sum::<f64>()
            + self.line_regs.iter().map(RegisterBank::energy).sum::<f64>()
            + self.out_reg.energy();
        let power = if outputs == 0 {
            0.0
        } else {
            energy * cfg.sample_rate_hz / outputs as f64
        };
        let (area, gates) = hardware(model);
        CostReport::new(delay, energy, power, area, gates)
    }
}

/// Area and gate count of the physical datapath, which is the same in both
/// modes: four arrays, three full-width adders and the registers.
fn hardware(model: &CostModel) -> (f64, usize) {
    let reg = model.tech().register;
    let mult = MultUnit::new(DspPlan::Full8, model).expect("8-bit plan is valid");
    let adder = AdderUnit::new(adder_width(MAX_ACC_BITS), model);
    let line = RegisterBank::new(DATAPATH_BITS as u32 + 1, reg);
    let out = RegisterBank::new(MAX_ACC_BITS + 1, reg);
    let area = TAPS as f64 * mult.area() + 3.0 * adder.area() + TAPS as f64 * line.area() + out.area();
    let gates = TAPS * mult.gate_count() + 3 * adder.gate_count();
    (area, gates)
}

/// Filters `samples` from a zeroed delay line, one output per input.
pub fn fir_filter(cfg: &FirConfig, samples: &[FixedSample], model: &CostModel) -> Result<FirOutput> {
    let mut fir = Fir::new(cfg, model)?;
    let outputs = samples.iter().map(|&x| fir.push(x)).collect::<Result<Vec<_>>>()?;
    let cost = fir.report(cfg, outputs.len(), model);
    Ok(FirOutput {
        saturations: fir.saturations,
        outputs,
        cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(coeffs: [i64; 4], plan: DspPlan, xs: &[i64]) -> Vec<i64> {
        let cfg = FirConfig::new(coeffs.to_vec(), plan);
        let xs: Vec<_> = xs.iter().map(|&v| FixedSample::from_i64(v)).collect();
        fir_filter(&cfg, &xs, &CostModel::default())
            .unwrap()
            .outputs
            .iter()
            .map(|s| s.to_i64())
            .collect()
    }

    #[test]
    fn impulse_returns_coefficients() {
        let c = [3, -7, 11, -15];
        for plan in [DspPlan::Full8, DspPlan::Split44] {
            assert_eq!(run(c, plan, &[1, 0, 0, 0, 0]), vec![3, -7, 11, -15, 0]);
        }
    }

    #[test]
    fn full_scale_saturates() {
        let out = run([255; 4], DspPlan::Full8, &[255, 255, 255]);
        assert_eq!(out, vec![65025, 65535, 65535]);
        let out = run([-15; 4], DspPlan::Split44, &[15, 15]);
        assert_eq!(out, vec![-225, -255]);
    }

    #[test]
    fn rejects_bad_config() {
        let m = CostModel::default();
        let cfg = FirConfig::new(vec![1, 2, 3], DspPlan::Full8);
        assert_eq!(fir_filter(&cfg, &[], &m).unwrap_err(), Error::TapCount(3));
        let cfg = FirConfig::new(vec![1, 2, 3, 16], DspPlan::Split44);
        assert!(matches!(fir_filter(&cfg, &[], &m), Err(Error::SampleOverflow { .. })));
        let cfg = FirConfig::new(vec![1, 2, 3, 4], DspPlan::Split44);
        let x = [FixedSample::from_i64(16)];
        assert!(matches!(fir_filter(&cfg, &x, &m), Err(Error::SampleOverflow { .. })));
    }

    #[test]
    fn cost_is_populated() {
        let cfg = FirConfig::new(vec![10, 20, 30, 40], DspPlan::Full8);
        let xs: Vec<_> = (0..16).map(|k| FixedSample::from_i64(k * 13 % 200 - 100)).collect();
        let out = fir_filter(&cfg, &xs, &CostModel::default()).unwrap();
        let c = &out.cost;
        assert!(c.delay_s > 0.0 && c.energy_j > 0.0 && c.avg_power_w > 0.0 && c.area_units > 0.0);
        assert!(c.delay_s < 1.0 / cfg.sample_rate_hz);
    }
}
