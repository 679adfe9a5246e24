use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{CostModel, CostReport};
use crate::error::Result;

use super::datapath::{adder_width, check_acc_bits, sat_add, AdderUnit, MultUnit, RegisterBank, MAX_ACC_BITS};
use super::fir::{check_rate, default_rate};
use super::{ComplexSample, DspPlan, FixedSample, DATAPATH_BITS};

/// Where the butterfly twiddles come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TwiddleMode {
    /// `W0 = 1`, `W1 = -j` in the mode's Q format.
    Exact,
    /// Fresh random 8-bit twiddles for every input vector, narrowed to the
    /// operand width by dropping low bits.
    Random { seed: u64 },
}

/// Radix-2 decimation-in-time 4-point FFT:
///
/// ```text
/// a0 = x0 + x2   a1 = x0 - x2   a2 = x1 + x3   a3 = x1 - x3
/// X0 = a0 + W0 a2   X2 = a0 - W0 a2   X1 = a1 + W1 a3   X3 = a1 - W1 a3
/// ```
///
/// Multiplier operands saturate to the operand width and each product
/// magnitude drops `frac` low bits. Additions saturate to the accumulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FftConfig {
    pub plan: DspPlan,
    pub twiddles: TwiddleMode,
    /// Saturation width of every addition, in magnitude bits. Defaults to
    /// twice the operand width.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acc_bits: Option<u32>,
    #[serde(default = "default_rate")]
    pub sample_rate_hz: f64,
}

impl FftConfig {
    pub fn new(plan: DspPlan, twiddles: TwiddleMode) -> Self {
        FftConfig {
            plan,
            twiddles,
            acc_bits: None,
            sample_rate_hz: default_rate(),
        }
    }

    /// Effective saturation width.
    pub fn acc_bits(&self) -> Result<u32> {
        check_acc_bits(self.acc_bits, self.plan)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Twiddles {
    pub w0: ComplexSample,
    pub w1: ComplexSample,
}

/// Twiddles for `count` consecutive input vectors.
pub fn twiddle_sequence(cfg: &FftConfig, count: usize) -> Vec<Twiddles> {
    let plan = cfg.plan;
    match cfg.twiddles {
        TwiddleMode::Exact => {
            let one = 1i64 << plan.frac_bits();
            vec![
                Twiddles {
                    w0: ComplexSample::new(one, 0),
                    w1: ComplexSample::new(0, -one),
                };
                count
            ]
        }
        TwiddleMode::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let drop = DATAPATH_BITS as u32 - plan.operand_bits();
            let draw = |rng: &mut ChaCha8Rng| {
                let s = FixedSample::new(rng.gen(), rng.gen_range(0..=255));
                s >> drop
            };
            (0..count)
                .map(|_| {
                    let mut c = || ComplexSample {
                        re: draw(&mut rng),
                        im: draw(&mut rng),
                    };
                    let w0 = c();
                    let w1 = c();
                    Twiddles { w0, w1 }
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FftOutput {
    pub bins: Vec<[ComplexSample; 4]>,
    /// Additions that hit the accumulator limit plus multiplier operands
    /// that were clamped.
    pub saturations: usize,
    pub cost: CostReport,
}

/// Units for one complex multiply: four arrays in 8-bit mode, two in 4+4.
struct ComplexMult {
    units: Vec<MultUnit>,
    adders: [AdderUnit; 2],
}

struct Fft {
    plan: DspPlan,
    max: i64,
    cmul: [ComplexMult; 2],
    stage1: Vec<AdderUnit>,
    stage2: Vec<AdderUnit>,
    in_regs: Vec<RegisterBank>,
    tw_regs: Vec<RegisterBank>,
    out_regs: Vec<RegisterBank>,
    saturations: usize,
}

impl Fft {
    fn new(cfg: &FftConfig, model: &CostModel) -> Result<Self> {
        check_rate(cfg.sample_rate_hz)?;
        let plan = cfg.plan;
        let acc = cfg.acc_bits()?;
        let reg = model.tech().register;
        let adder = || AdderUnit::new(adder_width(acc), model);
        let cmul = || -> Result<ComplexMult> {
            Ok(ComplexMult {
                units: (0..4 / plan.lanes()).map(|_| MultUnit::new(plan, model)).collect::<Result<_>>()?,
                adders: [adder(), adder()],
            })
        };
        let regs = |count: usize, bits: usize| (0..count).map(|_| RegisterBank::new(bits as u32 + 1, reg)).collect();
        Ok(Fft {
            plan,
            max: (1 << acc) - 1,
            cmul: [cmul()?, cmul()?],
            stage1: (0..8).map(|_| adder()).collect(),
            stage2: (0..8).map(|_| adder()).collect(),
            in_regs: regs(8, DATAPATH_BITS),
            tw_regs: regs(4, DATAPATH_BITS),
            out_regs: regs(8, MAX_ACC_BITS as usize),
            saturations: 0,
        })
    }

    fn add(&mut self, stage: usize, k: usize, x: i64, y: i64) -> i64 {
        let max = self.max;
        let adders = if stage == 1 { &mut self.stage1 } else { &mut self.stage2 };
        let (s, sat) = sat_add(&mut adders[k], x, y, max);
        self.saturations += sat as usize;
        s
    }

    /// Complex `a + b` and `a - b` on adders `2k..2k+4` of a stage.
    fn butterfly(&mut self, stage: usize, k: usize, a: (i64, i64), b: (i64, i64)) -> [(i64, i64); 2] {
        [
            (self.add(stage, 2 * k, a.0, b.0), self.add(stage, 2 * k + 1, a.1, b.1)),
            (self.add(stage, 2 * k + 2, a.0, -b.0), self.add(stage, 2 * k + 3, a.1, -b.1)),
        ]
    }

    fn complex_mul(&mut self, which: usize, a: (i64, i64), w: ComplexSample) -> Result<(i64, i64)> {
        let plan = self.plan;
        let limit = plan.max_operand();
        let op = |v: i64, sat: &mut usize| {
            let s = FixedSample::from_i64(v);
            *sat += (s.magnitude > limit) as usize;
            s.saturate(limit)
        };
        let mut sat = 0;
        let (are, aim) = (op(a.0, &mut sat), op(a.1, &mut sat));
        self.saturations += sat;

        // Products in order re*re, im*im, re*im, im*re.
        let pairs = [(w.re, are), (w.im, aim), (w.re, aim), (w.im, are)];
        let max = self.max;
        let cm = &mut self.cmul[which];
        let mut p = Vec::with_capacity(4);
        for (unit, chunk) in cm.units.iter_mut().zip(pairs.chunks(plan.lanes())) {
            p.extend(unit.multiply(chunk)?.into_iter().map(|s| (s >> plan.frac_bits()).to_i64()));
        }
        let (re, s0) = sat_add(&mut cm.adders[0], p[0], -p[1], max);
        let (im, s1) = sat_add(&mut cm.adders[1], p[2], p[3], max);
        self.saturations += s0 as usize + s1 as usize;
        Ok((re, im))
    }

    fn process(&mut self, x: [ComplexSample; 4], tw: Twiddles) -> Result<[ComplexSample; 4]> {
        let bits = self.plan.operand_bits();
        for v in &x {
            v.check_width(bits)?;
        }
        tw.w0.check_width(bits)?;
        tw.w1.check_width(bits)?;
        for (r, s) in self.in_regs.iter_mut().zip(x.iter().flat_map(|c| [c.re, c.im])) {
            r.clock_sample(s);
        }
        for (r, s) in self.tw_regs.iter_mut().zip([tw.w0.re, tw.w0.im, tw.w1.re, tw.w1.im]) {
            r.clock_sample(s);
        }

        let xi: Vec<_> = x.iter().map(|c| c.to_i64()).collect();
        let [a0, a1] = self.butterfly(1, 0, xi[0], xi[2]);
        let [a2, a3] = self.butterfly(1, 2, xi[1], xi[3]);
        let b2 = self.complex_mul(0, a2, tw.w0)?;
        let b3 = self.complex_mul(1, a3, tw.w1)?;
        let [x0, x2] = self.butterfly(2, 0, a0, b2);
        let [x1, x3] = self.butterfly(2, 2, a1, b3);

        let out = [x0, x1, x2, x3].map(|(re, im)| ComplexSample::new(re, im));
        for (r, s) in self.out_regs.iter_mut().zip(out.iter().flat_map(|c| [c.re, c.im])) {
            r.clock_sample(s);
        }
        Ok(out)
    }

    fn energy(&self) -> f64 {
        let cm: f64 = self
            .cmul
            .iter()
            .map(|c| c.units.iter().map(MultUnit::energy).sum::<f64>() + c.adders.iter().map(AdderUnit::energy).sum::<f64>())
            .sum();
        let adders: f64 = self.stage1.iter().chain(&self.stage2).map(AdderUnit::energy).sum();
        let regs: f64 = self
            .in_regs
            .iter()
            .chain(&self.tw_regs)
            .chain(&self.out_regs)
            .map(RegisterBank::energy)
            .sum();
        cm + adders + regs
    }

    /// Register, add, multiply, subtract, add.
    fn delay(&self, model: &CostModel) -> f64 {
        model.tech().register.delay + self.cmul[0].units[0].delay() + 3.0 * self.stage1[0].delay()
    }
}

/// Area and gate count of the physical datapath: eight arrays, twenty
/// full-width adders and the registers, in either mode.
fn hardware(model: &CostModel) -> (f64, usize) {
    let reg = model.tech().register;
    let mult = MultUnit::new(DspPlan::Full8, model).expect("8-bit plan is valid");
    let adder = AdderUnit::new(adder_width(MAX_ACC_BITS), model);
    let sample = RegisterBank::new(DATAPATH_BITS as u32 + 1, reg);
    let out = RegisterBank::new(MAX_ACC_BITS + 1, reg);
    let area = 8.0 * mult.area() + 20.0 * adder.area() + 12.0 * sample.area() + 8.0 * out.area();
    (area, 8 * mult.gate_count() + 20 * adder.gate_count())
}

/// Transforms each vector in order on one datapath instance.
pub fn fft4_stream(cfg: &FftConfig, vectors: &[[ComplexSample; 4]], model: &CostModel) -> Result<FftOutput> {
    let mut fft = Fft::new(cfg, model)?;
    let tw = twiddle_sequence(cfg, vectors.len());
    let bins = vectors
        .iter()
        .zip(tw)
        .map(|(&x, w)| fft.process(x, w))
        .collect::<Result<Vec<_>>>()?;
    let energy = fft.energy();
    let power = if bins.is_empty() {
        0.0
    } else {
        energy * cfg.sample_rate_hz / bins.len() as f64
    };
    let (area, gates) = hardware(model);
    Ok(FftOutput {
        bins,
        saturations: fft.saturations,
        cost: CostReport::new(fft.delay(model), energy, power, area, gates),
    })
}

/// Single-vector transform.
pub fn fft4(cfg: &FftConfig, x: [ComplexSample; 4], model: &CostModel) -> Result<[ComplexSample; 4]> {
    Ok(fft4_stream(cfg, &[x], model)?.bins[0])
}
