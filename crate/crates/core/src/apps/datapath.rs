use std::sync::Arc;

use crate::array::{plan_partitions, MultiplierArray};
use crate::cost::{netlist_delay, ArrayEnergyMeter, CostModel, RegisterParams};
use crate::error::Result;
use crate::gates::{LogicFamily, NetState, Netlist, NetlistBuilder};

use super::{DspPlan, FixedSample, DATAPATH_BITS};

/// `width`-bit CMOS ripple-carry adder. Inputs `a*`, `b*`, `gnd`; outputs
/// `s*`, carry-out dropped.
pub fn ripple_adder(width: usize) -> Netlist {
    let mut b = NetlistBuilder::new(LogicFamily::Cmos);
    let a: Vec<_> = (0..width).map(|k| b.input(format!("a{k}"))).collect();
    let x: Vec<_> = (0..width).map(|k| b.input(format!("b{k}"))).collect();
    let mut carry = b.input("gnd");
    for k in 0..width {
        let (s, c) = b.full_adder(a[k], x[k], carry);
        b.name_net(s, format!("s{k}"));
        b.output(s);
        carry = c;
    }
    b.finish()
}

/// Two's complement adder evaluated at gate level.
#[derive(Debug, Clone)]
pub struct AdderUnit {
    netlist: Arc<Netlist>,
    width: usize,
    state: NetState,
    toggles: Vec<u32>,
    gate_energy: f64,
    energy: f64,
    delay: f64,
    area: f64,
}

impl AdderUnit {
    pub fn new(width: usize, model: &CostModel) -> Self {
        assert!((2..64).contains(&width));
        let netlist = ripple_adder(width);
        let mut ties = vec![None; netlist.inputs().len()];
        *ties.last_mut().unwrap() = Some(false);
        let delay = netlist_delay(&netlist, &ties, model.delays());
        let area = model.netlist_area(&netlist);
        let gate_energy = model.gate_energy(crate::gates::GateKind::CmosNand);
        AdderUnit {
            state: netlist.zero_state(),
            toggles: vec![0; netlist.gate_count()],
            netlist: Arc::new(netlist),
            width,
            gate_energy,
            energy: 0.0,
            delay,
            area,
        }
    }

    /// `x + y` modulo `2^width`, sign-extended.
    pub fn add(&mut self, x: i64, y: i64) -> i64 {
        let w = self.width;
        let mut ins = Vec::with_capacity(2 * w + 1);
        ins.extend((0..w).map(|k| x >> k & 1 == 1));
        ins.extend((0..w).map(|k| y >> k & 1 == 1));
        ins.push(false);
        let flips = self
            .netlist
            .step(&ins, &mut self.state, &mut self.toggles)
            .expect("adder input width");
        self.energy += flips as f64 * self.gate_energy;
        let raw = self
            .netlist
            .outputs()
            .iter()
            .enumerate()
            .fold(0i64, |acc, (k, &n)| acc | (self.state.value(n) as i64) << k);
        (raw << (64 - w)) >> (64 - w)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn gate_count(&self) -> usize {
        self.netlist.gate_count()
    }
}

/// Edge-triggered register; every clock costs clock energy on every bit
/// plus transition energy on the bits that change.
#[derive(Debug, Clone)]
pub struct RegisterBank {
    bits: u32,
    value: u64,
    params: RegisterParams,
    energy: f64,
}

impl RegisterBank {
    pub fn new(bits: u32, params: RegisterParams) -> Self {
        RegisterBank {
            bits,
            value: 0,
            params,
            energy: 0.0,
        }
    }

    pub fn clock(&mut self, word: u64) {
        let word = if self.bits >= 64 { word } else { word & ((1 << self.bits) - 1) };
        let flips = (self.value ^ word).count_ones();
        self.energy += flips as f64 * self.params.energy_per_toggle + self.bits as f64 * self.params.clock_energy;
        self.value = word;
    }

    /// Stores a sample as magnitude bits with the sign in the top bit.
    pub fn clock_sample(&mut self, s: FixedSample) {
        self.clock(s.magnitude | (s.negative as u64) << (self.bits - 1));
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn area(&self) -> f64 {
        self.bits as f64 * self.params.area
    }
}

/// An 8-bit array plus sign logic, configured for one DSP mode.
#[derive(Debug, Clone)]
pub(crate) struct MultUnit {
    meter: ArrayEnergyMeter,
    area: f64,
    gates: usize,
}

impl MultUnit {
    pub fn new(plan: DspPlan, model: &CostModel) -> Result<Self> {
        let array = MultiplierArray::shared(DATAPATH_BITS);
        let area = model.netlist_area(array.netlist());
        let gates = array.netlist().gate_count();
        let partition = plan_partitions(DATAPATH_BITS, plan.widths())?;
        Ok(MultUnit {
            meter: ArrayEnergyMeter::with_array(model, array, partition),
            area,
            gates,
        })
    }

    /// Signed products of each `(x, y)` pair, one pair per segment.
    pub fn multiply(&mut self, pairs: &[(FixedSample, FixedSample)]) -> Result<Vec<FixedSample>> {
        let mags: Vec<_> = pairs.iter().map(|(x, y)| (x.magnitude, y.magnitude)).collect();
        let prods = self.meter.run(&mags)?;
        Ok(pairs
            .iter()
            .zip(prods)
            .map(|((x, y), p)| FixedSample::new(x.negative ^ y.negative, p))
            .collect())
    }

    pub fn delay(&self) -> f64 {
        self.meter.critical_delay()
    }

    pub fn energy(&self) -> f64 {
        self.meter.energy()
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn gate_count(&self) -> usize {
        self.gates
    }
}

/// Saturating add on gate-level hardware: the adder is two bits wider than
/// the accumulator so the true sum is visible before the clamp. The flag is
/// set when the clamp engaged.
pub(crate) fn sat_add(adder: &mut AdderUnit, x: i64, y: i64, max: i64) -> (i64, bool) {
    let raw = adder.add(x, y);
    let y = raw.clamp(-max, max);
    (y, y != raw)
}

/// Adder width for an accumulator of `acc_bits` magnitude bits.
pub(crate) fn adder_width(acc_bits: u32) -> usize {
    acc_bits as usize + 2
}

/// Largest accumulator the physical 16-bit adders can hold.
pub const MAX_ACC_BITS: u32 = 2 * DATAPATH_BITS as u32;

pub(crate) fn check_acc_bits(acc: Option<u32>, plan: DspPlan) -> Result<u32> {
    let bits = acc.unwrap_or_else(|| plan.acc_bits());
    if (1..=MAX_ACC_BITS).contains(&bits) {
        Ok(bits)
    } else {
        Err(crate::error::Error::InvalidTechConstants(format!(
            "acc_bits must be in 1..={MAX_ACC_BITS}, got {bits}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adder_matches_integer_sum() {
        let model = CostModel::default();
        let mut add = AdderUnit::new(10, &model);
        for (x, y) in [(0, 0), (1, -1), (255, 255), (-255, -255), (300, -17), (-511, 0)] {
            assert_eq!(add.add(x, y), x + y, "{x} + {y}");
        }
        assert_eq!(add.add(511, 1), -512);
        assert!(add.energy() > 0.0);
        assert_eq!(add.gate_count(), 90);
    }

    #[test]
    fn adder_delay_grows_with_width() {
        let model = CostModel::default();
        let d10 = AdderUnit::new(10, &model).delay();
        let d18 = AdderUnit::new(18, &model).delay();
        assert!(d10 > 0.0 && d18 > d10);
    }

    #[test]
    fn register_energy() {
        let p = RegisterParams {
            delay: 1e-10,
            energy_per_toggle: 2.0,
            clock_energy: 1.0,
            area: 3.0,
        };
        let mut r = RegisterBank::new(4, p);
        r.clock(0b1010);
        assert_eq!(r.energy(), 2.0 * 2.0 + 4.0);
        r.clock(0b1010);
        assert_eq!(r.energy(), 8.0 + 4.0);
        r.clock_sample(FixedSample::from_i64(-3));
        assert_eq!(r.energy(), 12.0 + 2.0 + 4.0);
        assert_eq!(r.area(), 12.0);
    }
}
