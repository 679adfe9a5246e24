//! Delay, energy and area estimates.
//!
//! Delay is static: longest gate path with constant propagation through the
//! control tie-offs. Energy is dynamic switching only, charged per gate
//! output transition. Area is a sum of per-kind gate areas. Absolute values
//! are only as good as the [`TechConstants`]; the comparisons are ratios.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::array::{plan_delay, plan_partitions, ArraySimulator, ControlVectors, MultiplierArray, PartitionPlan};
use crate::device::MemristorParams;
use crate::error::{Error, Result};
use crate::gates::{DelayTable, GateKind, GateLibrary, LogicFamily, Netlist};

/// Area per gate, in units of one minimum CMOS transistor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AreaTable {
    pub mr_nand: f64,
    pub mr_nor: f64,
    pub cmos_inv: f64,
    pub cmos_nand: f64,
    pub cmos_nor: f64,
}

impl Default for AreaTable {
    /// A memristor-ratioed gate is its output inverter plus two memristors
    /// stacked above the transistor layer (0.03 units each).
    fn default() -> Self {
        AreaTable {
            mr_nand: 2.06,
            mr_nor: 2.06,
            cmos_inv: 2.0,
            cmos_nand: 4.0,
            cmos_nor: 4.0,
        }
    }
}

impl AreaTable {
    pub fn get(&self, kind: GateKind) -> f64 {
        match kind {
            GateKind::MrNand => self.mr_nand,
            GateKind::MrNor => self.mr_nor,
            GateKind::CmosInv => self.cmos_inv,
            GateKind::CmosNand => self.cmos_nand,
            GateKind::CmosNor => self.cmos_nor,
        }
    }
}

/// Per-bit register figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegisterParams {
    /// Clock-to-output plus setup (seconds).
    pub delay: f64,
    /// Energy per stored-bit transition (joules).
    pub energy_per_toggle: f64,
    /// Clock energy per bit per cycle (joules).
    pub clock_energy: f64,
    pub area: f64,
}

impl Default for RegisterParams {
    fn default() -> Self {
        RegisterParams {
            delay: 120e-12,
            energy_per_toggle: 20e-15,
            clock_energy: 24e-15,
            area: 24.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TechConstants {
    /// Clock used to turn energy per operation into average power (hertz).
    pub frequency_hz: f64,
    pub gates: GateLibrary,
    pub area: AreaTable,
    pub register: RegisterParams,
}

impl Default for TechConstants {
    fn default() -> Self {
        TechConstants {
            frequency_hz: 100e6,
            gates: GateLibrary::default(),
            area: AreaTable::default(),
            register: RegisterParams::default(),
        }
    }
}

impl TechConstants {
    pub fn validate(&self) -> Result<()> {
        self.gates.validate()?;
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.frequency_hz) {
            return Err(Error::InvalidTechConstants("frequency_hz must be positive".into()));
        }
        for kind in GateKind::ALL {
            if !positive(self.area.get(kind)) {
                return Err(Error::InvalidTechConstants(format!("{kind}: area must be positive")));
            }
        }
        let r = &self.register;
        if !(positive(r.delay) && positive(r.area) && r.energy_per_toggle >= 0.0 && r.clock_energy >= 0.0) {
            return Err(Error::InvalidTechConstants("register constants out of range".into()));
        }
        Ok(())
    }
}

/// Device and technology constants with the derived gate delay table.
#[derive(Debug, Clone)]
pub struct CostModel {
    mr: MemristorParams,
    tech: TechConstants,
    delays: DelayTable,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::new(MemristorParams::default(), TechConstants::default())
            .expect("defaults are valid")
    }
}

impl CostModel {
    pub fn new(mr: MemristorParams, tech: TechConstants) -> Result<Self> {
        mr.validate()?;
        tech.validate()?;
        let delays = DelayTable::new(&tech.gates, &mr);
        Ok(CostModel { mr, tech, delays })
    }

    pub fn device(&self) -> &MemristorParams {
        &self.mr
    }

    pub fn tech(&self) -> &TechConstants {
        &self.tech
    }

    pub fn delays(&self) -> &DelayTable {
        &self.delays
    }

    /// Static critical path of a partition plan on its own array.
    pub fn critical_path_delay(&self, plan: &PartitionPlan) -> f64 {
        plan_delay(&MultiplierArray::new(plan.n()), plan, &self.delays)
    }

    /// Static critical path of `array` under arbitrary control vectors with
    /// every bus bit live.
    pub fn array_delay(&self, array: &MultiplierArray, ctrl: Option<&ControlVectors>) -> f64 {
        let ties = match ctrl {
            Some(c) => array.ties_with(c, |_| true),
            None => {
                let mut t = vec![None; array.netlist().inputs().len()];
                *t.last_mut().unwrap() = Some(false);
                t
            }
        };
        netlist_delay(array.netlist(), &ties, &self.delays)
    }

    pub fn gate_energy(&self, kind: GateKind) -> f64 {
        self.tech.gates.timing(kind).energy_per_toggle
    }

    /// Energy of a per-gate toggle count vector.
    pub fn toggle_energy(&self, netlist: &Netlist, toggles: &[u32]) -> f64 {
        netlist
            .gates()
            .iter()
            .zip(toggles)
            .map(|(g, &t)| t as f64 * self.gate_energy(g.kind))
            .sum()
    }

    pub fn netlist_area(&self, netlist: &Netlist) -> f64 {
        netlist.gates().iter().map(|g| self.tech.area.get(g.kind)).sum()
    }

    /// Switching energy of a sequence of multiplications evaluated in order
    /// on one array, and the average power at the technology clock with one
    /// multiplication per cycle.
    pub fn workload_energy(&self, plan: &PartitionPlan, workload: &[Vec<(u64, u64)>]) -> Result<(f64, f64)> {
        let mut meter = ArrayEnergyMeter::new(self, plan.clone());
        for pairs in workload {
            meter.run(pairs)?;
        }
        let energy = meter.energy();
        Ok((energy, self.average_power(energy, workload.len())))
    }

    /// Total gate area of an `n`-bit array in the given technology. The
    /// memristor-CMOS array is the reconfigurable design; the CMOS one is
    /// the conventional fixed ripple-carry array.
    pub fn area_estimate(&self, n: usize, family: LogicFamily) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.netlist_area(array_for(n, family).netlist())
    }
}

impl CostModel {
    /// Delay, energy, power and area of `workload` run in order on the
    /// reconfigurable array configured by `plan`, one step per clock.
    pub fn multiplier_report(&self, plan: &PartitionPlan, workload: &[Vec<(u64, u64)>]) -> Result<CostReport> {
        let array = MultiplierArray::shared(plan.n());
        let mut meter = ArrayEnergyMeter::with_array(self, array.clone(), plan.clone());
        for pairs in workload {
            meter.run(pairs)?;
        }
        Ok(CostReport::new(
            meter.critical_delay(),
            meter.energy(),
            self.average_power(meter.energy(), workload.len()),
            self.netlist_area(array.netlist()),
            array.netlist().gate_count(),
        ))
    }

    /// The same bus values on a conventional CMOS ripple-carry array, the
    /// fixed full-width baseline.
    pub fn baseline_report(&self, n: usize, buses: &[(u64, u64)]) -> CostReport {
        let array = MultiplierArray::conventional(n, LogicFamily::Cmos);
        let nl = array.netlist();
        let mut state = nl.zero_state();
        let mut toggles = vec![0u32; nl.gate_count()];
        for &(a, b) in buses {
            nl.step(&array.input_vector(a, b, None), &mut state, &mut toggles)
                .expect("input vector matches the array");
        }
        let energy = self.toggle_energy(nl, &toggles);
        CostReport::new(
            self.array_delay(&array, None),
            energy,
            self.average_power(energy, buses.len()),
            self.netlist_area(nl),
            nl.gate_count(),
        )
    }

    fn average_power(&self, energy: f64, steps: usize) -> f64 {
        if steps == 0 {
            0.0
        } else {
            energy * self.tech.frequency_hz / steps as f64
        }
    }
}

fn array_for(n: usize, family: LogicFamily) -> MultiplierArray {
    match family {
        LogicFamily::MemristorCmos => MultiplierArray::new(n),
        LogicFamily::Cmos => MultiplierArray::conventional(n, LogicFamily::Cmos),
    }
}

/// Worst arrival over the outputs of `netlist` under `ties`.
pub fn netlist_delay(netlist: &Netlist, ties: &[Option<bool>], delays: &DelayTable) -> f64 {
    let st = netlist.static_timing(ties, delays).expect("tie vector matches inputs");
    netlist
        .outputs()
        .iter()
        .filter_map(|&o| st.arrival[o as usize])
        .fold(0.0, f64::max)
}

/// Array simulator that keeps a running switching-energy total.
#[derive(Debug, Clone)]
pub struct ArrayEnergyMeter {
    sim: ArraySimulator,
    gate_energy: Vec<f64>,
    energy: f64,
    toggles: u64,
}

impl ArrayEnergyMeter {
    pub fn new(model: &CostModel, plan: PartitionPlan) -> Self {
        Self::with_array(model, MultiplierArray::shared(plan.n()), plan)
    }

    pub fn with_array(model: &CostModel, array: Arc<MultiplierArray>, plan: PartitionPlan) -> Self {
        let gate_energy = array
            .netlist()
            .gates()
            .iter()
            .map(|g| model.gate_energy(g.kind))
            .collect();
        let sim = ArraySimulator::new(array, plan, model.delays());
        ArrayEnergyMeter {
            sim,
            gate_energy,
            energy: 0.0,
            toggles: 0,
        }
    }

    /// Multiplies the pairs and returns the per-segment products.
    pub fn run(&mut self, pairs: &[(u64, u64)]) -> Result<Vec<u64>> {
        let trace = self.sim.simulate(pairs)?;
        self.energy += trace
            .toggles
            .iter()
            .zip(&self.gate_energy)
            .filter(|(&t, _)| t > 0)
            .map(|(&t, &e)| t as f64 * e)
            .sum::<f64>();
        self.toggles += trace.total_toggles;
        Ok(crate::array::extract_products(self.sim.plan(), trace.raw_product))
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn toggles(&self) -> u64 {
        self.toggles
    }

    pub fn critical_delay(&self) -> f64 {
        self.sim.critical_delay()
    }

    pub fn plan(&self) -> &PartitionPlan {
        self.sim.plan()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSet {
    pub delay: f64,
    pub power: f64,
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub delay_s: f64,
    pub energy_j: f64,
    pub avg_power_w: f64,
    pub area_units: f64,
    pub gate_count: usize,
    pub ratios: Option<RatioSet>,
    pub published_ratios: Option<RatioSet>,
}

impl CostReport {
    pub fn new(delay_s: f64, energy_j: f64, avg_power_w: f64, area_units: f64, gate_count: usize) -> Self {
        CostReport {
            delay_s,
            energy_j,
            avg_power_w,
            area_units,
            gate_count,
            ratios: None,
            published_ratios: None,
        }
    }

    /// Fills `ratios` against `baseline` and attaches published reference
    /// ratios for the same comparison, if any.
    pub fn compared_to(mut self, baseline: &CostReport, reference: Option<RatioSet>) -> Result<Self> {
        self.ratios = Some(compare_report(&self, baseline)?);
        self.published_ratios = reference;
        Ok(self)
    }
}

/// Field-wise `candidate / baseline`.
pub fn compare_report(candidate: &CostReport, baseline: &CostReport) -> Result<RatioSet> {
    let check = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::DegenerateBaseline(format!(
                "baseline {name} is {v}"
            )))
        }
    };
    Ok(RatioSet {
        delay: candidate.delay_s / check("delay", baseline.delay_s)?,
        power: candidate.avg_power_w / check("power", baseline.avg_power_w)?,
        area: candidate.area_units / check("area", baseline.area_units)?,
    })
}

/// Published figures, normalized to the left-most column of each table.
pub mod reference {
    use super::RatioSet;

    /// 4+4 over 8-bit, FIR filter.
    pub const FIR_4P4_VS_8: RatioSet = RatioSet {
        delay: 0.70,
        power: 0.65,
        area: 1.0,
    };
    /// 4+4 over 8-bit, 4-point FFT.
    pub const FFT_4P4_VS_8: RatioSet = RatioSet {
        delay: 0.66,
        power: 0.51,
        area: 1.0,
    };

    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct MultiplierRow {
        pub design: &'static str,
        pub technology: &'static str,
        pub delay_ns: f64,
        pub power_mw: f64,
        pub area_um2: f64,
        pub ratios: RatioSet,
    }

    /// 32-bit multiplier comparison. Only the memristor-CMOS row is modeled
    /// here; the others are carried as reference data.
    pub const MULTIPLIERS_32: [MultiplierRow; 4] = [
        MultiplierRow {
            design: "conventional-rca",
            technology: "cmos",
            delay_ns: 11.8,
            power_mw: 10.9,
            area_um2: 61.7,
            ratios: RatioSet { delay: 1.00, power: 1.00, area: 1.00 },
        },
        MultiplierRow {
            design: "twin-precision",
            technology: "cmos",
            delay_ns: 11.9,
            power_mw: 11.0,
            area_um2: 65.1,
            ratios: RatioSet { delay: 1.01, power: 1.01, area: 1.06 },
        },
        MultiplierRow {
            design: "scalable",
            technology: "cmos",
            delay_ns: 17.3,
            power_mw: 18.0,
            area_um2: 130.0,
            ratios: RatioSet { delay: 1.47, power: 1.65, area: 2.11 },
        },
        MultiplierRow {
            design: "reconfigurable",
            technology: "memristor-cmos",
            delay_ns: 12.5,
            power_mw: 11.2,
            area_um2: 51.2,
            ratios: RatioSet { delay: 1.06, power: 1.03, area: 0.83 },
        },
    ];
}

/// Full-width plan for an `n`-bit array.
pub fn full_plan(n: usize) -> Result<PartitionPlan> {
    plan_partitions(n, &[n])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_block_delay_is_positive_and_bounded() {
        let m = CostModel::default();
        let arr = MultiplierArray::new(1);
        let ctrl = ControlVectors::from_strings("0", "1").unwrap();
        let d = m.array_delay(&arr, Some(&ctrl));
        let bound: f64 = arr
            .netlist()
            .gates()
            .iter()
            .map(|g| m.delays().worst(g.kind, None, None))
            .sum();
        assert!(d > 0.0 && d <= bound);
    }

    #[test]
    fn narrow_plan_is_faster() {
        let m = CostModel::default();
        let d8 = m.critical_path_delay(&plan_partitions(8, &[8]).unwrap());
        let d4 = m.critical_path_delay(&plan_partitions(8, &[4]).unwrap());
        let d44 = m.critical_path_delay(&plan_partitions(8, &[4, 4]).unwrap());
        assert!(d4 < d8);
        assert!(d44 >= d4 && d44 < d8);
    }

    #[test]
    fn empty_workload_costs_nothing() {
        let m = CostModel::default();
        let (e, p) = m.workload_energy(&plan_partitions(8, &[8]).unwrap(), &[]).unwrap();
        assert_eq!((e, p), (0.0, 0.0));
    }

    #[test]
    fn repeated_pair_adds_no_energy() {
        let m = CostModel::default();
        let plan = plan_partitions(8, &[8]).unwrap();
        let (once, _) = m.workload_energy(&plan, &[vec![(99, 201)]]).unwrap();
        let (thrice, _) = m
            .workload_energy(&plan, &[vec![(99, 201)], vec![(99, 201)], vec![(99, 201)]])
            .unwrap();
        assert!(once > 0.0);
        assert_eq!(once, thrice);
    }

    #[test]
    fn area_scales_with_block_count() {
        let m = CostModel::default();
        assert_eq!(m.area_estimate(0, LogicFamily::MemristorCmos), 0.0);
        let a4 = m.area_estimate(4, LogicFamily::MemristorCmos);
        let a8 = m.area_estimate(8, LogicFamily::MemristorCmos);
        assert!((a8 / a4 - 4.0).abs() < 1e-9);
    }

    #[test]
    fn identical_reports_compare_to_one() {
        let r = CostReport::new(1e-9, 2e-12, 3e-3, 40.0, 10);
        let ratios = compare_report(&r, &r).unwrap();
        assert_eq!(ratios, RatioSet { delay: 1.0, power: 1.0, area: 1.0 });
        let zero = CostReport::new(0.0, 0.0, 0.0, 0.0, 0);
        assert!(compare_report(&r, &zero).is_err());
    }

    #[test]
    fn baseline_matches_reconfigurable_work() {
        let m = CostModel::default();
        let plan = plan_partitions(4, &[4]).unwrap();
        let work = vec![vec![(3, 5)], vec![(15, 15)], vec![(0, 9)]];
        let ours = m.multiplier_report(&plan, &work).unwrap();
        let base = m.baseline_report(4, &[(3, 5), (15, 15), (0, 9)]);
        assert!(ours.energy_j > 0.0 && base.energy_j > 0.0);
        assert_eq!(ours.gate_count, 16 * 17);
        assert_eq!(base.gate_count, 16 * 11);
        let (e, _) = m.workload_energy(&plan, &work).unwrap();
        assert_eq!(e, ours.energy_j);
        assert_eq!(m.baseline_report(4, &[]).avg_power_w, 0.0);
    }

    #[test]
    fn tech_validation() {
        let mut t = TechConstants::default();
        assert!(t.validate().is_ok());
        t.frequency_hz = 0.0;
        assert!(t.validate().is_err());
        let mut t = TechConstants::default();
        t.area.mr_nand = -1.0;
        assert!(t.validate().is_err());
    }
}
