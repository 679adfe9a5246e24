//! Memristor-ratioed logic primitives and gate-level netlists.
//!
//! An `MR_NAND` is a pair of input-driven memristors forming a resistive
//! divider whose shared node feeds a CMOS inverter; `MR_NOR` is the dual. The
//! shared node settles with the time constant of the parallel memristor
//! resistance and the inverter gate capacitance, and the gate switches when
//! it crosses half swing. Plain CMOS kinds are provided for the conventional
//! baseline and for the adders of the benchmark datapaths.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::device::MemristorParams;
use crate::error::{Error, Result};

pub type NetId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GateKind {
    #[serde(rename = "MR_NAND")]
    MrNand,
    #[serde(rename = "MR_NOR")]
    MrNor,
    #[serde(rename = "CMOS_INV")]
    CmosInv,
    #[serde(rename = "CMOS_NAND")]
    CmosNand,
    #[serde(rename = "CMOS_NOR")]
    CmosNor,
}

impl GateKind {
    pub const ALL: [GateKind; 5] = [
        GateKind::MrNand,
        GateKind::MrNor,
        GateKind::CmosInv,
        GateKind::CmosNand,
        GateKind::CmosNor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::MrNand => "MR_NAND",
            GateKind::MrNor => "MR_NOR",
            GateKind::CmosInv => "CMOS_INV",
            GateKind::CmosNand => "CMOS_NAND",
            GateKind::CmosNor => "CMOS_NOR",
        }
    }

    pub fn from_name(s: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::CmosInv => 1,
            _ => 2,
        }
    }

    pub fn is_memristive(self) -> bool {
        matches!(self, GateKind::MrNand | GateKind::MrNor)
    }

    #[inline]
    fn logic(self, a: bool, b: bool) -> bool {
        match self {
            GateKind::MrNand | GateKind::CmosNand => !(a && b),
            GateKind::MrNor | GateKind::CmosNor => !(a || b),
            GateKind::CmosInv => !a,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl std::fmt::Display for GateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Electrical figures of one gate kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateModel {
    pub kind: GateKind,
    /// Input capacitance of the output inverter (farads).
    pub c_g: f64,
    pub energy_per_toggle: f64,
    /// Delay added on top of the RC settling of the memristor node; for the
    /// CMOS kinds this is the whole gate delay.
    pub fixed_delay: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateTiming {
    pub c_g: f64,
    pub energy_per_toggle: f64,
    pub fixed_delay: f64,
}

/// One [`GateTiming`] per gate kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateLibrary {
    pub mr_nand: GateTiming,
    pub mr_nor: GateTiming,
    pub cmos_inv: GateTiming,
    pub cmos_nand: GateTiming,
    pub cmos_nor: GateTiming,
}

impl Default for GateLibrary {
    fn default() -> Self {
        let mr = GateTiming {
            c_g: 2e-15,
            energy_per_toggle: 8e-15,
            fixed_delay: 20e-12,
        };
        GateLibrary {
            mr_nand: mr,
            mr_nor: mr,
            cmos_inv: GateTiming {
                c_g: 2e-15,
                energy_per_toggle: 4e-15,
                fixed_delay: 15e-12,
            },
            cmos_nand: GateTiming {
                c_g: 2e-15,
                energy_per_toggle: 8e-15,
                fixed_delay: 25e-12,
            },
            cmos_nor: GateTiming {
                c_g: 2e-15,
                energy_per_toggle: 8e-15,
                fixed_delay: 30e-12,
            },
        }
    }
}

impl GateLibrary {
    pub fn timing(&self, kind: GateKind) -> &GateTiming {
        match kind {
            GateKind::MrNand => &self.mr_nand,
            GateKind::MrNor => &self.mr_nor,
            GateKind::CmosInv => &self.cmos_inv,
            GateKind::CmosNand => &self.cmos_nand,
            GateKind::CmosNor => &self.cmos_nor,
        }
    }

    pub fn model(&self, kind: GateKind) -> GateModel {
        let t = self.timing(kind);
        GateModel {
            kind,
            c_g: t.c_g,
            energy_per_toggle: t.energy_per_toggle,
            fixed_delay: t.fixed_delay,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for kind in GateKind::ALL {
            let t = self.timing(kind);
            let bad = |what: &str| Err(Error::InvalidGateModel(format!("{kind}: {what}")));
            if !(t.c_g > 0.0 && t.c_g.is_finite()) {
                return bad("c_g must be positive");
            }
            if !(t.energy_per_toggle >= 0.0 && t.energy_per_toggle.is_finite()) {
                return bad("energy_per_toggle must be non-negative");
            }
            if !(t.fixed_delay >= 0.0 && t.fixed_delay.is_finite()) {
                return bad("fixed_delay must be non-negative");
            }
            if !kind.is_memristive() && t.fixed_delay == 0.0 {
                return bad("CMOS gates need a positive fixed_delay");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateEvalResult {
    pub output: bool,
    /// Parallel resistance of the two input memristors; `None` for CMOS kinds.
    pub r_eq: Option<f64>,
    pub delay: f64,
}

fn parallel(r1: f64, r2: f64) -> f64 {
    r1 * r2 / (r1 + r2)
}

/// Evaluates one gate: logic value, equivalent resistance and RC delay.
///
/// For `MR_NAND` an input at 1 programs its memristor to `r_on`, for `MR_NOR`
/// to `r_off`. The node delay is `ln 2 * r_eq * c_g` plus the fixed inverter
/// delay.
pub fn eval_gate(model: &GateModel, inputs: &[bool], mr: &MemristorParams) -> Result<GateEvalResult> {
    let kind = model.kind;
    if inputs.len() != kind.arity() {
        return Err(Error::GateArity {
            kind: kind.name(),
            expected: kind.arity(),
            got: inputs.len(),
        });
    }
    let a = inputs[0];
    let b = *inputs.get(1).unwrap_or(&a);
    let output = kind.logic(a, b);
    let r_eq = match kind {
        GateKind::MrNand | GateKind::MrNor => {
            let on_when = kind == GateKind::MrNand;
            let r = |bit: bool| if bit == on_when { mr.r_on } else { mr.r_off };
            Some(parallel(r(a), r(b)))
        }
        _ => None,
    };
    let rc = r_eq.map_or(0.0, |r| std::f64::consts::LN_2 * r * model.c_g);
    Ok(GateEvalResult {
        output,
        r_eq,
        delay: rc + model.fixed_delay,
    })
}

/// Gate delays for every input combination, indexed `[kind][a + 2b]`.
#[derive(Debug, Clone)]
pub struct DelayTable {
    table: [[f64; 4]; 5],
}

impl DelayTable {
    pub fn new(lib: &GateLibrary, mr: &MemristorParams) -> Self {
        let mut table = [[0.0; 4]; 5];
        for kind in GateKind::ALL {
            let model = lib.model(kind);
            for (combo, slot) in table[kind.index()].iter_mut().enumerate() {
                let (a, b) = (combo & 1 == 1, combo & 2 == 2);
                let ins = [a, b];
                *slot = eval_gate(&model, &ins[..kind.arity()], mr)
                    .expect("arity matches kind")
                    .delay;
            }
            if kind.arity() == 1 {
                let t = &mut table[kind.index()];
                t[2] = t[0];
                t[3] = t[1];
            }
        }
        DelayTable { table }
    }

    #[inline]
    pub fn delay(&self, kind: GateKind, a: bool, b: bool) -> f64 {
        self.table[kind.index()][a as usize + 2 * b as usize]
    }

    /// Largest delay over input combinations consistent with `a` and `b`,
    /// where `None` stands for an unknown value.
    pub fn worst(&self, kind: GateKind, a: Option<bool>, b: Option<bool>) -> f64 {
        let opts = |x: Option<bool>| match x {
            Some(v) => vec![v],
            None => vec![false, true],
        };
        let mut worst: f64 = 0.0;
        for &va in &opts(a) {
            for &vb in &opts(b) {
                worst = worst.max(self.delay(kind, va, vb));
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    /// Second slot repeats the first for single-input kinds.
    pub inputs: [NetId; 2],
    pub output: NetId,
}

impl Gate {
    pub fn input_nets(&self) -> &[NetId] {
        &self.inputs[..self.kind.arity()]
    }
}

/// A combinational gate graph stored in topological order.
#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    net_names: Vec<String>,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
    gates: Vec<Gate>,
}

/// Previous net values, used to count output transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetState {
    values: Vec<bool>,
}

impl NetState {
    pub fn value(&self, net: NetId) -> bool {
        self.values[net as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetlistEval {
    pub outputs: Vec<bool>,
    /// 1 for every gate whose output differs from the previous evaluation.
    pub toggles: Vec<u32>,
    /// Longest accumulated gate delay into each primary output.
    pub path_delays: Vec<f64>,
}

/// Arrival times from static timing; `None` marks nets that are constant
/// under the given tie-offs.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticTiming {
    pub arrival: Vec<Option<f64>>,
    pub constant: Vec<Option<bool>>,
}

impl Netlist {
    pub fn empty_with(inputs: &[&str], outputs: &[&str]) -> Result<Netlist> {
        Netlist::from_parts(inputs, outputs, &[])
    }

    /// Builds a netlist from named gates in any order.
    ///
    /// Gates are sorted topologically; cycles, undriven nets and nets with two
    /// drivers are rejected.
    pub fn from_parts(
        inputs: &[&str],
        outputs: &[&str],
        gates: &[(GateKind, Vec<String>, String)],
    ) -> Result<Netlist> {
        let mut ids: HashMap<String, NetId> = HashMap::new();
        let mut names: Vec<String> = Vec::new();
        let mut intern = |name: &str, names: &mut Vec<String>| -> NetId {
            *ids.entry(name.to_string()).or_insert_with(|| {
                names.push(name.to_string());
                (names.len() - 1) as NetId
            })
        };

        let mut driver: Vec<Option<usize>> = Vec::new();
        let mut is_input: Vec<bool> = Vec::new();
        let grow = |v: &mut Vec<Option<usize>>, w: &mut Vec<bool>, n: usize| {
            if v.len() < n {
                v.resize(n, None);
                w.resize(n, false);
            }
        };

        let mut input_ids = Vec::new();
        for name in inputs {
            let id = intern(name, &mut names);
            grow(&mut driver, &mut is_input, names.len());
            if is_input[id as usize] {
                return Err(Error::MultipleDrivers(name.to_string()));
            }
            is_input[id as usize] = true;
            input_ids.push(id);
        }

        let mut raw = Vec::with_capacity(gates.len());
        for (g, (kind, ins, out)) in gates.iter().enumerate() {
            if ins.len() != kind.arity() {
                return Err(Error::GateArity {
                    kind: kind.name(),
                    expected: kind.arity(),
                    got: ins.len(),
                });
            }
            let in_ids: Vec<NetId> = ins.iter().map(|n| intern(n, &mut names)).collect();
            let out_id = intern(out, &mut names);
            grow(&mut driver, &mut is_input, names.len());
            if is_input[out_id as usize] || driver[out_id as usize].is_some() {
                return Err(Error::MultipleDrivers(out.clone()));
            }
            driver[out_id as usize] = Some(g);
            let inputs = [in_ids[0], *in_ids.get(1).unwrap_or(&in_ids[0])];
            raw.push(Gate {
                kind: *kind,
                inputs,
                output: out_id,
            });
        }

        let output_ids: Vec<NetId> = outputs.iter().map(|n| intern(n, &mut names)).collect();
        grow(&mut driver, &mut is_input, names.len());

        for (id, name) in names.iter().enumerate() {
            if !is_input[id] && driver[id].is_none() {
                return Err(Error::UndrivenNet(name.clone()));
            }
        }

        // Kahn's algorithm over gate dependencies.
        let mut pending: Vec<usize> = raw
            .iter()
            .map(|g| {
                g.input_nets()
                    .iter()
                    .filter(|&&n| driver[n as usize].is_some())
                    .count()
            })
            .collect();
        let mut fanout: Vec<Vec<usize>> = vec![Vec::new(); raw.len()];
        for (g, gate) in raw.iter().enumerate() {
            for &n in gate.input_nets() {
                if let Some(d) = driver[n as usize] {
                    fanout[d].push(g);
                }
            }
        }
        let mut ready: Vec<usize> = (0..raw.len()).filter(|&g| pending[g] == 0).rev().collect();
        let mut order = Vec::with_capacity(raw.len());
        while let Some(g) = ready.pop() {
            order.push(g);
            for &succ in fanout[g].iter().rev() {
                pending[succ] -= 1;
                if pending[succ] == 0 {
                    ready.push(succ);
                }
            }
        }
        if order.len() != raw.len() {
            let stuck = (0..raw.len()).find(|&g| pending[g] > 0).unwrap();
            return Err(Error::CyclicNetlist(names[raw[stuck].output as usize].clone()));
        }

        Ok(Netlist {
            net_names: names,
            inputs: input_ids,
            outputs: output_ids,
            gates: order.into_iter().map(|g| raw[g]).collect(),
        })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn inputs(&self) -> &[NetId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NetId] {
        &self.outputs
    }

    pub fn net_count(&self) -> usize {
        self.net_names.len()
    }

    pub fn net_name(&self, net: NetId) -> &str {
        &self.net_names[net as usize]
    }

    pub fn input_names(&self) -> impl Iterator<Item = &str> {
        self.inputs.iter().map(|&n| self.net_name(n))
    }

    pub fn output_names(&self) -> impl Iterator<Item = &str> {
        self.outputs.iter().map(|&n| self.net_name(n))
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn count_by_kind(&self) -> BTreeMap<GateKind, usize> {
        let mut counts = BTreeMap::new();
        for g in &self.gates {
            *counts.entry(g.kind).or_insert(0) += 1;
        }
        counts
    }

    /// All nets low, as if nothing had been evaluated yet.
    pub fn zero_state(&self) -> NetState {
        NetState {
            values: vec![false; self.net_names.len()],
        }
    }

    /// Full evaluation: outputs, per-gate toggles against `prev` (the zero
    /// state when `None`) and data-dependent path delays.
    pub fn eval(
        &self,
        inputs: &[bool],
        delays: &DelayTable,
        prev: Option<&NetState>,
    ) -> Result<(NetlistEval, NetState)> {
        self.check_inputs(inputs)?;
        let mut state = prev.cloned().unwrap_or_else(|| self.zero_state());
        let mut arrival = vec![0.0f64; self.net_names.len()];
        let mut toggles = vec![0u32; self.gates.len()];
        for (&net, &v) in self.inputs.iter().zip(inputs) {
            state.values[net as usize] = v;
        }
        for (g, gate) in self.gates.iter().enumerate() {
            let a = state.values[gate.inputs[0] as usize];
            let b = state.values[gate.inputs[1] as usize];
            let out = gate.kind.logic(a, b);
            let o = gate.output as usize;
            if state.values[o] != out {
                toggles[g] = 1;
            }
            state.values[o] = out;
            let t_in = gate
                .input_nets()
                .iter()
                .map(|&n| arrival[n as usize])
                .fold(0.0, f64::max);
            arrival[o] = t_in + delays.delay(gate.kind, a, b);
        }
        let outputs = self.outputs.iter().map(|&n| state.values[n as usize]).collect();
        let path_delays = self.outputs.iter().map(|&n| arrival[n as usize]).collect();
        Ok((
            NetlistEval {
                outputs,
                toggles,
                path_delays,
            },
            state,
        ))
    }

    /// Evaluation by primary input name.
    pub fn eval_named(
        &self,
        assignment: &BTreeMap<String, bool>,
        delays: &DelayTable,
        prev: Option<&NetState>,
    ) -> Result<(NetlistEval, NetState)> {
        let values = self
            .input_names()
            .map(|name| {
                assignment
                    .get(name)
                    .copied()
                    .ok_or_else(|| Error::MissingInput(name.to_string()))
            })
            .collect::<Result<Vec<bool>>>()?;
        self.eval(&values, delays, prev)
    }

    /// Logic-only evaluation in place. `state` holds the previous values and
    /// is updated; each gate that changes output bumps its `toggles` slot.
    /// Returns the number of toggles in this evaluation.
    pub fn step(&self, inputs: &[bool], state: &mut NetState, toggles: &mut [u32]) -> Result<u64> {
        self.check_inputs(inputs)?;
        let values = &mut state.values;
        for (&net, &v) in self.inputs.iter().zip(inputs) {
            values[net as usize] = v;
        }
        let mut total = 0u64;
        for (g, gate) in self.gates.iter().enumerate() {
            let a = values[gate.inputs[0] as usize];
            let b = values[gate.inputs[1] as usize];
            let out = gate.kind.logic(a, b);
            let o = gate.output as usize;
            if values[o] != out {
                values[o] = out;
                toggles[g] += 1;
                total += 1;
            }
        }
        Ok(total)
    }

    pub fn read_outputs(&self, state: &NetState) -> Vec<bool> {
        self.outputs.iter().map(|&n| state.values[n as usize]).collect()
    }

    fn check_inputs(&self, inputs: &[bool]) -> Result<()> {
        if inputs.len() != self.inputs.len() {
            return Err(Error::InputCount {
                expected: self.inputs.len(),
                got: inputs.len(),
            });
        }
        Ok(())
    }

    /// Longest-path static timing with constant propagation.
    ///
    /// `ties[k]` fixes primary input `k` to a constant, or leaves it as a
    /// timing source (arrival 0) when `None`. A gate whose output is forced
    /// by its constant inputs is constant and starts no path. Otherwise its
    /// arrival is the latest unknown input plus the worst gate delay over
    /// input values consistent with the constants.
    pub fn static_timing(&self, ties: &[Option<bool>], delays: &DelayTable) -> Result<StaticTiming> {
        if ties.len() != self.inputs.len() {
            return Err(Error::InputCount {
                expected: self.inputs.len(),
                got: ties.len(),
            });
        }
        let n = self.net_names.len();
        let mut constant: Vec<Option<bool>> = vec![None; n];
        let mut arrival: Vec<Option<f64>> = vec![None; n];
        for (&net, &tie) in self.inputs.iter().zip(ties) {
            constant[net as usize] = tie;
            arrival[net as usize] = if tie.is_some() { None } else { Some(0.0) };
        }
        for gate in &self.gates {
            let a = constant[gate.inputs[0] as usize];
            let b = if gate.kind.arity() == 1 {
                a
            } else {
                constant[gate.inputs[1] as usize]
            };
            let forced = match gate.kind {
                GateKind::CmosInv => a.map(|v| !v),
                GateKind::MrNand | GateKind::CmosNand => match (a, b) {
                    (Some(false), _) | (_, Some(false)) => Some(true),
                    (Some(true), Some(true)) => Some(false),
                    _ => None,
                },
                GateKind::MrNor | GateKind::CmosNor => match (a, b) {
                    (Some(true), _) | (_, Some(true)) => Some(false),
                    (Some(false), Some(false)) => Some(true),
                    _ => None,
                },
            };
            let o = gate.output as usize;
            constant[o] = forced;
            if forced.is_none() {
                let t_in = gate
                    .input_nets()
                    .iter()
                    .filter_map(|&n| arrival[n as usize])
                    .fold(0.0, f64::max);
                arrival[o] = Some(t_in + delays.worst(gate.kind, a, b));
            }
        }
        Ok(StaticTiming { arrival, constant })
    }

    /// Line-oriented text form: `.inputs`/`.outputs` headers followed by one
    /// `<gate-id> <kind> <in> [<in>] -> <out>` line per gate in evaluation
    /// order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let join = |ids: &[NetId]| {
            ids.iter()
                .map(|&n| self.net_name(n))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(s, ".inputs {}", join(&self.inputs)).unwrap();
        writeln!(s, ".outputs {}", join(&self.outputs)).unwrap();
        for (g, gate) in self.gates.iter().enumerate() {
            write!(s, "g{g} {}", gate.kind).unwrap();
            for &n in gate.input_nets() {
                write!(s, " {}", self.net_name(n)).unwrap();
            }
            writeln!(s, " -> {}", self.net_name(gate.output)).unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<Netlist> {
        let mut inputs: Vec<&str> = Vec::new();
        let mut outputs: Vec<&str> = Vec::new();
        let mut gates = Vec::new();
        let mut seen_ids = std::collections::HashSet::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let err = |message: String| Error::NetlistParse {
                line: lineno,
                message,
            };
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let mut toks = line.split_whitespace();
            let head = toks.next().unwrap();
            match head {
                ".inputs" => inputs.extend(toks),
                ".outputs" => outputs.extend(toks),
                id => {
                    if !seen_ids.insert(id.to_string()) {
                        return Err(err(format!("duplicate gate id `{id}`")));
                    }
                    let kind_tok = toks.next().ok_or_else(|| err("missing gate kind".into()))?;
                    let kind = GateKind::from_name(kind_tok)
                        .ok_or_else(|| err(format!("unknown gate kind `{kind_tok}`")))?;
                    let rest: Vec<&str> = toks.collect();
                    let arrow = rest
                        .iter()
                        .position(|&t| t == "->")
                        .ok_or_else(|| err("missing `->`".into()))?;
                    if rest.len() != arrow + 2 {
                        return Err(err("expected exactly one output net after `->`".into()));
                    }
                    if arrow != kind.arity() {
                        return Err(err(format!(
                            "{kind} takes {} input(s), got {arrow}",
                            kind.arity()
                        )));
                    }
                    let ins = rest[..arrow].iter().map(|s| s.to_string()).collect();
                    gates.push((kind, ins, rest[arrow + 1].to_string()));
                }
            }
        }
        Netlist::from_parts(&inputs, &outputs, &gates)
    }
}

/// Logic family used when composing blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogicFamily {
    MemristorCmos,
    Cmos,
}

impl LogicFamily {
    pub fn nand(self) -> GateKind {
        match self {
            LogicFamily::MemristorCmos => GateKind::MrNand,
            LogicFamily::Cmos => GateKind::CmosNand,
        }
    }
}

/// Incremental construction; gates can only consume existing nets, so the
/// result is in topological order by construction.
#[derive(Debug, Clone)]
pub struct NetlistBuilder {
    family: LogicFamily,
    net_names: Vec<Option<String>>,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
    gates: Vec<Gate>,
}

impl NetlistBuilder {
    pub fn new(family: LogicFamily) -> Self {
        NetlistBuilder {
            family,
            net_names: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            gates: Vec::new(),
        }
    }

    fn new_net(&mut self, name: Option<String>) -> NetId {
        self.net_names.push(name);
        (self.net_names.len() - 1) as NetId
    }

    pub fn input(&mut self, name: impl Into<String>) -> NetId {
        let id = self.new_net(Some(name.into()));
        self.inputs.push(id);
        id
    }

    pub fn output(&mut self, net: NetId) {
        self.outputs.push(net);
    }

    pub fn name_net(&mut self, net: NetId, name: impl Into<String>) {
        self.net_names[net as usize] = Some(name.into());
    }

    pub fn gate(&mut self, kind: GateKind, inputs: &[NetId]) -> NetId {
        assert_eq!(inputs.len(), kind.arity(), "{kind} arity");
        for &n in inputs {
            assert!((n as usize) < self.net_names.len(), "unknown net {n}");
        }
        let output = self.new_net(None);
        self.gates.push(Gate {
            kind,
            inputs: [inputs[0], *inputs.get(1).unwrap_or(&inputs[0])],
            output,
        });
        output
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn nand(&mut self, a: NetId, b: NetId) -> NetId {
        self.gate(self.family.nand(), &[a, b])
    }

    pub fn inv(&mut self, a: NetId) -> NetId {
        self.gate(GateKind::CmosInv, &[a])
    }

    /// Four-NAND exclusive-OR.
    pub fn xor(&mut self, a: NetId, b: NetId) -> NetId {
        self.xor_with_nand(a, b).0
    }

    /// XOR that also hands back its first-level `NAND(a, b)`.
    fn xor_with_nand(&mut self, a: NetId, b: NetId) -> (NetId, NetId) {
        let n1 = self.nand(a, b);
        let n2 = self.nand(a, n1);
        let n3 = self.nand(b, n1);
        (self.nand(n2, n3), n1)
    }

    pub fn and2(&mut self, a: NetId, b: NetId) -> NetId {
        let n = self.nand(a, b);
        self.inv(n)
    }

    pub fn and3(&mut self, a: NetId, b: NetId, c: NetId) -> NetId {
        let ab = self.and2(a, b);
        self.and2(ab, c)
    }

    /// Nine-NAND full adder, returns `(sum, carry)`.
    ///
    /// `c` reaches the sum through three gates and the carry through two;
    /// `a` and `b` need six and five.
    pub fn full_adder(&mut self, a: NetId, b: NetId, c: NetId) -> (NetId, NetId) {
        let (p, n1) = self.xor_with_nand(a, b);
        let (sum, m1) = self.xor_with_nand(p, c);
        let carry = self.nand(n1, m1);
        (sum, carry)
    }

    pub fn finish(self) -> Netlist {
        let net_names = self
            .net_names
            .into_iter()
            .enumerate()
            .map(|(i, n)| n.unwrap_or_else(|| format!("n{i}")))
            .collect();
        Netlist {
            net_names,
            inputs: self.inputs,
            outputs: self.outputs,
            gates: self.gates,
        }
    }
}

pub fn build_xor() -> Netlist {
    let mut b = NetlistBuilder::new(LogicFamily::MemristorCmos);
    let (x, y) = (b.input("a"), b.input("b"));
    let out = b.xor(x, y);
    b.name_net(out, "y");
    b.output(out);
    b.finish()
}

pub fn build_and3() -> Netlist {
    let mut b = NetlistBuilder::new(LogicFamily::MemristorCmos);
    let (x, y, z) = (b.input("a"), b.input("b"), b.input("c"));
    let out = b.and3(x, y, z);
    b.name_net(out, "y");
    b.output(out);
    b.finish()
}

pub fn build_full_adder() -> Netlist {
    let mut b = NetlistBuilder::new(LogicFamily::MemristorCmos);
    let (x, y, cin) = (b.input("a"), b.input("b"), b.input("cin"));
    let (sum, cout) = b.full_adder(x, y, cin);
    b.name_net(sum, "sum");
    b.name_net(cout, "cout");
    b.output(sum);
    b.output(cout);
    b.finish()
}
