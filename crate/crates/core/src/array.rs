//! Reconfigurable N x N array multiplier.
//!
//! Each block holds an XOR of its column control bit `h[col]` and row control
//! bit `v[row]`, a 3-input AND that gates the partial product `a[col] & b[row]`
//! with that enable, and a full adder. Rows are ripple-carry adders: carries
//! run along a row, sums drop diagonally into the next row, and the last row
//! resolves the upper product bits. A disabled block adds a zero partial
//! product, so whatever reaches it ripples through unchanged.
//!
//! A partition of width `w` at bit offset `o` occupies the diagonal square of
//! rows and columns `o..o + w`; its product appears at raw output bits
//! `2o..2o + 2w`.

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{DelayTable, LogicFamily, NetState, Netlist, NetlistBuilder};

pub const SUPPORTED_WIDTHS: [usize; 5] = [2, 4, 8, 16, 32];
pub const MAX_WIDTH: usize = 32;

/// Column (`h`) and row (`v`) control bits, position 0 = LSB.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ControlVectors {
    h: Vec<bool>,
    v: Vec<bool>,
}

impl ControlVectors {
    pub fn new(h: Vec<bool>, v: Vec<bool>) -> Result<Self> {
        if h.len() != v.len() || h.is_empty() || h.len() > MAX_WIDTH {
            return Err(Error::BadControlVector(format!("{} / {} bits", h.len(), v.len())));
        }
        Ok(ControlVectors { h, v })
    }

    /// Parses MSB-first strings such as `"11100000"`.
    pub fn from_strings(h: &str, v: &str) -> Result<Self> {
        let parse = |s: &str| -> Result<Vec<bool>> {
            s.chars()
                .rev()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::BadControlVector(s.to_string())),
                })
                .collect()
        };
        let (hb, vb) = (parse(h)?, parse(v)?);
        if hb.len() != vb.len() {
            return Err(Error::BadControlVector(format!("{h} / {v}")));
        }
        ControlVectors::new(hb, vb)
    }

    /// Builds vectors of width `n` from the low bits of two integers.
    pub fn from_bits(n: usize, h: u64, v: u64) -> Result<Self> {
        ControlVectors::new(
            (0..n).map(|k| h >> k & 1 == 1).collect(),
            (0..n).map(|k| v >> k & 1 == 1).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[bool] {
        &self.h
    }

    pub fn v(&self) -> &[bool] {
        &self.v
    }

    pub fn h_string(&self) -> String {
        render_msb_first(&self.h)
    }

    pub fn v_string(&self) -> String {
        render_msb_first(&self.v)
    }
}

fn render_msb_first(bits: &[bool]) -> String {
    bits.iter().rev().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Block enables of an array, `get(row, col) = v[row] ^ h[col]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnabledMask {
    n: usize,
    bits: Vec<bool>,
}

impl EnabledMask {
    pub fn zeros(n: usize) -> Self {
        EnabledMask {
            n,
            bits: vec![false; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, on: bool) {
        self.bits[row * self.n + col] = on;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Adds the diagonal square `offset..offset + width`.
    pub fn add_square(&mut self, offset: usize, width: usize) {
        for r in offset..offset + width {
            for c in offset..offset + width {
                self.set(r, c, true);
            }
        }
    }
}

impl fmt::Display for EnabledMask {
    /// One line per row from the top row down, columns MSB-first, so the
    /// picture reads like the control strings.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in (0..self.n).rev() {
            let line: String = (0..self.n)
                .rev()
                .map(|col| if self.get(row, col) { '#' } else { '.' })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

pub fn enabled_mask(ctrl: &ControlVectors) -> EnabledMask {
    let n = ctrl.n();
    let mut mask = EnabledMask::zeros(n);
    for row in 0..n {
        for col in 0..n {
            mask.set(row, col, ctrl.v[row] ^ ctrl.h[col]);
        }
    }
    mask
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub offset: usize,
    pub width: usize,
    /// `true` for the `v = 1, h = 0` parity, `false` for `v = 0, h = 1`.
    pub v_high: bool,
}

impl Segment {
    pub fn bits(&self) -> Range<usize> {
        self.offset..self.offset + self.width
    }

    /// Raw product bits holding this segment's result.
    pub fn product_bits(&self) -> Range<usize> {
        2 * self.offset..2 * (self.offset + self.width)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPlan {
    n: usize,
    segments: Vec<Segment>,
    controls: ControlVectors,
}

impl PartitionPlan {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn controls(&self) -> &ControlVectors {
        &self.controls
    }

    pub fn widths(&self) -> Vec<usize> {
        self.segments.iter().map(|s| s.width).collect()
    }

    /// Positions above the last segment, if the plan leaves any.
    pub fn idle_bits(&self) -> Range<usize> {
        let used = self.segments.iter().map(|s| s.width).sum::<usize>();
        used..self.n
    }

    /// Union of the segments' diagonal squares.
    pub fn segment_mask(&self) -> EnabledMask {
        let mut m = EnabledMask::zeros(self.n);
        for s in &self.segments {
            m.add_square(s.offset, s.width);
        }
        m
    }

    /// Mask the control vectors are expected to produce: the segment squares
    /// plus, for a single narrow segment, the idle square above it.
    pub fn expected_mask(&self) -> EnabledMask {
        let mut m = self.segment_mask();
        let idle = self.idle_bits();
        if !idle.is_empty() {
            m.add_square(idle.start, idle.len());
        }
        m
    }

    /// Whether bus position `bit` feeds some segment.
    pub fn is_live_bit(&self, bit: usize) -> bool {
        self.segments.iter().any(|s| s.bits().contains(&bit))
    }
}

impl fmt::Display for PartitionPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let widths: Vec<String> = self.widths().iter().map(|w| w.to_string()).collect();
        write!(
            f,
            "n = {}, widths = [{}], h = {}, v = {}",
            self.n,
            widths.join(", "),
            self.controls.h_string(),
            self.controls.v_string()
        )
    }
}

/// Packs `widths` from bit 0 upward and derives the control vectors.
///
/// Enables follow `h[col] ^ v[row]`, so rows and columns split into two
/// classes and at most two diagonal squares can be isolated from each other.
/// The first segment takes `v = 1, h = 0` and the second `v = 0, h = 1`. With
/// a single segment narrower than the array, the unused positions take the
/// opposite parity: they form an idle square whose bus bits are held at zero
/// and whose products land above the segment's output bits.
pub fn plan_partitions(n: usize, widths: &[usize]) -> Result<PartitionPlan> {
    if !SUPPORTED_WIDTHS.contains(&n) {
        return Err(Error::UnsupportedArrayWidth(n));
    }
    if widths.is_empty() {
        return Err(Error::NoPartitions);
    }
    if let Some(index) = widths.iter().position(|&w| w == 0) {
        return Err(Error::ZeroWidth { index });
    }
    if widths.len() > 2 {
        return Err(Error::UnsupportedPartitioning(format!(
            "{} partitions requested; one h/v pair isolates at most 2",
            widths.len()
        )));
    }
    let total: usize = widths.iter().sum();
    if total > n {
        return Err(Error::WidthOverflow { total, n });
    }
    if widths.len() == 2 && total < n {
        return Err(Error::UnsupportedPartitioning(format!(
            "two partitions must cover all {n} bits (got {total}); \
             the unused bits would need a third control parity"
        )));
    }

    let mut segments = Vec::with_capacity(widths.len());
    let mut offset = 0;
    for (k, &width) in widths.iter().enumerate() {
        segments.push(Segment {
            offset,
            width,
            v_high: k == 0,
        });
        offset += width;
    }

    let mut h = vec![true; n];
    let mut v = vec![false; n];
    for s in &segments {
        for bit in s.bits() {
            h[bit] = !s.v_high;
            v[bit] = s.v_high;
        }
    }
    Ok(PartitionPlan {
        n,
        segments,
        controls: ControlVectors::new(h, v)?,
    })
}

/// Whether the array is the reconfigurable design or a fixed conventional
/// ripple-carry array (AND-gated partial products, no control inputs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArrayStyle {
    Reconfigurable,
    Conventional,
}

/// Gate-level array netlist.
///
/// Primary inputs are ordered `a[0..n], b[0..n]`, then for the reconfigurable
/// style `h[0..n], v[0..n]`, and finally a tie-low net `gnd`. Outputs are the
/// `2n` product bits, LSB first.
#[derive(Debug, Clone)]
pub struct MultiplierArray {
    n: usize,
    style: ArrayStyle,
    netlist: Netlist,
    blocks: Vec<Range<usize>>,
}

impl MultiplierArray {
    /// Reconfigurable array in memristor-CMOS logic.
    pub fn new(n: usize) -> Self {
        Self::build(n, ArrayStyle::Reconfigurable, LogicFamily::MemristorCmos)
    }

    /// Fixed array without enable logic, in the given family.
    pub fn conventional(n: usize, family: LogicFamily) -> Self {
        Self::build(n, ArrayStyle::Conventional, family)
    }

    pub fn shared(n: usize) -> Arc<Self> {
        Arc::new(Self::new(n))
    }

    fn build(n: usize, style: ArrayStyle, family: LogicFamily) -> Self {
        assert!(n <= MAX_WIDTH, "array width {n} exceeds {MAX_WIDTH}");
        let mut b = NetlistBuilder::new(family);
        let a: Vec<_> = (0..n).map(|k| b.input(format!("a{k}"))).collect();
        let bb: Vec<_> = (0..n).map(|k| b.input(format!("b{k}"))).collect();
        let (h, v): (Vec<_>, Vec<_>) = match style {
            ArrayStyle::Reconfigurable => (
                (0..n).map(|k| b.input(format!("h{k}"))).collect(),
                (0..n).map(|k| b.input(format!("v{k}"))).collect(),
            ),
            ArrayStyle::Conventional => (Vec::new(), Vec::new()),
        };
        let gnd = b.input("gnd");

        let mut sout = vec![vec![gnd; n]; n];
        let mut cout = vec![vec![gnd; n]; n];
        let mut blocks = Vec::with_capacity(n * n);
        for row in 0..n {
            for col in 0..n {
                let first = b.gate_count();
                let pp = match style {
                    ArrayStyle::Reconfigurable => {
                        let en = b.xor(h[col], v[row]);
                        b.and3(a[col], bb[row], en)
                    }
                    ArrayStyle::Conventional => b.and2(a[col], bb[row]),
                };
                let sin = match (row, col) {
                    (0, _) => gnd,
                    (r, c) if c + 1 < n => sout[r - 1][c + 1],
                    (r, c) => cout[r - 1][c],
                };
                let cin = if col == 0 { gnd } else { cout[row][col - 1] };
                // The sum-in takes the fast port: partial sums crossing
                // disabled blocks pay three gate levels per block.
                let (s, c) = b.full_adder(pp, cin, sin);
                sout[row][col] = s;
                cout[row][col] = c;
                blocks.push(first..b.gate_count());
            }
        }

        let mut product = Vec::with_capacity(2 * n);
        product.extend(sout.iter().map(|row| row[0]));
        if n > 0 {
            product.extend(&sout[n - 1][1..]);
            product.push(cout[n - 1][n - 1]);
        }
        for (k, &net) in product.iter().enumerate() {
            b.name_net(net, format!("p{k}"));
            b.output(net);
        }
        MultiplierArray {
            n,
            style,
            netlist: b.finish(),
            blocks,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn style(&self) -> ArrayStyle {
        self.style
    }

    pub fn netlist(&self) -> &Netlist {
        &self.netlist
    }

    /// Gate index range of block `(row, col)`.
    pub fn block_gates(&self, row: usize, col: usize) -> Range<usize> {
        self.blocks[row * self.n + col].clone()
    }

    /// Primary input vector for the given buses and controls.
    pub fn input_vector(&self, a_bus: u64, b_bus: u64, ctrl: Option<&ControlVectors>) -> Vec<bool> {
        let n = self.n;
        let mut ins = Vec::with_capacity(self.netlist.inputs().len());
        ins.extend((0..n).map(|k| a_bus >> k & 1 == 1));
        ins.extend((0..n).map(|k| b_bus >> k & 1 == 1));
        if self.style == ArrayStyle::Reconfigurable {
            let ctrl = ctrl.expect("reconfigurable array needs control vectors");
            assert_eq!(ctrl.n(), n, "control vector width");
            ins.extend_from_slice(ctrl.h());
            ins.extend_from_slice(ctrl.v());
        }
        ins.push(false);
        ins
    }

    /// Tie-offs for static timing of `segment` under `plan`: the segment's
    /// bus bits are sources, every other input is a constant.
    pub fn timing_ties(&self, plan: &PartitionPlan, segment: &Segment) -> Vec<Option<bool>> {
        let live = |bit: usize| segment.bits().contains(&bit);
        self.ties_with(plan.controls(), live)
    }

    pub(crate) fn ties_with(
        &self,
        ctrl: &ControlVectors,
        live: impl Fn(usize) -> bool,
    ) -> Vec<Option<bool>> {
        let n = self.n;
        let mut ties = Vec::with_capacity(self.netlist.inputs().len());
        for _bus in 0..2 {
            ties.extend((0..n).map(|k| if live(k) { None } else { Some(false) }));
        }
        if self.style == ArrayStyle::Reconfigurable {
            ties.extend(ctrl.h().iter().map(|&b| Some(b)));
            ties.extend(ctrl.v().iter().map(|&b| Some(b)));
        }
        ties.push(Some(false));
        ties
    }
}

fn low_bits(x: u64, k: usize) -> u64 {
    if k >= 64 {
        x
    } else {
        x & ((1u64 << k) - 1)
    }
}

fn shr(x: u64, k: usize) -> u64 {
    if k >= 64 {
        0
    } else {
        x >> k
    }
}

/// Result of one array evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayTrace {
    /// The `2n` output bits, LSB first.
    pub raw_product: u64,
    /// Output transitions per gate relative to the previous evaluation.
    pub toggles: Vec<u32>,
    pub total_toggles: u64,
    /// Static critical path of the configured array (seconds).
    pub critical_delay: f64,
}

/// Static critical path of `plan` on `array`: for each segment, the longest
/// path from its bus bits to its product bits with every other input tied
/// off; the plan's delay is the worst segment.
pub fn plan_delay(array: &MultiplierArray, plan: &PartitionPlan, delays: &DelayTable) -> f64 {
    plan.segments()
        .iter()
        .map(|seg| segment_delay(array, plan, seg, delays))
        .fold(0.0, f64::max)
}

pub fn segment_delay(
    array: &MultiplierArray,
    plan: &PartitionPlan,
    seg: &Segment,
    delays: &DelayTable,
) -> f64 {
    let ties = array.timing_ties(plan, seg);
    let st = array
        .netlist()
        .static_timing(&ties, delays)
        .expect("ties match the array inputs");
    seg.product_bits()
        .filter_map(|bit| st.arrival[array.netlist().outputs()[bit] as usize])
        .fold(0.0, f64::max)
}

/// A configured array with its own toggle history.
#[derive(Debug, Clone)]
pub struct ArraySimulator {
    array: Arc<MultiplierArray>,
    plan: PartitionPlan,
    state: NetState,
    critical_delay: f64,
}

impl ArraySimulator {
    pub fn new(array: Arc<MultiplierArray>, plan: PartitionPlan, delays: &DelayTable) -> Self {
        assert_eq!(array.n(), plan.n(), "plan width must match the array");
        assert_eq!(array.style(), ArrayStyle::Reconfigurable);
        let critical_delay = plan_delay(&array, &plan, delays);
        let state = array.netlist().zero_state();
        ArraySimulator {
            array,
            plan,
            state,
            critical_delay,
        }
    }

    pub fn plan(&self) -> &PartitionPlan {
        &self.plan
    }

    pub fn array(&self) -> &MultiplierArray {
        &self.array
    }

    pub fn critical_delay(&self) -> f64 {
        self.critical_delay
    }

    /// Places each `(a, b)` pair on its segment's bus bits.
    pub fn buses(&self, pairs: &[(u64, u64)]) -> Result<(u64, u64)> {
        let segs = self.plan.segments();
        if pairs.len() != segs.len() {
            return Err(Error::PairCount {
                expected: segs.len(),
                got: pairs.len(),
            });
        }
        let (mut a_bus, mut b_bus) = (0u64, 0u64);
        for (seg, &(a, b)) in segs.iter().zip(pairs) {
            for value in [a, b] {
                if shr(value, seg.width) != 0 {
                    return Err(Error::OperandOverflow {
                        value,
                        width: seg.width,
                    });
                }
            }
            a_bus |= a << seg.offset;
            b_bus |= b << seg.offset;
        }
        Ok((a_bus, b_bus))
    }

    pub fn simulate(&mut self, pairs: &[(u64, u64)]) -> Result<ArrayTrace> {
        let (a_bus, b_bus) = self.buses(pairs)?;
        Ok(self.simulate_buses(a_bus, b_bus))
    }

    /// Evaluates raw bus values, including bits outside every segment.
    pub fn simulate_buses(&mut self, a_bus: u64, b_bus: u64) -> ArrayTrace {
        let nl = self.array.netlist();
        let inputs = self
            .array
            .input_vector(a_bus, b_bus, Some(self.plan.controls()));
        let mut toggles = vec![0u32; nl.gate_count()];
        let total_toggles = nl
            .step(&inputs, &mut self.state, &mut toggles)
            .expect("input vector matches the array");
        let raw_product = nl
            .outputs()
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &net)| acc | (self.state.value(net) as u64) << k);
        ArrayTrace {
            raw_product,
            toggles,
            total_toggles,
            critical_delay: self.critical_delay,
        }
    }
}

/// Evaluates one set of operand pairs on a fresh array (zero toggle history).
pub fn simulate_multiply(
    plan: &PartitionPlan,
    pairs: &[(u64, u64)],
    delays: &DelayTable,
) -> Result<ArrayTrace> {
    let mut sim = ArraySimulator::new(MultiplierArray::shared(plan.n()), plan.clone(), delays);
    sim.simulate(pairs)
}

/// Splits a raw product into per-segment products.
pub fn extract_products(plan: &PartitionPlan, raw_product: u64) -> Vec<u64> {
    plan.segments()
        .iter()
        .map(|s| low_bits(shr(raw_product, 2 * s.offset), 2 * s.width))
        .collect()
}

/// Plans, simulates and extracts in one call.
pub fn multiply(n: usize, widths: &[usize], pairs: &[(u64, u64)]) -> Result<Vec<u64>> {
    let plan = plan_partitions(n, widths)?;
    let delays = DelayTable::new(&Default::default(), &Default::default());
    let trace = simulate_multiply(&plan, pairs, &delays)?;
    Ok(extract_products(&plan, trace.raw_product))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delays() -> DelayTable {
        DelayTable::new(&Default::default(), &Default::default())
    }

    #[test]
    fn control_strings_round_trip() {
        let c = ControlVectors::from_strings("11100000", "00011111").unwrap();
        assert_eq!(c.h_string(), "11100000");
        assert_eq!(c.v_string(), "00011111");
        assert!(c.h()[7] && !c.h()[0]);
        assert!(ControlVectors::from_strings("1010", "10").is_err());
        assert!(ControlVectors::from_strings("10x0", "1010").is_err());
    }

    #[test]
    fn plan_examples() {
        let p = plan_partitions(8, &[5, 3]).unwrap();
        assert_eq!(p.controls().h_string(), "11100000");
        assert_eq!(p.controls().v_string(), "00011111");
        let p = plan_partitions(8, &[8]).unwrap();
        assert_eq!(p.controls().h_string(), "00000000");
        assert_eq!(p.controls().v_string(), "11111111");
        let p = plan_partitions(4, &[2, 2]).unwrap();
        assert_eq!(p.controls().h_string(), "1100");
        assert_eq!(p.controls().v_string(), "0011");
    }

    #[test]
    fn plan_errors() {
        assert!(matches!(
            plan_partitions(8, &[3, 3, 2]),
            Err(Error::UnsupportedPartitioning(_))
        ));
        assert_eq!(
            plan_partitions(8, &[5, 4]),
            Err(Error::WidthOverflow { total: 9, n: 8 })
        );
        assert_eq!(plan_partitions(8, &[9]), Err(Error::WidthOverflow { total: 9, n: 8 }));
        assert_eq!(plan_partitions(8, &[4, 0]), Err(Error::ZeroWidth { index: 1 }));
        assert_eq!(plan_partitions(8, &[]), Err(Error::NoPartitions));
        assert_eq!(plan_partitions(6, &[3]), Err(Error::UnsupportedArrayWidth(6)));
        assert!(matches!(
            plan_partitions(8, &[3, 2]),
            Err(Error::UnsupportedPartitioning(_))
        ));
    }

    #[test]
    fn mask_rule() {
        let all_off = ControlVectors::from_strings("0000", "0000").unwrap();
        assert_eq!(enabled_mask(&all_off).count(), 0);
        let all_on = ControlVectors::from_strings("0000", "1111").unwrap();
        assert_eq!(enabled_mask(&all_on).count(), 16);
        let p = plan_partitions(8, &[5, 3]).unwrap();
        let m = enabled_mask(p.controls());
        for r in 0..8 {
            for c in 0..8 {
                let expect = (r < 5 && c < 5) || (r >= 5 && c >= 5);
                assert_eq!(m.get(r, c), expect, "({r},{c})");
            }
        }
    }

    #[test]
    fn idle_square_for_narrow_single_segment() {
        let p = plan_partitions(8, &[3]).unwrap();
        assert_eq!(p.idle_bits(), 3..8);
        assert_eq!(enabled_mask(p.controls()), p.expected_mask());
        assert_eq!(p.expected_mask().count(), 9 + 25);
    }

    #[test]
    fn mask_display() {
        let p = plan_partitions(4, &[2, 2]).unwrap();
        assert_eq!(enabled_mask(p.controls()).to_string(), "##..\n##..\n..##\n..##\n");
    }

    #[test]
    fn eight_bit_example() {
        assert_eq!(multiply(8, &[8], &[(13, 11)]).unwrap(), vec![143]);
        let p = plan_partitions(8, &[8]).unwrap();
        let t = simulate_multiply(&p, &[(13, 11)], &delays()).unwrap();
        assert_eq!(t.raw_product, 143);
    }

    #[test]
    fn split_examples() {
        assert_eq!(multiply(8, &[5, 3], &[(21, 19), (5, 6)]).unwrap(), vec![399, 30]);
        assert_eq!(multiply(8, &[4, 4], &[(15, 15), (15, 15)]).unwrap(), vec![225, 225]);
        assert_eq!(multiply(4, &[3, 1], &[(7, 5), (1, 1)]).unwrap(), vec![35, 1]);
        assert_eq!(multiply(8, &[8], &[(0, 201)]).unwrap(), vec![0]);
    }

    #[test]
    fn extract_matches_shift_mask() {
        let p = plan_partitions(8, &[5, 3]).unwrap();
        assert_eq!(extract_products(&p, 399 + (30 << 10)), vec![399, 30]);
        let p = plan_partitions(8, &[8]).unwrap();
        assert_eq!(extract_products(&p, 143), vec![143]);
        let p = plan_partitions(32, &[32]).unwrap();
        assert_eq!(extract_products(&p, u64::MAX), vec![u64::MAX]);
    }

    #[test]
    fn narrow_segment_leaves_upper_bits_clear() {
        let p = plan_partitions(8, &[4]).unwrap();
        let d = delays();
        for (a, b) in [(15, 15), (9, 7), (0, 3)] {
            let t = simulate_multiply(&p, &[(a, b)], &d).unwrap();
            assert_eq!(t.raw_product, a * b);
            assert_eq!(t.raw_product >> 8, 0);
        }
    }

    #[test]
    fn operand_checks() {
        let p = plan_partitions(8, &[5, 3]).unwrap();
        let d = delays();
        assert_eq!(
            simulate_multiply(&p, &[(32, 1), (1, 1)], &d).unwrap_err(),
            Error::OperandOverflow { value: 32, width: 5 }
        );
        assert_eq!(
            simulate_multiply(&p, &[(1, 1)], &d).unwrap_err(),
            Error::PairCount { expected: 2, got: 1 }
        );
    }

    #[test]
    fn repeated_operands_stop_toggling() {
        let p = plan_partitions(8, &[8]).unwrap();
        let mut sim = ArraySimulator::new(MultiplierArray::shared(8), p, &delays());
        let first = sim.simulate(&[(200, 77)]).unwrap();
        assert!(first.total_toggles > 0);
        let again = sim.simulate(&[(200, 77)]).unwrap();
        assert_eq!(again.total_toggles, 0);
        assert_eq!(again.raw_product, 200 * 77);
    }

    #[test]
    fn block_composition() {
        let arr = MultiplierArray::new(4);
        assert_eq!(arr.netlist().gate_count(), 16 * 17);
        assert_eq!(arr.block_gates(0, 1), 17..34);
        let conv = MultiplierArray::conventional(4, LogicFamily::Cmos);
        assert_eq!(conv.netlist().gate_count(), 16 * 11);
    }

    #[test]
    fn conventional_array_multiplies() {
        let arr = MultiplierArray::conventional(4, LogicFamily::Cmos);
        let d = delays();
        for a in 0..16u64 {
            for b in 0..16u64 {
                let ins = arr.input_vector(a, b, None);
                let (r, _) = arr.netlist().eval(&ins, &d, None).unwrap();
                let p = r
                    .outputs
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (k, &bit)| acc | (bit as u64) << k);
                assert_eq!(p, a * b);
            }
        }
    }
}
