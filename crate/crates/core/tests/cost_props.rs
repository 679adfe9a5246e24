use std::sync::Arc;

use mcmul::array::{plan_partitions, ArraySimulator, MultiplierArray};
use mcmul::cost::{ArrayEnergyMeter, CostModel};
use mcmul::gates::LogicFamily;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn delay_is_monotone_in_width() {
    let m = CostModel::default();
    for n in [8, 16] {
        let d: Vec<f64> = (1..=n)
            .map(|w| m.critical_path_delay(&plan_partitions(n, &[w]).unwrap()))
            .collect();
        for (w, pair) in d.windows(2).enumerate() {
            assert!(pair[0] <= pair[1], "n = {n}: [{}] slower than [{}]", w + 1, w + 2);
        }
    }
}

#[test]
fn split_delay_sits_between_half_and_full() {
    let m = CostModel::default();
    let d = |w: &[usize]| m.critical_path_delay(&plan_partitions(8, w).unwrap());
    let (d4, d44, d8) = (d(&[4]), d(&[4, 4]), d(&[8]));
    assert!(d4 <= d44 && d44 < d8, "{d4} {d44} {d8}");
}

#[test]
fn area_is_blocks_times_block_area() {
    let m = CostModel::default();
    for family in [LogicFamily::MemristorCmos, LogicFamily::Cmos] {
        let block = m.area_estimate(1, family);
        assert!(block > 0.0);
        for n in [2usize, 4, 8, 16, 32] {
            let a = m.area_estimate(n, family);
            assert!((a - (n * n) as f64 * block).abs() < 1e-6 * a, "{family:?} n = {n}");
        }
    }
}

#[test]
fn split_workload_uses_less_energy() {
    let m = CostModel::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut full = Vec::new();
    let mut split = Vec::new();
    for _ in 0..500 {
        let (a, b): (u64, u64) = (rng.gen_range(0..256), rng.gen_range(0..256));
        full.push(vec![(a, b)]);
        split.push(vec![(a & 15, b & 15), (a >> 4, b >> 4)]);
    }
    let (e8, _) = m.workload_energy(&plan_partitions(8, &[8]).unwrap(), &full).unwrap();
    let (e44, _) = m.workload_energy(&plan_partitions(8, &[4, 4]).unwrap(), &split).unwrap();
    assert!(e44 < e8, "{e44} vs {e8}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_superposes(
        w1 in prop::collection::vec((0u64..256, 0u64..256), 1..20),
        w2 in prop::collection::vec((0u64..256, 0u64..256), 0..20),
    ) {
        let m = CostModel::default();
        let plan = plan_partitions(8, &[8]).unwrap();
        let wrap = |w: &[(u64, u64)]| w.iter().map(|&p| vec![p]).collect::<Vec<_>>();
        let joined: Vec<_> = w1.iter().chain(&w2).copied().collect();
        let (e_all, _) = m.workload_energy(&plan, &wrap(&joined)).unwrap();
        let (e1, _) = m.workload_energy(&plan, &wrap(&w1)).unwrap();
        // The array is combinational, so replaying the last pair of w1 from
        // reset restores the state w2 starts from.
        let last = *w1.last().unwrap();
        let (e_last, _) = m.workload_energy(&plan, &wrap(&[last])).unwrap();
        let tail: Vec<_> = std::iter::once(last).chain(w2.iter().copied()).collect();
        let (e_tail, _) = m.workload_energy(&plan, &wrap(&tail)).unwrap();
        let e2 = e_tail - e_last;
        prop_assert!((e_all - (e1 + e2)).abs() <= 1e-9 * e_all.max(1e-30));
    }

    #[test]
    fn other_partition_stays_silent(
        seg0 in prop::collection::vec((0u64..16, 0u64..16), 2..10),
        fixed in (0u64..16, 0u64..16),
    ) {
        let m = CostModel::default();
        let plan = plan_partitions(8, &[4, 4]).unwrap();
        let array = Arc::new(MultiplierArray::new(8));
        let mut sim = ArraySimulator::new(array.clone(), plan, m.delays());
        sim.simulate(&[seg0[0], fixed]).unwrap();
        for &p in &seg0[1..] {
            let trace = sim.simulate(&[p, fixed]).unwrap();
            for row in 4..8 {
                for col in 4..8 {
                    for g in array.block_gates(row, col) {
                        prop_assert_eq!(trace.toggles[g], 0, "block ({}, {})", row, col);
                    }
                }
            }
        }
    }

    #[test]
    fn repeated_input_is_free(a in 0u64..256, b in 0u64..256, reps in 2usize..6) {
        let m = CostModel::default();
        let mut meter = ArrayEnergyMeter::new(&m, plan_partitions(8, &[8]).unwrap());
        meter.run(&[(a, b)]).unwrap();
        let e = meter.energy();
        for _ in 1..reps {
            meter.run(&[(a, b)]).unwrap();
        }
        prop_assert_eq!(meter.energy(), e);
    }
}
