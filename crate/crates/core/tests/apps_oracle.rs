use mcmul::apps::reference::{reference_fft4, reference_fft4_stream, reference_fir};
use mcmul::apps::{fft4, fft4_stream, fir_filter, ComplexSample, DspPlan, FftConfig, FirConfig, FixedSample, TwiddleMode};
use mcmul::cost::CostModel;
use proptest::prelude::*;

fn signed(bits: u32) -> impl Strategy<Value = i64> {
    let m = (1i64 << bits) - 1;
    -m..=m
}

fn plan() -> impl Strategy<Value = DspPlan> {
    prop_oneof![Just(DspPlan::Full8), Just(DspPlan::Split44)]
}

fn samples(v: &[i64]) -> Vec<FixedSample> {
    v.iter().map(|&x| FixedSample::from_i64(x)).collect()
}

fn ints(v: &[FixedSample]) -> Vec<i64> {
    v.iter().map(|s| s.to_i64()).collect()
}

#[test]
fn zero_signal_or_zero_taps_gives_zero() {
    let m = CostModel::default();
    for plan in [DspPlan::Full8, DspPlan::Split44] {
        let cfg = FirConfig::new(vec![5, -3, 2, 7], plan);
        let out = fir_filter(&cfg, &samples(&[0; 12]), &m).unwrap();
        assert!(out.outputs.iter().all(|s| *s == FixedSample::ZERO));
        let cfg = FirConfig::new(vec![0; 4], plan);
        let out = fir_filter(&cfg, &samples(&[9, -4, 15, 1, -15]), &m).unwrap();
        assert!(out.outputs.iter().all(|s| *s == FixedSample::ZERO));
    }
}

#[test]
fn reference_fir_impulse_lists_taps() {
    let cfg = FirConfig::new(vec![200, -17, 0, 255], DspPlan::Full8);
    let out = reference_fir(&cfg, &samples(&[1, 0, 0, 0, 0, 0])).unwrap();
    assert_eq!(ints(&out), vec![200, -17, 0, 255, 0, 0]);
}

#[test]
fn constant_input_lands_in_bin_zero() {
    let m = CostModel::default();
    for c in [0i64, 1, 37, -90, 127, -127] {
        let cfg = FftConfig::new(DspPlan::Full8, TwiddleMode::Exact);
        let x = [ComplexSample::new(c, 0); 4];
        let bins = fft4(&cfg, x, &m).unwrap();
        let want = [(4 * c, 0), (0, 0), (0, 0), (0, 0)];
        assert_eq!(bins.map(|b| b.to_i64()), want, "c = {c}");
    }
    for c in [-7i64, 3, 7] {
        let cfg = FftConfig::new(DspPlan::Split44, TwiddleMode::Exact);
        let bins = fft4(&cfg, [ComplexSample::new(c, 0); 4], &m).unwrap();
        assert_eq!(bins[0].to_i64(), (4 * c, 0));
    }
}

/// Wide-arithmetic inverse DFT, scaled by 4.
fn inverse_times_4(bins: [(i64, i64); 4]) -> [(i64, i64); 4] {
    let mut out = [(0, 0); 4];
    for (n, o) in out.iter_mut().enumerate() {
        for (k, &(re, im)) in bins.iter().enumerate() {
            // e^{+j 2 pi n k / 4} = j^(n k)
            let (wr, wi) = [(1, 0), (0, 1), (-1, 0), (0, -1)][(n * k) % 4];
            o.0 += re * wr - im * wi;
            o.1 += re * wi + im * wr;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fir_matches_reference(
        p in plan(),
        coeffs in prop::collection::vec(signed(8), 4),
        xs in prop::collection::vec(signed(8), 0..64),
    ) {
        let drop = 8 - p.operand_bits();
        let narrow = |v: &[i64]| v.iter().map(|&x| FixedSample::from_i64(x) >> drop).collect::<Vec<_>>();
        let cfg = FirConfig::new(ints(&narrow(&coeffs)), p);
        let xs = narrow(&xs);
        let got = fir_filter(&cfg, &xs, &CostModel::default()).unwrap().outputs;
        prop_assert_eq!(got, reference_fir(&cfg, &xs).unwrap());
    }

    #[test]
    fn fft_matches_reference(
        p in plan(),
        seed in any::<u64>(),
        exact in any::<bool>(),
        raw in prop::collection::vec(prop::array::uniform4((signed(8), signed(8))), 1..16),
    ) {
        let drop = 8 - p.operand_bits();
        let tw = if exact { TwiddleMode::Exact } else { TwiddleMode::Random { seed } };
        let cfg = FftConfig::new(p, tw);
        let xs: Vec<_> = raw.iter().map(|v| v.map(|(r, i)| ComplexSample::new(r, i) >> drop)).collect();
        let got = fft4_stream(&cfg, &xs, &CostModel::default()).unwrap().bins;
        prop_assert_eq!(got, reference_fft4_stream(&cfg, &xs).unwrap());
    }

    #[test]
    fn reference_fft_inverts(x in prop::array::uniform4((signed(6), signed(6)))) {
        let cfg = FftConfig::new(DspPlan::Full8, TwiddleMode::Exact);
        let input = x.map(|(r, i)| ComplexSample::new(r, i));
        let bins = reference_fft4(&cfg, input).unwrap().map(|b| b.to_i64());
        let back = inverse_times_4(bins);
        for (b, (r, i)) in back.iter().zip(x) {
            prop_assert_eq!(*b, (4 * r, 4 * i));
        }
    }

    #[test]
    fn fir_is_linear_below_saturation(
        coeffs in prop::collection::vec(signed(5), 4),
        x in prop::collection::vec(signed(6), 1..24),
        y in prop::collection::vec(signed(6), 1..24),
    ) {
        let len = x.len().min(y.len());
        let cfg = FirConfig::new(coeffs, DspPlan::Full8);
        let m = CostModel::default();
        let run = |v: Vec<i64>| ints(&fir_filter(&cfg, &samples(&v), &m).unwrap().outputs);
        let sum: Vec<i64> = x[..len].iter().zip(&y[..len]).map(|(a, b)| a + b).collect();
        let fx = run(x[..len].to_vec());
        let fy = run(y[..len].to_vec());
        let fs = run(sum);
        for k in 0..len {
            prop_assert_eq!(fs[k], fx[k] + fy[k]);
        }
    }
}
