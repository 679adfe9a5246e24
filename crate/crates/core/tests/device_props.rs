use mcmul::device::{simulate_waveform, step_current, MemristorParams, MemristorState};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = MemristorParams> {
    (10.0..1e3f64, 2.0..200.0f64, 1e-9..5e-8f64, 1e-15..1e-13f64, 0u32..4).prop_map(
        |(r_on, ratio, d, mu_v, p)| MemristorParams {
            r_on,
            r_off: r_on * ratio,
            d,
            mu_v,
            window_exponent: p,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn state_stays_in_unit_interval(
        p in params(),
        wave in prop::collection::vec(-50.0..50.0f64, 1..400),
        dt in 1e-6..1e-1f64,
        x0 in 0.0..=1.0f64,
    ) {
        let tr = simulate_waveform(&p, &wave, dt, x0).unwrap();
        for s in &tr.samples {
            prop_assert!((0.0..=1.0).contains(&s.x));
        }
        prop_assert!((0.0..=1.0).contains(&tr.final_state.x));
    }

    #[test]
    fn recorded_integrals_are_exact(
        wave in prop::collection::vec(-5.0..5.0f64, 1..200),
        dt in 1e-6..1e-3f64,
        x0 in 0.0..=1.0f64,
    ) {
        let tr = simulate_waveform(&MemristorParams::default(), &wave, dt, x0).unwrap();
        let (mut si, mut sv) = (0.0, 0.0);
        for (k, s) in tr.samples.iter().enumerate() {
            si += s.i;
            sv += s.v;
            prop_assert_eq!(s.q, dt * si);
            prop_assert_eq!(s.phi, dt * sv);
            prop_assert_eq!(s.i, s.v / s.m);
            prop_assert_eq!(s.t, (k + 1) as f64 * dt);
            if k > 0 {
                prop_assert!(s.t > tr.samples[k - 1].t);
            }
        }
    }

    #[test]
    fn zero_voltage_means_zero_current(
        wave in prop::collection::vec(prop_oneof![Just(0.0), -3.0..3.0f64], 1..200),
        x0 in 0.0..=1.0f64,
    ) {
        let tr = simulate_waveform(&MemristorParams::default(), &wave, 1e-4, x0).unwrap();
        for s in tr.samples.iter().filter(|s| s.v == 0.0) {
            prop_assert_eq!(s.i, 0.0);
        }
    }

    #[test]
    fn current_steps_stay_bounded(i in -1.0..1.0f64, steps in 1usize..500, x0 in 0.0..=1.0f64) {
        let p = MemristorParams::default();
        let mut s = MemristorState::new(x0);
        for _ in 0..steps {
            s = step_current(&s, &p, i, 1e-3);
            prop_assert!((0.0..=1.0).contains(&s.x));
        }
    }
}
