use std::fs;
use std::path::Path;
use std::process::Command;

use mcmul::apps::reference::{reference_fft4_stream, reference_fir};
use mcmul::apps::{ComplexSample, DspPlan, FftConfig, FirConfig, FixedSample, TwiddleMode};
use mcmul::cost::TechConstants;
use mcmul::device::MemristorParams;
use mcmul_cli::{run, Document, Scenario, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION};
use serde_json::Value;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn mcmul(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mcmul").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn ok(args: &[&str]) -> String {
    let r = mcmul(args);
    assert_eq!(r.code, EXIT_OK, "{args:?} failed: {}", r.err);
    r.out
}

fn doc(args: &[&str]) -> Document {
    serde_json::from_str(&ok(args)).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn plan_prints_control_strings_and_mask() {
    let out = ok(&["plan", "--n", "8", "--widths", "5,3"]);
    assert!(out.contains("h=11100000 v=00011111"), "{out}");

    let d = doc(&["plan", "--n", "8", "--widths", "5,3", "--format", "json"]);
    let mask: Vec<String> = serde_json::from_value(d.results["mask"].clone()).unwrap();
    // Top row first: rows 7..5 hold the 3x3 square at columns 7..5, rows
    // 4..0 the 5x5 square at columns 4..0.
    let mut expected = vec!["###.....".to_string(); 3];
    expected.extend(vec!["...#####".to_string(); 5]);
    assert_eq!(mask, expected);
    assert_eq!(d.results["enabled_blocks"], 34);
}

#[test]
fn multiply_reports_products() {
    let d = doc(&["multiply", "--n", "8", "--widths", "5,3", "--pairs", "21x19,5x6", "--format", "json"]);
    assert_eq!(d.command, "multiply");
    assert_eq!(d.results["products"], serde_json::json!([399, 30]));
    let c = &d.cost["reconfigurable"];
    assert!(c.ratios.is_some());
    assert!(c.published_ratios.is_none());
    assert!(d.cost["baseline"].ratios.is_none());
}

#[test]
fn multiply_steps_and_random_workload() {
    let d = doc(&["multiply", "--n", "4", "--widths", "2,2", "--pairs", "3x3,2x1;1x2,0x3", "--format", "json"]);
    assert_eq!(d.results["products"], serde_json::json!([9, 2, 2, 0]));

    let d = doc(&["multiply", "--n", "16", "--widths", "9,7", "--random", "5", "--seed", "11", "--format", "json"]);
    for step in d.results["steps"].as_array().unwrap() {
        let ops = step["operands"].as_array().unwrap();
        let prods = step["products"].as_array().unwrap();
        for (o, p) in ops.iter().zip(prods) {
            assert_eq!(o[0].as_u64().unwrap() * o[1].as_u64().unwrap(), p.as_u64().unwrap());
        }
    }
}

#[test]
fn full_width_32_bit_multiply_carries_published_ratios() {
    let d = doc(&["multiply", "--n", "32", "--pairs", "4000000000x3", "--format", "json"]);
    assert_eq!(d.results["products"], serde_json::json!([12_000_000_000u64]));
    let c = &d.cost["reconfigurable"];
    let published = c.published_ratios.unwrap();
    assert_eq!(published.area, 0.83);
    assert!((c.ratios.unwrap().area - 0.83).abs() <= 0.05);
}

#[test]
fn unsupported_partitioning_is_a_validation_error() {
    let r = mcmul(&["plan", "--n", "8", "--widths", "3,3,2"]);
    assert_eq!(r.code, EXIT_VALIDATION);
    assert!(r.err.contains("UnsupportedPartitioning"), "{}", r.err);
    assert_eq!(r.err.lines().count(), 1);
    assert!(r.out.is_empty());
}

#[test]
fn module_errors_name_the_precondition() {
    let cases: [(&[&str], &str); 5] = [
        (&["plan", "--n", "6"], "UnsupportedArrayWidth"),
        (&["plan", "--n", "8", "--widths", "5,4"], "WidthOverflow"),
        (&["multiply", "--n", "8", "--widths", "5,3", "--pairs", "32x1,1x1"], "OperandOverflow"),
        (&["multiply", "--n", "8", "--widths", "5,3", "--pairs", "3x1"], "PairCount"),
        (&["bench-fir", "--coefficients", "1,2,3"], "TapCount"),
    ];
    for (args, name) in cases {
        let r = mcmul(args);
        assert_eq!(r.code, EXIT_VALIDATION, "{args:?}");
        assert!(r.err.starts_with("error: ") && r.err.contains(name), "{args:?}: {}", r.err);
        assert!(r.out.is_empty());
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["frobnicate"][..],
        &["plan", "--bogus"],
        &["plan", "--n", "eight"],
        &["multiply", "--pairs", "21*19"],
        &["multiply", "--pairs", "1x1", "--random", "3"],
    ] {
        let r = mcmul(args);
        assert_eq!(r.code, EXIT_USAGE, "{args:?}: {}", r.err);
        assert!(r.out.is_empty());
    }
}

#[test]
fn help_documents_exit_codes() {
    let out = ok(&["--help"]);
    for line in ["0  success", "2  usage error", "3  validation error", "4  internal error"] {
        assert!(out.contains(line), "{out}");
    }
}

#[test]
fn minimal_scenario_echoes_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "s.toml", "n = 8\nwidths = [4, 4]\n");
    let d = doc(&["plan", "--scenario", &path, "--format", "json"]);
    assert_eq!(d.scenario.widths, vec![4, 4]);
    assert_eq!(d.scenario.device, MemristorParams::default());
    assert_eq!(d.scenario.tech, TechConstants::default());
}

#[test]
fn scenario_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
n = 16
widths = [9, 7]
seed = 42
format = "structured"

[device]
r_off = 20e3
window_exponent = 2

[tech.gates.cmos_nand]
c_g = 3e-15
energy_per_toggle = 9e-15
fixed_delay = 27e-12

[tech.register]
area = 30.0

[workload]
source = "inline"
steps = [[[300, 5], [100, 99]]]

[dsp]
coefficients = [1, -2, 3, -4]
twiddles = { kind = "random", seed = 5 }
"#;
    let first = write(dir.path(), "a.toml", text);
    let emitted = ok(&["scenario", "--scenario", &first]);
    let second = write(dir.path(), "b.toml", &emitted);
    assert_eq!(ok(&["scenario", "--scenario", &second]), emitted);

    let a = Scenario::from_toml(text).unwrap();
    let b = Scenario::from_toml(&emitted).unwrap();
    assert_eq!(a, b);
    assert_eq!(b.device.r_off, 20e3);
    assert_eq!(b.tech.gates.cmos_nand.fixed_delay, 27e-12);
    assert_eq!(b.tech.register.area, 30.0);
    assert_eq!(b.dsp.twiddles, Some(TwiddleMode::Random { seed: 5 }));

    let d = doc(&["multiply", "--scenario", &second]);
    assert_eq!(d.results["products"], serde_json::json!([1500, 9900]));
}

#[test]
fn unknown_keys_are_rejected_with_location() {
    let dir = tempfile::tempdir().unwrap();
    for (text, key) in [
        ("n = 8\nwidht = [8]\n", "widht"),
        ("n = 8\n[device]\nr_onn = 5.0\n", "r_onn"),
        ("[tech.gates.mr_nand]\nc_g = 1e-15\nenergy_per_toggle = 1e-15\nfixed_delay = 1e-11\nslack = 0\n", "slack"),
        ("[workload]\nsource = \"random\"\ncount = 3\n", "count"),
    ] {
        let path = write(dir.path(), "bad.toml", text);
        let r = mcmul(&["plan", "--scenario", &path]);
        assert_eq!(r.code, EXIT_VALIDATION, "{text}");
        assert!(r.err.contains(key), "{}", r.err);
        assert!(r.err.contains("line"), "{}", r.err);
        assert_eq!(r.err.lines().count(), 1, "{}", r.err);
        assert!(r.out.is_empty());
    }
}

#[test]
fn oversubscribed_scenario_fails_before_any_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "s.toml", "n = 8\nwidths = [5, 5]\n");
    let trace = dir.path().join("trace.csv");
    for cmd in ["multiply", "plan", "device", "bench-fir", "bench-fft"] {
        let mut args = vec![cmd, "--scenario", &path];
        let t = trace.to_str().unwrap();
        if cmd == "device" {
            args.extend(["--trace", t]);
        }
        let r = mcmul(&args);
        assert_eq!(r.code, EXIT_VALIDATION, "{cmd}");
        assert!(r.err.contains("WidthOverflow"), "{}", r.err);
        assert!(r.out.is_empty());
    }
    assert!(!trace.exists());
}

#[test]
fn bench_reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "bench.toml", "seed = 99\nformat = \"json\"\n[dsp]\nitems = 200\n");
    for cmd in ["bench-fir", "bench-fft"] {
        let a = ok(&[cmd, "--scenario", &path]);
        let b = ok(&[cmd, "--scenario", &path]);
        assert_eq!(a, b, "{cmd}");
        let c = ok(&[cmd, "--scenario", &path, "--seed", "100"]);
        assert_ne!(a, c, "{cmd}");

        let d: Document = serde_json::from_str(&a).unwrap();
        let split = &d.cost["split44"];
        assert!(split.ratios.is_some() && split.published_ratios.is_some());
        assert_eq!(d.results["items"], 200);
    }
}

#[test]
fn bench_human_output_shows_published_ratios() {
    let out = ok(&["bench-fft", "--vectors", "50"]);
    assert!(out.contains("delay") && out.contains("(published 0.66)"), "{out}");
    assert!(out.contains("(published 0.51)"), "{out}");
}

#[test]
fn fir_csv_workload_matches_reference() {
    let dir = tempfile::tempdir().unwrap();
    let xs: Vec<i64> = (0..40).map(|k| (k * 37 % 511) - 255).collect();
    let mut text = String::from("k,sign,magnitude\n");
    for (k, x) in xs.iter().enumerate() {
        text.push_str(&format!("{k},{},{}\n", if *x < 0 { "-" } else { "+" }, x.abs()));
    }
    let input = write(dir.path(), "x.csv", &text);
    let out = dir.path().join("y.csv");
    let split = dir.path().join("y44.csv");
    ok(&[
        "bench-fir",
        "--input",
        &input,
        "--coefficients=-100,50,-25,120",
        "--outputs",
        out.to_str().unwrap(),
        "--split-outputs",
        split.to_str().unwrap(),
    ]);

    let samples: Vec<_> = xs.iter().map(|&x| FixedSample::from_i64(x)).collect();
    let cfg = FirConfig::new(vec![-100, 50, -25, 120], DspPlan::Full8);
    let expected = reference_fir(&cfg, &samples).unwrap();
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let got: Vec<i64> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            let m: i64 = r[2].parse().unwrap();
            if &r[1] == "-" { -m } else { m }
        })
        .collect();
    assert_eq!(got, expected.iter().map(|s| s.to_i64()).collect::<Vec<_>>());
    assert!(split.exists());
}

#[test]
fn fft_csv_constant_input_lands_in_bin_zero() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("k,re_sign,re_mag,im_sign,im_mag\n");
    for k in 0..8 {
        text.push_str(&format!("{k},+,{},-,{}\n", 20 + k / 4, 3));
    }
    let input = write(dir.path(), "x.csv", &text);
    let out = dir.path().join("bins.csv");
    ok(&["bench-fft", "--input", &input, "--exact-twiddles", "--outputs", out.to_str().unwrap()]);

    let rows: Vec<Vec<String>> = csv::Reader::from_path(&out)
        .unwrap()
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    for (k, r) in rows.iter().enumerate() {
        let (re, im): (u64, u64) = (r[2].parse().unwrap(), r[4].parse().unwrap());
        if k % 4 == 0 {
            assert_eq!((re, im), (4 * (20 + k as u64 / 4), 12));
        } else {
            assert_eq!((re, im), (0, 0), "bin {k}");
        }
    }

    let vectors: Vec<[ComplexSample; 4]> = (0..2).map(|v| [ComplexSample::new(20 + v, -3); 4]).collect();
    let cfg = FftConfig::new(DspPlan::Full8, TwiddleMode::Exact);
    let expected = reference_fft4_stream(&cfg, &vectors).unwrap();
    assert_eq!(expected[1][0], ComplexSample::new(84, -12));
}

#[test]
fn bad_csv_cites_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "x.csv", "k,sign,magnitude\n0,+,3\n1,?,4\n");
    let r = mcmul(&["bench-fir", "--input", &input]);
    assert_eq!(r.code, EXIT_VALIDATION);
    assert!(r.err.contains("x.csv:3") && r.err.contains("sign"), "{}", r.err);

    let input = write(dir.path(), "y.csv", "k,sign,magnitude\n0,+,300\n");
    let r = mcmul(&["bench-fir", "--input", &input]);
    assert_eq!(r.code, EXIT_VALIDATION);
    assert!(r.err.contains("y.csv:2") && r.err.contains("SampleOverflow"), "{}", r.err);

    let r = mcmul(&["bench-fft", "--input", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(r.code, EXIT_VALIDATION);
}

#[test]
fn multiply_csv_workload() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "ops.csv", "a0,b0,a1,b1\n15,15,3,2\n0,9,1,1\n");
    let d = doc(&["multiply", "--n", "8", "--widths", "4,4", "--input", &input, "--format", "json"]);
    assert_eq!(d.results["products"], serde_json::json!([225, 6, 0, 1]));

    let input = write(dir.path(), "bad.csv", "a0,b0,a1,b1\n15,15,3,2\n16,1,1,1\n");
    let r = mcmul(&["multiply", "--n", "8", "--widths", "4,4", "--input", &input]);
    assert_eq!(r.code, EXIT_VALIDATION);
    assert!(r.err.contains("step 1") && r.err.contains("OperandOverflow"), "{}", r.err);
}

#[test]
fn device_trace_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let d = doc(&["device", "--steps", "500", "--amplitude", "0.5", "--trace", trace.to_str().unwrap(), "--format", "json"]);
    assert_eq!(d.results["samples"], 500);
    assert_eq!(d.results["zero_voltage_max_current"], 0.0);
    let x_min = d.results["x_min"].as_f64().unwrap();
    let x_max = d.results["x_max"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&x_min) && (0.0..=1.0).contains(&x_max));
    assert!(d.results["flux_charge_residual"].as_f64().unwrap() < 1e-3);

    let text = fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,v,i,q,phi,x,m"));
    assert_eq!(lines.count(), 500);

    let csv_out = ok(&["device", "--steps", "500", "--amplitude", "0.5", "--format", "csv"]);
    assert_eq!(csv_out, text);
}

#[test]
fn device_csv_drive_and_bad_state() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "v.csv", "t,v\n0,0.0\n1,1.0\n2,0.0\n3,-1.0\n4,0\n");
    let d = doc(&["device", "--input", &input, "--format", "json"]);
    assert_eq!(d.results["samples"], 5);
    assert_eq!(d.results["zero_voltage_max_current"], 0.0);

    let trace = dir.path().join("t.csv");
    let r = mcmul(&["device", "--x0", "1.5", "--trace", trace.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_VALIDATION);
    assert!(r.err.contains("StateOutOfRange"), "{}", r.err);
    assert!(!trace.exists());

    let r = mcmul(&["device", "--dt", "0"]);
    assert_eq!(r.code, EXIT_VALIDATION);
    assert!(r.err.contains("NonPositiveStep"), "{}", r.err);
}

#[test]
fn report_renders_and_compares() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", &ok(&["bench-fir", "--samples", "100", "--format", "json"]));
    let b = write(dir.path(), "b.json", &ok(&["bench-fir", "--samples", "100", "--seed", "3", "--format", "json"]));

    let json = ok(&["report", &a, "--format", "json"]);
    assert_eq!(json, fs::read_to_string(&a).unwrap());
    let human = ok(&["report", &a]);
    assert!(human.contains("split44") && human.contains("published 0.70"), "{human}");

    let same: Value = serde_json::from_str(&ok(&["report", &a, "--against", &a, "--format", "json"])).unwrap();
    for entry in ["full8", "split44"] {
        for field in ["delay", "power", "area"] {
            assert_eq!(same["ratios"][entry][field], 1.0);
        }
    }
    let other: Value = serde_json::from_str(&ok(&["report", &a, "--against", &b, "--format", "json"])).unwrap();
    assert_ne!(other["ratios"]["full8"]["power"], 1.0);

    let csv = ok(&["report", &a, "--format", "csv"]);
    assert!(csv.starts_with("entry,delay_s,"));
    assert_eq!(csv.lines().count(), 3);

    let junk = write(dir.path(), "junk.json", "{\"hello\": 1}");
    assert_eq!(mcmul(&["report", &junk]).code, EXIT_VALIDATION);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_mcmul");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let o = status(&["plan", "--n", "8", "--widths", "5,3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("h=11100000 v=00011111"));
    assert_eq!(status(&["plan", "--n", "8", "--widths", "3,3,2"]).status.code(), Some(3));
    assert_eq!(status(&["plan", "--nope"]).status.code(), Some(2));
}
