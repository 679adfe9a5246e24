use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mcmul::apps::{bench_fft_on, bench_fir_on, FftWorkload, FirWorkload, TwiddleMode};
use mcmul::array::{enabled_mask, MultiplierArray, PartitionPlan, Segment};
use mcmul::cost::{compare_report, reference, ArrayEnergyMeter, CostReport, RatioSet};
use mcmul::device::{sine_waveform, simulate_waveform, verify_flux_charge, MemristorState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::csvio;
use crate::render;
use crate::scenario::{check_pairs, load_scenario, Format, Loaded, Workload};
use crate::{
    ArrayArgs, BenchFftArgs, BenchFirArgs, CliError, Command, Common, DeviceArgs, MultiplyArgs, Output, PlanArgs,
    ReportArgs, ScenarioArgs,
};

/// The JSON emitted by every simulation subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub command: String,
    /// Effective scenario, defaults filled in.
    pub scenario: crate::Scenario,
    pub results: serde_json::Value,
    /// Named cost reports. Ratios, where present, are against the entry the
    /// command compares with; reference ratios are the published ones.
    pub cost: BTreeMap<String, CostReport>,
}

pub(crate) fn execute(cmd: Command) -> Result<Output, CliError> {
    match cmd {
        Command::Multiply(a) => multiply(a),
        Command::Plan(a) => plan(a),
        Command::Device(a) => device(a),
        Command::BenchFir(a) => bench_fir(a),
        Command::BenchFft(a) => bench_fft(a),
        Command::Report(a) => report(a),
        Command::Scenario(a) => scenario(a),
    }
}

/// Flag paths are relative to the working directory, scenario paths to the
/// scenario file.
fn flag_path(loaded: &Loaded, p: PathBuf) -> PathBuf {
    if p.is_relative() && loaded.base != Path::new(".") {
        std::env::current_dir().map(|d| d.join(&p)).unwrap_or(p)
    } else {
        p
    }
}

fn load(common: &Common, array: Option<&ArrayArgs>) -> Result<Loaded, CliError> {
    let mut l = load_scenario(common.scenario.as_deref())?;
    let s = &mut l.scenario;
    if let Some(f) = common.format {
        s.format = f;
    }
    if let Some(seed) = common.seed {
        s.seed = seed;
    }
    if let Some(a) = array {
        if let Some(n) = a.n {
            s.n = n;
            if common.scenario.is_none() && a.widths.is_none() {
                s.widths = vec![n];
            }
        }
        if let Some(w) = &a.widths {
            s.widths = w.clone();
        }
    }
    Ok(l)
}

fn json<T: Serialize>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Internal(format!("json: {e}")))?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Internal(format!("json: {e}")))
}

/// Attaches ratios against `baseline` when they are defined.
fn with_ratios(mut r: CostReport, baseline: &CostReport, reference: Option<RatioSet>) -> CostReport {
    r.ratios = compare_report(&r, baseline).ok();
    r.published_ratios = reference;
    r
}

/// `21x19,5x6;3x4,1x1`: pairs within a step by `,`, steps by `;`.
pub(crate) fn parse_pairs(text: &str) -> Result<Vec<Vec<[u64; 2]>>, CliError> {
    let bad = |item: &str| CliError::Usage(format!("--pairs: expected AxB, got `{item}`"));
    text.split(';')
        .map(|step| {
            step.split(',')
                .map(|item| {
                    let (a, b) = item.trim().split_once(['x', 'X']).ok_or_else(|| bad(item))?;
                    let a = a.trim().parse().map_err(|_| bad(item))?;
                    let b = b.trim().parse().map_err(|_| bad(item))?;
                    Ok([a, b])
                })
                .collect()
        })
        .collect()
}

fn bus(plan: &PartitionPlan, pairs: &[(u64, u64)]) -> (u64, u64) {
    plan.segments()
        .iter()
        .zip(pairs)
        .fold((0, 0), |(a, b), (s, &(x, y))| (a | x << s.offset, b | y << s.offset))
}

#[derive(Debug, Serialize)]
struct PlanView {
    n: usize,
    widths: Vec<usize>,
    h: String,
    v: String,
    segments: Vec<Segment>,
    /// Rows from the top down, columns MSB first; `#` marks an enabled block.
    mask: Vec<String>,
    enabled_blocks: usize,
}

impl PlanView {
    fn new(plan: &PartitionPlan) -> Self {
        let c = plan.controls();
        let mask = enabled_mask(c);
        PlanView {
            n: plan.n(),
            widths: plan.widths(),
            h: c.h_string(),
            v: c.v_string(),
            segments: plan.segments().to_vec(),
            mask: mask.to_string().lines().map(str::to_string).collect(),
            enabled_blocks: mask.count(),
        }
    }
}

#[derive(Debug, Serialize)]
struct MultiplyStep {
    operands: Vec<[u64; 2]>,
    products: Vec<u64>,
}

#[derive(Debug, Serialize)]
struct MultiplyResults {
    plan: PlanView,
    steps: Vec<MultiplyStep>,
    /// Every step's products in order.
    products: Vec<u64>,
}

fn multiply(a: MultiplyArgs) -> Result<Output, CliError> {
    let mut l = load(&a.common, Some(&a.array))?;
    if let Some(p) = &a.pairs {
        l.scenario.workload = Workload::Inline { steps: parse_pairs(p)? };
    }
    if let Some(p) = a.input {
        l.scenario.workload = Workload::Csv { path: flag_path(&l, p) };
    }
    if let Some(steps) = a.random {
        l.scenario.workload = Workload::Random { steps };
    }
    let v = l.scenario.validate()?;
    let s = &l.scenario;
    let plan = v.plan;

    let steps: Vec<Vec<(u64, u64)>> = match &s.workload {
        Workload::Inline { steps } => steps.iter().map(|p| p.iter().map(|q| (q[0], q[1])).collect()).collect(),
        Workload::Csv { path } => {
            let path = l.resolve(path);
            let steps = csvio::read_operand_steps(&path, plan.segments().len())?;
            if steps.is_empty() {
                return Err(CliError::Validation(format!("{}: no operand rows", path.display())));
            }
            for (k, pairs) in steps.iter().enumerate() {
                check_pairs(&plan, pairs)
                    .map_err(|e| CliError::Validation(format!("{} step {k}: {}", path.display(), e.message())))?;
            }
            steps
        }
        Workload::Random { steps } => {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            (0..*steps)
                .map(|_| {
                    plan.segments()
                        .iter()
                        .map(|seg| (rng.gen_range(0..1u64 << seg.width), rng.gen_range(0..1u64 << seg.width)))
                        .collect()
                })
                .collect()
        }
    };

    let model = &v.model;
    let array = MultiplierArray::shared(plan.n());
    let mut meter = ArrayEnergyMeter::with_array(model, array, plan.clone());
    let mut results = MultiplyResults {
        plan: PlanView::new(&plan),
        steps: Vec::with_capacity(steps.len()),
        products: Vec::new(),
    };
    for pairs in &steps {
        let products = meter.run(pairs)?;
        results.products.extend(&products);
        results.steps.push(MultiplyStep {
            operands: pairs.iter().map(|&(a, b)| [a, b]).collect(),
            products,
        });
    }

    let buses: Vec<_> = steps.iter().map(|p| bus(&plan, p)).collect();
    let baseline = model.baseline_report(plan.n(), &buses);
    let reference = (plan.n() == 32).then(|| reference::MULTIPLIERS_32[3].ratios);
    let candidate = with_ratios(model.multiplier_report(&plan, &steps)?, &baseline, reference);
    let cost = BTreeMap::from([("baseline".to_string(), baseline), ("reconfigurable".to_string(), candidate)]);

    let stdout = match s.format {
        Format::Json => json(&Document {
            command: "multiply".into(),
            scenario: s.clone(),
            results: to_value(&results)?,
            cost,
        })?,
        Format::Human => {
            let mut t = render::plan_header(&plan);
            for (k, step) in results.steps.iter().enumerate() {
                let items: Vec<String> = step
                    .operands
                    .iter()
                    .zip(&step.products)
                    .map(|(o, p)| format!("{} x {} = {p}", o[0], o[1]))
                    .collect();
                t.push_str(&format!("step {k}: {}\n", items.join(", ")));
            }
            t.push('\n');
            t.push_str(&render::cost_table(&cost, "baseline"));
            t.into_bytes()
        }
        Format::Csv => {
            let mut rows = Vec::new();
            for (k, step) in results.steps.iter().enumerate() {
                for (seg, (o, p)) in step.operands.iter().zip(&step.products).enumerate() {
                    rows.push(vec![k.to_string(), seg.to_string(), o[0].to_string(), o[1].to_string(), p.to_string()]);
                }
            }
            csvio::write_rows(&["step", "segment", "a", "b", "product"], &rows)?
        }
    };
    Ok(Output {
        stdout,
        files: Vec::new(),
    })
}

fn plan(a: PlanArgs) -> Result<Output, CliError> {
    let l = load(&a.common, Some(&a.array))?;
    let v = l.scenario.validate()?;
    let s = &l.scenario;
    let plan = v.plan;
    let view = PlanView::new(&plan);
    let stdout = match s.format {
        Format::Json => {
            let report = v.model.multiplier_report(&plan, &[])?;
            json(&Document {
                command: "plan".into(),
                scenario: s.clone(),
                results: to_value(&view)?,
                cost: BTreeMap::from([("reconfigurable".to_string(), report)]),
            })?
        }
        Format::Human => {
            let mut t = render::plan_header(&plan);
            t.push_str(&format!(
                "enabled mask ({} of {} blocks; rows top down, columns MSB first):\n",
                view.enabled_blocks,
                plan.n() * plan.n()
            ));
            for row in &view.mask {
                t.push_str(row);
                t.push('\n');
            }
            t.into_bytes()
        }
        Format::Csv => {
            let rows: Vec<_> = view
                .mask
                .iter()
                .enumerate()
                .map(|(k, r)| vec![(plan.n() - 1 - k).to_string(), r.clone()])
                .collect();
            csvio::write_rows(&["row", "enables_msb_first"], &rows)?
        }
    };
    Ok(Output {
        stdout,
        files: Vec::new(),
    })
}

#[derive(Debug, Serialize)]
struct DeviceResults {
    samples: usize,
    dt: f64,
    x0: f64,
    final_state: MemristorState,
    x_min: f64,
    x_max: f64,
    m_min: f64,
    m_max: f64,
    /// Worst `|dphi - M dq|` over the flux range; absent for one sample.
    flux_charge_residual: Option<f64>,
    /// Largest `|i|` over samples with `v = 0`.
    zero_voltage_max_current: f64,
}

fn device(a: DeviceArgs) -> Result<Output, CliError> {
    let mut l = load(&a.common, None)?;
    {
        let d = &mut l.scenario.drive;
        d.amplitude = a.amplitude.unwrap_or(d.amplitude);
        d.frequency_hz = a.frequency.unwrap_or(d.frequency_hz);
        d.dt = a.dt.unwrap_or(d.dt);
        d.steps = a.steps.unwrap_or(d.steps);
        d.x0 = a.x0.unwrap_or(d.x0);
    }
    if let Some(p) = a.input {
        l.scenario.drive.input = Some(flag_path(&l, p));
    }
    let v = l.scenario.validate()?;
    let s = &l.scenario;
    let d = &s.drive;
    let wave = match &d.input {
        Some(p) => csvio::read_waveform(&l.resolve(p))?,
        None => sine_waveform(d.amplitude, d.frequency_hz, d.dt, d.steps),
    };
    let trace = simulate_waveform(v.model.device(), &wave, d.dt, d.x0)?;

    let fold = |f: fn(&mcmul::device::TraceSample) -> f64| {
        trace
            .samples
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    };
    let (x_min, x_max) = fold(|t| t.x);
    let (m_min, m_max) = fold(|t| t.m);
    let results = DeviceResults {
        samples: trace.samples.len(),
        dt: d.dt,
        x0: d.x0,
        final_state: trace.final_state,
        x_min,
        x_max,
        m_min,
        m_max,
        flux_charge_residual: verify_flux_charge(&trace).ok(),
        zero_voltage_max_current: trace
            .samples
            .iter()
            .filter(|t| t.v == 0.0)
            .map(|t| t.i.abs())
            .fold(0.0, f64::max),
    };

    let mut csv = Vec::new();
    trace
        .write_csv(&mut csv)
        .map_err(|e| CliError::Internal(format!("trace: {e}")))?;
    let stdout = match s.format {
        Format::Json => json(&Document {
            command: "device".into(),
            scenario: s.clone(),
            results: to_value(&results)?,
            cost: BTreeMap::new(),
        })?,
        Format::Human => render::device_summary(&device_lines(&results)).into_bytes(),
        Format::Csv => csv.clone(),
    };
    let files = a.trace.map(|p| vec![(p, csv)]).unwrap_or_default();
    Ok(Output { stdout, files })
}

fn device_lines(r: &DeviceResults) -> Vec<(&'static str, String)> {
    let residual = r
        .flux_charge_residual
        .map_or_else(|| "n/a".to_string(), |x| format!("{x:.3e}"));
    vec![
        ("samples", r.samples.to_string()),
        ("dt (s)", format!("{:e}", r.dt)),
        ("x0", r.x0.to_string()),
        ("final x", format!("{:.6}", r.final_state.x)),
        ("x range", format!("{:.6} .. {:.6}", r.x_min, r.x_max)),
        ("M range (ohm)", format!("{:.1} .. {:.1}", r.m_min, r.m_max)),
        ("flux-charge residual", residual),
        ("max |i| at v = 0 (A)", format!("{:.3e}", r.zero_voltage_max_current)),
    ]
}

#[derive(Debug, Serialize)]
struct BenchResults {
    kernel: String,
    items: usize,
    saturations_full8: usize,
    saturations_split44: usize,
    /// 4+4 is faster and draws less power than 8-bit.
    split_wins: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    twiddles: Option<TwiddleMode>,
}

fn bench_output(
    l: &Loaded,
    results: BenchResults,
    report: &mcmul::apps::BenchReport,
    files: Vec<(PathBuf, Vec<u8>)>,
) -> Result<Output, CliError> {
    let s = &l.scenario;
    let cost = BTreeMap::from([
        ("full8".to_string(), report.full8.clone()),
        ("split44".to_string(), report.split44.clone()),
    ]);
    let stdout = match s.format {
        Format::Json => json(&Document {
            command: format!("bench-{}", if results.kernel == "fir" { "fir" } else { "fft" }),
            scenario: s.clone(),
            results: to_value(&results)?,
            cost,
        })?,
        Format::Human => {
            let mut t = format!(
                "{} bench: {} {}, seed {}, {} saturations at 8-bit, {} at 4+4\n\n",
                results.kernel,
                results.items,
                if results.kernel == "fir" { "samples" } else { "vectors" },
                s.seed,
                results.saturations_full8,
                results.saturations_split44,
            );
            t.push_str(&render::cost_table(&cost, "full8"));
            t.into_bytes()
        }
        Format::Csv => render::cost_csv(&cost)?,
    };
    Ok(Output { stdout, files })
}

fn bench_fir(a: BenchFirArgs) -> Result<Output, CliError> {
    let mut l = load(&a.common, None)?;
    if let Some(n) = a.samples {
        l.scenario.dsp.items = n;
    }
    if let Some(c) = a.coefficients {
        l.scenario.dsp.coefficients = Some(c);
    }
    if let Some(p) = a.input {
        l.scenario.dsp.input = Some(flag_path(&l, p));
    }
    let v = l.scenario.validate()?;
    let s = &l.scenario;
    let mut work = match &s.dsp.input {
        Some(p) => FirWorkload {
            samples: csvio::read_fir_samples(&l.resolve(p))?,
            ..FirWorkload::random(s.seed, 0)
        },
        None => FirWorkload::random(s.seed, s.dsp.items),
    };
    if let Some(c) = &s.dsp.coefficients {
        work.coefficients = c.clone();
    }
    if work.samples.is_empty() {
        return Err(CliError::Validation("FIR workload has no samples".into()));
    }
    work.validate()?;

    let bench = bench_fir_on(&v.model, &work, s.dsp.sample_rate_hz)?;
    let mut files = Vec::new();
    if let Some(p) = a.outputs {
        files.push((p, csvio::write_fir_samples(&bench.full8)?));
    }
    if let Some(p) = a.split_outputs {
        files.push((p, csvio::write_fir_samples(&bench.split44)?));
    }
    let r = &bench.report;
    let results = BenchResults {
        kernel: r.kernel.clone(),
        items: r.items,
        saturations_full8: r.saturations_full8,
        saturations_split44: r.saturations_split44,
        split_wins: r.split_wins(),
        coefficients: Some(work.coefficients.clone()),
        twiddles: None,
    };
    bench_output(&l, results, r, files)
}

fn bench_fft(a: BenchFftArgs) -> Result<Output, CliError> {
    let mut l = load(&a.common, None)?;
    if let Some(n) = a.vectors {
        l.scenario.dsp.items = n;
    }
    if a.exact_twiddles {
        l.scenario.dsp.twiddles = Some(TwiddleMode::Exact);
    }
    if let Some(p) = a.input {
        l.scenario.dsp.input = Some(flag_path(&l, p));
    }
    let v = l.scenario.validate()?;
    let s = &l.scenario;
    let mut work = match &s.dsp.input {
        Some(p) => FftWorkload {
            vectors: csvio::read_fft_vectors(&l.resolve(p))?,
            ..FftWorkload::random(s.seed, 0)
        },
        None => FftWorkload::random(s.seed, s.dsp.items),
    };
    if let Some(t) = s.dsp.twiddles {
        work.twiddles = t;
    }
    if work.vectors.is_empty() {
        return Err(CliError::Validation("FFT workload has no vectors".into()));
    }
    work.validate()?;

    let bench = bench_fft_on(&v.model, &work, s.dsp.sample_rate_hz)?;
    let mut files = Vec::new();
    if let Some(p) = a.outputs {
        files.push((p, csvio::write_fft_vectors(&bench.full8)?));
    }
    if let Some(p) = a.split_outputs {
        files.push((p, csvio::write_fft_vectors(&bench.split44)?));
    }
    let r = &bench.report;
    let results = BenchResults {
        kernel: r.kernel.clone(),
        items: r.items,
        saturations_full8: r.saturations_full8,
        saturations_split44: r.saturations_split44,
        split_wins: r.split_wins(),
        coefficients: None,
        twiddles: Some(work.twiddles),
    };
    bench_output(&l, results, r, files)
}

fn read_document(path: &Path) -> Result<Document, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read report {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: not an mcmul report: {e}", path.display())))
}

#[derive(Debug, Serialize)]
struct Comparison {
    candidate: String,
    baseline: String,
    /// Candidate over baseline, for every cost entry present in both.
    ratios: BTreeMap<String, RatioSet>,
}

fn report(a: ReportArgs) -> Result<Output, CliError> {
    let doc = read_document(&a.file)?;
    let Some(against) = a.against else {
        let stdout = match a.format {
            Format::Json => json(&doc)?,
            Format::Human => {
                let mut t = format!(
                    "{} report: n = {}, widths = {:?}, seed = {}\n\n",
                    doc.command, doc.scenario.n, doc.scenario.widths, doc.scenario.seed
                );
                t.push_str(&render::cost_table(&doc.cost, ""));
                t.into_bytes()
            }
            Format::Csv => render::cost_csv(&doc.cost)?,
        };
        return Ok(Output {
            stdout,
            files: Vec::new(),
        });
    };

    let base = read_document(&against)?;
    let mut ratios = BTreeMap::new();
    for (name, cand) in &doc.cost {
        if let Some(b) = base.cost.get(name) {
            ratios.insert(name.clone(), compare_report(cand, b)?);
        }
    }
    if ratios.is_empty() {
        return Err(CliError::Validation(format!(
            "{} and {} share no cost entries",
            a.file.display(),
            against.display()
        )));
    }
    let cmp = Comparison {
        candidate: a.file.display().to_string(),
        baseline: against.display().to_string(),
        ratios,
    };
    let stdout = match a.format {
        Format::Json => json(&cmp)?,
        Format::Human => render::ratio_table(&cmp.candidate, &cmp.baseline, &cmp.ratios).into_bytes(),
        Format::Csv => {
            let rows: Vec<_> = cmp
                .ratios
                .iter()
                .map(|(k, r)| vec![k.clone(), format!("{:e}", r.delay), format!("{:e}", r.power), format!("{:e}", r.area)])
                .collect();
            csvio::write_rows(&["entry", "delay_ratio", "power_ratio", "area_ratio"], &rows)?
        }
    };
    Ok(Output {
        stdout,
        files: Vec::new(),
    })
}

fn scenario(a: ScenarioArgs) -> Result<Output, CliError> {
    let l = load(&a.common, Some(&a.array))?;
    l.scenario.validate()?;
    Ok(Output {
        stdout: l.scenario.to_toml()?.into_bytes(),
        files: Vec::new(),
    })
}
