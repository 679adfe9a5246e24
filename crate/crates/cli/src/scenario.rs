//! Scenario files: one TOML document holding everything a run needs.
//!
//! Every table is optional and falls back to the library defaults. Unknown
//! keys are errors. A loaded scenario re-emits as TOML with all defaults
//! filled in, and that text loads back to the same scenario.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use mcmul::apps::{DspPlan, FirConfig, TwiddleMode, TAPS};
use mcmul::array::{plan_partitions, PartitionPlan};
use mcmul::cost::{CostModel, TechConstants};
use mcmul::device::MemristorParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_N: usize = 8;
pub const DEFAULT_RANDOM_STEPS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Human,
    /// One JSON document per run.
    #[serde(alias = "structured")]
    #[value(alias = "structured")]
    Json,
    Csv,
}

/// Operand pairs for `multiply`, one step per clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Workload {
    /// `steps = [[[a0, b0], [a1, b1]], ...]`, one inner list per step.
    Inline { steps: Vec<Vec<[u64; 2]>> },
    /// Header `a0,b0[,a1,b1]`, one row per step.
    Csv { path: PathBuf },
    /// Uniform operands drawn from the scenario seed.
    Random {
        #[serde(default = "default_random_steps")]
        steps: usize,
    },
}

fn default_random_steps() -> usize {
    DEFAULT_RANDOM_STEPS
}

impl Default for Workload {
    fn default() -> Self {
        Workload::Random {
            steps: DEFAULT_RANDOM_STEPS,
        }
    }
}

/// Voltage drive for `device`: a sine unless `input` names a CSV with a `v`
/// column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Drive {
    pub amplitude: f64,
    pub frequency_hz: f64,
    pub dt: f64,
    pub steps: usize,
    pub x0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
}

impl Default for Drive {
    fn default() -> Self {
        Drive {
            amplitude: 1.0,
            frequency_hz: 1.0,
            dt: 1e-3,
            steps: 2000,
            x0: 0.1,
            input: None,
        }
    }
}

/// Settings shared by `bench-fir` and `bench-fft`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Dsp {
    /// Samples (FIR) or input vectors (FFT) when drawn at random.
    pub items: usize,
    pub sample_rate_hz: f64,
    /// FIR taps; random when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<i64>>,
    /// FFT twiddles; random per vector when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub twiddles: Option<TwiddleMode>,
    /// CSV workload replacing the random one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
}

impl Default for Dsp {
    fn default() -> Self {
        Dsp {
            items: 1000,
            sample_rate_hz: 100e6,
            coefficients: None,
            twiddles: None,
            input: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_n")]
    pub n: usize,
    /// Defaults to one full-width partition.
    #[serde(default)]
    pub widths: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub device: MemristorParams,
    #[serde(default)]
    pub tech: TechConstants,
    #[serde(default)]
    pub workload: Workload,
    #[serde(default)]
    pub drive: Drive,
    #[serde(default)]
    pub dsp: Dsp,
}

fn default_n() -> usize {
    DEFAULT_N
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            n: DEFAULT_N,
            widths: vec![DEFAULT_N],
            seed: 0,
            format: Format::default(),
            device: MemristorParams::default(),
            tech: TechConstants::default(),
            workload: Workload::default(),
            drive: Drive::default(),
            dsp: Dsp::default(),
        }
    }
}

/// Everything a command needs once the scenario has passed validation.
#[derive(Debug, Clone)]
pub struct Validated {
    pub model: CostModel,
    pub plan: PartitionPlan,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let mut s: Scenario = toml::from_str(text).map_err(|e| {
            CliError::Validation(format!("scenario: {}", one_line(&e.to_string())))
        })?;
        s.normalize();
        Ok(s)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Internal(format!("cannot render scenario: {e}")))
    }

    /// Fills fields whose defaults depend on other fields.
    pub fn normalize(&mut self) {
        if self.widths.is_empty() {
            self.widths = vec![self.n];
        }
    }

    /// Checks every field against the library preconditions. Nothing is
    /// simulated before this passes.
    pub fn validate(&self) -> Result<Validated, CliError> {
        if self.seed > i64::MAX as u64 {
            return Err(CliError::Validation(format!(
                "seed {} does not fit in 63 bits",
                self.seed
            )));
        }
        let model = CostModel::new(self.device, self.tech)?;
        let plan = plan_partitions(self.n, &self.widths)?;

        match &self.workload {
            Workload::Inline { steps } => {
                if steps.is_empty() {
                    return Err(CliError::Validation("workload.steps is empty".into()));
                }
                for pairs in steps {
                    let pairs: Vec<(u64, u64)> = pairs.iter().map(|p| (p[0], p[1])).collect();
                    check_pairs(&plan, &pairs)?;
                }
            }
            Workload::Csv { .. } => {}
            Workload::Random { steps } => {
                if *steps == 0 {
                    return Err(CliError::Validation("workload.steps must be at least 1".into()));
                }
            }
        }

        let d = &self.drive;
        if !(d.dt > 0.0 && d.dt.is_finite()) {
            return Err(mcmul::Error::NonPositiveStep(d.dt).into());
        }
        if !(0.0..=1.0).contains(&d.x0) {
            return Err(mcmul::Error::StateOutOfRange(d.x0).into());
        }
        if d.input.is_none() && d.steps == 0 {
            return Err(mcmul::Error::EmptyWaveform.into());
        }
        if !(d.amplitude.is_finite() && d.frequency_hz.is_finite() && d.frequency_hz >= 0.0) {
            return Err(CliError::Validation(
                "drive.amplitude must be finite and drive.frequency_hz finite and non-negative".into(),
            ));
        }

        let p = &self.dsp;
        if p.items == 0 && p.input.is_none() {
            return Err(CliError::Validation("dsp.items must be at least 1".into()));
        }
        let taps = p.coefficients.clone().unwrap_or_else(|| vec![0; TAPS]);
        FirConfig {
            sample_rate_hz: p.sample_rate_hz,
            ..FirConfig::new(taps, DspPlan::Full8)
        }
        .taps()?;
        if let Some(TwiddleMode::Random { seed }) = p.twiddles {
            if seed > i64::MAX as u64 {
                return Err(CliError::Validation(format!(
                    "dsp.twiddles.seed {seed} does not fit in 63 bits"
                )));
            }
        }
        Ok(Validated { model, plan })
    }
}

/// One operand pair per segment, each fitting its segment width.
pub fn check_pairs(plan: &PartitionPlan, pairs: &[(u64, u64)]) -> Result<(), CliError> {
    let segs = plan.segments();
    if pairs.len() != segs.len() {
        return Err(mcmul::Error::PairCount {
            expected: segs.len(),
            got: pairs.len(),
        }
        .into());
    }
    for (s, &(a, b)) in segs.iter().zip(pairs) {
        for value in [a, b] {
            if value >> s.width != 0 {
                return Err(mcmul::Error::OperandOverflow { value, width: s.width }.into());
            }
        }
    }
    Ok(())
}

/// A scenario file plus the directory its relative paths are resolved from.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub scenario: Scenario,
    pub base: PathBuf,
}

impl Loaded {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }
}

pub fn load_scenario(path: Option<&Path>) -> Result<Loaded, CliError> {
    let Some(path) = path else {
        return Ok(Loaded {
            scenario: Scenario::default(),
            base: PathBuf::from("."),
        });
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read scenario {}: {e}", path.display())))?;
    let scenario = Scenario::from_toml(&text)
        .map_err(|e| CliError::Validation(format!("{}: {}", path.display(), e.message())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { scenario, base })
}

/// TOML errors span several lines with a source excerpt; keep the location
/// and the message.
fn one_line(msg: &str) -> String {
    msg.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('|') && !l.chars().all(|c| c == '^' || c == ' '))
        .collect::<Vec<_>>()
        .join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let s = Scenario::default();
        let text = s.to_toml().unwrap();
        assert_eq!(Scenario::from_toml(&text).unwrap(), s);
    }

    #[test]
    fn partial_tables_fill_defaults() {
        let s = Scenario::from_toml("n = 16\n[tech.register]\ndelay = 1e-10\n").unwrap();
        assert_eq!(s.widths, vec![16]);
        assert_eq!(s.tech.register.delay, 1e-10);
        assert_eq!(s.tech.register.area, TechConstants::default().register.area);
    }

    #[test]
    fn unknown_key_names_the_key() {
        let e = Scenario::from_toml("n = 8\nwidht = [8]\n").unwrap_err();
        assert!(e.message().contains("widht"), "{}", e.message());
        assert!(!e.message().contains('\n'));
    }
}
