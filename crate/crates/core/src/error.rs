use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // memristor device
    #[error("invalid device parameters: {0}")]
    InvalidDeviceParams(String),
    #[error("waveform is empty")]
    EmptyWaveform,
    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("initial state x0 = {0} is outside [0, 1]")]
    StateOutOfRange(f64),
    #[error("trace needs at least 2 samples, got {0}")]
    TooFewSamples(usize),

    // gates and netlists
    #[error("{kind} expects {expected} input(s), got {got}")]
    GateArity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid gate model: {0}")]
    InvalidGateModel(String),
    #[error("no value assigned to primary input `{0}`")]
    MissingInput(String),
    #[error("expected {expected} primary input values, got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("netlist contains a combinational cycle through net `{0}`")]
    CyclicNetlist(String),
    #[error("net `{0}` is used but never driven")]
    UndrivenNet(String),
    #[error("net `{0}` has more than one driver")]
    MultipleDrivers(String),
    #[error("netlist line {line}: {message}")]
    NetlistParse { line: usize, message: String },

    #[error("invalid technology constants: {0}")]
    InvalidTechConstants(String),

    #[error("cannot form a ratio: {0}")]
    DegenerateBaseline(String),

    // partitioning and multiplication
    #[error("unsupported array width {0} (expected one of 2, 4, 8, 16, 32)")]
    UnsupportedArrayWidth(usize),
    #[error("no partition widths given")]
    NoPartitions,
    #[error("partition {index} has zero width")]
    ZeroWidth { index: usize },
    #[error("partition widths sum to {total}, exceeding the {n}-bit array")]
    WidthOverflow { total: usize, n: usize },
    #[error("UnsupportedPartitioning: {0}")]
    UnsupportedPartitioning(String),
    #[error("control vector `{0}` is not a string of 0/1 of the array width")]
    BadControlVector(String),
    #[error("expected {expected} operand pairs (one per partition), got {got}")]
    PairCount { expected: usize, got: usize },
    #[error("operand {value} does not fit in a {width}-bit partition")]
    OperandOverflow { value: u64, width: usize },

    // signal applications
    #[error("sample magnitude {magnitude} does not fit in {width} bits")]
    SampleOverflow { magnitude: u64, width: u32 },
    #[error("FIR needs exactly 4 coefficients, got {0}")]
    TapCount(usize),
}

impl Error {
    /// Variant name, stable across releases; used as the diagnostic tag.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidDeviceParams(_) => "InvalidDeviceParams",
            Error::EmptyWaveform => "EmptyWaveform",
            Error::NonPositiveStep(_) => "NonPositiveStep",
            Error::StateOutOfRange(_) => "StateOutOfRange",
            Error::TooFewSamples(_) => "TooFewSamples",
            Error::GateArity { .. } => "GateArity",
            Error::InvalidGateModel(_) => "InvalidGateModel",
            Error::MissingInput(_) => "MissingInput",
            Error::InputCount { .. } => "InputCount",
            Error::CyclicNetlist(_) => "CyclicNetlist",
            Error::UndrivenNet(_) => "UndrivenNet",
            Error::MultipleDrivers(_) => "MultipleDrivers",
            Error::NetlistParse { .. } => "NetlistParse",
            Error::InvalidTechConstants(_) => "InvalidTechConstants",
            Error::DegenerateBaseline(_) => "DegenerateBaseline",
            Error::UnsupportedArrayWidth(_) => "UnsupportedArrayWidth",
            Error::NoPartitions => "NoPartitions",
            Error::ZeroWidth { .. } => "ZeroWidth",
            Error::WidthOverflow { .. } => "WidthOverflow",
            Error::UnsupportedPartitioning(_) => "UnsupportedPartitioning",
            Error::BadControlVector(_) => "BadControlVector",
            Error::PairCount { .. } => "PairCount",
            Error::OperandOverflow { .. } => "OperandOverflow",
            Error::SampleOverflow { .. } => "SampleOverflow",
            Error::TapCount(_) => "TapCount",
        }
    }
}
