use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pauli label has length {found}, expected {expected}")]
    BadLength { expected: usize, found: usize },
    #[error("invalid pauli character {0:?} (expected one of I, X, Y, Z)")]
    BadChar(char),
    #[error("size mismatch: {left} vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },
    #[error("schema error: {0}")]
    SchemaError(String),
    #[error("inconsistent qubit count: {0}")]
    InconsistentQubitCount(String),
    #[error("non-finite coefficient in {0}")]
    NonFiniteCoefficient(String),
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("internal phase error: accumulated stabilizer product has phase i^{0}")]
    InternalPhaseError(u8),
    #[error("assignment length {found} does not match {expected} slots")]
    LengthMismatch { expected: usize, found: usize },
    #[error("assignment index {value} at slot {slot} is outside the alphabet 0..{levels}")]
    IndexOutOfAlphabet { slot: usize, value: u8, levels: u8 },
    #[error("assignment uses {found} odd slots, budget is {budget}")]
    OddBudgetExceeded { found: usize, budget: usize },
    #[error("search space of {size} assignments exceeds the cap of {cap}")]
    SpaceTooLarge { size: String, cap: u128 },
    #[error("search space exhausted after {evaluated} distinct assignments")]
    SpaceExhausted { evaluated: usize },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("{n} qubits exceeds the limit of {max} for {what}")]
    TooManyQubits { n: usize, max: usize, what: &'static str },
    #[error("no bitstring satisfies the constraints")]
    NoFeasibleBitstring,
    #[error("degenerate denominator: HF and exact energies differ by {0:e}")]
    DegenerateDenominator(f64),
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),
    #[error("imaginary residue {0:e} in dense expectation")]
    ImaginaryResidue(f64),
    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),
}
