use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // trajectory
    #[error("invalid segment: {0}")]
    InvalidSegment(String),
    #[error("segment list is empty")]
    EmptySegmentList,
    #[error("inadmissible periodicity parameters: {0}")]
    InadmissibleParams(String),
    #[error("v_c = {v_c} does not exceed the lower bound {bound}")]
    VelocityBoundViolated { v_c: f64, bound: f64 },
    #[error("no physical gamma_b (got {0})")]
    UnphysicalGammaB(f64),
    #[error("interval {0} does not return to its starting position")]
    NonCyclicInterval(usize),

    // phase integrals
    #[error("quadrature did not converge (estimated error {0:e})")]
    QuadratureNonConvergent(f64),
    #[error("boundary term {0:e} is not negligible on a declared transparent cycle")]
    TransparencyAssertionFailed(f64),
    #[error("expected {expected} detectors, got {got}")]
    DetectorCount { expected: usize, got: usize },

    // search
    #[error("invalid search grid: {0}")]
    InvalidGrid(String),
    #[error("need two certified intersections with matching periodicity, found {0}")]
    InsufficientIntersections(usize),

    // gates
    #[error("invalid field state: {0}")]
    InvalidFieldState(String),
    #[error("drive and shift both vanish, so there is no rotation axis")]
    ZeroRotation,
    #[error("target rotation unreachable: {0}")]
    Unreachable(String),
    #[error("required drive |alpha| exceeds the ceiling {0}")]
    DriveCeilingExceeded(f64),

    // entanglement
    #[error("state requires a transparent trajectory (|I_pm| = {0:e})")]
    TransparencyRequired(f64),
    #[error("optimal squeezing undefined at cos(Theta) = {0}")]
    ThetaDegenerate(f64),

    // tradeoff
    #[error("invalid trade-off inputs: {0}")]
    InvalidInputs(String),

    // oracle
    #[error("population {0:e} in the top two Fock levels")]
    TruncationLeakage(f64),
    #[error("step doubling did not reach the tolerance (last change {0:e})")]
    StepNonConvergence(f64),
    #[error("initial squeezed state fidelity {0} is too low")]
    InitialStateFidelity(f64),
    #[error("perturbative validation failed: {0}")]
    ValidationFailed(String),

    // config / io
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
