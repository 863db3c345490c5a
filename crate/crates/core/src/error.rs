use thiserror::Error;

/// Errors produced by the simulator and the analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("atom has no coupling points")]
    EmptyAtom,

    #[error("duplicate coupling point at ({x}, {y}); merge overlapping points first")]
    DuplicateCouplingPoint { x: i64, y: i64 },

    #[error("coupling point ({x}, {y}) of atom {atom} lies outside the {size}x{size} lattice")]
    OutOfLattice { atom: usize, x: i64, y: i64, size: usize },

    #[error("cavity coupled to multiple atoms: ({x}, {y}) is shared by atoms {first} and {second}")]
    SharedCavity { x: i64, y: i64, first: usize, second: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("atom index {index} out of range ({count} atoms)")]
    AtomIndex { index: usize, count: usize },

    #[error("atom is not perfectly subradiant")]
    NotSubradiant,

    #[error("operation requires zero detuning, found {0}")]
    NonZeroDetuning(f64),

    #[error("quadrature grid hits a pole of the resolvent at z = {z}")]
    QuadratureSingularity { z: String },

    #[error("invalid quadrature grid size {0}: must be even and at least 64")]
    InvalidGrid(usize),

    #[error("no zero-energy mode on the given support (smallest singular value {0:.3e})")]
    NoZeroMode(f64),

    #[error("layout is not a four-point equal-strength rectangle")]
    NotRectangle,

    #[error("subsets are not centered on the same cavity")]
    NotConcentric,

    #[error("fit did not converge: {0}")]
    FitFailed(String),

    #[error("lattice too large for dense methods: N = {size} (limit {limit})")]
    LatticeTooLarge { size: usize, limit: usize },

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid initial state: {0}")]
    InvalidState(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
