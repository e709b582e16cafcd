use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("quotient lattice has torsion (invariant factor {factor})")]
    Torsion { factor: String },

    #[error("form is not symmetric")]
    NotSymmetric,

    #[error("zero vector is not a root")]
    ZeroRoot,

    #[error("root {0} is listed as both even and odd")]
    ParityClash(String),

    #[error("duplicate root {0}")]
    DuplicateRoot(String),

    #[error("root {0} is isotropic")]
    IsotropicRoot(String),

    #[error("{0} is not a root")]
    NotARoot(String),

    #[error("{0} is not an even root")]
    NotAnEvenRoot(String),

    #[error("reflection of {beta} in isotropic {gamma} is ambiguous: {detail}")]
    AmbiguousReflection {
        gamma: String,
        beta: String,
        detail: String,
    },

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("cannot mix root systems and root data in a direct sum")]
    MixedKinds,

    #[error("direct sum of an empty sequence")]
    EmptySum,

    #[error("root system is not irreducible ({components} components)")]
    NotIrreducible { components: usize },

    #[error("orbit exceeded the iteration cap of {cap} elements")]
    IterationCap { cap: usize },

    #[error("invalid root datum: {0}")]
    InvalidDatum(String),

    #[error("invalid superalgebra: {0}")]
    InvalidAlgebra(String),

    #[error("Cartan subalgebra does not act diagonalizably with rational weights")]
    NotDiagonalizable,

    #[error("no designated Cartan subalgebra")]
    NoCartan,

    #[error("weight {0} is odd or not an even root")]
    IsotropicOrOdd(String),

    #[error("{0} is not a weight of the algebra")]
    NotAWeight(String),

    #[error("bilinear form is degenerate on the Cartan subalgebra")]
    DegenerateOnCartan,

    #[error("invalid Grassmann element {0}")]
    InvalidElement(String),

    #[error("Grassmann generator counts differ: {0} vs {1}")]
    GeneratorMismatch(usize, usize),

    #[error("supermatrix is not invertible")]
    NotInvertible,

    #[error("supermatrix parity violated at ({row}, {col})")]
    ParityViolation { row: usize, col: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
