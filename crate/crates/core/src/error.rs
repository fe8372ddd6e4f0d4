use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported cap of 65536")]
    ModulusTooLarge(u128),
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error("context mismatch: {0} vs {1}")]
    ContextMismatch(String, String),
    #[error("not invertible: {0}")]
    NonUnit(String),
    #[error("level {level} out of range 1..={max}")]
    LevelOutOfRange { level: u32, max: u32 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("element budget of {0} exceeded")]
    SizeCap(u64),
    #[error("order {order} does not divide |GL2| = {gl2}")]
    LagrangeViolation { order: u64, gl2: u64 },
    #[error("p divides |G(p)|, no coprime complement hypothesis")]
    NoComplementHypothesis,
    #[error("complement search exhausted")]
    SearchExhausted,
    #[error("subgroups are not conjugate")]
    NotConjugate,
    #[error("discriminant vanishes mod p")]
    RepeatedRoots,
    #[error("excluded case: {0}")]
    ExcludedCase(String),
    #[error("non-integral quantity: {0}")]
    NonIntegral(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("domain guard: {0}")]
    DomainGuard(String),
    #[error("{0} is not squarefree")]
    NotSquarefree(u64),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NotPrime",
            Error::ModulusTooLarge(_) => "ModulusTooLarge",
            Error::ZeroLevel => "ZeroLevel",
            Error::ContextMismatch(..) => "ContextMismatch",
            Error::NonUnit(_) => "NonUnit",
            Error::LevelOutOfRange { .. } => "LevelOutOfRange",
            Error::Unsupported(_) => "Unsupported",
            Error::SizeCap(_) => "SizeCap",
            Error::LagrangeViolation { .. } => "LagrangeViolation",
            Error::NoComplementHypothesis => "NoComplementHypothesis",
            Error::SearchExhausted => "SearchExhausted",
            Error::NotConjugate => "NotConjugate",
            Error::RepeatedRoots => "RepeatedRoots",
            Error::ExcludedCase(_) => "ExcludedCase",
            Error::NonIntegral(_) => "NonIntegral",
            Error::DomainError(_) => "DomainError",
            Error::DomainGuard(_) => "DomainGuard",
            Error::NotSquarefree(_) => "NotSquarefree",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
