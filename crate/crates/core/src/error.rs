use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid coefficient module: {0}")]
    InvalidModule(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("subset is not a subgroup")]
    NotSubgroup,
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("cochain is not a cocycle: {0}")]
    NotCocycle(String),
    #[error("factor system invariant violated: {0}")]
    FactorSystem(String),
    #[error("crossed module axiom violated: {0}")]
    CrossedModule(String),
    #[error("map is not a section")]
    NotSection,
    #[error("cocycle is not cohomologically invariant (no witness at g = {0})")]
    NotInvariant(usize),
    #[error("first cohomology H1(N, A) is nonzero")]
    H1Nonzero,
    #[error("enumeration bound exceeded: {0}")]
    EnumerationBound(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0}")]
    Invalid(String),
}
