use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown root datum family `{0}`")]
    UnknownFamily(String),
    #[error("invalid rank parameter {rank} for family {family}")]
    InvalidRank { family: String, rank: i64 },
    #[error("invalid root datum: {0}")]
    InvalidDatum(String),
    #[error("invalid twist: {0}")]
    InvalidTwist(String),
    #[error("twist matrix has determinant {0} and cannot be transported to cocharacters")]
    NotTransportable(i128),
    #[error("Weyl group enumeration exceeded the cap of {0} elements")]
    WeylTooLarge(usize),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("q^m - 1 overflows for q = {q}, m = {order}")]
    ModulusOverflow { q: u64, order: usize },
    #[error("enumeration of {size} elements exceeds the cap of {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error("root subset is not closed under negation and the twist")]
    SubsetNotStable,
    #[error("q = {0} has even characteristic; quadratic signs need p odd")]
    EvenCharacteristic(u64),
    #[error("element lies outside the very regular domain")]
    OutsideVregDomain,
    #[error("level {level} is outside 1..={depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("invalid character: {0}")]
    InvalidCharacter(String),
    #[error("character is not toral")]
    NotToral,
    #[error("density inequality fails: |S| = {total}, |S_nvreg| = {nvreg}")]
    StarFails { total: u64, nvreg: u64 },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid building point: {0}")]
    InvalidPoint(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
