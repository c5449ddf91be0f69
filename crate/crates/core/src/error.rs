use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series exp needs a zero constant term, got {0}")]
    NonZeroConstantTerm(String),

    #[error("series log needs constant term 1, got {0}")]
    ConstantTermNotOne(String),

    #[error("division by a series with zero constant term")]
    NonInvertibleSeries,

    #[error("series variables differ: {0} vs {1}")]
    VariableMismatch(char, char),

    #[error("cannot divide by u: the u^0 row has nonzero coefficients")]
    NotDivisibleByU,

    #[error("malformed rational {0:?}")]
    ParseRational(String),

    #[error("duplicate distance {0} (ties have probability zero)")]
    DuplicateDistance(f64),

    #[error("distance {0} is not a finite number")]
    NonFiniteDistance(f64),

    #[error("not a permutation of 1..{0}")]
    InvalidPermutation(usize),

    #[error("game with {players} players not finished after {supplied} throws")]
    IncompleteGame { players: usize, supplied: usize },

    #[error("permutation does not encode a complete {0}-player game")]
    NotCompleteGame(usize),

    #[error("player {k} out of range 1..={p}")]
    PlayerOutOfRange { p: usize, k: usize },

    #[error("need at least {min} players, got {got}")]
    TooFewPlayers { min: usize, got: usize },

    #[error("x = {0} outside [0, 1]")]
    OutOfUnitInterval(String),

    #[error("no closed form available for p = {p}, k = {k}, x = {x}")]
    UnsupportedClosedForm { p: usize, k: usize, x: f64 },

    #[error("enumeration of S_{n} exceeds the budget (n <= {max})")]
    EnumerationBudget { n: usize, max: usize },

    #[error("table built up to {limit}, requested {requested}")]
    TableTooSmall { limit: usize, requested: usize },

    #[error("t = {0} coincides with a root of unity")]
    RootOfUnityPole(String),

    #[error("identity violated: {0}")]
    IdentityViolation(String),
}
