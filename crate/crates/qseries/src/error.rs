use crate::rat::{fmt_rat, Rat};

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("prefactor mismatch: q-power prefactors {} and {} differ by a non-integer", fmt_rat(.0), fmt_rat(.1))]
    PrefactorMismatch(Rat, Rat),
    #[error("cannot invert a series whose constant term is zero")]
    ZeroConstantTerm,
    #[error("series square root requires constant term 1, found {}", fmt_rat(.0))]
    SqrtConstantNotOne(Rat),
    #[error("constant term must be 1, found {}", fmt_rat(.0))]
    ConstantTermNotOne(Rat),
    #[error("operation requires a zero q-power prefactor, found {}", fmt_rat(.0))]
    NonzeroPrefactor(Rat),
    #[error("coefficient index {index} is beyond the truncation order {trunc}")]
    BeyondTruncation { index: usize, trunc: usize },
    #[error("residue {residue} out of range for modulus {modulus}")]
    ResidueOutOfRange { residue: i64, modulus: i64 },
    #[error("term has negative q-exponent {}", fmt_rat(.0))]
    NegativeExponent(Rat),
    #[error("term exponents do not share a common fractional offset")]
    MixedFractionalExponents,
    #[error("argument out of range: {0}")]
    InvalidArgument(String),
    #[error("truncation order {have} is insufficient, need at least {need}")]
    InsufficientTruncation { have: usize, need: usize },
    #[error("exponent {} has denominator larger than 2", fmt_rat(.0))]
    ExponentDenominator(Rat),
    #[error("no period found up to {0}: not a Jacobi-type product to this order")]
    NoPeriodFound(usize),
    #[error("no polynomial relation found")]
    NoPolynomialFound,
    #[error("relation fails verification at q^{0}")]
    VerificationFailed(i64),
    #[error("denominator vanishes at q = 0 after normalization")]
    PoleAtZero,
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
}

pub type Result<T> = std::result::Result<T, Error>;
