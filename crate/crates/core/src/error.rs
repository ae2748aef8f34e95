use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("function `{0}` used with different argument counts")]
    Arity(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("jet order {requested} exceeds the maximum order {max}")]
    OrderOverflow { requested: u32, max: u32 },
    #[error("atom bound twice in one substitution: {0}")]
    InconsistentBinding(String),
    #[error("numeric probe hit a pole")]
    Pole,
    #[error("every numeric instantiation hit a pole")]
    ProbeSingular,
    #[error("invalid jet space: {0}")]
    InvalidJetSpace(String),
    #[error("invalid ODE: {0}")]
    InvalidOde(String),
    #[error("invalid parameter function: {0}")]
    InvalidParameter(String),
    #[error("degenerate map: {0}")]
    DegenerateMap(String),
    #[error("singular Jacobian: the new independent variable has zero total derivative")]
    SingularJacobian,
    #[error("degenerate denominator in the first-order transformed parameter")]
    DegenerateDenominator,
    #[error("input does not have the declared shape: {0}")]
    CaseMismatch(String),
    #[error("even order with a non-positive determinant")]
    Parity,
    #[error("expression is not a rational function of the variable: {0}")]
    NotRational(String),
    #[error("no group element reaches the target: {0}")]
    NoSolution(String),
    #[error("equation is not cubic in the first derivative")]
    NotCubic,
    #[error("equation is not polynomial in the first derivative")]
    NotPolynomial,
    #[error("unsupported order {0}")]
    UnsupportedOrder(u32),
    #[error("this generator requires the function alpha")]
    MissingAlpha,
    #[error("branch does not match the transformation: {0}")]
    BranchMismatch(String),
    #[error("parameter constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}
