use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A symbol fell outside the declared alphabet, a sequence was empty, or a
    /// parameter failed validation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The per-context capacity roots disagree beyond the uniformity
    /// tolerance; the offending contexts and their roots are listed.
    #[error("cost capacity is not uniform across contexts (tolerance {tolerance:e}): {}",
            format_roots(.contexts))]
    CapacityNotUniform {
        tolerance: f64,
        /// (context digits, root) pairs for every context, sorted.
        contexts: Vec<(Vec<u8>, f64)>,
    },

    /// An exhaustive enumeration would exceed the configured budget.
    #[error("enumeration of {requested} strings exceeds budget {budget}; use a Monte Carlo method")]
    EnumerationTooLarge { requested: f64, budget: u64 },

    /// The string has zero probability under the source and therefore no
    /// codeword.
    #[error("input has zero probability and no codeword")]
    UnencodableInput,

    /// The symbol string is not a codeword of this encoder.
    #[error("not a codeword of this encoder")]
    DecodeFailure,

    /// An internal self-check of the code construction failed. This indicates
    /// a bug, never a property of valid inputs.
    #[error("code construction self-check failed: {0}")]
    ConstructionBug(String),

    /// A spectrum curve never crosses the requested level within the grid.
    #[error("curve does not cross epsilon = {epsilon} within the grid [{lo}, {hi}]")]
    BracketNotFound { epsilon: f64, lo: f64, hi: f64 },

    /// The source has zero self-information variance; the second-order
    /// threshold formula degenerates.
    #[error("degenerate source: self-information variance is zero")]
    DegenerateSource,

    /// An argument fell outside a function's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Configuration file problems.
    #[error("config error: {0}")]
    Config(String),
}

fn format_roots(contexts: &[(Vec<u8>, f64)]) -> String {
    contexts
        .iter()
        .map(|(ctx, root)| {
            let digits: String = ctx.iter().map(|d| char::from(b'0' + d)).collect();
            format!("\"{digits}\" -> {root:.12}")
        })
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
