use thiserror::Error;

/// Errors produced by the kg1d library.
#[derive(Debug, Error)]
pub enum KgError {
    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },

    #[error("potential decay bound violated: claimed beta={beta_claim}, weighted samples still grow at the box edge ({constant_mid:.3e} at L/2 vs {constant_edge:.3e} at L)")]
    PotentialDecay {
        beta_claim: f64,
        constant_mid: f64,
        constant_edge: f64,
    },

    #[error("invalid potential: {reason}")]
    InvalidPotential { reason: String },

    #[error("invalid cutoff: {reason}")]
    InvalidCutoff { reason: String },

    #[error("quadrature under-resolved: {given} nodes, resolution rule requires at least {required}")]
    NodeCountTooLow { required: usize, given: usize },

    #[error("kernel entry is distributional without a cutoff")]
    DistributionalEntry,

    #[error("resolvent evaluated on the continuous spectrum (omega={re}+{im}i); offset by a nonzero imaginary part")]
    OnContinuousSpectrum { re: f64, im: f64 },

    #[error("potential tail too large at the box edge: |V| = {v_edge:.3e}, limit {limit:.3e}; enlarge the box")]
    TailCondition { v_edge: f64, limit: f64 },

    #[error("Wronskian evaluations disagree across x (spread {spread:.3e}, tolerance {tol:.3e}); integration accuracy insufficient")]
    WronskianMismatch { spread: f64, tol: f64 },

    #[error("Wronskian vanishes at k={k} > 0")]
    VanishingWronskian { k: f64 },

    #[error("k-window too small: |psi - c| = {edge_dev:.3e} at the window edge; increase k_window")]
    WindowTooSmall { edge_dev: f64 },

    #[error("eigenvalue {energy} reaches spectral gap edge; lambda degenerate or non-real")]
    SpectralGapEdge { energy: f64 },

    #[error("bound state exactly at the spectral edge (lambda = 0); generator has a Jordan block, projection undefined")]
    EdgeDegenerateBoundState,

    #[error("time stepper unstable (norm growth > 10x); retry with dt <= {suggested_dt:.3e}")]
    Instability { suggested_dt: f64 },

    #[error("power iteration did not converge within {iters} iterations")]
    NoConvergence { iters: usize },

    #[error("decay fit requires strictly positive values and increasing times")]
    BadFitInput,

    #[error("matrix not positive definite (pivot {pivot:.3e} at index {index})")]
    NotPositiveDefinite { pivot: f64, index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("states live on different grids")]
    GridMismatch,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, KgError>;
