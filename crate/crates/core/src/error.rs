use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid building block: {0}")]
    InvalidBlock(String),

    #[error("chain does not close: turning defect {turning_defect:.3e}, endpoint gap {endpoint_gap:.3e}")]
    Closure { turning_defect: f64, endpoint_gap: f64 },

    #[error("constraint solve did not converge after {iterations} iterations (residual {residual:.3e})")]
    ConstraintSolve { iterations: usize, residual: f64 },

    #[error("curvature floor violated: min curvature {min_kappa:.6e} <= {floor:.6e}")]
    Convexity { min_kappa: f64, floor: f64 },

    #[error("trajectory left the wall after the bounce at s = {exit_s:.17e} (angle {exit_angle:.17e})")]
    EscapedWall { exit_s: f64, exit_angle: f64 },

    #[error("iteration cap of {cap} bounces reached")]
    IterationCap { cap: usize },

    #[error("orbit launched at angle {theta:.17e} did not close (residual {residual:.3e})")]
    ClosureFailure { theta: f64, residual: f64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("least-squares system ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("escape count is constant over the perturbation sweep for block {block}")]
    NoDiscontinuity { block: usize },

    #[error("no escape-count jump with a midpoint bounce in the sweep for block {block}")]
    NoOddJump { block: usize },

    #[error("no support interval of width >= {min_width:.3e} avoids recorded bounces on block {block}")]
    SupportExhausted { block: usize, min_width: f64 },

    #[error("no common matching angle reachable by all blocks in round {round}")]
    AngleWindowEmpty { round: usize },

    #[error("angle of round {round} no longer matches block {block} (midpoint residual {residual:.3e})")]
    MatchLost { round: usize, block: usize, residual: f64 },

    #[error("the two tables are congruent (curvature distance {distance:.3e})")]
    Congruent { distance: f64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
