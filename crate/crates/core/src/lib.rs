//! Solver toolkit for statistical decision problems.
//!
//! Computes exact minimax values, minimax procedures, and least favorable
//! priors for finite games via linear programming with duality certificates,
//! and approximates metric-parameter problems by epsilon-net discretization
//! with certified Lipschitz error bounds. Includes k-Wasserstein distances
//! between finitely supported measures, an iterative fictitious-play
//! bracket, built-in canonical games whose infinite versions break the
//! minimax equality, and a verification suite tying it all together.

pub mod catalog;
pub mod discretize;
pub mod game;
pub mod lp;
pub mod matrix;
pub mod model;
pub mod suite;
pub mod transport;

pub use discretize::{ApproximationResult, Interval, MetricFamily};
pub use game::{GameSolution, SeparationQuery};
pub use lp::{LinearProgram, LpSolution, LpStatus};
pub use matrix::Mat;
pub use model::{
    FiniteDecisionProblem, FinitePrior, Label, ProblemSpec, RandomizedProcedure, RiskProfile,
};
pub use transport::DiscreteMeasure;
