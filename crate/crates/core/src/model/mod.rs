//! Problem constructors: the portfolio models and the academic examples.

mod examples;
mod portfolio;

use thiserror::Error;

use crate::polycone::ConeError;
use crate::sets::SetError;
use crate::stationarity::StationarityError;

pub use examples::{
    example, example_2_1, example_4_12, example_5_2, example_5_5, AcademicCase, Claim, ClaimOutcome, NamedProblem,
    VanishingProblem, VanishingRefProblem, EXAMPLE_IDS,
};
pub use portfolio::{
    brute_force_pop, brute_force_pop_ref, build_pop, build_pop_ref, greedy_best_return, portfolio_toy, solve_portfolio,
    support_qp, PortfolioInstance, PortfolioModel, PortfolioRun, PSD_TOL, SYMMETRY_TOL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("infeasible instance: {0}")]
    InfeasibleInstance(String),
    #[error("invalid instance: {0}")]
    Validation(String),
    #[error("unknown example '{0}'")]
    UnknownExample(String),
    #[error("fixture {0}")]
    Fixture(String),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Stationarity(#[from] StationarityError),
}
