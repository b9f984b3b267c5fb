//! Finite two-agent social choice environments and the conditions μ, μ2 and
//! the ordinal part of λ′.

mod env;
mod lambda;
mod mu2;

pub use env::{Agent, Environment, Outcome, OutcomeSet, Profile, Ranking, Scr, MAX_OUTCOMES};
pub use lambda::{check_lambda_ordinal, lambda_candidates, pareto_improves};
pub use mu2::{
    explain_mu2, search_mu2, verify_mu2, CKey, ConditionReport, EKey, Mu2Check, Mu2Witness, Rule,
    SearchLimits, Violation,
};
