//! The entangled mechanism, its algorithmic counterpart, and the
//! equilibrium check for the coordinated outcome.

mod payoffs;
mod proposition;
mod run;

use crate::mechanism::UtilityTable;
use crate::scr::{Environment, Mu2Witness, Scr};

pub use payoffs::{
    check_lambda_full, check_lambda_pi2, dollar_payoffs, lambda4_threshold, reference_basis,
    DollarPayoffs, Inequality, LambdaPayoffReport, Verdict, BOUNDARY_TOLERANCE,
};
pub use proposition::{
    best_deviation, candidate_profile, expected_utilities, verify_proposition, CardFreedom,
    ClassicalVerdict, Deviation, OpGrid, PropositionVerdict, QuantumVerdict, EQUILIBRIUM_TOLERANCE,
};
pub use run::{
    run_algorithmic_mechanism, run_quantum_mechanism, two_agent_algorithm, AlgorithmInput,
    AlgorithmOutput, Branch, Card, QuantumStrategy, RunReport,
};

/// Borrowed view of everything a mechanism run needs.
#[derive(Clone, Copy, Debug)]
pub struct Setting<'a> {
    pub env: &'a Environment,
    pub f: &'a Scr,
    pub w: &'a Mu2Witness,
    pub u: &'a UtilityTable,
}

impl<'a> Setting<'a> {
    pub fn new(env: &'a Environment, f: &'a Scr, w: &'a Mu2Witness, u: &'a UtilityTable) -> Self {
        Setting { env, f, w, u }
    }
}
