//! The classical two-agent message mechanism and its equilibria.

mod nash;
mod outcome;
mod utility;

pub use nash::{
    best_response, enumerate_nash, implements_check, strategy_space, Equilibrium, EquilibriumSet,
    ImplementationReport, ProfileImplementation,
};
pub use outcome::{dispatch, outcome_g, Message, MrRule};
pub use utility::UtilityTable;
