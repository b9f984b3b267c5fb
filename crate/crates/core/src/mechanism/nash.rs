//! Brute-force pure-strategy equilibria of the classical message game.
//!
//! The outcome function reads the integers only through the predicates
//! `n_j = 0`, `n_j > 0` and `n_1 ≥ n_2`. Against an opponent announcing
//! `n_opp`, every `n_j` therefore behaves like one of `0, 1, …, n_opp + 1`,
//! so deviations over that range are exhaustive even though candidate
//! profiles are only enumerated up to `n_cap`.

use crate::error::{Error, Result};
use crate::scr::{Agent, Environment, Mu2Witness, Outcome, OutcomeSet, Profile, Scr};

use super::outcome::{outcome_g, Message};
use super::utility::UtilityTable;

#[derive(Clone, Debug, PartialEq)]
pub struct Equilibrium {
    pub messages: [Message; 2],
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumSet {
    /// In lexicographic order of the message pair.
    pub equilibria: Vec<Equilibrium>,
    pub outcomes: OutcomeSet,
    /// Number of message pairs examined.
    pub pairs_examined: usize,
}

/// All messages `(θ, a ∈ f(θ), b ∈ B, n ≤ n_max)` in lexicographic order.
pub fn strategy_space(env: &Environment, f: &Scr, w: &Mu2Witness, n_max: u32) -> Vec<Message> {
    let mut out = Vec::new();
    for t in env.profiles() {
        for a in f.get(t).iter() {
            for b in w.b_set.iter() {
                for n in 0..=n_max {
                    out.push(Message::new(t, a, b, n));
                }
            }
        }
    }
    out
}

/// Highest utility agent `j` can reach against a fixed opponent message,
/// with the first message attaining it.
pub fn best_response(
    env: &Environment,
    f: &Scr,
    w: &Mu2Witness,
    u: &UtilityTable,
    j: Agent,
    theta_true: Profile,
    opponent: &Message,
) -> Result<(f64, Message)> {
    let mut best: Option<(f64, Message)> = None;
    for m in strategy_space(env, f, w, opponent.n.saturating_add(1)) {
        let g = match j {
            Agent::One => outcome_g(w, f, &m, opponent)?,
            Agent::Two => outcome_g(w, f, opponent, &m)?,
        };
        let v = u.get(j, theta_true, g);
        if best.is_none_or(|(bv, _)| v > bv) {
            best = Some((v, m));
        }
    }
    best.ok_or_else(|| Error::InvalidInput("empty strategy space".into()))
}

/// Enumerates the pure-strategy equilibria of the message game at `theta_true`
/// over announcements with `n ≤ n_cap`.
pub fn enumerate_nash(
    env: &Environment,
    f: &Scr,
    w: &Mu2Witness,
    u: &UtilityTable,
    theta_true: Profile,
    n_cap: u32,
) -> Result<EquilibriumSet> {
    if n_cap < 2 {
        return Err(Error::InvalidInput(format!(
            "n_cap must be at least 2, got {n_cap}"
        )));
    }
    env.check_profile(theta_true)?;
    let space = strategy_space(env, f, w, n_cap);
    if space.is_empty() {
        return Err(Error::InvalidInput("witness has an empty B".into()));
    }
    // best responses depend on the opponent message only
    let best: [Vec<f64>; 2] = [
        space
            .iter()
            .map(|m| best_response(env, f, w, u, Agent::One, theta_true, m).map(|r| r.0))
            .collect::<Result<_>>()?,
        space
            .iter()
            .map(|m| best_response(env, f, w, u, Agent::Two, theta_true, m).map(|r| r.0))
            .collect::<Result<_>>()?,
    ];
    let mut equilibria = Vec::new();
    let mut outcomes = OutcomeSet::EMPTY;
    for (i1, s1) in space.iter().enumerate() {
        for (i2, s2) in space.iter().enumerate() {
            let g = outcome_g(w, f, s1, s2)?;
            let stable = u.get(Agent::One, theta_true, g) >= best[0][i2]
                && u.get(Agent::Two, theta_true, g) >= best[1][i1];
            if stable {
                equilibria.push(Equilibrium {
                    messages: [*s1, *s2],
                    outcome: g,
                });
                outcomes.insert(g);
            }
        }
    }
    Ok(EquilibriumSet {
        equilibria,
        outcomes,
        pairs_examined: space.len() * space.len(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileImplementation {
    pub profile: Profile,
    pub equilibrium_outcomes: OutcomeSet,
    pub target: OutcomeSet,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImplementationReport {
    pub implements: bool,
    pub per_profile: Vec<ProfileImplementation>,
}

impl ImplementationReport {
    pub fn failing_profiles(&self) -> impl Iterator<Item = Profile> + '_ {
        self.per_profile
            .iter()
            .filter(|p| !p.matches)
            .map(|p| p.profile)
    }
}

/// Checks `{g(s) : s ∈ NE(g, θ)} = f(θ)` at every profile by brute force.
pub fn implements_check(
    env: &Environment,
    f: &Scr,
    w: &Mu2Witness,
    u: &UtilityTable,
    n_cap: u32,
) -> Result<ImplementationReport> {
    let per_profile = env
        .profiles()
        .map(|t| {
            let eq = enumerate_nash(env, f, w, u, t, n_cap)?;
            Ok(ProfileImplementation {
                profile: t,
                equilibrium_outcomes: eq.outcomes,
                target: f.get(t),
                matches: eq.outcomes == f.get(t),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ImplementationReport {
        implements: per_profile.iter().all(|p| p.matches),
        per_profile,
    })
}
