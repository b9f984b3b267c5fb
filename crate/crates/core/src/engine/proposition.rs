//! Computational check of the claim that agents can coordinate on an outcome
//! outside `f(θ)` through the entangled branch.
//!
//! The candidate profile has both agents play `C` with card
//! `((θ′, a′, *, 0), truthful message)`. A unilateral deviation may change the
//! local operation (swept over a `ξ × φ` grid) and the card. In the entangled
//! branch side 0 is fixed to `(θ′, a′, *, 0)`, so the primary check lets the
//! deviator rewrite side 1 only; a second sweep that also frees side 0 is
//! reported alongside it.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanism::{enumerate_nash, outcome_g, strategy_space, Message};
use crate::quantum::{collapse_distribution, final_state, Basis, Entangler, LocalOp};
use crate::scr::{check_lambda_ordinal, verify_mu2, Agent, Outcome, OutcomeSet, Profile};

use super::payoffs::{
    check_lambda_full, check_lambda_pi2, dollar_payoffs, DollarPayoffs, LambdaPayoffReport,
};
use super::run::{Card, QuantumStrategy};
use super::Setting;

/// A deviation counts as profitable only above this gain.
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-9;

/// `xi_points × phi_points` evenly spaced operations, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpGrid {
    pub xi_points: usize,
    pub phi_points: usize,
}

impl OpGrid {
    /// `density` points on `[0, π]` and `density / 2 + 1` on `[0, π/2]`,
    /// so 61 gives the 61×31 grid.
    pub fn with_density(density: usize) -> Result<Self> {
        if density < 2 {
            return Err(Error::InvalidInput(format!(
                "grid density must be at least 2, got {density}"
            )));
        }
        Ok(OpGrid {
            xi_points: density,
            phi_points: density / 2 + 1,
        })
    }

    pub fn ops(&self) -> impl Iterator<Item = LocalOp> + '_ {
        let xs = self.xi_points;
        let ps = self.phi_points;
        (0..xs).flat_map(move |i| {
            (0..ps).map(move |k| LocalOp {
                xi: PI * i as f64 / (xs - 1) as f64,
                phi: FRAC_PI_2 * k as f64 / (ps - 1).max(1) as f64,
            })
        })
    }
}

/// Which card sides a deviating agent may rewrite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CardFreedom {
    /// Side 0 stays as prescribed; side 1 is free.
    Side1,
    /// Both sides are free.
    BothSides,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub agent: Agent,
    pub op: LocalOp,
    pub card: Card,
    pub payoff: f64,
    /// `payoff` minus the candidate profile's expected utility.
    pub gain: f64,
}

fn probabilities_by_coins(dist: &[f64; 4], j: Agent) -> [[f64; 2]; 2] {
    // [own coin][other coin]
    let mut p = [[0.0; 2]; 2];
    for b in Basis::ALL {
        let own = b.coin(j) as usize;
        let other = b.coin(j.other()) as usize;
        p[own][other] = dist[b.index()];
    }
    p
}

fn outcome_for(setting: &Setting<'_>, j: Agent, own: &Message, other: &Message) -> Result<Outcome> {
    match j {
        Agent::One => outcome_g(setting.w, setting.f, own, other),
        Agent::Two => outcome_g(setting.w, setting.f, other, own),
    }
}

/// Expected utilities of both agents for a strategy profile, evaluated
/// exactly over the four collapse branches.
pub fn expected_utilities(
    setting: &Setting<'_>,
    theta_true: Profile,
    gamma: f64,
    strategies: &[QuantumStrategy; 2],
) -> Result<([f64; 2], [Outcome; 4], [f64; 4])> {
    let dist = collapse_distribution(&final_state(
        Entangler::new(gamma)?,
        strategies[0].op,
        strategies[1].op,
    )?)?;
    let mut outcomes = [Outcome(0); 4];
    let mut util = [0.0; 2];
    for b in Basis::ALL {
        let s1 = strategies[0].card.side(b.coin(Agent::One));
        let s2 = strategies[1].card.side(b.coin(Agent::Two));
        let g = outcome_g(setting.w, setting.f, &s1, &s2)?;
        outcomes[b.index()] = g;
        for j in Agent::ALL {
            util[j.index()] += dist.probabilities[b.index()] * setting.u.get(j, theta_true, g);
        }
    }
    Ok((util, outcomes, dist.probabilities))
}

/// Best unilateral deviation of agent `j` against `opponent`, over the op grid
/// and the allowed card rewrites. `own_card` supplies the side(s) that stay
/// fixed. Ties keep the first deviation found, so the result is deterministic.
#[allow(clippy::too_many_arguments)]
pub fn best_deviation(
    setting: &Setting<'_>,
    theta_true: Profile,
    gamma: f64,
    j: Agent,
    opponent: &QuantumStrategy,
    own_card: &Card,
    freedom: CardFreedom,
    grid: OpGrid,
) -> Result<Deviation> {
    let entangler = Entangler::new(gamma)?;
    let opp_sides = [opponent.card.side0, opponent.card.side1];
    let n_max = opp_sides
        .iter()
        .map(|m| m.n)
        .max()
        .unwrap_or(0)
        .saturating_add(1);
    let messages = strategy_space(setting.env, setting.f, setting.w, n_max);
    // util[m][other coin]
    let util_of = |m: &Message| -> Result<[f64; 2]> {
        let mut out = [0.0; 2];
        for (oc, opp) in opp_sides.iter().enumerate() {
            out[oc] = setting
                .u
                .get(j, theta_true, outcome_for(setting, j, m, opp)?);
        }
        Ok(out)
    };
    let table: Vec<[f64; 2]> = messages.iter().map(util_of).collect::<Result<_>>()?;
    let fixed0 = util_of(&own_card.side0)?;

    let best_side = |p: &[f64; 2]| -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, u) in table.iter().enumerate() {
            let v = p[0] * u[0] + p[1] * u[1];
            if v > best.0 {
                best = (v, i);
            }
        }
        best
    };

    let mut best: Option<Deviation> = None;
    for op in grid.ops() {
        let ops = match j {
            Agent::One => [op, opponent.op],
            Agent::Two => [opponent.op, op],
        };
        let dist = collapse_distribution(&final_state(entangler, ops[0], ops[1])?)?;
        let p = probabilities_by_coins(&dist.probabilities, j);
        let (v0, side0) = match freedom {
            CardFreedom::Side1 => (p[0][0] * fixed0[0] + p[0][1] * fixed0[1], own_card.side0),
            CardFreedom::BothSides => {
                let (v, i) = best_side(&p[0]);
                (v, messages[i])
            }
        };
        let (v1, i1) = best_side(&p[1]);
        let payoff = v0 + v1;
        if best.is_none_or(|b| payoff > b.payoff) {
            best = Some(Deviation {
                agent: j,
                op,
                card: Card::new(side0, messages[i1]),
                payoff,
                gain: 0.0,
            });
        }
    }
    best.ok_or_else(|| Error::InvalidInput("empty deviation grid".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalVerdict {
    pub theta_true: Profile,
    pub equilibrium_outcomes: OutcomeSet,
    pub target: OutcomeSet,
    pub matches_f: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumVerdict {
    pub theta_true: Profile,
    pub gamma: f64,
    pub grid: OpGrid,
    /// The `(θ′, a′)` chosen by the gate.
    pub target: (Profile, Outcome),
    /// Card played by both agents in the candidate profile.
    pub card: Card,
    pub distribution: [f64; 4],
    pub branch_outcomes: [Outcome; 4],
    /// Set when a single collapse branch carries all the probability.
    pub outcome: Option<Outcome>,
    pub equilibrium_utilities: [f64; 2],
    pub payoffs: [DollarPayoffs; 2],
    pub lambda: [LambdaPayoffReport; 2],
    pub lambda_pi2: [LambdaPayoffReport; 2],
    /// Best deviations with side 0 fixed.
    pub deviations: [Deviation; 2],
    /// Best deviations with both card sides free.
    pub unrestricted_deviations: [Deviation; 2],
    pub is_equilibrium: bool,
    pub unrestricted_equilibrium: bool,
    pub outside_f: bool,
    /// Both payoff conditions hold strictly for both agents at `gamma`.
    pub lambda_holds: bool,
    /// `lambda_holds` agrees with "equilibrium with an outcome outside f(θ)".
    pub consistent: bool,
}

impl QuantumVerdict {
    pub fn worst_deviation(&self) -> &Deviation {
        if self.deviations[1].gain > self.deviations[0].gain {
            &self.deviations[1]
        } else {
            &self.deviations[0]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "lowercase")]
pub enum PropositionVerdict {
    Classical(ClassicalVerdict),
    Quantum(Box<QuantumVerdict>),
}

/// The candidate strategy profile: both agents play `C` with card
/// `((θ′, a′, *, 0), truthful message at θ)`.
pub fn candidate_profile(
    setting: &Setting<'_>,
    theta_true: Profile,
    target: (Profile, Outcome),
) -> Result<[QuantumStrategy; 2]> {
    let card = Card::new(
        Message::with_placeholder(setting.w, target.0, target.1, 0)?,
        Message::truthful(setting.f, setting.w, theta_true)?,
    );
    let s = QuantumStrategy {
        op: LocalOp::C,
        card,
    };
    Ok([s, s])
}

pub fn verify_proposition(
    setting: &Setting<'_>,
    theta_true: Profile,
    gamma: f64,
    grid_density: usize,
) -> Result<PropositionVerdict> {
    let report = verify_mu2(setting.env, setting.f, setting.w);
    if !report.satisfied {
        return Err(Error::Precondition(format!(
            "the witness does not establish condition mu2 ({} violations)",
            report.violations.len()
        )));
    }
    let grid = OpGrid::with_density(grid_density)?;
    Entangler::new(gamma)?;
    setting.env.check_profile(theta_true)?;

    let Some(target) = check_lambda_ordinal(setting.env, setting.f, theta_true)? else {
        let eq = enumerate_nash(setting.env, setting.f, setting.w, setting.u, theta_true, 2)?;
        let f_set = setting.f.get(theta_true);
        return Ok(PropositionVerdict::Classical(ClassicalVerdict {
            theta_true,
            equilibrium_outcomes: eq.outcomes,
            target: f_set,
            matches_f: eq.outcomes == f_set,
        }));
    };

    let strategies = candidate_profile(setting, theta_true, target)?;
    let cards = strategies.map(|s| s.card);
    let (eq_util, branch_outcomes, distribution) =
        expected_utilities(setting, theta_true, gamma, &strategies)?;
    let outcome = Basis::ALL
        .into_iter()
        .find(|b| distribution[b.index()] >= 1.0 - 1e-12)
        .map(|b| branch_outcomes[b.index()]);

    let payoffs = [
        dollar_payoffs(setting, theta_true, &cards, Agent::One)?,
        dollar_payoffs(setting, theta_true, &cards, Agent::Two)?,
    ];
    let lambda = payoffs.map(|p| check_lambda_full(&p, gamma));
    let lambda_pi2 = payoffs.map(|p| check_lambda_pi2(&p));

    let sweep = |freedom: CardFreedom| -> Result<[Deviation; 2]> {
        let mut out = Vec::with_capacity(2);
        for j in Agent::ALL {
            let mut d = best_deviation(
                setting,
                theta_true,
                gamma,
                j,
                &strategies[j.other().index()],
                &strategies[j.index()].card,
                freedom,
                grid,
            )?;
            d.gain = d.payoff - eq_util[j.index()];
            out.push(d);
        }
        Ok([out[0], out[1]])
    };
    let deviations = sweep(CardFreedom::Side1)?;
    let unrestricted_deviations = sweep(CardFreedom::BothSides)?;

    let is_equilibrium = deviations.iter().all(|d| d.gain <= EQUILIBRIUM_TOLERANCE);
    let unrestricted_equilibrium = unrestricted_deviations
        .iter()
        .all(|d| d.gain <= EQUILIBRIUM_TOLERANCE);
    let outside_f = outcome.is_some_and(|a| !setting.f.get(theta_true).contains(a));
    let lambda_holds = lambda.iter().all(|r| r.holds());

    Ok(PropositionVerdict::Quantum(Box::new(QuantumVerdict {
        theta_true,
        gamma,
        grid,
        target,
        card: cards[0],
        distribution,
        branch_outcomes,
        outcome,
        equilibrium_utilities: eq_util,
        payoffs,
        lambda,
        lambda_pi2,
        deviations,
        unrestricted_deviations,
        is_equilibrium,
        unrestricted_equilibrium,
        outside_f,
        lambda_holds,
        consistent: lambda_holds == (is_equilibrium && outside_f),
    })))
}
