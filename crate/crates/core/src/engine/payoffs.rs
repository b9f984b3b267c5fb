use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mechanism::outcome_g;
use crate::quantum::{Basis, Coin};
use crate::scr::{Agent, Outcome, Profile};

use super::run::Card;
use super::Setting;

/// Tolerance separating a strict inequality from its boundary case.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// Payoffs of a reference agent, seen as "the second agent": the first
/// letter is the other agent's coin, the second the reference agent's.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DollarPayoffs {
    pub cc: f64,
    pub cd: f64,
    pub dc: f64,
    pub dd: f64,
    /// Outcomes behind `cc, cd, dc, dd`.
    pub outcomes: [Outcome; 4],
}

impl DollarPayoffs {
    pub fn from_values(cc: f64, cd: f64, dc: f64, dd: f64) -> Self {
        DollarPayoffs {
            cc,
            cd,
            dc,
            dd,
            outcomes: [Outcome(0); 4],
        }
    }
}

/// The physical basis state for `(other coin, reference coin)`.
pub fn reference_basis(reference: Agent, other_coin: Coin, own_coin: Coin) -> Basis {
    match reference {
        Agent::Two => Basis::from_coins(other_coin, own_coin),
        Agent::One => Basis::from_coins(own_coin, other_coin),
    }
}

/// Resolves each collapse pattern through the cards and the outcome function
/// and evaluates the reference agent's utility at `theta_true`.
pub fn dollar_payoffs(
    setting: &Setting<'_>,
    theta_true: Profile,
    cards: &[Card; 2],
    reference: Agent,
) -> Result<DollarPayoffs> {
    let patterns = [
        (Coin::C, Coin::C),
        (Coin::C, Coin::D),
        (Coin::D, Coin::C),
        (Coin::D, Coin::D),
    ];
    let mut values = [0.0; 4];
    let mut outcomes = [Outcome(0); 4];
    for (k, (other, own)) in patterns.into_iter().enumerate() {
        let basis = reference_basis(reference, other, own);
        let s1 = cards[0].side(basis.coin(Agent::One));
        let s2 = cards[1].side(basis.coin(Agent::Two));
        let g = outcome_g(setting.w, setting.f, &s1, &s2)?;
        outcomes[k] = g;
        values[k] = setting.u.get(reference, theta_true, g);
    }
    Ok(DollarPayoffs {
        cc: values[0],
        cd: values[1],
        dc: values[2],
        dd: values[3],
        outcomes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Satisfied,
    /// Both sides agree within [`BOUNDARY_TOLERANCE`].
    Boundary,
    Violated,
}

/// `lhs > rhs`, with the strict and the weak reading reported side by side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
    pub strict: Verdict,
    /// `lhs ≥ rhs` within tolerance.
    pub weak: bool,
}

impl Inequality {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let diff = lhs - rhs;
        let strict = if diff > BOUNDARY_TOLERANCE {
            Verdict::Satisfied
        } else if diff.abs() <= BOUNDARY_TOLERANCE {
            Verdict::Boundary
        } else {
            Verdict::Violated
        };
        Inequality {
            lhs,
            rhs,
            strict,
            weak: diff >= -BOUNDARY_TOLERANCE,
        }
    }

    pub fn holds(&self) -> bool {
        self.strict == Verdict::Satisfied
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaPayoffReport {
    /// `$CC > $DD`.
    pub lambda3: Inequality,
    /// `$CC > $CD cos²γ + $DC sin²γ` (or `$CC > $DC` at maximal entanglement).
    pub lambda4: Inequality,
}

impl LambdaPayoffReport {
    pub fn holds(&self) -> bool {
        self.lambda3.holds() && self.lambda4.holds()
    }
}

/// The payoff conditions at entanglement `gamma` for one reference agent.
pub fn check_lambda_full(p: &DollarPayoffs, gamma: f64) -> LambdaPayoffReport {
    let s2 = gamma.sin().powi(2);
    let c2 = gamma.cos().powi(2);
    LambdaPayoffReport {
        lambda3: Inequality::new(p.cc, p.dd),
        lambda4: Inequality::new(p.cc, p.cd * c2 + p.dc * s2),
    }
}

/// The payoff conditions once entanglement is fixed at its maximum, where
/// the fourth condition reduces to `$CC > $DC`.
pub fn check_lambda_pi2(p: &DollarPayoffs) -> LambdaPayoffReport {
    LambdaPayoffReport {
        lambda3: Inequality::new(p.cc, p.dd),
        lambda4: Inequality::new(p.cc, p.dc),
    }
}

/// The value of `sin²γ` at which `$CC = $CD cos²γ + $DC sin²γ`, if it lies in `[0, 1]`.
pub fn lambda4_threshold(p: &DollarPayoffs) -> Option<f64> {
    let denom = p.cd - p.dc;
    if denom.abs() < f64::EPSILON {
        return None;
    }
    let x = (p.cd - p.cc) / denom;
    (0.0..=1.0).contains(&x).then_some(x)
}
