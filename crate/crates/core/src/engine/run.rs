use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanism::{dispatch, outcome_g, Message, MrRule};
use crate::quantum::{
    collapse_distribution, final_state, sample_collapse, Basis, Coin, Entangler, LocalOp,
    COLLAPSE_RNG,
};
use crate::scr::{check_lambda_ordinal, Agent, Outcome, Profile};

use super::Setting;

/// A two-sided card; side 0 is read if the agent's coin collapses to `C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Card {
    pub side0: Message,
    pub side1: Message,
}

impl Card {
    pub fn new(side0: Message, side1: Message) -> Self {
        Card { side0, side1 }
    }

    /// Both sides carry the same message.
    pub fn plain(m: Message) -> Self {
        Card { side0: m, side1: m }
    }

    pub fn side(&self, coin: Coin) -> Message {
        match coin {
            Coin::C => self.side0,
            Coin::D => self.side1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumStrategy {
    pub op: LocalOp,
    pub card: Card,
}

/// Per-agent input to the two-agent algorithm: the two angles and the card.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmInput {
    pub xi: f64,
    pub phi: f64,
    pub card: Card,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// The gate did not fire: truthful messages, no entanglement.
    Classical,
    /// The gate fired: cards are read through the collapsed coins.
    Quantum,
}

/// Everything needed to replay one run of either mechanism.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub branch: Branch,
    pub theta_true: Profile,
    /// The `(θ′, a′)` the gate selected, if it fired.
    pub gate_target: Option<(Profile, Outcome)>,
    pub gamma: f64,
    pub seed: u64,
    pub rng: String,
    pub ops: [LocalOp; 2],
    pub cards: [Card; 2],
    pub distribution: [f64; 4],
    pub collapse: Basis,
    pub messages: [Message; 2],
    pub rule: MrRule,
    pub outcome: Outcome,
    pub utilities: [f64; 2],
}

fn validate_card(setting: &Setting<'_>, j: Agent, card: &Card) -> Result<()> {
    for m in [card.side0, card.side1] {
        m.validate(setting.env, setting.f, setting.w)
            .map_err(|e| Error::InvalidInput(format!("card of agent {j}: {e}")))?;
    }
    Ok(())
}

fn finish(
    setting: &Setting<'_>,
    theta_true: Profile,
    messages: [Message; 2],
) -> Result<(MrRule, Outcome, [f64; 2])> {
    let outcome = outcome_g(setting.w, setting.f, &messages[0], &messages[1])?;
    let utilities = Agent::ALL.map(|j| setting.u.get(j, theta_true, outcome));
    Ok((dispatch(&messages[0], &messages[1]), outcome, utilities))
}

fn classical_run(
    setting: &Setting<'_>,
    theta_true: Profile,
    gamma: f64,
    seed: u64,
) -> Result<RunReport> {
    let truthful = Message::truthful(setting.f, setting.w, theta_true)?;
    let messages = [truthful, truthful];
    let (rule, outcome, utilities) = finish(setting, theta_true, messages)?;
    Ok(RunReport {
        branch: Branch::Classical,
        theta_true,
        gate_target: None,
        gamma,
        seed,
        rng: COLLAPSE_RNG.to_string(),
        ops: [LocalOp::I, LocalOp::I],
        cards: [Card::plain(truthful), Card::plain(truthful)],
        distribution: [1.0, 0.0, 0.0, 0.0],
        collapse: Basis::CC,
        messages,
        rule,
        outcome,
        utilities,
    })
}

/// Output of the two-agent algorithm: the draw and the messages it forwards.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgorithmOutput {
    pub distribution: [f64; 4],
    pub collapse: Basis,
    pub messages: [Message; 2],
}

/// Simulates entanglement, local operations, disentanglement and measurement
/// at maximal entanglement, then forwards the card side selected by each
/// collapsed coin.
pub fn two_agent_algorithm(inputs: &[AlgorithmInput; 2], seed: u64) -> Result<AlgorithmOutput> {
    let ops = [
        LocalOp::new(inputs[0].xi, inputs[0].phi)?,
        LocalOp::new(inputs[1].xi, inputs[1].phi)?,
    ];
    let cards = [inputs[0].card, inputs[1].card];
    measure_and_forward(Entangler::MAX, ops, &cards, seed)
}

fn measure_and_forward(
    e: Entangler,
    ops: [LocalOp; 2],
    cards: &[Card; 2],
    seed: u64,
) -> Result<AlgorithmOutput> {
    let state = final_state(e, ops[0], ops[1])?;
    let dist = collapse_distribution(&state)?;
    let collapse = sample_collapse(&dist, seed);
    let messages = Agent::ALL.map(|j| cards[j.index()].side(collapse.coin(j)));
    Ok(AlgorithmOutput {
        distribution: dist.probabilities,
        collapse,
        messages,
    })
}

/// One seeded run of the quantum mechanism at entanglement `gamma`.
pub fn run_quantum_mechanism(
    setting: &Setting<'_>,
    theta_true: Profile,
    strategies: &[QuantumStrategy; 2],
    gamma: f64,
    seed: u64,
) -> Result<RunReport> {
    let entangler = Entangler::new(gamma)?;
    setting.env.check_profile(theta_true)?;
    for j in Agent::ALL {
        let s = &strategies[j.index()];
        s.op.validate()?;
        validate_card(setting, j, &s.card)?;
    }
    let Some(target) = check_lambda_ordinal(setting.env, setting.f, theta_true)? else {
        return classical_run(setting, theta_true, gamma, seed);
    };
    let ops = strategies.map(|s| s.op);
    let cards = strategies.map(|s| s.card);
    let out = measure_and_forward(entangler, ops, &cards, seed)?;
    let (rule, outcome, utilities) = finish(setting, theta_true, out.messages)?;
    Ok(RunReport {
        branch: Branch::Quantum,
        theta_true,
        gate_target: Some(target),
        gamma,
        seed,
        rng: COLLAPSE_RNG.to_string(),
        ops,
        cards,
        distribution: out.distribution,
        collapse: out.collapse,
        messages: out.messages,
        rule,
        outcome,
        utilities,
    })
}

/// One seeded run of the algorithmic mechanism; entanglement is fixed at π/2.
pub fn run_algorithmic_mechanism(
    setting: &Setting<'_>,
    theta_true: Profile,
    inputs: &[AlgorithmInput; 2],
    seed: u64,
) -> Result<RunReport> {
    setting.env.check_profile(theta_true)?;
    for j in Agent::ALL {
        let input = &inputs[j.index()];
        LocalOp::new(input.xi, input.phi)?;
        validate_card(setting, j, &input.card)?;
    }
    let gamma = Entangler::MAX.gamma;
    let Some(target) = check_lambda_ordinal(setting.env, setting.f, theta_true)? else {
        return classical_run(setting, theta_true, gamma, seed);
    };
    let out = two_agent_algorithm(inputs, seed)?;
    let (rule, outcome, utilities) = finish(setting, theta_true, out.messages)?;
    Ok(RunReport {
        branch: Branch::Quantum,
        theta_true,
        gate_target: Some(target),
        gamma,
        seed,
        rng: COLLAPSE_RNG.to_string(),
        ops: inputs.map(|i| LocalOp {
            xi: i.xi,
            phi: i.phi,
        }),
        cards: inputs.map(|i| i.card),
        distribution: out.distribution,
        collapse: out.collapse,
        messages: out.messages,
        rule,
        outcome,
        utilities,
    })
}
