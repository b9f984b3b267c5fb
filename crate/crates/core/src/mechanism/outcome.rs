use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scr::{Agent, Environment, Mu2Witness, Outcome, Profile, Scr};

/// One agent's announcement `(θ_j, a_j, b_j, n_j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Message {
    pub theta: Profile,
    pub a: Outcome,
    pub b: Outcome,
    pub n: u32,
}

impl Message {
    pub fn new(theta: Profile, a: Outcome, b: Outcome, n: u32) -> Self {
        Message { theta, a, b, n }
    }

    /// `(θ, a, *, n)` with the unread `*` filled in as the first outcome of `B`.
    pub fn with_placeholder(w: &Mu2Witness, theta: Profile, a: Outcome, n: u32) -> Result<Self> {
        let b = w
            .b_set
            .first()
            .ok_or_else(|| Error::InvalidInput("witness has an empty B".into()))?;
        Ok(Message { theta, a, b, n })
    }

    /// The truthful announcement at `θ`: the first `a ∈ f(θ)`, first `b ∈ B`, `n = 0`.
    pub fn truthful(f: &Scr, w: &Mu2Witness, theta: Profile) -> Result<Self> {
        let a = f.get(theta).first().expect("f(θ) is nonempty");
        Message::with_placeholder(w, theta, a, 0)
    }

    pub fn validate(&self, env: &Environment, f: &Scr, w: &Mu2Witness) -> Result<()> {
        env.check_profile(self.theta)
            .map_err(|e| Error::InvalidMessage(e.to_string()))?;
        env.check_outcome(self.a)
            .map_err(|e| Error::InvalidMessage(e.to_string()))?;
        env.check_outcome(self.b)
            .map_err(|e| Error::InvalidMessage(e.to_string()))?;
        if !f.get(self.theta).contains(self.a) {
            return Err(Error::InvalidMessage(format!(
                "{} ∉ f({})",
                env.outcome_label(self.a),
                env.profile_label(self.theta)
            )));
        }
        if !w.b_set.contains(self.b) {
            return Err(Error::InvalidMessage(format!(
                "{} ∉ B",
                env.outcome_label(self.b)
            )));
        }
        Ok(())
    }

    pub fn render(&self, env: &Environment) -> String {
        format!(
            "({},{},{},{})",
            env.profile_label(self.theta),
            env.outcome_label(self.a),
            env.outcome_label(self.b),
            self.n
        )
    }
}

/// Which of the six outcome rules fires for a message pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MrRule {
    /// Both announce the same `(a, θ)`.
    Agreement,
    /// Disagreement with `n1 = n2 = 0`.
    Compromise,
    /// `n1 > n2 = 0`.
    Agent1Challenge,
    /// `n2 > n1 = 0`.
    Agent2Challenge,
    /// `n1 ≥ n2 > 0`.
    Agent1Integer,
    /// `n2 > n1 > 0`.
    Agent2Integer,
}

impl MrRule {
    pub fn number(self) -> u8 {
        match self {
            MrRule::Agreement => 1,
            MrRule::Compromise => 2,
            MrRule::Agent1Challenge => 3,
            MrRule::Agent2Challenge => 4,
            MrRule::Agent1Integer => 5,
            MrRule::Agent2Integer => 6,
        }
    }
}

impl fmt::Display for MrRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule ({})", self.number())
    }
}

pub fn dispatch(s1: &Message, s2: &Message) -> MrRule {
    if (s1.a, s1.theta) == (s2.a, s2.theta) {
        return MrRule::Agreement;
    }
    match (s1.n, s2.n) {
        (0, 0) => MrRule::Compromise,
        (_, 0) => MrRule::Agent1Challenge,
        (0, _) => MrRule::Agent2Challenge,
        (n1, n2) if n1 >= n2 => MrRule::Agent1Integer,
        _ => MrRule::Agent2Integer,
    }
}

fn missing(what: &str) -> Error {
    Error::InvalidInput(format!("witness has no entry for {what}"))
}

/// Outcome function of the two-agent mechanism over announced messages.
pub fn outcome_g(w: &Mu2Witness, f: &Scr, s1: &Message, s2: &Message) -> Result<Outcome> {
    for (j, s) in [(Agent::One, s1), (Agent::Two, s2)] {
        if s.theta.0 >= f.sets().len() || !f.get(s.theta).contains(s.a) {
            return Err(Error::InvalidMessage(format!(
                "agent {j}: announced outcome not in f(θ)"
            )));
        }
        if !w.b_set.contains(s.b) {
            return Err(Error::InvalidMessage(format!("agent {j}: b ∉ B")));
        }
    }
    let compromise = || {
        w.e(s2.a, s2.theta, s1.a, s1.theta)
            .ok_or_else(|| missing("e"))
    };
    Ok(match dispatch(s1, s2) {
        MrRule::Agreement => s1.a,
        MrRule::Compromise => compromise()?,
        MrRule::Agent1Challenge => {
            let c = w
                .c(Agent::One, s2.a, s2.theta)
                .ok_or_else(|| missing("C1"))?;
            if c.contains(s1.b) {
                s1.b
            } else {
                compromise()?
            }
        }
        MrRule::Agent2Challenge => {
            let c = w
                .c(Agent::Two, s1.a, s1.theta)
                .ok_or_else(|| missing("C2"))?;
            if c.contains(s2.b) {
                s2.b
            } else {
                compromise()?
            }
        }
        MrRule::Agent1Integer => s1.b,
        MrRule::Agent2Integer => s2.b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{table1, table1_witness};

    fn msg(env: &Environment, t: &str, a: &str, b: &str, n: u32) -> Message {
        Message::new(
            env.profile(t).unwrap(),
            env.outcome(a).unwrap(),
            env.outcome(b).unwrap(),
            n,
        )
    }

    #[test]
    fn agreement_returns_announced_outcome() {
        let (env, f) = table1();
        let w = table1_witness(&env);
        let s = msg(&env, "t1", "a1", "a1", 0);
        assert_eq!(
            outcome_g(&w, &f, &s, &s).unwrap(),
            env.outcome("a1").unwrap()
        );
    }

    #[test]
    fn compromise_uses_e_with_agent2_first() {
        let (env, f) = table1();
        let w = table1_witness(&env);
        let lie = msg(&env, "t1", "a1", "a1", 0);
        let truth = msg(&env, "t2", "a2", "a1", 0);
        // g = e(a2_ann, θ2_ann, a1_ann, θ1_ann)
        assert_eq!(
            outcome_g(&w, &f, &truth, &lie).unwrap(),
            env.outcome("a4").unwrap()
        );
        assert_eq!(
            outcome_g(&w, &f, &lie, &truth).unwrap(),
            env.outcome("a3").unwrap()
        );
    }

    #[test]
    fn integer_game_rules() {
        let (env, f) = table1();
        let w = table1_witness(&env);
        let o = |l| env.outcome(l).unwrap();
        let s1 = msg(&env, "t1", "a1", "a3", 2);
        let s2 = msg(&env, "t2", "a2", "a4", 1);
        assert_eq!(dispatch(&s1, &s2), MrRule::Agent1Integer);
        assert_eq!(outcome_g(&w, &f, &s1, &s2).unwrap(), o("a3"));
        let s2 = msg(&env, "t2", "a2", "a4", 3);
        assert_eq!(outcome_g(&w, &f, &s1, &s2).unwrap(), o("a4"));
        // rule 3: b1 = a3 ∈ C1(a2,t2) = {a2,a3}
        let s2 = msg(&env, "t2", "a2", "a4", 0);
        assert_eq!(outcome_g(&w, &f, &s1, &s2).unwrap(), o("a3"));
        // rule 3 fallback: b1 = a1 ∉ C1(a2,t2) gives e(a2,t2,a1,t1) = a3
        let s1 = msg(&env, "t1", "a1", "a1", 1);
        assert_eq!(outcome_g(&w, &f, &s1, &s2).unwrap(), o("a3"));
        // rule 4: b2 = a3 ∈ C2(a1,t1) = {a1,a3,a4}
        let s1 = msg(&env, "t1", "a1", "a1", 0);
        let s2 = msg(&env, "t2", "a2", "a3", 1);
        assert_eq!(dispatch(&s1, &s2), MrRule::Agent2Challenge);
        assert_eq!(outcome_g(&w, &f, &s1, &s2).unwrap(), o("a3"));
        // rule 4 fallback: b2 = a2 ∉ C2(a1,t1)
        let s2 = msg(&env, "t2", "a2", "a2", 1);
        assert_eq!(outcome_g(&w, &f, &s1, &s2).unwrap(), o("a3"));
    }

    #[test]
    fn invalid_messages_are_rejected() {
        let (env, f) = table1();
        let mut w = table1_witness(&env);
        let bad = msg(&env, "t1", "a2", "a1", 0);
        let ok = msg(&env, "t1", "a1", "a1", 0);
        assert!(matches!(
            outcome_g(&w, &f, &bad, &ok),
            Err(Error::InvalidMessage(_))
        ));
        assert!(bad.validate(&env, &f, &w).is_err());
        w.b_set = OutcomeSetExt::without(w.b_set, env.outcome("a4").unwrap());
        let b_out = msg(&env, "t1", "a1", "a4", 0);
        assert!(matches!(
            outcome_g(&w, &f, &ok, &b_out),
            Err(Error::InvalidMessage(_))
        ));
    }

    trait OutcomeSetExt {
        fn without(self, a: Outcome) -> Self;
    }

    impl OutcomeSetExt for crate::scr::OutcomeSet {
        fn without(self, a: Outcome) -> Self {
            crate::scr::OutcomeSet::from_bits(self.bits() & !(1 << a.0))
        }
    }
}
