use crate::error::{Error, Result};
use crate::scr::{Agent, Environment, Outcome, Profile};

/// Cardinal utilities `u_j(θ, a)`, ordinally consistent with the rankings.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityTable {
    // values[agent][profile][outcome]
    values: [Vec<Vec<f64>>; 2],
}

impl UtilityTable {
    pub fn new(env: &Environment, values: [Vec<Vec<f64>>; 2]) -> Result<Self> {
        for j in Agent::ALL {
            let per_profile = &values[j.index()];
            if per_profile.len() != env.num_profiles() {
                return Err(Error::InvalidUtility(format!(
                    "agent {j}: wrong number of profiles"
                )));
            }
            for t in env.profiles() {
                let row = &per_profile[t.0];
                if row.len() != env.num_outcomes() {
                    return Err(Error::InvalidUtility(format!(
                        "agent {j} at {}: wrong number of outcomes",
                        env.profile_label(t)
                    )));
                }
                if let Some(a) = row.iter().position(|u| !u.is_finite()) {
                    return Err(Error::InvalidUtility(format!(
                        "agent {j} at {}: u({}) is not finite",
                        env.profile_label(t),
                        env.outcome_label(Outcome(a))
                    )));
                }
                for x in env.outcomes() {
                    for y in env.outcomes() {
                        if (row[x.0] >= row[y.0]) != env.weakly_prefers(j, t, x, y) {
                            return Err(Error::InvalidUtility(format!(
                                "agent {j} at {}: utilities of {} and {} disagree with the ranking",
                                env.profile_label(t),
                                env.outcome_label(x),
                                env.outcome_label(y)
                            )));
                        }
                    }
                }
            }
        }
        Ok(UtilityTable { values })
    }

    /// `|A| − rank`, where an indifference class spanning positions `p..=q`
    /// (1-based, best first) has rank `(p + q) / 2`.
    pub fn rank_default(env: &Environment) -> Self {
        let n = env.num_outcomes() as f64;
        let values = Agent::ALL.map(|j| {
            env.profiles()
                .map(|t| {
                    let mut row = vec![0.0; env.num_outcomes()];
                    let mut position = 0usize;
                    for class in env.ranking(j, t).classes() {
                        let first = position + 1;
                        let last = position + class.len();
                        let rank = (first + last) as f64 / 2.0;
                        for a in class.iter() {
                            row[a.0] = n - rank;
                        }
                        position = last;
                    }
                    row
                })
                .collect()
        });
        UtilityTable { values }
    }

    pub fn get(&self, j: Agent, t: Profile, a: Outcome) -> f64 {
        self.values[j.index()][t.0][a.0]
    }

    pub fn values(&self) -> &[Vec<Vec<f64>>; 2] {
        &self.values
    }

    /// `scale · u_j + shift` for one agent; `scale` must be positive.
    pub fn rescaled(&self, j: Agent, scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite() && shift.is_finite()) {
            return Err(Error::InvalidUtility(
                "affine rescaling needs a positive finite scale".into(),
            ));
        }
        let mut values = self.values.clone();
        for row in values[j.index()].iter_mut() {
            for u in row.iter_mut() {
                *u = scale * *u + shift;
            }
        }
        Ok(UtilityTable { values })
    }
}
