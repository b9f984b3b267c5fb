use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest outcome set an [`OutcomeSet`] bitmask can hold.
pub const MAX_OUTCOMES: usize = 64;

/// One of the two agents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Agent {
    One,
    Two,
}

impl Agent {
    pub const ALL: [Agent; 2] = [Agent::One, Agent::Two];

    pub fn index(self) -> usize {
        match self {
            Agent::One => 0,
            Agent::Two => 1,
        }
    }

    /// 1-based number used in reports and scenario files.
    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Agent> {
        match n {
            1 => Some(Agent::One),
            2 => Some(Agent::Two),
            _ => None,
        }
    }

    pub fn other(self) -> Agent {
        match self {
            Agent::One => Agent::Two,
            Agent::Two => Agent::One,
        }
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Index of an outcome in the environment's declared order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Outcome(pub usize);

/// Index of a preference profile in the environment's declared order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Profile(pub usize);

/// A subset of the outcome set, stored as a bitmask over outcome indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OutcomeSet(u64);

impl OutcomeSet {
    pub const EMPTY: OutcomeSet = OutcomeSet(0);

    pub fn from_bits(bits: u64) -> Self {
        OutcomeSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(a: Outcome) -> Self {
        OutcomeSet(1 << a.0)
    }

    /// All of the first `n` outcomes.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            OutcomeSet(u64::MAX)
        } else {
            OutcomeSet((1u64 << n) - 1)
        }
    }

    pub fn insert(&mut self, a: Outcome) {
        self.0 |= 1 << a.0;
    }

    pub fn contains(self, a: Outcome) -> bool {
        self.0 & (1 << a.0) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn intersection(self, other: OutcomeSet) -> OutcomeSet {
        OutcomeSet(self.0 & other.0)
    }

    pub fn union(self, other: OutcomeSet) -> OutcomeSet {
        OutcomeSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: OutcomeSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest member in declared order.
    pub fn first(self) -> Option<Outcome> {
        (self.0 != 0).then(|| Outcome(self.0.trailing_zeros() as usize))
    }

    pub fn iter(self) -> impl Iterator<Item = Outcome> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(Outcome(i))
        })
    }

    /// Every subset of `self`, in increasing bitmask order (empty set first).
    pub fn subsets(self) -> impl Iterator<Item = OutcomeSet> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(OutcomeSet(cur))
        })
    }
}

impl FromIterator<Outcome> for OutcomeSet {
    fn from_iter<I: IntoIterator<Item = Outcome>>(iter: I) -> Self {
        let mut s = OutcomeSet::EMPTY;
        for a in iter {
            s.insert(a);
        }
        s
    }
}

impl fmt::Debug for OutcomeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|a| a.0)).finish()
    }
}

/// A weak order over outcomes: indifference classes from best to worst.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranking {
    classes: Vec<OutcomeSet>,
    level: Vec<usize>,
}

impl Ranking {
    fn new(classes: Vec<OutcomeSet>, n_outcomes: usize) -> std::result::Result<Self, String> {
        let mut level = vec![usize::MAX; n_outcomes];
        for (depth, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err("empty indifference class".into());
            }
            for a in class.iter() {
                if a.0 >= n_outcomes {
                    return Err(format!("outcome index {} out of range", a.0));
                }
                if level[a.0] != usize::MAX {
                    return Err(format!("outcome index {} listed twice", a.0));
                }
                level[a.0] = depth;
            }
        }
        if let Some(missing) = level.iter().position(|&l| l == usize::MAX) {
            return Err(format!("outcome index {missing} missing"));
        }
        Ok(Ranking { classes, level })
    }

    pub fn classes(&self) -> &[OutcomeSet] {
        &self.classes
    }

    /// Depth of the indifference class holding `a` (0 = best).
    pub fn level(&self, a: Outcome) -> usize {
        self.level[a.0]
    }
}

/// A finite two-agent environment: outcomes, profiles and each agent's weak
/// order at each profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Environment {
    outcomes: Vec<String>,
    profiles: Vec<String>,
    // rankings[agent][profile]
    rankings: [Vec<Ranking>; 2],
}

impl Environment {
    /// Builds an environment from labelled rankings. `rankings[j][t]` lists
    /// the indifference classes of agent `j+1` at profile `t`, best first.
    pub fn new<S: AsRef<str>>(
        outcomes: Vec<String>,
        profiles: Vec<String>,
        rankings: [Vec<Vec<Vec<S>>>; 2],
    ) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidEnvironment("outcome list is empty".into()));
        }
        if profiles.is_empty() {
            return Err(Error::InvalidEnvironment("profile list is empty".into()));
        }
        if outcomes.len() > MAX_OUTCOMES {
            return Err(Error::InvalidEnvironment(format!(
                "at most {MAX_OUTCOMES} outcomes are supported, got {}",
                outcomes.len()
            )));
        }
        check_unique(&outcomes, "outcome")?;
        check_unique(&profiles, "profile")?;

        let lookup = |label: &str| -> Result<Outcome> {
            outcomes
                .iter()
                .position(|o| o == label)
                .map(Outcome)
                .ok_or_else(|| Error::UnknownOutcome(label.to_string()))
        };

        let mut built: [Vec<Ranking>; 2] = [Vec::new(), Vec::new()];
        for (j, per_profile) in rankings.into_iter().enumerate() {
            if per_profile.len() != profiles.len() {
                return Err(Error::InvalidEnvironment(format!(
                    "agent {} has {} rankings for {} profiles",
                    j + 1,
                    per_profile.len(),
                    profiles.len()
                )));
            }
            for (t, classes) in per_profile.into_iter().enumerate() {
                let mut sets = Vec::with_capacity(classes.len());
                let mut seen = OutcomeSet::EMPTY;
                for class in classes {
                    let mut set = OutcomeSet::EMPTY;
                    for label in class {
                        let a = lookup(label.as_ref())?;
                        if seen.contains(a) {
                            return Err(Error::InvalidEnvironment(format!(
                                "ranking for agent {} at {} lists {} twice",
                                j + 1,
                                profiles[t],
                                outcomes[a.0]
                            )));
                        }
                        seen.insert(a);
                        set.insert(a);
                    }
                    sets.push(set);
                }
                if let Some(missing) = OutcomeSet::full(outcomes.len())
                    .iter()
                    .find(|a| !seen.contains(*a))
                {
                    return Err(Error::InvalidEnvironment(format!(
                        "ranking for agent {} at {} omits {}",
                        j + 1,
                        profiles[t],
                        outcomes[missing.0]
                    )));
                }
                let ranking = Ranking::new(sets, outcomes.len()).map_err(|e| {
                    Error::InvalidEnvironment(format!(
                        "ranking for agent {} at {}: {e}",
                        j + 1,
                        profiles[t]
                    ))
                })?;
                built[j].push(ranking);
            }
        }
        Ok(Environment {
            outcomes,
            profiles,
            rankings: built,
        })
    }

    /// Convenience constructor for environments with strict rankings only.
    pub fn strict(outcomes: &[&str], profiles: &[&str], orders: [&[&[&str]]; 2]) -> Result<Self> {
        let rankings = orders.map(|per_profile| {
            per_profile
                .iter()
                .map(|order| order.iter().map(|a| vec![a.to_string()]).collect())
                .collect::<Vec<Vec<Vec<String>>>>()
        });
        Environment::new(
            outcomes.iter().map(|s| s.to_string()).collect(),
            profiles.iter().map(|s| s.to_string()).collect(),
            rankings,
        )
    }

    pub fn num_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn num_profiles(&self) -> usize {
        self.profiles.len()
    }

    pub fn outcomes(&self) -> impl Iterator<Item = Outcome> {
        (0..self.outcomes.len()).map(Outcome)
    }

    pub fn profiles(&self) -> impl Iterator<Item = Profile> {
        (0..self.profiles.len()).map(Profile)
    }

    pub fn all_outcomes(&self) -> OutcomeSet {
        OutcomeSet::full(self.outcomes.len())
    }

    pub fn outcome(&self, label: &str) -> Result<Outcome> {
        self.outcomes
            .iter()
            .position(|o| o == label)
            .map(Outcome)
            .ok_or_else(|| Error::UnknownOutcome(label.to_string()))
    }

    pub fn profile(&self, label: &str) -> Result<Profile> {
        self.profiles
            .iter()
            .position(|p| p == label)
            .map(Profile)
            .ok_or_else(|| Error::UnknownProfile(label.to_string()))
    }

    pub fn outcome_label(&self, a: Outcome) -> &str {
        &self.outcomes[a.0]
    }

    pub fn profile_label(&self, t: Profile) -> &str {
        &self.profiles[t.0]
    }

    pub fn outcome_labels(&self) -> &[String] {
        &self.outcomes
    }

    pub fn profile_labels(&self) -> &[String] {
        &self.profiles
    }

    pub fn ranking(&self, j: Agent, t: Profile) -> &Ranking {
        &self.rankings[j.index()][t.0]
    }

    pub(crate) fn check_outcome(&self, a: Outcome) -> Result<()> {
        if a.0 < self.outcomes.len() {
            Ok(())
        } else {
            Err(Error::UnknownOutcome(format!("#{}", a.0)))
        }
    }

    pub(crate) fn check_profile(&self, t: Profile) -> Result<()> {
        if t.0 < self.profiles.len() {
            Ok(())
        } else {
            Err(Error::UnknownProfile(format!("#{}", t.0)))
        }
    }

    pub(crate) fn check_set(&self, c: OutcomeSet) -> Result<()> {
        if c.is_subset(self.all_outcomes()) {
            Ok(())
        } else {
            Err(Error::InvalidInput(
                "outcome set has members outside A".into(),
            ))
        }
    }

    /// `x R_j(t) y`.
    pub fn weakly_prefers(&self, j: Agent, t: Profile, x: Outcome, y: Outcome) -> bool {
        let r = self.ranking(j, t);
        r.level(x) <= r.level(y)
    }

    /// `x P_j(t) y`.
    pub fn strictly_prefers(&self, j: Agent, t: Profile, x: Outcome, y: Outcome) -> bool {
        let r = self.ranking(j, t);
        r.level(x) < r.level(y)
    }

    /// Lower contour set `L_j(a, t)`: outcomes agent `j` ranks weakly below `a`.
    pub fn lower_contour(&self, j: Agent, a: Outcome, t: Profile) -> Result<OutcomeSet> {
        self.check_outcome(a)?;
        self.check_profile(t)?;
        let r = self.ranking(j, t);
        let depth = r.level(a);
        Ok(r.classes()[depth..]
            .iter()
            .fold(OutcomeSet::EMPTY, |acc, c| acc.union(*c)))
    }

    /// Maximal set `M_j(C, t)`: the best members of `c` for agent `j`.
    pub fn maximal_set(&self, j: Agent, c: OutcomeSet, t: Profile) -> Result<OutcomeSet> {
        if c.is_empty() {
            return Err(Error::InvalidInput("maximal set of an empty set".into()));
        }
        self.check_set(c)?;
        self.check_profile(t)?;
        // the first indifference class that meets `c` holds exactly its maxima
        let r = self.ranking(j, t);
        Ok(r.classes()
            .iter()
            .map(|class| class.intersection(c))
            .find(|m| !m.is_empty())
            .expect("rankings partition A"))
    }

    /// Renders a set as `{a1,a2}` in declared order.
    pub fn format_set(&self, c: OutcomeSet) -> String {
        let labels: Vec<String> = c
            .iter()
            .map(|a| {
                self.outcomes
                    .get(a.0)
                    .cloned()
                    .unwrap_or_else(|| format!("#{}", a.0))
            })
            .collect();
        format!("{{{}}}", labels.join(","))
    }
}

fn check_unique(labels: &[String], what: &str) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if l.is_empty() {
            return Err(Error::InvalidEnvironment(format!("empty {what} label")));
        }
        if labels[..i].contains(l) {
            return Err(Error::InvalidEnvironment(format!(
                "duplicate {what} label `{l}`"
            )));
        }
    }
    Ok(())
}

/// A social choice rule: a nonempty outcome set for every profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scr {
    sets: Vec<OutcomeSet>,
}

impl Scr {
    pub fn new(env: &Environment, sets: Vec<OutcomeSet>) -> Result<Self> {
        if sets.len() != env.num_profiles() {
            return Err(Error::InvalidScr(format!(
                "{} sets for {} profiles",
                sets.len(),
                env.num_profiles()
            )));
        }
        for (t, s) in sets.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidScr(format!(
                    "f({}) empty",
                    env.profile_label(Profile(t))
                )));
            }
            if !s.is_subset(env.all_outcomes()) {
                return Err(Error::InvalidScr(format!(
                    "f({}) contains an unknown outcome",
                    env.profile_label(Profile(t))
                )));
            }
        }
        Ok(Scr { sets })
    }

    /// Builds from labels: `assignment[t]` lists the members of `f(t)`.
    pub fn from_labels(env: &Environment, assignment: &[&[&str]]) -> Result<Self> {
        let sets = assignment
            .iter()
            .map(|labels| {
                labels
                    .iter()
                    .map(|l| env.outcome(l))
                    .collect::<Result<OutcomeSet>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Scr::new(env, sets)
    }

    pub fn get(&self, t: Profile) -> OutcomeSet {
        self.sets[t.0]
    }

    pub fn sets(&self) -> &[OutcomeSet] {
        &self.sets
    }

    /// All `(a, t)` with `a ∈ f(t)`, profile-major.
    pub fn pairs(&self) -> Vec<(Outcome, Profile)> {
        self.sets
            .iter()
            .enumerate()
            .flat_map(|(t, s)| s.iter().map(move |a| (a, Profile(t))))
            .collect()
    }
}
