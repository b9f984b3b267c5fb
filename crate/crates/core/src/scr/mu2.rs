//! Condition μ2: witnesses, rule-by-rule verification and witness search.
//!
//! A witness consists of the set `B`, the sets `C_j(a, θ) ⊆ B` for every
//! `a ∈ f(θ)`, and a compromise selection `e(a, θ, b, φ) ∈ C_1(a, θ) ∩ C_2(b, φ)`
//! for every pair of f-points. Verification evaluates rules (i) to (iv) at every
//! test profile `θ*` and returns all violations rather than stopping early.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::env::{Agent, Environment, Outcome, OutcomeSet, Profile, Scr};
use crate::error::{Error, Result};

/// Key of a `C_j(a, θ)` entry.
pub type CKey = (Agent, Outcome, Profile);
/// Key of an `e(a, θ, b, φ)` entry.
pub type EKey = (Outcome, Profile, Outcome, Profile);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Mu2Witness {
    pub b_set: OutcomeSet,
    pub c_sets: BTreeMap<CKey, OutcomeSet>,
    pub e_map: BTreeMap<EKey, Outcome>,
}

impl Mu2Witness {
    pub fn c(&self, j: Agent, a: Outcome, t: Profile) -> Option<OutcomeSet> {
        self.c_sets.get(&(j, a, t)).copied()
    }

    pub fn e(&self, a: Outcome, t: Profile, b: Outcome, p: Profile) -> Option<Outcome> {
        self.e_map.get(&(a, t, b, p)).copied()
    }

    /// `B = A`, `C_j(a, θ) = L_j(a, θ)`, and `e` the first member of each
    /// intersection (`a` itself on the diagonal). Not necessarily a valid μ2
    /// witness; fails only if some intersection is empty.
    pub fn from_lower_contours(env: &Environment, f: &Scr) -> Result<Self> {
        let mut w = Mu2Witness {
            b_set: env.all_outcomes(),
            ..Default::default()
        };
        let pairs = f.pairs();
        for &(a, t) in &pairs {
            for j in Agent::ALL {
                w.c_sets.insert((j, a, t), env.lower_contour(j, a, t)?);
            }
        }
        for &(a, t) in &pairs {
            for &(b, p) in &pairs {
                let meet =
                    w.c_sets[&(Agent::One, a, t)].intersection(w.c_sets[&(Agent::Two, b, p)]);
                let e = if (a, t) == (b, p) {
                    a
                } else {
                    meet.first().ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "L1({}) ∩ L2({}) is empty",
                            pair_label(env, a, t),
                            pair_label(env, b, p)
                        ))
                    })?
                };
                w.e_map.insert((a, t, b, p), e);
            }
        }
        Ok(w)
    }
}

/// Which part of condition μ2 a check or violation belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
    #[serde(rename = "iv")]
    IV,
    #[serde(rename = "a-max")]
    AMax,
    #[serde(rename = "witness-shape")]
    WitnessShape,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::I => "i",
            Rule::II => "ii",
            Rule::III => "iii",
            Rule::IV => "iv",
            Rule::AMax => "a-max",
            Rule::WitnessShape => "witness-shape",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub theta_star: Option<Profile>,
    /// The offending tuple, rendered with environment labels.
    pub subject: String,
    /// Explanatory outcome sets, rendered with environment labels.
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub satisfied: bool,
    pub violations: Vec<Violation>,
}

impl ConditionReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        ConditionReport {
            satisfied: violations.is_empty(),
            violations,
        }
    }
}

/// One displayed computation `M(…) ∩ M(…) = left ∩ right = meet`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mu2Check {
    pub rule: Rule,
    /// `None` for the a-max checks, which use the defining profile.
    pub theta_star: Option<Profile>,
    /// Symbolic form, e.g. `M1(C1(a1,t1),t2) ∩ M2(B,t2)`.
    pub expr: String,
    /// The selected compromise outcome, for rule (iv).
    pub e: Option<Outcome>,
    pub left: OutcomeSet,
    pub right: OutcomeSet,
    pub meet: OutcomeSet,
    pub ok: bool,
}

impl Mu2Check {
    pub fn render(&self, env: &Environment) -> String {
        let e = self
            .e
            .map(|e| format!("e={}, ", env.outcome_label(e)))
            .unwrap_or_default();
        format!(
            "{}{} = {} ∩ {} = {}",
            e,
            self.expr,
            env.format_set(self.left),
            env.format_set(self.right),
            env.format_set(self.meet)
        )
    }
}

fn pair_label(env: &Environment, a: Outcome, t: Profile) -> String {
    format!("{},{}", env.outcome_label(a), env.profile_label(t))
}

fn c_label(env: &Environment, j: Agent, a: Outcome, t: Profile) -> String {
    format!("C{}({})", j.number(), pair_label(env, a, t))
}

fn shape_violation(subject: String, detail: String) -> Violation {
    Violation {
        rule: Rule::WitnessShape,
        theta_star: None,
        subject,
        detail,
    }
}

fn shape_violations(env: &Environment, f: &Scr, w: &Mu2Witness) -> Vec<Violation> {
    let mut out = Vec::new();
    if !w.b_set.is_subset(env.all_outcomes()) {
        out.push(shape_violation(
            "B".into(),
            "B contains outcomes outside A".into(),
        ));
    }
    let pairs = f.pairs();
    for &(a, t) in &pairs {
        for j in Agent::ALL {
            let name = c_label(env, j, a, t);
            match w.c(j, a, t) {
                None => out.push(shape_violation(name, "missing entry".into())),
                Some(c) => {
                    if !c.contains(a) {
                        out.push(shape_violation(
                            name.clone(),
                            format!("{} ∉ {}", env.outcome_label(a), env.format_set(c)),
                        ));
                    }
                    if !c.is_subset(w.b_set) {
                        out.push(shape_violation(
                            name,
                            format!("{} ⊄ B={}", env.format_set(c), env.format_set(w.b_set)),
                        ));
                    }
                }
            }
        }
    }
    for &(j, a, t) in w.c_sets.keys() {
        if t.0 >= env.num_profiles() || a.0 >= env.num_outcomes() || !f.get(t).contains(a) {
            out.push(shape_violation(
                format!("C{}(#{},#{})", j.number(), a.0, t.0),
                "entry outside the domain a ∈ f(θ)".into(),
            ));
        }
    }
    for &(a, t) in &pairs {
        for &(b, p) in &pairs {
            let name = format!("e({},{})", pair_label(env, a, t), pair_label(env, b, p));
            let Some(e) = w.e(a, t, b, p) else {
                out.push(shape_violation(name, "missing entry".into()));
                continue;
            };
            if let (Some(c1), Some(c2)) = (w.c(Agent::One, a, t), w.c(Agent::Two, b, p)) {
                let meet = c1.intersection(c2);
                if !meet.contains(e) {
                    out.push(shape_violation(
                        name,
                        format!(
                            "{} ∉ {} ∩ {} = {}",
                            if e.0 < env.num_outcomes() {
                                env.outcome_label(e).to_string()
                            } else {
                                format!("#{}", e.0)
                            },
                            c_label(env, Agent::One, a, t),
                            c_label(env, Agent::Two, b, p),
                            env.format_set(meet)
                        ),
                    ));
                }
            }
        }
    }
    for &(a, t, b, p) in w.e_map.keys() {
        let in_domain = |x: Outcome, q: Profile| {
            q.0 < env.num_profiles() && x.0 < env.num_outcomes() && f.get(q).contains(x)
        };
        if !in_domain(a, t) || !in_domain(b, p) {
            out.push(shape_violation(
                format!("e(#{},#{},#{},#{})", a.0, t.0, b.0, p.0),
                "entry outside the domain a ∈ f(θ), b ∈ f(φ)".into(),
            ));
        }
    }
    out
}

/// Evaluates every displayed computation of condition μ2 in the order a
/// hand-written verification would list them: the a-max checks, then for each
/// `θ*` rules (i), (ii) (agent 1 lists first), (iii) and (iv).
///
/// Fails if the witness lacks a required `C` entry or has sets outside `A`.
pub fn explain_mu2(env: &Environment, f: &Scr, w: &Mu2Witness) -> Result<Vec<Mu2Check>> {
    let pairs = f.pairs();
    let mut cs = BTreeMap::new();
    for &(a, t) in &pairs {
        for j in Agent::ALL {
            let c = w.c(j, a, t).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "witness has no entry for {}",
                    c_label(env, j, a, t)
                ))
            })?;
            if c.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "{} is empty",
                    c_label(env, j, a, t)
                )));
            }
            env.check_set(c)?;
            cs.insert((j, a, t), c);
        }
    }
    if w.b_set.is_empty() {
        return Err(Error::InvalidInput("B is empty".into()));
    }
    env.check_set(w.b_set)?;
    let c = |j: Agent, a: Outcome, t: Profile| cs[&(j, a, t)];
    let m = |j: Agent, set: OutcomeSet, t: Profile| env.maximal_set(j, set, t);

    let mut checks = Vec::new();
    for &(a, t) in &pairs {
        for j in Agent::ALL {
            let max = m(j, c(j, a, t), t)?;
            checks.push(Mu2Check {
                rule: Rule::AMax,
                theta_star: None,
                expr: format!(
                    "M{}({},{})",
                    j.number(),
                    c_label(env, j, a, t),
                    env.profile_label(t)
                ),
                e: None,
                left: max,
                right: OutcomeSet::singleton(a),
                meet: max.intersection(OutcomeSet::singleton(a)),
                ok: max.contains(a),
            });
        }
    }

    for ts in env.profiles() {
        let f_star = f.get(ts);
        let ts_label = env.profile_label(ts);
        let m_b = [m(Agent::One, w.b_set, ts)?, m(Agent::Two, w.b_set, ts)?];

        for &(a, t) in &pairs {
            let l = m(Agent::One, c(Agent::One, a, t), ts)?;
            let r = m(Agent::Two, c(Agent::Two, a, t), ts)?;
            let meet = l.intersection(r);
            checks.push(Mu2Check {
                rule: Rule::I,
                theta_star: Some(ts),
                expr: format!(
                    "M1({},{ts_label}) ∩ M2({},{ts_label})",
                    c_label(env, Agent::One, a, t),
                    c_label(env, Agent::Two, a, t)
                ),
                e: None,
                left: l,
                right: r,
                meet,
                ok: !meet.contains(a) || f_star.contains(a),
            });
        }
        for j in Agent::ALL {
            let k = j.other();
            for &(a, t) in &pairs {
                let l = m(j, c(j, a, t), ts)?;
                let r = m_b[k.index()];
                let meet = l.intersection(r);
                checks.push(Mu2Check {
                    rule: Rule::II,
                    theta_star: Some(ts),
                    expr: format!(
                        "M{}({},{ts_label}) ∩ M{}(B,{ts_label})",
                        j.number(),
                        c_label(env, j, a, t),
                        k.number()
                    ),
                    e: None,
                    left: l,
                    right: r,
                    meet,
                    ok: meet.is_subset(f_star),
                });
            }
        }
        let meet = m_b[0].intersection(m_b[1]);
        checks.push(Mu2Check {
            rule: Rule::III,
            theta_star: Some(ts),
            expr: format!("M1(B,{ts_label}) ∩ M2(B,{ts_label})"),
            e: None,
            left: m_b[0],
            right: m_b[1],
            meet,
            ok: meet.is_subset(f_star),
        });
        for &(a, t) in &pairs {
            for &(b, p) in &pairs {
                let l = m(Agent::One, c(Agent::One, a, t), ts)?;
                let r = m(Agent::Two, c(Agent::Two, b, p), ts)?;
                let meet = l.intersection(r);
                let e = w.e(a, t, b, p);
                let ok = match e {
                    Some(e) => !meet.contains(e) || f_star.contains(e),
                    None => false,
                };
                checks.push(Mu2Check {
                    rule: Rule::IV,
                    theta_star: Some(ts),
                    expr: format!(
                        "M1({},{ts_label}) ∩ M2({},{ts_label})",
                        c_label(env, Agent::One, a, t),
                        c_label(env, Agent::Two, b, p)
                    ),
                    e,
                    left: l,
                    right: r,
                    meet,
                    ok,
                });
            }
        }
    }
    Ok(checks)
}

/// Verifies a witness for condition μ2, reporting every violation found.
pub fn verify_mu2(env: &Environment, f: &Scr, w: &Mu2Witness) -> ConditionReport {
    let mut violations = shape_violations(env, f, w);
    let checks = match explain_mu2(env, f, w) {
        Ok(checks) => checks,
        Err(e) => {
            if violations.is_empty() {
                violations.push(shape_violation("witness".into(), e.to_string()));
            }
            return ConditionReport::from_violations(violations);
        }
    };
    for check in checks.iter().filter(|c| !c.ok) {
        let detail = match check.rule {
            Rule::AMax => format!("{} = {}", check.expr, env.format_set(check.left)),
            _ => {
                let f_star = check
                    .theta_star
                    .map(|t| env.format_set(f.get(t)))
                    .unwrap_or_default();
                format!("{} ⊄ f(θ*) = {}", check.render(env), f_star)
            }
        };
        violations.push(Violation {
            rule: check.rule,
            theta_star: check.theta_star,
            subject: check.expr.clone(),
            detail,
        });
    }
    ConditionReport::from_violations(violations)
}

/// Size guard for [`search_mu2`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_outcomes: usize,
    pub max_profiles: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_outcomes: 8,
            max_profiles: 4,
        }
    }
}

struct Candidate {
    set: OutcomeSet,
    // maxima at each test profile
    maxima: Vec<OutcomeSet>,
}

/// Searches for a μ2 witness over `B = b_fixed` (default `A`).
///
/// Each `C_j(a, θ)` ranges over subsets of `B` containing `a`, trying
/// `L_j(a, θ) ∩ B` first; rules (i), (ii) and (iv) are enforced as the
/// assignment grows. Returns `Ok(None)` when the space holds no witness.
pub fn search_mu2(
    env: &Environment,
    f: &Scr,
    b_fixed: Option<OutcomeSet>,
    limits: SearchLimits,
) -> Result<Option<Mu2Witness>> {
    if env.num_outcomes() > limits.max_outcomes || env.num_profiles() > limits.max_profiles {
        return Err(Error::SearchTooLarge(format!(
            "|A|={}, |Θ|={} exceeds the limit |A|≤{}, |Θ|≤{}",
            env.num_outcomes(),
            env.num_profiles(),
            limits.max_outcomes,
            limits.max_profiles
        )));
    }
    let b_set = b_fixed.unwrap_or_else(|| env.all_outcomes());
    env.check_set(b_set)?;
    if b_set.is_empty() {
        return Ok(None);
    }
    let profiles: Vec<Profile> = env.profiles().collect();
    let m_b: Vec<[OutcomeSet; 2]> = profiles
        .iter()
        .map(|&ts| {
            Ok([
                env.maximal_set(Agent::One, b_set, ts)?,
                env.maximal_set(Agent::Two, b_set, ts)?,
            ])
        })
        .collect::<Result<_>>()?;

    // rule (iii) depends on B alone
    if profiles
        .iter()
        .any(|&ts| !m_b[ts.0][0].intersection(m_b[ts.0][1]).is_subset(f.get(ts)))
    {
        return Ok(None);
    }

    let pairs = f.pairs();
    // candidates[j][pair index]
    let mut candidates: [Vec<Vec<Candidate>>; 2] = [Vec::new(), Vec::new()];
    for j in Agent::ALL {
        let k = j.other();
        for &(a, t) in &pairs {
            if !b_set.contains(a) {
                return Ok(None);
            }
            let lower = env.lower_contour(j, a, t)?.intersection(b_set);
            let ordered = std::iter::once(lower).chain(b_set.subsets().filter(|s| *s != lower));
            let mut list = Vec::new();
            for set in ordered {
                if !set.contains(a) || !env.maximal_set(j, set, t)?.contains(a) {
                    continue;
                }
                let maxima: Vec<OutcomeSet> = profiles
                    .iter()
                    .map(|&ts| env.maximal_set(j, set, ts))
                    .collect::<Result<_>>()?;
                // rule (ii) involves this set and B only
                let rule_ii = profiles.iter().all(|&ts| {
                    maxima[ts.0]
                        .intersection(m_b[ts.0][k.index()])
                        .is_subset(f.get(ts))
                });
                if rule_ii {
                    list.push(Candidate { set, maxima });
                }
            }
            if list.is_empty() {
                return Ok(None);
            }
            candidates[j.index()].push(list);
        }
    }

    let search = Search {
        f,
        profiles: &profiles,
        pairs: &pairs,
        candidates: &candidates,
    };
    let mut choice = vec![[usize::MAX; 2]; pairs.len()];
    if !search.assign(0, &mut choice) {
        return Ok(None);
    }

    let mut w = Mu2Witness {
        b_set,
        ..Default::default()
    };
    for (pi, &(a, t)) in pairs.iter().enumerate() {
        for j in Agent::ALL {
            w.c_sets.insert(
                (j, a, t),
                candidates[j.index()][pi][choice[pi][j.index()]].set,
            );
        }
    }
    for (pi, &(a, t)) in pairs.iter().enumerate() {
        for (qi, &(b, p)) in pairs.iter().enumerate() {
            let c1 = &candidates[0][pi][choice[pi][0]];
            let c2 = &candidates[1][qi][choice[qi][1]];
            let good = search.good_compromises(c1, c2);
            let e = if good.contains(a) && pi == qi {
                a
            } else {
                good.first().expect("checked during search")
            };
            w.e_map.insert((a, t, b, p), e);
        }
    }
    Ok(Some(w))
}

struct Search<'a> {
    f: &'a Scr,
    profiles: &'a [Profile],
    pairs: &'a [(Outcome, Profile)],
    candidates: &'a [Vec<Vec<Candidate>>; 2],
}

impl Search<'_> {
    /// Members of `C_1 ∩ C_2` that pass rule (iv) at every test profile.
    fn good_compromises(&self, c1: &Candidate, c2: &Candidate) -> OutcomeSet {
        let mut bad = OutcomeSet::EMPTY;
        for &ts in self.profiles {
            let meet = c1.maxima[ts.0].intersection(c2.maxima[ts.0]);
            bad = bad.union(OutcomeSet::from_bits(meet.bits() & !self.f.get(ts).bits()));
        }
        OutcomeSet::from_bits(c1.set.intersection(c2.set).bits() & !bad.bits())
    }

    fn rule_i(&self, a: Outcome, c1: &Candidate, c2: &Candidate) -> bool {
        self.profiles.iter().all(|&ts| {
            !c1.maxima[ts.0].intersection(c2.maxima[ts.0]).contains(a) || self.f.get(ts).contains(a)
        })
    }

    // variables are interleaved: slot 2*p is C_1 of pair p, slot 2*p+1 is C_2
    fn assign(&self, slot: usize, choice: &mut [[usize; 2]]) -> bool {
        if slot == 2 * self.pairs.len() {
            return true;
        }
        let pi = slot / 2;
        let j = slot % 2;
        for ci in 0..self.candidates[j][pi].len() {
            let cand = &self.candidates[j][pi][ci];
            let consistent = if j == 0 {
                (0..pi).all(|qi| {
                    self.good_compromises(cand, &self.candidates[1][qi][choice[qi][1]])
                        != OutcomeSet::EMPTY
                })
            } else {
                let own = &self.candidates[0][pi][choice[pi][0]];
                self.rule_i(self.pairs[pi].0, own, cand)
                    && (0..=pi).all(|qi| {
                        self.good_compromises(&self.candidates[0][qi][choice[qi][0]], cand)
                            != OutcomeSet::EMPTY
                    })
            };
            if consistent {
                choice[pi][j] = ci;
                if self.assign(slot + 1, choice) {
                    return true;
                }
            }
        }
        choice[pi][j] = usize::MAX;
        false
    }
}
