//! Scenario files: a line-based human-editable form (`.scn`) and a canonical
//! JSON form carrying the same data. See `docs/scenario-format.md` for the
//! grammar.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::mechanism::UtilityTable;
use crate::quantum::Entangler;
use crate::scr::{Agent, Environment, Mu2Witness, OutcomeSet, Scr};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankingEntry {
    pub agent: u8,
    pub profile: String,
    /// Indifference classes, best first.
    pub classes: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScrEntry {
    pub profile: String,
    pub outcomes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourEntry {
    pub agent: u8,
    pub outcome: String,
    pub profile: String,
    pub set: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompromiseEntry {
    pub a: String,
    pub theta: String,
    pub b: String,
    pub phi: String,
    pub outcome: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessEntry {
    pub b: Vec<String>,
    pub c: Vec<ContourEntry>,
    pub e: Vec<CompromiseEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityValue {
    pub outcome: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityRow {
    pub agent: u8,
    pub profile: String,
    pub values: Vec<UtilityValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum UtilitySource {
    RankDefault,
    Table { rows: Vec<UtilityRow> },
}

/// The raw contents of a scenario, with labels unresolved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub outcomes: Vec<String>,
    pub profiles: Vec<String>,
    pub rankings: Vec<RankingEntry>,
    pub scr: Vec<ScrEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utilities: Option<UtilitySource>,
    pub gamma: f64,
    pub reference_agent: u8,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioError {
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    Semantic(Error),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Syntax {
                line,
                column,
                message,
            } => {
                write!(f, "syntax error at line {line}, column {column}: {message}")
            }
            ScenarioError::Semantic(e) => write!(f, "semantic error: {e}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl From<Error> for ScenarioError {
    fn from(e: Error) -> Self {
        ScenarioError::Semantic(e)
    }
}

/// A validated scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub env: Environment,
    pub f: Scr,
    pub witness: Option<Mu2Witness>,
    pub utilities: Option<UtilityTable>,
    pub gamma: f64,
    pub reference: Agent,
    pub seed: u64,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn col_of(line: &str, part: &str) -> usize {
    let offset = part.as_ptr() as usize - line.as_ptr() as usize;
    line[..offset].chars().count() + 1
}

struct LineCtx<'a> {
    no: usize,
    text: &'a str,
}

impl<'a> LineCtx<'a> {
    fn err(&self, part: &str, message: impl Into<String>) -> ScenarioError {
        syntax(self.no, col_of(self.text, part), message)
    }

    fn label(&self, raw: &'a str) -> Result<String, ScenarioError> {
        let s = raw.trim();
        if s.is_empty() {
            return Err(self.err(raw, "expected a label"));
        }
        if let Some((i, c)) = s.char_indices().find(|&(_, c)| !is_label_char(c)) {
            return Err(self.err(&s[i..], format!("unexpected character `{c}` in label")));
        }
        Ok(s.to_string())
    }

    fn list(&self, body: &'a str, sep: char) -> Result<Vec<(&'a str, String)>, ScenarioError> {
        if body.trim().is_empty() {
            return Ok(Vec::new());
        }
        body.split(sep)
            .map(|item| Ok((trimmed(item), self.label(item)?)))
            .collect()
    }

    fn labels(&self, body: &'a str) -> Result<Vec<String>, ScenarioError> {
        Ok(self.list(body, ',')?.into_iter().map(|(_, l)| l).collect())
    }

    fn agent(&self, raw: &'a str) -> Result<u8, ScenarioError> {
        match raw {
            "1" => Ok(1),
            "2" => Ok(2),
            _ => Err(self.err(raw, format!("agent must be 1 or 2, got `{raw}`"))),
        }
    }

    fn number(&self, raw: &'a str) -> Result<f64, ScenarioError> {
        let s = trimmed(raw);
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err(s, format!("expected a finite number, got `{s}`"))),
        }
    }
}

fn trimmed(s: &str) -> &str {
    let start = s.len() - s.trim_start().len();
    s[start..].trim_end()
}

fn is_label_char(c: char) -> bool {
    !(c.is_whitespace() || matches!(c, ',' | '>' | '~' | '=' | ':' | '#' | '{' | '}'))
}

/// Reads an angle written as a decimal number, `pi`, or `pi/<n>`.
pub fn parse_angle(text: &str) -> Option<f64> {
    let s = text.trim();
    if s == "pi" {
        return Some(PI);
    }
    if let Some(d) = s.strip_prefix("pi/") {
        return match d.trim().parse::<u32>() {
            Ok(n) if n > 0 => Some(PI / n as f64),
            _ => None,
        };
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_gamma(ctx: &LineCtx<'_>, body: &str) -> Result<f64, ScenarioError> {
    let s = trimmed(body);
    parse_angle(s)
        .ok_or_else(|| ctx.err(s, format!("expected a number, `pi` or `pi/<n>`, got `{s}`")))
}

fn format_gamma(g: f64) -> String {
    if g == FRAC_PI_2 {
        "pi/2".into()
    } else if g == PI {
        "pi".into()
    } else {
        format!("{g}")
    }
}

fn expect_args(
    ctx: &LineCtx<'_>,
    head: &str,
    args: &[&str],
    n: usize,
    form: &str,
) -> Result<(), ScenarioError> {
    if args.len() != n {
        return Err(ctx.err(head, format!("expected `{form}`")));
    }
    Ok(())
}

/// Parses the human-editable form without resolving labels.
pub fn parse_scenario_file(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let mut outcomes = None;
    let mut profiles = None;
    let mut rankings = Vec::new();
    let mut scr = Vec::new();
    let mut witness_b: Option<Vec<String>> = None;
    let mut witness_c = Vec::new();
    let mut witness_e = Vec::new();
    let mut rank_default = false;
    let mut utility_rows = Vec::new();
    let mut gamma = None;
    let mut reference = None;
    let mut seed = None;
    let mut any_witness_line = None;

    for (i, raw) in text.lines().enumerate() {
        let ctx = LineCtx {
            no: i + 1,
            text: raw,
        };
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some((head, body)) = content.split_once(':') else {
            return Err(ctx.err(trimmed(content), "expected `<directive>: <value>`"));
        };
        let words: Vec<&str> = head.split_whitespace().collect();
        let Some(&keyword) = words.first() else {
            return Err(ctx.err(head, "missing directive before `:`"));
        };
        let args = &words[1..];
        let once = |slot: bool| -> Result<(), ScenarioError> {
            if slot {
                Err(ctx.err(keyword, format!("`{keyword}` given twice")))
            } else {
                Ok(())
            }
        };
        match keyword {
            "outcomes" => {
                expect_args(&ctx, keyword, args, 0, "outcomes: a, b, ...")?;
                once(outcomes.is_some())?;
                outcomes = Some(ctx.labels(body)?);
            }
            "profiles" => {
                expect_args(&ctx, keyword, args, 0, "profiles: t, u, ...")?;
                once(profiles.is_some())?;
                profiles = Some(ctx.labels(body)?);
            }
            "ranking" => {
                expect_args(
                    &ctx,
                    keyword,
                    args,
                    2,
                    "ranking <agent> <profile>: a > b ~ c",
                )?;
                let agent = ctx.agent(args[0])?;
                let profile = ctx.label(args[1])?;
                let classes = if body.trim().is_empty() {
                    Vec::new()
                } else {
                    body.split('>')
                        .map(|class| {
                            Ok(ctx.list(class, '~')?.into_iter().map(|(_, l)| l).collect())
                        })
                        .collect::<Result<Vec<Vec<String>>, ScenarioError>>()?
                };
                if let Some(empty) = body.split('>').find(|c| c.trim().is_empty()) {
                    if !body.trim().is_empty() {
                        return Err(ctx.err(empty, "empty indifference class"));
                    }
                }
                rankings.push(RankingEntry {
                    agent,
                    profile,
                    classes,
                });
            }
            "scr" => {
                expect_args(&ctx, keyword, args, 1, "scr <profile>: a, b, ...")?;
                scr.push(ScrEntry {
                    profile: ctx.label(args[0])?,
                    outcomes: ctx.labels(body)?,
                });
            }
            "witness-b" => {
                expect_args(&ctx, keyword, args, 0, "witness-b: a, b, ...")?;
                once(witness_b.is_some())?;
                witness_b = Some(ctx.labels(body)?);
                any_witness_line.get_or_insert(i + 1);
            }
            "witness-c" => {
                expect_args(
                    &ctx,
                    keyword,
                    args,
                    3,
                    "witness-c <agent> <outcome> <profile>: a, b, ...",
                )?;
                witness_c.push(ContourEntry {
                    agent: ctx.agent(args[0])?,
                    outcome: ctx.label(args[1])?,
                    profile: ctx.label(args[2])?,
                    set: ctx.labels(body)?,
                });
                any_witness_line.get_or_insert(i + 1);
            }
            "witness-e" => {
                expect_args(
                    &ctx,
                    keyword,
                    args,
                    4,
                    "witness-e <a> <theta> <b> <phi>: outcome",
                )?;
                let value = ctx.list(body, ',')?;
                let [(_, outcome)] = <[_; 1]>::try_from(value).map_err(|_| {
                    ctx.err(
                        trimmed(body).get(..).unwrap_or(body),
                        "expected exactly one outcome",
                    )
                })?;
                witness_e.push(CompromiseEntry {
                    a: ctx.label(args[0])?,
                    theta: ctx.label(args[1])?,
                    b: ctx.label(args[2])?,
                    phi: ctx.label(args[3])?,
                    outcome,
                });
                any_witness_line.get_or_insert(i + 1);
            }
            "utilities" => {
                expect_args(&ctx, keyword, args, 0, "utilities: rank-default")?;
                once(rank_default)?;
                if trimmed(body) != "rank-default" {
                    return Err(
                        ctx.err(trimmed(body), "the only supported value is `rank-default`")
                    );
                }
                rank_default = true;
            }
            "utility" => {
                expect_args(
                    &ctx,
                    keyword,
                    args,
                    2,
                    "utility <agent> <profile>: a=5, b=3, ...",
                )?;
                let agent = ctx.agent(args[0])?;
                let profile = ctx.label(args[1])?;
                let mut values = Vec::new();
                if !body.trim().is_empty() {
                    for item in body.split(',') {
                        let Some((name, value)) = item.split_once('=') else {
                            return Err(ctx.err(trimmed(item), "expected `<outcome>=<number>`"));
                        };
                        values.push(UtilityValue {
                            outcome: ctx.label(name)?,
                            value: ctx.number(value)?,
                        });
                    }
                }
                utility_rows.push(UtilityRow {
                    agent,
                    profile,
                    values,
                });
            }
            "gamma" => {
                expect_args(&ctx, keyword, args, 0, "gamma: pi/2")?;
                once(gamma.is_some())?;
                gamma = Some(parse_gamma(&ctx, body)?);
            }
            "reference-agent" => {
                expect_args(&ctx, keyword, args, 0, "reference-agent: 2")?;
                once(reference.is_some())?;
                reference = Some(ctx.agent(trimmed(body))?);
            }
            "seed" => {
                expect_args(&ctx, keyword, args, 0, "seed: 7")?;
                once(seed.is_some())?;
                let s = trimmed(body);
                seed =
                    Some(s.parse::<u64>().map_err(|_| {
                        ctx.err(s, format!("expected an unsigned integer, got `{s}`"))
                    })?);
            }
            other => return Err(ctx.err(other, format!("unknown directive `{other}`"))),
        }
    }

    let missing = |what: &str| {
        syntax(
            text.lines().count().max(1),
            1,
            format!("missing `{what}:` line"),
        )
    };
    let outcomes = outcomes.ok_or_else(|| missing("outcomes"))?;
    let profiles = profiles.ok_or_else(|| missing("profiles"))?;
    if rank_default && !utility_rows.is_empty() {
        return Err(ScenarioError::Semantic(Error::InvalidUtility(
            "both `utilities: rank-default` and explicit `utility` lines given".into(),
        )));
    }
    let witness = match (any_witness_line, witness_b) {
        (None, _) => None,
        (Some(_), Some(b)) => Some(WitnessEntry {
            b,
            c: witness_c,
            e: witness_e,
        }),
        (Some(line), None) => {
            return Err(syntax(line, 1, "witness lines given without `witness-b:`"))
        }
    };
    let utilities = if rank_default {
        Some(UtilitySource::RankDefault)
    } else if utility_rows.is_empty() {
        None
    } else {
        Some(UtilitySource::Table { rows: utility_rows })
    };
    Ok(ScenarioFile {
        outcomes,
        profiles,
        rankings,
        scr,
        witness,
        utilities,
        gamma: gamma.unwrap_or(FRAC_PI_2),
        reference_agent: reference.unwrap_or(2),
        seed: seed.unwrap_or(0),
    })
}

/// Parses and validates the human-editable form.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    parse_scenario_file(text)?.build()
}

/// Parses and validates the canonical JSON form.
pub fn parse_scenario_json(text: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile =
        serde_json::from_str(text).map_err(|e| syntax(e.line(), e.column(), e.to_string()))?;
    file.build()
}

fn agent_of(n: u8) -> Result<Agent, Error> {
    Agent::from_number(n)
        .ok_or_else(|| Error::InvalidInput(format!("agent must be 1 or 2, got {n}")))
}

impl ScenarioFile {
    /// Resolves labels and enforces every invariant of the nested types.
    pub fn build(&self) -> Result<Scenario, ScenarioError> {
        let np = self.profiles.len();
        let mut slots: [Vec<Option<Vec<Vec<String>>>>; 2] = [vec![None; np], vec![None; np]];
        for r in &self.rankings {
            let j = agent_of(r.agent)?;
            let t = self
                .profiles
                .iter()
                .position(|p| *p == r.profile)
                .ok_or_else(|| Error::UnknownProfile(r.profile.clone()))?;
            let slot = &mut slots[j.index()][t];
            if slot.is_some() {
                return Err(Error::InvalidEnvironment(format!(
                    "ranking for agent {j} at {} given twice",
                    r.profile
                ))
                .into());
            }
            *slot = Some(r.classes.clone());
        }
        let mut rankings: [Vec<Vec<Vec<String>>>; 2] = [Vec::new(), Vec::new()];
        for j in Agent::ALL {
            for (t, slot) in slots[j.index()].iter_mut().enumerate() {
                let classes = slot.take().ok_or_else(|| {
                    Error::InvalidEnvironment(format!(
                        "ranking for agent {j} at {} missing",
                        self.profiles[t]
                    ))
                })?;
                rankings[j.index()].push(classes);
            }
        }
        let env = Environment::new(self.outcomes.clone(), self.profiles.clone(), rankings)?;

        let set_of = |labels: &[String]| {
            labels
                .iter()
                .map(|l| env.outcome(l))
                .collect::<crate::Result<OutcomeSet>>()
        };
        let mut sets: Vec<Option<OutcomeSet>> = vec![None; np];
        for s in &self.scr {
            let t = env.profile(&s.profile)?;
            if sets[t.0].is_some() {
                return Err(Error::InvalidScr(format!("f({}) given twice", s.profile)).into());
            }
            sets[t.0] = Some(set_of(&s.outcomes)?);
        }
        let sets = sets
            .into_iter()
            .enumerate()
            .map(|(t, s)| {
                s.ok_or_else(|| Error::InvalidScr(format!("f({}) missing", self.profiles[t])))
            })
            .collect::<crate::Result<Vec<_>>>()?;
        let f = Scr::new(&env, sets)?;

        let witness = match &self.witness {
            None => None,
            Some(spec) => {
                let mut w = Mu2Witness {
                    b_set: set_of(&spec.b)?,
                    ..Default::default()
                };
                for c in &spec.c {
                    let key = (
                        agent_of(c.agent)?,
                        env.outcome(&c.outcome)?,
                        env.profile(&c.profile)?,
                    );
                    if w.c_sets.insert(key, set_of(&c.set)?).is_some() {
                        return Err(Error::InvalidInput(format!(
                            "witness set for agent {} at ({}, {}) given twice",
                            c.agent, c.outcome, c.profile
                        ))
                        .into());
                    }
                }
                for e in &spec.e {
                    let key = (
                        env.outcome(&e.a)?,
                        env.profile(&e.theta)?,
                        env.outcome(&e.b)?,
                        env.profile(&e.phi)?,
                    );
                    if w.e_map.insert(key, env.outcome(&e.outcome)?).is_some() {
                        return Err(Error::InvalidInput(format!(
                            "compromise ({}, {}, {}, {}) given twice",
                            e.a, e.theta, e.b, e.phi
                        ))
                        .into());
                    }
                }
                Some(w)
            }
        };

        let utilities = match &self.utilities {
            None => None,
            Some(UtilitySource::RankDefault) => Some(UtilityTable::rank_default(&env)),
            Some(UtilitySource::Table { rows }) => {
                let mut values: [Vec<Vec<Option<f64>>>; 2] = [
                    vec![vec![None; env.num_outcomes()]; np],
                    vec![vec![None; env.num_outcomes()]; np],
                ];
                for row in rows {
                    let j = agent_of(row.agent)?;
                    let t = env.profile(&row.profile)?;
                    for v in &row.values {
                        let a = env.outcome(&v.outcome)?;
                        let cell = &mut values[j.index()][t.0][a.0];
                        if cell.is_some() {
                            return Err(Error::InvalidUtility(format!(
                                "utility of {} for agent {j} at {} given twice",
                                v.outcome, row.profile
                            ))
                            .into());
                        }
                        *cell = Some(v.value);
                    }
                }
                let mut table = [Vec::new(), Vec::new()];
                for j in Agent::ALL {
                    for t in env.profiles() {
                        let row = values[j.index()][t.0]
                            .iter()
                            .enumerate()
                            .map(|(a, v)| {
                                v.ok_or_else(|| {
                                    Error::InvalidUtility(format!(
                                        "utility of {} for agent {j} at {} missing",
                                        env.outcome_labels()[a],
                                        env.profile_label(t)
                                    ))
                                })
                            })
                            .collect::<crate::Result<Vec<f64>>>()?;
                        table[j.index()].push(row);
                    }
                }
                Some(UtilityTable::new(&env, table)?)
            }
        };

        Entangler::new(self.gamma)?;
        let reference = agent_of(self.reference_agent)?;
        Ok(Scenario {
            file: self.clone(),
            env,
            f,
            witness,
            utilities,
            gamma: self.gamma,
            reference,
            seed: self.seed,
        })
    }

    /// Canonical human-editable text.
    pub fn to_scn(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("outcomes: {}", self.outcomes.join(", ")));
        line(format!("profiles: {}", self.profiles.join(", ")));
        for r in &self.rankings {
            let classes: Vec<String> = r.classes.iter().map(|c| c.join(" ~ ")).collect();
            line(format!(
                "ranking {} {}: {}",
                r.agent,
                r.profile,
                classes.join(" > ")
            ));
        }
        for s in &self.scr {
            line(format!("scr {}: {}", s.profile, s.outcomes.join(", ")));
        }
        if let Some(w) = &self.witness {
            line(format!("witness-b: {}", w.b.join(", ")));
            for c in &w.c {
                line(format!(
                    "witness-c {} {} {}: {}",
                    c.agent,
                    c.outcome,
                    c.profile,
                    c.set.join(", ")
                ));
            }
            for e in &w.e {
                line(format!(
                    "witness-e {} {} {} {}: {}",
                    e.a, e.theta, e.b, e.phi, e.outcome
                ));
            }
        }
        match &self.utilities {
            None => {}
            Some(UtilitySource::RankDefault) => line("utilities: rank-default".into()),
            Some(UtilitySource::Table { rows }) => {
                for r in rows {
                    let vals: Vec<String> = r
                        .values
                        .iter()
                        .map(|v| format!("{}={}", v.outcome, v.value))
                        .collect();
                    line(format!(
                        "utility {} {}: {}",
                        r.agent,
                        r.profile,
                        vals.join(", ")
                    ));
                }
            }
        }
        line(format!("gamma: {}", format_gamma(self.gamma)));
        line(format!("reference-agent: {}", self.reference_agent));
        line(format!("seed: {}", self.seed));
        out
    }

    /// Canonical JSON text.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }
}

impl Scenario {
    pub fn require_witness(&self) -> crate::Result<&Mu2Witness> {
        self.witness
            .as_ref()
            .ok_or_else(|| Error::Precondition("the scenario has no witness".into()))
    }

    pub fn require_utilities(&self) -> crate::Result<&UtilityTable> {
        self.utilities
            .as_ref()
            .ok_or_else(|| Error::Precondition("the scenario has no utilities".into()))
    }
}
