use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use nashimpl::engine::{
    candidate_profile, check_lambda_full, check_lambda_pi2, dollar_payoffs, lambda4_threshold,
    run_algorithmic_mechanism, run_quantum_mechanism, verify_proposition, AlgorithmInput, Card,
    Deviation, Inequality, PropositionVerdict, QuantumStrategy, RunReport, Setting,
};
use nashimpl::mechanism::{enumerate_nash, Message};
use nashimpl::quantum::{Basis, LocalOp};
use nashimpl::scenario::{
    parse_angle, parse_scenario, parse_scenario_json, Scenario, ScenarioError,
};
use nashimpl::scr::{
    check_lambda_ordinal, explain_mu2, lambda_candidates, search_mu2, verify_mu2, Agent,
    Environment, Mu2Witness, OutcomeSet, Profile, SearchLimits,
};

use crate::{reproduce, Command, Format, Mech, SCENARIO_DIR_VAR};

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_PARSE: u8 = 3;
pub const EXIT_SEMANTIC: u8 = 4;
pub const EXIT_CONDITION: u8 = 5;
pub const EXIT_MISMATCH: u8 = 6;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Usage(String),
    Parse(String),
    Semantic(String),
    Condition(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Semantic(_) => EXIT_SEMANTIC,
            CliError::Condition(_) => EXIT_CONDITION,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m)
            | CliError::Usage(m)
            | CliError::Parse(m)
            | CliError::Semantic(m)
            | CliError::Condition(m) => f.write_str(m),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Syntax { .. } => CliError::Parse(e.to_string()),
            ScenarioError::Semantic(_) => CliError::Semantic(e.to_string()),
        }
    }
}

impl From<nashimpl::Error> for CliError {
    fn from(e: nashimpl::Error) -> Self {
        match e {
            nashimpl::Error::Precondition(_) => CliError::Condition(e.to_string()),
            _ => CliError::Semantic(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A loaded scenario with the bytes it was read from.
pub struct Loaded {
    pub scenario: Scenario,
    pub name: String,
    pub digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn resolve(path: &str) -> PathBuf {
    let direct = PathBuf::from(path);
    if direct.exists() {
        return direct;
    }
    match std::env::var_os(SCENARIO_DIR_VAR) {
        Some(dir) => Path::new(&dir).join(path),
        None => direct,
    }
}

fn is_json(path: &Path, text: &str) -> bool {
    path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{')
}

pub fn read_text(path: &str) -> CliResult<(PathBuf, String)> {
    let resolved = resolve(path);
    let text = std::fs::read_to_string(&resolved)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", resolved.display())))?;
    Ok((resolved, text))
}

pub fn load_text(name: &str, text: &str, json: bool) -> CliResult<Loaded> {
    let scenario = if json {
        parse_scenario_json(text)?
    } else {
        parse_scenario(text)?
    };
    Ok(Loaded {
        scenario,
        name: name.to_string(),
        digest: sha256_hex(text.as_bytes()),
    })
}

pub fn load(path: &str) -> CliResult<Loaded> {
    let (resolved, text) = read_text(path)?;
    load_text(path, &text, is_json(&resolved, &text))
}

pub fn header(out: &mut String, echo: &str, loaded: &Loaded, seed: Option<u64>) {
    let _ = writeln!(out, "# nashimpl {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# command: {echo}");
    let _ = writeln!(out, "# scenario: {} sha256={}", loaded.name, loaded.digest);
    if let Some(seed) = seed {
        let _ = writeln!(out, "# seed: {seed}");
    }
}

/// Fixed-point formatting without a sign on zero.
pub fn fixed(x: f64, digits: usize) -> String {
    let s = format!("{x:.digits$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn gamma_arg(text: Option<&str>, default: f64) -> CliResult<f64> {
    match text {
        None => Ok(default),
        Some(t) => {
            parse_angle(t).ok_or_else(|| CliError::Usage(format!("cannot read angle `{t}`")))
        }
    }
}

fn profile_arg(env: &Environment, label: &str) -> CliResult<Profile> {
    Ok(env.profile(label)?)
}

fn profiles_arg(env: &Environment, label: Option<&str>) -> CliResult<Vec<Profile>> {
    match label {
        Some(l) => Ok(vec![profile_arg(env, l)?]),
        None => Ok(env.profiles().collect()),
    }
}

fn setting_parts(s: &Scenario) -> CliResult<Setting<'_>> {
    Ok(Setting::new(
        &s.env,
        &s.f,
        s.require_witness()?,
        s.require_utilities()?,
    ))
}

pub fn render_card(env: &Environment, c: &Card) -> String {
    format!("{} / {}", c.side0.render(env), c.side1.render(env))
}

pub fn render_op(op: &LocalOp) -> String {
    format!("xi={} phi={}", fixed(op.xi, 6), fixed(op.phi, 6))
}

pub fn render_distribution(p: &[f64; 4]) -> String {
    Basis::ALL
        .iter()
        .map(|b| format!("{b}={}", fixed(p[b.index()], 12)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn render_inequality(name: &str, q: &Inequality) -> String {
    format!(
        "{name}: {} vs {} -> {:?} (weak reading: {})",
        fixed(q.lhs, 9),
        fixed(q.rhs, 9),
        q.strict,
        if q.weak { "holds" } else { "fails" }
    )
    .to_lowercase()
}

fn parse_message(env: &Environment, text: &str) -> CliResult<Message> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [t, a, b, n] = parts[..] else {
        return Err(CliError::Usage(format!(
            "message `{text}` is not of the form theta,a,b,n"
        )));
    };
    let n = n.parse::<u32>().map_err(|_| {
        CliError::Usage(format!(
            "integer `{n}` in message `{text}` is not a natural number"
        ))
    })?;
    Ok(Message::new(
        env.profile(t)?,
        env.outcome(a)?,
        env.outcome(b)?,
        n,
    ))
}

fn parse_card(env: &Environment, text: &str) -> CliResult<Card> {
    match text.split_once('/') {
        Some((s0, s1)) => Ok(Card::new(parse_message(env, s0)?, parse_message(env, s1)?)),
        None => Ok(Card::plain(parse_message(env, text)?)),
    }
}

fn parse_op(text: &str) -> CliResult<LocalOp> {
    match text.trim() {
        "C" | "c" => Ok(LocalOp::C),
        "D" | "d" => Ok(LocalOp::D),
        "I" | "i" => Ok(LocalOp::I),
        other => {
            let Some((xi, phi)) = other.split_once(',') else {
                return Err(CliError::Usage(format!(
                    "operation `{other}` is not C, D, I or xi,phi"
                )));
            };
            let angle = |s: &str| {
                parse_angle(s).ok_or_else(|| CliError::Usage(format!("cannot read angle `{s}`")))
            };
            Ok(LocalOp::new(angle(xi)?, angle(phi)?)?)
        }
    }
}

pub fn execute(cmd: &Command, echo: &str) -> CliResult<(String, u8)> {
    match cmd {
        Command::CheckMu2 {
            scenario,
            search,
            b,
        } => check_mu2(&load(scenario)?, echo, *search, b.as_deref()),
        Command::CheckLambda {
            scenario,
            theta,
            gamma,
        } => check_lambda(&load(scenario)?, echo, theta.as_deref(), gamma.as_deref()),
        Command::Equilibria {
            scenario,
            theta,
            n_cap,
        } => equilibria(&load(scenario)?, echo, theta.as_deref(), *n_cap),
        Command::Run {
            scenario,
            theta,
            mech,
            gamma,
            seed,
            op1,
            op2,
            card1,
            card2,
            json,
        } => {
            let loaded = load(scenario)?;
            let args = RunArgs {
                theta,
                mech: *mech,
                gamma: gamma.as_deref(),
                seed: *seed,
                ops: [op1.as_deref(), op2.as_deref()],
                cards: [card1.as_deref(), card2.as_deref()],
                json: *json,
            };
            run(&loaded, echo, &args)
        }
        Command::VerifyProposition {
            scenario,
            theta,
            gamma,
            grid,
        } => proposition(&load(scenario)?, echo, theta, gamma.as_deref(), *grid),
        Command::ReproducePaper {
            scenario,
            expected,
            print_actual,
        } => reproduce::command(
            echo,
            scenario.as_deref(),
            expected.as_deref(),
            *print_actual,
        ),
        Command::Convert { input, to, output } => convert(input, *to, output.as_deref()),
    }
}

pub fn witness_lines(env: &Environment, w: &Mu2Witness) -> Vec<String> {
    let mut lines = vec![format!("B = {}", env.format_set(w.b_set))];
    for (&(j, a, t), &set) in &w.c_sets {
        lines.push(format!(
            "C{}({},{}) = {}",
            j.number(),
            env.outcome_label(a),
            env.profile_label(t),
            env.format_set(set)
        ));
    }
    for (&(a, t, b, p), &e) in &w.e_map {
        lines.push(format!(
            "e({},{},{},{}) = {}",
            env.outcome_label(a),
            env.profile_label(t),
            env.outcome_label(b),
            env.profile_label(p),
            env.outcome_label(e)
        ));
    }
    lines
}

fn check_mu2(
    loaded: &Loaded,
    echo: &str,
    search: bool,
    b: Option<&str>,
) -> CliResult<(String, u8)> {
    let s = &loaded.scenario;
    let env = &s.env;
    let mut out = String::new();
    header(&mut out, echo, loaded, None);
    let searched;
    let w = match (&s.witness, search) {
        (Some(w), false) => {
            let _ = writeln!(out, "witness: from scenario");
            w
        }
        _ => {
            let b_set = b
                .map(|labels| {
                    labels
                        .split(',')
                        .map(|l| env.outcome(l.trim()))
                        .collect::<nashimpl::Result<OutcomeSet>>()
                })
                .transpose()?;
            match search_mu2(env, &s.f, b_set, SearchLimits::default())? {
                Some(w) => {
                    let _ = writeln!(out, "witness: found by search");
                    searched = w;
                    &searched
                }
                None => {
                    let _ = writeln!(out, "witness: none exists over the searched space");
                    let _ = writeln!(out, "verdict: violated");
                    return Ok((out, EXIT_CONDITION));
                }
            }
        }
    };
    for line in witness_lines(env, w) {
        let _ = writeln!(out, "  {line}");
    }
    match explain_mu2(env, &s.f, w) {
        Ok(checks) => {
            let _ = writeln!(out, "checks: {}", checks.len());
            for c in &checks {
                let scope = c
                    .theta_star
                    .map(|t| format!(" {}", env.profile_label(t)))
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    "  [{}{}] {} {}",
                    c.rule,
                    scope,
                    c.render(env),
                    if c.ok { "ok" } else { "FAIL" }
                );
            }
        }
        Err(e) => {
            let _ = writeln!(out, "checks: unavailable ({e})");
        }
    }
    let report = verify_mu2(env, &s.f, w);
    for v in &report.violations {
        let scope = v
            .theta_star
            .map(|t| format!(" {}", env.profile_label(t)))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "violation [{}{}] {}: {}",
            v.rule, scope, v.subject, v.detail
        );
    }
    if report.satisfied {
        let _ = writeln!(out, "verdict: satisfied");
        Ok((out, EXIT_OK))
    } else {
        let _ = writeln!(out, "verdict: violated");
        Ok((out, EXIT_CONDITION))
    }
}

fn check_lambda(
    loaded: &Loaded,
    echo: &str,
    theta: Option<&str>,
    gamma: Option<&str>,
) -> CliResult<(String, u8)> {
    let s = &loaded.scenario;
    let env = &s.env;
    let gamma = gamma_arg(gamma, s.gamma)?;
    nashimpl::quantum::Entangler::new(gamma)?;
    let mut out = String::new();
    header(&mut out, echo, loaded, None);
    let _ = writeln!(out, "gamma: {gamma}");
    let pair = |(t, a): (Profile, nashimpl::scr::Outcome)| {
        format!("({},{})", env.profile_label(t), env.outcome_label(a))
    };
    for t in profiles_arg(env, theta)? {
        let tl = env.profile_label(t);
        let candidates = lambda_candidates(env, &s.f, t)?;
        let listed: Vec<String> = candidates.iter().map(|&c| pair(c)).collect();
        let _ = writeln!(out, "profile {tl}");
        let _ = writeln!(
            out,
            "  candidates: {}",
            if listed.is_empty() {
                "none".into()
            } else {
                listed.join(" ")
            }
        );
        let Some(target) = check_lambda_ordinal(env, &s.f, t)? else {
            let _ = writeln!(out, "  gate: closed");
            continue;
        };
        let _ = writeln!(out, "  gate: open, target {}", pair(target));
        let (Some(_), Some(_)) = (&s.witness, &s.utilities) else {
            let _ = writeln!(out, "  payoff conditions: need a witness and utilities");
            continue;
        };
        let setting = setting_parts(s)?;
        let cards = candidate_profile(&setting, t, target)?.map(|q| q.card);
        for j in Agent::ALL {
            let p = dollar_payoffs(&setting, t, &cards, j)?;
            let _ = writeln!(
                out,
                "  agent {j} as reference: $CC={} $CD={} $DC={} $DD={} (outcomes {})",
                p.cc,
                p.cd,
                p.dc,
                p.dd,
                p.outcomes
                    .iter()
                    .map(|&a| env.outcome_label(a))
                    .collect::<Vec<_>>()
                    .join(",")
            );
            let full = check_lambda_full(&p, gamma);
            let pi2 = check_lambda_pi2(&p);
            let _ = writeln!(out, "    {}", render_inequality("cc > dd", &full.lambda3));
            let _ = writeln!(
                out,
                "    {}",
                render_inequality("cc > cd cos2 + dc sin2", &full.lambda4)
            );
            let _ = writeln!(
                out,
                "    {}",
                render_inequality("cc > dc at pi/2", &pi2.lambda4)
            );
            match lambda4_threshold(&p) {
                Some(x) => {
                    let _ = writeln!(out, "    threshold: sin2(gamma) = {}", fixed(x, 9));
                }
                None => {
                    let _ = writeln!(out, "    threshold: none in [0, 1]");
                }
            }
        }
    }
    Ok((out, EXIT_OK))
}

fn equilibria(
    loaded: &Loaded,
    echo: &str,
    theta: Option<&str>,
    n_cap: u32,
) -> CliResult<(String, u8)> {
    let s = &loaded.scenario;
    let env = &s.env;
    let setting = setting_parts(s)?;
    let mut out = String::new();
    header(&mut out, echo, loaded, None);
    let mut all = true;
    for t in profiles_arg(env, theta)? {
        let eq = enumerate_nash(env, &s.f, setting.w, setting.u, t, n_cap)?;
        let target = s.f.get(t);
        let matches = eq.outcomes == target;
        all &= matches;
        let _ = writeln!(
            out,
            "profile {}: equilibrium outcomes {} f = {} equilibria {} pairs {} {}",
            env.profile_label(t),
            env.format_set(eq.outcomes),
            env.format_set(target),
            eq.equilibria.len(),
            eq.pairs_examined,
            if matches { "match" } else { "MISMATCH" }
        );
    }
    let _ = writeln!(
        out,
        "verdict: {}",
        if all {
            "implemented"
        } else {
            "not implemented"
        }
    );
    Ok((out, if all { EXIT_OK } else { EXIT_CONDITION }))
}

struct RunArgs<'a> {
    theta: &'a str,
    mech: Mech,
    gamma: Option<&'a str>,
    seed: Option<u64>,
    ops: [Option<&'a str>; 2],
    cards: [Option<&'a str>; 2],
    json: bool,
}

pub fn render_run(env: &Environment, r: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "branch: {:?}", r.branch);
    let _ = writeln!(out, "theta: {}", env.profile_label(r.theta_true));
    match r.gate_target {
        Some((t, a)) => {
            let _ = writeln!(
                out,
                "gate: ({},{})",
                env.profile_label(t),
                env.outcome_label(a)
            );
        }
        None => {
            let _ = writeln!(out, "gate: closed");
        }
    }
    let _ = writeln!(out, "gamma: {}", r.gamma);
    let _ = writeln!(out, "rng: {}", r.rng);
    for j in Agent::ALL {
        let _ = writeln!(out, "op {j}: {}", render_op(&r.ops[j.index()]));
        let _ = writeln!(out, "card {j}: {}", render_card(env, &r.cards[j.index()]));
    }
    let _ = writeln!(
        out,
        "distribution: {}",
        render_distribution(&r.distribution)
    );
    let _ = writeln!(out, "collapse: {}", r.collapse);
    for j in Agent::ALL {
        let _ = writeln!(out, "message {j}: {}", r.messages[j.index()].render(env));
    }
    let _ = writeln!(out, "rule: {}", r.rule.number());
    let _ = writeln!(out, "outcome: {}", env.outcome_label(r.outcome));
    let _ = writeln!(out, "utilities: {} {}", r.utilities[0], r.utilities[1]);
    out
}

fn run(loaded: &Loaded, echo: &str, args: &RunArgs<'_>) -> CliResult<(String, u8)> {
    let s = &loaded.scenario;
    let env = &s.env;
    let setting = setting_parts(s)?;
    let t = profile_arg(env, args.theta)?;
    let seed = args.seed.unwrap_or(s.seed);
    let default_card = match check_lambda_ordinal(env, &s.f, t)? {
        Some(target) => candidate_profile(&setting, t, target)?[0].card,
        None => Card::plain(Message::truthful(&s.f, setting.w, t)?),
    };
    let mut strategies = [QuantumStrategy {
        op: LocalOp::C,
        card: default_card,
    }; 2];
    for j in Agent::ALL {
        if let Some(op) = args.ops[j.index()] {
            strategies[j.index()].op = parse_op(op)?;
        }
        if let Some(card) = args.cards[j.index()] {
            strategies[j.index()].card = parse_card(env, card)?;
        }
    }
    let report = match args.mech {
        Mech::Quantum => {
            let gamma = gamma_arg(args.gamma, s.gamma)?;
            run_quantum_mechanism(&setting, t, &strategies, gamma, seed)?
        }
        Mech::Algorithmic => {
            if args.gamma.is_some() {
                return Err(CliError::Usage(
                    "the algorithmic mechanism fixes gamma at pi/2".into(),
                ));
            }
            let inputs = strategies.map(|q| AlgorithmInput {
                xi: q.op.xi,
                phi: q.op.phi,
                card: q.card,
            });
            run_algorithmic_mechanism(&setting, t, &inputs, seed)?
        }
    };
    let mut out = String::new();
    if args.json {
        out.push_str(&serde_json::to_string_pretty(&report).expect("report serializes"));
        out.push('\n');
    } else {
        header(&mut out, echo, loaded, Some(seed));
        let _ = writeln!(out, "mechanism: {:?}", args.mech);
        out.push_str(&render_run(env, &report));
    }
    Ok((out, EXIT_OK))
}

pub fn render_deviation(env: &Environment, d: &Deviation) -> String {
    format!(
        "agent {} op {} card {} payoff {} gain {}",
        d.agent,
        render_op(&d.op),
        render_card(env, &d.card),
        fixed(d.payoff, 9),
        fixed(d.gain, 9)
    )
}

fn proposition(
    loaded: &Loaded,
    echo: &str,
    theta: &str,
    gamma: Option<&str>,
    grid: usize,
) -> CliResult<(String, u8)> {
    let s = &loaded.scenario;
    let env = &s.env;
    let setting = setting_parts(s)?;
    let t = profile_arg(env, theta)?;
    let gamma = gamma_arg(gamma, s.gamma)?;
    let verdict = verify_proposition(&setting, t, gamma, grid)?;
    let mut out = String::new();
    header(&mut out, echo, loaded, None);
    let _ = writeln!(out, "theta: {}", env.profile_label(t));
    let _ = writeln!(out, "gamma: {gamma}");
    match verdict {
        PropositionVerdict::Classical(v) => {
            let _ = writeln!(out, "branch: classical");
            let _ = writeln!(
                out,
                "equilibrium outcomes: {}",
                env.format_set(v.equilibrium_outcomes)
            );
            let _ = writeln!(out, "f: {}", env.format_set(v.target));
            let _ = writeln!(
                out,
                "verdict: {}",
                if v.matches_f {
                    "equilibrium outcomes equal f"
                } else {
                    "equilibrium outcomes differ from f"
                }
            );
        }
        PropositionVerdict::Quantum(v) => {
            let _ = writeln!(out, "branch: quantum");
            let _ = writeln!(out, "grid: {} x {}", v.grid.xi_points, v.grid.phi_points);
            let _ = writeln!(
                out,
                "target: ({},{})",
                env.profile_label(v.target.0),
                env.outcome_label(v.target.1)
            );
            let _ = writeln!(out, "card: {}", render_card(env, &v.card));
            let _ = writeln!(
                out,
                "distribution: {}",
                render_distribution(&v.distribution)
            );
            let _ = writeln!(
                out,
                "outcome: {}",
                v.outcome
                    .map(|a| env.outcome_label(a).to_string())
                    .unwrap_or_else(|| "random".into())
            );
            let _ = writeln!(
                out,
                "equilibrium utilities: {} {}",
                fixed(v.equilibrium_utilities[0], 9),
                fixed(v.equilibrium_utilities[1], 9)
            );
            for j in Agent::ALL {
                let r = &v.lambda[j.index()];
                let _ = writeln!(
                    out,
                    "agent {j} {}",
                    render_inequality("cc > dd", &r.lambda3)
                );
                let _ = writeln!(
                    out,
                    "agent {j} {}",
                    render_inequality("cc > cd cos2 + dc sin2", &r.lambda4)
                );
            }
            for d in &v.deviations {
                let _ = writeln!(
                    out,
                    "best deviation (side 1 free): {}",
                    render_deviation(env, d)
                );
            }
            let _ = writeln!(
                out,
                "worst deviation: {}",
                render_deviation(env, v.worst_deviation())
            );
            for d in &v.unrestricted_deviations {
                let _ = writeln!(
                    out,
                    "best deviation (both sides free): {}",
                    render_deviation(env, d)
                );
            }
            let _ = writeln!(out, "equilibrium: {}", v.is_equilibrium);
            let _ = writeln!(
                out,
                "equilibrium with both sides free: {}",
                v.unrestricted_equilibrium
            );
            let _ = writeln!(out, "outside f: {}", v.outside_f);
            let _ = writeln!(out, "payoff conditions hold: {}", v.lambda_holds);
            let _ = writeln!(out, "consistent: {}", v.consistent);
            let summary = match (v.is_equilibrium, v.outcome) {
                (true, Some(a)) => {
                    format!("equilibrium confirmed, outcome {}", env.outcome_label(a))
                }
                (true, None) => "equilibrium confirmed, random outcome".to_string(),
                (false, _) => "not an equilibrium".to_string(),
            };
            let _ = writeln!(out, "verdict: {summary}");
        }
    }
    Ok((out, EXIT_OK))
}

fn convert(input: &str, to: Format, output: Option<&str>) -> CliResult<(String, u8)> {
    let (resolved, text) = read_text(input)?;
    let loaded = load_text(input, &text, is_json(&resolved, &text))?;
    let rendered = match to {
        Format::Scn => loaded.scenario.file.to_scn(),
        Format::Json => loaded.scenario.file.to_json(),
    };
    match output {
        None => Ok((rendered, EXIT_OK)),
        Some(path) => {
            std::fs::write(path, rendered)
                .map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))?;
            Ok((String::new(), EXIT_OK))
        }
    }
}
