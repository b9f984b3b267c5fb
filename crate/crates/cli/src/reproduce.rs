use std::fmt::Write as _;

use nashimpl::engine::{
    candidate_profile, check_lambda_pi2, dollar_payoffs, lambda4_threshold, verify_proposition,
    PropositionVerdict, Setting,
};
use nashimpl::fixtures::{TABLE1_EXPECTED, TABLE1_SCN};
use nashimpl::mechanism::{enumerate_nash, implements_check};
use nashimpl::scenario::Scenario;
use nashimpl::scr::{check_lambda_ordinal, explain_mu2, verify_mu2, Agent};

use crate::commands::{
    fixed, header, load, load_text, read_text, CliError, CliResult, Loaded, EXIT_MISMATCH, EXIT_OK,
};

const GRID: usize = 61;

/// Every value the pipeline checks, as `(key, value)` in a fixed order.
pub fn actual_values(s: &Scenario) -> CliResult<Vec<(String, String)>> {
    let env = &s.env;
    let w = s.require_witness()?;
    let u = s.require_utilities()?;
    let setting = Setting::new(env, &s.f, w, u);
    let mut out: Vec<(String, String)> = Vec::new();
    let mut put = |k: String, v: String| out.push((k, v));

    for t in env.profiles() {
        put(
            format!("scr.{}", env.profile_label(t)),
            env.format_set(s.f.get(t)),
        );
    }
    for (&(j, a, t), &set) in &w.c_sets {
        put(
            format!(
                "witness.c{}.{}.{}",
                j.number(),
                env.outcome_label(a),
                env.profile_label(t)
            ),
            env.format_set(set),
        );
    }
    for (&(a, t, b, p), &e) in &w.e_map {
        put(
            format!(
                "witness.e.{}.{}.{}.{}",
                env.outcome_label(a),
                env.profile_label(t),
                env.outcome_label(b),
                env.profile_label(p)
            ),
            env.outcome_label(e).to_string(),
        );
    }
    for &(a, t, b, p) in w.e_map.keys() {
        if let (Some(c1), Some(c2)) = (w.c(Agent::One, a, t), w.c(Agent::Two, b, p)) {
            put(
                format!(
                    "witness.meet.{}.{}.{}.{}",
                    env.outcome_label(a),
                    env.profile_label(t),
                    env.outcome_label(b),
                    env.profile_label(p)
                ),
                env.format_set(c1.intersection(c2)),
            );
        }
    }
    let checks = explain_mu2(env, &s.f, w)?;
    for (i, c) in checks.iter().enumerate() {
        let scope = c
            .theta_star
            .map(|t| format!(".{}", env.profile_label(t)))
            .unwrap_or_default();
        put(
            format!("mu2.check.{:02}.{}{}", i + 1, c.rule, scope),
            c.render(env),
        );
    }
    let report = verify_mu2(env, &s.f, w);
    put(
        "mu2.verdict".into(),
        if report.satisfied {
            "satisfied"
        } else {
            "violated"
        }
        .into(),
    );

    for t in env.profiles() {
        let eq = enumerate_nash(env, &s.f, w, u, t, 2)?;
        put(
            format!("equilibria.{}.outcomes", env.profile_label(t)),
            env.format_set(eq.outcomes),
        );
        put(
            format!("equilibria.{}.pairs", env.profile_label(t)),
            eq.pairs_examined.to_string(),
        );
    }
    put(
        "equilibria.implemented".into(),
        implements_check(env, &s.f, w, u, 2)?.implements.to_string(),
    );

    for t in env.profiles() {
        let tl = env.profile_label(t);
        let Some(target) = check_lambda_ordinal(env, &s.f, t)? else {
            put(format!("gate.{tl}"), "closed".into());
            continue;
        };
        put(
            format!("gate.{tl}"),
            format!(
                "{},{}",
                env.profile_label(target.0),
                env.outcome_label(target.1)
            ),
        );
        let cards = candidate_profile(&setting, t, target)?.map(|q| q.card);
        for j in Agent::ALL {
            let p = dollar_payoffs(&setting, t, &cards, j)?;
            put(
                format!("payoffs.{tl}.agent{j}"),
                format!("{},{},{},{}", p.cc, p.cd, p.dc, p.dd),
            );
            put(
                format!("payoffs.{tl}.agent{j}.pi2_conditions"),
                check_lambda_pi2(&p).holds().to_string(),
            );
            let threshold = lambda4_threshold(&p)
                .map(|x| fixed(x, 9))
                .unwrap_or_else(|| "none".into());
            put(format!("payoffs.{tl}.agent{j}.threshold_sin2"), threshold);
        }
        for (name, gamma) in [("max", s.gamma), ("sin2_quarter", 0.5f64.asin())] {
            let PropositionVerdict::Quantum(v) = verify_proposition(&setting, t, gamma, GRID)?
            else {
                continue;
            };
            let prefix = format!("proposition.{tl}.{name}");
            if name == "max" {
                put(
                    format!("{prefix}.outcome"),
                    v.outcome
                        .map(|a| env.outcome_label(a).to_string())
                        .unwrap_or("random".into()),
                );
                put(
                    format!("{prefix}.utilities"),
                    format!(
                        "{},{}",
                        fixed(v.equilibrium_utilities[0], 6),
                        fixed(v.equilibrium_utilities[1], 6)
                    ),
                );
                put(format!("{prefix}.outside_f"), v.outside_f.to_string());
                put(
                    format!("{prefix}.unrestricted_equilibrium"),
                    v.unrestricted_equilibrium.to_string(),
                );
            }
            put(
                format!("{prefix}.equilibrium"),
                v.is_equilibrium.to_string(),
            );
            put(
                format!("{prefix}.max_gain"),
                fixed(v.worst_deviation().gain, 6),
            );
            put(format!("{prefix}.consistent"), v.consistent.to_string());
        }
    }
    Ok(out)
}

pub fn parse_expected(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once(" = ") else {
            return Err(CliError::Parse(format!(
                "expected-results line {}: missing ` = `",
                i + 1
            )));
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn command(
    echo: &str,
    scenario: Option<&str>,
    expected: Option<&str>,
    print_actual: bool,
) -> CliResult<(String, u8)> {
    let loaded: Loaded = match scenario {
        Some(path) => load(path)?,
        None => load_text("table1.scn (built in)", TABLE1_SCN, false)?,
    };
    let actual = actual_values(&loaded.scenario)?;
    let mut out = String::new();
    if print_actual {
        for (k, v) in &actual {
            let _ = writeln!(out, "{k} = {v}");
        }
        return Ok((out, EXIT_OK));
    }
    let expected_text = match expected {
        Some(path) => read_text(path)?.1,
        None => TABLE1_EXPECTED.to_string(),
    };
    let expected = parse_expected(&expected_text)?;
    header(&mut out, echo, &loaded, None);
    let mut mismatches = 0;
    for (k, want) in &expected {
        match actual.iter().find(|(ak, _)| ak == k) {
            Some((_, got)) if got == want => {
                let _ = writeln!(out, "ok {k} = {got}");
            }
            Some((_, got)) => {
                mismatches += 1;
                let _ = writeln!(out, "MISMATCH {k}: expected {want}, got {got}");
            }
            None => {
                mismatches += 1;
                let _ = writeln!(out, "MISSING {k}: expected {want}");
            }
        }
    }
    let _ = writeln!(
        out,
        "matched {} of {}",
        expected.len() - mismatches,
        expected.len()
    );
    let _ = writeln!(
        out,
        "verdict: {}",
        if mismatches == 0 {
            "reproduced"
        } else {
            "mismatch"
        }
    );
    Ok((
        out,
        if mismatches == 0 {
            EXIT_OK
        } else {
            EXIT_MISMATCH
        },
    ))
}
