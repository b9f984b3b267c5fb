use super::env::{Agent, Environment, Outcome, Profile, Scr};
use crate::error::Result;

/// `x` is weakly above `y` for both agents at `t` and strictly for one.
pub fn pareto_improves(env: &Environment, t: Profile, x: Outcome, y: Outcome) -> bool {
    Agent::ALL.iter().all(|&j| env.weakly_prefers(j, t, x, y))
        && Agent::ALL.iter().any(|&j| env.strictly_prefers(j, t, x, y))
}

fn indifferent_for_both(env: &Environment, t: Profile, x: Outcome, y: Outcome) -> bool {
    Agent::ALL
        .iter()
        .all(|&j| env.weakly_prefers(j, t, x, y) && env.weakly_prefers(j, t, y, x))
}

/// All `(θ′, a′)` with `θ′ ≠ θ`, `a′ ∈ f(θ′)` that Pareto-improve on some
/// `a ∈ f(θ)` at `θ`, in declared order.
pub fn lambda_candidates(
    env: &Environment,
    f: &Scr,
    t: Profile,
) -> Result<Vec<(Profile, Outcome)>> {
    env.check_profile(t)?;
    let current = f.get(t);
    Ok(env
        .profiles()
        .filter(|&tp| tp != t)
        .flat_map(|tp| f.get(tp).iter().map(move |ap| (tp, ap)))
        .filter(|&(_, ap)| current.iter().any(|a| pareto_improves(env, t, ap, a)))
        .collect())
}

/// The ordinal part of the gate that sends the quantum mechanism into its
/// entangled branch.
///
/// Returns the first candidate `(θ′, a′)` that is weakly Pareto-above every
/// candidate from another profile (strictly for some agent, or indifferent for
/// both), or `None` if no candidate exists or none dominates the rest.
pub fn check_lambda_ordinal(
    env: &Environment,
    f: &Scr,
    t: Profile,
) -> Result<Option<(Profile, Outcome)>> {
    let candidates = lambda_candidates(env, f, t)?;
    Ok(candidates.iter().copied().find(|&(tp, ap)| {
        candidates
            .iter()
            .filter(|&&(tpp, _)| tpp != tp)
            .all(|&(_, app)| {
                pareto_improves(env, t, ap, app) || indifferent_for_both(env, t, ap, app)
            })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::table1;

    #[test]
    fn table1_gate_fires_only_at_t2() {
        let (env, f) = table1();
        let t1 = env.profile("t1").unwrap();
        let t2 = env.profile("t2").unwrap();
        let a1 = env.outcome("a1").unwrap();
        assert_eq!(check_lambda_ordinal(&env, &f, t2).unwrap(), Some((t1, a1)));
        assert_eq!(check_lambda_ordinal(&env, &f, t1).unwrap(), None);
    }

    #[test]
    fn single_profile_has_no_alternative() {
        let env =
            Environment::strict(&["a", "b"], &["t"], [&[&["a", "b"]], &[&["a", "b"]]]).unwrap();
        let f = Scr::from_labels(&env, &[&["b"]]).unwrap();
        assert_eq!(check_lambda_ordinal(&env, &f, Profile(0)).unwrap(), None);
    }

    #[test]
    fn unknown_profile_is_an_error() {
        let (env, f) = table1();
        assert!(check_lambda_ordinal(&env, &f, Profile(7)).is_err());
    }

    #[test]
    fn dominant_alternative_wins_over_earlier_candidate() {
        // at t0 both agents rank c > b > a; f(t1)={b}, f(t2)={c}
        let order: &[&str] = &["c", "b", "a"];
        let env = Environment::strict(
            &["a", "b", "c"],
            &["t0", "t1", "t2"],
            [&[order, order, order], &[order, order, order]],
        )
        .unwrap();
        let f = Scr::from_labels(&env, &[&["a"], &["b"], &["c"]]).unwrap();
        let got = check_lambda_ordinal(&env, &f, Profile(0)).unwrap();
        assert_eq!(got, Some((Profile(2), Outcome(2))));
    }

    #[test]
    fn incomparable_alternatives_block_the_gate() {
        // agent 1 prefers b, agent 2 prefers c; both beat a
        let env = Environment::strict(
            &["a", "b", "c"],
            &["t0", "t1", "t2"],
            [
                &[&["b", "c", "a"], &["b", "c", "a"], &["b", "c", "a"]],
                &[&["c", "b", "a"], &["c", "b", "a"], &["c", "b", "a"]],
            ],
        )
        .unwrap();
        let f = Scr::from_labels(&env, &[&["a"], &["b"], &["c"]]).unwrap();
        assert_eq!(lambda_candidates(&env, &f, Profile(0)).unwrap().len(), 2);
        assert_eq!(check_lambda_ordinal(&env, &f, Profile(0)).unwrap(), None);
    }

    #[test]
    fn ties_break_by_declared_order() {
        let order: &[&str] = &["b", "a"];
        let env = Environment::strict(
            &["a", "b"],
            &["t0", "t1", "t2"],
            [&[order, order, order], &[order, order, order]],
        )
        .unwrap();
        let f = Scr::from_labels(&env, &[&["a"], &["b"], &["b"]]).unwrap();
        assert_eq!(
            check_lambda_ordinal(&env, &f, Profile(0)).unwrap(),
            Some((Profile(1), Outcome(1)))
        );
    }
}
