//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use nashimpl::engine::{
    run_algorithmic_mechanism, run_quantum_mechanism, AlgorithmInput, Card, QuantumStrategy,
    Setting,
};
use nashimpl::fixtures::{table1, table1_utilities, table1_witness};
use nashimpl::mechanism::{
    best_response, dispatch, enumerate_nash, outcome_g, strategy_space, Message, MrRule,
    UtilityTable,
};
use nashimpl::quantum::{
    collapse_distribution, dense, entangler_matrix, final_state, strategy_matrix, Basis, Entangler,
    LocalOp,
};
use nashimpl::scr::{
    search_mu2, verify_mu2, Agent, Environment, Mu2Witness, Outcome, OutcomeSet, Profile, Scr,
    SearchLimits,
};

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

// ---------------------------------------------------------------------------
// Quantum oracle: matrices written out from their formulas.

pub fn oracle_omega(xi: f64, phi: f64) -> [[C; 2]; 2] {
    let (h, e) = (xi / 2.0, C::from_polar(1.0, phi));
    [
        [e * h.cos(), c(0.0, h.sin())],
        [c(0.0, h.sin()), e.conj() * h.cos()],
    ]
}

pub fn oracle_j(gamma: f64) -> [[C; 4]; 4] {
    let (co, si) = ((gamma / 2.0).cos(), (gamma / 2.0).sin());
    let mut m = [[c(0.0, 0.0); 4]; 4];
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = c(co, 0.0);
        row[3 - k] = c(0.0, si);
    }
    m
}

fn mat_vec<const N: usize>(m: &[[C; N]; N], v: &[C; N]) -> [C; N] {
    let mut out = [c(0.0, 0.0); N];
    for i in 0..N {
        for k in 0..N {
            out[i] += m[i][k] * v[k];
        }
    }
    out
}

/// `J†(ω1 ⊗ ω2)J|CC⟩`, one factor at a time.
pub fn oracle_final(gamma: f64, a: LocalOp, b: LocalOp) -> [C; 4] {
    let j = oracle_j(gamma);
    let (w1, w2) = (oracle_omega(a.xi, a.phi), oracle_omega(b.xi, b.phi));
    let start = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let psi1 = mat_vec(&j, &start);
    let mut psi2 = [c(0.0, 0.0); 4];
    for (i, out) in psi2.iter_mut().enumerate() {
        for (k, amp) in psi1.iter().enumerate() {
            *out += w1[i / 2][k / 2] * w2[i % 2][k % 2] * amp;
        }
    }
    let mut jt = [[c(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            jt[i][k] = j[k][i].conj();
        }
    }
    mat_vec(&jt, &psi2)
}

pub fn op_strategy() -> impl Strategy<Value = LocalOp> {
    (0.0..=PI, 0.0..=FRAC_PI_2).prop_map(|(xi, phi)| LocalOp { xi, phi })
}

pub fn gamma_strategy() -> impl Strategy<Value = f64> {
    0.0..=FRAC_PI_2
}

pub fn check_unitarity(gamma: f64, op: LocalOp) -> Result<(), TestCaseError> {
    let w = strategy_matrix(op).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let j = entangler_matrix(Entangler::new(gamma).unwrap()).unwrap();
    prop_assert!(dense::unitarity_defect(&w) < 1e-12);
    prop_assert!(dense::unitarity_defect(&j) < 1e-12);
    Ok(())
}

pub fn check_state_routes(gamma: f64, a: LocalOp, b: LocalOp) -> Result<(), TestCaseError> {
    let e = Entangler::new(gamma).unwrap();
    let fast = final_state(e, a, b).unwrap();
    let slow = dense::final_state(
        &entangler_matrix(e).unwrap(),
        &strategy_matrix(a).unwrap(),
        &strategy_matrix(b).unwrap(),
    );
    let oracle = oracle_final(gamma, a, b);
    prop_assert!((fast.norm_sqr() - 1.0).abs() < 1e-12);
    let d = collapse_distribution(&fast).unwrap();
    prop_assert!((d.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    for k in 0..4 {
        prop_assert!((fast.amplitudes[k] - slow.amplitudes[k]).norm() < 1e-12);
        prop_assert!((fast.amplitudes[k] - oracle[k]).norm() < 1e-12);
    }
    Ok(())
}

/// At γ = 0 each coin is flipped independently with probability `sin²(ξ/2)`.
pub fn check_classical_limit(a: LocalOp, b: LocalOp) -> Result<(), TestCaseError> {
    let d =
        collapse_distribution(&final_state(Entangler::new(0.0).unwrap(), a, b).unwrap()).unwrap();
    let flip = |op: LocalOp| (op.xi / 2.0).sin().powi(2);
    let (p, q) = (flip(a), flip(b));
    let want = [(1.0 - p) * (1.0 - q), (1.0 - p) * q, p * (1.0 - q), p * q];
    for k in 0..4 {
        prop_assert!((d.probabilities[k] - want[k]).abs() < 1e-12);
    }
    Ok(())
}

/// With both agents restricted to `I` and `D` the collapse is deterministic
/// and equals the classical flip pattern, at every γ.
pub fn check_restriction(gamma: f64, flips: (bool, bool)) -> Result<(), TestCaseError> {
    let op = |f: bool| if f { LocalOp::D } else { LocalOp::I };
    let d = collapse_distribution(
        &final_state(Entangler::new(gamma).unwrap(), op(flips.0), op(flips.1)).unwrap(),
    )
    .unwrap();
    let want = match flips {
        (false, false) => Basis::CC,
        (false, true) => Basis::CD,
        (true, false) => Basis::DC,
        (true, true) => Basis::DD,
    };
    prop_assert!(
        (d.probability(want) - 1.0).abs() < 1e-12,
        "{:?} at γ={}: {:?}",
        flips,
        gamma,
        d
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// Mechanism oracle: rules (1)-(6) restated.

pub fn oracle_g(w: &Mu2Witness, s1: &Message, s2: &Message) -> Outcome {
    let compromise = || w.e(s2.a, s2.theta, s1.a, s1.theta).unwrap();
    if s1.a == s2.a && s1.theta == s2.theta {
        return s1.a;
    }
    let (n1, n2) = (s1.n, s2.n);
    if n1 == 0 && n2 == 0 {
        compromise()
    } else if n1 > 0 && n2 == 0 {
        if w.c(Agent::One, s2.a, s2.theta).unwrap().contains(s1.b) {
            s1.b
        } else {
            compromise()
        }
    } else if n2 > 0 && n1 == 0 {
        if w.c(Agent::Two, s1.a, s1.theta).unwrap().contains(s2.b) {
            s2.b
        } else {
            compromise()
        }
    } else if n1 >= n2 {
        s1.b
    } else {
        s2.b
    }
}

/// Pure equilibrium outcomes by plain double loops; deviations range over
/// integers up to `n_cap + 1`.
pub fn oracle_equilibrium_outcomes(
    env: &Environment,
    f: &Scr,
    w: &Mu2Witness,
    u: &UtilityTable,
    t: Profile,
    n_cap: u32,
) -> (BTreeSet<usize>, usize) {
    let space = strategy_space(env, f, w, n_cap);
    let wide = strategy_space(env, f, w, n_cap + 1);
    let mut outcomes = BTreeSet::new();
    let mut pairs = 0;
    for s1 in &space {
        for s2 in &space {
            pairs += 1;
            let g = oracle_g(w, s1, s2);
            let u1 = u.get(Agent::One, t, g);
            let u2 = u.get(Agent::Two, t, g);
            let stable1 = wide
                .iter()
                .all(|d| u.get(Agent::One, t, oracle_g(w, d, s2)) <= u1);
            let stable2 = wide
                .iter()
                .all(|d| u.get(Agent::Two, t, oracle_g(w, s1, d)) <= u2);
            if stable1 && stable2 {
                outcomes.insert(g.0);
            }
        }
    }
    (outcomes, pairs)
}

pub fn table1_message_strategy() -> impl Strategy<Value = (Message, Message)> {
    let (env, f) = table1();
    let w = table1_witness(&env);
    let msgs = strategy_space(&env, &f, &w, 0);
    let pick = proptest::sample::select(msgs);
    (pick.clone(), pick, 0u32..1_000_000, 0u32..1_000_000).prop_map(|(mut a, mut b, n1, n2)| {
        a.n = n1 % 13;
        b.n = n2 % 13;
        if n1 % 5 == 0 {
            a.n = n1;
        }
        if n2 % 5 == 0 {
            b.n = n2;
        }
        (a, b)
    })
}

fn rule_expected(s1: &Message, s2: &Message) -> MrRule {
    if (s1.a, s1.theta) == (s2.a, s2.theta) {
        MrRule::Agreement
    } else if s1.n == 0 && s2.n == 0 {
        MrRule::Compromise
    } else if s2.n == 0 {
        MrRule::Agent1Challenge
    } else if s1.n == 0 {
        MrRule::Agent2Challenge
    } else if s1.n >= s2.n {
        MrRule::Agent1Integer
    } else {
        MrRule::Agent2Integer
    }
}

/// Exactly one rule fires, and the outcome matches the restated rules.
pub fn check_dispatch_total(s1: &Message, s2: &Message) -> Result<(), TestCaseError> {
    let (env, f) = table1();
    let w = table1_witness(&env);
    let rule = dispatch(s1, s2);
    prop_assert_eq!(rule, rule_expected(s1, s2));
    let g = outcome_g(&w, &f, s1, s2).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(g, oracle_g(&w, s1, s2));
    Ok(())
}

/// Replacing an integer by the smallest member of its class leaves the
/// outcome unchanged; best responses are already reached within `n_opp + 1`.
pub fn check_integer_classes(s1: &Message, s2: &Message) -> Result<(), TestCaseError> {
    let (env, f) = table1();
    let w = table1_witness(&env);
    let u = table1_utilities(&env);
    let rep = |n: u32, other: u32| -> u32 {
        match (n, other) {
            (0, _) => 0,
            (_, 0) => 1,
            (n, o) if n >= o => o,
            _ => 1,
        }
    };
    let g = outcome_g(&w, &f, s1, s2).unwrap();
    let mut r1 = *s1;
    r1.n = rep(s1.n, s2.n);
    prop_assert_eq!(outcome_g(&w, &f, &r1, s2).unwrap(), g);
    let mut r2 = *s2;
    r2.n = if s2.n == 0 {
        0
    } else if s1.n == 0 {
        1
    } else if s2.n > s1.n {
        s1.n + 1
    } else {
        1
    };
    prop_assert_eq!(outcome_g(&w, &f, s1, &r2).unwrap(), g);
    if s2.n <= 12 {
        for t in env.profiles() {
            let (best, _) = best_response(&env, &f, &w, &u, Agent::One, t, s2).unwrap();
            let mut best_wide = f64::NEG_INFINITY;
            let ns = (0..=s2.n + 1).chain([s2.n + 2, s2.n + 50, u32::MAX]);
            for n in ns {
                for m in strategy_space(&env, &f, &w, 0) {
                    let m = Message { n, ..m };
                    best_wide =
                        best_wide.max(u.get(Agent::One, t, outcome_g(&w, &f, &m, s2).unwrap()));
                }
            }
            prop_assert_eq!(best, best_wide);
        }
    }
    Ok(())
}

pub fn check_affine_invariance(scale: [f64; 2], shift: [f64; 2]) -> Result<(), TestCaseError> {
    let (env, f) = table1();
    let w = table1_witness(&env);
    let u = table1_utilities(&env);
    let v = u
        .rescaled(Agent::One, scale[0], shift[0])
        .unwrap()
        .rescaled(Agent::Two, scale[1], shift[1])
        .unwrap();
    for t in env.profiles() {
        let a = enumerate_nash(&env, &f, &w, &u, t, 2).unwrap();
        let b = enumerate_nash(&env, &f, &w, &v, t, 2).unwrap();
        prop_assert_eq!(a.outcomes, b.outcomes);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Random small environments and a brute-force condition oracle.

/// `levels[j][t][a]`: depth of `a` in agent `j`'s order at `t`; equal depth
/// means indifference.
#[derive(Clone, Debug)]
pub struct RawEnv {
    pub n: usize,
    pub levels: [Vec<Vec<usize>>; 2],
    pub f: Vec<u64>,
}

impl RawEnv {
    pub fn build(&self) -> (Environment, Scr) {
        let outcomes: Vec<String> = (0..self.n).map(|i| format!("x{i}")).collect();
        let profiles: Vec<String> = (0..self.f.len()).map(|i| format!("s{i}")).collect();
        let rankings = self.levels.clone().map(|per_profile| {
            per_profile
                .iter()
                .map(|lv| {
                    let mut depths: Vec<usize> = lv.clone();
                    depths.sort_unstable();
                    depths.dedup();
                    depths
                        .iter()
                        .map(|d| {
                            (0..self.n)
                                .filter(|&a| lv[a] == *d)
                                .map(|a| format!("x{a}"))
                                .collect()
                        })
                        .collect::<Vec<Vec<String>>>()
                })
                .collect::<Vec<_>>()
        });
        let env = Environment::new(outcomes, profiles, rankings).unwrap();
        let f = Scr::new(
            &env,
            self.f.iter().map(|&m| OutcomeSet::from_bits(m)).collect(),
        )
        .unwrap();
        (env, f)
    }

    fn weakly(&self, j: usize, t: usize, x: usize, y: usize) -> bool {
        self.levels[j][t][x] <= self.levels[j][t][y]
    }

    fn maximal(&self, j: usize, set: u64, t: usize) -> u64 {
        let members: Vec<usize> = (0..self.n).filter(|a| set >> a & 1 == 1).collect();
        members
            .iter()
            .filter(|&&x| members.iter().all(|&y| self.weakly(j, t, x, y)))
            .fold(0, |acc, &x| acc | 1 << x)
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (t, &m) in self.f.iter().enumerate() {
            for a in 0..self.n {
                if m >> a & 1 == 1 {
                    out.push((a, t));
                }
            }
        }
        out
    }

    /// Rules (i)-(iii) and the a-max requirement for one choice of C sets
    /// (`cs[j][k]` belongs to the k-th pair), with `B = A`.
    fn mu_holds(&self, cs: &[Vec<u64>; 2]) -> bool {
        let full = (1u64 << self.n) - 1;
        let pairs = self.pairs();
        for (k, &(a, t)) in pairs.iter().enumerate() {
            for set in [cs[0][k], cs[1][k]] {
                if set >> a & 1 == 0 {
                    return false;
                }
            }
            for j in 0..2 {
                if self.maximal(j, cs[j][k], t) >> a & 1 == 0 {
                    return false;
                }
            }
        }
        for (ts, &ft) in self.f.iter().enumerate() {
            for (k, &(a, _)) in pairs.iter().enumerate() {
                let m = self.maximal(0, cs[0][k], ts) & self.maximal(1, cs[1][k], ts);
                if m >> a & 1 == 1 && ft >> a & 1 == 0 {
                    return false;
                }
                for j in 0..2 {
                    let m = self.maximal(j, cs[j][k], ts) & self.maximal(1 - j, full, ts);
                    if m & !ft != 0 {
                        return false;
                    }
                }
            }
            if self.maximal(0, full, ts) & self.maximal(1, full, ts) & !ft != 0 {
                return false;
            }
        }
        true
    }

    fn compromise_exists(&self, c1: u64, c2: u64) -> bool {
        (0..self.n).filter(|e| (c1 & c2) >> e & 1 == 1).any(|e| {
            self.f.iter().enumerate().all(|(ts, &ft)| {
                let m = self.maximal(0, c1, ts) & self.maximal(1, c2, ts);
                m >> e & 1 == 0 || ft >> e & 1 == 1
            })
        })
    }

    /// Whether some witness with `B = A` exists, by enumerating every choice
    /// of C sets. Compromise outcomes are chosen independently per tuple.
    pub fn oracle_exists(&self) -> bool {
        let pairs = self.pairs();
        let slots = 2 * pairs.len();
        let options: Vec<Vec<u64>> = (0..slots)
            .map(|s| {
                let (a, _) = pairs[s % pairs.len()];
                (0..1u64 << self.n).filter(|m| m >> a & 1 == 1).collect()
            })
            .collect();
        let mut idx = vec![0usize; slots];
        loop {
            let cs = [
                (0..pairs.len())
                    .map(|k| options[k][idx[k]])
                    .collect::<Vec<_>>(),
                (0..pairs.len())
                    .map(|k| options[pairs.len() + k][idx[pairs.len() + k]])
                    .collect::<Vec<_>>(),
            ];
            if self.mu_holds(&cs)
                && (0..pairs.len())
                    .all(|x| (0..pairs.len()).all(|y| self.compromise_exists(cs[0][x], cs[1][y])))
            {
                return true;
            }
            let mut s = 0;
            loop {
                if s == slots {
                    return false;
                }
                idx[s] += 1;
                if idx[s] < options[s].len() {
                    break;
                }
                idx[s] = 0;
                s += 1;
            }
        }
    }

    /// Checks a witness against the definitions, independently of the library.
    pub fn oracle_accepts(&self, w: &Mu2Witness) -> bool {
        let pairs = self.pairs();
        let get =
            |j: Agent, (a, t): (usize, usize)| w.c(j, Outcome(a), Profile(t)).map(|s| s.bits());
        let mut cs = [Vec::new(), Vec::new()];
        for &p in &pairs {
            match (get(Agent::One, p), get(Agent::Two, p)) {
                (Some(x), Some(y)) => {
                    cs[0].push(x);
                    cs[1].push(y);
                }
                _ => return false,
            }
        }
        if w.b_set.bits() != (1u64 << self.n) - 1 || !self.mu_holds(&cs) {
            return false;
        }
        for (x, &(a, t)) in pairs.iter().enumerate() {
            for (y, &(b, p)) in pairs.iter().enumerate() {
                let Some(e) = w.e(Outcome(a), Profile(t), Outcome(b), Profile(p)) else {
                    return false;
                };
                let (c1, c2) = (cs[0][x], cs[1][y]);
                if (c1 & c2) >> e.0 & 1 == 0 {
                    return false;
                }
                let bad = self.f.iter().enumerate().any(|(ts, &ft)| {
                    let m = self.maximal(0, c1, ts) & self.maximal(1, c2, ts);
                    m >> e.0 & 1 == 1 && ft >> e.0 & 1 == 0
                });
                if bad {
                    return false;
                }
            }
        }
        true
    }
}

/// `|A| ∈ 2..=4`, `|Θ| ∈ 1..=2`, arbitrary weak orders. f(θ) is a singleton
/// when `|A| = 4` and has at most two members otherwise, which keeps the
/// oracle's enumeration small.
pub fn raw_env_strategy() -> impl Strategy<Value = RawEnv> {
    (2usize..=4, 1usize..=2).prop_flat_map(|(n, np)| {
        let order = proptest::collection::vec(0..n, n);
        let levels = (
            proptest::collection::vec(order.clone(), np),
            proptest::collection::vec(order, np),
        );
        let max_f = if n == 4 { 1 } else { 2 };
        let f_sets: Vec<u64> = (1u64..1 << n)
            .filter(|m| m.count_ones() as usize <= max_f)
            .collect();
        let f = proptest::collection::vec(proptest::sample::select(f_sets), np);
        (levels, f).prop_map(move |((l1, l2), f)| RawEnv {
            n,
            levels: [l1, l2],
            f,
        })
    })
}

pub fn check_search_round_trip(raw: &RawEnv) -> Result<(), TestCaseError> {
    let (env, f) = raw.build();
    let found = search_mu2(&env, &f, None, SearchLimits::default()).unwrap();
    let exists = raw.oracle_exists();
    match found {
        Some(w) => {
            prop_assert!(
                verify_mu2(&env, &f, &w).satisfied,
                "search returned a failing witness"
            );
            prop_assert!(
                raw.oracle_accepts(&w),
                "oracle rejects the returned witness"
            );
            prop_assert!(exists);
        }
        None => prop_assert!(!exists, "search missed a witness the oracle found"),
    }
    Ok(())
}

pub fn check_maximal_sets(raw: &RawEnv, mask: u64) -> Result<(), TestCaseError> {
    let (env, _) = raw.build();
    let set = OutcomeSet::from_bits(mask & ((1 << raw.n) - 1));
    for j in Agent::ALL {
        for t in env.profiles() {
            if set.is_empty() {
                prop_assert!(env.maximal_set(j, set, t).is_err());
                continue;
            }
            let m = env.maximal_set(j, set, t).unwrap();
            prop_assert!(!m.is_empty() && m.is_subset(set));
            prop_assert_eq!(env.maximal_set(j, m, t).unwrap(), m);
            for x in m.iter() {
                for y in set.iter() {
                    prop_assert!(env.weakly_prefers(j, t, x, y));
                }
            }
            prop_assert_eq!(m.bits(), raw.maximal(j.index(), set.bits(), t.0));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Runs of the two mechanisms.

pub fn table1_run_inputs() -> impl Strategy<Value = ([AlgorithmInput; 2], u64, usize)> {
    let (env, f) = table1();
    let w = table1_witness(&env);
    let msgs = strategy_space(&env, &f, &w, 3);
    let input = move || {
        let card = (
            proptest::sample::select(msgs.clone()),
            proptest::sample::select(msgs.clone()),
        )
            .prop_map(|(a, b)| Card::new(a, b));
        (op_strategy(), card).prop_map(|(op, card)| AlgorithmInput {
            xi: op.xi,
            phi: op.phi,
            card,
        })
    };
    ([input(), input()], any::<u64>(), 0usize..2)
}

pub fn check_mechanisms_agree(
    inputs: &[AlgorithmInput; 2],
    seed: u64,
    profile: usize,
) -> Result<(), TestCaseError> {
    let (env, f) = table1();
    let w = table1_witness(&env);
    let u = table1_utilities(&env);
    let setting = Setting::new(&env, &f, &w, &u);
    let t = Profile(profile);
    let strategies = inputs.map(|i| QuantumStrategy {
        op: LocalOp {
            xi: i.xi,
            phi: i.phi,
        },
        card: i.card,
    });
    let q = run_quantum_mechanism(&setting, t, &strategies, FRAC_PI_2, seed).unwrap();
    let a = run_algorithmic_mechanism(&setting, t, inputs, seed).unwrap();
    prop_assert_eq!(&q, &a);
    prop_assert_eq!(
        run_quantum_mechanism(&setting, t, &strategies, FRAC_PI_2, seed).unwrap(),
        q
    );
    Ok(())
}
