//! The Pareto-inefficient two-profile example and its μ2 witness, built in
//! code. The same data ships as `fixtures/table1.scn`.

use crate::mechanism::UtilityTable;
use crate::scr::{Agent, Environment, Mu2Witness, Scr};

/// Text of the shipped scenario file.
pub const TABLE1_SCN: &str = include_str!("../fixtures/table1.scn");

/// Expected values for the full pipeline on [`TABLE1_SCN`], one `key = value`
/// per line.
pub const TABLE1_EXPECTED: &str = include_str!("../fixtures/table1.expected");

/// Four outcomes `a1..a4`, two profiles `t1, t2`, `f(t1)={a1}`, `f(t2)={a2}`.
pub fn table1() -> (Environment, Scr) {
    let env = Environment::strict(
        &["a1", "a2", "a3", "a4"],
        &["t1", "t2"],
        [
            &[&["a3", "a1", "a2", "a4"], &["a4", "a1", "a2", "a3"]],
            &[&["a2", "a1", "a4", "a3"], &["a3", "a1", "a2", "a4"]],
        ],
    )
    .expect("fixture environment is valid");
    let f = Scr::from_labels(&env, &[&["a1"], &["a2"]]).expect("fixture rule is valid");
    (env, f)
}

/// `B = A`, `C_j(a, θ) = L_j(a, θ)` and the hand-picked compromise outcomes
/// `e(a1,t1,a1,t1)=a1`, `e(a1,t1,a2,t2)=a4`, `e(a2,t2,a1,t1)=a3`,
/// `e(a2,t2,a2,t2)=a2`.
pub fn table1_witness(env: &Environment) -> Mu2Witness {
    let o = |l: &str| env.outcome(l).expect("fixture label");
    let p = |l: &str| env.profile(l).expect("fixture label");
    let set = |ls: &[&str]| ls.iter().map(|l| o(l)).collect();
    let mut w = Mu2Witness {
        b_set: env.all_outcomes(),
        ..Default::default()
    };
    w.c_sets
        .insert((Agent::One, o("a1"), p("t1")), set(&["a1", "a2", "a4"]));
    w.c_sets
        .insert((Agent::Two, o("a1"), p("t1")), set(&["a1", "a3", "a4"]));
    w.c_sets
        .insert((Agent::One, o("a2"), p("t2")), set(&["a2", "a3"]));
    w.c_sets
        .insert((Agent::Two, o("a2"), p("t2")), set(&["a2", "a4"]));
    w.e_map
        .insert((o("a1"), p("t1"), o("a1"), p("t1")), o("a1"));
    w.e_map
        .insert((o("a1"), p("t1"), o("a2"), p("t2")), o("a4"));
    w.e_map
        .insert((o("a2"), p("t2"), o("a1"), p("t1")), o("a3"));
    w.e_map
        .insert((o("a2"), p("t2"), o("a2"), p("t2")), o("a2"));
    w
}

/// Cardinal utilities 5 > 3 > 1 > 0 down each ranking. At `t2` these give the
/// reference payoffs `$CC=3, $CD=5, $DC=0, $DD=1` for either agent.
pub fn table1_utilities(env: &Environment) -> UtilityTable {
    let scores = [5.0, 3.0, 1.0, 0.0];
    let mut values = [vec![vec![0.0; 4]; 2], vec![vec![0.0; 4]; 2]];
    for j in Agent::ALL {
        for t in env.profiles() {
            for (depth, class) in env.ranking(j, t).classes().iter().enumerate() {
                for a in class.iter() {
                    values[j.index()][t.0][a.0] = scores[depth];
                }
            }
        }
    }
    UtilityTable::new(env, values).expect("fixture utilities are ordinal")
}
