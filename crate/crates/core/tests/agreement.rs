use golog_synth::game::{solve, SolveOptions, Verdict};
use golog_synth::oracle::{brute_solve, OracleOptions, OracleVerdict};
use golog_synth::Problem;
use proptest::prelude::*;

const ACTIONS: [&str; 3] = ["go", "stop", "env"];
const PRES: [&str; 4] = ["true", "!p", "p", "!q"];
const GUARDS: [&str; 5] = ["true", "c <= 1", "c >= 1", "c = 1", "c < 2"];
const SSAS: [&str; 3] = ["a = ACT | p", "a = ACT", "p & !(a = ACT)"];
const SPECS: [&str; 6] = ["F<=1 p", "F q", "F (p & F<=1 q)", "G<=1 !p", "F[1,2] (p & !q)", "!p U q"];
const PROGRAMS: [&str; 6] =
    ["go; stop", "go | env", "go || env", "(go | stop); env", "env; (go | stop)", "?!p; go; stop || env"];

fn source(
    pres: [usize; 3],
    guards: [usize; 3],
    ssa: (usize, usize),
    resets: [bool; 3],
    spec: usize,
    prog: usize,
) -> String {
    let mut s = String::from("fluents { p; q; }\nclocks { c; }\n");
    for (i, name) in ACTIONS.iter().enumerate() {
        let owner = if *name == "env" { "environment" } else { "controllable" };
        s += &format!("action {name} {owner} {{ pre: {}; guard: {}; }}\n", PRES[pres[i]], GUARDS[guards[i]]);
    }
    s += &format!("ssa p := {};\n", SSAS[ssa.0].replace("ACT", ACTIONS[ssa.1 % 3]));
    s += "ssa q := a = stop | q;\n";
    let r: Vec<String> = ACTIONS.iter().zip(resets).filter(|x| x.1).map(|(n, _)| format!("a = {n}")).collect();
    s += &format!("reset c := {};\n", if r.is_empty() { "false".into() } else { r.join(" | ") });
    s += &format!("init {{ }}\nprogram {{ {} }}\nspec_bad {{ {} }}\n", PROGRAMS[prog], SPECS[spec]);
    s
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn solver_agrees_with_brute_force(
        pres in prop::array::uniform3(0usize..PRES.len()),
        guards in prop::array::uniform3(0usize..GUARDS.len()),
        ssa in (0usize..SSAS.len(), 0usize..3),
        resets in prop::array::uniform3(any::<bool>()),
        spec in 0usize..SPECS.len(),
        prog in 0usize..PROGRAMS.len(),
    ) {
        let src = source(pres, guards, ssa, resets, spec, prog);
        let problem = Problem::from_source(&src).unwrap();
        let solved = solve(&problem, SolveOptions::default()).unwrap().verdict;
        let opts = OracleOptions { depth: 6, denominator: 4, max_histories: 200_000, ..OracleOptions::default() };
        let expected = match brute_solve(&problem, opts) {
            Ok(r) if r.verdict == OracleVerdict::Controllable => Verdict::Controllable,
            Ok(r) if r.verdict == OracleVerdict::Uncontrollable => Verdict::Uncontrollable,
            _ => return Ok(()),
        };
        prop_assert_eq!(solved, expected, "{}", src);
    }
}
