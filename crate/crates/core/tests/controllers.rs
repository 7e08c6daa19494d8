use std::path::Path;

use golog_synth::controller::{check_selection, Controller, ControllerFile};
use golog_synth::game::{solve, SolveOptions, Verdict};
use golog_synth::simulate::{simulate, SimOptions};
use golog_synth::Problem;

fn fixtures() -> Vec<(String, Problem)> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut out = Vec::new();
    for dir in [root.clone(), root.join("suite")] {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "tgs") {
                let src = std::fs::read_to_string(&path).unwrap();
                out.push((path.display().to_string(), Problem::from_source(&src).unwrap()));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[test]
fn controllable_fixtures_yield_sound_controllers() {
    let mut controllable = 0;
    for (name, problem) in fixtures() {
        let sol = solve(&problem, SolveOptions::default()).unwrap();
        if sol.verdict != Verdict::Controllable {
            assert!(sol.witness.is_some(), "{name}: no witness");
            continue;
        }
        controllable += 1;
        check_selection(&problem, &sol).unwrap_or_else(|e| panic!("{name}: {e}"));
        let c = Controller::from_solution(&sol).unwrap();
        c.validate(&problem).unwrap_or_else(|e| panic!("{name}: {e}"));
        let report = simulate(&problem, &c, SimOptions::default()).unwrap();
        assert!(report.is_clean(), "{name}: {report:?}");
        assert_eq!(report.plays, 100);
    }
    assert!(controllable >= 10, "{controllable}");
}

#[test]
fn controller_files_round_trip() {
    for (name, problem) in fixtures() {
        let sol = solve(&problem, SolveOptions::default()).unwrap();
        let Some(c) = Controller::from_solution(&sol) else { continue };
        let file = c.to_file(&problem, sol.verdict).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        let back: ControllerFile = serde_json::from_str(&text).unwrap();
        let c2 = Controller::from_file(&problem, &back).unwrap();
        c2.validate(&problem).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(serde_json::to_string(&c2.to_file(&problem, sol.verdict).unwrap()).unwrap(), text, "{name}");
    }
}
