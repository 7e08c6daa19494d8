use num_rational::Rational64;
use proptest::prelude::*;

use super::*;
use crate::mtl::Interval;

const ROBOT: &str = include_str!("../../tests/fixtures/robot_camera.tgs");

fn fixture_with(from: &str, to: &str) -> String {
    let s = ROBOT.replace(from, to);
    assert_ne!(s, ROBOT, "replacement `{from}` did not apply");
    s
}

fn parse_err(src: &str) -> ParseError {
    parse_spec(src).expect_err("expected a parse error")
}

#[test]
fn parses_robot_camera() {
    let spec = parse_spec(ROBOT).unwrap();
    assert_eq!(spec.actions.len(), 4);
    assert_eq!(spec.fluents.len(), 5);
    assert_eq!(spec.ssas.len(), 5);
    assert_eq!(spec.clocks.len(), 1);
    assert_eq!(spec.spec_kind, SpecKind::Bad);
    assert_eq!(spec.actions[3].guard.len(), 1);
    assert_eq!(spec.actions[3].owner, Owner::Controller);
    assert!(matches!(spec.program, ProgramSrc::Conc(..)));
}

#[test]
fn missing_ownership_tag_is_located() {
    let src = fixture_with("action start_cam controllable {", "action start_cam {");
    let e = parse_err(&src);
    assert!(e.message.contains("ownership"), "{e}");
    let line = src.lines().position(|l| l.starts_with("action start_cam")).unwrap() as u32 + 1;
    assert_eq!(e.pos.line, line);
    assert_eq!(e.pos.col, 18);
}

#[test]
fn rejects_poss_in_ssa() {
    let e = parse_err(&fixture_with("ssa cam_on := a = end_cam;", "ssa cam_on := Poss;"));
    assert!(e.message.contains("Poss"), "{e}");
}

#[test]
fn rejects_missing_and_duplicate_axioms() {
    let e = parse_err(&fixture_with("ssa cam_on := a = end_cam;", ""));
    assert!(e.message.contains("no successor-state formula"), "{e}");
    let e = parse_err(&fixture_with("ssa cam_on := a = end_cam;", "ssa cam_on := a = end_cam;\nssa cam_on := false;"));
    assert!(e.message.contains("more than one"), "{e}");
    let e = parse_err(&fixture_with("reset c_cam := a = start_cam;", ""));
    assert!(e.message.contains("no reset formula"), "{e}");
}

#[test]
fn rejects_temporal_guards() {
    let e = parse_err(&fixture_with("guard: c_cam = 1;", "guard: box c_cam = 1;"));
    assert!(e.message.contains("temporal"), "{e}");
}

#[test]
fn rejects_action_variable_in_precondition() {
    let e = parse_err(&fixture_with("pre: grasping(o);", "pre: a = start_cam;"));
    assert!(e.message.contains("action variable"), "{e}");
}

#[test]
fn rejects_arity_and_type_errors() {
    let e = parse_err(&fixture_with("init { obj_at(o1, l1); }", "init { obj_at(o1); }"));
    assert!(e.message.contains("expects 2"), "{e}");
    let e = parse_err(&fixture_with("init { obj_at(o1, l1); }", "init { obj_at(l1, o1); }"));
    assert!(e.message.contains("expected `obj`"), "{e}");
    let e = parse_err(&fixture_with("F<=1 (!cam_on & grasping(o1))", "F<=1 flying"));
    assert!(e.message.contains("unknown fluent"), "{e}");
}

#[test]
fn rejects_unknown_declarations_with_position() {
    let e = parse_err("objects { }\nwidgets { }");
    assert_eq!((e.pos.line, e.pos.col), (2, 1));
}

#[test]
fn spec_good_is_negated() {
    let spec = parse_spec(&fixture_with("spec_bad {", "spec_good {")).unwrap();
    assert_eq!(spec.bad_formula(), Mtl::not(spec.spec.clone()));
}

#[test]
fn fixtures_round_trip() {
    for src in [
        ROBOT,
        include_str!("../../tests/fixtures/camera_persistent.tgs"),
        include_str!("../../tests/fixtures/camera_loop.tgs"),
        include_str!("../../tests/fixtures/grasp_only.tgs"),
    ] {
        let a = parse_spec(src).unwrap();
        let printed = a.to_string();
        let b = parse_spec(&printed).unwrap_or_else(|e| panic!("{e}\n{printed}"));
        assert_eq!(a, b);
        assert_eq!(printed, b.to_string());
    }
}

fn atom(name: &str) -> Mtl<AtomRef> {
    Mtl::Atom(AtomRef { name: name.into(), args: vec![] })
}

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

#[test]
fn interval_syntax() {
    let until = |src: &str| match parse_mtl(src).unwrap() {
        Mtl::Until(i, ..) => i,
        other => panic!("not an until: {other:?}"),
    };
    assert_eq!(until("p U[0,1] q"), Interval::closed(0, 1));
    assert_eq!(until("p U(0,1] q"), Interval { lo: q(0, 1), lo_closed: false, hi: Some(q(1, 1)), hi_closed: true });
    assert_eq!(until("p U[2,inf) q"), Interval { lo: q(2, 1), lo_closed: true, hi: None, hi_closed: false });
    assert_eq!(until("p U<=3/2 q"), Interval { lo: q(0, 1), lo_closed: true, hi: Some(q(3, 2)), hi_closed: true });
    assert_eq!(until("p U q"), Interval::full());
    assert!(parse_mtl("p U[2,1] q").is_err());
    assert!(parse_mtl("p U(1,1] q").is_err());
    assert!(parse_mtl("p U[1,inf] q").is_err());
}

#[test]
fn mtl_precedence() {
    let f = parse_mtl("!a & b | c U d U e").unwrap();
    let expected = Mtl::until(
        Interval::full(),
        Mtl::or(Mtl::and(Mtl::not(atom("a")), atom("b")), atom("c")),
        Mtl::until(Interval::full(), atom("d"), atom("e")),
    );
    assert_eq!(f, expected);
    assert_eq!(parse_mtl("G p").unwrap(), Mtl::not(Mtl::until(Interval::full(), Mtl::True, Mtl::not(atom("p")))));
    assert_eq!(parse_mtl("F (p)").unwrap(), Mtl::until(Interval::full(), Mtl::True, atom("p")));
}

#[test]
fn program_precedence() {
    let p = parse_program("a; b* | c || d; e").unwrap();
    let act = |n: &str| ProgramSrc::Action(AtomRef { name: n.into(), args: vec![] }, Pos::default());
    let expected = ProgramSrc::Choice(
        Box::new(ProgramSrc::Seq(Box::new(act("a")), Box::new(ProgramSrc::Star(Box::new(act("b")))))),
        Box::new(ProgramSrc::Conc(
            Box::new(act("c")),
            Box::new(ProgramSrc::Seq(Box::new(act("d")), Box::new(act("e")))),
        )),
    );
    assert_eq!(p, expected);
}

#[test]
fn timed_word_and_trace_files() {
    let w = parse_timed_word("0: {}\n1/2: {cam_on, obj_at(o1, l1)}\n").unwrap();
    assert_eq!(w.len(), 2);
    assert_eq!(w[1].1, q(1, 2));
    assert_eq!(w[1].0[1].args, vec!["o1".to_string(), "l1".to_string()]);
    let t = parse_action_trace("0.5: start_cam\n1.5: start_grasp(o1, l1)").unwrap();
    assert_eq!(t[1].0.name, "start_grasp");
    assert_eq!(t[1].1, q(3, 2));
}

fn arb_interval() -> impl Strategy<Value = Interval> {
    (0i64..4, 1i64..3, any::<bool>(), any::<bool>(), proptest::option::of(0i64..4)).prop_map(
        |(lo, den, lc, hc, width)| {
            let lo = q(lo, den);
            match width {
                None => Interval { lo, lo_closed: lc, hi: None, hi_closed: false },
                Some(0) => Interval { lo, lo_closed: true, hi: Some(lo), hi_closed: true },
                Some(w) => Interval { lo, lo_closed: lc, hi: Some(lo + q(w, den)), hi_closed: hc },
            }
        },
    )
}

fn arb_mtl() -> impl Strategy<Value = Mtl<AtomRef>> {
    let leaf =
        prop_oneof![Just(Mtl::True), Just(Mtl::False), prop::sample::select(vec!["p", "q", "r"]).prop_map(atom),];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Mtl::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Mtl::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Mtl::or(a, b)),
            (arb_interval(), inner.clone(), inner).prop_map(|(i, a, b)| Mtl::until(i, a, b)),
        ]
    })
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        prop::sample::select(vec!["p", "q"])
            .prop_map(|n| Formula::Atom(AtomRef { name: n.into(), args: vec!["x".into()] }, Pos::default())),
        Just(Formula::Eq(
            AtomRef { name: "a".into(), args: vec![] },
            AtomRef { name: "go".into(), args: vec!["x".into()] },
            Pos::default()
        )),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let b = |f: Formula| Box::new(f);
        prop_oneof![
            inner.clone().prop_map(move |x| Formula::Not(b(x))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Formula::And(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Formula::Or(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Formula::Implies(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Formula::Iff(b(x), b(y))),
            inner.prop_map(move |x| Formula::Exists(vec![Param { name: "y".into(), ty: "t".into() }], b(x))),
        ]
    })
}

fn arb_program() -> impl Strategy<Value = ProgramSrc> {
    let leaf = prop_oneof![
        Just(ProgramSrc::Nil),
        prop::sample::select(vec!["go", "stop"])
            .prop_map(|n| ProgramSrc::Action(AtomRef { name: n.into(), args: vec![] }, Pos::default())),
        arb_formula().prop_map(ProgramSrc::Test),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let b = |f: ProgramSrc| Box::new(f);
        prop_oneof![
            inner.clone().prop_map(move |x| ProgramSrc::Star(b(x))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| ProgramSrc::Seq(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| ProgramSrc::Choice(b(x), b(y))),
            (inner.clone(), inner).prop_map(move |(x, y)| ProgramSrc::Conc(b(x), b(y))),
        ]
    })
}

proptest! {
    #[test]
    fn mtl_print_parse_round_trip(f in arb_mtl()) {
        let printed = f.to_string();
        prop_assert_eq!(parse_mtl(&printed).unwrap(), f, "{}", printed);
    }

    #[test]
    fn formula_print_parse_round_trip(f in arb_formula()) {
        let printed = f.to_string();
        prop_assert_eq!(parse_formula(&printed).unwrap(), f, "{}", printed);
    }

    #[test]
    fn program_print_parse_round_trip(p in arb_program()) {
        let printed = p.to_string();
        prop_assert_eq!(parse_program(&printed).unwrap(), p, "{}", printed);
    }
}
