use std::path::Path;
use std::time::Duration;

use zeus_core::check::{check_equiv, Verdict};
use zeus_core::formulagen::GenConfig;
use zeus_core::frontend::{load, merge_envs, Instantiation};
use zeus_core::smt::{Solver, SolverConfig, DEFAULT_SOLVER};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)).unwrap()
}

fn check_files(a: &str, b: &str, entry: &str) -> Verdict {
    let inst = Instantiation::new();
    let ta = load(&fixture(a), entry, &inst).unwrap();
    let tb = load(&fixture(b), entry, &inst).unwrap();
    assert_eq!(ta.ty, tb.ty);
    let env = merge_envs(&ta.env, &tb.env).unwrap();
    let solver = Solver::new(SolverConfig::from_command_line(DEFAULT_SOLVER, Duration::from_secs(5)), 1);
    let out = check_equiv(&ta.expr, &tb.expr, &ta.ty, &env, &GenConfig::default(), &solver);
    eprintln!("{}\n{:?}\n{}", out.formula, out.solver, out.script);
    out.verdict
}

#[test]
fn add_opt_pair_is_equivalent() {
    assert_eq!(check_files("add_opt_a.sml", "add_opt_b.sml", "add_opt"), Verdict::Equivalent);
}

#[test]
fn add_opt_mutant_not_proven() {
    assert_eq!(check_files("add_opt_a.sml", "add_opt_none.sml", "add_opt"), Verdict::NotProven);
}

#[test]
fn nested_call_not_abstracted() {
    assert_eq!(check_files("double_call.sml", "two_times.sml", "g"), Verdict::NotProven);
}

#[test]
fn reflexivity_on_files() {
    assert_eq!(check_files("add_opt_b.sml", "add_opt_b.sml", "add_opt"), Verdict::Equivalent);
}
