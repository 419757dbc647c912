use std::time::Duration;

use zeus_core::cluster::{cluster, ClusterConfig, Submission};
use zeus_core::generate::synthetic_corpus;
use zeus_core::smt::{Solver, SolverConfig, DEFAULT_SOLVER};

#[test]
fn synthetic_corpus_recovers_seed_classes() {
    let (corpus, ty, env) = synthetic_corpus(10, 2024);
    let subs: Vec<Submission> = corpus.into_iter().map(|(id, expr)| Submission { id, expr, ty: ty.clone() }).collect();
    let solver = Solver::new(SolverConfig::from_command_line(DEFAULT_SOLVER, Duration::from_secs(10)), 4);
    let report = cluster(&subs, Vec::new(), &env, &solver, &ClusterConfig::default());
    for c in &report.log {
        if c.verdict != zeus_core::check::Verdict::Equivalent
            && c.candidate.split('/').next() == c.against.split('/').next()
        {
            eprintln!("missed {} vs {}: {:?}", c.candidate, c.against, c.solver);
        }
    }
    let ids: Vec<Vec<String>> = report.classes.clone();
    eprintln!("{ids:?}");
    assert_eq!(report.classes.len(), 5);
    assert!(report.comparisons_performed <= 250);
}
