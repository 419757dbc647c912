//! Semantic conformance checks shared by the property suites and the
//! acceptance run.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zeus_core::dynamics::{eval, match_value, step, EvalResult, IntSampler, MatchResult, OracleConfig, StepResult};
use zeus_core::generate::{option_env, TermConfig, TermGen};
use zeus_core::rewrite::whnf;
use zeus_core::statics::typecheck;
use zeus_core::{Const, Ctor, CtorSig, DataEnv, Expr, Label, Pattern, Type, TypingContext, Var};

pub fn env() -> DataEnv {
    let mut env = option_env();
    env.add_datatype(
        "ilist",
        vec![
            CtorSig { ctor: Ctor::new("Nil"), arg: None },
            CtorSig { ctor: Ctor::new("Cons"), arg: Some(Type::tuple(vec![Type::Int, Type::data("ilist")])) },
        ],
    )
    .unwrap();
    env
}

pub fn closed_term(seed: u64, depth: usize) -> (Expr, Type) {
    let env = env();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = TermGen::new(&env, &mut rng, TermConfig { depth, ..TermConfig::default() });
    let ty = g.ty(2);
    (g.closed(&ty), ty)
}

/// Every well-typed closed term is a value or steps to a term of the same
/// type, along its whole reduction sequence.
pub fn progress_and_preservation(seed: u64) -> Result<(), String> {
    let env = env();
    let (mut e, ty) = closed_term(seed, 4);
    let ctx = TypingContext::new();
    if typecheck(&ctx, &e, &env).as_ref() != Ok(&ty) {
        return Err(format!("generated term {e} is not of type {ty}"));
    }
    for _ in 0..2000 {
        match step(&e) {
            Ok(StepResult::IsValue) => break,
            Ok(StepResult::Stepped(next)) => {
                if typecheck(&ctx, &next, &env).as_ref() != Ok(&ty) {
                    return Err(format!("{e} ↦ {next} changes the type"));
                }
                e = next;
            }
            Err(err) => return Err(format!("stuck: {err}")),
        }
    }
    Ok(())
}

/// Weak head reduction preserves the value a term evaluates to.
pub fn whnf_agrees_with_evaluation(seed: u64) -> Result<(), String> {
    let (e, _) = closed_term(seed, 4);
    let w = whnf(&e, 10_000).map_err(|err| format!("whnf of {e}: {err}"))?;
    match (eval(&e, 20_000), eval(&w, 20_000)) {
        (Ok(EvalResult::Value(a)), Ok(EvalResult::Value(b))) if !values_agree(&a, &b) => Err(format!("{a} vs {b}")),
        (Err(err), _) | (_, Err(err)) => Err(format!("evaluation of {e}: {err}")),
        _ => Ok(()),
    }
}

/// Values are compared up to the bodies of functions.
fn values_agree(a: &Expr, b: &Expr) -> bool {
    match (a, b) {
        (Expr::Lambda(..), Expr::Lambda(..)) => true,
        (Expr::Record(xs), Expr::Record(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|((l, x), (k, y))| l == k && values_agree(x, y))
        }
        (Expr::Inj(c, Some(x)), Expr::Inj(d, Some(y))) => c == d && values_agree(x, y),
        _ => a == b,
    }
}

/// An independent reference matcher.
fn reference_match(v: &Expr, p: &Pattern, out: &mut BTreeMap<Var, Expr>) -> bool {
    match p {
        Pattern::Wildcard => true,
        Pattern::Var(x) => out.insert(x.clone(), v.clone()).is_none(),
        Pattern::Alias(x, q) => reference_match(v, q, out) && out.insert(x.clone(), v.clone()).is_none(),
        Pattern::Const(c) => matches!(v, Expr::Const(d) if d == c),
        Pattern::Record(ps) => match v {
            Expr::Record(fs) => {
                let fields: BTreeMap<&Label, &Expr> = fs.iter().map(|(l, e)| (l, e)).collect();
                ps.len() == fs.len()
                    && ps.iter().all(|(l, q)| fields.get(l).is_some_and(|e| reference_match(e, q, out)))
            }
            _ => false,
        },
        Pattern::Inj(c, q) => match (v, q) {
            (Expr::Inj(d, None), None) => c == d,
            (Expr::Inj(d, Some(e)), Some(q)) => c == d && reference_match(e, q, out),
            _ => false,
        },
    }
}

fn var(n: &str) -> Pattern {
    Pattern::Var(Var::fresh(n))
}

/// Every pattern of `ty` up to `depth` nested constructors, with a small
/// set of literals.
fn patterns(ty: &Type, depth: usize, env: &DataEnv) -> Vec<Pattern> {
    let mut out = vec![Pattern::Wildcard, var("x")];
    match ty {
        Type::Int => out.extend([-1, 0, 2].map(|n| Pattern::Const(Const::Int(n)))),
        Type::Bool => out.extend([true, false].map(|b| Pattern::Const(Const::Bool(b)))),
        Type::Data(n) if depth > 0 => {
            for c in env.ctors_of(n).unwrap() {
                match &c.arg {
                    None => out.push(Pattern::Inj(c.ctor.clone(), None)),
                    Some(a) => {
                        for q in patterns(a, depth - 1, env) {
                            out.push(Pattern::Inj(c.ctor.clone(), Some(Box::new(q))));
                        }
                    }
                }
            }
        }
        Type::Record(fs) if depth > 0 => {
            let mut acc: Vec<Vec<(Label, Pattern)>> = vec![Vec::new()];
            for (l, t) in fs {
                let qs = patterns(t, depth - 1, env);
                acc = acc
                    .into_iter()
                    .flat_map(|pre| {
                        qs.iter().map(move |q| {
                            let mut v = pre.clone();
                            v.push((l.clone(), q.clone()));
                            v
                        })
                    })
                    .collect();
            }
            out.extend(acc.into_iter().map(Pattern::Record));
        }
        _ => {}
    }
    let aliased: Vec<Pattern> = out
        .iter()
        .filter(|p| !matches!(p, Pattern::Var(_)))
        .map(|p| Pattern::Alias(Var::fresh("a"), Box::new(p.clone())))
        .collect();
    out.extend(aliased);
    out
}

/// Matches every enumerated value against every enumerated pattern, twice,
/// and against the reference matcher. Returns the number of pairs checked.
pub fn match_determinism_exhaustive() -> Result<usize, String> {
    let env = env();
    let cfg = OracleConfig { random_ints: 0, ..OracleConfig::default() };
    let ints = IntSampler::new(&cfg);
    let types = [
        Type::Int,
        Type::Bool,
        Type::data("option"),
        Type::data("ilist"),
        Type::tuple(vec![Type::data("option"), Type::Bool]),
        Type::tuple(vec![Type::Int, Type::data("option")]),
    ];
    let mut checked = 0usize;
    for ty in &types {
        let values = zeus_core::dynamics::enumerate_values(ty, 3, &env, &ints, usize::MAX, 0);
        let pats = patterns(ty, 3, &env);
        for v in &values {
            for p in &pats {
                let first = match_value(v, p);
                if first != match_value(v, p) {
                    return Err(format!("nondeterministic on {v} / {p}"));
                }
                let mut reference = BTreeMap::new();
                let expected = reference_match(v, p, &mut reference);
                match first {
                    MatchResult::Matched(b) => {
                        if !expected {
                            return Err(format!("{v} should not match {p}"));
                        }
                        let got: BTreeMap<Var, Expr> = b.iter().cloned().collect();
                        if got.len() != b.len() {
                            return Err(format!("duplicate binding for {p}"));
                        }
                        if got != reference {
                            return Err(format!("bindings of {v} / {p}"));
                        }
                        let vars: BTreeSet<Var> = p.vars().into_iter().collect();
                        if got.keys().cloned().collect::<BTreeSet<_>>() != vars {
                            return Err(format!("bound variables of {p}"));
                        }
                    }
                    MatchResult::NoMatch if expected => return Err(format!("{v} should match {p}")),
                    MatchResult::NoMatch => {}
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}
