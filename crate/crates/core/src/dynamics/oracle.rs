//! Finite testing approximation of extensional equivalence.
//!
//! At arrow types both sides are applied to enumerated inputs of the domain;
//! at other types evaluated values are compared structurally, with function
//! components inside data compared by further application.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{eval, EvalResult};
use crate::par::Execution;
use crate::syntax::{DataEnv, Expr, PrimOp, Type, Var};

#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Constructor nesting bound for enumerated inputs.
    pub depth: usize,
    pub fuel: u64,
    /// Random integer draws added to the fixed window {-2..2}.
    pub random_ints: usize,
    /// Random draws are uniform in `[-int_range, int_range]`.
    pub int_range: i64,
    pub seed: u64,
    /// Cap on enumerated inputs per arrow; larger spaces are sampled.
    pub max_values: usize,
    /// How many arrows nested inside data or argument positions are probed.
    pub higher_order_depth: usize,
    pub execution: Execution,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            depth: 3,
            fuel: 10_000,
            random_ints: 8,
            int_range: 1 << 31,
            seed: 0x5eed,
            max_values: 5000,
            higher_order_depth: 1,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disagreement {
    /// Arguments applied, outermost first.
    pub inputs: Vec<Expr>,
    pub left: Expr,
    pub right: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Agree,
    Disagree(Disagreement),
    Inconclusive(String),
}

/// The integers used at every `int` position of one query.
#[derive(Debug, Clone)]
pub struct IntSampler {
    pub ints: Vec<i64>,
}

impl IntSampler {
    pub fn new(cfg: &OracleConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut ints: Vec<i64> = (-2..=2).collect();
        let mut tries = 0;
        while ints.len() < 5 + cfg.random_ints && tries < 1000 {
            tries += 1;
            let n = rng.gen_range(-cfg.int_range..=cfg.int_range);
            if !ints.contains(&n) {
                ints.push(n);
            }
        }
        IntSampler { ints }
    }
}

/// Whether `e1` and `e2` agree on every enumerated input.
///
/// A disagreement on an input where both sides terminate is reported even if
/// other inputs ran out of fuel.
pub fn oracle_equiv(e1: &Expr, e2: &Expr, ty: &Type, env: &DataEnv, cfg: &OracleConfig) -> OracleVerdict {
    let o = Oracle { env, cfg, ints: IntSampler::new(cfg) };
    match o.compare(e1, e2, ty, &mut Vec::new(), cfg.higher_order_depth, true) {
        Outcome::Agree => OracleVerdict::Agree,
        Outcome::Disagree(d) => OracleVerdict::Disagree(d),
        Outcome::Inconclusive(r) => OracleVerdict::Inconclusive(r),
    }
}

enum Outcome {
    Agree,
    Disagree(Disagreement),
    Inconclusive(String),
}

impl Outcome {
    /// First disagreement wins, then any inconclusive result.
    fn combine(outcomes: impl IntoIterator<Item = Outcome>) -> Outcome {
        let mut inconclusive = None;
        for o in outcomes {
            match o {
                Outcome::Disagree(d) => return Outcome::Disagree(d),
                Outcome::Inconclusive(r) => {
                    inconclusive.get_or_insert(r);
                }
                Outcome::Agree => {}
            }
        }
        inconclusive.map_or(Outcome::Agree, Outcome::Inconclusive)
    }
}

struct Oracle<'a> {
    env: &'a DataEnv,
    cfg: &'a OracleConfig,
    ints: IntSampler,
}

impl Oracle<'_> {
    fn run(&self, e: &Expr) -> Result<Expr, String> {
        match eval(e, self.cfg.fuel) {
            Ok(EvalResult::Value(v)) => Ok(v),
            Ok(EvalResult::OutOfFuel) => Err("out of fuel".into()),
            Err(err) => Err(err.to_string()),
        }
    }

    fn compare(&self, e1: &Expr, e2: &Expr, ty: &Type, path: &mut Vec<Expr>, nested: usize, top: bool) -> Outcome {
        let (v1, v2) = match (self.run(e1), self.run(e2)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(r), _) | (_, Err(r)) => return Outcome::Inconclusive(r),
        };
        self.values(&v1, &v2, ty, path, nested, top)
    }

    /// `spine` is true along the curried argument chain, where arrows do not
    /// consume the nested budget.
    fn values(&self, v1: &Expr, v2: &Expr, ty: &Type, path: &mut Vec<Expr>, nested: usize, spine: bool) -> Outcome {
        let differ = |path: &Vec<Expr>| {
            Outcome::Disagree(Disagreement { inputs: path.clone(), left: v1.clone(), right: v2.clone() })
        };
        match ty {
            Type::Int | Type::Bool => {
                if v1 == v2 {
                    Outcome::Agree
                } else {
                    differ(path)
                }
            }
            Type::Record(fs) => match (v1, v2) {
                (Expr::Record(a), Expr::Record(b)) => Outcome::combine(
                    fs.iter()
                        .zip(a.iter().zip(b))
                        .map(|((_, t), ((_, x), (_, y)))| self.values(x, y, t, path, nested, false)),
                ),
                _ => Outcome::Inconclusive("record value expected".into()),
            },
            Type::Data(_) => match (v1, v2) {
                (Expr::Inj(c, None), Expr::Inj(d, None)) if c == d => Outcome::Agree,
                (Expr::Inj(c, Some(x)), Expr::Inj(d, Some(y))) if c == d => {
                    match self.env.ctor(c).and_then(|i| i.arg.clone()) {
                        Some(t) => self.values(x, y, &t, path, nested, false),
                        None => Outcome::Inconclusive(format!("unknown constructor {c}")),
                    }
                }
                (Expr::Inj(..), Expr::Inj(..)) => differ(path),
                _ => Outcome::Inconclusive("injection value expected".into()),
            },
            Type::Arrow(dom, cod) => {
                let nested = if spine {
                    nested
                } else if nested == 0 {
                    return Outcome::Agree;
                } else {
                    nested - 1
                };
                let depth = if spine { self.cfg.depth } else { 1 };
                let inputs = enumerate_values(dom, depth, self.env, &self.ints, self.cfg.max_values, self.cfg.seed);
                let probe = |a: &Expr, path: &mut Vec<Expr>| {
                    path.push(a.clone());
                    let out = self.compare(
                        &Expr::app(v1.clone(), a.clone()),
                        &Expr::app(v2.clone(), a.clone()),
                        cod,
                        path,
                        nested,
                        spine,
                    );
                    path.pop();
                    out
                };
                if spine && path.is_empty() && self.cfg.execution.is_parallel() {
                    let outs = self.cfg.execution.map(&inputs, |a| probe(a, &mut Vec::new()));
                    Outcome::combine(outs)
                } else {
                    Outcome::combine(inputs.iter().map(|a| probe(a, path)))
                }
            }
        }
    }
}

fn count(ty: &Type, depth: usize, env: &DataEnv, ints: usize) -> usize {
    match ty {
        Type::Int => ints,
        Type::Bool => 2,
        Type::Record(fs) => fs.iter().fold(1usize, |acc, (_, t)| acc.saturating_mul(count(t, depth, env, ints))),
        Type::Data(d) => env.ctors_of(d).map_or(0, |cs| {
            cs.iter().fold(0usize, |acc, c| {
                acc.saturating_add(match &c.arg {
                    None => 1,
                    Some(_) if depth == 0 => 0,
                    Some(t) => count(t, depth - 1, env, ints),
                })
            })
        }),
        Type::Arrow(dom, cod) => function_samples(dom, cod, env).len(),
    }
}

/// A few closed functions used as inputs at arrow types.
fn function_samples(dom: &Type, cod: &Type, env: &DataEnv) -> Vec<Expr> {
    let x = Var::named("arg");
    let mut out = Vec::new();
    if dom == cod {
        out.push(Expr::lam(x.clone(), (*dom).clone(), Expr::Var(x.clone())));
    }
    if *dom == Type::Int && *cod == Type::Int {
        out.push(Expr::lam(x.clone(), Type::Int, Expr::prim(PrimOp::Add, Expr::Var(x.clone()), Expr::int(1))));
    }
    let sampler = IntSampler { ints: vec![0, 1] };
    for v in enumerate_values(cod, 1, env, &sampler, 2, 0) {
        out.push(Expr::lam(x.clone(), dom.clone(), v));
    }
    out
}

/// Values of `ty` with at most `depth` nested constructor applications.
///
/// When the space exceeds `cap`, a deterministic random sample of `cap`
/// values is returned instead.
pub fn enumerate_values(ty: &Type, depth: usize, env: &DataEnv, ints: &IntSampler, cap: usize, seed: u64) -> Vec<Expr> {
    if count(ty, depth, env, ints.ints.len()) <= cap {
        return all_values(ty, depth, env, &ints.ints);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    // Always include the shallowest values.
    if count(ty, 0, env, ints.ints.len()) <= cap / 2 {
        for v in all_values(ty, 0, env, &ints.ints) {
            if seen.insert(v.clone()) {
                out.push(v);
            }
        }
    }
    let mut tries = 0;
    while out.len() < cap && tries < cap * 20 {
        tries += 1;
        if let Some(v) = random_value(ty, depth, env, &ints.ints, &mut rng) {
            if seen.insert(v.clone()) {
                out.push(v);
            }
        }
    }
    out
}

fn all_values(ty: &Type, depth: usize, env: &DataEnv, ints: &[i64]) -> Vec<Expr> {
    match ty {
        Type::Int => ints.iter().map(|n| Expr::int(*n)).collect(),
        Type::Bool => vec![Expr::bool(false), Expr::bool(true)],
        Type::Record(fs) => {
            let mut acc: Vec<Vec<(crate::syntax::Label, Expr)>> = vec![vec![]];
            for (l, t) in fs {
                let vs = all_values(t, depth, env, ints);
                acc = acc
                    .into_iter()
                    .flat_map(|prefix| {
                        vs.iter().map(move |v| {
                            let mut p = prefix.clone();
                            p.push((l.clone(), v.clone()));
                            p
                        })
                    })
                    .collect();
            }
            acc.into_iter().map(Expr::Record).collect()
        }
        Type::Data(d) => {
            let mut out = Vec::new();
            for c in env.ctors_of(d).unwrap_or(&[]) {
                match &c.arg {
                    None => out.push(Expr::Inj(c.ctor.clone(), None)),
                    Some(_) if depth == 0 => {}
                    Some(t) => {
                        for v in all_values(t, depth - 1, env, ints) {
                            out.push(Expr::Inj(c.ctor.clone(), Some(Box::new(v))));
                        }
                    }
                }
            }
            out
        }
        Type::Arrow(dom, cod) => function_samples(dom, cod, env),
    }
}

fn random_value(ty: &Type, depth: usize, env: &DataEnv, ints: &[i64], rng: &mut ChaCha8Rng) -> Option<Expr> {
    match ty {
        Type::Int => ints.choose(rng).map(|n| Expr::int(*n)),
        Type::Bool => Some(Expr::bool(rng.gen())),
        Type::Record(fs) => {
            let mut out = Vec::with_capacity(fs.len());
            for (l, t) in fs {
                out.push((l.clone(), random_value(t, depth, env, ints, rng)?));
            }
            Some(Expr::Record(out))
        }
        Type::Data(d) => {
            let cs: Vec<_> = env.ctors_of(d)?.iter().filter(|c| c.arg.is_none() || depth > 0).collect();
            let c = cs.choose(rng)?;
            match &c.arg {
                None => Some(Expr::Inj(c.ctor.clone(), None)),
                Some(t) => {
                    let v = random_value(t, depth - 1, env, ints, rng)?;
                    Some(Expr::Inj(c.ctor.clone(), Some(Box::new(v))))
                }
            }
        }
        Type::Arrow(dom, cod) => function_samples(dom, cod, env).choose(rng).cloned(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Ctor, CtorSig};

    fn lam_int(body: impl FnOnce(Expr) -> Expr) -> Expr {
        let x = Var::named("x");
        Expr::lam(x.clone(), Type::Int, body(Expr::Var(x)))
    }

    fn int_to_int() -> Type {
        Type::arrow(Type::Int, Type::Int)
    }

    #[test]
    fn plus_zero_agrees_with_identity() {
        let a = lam_int(|x| Expr::prim(PrimOp::Add, x, Expr::int(0)));
        let b = lam_int(|x| x);
        let v = oracle_equiv(&a, &b, &int_to_int(), &DataEnv::new(), &OracleConfig::default());
        assert_eq!(v, OracleVerdict::Agree);
    }

    #[test]
    fn off_by_one_disagrees_with_witness() {
        let a = lam_int(|x| Expr::prim(PrimOp::Add, x, Expr::int(1)));
        let b = lam_int(|x| Expr::prim(PrimOp::Add, x, Expr::int(2)));
        let cfg = OracleConfig { execution: Execution::Sequential, ..OracleConfig::default() };
        match oracle_equiv(&a, &b, &int_to_int(), &DataEnv::new(), &cfg) {
            OracleVerdict::Disagree(d) => {
                assert_eq!(d.inputs, vec![Expr::int(-2)]);
                // Replaying the witness gives distinguishable values.
                let l = eval(&Expr::app(a.clone(), d.inputs[0].clone()), 100).unwrap();
                let r = eval(&Expr::app(b.clone(), d.inputs[0].clone()), 100).unwrap();
                assert_ne!(l, r);
            }
            other => panic!("expected disagreement, got {other:?}"),
        }
    }

    #[test]
    fn divergence_is_inconclusive() {
        let t = int_to_int();
        let f = Var::named("f");
        let looping = Expr::fix(f.clone(), t.clone(), lam_int(|x| Expr::app(Expr::Var(f.clone()), x)));
        let id = lam_int(|x| x);
        let cfg = OracleConfig { fuel: 200, ..OracleConfig::default() };
        assert!(matches!(oracle_equiv(&looping, &id, &t, &DataEnv::new(), &cfg), OracleVerdict::Inconclusive(_)));
    }

    fn list_env() -> DataEnv {
        let mut env = DataEnv::new();
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

    #[test]
    fn enumeration_counts_match_formula() {
        let env = list_env();
        let cfg = OracleConfig::default();
        let s = IntSampler::new(&cfg);
        let k = s.ints.len();
        assert_eq!(k, 13);
        let vs = enumerate_values(&Type::data("ilist"), 3, &env, &s, 5000, 1);
        assert_eq!(vs.len(), 1 + k + k * k + k * k * k);
        let distinct: HashSet<_> = vs.iter().collect();
        assert_eq!(distinct.len(), vs.len());
    }

    #[test]
    fn large_spaces_are_sampled_to_cap() {
        let env = list_env();
        let s = IntSampler::new(&OracleConfig::default());
        let vs = enumerate_values(&Type::data("ilist"), 5, &env, &s, 300, 1);
        assert_eq!(vs.len(), 300);
        assert!(vs.contains(&Expr::inj0("Nil")));
    }

    #[test]
    fn random_draws_respect_range() {
        let cfg = OracleConfig { int_range: 1 << 20, ..OracleConfig::default() };
        let s = IntSampler::new(&cfg);
        assert!(s.ints.iter().all(|n| n.abs() <= 1 << 20));
    }
}
