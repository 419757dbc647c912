//! Pattern matching, call-by-value small-step reduction and evaluation.

mod oracle;

pub use oracle::{enumerate_values, oracle_equiv, Disagreement, IntSampler, OracleConfig, OracleVerdict};

use thiserror::Error;

use crate::subst::{substitute, substitute_many};
use crate::syntax::{Bindings, Const, Expr, Label, Pattern};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchResult {
    Matched(Bindings),
    NoMatch,
}

/// `v ⫽ p ⊣ B`. Bindings are ordered by a left-to-right traversal of `p`,
/// with an alias binding after the bindings of its sub-pattern.
pub fn match_value(v: &Expr, p: &Pattern) -> MatchResult {
    let mut b = Vec::new();
    if matches_into(v, p, &mut b) {
        MatchResult::Matched(b)
    } else {
        MatchResult::NoMatch
    }
}

fn matches_into(v: &Expr, p: &Pattern, b: &mut Bindings) -> bool {
    match (p, v) {
        (Pattern::Wildcard, _) => true,
        (Pattern::Var(x), _) => {
            b.push((x.clone(), v.clone()));
            true
        }
        (Pattern::Alias(x, q), _) => {
            if !matches_into(v, q, b) {
                return false;
            }
            b.push((x.clone(), v.clone()));
            true
        }
        (Pattern::Const(c), Expr::Const(d)) => c == d,
        (Pattern::Record(ps), Expr::Record(fs)) => {
            ps.len() == fs.len() && ps.iter().zip(fs).all(|((l, q), (k, e))| l == k && matches_into(e, q, b))
        }
        (Pattern::Inj(c, None), Expr::Inj(d, None)) => c == d,
        (Pattern::Inj(c, Some(q)), Expr::Inj(d, Some(e))) => c == d && matches_into(e, q, b),
        _ => false,
    }
}

pub fn is_value(e: &Expr) -> bool {
    match e {
        Expr::Const(_) | Expr::Lambda(..) | Expr::Prim(_) | Expr::Inj(_, None) => true,
        Expr::Record(fs) => fs.iter().all(|(_, e)| is_value(e)),
        Expr::Inj(_, Some(e)) => is_value(e),
        Expr::Var(_) | Expr::Proj(..) | Expr::Case(..) | Expr::App(..) | Expr::Fix(..) => false,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynError {
    #[error("stuck expression: {0}")]
    StuckExpression(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult {
    Stepped(Expr),
    IsValue,
}

/// One step of `e ↦ e′`.
pub fn step(e: &Expr) -> Result<StepResult, DynError> {
    match step_owned(e.clone()) {
        Step::Stepped(e) => Ok(StepResult::Stepped(e)),
        Step::Value(_) => Ok(StepResult::IsValue),
        Step::Stuck(e) => Err(DynError::StuckExpression(e.to_string())),
    }
}

enum Step {
    Stepped(Expr),
    Value(Expr),
    Stuck(Expr),
}

/// Consumes the term so the unchanged context is moved, not copied.
fn step_owned(e: Expr) -> Step {
    match e {
        Expr::Const(_) | Expr::Lambda(..) | Expr::Prim(_) | Expr::Inj(_, None) => Step::Value(e),
        Expr::Var(_) => Step::Stuck(e),
        Expr::Record(fs) => {
            let mut fs = fs;
            for i in 0..fs.len() {
                let field = std::mem::replace(&mut fs[i].1, Expr::int(0));
                match step_owned(field) {
                    Step::Value(v) => fs[i].1 = v,
                    Step::Stepped(f) => {
                        fs[i].1 = f;
                        return Step::Stepped(Expr::Record(fs));
                    }
                    Step::Stuck(f) => {
                        fs[i].1 = f;
                        return Step::Stuck(Expr::Record(fs));
                    }
                }
            }
            Step::Value(Expr::Record(fs))
        }
        Expr::Inj(c, Some(a)) => match step_owned(*a) {
            Step::Value(v) => Step::Value(Expr::Inj(c, Some(Box::new(v)))),
            Step::Stepped(a) => Step::Stepped(Expr::Inj(c, Some(Box::new(a)))),
            Step::Stuck(a) => Step::Stuck(Expr::Inj(c, Some(Box::new(a)))),
        },
        Expr::Proj(r, l) => match step_owned(*r) {
            Step::Stepped(r) => Step::Stepped(Expr::Proj(Box::new(r), l)),
            Step::Value(Expr::Record(fs)) => match take_field(fs, &l) {
                Ok(v) => Step::Stepped(v),
                Err(fs) => Step::Stuck(Expr::Proj(Box::new(Expr::Record(fs)), l)),
            },
            Step::Value(r) | Step::Stuck(r) => Step::Stuck(Expr::Proj(Box::new(r), l)),
        },
        Expr::Case(s, bs) => match step_owned(*s) {
            Step::Stepped(s) => Step::Stepped(Expr::Case(Box::new(s), bs)),
            Step::Stuck(s) => Step::Stuck(Expr::Case(Box::new(s), bs)),
            Step::Value(v) => {
                for (p, body) in &bs {
                    if let MatchResult::Matched(b) = match_value(&v, p) {
                        return Step::Stepped(substitute_many(body, &b));
                    }
                }
                Step::Stuck(Expr::Case(Box::new(v), bs))
            }
        },
        Expr::Fix(x, t, body) => {
            let whole = Expr::Fix(x.clone(), t, body.clone());
            Step::Stepped(substitute(&body, &x, &whole))
        }
        Expr::App(f, a) => match step_owned(*f) {
            Step::Stepped(f) => Step::Stepped(Expr::App(Box::new(f), a)),
            Step::Stuck(f) => Step::Stuck(Expr::App(Box::new(f), a)),
            Step::Value(f) => match step_owned(*a) {
                Step::Stepped(a) => Step::Stepped(Expr::App(Box::new(f), Box::new(a))),
                Step::Stuck(a) => Step::Stuck(Expr::App(Box::new(f), Box::new(a))),
                Step::Value(a) => apply(f, a),
            },
        },
    }
}

fn take_field(fs: Vec<(Label, Expr)>, l: &Label) -> Result<Expr, Vec<(Label, Expr)>> {
    match fs.iter().position(|(k, _)| k == l) {
        Some(i) => Ok(fs.into_iter().nth(i).expect("index in range").1),
        None => Err(fs),
    }
}

fn apply(f: Expr, a: Expr) -> Step {
    match f {
        Expr::Lambda(x, _, body) => Step::Stepped(substitute(&body, &x, &a)),
        Expr::Prim(op) => {
            if let Expr::Record(fs) = &a {
                if let [(l1, Expr::Const(Const::Int(m))), (l2, Expr::Const(Const::Int(n)))] = fs.as_slice() {
                    if *l1 == Label::pos(1) && *l2 == Label::pos(2) {
                        return Step::Stepped(Expr::Const(op.apply(*m, *n)));
                    }
                }
            }
            Step::Stuck(Expr::App(Box::new(Expr::Prim(op)), Box::new(a)))
        }
        f => Step::Stuck(Expr::App(Box::new(f), Box::new(a))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalResult {
    Value(Expr),
    OutOfFuel,
}

/// `e ⇒ v`, iterating [`step`] at most `fuel` times.
pub fn eval(e: &Expr, fuel: u64) -> Result<EvalResult, DynError> {
    let mut cur = e.clone();
    let mut left = fuel;
    loop {
        match step_owned(cur) {
            Step::Value(v) => return Ok(EvalResult::Value(v)),
            Step::Stuck(s) => return Err(DynError::StuckExpression(s.to_string())),
            Step::Stepped(next) => {
                if left == 0 {
                    return Ok(EvalResult::OutOfFuel);
                }
                left -= 1;
                cur = next;
            }
        }
    }
}
