//! Weak head reduction and the binder-manipulation judgments used by
//! formula generation: freshening, equating bindings and freshening
//! together.

use thiserror::Error;

use crate::subst::{rename, rename_pattern, substitute};
use crate::syntax::{Branch, Expr, Pattern, Var};

pub const DEFAULT_WHNF_FUEL: u64 = 10_000;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("weak head reduction ran out of fuel")]
pub struct OutOfFuel;

/// One head step `e ⇝ e′`, if any rule applies.
pub fn head_step(e: &Expr) -> Option<Expr> {
    match e {
        Expr::App(f, a) => match &**f {
            Expr::Lambda(x, _, body) => Some(substitute(body, x, a)),
            _ => head_step(f).map(|f2| Expr::App(Box::new(f2), a.clone())),
        },
        Expr::Proj(r, l) => match &**r {
            Expr::Record(fs) => fs.iter().find(|(k, _)| k == l).map(|(_, v)| v.clone()),
            _ => head_step(r).map(|r2| Expr::Proj(Box::new(r2), l.clone())),
        },
        _ => None,
    }
}

/// `e ↓ e′`: head steps until none applies.
pub fn whnf(e: &Expr, fuel: u64) -> Result<Expr, OutOfFuel> {
    let mut cur = e.clone();
    for _ in 0..=fuel {
        match head_step(&cur) {
            Some(next) => cur = next,
            None => return Ok(cur),
        }
    }
    Err(OutOfFuel)
}

pub fn is_whnf(e: &Expr) -> bool {
    head_step(e).is_none()
}

/// Alpha-varies every variable bound by `p` to a fresh one.
pub fn freshen(p: &Pattern, e: &Expr) -> (Pattern, Expr) {
    let ren: Vec<(Var, Var)> = p
        .vars()
        .into_iter()
        .map(|v| {
            let f = v.refresh();
            (v, f)
        })
        .collect();
    (rename_pattern(p, &ren), rename(e, &ren))
}

pub fn freshen_branch(b: &Branch) -> Branch {
    freshen(&b.0, &b.1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum EquateResult {
    /// Both bindings now use the same pattern.
    Unified(Branch, Branch),
    CannotUnify,
}

/// Rewrites two bindings to share one freshly named pattern, when their
/// patterns have the same shape up to wildcards, variables and aliases.
pub fn equate_bindings(b1: &Branch, b2: &Branch) -> EquateResult {
    match eb(&b1.0, b1.1.clone(), &b2.0, b2.1.clone()) {
        Some((p, e1, e2)) => EquateResult::Unified((p.clone(), e1), (p, e2)),
        None => EquateResult::CannotUnify,
    }
}

fn rn(e: Expr, x: &Var, y: &Var) -> Expr {
    rename(&e, &[(x.clone(), y.clone())])
}

fn eb(p1: &Pattern, e1: Expr, p2: &Pattern, e2: Expr) -> Option<(Pattern, Expr, Expr)> {
    use Pattern::*;
    match (p1, p2) {
        (Wildcard, Wildcard) => Some((Wildcard, e1, e2)),
        (Wildcard, Var(x)) => {
            let y = x.refresh();
            let e2 = rn(e2, x, &y);
            Some((Var(y), e1, e2))
        }
        (Var(x), Wildcard) => {
            let y = x.refresh();
            let e1 = rn(e1, x, &y);
            Some((Var(y), e1, e2))
        }
        (Var(x), Var(x2)) => {
            let y = x.refresh();
            let e1 = rn(e1, x, &y);
            let e2 = rn(e2, x2, &y);
            Some((Var(y), e1, e2))
        }
        (Alias(x, q1), _) => {
            let (p, e1, e2) = eb(q1, e1, p2, e2)?;
            let y = x.refresh();
            let e1 = rn(e1, x, &y);
            Some((Alias(y, Box::new(p)), e1, e2))
        }
        (_, Alias(x, q2)) => {
            let (p, e1, e2) = eb(p1, e1, q2, e2)?;
            let y = x.refresh();
            let e2 = rn(e2, x, &y);
            Some((Alias(y, Box::new(p)), e1, e2))
        }
        (Record(fs), Record(gs)) => {
            if fs.len() != gs.len() || fs.iter().zip(gs).any(|((l, _), (k, _))| l != k) {
                return None;
            }
            let (mut e1, mut e2) = (e1, e2);
            let mut out = Vec::with_capacity(fs.len());
            for ((l, q1), (_, q2)) in fs.iter().zip(gs) {
                let (q, n1, n2) = eb(q1, e1, q2, e2)?;
                out.push((l.clone(), q));
                e1 = n1;
                e2 = n2;
            }
            Some((Record(out), e1, e2))
        }
        (Const(c), Const(d)) if c == d => Some((Const(*c), e1, e2)),
        (Inj(c, None), Inj(d, None)) if c == d => Some((Inj(c.clone(), None), e1, e2)),
        (Inj(c, Some(q1)), Inj(d, Some(q2))) if c == d => {
            let (q, e1, e2) = eb(q1, e1, q2, e2)?;
            Some((Inj(c.clone(), Some(Box::new(q))), e1, e2))
        }
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreshenedTogether {
    pub left: Vec<Branch>,
    pub right: Vec<Branch>,
    /// Length of the equated prefix.
    pub shared: usize,
}

/// Equates the longest prefix of branch pairs that can be equated and
/// independently freshens everything after the first failure.
pub fn freshen_together(bs1: &[Branch], bs2: &[Branch]) -> FreshenedTogether {
    let mut left = Vec::with_capacity(bs1.len());
    let mut right = Vec::with_capacity(bs2.len());
    let mut shared = 0;
    for (b1, b2) in bs1.iter().zip(bs2) {
        match equate_bindings(b1, b2) {
            EquateResult::Unified(l, r) => {
                left.push(l);
                right.push(r);
                shared += 1;
            }
            EquateResult::CannotUnify => break,
        }
    }
    left.extend(bs1[shared..].iter().map(freshen_branch));
    right.extend(bs2[shared..].iter().map(freshen_branch));
    FreshenedTogether { left, right, shared }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subst::{alpha_eq, alpha_eq_branch};
    use crate::syntax::{Const, PrimOp, Type};

    fn add(a: Expr, b: Expr) -> Expr {
        Expr::prim(PrimOp::Add, a, b)
    }

    fn id(name: &str) -> Expr {
        Expr::lam(Var::named(name), Type::Int, Expr::var(name))
    }

    #[test]
    fn whnf_beta() {
        let e = Expr::app(Expr::lam(Var::named("x"), Type::arrow(Type::Int, Type::Int), Expr::var("x")), id("y"));
        assert_eq!(whnf(&e, 10).unwrap(), id("y"));
    }

    #[test]
    fn whnf_leaves_fix() {
        let t = Type::arrow(Type::Int, Type::Int);
        let e = Expr::fix(Var::named("f"), t, id("x"));
        assert_eq!(whnf(&e, 10).unwrap(), e);
    }

    #[test]
    fn whnf_projection_of_record() {
        let body = add(Expr::var("z"), Expr::int(1));
        let e = Expr::proj(Expr::tuple(vec![body.clone()]), crate::syntax::Label::pos(1));
        assert_eq!(whnf(&e, 10).unwrap(), body);
    }

    #[test]
    fn whnf_is_call_by_name_and_stops_at_case() {
        // (λx.case x {_.1}) (f 0): beta fires even though the argument is
        // not a value, and the resulting case is not reduced.
        let arg = Expr::app(Expr::var("f"), Expr::int(0));
        let e = Expr::app(
            Expr::lam(Var::named("x"), Type::Int, Expr::case(Expr::var("x"), vec![(Pattern::Wildcard, Expr::int(1))])),
            arg.clone(),
        );
        let want = Expr::case(arg, vec![(Pattern::Wildcard, Expr::int(1))]);
        assert_eq!(whnf(&e, 10).unwrap(), want);
    }

    #[test]
    fn whnf_fuel_exhaustion() {
        // ω = (λx. x x)(λx. x x) has no type but exercises the fuel guard.
        let t = Type::Int;
        let w = Expr::lam(Var::named("x"), t, Expr::app(Expr::var("x"), Expr::var("x")));
        let omega = Expr::app(w.clone(), w);
        assert_eq!(whnf(&omega, 50), Err(OutOfFuel));
    }

    #[test]
    fn freshen_wildcard_is_identity() {
        let e = add(Expr::var("a"), Expr::int(1));
        assert_eq!(freshen(&Pattern::Wildcard, &e), (Pattern::Wildcard, e));
    }

    #[test]
    fn freshen_variable() {
        let (p, e) = freshen(&Pattern::var("x"), &add(Expr::var("x"), Expr::int(1)));
        let Pattern::Var(y) = &p else { panic!("variable expected") };
        assert_ne!(*y, Var::named("x"));
        assert_eq!(e, add(Expr::Var(y.clone()), Expr::int(1)));
    }

    #[test]
    fn freshen_record_is_alpha_equivalent() {
        let p = Pattern::tuple(vec![Pattern::var("a"), Pattern::var("b")]);
        let e = add(Expr::var("a"), Expr::var("b"));
        let (p2, e2) = freshen(&p, &e);
        let vs = p2.vars();
        assert_ne!(vs[0], vs[1]);
        assert!(vs.iter().all(|v| v.stamp != 0));
        assert!(alpha_eq_branch(&(p.clone(), e.clone()), &(p2.clone(), e2.clone())));
        // Embedded in a case, the two forms are alpha-equivalent expressions.
        let scrut = Expr::var("s");
        assert!(alpha_eq(&Expr::case(scrut.clone(), vec![(p, e)]), &Expr::case(scrut, vec![(p2, e2)])));
    }

    #[test]
    fn equate_variable_variable() {
        let b1 = (Pattern::var("x"), add(Expr::var("x"), Expr::int(1)));
        let b2 = (Pattern::var("z"), Expr::prim(PrimOp::Mul, Expr::var("z"), Expr::int(2)));
        let EquateResult::Unified((p, e1), (q, e2)) = equate_bindings(&b1, &b2) else { panic!("should unify") };
        assert_eq!(p, q);
        let Pattern::Var(y) = p else { panic!() };
        assert_eq!(e1, add(Expr::Var(y.clone()), Expr::int(1)));
        assert_eq!(e2, Expr::prim(PrimOp::Mul, Expr::Var(y), Expr::int(2)));
    }

    #[test]
    fn equate_wildcard_variable() {
        let b1 = (Pattern::Wildcard, Expr::int(1));
        let b2 = (Pattern::var("x"), Expr::var("x"));
        let EquateResult::Unified((p, e1), (q, e2)) = equate_bindings(&b1, &b2) else { panic!("should unify") };
        assert_eq!(p, q);
        let Pattern::Var(y) = p else { panic!() };
        assert_eq!(e1, Expr::int(1));
        assert_eq!(e2, Expr::Var(y));
    }

    #[test]
    fn equate_distinct_injections_fails() {
        let b1 = (Pattern::inj("SOME", Pattern::var("a")), Expr::var("a"));
        let b2 = (Pattern::inj0("NONE"), Expr::int(0));
        assert_eq!(equate_bindings(&b1, &b2), EquateResult::CannotUnify);
    }

    #[test]
    fn equate_alias_against_variable() {
        let b1 = (Pattern::alias("w", Pattern::var("a")), add(Expr::var("w"), Expr::var("a")));
        let b2 = (Pattern::var("b"), Expr::var("b"));
        let EquateResult::Unified((p, e1), (q, _)) = equate_bindings(&b1, &b2) else { panic!("should unify") };
        assert_eq!(p, q);
        let Pattern::Alias(w, inner) = &p else { panic!("alias expected") };
        let Pattern::Var(a) = &**inner else { panic!() };
        assert_eq!(e1, add(Expr::Var(w.clone()), Expr::Var(a.clone())));
    }

    /// Rule-by-rule applicability table for the pattern shapes in play.
    fn applicable(p1: &Pattern, p2: &Pattern) -> bool {
        use Pattern::*;
        match (p1, p2) {
            (Wildcard | Var(_), Wildcard | Var(_)) => true,
            (Alias(_, a), b) => applicable(a, b),
            (a, Alias(_, b)) => applicable(a, b),
            (Inj(c, None), Inj(d, None)) => c == d,
            (Inj(c, Some(a)), Inj(d, Some(b))) => c == d && applicable(a, b),
            (Const(c), Const(d)) => c == d,
            _ => false,
        }
    }

    #[test]
    fn freshen_together_stops_at_wildcard_vs_injection() {
        let m1 = vec![(Pattern::inj("SOME", Pattern::var("a")), Expr::var("a")), (Pattern::inj0("NONE"), Expr::int(0))];
        let m2 = vec![(Pattern::inj("SOME", Pattern::var("b")), Expr::var("b")), (Pattern::Wildcard, Expr::int(0))];
        let expected = m1.iter().zip(&m2).take_while(|(a, b)| applicable(&a.0, &b.0)).count();
        let ft = freshen_together(&m1, &m2);
        assert_eq!(ft.shared, expected);
        assert_eq!(ft.shared, 1);
        assert_eq!(ft.left[0].0, ft.right[0].0);
        assert_eq!(ft.left.len(), 2);
        assert_eq!(ft.right.len(), 2);
    }

    #[test]
    fn freshen_together_identical_singletons() {
        let m = vec![(Pattern::var("x"), Expr::var("x"))];
        let ft = freshen_together(&m, &m);
        assert_eq!(ft.shared, 1);
        assert_eq!(ft.left, ft.right);
    }

    #[test]
    fn freshen_together_unequal_lengths() {
        let c = |n| Pattern::Const(Const::Int(n));
        let m1 = vec![(c(1), Expr::int(1)), (c(2), Expr::int(2)), (Pattern::Wildcard, Expr::int(0))];
        let m2 = vec![(c(1), Expr::int(1)), (Pattern::Wildcard, Expr::int(0))];
        let ft = freshen_together(&m1, &m2);
        assert!(ft.shared <= 2);
        assert_eq!(ft.shared, 1);
        assert_eq!((ft.left.len(), ft.right.len()), (3, 2));
    }

    #[test]
    fn equate_is_shape_symmetric() {
        let pats = [
            Pattern::Wildcard,
            Pattern::var("x"),
            Pattern::alias("w", Pattern::inj("SOME", Pattern::var("a"))),
            Pattern::inj("SOME", Pattern::Wildcard),
            Pattern::inj0("NONE"),
            Pattern::Const(Const::Int(3)),
        ];
        for p in &pats {
            for q in &pats {
                let a = equate_bindings(&(p.clone(), Expr::int(0)), &(q.clone(), Expr::int(0)));
                let b = equate_bindings(&(q.clone(), Expr::int(0)), &(p.clone(), Expr::int(0)));
                assert_eq!(matches!(a, EquateResult::Unified(..)), matches!(b, EquateResult::Unified(..)), "{p} / {q}");
            }
        }
    }
}
