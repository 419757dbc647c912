//! Typechecking of patterns and expressions, linearity of patterns and
//! exhaustiveness of case analyses.

use std::collections::HashSet;

use thiserror::Error;

use crate::syntax::{Const, Ctor, DataEnv, Expr, Label, Pattern, Type, TypingContext, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StaticsError {
    #[error("pattern `{pattern}` cannot have type `{ty}`")]
    PatternTypeMismatch { pattern: String, ty: String },
    #[error("variable `{0}` bound twice in one pattern")]
    DuplicatePatternVariable(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("type mismatch in {context}: expected `{expected}`, found `{found}`")]
    TypeMismatch { context: String, expected: String, found: String },
    #[error("non-exhaustive case: `{witness}` is not matched")]
    NonExhaustiveCase { witness: String },
    #[error("unknown label `{label}` for type `{ty}`")]
    UnknownLabel { label: String, ty: String },
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),
    #[error("constructor `{0}` used with the wrong arity")]
    ConstructorArity(String),
    #[error("case with no branches")]
    EmptyCase,
    #[error("ill-formed type `{0}`")]
    IllFormedType(String),
}

type Result<T> = std::result::Result<T, StaticsError>;

fn mismatch(context: &str, expected: &Type, found: &Type) -> StaticsError {
    StaticsError::TypeMismatch {
        context: context.to_string(),
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

/// `p :: τ ⊣ Γ`: the bindings a pattern introduces when matched at `τ`.
pub fn pattern_type(p: &Pattern, ty: &Type, env: &DataEnv) -> Result<TypingContext> {
    let mut ctx = TypingContext::new();
    let mut seen = HashSet::new();
    pat(p, ty, env, &mut ctx, &mut seen)?;
    Ok(ctx)
}

fn bind(x: &Var, ty: &Type, ctx: &mut TypingContext, seen: &mut HashSet<Var>) -> Result<()> {
    if !seen.insert(x.clone()) {
        return Err(StaticsError::DuplicatePatternVariable(format!("{:?}", x)));
    }
    ctx.insert(x.clone(), ty.clone());
    Ok(())
}

fn pat(p: &Pattern, ty: &Type, env: &DataEnv, ctx: &mut TypingContext, seen: &mut HashSet<Var>) -> Result<()> {
    let bad = || StaticsError::PatternTypeMismatch { pattern: p.to_string(), ty: ty.to_string() };
    match (p, ty) {
        (Pattern::Wildcard, _) => Ok(()),
        (Pattern::Var(x), _) => bind(x, ty, ctx, seen),
        (Pattern::Alias(x, q), _) => {
            pat(q, ty, env, ctx, seen)?;
            bind(x, ty, ctx, seen)
        }
        (Pattern::Const(c), _) if c.base_type() == *ty => Ok(()),
        (Pattern::Record(ps), Type::Record(ts)) => {
            if ps.len() != ts.len() || ps.iter().zip(ts).any(|((l, _), (k, _))| l != k) {
                return Err(bad());
            }
            for ((_, q), (_, t)) in ps.iter().zip(ts) {
                pat(q, t, env, ctx, seen)?;
            }
            Ok(())
        }
        (Pattern::Inj(c, arg), Type::Data(d)) => {
            let info = env.ctor(c).ok_or_else(|| StaticsError::UnknownConstructor(c.to_string()))?;
            if info.datatype != *d {
                return Err(bad());
            }
            match (arg, &info.arg) {
                (None, None) => Ok(()),
                (Some(q), Some(t)) => pat(q, t, env, ctx, seen),
                _ => Err(StaticsError::ConstructorArity(c.to_string())),
            }
        }
        _ => Err(bad()),
    }
}

/// `Γ ⊢ e : τ`. Binders carry their types, so this is checking only.
pub fn typecheck(ctx: &TypingContext, e: &Expr, env: &DataEnv) -> Result<Type> {
    match e {
        Expr::Const(c) => Ok(c.base_type()),
        Expr::Var(x) => ctx.get(x).cloned().ok_or_else(|| StaticsError::UnboundVariable(format!("{:?}", x))),
        Expr::Prim(op) => Ok(op.signature()),
        Expr::Record(fs) => {
            let mut out = Vec::with_capacity(fs.len());
            for (i, (l, e)) in fs.iter().enumerate() {
                if i > 0 && fs[i - 1].0 >= *l {
                    return Err(StaticsError::DuplicateLabel(l.to_string()));
                }
                out.push((l.clone(), typecheck(ctx, e, env)?));
            }
            Ok(Type::Record(out))
        }
        Expr::Proj(r, l) => {
            let t = typecheck(ctx, r, env)?;
            field_type(&t, l)
        }
        Expr::Inj(c, arg) => {
            let info = env.ctor(c).ok_or_else(|| StaticsError::UnknownConstructor(c.to_string()))?;
            match (arg, &info.arg) {
                (None, None) => {}
                (Some(a), Some(t)) => {
                    let got = typecheck(ctx, a, env)?;
                    if got != *t {
                        return Err(mismatch(&format!("argument of {}", c), t, &got));
                    }
                }
                _ => return Err(StaticsError::ConstructorArity(c.to_string())),
            }
            Ok(Type::Data(info.datatype.clone()))
        }
        Expr::Case(s, bs) => {
            if bs.is_empty() {
                return Err(StaticsError::EmptyCase);
            }
            let st = typecheck(ctx, s, env)?;
            let mut result: Option<Type> = None;
            for (p, b) in bs {
                let pctx = pattern_type(p, &st, env)?;
                let bt = typecheck(&ctx.extended(&pctx), b, env)?;
                match &result {
                    None => result = Some(bt),
                    Some(t) if *t == bt => {}
                    Some(t) => return Err(mismatch("case branch", t, &bt)),
                }
            }
            let pats: Vec<&Pattern> = bs.iter().map(|(p, _)| p).collect();
            if let Exhaustiveness::Missing(w) = check_exhaustive(&pats, &st, env) {
                return Err(StaticsError::NonExhaustiveCase { witness: w });
            }
            Ok(result.expect("nonempty case"))
        }
        Expr::Lambda(x, t, b) => {
            well_formed(t, env)?;
            let bt = typecheck(&ctx.with(x.clone(), t.clone()), b, env)?;
            Ok(Type::arrow(t.clone(), bt))
        }
        Expr::Fix(x, t, b) => {
            well_formed(t, env)?;
            let bt = typecheck(&ctx.with(x.clone(), t.clone()), b, env)?;
            if bt != *t {
                return Err(mismatch("fix body", t, &bt));
            }
            Ok(bt)
        }
        Expr::App(f, a) => {
            let ft = typecheck(ctx, f, env)?;
            let at = typecheck(ctx, a, env)?;
            match ft {
                Type::Arrow(dom, cod) if *dom == at => Ok(*cod),
                Type::Arrow(dom, _) => Err(mismatch("application argument", &dom, &at)),
                other => Err(mismatch("application head", &Type::arrow(at, Type::data("_")), &other)),
            }
        }
    }
}

/// The type of an expression assumed well-typed, without re-checking it.
pub fn type_of(ctx: &TypingContext, e: &Expr, env: &DataEnv) -> Option<Type> {
    match e {
        Expr::Const(c) => Some(c.base_type()),
        Expr::Var(x) => ctx.get(x).cloned(),
        Expr::Prim(op) => Some(op.signature()),
        Expr::Record(fs) => {
            Some(Type::Record(fs.iter().map(|(l, e)| Some((l.clone(), type_of(ctx, e, env)?))).collect::<Option<_>>()?))
        }
        Expr::Proj(r, l) => type_of(ctx, r, env)?.field(l).cloned(),
        Expr::Inj(c, _) => env.ctor(c).map(|i| Type::Data(i.datatype.clone())),
        Expr::Case(s, bs) => {
            let st = type_of(ctx, s, env)?;
            let (p, b) = bs.first()?;
            let pctx = pattern_type(p, &st, env).ok()?;
            type_of(&ctx.extended(&pctx), b, env)
        }
        Expr::Lambda(x, t, b) => Some(Type::arrow(t.clone(), type_of(&ctx.with(x.clone(), t.clone()), b, env)?)),
        Expr::Fix(_, t, _) => Some(t.clone()),
        Expr::App(f, _) => match type_of(ctx, f, env)? {
            Type::Arrow(_, cod) => Some(*cod),
            _ => None,
        },
    }
}

fn field_type(t: &Type, l: &Label) -> Result<Type> {
    t.field(l).cloned().ok_or_else(|| StaticsError::UnknownLabel { label: l.to_string(), ty: t.to_string() })
}

fn well_formed(t: &Type, env: &DataEnv) -> Result<()> {
    if env.well_formed(t) {
        Ok(())
    } else {
        Err(StaticsError::IllFormedType(t.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exhaustiveness {
    Ok,
    /// A description of a value no branch matches.
    Missing(String),
}

/// Exhaustiveness by the usefulness construction: the patterns are
/// exhaustive iff a wildcard row is not useful after them.
pub fn check_exhaustive(pats: &[&Pattern], ty: &Type, env: &DataEnv) -> Exhaustiveness {
    let rows: Vec<Vec<Norm>> = pats.iter().map(|p| vec![Norm::from(p)]).collect();
    match witness(&rows, std::slice::from_ref(ty), env) {
        None => Exhaustiveness::Ok,
        Some(mut w) => Exhaustiveness::Missing(w.remove(0).to_string()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Head {
    Bool(bool),
    Int(i64),
    Inj(Ctor),
    Record,
}

#[derive(Clone, Debug)]
enum Norm {
    Wild,
    Ctor(Head, Vec<Norm>),
}

impl From<&&Pattern> for Norm {
    fn from(p: &&Pattern) -> Norm {
        Norm::of(p)
    }
}

impl Norm {
    fn of(p: &Pattern) -> Norm {
        match p {
            Pattern::Wildcard | Pattern::Var(_) => Norm::Wild,
            Pattern::Alias(_, q) => Norm::of(q),
            Pattern::Const(Const::Bool(b)) => Norm::Ctor(Head::Bool(*b), vec![]),
            Pattern::Const(Const::Int(n)) => Norm::Ctor(Head::Int(*n), vec![]),
            Pattern::Record(fs) => Norm::Ctor(Head::Record, fs.iter().map(|(_, q)| Norm::of(q)).collect()),
            Pattern::Inj(c, None) => Norm::Ctor(Head::Inj(c.clone()), vec![]),
            Pattern::Inj(c, Some(q)) => Norm::Ctor(Head::Inj(c.clone()), vec![Norm::of(q)]),
        }
    }
}

/// A witness value description.
enum Wit {
    Any,
    Node(Head, Vec<Label>, Vec<Wit>),
}

impl std::fmt::Display for Wit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Wit::Any => f.write_str("_"),
            Wit::Node(Head::Bool(b), _, _) => write!(f, "{}", b),
            Wit::Node(Head::Int(n), _, _) => write!(f, "{}", n),
            Wit::Node(Head::Inj(c), _, args) if args.is_empty() => write!(f, "{}", c),
            Wit::Node(Head::Inj(c), _, args) => write!(f, "{}·({})", c, args[0]),
            Wit::Node(Head::Record, labels, args) => {
                f.write_str("{")?;
                for (i, (l, a)) in labels.iter().zip(args).enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}={}", l, a)?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Argument types and labels of a head constructor at type `ty`.
fn head_args(h: &Head, ty: &Type, env: &DataEnv) -> (Vec<Label>, Vec<Type>) {
    match (h, ty) {
        (Head::Record, Type::Record(fs)) => fs.iter().cloned().unzip(),
        (Head::Inj(c), _) => match env.ctor(c).and_then(|i| i.arg.clone()) {
            Some(t) => (vec![], vec![t]),
            None => (vec![], vec![]),
        },
        _ => (vec![], vec![]),
    }
}

/// The complete constructor signature of a type, if finite.
fn signature(ty: &Type, env: &DataEnv) -> Option<Vec<Head>> {
    match ty {
        Type::Bool => Some(vec![Head::Bool(true), Head::Bool(false)]),
        Type::Record(_) => Some(vec![Head::Record]),
        Type::Data(d) => env.ctors_of(d).map(|cs| cs.iter().map(|s| Head::Inj(s.ctor.clone())).collect()),
        Type::Int | Type::Arrow(..) => None,
    }
}

fn specialize(rows: &[Vec<Norm>], h: &Head, arity: usize) -> Vec<Vec<Norm>> {
    rows.iter()
        .filter_map(|row| {
            let (first, rest) = row.split_first()?;
            let mut out = match first {
                Norm::Wild => vec![Norm::Wild; arity],
                Norm::Ctor(g, args) if g == h => args.clone(),
                Norm::Ctor(..) => return None,
            };
            out.extend(rest.iter().cloned());
            Some(out)
        })
        .collect()
}

fn default_rows(rows: &[Vec<Norm>]) -> Vec<Vec<Norm>> {
    rows.iter().filter(|r| matches!(r[0], Norm::Wild)).map(|r| r[1..].to_vec()).collect()
}

/// A vector of witnesses, one per column, not matched by any row; `None`
/// when the rows cover everything.
fn witness(rows: &[Vec<Norm>], tys: &[Type], env: &DataEnv) -> Option<Vec<Wit>> {
    let Some((ty, rest_tys)) = tys.split_first() else {
        return if rows.is_empty() { Some(vec![]) } else { None };
    };
    let present: Vec<Head> = {
        let mut seen = Vec::new();
        for r in rows {
            if let Norm::Ctor(h, _) = &r[0] {
                if !seen.contains(h) {
                    seen.push(h.clone());
                }
            }
        }
        seen
    };
    let sig = signature(ty, env);
    let complete = sig.as_ref().is_some_and(|s| s.iter().all(|h| present.contains(h)));
    if complete {
        for h in sig.expect("complete signature") {
            let (labels, arg_tys) = head_args(&h, ty, env);
            let arity = arg_tys.len();
            let mut sub_tys = arg_tys;
            sub_tys.extend(rest_tys.iter().cloned());
            if let Some(mut w) = witness(&specialize(rows, &h, arity), &sub_tys, env) {
                let rest = w.split_off(arity);
                let mut out = vec![Wit::Node(h, labels, w)];
                out.extend(rest);
                return Some(out);
            }
        }
        None
    } else {
        let mut w = witness(&default_rows(rows), rest_tys, env)?;
        let head = missing_head(ty, sig.as_deref(), &present, env);
        w.insert(0, head);
        Some(w)
    }
}

fn missing_head(ty: &Type, sig: Option<&[Head]>, present: &[Head], env: &DataEnv) -> Wit {
    if present.is_empty() {
        return Wit::Any;
    }
    match sig {
        Some(s) => {
            let h = s
                .iter()
                .find(|h| !present.contains(h))
                .cloned()
                .expect("incomplete signature has a missing constructor");
            let (labels, args) = head_args(&h, ty, env);
            Wit::Node(h, labels, args.iter().map(|_| Wit::Any).collect())
        }
        None if *ty == Type::Int => {
            let used: HashSet<i64> = present
                .iter()
                .filter_map(|h| match h {
                    Head::Int(n) => Some(*n),
                    _ => None,
                })
                .collect();
            let n = (0..).find(|n| !used.contains(n)).expect("unbounded range");
            Wit::Node(Head::Int(n), vec![], vec![])
        }
        None => Wit::Any,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{CtorSig, PrimOp};

    pub(crate) fn opt_env() -> DataEnv {
        let mut env = DataEnv::new();
        env.add_datatype(
            "opt",
            vec![
                CtorSig { ctor: Ctor::new("NONE"), arg: None },
                CtorSig { ctor: Ctor::new("SOME"), arg: Some(Type::Int) },
            ],
        )
        .unwrap();
        env
    }

    fn opt() -> Type {
        Type::data("opt")
    }

    #[test]
    fn wildcard_binds_nothing() {
        assert!(pattern_type(&Pattern::Wildcard, &Type::Int, &DataEnv::new()).unwrap().is_empty());
    }

    #[test]
    fn alias_over_injection() {
        let p = Pattern::alias("x", Pattern::inj("SOME", Pattern::var("y")));
        let ctx = pattern_type(&p, &opt(), &opt_env()).unwrap();
        assert_eq!(ctx.get(&Var::named("x")), Some(&opt()));
        assert_eq!(ctx.get(&Var::named("y")), Some(&Type::Int));
        assert_eq!(ctx.len(), 2);
    }

    #[test]
    fn nonlinear_pattern_rejected() {
        let p = Pattern::tuple(vec![Pattern::var("a"), Pattern::var("a")]);
        let t = Type::tuple(vec![Type::Int, Type::Int]);
        assert!(matches!(pattern_type(&p, &t, &DataEnv::new()), Err(StaticsError::DuplicatePatternVariable(_))));
    }

    #[test]
    fn record_pattern_against_base_rejected() {
        let p = Pattern::tuple(vec![Pattern::var("a"), Pattern::var("b")]);
        assert!(matches!(pattern_type(&p, &Type::Int, &DataEnv::new()), Err(StaticsError::PatternTypeMismatch { .. })));
    }

    #[test]
    fn lambda_plus_one() {
        let x = Var::named("x");
        let e = Expr::lam(x, Type::Int, Expr::prim(PrimOp::Add, Expr::var("x"), Expr::int(1)));
        assert_eq!(
            typecheck(&TypingContext::initial(), &e, &DataEnv::new()).unwrap(),
            Type::arrow(Type::Int, Type::Int)
        );
    }

    #[test]
    fn annotated_fix_checks() {
        let t = Type::arrow(Type::Int, Type::Int);
        let e = Expr::fix(
            Var::named("f"),
            t.clone(),
            Expr::lam(Var::named("x"), Type::Int, Expr::app(Expr::var("f"), Expr::var("x"))),
        );
        let got = typecheck(&TypingContext::initial(), &e, &DataEnv::new()).unwrap();
        assert_eq!(got, t);
        // Re-checking the elaborated tree yields the same type.
        assert_eq!(typecheck(&TypingContext::initial(), &e, &DataEnv::new()).unwrap(), got);
    }

    #[test]
    fn bool_scrutinee_against_int_pattern() {
        let e = Expr::case(
            Expr::bool(true),
            vec![(Pattern::Const(Const::Int(1)), Expr::int(2)), (Pattern::Wildcard, Expr::int(3))],
        );
        assert!(typecheck(&TypingContext::initial(), &e, &DataEnv::new()).is_err());
    }

    #[test]
    fn exhaustive_options() {
        let env = opt_env();
        let ps = [Pattern::inj("SOME", Pattern::var("x")), Pattern::inj0("NONE")];
        let refs: Vec<&Pattern> = ps.iter().collect();
        assert_eq!(check_exhaustive(&refs, &opt(), &env), Exhaustiveness::Ok);
    }

    #[test]
    fn int_constants_never_exhaustive() {
        let ps = [Pattern::Const(Const::Int(1)), Pattern::Const(Const::Int(2))];
        let refs: Vec<&Pattern> = ps.iter().collect();
        assert_eq!(check_exhaustive(&refs, &Type::Int, &DataEnv::new()), Exhaustiveness::Missing("0".into()));
    }

    #[test]
    fn booleans_exhaustive_with_both_literals() {
        let ps = [Pattern::Const(Const::Bool(true)), Pattern::Const(Const::Bool(false))];
        let refs: Vec<&Pattern> = ps.iter().collect();
        assert_eq!(check_exhaustive(&refs, &Type::Bool, &DataEnv::new()), Exhaustiveness::Ok);
        assert!(matches!(check_exhaustive(&refs[..1], &Type::Bool, &DataEnv::new()), Exhaustiveness::Missing(_)));
    }

    fn pair_rows() -> Vec<Pattern> {
        vec![
            Pattern::tuple(vec![Pattern::inj0("NONE"), Pattern::Wildcard]),
            Pattern::tuple(vec![Pattern::Wildcard, Pattern::inj0("NONE")]),
            Pattern::tuple(vec![Pattern::inj("SOME", Pattern::var("a")), Pattern::inj("SOME", Pattern::var("b"))]),
        ]
    }

    /// Brute force over the 2x2 constructor grid: every pair shape must be
    /// matched by some row, with ints standing in by a single value.
    fn grid_covered(rows: &[Pattern]) -> bool {
        use crate::dynamics::{match_value, MatchResult};
        let vals = [Expr::inj0("NONE"), Expr::inj("SOME", Expr::int(0))];
        vals.iter().all(|a| {
            vals.iter().all(|b| {
                let v = Expr::tuple(vec![a.clone(), b.clone()]);
                rows.iter().any(|p| matches!(match_value(&v, p), MatchResult::Matched(_)))
            })
        })
    }

    #[test]
    fn pair_of_options_grid() {
        let env = opt_env();
        let t = Type::tuple(vec![opt(), opt()]);
        let rows = pair_rows();
        let refs: Vec<&Pattern> = rows.iter().collect();
        assert!(grid_covered(&rows));
        assert_eq!(check_exhaustive(&refs, &t, &env), Exhaustiveness::Ok);
        // Every row subset agrees with the brute-force grid.
        for mask in 0u32..8 {
            let sub: Vec<Pattern> =
                rows.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, p)| p.clone()).collect();
            let refs: Vec<&Pattern> = sub.iter().collect();
            let verdict = check_exhaustive(&refs, &t, &env) == Exhaustiveness::Ok;
            assert_eq!(verdict, grid_covered(&sub), "mask {mask}");
        }
    }

    #[test]
    fn missing_case_reported_with_witness() {
        let env = opt_env();
        let e = Expr::case(Expr::inj0("NONE"), vec![(Pattern::inj("SOME", Pattern::var("x")), Expr::var("x"))]);
        match typecheck(&TypingContext::initial(), &e, &env) {
            Err(StaticsError::NonExhaustiveCase { witness }) => assert_eq!(witness, "NONE"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
