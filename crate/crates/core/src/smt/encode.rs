//! SMT-LIB2 encoding of terms, formulas and validity queries.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;

use super::sorts::{quote, SortEnv};
use super::EncodeError;
use crate::formula::{formula_free_vars, Formula, Term};
use crate::syntax::{Const, DataEnv, Label, PrimOp, Type, TypingContext, Var};

/// Names of declared constants, by variable.
pub struct Names {
    vars: HashMap<Var, String>,
}

impl Names {
    fn var(&self, x: &Var) -> Result<&str, EncodeError> {
        self.vars.get(x).map(String::as_str).ok_or_else(|| EncodeError::UnboundVariable(format!("{x:?}")))
    }
}

fn prim_name(o: PrimOp) -> String {
    quote(&format!("prim{}", o.symbol()))
}

fn smt_op(o: PrimOp) -> &'static str {
    match o {
        PrimOp::Add => "+",
        PrimOp::Sub => "-",
        PrimOp::Mul => "*",
        PrimOp::Lt => "<",
        PrimOp::Gt => ">",
        PrimOp::Le => "<=",
        PrimOp::Ge => ">=",
    }
}

struct Encoder<'a> {
    ctx: &'a TypingContext,
    env: &'a DataEnv,
    sorts: &'a SortEnv,
    names: &'a Names,
}

impl Encoder<'_> {
    fn ty(&self, t: &Term) -> Result<Type, EncodeError> {
        t.infer(self.ctx, self.env).ok_or_else(|| EncodeError::UnsupportedConstruct(format!("cannot type {t:?}")))
    }

    fn term(&self, t: &Term) -> Result<String, EncodeError> {
        Ok(match t {
            Term::Const(Const::Int(n)) if *n < 0 => format!("(- {})", n.unsigned_abs()),
            Term::Const(Const::Int(n)) => n.to_string(),
            Term::Const(Const::Bool(b)) => b.to_string(),
            Term::Var(x) => self.names.var(x)?.to_string(),
            Term::Record(fs) => {
                let ty = self.ty(t)?;
                let ctor = self.sorts.record_ctor(&ty);
                if fs.is_empty() {
                    ctor
                } else {
                    let mut s = format!("({ctor}");
                    for (_, f) in fs {
                        let _ = write!(s, " {}", self.term(f)?);
                    }
                    s.push(')');
                    s
                }
            }
            Term::Proj(r, l) => {
                let rt = self.ty(r)?;
                if rt.field(l).is_none() {
                    return Err(EncodeError::UnsupportedConstruct(format!("no field {l} in {rt}")));
                }
                format!("({} {})", self.sorts.record_selector(&rt, l), self.term(r)?)
            }
            Term::Inj(c, None) => self.sorts.ctor(c),
            Term::Inj(c, Some(a)) => format!("({} {})", self.sorts.ctor(c), self.term(a)?),
            Term::Prim(o) => prim_name(*o),
            Term::PrimApp(o, a) => {
                let (l, r) = match &**a {
                    Term::Record(fs) if fs.len() == 2 => (self.term(&fs[0].1)?, self.term(&fs[1].1)?),
                    _ => {
                        let at = o.signature();
                        let Type::Arrow(dom, _) = &at else { unreachable!() };
                        let arg = self.term(a)?;
                        (
                            format!("({} {arg})", self.sorts.record_selector(dom, &Label::pos(1))),
                            format!("({} {arg})", self.sorts.record_selector(dom, &Label::pos(2))),
                        )
                    }
                };
                format!("({} {l} {r})", smt_op(*o))
            }
            Term::Wildcard | Term::Alias(..) => {
                return Err(EncodeError::NonTermInput(format!("{t:?}")));
            }
        })
    }

    /// `p ≡ s` where `p` may contain wildcards and aliases and `s` is an
    /// already encoded expression of type `ty`.
    fn matches(&self, p: &Term, s: &str, ty: &Type) -> Result<String, EncodeError> {
        if !p.has_pattern_parts() {
            return Ok(format!("(= {} {s})", self.term(p)?));
        }
        Ok(match p {
            Term::Wildcard => "true".into(),
            Term::Alias(x, q) => {
                let x = self.names.var(x)?.to_string();
                format!("(and {} {})", self.matches(q, &x, ty)?, self.matches(q, s, ty)?)
            }
            Term::Record(fs) => {
                let mut out = String::from("(and");
                for (l, f) in fs {
                    let ft = ty
                        .field(l)
                        .ok_or_else(|| EncodeError::UnsupportedConstruct(format!("no field {l} in {ty}")))?;
                    let sel = format!("({} {s})", self.sorts.record_selector(ty, l));
                    let _ = write!(out, " {}", self.matches(f, &sel, ft)?);
                }
                out.push(')');
                out
            }
            Term::Inj(c, Some(q)) => {
                let at = self
                    .env
                    .ctor(c)
                    .and_then(|i| i.arg.clone())
                    .ok_or_else(|| EncodeError::UnsupportedConstruct(format!("constructor {c}")))?;
                let sel = format!("({} {s})", self.sorts.ctor_selector(c));
                format!("(and ({} {s}) {})", self.sorts.tester(c), self.matches(q, &sel, &at)?)
            }
            _ => return Err(EncodeError::UnsupportedConstruct(format!("pattern parts in {p:?}"))),
        })
    }

    fn eq(&self, l: &Term, r: &Term, ty: &Type) -> Result<String, EncodeError> {
        match (l.has_pattern_parts(), r.has_pattern_parts()) {
            (false, false) => Ok(format!("(= {} {})", self.term(l)?, self.term(r)?)),
            (true, false) => self.matches(l, &self.term(r)?, ty),
            (false, true) => self.matches(r, &self.term(l)?, ty),
            (true, true) => match (l, r) {
                (Term::Wildcard, _) | (_, Term::Wildcard) => Ok("true".into()),
                _ => Err(EncodeError::UnsupportedConstruct(format!("{l:?} ≡ {r:?}"))),
            },
        }
    }

    fn formula(&self, f: &Formula, out: &mut String) -> Result<(), EncodeError> {
        match f {
            Formula::True => out.push_str("true"),
            Formula::False => out.push_str("false"),
            Formula::TermEq { lhs, rhs, ty } => out.push_str(&self.eq(lhs, rhs, ty)?),
            Formula::Not(a) => {
                out.push_str("(not ");
                if let Formula::TermEq { lhs, rhs, ty } = &**a {
                    // A failed match: no values of the pattern's own
                    // variables make the scrutinee equal to it.
                    let (mut own, mut scrut) = (BTreeSet::new(), BTreeSet::new());
                    rhs.vars(&mut own);
                    lhs.vars(&mut scrut);
                    let own: BTreeSet<Var> = own.difference(&scrut).cloned().collect();
                    out.push_str(&self.eq(lhs, &rhs.erase(&own), ty)?);
                    out.push(')');
                    return Ok(());
                }
                self.formula(a, out)?;
                out.push(')');
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                let op = match f {
                    Formula::And(..) => "and",
                    Formula::Or(..) => "or",
                    _ => "=>",
                };
                let _ = write!(out, "({op} ");
                self.formula(a, out)?;
                out.push(' ');
                self.formula(b, out)?;
                out.push(')');
            }
        }
        Ok(())
    }
}

fn collect_types(f: &Formula, out: &mut Vec<Type>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::TermEq { ty, .. } => out.push(ty.clone()),
        Formula::Not(a) => collect_types(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_types(a, out);
            collect_types(b, out);
        }
    }
}

fn collect_prims(t: &Term, out: &mut Vec<PrimOp>) {
    match t {
        Term::Prim(o) => out.push(*o),
        Term::Record(fs) => fs.iter().for_each(|(_, t)| collect_prims(t, out)),
        Term::Proj(t, _) | Term::Inj(_, Some(t)) | Term::PrimApp(_, t) | Term::Alias(_, t) => collect_prims(t, out),
        _ => {}
    }
}

fn formula_prims(f: &Formula, out: &mut Vec<PrimOp>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::TermEq { lhs, rhs, .. } => {
            collect_prims(lhs, out);
            collect_prims(rhs, out);
        }
        Formula::Not(a) => formula_prims(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            formula_prims(a, out);
            formula_prims(b, out);
        }
    }
}

/// Encodes `σ` as a refutation query: declarations, `(assert (not σ))`
/// and `(check-sat)`. Constants are named by first occurrence, so
/// alpha-equivalent inputs give identical scripts.
pub fn encode_formula(f: &Formula, ctx: &TypingContext, env: &DataEnv) -> Result<String, EncodeError> {
    let order = f.vars_in_order();
    let free = formula_free_vars(f);
    debug_assert_eq!(order.len(), free.len());
    let mut types = Vec::new();
    for x in &order {
        let t = ctx.get(x).ok_or_else(|| EncodeError::UnboundVariable(format!("{x:?}")))?;
        types.push(t.clone());
    }
    collect_types(f, &mut types);
    let mut prims = Vec::new();
    formula_prims(f, &mut prims);
    prims.sort();
    prims.dedup();
    types.extend(prims.iter().map(|o| o.signature()));
    let sorts = SortEnv::build(env, types)?;

    let names =
        Names { vars: order.iter().enumerate().map(|(i, x)| (x.clone(), quote(&format!("{}!{i}", x.name)))).collect() };
    let enc = Encoder { ctx, env, sorts: &sorts, names: &names };
    let mut body = String::new();
    enc.formula(f, &mut body)?;

    let mut out = String::new();
    out.push_str(&sorts.declarations());
    for x in &order {
        let _ = writeln!(out, "(declare-const {} {})", names.vars[x], sorts.sort(ctx.get(x).expect("checked")));
    }
    for o in &prims {
        let _ = writeln!(out, "(declare-const {} {})", prim_name(*o), sorts.sort(&o.signature()));
    }
    let _ = writeln!(out, "(assert (not {body}))");
    out.push_str("(check-sat)\n");
    Ok(out)
}

/// Encodes one term. Variables are named as in [`encode_formula`] for a
/// formula mentioning them in the given order.
pub fn encode_term(t: &Term, ctx: &TypingContext, env: &DataEnv) -> Result<String, EncodeError> {
    let mut vars = std::collections::BTreeSet::new();
    t.vars(&mut vars);
    let mut types: Vec<Type> = vars.iter().filter_map(|x| ctx.get(x).cloned()).collect();
    if let Some(ty) = t.infer(ctx, env) {
        types.push(ty);
    }
    let sorts = SortEnv::build(env, types)?;
    let names =
        Names { vars: vars.iter().enumerate().map(|(i, x)| (x.clone(), quote(&format!("{}!{i}", x.name)))).collect() };
    Encoder { ctx, env, sorts: &sorts, names: &names }.term(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Ctor, CtorSig, Expr};

    fn opt_env() -> DataEnv {
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

    fn x() -> Var {
        Var::named("x")
    }

    #[test]
    fn encode_addition() {
        let ctx: TypingContext = [(x(), Type::Int)].into_iter().collect();
        let t = Term::from_expr(&Expr::prim(PrimOp::Add, Expr::Var(x()), Expr::int(1))).unwrap();
        assert_eq!(encode_term(&t, &ctx, &DataEnv::new()).unwrap(), "(+ |x!0| 1)");
    }

    #[test]
    fn encode_some_of_sum() {
        let ctx: TypingContext = [(x(), Type::Int)].into_iter().collect();
        let e = Expr::inj("SOME", Expr::prim(PrimOp::Add, Expr::Var(x()), Expr::int(-2)));
        let t = Term::from_expr(&e).unwrap();
        assert_eq!(encode_term(&t, &ctx, &opt_env()).unwrap(), "(|SOME| (+ |x!0| (- 2)))");
    }

    #[test]
    fn encode_pair_record() {
        let ctx: TypingContext = [(x(), Type::Int), (Var::named("y"), Type::Bool)].into_iter().collect();
        let t = Term::from_expr(&Expr::tuple(vec![Expr::Var(x()), Expr::var("y")])).unwrap();
        assert_eq!(encode_term(&t, &ctx, &DataEnv::new()).unwrap(), "(|mk{1:int,2:bool}| |x!0| |y!1|)");
    }

    #[test]
    fn wildcard_equivalence_is_true() {
        let ctx: TypingContext = [(x(), Type::Int)].into_iter().collect();
        let f = Formula::eq(Term::Var(x()), Term::Wildcard, Type::Int);
        let s = encode_formula(&f, &ctx, &DataEnv::new()).unwrap();
        assert!(s.contains("(assert (not true))"), "{s}");
    }

    #[test]
    fn alias_expands_to_conjunction() {
        let o = Var::named("o");
        let a = Var::named("a");
        let ctx: TypingContext = [(o.clone(), Type::data("opt")), (a.clone(), Type::data("opt"))].into_iter().collect();
        let pat = Term::Alias(a, Box::new(Term::Inj(Ctor::new("SOME"), Some(Box::new(Term::Wildcard)))));
        let f = Formula::eq(Term::Var(o), pat, Type::data("opt"));
        let s = encode_formula(&f, &ctx, &opt_env()).unwrap();
        assert!(s.contains("(and (and ((_ is |SOME|) |a!1|) true) (and ((_ is |SOME|) |o!0|) true))"), "{s}");
    }

    #[test]
    fn alpha_variants_encode_identically() {
        let a = Var::fresh("m");
        let b = Var::fresh("m");
        let mk = |v: &Var| {
            let ctx: TypingContext = [(v.clone(), Type::Int)].into_iter().collect();
            let f = Formula::eq(Term::Var(v.clone()), Term::Const(Const::Int(3)), Type::Int);
            encode_formula(&f, &ctx, &DataEnv::new()).unwrap()
        };
        assert_eq!(mk(&a), mk(&b));
    }

    #[test]
    fn unbound_variable_is_error() {
        let f = Formula::eq(Term::Var(x()), Term::Const(Const::Int(3)), Type::Int);
        assert!(matches!(
            encode_formula(&f, &TypingContext::new(), &DataEnv::new()),
            Err(EncodeError::UnboundVariable(_))
        ));
    }
}
