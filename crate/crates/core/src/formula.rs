//! Logic formulas over terms, the output language of formula generation.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

use crate::pretty::Namer;
use crate::syntax::{Const, Ctor, DataEnv, Expr, Label, Pattern, PrimOp, Type, TypingContext, Var};

/// The expression and pattern fragment allowed at formula leaves.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Const(Const),
    Var(Var),
    Record(Vec<(Label, Term)>),
    Proj(Box<Term>, Label),
    Inj(Ctor, Option<Box<Term>>),
    Wildcard,
    Alias(Var, Box<Term>),
    Prim(PrimOp),
    PrimApp(PrimOp, Box<Term>),
}

impl Term {
    /// The term an expression denotes, if it is one.
    pub fn from_expr(e: &Expr) -> Option<Term> {
        Some(match e {
            Expr::Const(c) => Term::Const(*c),
            Expr::Var(x) => Term::Var(x.clone()),
            Expr::Record(fs) => {
                Term::Record(fs.iter().map(|(l, e)| Some((l.clone(), Term::from_expr(e)?))).collect::<Option<_>>()?)
            }
            Expr::Proj(e, l) => Term::Proj(Box::new(Term::from_expr(e)?), l.clone()),
            Expr::Inj(c, None) => Term::Inj(c.clone(), None),
            Expr::Inj(c, Some(a)) => Term::Inj(c.clone(), Some(Box::new(Term::from_expr(a)?))),
            Expr::Prim(o) => Term::Prim(*o),
            Expr::App(f, a) => match &**f {
                Expr::Prim(o) => Term::PrimApp(*o, Box::new(Term::from_expr(a)?)),
                _ => return None,
            },
            Expr::Case(..) | Expr::Lambda(..) | Expr::Fix(..) => return None,
        })
    }

    pub fn from_pattern(p: &Pattern) -> Term {
        match p {
            Pattern::Wildcard => Term::Wildcard,
            Pattern::Var(x) => Term::Var(x.clone()),
            Pattern::Const(c) => Term::Const(*c),
            Pattern::Record(fs) => Term::Record(fs.iter().map(|(l, p)| (l.clone(), Term::from_pattern(p))).collect()),
            Pattern::Alias(x, p) => Term::Alias(x.clone(), Box::new(Term::from_pattern(p))),
            Pattern::Inj(c, None) => Term::Inj(c.clone(), None),
            Pattern::Inj(c, Some(p)) => Term::Inj(c.clone(), Some(Box::new(Term::from_pattern(p)))),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Const(_) | Term::Wildcard | Term::Prim(_) | Term::Inj(_, None) => {}
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Record(fs) => fs.iter().for_each(|(_, t)| t.vars(out)),
            Term::Proj(t, _) | Term::Inj(_, Some(t)) | Term::PrimApp(_, t) => t.vars(out),
            Term::Alias(x, t) => {
                out.insert(x.clone());
                t.vars(out);
            }
        }
    }

    /// Whether the term contains a wildcard or alias, so that equality with
    /// it is not plain syntactic equality.
    pub fn has_pattern_parts(&self) -> bool {
        match self {
            Term::Wildcard | Term::Alias(..) => true,
            Term::Const(_) | Term::Var(_) | Term::Prim(_) | Term::Inj(_, None) => false,
            Term::Record(fs) => fs.iter().any(|(_, t)| t.has_pattern_parts()),
            Term::Proj(t, _) | Term::Inj(_, Some(t)) | Term::PrimApp(_, t) => t.has_pattern_parts(),
        }
    }

    /// The term with every variable in `local` replaced by a wildcard, so
    /// that `s ≡ t.erase(local)` holds iff `s ≡ t` holds for some values of
    /// the `local` variables. Patterns are linear, which makes this exact.
    pub fn erase(&self, local: &BTreeSet<Var>) -> Term {
        match self {
            Term::Var(x) if local.contains(x) => Term::Wildcard,
            Term::Const(_) | Term::Var(_) | Term::Wildcard | Term::Prim(_) | Term::Inj(_, None) => self.clone(),
            Term::Record(fs) => Term::Record(fs.iter().map(|(l, t)| (l.clone(), t.erase(local))).collect()),
            Term::Proj(t, l) => Term::Proj(Box::new(t.erase(local)), l.clone()),
            Term::Inj(c, Some(t)) => Term::Inj(c.clone(), Some(Box::new(t.erase(local)))),
            Term::PrimApp(o, t) => Term::PrimApp(*o, Box::new(t.erase(local))),
            Term::Alias(x, t) if local.contains(x) => t.erase(local),
            Term::Alias(x, t) => Term::Alias(x.clone(), Box::new(t.erase(local))),
        }
    }

    /// The type of a term, when it is determined by the term alone.
    pub fn infer(&self, ctx: &TypingContext, env: &DataEnv) -> Option<Type> {
        match self {
            Term::Const(c) => Some(c.base_type()),
            Term::Var(x) => ctx.get(x).cloned(),
            Term::Record(fs) => Some(Type::Record(
                fs.iter().map(|(l, t)| Some((l.clone(), t.infer(ctx, env)?))).collect::<Option<_>>()?,
            )),
            Term::Proj(t, l) => t.infer(ctx, env)?.field(l).cloned(),
            Term::Inj(c, _) => env.ctor(c).map(|i| Type::Data(i.datatype.clone())),
            Term::Wildcard => None,
            Term::Alias(x, t) => ctx.get(x).cloned().or_else(|| t.infer(ctx, env)),
            Term::Prim(o) => Some(o.signature()),
            Term::PrimApp(o, _) => Some(o.result_type()),
        }
    }
}

pub fn is_term(e: &Expr) -> bool {
    Term::from_expr(e).is_some()
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut vs = BTreeSet::new();
        self.vars(&mut vs);
        let namer = Namer::new(vs.iter());
        let mut s = String::new();
        write_term(&mut s, self, &namer, 0);
        f.write_str(&s)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    True,
    False,
    /// `lhs ≡ rhs` at type `ty`.
    TermEq {
        lhs: Term,
        rhs: Term,
        ty: Type,
    },
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
}

impl Formula {
    pub fn eq(lhs: Term, rhs: Term, ty: Type) -> Formula {
        Formula::TermEq { lhs, rhs, ty }
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::True, x) | (x, Formula::True) => x,
            (Formula::False, _) | (_, Formula::False) => Formula::False,
            (a, b) => Formula::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::False, x) | (x, Formula::False) => x,
            (Formula::True, _) | (_, Formula::True) => Formula::True,
            (a, b) => Formula::Or(Box::new(a), Box::new(b)),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::True, x) => x,
            (_, Formula::True) | (Formula::False, _) => Formula::True,
            (a, b) => Formula::Implies(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        match a {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            a => Formula::Not(Box::new(a)),
        }
    }

    /// Right-nested conjunction; `True` when empty.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        let v: Vec<Formula> = items.into_iter().collect();
        v.into_iter()
            .rev()
            .fold(None, |acc, f| match acc {
                None => Some(f),
                Some(rest) => Some(Formula::and(f, rest)),
            })
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `False` when empty.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().fold(Formula::False, Formula::or)
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::TermEq { .. } => 1,
            Formula::Not(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Flattens a left- or right-nested disjunction.
    pub fn disjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            if let Formula::Or(a, b) = f {
                go(a, out);
                go(b, out);
            } else {
                out.push(f);
            }
        }
        go(self, &mut out);
        out
    }

    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            if let Formula::And(a, b) = f {
                go(a, out);
                go(b, out);
            } else {
                out.push(f);
            }
        }
        go(self, &mut out);
        out
    }

    /// Renames variables; used to canonicalize local names.
    pub fn rename(&self, ren: &HashMap<Var, Var>) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::TermEq { lhs, rhs, ty } => {
                Formula::TermEq { lhs: rename_term(lhs, ren), rhs: rename_term(rhs, ren), ty: ty.clone() }
            }
            Formula::And(a, b) => Formula::And(Box::new(a.rename(ren)), Box::new(b.rename(ren))),
            Formula::Or(a, b) => Formula::Or(Box::new(a.rename(ren)), Box::new(b.rename(ren))),
            Formula::Implies(a, b) => Formula::Implies(Box::new(a.rename(ren)), Box::new(b.rename(ren))),
            Formula::Not(a) => Formula::Not(Box::new(a.rename(ren))),
        }
    }

    /// Variables in first-occurrence order, left to right.
    pub fn vars_in_order(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        fn term(t: &Term, out: &mut Vec<Var>, seen: &mut std::collections::HashSet<Var>) {
            match t {
                Term::Const(_) | Term::Wildcard | Term::Prim(_) | Term::Inj(_, None) => {}
                Term::Var(x) => {
                    if seen.insert(x.clone()) {
                        out.push(x.clone());
                    }
                }
                Term::Record(fs) => fs.iter().for_each(|(_, t)| term(t, out, seen)),
                Term::Proj(t, _) | Term::Inj(_, Some(t)) | Term::PrimApp(_, t) => term(t, out, seen),
                Term::Alias(x, t) => {
                    if seen.insert(x.clone()) {
                        out.push(x.clone());
                    }
                    term(t, out, seen);
                }
            }
        }
        fn go(f: &Formula, out: &mut Vec<Var>, seen: &mut std::collections::HashSet<Var>) {
            match f {
                Formula::True | Formula::False => {}
                Formula::TermEq { lhs, rhs, .. } => {
                    term(lhs, out, seen);
                    term(rhs, out, seen);
                }
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    go(a, out, seen);
                    go(b, out, seen);
                }
                Formula::Not(a) => go(a, out, seen),
            }
        }
        go(self, &mut out, &mut seen);
        out
    }
}

fn rename_term(t: &Term, ren: &HashMap<Var, Var>) -> Term {
    let look = |x: &Var| ren.get(x).cloned().unwrap_or_else(|| x.clone());
    match t {
        Term::Const(_) | Term::Wildcard | Term::Prim(_) | Term::Inj(_, None) => t.clone(),
        Term::Var(x) => Term::Var(look(x)),
        Term::Record(fs) => Term::Record(fs.iter().map(|(l, t)| (l.clone(), rename_term(t, ren))).collect()),
        Term::Proj(t, l) => Term::Proj(Box::new(rename_term(t, ren)), l.clone()),
        Term::Inj(c, Some(t)) => Term::Inj(c.clone(), Some(Box::new(rename_term(t, ren)))),
        Term::PrimApp(o, t) => Term::PrimApp(*o, Box::new(rename_term(t, ren))),
        Term::Alias(x, t) => Term::Alias(look(x), Box::new(rename_term(t, ren))),
    }
}

pub fn formula_free_vars(f: &Formula) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    fn go(f: &Formula, out: &mut BTreeSet<Var>) {
        match f {
            Formula::True | Formula::False => {}
            Formula::TermEq { lhs, rhs, .. } => {
                lhs.vars(out);
                rhs.vars(out);
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                go(a, out);
                go(b, out);
            }
            Formula::Not(a) => go(a, out),
        }
    }
    go(f, &mut out);
    out
}

/// Erases variable stamps to names in first-occurrence order (`v0`, `v1`,
/// ...), giving a form that is equal for alpha-equivalent formulas.
pub fn erase_stamps(f: &Formula) -> Formula {
    let ren: HashMap<Var, Var> =
        f.vars_in_order().into_iter().enumerate().map(|(i, v)| (v, Var::named(&format!("v{i}")))).collect();
    f.rename(&ren)
}

const T_ADD: u8 = 1;
const T_MUL: u8 = 2;
const T_ATOM: u8 = 3;

fn write_term(out: &mut String, t: &Term, namer: &Namer, prec: u8) {
    match t {
        Term::Const(Const::Int(n)) => {
            let _ = write!(out, "{n}");
        }
        Term::Const(Const::Bool(b)) => {
            let _ = write!(out, "{b}");
        }
        Term::Var(x) => out.push_str(&namer.show(x)),
        Term::Wildcard => out.push('_'),
        Term::Prim(o) => {
            let _ = write!(out, "({})", o.symbol());
        }
        Term::Record(fs) => {
            let tuple = fs.len() >= 2 && fs.iter().enumerate().all(|(i, (l, _))| *l == Label::pos(i + 1));
            out.push(if tuple { '(' } else { '{' });
            for (i, (l, t)) in fs.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if !tuple {
                    let _ = write!(out, "{l}=");
                }
                write_term(out, t, namer, 0);
            }
            out.push(if tuple { ')' } else { '}' });
        }
        Term::Proj(t, l) => {
            write_term(out, t, namer, T_ATOM);
            let _ = write!(out, ".{l}");
        }
        Term::Inj(c, None) => out.push_str(c.as_str()),
        Term::Inj(c, Some(a)) => {
            let _ = write!(out, "{c}·");
            write_term(out, a, namer, T_ATOM);
        }
        Term::Alias(x, t) => {
            if prec > 0 {
                out.push('(');
            }
            let _ = write!(out, "{} as ", namer.show(x));
            write_term(out, t, namer, T_ATOM);
            if prec > 0 {
                out.push(')');
            }
        }
        Term::PrimApp(o, a) => {
            let binary = match &**a {
                Term::Record(fs) if fs.len() == 2 && fs[0].0 == Label::pos(1) && fs[1].0 == Label::pos(2) => {
                    Some((&fs[0].1, &fs[1].1))
                }
                _ => None,
            };
            match binary {
                Some((l, r)) => {
                    let p = match o {
                        PrimOp::Mul => T_MUL,
                        PrimOp::Add | PrimOp::Sub => T_ADD,
                        _ => 0,
                    };
                    // Parenthesize every nested infix application at atom level,
                    // matching the displayed `SOME·(m1+n1)` form.
                    let wrap = prec > p;
                    if wrap {
                        out.push('(');
                    }
                    write_term(out, l, namer, p);
                    out.push_str(o.symbol());
                    write_term(out, r, namer, p + 1);
                    if wrap {
                        out.push(')');
                    }
                }
                None => {
                    let _ = write!(out, "({}) ", o.symbol());
                    write_term(out, a, namer, T_ATOM);
                }
            }
        }
    }
}

fn write_formula(out: &mut String, f: &Formula, namer: &Namer, top: bool) {
    let paren = |out: &mut String, body: &dyn Fn(&mut String)| {
        if top {
            body(out);
        } else {
            out.push('(');
            body(out);
            out.push(')');
        }
    };
    match f {
        Formula::True => out.push_str("True"),
        Formula::False => out.push_str("False"),
        Formula::TermEq { lhs, rhs, .. } => {
            write_term(out, lhs, namer, 0);
            out.push('≡');
            write_term(out, rhs, namer, 0);
        }
        Formula::Not(inner) => match &**inner {
            Formula::TermEq { lhs, rhs, .. } => {
                write_term(out, lhs, namer, 0);
                out.push('≢');
                write_term(out, rhs, namer, 0);
            }
            g => {
                out.push('¬');
                write_formula(out, g, namer, false);
            }
        },
        Formula::And(..) => paren(out, &|out| {
            for (i, c) in f.conjuncts().iter().enumerate() {
                if i > 0 {
                    out.push_str(" ∧ ");
                }
                write_formula(out, c, namer, false);
            }
        }),
        Formula::Or(..) => paren(out, &|out| {
            for (i, c) in f.disjuncts().iter().enumerate() {
                if i > 0 {
                    out.push_str(" ∨ ");
                }
                write_formula(out, c, namer, false);
            }
        }),
        Formula::Implies(a, b) => paren(out, &|out| {
            write_formula(out, a, namer, false);
            out.push_str(" ⇒ ");
            write_formula(out, b, namer, false);
        }),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs = self.vars_in_order();
        let namer = Namer::new(vs.iter());
        let mut s = String::new();
        write_formula(&mut s, self, &namer, true);
        f.write_str(&s)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(n: &str) -> Term {
        Term::Var(Var::named(n))
    }

    #[test]
    fn prim_application_is_term() {
        let e = Expr::app(Expr::Prim(PrimOp::Add), Expr::var("t"));
        assert!(is_term(&e));
    }

    #[test]
    fn lambda_is_not_term() {
        assert!(!is_term(&Expr::lam(Var::named("x"), Type::Int, Expr::var("x"))));
    }

    #[test]
    fn record_of_injection_and_wildcard_is_term() {
        // Record rule over an injection of a variable and a wildcard.
        let p = Pattern::tuple(vec![Pattern::inj("i", Pattern::var("x")), Pattern::Wildcard]);
        let t = Term::from_pattern(&p);
        assert_eq!(
            t,
            Term::Record(vec![
                (Label::pos(1), Term::Inj(Ctor::new("i"), Some(Box::new(var("x"))))),
                (Label::pos(2), Term::Wildcard),
            ])
        );
        assert!(t.has_pattern_parts());
    }

    #[test]
    fn application_of_variable_is_not_term() {
        assert!(!is_term(&Expr::app(Expr::var("f"), Expr::int(1))));
    }

    #[test]
    fn free_vars_of_formulas() {
        assert!(formula_free_vars(&Formula::True).is_empty());
        let f = Formula::eq(var("x"), var("y"), Type::Int);
        assert_eq!(formula_free_vars(&f), BTreeSet::from([Var::named("x"), Var::named("y")]));
    }

    #[test]
    fn smart_constructors_simplify_literals() {
        let e = Formula::eq(var("x"), var("y"), Type::Int);
        assert_eq!(Formula::and(Formula::True, e.clone()), e);
        assert_eq!(Formula::or(Formula::False, e.clone()), e);
        assert_eq!(Formula::and(Formula::False, e.clone()), Formula::False);
        assert_eq!(Formula::and_all(vec![]), Formula::True);
        assert_eq!(Formula::or_all(vec![]), Formula::False);
    }

    #[test]
    fn display_uses_equivalence_symbols() {
        let g = Formula::not(Formula::eq(var("y"), var("b"), Type::Int));
        let h = Formula::eq(var("y"), Term::Inj(Ctor::new("NONE"), None), Type::data("opt"));
        let f = Formula::implies(Formula::and(g, h), Formula::True);
        assert_eq!(f.to_string(), "True");
        let f = Formula::implies(
            Formula::and(
                Formula::not(Formula::eq(var("y"), var("b"), Type::Int)),
                Formula::eq(var("y"), var("c"), Type::Int),
            ),
            Formula::eq(var("a"), var("a"), Type::Int),
        );
        assert_eq!(f.to_string(), "(y≢b ∧ y≡c) ⇒ a≡a");
    }

    #[test]
    fn stamp_erasure_identifies_alpha_variants() {
        let a = Var::fresh("m");
        let b = Var::fresh("m");
        let f1 = Formula::eq(Term::Var(a), Term::Const(Const::Int(1)), Type::Int);
        let f2 = Formula::eq(Term::Var(b), Term::Const(Const::Int(1)), Type::Int);
        assert_ne!(f1, f2);
        assert_eq!(erase_stamps(&f1), erase_stamps(&f2));
    }
}
