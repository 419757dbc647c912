//! Human-readable printing of core syntax.
//!
//! Variables print by name; a stamp suffix (`m#12`) is added only when two
//! distinct variables in the printed object share a name.

use std::borrow::Cow;
use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write};

use crate::syntax::{Const, Expr, Label, Name, Pattern, PrimOp, Type, Var};

/// Decides how each variable is displayed within one printed object.
#[derive(Debug, Default, Clone)]
pub struct Namer {
    collide: HashSet<Name>,
}

impl Namer {
    pub fn new<'a>(vars: impl IntoIterator<Item = &'a Var>) -> Self {
        let mut seen: HashMap<&Name, &Var> = HashMap::new();
        let mut collide = HashSet::new();
        for v in vars {
            match seen.get(&v.name) {
                Some(prev) if *prev != v => {
                    collide.insert(v.name.clone());
                }
                Some(_) => {}
                None => {
                    seen.insert(&v.name, v);
                }
            }
        }
        Namer { collide }
    }

    pub fn for_expr(e: &Expr) -> Self {
        let mut vs = Vec::new();
        collect_expr_vars(e, &mut vs);
        Namer::new(vs.iter())
    }

    pub fn show<'a>(&self, v: &'a Var) -> Cow<'a, str> {
        if v.stamp != 0 && self.collide.contains(&v.name) {
            Cow::Owned(format!("{}#{}", v.name, v.stamp))
        } else {
            Cow::Borrowed(&v.name)
        }
    }
}

/// Every variable occurrence, binders included.
pub fn collect_expr_vars(e: &Expr, out: &mut Vec<Var>) {
    match e {
        Expr::Const(_) | Expr::Prim(_) | Expr::Inj(_, None) => {}
        Expr::Var(x) => out.push(x.clone()),
        Expr::Record(fs) => fs.iter().for_each(|(_, e)| collect_expr_vars(e, out)),
        Expr::Proj(e, _) | Expr::Inj(_, Some(e)) => collect_expr_vars(e, out),
        Expr::Case(s, bs) => {
            collect_expr_vars(s, out);
            for (p, b) in bs {
                out.extend(p.vars());
                collect_expr_vars(b, out);
            }
        }
        Expr::Lambda(x, _, b) | Expr::Fix(x, _, b) => {
            out.push(x.clone());
            collect_expr_vars(b, out);
        }
        Expr::App(f, a) => {
            collect_expr_vars(f, out);
            collect_expr_vars(a, out);
        }
    }
}

const P_BINDER: u8 = 0;
const P_CMP: u8 = 1;
const P_ADD: u8 = 2;
const P_MUL: u8 = 3;
const P_APP: u8 = 4;
const P_ATOM: u8 = 5;

fn infix_prec(op: PrimOp) -> u8 {
    match op {
        PrimOp::Add | PrimOp::Sub => P_ADD,
        PrimOp::Mul => P_MUL,
        _ => P_CMP,
    }
}

/// Recognizes `o {1=a, 2=b}`.
pub fn as_binary(e: &Expr) -> Option<(PrimOp, &Expr, &Expr)> {
    if let Expr::App(f, arg) = e {
        if let (Expr::Prim(op), Expr::Record(fs)) = (&**f, &**arg) {
            if fs.len() == 2 && fs[0].0 == Label::pos(1) && fs[1].0 == Label::pos(2) {
                return Some((*op, &fs[0].1, &fs[1].1));
            }
        }
    }
    None
}

fn is_tuple_labels<T>(fs: &[(Label, T)]) -> bool {
    fs.len() >= 2 && fs.iter().enumerate().all(|(i, (l, _))| *l == Label::pos(i + 1))
}

pub struct Printer<'n> {
    pub namer: &'n Namer,
}

impl Printer<'_> {
    pub fn expr(&self, out: &mut String, e: &Expr, prec: u8) {
        match e {
            Expr::Const(c) => write_const(out, c),
            Expr::Var(x) => out.push_str(&self.namer.show(x)),
            Expr::Prim(op) => {
                let _ = write!(out, "({})", op.symbol());
            }
            Expr::Record(fs) if is_tuple_labels(fs) => {
                out.push('(');
                for (i, (_, e)) in fs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    self.expr(out, e, P_BINDER);
                }
                out.push(')');
            }
            Expr::Record(fs) => {
                out.push('{');
                for (i, (l, e)) in fs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    let _ = write!(out, "{}=", l);
                    self.expr(out, e, P_BINDER);
                }
                out.push('}');
            }
            Expr::Proj(e, l) => {
                self.expr(out, e, P_ATOM);
                let _ = write!(out, ".{}", l);
            }
            Expr::Inj(c, None) => out.push_str(c.as_str()),
            Expr::Inj(c, Some(a)) => {
                paren(out, prec > P_APP, |out| {
                    let _ = write!(out, "{}·", c);
                    self.expr(out, a, P_ATOM);
                });
            }
            Expr::Case(s, bs) => paren(out, prec > P_BINDER, |out| {
                out.push_str("case ");
                self.expr(out, s, P_BINDER);
                out.push_str(" {");
                for (i, (p, b)) in bs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" | ");
                    }
                    self.pattern(out, p);
                    out.push_str(". ");
                    self.expr(out, b, P_BINDER);
                }
                out.push('}');
            }),
            Expr::Lambda(x, t, b) => paren(out, prec > P_BINDER, |out| {
                let _ = write!(out, "λ{}:{}. ", self.namer.show(x), t);
                self.expr(out, b, P_BINDER);
            }),
            Expr::Fix(x, t, b) => paren(out, prec > P_BINDER, |out| {
                let _ = write!(out, "fix {}:{} is ", self.namer.show(x), t);
                self.expr(out, b, P_BINDER);
            }),
            Expr::App(f, a) => {
                if let Some((op, l, r)) = as_binary(e) {
                    let p = infix_prec(op);
                    paren(out, prec > p, |out| {
                        self.expr(out, l, p);
                        let _ = write!(out, " {} ", op.symbol());
                        self.expr(out, r, p + 1);
                    });
                } else {
                    paren(out, prec > P_APP, |out| {
                        self.expr(out, f, P_APP);
                        out.push(' ');
                        self.expr(out, a, P_ATOM);
                    });
                }
            }
        }
    }

    pub fn pattern(&self, out: &mut String, p: &Pattern) {
        self.pattern_prec(out, p, false);
    }

    fn pattern_prec(&self, out: &mut String, p: &Pattern, tight: bool) {
        match p {
            Pattern::Wildcard => out.push('_'),
            Pattern::Var(x) => out.push_str(&self.namer.show(x)),
            Pattern::Const(c) => write_const(out, c),
            Pattern::Record(fs) if is_tuple_labels(fs) => {
                out.push('(');
                for (i, (_, p)) in fs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    self.pattern_prec(out, p, false);
                }
                out.push(')');
            }
            Pattern::Record(fs) => {
                out.push('{');
                for (i, (l, p)) in fs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    let _ = write!(out, "{}=", l);
                    self.pattern_prec(out, p, false);
                }
                out.push('}');
            }
            Pattern::Alias(x, p) => paren(out, tight, |out| {
                let _ = write!(out, "{} as ", self.namer.show(x));
                self.pattern_prec(out, p, false);
            }),
            Pattern::Inj(c, None) => out.push_str(c.as_str()),
            Pattern::Inj(c, Some(a)) => paren(out, tight, |out| {
                let _ = write!(out, "{}·", c);
                self.pattern_prec(out, a, true);
            }),
        }
    }
}

fn paren(out: &mut String, wrap: bool, body: impl FnOnce(&mut String)) {
    if wrap {
        out.push('(');
    }
    body(out);
    if wrap {
        out.push(')');
    }
}

fn write_const(out: &mut String, c: &Const) {
    match c {
        Const::Int(n) => {
            let _ = write!(out, "{}", n);
        }
        Const::Bool(b) => {
            let _ = write!(out, "{}", b);
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let namer = Namer::for_expr(self);
        let mut s = String::new();
        Printer { namer: &namer }.expr(&mut s, self, P_BINDER);
        f.write_str(&s)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = self.vars();
        let namer = Namer::new(vars.iter());
        let mut s = String::new();
        Printer { namer: &namer }.pattern(&mut s, self);
        f.write_str(&s)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &Type, f: &mut fmt::Formatter<'_>, tight: bool) -> fmt::Result {
            match t {
                Type::Int => f.write_str("int"),
                Type::Bool => f.write_str("bool"),
                Type::Data(n) => f.write_str(n),
                Type::Record(fs) if is_tuple_labels(fs) => {
                    f.write_str("(")?;
                    for (i, (_, t)) in fs.iter().enumerate() {
                        if i > 0 {
                            f.write_str(" * ")?;
                        }
                        go(t, f, true)?;
                    }
                    f.write_str(")")
                }
                Type::Record(fs) => {
                    f.write_str("{")?;
                    for (i, (l, t)) in fs.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{}:", l)?;
                        go(t, f, false)?;
                    }
                    f.write_str("}")
                }
                Type::Arrow(a, b) => {
                    if tight {
                        f.write_str("(")?;
                    }
                    go(a, f, true)?;
                    f.write_str(" -> ")?;
                    go(b, f, false)?;
                    if tight {
                        f.write_str(")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, f, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infix_and_case_layout() {
        let x = Var::named("x");
        let e = Expr::lam(
            x.clone(),
            Type::Int,
            Expr::case(
                Expr::Var(x),
                vec![
                    (Pattern::Const(Const::Int(1)), Expr::prim(PrimOp::Add, Expr::var("x"), Expr::int(1))),
                    (Pattern::Wildcard, Expr::int(0)),
                ],
            ),
        );
        assert_eq!(e.to_string(), "λx:int. case x {1. x + 1 | _. 0}");
    }

    #[test]
    fn stamps_only_on_collision() {
        let a = Var::fresh("m");
        let b = Var::fresh("m");
        let single = Expr::Var(a.clone());
        assert_eq!(single.to_string(), "m");
        let both = Expr::tuple(vec![Expr::Var(a.clone()), Expr::Var(b.clone())]);
        assert_eq!(both.to_string(), format!("(m#{}, m#{})", a.stamp, b.stamp));
    }

    #[test]
    fn types_print_tuples_and_arrows() {
        let t = Type::arrow(Type::tuple(vec![Type::Int, Type::data("opt")]), Type::arrow(Type::Int, Type::Bool));
        assert_eq!(t.to_string(), "(int * opt) -> int -> bool");
    }
}
