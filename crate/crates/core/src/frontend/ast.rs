//! Surface syntax of the ML subset, with source spans.

use std::fmt::{self, Write};

use serde::Serialize;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TyAst {
    Var(String),
    /// Type constructor applied to arguments, e.g. `int list`.
    Con(Vec<TyAst>, String),
    Tuple(Vec<TyAst>),
    Record(Vec<(String, TyAst)>),
    Arrow(Box<TyAst>, Box<TyAst>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pat {
    pub kind: PatKind,
    #[serde(skip)]
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PatKind {
    Wild,
    /// A variable or a nullary constructor; resolved during elaboration.
    Ident(String),
    Int(i64),
    Bool(bool),
    Tuple(Vec<Pat>),
    Record(Vec<(String, Pat)>),
    Con(String, Box<Pat>),
    Cons(Box<Pat>, Box<Pat>),
    List(Vec<Pat>),
    As(String, Box<Pat>),
    Annot(Box<Pat>, TyAst),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    Cons,
    Andalso,
    Orelse,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::Eq => "=",
            BinOp::Ne => "<>",
            BinOp::Cons => "::",
            BinOp::Andalso => "andalso",
            BinOp::Orelse => "orelse",
        }
    }

    /// Binding strength, higher binds tighter.
    pub fn prec(self) -> u8 {
        match self {
            BinOp::Orelse => 1,
            BinOp::Andalso => 2,
            BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge | BinOp::Eq | BinOp::Ne => 4,
            BinOp::Cons => 5,
            BinOp::Add | BinOp::Sub => 6,
            BinOp::Mul => 7,
        }
    }

    pub fn right_assoc(self) -> bool {
        matches!(self, BinOp::Cons | BinOp::Andalso | BinOp::Orelse)
    }
}

pub type Match = Vec<(Pat, Exp)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exp {
    pub kind: ExpKind,
    #[serde(skip)]
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ExpKind {
    Int(i64),
    Bool(bool),
    Ident(String),
    Tuple(Vec<Exp>),
    Record(Vec<(String, Exp)>),
    List(Vec<Exp>),
    /// `#l`, a selector function.
    Selector(String),
    App(Box<Exp>, Box<Exp>),
    Neg(Box<Exp>),
    BinOp(BinOp, Box<Exp>, Box<Exp>),
    Fn(Match),
    Case(Box<Exp>, Match),
    If(Box<Exp>, Box<Exp>, Box<Exp>),
    Let(Vec<Dec>, Box<Exp>),
    Annot(Box<Exp>, TyAst),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub params: Vec<Pat>,
    pub result: Option<TyAst>,
    pub body: Exp,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunBind {
    pub name: String,
    pub clauses: Vec<Clause>,
    #[serde(skip)]
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConBind {
    pub name: String,
    pub arg: Option<TyAst>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DataBind {
    pub params: Vec<String>,
    pub name: String,
    pub ctors: Vec<ConBind>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Dec {
    Val(Pat, Exp),
    Fun(FunBind),
    Datatype(Vec<DataBind>),
    Type(Vec<String>, String, TyAst),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SurfaceProgram {
    pub decs: Vec<Dec>,
}

impl SurfaceProgram {
    /// Names bound by top-level `val x = …` and `fun` declarations, in order.
    pub fn bindings(&self) -> Vec<&str> {
        self.decs
            .iter()
            .filter_map(|d| match d {
                Dec::Val(p, _) => match &p.kind {
                    PatKind::Ident(x) => Some(x.as_str()),
                    PatKind::Annot(q, _) => match &q.kind {
                        PatKind::Ident(x) => Some(x.as_str()),
                        _ => None,
                    },
                    _ => None,
                },
                Dec::Fun(f) => Some(f.name.as_str()),
                _ => None,
            })
            .collect()
    }
}

fn ty(out: &mut String, t: &TyAst, prec: u8) {
    match t {
        TyAst::Var(v) => out.push_str(v),
        TyAst::Con(args, name) => {
            match args.len() {
                0 => {}
                1 => {
                    ty(out, &args[0], 3);
                    out.push(' ');
                }
                _ => {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        ty(out, a, 0);
                    }
                    out.push_str(") ");
                }
            }
            out.push_str(name);
        }
        TyAst::Tuple(ts) => {
            if prec > 1 {
                out.push('(');
            }
            for (i, a) in ts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" * ");
                }
                ty(out, a, 2);
            }
            if prec > 1 {
                out.push(')');
            }
        }
        TyAst::Record(fs) => {
            out.push('{');
            for (i, (l, a)) in fs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{l} : ");
                ty(out, a, 0);
            }
            out.push('}');
        }
        TyAst::Arrow(a, b) => {
            if prec > 0 {
                out.push('(');
            }
            ty(out, a, 1);
            out.push_str(" -> ");
            ty(out, b, 0);
            if prec > 0 {
                out.push(')');
            }
        }
    }
}

fn int(out: &mut String, n: i64) {
    if n < 0 {
        let _ = write!(out, "~{}", n.unsigned_abs());
    } else {
        let _ = write!(out, "{n}");
    }
}

// Pattern precedence: 0 full, 1 no `as`/annotation, 2 constructor application, 3 atomic.
fn pat(out: &mut String, p: &Pat, prec: u8) {
    let wrap = |out: &mut String, need: u8, f: &dyn Fn(&mut String)| {
        if prec > need {
            out.push('(');
            f(out);
            out.push(')');
        } else {
            f(out);
        }
    };
    match &p.kind {
        PatKind::Wild => out.push('_'),
        PatKind::Ident(x) => out.push_str(x),
        PatKind::Int(n) => int(out, *n),
        PatKind::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        PatKind::Tuple(ps) => {
            out.push('(');
            for (i, q) in ps.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                pat(out, q, 0);
            }
            out.push(')');
        }
        PatKind::Record(fs) => {
            out.push('{');
            for (i, (l, q)) in fs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{l} = ");
                pat(out, q, 0);
            }
            out.push('}');
        }
        PatKind::List(ps) => {
            out.push('[');
            for (i, q) in ps.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                pat(out, q, 0);
            }
            out.push(']');
        }
        PatKind::Con(c, q) => wrap(out, 2, &|out| {
            let _ = write!(out, "{c} ");
            pat(out, q, 3);
        }),
        PatKind::Cons(h, t) => wrap(out, 1, &|out| {
            pat(out, h, 2);
            out.push_str(" :: ");
            pat(out, t, 1);
        }),
        PatKind::As(x, q) => wrap(out, 0, &|out| {
            let _ = write!(out, "{x} as ");
            pat(out, q, 0);
        }),
        PatKind::Annot(q, t) => wrap(out, 0, &|out| {
            pat(out, q, 1);
            out.push_str(" : ");
            ty(out, t, 0);
        }),
    }
}

const P_EXP: u8 = 0;
const P_APP: u8 = 10;
const P_ATOM: u8 = 11;

fn indent(out: &mut String, n: usize) {
    out.push('\n');
    for _ in 0..n {
        out.push_str("  ");
    }
}

fn matches(out: &mut String, m: &Match, ind: usize) {
    for (i, (p, e)) in m.iter().enumerate() {
        if i > 0 {
            indent(out, ind);
            out.push_str("| ");
        }
        pat(out, p, 0);
        out.push_str(" => ");
        exp(out, e, P_EXP + 1, ind + 1);
    }
}

fn exp(out: &mut String, e: &Exp, prec: u8, ind: usize) {
    let open = |out: &mut String, need: u8| {
        let w = prec > need;
        if w {
            out.push('(');
        }
        w
    };
    match &e.kind {
        ExpKind::Int(n) => int(out, *n),
        ExpKind::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        ExpKind::Ident(x) => out.push_str(x),
        ExpKind::Selector(l) => {
            let _ = write!(out, "#{l}");
        }
        ExpKind::Tuple(es) => {
            out.push('(');
            for (i, a) in es.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                exp(out, a, P_EXP, ind);
            }
            out.push(')');
        }
        ExpKind::Record(fs) => {
            out.push('{');
            for (i, (l, a)) in fs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{l} = ");
                exp(out, a, P_EXP, ind);
            }
            out.push('}');
        }
        ExpKind::List(es) => {
            out.push('[');
            for (i, a) in es.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                exp(out, a, P_EXP, ind);
            }
            out.push(']');
        }
        ExpKind::App(f, a) => {
            let w = open(out, P_APP);
            exp(out, f, P_APP, ind);
            out.push(' ');
            exp(out, a, P_ATOM, ind);
            if w {
                out.push(')');
            }
        }
        ExpKind::Neg(a) => {
            let w = open(out, P_APP);
            out.push('~');
            exp(out, a, P_ATOM, ind);
            if w {
                out.push(')');
            }
        }
        ExpKind::BinOp(op, a, b) => {
            let p = op.prec();
            let w = open(out, p);
            let (lp, rp) = if op.right_assoc() { (p + 1, p) } else { (p, p + 1) };
            exp(out, a, lp, ind);
            let _ = write!(out, " {} ", op.symbol());
            exp(out, b, rp, ind);
            if w {
                out.push(')');
            }
        }
        ExpKind::Fn(m) => {
            let w = open(out, P_EXP);
            out.push_str("fn ");
            matches(out, m, ind + 1);
            if w {
                out.push(')');
            }
        }
        ExpKind::Case(s, m) => {
            let w = open(out, P_EXP);
            out.push_str("case ");
            exp(out, s, P_EXP, ind);
            out.push_str(" of");
            indent(out, ind + 1);
            out.push_str("  ");
            matches(out, m, ind + 1);
            if w {
                out.push(')');
            }
        }
        ExpKind::If(c, t, f) => {
            let w = open(out, P_EXP);
            out.push_str("if ");
            exp(out, c, P_EXP, ind);
            out.push_str(" then ");
            exp(out, t, P_EXP, ind);
            out.push_str(" else ");
            exp(out, f, P_EXP, ind);
            if w {
                out.push(')');
            }
        }
        ExpKind::Let(ds, body) => {
            out.push_str("let");
            for d in ds {
                indent(out, ind + 1);
                dec(out, d, ind + 1);
            }
            indent(out, ind);
            out.push_str("in ");
            exp(out, body, P_EXP, ind + 1);
            indent(out, ind);
            out.push_str("end");
        }
        ExpKind::Annot(a, t) => {
            out.push('(');
            exp(out, a, P_EXP + 1, ind);
            out.push_str(" : ");
            ty(out, t, 0);
            out.push(')');
        }
    }
}

fn tyvars(out: &mut String, vs: &[String]) {
    match vs.len() {
        0 => {}
        1 => {
            let _ = write!(out, "{} ", vs[0]);
        }
        _ => {
            let _ = write!(out, "({}) ", vs.join(", "));
        }
    }
}

fn dec(out: &mut String, d: &Dec, ind: usize) {
    match d {
        Dec::Val(p, e) => {
            out.push_str("val ");
            pat(out, p, 0);
            out.push_str(" = ");
            exp(out, e, P_EXP, ind + 1);
        }
        Dec::Fun(f) => {
            out.push_str("fun ");
            for (i, c) in f.clauses.iter().enumerate() {
                if i > 0 {
                    indent(out, ind);
                    out.push_str("  | ");
                }
                out.push_str(&f.name);
                for p in &c.params {
                    out.push(' ');
                    pat(out, p, 3);
                }
                if let Some(t) = &c.result {
                    out.push_str(" : ");
                    ty(out, t, 0);
                }
                out.push_str(" = ");
                exp(out, &c.body, P_EXP, ind + 2);
            }
        }
        Dec::Datatype(bs) => {
            for (i, b) in bs.iter().enumerate() {
                out.push_str(if i == 0 { "datatype " } else { " and " });
                tyvars(out, &b.params);
                let _ = write!(out, "{} =", b.name);
                for (j, c) in b.ctors.iter().enumerate() {
                    out.push_str(if j == 0 { " " } else { " | " });
                    out.push_str(&c.name);
                    if let Some(t) = &c.arg {
                        out.push_str(" of ");
                        ty(out, t, 0);
                    }
                }
            }
        }
        Dec::Type(ps, name, t) => {
            out.push_str("type ");
            tyvars(out, ps);
            let _ = write!(out, "{name} = ");
            ty(out, t, 0);
        }
    }
}

impl fmt::Display for TyAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        ty(&mut s, self, 0);
        f.write_str(&s)
    }
}

impl fmt::Display for Pat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        pat(&mut s, self, 0);
        f.write_str(&s)
    }
}

impl fmt::Display for Exp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        exp(&mut s, self, P_EXP, 0);
        f.write_str(&s)
    }
}

impl fmt::Display for SurfaceProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for d in &self.decs {
            dec(&mut s, d, 0);
            s.push('\n');
        }
        f.write_str(&s)
    }
}
