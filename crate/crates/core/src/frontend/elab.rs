//! Type inference and desugaring from the surface AST to annotated core
//! expressions.

use std::collections::{HashMap, HashSet};
use std::fmt;

use super::ast::*;
use super::inline::{entry_expression, is_recursive, Ctors};
use super::{FrontendError, Instantiation, Transpiled};
use crate::statics::{typecheck, StaticsError};
use crate::subst::substitute;
use crate::syntax::{Const, Ctor, CtorSig, DataEnv, Expr, Label, Name, Pattern, PrimOp, Type, TypingContext, Var};

type Result<T> = std::result::Result<T, FrontendError>;

const BUILTINS: &str = "datatype 'a option = NONE | SOME of 'a\n\
                        datatype 'a list = nil | :: of 'a * 'a list\n\
                        datatype order = LESS | EQUAL | GREATER";

// Types under inference.

#[derive(Clone, Debug, PartialEq, Eq)]
enum Ty {
    Meta(usize),
    Int,
    Bool,
    Data(Name),
    Record(Vec<(Label, Ty)>),
    Arrow(Box<Ty>, Box<Ty>),
}

impl Ty {
    fn arrow(a: Ty, b: Ty) -> Ty {
        Ty::Arrow(Box::new(a), Box::new(b))
    }

    fn record(mut fs: Vec<(Label, Ty)>) -> Ty {
        fs.sort_by(|a, b| a.0.cmp(&b.0));
        Ty::Record(fs)
    }

    fn tuple(items: Vec<Ty>) -> Ty {
        Ty::Record(items.into_iter().enumerate().map(|(i, t)| (Label::pos(i + 1), t)).collect())
    }

    fn from_type(t: &Type) -> Ty {
        match t {
            Type::Int => Ty::Int,
            Type::Bool => Ty::Bool,
            Type::Data(n) => Ty::Data(n.clone()),
            Type::Record(fs) => Ty::Record(fs.iter().map(|(l, t)| (l.clone(), Ty::from_type(t))).collect()),
            Type::Arrow(a, b) => Ty::arrow(Ty::from_type(a), Ty::from_type(b)),
        }
    }
}

impl Ty {
    fn write(&self, f: &mut fmt::Formatter<'_>, tight: bool) -> fmt::Result {
        match self {
            Ty::Meta(i) => write!(f, "'_{i}"),
            Ty::Int => f.write_str("int"),
            Ty::Bool => f.write_str("bool"),
            Ty::Data(n) => f.write_str(n),
            Ty::Record(fs) => {
                let positional = fs.iter().enumerate().all(|(i, (l, _))| l.as_str() == (i + 1).to_string());
                if positional && fs.len() > 1 {
                    f.write_str("(")?;
                    for (i, (_, t)) in fs.iter().enumerate() {
                        if i > 0 {
                            f.write_str(" * ")?;
                        }
                        t.write(f, true)?;
                    }
                    f.write_str(")")
                } else {
                    f.write_str("{")?;
                    for (i, (l, t)) in fs.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{l}:")?;
                        t.write(f, false)?;
                    }
                    f.write_str("}")
                }
            }
            Ty::Arrow(a, b) => {
                if tight {
                    f.write_str("(")?;
                }
                a.write(f, true)?;
                f.write_str(" -> ")?;
                b.write(f, false)?;
                if tight {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, false)
    }
}

// Datatype declarations.

struct DataInfo {
    args: Vec<Type>,
    ctors: Vec<(String, Option<Type>)>,
}

/// Declared datatypes, abbreviations and constructors after instantiation.
pub(super) struct Tables {
    order: Vec<String>,
    datatypes: HashMap<String, DataInfo>,
    abbrevs: HashMap<String, (Vec<String>, TyAst)>,
    ctors: HashMap<String, (Name, Option<Type>)>,
}

fn ty(t: &TyAst, out: &mut HashSet<String>) {
    match t {
        TyAst::Var(_) => {}
        TyAst::Con(args, n) => {
            out.insert(n.clone());
            args.iter().for_each(|a| ty(a, out));
        }
        TyAst::Tuple(ts) => ts.iter().for_each(|a| ty(a, out)),
        TyAst::Record(fs) => fs.iter().for_each(|(_, a)| ty(a, out)),
        TyAst::Arrow(a, b) => {
            ty(a, out);
            ty(b, out);
        }
    }
}

fn names_in_program(prog: &SurfaceProgram) -> HashSet<String> {
    fn pat(p: &Pat, out: &mut HashSet<String>) {
        match &p.kind {
            PatKind::Wild | PatKind::Int(_) | PatKind::Bool(_) => {}
            PatKind::Ident(x) => {
                out.insert(x.clone());
            }
            PatKind::Tuple(ps) => ps.iter().for_each(|p| pat(p, out)),
            PatKind::List(ps) => {
                out.insert("nil".into());
                ps.iter().for_each(|p| pat(p, out));
            }
            PatKind::Record(fs) => fs.iter().for_each(|(_, p)| pat(p, out)),
            PatKind::Con(c, p) => {
                out.insert(c.clone());
                pat(p, out);
            }
            PatKind::Cons(h, t) => {
                out.insert("::".into());
                pat(h, out);
                pat(t, out);
            }
            PatKind::As(_, p) => pat(p, out),
            PatKind::Annot(p, t) => {
                pat(p, out);
                ty(t, out);
            }
        }
    }
    fn exp(e: &Exp, out: &mut HashSet<String>) {
        match &e.kind {
            ExpKind::Int(_) | ExpKind::Bool(_) | ExpKind::Selector(_) => {}
            ExpKind::Ident(x) => {
                out.insert(x.strip_prefix("op").filter(|s| *s == "::").unwrap_or(x).to_string());
            }
            ExpKind::Tuple(es) => es.iter().for_each(|e| exp(e, out)),
            ExpKind::List(es) => {
                out.insert("nil".into());
                es.iter().for_each(|e| exp(e, out));
            }
            ExpKind::Record(fs) => fs.iter().for_each(|(_, e)| exp(e, out)),
            ExpKind::App(a, b) => {
                exp(a, out);
                exp(b, out);
            }
            ExpKind::Neg(a) => exp(a, out),
            ExpKind::BinOp(op, a, b) => {
                if *op == BinOp::Cons {
                    out.insert("::".into());
                }
                exp(a, out);
                exp(b, out);
            }
            ExpKind::Fn(m) => rules(m, out),
            ExpKind::Case(s, m) => {
                exp(s, out);
                rules(m, out);
            }
            ExpKind::If(a, b, c) => {
                exp(a, out);
                exp(b, out);
                exp(c, out);
            }
            ExpKind::Let(ds, body) => {
                ds.iter().for_each(|d| dec(d, out));
                exp(body, out);
            }
            ExpKind::Annot(e, t) => {
                exp(e, out);
                ty(t, out);
            }
        }
    }
    fn rules(m: &Match, out: &mut HashSet<String>) {
        for (p, e) in m {
            pat(p, out);
            exp(e, out);
        }
    }
    fn dec(d: &Dec, out: &mut HashSet<String>) {
        match d {
            Dec::Val(p, e) => {
                pat(p, out);
                exp(e, out);
            }
            Dec::Fun(f) => {
                for c in &f.clauses {
                    c.params.iter().for_each(|p| pat(p, out));
                    if let Some(t) = &c.result {
                        ty(t, out);
                    }
                    exp(&c.body, out);
                }
            }
            Dec::Datatype(bs) => {
                for b in bs {
                    for c in &b.ctors {
                        if let Some(t) = &c.arg {
                            ty(t, out);
                        }
                    }
                }
            }
            Dec::Type(_, _, t) => ty(t, out),
        }
    }
    let mut out = HashSet::new();
    prog.decs.iter().for_each(|d| dec(d, &mut out));
    out
}

fn base_type(name: &str) -> Option<Type> {
    match name {
        "int" => Some(Type::Int),
        "bool" => Some(Type::Bool),
        "unit" => Some(Type::unit()),
        _ => None,
    }
}

impl Tables {
    fn build(prog: &SurfaceProgram, inst: &Instantiation) -> Result<Tables> {
        let mut binds: Vec<&DataBind> = Vec::new();
        let mut abbrevs = HashMap::new();
        for d in &prog.decs {
            match d {
                Dec::Datatype(bs) => binds.extend(bs.iter()),
                Dec::Type(ps, n, t) => {
                    abbrevs.insert(n.clone(), (ps.clone(), t.clone()));
                }
                _ => {}
            }
        }
        let builtins = super::parser::parse(BUILTINS).expect("builtin datatypes parse");
        let mut used = names_in_program(prog);
        inst.values().for_each(|t| ty(t, &mut used));
        let user_types: HashSet<&str> = binds.iter().map(|b| b.name.as_str()).collect();
        let user_ctors: HashSet<&str> = binds.iter().flat_map(|b| b.ctors.iter().map(|c| c.name.as_str())).collect();
        let mut all: Vec<&DataBind> = Vec::new();
        for d in &builtins.decs {
            let Dec::Datatype(bs) = d else { continue };
            for b in bs {
                let clashes = user_types.contains(b.name.as_str())
                    || abbrevs.contains_key(&b.name)
                    || b.ctors.iter().any(|c| user_ctors.contains(c.name.as_str()));
                let referenced = used.contains(&b.name) || b.ctors.iter().any(|c| used.contains(&c.name));
                if referenced && !clashes {
                    all.push(b);
                }
            }
        }
        all.extend(binds);

        let mut t = Tables { order: Vec::new(), datatypes: HashMap::new(), abbrevs, ctors: HashMap::new() };
        for b in &all {
            if t.datatypes.contains_key(&b.name) {
                return Err(crate::syntax::EnvError::DuplicateDatatype(b.name.clone()).into());
            }
            t.order.push(b.name.clone());
            t.datatypes.insert(b.name.clone(), DataInfo { args: Vec::new(), ctors: Vec::new() });
        }
        for b in &all {
            let mut args = Vec::new();
            for p in &b.params {
                args.push(match inst.get(p) {
                    Some(a) => t.lower_closed(a, &HashMap::new(), false)?,
                    None => Type::Int,
                });
            }
            t.datatypes.get_mut(&b.name).expect("declared").args = args;
        }
        for b in &all {
            let params: HashMap<String, Type> =
                b.params.iter().cloned().zip(t.datatypes[&b.name].args.iter().cloned()).collect();
            let mut ctors = Vec::new();
            for c in &b.ctors {
                let arg = match &c.arg {
                    Some(a) => Some(t.lower_closed(a, &params, true)?),
                    None => None,
                };
                ctors.push((c.name.clone(), arg));
            }
            t.datatypes.get_mut(&b.name).expect("declared").ctors = ctors;
        }
        let mut env = DataEnv::new();
        for n in &t.order {
            let info = &t.datatypes[n];
            env.add_datatype(
                n,
                info.ctors.iter().map(|(c, a)| CtorSig { ctor: Ctor::new(c), arg: a.clone() }).collect(),
            )?;
            for (c, a) in &info.ctors {
                t.ctors.insert(c.clone(), (Name::from(n.as_str()), a.clone()));
            }
        }
        Ok(t)
    }

    fn env(&self) -> DataEnv {
        let mut env = DataEnv::new();
        for n in &self.order {
            let info = &self.datatypes[n];
            env.add_datatype(
                n,
                info.ctors.iter().map(|(c, a)| CtorSig { ctor: Ctor::new(c), arg: a.clone() }).collect(),
            )
            .expect("validated when the tables were built");
        }
        env
    }

    fn ctor_names(&self) -> Ctors {
        self.ctors.keys().cloned().collect()
    }

    /// Lowers a type with no free type variables beyond `params`. With
    /// `check_args`, datatype arguments must match the instantiation.
    fn lower_closed(&self, t: &TyAst, params: &HashMap<String, Type>, check_args: bool) -> Result<Type> {
        let bad = |msg: String| FrontendError::type_error(Span::default(), msg);
        Ok(match t {
            TyAst::Var(v) => {
                params.get(v).cloned().ok_or_else(|| bad(format!("unbound type variable `{v}` in a declaration")))?
            }
            TyAst::Tuple(ts) => {
                Type::tuple(ts.iter().map(|a| self.lower_closed(a, params, check_args)).collect::<Result<_>>()?)
            }
            TyAst::Record(fs) => Type::record(
                fs.iter()
                    .map(|(l, a)| Ok((Label::new(l), self.lower_closed(a, params, check_args)?)))
                    .collect::<Result<_>>()?,
            ),
            TyAst::Arrow(a, b) => {
                Type::arrow(self.lower_closed(a, params, check_args)?, self.lower_closed(b, params, check_args)?)
            }
            TyAst::Con(args, n) => {
                let lowered: Vec<Type> =
                    args.iter().map(|a| self.lower_closed(a, params, check_args)).collect::<Result<_>>()?;
                if let Some(b) = base_type(n) {
                    if !lowered.is_empty() {
                        return Err(bad(format!("type `{n}` takes no arguments")));
                    }
                    return Ok(b);
                }
                if let Some(info) = self.datatypes.get(n) {
                    if check_args && lowered != info.args {
                        let shown: Vec<String> = info.args.iter().map(|t| t.to_string()).collect();
                        return Err(bad(format!(
                            "datatype `{n}` is instantiated at ({}); it cannot be used at other arguments",
                            shown.join(", ")
                        )));
                    }
                    return Ok(Type::data(n));
                }
                if let Some((ps, body)) = self.abbrevs.get(n) {
                    if ps.len() != lowered.len() {
                        return Err(bad(format!("type `{n}` expects {} arguments", ps.len())));
                    }
                    let sub: HashMap<String, Type> = ps.iter().cloned().zip(lowered).collect();
                    return self.lower_closed(body, &sub, check_args);
                }
                return Err(FrontendError::UnknownTypeName { span: Span::default(), name: n.clone() });
            }
        })
    }
}

/// The datatype environment declared by a program: user datatypes plus the
/// built-in `option`, `list` and `order` when referenced and not redeclared.
/// Type parameters are instantiated from `inst`, defaulting to `int`.
pub fn scrape_datatypes(prog: &SurfaceProgram, inst: &Instantiation) -> Result<DataEnv> {
    Ok(Tables::build(prog, inst)?.env())
}

// Typed intermediate form.

enum TExp {
    Const(Const),
    Var(Var),
    Record(Vec<(Label, TExp)>),
    Proj(Box<TExp>, Label),
    Inj(Ctor, Option<Box<TExp>>),
    Case(Box<TExp>, Vec<(Pattern, TExp)>),
    Lambda(Var, Ty, Box<TExp>),
    App(Box<TExp>, Box<TExp>),
    Fix(Var, Ty, Box<TExp>),
    Prim(PrimOp),
    /// Structural equality, desugared once the operand type is known.
    Eq {
        ty: Ty,
        negate: bool,
        lhs: Box<TExp>,
        rhs: Box<TExp>,
        span: Span,
    },
    /// A local function, substituted into the body.
    LetFun(Var, Box<TExp>, Box<TExp>),
}

impl TExp {
    fn app(f: TExp, a: TExp) -> TExp {
        TExp::App(Box::new(f), Box::new(a))
    }

    fn tuple(items: Vec<TExp>) -> TExp {
        TExp::Record(items.into_iter().enumerate().map(|(i, e)| (Label::pos(i + 1), e)).collect())
    }

    fn prim(op: PrimOp, a: TExp, b: TExp) -> TExp {
        TExp::app(TExp::Prim(op), TExp::tuple(vec![a, b]))
    }

    fn case(s: TExp, bs: Vec<(Pattern, TExp)>) -> TExp {
        TExp::Case(Box::new(s), bs)
    }

    fn bool(b: bool) -> TExp {
        TExp::Const(Const::Bool(b))
    }

    fn if_(c: TExp, t: TExp, f: TExp) -> TExp {
        TExp::case(c, vec![(Pattern::Const(Const::Bool(true)), t), (Pattern::Const(Const::Bool(false)), f)])
    }
}

const PARAM_NAMES: [&str; 4] = ["x", "y", "z", "w"];

fn param_name(i: usize) -> String {
    PARAM_NAMES.get(i).map_or_else(|| format!("x{}", i + 1), |s| s.to_string())
}

struct Elab<'t> {
    tables: &'t Tables,
    metas: Vec<Option<Ty>>,
    tyvars: HashMap<String, Ty>,
    /// `(record, label, field)`: the record type must have the field.
    pending: Vec<(Ty, Label, Ty, Span)>,
    scope: Vec<(String, Var, Ty)>,
}

impl<'t> Elab<'t> {
    fn new(tables: &'t Tables) -> Self {
        Elab { tables, metas: Vec::new(), tyvars: HashMap::new(), pending: Vec::new(), scope: Vec::new() }
    }

    fn meta(&mut self) -> Ty {
        self.metas.push(None);
        Ty::Meta(self.metas.len() - 1)
    }

    fn repr(&self, t: &Ty) -> Ty {
        let mut t = t.clone();
        while let Ty::Meta(i) = t {
            match &self.metas[i] {
                Some(u) => t = u.clone(),
                None => break,
            }
        }
        t
    }

    fn resolve(&self, t: &Ty) -> Ty {
        match self.repr(t) {
            Ty::Record(fs) => Ty::Record(fs.iter().map(|(l, t)| (l.clone(), self.resolve(t))).collect()),
            Ty::Arrow(a, b) => Ty::arrow(self.resolve(&a), self.resolve(&b)),
            t => t,
        }
    }

    fn occurs(&self, i: usize, t: &Ty) -> bool {
        match self.repr(t) {
            Ty::Meta(j) => i == j,
            Ty::Record(fs) => fs.iter().any(|(_, t)| self.occurs(i, t)),
            Ty::Arrow(a, b) => self.occurs(i, &a) || self.occurs(i, &b),
            _ => false,
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty, span: Span) -> Result<()> {
        let (a, b) = (self.repr(a), self.repr(b));
        let fail = |me: &Self| {
            Err(FrontendError::type_error(span, format!("cannot unify `{}` with `{}`", me.resolve(&a), me.resolve(&b))))
        };
        match (&a, &b) {
            (Ty::Meta(i), Ty::Meta(j)) if i == j => Ok(()),
            (Ty::Meta(i), t) | (t, Ty::Meta(i)) => {
                if self.occurs(*i, t) {
                    return fail(self);
                }
                self.metas[*i] = Some(t.clone());
                Ok(())
            }
            (Ty::Int, Ty::Int) | (Ty::Bool, Ty::Bool) => Ok(()),
            (Ty::Data(m), Ty::Data(n)) if m == n => Ok(()),
            (Ty::Record(fs), Ty::Record(gs))
                if fs.len() == gs.len() && fs.iter().zip(gs).all(|((l, _), (m, _))| l == m) =>
            {
                for ((_, s), (_, t)) in fs.iter().zip(gs) {
                    self.unify(s, t, span)?;
                }
                Ok(())
            }
            (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) => {
                self.unify(a1, a2, span)?;
                self.unify(b1, b2, span)
            }
            _ => fail(self),
        }
    }

    fn lower(&mut self, t: &TyAst, span: Span) -> Result<Ty> {
        Ok(match t {
            TyAst::Var(v) => match self.tyvars.get(v) {
                Some(m) => m.clone(),
                None => {
                    let m = self.meta();
                    self.tyvars.insert(v.clone(), m.clone());
                    m
                }
            },
            TyAst::Tuple(ts) => Ty::tuple(ts.iter().map(|a| self.lower(a, span)).collect::<Result<_>>()?),
            TyAst::Record(fs) => {
                Ty::record(fs.iter().map(|(l, a)| Ok((Label::new(l), self.lower(a, span)?))).collect::<Result<_>>()?)
            }
            TyAst::Arrow(a, b) => Ty::arrow(self.lower(a, span)?, self.lower(b, span)?),
            TyAst::Con(args, n) => {
                let lowered: Vec<Ty> = args.iter().map(|a| self.lower(a, span)).collect::<Result<_>>()?;
                if let Some(b) = base_type(n) {
                    if !lowered.is_empty() {
                        return Err(FrontendError::type_error(span, format!("type `{n}` takes no arguments")));
                    }
                    return Ok(Ty::from_type(&b));
                }
                if let Some(info) = self.tables.datatypes.get(n) {
                    if lowered.len() != info.args.len() {
                        return Err(FrontendError::type_error(
                            span,
                            format!("type `{n}` expects {} arguments", info.args.len()),
                        ));
                    }
                    let expected: Vec<Ty> = info.args.iter().map(Ty::from_type).collect();
                    for (a, e) in lowered.iter().zip(&expected) {
                        self.unify(a, e, span)?;
                    }
                    return Ok(Ty::Data(Name::from(n.as_str())));
                }
                if let Some((ps, body)) = self.tables.abbrevs.get(n) {
                    if ps.len() != lowered.len() {
                        return Err(FrontendError::type_error(
                            span,
                            format!("type `{n}` expects {} arguments", ps.len()),
                        ));
                    }
                    let saved: Vec<(String, Option<Ty>)> =
                        ps.iter().map(|p| (p.clone(), self.tyvars.get(p).cloned())).collect();
                    for (p, a) in ps.iter().zip(lowered) {
                        self.tyvars.insert(p.clone(), a);
                    }
                    let out = self.lower(&body.clone(), span);
                    for (p, old) in saved {
                        match old {
                            Some(t) => self.tyvars.insert(p, t),
                            None => self.tyvars.remove(&p),
                        };
                    }
                    return out;
                }
                return Err(FrontendError::UnknownTypeName { span, name: n.clone() });
            }
        })
    }

    fn lookup(&self, x: &str) -> Option<(Var, Ty)> {
        self.scope.iter().rev().find(|(n, _, _)| n == x).map(|(_, v, t)| (v.clone(), t.clone()))
    }

    fn ctor(&self, c: &str) -> Option<(Name, Option<Ty>)> {
        if self.lookup(c).is_some() {
            return None;
        }
        self.tables.ctors.get(c).map(|(d, a)| (d.clone(), a.as_ref().map(Ty::from_type)))
    }

    fn list_elem(&mut self, span: Span) -> Result<Ty> {
        match self.tables.ctors.get("::") {
            Some((d, Some(Type::Record(fs)))) if d.as_ref() == "list" && fs.len() == 2 => Ok(Ty::from_type(&fs[0].1)),
            _ => Err(FrontendError::unsupported(span, "list syntax requires the built-in list datatype")),
        }
    }

    fn with_bindings<R>(&mut self, binds: Vec<(String, Var, Ty)>, f: impl FnOnce(&mut Self) -> R) -> R {
        let n = self.scope.len();
        self.scope.extend(binds);
        let out = f(self);
        self.scope.truncate(n);
        out
    }

    fn project(&mut self, rty: &Ty, l: &Label, fty: &Ty, span: Span) -> Result<bool> {
        match self.repr(rty) {
            Ty::Record(fs) => match fs.iter().find(|(m, _)| m == l) {
                Some((_, t)) => {
                    self.unify(t, fty, span)?;
                    Ok(true)
                }
                None => {
                    Err(FrontendError::type_error(span, format!("type `{}` has no field `{l}`", self.resolve(rty))))
                }
            },
            Ty::Meta(_) => Ok(false),
            other => Err(FrontendError::type_error(
                span,
                format!("`#{l}` applied to non-record type `{}`", self.resolve(&other)),
            )),
        }
    }

    fn proj(&mut self, r: TExp, rty: Ty, l: &str, span: Span) -> Result<(TExp, Ty)> {
        let l = Label::new(l);
        let fty = self.meta();
        if !self.project(&rty, &l, &fty, span)? {
            self.pending.push((rty, l.clone(), fty.clone(), span));
        }
        Ok((TExp::Proj(Box::new(r), l), fty))
    }

    fn solve_pending(&mut self) -> Result<()> {
        loop {
            let mut progress = false;
            for (r, l, f, s) in std::mem::take(&mut self.pending) {
                if self.project(&r, &l, &f, s)? {
                    progress = true;
                } else {
                    self.pending.push((r, l, f, s));
                }
            }
            if !progress || self.pending.is_empty() {
                return Ok(());
            }
        }
    }

    // Patterns.

    fn pat(&mut self, p: &Pat, ty: &Ty, binds: &mut Vec<(String, Var, Ty)>) -> Result<Pattern> {
        let span = p.span;
        Ok(match &p.kind {
            PatKind::Wild => Pattern::Wildcard,
            PatKind::Int(n) => {
                self.unify(ty, &Ty::Int, span)?;
                Pattern::Const(Const::Int(*n))
            }
            PatKind::Bool(b) => {
                self.unify(ty, &Ty::Bool, span)?;
                Pattern::Const(Const::Bool(*b))
            }
            PatKind::Ident(x) => match self.tables.ctors.get(x) {
                Some((d, None)) => {
                    self.unify(ty, &Ty::Data(d.clone()), span)?;
                    Pattern::Inj(Ctor::new(x), None)
                }
                Some((_, Some(_))) => {
                    return Err(FrontendError::type_error(span, format!("constructor `{x}` needs an argument")));
                }
                None => Pattern::Var(self.bind(x, ty, span, binds)?),
            },
            PatKind::Tuple(ps) => {
                let ts: Vec<Ty> = ps.iter().map(|_| self.meta()).collect();
                self.unify(ty, &Ty::tuple(ts.clone()), span)?;
                let items = ps.iter().zip(&ts).map(|(p, t)| self.pat(p, t, binds)).collect::<Result<_>>()?;
                Pattern::tuple(items)
            }
            PatKind::Record(fs) => {
                let mut seen = HashSet::new();
                let mut fields = Vec::new();
                let mut tys = Vec::new();
                for (l, q) in fs {
                    if !seen.insert(l) {
                        return Err(FrontendError::type_error(span, format!("duplicate label `{l}`")));
                    }
                    let t = self.meta();
                    tys.push((Label::new(l), t.clone()));
                    fields.push((Label::new(l), q, t));
                }
                self.unify(ty, &Ty::record(tys), span)?;
                let mut out = Vec::new();
                for (l, q, t) in fields {
                    out.push((l, self.pat(q, &t, binds)?));
                }
                Pattern::record(out)
            }
            PatKind::Con(c, q) => match self.tables.ctors.get(c) {
                Some((d, Some(a))) => {
                    let (d, a) = (d.clone(), Ty::from_type(a));
                    self.unify(ty, &Ty::Data(d), span)?;
                    Pattern::Inj(Ctor::new(c), Some(Box::new(self.pat(q, &a, binds)?)))
                }
                Some((_, None)) => {
                    return Err(FrontendError::type_error(span, format!("constructor `{c}` takes no argument")));
                }
                None => return Err(FrontendError::type_error(span, format!("unknown constructor `{c}`"))),
            },
            PatKind::Cons(h, t) => {
                let elem = self.list_elem(span)?;
                self.unify(ty, &Ty::Data(Name::from("list")), span)?;
                let hp = self.pat(h, &elem, binds)?;
                let tp = self.pat(t, ty, binds)?;
                Pattern::inj("::", Pattern::tuple(vec![hp, tp]))
            }
            PatKind::List(ps) => {
                let elem = self.list_elem(span)?;
                self.unify(ty, &Ty::Data(Name::from("list")), span)?;
                let mut out = Pattern::inj0("nil");
                let items: Vec<Pattern> = ps.iter().map(|q| self.pat(q, &elem, binds)).collect::<Result<_>>()?;
                for q in items.into_iter().rev() {
                    out = Pattern::inj("::", Pattern::tuple(vec![q, out]));
                }
                out
            }
            PatKind::As(x, q) => {
                let v = self.bind(x, ty, span, binds)?;
                Pattern::Alias(v, Box::new(self.pat(q, ty, binds)?))
            }
            PatKind::Annot(q, t) => {
                let t = self.lower(t, span)?;
                self.unify(ty, &t, span)?;
                self.pat(q, ty, binds)?
            }
        })
    }

    fn bind(&mut self, x: &str, ty: &Ty, span: Span, binds: &mut Vec<(String, Var, Ty)>) -> Result<Var> {
        if binds.iter().any(|(n, _, _)| n == x) {
            return Err(FrontendError::type_error(span, format!("variable `{x}` bound twice in one pattern")));
        }
        let v = Var::fresh(x);
        binds.push((x.to_string(), v.clone(), ty.clone()));
        Ok(v)
    }

    /// A pattern that binds at most one variable and matches everything,
    /// as accepted by a plain lambda.
    fn simple_param(p: &Pat, ctors: &HashMap<String, (Name, Option<Type>)>) -> bool {
        match &p.kind {
            PatKind::Wild => true,
            PatKind::Ident(x) => !ctors.contains_key(x),
            PatKind::Annot(q, _) => Self::simple_param(q, ctors),
            _ => false,
        }
    }

    /// `λx:τ. body` for a simple parameter pattern.
    fn lambda_param(&mut self, p: &Pat, body: impl FnOnce(&mut Self) -> Result<(TExp, Ty)>) -> Result<(TExp, Ty)> {
        let t = self.meta();
        let mut binds = Vec::new();
        let pat = self.pat(p, &t, &mut binds)?;
        let x = match pat {
            Pattern::Var(v) => v,
            _ => Var::fresh("_"),
        };
        let (b, bt) = self.with_bindings(binds, body)?;
        Ok((TExp::Lambda(x, t.clone(), Box::new(b)), Ty::arrow(t, bt)))
    }

    fn rules(&mut self, m: &Match, sty: &Ty, rty: &Ty) -> Result<Vec<(Pattern, TExp)>> {
        let mut out = Vec::new();
        for (p, e) in m {
            let mut binds = Vec::new();
            let pat = self.pat(p, sty, &mut binds)?;
            let (b, bt) = self.with_bindings(binds, |s| s.exp(e))?;
            self.unify(&bt, rty, e.span)?;
            out.push((pat, b));
        }
        Ok(out)
    }

    fn funbind(&mut self, f: &FunBind) -> Result<(Var, Ty, TExp)> {
        let fv = Var::fresh(&f.name);
        let fty = self.meta();
        let recursive = is_recursive(f, &self.tables.ctor_names());
        let n_before = self.scope.len();
        if recursive {
            self.scope.push((f.name.clone(), fv.clone(), fty.clone()));
        }
        let result: Result<TExp> = (|| {
            let arity = f.clauses[0].params.len();
            let rty = self.meta();
            let (body, ty) = if f.clauses.len() == 1
                && f.clauses[0].params.iter().all(|p| Self::simple_param(p, &self.tables.ctors))
            {
                self.curried(&f.clauses[0].params, &f.clauses[0], &rty)?
            } else {
                let params: Vec<(Var, Ty)> = (0..arity).map(|i| (Var::fresh(&param_name(i)), self.meta())).collect();
                let scrut = if arity == 1 {
                    TExp::Var(params[0].0.clone())
                } else {
                    TExp::tuple(params.iter().map(|(v, _)| TExp::Var(v.clone())).collect())
                };
                let mut branches = Vec::new();
                for c in &f.clauses {
                    let mut binds = Vec::new();
                    let mut pats = Vec::new();
                    for (p, (_, t)) in c.params.iter().zip(&params) {
                        pats.push(self.pat(p, t, &mut binds)?);
                    }
                    let pat = if arity == 1 { pats.pop().expect("one") } else { Pattern::tuple(pats) };
                    let (b, bt) = self.with_bindings(binds, |s| s.exp(&c.body))?;
                    if let Some(r) = &c.result {
                        let r = self.lower(r, c.body.span)?;
                        self.unify(&bt, &r, c.body.span)?;
                    }
                    self.unify(&bt, &rty, c.body.span)?;
                    branches.push((pat, b));
                }
                let mut e = TExp::case(scrut, branches);
                let mut t = rty.clone();
                for (v, pt) in params.into_iter().rev() {
                    e = TExp::Lambda(v, pt.clone(), Box::new(e));
                    t = Ty::arrow(pt, t);
                }
                (e, t)
            };
            self.unify(&fty, &ty, f.span)?;
            Ok(body)
        })();
        self.scope.truncate(n_before);
        let body = result?;
        let def = if recursive { TExp::Fix(fv.clone(), fty.clone(), Box::new(body)) } else { body };
        Ok((fv, fty, def))
    }

    fn curried(&mut self, params: &[Pat], clause: &Clause, rty: &Ty) -> Result<(TExp, Ty)> {
        match params.split_first() {
            None => {
                let (b, bt) = self.exp(&clause.body)?;
                if let Some(r) = &clause.result {
                    let r = self.lower(r, clause.body.span)?;
                    self.unify(&bt, &r, clause.body.span)?;
                }
                self.unify(&bt, rty, clause.body.span)?;
                Ok((b, bt))
            }
            Some((p, rest)) => self.lambda_param(p, |s| s.curried(rest, clause, rty)),
        }
    }

    fn expect(&mut self, e: &Exp, ty: &Ty) -> Result<TExp> {
        let (t, et) = self.exp(e)?;
        self.unify(&et, ty, e.span)?;
        Ok(t)
    }

    fn exp(&mut self, e: &Exp) -> Result<(TExp, Ty)> {
        let span = e.span;
        match &e.kind {
            ExpKind::Int(n) => Ok((TExp::Const(Const::Int(*n)), Ty::Int)),
            ExpKind::Bool(b) => Ok((TExp::bool(*b), Ty::Bool)),
            ExpKind::Ident(x) => self.ident(x, span),
            ExpKind::Tuple(es) => {
                let mut items = Vec::new();
                let mut tys = Vec::new();
                for x in es {
                    let (t, ty) = self.exp(x)?;
                    items.push(t);
                    tys.push(ty);
                }
                Ok((TExp::tuple(items), Ty::tuple(tys)))
            }
            ExpKind::Record(fs) => {
                let mut seen = HashSet::new();
                let mut items = Vec::new();
                let mut tys = Vec::new();
                for (l, x) in fs {
                    if !seen.insert(l) {
                        return Err(FrontendError::type_error(span, format!("duplicate label `{l}`")));
                    }
                    let (t, ty) = self.exp(x)?;
                    items.push((Label::new(l), t));
                    tys.push((Label::new(l), ty));
                }
                items.sort_by(|a, b| a.0.cmp(&b.0));
                Ok((TExp::Record(items), Ty::record(tys)))
            }
            ExpKind::List(es) => {
                let elem = self.list_elem(span)?;
                let mut out = TExp::Inj(Ctor::new("nil"), None);
                let mut items = Vec::new();
                for x in es {
                    items.push(self.expect(x, &elem)?);
                }
                for t in items.into_iter().rev() {
                    out = TExp::Inj(Ctor::new("::"), Some(Box::new(TExp::tuple(vec![t, out]))));
                }
                Ok((out, Ty::Data(Name::from("list"))))
            }
            ExpKind::Selector(l) => {
                let r = Var::fresh("r");
                let rty = self.meta();
                let (body, fty) = self.proj(TExp::Var(r.clone()), rty.clone(), l, span)?;
                Ok((TExp::Lambda(r, rty.clone(), Box::new(body)), Ty::arrow(rty, fty)))
            }
            ExpKind::App(f, a) => {
                if let ExpKind::Ident(c) = &f.kind {
                    if let Some((d, arg)) = self.ctor(c) {
                        let Some(arg) = arg else {
                            return Err(FrontendError::type_error(
                                f.span,
                                format!("constructor `{c}` takes no argument"),
                            ));
                        };
                        let ta = self.expect(a, &arg)?;
                        return Ok((TExp::Inj(Ctor::new(c), Some(Box::new(ta))), Ty::Data(d)));
                    }
                }
                if let ExpKind::Selector(l) = &f.kind {
                    let (ta, aty) = self.exp(a)?;
                    return self.proj(ta, aty, l, span);
                }
                let (tf, fty) = self.exp(f)?;
                let (ta, aty) = self.exp(a)?;
                let rty = self.meta();
                self.unify(&fty, &Ty::arrow(aty, rty.clone()), span)?;
                Ok((TExp::app(tf, ta), rty))
            }
            ExpKind::Neg(a) => {
                let ta = self.expect(a, &Ty::Int)?;
                Ok((TExp::prim(PrimOp::Sub, TExp::Const(Const::Int(0)), ta), Ty::Int))
            }
            ExpKind::BinOp(op, a, b) => self.binop(*op, a, b, span),
            ExpKind::Fn(m) => {
                if let [(p, body)] = m.as_slice() {
                    if Self::simple_param(p, &self.tables.ctors) {
                        return self.lambda_param(p, |s| s.exp(body));
                    }
                }
                let x = Var::fresh("x");
                let sty = self.meta();
                let rty = self.meta();
                let bs = self.rules(m, &sty, &rty)?;
                Ok((TExp::Lambda(x.clone(), sty.clone(), Box::new(TExp::case(TExp::Var(x), bs))), Ty::arrow(sty, rty)))
            }
            ExpKind::Case(s, m) => {
                let (ts, sty) = self.exp(s)?;
                let rty = self.meta();
                let bs = self.rules(m, &sty, &rty)?;
                Ok((TExp::case(ts, bs), rty))
            }
            ExpKind::If(c, t, f) => {
                let tc = self.expect(c, &Ty::Bool)?;
                let (tt, ty) = self.exp(t)?;
                let tf = self.expect(f, &ty)?;
                Ok((TExp::if_(tc, tt, tf), ty))
            }
            ExpKind::Let(ds, body) => self.let_(ds, body),
            ExpKind::Annot(x, t) => {
                let t = self.lower(t, span)?;
                let tx = self.expect(x, &t)?;
                Ok((tx, t))
            }
        }
    }

    fn let_(&mut self, ds: &[Dec], body: &Exp) -> Result<(TExp, Ty)> {
        let Some((d, rest)) = ds.split_first() else {
            return self.exp(body);
        };
        match d {
            Dec::Val(p, e) => {
                let (te, ety) = self.exp(e)?;
                let mut binds = Vec::new();
                let pat = self.pat(p, &ety, &mut binds)?;
                let (tb, bty) = self.with_bindings(binds, |s| s.let_(rest, body))?;
                Ok((TExp::case(te, vec![(pat, tb)]), bty))
            }
            Dec::Fun(f) => {
                let (fv, fty, def) = self.funbind(f)?;
                let (tb, bty) = self.with_bindings(vec![(f.name.clone(), fv.clone(), fty)], |s| s.let_(rest, body))?;
                Ok((TExp::LetFun(fv, Box::new(def), Box::new(tb)), bty))
            }
            Dec::Datatype(_) | Dec::Type(..) => {
                Err(FrontendError::unsupported(body.span, "type declarations are only supported at top level"))
            }
        }
    }

    fn ident(&mut self, x: &str, span: Span) -> Result<(TExp, Ty)> {
        if let Some((v, t)) = self.lookup(x) {
            return Ok((TExp::Var(v), t));
        }
        if let Some((d, arg)) = self.ctor(x) {
            return Ok(match arg {
                None => (TExp::Inj(Ctor::new(x), None), Ty::Data(d)),
                Some(a) => {
                    let z = Var::fresh("z");
                    let body = TExp::Inj(Ctor::new(x), Some(Box::new(TExp::Var(z.clone()))));
                    (TExp::Lambda(z, a.clone(), Box::new(body)), Ty::arrow(a, Ty::Data(d)))
                }
            });
        }
        let prim = |op: PrimOp| {
            Ok((TExp::Prim(op), Ty::arrow(Ty::tuple(vec![Ty::Int, Ty::Int]), Ty::from_type(&op.result_type()))))
        };
        match x {
            "op+" => prim(PrimOp::Add),
            "op-" => prim(PrimOp::Sub),
            "op*" => prim(PrimOp::Mul),
            "op<" => prim(PrimOp::Lt),
            "op>" => prim(PrimOp::Gt),
            "op<=" => prim(PrimOp::Le),
            "op>=" => prim(PrimOp::Ge),
            "not" => {
                let b = Var::fresh("b");
                let body = TExp::if_(TExp::Var(b.clone()), TExp::bool(false), TExp::bool(true));
                Ok((TExp::Lambda(b, Ty::Bool, Box::new(body)), Ty::arrow(Ty::Bool, Ty::Bool)))
            }
            "op=" | "op<>" | "op::" => {
                let p = Var::fresh("p");
                let a = self.meta();
                let (body, ty, res) = if x == "op::" {
                    let elem = self.list_elem(span)?;
                    self.unify(&a, &elem, span)?;
                    let list = Ty::Data(Name::from("list"));
                    let body = TExp::Inj(Ctor::new("::"), Some(Box::new(TExp::Var(p.clone()))));
                    (body, Ty::tuple(vec![a, list.clone()]), list)
                } else {
                    let pair = Ty::tuple(vec![a.clone(), a.clone()]);
                    let body = TExp::Eq {
                        ty: a,
                        negate: x == "op<>",
                        lhs: Box::new(TExp::Proj(Box::new(TExp::Var(p.clone())), Label::pos(1))),
                        rhs: Box::new(TExp::Proj(Box::new(TExp::Var(p.clone())), Label::pos(2))),
                        span,
                    };
                    (body, pair, Ty::Bool)
                };
                Ok((TExp::Lambda(p, ty.clone(), Box::new(body)), Ty::arrow(ty, res)))
            }
            _ => Err(FrontendError::type_error(span, format!("unbound variable `{x}`"))),
        }
    }

    fn binop(&mut self, op: BinOp, a: &Exp, b: &Exp, span: Span) -> Result<(TExp, Ty)> {
        let arith = |o: BinOp| match o {
            BinOp::Add => Some(PrimOp::Add),
            BinOp::Sub => Some(PrimOp::Sub),
            BinOp::Mul => Some(PrimOp::Mul),
            BinOp::Lt => Some(PrimOp::Lt),
            BinOp::Gt => Some(PrimOp::Gt),
            BinOp::Le => Some(PrimOp::Le),
            BinOp::Ge => Some(PrimOp::Ge),
            _ => None,
        };
        if let Some(p) = arith(op) {
            let ta = self.expect(a, &Ty::Int)?;
            let tb = self.expect(b, &Ty::Int)?;
            return Ok((TExp::prim(p, ta, tb), Ty::from_type(&p.result_type())));
        }
        match op {
            BinOp::Eq | BinOp::Ne => {
                let (ta, aty) = self.exp(a)?;
                let tb = self.expect(b, &aty)?;
                Ok((
                    TExp::Eq { ty: aty, negate: op == BinOp::Ne, lhs: Box::new(ta), rhs: Box::new(tb), span },
                    Ty::Bool,
                ))
            }
            BinOp::Cons => {
                let elem = self.list_elem(span)?;
                let list = Ty::Data(Name::from("list"));
                let ta = self.expect(a, &elem)?;
                let tb = self.expect(b, &list)?;
                Ok((TExp::Inj(Ctor::new("::"), Some(Box::new(TExp::tuple(vec![ta, tb])))), list))
            }
            BinOp::Andalso => {
                let ta = self.expect(a, &Ty::Bool)?;
                let tb = self.expect(b, &Ty::Bool)?;
                Ok((TExp::if_(ta, tb, TExp::bool(false)), Ty::Bool))
            }
            BinOp::Orelse => {
                let ta = self.expect(a, &Ty::Bool)?;
                let tb = self.expect(b, &Ty::Bool)?;
                Ok((TExp::if_(ta, TExp::bool(true), tb), Ty::Bool))
            }
            _ => unreachable!("arithmetic handled above"),
        }
    }

    // Zonking.

    fn ground(&self, t: &Ty) -> Type {
        match self.repr(t) {
            Ty::Meta(_) | Ty::Int => Type::Int,
            Ty::Bool => Type::Bool,
            Ty::Data(n) => Type::Data(n),
            Ty::Record(fs) => Type::Record(fs.iter().map(|(l, t)| (l.clone(), self.ground(t))).collect()),
            Ty::Arrow(a, b) => Type::arrow(self.ground(&a), self.ground(&b)),
        }
    }

    fn free_metas(&self, t: &Ty, out: &mut Vec<usize>) {
        match self.repr(t) {
            Ty::Meta(i) => {
                if !out.contains(&i) {
                    out.push(i);
                }
            }
            Ty::Record(fs) => fs.iter().for_each(|(_, t)| self.free_metas(t, out)),
            Ty::Arrow(a, b) => {
                self.free_metas(&a, out);
                self.free_metas(&b, out);
            }
            _ => {}
        }
    }

    fn zonk(&self, e: TExp, env: &DataEnv) -> Result<Expr> {
        Ok(match e {
            TExp::Const(c) => Expr::Const(c),
            TExp::Var(v) => Expr::Var(v),
            TExp::Prim(p) => Expr::Prim(p),
            TExp::Record(fs) => {
                Expr::Record(fs.into_iter().map(|(l, e)| Ok((l, self.zonk(e, env)?))).collect::<Result<_>>()?)
            }
            TExp::Proj(r, l) => Expr::proj(self.zonk(*r, env)?, l),
            TExp::Inj(c, a) => Expr::Inj(c, a.map(|a| self.zonk(*a, env).map(Box::new)).transpose()?),
            TExp::Case(s, bs) => Expr::case(
                self.zonk(*s, env)?,
                bs.into_iter().map(|(p, b)| Ok((p, self.zonk(b, env)?))).collect::<Result<_>>()?,
            ),
            TExp::Lambda(x, t, b) => Expr::lam(x, self.ground(&t), self.zonk(*b, env)?),
            TExp::Fix(x, t, b) => Expr::fix(x, self.ground(&t), self.zonk(*b, env)?),
            TExp::App(f, a) => Expr::app(self.zonk(*f, env)?, self.zonk(*a, env)?),
            TExp::LetFun(f, def, body) => {
                let def = self.zonk(*def, env)?;
                substitute(&self.zonk(*body, env)?, &f, &def)
            }
            TExp::Eq { ty, negate, lhs, rhs, span } => {
                let (a, b) = (self.zonk(*lhs, env)?, self.zonk(*rhs, env)?);
                equality(&self.ground(&ty), a, b, negate, env, span)?
            }
        })
    }
}

fn is_simple(e: &Expr) -> bool {
    matches!(e, Expr::Var(_) | Expr::Const(_) | Expr::Inj(_, None))
}

fn if_expr(c: Expr, t: Expr, f: Expr) -> Expr {
    Expr::case(c, vec![(Pattern::Const(Const::Bool(true)), t), (Pattern::Const(Const::Bool(false)), f)])
}

/// `a = b` (or `a <> b`) at a type with decidable equality: int, bool, or
/// an enumeration datatype.
fn equality(ty: &Type, a: Expr, b: Expr, negate: bool, env: &DataEnv, span: Span) -> Result<Expr> {
    if !is_simple(&a) || !is_simple(&b) {
        let (p, q) = (Var::fresh("p"), Var::fresh("q"));
        let inner = equality(ty, Expr::Var(p.clone()), Expr::Var(q.clone()), negate, env, span)?;
        return Ok(Expr::case(
            Expr::tuple(vec![a, b]),
            vec![(Pattern::tuple(vec![Pattern::Var(p), Pattern::Var(q)]), inner)],
        ));
    }
    let (yes, no) = (Expr::bool(!negate), Expr::bool(negate));
    Ok(match ty {
        Type::Int => if_expr(
            Expr::prim(PrimOp::Le, a.clone(), b.clone()),
            if_expr(Expr::prim(PrimOp::Le, b, a), yes, no.clone()),
            no,
        ),
        Type::Bool => if_expr(a, if_expr(b.clone(), yes.clone(), no.clone()), if_expr(b, no, yes)),
        Type::Data(d) => {
            let ctors = env.ctors_of(d).unwrap_or(&[]);
            if ctors.iter().any(|c| c.arg.is_some()) {
                return Err(FrontendError::unsupported(
                    span,
                    format!("equality on datatype `{d}`, whose constructors carry values"),
                ));
            }
            let branches = ctors
                .iter()
                .map(|c| {
                    let inner = Expr::case(
                        b.clone(),
                        vec![(Pattern::Inj(c.ctor.clone(), None), yes.clone()), (Pattern::Wildcard, no.clone())],
                    );
                    (Pattern::Inj(c.ctor.clone(), None), inner)
                })
                .collect();
            Expr::case(a, branches)
        }
        other => return Err(FrontendError::unsupported(span, format!("equality at type `{other}`"))),
    })
}

pub(super) fn transpile(prog: &SurfaceProgram, entry: &str, inst: &Instantiation) -> Result<Transpiled> {
    let tables = Tables::build(prog, inst)?;
    let env = tables.env();
    let exp = entry_expression(prog, entry, &tables.ctor_names())?;
    let mut el = Elab::new(&tables);
    let (te, ty) = el.exp(&exp)?;
    el.solve_pending()?;

    let mut metas = Vec::new();
    el.free_metas(&ty, &mut metas);
    if !metas.is_empty() {
        let names: Vec<String> = (0..metas.len())
            .map(|i| {
                let c = (b'a' + (i % 26) as u8) as char;
                if i < 26 {
                    format!("'{c}")
                } else {
                    format!("'{c}{}", i / 26)
                }
            })
            .collect();
        let missing: Vec<&String> = names.iter().filter(|n| !inst.contains_key(*n)).collect();
        if !missing.is_empty() {
            let mut shown = el.resolve(&ty).to_string();
            for (m, n) in metas.iter().zip(&names) {
                shown = shown.replace(&format!("'_{m}"), n);
            }
            return Err(FrontendError::PolymorphicEntryPoint {
                ty: shown,
                missing: missing.iter().map(|s| format!("`{s}`")).collect::<Vec<_>>().join(", "),
            });
        }
        for (m, n) in metas.iter().zip(&names) {
            let t = tables.lower_closed(&inst[n], &HashMap::new(), false)?;
            el.unify(&Ty::Meta(*m), &Ty::from_type(&t), exp.span)?;
        }
        el.solve_pending()?;
    }
    if let Some((_, l, _, span)) = el.pending.first() {
        return Err(FrontendError::type_error(*span, format!("cannot infer the record type selected by `#{l}`")));
    }
    let ty = el.ground(&ty);
    let expr = el.zonk(te, &env)?;
    let checked = typecheck(&TypingContext::initial(), &expr, &env)?;
    if checked != ty {
        return Err(StaticsError::TypeMismatch {
            context: "entry point".into(),
            expected: ty.to_string(),
            found: checked.to_string(),
        }
        .into());
    }
    Ok(Transpiled { expr, ty, env })
}
