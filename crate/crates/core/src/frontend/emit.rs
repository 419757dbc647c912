//! Core expressions back to surface programs.

use std::collections::{HashMap, HashSet};

use super::ast::*;
use super::FrontendError;
use crate::syntax::{Const, DataEnv, Expr, Label, Pattern, PrimOp, Type, Var};

const KEYWORDS: [&str; 24] = [
    "and", "andalso", "as", "case", "datatype", "else", "end", "false", "fn", "fun", "if", "in", "let", "of", "op",
    "orelse", "rec", "then", "true", "type", "val", "not", "int", "bool",
];

struct Names {
    given: HashMap<Var, String>,
    taken: HashSet<String>,
}

impl Names {
    fn new(env: &DataEnv) -> Self {
        let mut taken: HashSet<String> = KEYWORDS.iter().map(|s| s.to_string()).collect();
        for (name, ctors) in env.datatypes() {
            taken.insert(name.to_string());
            taken.extend(ctors.iter().map(|c| c.ctor.as_str().to_string()));
        }
        Names { given: HashMap::new(), taken }
    }

    fn bind(&mut self, x: &Var) -> String {
        if let Some(n) = self.given.get(x) {
            return n.clone();
        }
        let mut base: String =
            x.name.chars().filter(|c| c.is_ascii_alphanumeric() || *c == '_' || *c == '\'').collect();
        if !base.starts_with(|c: char| c.is_ascii_alphabetic()) {
            base.insert(0, 'v');
        }
        let mut name = base.clone();
        let mut k = 1;
        while self.taken.contains(&name) {
            k += 1;
            name = format!("{base}{k}");
        }
        self.taken.insert(name.clone());
        self.given.insert(x.clone(), name.clone());
        name
    }

    fn get(&self, x: &Var) -> Result<String, FrontendError> {
        self.given
            .get(x)
            .cloned()
            .ok_or_else(|| FrontendError::unsupported(Span::default(), format!("free variable `{}`", x.name)))
    }
}

fn exp(kind: ExpKind) -> Exp {
    Exp { kind, span: Span::default() }
}

fn pat_of(kind: PatKind) -> Pat {
    Pat { kind, span: Span::default() }
}

fn positional(labels: impl ExactSizeIterator<Item = Label> + Clone) -> bool {
    labels.len() >= 2 && labels.enumerate().all(|(i, l)| l == Label::pos(i + 1))
}

/// The surface spelling of a core type.
pub fn type_ast(t: &Type) -> TyAst {
    match t {
        Type::Int => TyAst::Con(Vec::new(), "int".into()),
        Type::Bool => TyAst::Con(Vec::new(), "bool".into()),
        Type::Data(n) => TyAst::Con(Vec::new(), n.to_string()),
        Type::Record(fs) if fs.is_empty() => TyAst::Con(Vec::new(), "unit".into()),
        Type::Record(fs) if positional(fs.iter().map(|(l, _)| l.clone())) => {
            TyAst::Tuple(fs.iter().map(|(_, t)| type_ast(t)).collect())
        }
        Type::Record(fs) => TyAst::Record(fs.iter().map(|(l, t)| (l.to_string(), type_ast(t))).collect()),
        Type::Arrow(a, b) => TyAst::Arrow(Box::new(type_ast(a)), Box::new(type_ast(b))),
    }
}

fn binop(o: PrimOp) -> BinOp {
    match o {
        PrimOp::Add => BinOp::Add,
        PrimOp::Sub => BinOp::Sub,
        PrimOp::Mul => BinOp::Mul,
        PrimOp::Lt => BinOp::Lt,
        PrimOp::Gt => BinOp::Gt,
        PrimOp::Le => BinOp::Le,
        PrimOp::Ge => BinOp::Ge,
    }
}

struct Emitter {
    names: Names,
}

impl Emitter {
    fn pattern(&mut self, p: &Pattern) -> Pat {
        pat_of(match p {
            Pattern::Wildcard => PatKind::Wild,
            Pattern::Var(x) => PatKind::Ident(self.names.bind(x)),
            Pattern::Const(Const::Int(n)) => PatKind::Int(*n),
            Pattern::Const(Const::Bool(b)) => PatKind::Bool(*b),
            Pattern::Record(fs) if fs.is_empty() => PatKind::Tuple(Vec::new()),
            Pattern::Record(fs) if positional(fs.iter().map(|(l, _)| l.clone())) => {
                PatKind::Tuple(fs.iter().map(|(_, q)| self.pattern(q)).collect())
            }
            Pattern::Record(fs) => PatKind::Record(fs.iter().map(|(l, q)| (l.to_string(), self.pattern(q))).collect()),
            Pattern::Alias(x, q) => PatKind::As(self.names.bind(x), Box::new(self.pattern(q))),
            Pattern::Inj(c, None) => PatKind::Ident(c.as_str().to_string()),
            Pattern::Inj(c, Some(q)) => PatKind::Con(c.as_str().to_string(), Box::new(self.pattern(q))),
        })
    }

    fn lambda(&mut self, x: &Var, t: &Type, body: &Expr) -> Result<(Pat, Exp), FrontendError> {
        let name = self.names.bind(x);
        let p = pat_of(PatKind::Annot(Box::new(pat_of(PatKind::Ident(name))), type_ast(t)));
        Ok((p, self.expr(body)?))
    }

    fn expr(&mut self, e: &Expr) -> Result<Exp, FrontendError> {
        Ok(exp(match e {
            Expr::Const(Const::Int(n)) if *n < 0 => ExpKind::Neg(Box::new(exp(ExpKind::Int(n.wrapping_neg())))),
            Expr::Const(Const::Int(n)) => ExpKind::Int(*n),
            Expr::Const(Const::Bool(b)) => ExpKind::Bool(*b),
            Expr::Var(x) => ExpKind::Ident(self.names.get(x)?),
            Expr::Record(fs) if fs.is_empty() => ExpKind::Tuple(Vec::new()),
            Expr::Record(fs) if positional(fs.iter().map(|(l, _)| l.clone())) => {
                ExpKind::Tuple(fs.iter().map(|(_, x)| self.expr(x)).collect::<Result<_, _>>()?)
            }
            Expr::Record(fs) => ExpKind::Record(
                fs.iter().map(|(l, x)| Ok((l.to_string(), self.expr(x)?))).collect::<Result<_, FrontendError>>()?,
            ),
            Expr::Proj(r, l) => ExpKind::App(Box::new(exp(ExpKind::Selector(l.to_string()))), Box::new(self.expr(r)?)),
            Expr::Inj(c, None) => ExpKind::Ident(c.as_str().to_string()),
            Expr::Inj(c, Some(a)) => {
                ExpKind::App(Box::new(exp(ExpKind::Ident(c.as_str().to_string()))), Box::new(self.expr(a)?))
            }
            Expr::Prim(o) => ExpKind::Ident(format!("op{}", o.symbol())),
            Expr::App(f, a) => match (&**f, &**a) {
                (Expr::Prim(o), Expr::Record(fs)) if fs.len() == 2 => {
                    ExpKind::BinOp(binop(*o), Box::new(self.expr(&fs[0].1)?), Box::new(self.expr(&fs[1].1)?))
                }
                _ => ExpKind::App(Box::new(self.expr(f)?), Box::new(self.expr(a)?)),
            },
            Expr::Lambda(x, t, body) => ExpKind::Fn(vec![self.lambda(x, t, body)?]),
            Expr::Case(s, bs) => {
                let s = self.expr(s)?;
                let mut rules = Vec::with_capacity(bs.len());
                for (p, b) in bs {
                    let p = self.pattern(p);
                    rules.push((p, self.expr(b)?));
                }
                ExpKind::Case(Box::new(s), rules)
            }
            Expr::Fix(f, ty, body) => {
                let (Expr::Lambda(x, dom, inner), Type::Arrow(_, cod)) = (&**body, ty) else {
                    return Err(FrontendError::unsupported(Span::default(), "fix whose body is not a function"));
                };
                let name = self.names.bind(f);
                let (param, body) = self.lambda(x, dom, inner)?;
                let fb = FunBind {
                    name: name.clone(),
                    clauses: vec![Clause { params: vec![param], result: Some(type_ast(cod)), body }],
                    span: Span::default(),
                };
                ExpKind::Let(vec![Dec::Fun(fb)], Box::new(exp(ExpKind::Ident(name))))
            }
        }))
    }
}

/// A program declaring every datatype of `env` and binding `name` to `e`.
pub fn to_surface(name: &str, e: &Expr, env: &DataEnv) -> Result<SurfaceProgram, FrontendError> {
    let mut decs = Vec::new();
    for (dt, ctors) in env.datatypes() {
        let ctors = ctors
            .iter()
            .map(|c| ConBind { name: c.ctor.as_str().to_string(), arg: c.arg.as_ref().map(type_ast) })
            .collect();
        decs.push(Dec::Datatype(vec![DataBind { params: Vec::new(), name: dt.to_string(), ctors }]));
    }
    let mut em = Emitter { names: Names::new(env) };
    em.names.taken.insert(name.to_string());
    let body = em.expr(e)?;
    decs.push(Dec::Val(pat_of(PatKind::Ident(name.to_string())), body));
    Ok(SurfaceProgram { decs })
}

#[cfg(test)]
mod tests {
    use super::super::load;
    use super::*;
    use crate::dynamics::{oracle_equiv, OracleConfig, OracleVerdict};
    use crate::generate::{option_env, TermConfig, TermGen};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_terms_survive_the_round_trip() {
        let env = option_env();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = OracleConfig { int_range: 1 << 20, ..Default::default() };
        for _ in 0..150 {
            let mut g = TermGen::new(&env, &mut rng, TermConfig::default());
            let ty = g.ty(2);
            let e = g.closed(&ty);
            let src = to_surface("main", &e, &env).unwrap().to_string();
            let back = load(&src, "main", &Default::default()).unwrap_or_else(|err| panic!("{err}\n{src}"));
            assert_eq!(back.ty, ty, "{src}");
            assert!(!matches!(oracle_equiv(&e, &back.expr, &ty, &env, &cfg), OracleVerdict::Disagree(_)), "{src}");
        }
    }

    #[test]
    fn fix_becomes_local_fun() {
        let env = DataEnv::new();
        let (f, n) = (Var::named("f"), Var::named("n"));
        let e = Expr::fix(
            f.clone(),
            Type::arrow(Type::Int, Type::Int),
            Expr::lam(n.clone(), Type::Int, Expr::app(Expr::Var(f), Expr::Var(n))),
        );
        let src = to_surface("g", &e, &env).unwrap().to_string();
        assert!(src.contains("fun f (n : int) : int = f n"), "{src}");
    }
}
