//! Random well-typed closed terms and semantics-preserving mutations.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::statics::{pattern_type, type_of};
use crate::subst::rename;
use crate::syntax::{Const, Ctor, CtorSig, DataEnv, Expr, Label, Pattern, PrimOp, Type, TypingContext, Var};

/// `option = NONE | SOME of int`.
pub fn option_env() -> DataEnv {
    let mut env = DataEnv::new();
    env.add_datatype(
        "option",
        vec![CtorSig { ctor: Ctor::new("NONE"), arg: None }, CtorSig { ctor: Ctor::new("SOME"), arg: Some(Type::Int) }],
    )
    .expect("fresh environment");
    env
}

pub fn option_type() -> Type {
    Type::data("option")
}

#[derive(Clone, Debug)]
pub struct TermConfig {
    pub depth: usize,
    /// Allow bounded recursion through `fix`.
    pub fix: bool,
    pub int_range: i64,
}

impl Default for TermConfig {
    fn default() -> Self {
        TermConfig { depth: 4, fix: true, int_range: 3 }
    }
}

const NAMES: [&str; 6] = ["a", "b", "c", "n", "m", "k"];

pub struct TermGen<'a, R: Rng> {
    pub env: &'a DataEnv,
    pub rng: &'a mut R,
    pub cfg: TermConfig,
}

impl<'a, R: Rng> TermGen<'a, R> {
    pub fn new(env: &'a DataEnv, rng: &'a mut R, cfg: TermConfig) -> Self {
        TermGen { env, rng, cfg }
    }

    fn fresh(&mut self) -> Var {
        Var::fresh(NAMES.choose(self.rng).expect("nonempty"))
    }

    /// A random type built from int, bool, the environment's datatypes,
    /// pairs and arrows.
    pub fn ty(&mut self, depth: usize) -> Type {
        let datas: Vec<Type> = self.env.datatypes().map(|(n, _)| Type::Data(n.clone())).collect();
        let k = if depth == 0 { self.rng.gen_range(0..3) } else { self.rng.gen_range(0..5) };
        match k {
            0 => Type::Int,
            1 => Type::Bool,
            2 => datas.choose(self.rng).cloned().unwrap_or(Type::Int),
            3 => Type::tuple(vec![self.ty(depth - 1), self.ty(depth - 1)]),
            _ => Type::arrow(self.ty(depth - 1), self.ty(depth - 1)),
        }
    }

    /// A closed term of type `ty`.
    pub fn closed(&mut self, ty: &Type) -> Expr {
        let d = self.cfg.depth;
        self.expr(&TypingContext::new(), ty, d)
    }

    pub fn expr(&mut self, ctx: &TypingContext, ty: &Type, depth: usize) -> Expr {
        let vars: Vec<Var> = ctx.iter().filter(|(_, t)| *t == ty).map(|(x, _)| x.clone()).collect();
        if !vars.is_empty() && self.rng.gen_bool(if depth == 0 { 0.7 } else { 0.25 }) {
            return Expr::Var(vars.choose(self.rng).expect("nonempty").clone());
        }
        if depth == 0 {
            return self.leaf(ctx, ty);
        }
        if self.rng.gen_bool(0.15) {
            return self.case(ctx, ty, depth);
        }
        if self.rng.gen_bool(0.08) {
            return self.redex(ctx, ty, depth);
        }
        if let Some(e) = self.elim(ctx, ty, depth) {
            return e;
        }
        match ty {
            Type::Int => {
                if self.rng.gen_bool(0.6) {
                    let op = *[PrimOp::Add, PrimOp::Sub, PrimOp::Mul].choose(self.rng).expect("nonempty");
                    let a = self.expr(ctx, &Type::Int, depth - 1);
                    let b = self.expr(ctx, &Type::Int, depth - 1);
                    Expr::prim(op, a, b)
                } else {
                    self.leaf(ctx, ty)
                }
            }
            Type::Bool => {
                if self.rng.gen_bool(0.6) {
                    let op = *[PrimOp::Lt, PrimOp::Gt, PrimOp::Le, PrimOp::Ge].choose(self.rng).expect("nonempty");
                    let a = self.expr(ctx, &Type::Int, depth - 1);
                    let b = self.expr(ctx, &Type::Int, depth - 1);
                    Expr::prim(op, a, b)
                } else {
                    self.leaf(ctx, ty)
                }
            }
            Type::Data(n) => {
                let ctors = self.env.ctors_of(n).expect("well-formed type").to_vec();
                let sig = ctors.choose(self.rng).expect("nonempty datatype").clone();
                match &sig.arg {
                    None => Expr::Inj(sig.ctor, None),
                    Some(a) => {
                        let arg = self.expr(ctx, a, depth - 1);
                        Expr::Inj(sig.ctor, Some(Box::new(arg)))
                    }
                }
            }
            Type::Record(fs) => {
                Expr::Record(fs.iter().map(|(l, t)| (l.clone(), self.expr(ctx, t, depth - 1))).collect())
            }
            Type::Arrow(dom, cod) => {
                if self.cfg.fix && **dom == Type::Int && self.rng.gen_bool(0.2) {
                    return self.bounded_fix(ctx, cod, depth);
                }
                let x = self.fresh();
                let body = self.expr(&ctx.with(x.clone(), (**dom).clone()), cod, depth - 1);
                Expr::lam(x, (**dom).clone(), body)
            }
        }
    }

    fn leaf(&mut self, ctx: &TypingContext, ty: &Type) -> Expr {
        match ty {
            Type::Int => Expr::int(self.rng.gen_range(-self.cfg.int_range..=self.cfg.int_range)),
            Type::Bool => Expr::bool(self.rng.gen()),
            Type::Data(n) => {
                let ctors = self.env.ctors_of(n).expect("well-formed type").to_vec();
                let nullary: Vec<&CtorSig> = ctors.iter().filter(|c| c.arg.is_none()).collect();
                match nullary.choose(self.rng) {
                    Some(c) if self.rng.gen_bool(0.5) => Expr::Inj(c.ctor.clone(), None),
                    _ => {
                        let sig = ctors.choose(self.rng).expect("nonempty datatype").clone();
                        match &sig.arg {
                            None => Expr::Inj(sig.ctor, None),
                            Some(a) => {
                                let arg = self.expr(ctx, a, 0);
                                Expr::Inj(sig.ctor, Some(Box::new(arg)))
                            }
                        }
                    }
                }
            }
            Type::Record(fs) => Expr::Record(fs.iter().map(|(l, t)| (l.clone(), self.expr(ctx, t, 0))).collect()),
            Type::Arrow(dom, cod) => {
                let x = self.fresh();
                let body = self.expr(&ctx.with(x.clone(), (**dom).clone()), cod, 0);
                Expr::lam(x, (**dom).clone(), body)
            }
        }
    }

    /// Uses of context variables that produce `ty`: projections and
    /// applications.
    fn elim(&mut self, ctx: &TypingContext, ty: &Type, depth: usize) -> Option<Expr> {
        let mut options: Vec<Expr> = Vec::new();
        for (x, t) in ctx.iter() {
            match t {
                Type::Record(fs) => {
                    for (l, ft) in fs {
                        if ft == ty {
                            options.push(Expr::proj(Expr::Var(x.clone()), l.clone()));
                        }
                    }
                }
                Type::Arrow(_, cod) if **cod == *ty => options.push(Expr::Var(x.clone())),
                _ => {}
            }
        }
        if options.is_empty() || !self.rng.gen_bool(0.3) {
            return None;
        }
        let e = options.choose(self.rng).expect("nonempty").clone();
        if let Expr::Var(f) = &e {
            let Some(Type::Arrow(dom, _)) = ctx.get(f).cloned() else { unreachable!("arrow chosen") };
            let arg = self.expr(ctx, &dom, depth - 1);
            return Some(Expr::app(e, arg));
        }
        Some(e)
    }

    fn case(&mut self, ctx: &TypingContext, ty: &Type, depth: usize) -> Expr {
        let scrut_vars: Vec<(Var, Type)> =
            ctx.iter().filter(|(_, t)| !t.is_arrow()).map(|(x, t)| (x.clone(), t.clone())).collect();
        let (scrut, sty) = match scrut_vars.choose(self.rng) {
            Some((x, t)) if self.rng.gen_bool(0.6) => (Expr::Var(x.clone()), t.clone()),
            _ => {
                let st = self.ty(0);
                (self.expr(ctx, &st, depth - 1), st)
            }
        };
        let mut branches = Vec::new();
        for p in self.patterns(&sty) {
            let pctx = pattern_type(&p, &sty, self.env).expect("generated pattern fits its type");
            let body = self.expr(&ctx.extended(&pctx), ty, depth - 1);
            branches.push((p, body));
        }
        Expr::case(scrut, branches)
    }

    /// An exhaustive list of patterns for `ty`.
    fn patterns(&mut self, ty: &Type) -> Vec<Pattern> {
        match ty {
            Type::Bool if self.rng.gen_bool(0.8) => {
                vec![Pattern::Const(Const::Bool(true)), Pattern::Const(Const::Bool(false))]
            }
            Type::Int if self.rng.gen_bool(0.7) => {
                let k = self.rng.gen_range(-2..=2);
                vec![Pattern::Const(Const::Int(k)), self.binder()]
            }
            Type::Data(n) => {
                let ctors = self.env.ctors_of(n).expect("well-formed type").to_vec();
                let mut out: Vec<Pattern> = ctors
                    .iter()
                    .map(|c| match &c.arg {
                        None => Pattern::Inj(c.ctor.clone(), None),
                        Some(_) => Pattern::Inj(c.ctor.clone(), Some(Box::new(self.binder()))),
                    })
                    .collect();
                if out.len() > 1 && self.rng.gen_bool(0.2) {
                    out.truncate(1);
                    out.push(self.binder());
                }
                out
            }
            Type::Record(fs) if self.rng.gen_bool(0.7) => {
                vec![Pattern::Record(fs.iter().map(|(l, _)| (l.clone(), self.binder())).collect())]
            }
            _ => vec![self.binder()],
        }
    }

    fn binder(&mut self) -> Pattern {
        if self.rng.gen_bool(0.15) {
            Pattern::Wildcard
        } else {
            Pattern::Var(self.fresh())
        }
    }

    fn redex(&mut self, ctx: &TypingContext, ty: &Type, depth: usize) -> Expr {
        let at = self.ty(0);
        let x = self.fresh();
        let body = self.expr(&ctx.with(x.clone(), at.clone()), ty, depth - 1);
        let arg = self.expr(ctx, &at, depth - 1);
        Expr::app(Expr::lam(x, at, body), arg)
    }

    /// `fix f. λn. if n <= 0 orelse 8 <= n then base else step (f (n-1))`.
    fn bounded_fix(&mut self, ctx: &TypingContext, cod: &Type, depth: usize) -> Expr {
        let fty = Type::arrow(Type::Int, cod.clone());
        let (f, n, r) = (Var::fresh("f"), Var::fresh("n"), Var::fresh("r"));
        let inner = ctx.with(n.clone(), Type::Int);
        let base = self.expr(&inner, cod, depth - 1);
        let stop = self.expr(&inner, cod, depth - 1);
        let step = self.expr(&inner.with(r.clone(), cod.clone()), cod, depth - 1);
        let call = Expr::app(Expr::Var(f.clone()), Expr::prim(PrimOp::Sub, Expr::Var(n.clone()), Expr::int(1)));
        let recur = Expr::case(call, vec![(Pattern::Var(r), step)]);
        let tt = Pattern::Const(Const::Bool(true));
        let ff = Pattern::Const(Const::Bool(false));
        let body = Expr::case(
            Expr::prim(PrimOp::Le, Expr::Var(n.clone()), Expr::int(0)),
            vec![
                (tt.clone(), base),
                (
                    ff.clone(),
                    Expr::case(
                        Expr::prim(PrimOp::Le, Expr::int(8), Expr::Var(n.clone())),
                        vec![(tt, stop), (ff, recur)],
                    ),
                ),
            ],
        );
        Expr::fix(f, fty, Expr::lam(n, Type::Int, body))
    }
}

// Mutations.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Renames every binder.
    AlphaRename,
    /// A term `t` outside term-only positions becomes `case t {v. v}`.
    LetValWrap,
    /// An integer term `t` becomes `t + 0`.
    AddZero,
    /// A pair term `(a, b)` outside term-only positions becomes
    /// `case (b, a) {s. (s.2, s.1)}`, or a case on a
    /// pair swaps its components in the scrutinee and every pattern.
    TupleReorder,
    /// `case t {SOME·x. e | NONE. NONE}` becomes `bind t (λx. e)` with an
    /// inlined `bind`.
    Monadic,
}

impl Mutation {
    pub const ALL: [Mutation; 5] =
        [Mutation::AlphaRename, Mutation::LetValWrap, Mutation::AddZero, Mutation::TupleReorder, Mutation::Monadic];
}

/// Whether `e` is a term in the sense of formula leaves: built from
/// variables, constants, records, projections, injections and primitive
/// applications.
fn is_term(e: &Expr) -> bool {
    crate::formula::is_term(e)
}

fn is_pair_literal(e: &Expr) -> bool {
    matches!(e, Expr::Record(fs) if fs.len() == 2 && fs[0].0 == Label::pos(1) && fs[1].0 == Label::pos(2))
}

fn swap_pair_pattern(p: &Pattern) -> Option<Pattern> {
    match p {
        Pattern::Wildcard => Some(Pattern::Wildcard),
        Pattern::Record(fs) if fs.len() == 2 => {
            Some(Pattern::Record(vec![(Label::pos(1), fs[1].1.clone()), (Label::pos(2), fs[0].1.clone())]))
        }
        _ => None,
    }
}

fn monadic(s: &Expr, bs: &[(Pattern, Expr)], env: &DataEnv) -> Option<Expr> {
    let [(p1, e1), (p2, e2)] = bs else { return None };
    let (some, none) = match (p1, p2) {
        (Pattern::Inj(c, Some(_)), Pattern::Inj(d, None)) if c.as_str() == "SOME" && d.as_str() == "NONE" => (0, 1),
        (Pattern::Inj(d, None), Pattern::Inj(c, Some(_))) if c.as_str() == "SOME" && d.as_str() == "NONE" => (1, 0),
        _ => return None,
    };
    let none_body = [e1, e2][none];
    if !matches!(none_body, Expr::Inj(c, None) if c.as_str() == "NONE") {
        return None;
    }
    let (Pattern::Inj(_, Some(inner)), body) = (&bs[some].0, &bs[some].1) else { unreachable!() };
    let arg_ty = env.ctor(&Ctor::new("SOME"))?.arg.clone()?;
    let opt = Type::Data(env.ctor(&Ctor::new("SOME"))?.datatype.clone());
    let x = match &**inner {
        Pattern::Var(x) => Expr::lam(x.clone(), arg_ty.clone(), body.clone()),
        p => {
            let z = Var::fresh("z");
            Expr::lam(z.clone(), arg_ty.clone(), Expr::case(Expr::Var(z), vec![((*p).clone(), body.clone())]))
        }
    };
    let (a, f, b) = (Var::fresh("a"), Var::fresh("f"), Var::fresh("b"));
    let bind = Expr::lam(
        a.clone(),
        opt.clone(),
        Expr::lam(
            f.clone(),
            Type::arrow(arg_ty, opt),
            Expr::case(
                Expr::Var(a),
                vec![
                    (Pattern::inj("SOME", Pattern::Var(b.clone())), Expr::app(Expr::Var(f), Expr::Var(b))),
                    (Pattern::inj0("NONE"), Expr::inj0("NONE")),
                ],
            ),
        ),
    );
    Some(Expr::apps(bind, [s.clone(), x]))
}

fn alpha_rename(e: &Expr) -> Expr {
    fn refresh(x: &Var) -> Var {
        Var::fresh(&format!("{}'", x.name))
    }
    match e {
        Expr::Const(_) | Expr::Var(_) | Expr::Prim(_) | Expr::Inj(_, None) => e.clone(),
        Expr::Record(fs) => Expr::Record(fs.iter().map(|(l, e)| (l.clone(), alpha_rename(e))).collect()),
        Expr::Proj(r, l) => Expr::proj(alpha_rename(r), l.clone()),
        Expr::Inj(c, Some(a)) => Expr::inj(c.as_str(), alpha_rename(a)),
        Expr::App(f, a) => Expr::app(alpha_rename(f), alpha_rename(a)),
        Expr::Lambda(x, t, b) => {
            let y = refresh(x);
            Expr::lam(y.clone(), t.clone(), rename(&alpha_rename(b), &[(x.clone(), y)]))
        }
        Expr::Fix(x, t, b) => {
            let y = refresh(x);
            Expr::fix(y.clone(), t.clone(), rename(&alpha_rename(b), &[(x.clone(), y)]))
        }
        Expr::Case(s, bs) => Expr::case(
            alpha_rename(s),
            bs.iter()
                .map(|(p, b)| {
                    let ren: Vec<(Var, Var)> = p.vars().iter().map(|v| (v.clone(), refresh(v))).collect();
                    (crate::subst::rename_pattern(p, &ren), rename(&alpha_rename(b), &ren))
                })
                .collect(),
        ),
    }
}

/// Rewrites the `n`th subterm accepted by `f`, counting in preorder. `f`
/// is told whether the position requires a term: inside a larger term or
/// as a case scrutinee.
struct Site<'a, F> {
    env: &'a DataEnv,
    f: F,
    target: usize,
    seen: usize,
}

impl<F: FnMut(&TypingContext, &Expr, bool) -> Option<Expr>> Site<'_, F> {
    fn go(&mut self, ctx: &TypingContext, e: &Expr) -> Expr {
        self.at(ctx, e, false)
    }

    fn at(&mut self, ctx: &TypingContext, e: &Expr, in_term: bool) -> Expr {
        if let Some(r) = (self.f)(ctx, e, in_term) {
            let hit = self.seen == self.target;
            self.seen += 1;
            if hit {
                return r;
            }
        }
        match e {
            Expr::Const(_) | Expr::Var(_) | Expr::Prim(_) | Expr::Inj(_, None) => e.clone(),
            Expr::Record(fs) => {
                let inner = is_term(e);
                Expr::Record(fs.iter().map(|(l, x)| (l.clone(), self.at(ctx, x, inner))).collect())
            }
            Expr::Proj(r, l) => Expr::proj(self.at(ctx, r, is_term(e)), l.clone()),
            Expr::Inj(c, Some(a)) => Expr::Inj(c.clone(), Some(Box::new(self.at(ctx, a, is_term(e))))),
            Expr::App(f, a) => {
                let inner = is_term(e);
                let f2 = self.at(ctx, f, inner);
                Expr::app(f2, self.at(ctx, a, inner))
            }
            Expr::Lambda(x, t, b) => Expr::lam(x.clone(), t.clone(), self.go(&ctx.with(x.clone(), t.clone()), b)),
            Expr::Fix(x, t, b) => Expr::fix(x.clone(), t.clone(), self.go(&ctx.with(x.clone(), t.clone()), b)),
            Expr::Case(s, bs) => {
                let st = type_of(ctx, s, self.env);
                let s2 = self.at(ctx, s, true);
                let bs2 = bs
                    .iter()
                    .map(|(p, b)| {
                        let inner = st
                            .as_ref()
                            .and_then(|t| pattern_type(p, t, self.env).ok())
                            .map_or_else(|| ctx.clone(), |pc| ctx.extended(&pc));
                        (p.clone(), self.go(&inner, b))
                    })
                    .collect();
                Expr::Case(Box::new(s2), bs2)
            }
        }
    }
}

fn rewrite_site<F>(e: &Expr, env: &DataEnv, rng: &mut impl Rng, f: F) -> Option<Expr>
where
    F: FnMut(&TypingContext, &Expr, bool) -> Option<Expr> + Clone,
{
    let mut count = Site { env, f: f.clone(), target: usize::MAX, seen: 0 };
    count.go(&TypingContext::new(), e);
    if count.seen == 0 {
        return None;
    }
    let target = rng.gen_range(0..count.seen);
    Some(Site { env, f, target, seen: 0 }.go(&TypingContext::new(), e))
}

/// Applies one semantics-preserving mutation at a random applicable site of
/// the closed term `e`, or `None` when there is no such site.
pub fn mutate(e: &Expr, m: Mutation, env: &DataEnv, rng: &mut impl Rng) -> Option<Expr> {
    match m {
        Mutation::AlphaRename => Some(alpha_rename(e)),
        Mutation::LetValWrap => rewrite_site(e, env, rng, |_, t, in_term| {
            (is_term(t) && !in_term && !matches!(t, Expr::Prim(_))).then(|| {
                let v = Var::fresh("v");
                Expr::case(t.clone(), vec![(Pattern::Var(v.clone()), Expr::Var(v))])
            })
        }),
        Mutation::AddZero => rewrite_site(e, env, rng, |ctx, t, _| {
            (is_term(t) && type_of(ctx, t, env) == Some(Type::Int))
                .then(|| Expr::prim(PrimOp::Add, t.clone(), Expr::int(0)))
        }),
        Mutation::TupleReorder => rewrite_site(e, env, rng, |_, t, in_term| match t {
            Expr::Case(s, bs) if is_pair_literal(s) => {
                let Expr::Record(fs) = &**s else { unreachable!() };
                let pats: Option<Vec<Pattern>> = bs.iter().map(|(p, _)| swap_pair_pattern(p)).collect();
                let swapped = Expr::tuple(vec![fs[1].1.clone(), fs[0].1.clone()]);
                Some(Expr::case(swapped, pats?.into_iter().zip(bs.iter().map(|(_, b)| b.clone())).collect()))
            }
            Expr::Record(fs) if is_pair_literal(t) && is_term(t) && !in_term => {
                let s = Var::fresh("s");
                let back = Expr::tuple(vec![
                    Expr::proj(Expr::Var(s.clone()), Label::pos(2)),
                    Expr::proj(Expr::Var(s.clone()), Label::pos(1)),
                ]);
                Some(Expr::case(Expr::tuple(vec![fs[1].1.clone(), fs[0].1.clone()]), vec![(Pattern::Var(s), back)]))
            }
            _ => None,
        }),
        Mutation::Monadic => rewrite_site(e, env, rng, |_, t, _| match t {
            Expr::Case(s, bs) => monadic(s, bs, env),
            _ => None,
        }),
    }
}

/// Applies `steps` random mutations, skipping inapplicable ones.
pub fn mutate_many(e: &Expr, steps: usize, env: &DataEnv, rng: &mut impl Rng) -> (Expr, Vec<Mutation>) {
    let mut cur = e.clone();
    let mut applied = Vec::new();
    for _ in 0..steps {
        let mut order = Mutation::ALL;
        order.shuffle(rng);
        for m in order {
            if let Some(next) = mutate(&cur, m, env, rng) {
                cur = next;
                applied.push(m);
                break;
            }
        }
    }
    (cur, applied)
}

/// Five pairwise inequivalent programs of type
/// `int option -> int option -> int option`, each binding `f`.
pub const SEED_SOURCES: [(&str, &str); 5] = [
    ("add", "fun f x y = case (x, y) of (SOME a, SOME b) => SOME (a + b) | _ => NONE\n"),
    ("sub", "fun f x y = case x of SOME a => (case y of SOME b => SOME (a - b) | NONE => NONE) | NONE => NONE\n"),
    ("mul", "fun f x y = case x of NONE => NONE | SOME a => (case y of NONE => NONE | SOME b => SOME (a * b))\n"),
    ("orelse", "fun f x y = case x of SOME a => SOME a | NONE => y\n"),
    ("max", "fun f x y = case x of NONE => y | SOME a => (case y of NONE => x | SOME b => if a < b then y else x)\n"),
];

/// `per` variants of `seed`. Variant `i` starts with mutation kind `i mod 5`
/// (falling back to the others when it does not apply) and then receives up
/// to two more random mutations.
pub fn variants(seed: &Expr, per: usize, env: &DataEnv, rng: &mut impl Rng) -> Vec<(Expr, Vec<Mutation>)> {
    (0..per)
        .map(|i| {
            let first =
                (0..5).map(|k| Mutation::ALL[(i + k) % 5]).find_map(|m| mutate(seed, m, env, rng).map(|e| (e, m)));
            let (e, m) = first.unwrap_or_else(|| (alpha_rename(seed), Mutation::AlphaRename));
            let extra = rng.gen_range(0..=2);
            let (e, mut ms) = mutate_many(&e, extra, env, rng);
            ms.insert(0, m);
            (e, ms)
        })
        .collect()
}

/// The synthetic clustering corpus: every seed followed by its variants,
/// ids `seed/0`, `seed/1`, ... with `seed/0` the unmutated program.
pub fn synthetic_corpus(per: usize, rng_seed: u64) -> (Vec<(String, Expr)>, Type, DataEnv) {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(rng_seed);
    let mut env = DataEnv::new();
    let mut out = Vec::new();
    let mut ty = None;
    for (name, src) in SEED_SOURCES {
        let t = crate::frontend::load(src, "f", &Default::default()).expect("seed programs transpile");
        env = crate::frontend::merge_envs(&env, &t.env).expect("seeds agree on datatypes");
        ty.get_or_insert(t.ty.clone());
        out.push((format!("{name}/0"), t.expr.clone()));
        for (i, (e, _)) in variants(&t.expr, per - 1, &env, &mut rng).into_iter().enumerate() {
            out.push((format!("{name}/{}", i + 1), e));
        }
    }
    (out, ty.expect("five seeds"), env)
}
