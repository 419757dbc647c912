//! Formula generation: the judgments `Γ ⊢ e1 ⟺σ e2 : τ ⊣ Γ′` (with weak
//! head reduction) and `Γ ⊢ e1 ↔σ e2 : τ ⊣ Γ′` (on whnf expressions).
//!
//! Every applicable rule contributes a disjunct. When nothing applies, or
//! a resource limit is hit, the result is `False`.

use std::cell::Cell;
use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::formula::{Formula, Term};
use crate::rewrite::{freshen_branch, freshen_together, whnf, DEFAULT_WHNF_FUEL};
use crate::statics::{pattern_type, type_of};
use crate::subst::{rename, replace_occurrences};
use crate::syntax::{Branch, DataEnv, Expr, Type, TypingContext, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    /// Upper bound on rule applications and leaves per comparison.
    pub budget: usize,
    pub max_depth: usize,
    pub whnf_fuel: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { budget: 50_000, max_depth: 200, whnf_fuel: DEFAULT_WHNF_FUEL }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenResult {
    pub formula: Formula,
    pub gamma_prime: TypingContext,
    /// Whether some subderivation was cut short by a resource limit.
    pub exhausted: bool,
}

/// `Γ ⊢ e1 ⟺σ e2 : τ ⊣ Γ′`.
pub fn gen_formula(ctx: &TypingContext, e1: &Expr, e2: &Expr, ty: &Type, env: &DataEnv, cfg: &GenConfig) -> GenResult {
    let g = Gen::new(env, cfg);
    let (formula, gamma_prime) = g.iso_exp(ctx, e1, e2, ty, 0);
    GenResult { formula, gamma_prime, exhausted: g.exhausted.get() }
}

/// `Γ ⊢ e1 ↔σ e2 : τ ⊣ Γ′` for expressions already in whnf.
pub fn gen_formula_whnf(
    ctx: &TypingContext,
    e1: &Expr,
    e2: &Expr,
    ty: &Type,
    env: &DataEnv,
    cfg: &GenConfig,
    last_was_symcase: bool,
) -> GenResult {
    let g = Gen::new(env, cfg);
    let (formula, gamma_prime) = g.iso(ctx, e1, e2, ty, last_was_symcase, 0);
    GenResult { formula, gamma_prime, exhausted: g.exhausted.get() }
}

type Out = (Formula, TypingContext);

fn fail() -> Out {
    (Formula::False, TypingContext::new())
}

struct Gen<'a> {
    env: &'a DataEnv,
    cfg: &'a GenConfig,
    spent: Cell<usize>,
    exhausted: Cell<bool>,
}

impl<'a> Gen<'a> {
    fn new(env: &'a DataEnv, cfg: &'a GenConfig) -> Self {
        Gen { env, cfg, spent: Cell::new(0), exhausted: Cell::new(false) }
    }

    fn charge(&self, depth: usize) -> bool {
        let n = self.spent.get() + 1;
        self.spent.set(n);
        if n > self.cfg.budget || depth > self.cfg.max_depth {
            self.exhausted.set(true);
            return false;
        }
        true
    }

    fn iso_exp(&self, ctx: &TypingContext, e1: &Expr, e2: &Expr, ty: &Type, depth: usize) -> Out {
        let (Ok(w1), Ok(w2)) = (whnf(e1, self.cfg.whnf_fuel), whnf(e2, self.cfg.whnf_fuel)) else {
            self.exhausted.set(true);
            return fail();
        };
        self.iso(ctx, &w1, &w2, ty, false, depth)
    }

    fn iso(&self, ctx: &TypingContext, e1: &Expr, e2: &Expr, ty: &Type, last_symcase: bool, depth: usize) -> Out {
        if self.exhausted.get() || !self.charge(depth) {
            return fail();
        }
        let d = depth + 1;
        if let (Some(t1), Some(t2)) = (Term::from_expr(e1), Term::from_expr(e2)) {
            return (Formula::eq(t1, t2, ty.clone()), TypingContext::new());
        }
        let mut alts: Vec<Out> = Vec::new();
        self.structural(ctx, e1, e2, ty, d, &mut alts);
        self.applications(ctx, e1, e2, ty, d, &mut alts);
        self.cases(ctx, e1, e2, ty, last_symcase, d, &mut alts);
        disjoin(alts)
    }

    fn structural(&self, ctx: &TypingContext, e1: &Expr, e2: &Expr, ty: &Type, d: usize, alts: &mut Vec<Out>) {
        match (e1, e2, ty) {
            (Expr::Record(fs), Expr::Record(gs), Type::Record(ts))
                if fs.len() == gs.len()
                    && fs.len() == ts.len()
                    && fs.iter().zip(gs).zip(ts).all(|(((l, _), (k, _)), (m, _))| l == k && l == m) =>
            {
                let mut fs_out = Vec::with_capacity(fs.len());
                let mut gp = TypingContext::new();
                for (((_, a), (_, b)), (_, t)) in fs.iter().zip(gs).zip(ts) {
                    let (f, g) = self.iso_exp(ctx, a, b, t, d);
                    fs_out.push(f);
                    gp.extend(&g);
                }
                alts.push((Formula::and_all(fs_out), gp));
            }
            (Expr::Proj(r1, l1), Expr::Proj(r2, l2), _) if l1 == l2 => {
                if let Some(rt) = type_of(ctx, r1, self.env) {
                    alts.push(self.iso(ctx, r1, r2, &rt, false, d));
                }
            }
            (Expr::Inj(c1, Some(a1)), Expr::Inj(c2, Some(a2)), _) if c1 == c2 => {
                if let Some(at) = self.env.ctor(c1).and_then(|i| i.arg.clone()) {
                    alts.push(self.iso_exp(ctx, a1, a2, &at, d));
                }
            }
            (Expr::Lambda(x1, _, b1), Expr::Lambda(x2, _, b2), Type::Arrow(dom, cod)) => {
                let x = x1.refresh();
                let b1 = rename(b1, &[(x1.clone(), x.clone())]);
                let b2 = rename(b2, &[(x2.clone(), x.clone())]);
                let (f, g) = self.iso_exp(&ctx.with(x.clone(), (**dom).clone()), &b1, &b2, cod, d);
                alts.push((f, prepend(x, (**dom).clone(), g)));
            }
            (Expr::Fix(x1, _, b1), Expr::Fix(x2, _, b2), _) => {
                let x = x1.refresh();
                let b1 = rename(b1, &[(x1.clone(), x.clone())]);
                let b2 = rename(b2, &[(x2.clone(), x.clone())]);
                let (f, g) = self.iso_exp(&ctx.with(x.clone(), ty.clone()), &b1, &b2, ty, d);
                alts.push((f, prepend(x, ty.clone(), g)));
            }
            _ => {}
        }
    }

    fn applications(&self, ctx: &TypingContext, e1: &Expr, e2: &Expr, ty: &Type, d: usize, alts: &mut Vec<Out>) {
        if let (Expr::App(f1, a1), Expr::App(f2, a2)) = (e1, e2) {
            if let Some(ft @ Type::Arrow(..)) = type_of(ctx, f1, self.env) {
                let Type::Arrow(dom, _) = &ft else { return };
                let (sf, gf) = self.iso(ctx, f1, f2, &ft, false, d);
                let (sa, ga) = self.iso_exp(ctx, a1, a2, dom, d);
                alts.push((Formula::and(sf, sa), gf.extended(&ga)));
            }
        }
        if abstractable(e1) {
            let y = Var::fresh("y");
            let rhs = replace_occurrences(e2, e1, &y);
            let (f, g) = self.iso(&ctx.with(y.clone(), ty.clone()), &Expr::Var(y.clone()), &rhs, ty, false, d);
            alts.push((f, prepend(y, ty.clone(), g)));
        }
        if abstractable(e2) {
            let y = Var::fresh("y");
            let lhs = replace_occurrences(e1, e2, &y);
            let (f, g) = self.iso(&ctx.with(y.clone(), ty.clone()), &lhs, &Expr::Var(y.clone()), ty, false, d);
            alts.push((f, prepend(y, ty.clone(), g)));
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn cases(
        &self,
        ctx: &TypingContext,
        e1: &Expr,
        e2: &Expr,
        ty: &Type,
        last_symcase: bool,
        d: usize,
        alts: &mut Vec<Out>,
    ) {
        if let Expr::Case(s, bs) = e1 {
            if let Some(out) = self.case_one_side(ctx, s, bs, e2, ty, Side::Left, d) {
                alts.push(out);
            }
        }
        if let Expr::Case(s, bs) = e2 {
            if let Some(out) = self.case_one_side(ctx, s, bs, e1, ty, Side::Right, d) {
                alts.push(out);
            }
        }
        let (Expr::Case(s1, bs1), Expr::Case(s2, bs2)) = (e1, e2) else {
            return;
        };
        if !last_symcase {
            if let Some(out) = self.symcase(ctx, s1, bs1, s2, bs2, ty, d) {
                alts.push(out);
            }
        }
        if let (Expr::Var(x1), Expr::Var(x2)) = (&**s1, &**s2) {
            if x1 == x2 {
                if let Some(st) = ctx.get(x1).cloned() {
                    if let Some(out) = self.case_together(ctx, x1, &st, bs1, bs2, ty, Side::Left, d) {
                        alts.push(out);
                    }
                    if let Some(out) = self.case_together(ctx, x1, &st, bs2, bs1, ty, Side::Right, d) {
                        alts.push(out);
                    }
                }
            }
        }
    }

    /// Iso casel / caser: `case e {…}` against `other`, with `e` a term.
    #[allow(clippy::too_many_arguments)]
    fn case_one_side(
        &self,
        ctx: &TypingContext,
        scrut: &Expr,
        bs: &[Branch],
        other: &Expr,
        ty: &Type,
        side: Side,
        d: usize,
    ) -> Option<Out> {
        let t = Term::from_expr(scrut)?;
        let st = type_of(ctx, scrut, self.env)?;
        let mut conj = Vec::with_capacity(bs.len());
        let mut gp = TypingContext::new();
        let mut earlier: Vec<Formula> = Vec::new();
        for b in bs {
            let (p, e) = freshen_branch(b);
            let pctx = pattern_type(&p, &st, self.env).ok()?;
            let inner = ctx.extended(&pctx);
            let (sigma, g) = match side {
                Side::Left => self.iso_exp(&inner, &e, other, ty, d),
                Side::Right => self.iso_exp(&inner, other, &e, ty, d),
            };
            let here = Formula::eq(t.clone(), Term::from_pattern(&p), st.clone());
            let guard = Formula::and(Formula::and_all(earlier.iter().cloned()), here.clone());
            conj.push(Formula::implies(guard, sigma));
            earlier.push(Formula::not(here));
            gp.extend(&pctx);
            gp.extend(&g);
        }
        Some((Formula::and_all(conj), gp))
    }

    /// Iso symcase: compare the scrutinees, then both cases over one shared
    /// fresh variable.
    #[allow(clippy::too_many_arguments)]
    fn symcase(
        &self,
        ctx: &TypingContext,
        s1: &Expr,
        bs1: &[Branch],
        s2: &Expr,
        bs2: &[Branch],
        ty: &Type,
        d: usize,
    ) -> Option<Out> {
        let st = type_of(ctx, s1, self.env)?;
        if type_of(ctx, s2, self.env)? != st {
            return None;
        }
        let (Ok(w1), Ok(w2)) = (whnf(s1, self.cfg.whnf_fuel), whnf(s2, self.cfg.whnf_fuel)) else {
            self.exhausted.set(true);
            return None;
        };
        let (sigma, g1) = self.iso(ctx, &w1, &w2, &st, false, d);
        if sigma == Formula::False {
            return None;
        }
        let x = match (s1, s2) {
            (Expr::Var(v), _) | (_, Expr::Var(v)) => v.refresh(),
            _ => Var::fresh("x"),
        };
        let l = Expr::Case(Box::new(Expr::Var(x.clone())), bs1.to_vec());
        let r = Expr::Case(Box::new(Expr::Var(x.clone())), bs2.to_vec());
        let (sigma2, g2) = self.iso(&ctx.with(x.clone(), st.clone()), &l, &r, ty, true, d);
        let mut gp = g1;
        gp.insert(x, st);
        gp.extend(&g2);
        Some((Formula::and(sigma, sigma2), gp))
    }

    /// Iso case4 (`side` = Left) and its mirror case5. `mine` are the
    /// branches whose tail is unpacked, `theirs` the opposite case's.
    #[allow(clippy::too_many_arguments)]
    fn case_together(
        &self,
        ctx: &TypingContext,
        x: &Var,
        st: &Type,
        mine: &[Branch],
        theirs: &[Branch],
        ty: &Type,
        side: Side,
        d: usize,
    ) -> Option<Out> {
        let ft = freshen_together(mine, theirs);
        let xt = Term::Var(x.clone());
        let mut shared = Vec::with_capacity(ft.shared);
        let mut gp = TypingContext::new();
        for ((p, e_mine), (_, e_theirs)) in ft.left.iter().zip(&ft.right).take(ft.shared) {
            let pctx = pattern_type(p, st, self.env).ok()?;
            let inner = ctx.extended(&pctx);
            let (sigma, g) = match side {
                Side::Left => self.iso_exp(&inner, e_mine, e_theirs, ty, d),
                Side::Right => self.iso_exp(&inner, e_theirs, e_mine, ty, d),
            };
            shared.push(sigma);
            gp.extend(&pctx);
            gp.extend(&g);
        }
        let whole_theirs = Expr::Case(Box::new(Expr::Var(x.clone())), ft.right.clone());
        let mut earlier: Vec<Formula> = ft.left[..ft.shared]
            .iter()
            .map(|(p, _)| Formula::not(Formula::eq(xt.clone(), Term::from_pattern(p), st.clone())))
            .collect();
        let mut rest = Vec::new();
        for (p, e) in &ft.left[ft.shared..] {
            let pctx = pattern_type(p, st, self.env).ok()?;
            let inner = ctx.extended(&pctx);
            let (sigma, g) = match side {
                Side::Left => self.iso_exp(&inner, e, &whole_theirs, ty, d),
                Side::Right => self.iso_exp(&inner, &whole_theirs, e, ty, d),
            };
            let here = Formula::eq(xt.clone(), Term::from_pattern(p), st.clone());
            let guard = Formula::and(Formula::and_all(earlier.iter().cloned()), here.clone());
            rest.push(Formula::implies(guard, sigma));
            earlier.push(Formula::not(here));
            gp.extend(&pctx);
            gp.extend(&g);
        }
        let psi = Formula::and(Formula::and_all(shared), Formula::and_all(rest));
        Some((psi, gp))
    }
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

fn prepend(x: Var, ty: Type, rest: TypingContext) -> TypingContext {
    let mut out = TypingContext::new();
    out.insert(x, ty);
    out.extend(&rest);
    out
}

/// Application rules 2 through 7: an application whose head is a
/// variable, a primitive or a fixed point.
fn abstractable(e: &Expr) -> bool {
    match e {
        Expr::App(..) => matches!(e.spine().0, Expr::Var(_) | Expr::Prim(_) | Expr::Fix(..)),
        _ => false,
    }
}

/// Disjunction of all alternatives, dropping `False` ones and those equal
/// to an earlier one up to renaming of their local variables.
fn disjoin(alts: Vec<Out>) -> Out {
    let mut seen = HashSet::new();
    let mut formula = Formula::False;
    let mut gp = TypingContext::new();
    for (f, g) in alts {
        if f == Formula::False || !seen.insert(canonical(&f, &g)) {
            continue;
        }
        formula = Formula::or(formula, f);
        gp.extend(&g);
    }
    (formula, gp)
}

fn canonical(f: &Formula, local: &TypingContext) -> (Formula, Vec<Type>) {
    let mut ren = HashMap::new();
    let mut tys = Vec::new();
    for v in f.vars_in_order() {
        if let Some(t) = local.get(&v) {
            ren.insert(v, Var { name: "%".into(), stamp: ren.len() as u64 });
            tys.push(t.clone());
        }
    }
    (f.rename(&ren), tys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::formula_free_vars;
    use crate::syntax::{Const, CtorSig, Label, Pattern, PrimOp};

    fn opt_env() -> DataEnv {
        let mut env = DataEnv::new();
        env.add_datatype(
            "opt",
            vec![
                CtorSig { ctor: crate::syntax::Ctor::new("NONE"), arg: None },
                CtorSig { ctor: crate::syntax::Ctor::new("SOME"), arg: Some(Type::Int) },
            ],
        )
        .unwrap();
        env
    }

    fn v(n: &str) -> Var {
        Var::named(n)
    }

    fn tv(n: &str) -> Term {
        Term::Var(v(n))
    }

    fn int_ctx(names: &[&str]) -> TypingContext {
        names.iter().map(|n| (v(n), Type::Int)).collect()
    }

    fn add(a: Expr, b: Expr) -> Expr {
        Expr::prim(PrimOp::Add, a, b)
    }

    fn gen(ctx: &TypingContext, a: &Expr, b: &Expr, ty: &Type) -> GenResult {
        gen_formula(ctx, a, b, ty, &opt_env(), &GenConfig::default())
    }

    fn check_invariants(ctx: &TypingContext, r: &GenResult) {
        assert!(ctx.is_disjoint(&r.gamma_prime));
        for x in formula_free_vars(&r.formula) {
            assert!(ctx.contains(&x) || r.gamma_prime.contains(&x), "{x:?} unaccounted");
        }
    }

    #[test]
    fn atomic_variables() {
        let ctx = int_ctx(&["x", "y"]);
        let r = gen(&ctx, &Expr::var("x"), &Expr::var("y"), &Type::Int);
        assert_eq!(r.formula, Formula::eq(tv("x"), tv("y"), Type::Int));
        assert!(r.gamma_prime.is_empty());
    }

    #[test]
    fn application1_is_a_disjunct() {
        let mut ctx = int_ctx(&["x"]);
        ctx.insert(v("f"), Type::arrow(Type::Int, Type::Int));
        let a = Expr::app(Expr::var("f"), Expr::var("x"));
        let b = Expr::app(Expr::var("f"), add(Expr::var("x"), Expr::int(0)));
        let r = gen(&ctx, &a, &b, &Type::Int);
        let want = Formula::and(
            Formula::eq(tv("f"), tv("f"), Type::arrow(Type::Int, Type::Int)),
            Formula::eq(tv("x"), Term::from_expr(&add(Expr::var("x"), Expr::int(0))).unwrap(), Type::Int),
        );
        assert!(r.formula.disjuncts().contains(&&want), "{}", r.formula);
        check_invariants(&ctx, &r);
    }

    #[test]
    fn application2_abstracts_the_call() {
        let mut ctx = int_ctx(&["x"]);
        ctx.insert(v("f"), Type::arrow(Type::Int, Type::Int));
        let fx = Expr::app(Expr::var("f"), Expr::var("x"));
        let r = gen(&ctx, &fx, &add(fx.clone(), Expr::int(0)), &Type::Int);
        let found = r.formula.disjuncts().into_iter().any(|d| match d {
            Formula::TermEq { lhs: Term::Var(y), rhs, .. } => {
                r.gamma_prime.get(y) == Some(&Type::Int)
                    && *rhs == Term::from_expr(&add(Expr::Var(y.clone()), Expr::int(0))).unwrap()
            }
            _ => false,
        });
        assert!(found, "{}", r.formula);
        check_invariants(&ctx, &r);
    }

    #[test]
    fn lambda_shares_binder() {
        let t = Type::arrow(Type::Int, Type::arrow(Type::Int, Type::Int));
        let mk = |a: &str, b: &str| {
            Expr::lam(v("x"), Type::Int, Expr::lam(v("y"), Type::Int, add(Expr::var(a), Expr::var(b))))
        };
        let ctx = TypingContext::new();
        let r = gen(&ctx, &mk("x", "y"), &mk("y", "x"), &t);
        assert_eq!(r.gamma_prime.len(), 2);
        match &r.formula {
            Formula::TermEq { lhs, rhs, ty } => {
                assert_eq!(*ty, Type::Int);
                assert_ne!(lhs, rhs);
            }
            f => panic!("unexpected {f}"),
        }
        check_invariants(&ctx, &r);
    }

    #[test]
    fn case_pair_yields_three_disjuncts() {
        // case 1 {1.2 | _.3} vs case 2 {_.2}: casel, caser and symcase.
        let a = Expr::case(
            Expr::int(1),
            vec![(Pattern::Const(Const::Int(1)), Expr::int(2)), (Pattern::Wildcard, Expr::int(3))],
        );
        let b = Expr::case(Expr::int(2), vec![(Pattern::Wildcard, Expr::int(2))]);
        let ctx = TypingContext::new();
        let r = gen(&ctx, &a, &b, &Type::Int);
        assert_eq!(r.formula.disjuncts().len(), 3, "{}", r.formula);
    }

    #[test]
    fn symcase_not_repeated() {
        let ctx: TypingContext = [(v("o"), Type::data("opt"))].into_iter().collect();
        let case = |body: Expr| {
            Expr::case(
                Expr::var("o"),
                vec![(Pattern::inj0("NONE"), Expr::int(0)), (Pattern::inj("SOME", Pattern::var("a")), body)],
            )
        };
        let a = case(Expr::var("a"));
        let b = case(add(Expr::var("a"), Expr::int(0)));
        let r = gen_formula_whnf(&ctx, &a, &b, &Type::Int, &opt_env(), &GenConfig::default(), true);
        assert!(!r.exhausted);
        check_invariants(&ctx, &r);
    }

    #[test]
    fn record_fieldwise() {
        let ctx = int_ctx(&["x"]);
        let lam = |b: Expr| Expr::lam(v("z"), Type::Int, b);
        let a = Expr::tuple(vec![lam(Expr::var("z")), Expr::var("x")]);
        let b = Expr::tuple(vec![lam(add(Expr::var("z"), Expr::int(0))), Expr::var("x")]);
        let t = Type::tuple(vec![Type::arrow(Type::Int, Type::Int), Type::Int]);
        let r = gen(&ctx, &a, &b, &t);
        assert_eq!(r.formula.conjuncts().len(), 2);
        check_invariants(&ctx, &r);
    }

    #[test]
    fn no_rule_gives_false() {
        let ctx: TypingContext = [(v("f"), Type::arrow(Type::Int, Type::Int))].into_iter().collect();
        let lam = Expr::lam(v("z"), Type::Int, Expr::app(Expr::var("f"), Expr::var("z")));
        let r = gen(&ctx, &lam, &Expr::var("f"), &Type::arrow(Type::Int, Type::Int));
        assert_eq!(r.formula, Formula::False);
    }

    #[test]
    fn budget_exhaustion_is_false() {
        let ctx: TypingContext = [(v("o"), Type::data("opt"))].into_iter().collect();
        let a = Expr::case(
            Expr::var("o"),
            vec![(Pattern::Wildcard, Expr::proj(Expr::tuple(vec![Expr::int(1)]), Label::pos(1)))],
        );
        let cfg = GenConfig { budget: 1, ..GenConfig::default() };
        let r = gen_formula(&ctx, &a, &a, &Type::Int, &opt_env(), &cfg);
        assert!(r.exhausted);
    }
}
