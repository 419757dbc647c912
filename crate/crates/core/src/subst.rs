//! Free variables, capture-avoiding substitution and alpha-equivalence.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::syntax::{Bindings, Expr, Pattern, Var};

pub fn free_vars(e: &Expr) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    let mut bound = Vec::new();
    fv(e, &mut bound, &mut out);
    out
}

fn fv(e: &Expr, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    match e {
        Expr::Const(_) | Expr::Prim(_) | Expr::Inj(_, None) => {}
        Expr::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Expr::Record(fs) => fs.iter().for_each(|(_, e)| fv(e, bound, out)),
        Expr::Proj(e, _) | Expr::Inj(_, Some(e)) => fv(e, bound, out),
        Expr::App(f, a) => {
            fv(f, bound, out);
            fv(a, bound, out);
        }
        Expr::Lambda(x, _, b) | Expr::Fix(x, _, b) => {
            bound.push(x.clone());
            fv(b, bound, out);
            bound.pop();
        }
        Expr::Case(s, bs) => {
            fv(s, bound, out);
            for (p, b) in bs {
                let vs = p.vars();
                let n = vs.len();
                bound.extend(vs);
                fv(b, bound, out);
                bound.truncate(bound.len() - n);
            }
        }
    }
}

pub fn occurs_free(x: &Var, e: &Expr) -> bool {
    free_vars(e).contains(x)
}

/// `[r/x]e`, renaming binders of `e` that would capture free variables of `r`.
pub fn substitute(e: &Expr, x: &Var, r: &Expr) -> Expr {
    substitute_many(e, &vec![(x.clone(), r.clone())])
}

/// Simultaneous substitution `[B]e`.
pub fn substitute_many(e: &Expr, b: &Bindings) -> Expr {
    if b.is_empty() {
        return e.clone();
    }
    let mut avoid = HashSet::new();
    for (_, r) in b {
        avoid.extend(free_vars(r));
    }
    let map: HashMap<Var, Expr> = b.iter().cloned().collect();
    Subst { map, avoid }.go(e)
}

/// Renames variables according to `ren`, avoiding capture.
pub fn rename(e: &Expr, ren: &[(Var, Var)]) -> Expr {
    let b: Bindings = ren.iter().map(|(x, y)| (x.clone(), Expr::Var(y.clone()))).collect();
    substitute_many(e, &b)
}

struct Subst {
    map: HashMap<Var, Expr>,
    avoid: HashSet<Var>,
}

impl Subst {
    fn go(&mut self, e: &Expr) -> Expr {
        if self.map.is_empty() {
            return e.clone();
        }
        match e {
            Expr::Const(_) | Expr::Prim(_) | Expr::Inj(_, None) => e.clone(),
            Expr::Var(x) => self.map.get(x).cloned().unwrap_or_else(|| e.clone()),
            Expr::Record(fs) => Expr::Record(fs.iter().map(|(l, e)| (l.clone(), self.go(e))).collect()),
            Expr::Proj(e, l) => Expr::Proj(Box::new(self.go(e)), l.clone()),
            Expr::Inj(c, Some(a)) => Expr::Inj(c.clone(), Some(Box::new(self.go(a)))),
            Expr::App(f, a) => Expr::App(Box::new(self.go(f)), Box::new(self.go(a))),
            Expr::Lambda(x, t, b) => {
                let (x2, saved) = self.enter(x);
                let b2 = self.go(b);
                self.leave(saved);
                Expr::Lambda(x2, t.clone(), Box::new(b2))
            }
            Expr::Fix(x, t, b) => {
                let (x2, saved) = self.enter(x);
                let b2 = self.go(b);
                self.leave(saved);
                Expr::Fix(x2, t.clone(), Box::new(b2))
            }
            Expr::Case(s, bs) => {
                let s2 = self.go(s);
                let bs2 = bs
                    .iter()
                    .map(|(p, b)| {
                        let mut ren = Vec::new();
                        let mut saved = Vec::new();
                        for v in p.vars() {
                            let (v2, sv) = self.enter(&v);
                            if v2 != v {
                                ren.push((v, v2));
                            }
                            saved.push(sv);
                        }
                        let b2 = self.go(b);
                        for sv in saved.into_iter().rev() {
                            self.leave(sv);
                        }
                        (rename_pattern(p, &ren), b2)
                    })
                    .collect();
                Expr::Case(Box::new(s2), bs2)
            }
        }
    }

    /// Shadows `x`; renames it when it would capture.
    fn enter(&mut self, x: &Var) -> (Var, (Var, Option<Expr>)) {
        let old = self.map.remove(x);
        let x2 = if self.avoid.contains(x) {
            let y = x.refresh();
            self.map.insert(x.clone(), Expr::Var(y.clone()));
            y
        } else {
            x.clone()
        };
        (x2, (x.clone(), old))
    }

    fn leave(&mut self, (x, old): (Var, Option<Expr>)) {
        self.map.remove(&x);
        if let Some(o) = old {
            self.map.insert(x, o);
        }
    }
}

/// Renames binding occurrences in a pattern.
pub fn rename_pattern(p: &Pattern, ren: &[(Var, Var)]) -> Pattern {
    if ren.is_empty() {
        return p.clone();
    }
    let look = |x: &Var| ren.iter().find(|(a, _)| a == x).map(|(_, b)| b.clone()).unwrap_or_else(|| x.clone());
    match p {
        Pattern::Wildcard | Pattern::Const(_) | Pattern::Inj(_, None) => p.clone(),
        Pattern::Var(x) => Pattern::Var(look(x)),
        Pattern::Record(fs) => Pattern::Record(fs.iter().map(|(l, p)| (l.clone(), rename_pattern(p, ren))).collect()),
        Pattern::Alias(x, q) => Pattern::Alias(look(x), Box::new(rename_pattern(q, ren))),
        Pattern::Inj(c, Some(q)) => Pattern::Inj(c.clone(), Some(Box::new(rename_pattern(q, ren)))),
    }
}

/// Alpha-equivalence of expressions. Binder annotations must agree exactly.
pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    Alpha { env: Vec::new() }.expr(a, b)
}

pub fn alpha_eq_branch(a: &(Pattern, Expr), b: &(Pattern, Expr)) -> bool {
    let mut al = Alpha { env: Vec::new() };
    let mark = al.env.len();
    let ok = al.pattern(&a.0, &b.0) && al.expr(&a.1, &b.1);
    al.env.truncate(mark);
    ok
}

struct Alpha {
    env: Vec<(Var, Var)>,
}

impl Alpha {
    fn var(&self, x: &Var, y: &Var) -> bool {
        for (a, b) in self.env.iter().rev() {
            if a == x || b == y {
                return a == x && b == y;
            }
        }
        x == y
    }

    fn expr(&mut self, a: &Expr, b: &Expr) -> bool {
        match (a, b) {
            (Expr::Const(c), Expr::Const(d)) => c == d,
            (Expr::Prim(o), Expr::Prim(p)) => o == p,
            (Expr::Var(x), Expr::Var(y)) => self.var(x, y),
            (Expr::Record(fs), Expr::Record(gs)) => {
                fs.len() == gs.len() && fs.iter().zip(gs).all(|((l, e), (k, f))| l == k && self.expr(e, f))
            }
            (Expr::Proj(e, l), Expr::Proj(f, k)) => l == k && self.expr(e, f),
            (Expr::Inj(c, None), Expr::Inj(d, None)) => c == d,
            (Expr::Inj(c, Some(e)), Expr::Inj(d, Some(f))) => c == d && self.expr(e, f),
            (Expr::App(f, x), Expr::App(g, y)) => self.expr(f, g) && self.expr(x, y),
            (Expr::Lambda(x, t, e), Expr::Lambda(y, u, f)) | (Expr::Fix(x, t, e), Expr::Fix(y, u, f)) => {
                if t != u {
                    return false;
                }
                self.env.push((x.clone(), y.clone()));
                let ok = self.expr(e, f);
                self.env.pop();
                ok
            }
            (Expr::Case(s, bs), Expr::Case(t, cs)) => {
                if bs.len() != cs.len() || !self.expr(s, t) {
                    return false;
                }
                for ((p, e), (q, f)) in bs.iter().zip(cs) {
                    let mark = self.env.len();
                    let ok = self.pattern(p, q) && self.expr(e, f);
                    self.env.truncate(mark);
                    if !ok {
                        return false;
                    }
                }
                true
            }
            _ => false,
        }
    }

    /// Structural pattern match, pushing binder correspondences.
    fn pattern(&mut self, p: &Pattern, q: &Pattern) -> bool {
        match (p, q) {
            (Pattern::Wildcard, Pattern::Wildcard) => true,
            (Pattern::Var(x), Pattern::Var(y)) => {
                self.env.push((x.clone(), y.clone()));
                true
            }
            (Pattern::Const(c), Pattern::Const(d)) => c == d,
            (Pattern::Record(fs), Pattern::Record(gs)) => {
                fs.len() == gs.len() && fs.iter().zip(gs).all(|((l, p), (k, q))| l == k && self.pattern(p, q))
            }
            (Pattern::Alias(x, p), Pattern::Alias(y, q)) => {
                let ok = self.pattern(p, q);
                self.env.push((x.clone(), y.clone()));
                ok
            }
            (Pattern::Inj(c, None), Pattern::Inj(d, None)) => c == d,
            (Pattern::Inj(c, Some(p)), Pattern::Inj(d, Some(q))) => c == d && self.pattern(p, q),
            _ => false,
        }
    }
}

/// Replaces every subterm of `e` alpha-equivalent to `target` by `y`.
///
/// Occurrences under a binder that captures a free variable of `target` are
/// left alone, since they denote something else.
pub fn replace_occurrences(e: &Expr, target: &Expr, y: &Var) -> Expr {
    let tfv = free_vars(target);
    replace(e, target, y, &tfv)
}

fn replace(e: &Expr, target: &Expr, y: &Var, tfv: &BTreeSet<Var>) -> Expr {
    if alpha_eq(e, target) {
        return Expr::Var(y.clone());
    }
    let go = |e: &Expr| replace(e, target, y, tfv);
    match e {
        Expr::Const(_) | Expr::Prim(_) | Expr::Var(_) | Expr::Inj(_, None) => e.clone(),
        Expr::Record(fs) => Expr::Record(fs.iter().map(|(l, e)| (l.clone(), go(e))).collect()),
        Expr::Proj(e, l) => Expr::Proj(Box::new(go(e)), l.clone()),
        Expr::Inj(c, Some(a)) => Expr::Inj(c.clone(), Some(Box::new(go(a)))),
        Expr::App(f, a) => Expr::App(Box::new(go(f)), Box::new(go(a))),
        Expr::Lambda(x, t, b) => {
            let b2 = if tfv.contains(x) { (**b).clone() } else { go(b) };
            Expr::Lambda(x.clone(), t.clone(), Box::new(b2))
        }
        Expr::Fix(x, t, b) => {
            let b2 = if tfv.contains(x) { (**b).clone() } else { go(b) };
            Expr::Fix(x.clone(), t.clone(), Box::new(b2))
        }
        Expr::Case(s, bs) => Expr::Case(
            Box::new(go(s)),
            bs.iter()
                .map(|(p, b)| {
                    let captured = p.vars().iter().any(|v| tfv.contains(v));
                    (p.clone(), if captured { b.clone() } else { go(b) })
                })
                .collect(),
        ),
    }
}

/// Whether `e` contains a subterm alpha-equivalent to `target`.
pub fn contains_occurrence(e: &Expr, target: &Expr) -> bool {
    if alpha_eq(e, target) {
        return true;
    }
    match e {
        Expr::Const(_) | Expr::Prim(_) | Expr::Var(_) | Expr::Inj(_, None) => false,
        Expr::Record(fs) => fs.iter().any(|(_, e)| contains_occurrence(e, target)),
        Expr::Proj(e, _) | Expr::Inj(_, Some(e)) => contains_occurrence(e, target),
        Expr::App(f, a) => contains_occurrence(f, target) || contains_occurrence(a, target),
        Expr::Lambda(_, _, b) | Expr::Fix(_, _, b) => contains_occurrence(b, target),
        Expr::Case(s, bs) => contains_occurrence(s, target) || bs.iter().any(|(_, b)| contains_occurrence(b, target)),
    }
}
