//! Inlining of top-level helper bindings at their use sites.
//!
//! Each use of a helper receives its own copy, so a helper used at two
//! types elaborates to two monomorphic copies.

use std::collections::{HashMap, HashSet};

use super::ast::*;
use super::FrontendError;

pub(super) type Ctors = HashSet<String>;

/// Names bound by a pattern. An identifier naming a constructor binds
/// nothing.
pub(super) fn pattern_vars(p: &Pat, ctors: &Ctors, out: &mut Vec<String>) {
    match &p.kind {
        PatKind::Wild | PatKind::Int(_) | PatKind::Bool(_) => {}
        PatKind::Ident(x) => {
            if !ctors.contains(x) {
                out.push(x.clone());
            }
        }
        PatKind::Tuple(ps) | PatKind::List(ps) => ps.iter().for_each(|p| pattern_vars(p, ctors, out)),
        PatKind::Record(fs) => fs.iter().for_each(|(_, p)| pattern_vars(p, ctors, out)),
        PatKind::Con(_, p) | PatKind::Annot(p, _) => pattern_vars(p, ctors, out),
        PatKind::Cons(h, t) => {
            pattern_vars(h, ctors, out);
            pattern_vars(t, ctors, out);
        }
        PatKind::As(x, p) => {
            out.push(x.clone());
            pattern_vars(p, ctors, out);
        }
    }
}

struct Subst<'a> {
    ctors: &'a Ctors,
}

type Map = HashMap<String, Exp>;

fn without(map: &Map, names: impl IntoIterator<Item = String>) -> Map {
    let mut m = map.clone();
    for n in names {
        m.remove(&n);
    }
    m
}

impl Subst<'_> {
    fn bound(&self, p: &Pat) -> Vec<String> {
        let mut v = Vec::new();
        pattern_vars(p, self.ctors, &mut v);
        v
    }

    fn rules(&self, m: &Match, map: &Map) -> Match {
        m.iter().map(|(p, e)| (p.clone(), self.exp(e, &without(map, self.bound(p))))).collect()
    }

    fn funbind(&self, f: &FunBind, map: &Map) -> FunBind {
        let map = without(map, [f.name.clone()]);
        FunBind {
            name: f.name.clone(),
            span: f.span,
            clauses: f
                .clauses
                .iter()
                .map(|c| {
                    let names: Vec<String> = c.params.iter().flat_map(|p| self.bound(p)).collect();
                    Clause {
                        params: c.params.clone(),
                        result: c.result.clone(),
                        body: self.exp(&c.body, &without(&map, names)),
                    }
                })
                .collect(),
        }
    }

    fn exp(&self, e: &Exp, map: &Map) -> Exp {
        if map.is_empty() {
            return e.clone();
        }
        let b = |x: &Exp| Box::new(self.exp(x, map));
        let kind = match &e.kind {
            ExpKind::Ident(x) => match map.get(x) {
                Some(r) => return r.clone(),
                None => ExpKind::Ident(x.clone()),
            },
            ExpKind::Int(_) | ExpKind::Bool(_) | ExpKind::Selector(_) => e.kind.clone(),
            ExpKind::Tuple(es) => ExpKind::Tuple(es.iter().map(|x| self.exp(x, map)).collect()),
            ExpKind::List(es) => ExpKind::List(es.iter().map(|x| self.exp(x, map)).collect()),
            ExpKind::Record(fs) => ExpKind::Record(fs.iter().map(|(l, x)| (l.clone(), self.exp(x, map))).collect()),
            ExpKind::App(f, a) => ExpKind::App(b(f), b(a)),
            ExpKind::Neg(a) => ExpKind::Neg(b(a)),
            ExpKind::BinOp(op, l, r) => ExpKind::BinOp(*op, b(l), b(r)),
            ExpKind::Fn(m) => ExpKind::Fn(self.rules(m, map)),
            ExpKind::Case(s, m) => ExpKind::Case(b(s), self.rules(m, map)),
            ExpKind::If(c, t, f) => ExpKind::If(b(c), b(t), b(f)),
            ExpKind::Annot(x, t) => ExpKind::Annot(b(x), t.clone()),
            ExpKind::Let(ds, body) => {
                let mut map = map.clone();
                let mut out = Vec::new();
                for d in ds {
                    match d {
                        Dec::Val(p, x) => {
                            out.push(Dec::Val(p.clone(), self.exp(x, &map)));
                            map = without(&map, self.bound(p));
                        }
                        Dec::Fun(f) => {
                            out.push(Dec::Fun(self.funbind(f, &map)));
                            map.remove(&f.name);
                        }
                        other => out.push(other.clone()),
                    }
                }
                ExpKind::Let(out, Box::new(self.exp(body, &map)))
            }
        };
        Exp { kind, span: e.span }
    }
}

/// Whether `name` occurs free in any clause body of `f`, i.e. whether `f`
/// is recursive.
pub(super) fn is_recursive(f: &FunBind, ctors: &Ctors) -> bool {
    let marker = Exp { kind: ExpKind::Tuple(Vec::new()), span: Span::new(usize::MAX, usize::MAX) };
    let map: Map = [(f.name.clone(), marker)].into_iter().collect();
    let s = Subst { ctors };
    f.clauses.iter().any(|c| {
        let names: Vec<String> = c.params.iter().flat_map(|p| s.bound(p)).collect();
        contains_marker(&s.exp(&c.body, &without(&map, names)))
    })
}

fn contains_marker(e: &Exp) -> bool {
    if e.span.start == usize::MAX {
        return true;
    }
    match &e.kind {
        ExpKind::Int(_) | ExpKind::Bool(_) | ExpKind::Ident(_) | ExpKind::Selector(_) => false,
        ExpKind::Tuple(es) | ExpKind::List(es) => es.iter().any(contains_marker),
        ExpKind::Record(fs) => fs.iter().any(|(_, x)| contains_marker(x)),
        ExpKind::App(a, b) | ExpKind::BinOp(_, a, b) => contains_marker(a) || contains_marker(b),
        ExpKind::Neg(a) | ExpKind::Annot(a, _) => contains_marker(a),
        ExpKind::Fn(m) => m.iter().any(|(_, x)| contains_marker(x)),
        ExpKind::Case(s, m) => contains_marker(s) || m.iter().any(|(_, x)| contains_marker(x)),
        ExpKind::If(a, b, c) => contains_marker(a) || contains_marker(b) || contains_marker(c),
        ExpKind::Let(ds, body) => {
            contains_marker(body)
                || ds.iter().any(|d| match d {
                    Dec::Val(_, x) => contains_marker(x),
                    Dec::Fun(f) => f.clauses.iter().any(|c| contains_marker(&c.body)),
                    _ => false,
                })
        }
    }
}

fn let_in(d: Dec, name: &str, span: Span) -> Exp {
    Exp { kind: ExpKind::Let(vec![d], Box::new(Exp { kind: ExpKind::Ident(name.to_string()), span })), span }
}

/// The entry binding as a closed expression: every earlier top-level value
/// or function it mentions is replaced by a local copy of its definition.
pub(super) fn entry_expression(prog: &SurfaceProgram, entry: &str, ctors: &Ctors) -> Result<Exp, FrontendError> {
    let s = Subst { ctors };
    let count = prog.bindings().iter().filter(|b| **b == entry).count();
    match count {
        0 => return Err(FrontendError::UnknownEntry(entry.to_string())),
        1 => {}
        _ => return Err(FrontendError::DuplicateEntry(entry.to_string())),
    }
    let mut map = Map::new();
    for d in &prog.decs {
        match d {
            Dec::Val(p, e) => {
                let e = s.exp(e, &map);
                let names = s.bound(p);
                let defs: Vec<(String, Exp)> = match &p.kind {
                    PatKind::Ident(x) => vec![(x.clone(), e)],
                    _ => names.iter().map(|x| (x.clone(), let_in(Dec::Val(p.clone(), e.clone()), x, p.span))).collect(),
                };
                for (x, def) in defs {
                    if x == entry {
                        return Ok(def);
                    }
                    map.insert(x, def);
                }
            }
            Dec::Fun(f) => {
                let f = s.funbind(f, &map);
                let def = let_in(Dec::Fun(f.clone()), &f.name, f.span);
                if f.name == entry {
                    return Ok(def);
                }
                map.insert(f.name.clone(), def);
            }
            Dec::Datatype(_) | Dec::Type(..) => {}
        }
    }
    unreachable!("entry binding counted above")
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse;
    use super::*;

    fn ctors() -> Ctors {
        ["SOME", "NONE"].into_iter().map(String::from).collect()
    }

    #[test]
    fn helpers_are_inlined_and_shadowing_respected() {
        let p = parse("fun inc x = x + 1\nfun f inc = inc 2\nfun g y = inc y").unwrap();
        let f = entry_expression(&p, "f", &ctors()).unwrap();
        assert_eq!(f.to_string(), "let\n  fun f inc = inc 2\nin f\nend");
        let g = entry_expression(&p, "g", &ctors()).unwrap();
        let ExpKind::Let(ds, _) = &g.kind else { panic!() };
        let Dec::Fun(gb) = &ds[0] else { panic!() };
        let ExpKind::App(head, _) = &gb.clauses[0].body.kind else { panic!() };
        assert!(matches!(&head.kind, ExpKind::Let(inner, _) if matches!(&inner[0], Dec::Fun(i) if i.name == "inc")));
    }

    #[test]
    fn later_definition_wins() {
        let p = parse("val a = 1\nval a = 2\nval b = a").unwrap();
        assert_eq!(entry_expression(&p, "b", &ctors()).unwrap().to_string(), "2");
    }

    #[test]
    fn recursion_detection() {
        let p = parse("fun f x = f x\nfun g x = let fun f y = y in f x end\nfun h f = f").unwrap();
        let funs: Vec<&FunBind> = p
            .decs
            .iter()
            .filter_map(|d| match d {
                Dec::Fun(f) => Some(f),
                _ => None,
            })
            .collect();
        assert!(is_recursive(funs[0], &ctors()));
        assert!(!is_recursive(funs[1], &ctors()));
        assert!(!is_recursive(funs[2], &ctors()));
    }

    #[test]
    fn missing_and_duplicate_entries() {
        let p = parse("val a = 1\nval a = 2").unwrap();
        assert!(matches!(entry_expression(&p, "b", &ctors()), Err(FrontendError::UnknownEntry(_))));
        assert!(matches!(entry_expression(&p, "a", &ctors()), Err(FrontendError::DuplicateEntry(_))));
    }
}
