//! Solver sorts for LambdaPix types.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::EncodeError;
use crate::syntax::{Ctor, DataEnv, Label, Type};

/// Maps each type to its sort and knows the declarations those sorts need.
#[derive(Clone, Debug)]
pub struct SortEnv {
    types: BTreeSet<Type>,
    env: DataEnv,
}

pub fn quote(s: &str) -> String {
    format!("|{}|", s.replace(['|', '\\'], "_"))
}

fn mangle(ty: &Type) -> String {
    match ty {
        Type::Int => "int".into(),
        Type::Bool => "bool".into(),
        Type::Data(d) => d.to_string(),
        Type::Record(fs) => {
            let mut s = String::from("{");
            for (i, (l, t)) in fs.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{l}:{}", mangle(t));
            }
            s.push('}');
            s
        }
        Type::Arrow(a, b) => {
            let part = |t: &Type| match t {
                Type::Arrow(..) => format!("({})", mangle(t)),
                _ => mangle(t),
            };
            format!("Fun_{}_{}", part(a), part(b))
        }
    }
}

impl SortEnv {
    /// Closes `types` under constructor argument and field types.
    pub fn build(env: &DataEnv, types: impl IntoIterator<Item = Type>) -> Result<SortEnv, EncodeError> {
        let mut out = BTreeSet::new();
        let mut todo: Vec<Type> = types.into_iter().collect();
        while let Some(t) = todo.pop() {
            if !out.insert(t.clone()) {
                continue;
            }
            match &t {
                Type::Int | Type::Bool => {}
                Type::Data(d) => {
                    let ctors = env.ctors_of(d).ok_or_else(|| EncodeError::UnresolvableType(t.to_string()))?;
                    todo.extend(ctors.iter().filter_map(|c| c.arg.clone()));
                }
                Type::Record(fs) => todo.extend(fs.iter().map(|(_, t)| t.clone())),
                Type::Arrow(..) => {}
            }
        }
        Ok(SortEnv { types: out, env: env.clone() })
    }

    pub fn contains(&self, ty: &Type) -> bool {
        self.types.contains(ty)
    }

    pub fn sort(&self, ty: &Type) -> String {
        match ty {
            Type::Int => "Int".into(),
            Type::Bool => "Bool".into(),
            _ => quote(&mangle(ty)),
        }
    }

    pub fn record_ctor(&self, ty: &Type) -> String {
        quote(&format!("mk{}", mangle(ty)))
    }

    pub fn record_selector(&self, ty: &Type, l: &Label) -> String {
        quote(&format!("{}.{l}", mangle(ty)))
    }

    pub fn ctor(&self, c: &Ctor) -> String {
        quote(c.as_str())
    }

    pub fn ctor_selector(&self, c: &Ctor) -> String {
        quote(&format!("{}.arg", c.as_str()))
    }

    pub fn tester(&self, c: &Ctor) -> String {
        format!("(_ is {})", self.ctor(c))
    }

    fn deps(&self, ty: &Type) -> Vec<Type> {
        let args: Vec<Type> = match ty {
            Type::Data(d) => self.env.ctors_of(d).into_iter().flatten().filter_map(|c| c.arg.clone()).collect(),
            Type::Record(fs) => fs.iter().map(|(_, t)| t.clone()).collect(),
            _ => Vec::new(),
        };
        args.into_iter().filter(is_algebraic).collect()
    }

    /// Sort declarations in dependency order, mutually recursive groups
    /// declared together.
    pub fn declarations(&self) -> String {
        let mut out = String::new();
        for t in &self.types {
            if t.is_arrow() {
                let _ = writeln!(out, "(declare-sort {} 0)", self.sort(t));
            }
        }
        let alg: Vec<&Type> = self.types.iter().filter(|t| is_algebraic(t)).collect();
        let mut g = DiGraph::<&Type, ()>::new();
        let idx: BTreeMap<&Type, _> = alg.iter().map(|t| (*t, g.add_node(*t))).collect();
        for t in &alg {
            for d in self.deps(t) {
                if let Some(&j) = idx.get(&d) {
                    g.add_edge(idx[t], j, ());
                }
            }
        }
        for mut scc in tarjan_scc(&g) {
            scc.sort_by_key(|n| g[*n]);
            let group: Vec<&Type> = scc.iter().map(|n| g[*n]).collect();
            out.push_str("(declare-datatypes (");
            for (i, t) in group.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "({} 0)", self.sort(t));
            }
            out.push_str(") (");
            for (i, t) in group.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push('(');
                self.write_ctors(&mut out, t);
                out.push(')');
            }
            out.push_str("))\n");
        }
        out
    }

    fn write_ctors(&self, out: &mut String, ty: &Type) {
        match ty {
            Type::Data(d) => {
                for (i, c) in self.env.ctors_of(d).into_iter().flatten().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    match &c.arg {
                        None => {
                            let _ = write!(out, "({})", self.ctor(&c.ctor));
                        }
                        Some(a) => {
                            let _ = write!(
                                out,
                                "({} ({} {}))",
                                self.ctor(&c.ctor),
                                self.ctor_selector(&c.ctor),
                                self.sort(a)
                            );
                        }
                    }
                }
            }
            Type::Record(fs) => {
                let _ = write!(out, "({}", self.record_ctor(ty));
                for (l, t) in fs {
                    let _ = write!(out, " ({} {})", self.record_selector(ty, l), self.sort(t));
                }
                out.push(')');
            }
            _ => unreachable!("only algebraic sorts have constructors"),
        }
    }
}

fn is_algebraic(t: &Type) -> bool {
    matches!(t, Type::Data(_) | Type::Record(_))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::CtorSig;

    fn list_env() -> DataEnv {
        let mut env = DataEnv::new();
        env.add_datatype(
            "ilist",
            vec![
                CtorSig { ctor: Ctor::new("Nil"), arg: None },
                CtorSig { ctor: Ctor::new("Cons"), arg: Some(Type::tuple(vec![Type::Int, Type::data("ilist")])) },
            ],
        )
        .unwrap();
        env
    }

    #[test]
    fn arrow_sort_name() {
        let s = SortEnv::build(&DataEnv::new(), [Type::arrow(Type::Int, Type::Int)]).unwrap();
        assert_eq!(s.sort(&Type::arrow(Type::Int, Type::Int)), "|Fun_int_int|");
        assert!(s.declarations().contains("(declare-sort |Fun_int_int| 0)"));
    }

    #[test]
    fn recursive_datatype_and_record_are_grouped() {
        let s = SortEnv::build(&list_env(), [Type::data("ilist")]).unwrap();
        let d = s.declarations();
        assert_eq!(d.lines().count(), 1, "{d}");
        assert!(d.contains("(|ilist| 0)") && d.contains("(|{1:int,2:ilist}| 0)"), "{d}");
    }

    #[test]
    fn unknown_datatype_is_error() {
        assert!(SortEnv::build(&DataEnv::new(), [Type::data("nope")]).is_err());
    }

    #[test]
    fn structurally_equal_types_share_a_sort() {
        let a = Type::tuple(vec![Type::Int, Type::Int]);
        let b = Type::record(vec![(Label::pos(2), Type::Int), (Label::pos(1), Type::Int)]);
        let s = SortEnv::build(&DataEnv::new(), [a.clone(), b.clone()]).unwrap();
        assert_eq!(s.sort(&a), s.sort(&b));
        assert_eq!(s.declarations().lines().count(), 1);
    }
}
