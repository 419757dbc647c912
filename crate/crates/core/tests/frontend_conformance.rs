//! Transpiled programs evaluate like their surface source, judged by a
//! direct interpreter for the surface language.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use zeus_core::dynamics::{eval, EvalResult};
use zeus_core::frontend::ast::{BinOp, Dec, Exp, ExpKind, FunBind, Match, Pat, PatKind};
use zeus_core::frontend::{load, parse, parse_exp, parse_type, Instantiation};
use zeus_core::{Ctor, Expr, Label};

#[derive(Clone)]
enum Val {
    Int(i64),
    Bool(bool),
    Record(BTreeMap<Label, Val>),
    Con(String, Option<Box<Val>>),
    Closure(Env, Rc<Match>),
    /// A clausal function with the arguments received so far.
    Fun(Env, Rc<FunBind>, Vec<Val>),
    ConFn(String),
    Builtin(&'static str),
    Selector(String),
}

#[derive(Debug, PartialEq)]
enum Plain {
    Int(i64),
    Bool(bool),
    Record(Vec<(Label, Plain)>),
    Con(String, Option<Box<Plain>>),
    Function,
}

fn plain(v: &Val) -> Plain {
    match v {
        Val::Int(n) => Plain::Int(*n),
        Val::Bool(b) => Plain::Bool(*b),
        Val::Record(fs) => Plain::Record(fs.iter().map(|(l, v)| (l.clone(), plain(v))).collect()),
        Val::Con(c, a) => Plain::Con(c.clone(), a.as_ref().map(|a| Box::new(plain(a)))),
        _ => Plain::Function,
    }
}

fn plain_core(e: &Expr) -> Plain {
    match e {
        Expr::Const(zeus_core::Const::Int(n)) => Plain::Int(*n),
        Expr::Const(zeus_core::Const::Bool(b)) => Plain::Bool(*b),
        Expr::Record(fs) => Plain::Record(fs.iter().map(|(l, v)| (l.clone(), plain_core(v))).collect()),
        Expr::Inj(c, a) => Plain::Con(c.as_str().to_string(), a.as_ref().map(|a| Box::new(plain_core(a)))),
        _ => Plain::Function,
    }
}

fn to_core(v: &Val) -> Expr {
    match v {
        Val::Int(n) => Expr::int(*n),
        Val::Bool(b) => Expr::bool(*b),
        Val::Record(fs) => Expr::Record(fs.iter().map(|(l, v)| (l.clone(), to_core(v))).collect()),
        Val::Con(c, None) => Expr::Inj(Ctor::new(c), None),
        Val::Con(c, Some(a)) => Expr::Inj(Ctor::new(c), Some(Box::new(to_core(a)))),
        _ => panic!("function-valued input"),
    }
}

#[derive(Clone, Default)]
struct Env(Option<Rc<(String, Val, Env)>>);

impl Env {
    fn bind(&self, x: &str, v: Val) -> Env {
        Env(Some(Rc::new((x.to_string(), v, self.clone()))))
    }

    fn get(&self, x: &str) -> Option<Val> {
        let mut cur = &self.0;
        while let Some(node) = cur {
            if node.0 == x {
                return Some(node.1.clone());
            }
            cur = &node.2 .0;
        }
        None
    }
}

struct Interp {
    /// Constructor names, with whether each carries an argument.
    ctors: HashMap<String, bool>,
}

fn tuple(vs: Vec<Val>) -> Val {
    Val::Record(vs.into_iter().enumerate().map(|(i, v)| (Label::pos(i + 1), v)).collect())
}

impl Interp {
    fn new(prog_src: &str) -> Self {
        let mut ctors: HashMap<String, bool> = [
            ("NONE", false),
            ("SOME", true),
            ("nil", false),
            ("::", true),
            ("LESS", false),
            ("EQUAL", false),
            ("GREATER", false),
        ]
        .into_iter()
        .map(|(c, a)| (c.to_string(), a))
        .collect();
        for d in parse(prog_src).unwrap().decs {
            if let Dec::Datatype(bs) = d {
                ctors.extend(bs.iter().flat_map(|b| b.ctors.iter().map(|c| (c.name.clone(), c.arg.is_some()))));
            }
        }
        Interp { ctors }
    }

    fn pat(&self, p: &Pat, v: &Val, env: &mut Env) -> bool {
        match (&p.kind, v) {
            (PatKind::Wild, _) => true,
            (PatKind::Ident(c), Val::Con(d, None)) if self.ctors.contains_key(c) => c == d,
            (PatKind::Ident(c), _) if self.ctors.contains_key(c) => false,
            (PatKind::Ident(x), _) => {
                *env = env.bind(x, v.clone());
                true
            }
            (PatKind::Int(n), Val::Int(m)) => n == m,
            (PatKind::Bool(b), Val::Bool(c)) => b == c,
            (PatKind::Tuple(ps), Val::Record(fs)) => {
                ps.len() == fs.len() && ps.iter().enumerate().all(|(i, q)| self.pat(q, &fs[&Label::pos(i + 1)], env))
            }
            (PatKind::Record(ps), Val::Record(fs)) => ps.iter().all(|(l, q)| self.pat(q, &fs[&Label::new(l)], env)),
            (PatKind::Con(c, q), Val::Con(d, Some(a))) => c == d && self.pat(q, a, env),
            (PatKind::Cons(h, t), Val::Con(d, Some(a))) if d == "::" => {
                let Val::Record(fs) = &**a else { unreachable!() };
                self.pat(h, &fs[&Label::pos(1)], env) && self.pat(t, &fs[&Label::pos(2)], env)
            }
            (PatKind::List(ps), _) => {
                let mut cur = v.clone();
                for q in ps {
                    let Val::Con(d, Some(a)) = &cur else { return false };
                    if d != "::" {
                        return false;
                    }
                    let Val::Record(fs) = &**a else { unreachable!() };
                    if !self.pat(q, &fs[&Label::pos(1)], env) {
                        return false;
                    }
                    cur = fs[&Label::pos(2)].clone();
                }
                matches!(&cur, Val::Con(d, None) if d == "nil")
            }
            (PatKind::As(x, q), _) => {
                *env = env.bind(x, v.clone());
                self.pat(q, v, env)
            }
            (PatKind::Annot(q, _), _) => self.pat(q, v, env),
            _ => false,
        }
    }

    fn rules(&self, m: &Match, v: &Val, env: &Env) -> Val {
        for (p, e) in m {
            let mut inner = env.clone();
            if self.pat(p, v, &mut inner) {
                return self.exp(e, &inner);
            }
        }
        panic!("match failure")
    }

    fn apply(&self, f: Val, a: Val) -> Val {
        match f {
            Val::Closure(env, m) => self.rules(&m, &a, &env),
            Val::Fun(env, fb, mut args) => {
                args.push(a);
                if args.len() < fb.clauses[0].params.len() {
                    return Val::Fun(env, fb, args);
                }
                let me = env.bind(&fb.name, Val::Fun(env.clone(), fb.clone(), Vec::new()));
                for c in &fb.clauses {
                    let mut inner = me.clone();
                    if c.params.iter().zip(&args).all(|(p, v)| self.pat(p, v, &mut inner)) {
                        return self.exp(&c.body, &inner);
                    }
                }
                panic!("clause match failure in {} on {:?}", fb.name, args.iter().map(plain).collect::<Vec<_>>())
            }
            Val::ConFn(c) => Val::Con(c, Some(Box::new(a))),
            Val::Selector(l) => match a {
                Val::Record(fs) => fs[&Label::new(&l)].clone(),
                _ => panic!("selector on non-record"),
            },
            Val::Builtin(name) => {
                if name == "not" {
                    let Val::Bool(b) = a else { panic!() };
                    return Val::Bool(!b);
                }
                let Val::Record(fs) = a else { panic!("operator on non-pair") };
                let (x, y) = (fs[&Label::pos(1)].clone(), fs[&Label::pos(2)].clone());
                self.binop_val(name, x, y)
            }
            _ => panic!("applying a non-function"),
        }
    }

    fn binop_val(&self, op: &str, x: Val, y: Val) -> Val {
        match (op, &x, &y) {
            ("=", ..) => Val::Bool(plain(&x) == plain(&y)),
            ("<>", ..) => Val::Bool(plain(&x) != plain(&y)),
            ("::", ..) => Val::Con("::".into(), Some(Box::new(tuple(vec![x, y])))),
            (_, Val::Int(a), Val::Int(b)) => match op {
                "+" => Val::Int(a.wrapping_add(*b)),
                "-" => Val::Int(a.wrapping_sub(*b)),
                "*" => Val::Int(a.wrapping_mul(*b)),
                "<" => Val::Bool(a < b),
                ">" => Val::Bool(a > b),
                "<=" => Val::Bool(a <= b),
                ">=" => Val::Bool(a >= b),
                _ => panic!("operator {op}"),
            },
            _ => panic!("operator {op} on non-integers"),
        }
    }

    fn ident(&self, x: &str, env: &Env) -> Val {
        if let Some(v) = env.get(x) {
            return v;
        }
        match self.ctors.get(x) {
            Some(true) => return Val::ConFn(x.into()),
            Some(false) => return Val::Con(x.into(), None),
            None => {}
        }
        match x {
            "not" => Val::Builtin("not"),
            "op+" => Val::Builtin("+"),
            "op-" => Val::Builtin("-"),
            "op*" => Val::Builtin("*"),
            "op<" => Val::Builtin("<"),
            "op>" => Val::Builtin(">"),
            "op<=" => Val::Builtin("<="),
            "op>=" => Val::Builtin(">="),
            "op=" => Val::Builtin("="),
            "op<>" => Val::Builtin("<>"),
            "op::" => Val::Builtin("::"),
            _ => panic!("unbound {x}"),
        }
    }

    fn decs(&self, ds: &[Dec], env: &Env) -> Env {
        let mut env = env.clone();
        for d in ds {
            match d {
                Dec::Val(p, e) => {
                    let v = self.exp(e, &env);
                    assert!(self.pat(p, &v.clone(), &mut env), "val binding failed");
                }
                Dec::Fun(fb) => {
                    let fb = Rc::new(fb.clone());
                    env = env.bind(&fb.name.clone(), Val::Fun(env.clone(), fb, Vec::new()));
                }
                Dec::Datatype(_) | Dec::Type(..) => {}
            }
        }
        env
    }

    fn exp(&self, e: &Exp, env: &Env) -> Val {
        match &e.kind {
            ExpKind::Int(n) => Val::Int(*n),
            ExpKind::Bool(b) => Val::Bool(*b),
            ExpKind::Ident(x) => self.ident(x, env),
            ExpKind::Tuple(es) => {
                if es.is_empty() {
                    Val::Record(BTreeMap::new())
                } else {
                    tuple(es.iter().map(|x| self.exp(x, env)).collect())
                }
            }
            ExpKind::Record(fs) => Val::Record(fs.iter().map(|(l, x)| (Label::new(l), self.exp(x, env))).collect()),
            ExpKind::List(es) => es.iter().rev().fold(Val::Con("nil".into(), None), |acc, x| {
                Val::Con("::".into(), Some(Box::new(tuple(vec![self.exp(x, env), acc]))))
            }),
            ExpKind::Selector(l) => Val::Selector(l.clone()),
            ExpKind::App(f, a) => {
                let f = self.exp(f, env);
                let a = self.exp(a, env);
                self.apply(f, a)
            }
            ExpKind::Neg(a) => match self.exp(a, env) {
                Val::Int(n) => Val::Int(n.wrapping_neg()),
                _ => panic!("negating a non-integer"),
            },
            ExpKind::BinOp(BinOp::Andalso, l, r) => match self.exp(l, env) {
                Val::Bool(true) => self.exp(r, env),
                v => v,
            },
            ExpKind::BinOp(BinOp::Orelse, l, r) => match self.exp(l, env) {
                Val::Bool(false) => self.exp(r, env),
                v => v,
            },
            ExpKind::BinOp(op, l, r) => {
                let (x, y) = (self.exp(l, env), self.exp(r, env));
                self.binop_val(op.symbol(), x, y)
            }
            ExpKind::Fn(m) => Val::Closure(env.clone(), Rc::new(m.clone())),
            ExpKind::Case(s, m) => {
                let v = self.exp(s, env);
                self.rules(m, &v, env)
            }
            ExpKind::If(c, t, f) => match self.exp(c, env) {
                Val::Bool(true) => self.exp(t, env),
                Val::Bool(false) => self.exp(f, env),
                _ => panic!("non-boolean condition"),
            },
            ExpKind::Let(ds, body) => self.exp(body, &self.decs(ds, env)),
            ExpKind::Annot(x, _) => self.exp(x, env),
        }
    }
}

struct Case {
    src: &'static str,
    entry: &'static str,
    inst: &'static [(&'static str, &'static str)],
    inputs: &'static [&'static [&'static str]],
}

const CASES: &[Case] = &[
    Case { src: "fun f x = x * 2 + 1", entry: "f", inst: &[], inputs: &[&["0"], &["5"], &["~3"]] },
    Case { src: "fun f x y = if x < y then y - x else x - y", entry: "f", inst: &[], inputs: &[&["1", "4"], &["4", "1"], &["2", "2"]] },
    Case { src: "fun f a b = a andalso not b orelse b andalso not a", entry: "f", inst: &[], inputs: &[&["true", "false"], &["true", "true"], &["false", "false"]] },
    Case { src: "fun f (x : int) y = x = y", entry: "f", inst: &[], inputs: &[&["3", "3"], &["3", "4"]] },
    Case { src: "fun f (a : bool) b = a <> b", entry: "f", inst: &[], inputs: &[&["true", "false"], &["false", "false"]] },
    Case { src: "fun f x = case x of SOME n => n | NONE => 0", entry: "f", inst: &[], inputs: &[&["SOME 7"], &["NONE"]] },
    Case {
        src: "fun f NONE _ = NONE\n  | f _ NONE = NONE\n  | f (SOME a) (SOME b) = SOME (a + b)",
        entry: "f",
        inst: &[],
        inputs: &[&["SOME 1", "SOME 2"], &["NONE", "SOME 2"], &["SOME 1", "NONE"]],
    },
    Case { src: "fun f (a, b) = (b, a + b)", entry: "f", inst: &[], inputs: &[&["(1, 2)"], &["(~4, 4)"]] },
    Case { src: "fun f (r : {x : int, y : int}) = #x r - #y r", entry: "f", inst: &[], inputs: &[&["{x = 5, y = 3}"]] },
    Case { src: "fun f {x, y} = {x = y, y = x}", entry: "f", inst: &[("'a", "int"), ("'b", "bool")], inputs: &[&["{x = 1, y = true}"]] },
    Case {
        src: "fun len nil = 0\n  | len (_ :: t) = 1 + len t",
        entry: "len",
        inst: &[("'a", "int")],
        inputs: &[&["nil"], &["[1, 2, 3]"]],
    },
    Case { src: "fun sum [] = 0 | sum (x :: xs) = x + sum xs", entry: "sum", inst: &[], inputs: &[&["[]"], &["[4, 5, 6]"]] },
    Case {
        src: "fun map f nil = nil\n  | map f (x :: xs) = f x :: map f xs\nfun g xs = map (fn x => x * x) xs",
        entry: "g",
        inst: &[],
        inputs: &[&["[1, 2, 3]"], &["nil"]],
    },
    Case {
        src: "fun filter p [] = [] | filter p (x :: xs) = if p x then x :: filter p xs else filter p xs\nfun g xs = filter (fn x => x > 1) xs",
        entry: "g",
        inst: &[],
        inputs: &[&["[0, 1, 2, 3]"]],
    },
    Case {
        src: "fun append [] ys = ys | append (x :: xs) ys = x :: append xs ys\nfun rev [] = [] | rev (x :: xs) = append (rev xs) [x]\nval main = fn (l : int list) => rev l",
        entry: "main",
        inst: &[],
        inputs: &[&["[1, 2, 3]"], &["[]"]],
    },
    Case {
        src: "fun f x = let val y = x + 1\n val z = y * y in z - x end",
        entry: "f",
        inst: &[],
        inputs: &[&["3"], &["~1"]],
    },
    Case {
        src: "fun f n = let fun go 0 acc = acc | go k acc = go (k - 1) (acc + k) in go n 0 end",
        entry: "f",
        inst: &[],
        inputs: &[&["0"], &["4"]],
    },
    Case {
        src: "fun f p = let val (a, b) = p in a * b end",
        entry: "f",
        inst: &[],
        inputs: &[&["(3, 4)"]],
    },
    Case {
        src: "fun f (l as x :: _) = x :: l | f [] = []",
        entry: "f",
        inst: &[],
        inputs: &[&["[2, 3]"], &["[]"]],
    },
    Case {
        src: "fun f x = case x of 0 => 10 | 1 => 20 | _ => 30",
        entry: "f",
        inst: &[],
        inputs: &[&["0"], &["1"], &["2"]],
    },
    Case {
        src: "fun fold f z [] = z | fold f z (x :: xs) = f (x, fold f z xs)\nfun g xs = fold op+ 0 xs",
        entry: "g",
        inst: &[],
        inputs: &[&["[1, 2, 3, 4]"]],
    },
    Case {
        src: "fun first [] = NONE | first (x :: _) = SOME x\nfun g xs = case first xs of SOME v => v | NONE => 0",
        entry: "g",
        inst: &[],
        inputs: &[&["[4, 2]"], &["[]"]],
    },
    Case {
        src: "datatype tree = Leaf | Node of tree * int * tree\nfun sum Leaf = 0 | sum (Node (l, v, r)) = sum l + v + sum r",
        entry: "sum",
        inst: &[],
        inputs: &[&["Leaf"], &["Node (Node (Leaf, 1, Leaf), 2, Node (Leaf, 3, Leaf))"]],
    },
    Case {
        src: "fun cmp (a : int) b = if a < b then LESS else if a = b then EQUAL else GREATER\nfun f a b = case cmp a b of LESS => ~1 | EQUAL => 0 | GREATER => 1",
        entry: "f",
        inst: &[],
        inputs: &[&["1", "2"], &["2", "2"], &["3", "2"]],
    },
    Case {
        src: "fun compose f g x = f (g x)\nfun h x = compose (fn y => y + 1) (fn y => y * 3) x",
        entry: "h",
        inst: &[],
        inputs: &[&["2"]],
    },
    Case {
        src: "fun add x y = x + y\nval inc = add 1\nfun f x = inc (inc x)",
        entry: "f",
        inst: &[],
        inputs: &[&["5"]],
    },
    Case {
        src: "fun id x = x\nfun f (n : int) b = if id b then id n else 0",
        entry: "f",
        inst: &[],
        inputs: &[&["4", "true"], &["4", "false"]],
    },
    Case {
        src: "fun swap (x, y) = (y, x)",
        entry: "swap",
        inst: &[("'a", "bool"), ("'b", "int option")],
        inputs: &[&["(true, SOME 3)"]],
    },
    Case {
        src: "fun f x = case x of (SOME a, SOME b) => a = b | (NONE, NONE) => true | _ => false",
        entry: "f",
        inst: &[],
        inputs: &[&["(SOME 1, SOME 1)"], &["(SOME 1, SOME 2)"], &["(NONE, NONE)"], &["(NONE, SOME 1)"]],
    },
    Case {
        src: "datatype color = Red | Green | Blue\nfun next c = case c of Red => Green | Green => Blue | Blue => Red\nfun f c = next (next c) = Red",
        entry: "f",
        inst: &[],
        inputs: &[&["Red"], &["Green"], &["Blue"]],
    },
    Case {
        src: "fun f [a, b] = a - b | f _ = 0",
        entry: "f",
        inst: &[],
        inputs: &[&["[5, 3]"], &["[1]"], &["[1, 2, 3]"]],
    },
    Case {
        src: "fun f xs = case xs of [] => NONE | x :: rest => (case f rest of NONE => SOME x | SOME m => SOME (if x > m then x else m))",
        entry: "f",
        inst: &[],
        inputs: &[&["[]"], &["[3, 9, 2]"]],
    },
];

#[test]
fn thirty_programs_agree_with_reference_interpreter() {
    assert!(CASES.len() >= 30, "{} programs", CASES.len());
    for case in CASES {
        let mut inst = Instantiation::new();
        for (v, t) in case.inst {
            inst.insert(v.to_string(), parse_type(t).unwrap());
        }
        let t = load(case.src, case.entry, &inst)
            .unwrap_or_else(|e| panic!("{}\n{}", e.render("case", case.src), case.src));
        let interp = Interp::new(case.src);
        let env = interp.decs(&parse(case.src).unwrap().decs, &Env::default());
        let entry = env.get(case.entry).unwrap();
        for inputs in case.inputs {
            let args: Vec<Val> = inputs.iter().map(|s| interp.exp(&parse_exp(s).unwrap(), &Env::default())).collect();
            let expected = args.iter().cloned().fold(entry.clone(), |f, a| interp.apply(f, a));
            let core = Expr::apps(t.expr.clone(), args.iter().map(to_core));
            let EvalResult::Value(got) = eval(&core, 1_000_000).unwrap() else { panic!("out of fuel: {}", case.src) };
            assert_eq!(plain_core(&got), plain(&expected), "{} on {:?}", case.src, inputs);
        }
    }
}

#[test]
fn surface_printer_reaches_a_fixpoint() {
    for case in CASES {
        let once = parse(case.src).unwrap().to_string();
        let twice = parse(&once).unwrap_or_else(|e| panic!("{}\n{once}", e.render("printed", &once))).to_string();
        assert_eq!(once, twice);
        let a = load(case.src, case.entry, &Instantiation::new());
        let b = load(&once, case.entry, &Instantiation::new());
        assert_eq!(a.is_ok(), b.is_ok(), "{once}");
    }
}

#[test]
fn env_lookup_is_innermost_first() {
    let e = Env::default().bind("x", Val::Int(1)).bind("x", Val::Int(2));
    assert!(matches!(e.get("x"), Some(Val::Int(2))));
}
