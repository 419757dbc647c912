//! Abstract syntax of the core calculus: types, patterns, expressions, the
//! datatype environment and typing contexts.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Name = Arc<str>;

static NEXT_STAMP: AtomicU64 = AtomicU64::new(1);

/// A variable: a user-facing name plus a numeric stamp.
///
/// Names read from source carry stamp 0. Every variable minted by
/// [`Var::fresh`] gets a process-wide unique stamp, so two fresh variables
/// never collide, regardless of their names or of the thread minting them.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var {
    pub name: Name,
    pub stamp: u64,
}

impl Var {
    pub fn named(name: &str) -> Self {
        Var { name: Arc::from(name), stamp: 0 }
    }

    pub fn fresh(name: &str) -> Self {
        Var { name: Arc::from(name), stamp: NEXT_STAMP.fetch_add(1, AtomicOrdering::Relaxed) }
    }

    /// A fresh variable sharing this variable's display name.
    pub fn refresh(&self) -> Self {
        Var { name: self.name.clone(), stamp: NEXT_STAMP.fetch_add(1, AtomicOrdering::Relaxed) }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.stamp == 0 {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}#{}", self.name, self.stamp)
        }
    }
}

/// Record label. Numeric labels (tuple positions) sort numerically and
/// before symbolic labels, which sort lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub Name);

impl Label {
    pub fn new(s: &str) -> Self {
        Label(Arc::from(s))
    }

    pub fn pos(i: usize) -> Self {
        Label(Arc::from(i.to_string().as_str()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn numeric(&self) -> Option<u64> {
        if self.0.is_empty() || self.0.starts_with('0') && self.0.len() > 1 {
            return None;
        }
        self.0.parse().ok()
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.numeric(), other.numeric()) {
            (Some(a), Some(b)) => a.cmp(&b),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Injection label of an algebraic datatype.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ctor(pub Name);

impl Ctor {
    pub fn new(s: &str) -> Self {
        Ctor(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Ctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Ctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Type {
    Int,
    Bool,
    Data(Name),
    Record(Vec<(Label, Type)>),
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub fn data(name: &str) -> Type {
        Type::Data(Arc::from(name))
    }

    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Box::new(dom), Box::new(cod))
    }

    /// Builds a record type with labels in canonical order.
    pub fn record(mut fields: Vec<(Label, Type)>) -> Type {
        fields.sort_by(|a, b| a.0.cmp(&b.0));
        Type::Record(fields)
    }

    pub fn tuple(items: Vec<Type>) -> Type {
        Type::Record(items.into_iter().enumerate().map(|(i, t)| (Label::pos(i + 1), t)).collect())
    }

    pub fn unit() -> Type {
        Type::Record(Vec::new())
    }

    pub fn field(&self, label: &Label) -> Option<&Type> {
        match self {
            Type::Record(fs) => fs.iter().find(|(l, _)| l == label).map(|(_, t)| t),
            _ => None,
        }
    }

    pub fn is_arrow(&self) -> bool {
        matches!(self, Type::Arrow(..))
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Const {
    Int(i64),
    Bool(bool),
}

impl Const {
    pub fn base_type(&self) -> Type {
        match self {
            Const::Int(_) => Type::Int,
            Const::Bool(_) => Type::Bool,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum PrimOp {
    Add,
    Sub,
    Mul,
    Lt,
    Gt,
    Le,
    Ge,
}

impl PrimOp {
    pub const ALL: [PrimOp; 7] =
        [PrimOp::Add, PrimOp::Sub, PrimOp::Mul, PrimOp::Lt, PrimOp::Gt, PrimOp::Le, PrimOp::Ge];

    pub fn symbol(self) -> &'static str {
        match self {
            PrimOp::Add => "+",
            PrimOp::Sub => "-",
            PrimOp::Mul => "*",
            PrimOp::Lt => "<",
            PrimOp::Gt => ">",
            PrimOp::Le => "<=",
            PrimOp::Ge => ">=",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, PrimOp::Lt | PrimOp::Gt | PrimOp::Le | PrimOp::Ge)
    }

    pub fn result_type(self) -> Type {
        if self.is_comparison() {
            Type::Bool
        } else {
            Type::Int
        }
    }

    /// `{1:int, 2:int} -> int` for arithmetic, `-> boolean` for comparisons.
    pub fn signature(self) -> Type {
        Type::arrow(Type::tuple(vec![Type::Int, Type::Int]), self.result_type())
    }

    /// The delta rule. Arithmetic wraps at machine width.
    pub fn apply(self, a: i64, b: i64) -> Const {
        match self {
            PrimOp::Add => Const::Int(a.wrapping_add(b)),
            PrimOp::Sub => Const::Int(a.wrapping_sub(b)),
            PrimOp::Mul => Const::Int(a.wrapping_mul(b)),
            PrimOp::Lt => Const::Bool(a < b),
            PrimOp::Gt => Const::Bool(a > b),
            PrimOp::Le => Const::Bool(a <= b),
            PrimOp::Ge => Const::Bool(a >= b),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pattern {
    Wildcard,
    Var(Var),
    Record(Vec<(Label, Pattern)>),
    Alias(Var, Box<Pattern>),
    Const(Const),
    Inj(Ctor, Option<Box<Pattern>>),
}

impl Pattern {
    pub fn var(name: &str) -> Pattern {
        Pattern::Var(Var::named(name))
    }

    pub fn record(mut fields: Vec<(Label, Pattern)>) -> Pattern {
        fields.sort_by(|a, b| a.0.cmp(&b.0));
        Pattern::Record(fields)
    }

    pub fn tuple(items: Vec<Pattern>) -> Pattern {
        Pattern::Record(items.into_iter().enumerate().map(|(i, p)| (Label::pos(i + 1), p)).collect())
    }

    pub fn inj(ctor: &str, arg: Pattern) -> Pattern {
        Pattern::Inj(Ctor::new(ctor), Some(Box::new(arg)))
    }

    pub fn inj0(ctor: &str) -> Pattern {
        Pattern::Inj(Ctor::new(ctor), None)
    }

    pub fn alias(name: &str, p: Pattern) -> Pattern {
        Pattern::Alias(Var::named(name), Box::new(p))
    }

    /// Variables bound by the pattern, in left-to-right order.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Pattern::Wildcard | Pattern::Const(_) | Pattern::Inj(_, None) => {}
            Pattern::Var(x) => out.push(x.clone()),
            Pattern::Record(fs) => fs.iter().for_each(|(_, p)| p.collect_vars(out)),
            Pattern::Alias(x, p) => {
                p.collect_vars(out);
                out.push(x.clone());
            }
            Pattern::Inj(_, Some(p)) => p.collect_vars(out),
        }
    }

    /// Matches every value of its type.
    pub fn is_irrefutable(&self) -> bool {
        match self {
            Pattern::Wildcard | Pattern::Var(_) => true,
            Pattern::Alias(_, p) => p.is_irrefutable(),
            Pattern::Record(fs) => fs.iter().all(|(_, p)| p.is_irrefutable()),
            Pattern::Const(_) | Pattern::Inj(..) => false,
        }
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

pub type Branch = (Pattern, Expr);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Expr {
    Const(Const),
    Var(Var),
    Record(Vec<(Label, Expr)>),
    Proj(Box<Expr>, Label),
    Inj(Ctor, Option<Box<Expr>>),
    Case(Box<Expr>, Vec<Branch>),
    /// Binder annotated with its domain type.
    Lambda(Var, Type, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    /// Annotated with the type of the recursive binder (the fixed point's type).
    Fix(Var, Type, Box<Expr>),
    Prim(PrimOp),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(Const::Int(n))
    }

    pub fn bool(b: bool) -> Expr {
        Expr::Const(Const::Bool(b))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(Var::named(name))
    }

    pub fn lam(x: Var, ty: Type, body: Expr) -> Expr {
        Expr::Lambda(x, ty, Box::new(body))
    }

    pub fn fix(x: Var, ty: Type, body: Expr) -> Expr {
        Expr::Fix(x, ty, Box::new(body))
    }

    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(a))
    }

    pub fn apps(f: Expr, args: impl IntoIterator<Item = Expr>) -> Expr {
        args.into_iter().fold(f, Expr::app)
    }

    pub fn record(mut fields: Vec<(Label, Expr)>) -> Expr {
        fields.sort_by(|a, b| a.0.cmp(&b.0));
        Expr::Record(fields)
    }

    pub fn tuple(items: Vec<Expr>) -> Expr {
        Expr::Record(items.into_iter().enumerate().map(|(i, e)| (Label::pos(i + 1), e)).collect())
    }

    pub fn proj(e: Expr, label: Label) -> Expr {
        Expr::Proj(Box::new(e), label)
    }

    pub fn inj(ctor: &str, arg: Expr) -> Expr {
        Expr::Inj(Ctor::new(ctor), Some(Box::new(arg)))
    }

    pub fn inj0(ctor: &str) -> Expr {
        Expr::Inj(Ctor::new(ctor), None)
    }

    pub fn case(scrutinee: Expr, branches: Vec<Branch>) -> Expr {
        Expr::Case(Box::new(scrutinee), branches)
    }

    /// `o {1=a, 2=b}`.
    pub fn prim(op: PrimOp, a: Expr, b: Expr) -> Expr {
        Expr::app(Expr::Prim(op), Expr::tuple(vec![a, b]))
    }

    /// Splits an application spine into its head and arguments.
    pub fn spine(&self) -> (&Expr, Vec<&Expr>) {
        let mut args = Vec::new();
        let mut head = self;
        while let Expr::App(f, a) = head {
            args.push(&**a);
            head = f;
        }
        args.reverse();
        (head, args)
    }

    /// Number of nodes, patterns excluded.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Prim(_) | Expr::Inj(_, None) => 1,
            Expr::Record(fs) => 1 + fs.iter().map(|(_, e)| e.size()).sum::<usize>(),
            Expr::Proj(e, _) | Expr::Inj(_, Some(e)) => 1 + e.size(),
            Expr::Lambda(_, _, e) | Expr::Fix(_, _, e) => 1 + e.size(),
            Expr::App(f, a) => 1 + f.size() + a.size(),
            Expr::Case(s, bs) => 1 + s.size() + bs.iter().map(|(_, e)| e.size()).sum::<usize>(),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

pub type Bindings = Vec<(Var, Expr)>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CtorSig {
    pub ctor: Ctor,
    pub arg: Option<Type>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtorInfo {
    pub datatype: Name,
    pub arg: Option<Type>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnvError {
    #[error("constructor `{ctor}` declared by both `{first}` and `{second}`")]
    DuplicateConstructor { ctor: String, first: String, second: String },
    #[error("datatype `{0}` declared twice")]
    DuplicateDatatype(String),
    #[error("datatype `{0}` has no constructors")]
    EmptyDatatype(String),
    #[error("unknown datatype `{0}`")]
    UnknownDatatype(String),
}

/// The fixed set of algebraic datatypes and their injection labels.
///
/// Injection labels are unique across all datatypes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "DataEnvRepr", try_from = "DataEnvRepr")]
pub struct DataEnv {
    types: BTreeMap<Name, Vec<CtorSig>>,
    index: HashMap<Ctor, CtorInfo>,
}

#[derive(Serialize, Deserialize)]
struct DataEnvRepr {
    datatypes: Vec<DatatypeRepr>,
}

#[derive(Serialize, Deserialize)]
struct DatatypeRepr {
    name: Name,
    ctors: Vec<CtorSig>,
}

impl From<DataEnv> for DataEnvRepr {
    fn from(env: DataEnv) -> Self {
        DataEnvRepr { datatypes: env.types.into_iter().map(|(name, ctors)| DatatypeRepr { name, ctors }).collect() }
    }
}

impl TryFrom<DataEnvRepr> for DataEnv {
    type Error = EnvError;

    fn try_from(repr: DataEnvRepr) -> Result<Self, EnvError> {
        let mut env = DataEnv::new();
        for dt in repr.datatypes {
            env.add_datatype(&dt.name, dt.ctors)?;
        }
        env.validate()?;
        Ok(env)
    }
}

impl DataEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_datatype(&mut self, name: &str, ctors: Vec<CtorSig>) -> Result<(), EnvError> {
        if self.types.contains_key(name) {
            return Err(EnvError::DuplicateDatatype(name.to_string()));
        }
        if ctors.is_empty() {
            return Err(EnvError::EmptyDatatype(name.to_string()));
        }
        let name: Name = Arc::from(name);
        let mut seen: HashMap<&Ctor, ()> = HashMap::new();
        for sig in &ctors {
            if let Some(other) = self.index.get(&sig.ctor) {
                return Err(EnvError::DuplicateConstructor {
                    ctor: sig.ctor.to_string(),
                    first: other.datatype.to_string(),
                    second: name.to_string(),
                });
            }
            if seen.insert(&sig.ctor, ()).is_some() {
                return Err(EnvError::DuplicateConstructor {
                    ctor: sig.ctor.to_string(),
                    first: name.to_string(),
                    second: name.to_string(),
                });
            }
        }
        for sig in &ctors {
            self.index.insert(sig.ctor.clone(), CtorInfo { datatype: name.clone(), arg: sig.arg.clone() });
        }
        self.types.insert(name, ctors);
        Ok(())
    }

    /// Checks that every datatype named in a constructor signature exists.
    pub fn validate(&self) -> Result<(), EnvError> {
        fn check(env: &DataEnv, ty: &Type) -> Result<(), EnvError> {
            match ty {
                Type::Int | Type::Bool => Ok(()),
                Type::Data(n) if env.types.contains_key(n) => Ok(()),
                Type::Data(n) => Err(EnvError::UnknownDatatype(n.to_string())),
                Type::Record(fs) => fs.iter().try_for_each(|(_, t)| check(env, t)),
                Type::Arrow(a, b) => {
                    check(env, a)?;
                    check(env, b)
                }
            }
        }
        for sigs in self.types.values() {
            for sig in sigs {
                if let Some(t) = &sig.arg {
                    check(self, t)?;
                }
            }
        }
        Ok(())
    }

    pub fn ctor(&self, c: &Ctor) -> Option<&CtorInfo> {
        self.index.get(c)
    }

    pub fn ctors_of(&self, datatype: &str) -> Option<&[CtorSig]> {
        self.types.get(datatype).map(|v| v.as_slice())
    }

    pub fn contains(&self, datatype: &str) -> bool {
        self.types.contains_key(datatype)
    }

    pub fn datatypes(&self) -> impl Iterator<Item = (&Name, &[CtorSig])> {
        self.types.iter().map(|(n, c)| (n, c.as_slice()))
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    /// Whether the type is well formed here: every datatype it names exists.
    pub fn well_formed(&self, ty: &Type) -> bool {
        match ty {
            Type::Int | Type::Bool => true,
            Type::Data(n) => self.types.contains_key(n),
            Type::Record(fs) => fs.windows(2).all(|w| w[0].0 < w[1].0) && fs.iter().all(|(_, t)| self.well_formed(t)),
            Type::Arrow(a, b) => self.well_formed(a) && self.well_formed(b),
        }
    }
}

/// Ordered map from variables to types.
///
/// Primitive operations are typed intrinsically (see [`PrimOp::signature`]),
/// so the initial context holds no variables.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypingContext {
    entries: Vec<(Var, Type)>,
}

impl TypingContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// The initial context: only the primitive operations.
    pub fn initial() -> Self {
        Self::default()
    }

    pub fn prim_typings() -> impl Iterator<Item = (PrimOp, Type)> {
        PrimOp::ALL.into_iter().map(|o| (o, o.signature()))
    }

    /// Adds or replaces a binding. Replacement keeps keys unique.
    pub fn insert(&mut self, x: Var, ty: Type) {
        if let Some(slot) = self.entries.iter_mut().find(|(y, _)| *y == x) {
            slot.1 = ty;
        } else {
            self.entries.push((x, ty));
        }
    }

    pub fn with(&self, x: Var, ty: Type) -> Self {
        let mut out = self.clone();
        out.insert(x, ty);
        out
    }

    pub fn extend(&mut self, other: &TypingContext) {
        for (x, t) in &other.entries {
            self.insert(x.clone(), t.clone());
        }
    }

    pub fn extended(&self, other: &TypingContext) -> Self {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    pub fn get(&self, x: &Var) -> Option<&Type> {
        self.entries.iter().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn contains(&self, x: &Var) -> bool {
        self.get(x).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Type)> {
        self.entries.iter().map(|(x, t)| (x, t))
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.entries.iter().map(|(x, _)| x)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_disjoint(&self, other: &TypingContext) -> bool {
        self.vars().all(|x| !other.contains(x))
    }
}

impl fmt::Debug for TypingContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter().map(|(x, t)| (x, t))).finish()
    }
}

impl FromIterator<(Var, Type)> for TypingContext {
    fn from_iter<I: IntoIterator<Item = (Var, Type)>>(iter: I) -> Self {
        let mut ctx = TypingContext::new();
        for (x, t) in iter {
            ctx.insert(x, t);
        }
        ctx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_sort_numerically_then_lexically() {
        let mut ls = [Label::new("b"), Label::pos(10), Label::new("a"), Label::pos(2), Label::pos(1)];
        ls.sort();
        let got: Vec<_> = ls.iter().map(|l| l.as_str()).collect();
        assert_eq!(got, ["1", "2", "10", "a", "b"]);
    }

    #[test]
    fn record_constructors_canonicalize() {
        let t = Type::record(vec![(Label::new("y"), Type::Bool), (Label::new("x"), Type::Int)]);
        assert_eq!(t, Type::Record(vec![(Label::new("x"), Type::Int), (Label::new("y"), Type::Bool)]));
    }

    #[test]
    fn fresh_vars_are_distinct() {
        let a = Var::fresh("x");
        let b = Var::fresh("x");
        assert_ne!(a, b);
        assert_ne!(a, Var::named("x"));
    }

    #[test]
    fn duplicate_injection_labels_rejected() {
        let mut env = DataEnv::new();
        env.add_datatype(
            "opt",
            vec![
                CtorSig { ctor: Ctor::new("NONE"), arg: None },
                CtorSig { ctor: Ctor::new("SOME"), arg: Some(Type::Int) },
            ],
        )
        .unwrap();
        let err = env.add_datatype("other", vec![CtorSig { ctor: Ctor::new("SOME"), arg: None }]).unwrap_err();
        assert!(matches!(err, EnvError::DuplicateConstructor { .. }));
        let err = env
            .add_datatype(
                "twice",
                vec![CtorSig { ctor: Ctor::new("A"), arg: None }, CtorSig { ctor: Ctor::new("A"), arg: None }],
            )
            .unwrap_err();
        assert!(matches!(err, EnvError::DuplicateConstructor { .. }));
        // A failed declaration leaves the environment untouched.
        assert!(env.ctor(&Ctor::new("A")).is_none());
    }

    #[test]
    fn context_insert_replaces() {
        let mut ctx = TypingContext::new();
        ctx.insert(Var::named("x"), Type::Int);
        ctx.insert(Var::named("x"), Type::Bool);
        assert_eq!(ctx.len(), 1);
        assert_eq!(ctx.get(&Var::named("x")), Some(&Type::Bool));
    }

    #[test]
    fn spine_splits_curried_application() {
        let e = Expr::apps(Expr::var("f"), [Expr::int(1), Expr::int(2)]);
        let (head, args) = e.spine();
        assert_eq!(head, &Expr::var("f"));
        assert_eq!(args, vec![&Expr::int(1), &Expr::int(2)]);
    }
}
