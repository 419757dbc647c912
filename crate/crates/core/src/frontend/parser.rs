use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::FrontendError;

type Result<T> = std::result::Result<T, FrontendError>;

pub fn parse(src: &str) -> Result<SurfaceProgram> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let mut decs = Vec::new();
    loop {
        while p.eat_sym(";") {}
        if p.peek() == &Tok::Eof {
            break;
        }
        decs.push(p.dec()?);
    }
    Ok(SurfaceProgram { decs })
}

pub fn parse_exp(src: &str) -> Result<Exp> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.exp()?;
    p.expect_eof()?;
    Ok(e)
}

pub fn parse_type(src: &str) -> Result<TyAst> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(FrontendError::syntax(self.span(), msg))
    }

    fn expected<T>(&self, what: &str) -> Result<T> {
        let found = match self.peek() {
            Tok::Eof => "end of input".to_string(),
            Tok::Int(n) => n.to_string(),
            Tok::Ident(s) | Tok::TyVar(s) => format!("`{s}`"),
            Tok::Hash(l) => format!("`#{l}`"),
            Tok::Kw(k) | Tok::Sym(k) => format!("`{k}`"),
        };
        self.err(format!("expected {what}, found {found}"))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Kw(t) if *t == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        if self.is_kw(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.expected(&format!("`{s}`"))
        }
    }

    fn expect_kw(&mut self, s: &str) -> Result<()> {
        if self.eat_kw(s) {
            Ok(())
        } else {
            self.expected(&format!("`{s}`"))
        }
    }

    fn expect_eof(&self) -> Result<()> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            self.expected("end of input")
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.expected("an identifier"),
        }
    }

    fn label(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            Tok::Int(n) if n > 0 => {
                self.bump();
                Ok(n.to_string())
            }
            _ => self.expected("a record label"),
        }
    }

    // Declarations.

    fn dec(&mut self) -> Result<Dec> {
        match self.peek() {
            Tok::Kw("val") => {
                let start = self.span();
                self.bump();
                let rec = self.eat_kw("rec");
                let p = self.pat()?;
                self.expect_sym("=")?;
                let e = self.exp()?;
                if !rec {
                    return Ok(Dec::Val(p, e));
                }
                // `val rec f = fn p1 => e1 | …` is `fun f p1 = e1 | …`.
                let PatKind::Ident(name) = p.kind else {
                    return Err(FrontendError::syntax(p.span, "`val rec` must bind a single name"));
                };
                let ExpKind::Fn(rules) = e.kind else {
                    return Err(FrontendError::syntax(e.span, "`val rec` must bind a `fn`"));
                };
                let clauses =
                    rules.into_iter().map(|(p, body)| Clause { params: vec![p], result: None, body }).collect();
                Ok(Dec::Fun(FunBind { name, clauses, span: Span::new(start.start, self.prev_end()) }))
            }
            Tok::Kw("fun") => {
                self.bump();
                let f = self.funbind()?;
                if self.is_kw("and") {
                    return self.err("mutually recursive functions are not supported");
                }
                Ok(Dec::Fun(f))
            }
            Tok::Kw("datatype") => {
                self.bump();
                let mut bs = vec![self.databind()?];
                while self.eat_kw("and") {
                    bs.push(self.databind()?);
                }
                Ok(Dec::Datatype(bs))
            }
            Tok::Kw("type") => {
                self.bump();
                let ps = self.tyvar_seq()?;
                let name = self.ident()?;
                self.expect_sym("=")?;
                let t = self.ty()?;
                Ok(Dec::Type(ps, name, t))
            }
            _ => self.expected("a declaration"),
        }
    }

    fn tyvar_seq(&mut self) -> Result<Vec<String>> {
        if let Tok::TyVar(v) = self.peek().clone() {
            self.bump();
            return Ok(vec![v]);
        }
        if self.is_sym("(") && matches!(self.peek_at(1), Tok::TyVar(_)) {
            self.bump();
            let mut vs = Vec::new();
            loop {
                match self.peek().clone() {
                    Tok::TyVar(v) => {
                        self.bump();
                        vs.push(v);
                    }
                    _ => return self.expected("a type variable"),
                }
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym(")")?;
            return Ok(vs);
        }
        Ok(Vec::new())
    }

    fn databind(&mut self) -> Result<DataBind> {
        let params = self.tyvar_seq()?;
        let name = self.ident()?;
        self.expect_sym("=")?;
        let mut ctors = Vec::new();
        loop {
            let c = if self.eat_sym("::") { "::".to_string() } else { self.ident()? };
            let arg = if self.eat_kw("of") { Some(self.ty()?) } else { None };
            ctors.push(ConBind { name: c, arg });
            if !self.eat_sym("|") {
                break;
            }
        }
        Ok(DataBind { params, name, ctors })
    }

    fn funbind(&mut self) -> Result<FunBind> {
        let start = self.span();
        let mut name: Option<String> = None;
        let mut clauses = Vec::new();
        loop {
            let at = self.span();
            let n = self.ident()?;
            if let Some(prev) = &name {
                if *prev != n {
                    return Err(FrontendError::syntax(
                        at,
                        format!("clause for `{n}` inside the definition of `{prev}`"),
                    ));
                }
            }
            name = Some(n);
            let mut params = Vec::new();
            while self.starts_atpat() {
                params.push(self.atpat()?);
            }
            if params.is_empty() {
                return self.expected("a function parameter");
            }
            let result = if self.eat_sym(":") { Some(self.ty()?) } else { None };
            self.expect_sym("=")?;
            let body = self.exp()?;
            clauses.push(Clause { params, result, body });
            if !self.eat_sym("|") {
                break;
            }
        }
        let arity = clauses[0].params.len();
        if clauses.iter().any(|c| c.params.len() != arity) {
            return Err(FrontendError::syntax(start, "clauses have different numbers of parameters"));
        }
        Ok(FunBind { name: name.expect("at least one clause"), clauses, span: Span::new(start.start, self.prev_end()) })
    }

    // Types.

    fn ty(&mut self) -> Result<TyAst> {
        let a = self.ty_tuple()?;
        if self.eat_sym("->") {
            let b = self.ty()?;
            return Ok(TyAst::Arrow(Box::new(a), Box::new(b)));
        }
        Ok(a)
    }

    fn ty_tuple(&mut self) -> Result<TyAst> {
        let mut items = vec![self.ty_app()?];
        while self.eat_sym("*") {
            items.push(self.ty_app()?);
        }
        Ok(if items.len() == 1 { items.pop().expect("one") } else { TyAst::Tuple(items) })
    }

    fn ty_app(&mut self) -> Result<TyAst> {
        let mut args = match self.peek().clone() {
            Tok::TyVar(v) => {
                self.bump();
                vec![TyAst::Var(v)]
            }
            Tok::Ident(n) => {
                self.bump();
                vec![TyAst::Con(Vec::new(), n)]
            }
            Tok::Sym("{") => {
                self.bump();
                let mut fs = Vec::new();
                if !self.is_sym("}") {
                    loop {
                        let l = self.label()?;
                        self.expect_sym(":")?;
                        fs.push((l, self.ty()?));
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym("}")?;
                vec![TyAst::Record(fs)]
            }
            Tok::Sym("(") => {
                self.bump();
                let mut ts = vec![self.ty()?];
                while self.eat_sym(",") {
                    ts.push(self.ty()?);
                }
                self.expect_sym(")")?;
                if ts.len() > 1 && !matches!(self.peek(), Tok::Ident(_)) {
                    return self.expected("a type constructor after a type argument list");
                }
                ts
            }
            _ => return self.expected("a type"),
        };
        while let Tok::Ident(n) = self.peek().clone() {
            self.bump();
            args = vec![TyAst::Con(std::mem::take(&mut args), n)];
        }
        Ok(args.pop().expect("one type"))
    }

    // Patterns.

    fn starts_atpat(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Int(_)
                | Tok::Ident(_)
                | Tok::Kw("true")
                | Tok::Kw("false")
                | Tok::Sym("_")
                | Tok::Sym("(")
                | Tok::Sym("[")
                | Tok::Sym("{")
        )
    }

    fn pat(&mut self) -> Result<Pat> {
        let start = self.span();
        if let (Tok::Ident(x), Tok::Kw("as")) = (self.peek().clone(), self.peek_at(1).clone()) {
            self.bump();
            self.bump();
            let p = self.pat()?;
            let span = start.to(p.span);
            return Ok(Pat { kind: PatKind::As(x, Box::new(p)), span });
        }
        let mut p = self.cons_pat()?;
        while self.eat_sym(":") {
            let t = self.ty()?;
            let span = Span::new(p.span.start, self.prev_end());
            p = Pat { kind: PatKind::Annot(Box::new(p), t), span };
        }
        Ok(p)
    }

    fn cons_pat(&mut self) -> Result<Pat> {
        let h = self.app_pat()?;
        if self.eat_sym("::") {
            let t = self.cons_pat()?;
            let span = h.span.to(t.span);
            return Ok(Pat { kind: PatKind::Cons(Box::new(h), Box::new(t)), span });
        }
        Ok(h)
    }

    fn app_pat(&mut self) -> Result<Pat> {
        if let Tok::Ident(c) = self.peek().clone() {
            let start = self.span();
            self.bump();
            if self.starts_atpat() {
                let a = self.atpat()?;
                let span = start.to(a.span);
                return Ok(Pat { kind: PatKind::Con(c, Box::new(a)), span });
            }
            return Ok(Pat { kind: PatKind::Ident(c), span: start });
        }
        self.atpat()
    }

    fn atpat(&mut self) -> Result<Pat> {
        let start = self.span();
        let kind = match self.peek().clone() {
            Tok::Sym("_") => {
                self.bump();
                PatKind::Wild
            }
            Tok::Int(n) => {
                self.bump();
                PatKind::Int(n)
            }
            Tok::Kw("true") => {
                self.bump();
                PatKind::Bool(true)
            }
            Tok::Kw("false") => {
                self.bump();
                PatKind::Bool(false)
            }
            Tok::Ident(x) => {
                self.bump();
                PatKind::Ident(x)
            }
            Tok::Sym("(") => {
                self.bump();
                if self.eat_sym(")") {
                    PatKind::Tuple(Vec::new())
                } else {
                    let mut ps = vec![self.pat()?];
                    while self.eat_sym(",") {
                        ps.push(self.pat()?);
                    }
                    self.expect_sym(")")?;
                    if ps.len() == 1 {
                        let mut p = ps.pop().expect("one");
                        p.span = Span::new(start.start, self.prev_end());
                        return Ok(p);
                    }
                    PatKind::Tuple(ps)
                }
            }
            Tok::Sym("[") => {
                self.bump();
                let mut ps = Vec::new();
                if !self.is_sym("]") {
                    ps.push(self.pat()?);
                    while self.eat_sym(",") {
                        ps.push(self.pat()?);
                    }
                }
                self.expect_sym("]")?;
                PatKind::List(ps)
            }
            Tok::Sym("{") => {
                self.bump();
                let mut fs = Vec::new();
                if !self.is_sym("}") {
                    loop {
                        let ls = self.span();
                        let l = self.label()?;
                        if self.eat_sym("=") {
                            fs.push((l, self.pat()?));
                        } else {
                            let kind = PatKind::Ident(l.clone());
                            fs.push((l, Pat { kind, span: Span::new(ls.start, self.prev_end()) }));
                        }
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym("}")?;
                PatKind::Record(fs)
            }
            _ => return self.expected("a pattern"),
        };
        Ok(Pat { kind, span: Span::new(start.start, self.prev_end()) })
    }

    // Expressions.

    fn exp(&mut self) -> Result<Exp> {
        let start = self.span();
        let e = match self.peek() {
            Tok::Kw("fn") => {
                self.bump();
                let m = self.rules()?;
                Exp { kind: ExpKind::Fn(m), span: Span::new(start.start, self.prev_end()) }
            }
            Tok::Kw("case") => {
                self.bump();
                let s = self.exp()?;
                self.expect_kw("of")?;
                let m = self.rules()?;
                Exp { kind: ExpKind::Case(Box::new(s), m), span: Span::new(start.start, self.prev_end()) }
            }
            Tok::Kw("if") => {
                self.bump();
                let c = self.exp()?;
                self.expect_kw("then")?;
                let t = self.exp()?;
                self.expect_kw("else")?;
                let f = self.exp()?;
                Exp {
                    kind: ExpKind::If(Box::new(c), Box::new(t), Box::new(f)),
                    span: Span::new(start.start, self.prev_end()),
                }
            }
            _ => self.binary(0)?,
        };
        let mut e = e;
        while self.eat_sym(":") {
            let t = self.ty()?;
            let span = Span::new(e.span.start, self.prev_end());
            e = Exp { kind: ExpKind::Annot(Box::new(e), t), span };
        }
        Ok(e)
    }

    fn rules(&mut self) -> Result<Match> {
        let mut m = Vec::new();
        loop {
            let p = self.pat()?;
            self.expect_sym("=>")?;
            let e = self.exp()?;
            m.push((p, e));
            if !self.eat_sym("|") {
                break;
            }
        }
        Ok(m)
    }

    fn peek_binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Sym("+") => BinOp::Add,
            Tok::Sym("-") => BinOp::Sub,
            Tok::Sym("*") => BinOp::Mul,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">=") => BinOp::Ge,
            Tok::Sym("=") => BinOp::Eq,
            Tok::Sym("<>") => BinOp::Ne,
            Tok::Sym("::") => BinOp::Cons,
            Tok::Kw("andalso") => BinOp::Andalso,
            Tok::Kw("orelse") => BinOp::Orelse,
            _ => return None,
        })
    }

    /// Precedence climbing over infix operators; `fn`, `case` and `if` may
    /// appear as the right operand.
    fn binary(&mut self, min: u8) -> Result<Exp> {
        let mut lhs = self.app()?;
        while let Some(op) = self.peek_binop() {
            let p = op.prec();
            if p < min {
                break;
            }
            self.bump();
            let next = if op.right_assoc() { p } else { p + 1 };
            let rhs = if matches!(self.peek(), Tok::Kw("fn") | Tok::Kw("case") | Tok::Kw("if")) {
                self.exp()?
            } else {
                self.binary(next)?
            };
            let span = lhs.span.to(rhs.span);
            lhs = Exp { kind: ExpKind::BinOp(op, Box::new(lhs), Box::new(rhs)), span };
        }
        Ok(lhs)
    }

    fn starts_atexp(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Int(_)
                | Tok::Ident(_)
                | Tok::Hash(_)
                | Tok::Kw("true")
                | Tok::Kw("false")
                | Tok::Kw("let")
                | Tok::Kw("op")
                | Tok::Sym("(")
                | Tok::Sym("[")
                | Tok::Sym("{")
        )
    }

    fn app(&mut self) -> Result<Exp> {
        if self.is_sym("~") {
            let start = self.span();
            self.bump();
            let a = self.app()?;
            let span = start.to(a.span);
            return Ok(Exp { kind: ExpKind::Neg(Box::new(a)), span });
        }
        let mut f = self.atexp()?;
        while self.starts_atexp() {
            let a = self.atexp()?;
            let span = f.span.to(a.span);
            f = Exp { kind: ExpKind::App(Box::new(f), Box::new(a)), span };
        }
        Ok(f)
    }

    fn atexp(&mut self) -> Result<Exp> {
        let start = self.span();
        let kind = match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                ExpKind::Int(n)
            }
            Tok::Kw("true") => {
                self.bump();
                ExpKind::Bool(true)
            }
            Tok::Kw("false") => {
                self.bump();
                ExpKind::Bool(false)
            }
            Tok::Ident(x) => {
                self.bump();
                ExpKind::Ident(x)
            }
            Tok::Hash(l) => {
                self.bump();
                ExpKind::Selector(l)
            }
            Tok::Kw("op") => {
                self.bump();
                let op = self.peek_binop().filter(|o| !matches!(o, BinOp::Andalso | BinOp::Orelse));
                let Some(op) = op else { return self.expected("an infix operator after `op`") };
                self.bump();
                ExpKind::Ident(format!("op{}", op.symbol()))
            }
            Tok::Kw("let") => {
                self.bump();
                let mut ds = Vec::new();
                while !self.is_kw("in") {
                    if self.eat_sym(";") {
                        continue;
                    }
                    ds.push(self.dec()?);
                }
                self.expect_kw("in")?;
                let mut body = self.exp()?;
                while self.eat_sym(";") {
                    body = self.exp()?;
                }
                self.expect_kw("end")?;
                ExpKind::Let(ds, Box::new(body))
            }
            Tok::Sym("(") => {
                self.bump();
                if self.eat_sym(")") {
                    ExpKind::Tuple(Vec::new())
                } else {
                    let mut es = vec![self.exp()?];
                    while self.eat_sym(",") {
                        es.push(self.exp()?);
                    }
                    self.expect_sym(")")?;
                    if es.len() == 1 {
                        let mut e = es.pop().expect("one");
                        e.span = Span::new(start.start, self.prev_end());
                        return Ok(e);
                    }
                    ExpKind::Tuple(es)
                }
            }
            Tok::Sym("[") => {
                self.bump();
                let mut es = Vec::new();
                if !self.is_sym("]") {
                    es.push(self.exp()?);
                    while self.eat_sym(",") {
                        es.push(self.exp()?);
                    }
                }
                self.expect_sym("]")?;
                ExpKind::List(es)
            }
            Tok::Sym("{") => {
                self.bump();
                let mut fs = Vec::new();
                if !self.is_sym("}") {
                    loop {
                        let l = self.label()?;
                        self.expect_sym("=")?;
                        fs.push((l, self.exp()?));
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym("}")?;
                ExpKind::Record(fs)
            }
            _ => return self.expected("an expression"),
        };
        Ok(Exp { kind, span: Span::new(start.start, self.prev_end()) })
    }
}
