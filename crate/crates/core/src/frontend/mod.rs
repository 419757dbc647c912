//! Mini-ML surface language: parsing, datatype scraping and transpilation
//! to annotated core expressions.

pub mod ast;
mod elab;
pub mod emit;
mod inline;
pub mod lexer;
pub mod parser;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::statics::StaticsError;
use crate::syntax::{DataEnv, EnvError, Expr, Type};

pub use ast::{Span, SurfaceProgram, TyAst};
pub use elab::scrape_datatypes;
pub use parser::{parse, parse_exp, parse_type};

/// Ground types for type variables, keyed by their source spelling (`'a`).
pub type Instantiation = BTreeMap<String, TyAst>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrontendError {
    #[error("syntax error: {msg}")]
    Syntax { span: Span, msg: String },
    #[error("type error: {msg}")]
    Type { span: Span, msg: String },
    #[error("unsupported: {msg}")]
    Unsupported { span: Span, msg: String },
    #[error("no top-level binding named `{0}`")]
    UnknownEntry(String),
    #[error("`{0}` is bound more than once at top level")]
    DuplicateEntry(String),
    #[error("entry point has polymorphic type `{ty}`; instantiate {missing} with --instantiate")]
    PolymorphicEntryPoint { ty: String, missing: String },
    #[error("unknown type name `{name}`")]
    UnknownTypeName { span: Span, name: String },
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("transpiled program is ill typed: {0}")]
    Statics(#[from] StaticsError),
}

impl FrontendError {
    pub fn syntax(span: Span, msg: impl Into<String>) -> Self {
        FrontendError::Syntax { span, msg: msg.into() }
    }

    pub fn type_error(span: Span, msg: impl Into<String>) -> Self {
        FrontendError::Type { span, msg: msg.into() }
    }

    pub fn unsupported(span: Span, msg: impl Into<String>) -> Self {
        FrontendError::Unsupported { span, msg: msg.into() }
    }

    pub fn span(&self) -> Option<Span> {
        match self {
            FrontendError::Syntax { span, .. }
            | FrontendError::Type { span, .. }
            | FrontendError::Unsupported { span, .. }
            | FrontendError::UnknownTypeName { span, .. } => Some(*span),
            _ => None,
        }
    }

    /// `path:line:col: message`, or `path: message` without a span.
    pub fn render(&self, path: &str, src: &str) -> String {
        match self.span() {
            Some(s) => {
                let (line, col) = line_col(src, s.start);
                format!("{path}:{line}:{col}: {self}")
            }
            None => format!("{path}: {self}"),
        }
    }
}

/// One-based line and column (in characters) of a byte offset.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(src.len());
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// The entry binding of a program in core form.
#[derive(Clone, Debug)]
pub struct Transpiled {
    pub expr: Expr,
    pub ty: Type,
    pub env: DataEnv,
}

/// Transpiles the top-level binding `entry`. Earlier top-level bindings are
/// inlined at their use sites.
pub fn transpile(prog: &SurfaceProgram, entry: &str, inst: &Instantiation) -> Result<Transpiled, FrontendError> {
    elab::transpile(prog, entry, inst)
}

/// Parses and transpiles in one step.
pub fn load(src: &str, entry: &str, inst: &Instantiation) -> Result<Transpiled, FrontendError> {
    transpile(&parse(src)?, entry, inst)
}

/// Merges the datatype environments of two programs. A datatype declared
/// by both must have the same constructors.
pub fn merge_envs(a: &DataEnv, b: &DataEnv) -> Result<DataEnv, EnvError> {
    let mut out = a.clone();
    for (name, ctors) in b.datatypes() {
        match a.ctors_of(name) {
            Some(mine) if mine == ctors => {}
            Some(_) => return Err(EnvError::DuplicateDatatype(name.to_string())),
            None => out.add_datatype(name, ctors.to_vec())?,
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_col_counts_from_one() {
        let src = "ab\ncd";
        assert_eq!(line_col(src, 0), (1, 1));
        assert_eq!(line_col(src, 4), (2, 2));
    }

    #[test]
    fn render_includes_position() {
        let src = "val x =\n  (1, ";
        let err = parse(src).unwrap_err();
        assert!(err.render("a.sml", src).starts_with("a.sml:2:7: syntax error"), "{}", err.render("a.sml", src));
    }
}
