pub mod check;
pub mod cluster;
pub mod dynamics;
pub mod formula;
pub mod formulagen;
pub mod frontend;
pub mod generate;
pub mod par;
pub mod pretty;
pub mod rewrite;
pub mod smt;
pub mod statics;
pub mod subst;
pub mod syntax;

pub use syntax::*;
