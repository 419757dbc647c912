//! The equivalence check: formula generation followed by a solver query.

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::formula::Formula;
use crate::formulagen::{gen_formula, GenConfig};
use crate::smt::{encode_formula, Solver, SolverVerdict, UnknownReason};
use crate::syntax::{DataEnv, Expr, Type, TypingContext};

/// Formula generation recurses deeply on large programs; it runs on a
/// thread with this much stack.
const GEN_STACK: usize = 256 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Equivalent,
    NotProven,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Equivalent => "Equivalent",
            Verdict::NotProven => "NotProven",
        })
    }
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub verdict: Verdict,
    pub solver: SolverVerdict,
    pub formula: Formula,
    pub gamma_prime: TypingContext,
    /// Empty when encoding failed.
    pub script: String,
    pub exhausted: bool,
    pub elapsed: Duration,
}

/// Decides whether `e1` and `e2`, closed and of type `ty`, are provably
/// equivalent.
pub fn check_equiv(e1: &Expr, e2: &Expr, ty: &Type, env: &DataEnv, cfg: &GenConfig, solver: &Solver) -> CheckOutcome {
    let start = Instant::now();
    let r = thread::scope_big_stack(|| gen_formula(&TypingContext::initial(), e1, e2, ty, env, cfg));
    let (script, solver_verdict) = match encode_formula(&r.formula, &r.gamma_prime, env) {
        Ok(s) => {
            let v = solver.check(&s);
            (s, v)
        }
        Err(e) => (String::new(), SolverVerdict::Unknown(UnknownReason::Encoding(e.to_string()))),
    };
    CheckOutcome {
        verdict: if solver_verdict.is_valid() { Verdict::Equivalent } else { Verdict::NotProven },
        solver: solver_verdict,
        formula: r.formula,
        gamma_prime: r.gamma_prime,
        script,
        exhausted: r.exhausted,
        elapsed: start.elapsed(),
    }
}

mod thread {
    pub fn scope_big_stack<R: Send>(f: impl FnOnce() -> R + Send) -> R {
        std::thread::scope(|s| {
            std::thread::Builder::new()
                .stack_size(super::GEN_STACK)
                .spawn_scoped(s, f)
                .expect("spawn formula generation thread")
                .join()
                .unwrap_or_else(|p| std::panic::resume_unwind(p))
        })
    }
}
