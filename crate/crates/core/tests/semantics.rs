//! Randomised and exhaustive checks of the statics, dynamics and formula
//! generation invariants.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zeus_core::formula::formula_free_vars;
use zeus_core::formulagen::{gen_formula, GenConfig};
use zeus_core::generate::{TermConfig, TermGen};
use zeus_core::subst::free_vars;
use zeus_core::{TypingContext, Var};

mod common;
use common::semantics::{env, match_determinism_exhaustive, progress_and_preservation, whnf_agrees_with_evaluation};

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn progress_and_preservation_hold(seed in any::<u64>()) {
        let r = progress_and_preservation(seed);
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }

    #[test]
    fn whnf_preserves_values(seed in any::<u64>()) {
        let r = whnf_agrees_with_evaluation(seed);
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }

    /// Γ′ is fresh for the inputs and, with Γ, covers the formula.
    #[test]
    fn formula_variables_are_accounted_for(seed in any::<u64>()) {
        let env = env();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = TermGen::new(&env, &mut rng, TermConfig { depth: 3, ..TermConfig::default() });
        let mut ctx = TypingContext::initial();
        for name in ["p", "q"] {
            let t = g.ty(1);
            ctx.insert(Var::fresh(name), t);
        }
        let ty = g.ty(1);
        let e1 = g.expr(&ctx, &ty, 3);
        let e2 = g.expr(&ctx, &ty, 3);
        let r = gen_formula(&ctx, &e1, &e2, &ty, &env, &GenConfig::default());
        let input: BTreeSet<Var> = free_vars(&e1).into_iter().chain(free_vars(&e2)).chain(ctx.vars().cloned()).collect();
        for x in r.gamma_prime.vars() {
            prop_assert!(!input.contains(x), "{:?} is in both Γ and Γ′", x);
        }
        for x in formula_free_vars(&r.formula) {
            prop_assert!(ctx.contains(&x) || r.gamma_prime.contains(&x), "{:?} unaccounted in {}", x, r.formula);
        }
    }
}

#[test]
fn match_determinism() {
    let checked = match_determinism_exhaustive().unwrap();
    assert!(checked > 10_000, "only {checked} value/pattern pairs");
}
