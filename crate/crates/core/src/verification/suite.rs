//! Checks on the explicit automata of a desk-scale instance.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{decimal, instance_json, prime_values, Verdict, VerificationError};
use crate::automata::{
    build_swdfa, build_ufa, minimal_period, Ambiguity, NfaEvaluator, RunCount, SweepRunner,
    UfaLanguage, UnaryNfa,
};
use crate::residue::ModuliSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AutomataOptions {
    pub state_cap: usize,
    /// Every length in `0..=window` is checked.
    pub window: u64,
    /// Random lengths below the product of all primes.
    pub samples: usize,
    /// Random lengths far above it.
    pub big_samples: usize,
    pub seed: u64,
    pub period_domain_limit: u64,
}

impl Default for AutomataOptions {
    fn default() -> Self {
        AutomataOptions {
            state_cap: 1 << 20,
            window: 10_000,
            samples: 10_000,
            big_samples: 1_000,
            seed: 0,
            period_domain_limit: 1 << 22,
        }
    }
}

fn first_failure(slot: &mut Value, failure: Value) {
    if slot.is_null() {
        *slot = failure;
    }
}

/// The 1UFA has at most one accepting run on every word, by three routes:
/// reachability in the self-product, saturated run counts stepped over the
/// window, and run counts by matrix powers at random lengths below the
/// product of all primes. Lengths that are multiples of that product are
/// rejected.
pub fn check_ufa_unambiguity(
    ms: &ModuliSystem,
    opts: &AutomataOptions,
) -> Result<Verdict, VerificationError> {
    let ufa = build_ufa(ms, opts.state_cap)?;
    let nfa = &ufa.nfa;
    let mut witness = Value::Null;

    let product = nfa.is_unambiguous();
    if let Ambiguity::Ambiguous { witness_length } = product {
        first_failure(
            &mut witness,
            json!({ "route": "product", "length": witness_length }),
        );
    }

    let mut evaluator = NfaEvaluator::new(nfa);
    let stepped = evaluator.run_counts_by_stepping(opts.window);
    let mut window_accepted = 0u64;
    for (len, &count) in stepped.iter().enumerate() {
        if count == RunCount::Many {
            first_failure(&mut witness, json!({ "route": "stepping", "length": len }));
        }
        let member = ms.contains_length(&BigUint::from(len))?;
        if member != (count == RunCount::One) {
            first_failure(
                &mut witness,
                json!({ "route": "stepping_vs_predicate", "length": len }),
            );
        }
        window_accepted += member as u64;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let all = ms.primes_product();
    let mut sampled_accepted = 0u64;
    for _ in 0..opts.samples {
        let len = rng.gen_biguint_below(all);
        let count = evaluator.count_accepting_runs(&len);
        if count == RunCount::Many || ms.contains_length(&len)? != (count == RunCount::One) {
            first_failure(
                &mut witness,
                json!({ "route": "matrix_power", "length": decimal(&len), "runs": count.to_string() }),
            );
        }
        sampled_accepted += (count == RunCount::One) as u64;
    }

    let mut zero_class = Vec::new();
    for multiple in [all.clone(), all * 2u32, all * 1000u32] {
        let count = evaluator.count_accepting_runs(&multiple);
        if count != RunCount::Zero {
            first_failure(
                &mut witness,
                json!({ "route": "zero_class", "length": decimal(&multiple) }),
            );
        }
        zero_class.push(count.to_string());
    }

    Ok(Verdict::new(
        "ufa_unambiguity",
        instance_json(ms),
        witness.is_null(),
        witness,
        json!({
            "states": nfa.states(),
            "accepting_states": nfa.accepting_states().len(),
            "product_pairs": match product {
                Ambiguity::Unambiguous { product_pairs } => Some(product_pairs),
                Ambiguity::Ambiguous { .. } => None,
            },
            "window": opts.window,
            "window_accepted": window_accepted,
            "samples": opts.samples,
            "sample_seed": opts.seed,
            "samples_accepted": sampled_accepted,
            "zero_class_runs": zero_class,
        }),
    ))
}

/// Membership agrees between the UFA, the residue predicate and the
/// sweeping DFA; the complement sweeping DFA, built directly and by flipping
/// accepting states, is the pointwise negation. Covers the whole window and
/// random lengths with several times the bits of the prime product.
pub fn check_equivalence(
    ms: &ModuliSystem,
    opts: &AutomataOptions,
) -> Result<Verdict, VerificationError> {
    let ufa = build_ufa(ms, opts.state_cap)?;
    let lang = build_swdfa(ms, false, opts.state_cap)?;
    let comp = build_swdfa(ms, true, opts.state_cap)?;
    let flipped = lang.complement_accepting_flip()?;
    let mut lang_run = SweepRunner::new(&lang);
    let mut comp_run = SweepRunner::new(&comp);
    let mut flip_run = SweepRunner::new(&flipped);
    let mut evaluator = NfaEvaluator::new(&ufa.nfa);
    let mut witness = Value::Null;

    let stepped = evaluator.run_counts_by_stepping(opts.window);
    let mut residue_mode_checked = 0u64;
    for (len, &count) in stepped.iter().enumerate() {
        let l = len as u64;
        let by_ufa = count != RunCount::Zero;
        let by_predicate = ms.contains_length(&BigUint::from(l))?;
        let by_sweep = lang_run.run_direct(l)?.accepted;
        let by_comp = comp_run.run_direct(l)?.accepted;
        let by_flip = flip_run.run_direct(l)?.accepted;
        if !(by_ufa == by_predicate
            && by_ufa == by_sweep
            && by_comp == !by_ufa
            && by_flip == by_comp)
        {
            first_failure(&mut witness, json!({ "length": l, "route": "window" }));
        }
        if l.is_multiple_of(97) {
            residue_mode_checked += 1;
            if lang_run.run_by_residues(&BigUint::from(l))?.accepted != by_sweep {
                first_failure(
                    &mut witness,
                    json!({ "length": l, "route": "residue_mode" }),
                );
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let bits = 4 * ms.primes_product().bits() + 64;
    let mut big_accepted = 0u64;
    for _ in 0..opts.big_samples {
        let len = rng.gen_biguint(bits);
        let by_ufa = evaluator.accepts_by_matrix_power(&len);
        let by_predicate = ms.contains_length(&len)?;
        let by_sweep = lang_run.run(&len)?.accepted;
        let by_comp = comp_run.run(&len)?.accepted;
        let by_flip = flip_run.run(&len)?.accepted;
        if !(by_ufa == by_predicate
            && by_ufa == by_sweep
            && by_comp == !by_ufa
            && by_flip == by_comp)
        {
            first_failure(
                &mut witness,
                json!({ "length": decimal(&len), "route": "big" }),
            );
        }
        big_accepted += by_ufa as u64;
    }

    Ok(Verdict::new(
        "automata_equivalence",
        instance_json(ms),
        witness.is_null(),
        witness,
        json!({
            "ufa_states": ufa.nfa.states(),
            "swdfa_states": lang.state_count(),
            "window": opts.window,
            "residue_mode_checked": residue_mode_checked,
            "big_samples": opts.big_samples,
            "big_sample_bits": bits,
            "big_accepted": big_accepted,
            "sample_seed": opts.seed,
        }),
    ))
}

fn random_nfa(rng: &mut ChaCha8Rng) -> UnaryNfa {
    let states = rng.gen_range(1..=30);
    let accepting: Vec<usize> = (0..states).filter(|_| rng.gen_bool(0.3)).collect();
    let mut transitions = Vec::new();
    for s in 0..states {
        for _ in 0..rng.gen_range(0..=3) {
            transitions.push((s, rng.gen_range(0..states)));
        }
    }
    UnaryNfa::new(states, 0, accepting, transitions).expect("indices in range")
}

/// Stepping and matrix-power evaluation agree on random small NFAs, both
/// for membership and for saturated run counts.
pub fn check_evaluator_agreement(automata: usize, max_len: u64, seed: u64) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut witness = Value::Null;
    let mut accepted = 0u64;
    for index in 0..automata {
        let nfa = random_nfa(&mut rng);
        let mut evaluator = NfaEvaluator::new(&nfa);
        let stepped = evaluator.run_counts_by_stepping(max_len);
        for (len, &count) in stepped.iter().enumerate() {
            let l = BigUint::from(len);
            let member = evaluator.accepts_by_matrix_power(&l);
            let by_power = evaluator.count_accepting_runs(&l);
            if member != (count != RunCount::Zero) || by_power != count {
                first_failure(&mut witness, json!({ "automaton": index, "length": len }));
            }
            accepted += member as u64;
        }
        for len in (0..=max_len).step_by(1009) {
            if nfa.accepts_by_stepping(len) != (stepped[len as usize] != RunCount::Zero) {
                first_failure(
                    &mut witness,
                    json!({ "automaton": index, "length": len, "route": "sets" }),
                );
            }
        }
    }
    Verdict::new(
        "nfa_evaluators",
        json!({ "automata": automata, "max_len": max_len, "seed": seed }),
        witness.is_null(),
        witness,
        json!({ "accepted_pairs": accepted }),
    )
}

fn positive_length(ms: &ModuliSystem, t: BigUint) -> BigUint {
    if t.is_zero() {
        ms.primes_product().clone()
    } else {
        t
    }
}

/// Minimal period of the language. Every essential prime is confirmed by
/// a pair of lengths that differ only modulo that prime and disagree on
/// membership; the period itself is confirmed on random lengths.
pub fn check_minimal_period(
    ms: &ModuliSystem,
    opts: &AutomataOptions,
) -> Result<Verdict, VerificationError> {
    let lang = UfaLanguage::new(ms);
    let report = minimal_period(ms, &lang, opts.period_domain_limit)?;
    let mut witness = Value::Null;
    let mut witnesses = Vec::new();
    for w in &report.witnesses {
        let mut flipped = w.vector.clone();
        flipped.0[w.index] = w.alternate;
        let a = positive_length(ms, ms.crt_reconstruct(&w.vector)?);
        let b = positive_length(ms, ms.crt_reconstruct(&flipped)?);
        let (ma, mb) = (ms.contains_length(&a)?, ms.contains_length(&b)?);
        if ma == mb {
            first_failure(
                &mut witness,
                json!({ "prime": ms.prime(w.index), "route": "flip" }),
            );
        }
        witnesses.push(json!({
            "prime": ms.prime(w.index),
            "residues": w.vector,
            "alternate": w.alternate,
            "lengths": [decimal(&a), decimal(&b)],
            "members": [ma, mb],
        }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.samples {
        let len = rng.gen_biguint_below(ms.primes_product()) + BigUint::one();
        if ms.contains_length(&len)? != ms.contains_length(&(&len + &report.period))? {
            first_failure(
                &mut witness,
                json!({ "length": decimal(&len), "route": "shift" }),
            );
        }
    }
    let inessential: Vec<usize> = (0..ms.prime_count())
        .filter(|j| !report.essential.contains(j))
        .collect();
    Ok(Verdict::new(
        "minimal_period",
        instance_json(ms),
        witness.is_null(),
        json!({ "essential": witnesses }),
        json!({
            "preperiod": report.preperiod,
            "period": decimal(&report.period),
            "essential_primes": prime_values(ms, &report.essential),
            "inessential_primes": prime_values(ms, &inessential),
            "shift_samples": opts.samples,
            "sample_seed": opts.seed,
        }),
    ))
}

/// The automata suite: unambiguity, equivalence, evaluator agreement on
/// random NFAs, and the minimal period.
pub fn check_automata(
    ms: &ModuliSystem,
    opts: &AutomataOptions,
) -> Result<Vec<Verdict>, VerificationError> {
    Ok(vec![
        check_ufa_unambiguity(ms, opts)?,
        check_equivalence(ms, opts)?,
        check_evaluator_agreement(50, opts.window, opts.seed),
        check_minimal_period(ms, opts)?,
    ])
}
