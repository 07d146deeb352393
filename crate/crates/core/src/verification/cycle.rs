//! Classification of a candidate cycle length for an automaton that
//! accepts the complement language.

use num_bigint::BigUint;
use num_traits::Zero;
use serde_json::{json, Value};

use super::{decimal, instance_json, prime_values, Verdict, VerificationError};
use crate::automata::{NfaEvaluator, UnaryNfa};
use crate::residue::ModuliSystem;

/// A squarefree `m` over P is either non-blocking, refuted by an explicit
/// accepted multiple of `m`, or blocking, in which case its divisor count
/// is compared with the bound for `k`. When `ufa` is given, the certificate
/// is also run through the explicit automaton by matrix powers.
pub fn check_cycle_argument(
    ms: &ModuliSystem,
    candidate: &BigUint,
    k: usize,
    ufa: Option<&UnaryNfa>,
) -> Result<Verdict, VerificationError> {
    let m = ms.subset_of(candidate)?;
    let divisors = m.count();
    let census = json!({
        "candidate": decimal(candidate),
        "candidate_primes": prime_values(ms, &m.indices()),
        "divisors": divisors,
        "k": k,
    });
    let accepting_vertex =
        (1..=ms.n()).find(|&i| ms.acceptable_raw(&ms.witness_residues(&m, i).0, i));
    let Some(vertex) = accepting_vertex else {
        let bound = ms.lemma9_bound(k);
        return Ok(Verdict::new(
            "cycle_argument",
            instance_json(ms),
            divisors >= bound,
            json!({ "classification": "blocking", "divisors": divisors, "bound": bound }),
            census,
        ));
    };
    let multiple = ms.crt_reconstruct(&ms.witness_residues(&m, vertex))?;
    let divides = (&multiple % candidate).is_zero();
    let by_predicate = ms.accepted_by(&ms.residues_of(&multiple))? == Some(vertex);
    let by_ufa = ufa.map(|a| NfaEvaluator::new(a).accepts_by_matrix_power(&multiple));
    let pass = divides && by_predicate && !multiple.is_zero() && by_ufa.unwrap_or(true);
    Ok(Verdict::new(
        "cycle_argument",
        instance_json(ms),
        pass,
        json!({
            "classification": "non_blocking",
            "multiple": decimal(&multiple),
            "quotient": decimal(&(&multiple / candidate)),
            "vertex": vertex,
            "accepted_by_ufa": by_ufa.map_or(Value::Null, Value::Bool),
        }),
        census,
    ))
}
