//! Uniqueness of the accepting vertex, the divisor bound for blocking cycle
//! lengths, and the disjoint controlled edges behind that bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{instance_json, prime_values, Verdict, VerificationError};
use crate::residue::{ModuliSystem, PrimeSubset, ResidueVector, SystemError};
use crate::tournament::smallest_inbound_covering;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lemma8Options {
    /// Pairs whose prime union is at most this large are enumerated.
    pub exhaustive_limit: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for Lemma8Options {
    fn default() -> Self {
        Lemma8Options {
            exhaustive_limit: 12,
            samples: 10_000,
            seed: 0,
        }
    }
}

/// Residue vector with `values[t]` at `union[t]` and zero elsewhere.
fn spread(ms: &ModuliSystem, union: &[usize], values: &[u64]) -> Vec<u64> {
    let mut full = vec![0u64; ms.prime_count()];
    for (&j, &v) in union.iter().zip(values) {
        full[j] = v;
    }
    full
}

/// Union of the primes of `m_i` and `m_j`, ascending.
fn pair_union(ms: &ModuliSystem, i: usize, j: usize) -> Vec<usize> {
    let mut union: Vec<usize> = ms.owned(i).iter().chain(ms.owned(j)).copied().collect();
    union.sort_unstable();
    union.dedup();
    union
}

/// Searches `{0, i, j}^union` for a vector acceptable for both vertices.
fn exhaustive_pair(
    ms: &ModuliSystem,
    i: usize,
    j: usize,
    union: &[usize],
) -> (Option<Vec<u64>>, u64) {
    let labels = [0, i as u64, j as u64];
    let mut digits = vec![0usize; union.len()];
    let mut enumerated = 0u64;
    loop {
        enumerated += 1;
        let values: Vec<u64> = digits.iter().map(|&d| labels[d]).collect();
        let full = spread(ms, union, &values);
        if ms.acceptable_raw(&full, i) && ms.acceptable_raw(&full, j) {
            return (Some(values), enumerated);
        }
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                return (None, enumerated);
            }
            digits[pos] += 1;
            if digits[pos] < 3 {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// Any vector acceptable for both `i` and `j` is zero on their shared
/// primes, `i` or zero on the rest of `m_i` and `j` or zero on the rest of
/// `m_j`. Raising zeros to the label only helps conditions (2) and (3), so
/// the maximal such vector is acceptable for both iff some vector is.
fn symbolic_pair(ms: &ModuliSystem, i: usize, j: usize, union: &[usize]) -> Option<Vec<u64>> {
    let values: Vec<u64> = union
        .iter()
        .map(
            |&p| match (ms.owned(i).contains(&p), ms.owned(j).contains(&p)) {
                (true, true) => 0,
                (true, false) => i as u64,
                _ => j as u64,
            },
        )
        .collect();
    let full = spread(ms, union, &values);
    (ms.acceptable_raw(&full, i) && ms.acceptable_raw(&full, j)).then_some(values)
}

fn random_vector(ms: &ModuliSystem, rng: &mut ChaCha8Rng, biased: bool) -> ResidueVector {
    let n = ms.n() as u64;
    ResidueVector(
        (0..ms.prime_count())
            .map(|j| {
                if biased {
                    rng.gen_range(0..=n)
                } else {
                    rng.gen_range(0..ms.prime(j))
                }
            })
            .collect(),
    )
}

/// No residue vector is acceptable for two vertices. Each oriented pair is
/// decided by the symbolic argument and, when its prime union is small, by
/// enumerating `{0, i, j}^union`; the two routes must agree. Random full
/// vectors (half uniform, half drawn from `{0, 1..n}`) go through
/// [`ModuliSystem::accepted_by`], and the zero vector must be rejected.
pub fn check_lemma8(ms: &ModuliSystem, opts: &Lemma8Options) -> Verdict {
    let mut pass = true;
    let mut witness = Value::Null;
    let mut pairs = Vec::new();
    let mut assignments = 0u64;
    for (i, j) in ms.tournament().edges() {
        let union = pair_union(ms, i, j);
        let symbolic = symbolic_pair(ms, i, j, &union);
        let exhaustive = (union.len() <= opts.exhaustive_limit).then(|| {
            let (found, count) = exhaustive_pair(ms, i, j, &union);
            assignments += count;
            found
        });
        let agree = exhaustive
            .as_ref()
            .is_none_or(|e| e.is_some() == symbolic.is_some());
        if pass
            && (!agree || symbolic.is_some() || exhaustive.as_ref().is_some_and(Option::is_some))
        {
            pass = false;
            let values = symbolic.clone().or_else(|| exhaustive.clone().flatten());
            witness = json!({
                "pair": [i, j],
                "primes": prime_values(ms, &union),
                "assignment": values,
                "routes_agree": agree,
            });
        }
        pairs.push(json!({
            "pair": [i, j],
            "union_size": union.len(),
            "symbolic": if symbolic.is_some() { "both_acceptable" } else { "exclusive" },
            "exhaustive": exhaustive.map(|e| if e.is_some() { "both_acceptable" } else { "exclusive" }),
        }));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut per_vertex = vec![0u64; ms.n() + 1];
    for s in 0..opts.samples {
        let rv = random_vector(ms, &mut rng, s % 2 == 1);
        match ms.accepted_by(&rv) {
            Ok(Some(v)) => per_vertex[v] += 1,
            Ok(None) => per_vertex[0] += 1,
            Err(SystemError::Ambiguous(a, b)) => {
                if pass {
                    pass = false;
                    witness = json!({ "sample": rv, "vertices": [a, b] });
                }
            }
            Err(e) => unreachable!("sampled vectors are in range: {e}"),
        }
    }
    let zero = ResidueVector::constant(ms.prime_count(), 0);
    let zero_rejected = matches!(ms.accepted_by(&zero), Ok(None));
    if pass && !zero_rejected {
        pass = false;
        witness = json!({ "zero_vector_accepted": true });
    }
    Verdict::new(
        "lemma8",
        instance_json(ms),
        pass,
        witness,
        json!({
            "pairs": pairs,
            "assignments_enumerated": assignments,
            "samples": opts.samples,
            "sample_seed": opts.seed,
            "samples_rejected": per_vertex[0],
            "samples_accepted_by_vertex": &per_vertex[1..],
            "zero_vector_rejected": zero_rejected,
        }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lemma9Options {
    /// Up to this many primes every subset is enumerated.
    pub exhaustive_limit: usize,
    /// Subsets drawn otherwise.
    pub samples: usize,
    pub seed: u64,
}

impl Default for Lemma9Options {
    fn default() -> Self {
        Lemma9Options {
            exhaustive_limit: 20,
            samples: 4096,
            seed: 0,
        }
    }
}

fn certify(ms: &ModuliSystem, k: usize) -> Result<(), VerificationError> {
    if k == 0 {
        return Ok(());
    }
    if let Some(cover) = smallest_inbound_covering(ms.tournament(), k)? {
        return Err(VerificationError::NotCertified { k, cover });
    }
    Ok(())
}

/// Random subset: the shared primes of a random set of edges, plus a
/// sprinkling of other primes.
fn biased_subset(ms: &ModuliSystem, edges: &[(usize, usize)], rng: &mut ChaCha8Rng) -> PrimeSubset {
    let mut subset = PrimeSubset::empty(ms.prime_count());
    let keep: f64 = rng.gen();
    for &(i, v) in edges {
        if rng.gen_bool(keep) {
            for &j in ms.shared_indices(i, v) {
                subset.insert(j);
            }
        }
    }
    let extra: f64 = rng.gen_range(0.0..0.2);
    for j in 0..ms.prime_count() {
        if rng.gen_bool(extra) {
            subset.insert(j);
        }
    }
    subset
}

/// Every blocking squarefree `m` has at least `lemma9_bound(k)` prime
/// divisors. Exhaustive over all `2^N` subsets when `N` is small, sampled
/// otherwise. Refuses tournaments not certified for `k`.
pub fn check_lemma9(
    ms: &ModuliSystem,
    k: usize,
    opts: &Lemma9Options,
) -> Result<Verdict, VerificationError> {
    certify(ms, k)?;
    let count = ms.prime_count();
    let bound = ms.lemma9_bound(k);
    let exhaustive = count <= opts.exhaustive_limit;
    let candidates: Box<dyn Iterator<Item = PrimeSubset>> = if exhaustive {
        Box::new((0..1u64 << count).map(move |mask| PrimeSubset::from_mask(count, mask)))
    } else {
        let edges = ms.tournament().edges();
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let drawn: Vec<PrimeSubset> = (0..opts.samples)
            .map(|_| biased_subset(ms, &edges, &mut rng))
            .collect();
        Box::new(std::iter::once(PrimeSubset::full(count)).chain(drawn))
    };

    let mut examined = 0u64;
    let mut blocking = 0u64;
    let mut histogram = vec![0u64; count + 1];
    let mut smallest: Option<PrimeSubset> = None;
    let mut violation: Option<PrimeSubset> = None;
    for subset in candidates {
        examined += 1;
        if !ms.is_blocking(&subset) {
            continue;
        }
        blocking += 1;
        let size = subset.count();
        histogram[size] += 1;
        if smallest.as_ref().is_none_or(|s| size < s.count()) {
            smallest = Some(subset.clone());
        }
        if size < bound && violation.is_none() {
            violation = Some(subset);
        }
    }
    let full_blocking = ms.is_blocking(&PrimeSubset::full(count));
    let pass = violation.is_none() && full_blocking;
    let witness = match &violation {
        Some(s) => {
            json!({ "violating_subset": prime_values(ms, &s.indices()), "divisors": s.count() })
        }
        None => Value::Null,
    };
    Ok(Verdict::new(
        "lemma9",
        instance_json(ms),
        pass,
        witness,
        json!({
            "k": k,
            "bound": bound,
            "bound_as_printed": ms.lemma9_bound_as_printed(k),
            "route": if exhaustive { "exhaustive" } else { "sampled" },
            "sample_seed": (!exhaustive).then_some(opts.seed),
            "subsets_examined": examined,
            "blocking": blocking,
            "blocking_by_divisor_count": histogram,
            "min_divisors": smallest.as_ref().map(PrimeSubset::count),
            "smallest_blocking_example": smallest.map(|s| prime_values(ms, &s.indices())),
            "full_product_blocking": full_blocking,
        }),
    ))
}

/// Greedy extraction of `ceil(k/2)` vertex-disjoint controlled edges for a
/// blocking `m`: repeatedly take the smallest vertex outside the picked
/// endpoints with no edge into them, then its smallest controlled
/// out-edge. At most `k` endpoints are picked before each step, so such a
/// vertex exists when no `k` vertices are inbound-covering; it cannot
/// accept its witness, so one of its out-edges is controlled, and that
/// edge avoids the picked endpoints.
pub fn check_independent_edge_extraction(
    ms: &ModuliSystem,
    m: &PrimeSubset,
    k: usize,
) -> Result<Verdict, VerificationError> {
    if m.len() != ms.prime_count() {
        return Err(SystemError::VectorLength {
            got: m.len(),
            expected: ms.prime_count(),
        }
        .into());
    }
    if !ms.is_blocking(m) {
        return Err(VerificationError::NotBlocking);
    }
    certify(ms, k)?;
    let t = ms.tournament();
    let controlled = ms.controlled_edges(m);
    let wanted = k.div_ceil(2);
    let mut picked: Vec<(usize, usize)> = Vec::new();
    let mut used = vec![false; ms.n() + 1];
    while picked.len() < wanted {
        let next = (1..=ms.n())
            .filter(|&v| !used[v])
            .filter(|&v| (1..=ms.n()).all(|u| !used[u] || !t.points_to(v, u)))
            .find_map(|v| controlled.iter().copied().find(|&(s, _)| s == v));
        match next {
            Some((v, u)) if !used[u] => {
                used[v] = true;
                used[u] = true;
                picked.push((v, u));
            }
            _ => return Err(VerificationError::ExtractionStuck { picked }),
        }
    }
    let shared: Vec<Vec<u64>> = picked
        .iter()
        .map(|&(i, v)| prime_values(ms, ms.shared_indices(i, v)))
        .collect();
    Ok(Verdict::new(
        "independent_edge_extraction",
        instance_json(ms),
        true,
        json!({ "edges": picked, "shared_primes": shared }),
        json!({
            "k": k,
            "wanted": wanted,
            "m_primes": prime_values(ms, &m.indices()),
            "controlled_edges": controlled,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::tests::triangle_system;
    use num_bigint::BigUint;

    fn subset(ms: &ModuliSystem, primes: &[u64]) -> PrimeSubset {
        ms.subset_of(&primes.iter().map(|&p| BigUint::from(p)).product())
            .unwrap()
    }

    #[test]
    fn lemma8_on_triangle() {
        let ms = triangle_system();
        let v = check_lemma8(&ms, &Lemma8Options::default());
        assert!(v.pass, "{}", v.to_json());
        assert_eq!(v.census["assignments_enumerated"], 3 * 729);
        for pair in v.census["pairs"].as_array().unwrap() {
            assert_eq!(pair["union_size"], 6);
            assert_eq!(pair["exhaustive"], "exclusive");
        }
    }

    #[test]
    fn lemma9_census_on_triangle() {
        let ms = triangle_system();
        let v = check_lemma9(&ms, 1, &Lemma9Options::default()).unwrap();
        assert!(v.pass);
        assert_eq!(v.census["subsets_examined"], 256);
        assert_eq!(v.census["bound"], 2);
        assert_eq!(v.census["min_divisors"], 4);
        assert_eq!(v.census["smallest_blocking_example"], json!([5, 7, 11, 17]));
        assert_eq!(v.census["full_product_blocking"], true);
    }

    #[test]
    fn lemma9_refuses_uncertified_k() {
        let ms = triangle_system();
        assert!(matches!(
            check_lemma9(&ms, 2, &Lemma9Options::default()),
            Err(VerificationError::NotCertified { k: 2, .. })
        ));
    }

    #[test]
    fn extraction_on_triangle() {
        let ms = triangle_system();
        let m = subset(&ms, &[5, 7, 11, 17]);
        let v = check_independent_edge_extraction(&ms, &m, 1).unwrap();
        let edges: Vec<(usize, usize)> =
            serde_json::from_value(v.witness["edges"].clone()).unwrap();
        assert_eq!(edges.len(), 1);
        assert!(ms.controlled_edges(&m).contains(&edges[0]));
        let none = check_independent_edge_extraction(&ms, &m, 0).unwrap();
        assert_eq!(none.witness["edges"], json!([]));
        let open = subset(&ms, &[5, 17]);
        assert_eq!(
            check_independent_edge_extraction(&ms, &open, 1),
            Err(VerificationError::NotBlocking)
        );
    }
}
