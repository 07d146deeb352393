//! Prime sets for the residue construction.
//!
//! Two selection modes exist. `Cluster` looks for `N` primes within a
//! factor `1 + 1/N` of each other below `4 N^2 ln N`, by scanning windows of
//! length `3 N ln N` across `[3 N^2 ln N, 4 N^2 ln N]`. That is only
//! guaranteed for large `N`, so `Desk` mode takes the `N` smallest primes
//! above a floor instead.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PrimeError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("primes must be strictly increasing ({0} then {1})")]
    NotIncreasing(u64, u64),
    #[error("prime set is empty")]
    Empty,
    #[error("cluster ratio {high}/{low} exceeds 1 + 1/{count}")]
    RatioTooWide { low: u64, high: u64, count: usize },
    #[error("largest prime {high} exceeds 4 N^2 ln N = {limit:.1}")]
    AboveLimit { high: u64, limit: f64 },
    #[error("cluster size must be at least 2, got {0}")]
    ClusterTooSmall(usize),
    #[error("no cluster of {count} primes: {census}")]
    ClusterNotFound { count: usize, census: ClusterCensus },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimeMode {
    Cluster,
    Desk,
}

/// Ordered distinct primes `P_0 < P_1 < ... < P_{N-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PrimeSetWire")]
pub struct PrimeSet {
    mode: PrimeMode,
    primes: Vec<u64>,
}

#[derive(Deserialize)]
struct PrimeSetWire {
    mode: PrimeMode,
    primes: Vec<u64>,
}

impl TryFrom<PrimeSetWire> for PrimeSet {
    type Error = PrimeError;
    fn try_from(wire: PrimeSetWire) -> Result<Self, PrimeError> {
        PrimeSet::new(wire.mode, wire.primes)
    }
}

impl PrimeSet {
    /// Validates primality and ordering, plus the cluster bounds in
    /// `Cluster` mode.
    pub fn new(mode: PrimeMode, primes: Vec<u64>) -> Result<Self, PrimeError> {
        if primes.is_empty() {
            return Err(PrimeError::Empty);
        }
        if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(PrimeError::NotPrime(p));
        }
        if let Some(w) = primes.windows(2).find(|w| w[0] >= w[1]) {
            return Err(PrimeError::NotIncreasing(w[0], w[1]));
        }
        if mode == PrimeMode::Cluster {
            check_cluster(&primes)?;
        }
        Ok(PrimeSet { mode, primes })
    }

    pub fn mode(&self) -> PrimeMode {
        self.mode
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn get(&self, index: usize) -> u64 {
        self.primes[index]
    }
}

fn check_cluster(primes: &[u64]) -> Result<(), PrimeError> {
    let count = primes.len();
    let (low, high) = (primes[0], primes[count - 1]);
    // high / low <= 1 + 1/N  <=>  high * N <= low * (N + 1)
    if high as u128 * count as u128 > low as u128 * (count as u128 + 1) {
        return Err(PrimeError::RatioTooWide { low, high, count });
    }
    let limit = cluster_interval(count).1;
    if count >= 2 && high as f64 > limit {
        return Err(PrimeError::AboveLimit { high, limit });
    }
    Ok(())
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// All primes `<= limit`, ascending (sieve of Eratosthenes over odd numbers).
pub fn sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    // composite[i] stands for the odd number 2i + 1
    let half = limit / 2 + 1;
    let mut composite = vec![false; half];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = vec![2];
    primes.extend(
        (1..half)
            .filter(|&i| !composite[i] && 2 * i < limit)
            .map(|i| (2 * i + 1) as u64),
    );
    primes
}

/// `(3 N^2 ln N, 4 N^2 ln N, 3 N ln N)`: the search interval and window length.
pub fn cluster_interval(count: usize) -> (f64, f64) {
    let n = count as f64;
    (3.0 * n * n * n.ln(), 4.0 * n * n * n.ln())
}

pub fn cluster_window(count: usize) -> f64 {
    let n = count as f64;
    3.0 * n * n.ln()
}

/// What the window scan saw; attached to failures and available on success.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterCensus {
    pub interval_low: f64,
    pub interval_high: f64,
    pub window: f64,
    pub primes_in_interval: usize,
    pub densest_start: Option<u64>,
    pub densest_count: usize,
}

impl std::fmt::Display for ClusterCensus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} primes in [{:.2}, {:.2}]; densest window of length {:.2} ",
            self.primes_in_interval, self.interval_low, self.interval_high, self.window
        )?;
        match self.densest_start {
            Some(s) => write!(f, "starts at {s} with {} primes", self.densest_count),
            None => write!(f, "is empty"),
        }
    }
}

/// Scans windows `[p, p + 3 N ln N]` anchored at each prime `p` of the
/// interval (truncated at its upper end) and reports the densest, lowest
/// first on ties.
pub fn cluster_census(count: usize) -> (ClusterCensus, Vec<u64>) {
    let (low, high) = cluster_interval(count);
    let window = cluster_window(count);
    let candidates: Vec<u64> = sieve(high.floor() as u64)
        .into_iter()
        .filter(|&p| p as f64 >= low)
        .collect();
    let mut best: Option<(usize, usize)> = None; // (start index, count)
    let mut end = 0;
    for start in 0..candidates.len() {
        let reach = candidates[start] as f64 + window;
        end = end.max(start);
        while end < candidates.len() && candidates[end] as f64 <= reach {
            end += 1;
        }
        let here = end - start;
        if best.is_none_or(|(_, c)| here > c) {
            best = Some((start, here));
        }
    }
    let census = ClusterCensus {
        interval_low: low,
        interval_high: high,
        window,
        primes_in_interval: candidates.len(),
        densest_start: best.map(|(s, _)| candidates[s]),
        densest_count: best.map_or(0, |(_, c)| c),
    };
    let chosen = match best {
        Some((start, c)) => candidates[start..start + c].to_vec(),
        None => Vec::new(),
    };
    (census, chosen)
}

/// `N` primes from the densest window, if it holds at least `N`.
pub fn select_cluster(count: usize) -> Result<PrimeSet, PrimeError> {
    if count < 2 {
        return Err(PrimeError::ClusterTooSmall(count));
    }
    let (census, window) = cluster_census(count);
    if window.len() < count {
        return Err(PrimeError::ClusterNotFound { count, census });
    }
    PrimeSet::new(PrimeMode::Cluster, window[..count].to_vec())
}

/// The `N` smallest primes strictly greater than `floor`.
pub fn select_desk(count: usize, floor: u64) -> PrimeSet {
    let primes: Vec<u64> = (floor + 1..).filter(|&p| is_prime(p)).take(count).collect();
    PrimeSet::new(PrimeMode::Desk, primes).expect("consecutive primes form a valid set")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(sieve(2), vec![2]);
        assert_eq!(sieve(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(sieve(1).is_empty());
        let tail = sieve(600);
        assert_eq!(
            &tail[tail.len() - 12..],
            &[521, 523, 541, 547, 557, 563, 569, 571, 577, 587, 593, 599]
        );
    }

    #[test]
    fn sieve_matches_trial_division() {
        let expected: Vec<u64> = (0..5000).filter(|&n| trial_division(n)).collect();
        assert_eq!(sieve(4999), expected);
        assert!((0..5000).all(|n| is_prime(n) == trial_division(n)));
    }

    #[test]
    fn miller_rabin_on_large_values() {
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert!(!is_prime(u64::MAX));
    }

    #[test]
    fn cluster_of_eight() {
        let set = select_cluster(8).unwrap();
        let (low, high) = cluster_interval(8);
        assert_eq!(set.len(), 8);
        assert!(set
            .primes()
            .iter()
            .all(|&p| p as f64 >= low && p as f64 <= high));
        let ratio = set.get(7) as f64 / set.get(0) as f64;
        assert!(ratio <= 1.125);
        assert!((low - 399.25).abs() < 0.01 && (high - 532.33).abs() < 0.01);
        assert_eq!(set.primes(), &[419, 421, 431, 433, 439, 443, 449, 457]);
        let (census, window) = cluster_census(8);
        assert_eq!((census.primes_in_interval, census.densest_count), (21, 11));
        assert_eq!(window.len(), 11);
    }

    #[test]
    fn window_479_to_523_is_a_valid_cluster() {
        let primes = vec![479, 487, 491, 499, 503, 509, 521, 523];
        let set = PrimeSet::new(PrimeMode::Cluster, primes).unwrap();
        assert!((523.0f64 / 479.0 - 1.0918).abs() < 1e-3);
        assert_eq!(set.mode(), PrimeMode::Cluster);
    }

    #[test]
    fn cluster_of_sixteen_fixture() {
        let set = select_cluster(16).unwrap();
        assert_eq!(
            set.primes(),
            &[
                2671, 2677, 2683, 2687, 2689, 2693, 2699, 2707, 2711, 2713, 2719, 2729, 2731, 2741,
                2749, 2753
            ]
        );
    }

    #[test]
    fn cluster_of_two_fails_with_census() {
        match select_cluster(2) {
            Err(PrimeError::ClusterNotFound { census, .. }) => {
                assert_eq!(census.primes_in_interval, 1);
                assert_eq!(census.densest_start, Some(11));
                assert_eq!(census.densest_count, 1);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn prime_count_within_factor_two_of_half_n_squared() {
        for count in [8usize, 16, 32, 64] {
            if select_cluster(count).is_ok() {
                let (census, _) = cluster_census(count);
                let expected = (count * count) as f64 / 2.0;
                let got = census.primes_in_interval as f64;
                assert!(
                    got >= expected / 2.0 && got <= expected * 2.0,
                    "N={count}: {got}"
                );
            }
        }
    }

    #[test]
    fn desk_examples() {
        assert_eq!(select_desk(8, 3).primes(), &[5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(select_desk(1, 1).primes(), &[2]);
        assert_eq!(select_desk(3, 10).primes(), &[11, 13, 17]);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            PrimeSet::new(PrimeMode::Desk, vec![4]),
            Err(PrimeError::NotPrime(4))
        );
        assert_eq!(
            PrimeSet::new(PrimeMode::Desk, vec![5, 3]),
            Err(PrimeError::NotIncreasing(5, 3))
        );
        assert!(matches!(
            PrimeSet::new(PrimeMode::Cluster, vec![5, 7, 11]),
            Err(PrimeError::RatioTooWide { .. })
        ));
    }

    #[test]
    fn json_shape() {
        let set = select_desk(3, 10);
        let json = serde_json::to_string(&set).unwrap();
        assert_eq!(json, r#"{"mode":"desk","primes":[11,13,17]}"#);
        assert!(serde_json::from_str::<PrimeSet>(r#"{"mode":"desk","primes":[11,12]}"#).is_err());
    }
}
