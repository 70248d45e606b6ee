//! Linear smallest-prime-factor sieve.

use crate::error::{invalid, try_alloc, Result};

/// Largest supported sieve limit. Indices are stored as `u32`.
pub const MAX_SIEVE_LIMIT: u64 = 200_000_000;

/// Smallest-prime-factor table on `[0, limit]` with the primes in ascending order.
///
/// `spf[0]` and `spf[1]` are 0; for `n >= 2`, `spf[n]` is the least prime
/// dividing `n`. Memory is `4 * (limit + 1)` bytes plus the prime list, so
/// `limit = 10^7` needs roughly 42 MB.
#[derive(Clone, Debug)]
pub struct SieveIndex {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl SieveIndex {
    pub fn new(limit: u64) -> Result<Self> {
        build_sieve(limit)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Primes `<= bound`.
    pub fn primes_up_to(&self, bound: u64) -> &[u32] {
        let end = self.primes.partition_point(|&p| (p as u64) <= bound);
        &self.primes[..end]
    }

    #[inline]
    pub fn spf(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    pub fn spf_table(&self) -> &[u32] {
        &self.spf
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.spf(n) == n
    }

    /// Factorization of `n` as ascending `(p, e)` pairs by repeated spf division.
    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        assert!(n >= 1 && n <= self.limit, "factorize: {n} outside sieve range");
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf(n);
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }
}

pub fn build_sieve(limit: u64) -> Result<SieveIndex> {
    if limit < 2 {
        return Err(invalid(format!("sieve limit must be at least 2, got {limit}")));
    }
    if limit > MAX_SIEVE_LIMIT {
        return Err(invalid(format!(
            "sieve limit {limit} exceeds the supported maximum {MAX_SIEVE_LIMIT}"
        )));
    }
    let n = limit as usize;
    let mut spf: Vec<u32> = try_alloc(n + 1, 0u32, "smallest-prime-factor table")?;
    // pi(x) < 1.26 x / ln x for x > 1
    let estimate = ((1.26 * limit as f64) / (limit as f64).ln()) as usize + 8;
    let mut primes: Vec<u32> = Vec::new();
    primes
        .try_reserve(estimate)
        .map_err(|_| crate::Error::Resource {
            what: "prime list",
            required_bytes: estimate * 4,
        })?;

    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            if p > si {
                break;
            }
            let m = i * p as usize;
            if m > n {
                break;
            }
            spf[m] = p;
        }
    }
    Ok(SieveIndex { limit, spf, primes })
}

/// Trial-division primality test for one-off queries outside any sieve.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}
