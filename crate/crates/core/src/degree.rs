//! Degree-`d` functions `f = f_1 * ... * f_d` with completely multiplicative
//! unit-disc constituents: the coefficients `alpha_k(f, p)`, the `d`-term
//! recursion they satisfy, and the checks built on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dirichlet::determinant_sequence;
use crate::error::{invalid, Result};
use crate::metrics::cutoff_grid;
use crate::sieve::SieveIndex;
use crate::spec::{FunctionSpec, ONE, ZERO};
use crate::symmetric::{identity_residuals, q_to_r};
use crate::table::ValueTable;

/// Upper end of the supported degree.
pub const MAX_DEGREE: usize = 16;
/// Number of terms kept in the tail `sum_{n > d}` of the extension check.
pub const EXTENSION_TAIL_TERMS: u32 = 60;

/// `q_k = f(p^k)`, the elementary values `r_k` solved from them, and
/// `alpha = (1, r_1, ..., r_d)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricCoeffs {
    pub p: u64,
    pub q: Vec<Complex64>,
    pub r: Vec<Complex64>,
    pub alpha: Vec<Complex64>,
}

impl SymmetricCoeffs {
    /// Largest residual of `sum_{j=0}^k (-1)^j r_{k-j} q_j = 0`, `1 <= k <= d`.
    pub fn identity_residual(&self) -> f64 {
        identity_residuals(&self.q, &self.r).into_iter().fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

fn declared_degree(f: &FunctionSpec) -> Result<usize> {
    let d = f
        .degree()
        .ok_or_else(|| invalid(format!("`{}` has no declared degree", f.name)))?;
    if d == 0 || d > MAX_DEGREE {
        return Err(invalid(format!("degree {d} outside 1..={MAX_DEGREE}")));
    }
    Ok(d)
}

/// Coefficients at `p` for `f` of declared degree `d`.
pub fn alpha_coeffs(f: &FunctionSpec, p: u64) -> Result<SymmetricCoeffs> {
    let d = declared_degree(f)?;
    alpha_coeffs_with_degree(f, p, d)
}

/// As [`alpha_coeffs`] with the degree supplied by the caller, which allows
/// probing functions outside the class.
pub fn alpha_coeffs_with_degree(f: &FunctionSpec, p: u64, d: usize) -> Result<SymmetricCoeffs> {
    let local = f.local_series(p, d as u32)?;
    let q = local[1..].to_vec();
    let r = q_to_r(&q);
    let mut alpha = Vec::with_capacity(d + 1);
    alpha.push(ONE);
    alpha.extend_from_slice(&r);
    Ok(SymmetricCoeffs { p, q, r, alpha })
}

/// `|sum_{k=0}^d (-1)^k alpha_k f(p^{n+d-k})|` with `d` the declared degree.
pub fn recursion_residual(f: &FunctionSpec, p: u64, n: u32) -> Result<f64> {
    let d = declared_degree(f)?;
    recursion_residual_with_degree(f, p, n, d)
}

pub fn recursion_residual_with_degree(f: &FunctionSpec, p: u64, n: u32, d: usize) -> Result<f64> {
    let coeffs = alpha_coeffs_with_degree(f, p, d)?;
    let local = f.local_series(p, n + d as u32)?;
    let mut acc = ZERO;
    for (k, a) in coeffs.alpha.iter().enumerate() {
        let t = a * local[n as usize + d - k];
        if k % 2 == 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    Ok(acc.norm())
}

/// `max_{k <= kmax} |D_f(k, p)|` split as `(k <= d, d < k <= kmax)`.
pub fn determinant_profile(f: &FunctionSpec, p: u64, d: usize, kmax: u32) -> Result<(f64, f64)> {
    let local = f.local_series(p, kmax.max(1))?;
    let dets = determinant_sequence(&local, kmax);
    let low = dets.iter().take(d + 1).map(|z| z.norm()).fold(0.0, f64::max);
    let high = dets.iter().skip(d + 1).map(|z| z.norm()).fold(0.0, f64::max);
    Ok((low, high))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtensionRow {
    pub p: u64,
    /// `sum_{n <= d} |f(p^n) - g(p^n)| / p^{n beta}`
    pub head: f64,
    /// `sum_{d < n <= d + EXTENSION_TAIL_TERMS} |f(p^n) - g(p^n)| / p^{n beta}`
    pub tail: f64,
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub beta: f64,
    pub d: usize,
    pub p0: u64,
    pub rows: Vec<ExtensionRow>,
    /// Largest tail/head ratio over primes `p >= p0`.
    pub sup_ratio: f64,
    pub sup_prime: Option<u64>,
    /// Primes where the head vanishes but the tail does not.
    pub violations: Vec<u64>,
}

/// Per-prime comparison of the powers beyond `d` with the first `d` powers.
pub fn degreedist_extension_check(
    f: &FunctionSpec,
    g: &FunctionSpec,
    beta: f64,
    sieve: &SieveIndex,
    cutoff: u64,
    p0: u64,
) -> Result<ExtensionReport> {
    if !(beta > 0.0) {
        return Err(invalid(format!("beta must be positive, got {beta}")));
    }
    let d = declared_degree(f)?;
    let dg = declared_degree(g)?;
    if d != dg {
        return Err(invalid(format!("degrees differ: {d} and {dg}")));
    }
    let kmax = d as u32 + EXTENSION_TAIL_TERMS;
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let (mut sup_ratio, mut sup_prime) = (0.0f64, None);
    for &p in sieve.primes_up_to(cutoff) {
        let p = p as u64;
        let fl = f.local_series_unchecked(p, kmax)?;
        let gl = g.local_series_unchecked(p, kmax)?;
        let w = (p as f64).powf(-beta);
        let (mut head, mut tail, mut wn) = (0.0, 0.0, 1.0);
        for n in 1..=kmax as usize {
            wn *= w;
            let t = (fl[n] - gl[n]).norm() * wn;
            if n <= d {
                head += t;
            } else {
                tail += t;
            }
        }
        let ratio = if head > 0.0 {
            Some(tail / head)
        } else {
            if tail > 1e-12 {
                violations.push(p);
            }
            None
        };
        if let Some(r) = ratio {
            if p >= p0 && r > sup_ratio {
                sup_ratio = r;
                sup_prime = Some(p);
            }
        }
        if head > 0.0 || tail > 0.0 {
            rows.push(ExtensionRow { p, head, tail, ratio });
        }
    }
    Ok(ExtensionReport {
        beta,
        d,
        p0,
        rows,
        sup_ratio,
        sup_prime,
        violations,
    })
}

/// Window maxima of `|f(n)| / n^delta` over a geometric grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthDeltaReport {
    pub delta: f64,
    /// Right ends of the windows `(c_{i-1}, c_i]`.
    pub checkpoints: Vec<u64>,
    pub window_max: Vec<f64>,
    /// `max_{n <= c_i} |f(n)| / n^delta`
    pub running_max: Vec<f64>,
    /// Where the overall maximum is attained.
    pub argmax: u64,
    /// Start of the final run over which the window maxima are nonincreasing.
    pub n0: u64,
    /// Whether that final run spans at least two windows.
    pub settled: bool,
}

pub fn growth_delta_check(table: &ValueTable, delta: f64) -> Result<GrowthDeltaReport> {
    if !(delta > 0.0) {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    let checkpoints = cutoff_grid(table.limit());
    let vals = table.as_slice();
    let mut window_max = Vec::with_capacity(checkpoints.len());
    let mut running_max = Vec::with_capacity(checkpoints.len());
    let (mut best, mut argmax) = (f64::NEG_INFINITY, 1u64);
    let mut lo = 1u64;
    for &c in &checkpoints {
        let mut wmax = 0.0f64;
        for n in lo..=c {
            let v = vals[n as usize].norm() / (n as f64).powf(delta);
            if v > wmax {
                wmax = v;
            }
            if v > best {
                best = v;
                argmax = n;
            }
        }
        window_max.push(wmax);
        running_max.push(best);
        lo = c + 1;
    }
    let mut start = window_max.len() - 1;
    while start > 0 && window_max[start - 1] >= window_max[start] {
        start -= 1;
    }
    Ok(GrowthDeltaReport {
        delta,
        n0: checkpoints[start],
        settled: window_max.len() - start >= 2,
        checkpoints,
        window_max,
        running_max,
        argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::*;
    use crate::sieve::build_sieve;
    use crate::table::evaluate;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn random_degree(d: usize, seed: u64) -> FunctionSpec {
        let cs = (0..d as u64).map(|i| random_unit_disc(seed * 16 + i, true)).collect();
        degree_d(cs, format!("rand-deg{d}-{seed}"))
    }

    #[test]
    fn alpha_examples() {
        let d2 = divisor_function(2);
        for p in [2, 3, 97] {
            let a = alpha_coeffs(&d2, p).unwrap();
            assert_eq!(a.q, vec![c(2.0), c(3.0)]);
            assert_eq!(a.alpha, vec![c(1.0), c(2.0), c(1.0)]);
        }
        let chi = dirichlet_character(5, 1).unwrap();
        let a = alpha_coeffs(&chi, 7).unwrap();
        assert_eq!(a.alpha[1], chi.prime_power(7, 1).unwrap());

        let conj = dirichlet_character(5, 3).unwrap();
        assert!((chi.prime_power(2, 1).unwrap().conj() - conj.prime_power(2, 1).unwrap()).norm() < 1e-15);
        let f = degree_d(vec![chi, conj], "chi*chibar");
        for p in [2u64, 3, 7, 11, 13] {
            let a = alpha_coeffs(&f, p).unwrap();
            assert!((a.alpha[2] - ONE).norm() < 1e-12);
        }
        assert_eq!(alpha_coeffs(&f, 5).unwrap().alpha[2], ZERO);
        let json = alpha_coeffs(&divisor_function(2), 3).unwrap().to_json().unwrap();
        assert!(json.starts_with("{\"p\":3,\"q\":[[2.0,0.0],[3.0,0.0]],\"r\":"));
    }

    #[test]
    fn recursion_examples() {
        let d2 = divisor_function(2);
        for n in 0..=10 {
            assert_eq!(recursion_residual(&d2, 5, n).unwrap(), 0.0);
        }
        let chi = dirichlet_character(7, 2).unwrap();
        assert!(recursion_residual(&chi, 11, 4).unwrap() < 1e-15);
        let f = random_degree(3, 4);
        assert!(recursion_residual(&f, 11, 6).unwrap() <= 1e-9);
        assert!(recursion_residual(&standard_spec(Standard::Moebius), 2, 0).is_err());
    }

    #[test]
    fn perturbed_witness_is_detected() {
        use crate::spec::{Kind, PrimePowerTable, Rule, TableDefault};
        let base = random_degree(2, 11);
        let p = 13u64;
        let mut local = base.local_series(p, 8).unwrap();
        local[2] += c(0.1);
        let mut entries = std::collections::BTreeMap::new();
        entries.insert(p, local[1..].to_vec());
        let witness = FunctionSpec::new(
            "perturbed",
            Kind::Tabulated,
            false,
            Rule::Table(PrimePowerTable {
                entries,
                missing_prime: TableDefault::One,
                beyond_length: TableDefault::Error,
            }),
        );
        let r = recursion_residual_with_degree(&witness, p, 1, 2).unwrap();
        assert!(r > 1e-3, "{r}");
    }

    #[test]
    fn determinants_vanish_beyond_degree() {
        let s = build_sieve(100).unwrap();
        for d in 1..=4usize {
            for draw in 0..50u64 {
                let f = random_degree(d, 1000 + draw);
                for &p in s.primes() {
                    let (low, high) = determinant_profile(&f, p as u64, d, d as u32 + 4).unwrap();
                    assert!(high <= 1e-9, "d={d} p={p}: {high}");
                    let envelope = 2f64.powi(d as i32) * (1..=d).product::<usize>() as f64;
                    assert!(low <= envelope);
                }
            }
        }
    }

    #[test]
    fn extension_examples() {
        let s = build_sieve(100_000).unwrap();
        let f = divisor_function(2);
        let r = degreedist_extension_check(&f, &f, 0.5, &s, 1000, 2).unwrap();
        assert!(r.rows.is_empty() && r.violations.is_empty() && r.sup_ratio == 0.0);

        let one = standard_spec(Standard::One);
        let f = degree_d(vec![dirichlet_character(8, 1).unwrap(), one.clone()], "chi1*1");
        let g = degree_d(vec![dirichlet_character(8, 2).unwrap(), one], "chi2*1");
        let r = degreedist_extension_check(&f, &g, 0.6, &s, 100_000, 3).unwrap();
        assert!(r.violations.is_empty());
        assert!(r.sup_ratio.is_finite() && r.sup_ratio < 10.0, "{}", r.sup_ratio);

        let a = random_unit_disc(3, true);
        let b = random_unit_disc(4, true);
        let r = degreedist_extension_check(&a, &b, 0.5, &s, 10_000, 2).unwrap();
        // |a^n - b^n| <= n |a - b| on the unit disc, so the ratio is at most
        // sum_{n >= 2} n p^{-(n-1) beta}, largest at p = 2
        let bound: f64 = (2..=61).map(|n| n as f64 * 2f64.powf(-0.5 * (n - 1) as f64)).sum();
        assert!(r.violations.is_empty() && r.sup_ratio <= bound, "{} > {bound}", r.sup_ratio);
    }

    #[test]
    fn growth_delta_examples() {
        let s = build_sieve(100_000).unwrap();
        let t = evaluate(&random_unit_disc(1, false), &s, 100_000).unwrap();
        let r = growth_delta_check(&t, 0.1).unwrap();
        assert!(r.running_max.iter().all(|&m| m <= 1.0));
        assert!(r.running_max.windows(2).all(|w| w[1] >= w[0]));

        let t = evaluate(&divisor_function(3), &s, 10_000).unwrap();
        assert_eq!(t.get(12), c(18.0));
        let r = growth_delta_check(&t, 0.2).unwrap();
        assert!(r.checkpoints.contains(&r.n0));
        assert!(growth_delta_check(&t, 0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn members_satisfy_recursion(d in 1usize..=5, seed in 0u64..10_000, n in 0u32..12) {
            let f = random_degree(d, seed);
            for p in [2u64, 3, 31, 97] {
                prop_assert!(recursion_residual(&f, p, n).unwrap() <= 1e-9);
                prop_assert!(alpha_coeffs(&f, p).unwrap().identity_residual() <= 1e-10);
            }
        }
    }
}
