//! Pretentious distances and the majorant series built from `h`.
//!
//! Finite partial sums cannot decide convergence. Each report carries a
//! `tail_slope`, the least-squares slope of the partial sums against
//! `log log cutoff` over the upper half of the checkpoints, and a verdict:
//! slope below [`PLATEAU_SLOPE`] reads as a plateau (consistent with
//! convergence), anything else as growing.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sieve::SieveIndex;
use crate::spec::FunctionSpec;
use crate::stats::linear_fit;
use crate::summation::{prefix_sums_at, SummationMode};
use crate::table::{evaluate, ValueTable};

pub const PLATEAU_SLOPE: f64 = 0.01;
/// Truncation of the inner `k`-sums in `H` and `Hhat`.
pub const DEFAULT_INNER_K: u32 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceKind {
    Classic,
    Beta,
    StrongBetaK,
    HSigma,
    HhatYSigma,
    HL2,
    HL1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Plateau,
    Growing,
    Convergent,
    Divergent,
}

/// Convergence status of one prime's inner series in `H` / `Hhat`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrimeConvergence {
    pub prime: u64,
    pub sum: f64,
    /// `t_K / t_{K-1}` for the last two terms, when defined.
    pub last_ratio: Option<f64>,
    /// Geometric tail estimate `t_K r / (1 - r)` when `r < 1`.
    pub tail_bound: Option<f64>,
    pub convergent: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistanceReport {
    pub kind: DistanceKind,
    pub params: BTreeMap<String, f64>,
    pub cutoffs: Vec<u64>,
    pub partials: Vec<f64>,
    pub tail_slope: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_prime: Vec<PrimeConvergence>,
}

impl DistanceReport {
    fn new(kind: DistanceKind, params: &[(&str, f64)], cutoffs: Vec<u64>, partials: Vec<f64>) -> Self {
        let tail_slope = upper_half_slope(&cutoffs, &partials);
        let verdict = if tail_slope < PLATEAU_SLOPE {
            Verdict::Plateau
        } else {
            Verdict::Growing
        };
        Self {
            kind,
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            cutoffs,
            partials,
            tail_slope,
            verdict,
            per_prime: Vec::new(),
        }
    }

    /// Final partial sum.
    pub fn value(&self) -> f64 {
        self.partials.last().copied().unwrap_or(0.0)
    }

    /// Partial sum at the largest checkpoint `<= x`.
    pub fn value_at(&self, x: u64) -> f64 {
        let i = self.cutoffs.partition_point(|&c| c <= x);
        if i == 0 {
            0.0
        } else {
            self.partials[i - 1]
        }
    }

    /// Slope against `log log cutoff` over checkpoints in `[lo, hi]`.
    pub fn slope_over(&self, lo: u64, hi: u64) -> Result<f64> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .cutoffs
            .iter()
            .zip(&self.partials)
            .filter(|(&c, _)| c >= lo && c <= hi && c >= 3)
            .map(|(&c, &v)| ((c as f64).ln().ln(), v))
            .unzip();
        if xs.len() < 2 {
            return Err(Error::DegenerateFit { usable: xs.len() });
        }
        Ok(linear_fit(&xs, &ys).slope)
    }

    pub fn is_monotone(&self) -> bool {
        self.partials.windows(2).all(|w| w[1] >= w[0])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn upper_half_slope(cutoffs: &[u64], partials: &[f64]) -> f64 {
    let usable: Vec<(f64, f64)> = cutoffs
        .iter()
        .zip(partials)
        .filter(|(&c, _)| c >= 3)
        .map(|(&c, &v)| ((c as f64).ln().ln(), v))
        .collect();
    let upper = &usable[usable.len() / 2..];
    if upper.len() < 2 {
        return 0.0;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = upper.iter().copied().unzip();
    linear_fit(&xs, &ys).slope
}

/// `floor(10^{j/8})` for `j >= 0` up to `top`, with `top` appended.
pub fn cutoff_grid(top: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    let mut j = 0;
    loop {
        let x = (10f64.powf(j as f64 / 8.0) + 1e-9).floor() as u64;
        if x > top {
            break;
        }
        if out.last().is_none_or(|&l| x > l) {
            out.push(x);
        }
        j += 1;
    }
    if out.last() != Some(&top) {
        out.push(top);
    }
    out
}

fn validate_cutoffs(cutoffs: &[u64], sieve: &SieveIndex) -> Result<u64> {
    if cutoffs.is_empty() {
        return Err(invalid("at least one cutoff is required"));
    }
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("cutoffs must be strictly increasing"));
    }
    let top = *cutoffs.last().unwrap();
    if top > sieve.limit() {
        return Err(Error::OutOfRange {
            what: "prime cutoff",
            value: top as f64,
            limit: sieve.limit() as f64,
        });
    }
    Ok(top)
}

/// Partial sums over primes of `term(p)` at each cutoff. Terms are produced
/// in parallel and reduced under the fixed block order.
fn prime_series<F>(sieve: &SieveIndex, cutoffs: &[u64], term: F) -> Result<Vec<f64>>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    let top = validate_cutoffs(cutoffs, sieve)?;
    let primes = sieve.primes_up_to(top);
    let terms: Vec<f64> = primes
        .par_iter()
        .map(|&p| term(p as u64))
        .collect::<Result<Vec<_>>>()?;
    let cuts: Vec<usize> = cutoffs
        .iter()
        .map(|&c| primes.partition_point(|&p| (p as u64) <= c))
        .collect();
    Ok(prefix_sums_at(terms.len(), |i| Complex64::new(terms[i], 0.0), &cuts, SummationMode::BlockParallelDeterministic)
        .into_iter()
        .map(|z| z.re)
        .collect())
}

fn unit_disc_pair(f: &FunctionSpec, g: &FunctionSpec, p: u64) -> Result<(Complex64, Complex64)> {
    let fp = f.local_series_unchecked(p, 1)?[1];
    let gp = g.local_series_unchecked(p, 1)?[1];
    for (which, z) in [("f", fp), ("g", gp)] {
        if z.norm() > 1.0 + 1e-12 {
            return Err(Error::UnitDisc {
                which,
                p,
                modulus: z.norm(),
            });
        }
    }
    Ok((fp, gp))
}

/// `D(f, g)^2 = sum_p (1 - Re f(p) conj g(p)) / p`.
pub fn distance_classic(f: &FunctionSpec, g: &FunctionSpec, sieve: &SieveIndex, cutoffs: &[u64]) -> Result<DistanceReport> {
    let partials = prime_series(sieve, cutoffs, |p| {
        let (fp, gp) = unit_disc_pair(f, g, p)?;
        Ok((1.0 - (fp * gp.conj()).re) / p as f64)
    })?;
    Ok(DistanceReport::new(DistanceKind::Classic, &[], cutoffs.to_vec(), partials))
}

/// `D_beta(f, g)^2 = sum_p (1 - Re f(p) conj g(p)) / p^beta`, `beta` in `(0, 1]`.
pub fn distance_beta(f: &FunctionSpec, g: &FunctionSpec, beta: f64, sieve: &SieveIndex, cutoffs: &[u64]) -> Result<DistanceReport> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(invalid(format!("beta must lie in (0, 1], got {beta}")));
    }
    let partials = prime_series(sieve, cutoffs, |p| {
        let (fp, gp) = unit_disc_pair(f, g, p)?;
        Ok((1.0 - (fp * gp.conj()).re) / (p as f64).powf(beta))
    })?;
    Ok(DistanceReport::new(DistanceKind::Beta, &[("beta", beta)], cutoffs.to_vec(), partials))
}

/// `Dhat_{beta,k}(f, g) = sum_p sum_{j=1}^k |f(p^j) - g(p^j)| / p^{j beta}`. No size restriction.
pub fn distance_strong(
    f: &FunctionSpec,
    g: &FunctionSpec,
    beta: f64,
    k: u32,
    sieve: &SieveIndex,
    cutoffs: &[u64],
) -> Result<DistanceReport> {
    if !(beta > 0.0) {
        return Err(invalid(format!("beta must be positive, got {beta}")));
    }
    if k == 0 {
        return Err(invalid("depth k must be at least 1"));
    }
    let partials = prime_series(sieve, cutoffs, |p| {
        let fl = f.local_series_unchecked(p, k)?;
        let gl = g.local_series_unchecked(p, k)?;
        let w = (p as f64).powf(-beta);
        let mut acc = 0.0;
        let mut wj = 1.0;
        for j in 1..=k as usize {
            wj *= w;
            acc += (fl[j] - gl[j]).norm() * wj;
        }
        Ok(acc)
    })?;
    Ok(DistanceReport::new(
        DistanceKind::StrongBetaK,
        &[("beta", beta), ("k", k as f64)],
        cutoffs.to_vec(),
        partials,
    ))
}

/// Inner sum `sum_{k=k0}^K |h(p^k)|^power / p^{k sigma}` with the ratio diagnostic.
fn inner_prime_sum(h: &FunctionSpec, p: u64, sigma: f64, k0: u32, kmax: u32, power: i32) -> Result<PrimeConvergence> {
    let local = h.local_series_unchecked(p, kmax)?;
    let pf = p as f64;
    let terms: Vec<f64> = (k0..=kmax)
        .map(|k| local[k as usize].norm().powi(power) / pf.powf(k as f64 * sigma))
        .collect();
    let sum: f64 = terms.iter().sum();
    let last = terms[terms.len() - 1];
    let prev = if terms.len() >= 2 { terms[terms.len() - 2] } else { 0.0 };
    let (last_ratio, convergent, tail_bound) = if last == 0.0 {
        (None, true, Some(0.0))
    } else if prev == 0.0 {
        (None, false, None)
    } else {
        let r = last / prev;
        if r < 1.0 {
            (Some(r), true, Some(last * r / (1.0 - r)))
        } else {
            (Some(r), false, None)
        }
    };
    Ok(PrimeConvergence {
        prime: p,
        sum,
        last_ratio,
        tail_bound,
        convergent,
    })
}

fn finish_local_report(kind: DistanceKind, params: &[(&str, f64)], per_prime: Vec<PrimeConvergence>) -> DistanceReport {
    let mut acc = 0.0;
    let cutoffs = per_prime.iter().map(|s| s.prime).collect();
    let partials = per_prime
        .iter()
        .map(|s| {
            acc += s.sum;
            acc
        })
        .collect();
    let divergent = per_prime.iter().any(|s| !s.convergent);
    DistanceReport {
        kind,
        params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        cutoffs,
        partials,
        tail_slope: 0.0,
        verdict: if divergent {
            Verdict::Divergent
        } else {
            Verdict::Convergent
        },
        per_prime,
    }
}

/// `H(sigma) = sum_{p <= 4^{1/sigma}} sum_{k >= 0} |h(p^k)|^2 / p^{k sigma}`,
/// inner sums truncated at `inner_k`.
pub fn h_series(h: &FunctionSpec, sigma: f64, inner_k: u32) -> Result<DistanceReport> {
    if !(sigma > 0.0) {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    if inner_k < 1 {
        return Err(invalid("inner truncation must be at least 1"));
    }
    let bound = 4f64.powf(1.0 / sigma);
    if bound > 1e9 {
        return Err(Error::OutOfRange {
            what: "prime range 4^(1/sigma)",
            value: bound,
            limit: 1e9,
        });
    }
    let per_prime = (2..=bound.floor() as u64)
        .filter(|&p| crate::sieve::is_prime_u64(p))
        .map(|p| inner_prime_sum(h, p, sigma, 0, inner_k, 2))
        .collect::<Result<Vec<_>>>()?;
    let mut report = finish_local_report(DistanceKind::HSigma, &[("sigma", sigma), ("K", inner_k as f64)], per_prime);
    report.params.insert("prime_bound".into(), bound);
    Ok(report)
}

/// `H(2 sigma - 1)`, requiring `2 sigma - 1 > 0`.
pub fn h_series_shifted(h: &FunctionSpec, sigma: f64, inner_k: u32) -> Result<DistanceReport> {
    let s = 2.0 * sigma - 1.0;
    if !(s > 0.0) {
        return Err(invalid(format!("H(2 sigma - 1) needs 2 sigma - 1 > 0, got sigma = {sigma}")));
    }
    h_series(h, s, inner_k)
}

/// `Hhat_Y(sigma) = sum_{p <= Y} sum_{k >= 1} |h(p^k)| / p^{k sigma}`, inner sums truncated at `inner_k`.
pub fn hhat_series(h: &FunctionSpec, sigma: f64, y: f64, inner_k: u32) -> Result<DistanceReport> {
    if !(sigma > 0.0) {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    if !(y >= 2.0) {
        return Err(invalid(format!("Y must be at least 2, got {y}")));
    }
    if inner_k < 2 {
        return Err(invalid("inner truncation must be at least 2"));
    }
    let per_prime = (2..=y.floor() as u64)
        .filter(|&p| crate::sieve::is_prime_u64(p))
        .map(|p| inner_prime_sum(h, p, sigma, 1, inner_k, 1))
        .collect::<Result<Vec<_>>>()?;
    Ok(finish_local_report(
        DistanceKind::HhatYSigma,
        &[("sigma", sigma), ("Y", y), ("K", inner_k as f64)],
        per_prime,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Power {
    L1,
    L2,
}

/// `sum_{n <= x} |h(n)|^{1 or 2} / n^sigma` at each cutoff, from a dense table.
pub fn h_majorant_from_table(h: &ValueTable, sigma: f64, power: Power, cutoffs: &[u64]) -> Result<DistanceReport> {
    if cutoffs.is_empty() || cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("cutoffs must be nonempty and strictly increasing"));
    }
    let top = *cutoffs.last().unwrap();
    if top > h.limit() {
        return Err(Error::OutOfRange {
            what: "majorant cutoff",
            value: top as f64,
            limit: h.limit() as f64,
        });
    }
    let vals = h.as_slice();
    let term = |i: usize| {
        let n = i + 1;
        let a = vals[n].norm();
        let m = match power {
            Power::L1 => a,
            Power::L2 => a * a,
        };
        Complex64::new(m / (n as f64).powf(sigma), 0.0)
    };
    let cuts: Vec<usize> = cutoffs.iter().map(|&c| c as usize).collect();
    let partials = prefix_sums_at(top as usize, term, &cuts, SummationMode::BlockParallelDeterministic)
        .into_iter()
        .map(|z| z.re)
        .collect();
    let kind = match power {
        Power::L1 => DistanceKind::HL1,
        Power::L2 => DistanceKind::HL2,
    };
    Ok(DistanceReport::new(kind, &[("sigma", sigma)], cutoffs.to_vec(), partials))
}

/// Dense evaluation of `h` to `n_max`, then [`h_majorant_from_table`] on [`cutoff_grid`].
pub fn h_majorant_series(h: &FunctionSpec, sigma: f64, n_max: u64, power: Power, sieve: &SieveIndex) -> Result<DistanceReport> {
    let table = evaluate(h, sieve, n_max)?;
    h_majorant_from_table(&table, sigma, power, &cutoff_grid(n_max))
}

/// `exp(2 (1 - 2^{-beta})^{-1} D_beta(f, g)^2)`.
pub fn lemma_h2_envelope(distance_beta_sq: f64, beta: f64) -> f64 {
    (2.0 / (1.0 - 2f64.powf(-beta)) * distance_beta_sq).exp()
}
