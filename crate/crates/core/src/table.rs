//! Dense evaluation and checkpointed partial sums.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, try_alloc, Error, Result};
use crate::sieve::SieveIndex;
use crate::spec::{FunctionSpec, ONE, ZERO};
use crate::summation::{ordered_sum_real, prefix_sums_at, SummationMode};

/// Values `f(1..=limit)` of a multiplicative function.
#[derive(Clone, Debug)]
pub struct ValueTable {
    pub spec_name: String,
    limit: u64,
    // index 0 is unused and holds 0
    values: Vec<Complex64>,
}

impl ValueTable {
    /// Wrap raw values; `values[0]` is ignored, `values[n]` is `f(n)`.
    pub fn from_values(spec_name: impl Into<String>, mut values: Vec<Complex64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(invalid("a value table needs at least f(1)"));
        }
        values[0] = ZERO;
        Ok(Self {
            spec_name: spec_name.into(),
            limit: values.len() as u64 - 1,
            values,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    #[inline]
    pub fn get(&self, n: u64) -> Complex64 {
        self.values[n as usize]
    }

    /// Raw storage; index 0 holds 0.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.values
    }

    /// Restrict to `[1, n]`.
    pub fn truncated(&self, n: u64) -> Result<Self> {
        if n > self.limit || n == 0 {
            return Err(Error::OutOfRange {
                what: "truncation limit",
                value: n as f64,
                limit: self.limit as f64,
            });
        }
        Ok(Self {
            spec_name: self.spec_name.clone(),
            limit: n,
            values: self.values[..=n as usize].to_vec(),
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n_or_x,re,im,abs")?;
        for n in 1..=self.limit {
            let z = self.get(n);
            // adding 0.0 folds -0 into 0
            writeln!(w, "{},{},{},{}", n, z.re + 0.0, z.im + 0.0, z.norm())?;
        }
        Ok(())
    }
}

/// Largest `k` with `p^k <= n`.
pub fn max_exponent(p: u64, n: u64) -> u32 {
    let mut k = 0;
    let mut pk = 1u64;
    while let Some(next) = pk.checked_mul(p) {
        if next > n {
            break;
        }
        pk = next;
        k += 1;
    }
    k
}

/// Dense values `f(n)`, `n <= n_max`, from the prime-power rule.
///
/// One sequential pass over the spf table: prime powers come from the local
/// series at each prime, every other `n` is `f(p^e) f(n / p^e)` with `p^e`
/// the exact power of `spf(n)` dividing `n`.
pub fn evaluate(spec: &FunctionSpec, sieve: &SieveIndex, n_max: u64) -> Result<ValueTable> {
    if n_max < 1 {
        return Err(invalid("evaluation limit must be at least 1"));
    }
    if n_max > sieve.limit() {
        return Err(Error::OutOfRange {
            what: "evaluation limit",
            value: n_max as f64,
            limit: sieve.limit() as f64,
        });
    }
    let n = n_max as usize;
    let mut values = try_alloc(n + 1, ZERO, "value table")?;
    // exact power of spf(m) dividing m
    let mut low: Vec<u32> = try_alloc(n + 1, 0u32, "prime-power part table")?;
    values[1] = ONE;
    let spf = sieve.spf_table();
    for m in 2..=n {
        let p = spf[m] as usize;
        if p == m {
            let kmax = max_exponent(p as u64, n_max);
            let local = spec.local_series_unchecked(p as u64, kmax)?;
            let mut pk = p;
            for &v in &local[1..] {
                values[pk] = v;
                low[pk] = pk as u32;
                pk = pk.saturating_mul(p);
            }
            continue;
        }
        let q = m / p;
        let l = if q % p == 0 { low[q] as usize * p } else { p };
        low[m] = l as u32;
        if l != m {
            values[m] = values[l] * values[m / l];
        }
    }
    Ok(ValueTable {
        spec_name: spec.name.clone(),
        limit: n_max,
        values,
    })
}

/// Checkpointed partial sums `S_f(x) = sum_{n <= x} f(n)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartialSumSeries {
    pub spec_name: String,
    pub checkpoints: Vec<f64>,
    pub sums: Vec<Complex64>,
    pub summation_mode: SummationMode,
}

impl PartialSumSeries {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n_or_x,re,im,abs")?;
        for (x, s) in self.checkpoints.iter().zip(&self.sums) {
            writeln!(w, "{},{},{},{}", x, s.re + 0.0, s.im + 0.0, s.norm())?;
        }
        Ok(())
    }

    /// Parse the CSV written by [`Self::write_csv`].
    pub fn read_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "n_or_x,re,im,abs" => {}
            other => return Err(invalid(format!("unexpected CSV header {other:?}"))),
        }
        let mut checkpoints = Vec::new();
        let mut sums = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(invalid(format!("CSV line {}: expected 4 fields", i + 2)));
            }
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| invalid(format!("CSV line {}: {e}", i + 2)))
            };
            checkpoints.push(num(fields[0])?);
            sums.push(Complex64::new(num(fields[1])?, num(fields[2])?));
        }
        Ok(Self {
            spec_name: String::new(),
            checkpoints,
            sums,
            summation_mode: SummationMode::CompensatedSequential,
        })
    }
}

fn checkpoint_cut(x: f64, limit: u64) -> Result<usize> {
    if !x.is_finite() || x < 0.0 {
        return Err(invalid(format!("checkpoint {x} must be finite and nonnegative")));
    }
    if x > limit as f64 {
        return Err(Error::OutOfRange {
            what: "checkpoint",
            value: x,
            limit: limit as f64,
        });
    }
    Ok(x.floor() as usize)
}

/// Partial sums at strictly increasing checkpoints, all `<= table.limit()`.
pub fn partial_sums(table: &ValueTable, checkpoints: &[f64], mode: SummationMode) -> Result<PartialSumSeries> {
    if checkpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("checkpoints must be strictly increasing"));
    }
    let cuts = checkpoints
        .iter()
        .map(|&x| checkpoint_cut(x, table.limit))
        .collect::<Result<Vec<_>>>()?;
    let vals = &table.values[1..];
    let sums = prefix_sums_at(vals.len(), |i| vals[i], &cuts, mode);
    Ok(PartialSumSeries {
        spec_name: table.spec_name.clone(),
        checkpoints: checkpoints.to_vec(),
        sums,
        summation_mode: mode,
    })
}

/// `sum_{n <= x} |f(n)|^2`.
pub fn mean_square_sum(table: &ValueTable, x: f64) -> Result<f64> {
    let cut = checkpoint_cut(x, table.limit)?;
    let vals = &table.values[1..];
    Ok(ordered_sum_real(cut, |i| vals[i].norm_sqr(), SummationMode::CompensatedSequential))
}

/// Default growth-fit grid start.
pub const GRID_START: f64 = 1e3;
/// Default growth-fit grid ratio, `10^{1/8}`.
pub fn grid_ratio() -> f64 {
    10f64.powf(0.125)
}

/// `floor(x0 r^j)` for `j = 0, 1, ...` while `<= max`, deduplicated.
pub fn geometric_grid(x0: f64, ratio: f64, max: f64) -> Vec<f64> {
    assert!(ratio > 1.0 && x0 > 0.0);
    let mut out: Vec<f64> = Vec::new();
    let mut j = 0i32;
    loop {
        // the relative nudge keeps exact powers such as 10^4 from flooring down
        let x = (x0 * ratio.powi(j) * (1.0 + 1e-12)).floor();
        if x > max {
            break;
        }
        if out.last().is_none_or(|&l| x > l) {
            out.push(x);
        }
        j += 1;
    }
    out
}

/// The default grid `floor(10^3 * 10^{j/8})` up to `max`.
pub fn default_grid(max: f64) -> Vec<f64> {
    // powers of 10^{1/8} computed from the exponent avoid drift at exact decades
    let mut out: Vec<f64> = Vec::new();
    let mut j = 0;
    loop {
        let x = (10f64.powf(3.0 + j as f64 / 8.0) + 1e-9).floor();
        if x > max {
            break;
        }
        if out.last().is_none_or(|&l| x > l) {
            out.push(x);
        }
        j += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{dirichlet_character, divisor_function, standard_spec, Standard};
    use crate::sieve::build_sieve;

    #[test]
    fn constant_one_and_moebius() {
        let s = build_sieve(100).unwrap();
        let one = evaluate(&standard_spec(Standard::One), &s, 10).unwrap();
        assert!((1..=10).all(|n| one.get(n) == ONE));
        let mu = evaluate(&standard_spec(Standard::Moebius), &s, 100).unwrap();
        assert_eq!(mu.get(30), -ONE);
        assert_eq!(mu.get(12), ZERO);
        assert_eq!(mu.get(1), ONE);
    }

    #[test]
    fn divisor_function_twelve() {
        let s = build_sieve(100).unwrap();
        let d = evaluate(&divisor_function(2), &s, 100).unwrap();
        assert_eq!(d.get(12), Complex64::new(6.0, 0.0));
        for n in 1..=100u64 {
            let brute = (1..=n).filter(|k| n % k == 0).count() as f64;
            assert_eq!(d.get(n).re, brute);
        }
    }

    #[test]
    fn evaluation_beyond_sieve_is_rejected() {
        let s = build_sieve(50).unwrap();
        assert!(matches!(
            evaluate(&standard_spec(Standard::One), &s, 51),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn partial_sum_examples() {
        let s = build_sieve(100).unwrap();
        let one = evaluate(&standard_spec(Standard::One), &s, 100).unwrap();
        let ps = partial_sums(&one, &[7.5], SummationMode::CompensatedSequential).unwrap();
        assert_eq!(ps.sums[0].re, 7.0);

        let mu = evaluate(&standard_spec(Standard::Moebius), &s, 100).unwrap();
        let oracle: f64 = (1..=10).map(|n| mu.get(n).re).sum();
        assert_eq!(oracle, -1.0);
        assert_eq!(partial_sums(&mu, &[10.0], SummationMode::CompensatedSequential).unwrap().sums[0].re, -1.0);

        let chi = evaluate(&dirichlet_character(4, 1).unwrap(), &s, 100).unwrap();
        let ps = partial_sums(&chi, &[10.0], SummationMode::BlockParallelDeterministic).unwrap();
        assert_eq!(ps.sums[0], ONE);
    }

    #[test]
    fn partial_sum_errors() {
        let s = build_sieve(100).unwrap();
        let one = evaluate(&standard_spec(Standard::One), &s, 100).unwrap();
        assert!(matches!(
            partial_sums(&one, &[10.0, 5.0], SummationMode::CompensatedSequential),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            partial_sums(&one, &[10.0, 10.0], SummationMode::CompensatedSequential),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            partial_sums(&one, &[101.0], SummationMode::CompensatedSequential),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn mean_square_examples() {
        let s = build_sieve(100).unwrap();
        let one = evaluate(&standard_spec(Standard::One), &s, 100).unwrap();
        assert_eq!(mean_square_sum(&one, 100.0).unwrap(), 100.0);
        let mu = evaluate(&standard_spec(Standard::Moebius), &s, 100).unwrap();
        assert_eq!(mean_square_sum(&mu, 10.0).unwrap(), 7.0);
        let delta = evaluate(&standard_spec(Standard::Delta), &s, 100).unwrap();
        assert_eq!(mean_square_sum(&delta, 100.0).unwrap(), 1.0);
        assert!(mean_square_sum(&delta, 101.0).is_err());
    }

    #[test]
    fn csv_layout() {
        let s = build_sieve(100).unwrap();
        let one = evaluate(&standard_spec(Standard::One), &s, 100).unwrap();
        let ps = partial_sums(&one, &[10.0, 100.0], SummationMode::CompensatedSequential).unwrap();
        let mut buf = Vec::new();
        ps.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "n_or_x,re,im,abs\n10,10,0,10\n100,100,0,100\n");
        let back = PartialSumSeries::read_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.checkpoints, ps.checkpoints);
        assert_eq!(back.sums, ps.sums);
    }

    #[test]
    fn default_grid_hits_decades() {
        let g = default_grid(1e6);
        assert_eq!(g.first(), Some(&1000.0));
        assert_eq!(g.last(), Some(&1e6));
        assert_eq!(g.len(), 25);
        assert!(g.contains(&1e4) && g.contains(&1e5));
        let h = geometric_grid(1.0, 2.0, 20.0);
        assert_eq!(h, vec![1.0, 2.0, 4.0, 8.0, 16.0]);
    }
}
