//! Growth exponents of partial sums, the normalised sums `xi`, their
//! convolution with `h`, mean squares, and truncated Dirichlet series.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spec::ZERO;
use crate::stats::linear_fit;
use crate::summation::{ordered_sum, ComplexKahan, SummationMode};
use crate::table::{PartialSumSeries, ValueTable};

/// Partial sums with modulus below this are dropped from growth fits.
pub const ZERO_SUM_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub exponent: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub points_used: usize,
    pub dropped_zero_points: usize,
}

/// Least squares of `log |S(x)|` against `log x` over all checkpoints.
pub fn growth_fit(series: &PartialSumSeries) -> Result<GrowthFit> {
    growth_fit_range(series, f64::NEG_INFINITY, f64::INFINITY)
}

/// As [`growth_fit`], restricted to checkpoints in `[lo, hi]`.
pub fn growth_fit_range(series: &PartialSumSeries, lo: f64, hi: f64) -> Result<GrowthFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut dropped = 0;
    for (&x, s) in series.checkpoints.iter().zip(&series.sums) {
        if x < lo || x > hi || x <= 0.0 {
            continue;
        }
        let a = s.norm();
        if a < ZERO_SUM_FLOOR {
            dropped += 1;
            continue;
        }
        xs.push(x.ln());
        ys.push(a.ln());
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateFit { usable: xs.len() });
    }
    let fit = linear_fit(&xs, &ys);
    Ok(GrowthFit {
        exponent: fit.slope,
        intercept: fit.intercept,
        residual_rms: fit.residual_rms,
        points_used: xs.len(),
        dropped_zero_points: dropped,
    })
}

/// How `xi` is read at arguments off the sample grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LookupMode {
    /// Recompute `S(floor(y))` from the dense table.
    #[default]
    Exact,
    /// Use the sample whose checkpoint is nearest to `y` on a log scale.
    Nearest,
}

/// Samples `xi(x_i) = S(x_i) / x_i^alpha`, optionally backed by the dense
/// prefix sums so that `xi` can be read exactly at any argument.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct XiSeries {
    pub alpha: f64,
    pub source: String,
    pub checkpoints: Vec<f64>,
    pub values: Vec<Complex64>,
    #[serde(skip)]
    prefix: Option<Vec<Complex64>>,
}

impl XiSeries {
    /// Arbitrary samples, e.g. a closed-form `xi` for testing quadrature.
    pub fn from_samples(alpha: f64, source: impl Into<String>, checkpoints: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if checkpoints.len() != values.len() {
            return Err(invalid("checkpoint and value counts differ"));
        }
        if checkpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("checkpoints must be strictly increasing"));
        }
        Ok(Self {
            alpha,
            source: source.into(),
            checkpoints,
            values,
            prefix: None,
        })
    }

    /// `xi` of the dense table, sampled at `checkpoints`, with exact lookups enabled.
    pub fn exact(table: &ValueTable, alpha: f64, checkpoints: &[f64]) -> Result<Self> {
        let vals = table.as_slice();
        let mut prefix = Vec::with_capacity(vals.len());
        let mut acc = ComplexKahan::default();
        prefix.push(ZERO);
        for &v in &vals[1..] {
            acc.add(v);
            prefix.push(acc.value());
        }
        let mut xi = Self {
            alpha,
            source: table.spec_name.clone(),
            checkpoints: Vec::new(),
            values: Vec::new(),
            prefix: Some(prefix),
        };
        let values = checkpoints.iter().map(|&x| xi.exact_at(x)).collect::<Result<Vec<_>>>()?;
        xi.checkpoints = checkpoints.to_vec();
        xi.values = values;
        Ok(xi)
    }

    pub fn has_exact(&self) -> bool {
        self.prefix.is_some()
    }

    fn exact_at(&self, y: f64) -> Result<Complex64> {
        let prefix = self
            .prefix
            .as_ref()
            .ok_or_else(|| invalid("exact lookup needs a series built from a dense table"))?;
        if y < 1.0 {
            return Ok(ZERO);
        }
        let n = y.floor() as usize;
        if n >= prefix.len() {
            return Err(Error::OutOfRange {
                what: "xi argument",
                value: y,
                limit: (prefix.len() - 1) as f64,
            });
        }
        Ok(prefix[n] / y.powf(self.alpha))
    }

    fn nearest_at(&self, y: f64) -> Result<Complex64> {
        if y < 1.0 {
            return Ok(ZERO);
        }
        let (first, last) = match (self.checkpoints.first(), self.checkpoints.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return Err(invalid("empty xi series")),
        };
        if y < first || y > last {
            return Err(Error::OutOfRange {
                what: "xi argument outside the sampled range",
                value: y,
                limit: if y < first { first } else { last },
            });
        }
        let i = self.checkpoints.partition_point(|&c| c <= y);
        let ly = y.ln();
        let best = [i.saturating_sub(1), i.min(self.checkpoints.len() - 1)]
            .into_iter()
            .min_by(|&a, &b| {
                (self.checkpoints[a].ln() - ly)
                    .abs()
                    .total_cmp(&(self.checkpoints[b].ln() - ly).abs())
            })
            .unwrap();
        Ok(self.values[best])
    }

    /// `xi(y)` under the chosen lookup.
    pub fn at(&self, y: f64, mode: LookupMode) -> Result<Complex64> {
        match mode {
            LookupMode::Exact => self.exact_at(y),
            LookupMode::Nearest => self.nearest_at(y),
        }
    }
}

/// `xi(x_i) = S(x_i) / x_i^alpha`.
pub fn xi_from_sums(series: &PartialSumSeries, alpha: f64) -> Result<XiSeries> {
    if !(alpha >= 0.0) {
        return Err(invalid(format!("alpha must be nonnegative, got {alpha}")));
    }
    let values = series
        .checkpoints
        .iter()
        .zip(&series.sums)
        .map(|(&x, &s)| s / x.powf(alpha))
        .collect();
    XiSeries::from_samples(alpha, series.spec_name.clone(), series.checkpoints.clone(), values)
}

/// `sum_{m <= x} h(m) m^{-alpha} xi(x / m)` for an arbitrary `xi`.
pub fn convolve_xi<F>(h: &ValueTable, alpha: f64, x: f64, xi: F) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if x > h.limit() as f64 {
        return Err(Error::OutOfRange {
            what: "xi-tilde argument",
            value: x,
            limit: h.limit() as f64,
        });
    }
    let mut acc = ComplexKahan::default();
    for m in 1..=x.floor().max(0.0) as u64 {
        let hm = h.get(m);
        if hm == ZERO {
            continue;
        }
        let mf = m as f64;
        acc.add(hm * mf.powf(-alpha) * xi(x / mf)?);
    }
    Ok(acc.value())
}

/// `xi~(x) = sum_{m <= x} h(m) m^{-alpha} xi(x / m)`.
pub fn xi_tilde(h: &ValueTable, xi: &XiSeries, x: f64, mode: LookupMode) -> Result<Complex64> {
    convolve_xi(h, xi.alpha, x, |y| xi.at(y, mode))
}

/// Recover `xi(x)` from `xi~` using the inverse `h_inv` of `h`:
/// `sum_{m <= x} h_inv(m) m^{-alpha} xi~(x / m)`, with `xi~` itself
/// evaluated by [`xi_tilde`]. Returns `(recovered, xi(x))`.
pub fn inversion_roundtrip(
    h: &ValueTable,
    h_inv: &ValueTable,
    xi: &XiSeries,
    x: f64,
    mode: LookupMode,
) -> Result<(Complex64, Complex64)> {
    let recovered = convolve_xi(h_inv, xi.alpha, x, |y| xi_tilde(h, xi, y, mode))?;
    Ok((recovered, xi.at(x, mode)?))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeanSquare {
    pub t: f64,
    pub value: f64,
    /// Largest ratio between consecutive grid points used.
    pub grid_ratio: f64,
    /// Richardson estimate of the trapezoid error: the difference to the
    /// rule on every other point, divided by 3.
    pub error_estimate: f64,
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Trapezoid estimate of `int_1^T |xi(t)|^2 dt` on the sample grid.
/// The samples must cover `[1, T]`; the ends are interpolated linearly.
pub fn mean_square(xi: &XiSeries, t_end: f64) -> Result<MeanSquare> {
    if !(t_end >= 1.0) {
        return Err(invalid(format!("T must be at least 1, got {t_end}")));
    }
    let cs = &xi.checkpoints;
    let sq: Vec<f64> = xi.values.iter().map(|z| z.norm_sqr()).collect();
    let (first, last) = match (cs.first(), cs.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(invalid("empty xi series")),
    };
    if first > 1.0 || last < t_end {
        return Err(Error::OutOfRange {
            what: "mean-square range",
            value: if first > 1.0 { first } else { t_end },
            limit: if first > 1.0 { 1.0 } else { last },
        });
    }
    let interp = |t: f64| -> f64 {
        let i = cs.partition_point(|&c| c <= t);
        if i == 0 {
            return sq[0];
        }
        if i == cs.len() {
            return sq[cs.len() - 1];
        }
        let (a, b) = (cs[i - 1], cs[i]);
        sq[i - 1] + (sq[i] - sq[i - 1]) * (t - a) / (b - a)
    };
    let mut xs = vec![1.0];
    let mut ys = vec![interp(1.0)];
    for (&c, &v) in cs.iter().zip(&sq) {
        if c > 1.0 && c < t_end {
            xs.push(c);
            ys.push(v);
        }
    }
    if t_end > 1.0 {
        xs.push(t_end);
        ys.push(interp(t_end));
    }
    let value = trapezoid(&xs, &ys);
    let grid_ratio = xs.windows(2).map(|w| w[1] / w[0]).fold(1.0, f64::max);
    let error_estimate = if xs.len() >= 3 {
        let mut cx: Vec<f64> = xs.iter().step_by(2).copied().collect();
        let mut cy: Vec<f64> = ys.iter().step_by(2).copied().collect();
        if cx.last() != xs.last() {
            cx.push(*xs.last().unwrap());
            cy.push(*ys.last().unwrap());
        }
        (trapezoid(&cx, &cy) - value).abs() / 3.0
    } else {
        0.0
    };
    Ok(MeanSquare {
        t: t_end,
        value,
        grid_ratio,
        error_estimate,
    })
}

/// `|f(n)| <= c n^theta`, used to bound Dirichlet-series tails.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientBound {
    pub c: f64,
    pub theta: f64,
}

impl CoefficientBound {
    pub const UNIT: Self = Self { c: 1.0, theta: 0.0 };

    /// `sum_{n > N} c n^{theta - sigma} <= c N^{1 + theta - sigma} / (sigma - 1 - theta)`
    /// when `sigma > 1 + theta`.
    pub fn tail(&self, sigma: f64, n: u64) -> Option<f64> {
        let gap = sigma - 1.0 - self.theta;
        (gap > 0.0).then(|| self.c * (n as f64).powf(-gap) / gap)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LTruncation {
    pub s: Complex64,
    pub n: u64,
    pub value: Complex64,
    /// `None` when the tail cannot be certified (`Re s <= 1 + theta`).
    pub tail_bound: Option<f64>,
}

/// `sum_{n <= N} f(n) n^{-s}` with the tail bound for `|f(n)| <= 1`.
pub fn l_truncation(table: &ValueTable, s: Complex64, n: u64) -> Result<LTruncation> {
    l_truncation_bounded(table, s, n, CoefficientBound::UNIT)
}

/// As [`l_truncation`] with an explicit coefficient bound.
pub fn l_truncation_bounded(table: &ValueTable, s: Complex64, n: u64, bound: CoefficientBound) -> Result<LTruncation> {
    if n < 1 || n > table.limit() {
        return Err(Error::OutOfRange {
            what: "L-series truncation",
            value: n as f64,
            limit: table.limit() as f64,
        });
    }
    let vals = table.as_slice();
    let value = ordered_sum(
        n as usize,
        |i| {
            let m = i + 1;
            let v = vals[m];
            if v == ZERO {
                ZERO
            } else {
                v * (-s * (m as f64).ln()).exp()
            }
        },
        SummationMode::BlockParallelDeterministic,
    );
    Ok(LTruncation {
        s,
        n,
        value,
        tail_bound: bound.tail(s.re, n),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub s: Complex64,
    pub n: u64,
    /// `|L_N(s, g) - L_N(s, f) L_N(s, h)|`
    pub residual: f64,
    /// `T_g + T_f |L_N(h)| + |L_N(f)| T_h + T_f T_h`, `None` if any tail is uncertified.
    pub bound: Option<f64>,
    pub within_bound: bool,
}

/// Compare the truncations of `L(s, g)` and `L(s, f) L(s, h)`.
#[allow(clippy::too_many_arguments)]
pub fn quotient_identity_check(
    f: &ValueTable,
    g: &ValueTable,
    h: &ValueTable,
    s: Complex64,
    n: u64,
    bf: CoefficientBound,
    bg: CoefficientBound,
    bh: CoefficientBound,
) -> Result<IdentityCheck> {
    let lf = l_truncation_bounded(f, s, n, bf)?;
    let lg = l_truncation_bounded(g, s, n, bg)?;
    let lh = l_truncation_bounded(h, s, n, bh)?;
    let residual = (lg.value - lf.value * lh.value).norm();
    let bound = match (lf.tail_bound, lg.tail_bound, lh.tail_bound) {
        (Some(tf), Some(tg), Some(th)) => Some(tg + tf * lh.value.norm() + lf.value.norm() * th + tf * th),
        _ => None,
    };
    Ok(IdentityCheck {
        s,
        n,
        residual,
        bound,
        within_bound: bound.is_some_and(|b| residual <= b),
    })
}

/// `zeta(s)` for real `s > 1` by Euler-Maclaurin summation with `M = 32`
/// and six Bernoulli corrections. Serves as an oracle independent of the
/// plain truncation.
pub fn euler_maclaurin_zeta(s: f64) -> f64 {
    assert!(s > 1.0, "Euler-Maclaurin oracle needs s > 1");
    const M: f64 = 32.0;
    // B_{2k} / (2k)!
    const B: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let mut head = 0.0;
    for n in (1..M as u64).rev() {
        head += (n as f64).powf(-s);
    }
    let mut acc = head + M.powf(1.0 - s) / (s - 1.0) + 0.5 * M.powf(-s);
    // derivative factor s (s+1) ... (s+2k-2) and power M^{-s-2k+1}
    let mut rising = s;
    for (k, b) in B.iter().enumerate() {
        let j = k as f64;
        if k > 0 {
            rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        }
        acc += b * rising * M.powf(-s - 2.0 * j - 1.0);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::*;
    use crate::dirichlet::inverse_table;
    use crate::sieve::build_sieve;
    use crate::table::{default_grid, evaluate, geometric_grid, grid_ratio, partial_sums};
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn series(xs: Vec<f64>, sums: Vec<Complex64>) -> PartialSumSeries {
        PartialSumSeries {
            spec_name: "test".into(),
            checkpoints: xs,
            sums,
            summation_mode: SummationMode::CompensatedSequential,
        }
    }

    #[test]
    fn fit_examples() {
        let xs = default_grid(1e6);
        let s = series(xs.clone(), xs.iter().map(|&x| c(x)).collect());
        let f = growth_fit(&s).unwrap();
        assert!((f.exponent - 1.0).abs() < 1e-12 && f.residual_rms < 1e-12);

        let scaled = series(xs.clone(), xs.iter().map(|&x| c(3.5 * x)).collect());
        let g = growth_fit(&scaled).unwrap();
        assert!((g.exponent - f.exponent).abs() < 1e-12);
        assert!((g.intercept - f.intercept - 3.5f64.ln()).abs() < 1e-12);

        let mut zeros = xs.iter().map(|&x| c(x.sqrt())).collect::<Vec<_>>();
        zeros[3] = ZERO;
        let z = growth_fit(&series(xs.clone(), zeros)).unwrap();
        assert_eq!(z.dropped_zero_points, 1);
        assert!((z.exponent - 0.5).abs() < 1e-12);

        let err = growth_fit(&series(vec![10.0, 20.0], vec![ZERO, c(1.0)])).unwrap_err();
        assert!(matches!(err, Error::DegenerateFit { usable: 1 }));
    }

    #[test]
    fn character_fit_is_flat() {
        let s = build_sieve(1_000_000).unwrap();
        let t = evaluate(&dirichlet_character(4, 1).unwrap(), &s, 1_000_000).unwrap();
        let ps = partial_sums(&t, &default_grid(1e6), SummationMode::CompensatedSequential).unwrap();
        let f = growth_fit(&ps).unwrap();
        assert!(f.exponent < 0.1, "{f:?}");
    }

    #[test]
    fn xi_examples() {
        let xs = default_grid(1e5);
        let s = series(xs.clone(), xs.iter().map(|&x| c(x.floor())).collect());
        let xi = xi_from_sums(&s, 1.0).unwrap();
        for (x, v) in xi.checkpoints.iter().zip(&xi.values) {
            assert!((v.re - 1.0).abs() <= 1.0 / x);
        }
        let xi0 = xi_from_sums(&s, 0.0).unwrap();
        assert_eq!(xi0.values, s.sums);
        assert!(xi_from_sums(&s, -1.0).is_err());
    }

    #[test]
    fn xi_tilde_examples() {
        let s = build_sieve(10_000).unwrap();
        let mu = evaluate(&standard_spec(Standard::Moebius), &s, 10_000).unwrap();
        let xi = XiSeries::exact(&mu, 0.5, &default_grid(1e4)).unwrap();
        let delta = evaluate(&standard_spec(Standard::Delta), &s, 10_000).unwrap();
        for x in [1.0, 17.5, 999.0, 10_000.0] {
            assert_eq!(xi_tilde(&delta, &xi, x, LookupMode::Exact).unwrap(), xi.at(x, LookupMode::Exact).unwrap());
        }
        // h supported at 1 and 2
        let mut hv = vec![ZERO; 10_001];
        hv[1] = c(1.0);
        hv[2] = Complex64::new(0.3, -0.7);
        let h = ValueTable::from_values("two-point", hv).unwrap();
        let x = 5000.0;
        let want = xi.at(x, LookupMode::Exact).unwrap()
            + h.get(2) * 2f64.powf(-0.5) * xi.at(x / 2.0, LookupMode::Exact).unwrap();
        assert!((xi_tilde(&h, &xi, x, LookupMode::Exact).unwrap() - want).norm() < 1e-14);

        let nearest = XiSeries::exact(&mu, 0.5, &geometric_grid(1.0, grid_ratio(), 1e4)).unwrap();
        assert!(xi_tilde(&delta, &nearest, 5000.0, LookupMode::Nearest).is_ok());
        assert!(xi_tilde(&delta, &xi, 1e5, LookupMode::Exact).is_err());
    }

    #[test]
    fn inversion_roundtrip_recovers_xi() {
        let s = build_sieve(10_000).unwrap();
        let f = evaluate(&random_unit_disc(5, false), &s, 10_000).unwrap();
        let h = evaluate(&random_unit_disc(6, true), &s, 10_000).unwrap();
        let h_inv = inverse_table(&h).unwrap();
        let xi = XiSeries::exact(&f, 0.6, &[]).unwrap();
        for x in [10.0, 777.7, 10_000.0] {
            let (got, want) = inversion_roundtrip(&h, &h_inv, &xi, x, LookupMode::Exact).unwrap();
            assert!((got - want).norm() <= 1e-8 * want.norm().max(1e-3), "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn mean_square_examples() {
        let grid = geometric_grid(1.0, grid_ratio(), 1e4);
        let ones = XiSeries::from_samples(0.0, "one", grid.clone(), vec![c(1.0); grid.len()]).unwrap();
        let m = mean_square(&ones, 1e4).unwrap();
        assert!((m.value - (1e4 - 1.0)).abs() < 1e-9);
        let zero = XiSeries::from_samples(0.0, "zero", grid.clone(), vec![ZERO; grid.len()]).unwrap();
        assert_eq!(mean_square(&zero, 5000.0).unwrap().value, 0.0);

        let fine = geometric_grid(1.0, grid_ratio(), 1e6);
        let quarter = XiSeries::from_samples(0.25, "t^-1/4", fine.clone(), fine.iter().map(|&t| c(t.powf(-0.25))).collect()).unwrap();
        let t_end: f64 = 1e6;
        let want = 2.0 * (t_end.sqrt() - 1.0);
        let got = mean_square(&quarter, t_end).unwrap();
        assert!((got.value - want).abs() / want < 0.02, "{} vs {want}", got.value);
        assert!(mean_square(&quarter, 2e6).is_err());
    }

    #[test]
    fn l_truncation_examples() {
        let s = build_sieve(100_000).unwrap();
        let one = evaluate(&standard_spec(Standard::One), &s, 100_000).unwrap();
        let z = l_truncation(&one, c(2.0), 100_000).unwrap();
        let oracle = euler_maclaurin_zeta(2.0);
        assert!((oracle - PI * PI / 6.0).abs() < 1e-13);
        assert!((z.value.re - oracle).abs() < 1e-5);
        assert!((z.value.re - oracle).abs() <= z.tail_bound.unwrap());

        let delta = evaluate(&standard_spec(Standard::Delta), &s, 100).unwrap();
        assert_eq!(l_truncation(&delta, c(0.5), 100).unwrap().value, c(1.0));
        assert!(l_truncation(&delta, c(0.5), 100).unwrap().tail_bound.is_none());

        let mu = evaluate(&standard_spec(Standard::Moebius), &s, 100_000).unwrap();
        let m = l_truncation(&mu, c(2.0), 100_000).unwrap();
        assert!((m.value.re - 6.0 / (PI * PI)).abs() <= m.tail_bound.unwrap());
        assert!((euler_maclaurin_zeta(3.0) - 1.2020569031595942).abs() < 1e-13);
    }

    #[test]
    fn quotient_identity_examples() {
        let s = build_sieve(20_000).unwrap();
        let n = 20_000;
        let f = evaluate(&alternating(), &s, n).unwrap();
        let g = evaluate(&standard_spec(Standard::One), &s, n).unwrap();
        let h = evaluate(&crate::dirichlet::quotient_spec(&alternating(), &standard_spec(Standard::One)), &s, n).unwrap();
        let u = CoefficientBound::UNIT;
        let r = quotient_identity_check(&f, &g, &h, c(3.0), n, u, u, CoefficientBound { c: 1.0, theta: 1.0 }).unwrap();
        assert!(r.within_bound, "{r:?}");

        let same = quotient_identity_check(&g, &g, &evaluate(&standard_spec(Standard::Delta), &s, n).unwrap(), c(2.0), n, u, u, u).unwrap();
        assert!(same.residual <= 1e-12);
    }
}
