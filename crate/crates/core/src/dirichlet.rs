//! Dirichlet convolution, quotients `g = f * h`, inverses, and the
//! determinants `D_f(k, p)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spec::{FunctionSpec, Kind, Rule, ONE, ZERO};
use crate::table::ValueTable;

/// Default bound on the determinant size `k`.
pub const DEFAULT_DET_BOUND: u32 = 64;

/// Product of two local series, truncated to the shorter length.
pub fn multiply_local(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().min(b.len());
    (0..n)
        .map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum())
        .collect()
}

/// `c` with `num = den * c` as local series. Forward substitution on the
/// unit-diagonal triangular system: `c_k = num_k - sum_{j<k} den_{k-j} c_j`.
pub fn divide_local(num: &[Complex64], den: &[Complex64]) -> Result<Vec<Complex64>, String> {
    if den.first() != Some(&ONE) {
        return Err(format!("divisor series must start with 1, got {:?}", den.first()));
    }
    let n = num.len().min(den.len());
    let mut c = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = num[k];
        for j in 0..k {
            acc -= den[k - j] * c[j];
        }
        c.push(acc);
    }
    Ok(c)
}

/// Values of a multiplicative function at `p^0..p^K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalSeries {
    pub prime: u64,
    pub coeffs: Vec<Complex64>,
}

/// The quotient `h` of `g = f * h`, with its local series tabulated per prime.
#[derive(Clone, Debug)]
pub struct QuotientSpec {
    /// `h` as a lazily evaluated spec, total on all primes.
    pub h: FunctionSpec,
    pub f_name: String,
    pub g_name: String,
    pub max_exponent: u32,
    pub locals: Vec<LocalSeries>,
}

impl QuotientSpec {
    pub fn local(&self, p: u64) -> Option<&LocalSeries> {
        self.locals
            .binary_search_by_key(&p, |l| l.prime)
            .ok()
            .map(|i| &self.locals[i])
    }

    /// `[{"prime": p, "coeffs": [[re, im], ...]}, ...]`, primes ascending.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.locals)?)
    }

    /// Largest `|g(p^k) - sum_j f(p^{k-j}) h(p^j)|` over the tabulated range.
    pub fn max_residual(&self, f: &FunctionSpec, g: &FunctionSpec) -> Result<f64> {
        let mut worst = 0.0f64;
        for l in &self.locals {
            let k = l.coeffs.len() as u32 - 1;
            let fl = f.local_series_unchecked(l.prime, k)?;
            let gl = g.local_series_unchecked(l.prime, k)?;
            let recon = multiply_local(&fl, &l.coeffs);
            for (a, b) in recon.iter().zip(&gl) {
                worst = worst.max((a - b).norm());
            }
        }
        Ok(worst)
    }
}

/// Spec for `h` with `g = f * h`, without tabulation.
pub fn quotient_spec(f: &FunctionSpec, g: &FunctionSpec) -> FunctionSpec {
    FunctionSpec::new(
        format!("({})/({})", g.name, f.name),
        Kind::GeneralMultiplicative,
        false,
        Rule::Quotient {
            f: Box::new(f.clone()),
            g: Box::new(g.clone()),
        },
    )
}

/// Solve `g(p^k) = sum_{j=0}^k f(p^{k-j}) h(p^j)` for `h(p^1..p^K)` at each prime.
pub fn solve_quotient(f: &FunctionSpec, g: &FunctionSpec, primes: &[u32], k: u32) -> Result<QuotientSpec> {
    let h = quotient_spec(f, g);
    let mut locals = Vec::with_capacity(primes.len());
    let mut sorted: Vec<u64> = primes.iter().map(|&p| p as u64).collect();
    sorted.sort_unstable();
    sorted.dedup();
    for p in sorted {
        let coeffs = h.local_series(p, k)?;
        locals.push(LocalSeries { prime: p, coeffs });
    }
    Ok(QuotientSpec {
        h,
        f_name: f.name.clone(),
        g_name: g.name.clone(),
        max_exponent: k,
        locals,
    })
}

/// [`solve_quotient`] over all primes `p <= n` with `K = floor(log n / log p)`
/// per prime, the largest exponent a dense table to `n` can reach.
pub fn solve_quotient_up_to(f: &FunctionSpec, g: &FunctionSpec, sieve: &crate::sieve::SieveIndex, n: u64) -> Result<QuotientSpec> {
    let h = quotient_spec(f, g);
    let primes = sieve.primes_up_to(n);
    let mut locals = Vec::with_capacity(primes.len());
    let mut kmax = 0;
    for &p in primes {
        let k = crate::table::max_exponent(p as u64, n);
        kmax = kmax.max(k);
        locals.push(LocalSeries {
            prime: p as u64,
            coeffs: h.local_series_unchecked(p as u64, k)?,
        });
    }
    Ok(QuotientSpec {
        h,
        f_name: f.name.clone(),
        g_name: g.name.clone(),
        max_exponent: kmax,
        locals,
    })
}

/// Dirichlet inverse of `h` as a spec. The local series at the given primes
/// up to `p^K` are computed once to validate `h(1) = 1`.
pub fn dirichlet_inverse(h: &FunctionSpec, primes: &[u32], k: u32) -> Result<FunctionSpec> {
    for &p in primes {
        let local = h.local_series(p as u64, k)?;
        if local[0] != ONE {
            return Err(invalid(format!("h(1) must be 1 for a Dirichlet inverse, got {}", local[0])));
        }
    }
    Ok(FunctionSpec::new(
        format!("inv({})", h.name),
        Kind::GeneralMultiplicative,
        false,
        Rule::Inverse {
            base: Box::new(h.clone()),
        },
    ))
}

/// `(f * h)(n) = sum_{dm = n} f(d) h(m)` for `n <= n_max`, scattering over
/// `d` ascending then `m` ascending.
pub fn convolve_table(f: &ValueTable, h: &ValueTable, n_max: u64) -> Result<ValueTable> {
    if f.limit() < n_max || h.limit() < n_max {
        return Err(invalid(format!(
            "tables cover [1, {}] and [1, {}], convolution needs [1, {n_max}]",
            f.limit(),
            h.limit()
        )));
    }
    if n_max < 1 {
        return Err(invalid("convolution limit must be at least 1"));
    }
    let n = n_max as usize;
    let fv = f.as_slice();
    let hv = h.as_slice();
    let mut out = vec![ZERO; n + 1];
    for d in 1..=n {
        let fd = fv[d];
        if fd == ZERO {
            continue;
        }
        for m in 1..=n / d {
            out[d * m] += fd * hv[m];
        }
    }
    ValueTable::from_values(format!("{}*{}", f.spec_name, h.spec_name), out)
}

/// Dense Dirichlet inverse of an arbitrary arithmetic function with `f(1) = 1`.
pub fn inverse_table(f: &ValueTable) -> Result<ValueTable> {
    let fv = f.as_slice();
    if fv[1] != ONE {
        return Err(invalid(format!("f(1) must be 1 for a Dirichlet inverse, got {}", fv[1])));
    }
    let n = f.limit() as usize;
    let mut inv = vec![ZERO; n + 1];
    inv[1] = ONE;
    // inv(m) is final once every proper divisor contribution has been scattered
    let mut acc = vec![ZERO; n + 1];
    for m in 1..=n {
        if m > 1 {
            inv[m] = -acc[m];
        }
        let im = inv[m];
        if im == ZERO {
            continue;
        }
        for d in 2..=n / m {
            acc[d * m] += fv[d] * im;
        }
    }
    ValueTable::from_values(format!("inv({})", f.spec_name), inv)
}

/// `D_f(k, p)`: determinant of the `k x k` lower Hessenberg Toeplitz matrix
/// `a_ij = f(p^{i-j+1})` (zero above the superdiagonal, ones on it).
///
/// Expanding along the last row, the minor of entry `(k, j)` is block
/// triangular with determinant `D_f(j-1, p)`, which gives
/// `D_k = sum_{i=1}^k (-1)^{i+1} f(p^i) D_{k-i}` with `D_0 = 1`. The whole
/// sequence `D_0..D_k` costs `O(k^2)`.
pub fn determinant_sequence(f_local: &[Complex64], k: u32) -> Vec<Complex64> {
    assert!(f_local.len() > k as usize, "local series too short for D_f({k}, p)");
    let k = k as usize;
    let mut d = Vec::with_capacity(k + 1);
    d.push(ONE);
    for n in 1..=k {
        let mut acc = ZERO;
        for i in 1..=n {
            let t = f_local[i] * d[n - i];
            if i % 2 == 1 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        d.push(acc);
    }
    d
}

fn check_det_bound(k: u32, bound: u32) -> Result<()> {
    if k > bound {
        return Err(Error::Limit {
            what: "determinant size k",
            value: k as u64,
            bound: bound as u64,
        });
    }
    Ok(())
}

/// `D_f(k, p)` via the cofactor recursion.
pub fn determinant_df(f: &FunctionSpec, p: u64, k: u32) -> Result<Complex64> {
    check_det_bound(k, DEFAULT_DET_BOUND)?;
    let local = f.local_series(p, k.max(1))?;
    Ok(determinant_sequence(&local, k)[k as usize])
}

/// The matrix behind `D_f(k, p)`, row-major.
pub fn df_matrix(f_local: &[Complex64], k: usize) -> Vec<Vec<Complex64>> {
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let e = i as i64 - j as i64 + 1;
                    if e >= 0 {
                        f_local[e as usize]
                    } else {
                        ZERO
                    }
                })
                .collect()
        })
        .collect()
}

/// Determinant by Gaussian elimination with partial pivoting, `O(k^3)`.
pub fn determinant_generic(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut det = ONE;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
            .unwrap();
        if a[pivot][col] == ZERO {
            return ZERO;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let pv = a[col][col];
        det *= pv;
        for r in col + 1..n {
            let factor = a[r][col] / pv;
            if factor == ZERO {
                continue;
            }
            let (upper, lower) = a.split_at_mut(r);
            for (x, &y) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x -= factor * y;
            }
        }
    }
    det
}

/// `D_f(k, p)` from the explicit matrix; retained as an independent check of
/// the recursion.
pub fn determinant_df_generic(f: &FunctionSpec, p: u64, k: u32) -> Result<Complex64> {
    check_det_bound(k, DEFAULT_DET_BOUND)?;
    let local = f.local_series(p, k.max(1))?;
    Ok(determinant_generic(df_matrix(&local, k as usize)))
}

/// `h(p^n) = sum_{k=0}^{n-1} (-1)^k (g(p^{n-k}) - f(p^{n-k})) D_f(k, p)`.
pub fn h_via_determinant(f: &FunctionSpec, g: &FunctionSpec, p: u64, n: u32) -> Result<Complex64> {
    if n == 0 {
        return Err(invalid("h_via_determinant needs n >= 1"));
    }
    check_det_bound(n - 1, DEFAULT_DET_BOUND)?;
    let fl = f.local_series(p, n)?;
    let gl = g.local_series(p, n)?;
    let d = determinant_sequence(&fl, n - 1);
    let mut acc = ZERO;
    for k in 0..n as usize {
        let t = (gl[n as usize - k] - fl[n as usize - k]) * d[k];
        if k % 2 == 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetBoundRow {
    pub n: u32,
    pub abs_det: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `|D_f(n, p)|` against `2^{n-1} p^{n delta}` for `1 <= n <= k_max`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetBoundReport {
    pub prime: u64,
    pub delta: f64,
    pub rows: Vec<DetBoundRow>,
    /// Exponents `k` where the hypothesis `|f(p^k)| <= p^{k delta}` fails.
    pub hypothesis_violations: Vec<u32>,
}

impl DetBoundReport {
    pub fn all_pass(&self) -> bool {
        self.hypothesis_violations.is_empty() && self.rows.iter().all(|r| r.pass)
    }
}

pub fn determinant_bound_check(f: &FunctionSpec, p: u64, k_max: u32, delta: f64) -> Result<DetBoundReport> {
    check_det_bound(k_max, DEFAULT_DET_BOUND)?;
    let local = f.local_series(p, k_max.max(1))?;
    let pf = p as f64;
    let hypothesis_violations = (1..=k_max)
        .filter(|&k| local[k as usize].norm() > pf.powf(k as f64 * delta) * (1.0 + 1e-12))
        .collect();
    let d = determinant_sequence(&local, k_max);
    let rows = (1..=k_max)
        .map(|n| {
            let abs_det = d[n as usize].norm();
            let bound = 2f64.powi(n as i32 - 1) * pf.powf(n as f64 * delta);
            DetBoundRow {
                n,
                abs_det,
                bound,
                pass: abs_det <= bound * (1.0 + 1e-12),
            }
        })
        .collect();
    Ok(DetBoundReport {
        prime: p,
        delta,
        rows,
        hypothesis_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{alternating, dirichlet_character, divisor_function, squarefree_restrict, standard_spec, Standard};
    use crate::sieve::build_sieve;
    use crate::table::evaluate;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn convolution_identity_and_moebius() {
        let s = build_sieve(100).unwrap();
        let delta = evaluate(&standard_spec(Standard::Delta), &s, 100).unwrap();
        let chi = evaluate(&dirichlet_character(5, 1).unwrap(), &s, 100).unwrap();
        let out = convolve_table(&delta, &chi, 100).unwrap();
        assert_eq!(out.as_slice(), chi.as_slice());

        let one = evaluate(&standard_spec(Standard::One), &s, 100).unwrap();
        let mu = evaluate(&standard_spec(Standard::Moebius), &s, 100).unwrap();
        let out = convolve_table(&one, &mu, 100).unwrap();
        // direct divisor sums
        for n in 1..=100u64 {
            let direct: f64 = (1..=n).filter(|d| n % d == 0).map(|d| mu.get(d).re).sum();
            assert_eq!(out.get(n).re, direct);
            assert_eq!(out.get(n), if n == 1 { ONE } else { ZERO });
        }
        let dd = convolve_table(&one, &one, 100).unwrap();
        assert_eq!(dd.get(12), c(6.0));
        assert!(convolve_table(&one, &mu.truncated(50).unwrap(), 100).is_err());
    }

    #[test]
    fn quotient_examples() {
        let s = build_sieve(200).unwrap();
        let chi = dirichlet_character(4, 1).unwrap();
        let q = solve_quotient(&chi, &chi, s.primes(), 6).unwrap();
        assert!(q.locals.iter().all(|l| l.coeffs[1..].iter().all(|&z| z == ZERO)));

        let one = standard_spec(Standard::One);
        let q = solve_quotient(&alternating(), &one, &[2, 3, 5], 20).unwrap();
        let l2 = q.local(2).unwrap();
        for k in 0..=20 {
            assert_eq!(l2.coeffs[k], c(2f64.powi(k as i32)));
        }
        assert!(q.local(3).unwrap().coeffs[1..].iter().all(|&z| z == ZERO));

        let sq = squarefree_restrict(&chi);
        let q = solve_quotient(&chi, &sq, s.primes(), 3).unwrap();
        for l in &q.locals {
            if l.prime == 2 {
                assert_eq!(l.coeffs, vec![ONE, ZERO, ZERO, ZERO]);
            } else {
                assert_eq!(l.coeffs, vec![ONE, ZERO, -ONE, ZERO]);
            }
        }
        assert!(q.max_residual(&chi, &sq).unwrap() <= 1e-10);
    }

    #[test]
    fn quotient_json_layout() {
        let q = solve_quotient(&alternating(), &standard_spec(Standard::One), &[3, 2], 2).unwrap();
        assert_eq!(
            q.to_json().unwrap(),
            r#"[{"prime":2,"coeffs":[[1.0,0.0],[2.0,0.0],[4.0,0.0]]},{"prime":3,"coeffs":[[1.0,0.0],[0.0,0.0],[0.0,0.0]]}]"#
        );
    }

    #[test]
    fn inverse_examples() {
        let s = build_sieve(1000).unwrap();
        let delta = standard_spec(Standard::Delta);
        let inv = dirichlet_inverse(&delta, s.primes(), 5).unwrap();
        let t = evaluate(&inv, &s, 1000).unwrap();
        assert!((2..=1000).all(|n| t.get(n) == ZERO));

        let one = standard_spec(Standard::One);
        let inv = evaluate(&dirichlet_inverse(&one, s.primes(), 5).unwrap(), &s, 1000).unwrap();
        let mu = evaluate(&standard_spec(Standard::Moebius), &s, 1000).unwrap();
        assert_eq!(inv.as_slice(), mu.as_slice());

        // dense inverse of a non-multiplicative table
        let mut vals = vec![ZERO; 51];
        for (n, v) in vals.iter_mut().enumerate().skip(1) {
            *v = c(1.0 / n as f64);
        }
        let f = ValueTable::from_values("recip", vals).unwrap();
        let finv = inverse_table(&f).unwrap();
        let conv = convolve_table(&f, &finv, 50).unwrap();
        assert!((1..=50).all(|n| (conv.get(n) - if n == 1 { ONE } else { ZERO }).norm() < 1e-14));

        let mut bad = vec![ZERO; 5];
        bad[1] = c(2.0);
        assert!(inverse_table(&ValueTable::from_values("bad", bad).unwrap()).is_err());
    }

    #[test]
    fn determinant_examples() {
        let chi = dirichlet_character(5, 2).unwrap();
        assert_eq!(determinant_df(&chi, 7, 0).unwrap(), ONE);
        assert!(determinant_df(&chi, 7, 2).unwrap().norm() < 1e-12);
        let d = divisor_function(2);
        assert_eq!(determinant_df(&d, 11, 3).unwrap(), ZERO);
        assert_eq!(determinant_df_generic(&d, 11, 3).unwrap(), ZERO);
        assert_eq!(determinant_df(&d, 11, 2).unwrap(), ONE);
        assert!(matches!(determinant_df(&d, 11, 65), Err(Error::Limit { .. })));
        let m = df_matrix(&[ONE, c(2.0), c(3.0), c(4.0)], 3);
        assert_eq!(m, vec![vec![c(2.0), ONE, ZERO], vec![c(3.0), c(2.0), ONE], vec![c(4.0), c(3.0), c(2.0)]]);
    }

    #[test]
    fn recursion_matches_generic_determinant() {
        for seed in 0..10u64 {
            let f = crate::constructions::random_unit_disc(seed, false);
            for p in [2u64, 3, 13] {
                for k in 0..=10 {
                    let a = determinant_df(&f, p, k).unwrap();
                    let b = determinant_df_generic(&f, p, k).unwrap();
                    assert!((a - b).norm() <= 1e-9 * b.norm().max(1.0), "seed {seed} p {p} k {k}");
                }
            }
        }
    }

    #[test]
    fn h_via_determinant_examples() {
        let f = crate::constructions::random_unit_disc(3, true);
        let g = crate::constructions::random_unit_disc(4, true);
        for p in [2u64, 5, 97] {
            let fp = f.prime_power(p, 1).unwrap();
            let gp = g.prime_power(p, 1).unwrap();
            let got = h_via_determinant(&f, &g, p, 2).unwrap();
            assert!((got - gp * (gp - fp)).norm() < 1e-12);
        }
        assert_eq!(h_via_determinant(&f, &f, 7, 4).unwrap(), ZERO);
        let f = crate::constructions::random_unit_disc(5, false);
        let g = crate::constructions::random_unit_disc(6, false);
        let q = solve_quotient(&f, &g, &[7], 5).unwrap();
        let got = h_via_determinant(&f, &g, 7, 5).unwrap();
        assert!((got - q.local(7).unwrap().coeffs[5]).norm() <= 1e-10);
    }

    #[test]
    fn bound_check_examples() {
        let chi = dirichlet_character(7, 1).unwrap();
        let r = determinant_bound_check(&chi, 11, 12, 0.0).unwrap();
        assert!(r.all_pass());
        let d = divisor_function(2);
        for p in [5u64, 7, 11, 101] {
            assert!(determinant_bound_check(&d, p, 10, 0.5).unwrap().all_pass());
        }
        let two_k = FunctionSpec::new(
            "2^k",
            Kind::CompletelyMultiplicative,
            false,
            Rule::Table(crate::spec::PrimePowerTable {
                entries: [(2u64, (1..=8).map(|k| c(2f64.powi(k))).collect())].into_iter().collect(),
                missing_prime: crate::spec::TableDefault::One,
                beyond_length: crate::spec::TableDefault::Error,
            }),
        );
        let r = determinant_bound_check(&two_k, 2, 8, 0.0).unwrap();
        assert_eq!(r.hypothesis_violations, (1..=8).collect::<Vec<_>>());
        assert!(!r.all_pass());
    }
}
