//! Complete homogeneous (`q_k`) and elementary (`r_k`) symmetric polynomials
//! and the triangular conversion between them.

use num_complex::Complex64;

use crate::spec::{ONE, ZERO};

/// `[q_0(x), ..., q_kmax(x)]` by folding in one variable at a time:
/// `q_k^{(m)} = q_k^{(m-1)} + x_m q_{k-1}^{(m)}`.
pub fn complete_homogeneous_series(x: &[Complex64], kmax: u32) -> Vec<Complex64> {
    let n = kmax as usize + 1;
    let mut q = vec![ZERO; n];
    q[0] = ONE;
    for &xm in x {
        for k in 1..n {
            let prev = q[k - 1];
            q[k] += xm * prev;
        }
    }
    q
}

/// `q_k^d(x)` with `d = x.len()`.
pub fn q_poly(k: u32, x: &[Complex64]) -> Complex64 {
    complete_homogeneous_series(x, k)[k as usize]
}

/// `[r_0(x), ..., r_d(x)]` from the product `prod (1 + x_m X)`.
pub fn elementary_series(x: &[Complex64]) -> Vec<Complex64> {
    let d = x.len();
    let mut r = vec![ZERO; d + 1];
    r[0] = ONE;
    for (m, &xm) in x.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            let prev = r[k - 1];
            r[k] += xm * prev;
        }
    }
    r
}

/// `r_k^d(x)`; zero for `k > d`.
pub fn r_poly(k: u32, x: &[Complex64]) -> Complex64 {
    let k = k as usize;
    if k > x.len() {
        return ZERO;
    }
    elementary_series(x)[k]
}

/// Solve `sum_{j=0}^k (-1)^j r_{k-j} q_j = 0` (with `q_0 = r_0 = 1`) for
/// `r_1..r_d`, given `q_1..q_d`. Unit-triangular forward substitution:
/// `r_k = sum_{j=1}^k (-1)^{j+1} r_{k-j} q_j`.
pub fn q_to_r(q: &[Complex64]) -> Vec<Complex64> {
    let d = q.len();
    let mut r = vec![ZERO; d + 1];
    r[0] = ONE;
    for k in 1..=d {
        let mut acc = ZERO;
        for j in 1..=k {
            let term = r[k - j] * q[j - 1];
            if j % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        r[k] = acc;
    }
    r.remove(0);
    r
}

/// Inverse of [`q_to_r`]: `q_1..q_kmax` from `r_1..r_d` (with `r_j = 0` for
/// `j > d`) via `q_k = sum_{j=1}^k (-1)^{j+1} r_j q_{k-j}`.
pub fn r_to_q(r: &[Complex64], kmax: usize) -> Vec<Complex64> {
    let mut q = vec![ZERO; kmax + 1];
    q[0] = ONE;
    for k in 1..=kmax {
        let mut acc = ZERO;
        for j in 1..=k.min(r.len()) {
            let term = r[j - 1] * q[k - j];
            if j % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        q[k] = acc;
    }
    q.remove(0);
    q
}

/// Residuals of the identity for `k = 1..=d` given `q_1..q_d` and `r_1..r_d`.
pub fn identity_residuals(q: &[Complex64], r: &[Complex64]) -> Vec<f64> {
    let d = q.len();
    let rr = |i: usize| if i == 0 { ONE } else { r[i - 1] };
    let qq = |i: usize| if i == 0 { ONE } else { q[i - 1] };
    (1..=d)
        .map(|k| {
            let mut acc = ZERO;
            for j in 0..=k {
                let t = rr(k - j) * qq(j);
                if j % 2 == 0 {
                    acc += t;
                } else {
                    acc -= t;
                }
            }
            acc.norm()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    // monomial enumeration, only used as an oracle
    fn q_brute(k: u32, x: &[Complex64]) -> Complex64 {
        fn rec(k: u32, x: &[Complex64]) -> Complex64 {
            match x.split_first() {
                None => {
                    if k == 0 {
                        ONE
                    } else {
                        ZERO
                    }
                }
                Some((&head, rest)) => (0..=k).map(|j| head.powu(j) * rec(k - j, rest)).sum(),
            }
        }
        rec(k, x)
    }

    fn r_brute(k: usize, x: &[Complex64]) -> Complex64 {
        let d = x.len();
        (0u32..(1 << d))
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..d).filter(|i| m >> i & 1 == 1).map(|i| x[i]).product::<Complex64>())
            .sum()
    }

    #[test]
    fn r_to_q_inverts_q_to_r() {
        let x = [c(2.0), c(-1.0), Complex64::new(0.5, 0.25)];
        let q: Vec<Complex64> = (1..=3).map(|k| q_poly(k, &x)).collect();
        let r = q_to_r(&q);
        let back = r_to_q(&r, 8);
        for k in 1..=8u32 {
            assert!((back[k as usize - 1] - q_poly(k, &x)).norm() < 1e-12, "k={k}");
        }
        assert!(r_to_q(&[], 3).iter().all(|z| *z == ZERO));
    }

    #[test]
    fn small_values() {
        assert_eq!(q_poly(0, &[c(7.0), c(3.0)]), ONE);
        assert_eq!(q_poly(2, &[c(2.0), c(3.0)]), c(19.0));
        assert_eq!(q_poly(3, &[c(1.5)]), c(1.5f64.powi(3)));
        assert_eq!(r_poly(0, &[c(2.0)]), ONE);
        assert_eq!(r_poly(3, &[c(2.0), c(3.0)]), ZERO);
        assert_eq!(r_poly(2, &[c(2.0), c(3.0)]), c(6.0));
        assert_eq!(r_poly(1, &[c(2.0), c(3.0), c(-4.0)]), c(1.0));
    }

    #[test]
    fn q_to_r_examples() {
        assert_eq!(q_to_r(&[c(5.0), c(19.0)]), vec![c(5.0), c(6.0)]);
        assert_eq!(q_to_r(&[c(-0.25)]), vec![c(-0.25)]);
        // divisor function: q = (2, 3) -> r = (2, 1)
        assert_eq!(q_to_r(&[c(2.0), c(3.0)]), vec![c(2.0), c(1.0)]);
    }

    fn unit() -> impl Strategy<Value = Complex64> {
        (0.0..1.0f64).prop_map(|u| Complex64::from_polar(1.0, std::f64::consts::TAU * u))
    }

    proptest! {
        #[test]
        fn recursion_matches_enumeration(x in prop::collection::vec(unit(), 1..5), k in 0u32..6) {
            prop_assert!((q_poly(k, &x) - q_brute(k, &x)).norm() < 1e-12);
            let want = if (k as usize) <= x.len() { r_brute(k as usize, &x) } else { ZERO };
            prop_assert!((r_poly(k, &x) - want).norm() < 1e-12);
        }

        #[test]
        fn q_r_duality(x in prop::collection::vec(unit(), 1..=6)) {
            let d = x.len() as u32;
            let q: Vec<_> = (1..=d).map(|k| q_poly(k, &x)).collect();
            let r = q_to_r(&q);
            for k in 1..=d {
                prop_assert!((r[k as usize - 1] - r_poly(k, &x)).norm() <= 1e-12);
            }
            prop_assert!(identity_residuals(&q, &r).iter().all(|&e| e <= 1e-12));
        }
    }
}
