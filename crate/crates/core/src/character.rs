//! Dirichlet characters from the structure of `(Z/qZ)^*`, and the Kronecker
//! symbol for quadratic characters.

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Largest modulus accepted by [`CharacterTable::new`].
pub const MAX_MODULUS: u64 = 1_000_000;

/// One cyclic factor of the unit group: a generator of order `order` inside
/// the prime-power component of modulus `component`.
#[derive(Clone, Debug)]
struct CyclicFactor {
    component: u64,
    order: u64,
    // discrete log table on residues mod `component`; u32::MAX for non-units
    log: Vec<u32>,
    // the 2-power component with e >= 3 splits as <-1> x <5>; this marks the <-1> part
    sign_part: bool,
}

/// Values of a single character on all residues mod `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterTable {
    pub modulus: u64,
    pub index: u64,
    pub order: u64,
    pub values: Vec<Complex64>,
}

impl CharacterTable {
    /// Character number `index` mod `q`, `0 <= index < phi(q)`; index 0 is principal.
    ///
    /// The unit group is written as a product of cyclic factors (ascending
    /// primes; for `2^e`, `e >= 3`, the factors `<-1>` then `<5>`), and `index`
    /// is read in mixed radix over their orders, least significant digit first.
    pub fn new(q: u64, index: u64) -> Result<Self> {
        if q == 0 || q > MAX_MODULUS {
            return Err(invalid(format!("character modulus must be in [1, {MAX_MODULUS}], got {q}")));
        }
        let factors = unit_group_factors(q)?;
        let phi: u64 = factors.iter().map(|f| f.order).product();
        if index >= phi {
            return Err(invalid(format!(
                "character index {index} out of range for modulus {q} (phi = {phi})"
            )));
        }
        let mut digits = Vec::with_capacity(factors.len());
        let mut rest = index;
        for f in &factors {
            digits.push(rest % f.order);
            rest /= f.order;
        }
        // common denominator for the phases
        let denom = factors.iter().fold(1u64, |acc, f| lcm(acc, f.order));

        let mut values = vec![Complex64::new(0.0, 0.0); q as usize];
        let mut char_order = 1u64;
        for (a, slot) in values.iter_mut().enumerate() {
            let a = a as u64;
            if gcd(a, q) != 1 {
                continue;
            }
            let mut phase = 0u64;
            for (f, &c) in factors.iter().zip(&digits) {
                let r = a % f.component;
                let e = if f.sign_part {
                    // residues = 1 mod 4 are in <5>
                    u64::from(r % 4 == 3)
                } else {
                    f.log[r as usize] as u64
                };
                phase = (phase + (c * e % f.order) * (denom / f.order)) % denom;
            }
            let g = gcd(phase, denom);
            char_order = lcm(char_order, denom / g);
            *slot = root_of_unity(phase, denom);
        }
        if q == 1 {
            values[0] = Complex64::new(1.0, 0.0);
        }
        Ok(Self {
            modulus: q,
            index,
            order: char_order,
            values,
        })
    }

    #[inline]
    pub fn value(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus) as usize]
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2
    }
}

/// Number of characters mod `q`, i.e. Euler's phi.
pub fn character_count(q: u64) -> u64 {
    factor_small(q)
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// `exp(2 pi i num / den)`, exact at multiples of a quarter turn.
pub fn root_of_unity(num: u64, den: u64) -> Complex64 {
    let num = num % den;
    if (4 * num) % den == 0 {
        return match 4 * num / den {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = std::f64::consts::TAU * num as f64 / den as f64;
    Complex64::new(theta.cos(), theta.sin())
}

fn unit_group_factors(q: u64) -> Result<Vec<CyclicFactor>> {
    let mut out = Vec::new();
    for (p, e) in factor_small(q) {
        let m = p.pow(e);
        if p == 2 {
            match e {
                1 => {}
                2 => out.push(cyclic_factor(4, 3, 2)),
                _ => {
                    out.push(CyclicFactor {
                        component: m,
                        order: 2,
                        log: Vec::new(),
                        sign_part: true,
                    });
                    out.push(two_power_five_factor(m));
                }
            }
        } else {
            let g = primitive_root_prime_power(p, e);
            out.push(cyclic_factor(m, g, (p - 1) * p.pow(e - 1)));
        }
    }
    Ok(out)
}

fn cyclic_factor(m: u64, g: u64, order: u64) -> CyclicFactor {
    let mut log = vec![u32::MAX; m as usize];
    let mut x = 1u64;
    for k in 0..order {
        log[x as usize] = k as u32;
        x = x * g % m;
    }
    CyclicFactor {
        component: m,
        order,
        log,
        sign_part: false,
    }
}

// <5> inside (Z/2^e)^*, e >= 3. Residues = 3 mod 4 are logged through -a.
fn two_power_five_factor(m: u64) -> CyclicFactor {
    let order = m / 4;
    let mut log = vec![u32::MAX; m as usize];
    let mut x = 1u64;
    for k in 0..order {
        log[x as usize] = k as u32;
        log[(m - x) as usize] = k as u32;
        x = x * 5 % m;
    }
    CyclicFactor {
        component: m,
        order,
        log,
        sign_part: false,
    }
}

fn primitive_root_prime_power(p: u64, e: u32) -> u64 {
    let phi = p - 1;
    let rs: Vec<u64> = factor_small(phi).into_iter().map(|(r, _)| r).collect();
    let mut g = 2u64;
    loop {
        if g % p != 0 && rs.iter().all(|&r| pow_mod(g, phi / r, p) != 1) {
            break;
        }
        g += 1;
    }
    if p == 2 {
        return 1;
    }
    if e >= 2 && pow_mod(g, p - 1, p * p) == 1 {
        g += p;
    }
    g
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

pub(crate) fn factor_small(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Kronecker symbol `(d / n)`.
pub fn kronecker(d: i64, n: u64) -> i32 {
    if n == 0 {
        return i32::from(d == 1 || d == -1);
    }
    let mut n = n;
    let mut result = 1i32;
    // factor out powers of two: (d/2) = 0 if d even, 1 if d = +-1 mod 8, -1 if d = +-3 mod 8
    let twos = n.trailing_zeros();
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        let r = d.rem_euclid(8);
        if twos % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
        n >>= twos;
    }
    // now n odd: Jacobi symbol (d mod n / n)
    if n == 1 {
        return result;
    }
    let mut a = d.rem_euclid(n as i64) as u64;
    let mut m = n;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = m % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        (a, m) = (m, a);
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

/// Whether `d` is a fundamental discriminant (excluding 1).
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let squarefree = |m: u64| factor_small(m).iter().all(|&(_, e)| e == 1);
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn mod4_nonprincipal() {
        let chi = CharacterTable::new(4, 1).unwrap();
        let vals: Vec<f64> = [1u64, 3, 5, 7].iter().map(|&n| chi.value(n).re).collect();
        assert_eq!(vals, vec![1.0, -1.0, 1.0, -1.0]);
        assert_eq!(chi.value(2), Complex64::new(0.0, 0.0));
        assert!(chi.is_real());
    }

    #[test]
    fn modulus_one_is_constant() {
        let chi = CharacterTable::new(1, 0).unwrap();
        assert!((1..50).all(|n| chi.value(n) == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn index_out_of_range() {
        assert!(CharacterTable::new(8, 4).is_err());
        assert!(CharacterTable::new(0, 0).is_err());
    }

    #[test]
    fn orthogonality_mod_8() {
        let chars: Vec<_> = (0..4).map(|i| CharacterTable::new(8, i).unwrap()).collect();
        for (i, a) in chars.iter().enumerate() {
            for (j, b) in chars.iter().enumerate() {
                let s: Complex64 = (1..=8).map(|n| a.value(n) * b.value(n).conj()).sum();
                let want = if i == j { 4.0 } else { 0.0 };
                assert!(close(s, Complex64::new(want, 0.0)), "({i},{j}) -> {s}");
            }
        }
    }

    #[test]
    fn characters_are_multiplicative_periodic_and_distinct() {
        for q in 1..=60u64 {
            let phi = character_count(q);
            let mut seen: Vec<Vec<Complex64>> = Vec::new();
            for idx in 0..phi {
                let chi = CharacterTable::new(q, idx).unwrap();
                for m in 1..=q {
                    for n in 1..=q {
                        assert!(close(chi.value(m * n), chi.value(m) * chi.value(n)));
                    }
                }
                for n in 1..=3 * q {
                    assert_eq!(chi.value(n + q), chi.value(n));
                    if gcd(n, q) == 1 {
                        assert!((chi.value(n).norm() - 1.0).abs() < 1e-12);
                    }
                }
                assert!(!seen.iter().any(|v| v.iter().zip(&chi.values).all(|(a, b)| close(*a, *b))));
                seen.push(chi.values.clone());
            }
        }
    }

    #[test]
    fn kronecker_matches_real_characters() {
        // -4 -> chi mod 4, -3 -> chi mod 3, 5 -> the real character mod 5, 8 and -8 mod 8
        for &(d, q) in &[(-4i64, 4u64), (-3, 3), (5, 5), (8, 8), (-8, 8), (12, 12)] {
            assert!(is_fundamental_discriminant(d));
            let found = (1..character_count(q)).any(|i| {
                let chi = CharacterTable::new(q, i).unwrap();
                (1..=4 * q).all(|n| chi.value(n) == Complex64::new(kronecker(d, n) as f64, 0.0))
            });
            assert!(found, "no character matches kronecker({d}, .)");
        }
        assert!(!is_fundamental_discriminant(4));
        assert!(!is_fundamental_discriminant(-12 * 4));
    }

    #[test]
    fn kronecker_small_values() {
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-4, 5), 1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(8, 3), -1);
        assert_eq!(kronecker(8, 7), 1);
    }
}
