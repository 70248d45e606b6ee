//! Multiplicative functions described by their values at prime powers.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::character::{kronecker, CharacterTable};
use crate::dirichlet::{divide_local, multiply_local};
use crate::error::{Error, Result};
use crate::sieve::is_prime_u64;
use crate::symmetric::complete_homogeneous_series;

pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    CompletelyMultiplicative,
    GeneralMultiplicative,
    DegreeDComposite,
    Tabulated,
}

/// A multiplicative function. `f(1) = 1` and `f(p^0) = 1` are implicit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub name: String,
    pub kind: Kind,
    /// Claim that `|f(p^k)| <= 1` everywhere.
    pub bounded_by_one: bool,
    /// Claim `f(n) = o(n^delta)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth_delta: Option<f64>,
    pub rule: Rule,
}

/// How to produce the local series `f(p^0), f(p^1), ...` at a prime.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Rule {
    One,
    Delta,
    Moebius,
    Liouville,
    /// `(-1)^{n+1}`: `-1` on every positive power of 2, `1` elsewhere.
    Alternating,
    Character(CharacterRule),
    Kronecker {
        discriminant: i64,
    },
    /// `p -> p^{it}`, completely multiplicative.
    ArchimedeanTwist {
        t: f64,
    },
    /// `p -> e(amplitude / p^exponent) base(p)`, completely multiplicative.
    DecayingTwist {
        base: Box<FunctionSpec>,
        amplitude: f64,
        exponent: f64,
    },
    /// `f(p) = 1` for `p` in `[2^a, 2^{a+1})`, `a` in `exponents`; `base(p)` otherwise.
    SparseDyadic {
        base: Box<FunctionSpec>,
        exponents: Vec<u32>,
    },
    OptimalityTwist(OptimalityTwist),
    SquarefreeRestrict {
        base: Box<FunctionSpec>,
    },
    /// Dirichlet convolution of the factors.
    Convolution {
        factors: Vec<FunctionSpec>,
    },
    /// `h` with `g = f * h`.
    Quotient {
        f: Box<FunctionSpec>,
        g: Box<FunctionSpec>,
    },
    /// Dirichlet inverse of `base`.
    Inverse {
        base: Box<FunctionSpec>,
    },
    /// Values `radius * exp(2 pi i u)`, `u` uniform, drawn from a ChaCha8
    /// stream keyed by `(seed, p, k)`. With `complete`, only `k = 1` is drawn
    /// and higher powers follow complete multiplicativity.
    RandomUnit {
        seed: u64,
        complete: bool,
        #[serde(default = "default_radius")]
        radius: f64,
    },
    Table(PrimePowerTable),
}

fn default_radius() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharacterRule {
    pub modulus: u64,
    pub index: u64,
    #[serde(skip)]
    table: OnceLock<Arc<CharacterTable>>,
}

impl CharacterRule {
    pub fn new(modulus: u64, index: u64) -> Result<Self> {
        let table = CharacterTable::new(modulus, index)?;
        let cell = OnceLock::new();
        let _ = cell.set(Arc::new(table));
        Ok(Self {
            modulus,
            index,
            table: cell,
        })
    }

    pub fn table(&self) -> Result<&CharacterTable> {
        if let Some(t) = self.table.get() {
            return Ok(t);
        }
        let built = Arc::new(CharacterTable::new(self.modulus, self.index)?);
        Ok(self.table.get_or_init(|| built))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignBranch {
    /// `omega_p = -sign(Im f(p))`, chosen when the imaginary-part series looks divergent.
    ImaginaryPart,
    /// `omega_p = sign(Re f(p))`.
    RealPart,
}

/// `g(p) = e(omega_p / (p^{(1-beta)/2} log log p)) f(p)` for `p >= 5`, `g(p) = f(p)` for `p` in {2, 3}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimalityTwist {
    pub base: Box<FunctionSpec>,
    pub beta: f64,
    pub branch: SignBranch,
    /// Value of `sum_{5 <= p <= cutoff} |Im f(p)| / (p log log p)` that decided the branch.
    pub diagnostic: f64,
    pub diagnostic_cutoff: u64,
    pub threshold: f64,
}

/// Primes with `log log p` at or below this are left untwisted.
pub const TWIST_LOGLOG_FLOOR: f64 = 0.1;

/// `sign(0) = +1`.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

impl OptimalityTwist {
    pub fn is_twisted(p: u64) -> bool {
        (p as f64).ln().ln() > TWIST_LOGLOG_FLOOR
    }

    /// The sign `omega_p` given `f(p)`.
    pub fn omega(&self, fp: Complex64) -> f64 {
        match self.branch {
            SignBranch::ImaginaryPart => -sign(fp.im),
            SignBranch::RealPart => sign(fp.re),
        }
    }

    pub fn twist_angle(&self, p: u64, fp: Complex64) -> f64 {
        if !Self::is_twisted(p) {
            return 0.0;
        }
        let pf = p as f64;
        self.omega(fp) / (pf.powf((1.0 - self.beta) / 2.0) * pf.ln().ln())
    }

    pub fn value_at_prime(&self, p: u64) -> Result<Complex64> {
        let fp = self.base.local_series_unchecked(p, 1)?[1];
        let angle = self.twist_angle(p, fp);
        if angle == 0.0 {
            return Ok(fp);
        }
        Ok(Complex64::from_polar(1.0, TAU * angle) * fp)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableDefault {
    /// Missing entries are an error.
    Error,
    /// Missing entries are 0 (so a missing prime behaves like the identity `delta`).
    Zero,
    /// Missing entries are 1.
    One,
}

/// Explicit prime-power values. `entries[p][k-1] = f(p^k)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrimePowerTable {
    pub entries: BTreeMap<u64, Vec<Complex64>>,
    pub missing_prime: TableDefault,
    pub beyond_length: TableDefault,
}

fn powers(z: Complex64, kmax: u32) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(kmax as usize + 1);
    let mut acc = ONE;
    out.push(acc);
    for _ in 0..kmax {
        acc *= z;
        out.push(acc);
    }
    out
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Unit-circle draw `exp(2 pi i u)` keyed by `(seed, p, k)`.
pub fn random_unit(seed: u64, p: u64, k: u32) -> Complex64 {
    let key = splitmix64(seed ^ splitmix64(p.wrapping_mul(0x2545_F491_4F6C_DD1D) ^ u64::from(k)));
    let u: f64 = ChaCha8Rng::seed_from_u64(key).gen();
    Complex64::from_polar(1.0, TAU * u)
}

impl FunctionSpec {
    pub fn new(name: impl Into<String>, kind: Kind, bounded_by_one: bool, rule: Rule) -> Self {
        Self {
            name: name.into(),
            kind,
            bounded_by_one,
            growth_delta: None,
            rule,
        }
    }

    pub fn with_growth_delta(mut self, delta: f64) -> Self {
        self.growth_delta = Some(delta);
        self
    }

    /// `f(p^k)`, validating that `p` is prime.
    pub fn prime_power(&self, p: u64, k: u32) -> Result<Complex64> {
        Ok(self.local_series(p, k)?[k as usize])
    }

    /// `[f(1), f(p), ..., f(p^kmax)]`, validating that `p` is prime.
    pub fn local_series(&self, p: u64, kmax: u32) -> Result<Vec<Complex64>> {
        if !is_prime_u64(p) {
            return Err(self.rule_error(p, kmax, "queried at a non-prime"));
        }
        self.local_series_unchecked(p, kmax)
    }

    pub(crate) fn rule_error(&self, p: u64, k: u32, message: impl Into<String>) -> Error {
        Error::Rule {
            spec: self.name.clone(),
            p,
            k,
            message: message.into(),
        }
    }

    /// Local series at a prime the caller already knows to be prime.
    pub fn local_series_unchecked(&self, p: u64, kmax: u32) -> Result<Vec<Complex64>> {
        let n = kmax as usize + 1;
        let series = match &self.rule {
            Rule::One => vec![ONE; n],
            Rule::Delta => {
                let mut v = vec![ZERO; n];
                v[0] = ONE;
                v
            }
            Rule::Moebius => {
                let mut v = vec![ZERO; n];
                v[0] = ONE;
                if n > 1 {
                    v[1] = -ONE;
                }
                v
            }
            Rule::Liouville => powers(-ONE, kmax),
            Rule::Alternating => {
                let mut v = vec![if p == 2 { -ONE } else { ONE }; n];
                v[0] = ONE;
                v
            }
            Rule::Character(c) => powers(c.table()?.value(p), kmax),
            Rule::Kronecker { discriminant } => {
                powers(Complex64::new(kronecker(*discriminant, p) as f64, 0.0), kmax)
            }
            Rule::ArchimedeanTwist { t } => powers(Complex64::from_polar(1.0, t * (p as f64).ln()), kmax),
            Rule::DecayingTwist {
                base,
                amplitude,
                exponent,
            } => {
                let fp = base.local_series_unchecked(p, 1)?[1];
                let angle = TAU * amplitude / (p as f64).powf(*exponent);
                powers(Complex64::from_polar(1.0, angle) * fp, kmax)
            }
            Rule::SparseDyadic { base, exponents } => {
                let inside = exponents.iter().any(|&a| {
                    let lo = 1u64 << a;
                    p >= lo && p < lo << 1
                });
                let z = if inside { ONE } else { base.local_series_unchecked(p, 1)?[1] };
                powers(z, kmax)
            }
            Rule::OptimalityTwist(tw) => powers(tw.value_at_prime(p)?, kmax),
            Rule::SquarefreeRestrict { base } => {
                let mut v = vec![ZERO; n];
                v[0] = ONE;
                if n > 1 {
                    v[1] = base.local_series_unchecked(p, 1)?[1];
                }
                v
            }
            Rule::Convolution { factors } => {
                if factors.iter().all(|f| f.kind == Kind::CompletelyMultiplicative) {
                    let xs = factors
                        .iter()
                        .map(|f| Ok(f.local_series_unchecked(p, 1)?[1]))
                        .collect::<Result<Vec<_>>>()?;
                    complete_homogeneous_series(&xs, kmax)
                } else {
                    let mut acc = vec![ZERO; n];
                    acc[0] = ONE;
                    for f in factors {
                        acc = multiply_local(&acc, &f.local_series_unchecked(p, kmax)?);
                    }
                    acc
                }
            }
            Rule::Quotient { f, g } => {
                let fl = f.local_series_unchecked(p, kmax)?;
                let gl = g.local_series_unchecked(p, kmax)?;
                divide_local(&gl, &fl).map_err(|m| self.rule_error(p, kmax, m))?
            }
            Rule::Inverse { base } => {
                let bl = base.local_series_unchecked(p, kmax)?;
                let mut delta = vec![ZERO; n];
                delta[0] = ONE;
                divide_local(&delta, &bl).map_err(|m| self.rule_error(p, kmax, m))?
            }
            Rule::RandomUnit {
                seed,
                complete,
                radius,
            } => {
                if *complete {
                    powers(random_unit(*seed, p, 1) * *radius, kmax)
                } else {
                    let mut v = Vec::with_capacity(n);
                    v.push(ONE);
                    v.extend((1..=kmax).map(|k| random_unit(*seed, p, k) * *radius));
                    v
                }
            }
            Rule::Table(t) => {
                let mut v = Vec::with_capacity(n);
                v.push(ONE);
                let entry = t.entries.get(&p);
                for k in 1..=kmax {
                    let got = match entry {
                        Some(vals) => match vals.get(k as usize - 1) {
                            Some(&z) => Some(z),
                            None => default_value(t.beyond_length),
                        },
                        None => default_value(t.missing_prime),
                    };
                    match got {
                        Some(z) => v.push(z),
                        None => return Err(self.rule_error(p, k, "no tabulated value")),
                    }
                }
                v
            }
        };
        Ok(series)
    }

    /// Spot-check the declared invariants on the given primes up to `p^kmax`.
    pub fn check_invariants(&self, primes: &[u32], kmax: u32) -> Result<()> {
        for &p in primes {
            let p = p as u64;
            let s = self.local_series_unchecked(p, kmax)?;
            if s[0] != ONE {
                return Err(self.rule_error(p, 0, "f(p^0) != 1"));
            }
            if self.kind == Kind::CompletelyMultiplicative {
                let mut acc = ONE;
                for (k, &v) in s.iter().enumerate().skip(1) {
                    acc *= s[1];
                    if (v - acc).norm() > 1e-12 * acc.norm().max(1.0) {
                        return Err(self.rule_error(p, k as u32, "not completely multiplicative"));
                    }
                }
            }
            if self.bounded_by_one {
                if let Some(k) = s.iter().position(|z| z.norm() > 1.0 + 1e-12) {
                    return Err(self.rule_error(p, k as u32, "exceeds the unit disc"));
                }
            }
        }
        Ok(())
    }

    /// Constituents when this is a convolution of completely multiplicative factors.
    pub fn constituents(&self) -> Option<&[FunctionSpec]> {
        match &self.rule {
            Rule::Convolution { factors }
                if factors.iter().all(|f| f.kind == Kind::CompletelyMultiplicative) =>
            {
                Some(factors)
            }
            _ => None,
        }
    }

    /// Degree `d` for members of S_d (completely multiplicative functions have degree 1).
    pub fn degree(&self) -> Option<usize> {
        if self.kind == Kind::CompletelyMultiplicative {
            return Some(1);
        }
        self.constituents().map(<[_]>::len)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s)?;
        spec.rebuild_caches()?;
        Ok(spec)
    }

    /// Fill lazily built tables (character values) eagerly so that parse
    /// errors surface at load time instead of mid-evaluation.
    fn rebuild_caches(&self) -> Result<()> {
        match &self.rule {
            Rule::Character(c) => c.table().map(|_| ()),
            Rule::DecayingTwist { base, .. }
            | Rule::SparseDyadic { base, .. }
            | Rule::SquarefreeRestrict { base }
            | Rule::Inverse { base } => base.rebuild_caches(),
            Rule::OptimalityTwist(t) => t.base.rebuild_caches(),
            Rule::Convolution { factors } => factors.iter().try_for_each(|f| f.rebuild_caches()),
            Rule::Quotient { f, g } => {
                f.rebuild_caches()?;
                g.rebuild_caches()
            }
            _ => Ok(()),
        }
    }
}

fn default_value(d: TableDefault) -> Option<Complex64> {
    match d {
        TableDefault::Error => None,
        TableDefault::Zero => Some(ZERO),
        TableDefault::One => Some(ONE),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{dirichlet_character, standard_spec, Standard};

    #[test]
    fn non_prime_query_fails_with_context() {
        let mu = standard_spec(Standard::Moebius);
        let err = mu.prime_power(9, 1).unwrap_err();
        assert!(matches!(err, Error::Rule { p: 9, k: 1, .. }), "{err}");
    }

    #[test]
    fn json_roundtrip_rebuilds_character_table() {
        let chi = dirichlet_character(12, 3).unwrap();
        let back = FunctionSpec::from_json(&chi.to_json().unwrap()).unwrap();
        for p in [5u64, 7, 11, 13, 101] {
            assert_eq!(chi.prime_power(p, 3).unwrap(), back.prime_power(p, 3).unwrap());
        }
    }

    #[test]
    fn table_defaults() {
        let mut entries = BTreeMap::new();
        entries.insert(2u64, vec![Complex64::new(0.5, 0.0)]);
        let spec = FunctionSpec::new(
            "tab",
            Kind::Tabulated,
            true,
            Rule::Table(PrimePowerTable {
                entries,
                missing_prime: TableDefault::One,
                beyond_length: TableDefault::Error,
            }),
        );
        assert_eq!(spec.prime_power(2, 1).unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(spec.prime_power(3, 4).unwrap(), ONE);
        assert!(matches!(spec.prime_power(2, 2), Err(Error::Rule { p: 2, k: 2, .. })));
    }

    #[test]
    fn random_unit_is_replayable_and_unimodular() {
        for p in [2u64, 3, 5, 7919] {
            let a = random_unit(42, p, 1);
            assert_eq!(a, random_unit(42, p, 1));
            assert!((a.norm() - 1.0).abs() < 1e-14);
            assert_ne!(a, random_unit(43, p, 1));
        }
    }
}
