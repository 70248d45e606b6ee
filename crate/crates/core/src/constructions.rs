//! Named example functions: characters, twists, the sparse dyadic
//! modification, the optimality twist and squarefree restriction.

use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::character::{is_fundamental_discriminant, CharacterTable};
use crate::error::{invalid, Result};
use crate::sieve::SieveIndex;
use crate::spec::{CharacterRule, FunctionSpec, Kind, OptimalityTwist, Rule, SignBranch};
use crate::summation::{prefix_sums_at, SummationMode};

/// Divergence threshold for the optimality-twist sign rule.
pub const SIGN_RULE_THRESHOLD: f64 = 10.0;
/// Default cutoff for the sign-rule diagnostic.
pub const SIGN_RULE_CUTOFF: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Standard {
    One,
    Delta,
    Moebius,
    Liouville,
}

impl FromStr for Standard {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" => Ok(Self::One),
            "delta" => Ok(Self::Delta),
            "moebius" | "mobius" | "mu" => Ok(Self::Moebius),
            "liouville" | "lambda" => Ok(Self::Liouville),
            other => Err(invalid(format!("unknown standard function `{other}`"))),
        }
    }
}

pub fn standard_spec(which: Standard) -> FunctionSpec {
    match which {
        Standard::One => FunctionSpec::new("one", Kind::CompletelyMultiplicative, true, Rule::One),
        Standard::Delta => FunctionSpec::new("delta", Kind::GeneralMultiplicative, true, Rule::Delta),
        Standard::Moebius => FunctionSpec::new("moebius", Kind::GeneralMultiplicative, true, Rule::Moebius),
        Standard::Liouville => FunctionSpec::new("liouville", Kind::CompletelyMultiplicative, true, Rule::Liouville),
    }
}

/// `(-1)^{n+1}`.
pub fn alternating() -> FunctionSpec {
    FunctionSpec::new("alternating", Kind::GeneralMultiplicative, true, Rule::Alternating)
}

/// `d`-fold divisor function `1 * ... * 1`.
pub fn divisor_function(d: usize) -> FunctionSpec {
    degree_d(vec![standard_spec(Standard::One); d], format!("d{d}"))
}

/// `f_1 * ... * f_d` for completely multiplicative unit-disc constituents.
pub fn degree_d(constituents: Vec<FunctionSpec>, name: impl Into<String>) -> FunctionSpec {
    let bounded = constituents.len() <= 1;
    let kind = if constituents.len() == 1 {
        Kind::CompletelyMultiplicative
    } else {
        Kind::DegreeDComposite
    };
    FunctionSpec::new(name, kind, bounded, Rule::Convolution { factors: constituents })
}

pub fn dirichlet_character(q: u64, index: u64) -> Result<FunctionSpec> {
    let rule = CharacterRule::new(q, index)?;
    Ok(FunctionSpec::new(
        format!("chi[{q},{index}]"),
        Kind::CompletelyMultiplicative,
        true,
        Rule::Character(rule),
    ))
}

/// Quadratic character `(D / .)` for a fundamental discriminant `D`.
pub fn kronecker_character(discriminant: i64) -> Result<FunctionSpec> {
    if !is_fundamental_discriminant(discriminant) {
        return Err(invalid(format!("{discriminant} is not a fundamental discriminant")));
    }
    Ok(FunctionSpec::new(
        format!("kronecker[{discriminant}]"),
        Kind::CompletelyMultiplicative,
        true,
        Rule::Kronecker { discriminant },
    ))
}

/// All nonprincipal characters mod `q`.
pub fn nonprincipal_characters(q: u64) -> Result<Vec<FunctionSpec>> {
    let phi = crate::character::character_count(q);
    (1..phi).map(|i| dirichlet_character(q, i)).collect()
}

/// `n -> n^{it}`.
pub fn archimedean_twist(t: f64) -> Result<FunctionSpec> {
    if !t.is_finite() || t.abs() > 1e6 {
        return Err(invalid(format!("|t| must be at most 1e6, got {t}")));
    }
    Ok(FunctionSpec::new(
        format!("n^(i{t})"),
        Kind::CompletelyMultiplicative,
        true,
        Rule::ArchimedeanTwist { t },
    ))
}

/// `p -> e(amplitude / p^exponent) f(p)`, completely multiplicative.
pub fn decaying_twist(f: &FunctionSpec, amplitude: f64, exponent: f64) -> Result<FunctionSpec> {
    if exponent <= 0.0 {
        return Err(invalid("decaying twist exponent must be positive"));
    }
    Ok(FunctionSpec::new(
        format!("{}~e({amplitude}/p^{exponent})", f.name),
        Kind::CompletelyMultiplicative,
        f.bounded_by_one,
        Rule::DecayingTwist {
            base: Box::new(f.clone()),
            amplitude,
            exponent,
        },
    ))
}

/// Interval exponent `a_j = 2^j`.
pub fn dyadic_exponent(j: u32) -> Result<u32> {
    if j > 5 {
        return Err(invalid(format!("interval index {j} too large (2^(2^j + 1) must fit in u64)")));
    }
    Ok(1 << j)
}

/// `f(p) = 1` on `[2^{a_j}, 2^{a_j + 1})` with `a_j = 2^j`, `j` in `js`; `chi(p)` elsewhere.
pub fn sparse_dyadic(chi: &FunctionSpec, js: &[u32]) -> Result<FunctionSpec> {
    if js.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("interval indices must be strictly ascending (distinct intervals)"));
    }
    let exponents = js.iter().map(|&j| dyadic_exponent(j)).collect::<Result<Vec<_>>>()?;
    Ok(FunctionSpec::new(
        format!("sparse[{}]({})", js.iter().map(u32::to_string).collect::<Vec<_>>().join(","), chi.name),
        Kind::CompletelyMultiplicative,
        chi.bounded_by_one,
        Rule::SparseDyadic {
            base: Box::new(chi.clone()),
            exponents,
        },
    ))
}

/// `sum_j 2 log 2 / a_j`: Mertens-type budget for the distance increase.
pub fn sparse_dyadic_budget(js: &[u32]) -> Result<f64> {
    js.iter()
        .map(|&j| Ok(2.0 * std::f64::consts::LN_2 / dyadic_exponent(j)? as f64))
        .sum()
}

/// `sum_{5 <= p <= cutoff} |Im f(p)| / (p log log p)`.
pub fn imaginary_part_diagnostic(f: &FunctionSpec, sieve: &SieveIndex, cutoff: u64) -> Result<f64> {
    let primes = sieve.primes_up_to(cutoff);
    let mut terms = Vec::with_capacity(primes.len());
    for &p in primes {
        let p = p as u64;
        if !OptimalityTwist::is_twisted(p) {
            continue;
        }
        let fp = f.local_series_unchecked(p, 1)?[1];
        let pf = p as f64;
        terms.push(fp.im.abs() / (pf * pf.ln().ln()));
    }
    Ok(crate::summation::ordered_sum_real(terms.len(), |i| terms[i], SummationMode::CompensatedSequential))
}

/// The optimality twist of a completely multiplicative unit-disc `f`.
///
/// The sign branch is fixed here: if the imaginary-part diagnostic up to
/// `sieve.limit()` exceeds [`SIGN_RULE_THRESHOLD`], `omega_p = -sign(Im f(p))`,
/// otherwise `omega_p = sign(Re f(p))`.
pub fn optimality_twist(f: &FunctionSpec, beta: f64, sieve: &SieveIndex) -> Result<FunctionSpec> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(invalid(format!("beta must lie in (0, 1), got {beta}")));
    }
    if f.kind != Kind::CompletelyMultiplicative {
        return Err(invalid(format!("optimality twist needs a completely multiplicative base, `{}` is not", f.name)));
    }
    let cutoff = sieve.limit();
    let diagnostic = imaginary_part_diagnostic(f, sieve, cutoff)?;
    let branch = if diagnostic > SIGN_RULE_THRESHOLD {
        SignBranch::ImaginaryPart
    } else {
        SignBranch::RealPart
    };
    Ok(FunctionSpec::new(
        format!("twist[{beta}]({})", f.name),
        Kind::CompletelyMultiplicative,
        f.bounded_by_one,
        Rule::OptimalityTwist(OptimalityTwist {
            base: Box::new(f.clone()),
            beta,
            branch,
            diagnostic,
            diagnostic_cutoff: cutoff,
            threshold: SIGN_RULE_THRESHOLD,
        }),
    ))
}

/// Checkpointed partials of `P_f(tau) = sum_p i omega_p f(p) / (p^tau log log p)`
/// over the twisted primes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PfSeries {
    pub tau: f64,
    pub cutoffs: Vec<u64>,
    pub partials: Vec<Complex64>,
}

pub fn p_f_partials(twist: &FunctionSpec, tau: f64, sieve: &SieveIndex, cutoffs: &[u64]) -> Result<PfSeries> {
    let Rule::OptimalityTwist(tw) = &twist.rule else {
        return Err(invalid(format!("`{}` is not an optimality twist", twist.name)));
    };
    if tau < 1.0 {
        return Err(invalid("tau must be at least 1"));
    }
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("cutoffs must be strictly increasing"));
    }
    let top = cutoffs.last().copied().unwrap_or(0);
    if top > sieve.limit() {
        return Err(crate::Error::OutOfRange {
            what: "P_f cutoff",
            value: top as f64,
            limit: sieve.limit() as f64,
        });
    }
    let primes = sieve.primes_up_to(top);
    let mut terms = Vec::with_capacity(primes.len());
    for &p in primes {
        let p = p as u64;
        if !OptimalityTwist::is_twisted(p) {
            terms.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let fp = tw.base.local_series_unchecked(p, 1)?[1];
        let pf = p as f64;
        let w = tw.omega(fp) / (pf.powf(tau) * pf.ln().ln());
        terms.push(Complex64::new(0.0, w) * fp);
    }
    let cuts: Vec<usize> = cutoffs
        .iter()
        .map(|&c| primes.partition_point(|&p| (p as u64) <= c))
        .collect();
    let partials = prefix_sums_at(terms.len(), |i| terms[i], &cuts, SummationMode::CompensatedSequential);
    Ok(PfSeries {
        tau,
        cutoffs: cutoffs.to_vec(),
        partials,
    })
}

/// `f` on squarefree integers, 0 elsewhere. Idempotent.
pub fn squarefree_restrict(f: &FunctionSpec) -> FunctionSpec {
    if matches!(f.rule, Rule::SquarefreeRestrict { .. }) {
        return f.clone();
    }
    FunctionSpec::new(
        format!("sqfree({})", f.name),
        Kind::GeneralMultiplicative,
        f.bounded_by_one,
        Rule::SquarefreeRestrict { base: Box::new(f.clone()) },
    )
}

/// Unimodular random values keyed by `seed`; see [`Rule::RandomUnit`].
pub fn random_unit_disc(seed: u64, complete: bool) -> FunctionSpec {
    FunctionSpec::new(
        format!("random[{seed}{}]", if complete { ",cm" } else { "" }),
        if complete {
            Kind::CompletelyMultiplicative
        } else {
            Kind::GeneralMultiplicative
        },
        true,
        Rule::RandomUnit {
            seed,
            complete,
            radius: 1.0,
        },
    )
}

/// Construction request as accepted by the `construct` subcommand.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub name: String,
    #[serde(default)]
    pub q: Option<u64>,
    #[serde(default)]
    pub index: Option<u64>,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub intervals: Vec<u32>,
    #[serde(default)]
    pub cutoff: Option<u64>,
    /// Fundamental discriminant for `kronecker`.
    #[serde(default)]
    pub discriminant: Option<i64>,
    /// Base function for the derived constructions.
    #[serde(default)]
    pub base: Option<Box<FunctionSpec>>,
}

/// Build the spec a [`ConstructionParams`] describes. Derived constructions
/// default to the character `(q, index)` as their base when `base` is unset.
pub fn construct(params: &ConstructionParams) -> Result<FunctionSpec> {
    let character = || -> Result<FunctionSpec> {
        dirichlet_character(params.q.unwrap_or(1), params.index.unwrap_or(0))
    };
    let base = || -> Result<FunctionSpec> {
        match &params.base {
            Some(b) => Ok((**b).clone()),
            None => character(),
        }
    };
    match params.name.as_str() {
        "one" | "delta" | "moebius" | "liouville" => Ok(standard_spec(params.name.parse()?)),
        "alternating" => Ok(alternating()),
        "character" => character(),
        "kronecker" => {
            let d = params
                .discriminant
                .or(params.index.map(|i| i as i64))
                .ok_or_else(|| invalid("kronecker needs a discriminant"))?;
            kronecker_character(d)
        }
        "archimedean-twist" => archimedean_twist(params.t.unwrap_or(0.0)),
        "sparse-dyadic" => sparse_dyadic(&base()?, &params.intervals),
        "optimality-twist" => {
            let cutoff = params.cutoff.unwrap_or(SIGN_RULE_CUTOFF);
            let sieve = SieveIndex::new(cutoff)?;
            optimality_twist(&base()?, params.beta.unwrap_or(0.5), &sieve)
        }
        "squarefree-restrict" => Ok(squarefree_restrict(&base()?)),
        "divisor" => Ok(divisor_function(params.index.unwrap_or(2) as usize)),
        other => Err(invalid(format!("unknown construction `{other}`"))),
    }
}

/// The character table behind a character spec, if it is one.
pub fn character_table(spec: &FunctionSpec) -> Option<&CharacterTable> {
    match &spec.rule {
        Rule::Character(c) => c.table().ok(),
        _ => None,
    }
}
