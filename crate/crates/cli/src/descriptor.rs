//! Short textual spec descriptors accepted by `--spec`.
//!
//! ```text
//! one | delta | moebius | liouville | alternating
//! chi:Q:INDEX            Dirichlet character
//! kronecker:D            quadratic character of a fundamental discriminant
//! nit:T                  n^{iT}
//! divisor:D              D-fold divisor function
//! random:SEED            unimodular values at every prime power
//! random-cm:SEED         completely multiplicative unimodular values
//! sqfree:INNER           squarefree restriction
//! sparse:J1,J2,..:INNER  sparse dyadic modification
//! twist:BETA:INNER       optimality twist (sign rule decided up to the run's N)
//! conv:A+B+...           Dirichlet convolution; parentheses group nested descriptors
//! quot:G/F               Dirichlet quotient h with g = f * h
//! path/to/spec.json      descriptor written by `construct`
//! @NAME                  entry NAME of the [specs] section of --config
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use pretense_core::constructions::*;
use pretense_core::dirichlet::quotient_spec;
use pretense_core::{FunctionSpec, SieveIndex};

use crate::CliError;

/// Resolves descriptors; owns what `twist:` and `@name` need.
pub struct Resolver<'a> {
    pub named: &'a BTreeMap<String, String>,
    /// Cutoff for the optimality-twist sign rule.
    pub twist_cutoff: u64,
}

impl Resolver<'_> {
    pub fn resolve(&self, text: &str) -> Result<FunctionSpec, CliError> {
        self.resolve_depth(text, 0).map_err(|e| match e {
            CliError::Usage(_) => e,
            other => CliError::Usage(format!("bad spec `{text}`: {other}")),
        })
    }

    fn resolve_depth(&self, text: &str, depth: usize) -> Result<FunctionSpec, CliError> {
        if depth > 16 {
            return Err(CliError::Usage(format!("descriptor nests too deeply: `{text}`")));
        }
        let text = text.trim();
        let usage = |msg: &str| CliError::Usage(format!("bad spec `{text}`: {msg}"));
        if let Some(name) = text.strip_prefix('@') {
            let inner = self
                .named
                .get(name)
                .ok_or_else(|| usage("no such entry in the config's [specs] section"))?;
            return self.resolve_depth(inner, depth + 1);
        }
        if text.ends_with(".json") || Path::new(text).is_file() {
            let body = std::fs::read_to_string(text)?;
            return Ok(FunctionSpec::from_json(&body)?);
        }
        let (head, rest) = match text.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (text, None),
        };
        let num = |s: &str| -> Result<u64, CliError> { s.parse().map_err(|_| usage("expected an integer")) };
        let real = |s: &str| -> Result<f64, CliError> { s.parse().map_err(|_| usage("expected a number")) };
        let need = || rest.ok_or_else(|| usage("missing parameters"));
        Ok(match head {
            "one" | "delta" | "moebius" | "liouville" => standard_spec(head.parse()?),
            "mobius" | "mu" => standard_spec(Standard::Moebius),
            "alternating" => alternating(),
            "chi" => {
                let (q, i) = need()?.split_once(':').ok_or_else(|| usage("expected chi:Q:INDEX"))?;
                dirichlet_character(num(q)?, num(i)?)?
            }
            "kronecker" => {
                let d: i64 = need()?.parse().map_err(|_| usage("expected kronecker:D"))?;
                kronecker_character(d)?
            }
            "nit" => archimedean_twist(real(need()?)?)?,
            "divisor" => divisor_function(num(need()?)? as usize),
            "random" => random_unit_disc(num(need()?)?, false),
            "random-cm" => random_unit_disc(num(need()?)?, true),
            "sqfree" => squarefree_restrict(&self.resolve_depth(need()?, depth + 1)?),
            "sparse" => {
                let (js, inner) = need()?.split_once(':').ok_or_else(|| usage("expected sparse:J,..:INNER"))?;
                let js = js.split(',').map(|j| num(j).map(|v| v as u32)).collect::<Result<Vec<_>, _>>()?;
                sparse_dyadic(&self.resolve_depth(inner, depth + 1)?, &js)?
            }
            "twist" => {
                let (b, inner) = need()?.split_once(':').ok_or_else(|| usage("expected twist:BETA:INNER"))?;
                let sieve = SieveIndex::new(self.twist_cutoff)?;
                optimality_twist(&self.resolve_depth(inner, depth + 1)?, real(b)?, &sieve)?
            }
            "conv" => {
                let parts = split_top(need()?, '+');
                let factors = parts
                    .iter()
                    .map(|p| self.resolve_depth(p, depth + 1))
                    .collect::<Result<Vec<_>, _>>()?;
                degree_d(factors, text.to_string())
            }
            "quot" => {
                let parts = split_top(need()?, '/');
                if parts.len() != 2 {
                    return Err(usage("expected quot:G/F"));
                }
                let g = self.resolve_depth(&parts[0], depth + 1)?;
                let f = self.resolve_depth(&parts[1], depth + 1)?;
                quotient_spec(&f, &g)
            }
            _ => return Err(usage("unknown descriptor")),
        })
    }
}

/// Split on `sep` outside parentheses; parentheses group nested descriptors.
fn split_top(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '(' => {
                depth += 1;
                if depth > 1 {
                    cur.push(c);
                }
            }
            ')' => {
                depth -= 1;
                if depth > 0 {
                    cur.push(c);
                }
            }
            c if c == sep && depth == 0 => out.push(std::mem::take(&mut cur)),
            c => cur.push(c),
        }
    }
    out.push(cur);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use pretense_core::{build_sieve, evaluate, Complex64};

    fn resolver() -> (BTreeMap<String, String>, u64) {
        let mut m = BTreeMap::new();
        m.insert("f".to_string(), "chi:4:1".to_string());
        (m, 1000)
    }

    #[test]
    fn descriptors_resolve() {
        let (m, cut) = resolver();
        let r = Resolver { named: &m, twist_cutoff: cut };
        let s = build_sieve(100).unwrap();
        let v = |d: &str| evaluate(&r.resolve(d).unwrap(), &s, 100).unwrap();
        assert_eq!(v("moebius").get(30), Complex64::new(-1.0, 0.0));
        assert_eq!(v("@f").get(3), Complex64::new(-1.0, 0.0));
        assert_eq!(v("sqfree:@f").get(9), Complex64::new(0.0, 0.0));
        assert_eq!(v("conv:one+one").get(12), Complex64::new(6.0, 0.0));
        assert_eq!(v("divisor:2").get(12), Complex64::new(6.0, 0.0));
        assert_eq!(v("quot:one/alternating").get(8), Complex64::new(8.0, 0.0));
        assert_eq!(v("conv:(sqfree:chi:3:1)+one").get(1), Complex64::new(1.0, 0.0));
        assert_eq!(v("sparse:2:chi:4:1").get(19), Complex64::new(1.0, 0.0));
        assert!(r.resolve("twist:0.5:one").is_ok());
        for bad in ["zeta", "chi:4", "chi:x:1", "@nope", "sparse:9:one", "kronecker:3"] {
            assert!(r.resolve(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn top_level_split_respects_parentheses() {
        assert_eq!(split_top("(a+b)+c", '+'), vec!["a+b", "c"]);
        assert_eq!(split_top("a", '+'), vec!["a"]);
    }
}
