//! Compensated summation with a fixed reduction order.
//!
//! Every long sum in the crate goes through the same contract: terms are cut
//! into blocks of [`BLOCK_LEN`] consecutive indices, each block is reduced with
//! Kahan compensation, and block totals are folded in ascending block order by
//! a second compensated accumulator. The sequential and the parallel drivers
//! perform the identical sequence of floating point operations, so their
//! results agree bit for bit regardless of the thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Terms per reduction block.
pub const BLOCK_LEN: usize = 1 << 16;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexKahan {
    re: Kahan,
    im: Kahan,
}

impl ComplexKahan {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SummationMode {
    #[default]
    CompensatedSequential,
    BlockParallelDeterministic,
}

/// Per-block result: the block total plus the running value at every cut
/// falling inside the block.
struct BlockPartial {
    total: Complex64,
    cuts: Vec<(usize, Complex64)>,
}

fn reduce_block<F>(lo: usize, hi: usize, term: &F, cuts: &[usize]) -> BlockPartial
where
    F: Fn(usize) -> Complex64,
{
    // cuts are sorted; find the ones with lo < cut <= hi
    let start = cuts.partition_point(|&c| c <= lo);
    let end = cuts.partition_point(|&c| c <= hi);
    let mut acc = ComplexKahan::default();
    let mut out = Vec::with_capacity(end - start);
    let mut next = start;
    for i in lo..hi {
        acc.add(term(i));
        while next < end && cuts[next] == i + 1 {
            out.push((next, acc.value()));
            next += 1;
        }
    }
    BlockPartial {
        total: acc.value(),
        cuts: out,
    }
}

/// Running sums of `term(i)` for `i` in `0..len`, reported after the first
/// `cut` terms for every entry of `cuts` (ascending, each `<= len`).
pub fn prefix_sums_at<F>(len: usize, term: F, cuts: &[usize], mode: SummationMode) -> Vec<Complex64>
where
    F: Fn(usize) -> Complex64 + Sync,
{
    debug_assert!(cuts.windows(2).all(|w| w[0] <= w[1]));
    let blocks = len.div_ceil(BLOCK_LEN);
    let run = |b: usize| {
        let lo = b * BLOCK_LEN;
        let hi = (lo + BLOCK_LEN).min(len);
        reduce_block(lo, hi, &term, cuts)
    };
    let partials: Vec<BlockPartial> = match mode {
        SummationMode::CompensatedSequential => (0..blocks).map(run).collect(),
        SummationMode::BlockParallelDeterministic => (0..blocks).into_par_iter().map(run).collect(),
    };

    let mut out = vec![Complex64::new(0.0, 0.0); cuts.len()];
    let mut prefix = ComplexKahan::default();
    for part in &partials {
        for &(idx, within) in &part.cuts {
            let mut at = prefix;
            at.add(within);
            out[idx] = at.value();
        }
        prefix.add(part.total);
    }
    // cuts at 0 (or repeated zeros) never land inside a block
    for (slot, &c) in out.iter_mut().zip(cuts) {
        if c == 0 {
            *slot = Complex64::new(0.0, 0.0);
        }
    }
    out
}

/// Full sum of `term(i)` over `0..len` under the block contract.
pub fn ordered_sum<F>(len: usize, term: F, mode: SummationMode) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    if len == 0 {
        return Complex64::new(0.0, 0.0);
    }
    prefix_sums_at(len, term, &[len], mode)[0]
}

/// Real-valued convenience wrapper over [`ordered_sum`].
pub fn ordered_sum_real<F>(len: usize, term: F, mode: SummationMode) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    ordered_sum(len, |i| Complex64::new(term(i), 0.0), mode).re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut k = Kahan::default();
        k.add(1.0);
        for _ in 0..10_000 {
            k.add(1e-16);
        }
        assert!((k.value() - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn modes_agree_bitwise() {
        let len = 3 * BLOCK_LEN + 1234;
        let term = |i: usize| Complex64::new((i as f64).sin() / (i as f64 + 1.0), 1.0 / (i as f64 + 1.0).sqrt());
        let cuts = vec![0, 1, 17, BLOCK_LEN, BLOCK_LEN + 1, 2 * BLOCK_LEN + 99, len];
        let a = prefix_sums_at(len, term, &cuts, SummationMode::CompensatedSequential);
        let b = prefix_sums_at(len, term, &cuts, SummationMode::BlockParallelDeterministic);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
        assert_eq!(a[0], Complex64::new(0.0, 0.0));
        assert!((a[2] - (0..17).map(term).sum::<Complex64>()).norm() < 1e-14);
    }

    #[test]
    fn repeated_cuts_get_same_value() {
        let cuts = [5, 5, 10];
        let s = prefix_sums_at(10, |i| Complex64::new(i as f64, 0.0), &cuts, SummationMode::CompensatedSequential);
        assert_eq!(s[0], s[1]);
        assert_eq!(s[0].re, 10.0);
        assert_eq!(s[2].re, 45.0);
    }
}
