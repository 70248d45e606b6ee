use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pretense_core::constructions::*;
use pretense_core::dirichlet::{
    convolve_table, determinant_df, dirichlet_inverse, h_via_determinant, inverse_table, quotient_spec, solve_quotient,
};
use pretense_core::table::default_grid;
use pretense_core::{build_sieve, evaluate, partial_sums, FunctionSpec, SummationMode};

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn sample_specs() -> Vec<FunctionSpec> {
    let mut v = vec![
        standard_spec(Standard::Moebius),
        standard_spec(Standard::Liouville),
        alternating(),
        divisor_function(3),
        dirichlet_character(60, 7).unwrap(),
        kronecker_character(-20).unwrap(),
        archimedean_twist(2.5).unwrap(),
        sparse_dyadic(&dirichlet_character(4, 1).unwrap(), &[2, 3]).unwrap(),
        squarefree_restrict(&dirichlet_character(3, 1).unwrap()),
        random_unit_disc(77, false),
    ];
    v.push(quotient_spec(&v[4], &v[9]));
    v
}

#[test]
fn multiplicativity_on_random_coprime_pairs() {
    let n = 200_000u64;
    let s = build_sieve(n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for spec in sample_specs() {
        let t = evaluate(&spec, &s, n).unwrap();
        assert_eq!(t.get(1), Complex64::new(1.0, 0.0));
        let mut checked = 0;
        while checked < 500 {
            let a = rng.gen_range(1..=n / 2);
            let b = rng.gen_range(1..=n / a);
            if gcd(a, b) != 1 {
                continue;
            }
            let want = t.get(a) * t.get(b);
            assert!((t.get(a * b) - want).norm() <= 1e-12 * want.norm().max(1.0), "{} at {a}*{b}", spec.name);
            checked += 1;
        }
    }
}

#[test]
fn larger_sieve_agrees_exactly() {
    let small = build_sieve(10_000).unwrap();
    let large = build_sieve(123_457).unwrap();
    for spec in sample_specs() {
        let a = evaluate(&spec, &small, 10_000).unwrap();
        let b = evaluate(&spec, &large, 123_457).unwrap();
        assert_eq!(a.as_slice(), &b.as_slice()[..=10_000], "{}", spec.name);
    }
}

#[test]
fn summation_modes_agree_bitwise() {
    let s = build_sieve(1_000_000).unwrap();
    let t = evaluate(&random_unit_disc(3, false), &s, 1_000_000).unwrap();
    let grid = default_grid(1e6);
    let a = partial_sums(&t, &grid, SummationMode::CompensatedSequential).unwrap();
    let b = partial_sums(&t, &grid, SummationMode::BlockParallelDeterministic).unwrap();
    for (x, y) in a.sums.iter().zip(&b.sums) {
        assert_eq!((x.re.to_bits(), x.im.to_bits()), (y.re.to_bits(), y.im.to_bits()));
    }
    // exact re-summation
    let direct: Complex64 = t.as_slice()[1..=1000].iter().sum();
    assert!((a.sums[0] - direct).norm() <= 1e-12 * direct.norm().max(1.0));
}

#[test]
fn quotient_convolves_back_to_g() {
    let n = 10_000;
    let s = build_sieve(n).unwrap();
    for seed in 0..20u64 {
        let f = random_unit_disc(2 * seed, seed % 2 == 0);
        let g = random_unit_disc(2 * seed + 1, false);
        let q = solve_quotient(&f, &g, s.primes(), 13).unwrap();
        assert!(q.max_residual(&f, &g).unwrap() <= 1e-10);
        let h = evaluate(&q.h, &s, n).unwrap();
        let back = convolve_table(&evaluate(&f, &s, n).unwrap(), &h, n).unwrap();
        let gt = evaluate(&g, &s, n).unwrap();
        let err = (1..=n).map(|k| (back.get(k) - gt.get(k)).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-10, "seed {seed}: {err}");
    }
}

#[test]
fn determinant_identity_matches_triangular_solve() {
    let s = build_sieve(100).unwrap();
    for seed in 0..20u64 {
        let f = random_unit_disc(100 + seed, false);
        let g = random_unit_disc(200 + seed, seed % 3 == 0);
        let q = solve_quotient(&f, &g, s.primes(), 8).unwrap();
        for l in &q.locals {
            for n in 1..=8u32 {
                let d = h_via_determinant(&f, &g, l.prime, n).unwrap();
                assert!((d - l.coeffs[n as usize]).norm() <= 1e-10, "p={} n={n}", l.prime);
            }
        }
    }
}

#[test]
fn degree_one_determinants_collapse() {
    for seed in 0..10u64 {
        let f = random_unit_disc(seed, true);
        for p in [2u64, 3, 5, 97, 7919] {
            for k in 2..=20 {
                assert!(determinant_df(&f, p, k).unwrap().norm() <= 1e-12);
            }
        }
    }
}

#[test]
fn inverse_is_a_dirichlet_inverse_and_an_involution() {
    let n = 10_000;
    let s = build_sieve(n).unwrap();
    for seed in 0..5u64 {
        let h = random_unit_disc(seed + 40, false);
        let hinv = dirichlet_inverse(&h, s.primes(), 13).unwrap();
        let ht = evaluate(&h, &s, n).unwrap();
        let it = evaluate(&hinv, &s, n).unwrap();
        let prod = convolve_table(&ht, &it, n).unwrap();
        for k in 1..=n {
            let want = if k == 1 { 1.0 } else { 0.0 };
            assert!((prod.get(k) - want).norm() <= 1e-10);
        }
        let twice = evaluate(&dirichlet_inverse(&hinv, s.primes(), 13).unwrap(), &s, n).unwrap();
        let dense = inverse_table(&ht).unwrap();
        for k in 1..=n {
            assert!((twice.get(k) - ht.get(k)).norm() <= 1e-10);
            assert!((dense.get(k) - it.get(k)).norm() <= 1e-10);
        }
    }
}

#[test]
fn standard_specs_satisfy_their_definitions() {
    let s = build_sieve(10_000).unwrap();
    let mu = evaluate(&standard_spec(Standard::Moebius), &s, 10_000).unwrap();
    let lambda = evaluate(&standard_spec(Standard::Liouville), &s, 10_000).unwrap();
    for n in 1..=10_000u64 {
        if mu.get(n).norm() > 0.0 {
            assert_eq!(mu.get(n), lambda.get(n));
        }
    }
    let one = evaluate(&standard_spec(Standard::One), &s, 10_000).unwrap();
    let d = convolve_table(&one, &mu, 10_000).unwrap();
    assert!((2..=10_000).all(|n| d.get(n).norm() == 0.0));
    assert!("zeta".parse::<Standard>().is_err());
}

#[test]
fn specs_roundtrip_through_json() {
    let s = build_sieve(5000).unwrap();
    for spec in sample_specs() {
        let back = FunctionSpec::from_json(&spec.to_json().unwrap()).unwrap();
        let a = evaluate(&spec, &s, 5000).unwrap();
        let b = evaluate(&back, &s, 5000).unwrap();
        assert_eq!(a.as_slice(), b.as_slice(), "{}", spec.name);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn squarefree_restriction_is_idempotent_and_masks(seed in 0u64..1_000_000) {
        let f = random_unit_disc(seed, false);
        let once = squarefree_restrict(&f);
        let twice = squarefree_restrict(&once);
        let s = build_sieve(3000).unwrap();
        let a = evaluate(&once, &s, 3000).unwrap();
        let b = evaluate(&twice, &s, 3000).unwrap();
        let base = evaluate(&f, &s, 3000).unwrap();
        let mu = evaluate(&standard_spec(Standard::Moebius), &s, 3000).unwrap();
        for n in 1..=3000u64 {
            prop_assert_eq!(a.get(n), b.get(n));
            let want = if mu.get(n).norm() > 0.0 { base.get(n) } else { Complex64::new(0.0, 0.0) };
            prop_assert_eq!(a.get(n), want);
        }
    }

    #[test]
    fn quotient_of_random_pair_is_exact_locally(seed in 0u64..1_000_000, p_idx in 0usize..25) {
        let s = build_sieve(100).unwrap();
        let p = s.primes()[p_idx] as u64;
        let f = random_unit_disc(seed, false);
        let g = random_unit_disc(seed ^ 0xABCDEF, false);
        let q = solve_quotient(&f, &g, &[p as u32], 12).unwrap();
        prop_assert!(q.max_residual(&f, &g).unwrap() <= 1e-10);
    }
}
