use proptest::prelude::*;

use s2scat::scattering::{enumerate_paths, scattering_distance, scattering_network, PathPolicy, ScatteringOptions};
use s2scat::sht::{random_bandlimited, rotate, sample_uniform_rotation};
use s2scat::wavelets::{analyze, build_filter_bank, check_admissibility, synthesize, KernelConfig};

fn alpha() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.5), Just(2.0), Just(3.0), 1.2f64..4.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tiling_is_a_partition_of_unity(bl in 2usize..48, a in alpha(), j0 in 0usize..4) {
        let cfg = KernelConfig::new(bl, a, j0);
        prop_assume!(cfg.is_ok());
        let cfg = cfg.unwrap();
        let bank = build_filter_bank(&cfg).unwrap();
        prop_assert!(check_admissibility(&bank) <= 1e-12);
    }

    #[test]
    fn synthesis_inverts_analysis(bl in 2usize..32, a in alpha(), j0 in 0usize..3, multires: bool, seed in any::<u64>()) {
        let cfg = KernelConfig::new(bl, a, j0);
        prop_assume!(cfg.is_ok());
        let cfg = cfg.unwrap();
        let bank = build_filter_bank(&cfg).unwrap();
        let f = random_bandlimited(bl, seed, None).unwrap();
        let wc = analyze(&f, &bank, multires).unwrap();
        let back = synthesize(&wc, &bank).unwrap();
        prop_assert!(back.distance(&f) <= 1e-10 * f.norm());
        // tight frame: the coefficients carry exactly the signal energy
        prop_assert!((wc.energy() - f.norm_sqr()).abs() <= 1e-10 * f.norm_sqr());
    }

    #[test]
    fn analysis_commutes_with_rotation(bl in 3usize..24, seed in any::<u64>(), r in any::<u64>()) {
        let cfg = KernelConfig::new(bl, 2.0, 1);
        prop_assume!(cfg.is_ok());
        let bank = build_filter_bank(&cfg.unwrap()).unwrap();
        let f = random_bandlimited(bl, seed, None).unwrap();
        let rho = sample_uniform_rotation(r);
        let a = analyze(&rotate(&f, rho), &bank, true).unwrap();
        let b = analyze(&f, &bank, true).unwrap();
        prop_assert!(a.scaling.distance(&rotate(&b.scaling, rho)) <= 1e-10 * f.norm());
        for (j, w) in &a.wavelets {
            prop_assert!(w.distance(&rotate(&b.wavelets[j], rho)) <= 1e-10 * f.norm());
        }
    }
}

/// Independent count: every tuple over `j0..=j` of length `d`, filtered by
/// the policy's adjacency rule written out by hand.
fn brute_force_count(j0: usize, j: usize, depth: usize, policy: PathPolicy) -> usize {
    let ok = |p: usize, n: usize| match policy {
        PathPolicy::General => true,
        PathPolicy::Descending => n <= p,
        PathPolicy::AdjacentDescending => p == n + 1,
    };
    let n = j - j0 + 1;
    let mut total = 0;
    for d in 0..=depth {
        for code in 0..n.pow(d as u32) {
            let mut c = code;
            let tuple: Vec<usize> = (0..d)
                .map(|_| {
                    let v = j0 + c % n;
                    c /= n;
                    v
                })
                .collect();
            if tuple.windows(2).all(|w| ok(w[0], w[1])) {
                total += 1;
            }
        }
    }
    total
}

#[test]
fn path_counts_match_brute_force() {
    for policy in [
        PathPolicy::General,
        PathPolicy::Descending,
        PathPolicy::AdjacentDescending,
    ] {
        for j in 0..=6 {
            for j0 in 0..=j {
                for d in 0..=3 {
                    let set = enumerate_paths(j0, j, d as i64, policy).unwrap();
                    assert_eq!(
                        set.len(),
                        brute_force_count(j0, j, d, policy),
                        "{policy:?} J0={j0} J={j} D={d}"
                    );
                }
            }
        }
    }
}

#[test]
fn known_path_counts() {
    assert_eq!(enumerate_paths(2, 4, 2, PathPolicy::General).unwrap().len(), 13);
    assert_eq!(enumerate_paths(2, 4, 2, PathPolicy::Descending).unwrap().len(), 10);
    assert_eq!(
        enumerate_paths(2, 4, 2, PathPolicy::AdjacentDescending).unwrap().len(),
        6
    );
    assert!(enumerate_paths(3, 2, 1, PathPolicy::General).is_err());
    assert!(enumerate_paths(0, 2, -1, PathPolicy::General).is_err());
}

#[test]
fn depth_zero_network_is_exactly_equivariant() {
    let bank = build_filter_bank(&KernelConfig::new(32, 2.0, 2).unwrap()).unwrap();
    let paths = enumerate_paths(2, bank.j_max(), 0, PathPolicy::Descending).unwrap();
    let f = random_bandlimited(32, 8, None).unwrap();
    let rho = sample_uniform_rotation(9);
    let opts = ScatteringOptions::default();
    let a = scattering_network(&rotate(&f, rho), &paths, &bank, opts).unwrap();
    let b = scattering_network(&f, &paths, &bank, opts).unwrap();
    let (pa, ca) = a.entries.iter().next().unwrap();
    assert_eq!(pa.depth(), 0);
    let cb = rotate(&b.entries[pa], rho);
    assert!(ca.distance(&cb) <= 1e-12 * cb.norm());
}

#[test]
fn network_is_deterministic_and_self_distance_is_zero() {
    let bank = build_filter_bank(&KernelConfig::new(24, 2.0, 1).unwrap()).unwrap();
    let paths = enumerate_paths(1, bank.j_max(), 2, PathPolicy::General).unwrap();
    let f = random_bandlimited(24, 1, None).unwrap();
    let a = scattering_network(&f, &paths, &bank, ScatteringOptions::full_resolution()).unwrap();
    let b = scattering_network(&f, &paths, &bank, ScatteringOptions::full_resolution()).unwrap();
    assert_eq!(a, b);
    assert_eq!(scattering_distance(&a, &b).unwrap(), 0.0);
    assert_eq!(a.entries.len(), paths.len());
}
