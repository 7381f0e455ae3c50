use std::collections::BTreeSet;

use proptest::prelude::*;
use witness_vqe::ansatz::{parameter_count, Family};
use witness_vqe::rng::stream;
use rand::Rng;

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_family_yields_unit_states(f in family(), n in 2usize..=6, layers in 1usize..=2, seed in any::<u64>()) {
        let d = f.build(n, layers).unwrap();
        let mut rng = stream(seed);
        let p: Vec<f64> = (0..d.n_params).map(|_| rng.random::<f64>() * 20.0 - 10.0).collect();
        let s = d.instantiate(&p).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn separable_ansatz_has_schmidt_rank_one() {
    let mut rng = stream(77);
    for n in 2..=6 {
        let d = Family::Hesa.build(n, 1).unwrap();
        for _ in 0..1000 {
            let p: Vec<f64> = (0..d.n_params).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
            let s = d.instantiate(&p).unwrap();
            for cut in 1..n {
                let c = s.schmidt_coefficients(cut).unwrap();
                assert!(c.iter().skip(1).all(|&x| x < 1e-9), "n={n} cut={cut}: {c:?}");
            }
        }
    }
}

#[test]
fn parameter_counts_match_bound_indices() {
    for f in Family::ALL {
        for n in f.min_qubits().max(2)..=15 {
            for layers in 1..=3 {
                let d = f.build(n, layers).unwrap();
                assert_eq!(parameter_count(f, n, layers).unwrap(), d.n_params);
                let bound: BTreeSet<usize> = d.ops.iter().filter_map(|op| op.param).collect();
                if f == Family::Hva && n == 2 {
                    // a two-site chain has no bridging link, so its angle is unbound
                    assert_eq!(bound.len(), 2 * layers);
                } else {
                    assert_eq!(bound.len(), d.n_params, "{f} n={n} layers={layers}");
                }
            }
        }
    }
}

#[test]
fn hva_two_site_energy_ignores_field_angle() {
    let h = witness_vqe::build_heisenberg(2, -1.0, 0.0).unwrap();
    let d = Family::Hva.build(2, 1).unwrap();
    for k in 0..=36 {
        let t3 = k as f64 * std::f64::consts::TAU / 36.0;
        let e = h.expectation(&d.instantiate(&[0.4, 1.1, t3]).unwrap()).unwrap();
        assert!((e + 3.0).abs() < 1e-12);
    }
}
