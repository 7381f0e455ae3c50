use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use witness_vqe::{GateMatrix, Statevector};

#[derive(Debug, Clone)]
enum Gate {
    One(u8, f64, usize),
    Two(u8, f64, usize, usize),
}

fn one(kind: u8, t: f64) -> GateMatrix {
    match kind % 4 {
        0 => GateMatrix::rx(t),
        1 => GateMatrix::ry(t),
        2 => GateMatrix::rz(t),
        _ => GateMatrix::hadamard(),
    }
}

fn two(kind: u8, t: f64) -> GateMatrix {
    match kind % 3 {
        0 => GateMatrix::iswap_dagger(t),
        1 => GateMatrix::cphase(t),
        _ => GateMatrix::cnot(),
    }
}

fn apply(s: &mut Statevector, g: &Gate) {
    match *g {
        Gate::One(k, t, w) => s.apply_1q(&one(k, t), w).unwrap(),
        Gate::Two(k, t, a, b) => s.apply_2q(&two(k, t), a, b).unwrap(),
    }
}

fn gate(n: usize) -> impl Strategy<Value = Gate> {
    let angle = -7.0..7.0f64;
    prop_oneof![
        (any::<u8>(), angle.clone(), 0..n).prop_map(|(k, t, w)| Gate::One(k, t, w)),
        (any::<u8>(), angle, 0..n, 1..n).prop_map(move |(k, t, a, d)| Gate::Two(k, t, a, (a + d) % n)),
    ]
}

fn circuit() -> impl Strategy<Value = (usize, Vec<Gate>)> {
    (2usize..=10).prop_flat_map(|n| (Just(n), prop::collection::vec(gate(n), 0..=100)))
}

fn dense(g: &GateMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(g.dim(), g.dim(), g.entries())
}

fn lift(g: &GateMatrix, first_wire: usize, n: usize) -> DMatrix<Complex64> {
    let k = if g.dim() == 2 { 1 } else { 2 };
    let left = DMatrix::<Complex64>::identity(1 << first_wire, 1 << first_wire);
    let right_dim = 1 << (n - first_wire - k);
    let right = DMatrix::<Complex64>::identity(right_dim, right_dim);
    left.kronecker(&dense(g)).kronecker(&right)
}

fn random_state(n: usize, seed: u64) -> Statevector {
    let mut s = Statevector::zero(n).unwrap();
    for (i, w) in (0..n).cycle().take(3 * n).enumerate() {
        let t = 0.37 * (i as f64 + 1.0) + seed as f64;
        s.apply_1q(&GateMatrix::ry(t), w).unwrap();
        s.apply_1q(&GateMatrix::rz(1.3 * t), w).unwrap();
        if w + 1 < n {
            s.apply_cnot(w, w + 1).unwrap();
        }
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_preserved((n, gates) in circuit()) {
        let mut s = Statevector::zero(n).unwrap();
        for g in &gates {
            apply(&mut s, g);
        }
        prop_assert!((s.norm_sqr().sqrt() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gate_then_adjoint_restores((n, gates) in circuit(), seed in 0u64..100) {
        let start = random_state(n, seed);
        for g in &gates {
            let mut s = start.clone();
            apply(&mut s, g);
            match *g {
                Gate::One(k, t, w) => s.apply_1q(&one(k, t).adjoint(), w).unwrap(),
                Gate::Two(k, t, a, b) => s.apply_2q(&two(k, t).adjoint(), a, b).unwrap(),
            }
            for (x, y) in s.amplitudes().iter().zip(start.amplitudes()) {
                prop_assert!((x - y).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn wire_application_matches_kronecker_lift(n in 2usize..=4, kind in any::<u8>(), t in -4.0..4.0f64, w in 0usize..4, seed in 0u64..50) {
        let w = w % n;
        let psi = random_state(n, seed);
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());

        let g1 = one(kind, t);
        let mut s = psi.clone();
        s.apply_1q(&g1, w).unwrap();
        let want = lift(&g1, w, n) * &v;
        for (x, y) in s.amplitudes().iter().zip(want.iter()) {
            prop_assert!((x - y).norm() < 1e-12);
        }

        let a = w.min(n - 2);
        let g2 = two(kind, t);
        let mut s = psi.clone();
        s.apply_2q(&g2, a, a + 1).unwrap();
        let want = lift(&g2, a, n) * &v;
        for (x, y) in s.amplitudes().iter().zip(want.iter()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }
}

fn pauli(c: char) -> DMatrix<Complex64> {
    let (o, i, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::default());
    match c {
        'X' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        _ => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

#[test]
fn two_qubit_generators_match_matrix_exponentials() {
    let xx = pauli('X').kronecker(&pauli('X'));
    let yy = pauli('Y').kronecker(&pauli('Y'));
    let zz = pauli('Z').kronecker(&pauli('Z'));
    for k in 0..40 {
        let t = -3.0 + 0.157 * k as f64;
        let minus_i_t = Complex64::new(0.0, -t);
        let want = ((&xx + &yy) * minus_i_t).exp();
        let got = dense(&GateMatrix::iswap_dagger(t));
        assert!((got - want).norm() < 1e-12, "iSWAP^dagger at {t}");
        let want = (&zz * minus_i_t).exp();
        let got = dense(&GateMatrix::cphase(t));
        assert!((got - want).norm() < 1e-12, "CPHASE at {t}");
    }
}

#[test]
fn reversed_wire_order_swaps_roles() {
    // CNOT(1 -> 0) on |01> flips wire 0
    let mut s = Statevector::basis(2, &[0, 1]).unwrap();
    s.apply_2q(&GateMatrix::cnot(), 1, 0).unwrap();
    assert_eq!(s.amplitudes()[3], Complex64::new(1.0, 0.0));
}
