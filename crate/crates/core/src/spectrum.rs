//! Independent reference values: exact ground energy and minimum product-state
//! energy.
//!
//! Neither oracle goes through the circuit simulator. The ground energy comes
//! from dense diagonalization (small registers) or a restarted Lanczos
//! iteration driven by the matrix-free Pauli action (larger registers). The
//! separable energy minimizes `<H>` over product states written directly in
//! Bloch-vector coordinates, where a Pauli string's expectation factorizes
//! into a product of single-site Bloch components.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::par::{map_indexed, Jobs};
use crate::rng::{derive_seed, stream};

/// Largest register diagonalized densely.
pub const DENSE_LIMIT: usize = 10;
/// Largest register either oracle accepts.
pub const ORACLE_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub ground_energy: f64,
    pub separable_energy: f64,
    pub gap: f64,
}

impl SpectrumSummary {
    pub fn witness_usable(&self) -> bool {
        self.gap > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Stop once `||H y - theta y|| <= residual_tol`.
    pub residual_tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            krylov_dim: 60,
            max_restarts: 200,
            residual_tol: 1e-7,
            seed: 0x5eed,
        }
    }
}

/// Lowest eigenvalue of `h`: dense for `n <= 10`, Lanczos for `10 < n <= 16`.
pub fn ground_energy(h: &Hamiltonian) -> Result<f64> {
    let n = h.n_qubits();
    if n > ORACLE_LIMIT {
        return Err(Error::invalid(format!(
            "ground-energy oracle supports at most {ORACLE_LIMIT} qubits, got {n}"
        )));
    }
    if n <= DENSE_LIMIT {
        dense_ground_energy(h)
    } else {
        lanczos_ground_energy(h, &LanczosOptions::default())
    }
}

pub fn dense_ground_energy(h: &Hamiltonian) -> Result<f64> {
    let m = h.to_dense()?;
    let min = if h.is_real() {
        let real = m.map(|z| z.re);
        real.symmetric_eigenvalues().min()
    } else {
        m.symmetric_eigenvalues().min()
    };
    Ok(min)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Restarted Lanczos with full reorthogonalization inside each cycle.
pub fn lanczos_ground_energy(h: &Hamiltonian, opts: &LanczosOptions) -> Result<f64> {
    let dim = 1usize << h.n_qubits();
    let m = opts.krylov_dim.clamp(2, dim);
    let mut rng = stream(opts.seed);
    let mut start: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let apply = |v: &[Complex64]| h.apply_unchecked(v);

    let mut last_residual = f64::INFINITY;
    for _cycle in 0..opts.max_restarts {
        let nv = norm(&start);
        start.iter_mut().for_each(|x| *x /= nv);
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);

        for j in 0..m {
            let mut w = apply(&basis[j]);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            // two passes of Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for v in &basis {
                    let p = dot(v, &w);
                    w.iter_mut().zip(v).for_each(|(x, y)| *x -= p * y);
                }
            }
            let b = norm(&w);
            if j + 1 == m || b < 1e-12 {
                beta.push(b);
                break;
            }
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            basis.push(w);
        }

        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = t.symmetric_eigen();
        let (imin, theta) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty tridiagonal");
        let s: DVector<f64> = eig.eigenvectors.column(imin).into_owned();

        let mut ritz = vec![Complex64::default(); dim];
        for (coef, v) in s.iter().zip(&basis) {
            ritz.iter_mut().zip(v).for_each(|(r, x)| *r += x * *coef);
        }
        let nr = norm(&ritz);
        ritz.iter_mut().for_each(|x| *x /= nr);
        let hr = apply(&ritz);
        let residual = hr
            .iter()
            .zip(&ritz)
            .map(|(a, b)| (a - b * theta).norm_sqr())
            .sum::<f64>()
            .sqrt();
        last_residual = residual;
        if residual <= opts.residual_tol {
            return Ok(theta);
        }
        start = ritz;
    }
    Err(Error::OracleFailure {
        iterations: opts.max_restarts * m,
        residual: last_residual,
    })
}

/// Result of the product-state minimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableOracleResult {
    pub energy: f64,
    pub starts: usize,
    /// `(polar, azimuth)` per wire for the best start.
    pub angles: Vec<(f64, f64)>,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableOptions {
    pub starts: usize,
    pub gradient_tol: f64,
    pub max_iterations: usize,
    pub seed: u64,
    pub jobs: Jobs,
}

impl Default for SeparableOptions {
    fn default() -> Self {
        SeparableOptions {
            starts: 64,
            gradient_tol: 1e-8,
            max_iterations: 2000,
            seed: 0xb10c,
            jobs: Jobs::ALL,
        }
    }
}

fn bloch(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// `<H>` on the product state with the given `(polar, azimuth)` per wire.
pub fn product_state_energy(h: &Hamiltonian, angles: &[(f64, f64)]) -> f64 {
    let r: Vec<[f64; 3]> = angles.iter().map(|&(t, p)| bloch(t, p)).collect();
    h.terms()
        .iter()
        .map(|term| {
            term.coefficient
                * term
                    .letters
                    .iter()
                    .map(|&(w, l)| r[w][l as usize])
                    .product::<f64>()
        })
        .sum()
}

/// Energy and gradient with respect to the flat angle vector
/// `[theta_0, phi_0, theta_1, phi_1, ...]`.
fn energy_and_gradient(h: &Hamiltonian, x: &[f64]) -> (f64, Vec<f64>) {
    let n = h.n_qubits();
    let r: Vec<[f64; 3]> = (0..n).map(|w| bloch(x[2 * w], x[2 * w + 1])).collect();
    let mut d_r = vec![[0.0f64; 3]; n];
    let mut e = 0.0;
    for term in h.terms() {
        let vals: Vec<f64> = term.letters.iter().map(|&(w, l)| r[w][l as usize]).collect();
        e += term.coefficient * vals.iter().product::<f64>();
        for (i, &(w, l)) in term.letters.iter().enumerate() {
            let others: f64 = vals
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v)
                .product();
            d_r[w][l as usize] += term.coefficient * others;
        }
    }
    let mut g = vec![0.0; 2 * n];
    for w in 0..n {
        let (st, ct) = x[2 * w].sin_cos();
        let (sp, cp) = x[2 * w + 1].sin_cos();
        let dth = [ct * cp, ct * sp, -st];
        let dph = [-st * sp, st * cp, 0.0];
        g[2 * w] = (0..3).map(|k| d_r[w][k] * dth[k]).sum();
        g[2 * w + 1] = (0..3).map(|k| d_r[w][k] * dph[k]).sum();
    }
    (e, g)
}

fn vnorm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Dense BFGS with Armijo backtracking.
fn bfgs(h: &Hamiltonian, mut x: Vec<f64>, opts: &SeparableOptions) -> (f64, Vec<f64>, f64) {
    let d = x.len();
    let mut inv = DMatrix::<f64>::identity(d, d);
    let (mut f, mut g) = energy_and_gradient(h, &x);
    for _ in 0..opts.max_iterations {
        let gn = vnorm(&g);
        if gn <= opts.gradient_tol {
            break;
        }
        let gv = DVector::from_column_slice(&g);
        let mut p = -(&inv * &gv);
        if p.dot(&gv) >= 0.0 {
            inv = DMatrix::identity(d, d);
            p = -gv.clone();
        }
        let slope = p.dot(&gv);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(p.iter()).map(|(a, b)| a + step * b).collect();
            let (fn_, gn_) = energy_and_gradient(h, &xn);
            if fn_ <= f + 1e-4 * step * slope {
                accepted = Some((xn, fn_, gn_));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn_)) = accepted else { break };
        let s = DVector::from_iterator(d, xn.iter().zip(&x).map(|(a, b)| a - b));
        let y = DVector::from_iterator(d, gn_.iter().zip(&g).map(|(a, b)| a - b));
        let sy = s.dot(&y);
        if sy > 1e-14 {
            let rho = 1.0 / sy;
            let id = DMatrix::<f64>::identity(d, d);
            let left = &id - rho * &s * y.transpose();
            let right = &id - rho * &y * s.transpose();
            inv = &left * &inv * &right + rho * &s * s.transpose();
        }
        x = xn;
        f = fn_;
        g = gn_;
    }
    let gn = vnorm(&g);
    (f, x, gn)
}

/// Minimum of `<H>` over product states, by multi-start BFGS in Bloch angles.
pub fn separable_energy(h: &Hamiltonian, opts: &SeparableOptions) -> Result<SeparableOracleResult> {
    let n = h.n_qubits();
    if n > ORACLE_LIMIT {
        return Err(Error::invalid(format!(
            "separable-energy oracle supports at most {ORACLE_LIMIT} qubits, got {n}"
        )));
    }
    if opts.starts == 0 {
        return Err(Error::invalid("separable oracle needs at least one start"));
    }
    let runs = map_indexed(opts.starts, opts.jobs, |i| {
        let mut rng = stream(derive_seed(opts.seed, &[i as u64]));
        let x0: Vec<f64> = (0..n)
            .flat_map(|_| {
                let t = rng.random::<f64>() * std::f64::consts::PI;
                let p = rng.random::<f64>() * std::f64::consts::TAU;
                [t, p]
            })
            .collect();
        bfgs(h, x0, opts)
    });
    let (energy, x, gradient_norm) = runs
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one start");
    Ok(SeparableOracleResult {
        energy,
        starts: opts.starts,
        angles: x.chunks_exact(2).map(|c| (c[0], c[1])).collect(),
        gradient_norm,
    })
}

/// Ground energy, separable energy and the entanglement gap between them.
pub fn summarize(h: &Hamiltonian) -> Result<SpectrumSummary> {
    let ground_energy = ground_energy(h)?;
    let separable_energy = separable_energy(h, &SeparableOptions::default())?.energy;
    Ok(SpectrumSummary {
        ground_energy,
        separable_energy,
        gap: separable_energy - ground_energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::build_heisenberg;

    #[test]
    fn two_site_ground_energy() {
        let h = build_heisenberg(2, -1.0, 0.0).unwrap();
        assert!((ground_energy(&h).unwrap() + 3.0).abs() < 1e-10);
    }

    #[test]
    fn lanczos_matches_dense() {
        for n in [4, 7, 9] {
            let h = build_heisenberg(n, -1.0, 0.3).unwrap();
            let dense = dense_ground_energy(&h).unwrap();
            let lz = lanczos_ground_energy(&h, &LanczosOptions::default()).unwrap();
            assert!((dense - lz).abs() < 1e-6, "n={n}: {dense} vs {lz}");
        }
    }

    #[test]
    fn lanczos_reports_non_convergence() {
        let h = build_heisenberg(8, -1.0, 0.0).unwrap();
        let opts = LanczosOptions {
            krylov_dim: 3,
            max_restarts: 1,
            residual_tol: 1e-14,
            seed: 1,
        };
        assert!(matches!(
            lanczos_ground_energy(&h, &opts),
            Err(Error::OracleFailure { .. })
        ));
    }

    #[test]
    fn analytic_gradient_matches_differences() {
        let h = build_heisenberg(3, 0.8, 0.4).unwrap();
        let x = [0.3, 1.1, 2.0, -0.4, 1.4, 2.9];
        let (_, g) = energy_and_gradient(&h, &x);
        for i in 0..x.len() {
            let mut xp = x;
            let mut xm = x;
            xp[i] += 1e-6;
            xm[i] -= 1e-6;
            let fd = (energy_and_gradient(&h, &xp).0 - energy_and_gradient(&h, &xm).0) / 2e-6;
            assert!((fd - g[i]).abs() < 1e-7);
        }
    }

    #[test]
    fn separable_energy_of_antiferromagnet() {
        let h = build_heisenberg(4, -1.0, 0.0).unwrap();
        let r = separable_energy(&h, &SeparableOptions::default()).unwrap();
        assert!((r.energy + 3.0).abs() < 1e-6);
        assert_eq!(r.starts, 64);
        assert!((product_state_energy(&h, &r.angles) - r.energy).abs() < 1e-12);
    }
}
