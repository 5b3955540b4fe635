//! Independent numerical oracles: a dense LAPACK-style eigensolver for the
//! spectrum and a fixed-step RK4 integrator for the dynamics.

use nalgebra::DMatrix;
use num_complex::Complex64;

use dimerchain::dynamics::{InitialState, Propagator};
use dimerchain::{build_hamiltonian, eigendecompose, ChainSpec, Family, Hamiltonian};

fn dense(h: &Hamiltonian) -> DMatrix<f64> {
    let n = h.dim();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = h.diag()[i];
    }
    for (i, &t) in h.offdiag().iter().enumerate() {
        m[(i, i + 1)] = t;
        m[(i + 1, i)] = t;
    }
    m
}

fn sorted_dense_eigenvalues(h: &Hamiltonian) -> Vec<f64> {
    let mut v: Vec<f64> = dense(h).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn chains_match_dense_solver() {
    for family in [Family::WeakCenter, Family::StrongCenter] {
        for n in [5, 7, 9, 11] {
            for (strong, weak) in [(8.0, 0.2), (1.0, 0.25), (3.0, 1.4)] {
                let spec = ChainSpec::new(family, n, strong, weak).unwrap();
                let h = build_hamiltonian(&spec, None).unwrap();
                let s = eigendecompose(&h).unwrap();
                for (a, b) in s.energies().iter().zip(sorted_dense_eigenvalues(&h)) {
                    assert!((a - b).abs() < 1e-9, "{family} N={n}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn arbitrary_tridiagonals_match_dense_solver() {
    // deterministic pseudo-random entries, including a disordered diagonal
    let mut x: u64 = 0x2545_f491_4f6c_dd1d;
    let mut next = || {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        (x >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    for n in 1..=12 {
        for _ in 0..20 {
            let diag: Vec<f64> = (0..n).map(|_| 5.0 * next()).collect();
            let off: Vec<f64> = (1..n).map(|_| 3.0 * next()).collect();
            let h = Hamiltonian::from_parts(diag, off).unwrap();
            let s = eigendecompose(&h).unwrap();
            for (a, b) in s.energies().iter().zip(sorted_dense_eigenvalues(&h)) {
                assert!((a - b).abs() < 1e-9, "n={n}: {a} vs {b}");
            }
        }
    }
}

fn times_h(h: &Hamiltonian, v: &[Complex64]) -> Vec<Complex64> {
    // -i H v
    let n = v.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut acc = v[i] * h.diag()[i];
        if i > 0 {
            acc += v[i - 1] * h.offdiag()[i - 1];
        }
        if i + 1 < n {
            acc += v[i + 1] * h.offdiag()[i];
        }
        out[i] = Complex64::new(acc.im, -acc.re);
    }
    out
}

fn rk4(h: &Hamiltonian, psi: &mut [Complex64], dt: f64, steps: usize) {
    let axpy = |a: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
        a.iter().zip(k).map(|(x, y)| x + y * s).collect()
    };
    for _ in 0..steps {
        let k1 = times_h(h, psi);
        let k2 = times_h(h, &axpy(psi, &k1, dt / 2.0));
        let k3 = times_h(h, &axpy(psi, &k2, dt / 2.0));
        let k4 = times_h(h, &axpy(psi, &k3, dt));
        for i in 0..psi.len() {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
}

#[test]
fn spectral_propagation_matches_rk4() {
    let checkpoints = [1.0, 10.0, 100.0, 1000.0];
    let dt: f64 = 1e-3;
    for family in [Family::WeakCenter, Family::StrongCenter] {
        for n in [5, 7] {
            let spec = ChainSpec::new(family, n, 1.0, 0.25).unwrap();
            let h = build_hamiltonian(&spec, None).unwrap();
            let s = eigendecompose(&h).unwrap();
            let start = -spec.half_len();
            let prop = Propagator::new(&s, &InitialState::site(&spec, start).unwrap()).unwrap();

            let mut psi = vec![Complex64::new(0.0, 0.0); n];
            psi[0] = Complex64::new(1.0, 0.0);
            let mut t: f64 = 0.0;
            for &target in &checkpoints {
                let steps = ((target - t) / dt).round() as usize;
                rk4(&h, &mut psi, dt, steps);
                t = target;
                let exact = prop.state(t);
                let err = exact.iter().zip(&psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(err < 1e-8, "{family} N={n} t={t}: deviation {err:e}");
            }
        }
    }
}
