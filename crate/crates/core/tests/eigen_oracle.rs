//! Exact eigenvalues against the roots of the characteristic polynomial.

use lambda_mixer_core::levelsys::{build_hamiltonian, eig_exact, ComplexMatrix, Model};
use lambda_mixer_core::{FieldState, SystemParams};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Monic characteristic polynomial coefficients [1, c1, ..., cn] of A by the
/// Faddeev–LeVerrier recursion.
fn char_poly(a: &DMatrix<Complex64>) -> Vec<Complex64> {
    let n = a.nrows();
    let id = DMatrix::<Complex64>::identity(n, n);
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m + &id * coeffs[k - 1];
        let am = a * &m;
        coeffs.push(-am.trace() / k as f64);
    }
    coeffs
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().fold(Complex64::new(0.0, 0.0), |acc, &ci| acc * z + ci)
}

/// All roots of a monic polynomial by Durand–Kerner iteration.
fn poly_roots(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let radius = 1.0 + c.iter().skip(1).map(|z| z.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..5000 {
        let mut change = 0.0f64;
        for i in 0..n {
            let denom = (0..n).filter(|&j| j != i).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            let step = horner(c, z[i]) / denom;
            z[i] -= step;
            change = change.max(step.norm());
        }
        if change < 1e-15 * radius {
            break;
        }
    }
    z
}

/// Largest distance from an eigenvalue to its nearest unused root.
fn spectrum_mismatch(m: &ComplexMatrix) -> f64 {
    let eig: Vec<Complex64> = eig_exact(m).unwrap().iter().map(|p| p.value).collect();
    let mut roots = poly_roots(&char_poly(m.as_matrix()));
    let mut worst = 0.0f64;
    for lam in eig {
        let (idx, d) = roots
            .iter()
            .enumerate()
            .map(|(i, r)| (i, (r - lam).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        roots.remove(idx);
        worst = worst.max(d);
    }
    worst
}

fn random_field(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
    Complex64::from_polar(rng.random_range(lo..hi), rng.random_range(0.0..std::f64::consts::TAU))
}

#[test]
fn oracle_recovers_known_polynomial() {
    // (z − 1)(z + 2i)(z − 0.5) expanded
    let roots = [Complex64::new(1.0, 0.0), Complex64::new(0.0, -2.0), Complex64::new(0.5, 0.0)];
    let m = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&roots));
    let found = poly_roots(&char_poly(&m));
    for r in roots {
        assert!(found.iter().any(|f| (f - r).norm() < 1e-12));
    }
}

#[test]
fn random_dense_matrices_match_characteristic_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [4, 5] {
        for _ in 0..50 {
            let m = DMatrix::from_fn(n, n, |_, _| random_field(&mut rng, 0.0, 1.0));
            let cm = ComplexMatrix::new(m).unwrap();
            let err = spectrum_mismatch(&cm);
            assert!(err <= 1e-9 * cm.norm().max(1.0), "n = {n}: mismatch {err}");
        }
    }
}

#[test]
fn hamiltonians_match_characteristic_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let params = SystemParams::default();
    for model in [Model::FourLevel, Model::FiveLevel] {
        for _ in 0..50 {
            let mut f = || random_field(&mut rng, 0.1, 0.8);
            let fields = FieldState::new(f(), f(), f(), f());
            let h = build_hamiltonian(model, &fields, &params);
            let err = spectrum_mismatch(&h);
            assert!(err <= 1e-9, "{model:?}: mismatch {err}");
        }
    }
}

#[test]
fn eigenvalues_sum_to_trace_and_multiply_to_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let params = SystemParams::default();
    for model in [Model::FourLevel, Model::FiveLevel] {
        for _ in 0..50 {
            let mut f = || random_field(&mut rng, 0.05, 1.5);
            let fields = FieldState::new(f(), f(), f(), f());
            let h = build_hamiltonian(model, &fields, &params);
            let pairs = eig_exact(&h).unwrap();
            let sum: Complex64 = pairs.iter().map(|p| p.value).sum();
            let tr = h.trace();
            assert!((sum - tr).norm() <= 1e-12 * h.norm(), "trace {sum} vs {tr}");
            let prod: Complex64 = pairs.iter().map(|p| p.value).product();
            let det = h.as_matrix().clone().determinant();
            assert!((prod - det).norm() <= 1e-10 * h.norm().powi(h.dim() as i32));
            for p in &pairs {
                assert!(p.residual <= 1e-10 * h.norm());
                assert!((p.vector.norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}
