mod common;

use fracdyn_core::ml::{kernel_scalar, ml_matrix, ml_real};
use fracdyn_core::Mat;

fn close(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs().max(1e-2)
}

#[test]
fn scalar_grid_matches_series_oracle() {
    let mut failures = Vec::new();
    for &alpha in &[0.3, 0.5, 0.75, 1.0, 1.25, 1.5, 1.8] {
        for &beta in &[0.5, 1.0, 1.5, 2.0, 3.0] {
            for &z in &[-5.0, -2.0, -0.3, 0.4, 1.5, 4.0] {
                let want = common::ml_series(alpha, beta, z);
                let got = ml_real(alpha, beta, z).unwrap();
                if !close(got, want, 1e-10) {
                    failures.push((alpha, beta, z, got, want));
                }
            }
        }
    }
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn kernel_matches_series_oracle() {
    for &alpha in &[0.4, 0.9, 1.6] {
        for &t in &[0.1f64, 1.0, 3.0] {
            let want = t.powf(alpha - 1.0) * common::ml_series(alpha, alpha, -t.powf(alpha));
            let got = kernel_scalar(alpha, -1.0, t).unwrap();
            assert!(
                close(got, want, 1e-10),
                "alpha {alpha}, t {t}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn diagonal_matrix_matches_scalar_oracle() {
    let a = Mat::from_diag(&[-1.5, -0.2, 0.7]);
    for &alpha in &[0.6, 1.3] {
        let m = ml_matrix(alpha, 1.0, &a, 2.0).unwrap();
        for i in 0..3 {
            let want = common::ml_series(alpha, 1.0, a[(i, i)] * 2f64.powf(alpha));
            assert!(close(m[(i, i)], want, 1e-10), "alpha {alpha}, entry {i}");
        }
    }
}
