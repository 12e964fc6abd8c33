use proptest::prelude::*;
use singcov::ewens::{
    ewens_estimator, ewens_transform, hybrid_estimator, hybrid_estimator_exhaustive, sample_ewens, Theta,
};
use singcov::linalg::{block_pinv_update, frobenius_norm, pinv, sample_gaussian_covariance};
use singcov::toeplitz::{ewens_transform_closedform, ToeplitzFamily};
use singcov::{CMatrix, CVector, Complex64, HermitianMatrix, RandomSource};

fn complex_matrix(rows: usize, cols: usize, vals: &[(f64, f64)]) -> CMatrix {
    CMatrix::from_fn(rows, cols, |i, j| {
        let (re, im) = vals[(i * cols + j) % vals.len()];
        Complex64::new(re, im)
    })
}

fn hermitian(m: usize, vals: &[(f64, f64)]) -> HermitianMatrix {
    let g = complex_matrix(m, m, vals);
    HermitianMatrix::symmetrized(&g + g.adjoint())
}

fn entries() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 36..=36)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ewens_transform_is_linear_and_trace_preserving(m in 2usize..6, t in 0.1f64..20.0, v in entries(), w in entries()) {
        let theta = Theta::new(t).unwrap();
        let a = complex_matrix(m, m, &v);
        let b = complex_matrix(m, m, &w);
        let sum = ewens_transform(&(&a + &b * Complex64::new(0.5, -1.0)), theta);
        let parts = ewens_transform(&a, theta) + ewens_transform(&b, theta) * Complex64::new(0.5, -1.0);
        prop_assert!(frobenius_norm(&(sum - parts)) < 1e-11 * (1.0 + frobenius_norm(&a) + frobenius_norm(&b)));
        prop_assert!((ewens_transform(&a, theta).trace() - a.trace()).norm() < 1e-12 * (1.0 + a.trace().norm()));
    }

    #[test]
    fn hybrid_closed_form_matches_enumeration(m in 2usize..6, p_frac in 0.0f64..1.0, t in 0.1f64..10.0, v in entries()) {
        let p = 1 + ((m - 1) as f64 * p_frac).round() as usize;
        let k = hermitian(m, &v);
        let theta = Theta::new(t).unwrap();
        let a = hybrid_estimator(&k, theta, p).unwrap();
        let b = hybrid_estimator_exhaustive(&k, theta, p).unwrap();
        prop_assert!(frobenius_norm(&(a.as_matrix() - b.as_matrix())) < 1e-11 * (1.0 + frobenius_norm(k.as_matrix())));
    }

    #[test]
    fn block_update_matches_svd(rows in 1usize..6, cols in 2usize..6, v in entries(), w in entries()) {
        let head = complex_matrix(rows, cols - 1, &v);
        let tail = CVector::from_fn(rows, |i, _| Complex64::new(w[i].0, w[i].1));
        let mut full = CMatrix::zeros(rows, cols);
        full.columns_mut(0, cols - 1).copy_from(&head);
        full.set_column(cols - 1, &tail);
        let mp = pinv(&full);
        let want = &mp * mp.adjoint();
        let got = block_pinv_update(&head, &tail);
        // cyclic fills can make the head nearly rank deficient; scale by the size of the answer
        prop_assert!(frobenius_norm(&(got.pinv.as_matrix() - &want)) <= 1e-7 * (1.0 + frobenius_norm(&want)));
    }

    #[test]
    fn toeplitz_closed_forms_match_generic_transform(m in 3usize..40, t in 0.2f64..200.0, b in 0.0f64..0.5, alpha in 0.0f64..0.95) {
        let theta = Theta::new(t).unwrap();
        for fam in [ToeplitzFamily::Tridiagonal { b }, ToeplitzFamily::Power { alpha }] {
            let closed = ewens_transform_closedform(fam, m, theta).unwrap();
            let generic = ewens_estimator(&fam.matrix(m).unwrap(), theta);
            let err = frobenius_norm(&(closed.as_matrix() - generic.as_matrix()));
            prop_assert!(err < 1e-9, "{fam:?}: {err}");
        }
    }
}

#[test]
fn ewens_cycle_counts_have_the_right_mean() {
    let (m, t) = (8, 2.5);
    let theta = Theta::new(t).unwrap();
    let mut rng = RandomSource::new(99).stream(0);
    let draws = 200_000;
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..draws {
        let c = sample_ewens(m, theta, &mut rng).cycle_count() as f64;
        sum += c;
        sq += c * c;
    }
    let mean = sum / draws as f64;
    let se = ((sq / draws as f64 - mean * mean) / draws as f64).sqrt();
    let exact: f64 = (0..m).map(|i| t / (t + i as f64)).sum();
    assert!((mean - exact).abs() < 5.0 * se, "mean {mean} vs {exact} (se {se})");
}

#[test]
fn estimators_on_a_singular_sample_covariance() {
    let truth = ToeplitzFamily::Power { alpha: 0.5 }.matrix(30).unwrap();
    let mut rng = RandomSource::new(5).stream(0);
    let k = sample_gaussian_covariance(&truth, 12, &mut rng).unwrap();
    let ev = singcov::linalg::eigenvalues(&k).unwrap();
    assert_eq!(ev.iter().filter(|x| x.abs() < 1e-10).count(), 18);
    // moderate θ lifts the null space
    let est = ewens_estimator(&k, Theta::new(30.0).unwrap());
    let ev = singcov::linalg::eigenvalues(&est).unwrap();
    assert!(ev.iter().all(|&x| x > 0.0), "{ev:?}");
    // p = m hybrid is the identity map
    let same = hybrid_estimator(&k, Theta::new(3.0).unwrap(), 30).unwrap();
    assert!(frobenius_norm(&(same.as_matrix() - k.as_matrix())) < 1e-12);
}
