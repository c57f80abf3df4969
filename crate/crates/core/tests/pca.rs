use nalgebra::{DMatrix, SymmetricEigen};
use qcnn::data::synthetic_jets;
use qcnn::jetprep::{preprocess, PrepConfig};
use qcnn::pca::{pca_fit, PcaModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Leading eigenvectors of the sample covariance, largest eigenvalue first.
fn covariance_oracle(rows: &[Vec<f64>], k: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = rows.len();
    let d = rows[0].len();
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let x = DMatrix::from_fn(n, d, |i, j| rows[i][j] - mean[j]);
    let cov = x.transpose() * &x / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vecs = order[..k]
        .iter()
        .map(|&c| eig.eigenvectors.column(c).iter().copied().collect())
        .collect();
    let vals = order[..k].iter().map(|&c| eig.eigenvalues[c]).collect();
    (vecs, vals)
}

fn check_against_oracle(rows: &[Vec<f64>], model: &PcaModel) {
    let (vecs, vals) = covariance_oracle(rows, model.n_components());
    for (k, (c, o)) in model.components.iter().zip(&vecs).enumerate() {
        let dot: f64 = c.iter().zip(o).map(|(a, b)| a * b).sum();
        let sign = dot.signum();
        for (a, b) in c.iter().zip(o) {
            assert!((a - sign * b).abs() < 1e-8, "component {k}");
        }
        assert!((model.explained_variance[k] - vals[k]).abs() <= 1e-9 * vals[0]);
    }
}

#[test]
fn components_match_covariance_eigensolve() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let d = 12;
    // anisotropic Gaussian cloud with well-separated variances
    let scales: Vec<f64> = (0..d).map(|j| 3.0 / (1.0 + j as f64)).collect();
    let mix = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0)).qr().q();
    let rows: Vec<Vec<f64>> = (0..300)
        .map(|_| {
            let z: Vec<f64> = scales.iter().map(|s| s * rng.gen_range(-1.0..1.0)).collect();
            (0..d).map(|i| (0..d).map(|j| mix[(i, j)] * z[j]).sum::<f64>() + 0.5).collect()
        })
        .collect();
    let model = pca_fit(&rows, 4).unwrap();
    check_against_oracle(&rows, &model);
}

#[test]
fn jet_images_fit_matches_oracle_and_reconstructs_low_rank() {
    let jets = synthetic_jets(200, 7);
    let (images, _) = preprocess(&jets, &PrepConfig::default());
    let rows: Vec<Vec<f64>> = images.iter().map(|(im, _)| im.pixels.clone()).collect();
    let model = pca_fit(&rows, 4).unwrap();
    check_against_oracle(&rows, &model);
    for row in &rows {
        let p = model.transform(row).unwrap();
        for (v, lo, hi) in p.iter().zip(&model.feature_min).zip(&model.feature_max).map(|((v, a), b)| (v, a, b)) {
            assert!(*lo <= *v && *v <= *hi);
        }
    }

    // rank-4 data is reproduced exactly from four components
    let low: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| model.inverse_transform(&model.transform(r).unwrap()).unwrap())
        .collect();
    let refit = pca_fit(&low, 4).unwrap();
    for r in &low {
        let back = refit.inverse_transform(&refit.transform(r).unwrap()).unwrap();
        let resid = back.iter().zip(r).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(resid < 1e-9);
    }
}

#[test]
fn model_json_round_trip_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rows: Vec<Vec<f64>> = (0..20).map(|_| (0..6).map(|_| rng.gen::<f64>()).collect()).collect();
    let model = pca_fit(&rows, 3).unwrap();
    let back = PcaModel::from_json(&model.to_json().unwrap()).unwrap();
    assert_eq!(back, model);
}
