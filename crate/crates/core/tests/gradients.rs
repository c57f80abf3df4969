use std::f64::consts::{PI, TAU};

use qcnn::circuits::{build_qcnn, ConvKind, EncodingKind};
use qcnn::cnn::{CnnArch, CnnModel};
use qcnn::dea::state_jacobian_column;
use qcnn::learn::{parameter_shift_gradient, parameter_shift_reference, LossKind, Model, QcnnModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_vec(rng: &mut ChaCha8Rng, n: usize, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.0..hi)).collect()
}

fn assert_close(a: f64, b: f64, rel: f64, what: &str) {
    let scale = a.abs().max(b.abs()).max(1.0);
    assert!((a - b).abs() <= rel * scale, "{what}: {a} vs {b}");
}

#[test]
fn jacobian_columns_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let h = 1e-6;
    for draw in 0..100 {
        let conv = if draw % 2 == 0 { ConvKind::So4 } else { ConvKind::Su4 };
        let spec = build_qcnn(conv, EncodingKind::ALL[draw % 4]);
        let theta = random_vec(&mut rng, spec.param_count(), TAU);
        let x = random_vec(&mut rng, 4, PI);
        let k = rng.gen_range(0..spec.param_count());
        let col = state_jacobian_column(&spec, &theta, &x, k).unwrap();
        let (mut tp, mut tm) = (theta.clone(), theta.clone());
        tp[k] += h;
        tm[k] -= h;
        let sp = spec.state(&tp, &x).unwrap();
        let sm = spec.state(&tm, &x).unwrap();
        for (i, c) in col.iter().enumerate() {
            let fd = (sp.amplitudes()[i] - sm.amplitudes()[i]) / (2.0 * h);
            assert!((c - fd).norm() < 1e-8, "draw {draw} slot {k}");
        }
    }
}

#[test]
fn parameter_shift_matches_reference_and_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let h = 1e-5;
    for draw in 0..50 {
        let conv = if draw % 2 == 0 { ConvKind::So4 } else { ConvKind::Su4 };
        let spec = build_qcnn(conv, EncodingKind::ALL[draw % 4]);
        let theta = random_vec(&mut rng, spec.param_count(), TAU);
        let x = random_vec(&mut rng, 4, PI);
        let (y, fast) = parameter_shift_gradient(&spec, &theta, &x).unwrap();
        assert_eq!(y, spec.forward(&theta, &x).unwrap());
        let reference = parameter_shift_reference(&spec, &theta, &x).unwrap();
        for k in 0..spec.param_count() {
            assert_close(fast[k], reference[k], 1e-10, "shift vs reference");
            let (mut tp, mut tm) = (theta.clone(), theta.clone());
            tp[k] += h;
            tm[k] -= h;
            let fd = (spec.forward(&tp, &x).unwrap() - spec.forward(&tm, &x).unwrap()) / (2.0 * h);
            assert_close(fast[k], fd, 1e-5, "shift vs finite difference");
        }
    }
}

#[test]
fn frozen_slots_get_zero_gradient() {
    let spec = build_qcnn(ConvKind::So4, EncodingKind::Hee1)
        .with_frozen(&[(0, 0.3), (7, 1.1)])
        .unwrap();
    let theta = vec![0.4; spec.param_count()];
    let (_, g) = parameter_shift_gradient(&spec, &theta, &[0.1, 0.2, 0.3, 0.4]).unwrap();
    assert_eq!((g[0], g[7]), (0.0, 0.0));
}

#[test]
fn crossentropy_qcnn_gradient_is_rescaled() {
    let spec = build_qcnn(ConvKind::So4, EncodingKind::Tpe);
    let mse = QcnnModel::new(spec.clone(), LossKind::Mse, "a");
    let ce = QcnnModel::new(spec, LossKind::CrossEntropy, "b");
    let p = mse.init_params(&mut ChaCha8Rng::seed_from_u64(1));
    let x = [0.5, 1.0, 1.5, 2.0];
    let (y, g) = mse.predict_with_grad(&p, &x).unwrap();
    let (q, gq) = ce.predict_with_grad(&p, &x).unwrap();
    assert!((q - (1.0 + y) / 2.0).abs() < 1e-15);
    for (a, b) in g.iter().zip(&gq) {
        assert!((a / 2.0 - b).abs() < 1e-15);
    }
}

#[test]
fn cnn_backprop_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let h = 1e-6;
    let mut checked = 0;
    for draw in 0..50 {
        let arch = if draw % 2 == 0 { CnnArch::SMALL } else { CnnArch::LARGE };
        let loss = LossKind::ALL[draw % 3];
        let model = CnnModel::new(arch, loss);
        let params: Vec<f64> = (0..arch.param_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let image = random_vec(&mut rng, 4, PI);
        let label = (draw % 2) as u8;
        let g = model.backward(&params, &image, label).unwrap();
        let loss_at = |p: &[f64]| {
            let y = loss.target(label);
            qcnn::learn::loss(loss, &[y], &[model.forward(p, &image).unwrap()]).unwrap()
        };
        for k in 0..params.len() {
            let (mut pp, mut pm) = (params.clone(), params.clone());
            pp[k] += h;
            pm[k] -= h;
            let fd = (loss_at(&pp) - loss_at(&pm)) / (2.0 * h);
            let scale = g[k].abs().max(fd.abs()).max(1.0);
            if (g[k] - fd).abs() > 1e-6 * scale {
                // only acceptable if the one-sided slopes disagree (non-smooth point)
                let left = (loss_at(&params) - loss_at(&pm)) / h;
                let right = (loss_at(&pp) - loss_at(&params)) / h;
                assert!((left - right).abs() > 1e-3, "draw {draw} param {k}: {} vs {fd}", g[k]);
            } else {
                checked += 1;
            }
        }
    }
    assert!(checked > 1500);
}
