use std::f64::consts::{PI, TAU};

use qcnn::circuits::{build_qcnn, ConvKind, EncodingKind};
use qcnn::cnn::{CnnArch, CnnModel};
use qcnn::data::{separable_blobs, split_train_test, Split};
use qcnn::dea::{prune, redundancy_scan, sample_points, DEFAULT_TOLERANCE};
use qcnn::learn::{
    grid_csv, run_grid, train, GridCell, LossKind, Model, QcnnModel, RunLog, TrainConfig, GRID_HEADER,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn blob_split(n: usize, seed: u64) -> Split {
    let d = separable_blobs(n, 6.0, seed);
    let (tr, te) = split_train_test(&d.labels, 0.8, seed).unwrap();
    Split {
        train: d.subset(&tr),
        test: d.subset(&te),
    }
}

fn qcnn(conv: ConvKind, enc: EncodingKind, loss: LossKind) -> QcnnModel {
    QcnnModel::new(build_qcnn(conv, enc), loss, format!("{conv}"))
}

#[test]
fn seeded_training_is_bit_reproducible() {
    let data = blob_split(200, 1);
    let cfg = TrainConfig {
        epochs: 3,
        batch_size: 16,
        seed: 5,
        ..Default::default()
    };
    let m = qcnn(ConvKind::Su4, EncodingKind::Che, LossKind::Mse);
    let a = train(&m, &data, &cfg).unwrap();
    let b = train(&m, &data, &cfg).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(
        a.final_params.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        b.final_params.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
    let c = train(&m, &data, &TrainConfig { seed: 6, ..cfg }).unwrap();
    assert_ne!(a.final_params, c.final_params);
}

#[test]
fn zero_epochs_records_only_initial_evaluation() {
    let data = blob_split(100, 2);
    let m = CnnModel::new(CnnArch::SMALL, LossKind::Hinge);
    let cfg = TrainConfig {
        epochs: 0,
        loss: LossKind::Hinge,
        ..Default::default()
    };
    let log = train(&m, &data, &cfg).unwrap();
    assert_eq!(log.records.len(), 1);
    assert_eq!(log.records[0].epoch, 0);
    assert_eq!(log.final_params, m.init_params(&mut <ChaCha8Rng as SeedableRng>::seed_from_u64(0)));
}

#[test]
fn runlog_csv_round_trips() {
    let data = blob_split(100, 3);
    let m = qcnn(ConvKind::So4, EncodingKind::Tpe, LossKind::CrossEntropy);
    let cfg = TrainConfig {
        epochs: 2,
        loss: LossKind::CrossEntropy,
        ..Default::default()
    };
    let log = train(&m, &data, &cfg).unwrap();
    let text = log.to_csv();
    assert!(text.starts_with("epoch,train_loss,train_acc,test_loss,test_acc,wall_seconds\n"));
    assert_eq!(RunLog::from_csv(&text).unwrap(), log.records);
}

#[test]
fn config_mismatches_are_rejected() {
    let data = blob_split(100, 4);
    let m = qcnn(ConvKind::So4, EncodingKind::Tpe, LossKind::Mse);
    let wrong_loss = TrainConfig {
        loss: LossKind::Hinge,
        ..Default::default()
    };
    assert!(train(&m, &data, &wrong_loss).is_err());
    let huge_batch = TrainConfig {
        batch_size: 1000,
        ..Default::default()
    };
    assert!(train(&m, &data, &huge_batch).is_err());
    let mut narrow = data.clone();
    narrow.train.features[0].pop();
    assert!(train(&m, &narrow, &TrainConfig::default()).is_err());
}

#[test]
fn so4_learns_separable_blobs() {
    let data = blob_split(2000, 11);
    let m = qcnn(ConvKind::So4, EncodingKind::Hee1, LossKind::Mse);
    let log = train(&m, &data, &TrainConfig::default()).unwrap();
    assert_eq!(log.records.len(), 31);
    assert!(log.final_test_accuracy() >= 0.98, "{}", log.final_test_accuracy());
}

#[test]
fn cnn_learns_separable_blobs() {
    let data = blob_split(1000, 12);
    for loss in LossKind::ALL {
        let m = CnnModel::new(CnnArch::LARGE, loss);
        let cfg = TrainConfig {
            loss,
            learning_rate: 0.01,
            ..Default::default()
        };
        let log = train(&m, &data, &cfg).unwrap();
        assert!(log.final_test_accuracy() >= 0.95, "{loss}: {}", log.final_test_accuracy());
    }
}

#[test]
fn pruned_circuit_agrees_at_freeze_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for conv in [ConvKind::So4, ConvKind::Su4] {
        let spec = build_qcnn(conv, EncodingKind::Hee1);
        let report = redundancy_scan(&spec, &sample_points(&spec, 5, 7), DEFAULT_TOLERANCE).unwrap();
        let theta: Vec<f64> = (0..spec.param_count()).map(|_| rng.gen_range(0.0..TAU)).collect();
        let pruned = prune(&spec, &report, &theta).unwrap();
        assert_eq!(pruned.trainable_count(), report.kept.len());
        // the pruned circuit ignores whatever sits in frozen slots
        let mut scrambled = theta.clone();
        for &k in &report.redundant {
            scrambled[k] = rng.gen_range(0.0..TAU);
        }
        for _ in 0..100 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..=PI)).collect();
            let a = spec.forward(&theta, &x).unwrap();
            let b = pruned.forward(&scrambled, &x).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }
}

fn qcnn_cell(conv: ConvKind, enc: EncodingKind, config: TrainConfig) -> GridCell {
    GridCell {
        circuit: conv.to_string(),
        encoding: enc.to_string(),
        config,
        build: Box::new(move |loss| Box::new(qcnn(conv, enc, loss)) as Box<dyn Model + Send>),
    }
}

#[test]
fn single_run_grid_has_zero_stderr() {
    let data = blob_split(120, 14);
    let cfg = TrainConfig {
        epochs: 1,
        ..Default::default()
    };
    let (rows, logs) = run_grid(&data, &[qcnn_cell(ConvKind::So4, EncodingKind::Tpe, cfg)], 1).unwrap();
    assert_eq!(rows[0].stderr, 0.0);
    assert_eq!(rows[0].runs, 1);
    assert_eq!(rows[0].mean_acc, logs[0][0].final_test_accuracy());
}

#[test]
fn full_grid_covers_every_combination() {
    let data = blob_split(80, 15);
    let mut cells = Vec::new();
    for conv in [ConvKind::So4, ConvKind::Su4] {
        for loss in LossKind::ALL {
            for enc in EncodingKind::ALL {
                let cfg = TrainConfig {
                    epochs: 1,
                    batch_size: 32,
                    loss,
                    seed: 3,
                    ..Default::default()
                };
                cells.push(qcnn_cell(conv, enc, cfg));
            }
        }
    }
    let (rows, logs) = run_grid(&data, &cells, 2).unwrap();
    assert_eq!(rows.len(), 24);
    assert!(logs.iter().all(|l| l.len() == 2));
    // runs use consecutive seeds
    assert_eq!(logs[0][0].config.seed, 3);
    assert_eq!(logs[0][1].config.seed, 4);
    let csv = grid_csv(&rows);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(GRID_HEADER));
    assert_eq!(lines.next().unwrap().split(',').take(3).collect::<Vec<_>>(), ["SO4", "H", "TPE"]);
    assert_eq!(csv.lines().count(), 25);

    let (again, _) = run_grid(&data, &cells, 2).unwrap();
    assert_eq!(grid_csv(&again), csv);
}
