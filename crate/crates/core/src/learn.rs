//! Losses, gradients, Adam and the seeded mini-batch training loop shared by
//! the QCNN and the classical CNN.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{CircuitSpec, Op};
use crate::data::{Dataset, Split};
use crate::error::{check_len, Error, Result};
use crate::statevec::State;

pub const CE_CLAMP: f64 = 1e-7;
pub const DEFAULT_EPOCHS: usize = 30;
pub const DEFAULT_LEARNING_RATE: f64 = 0.001;
pub const DEFAULT_BATCH: usize = 32;
pub const DEFAULT_RUNS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LossKind {
    Hinge,
    Mse,
    CrossEntropy,
}

impl LossKind {
    pub const ALL: [LossKind; 3] = [LossKind::Hinge, LossKind::Mse, LossKind::CrossEntropy];

    /// Whether targets are ±1 (Hinge, MSE) rather than {0, 1}.
    pub fn signed_labels(self) -> bool {
        !matches!(self, LossKind::CrossEntropy)
    }

    /// Maps a stored {0, 1} class label onto this loss's target domain.
    pub fn target(self, label: u8) -> f64 {
        match (self.signed_labels(), label) {
            (true, 0) => -1.0,
            (true, _) => 1.0,
            (false, l) => f64::from(l.min(1)),
        }
    }

    /// Short code used in tables: H, M, C.
    pub fn code(self) -> &'static str {
        match self {
            LossKind::Hinge => "H",
            LossKind::Mse => "M",
            LossKind::CrossEntropy => "C",
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossKind::Hinge => "hinge",
            LossKind::Mse => "mse",
            LossKind::CrossEntropy => "crossentropy",
        })
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "hinge" | "h" => Ok(LossKind::Hinge),
            "mse" | "m" => Ok(LossKind::Mse),
            "crossentropy" | "ce" | "c" => Ok(LossKind::CrossEntropy),
            _ => Err(Error::Config(format!(
                "unknown loss '{s}' (allowed: hinge, mse, crossentropy)"
            ))),
        }
    }
}

fn check_domain(kind: LossKind, y: &[f64], pred: &[f64]) -> Result<()> {
    check_len(y.len(), pred.len())?;
    if y.is_empty() {
        return Err(Error::Domain("empty batch".into()));
    }
    for (&t, &p) in y.iter().zip(pred) {
        if !p.is_finite() {
            return Err(Error::Domain(format!("prediction {p}")));
        }
        let ok = if kind.signed_labels() {
            t == 1.0 || t == -1.0
        } else {
            (t == 0.0 || t == 1.0) && (0.0..=1.0).contains(&p)
        };
        if !ok {
            return Err(Error::Domain(format!("{kind}: label {t}, prediction {p}")));
        }
    }
    Ok(())
}

/// Batch-mean loss.
pub fn loss(kind: LossKind, y: &[f64], pred: &[f64]) -> Result<f64> {
    check_domain(kind, y, pred)?;
    let n = y.len() as f64;
    let total: f64 = y
        .iter()
        .zip(pred)
        .map(|(&t, &p)| match kind {
            LossKind::Hinge => (1.0 - t * p).max(0.0),
            LossKind::Mse => (t - p) * (t - p),
            LossKind::CrossEntropy => {
                let p = p.clamp(CE_CLAMP, 1.0 - CE_CLAMP);
                -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
            }
        })
        .sum();
    Ok(total / n)
}

/// `∂L/∂pred_i` of the batch-mean loss. Clamped CE predictions and
/// satisfied hinge margins contribute zero.
pub fn loss_gradient(kind: LossKind, y: &[f64], pred: &[f64]) -> Result<Vec<f64>> {
    check_domain(kind, y, pred)?;
    let n = y.len() as f64;
    Ok(y.iter()
        .zip(pred)
        .map(|(&t, &p)| {
            let g = match kind {
                LossKind::Hinge => {
                    if 1.0 - t * p > 0.0 {
                        -t
                    } else {
                        0.0
                    }
                }
                LossKind::Mse => -2.0 * (t - p),
                LossKind::CrossEntropy => {
                    if p <= CE_CLAMP || p >= 1.0 - CE_CLAMP {
                        0.0
                    } else {
                        -(t / p - (1.0 - t) / (1.0 - p))
                    }
                }
            };
            g / n
        })
        .collect())
}

/// Fraction of correct classifications. ±1 losses classify by the sign of
/// the prediction with an exact 0 counted wrong; CrossEntropy by `p > 0.5`.
pub fn accuracy(kind: LossKind, y: &[f64], pred: &[f64]) -> Result<f64> {
    check_len(y.len(), pred.len())?;
    if y.is_empty() {
        return Err(Error::Domain("accuracy of empty set".into()));
    }
    let correct = y
        .iter()
        .zip(pred)
        .filter(|(&t, &p)| {
            if kind.signed_labels() {
                (t > 0.0 && p > 0.0) || (t < 0.0 && p < 0.0)
            } else {
                (p > 0.5) == (t > 0.5)
            }
        })
        .count();
    Ok(correct as f64 / y.len() as f64)
}

/// Bias-corrected Adam.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        AdamState {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) -> Result<()> {
        check_len(self.m.len(), params.len())?;
        check_len(self.m.len(), grad.len())?;
        self.t += 1;
        let t = self.t as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }
}

/// A trainable binary classifier over fixed-width feature vectors.
///
/// Predictions are expressed in the target domain of the loss the model was
/// built for: `(−1, 1)` for Hinge/MSE and `(0, 1)` for CrossEntropy.
pub trait Model: Sync {
    fn num_params(&self) -> usize;
    fn input_width(&self) -> usize;
    fn loss_kind(&self) -> LossKind;
    fn init_params(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;
    fn predict(&self, params: &[f64], x: &[f64]) -> Result<f64>;
    /// Prediction and its gradient with respect to every parameter.
    fn predict_with_grad(&self, params: &[f64], x: &[f64]) -> Result<(f64, Vec<f64>)>;
    fn describe(&self) -> String;
}

/// Exact `∂ŷ/∂θ_k` for every parameter slot of a circuit (zero at frozen
/// slots), together with `ŷ`.
///
/// Each entry equals the two-term shift rule
/// `[ŷ(θ_k + π/2) − ŷ(θ_k − π/2)] / 2` summed over the occurrences of slot
/// `k`. The shifted expectations differ only in the cross term
/// `Im⟨λ_g| P |ψ_{g+1}⟩`, where `ψ_{g+1}` is the state after gate `g` and
/// `λ_g = U_{>g}† Z U_{>g} ψ_{g+1}`, so both are obtained from a single
/// backward sweep.
pub fn parameter_shift_gradient(spec: &CircuitSpec, theta: &[f64], x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let mut psi = spec.state(theta, x)?;
    let measured = spec.measured_qubit();
    let y_hat = psi.expect_z(measured)?;

    let mut lambda = psi.clone();
    lambda.apply_matrix_unchecked(&crate::statevec::Axis::Z.pauli(), measured);

    let mut grad = vec![0.0; spec.param_count()];
    for op in spec.ops().iter().rev() {
        if let (Some(k), Op::Rot { axis, target, .. }) = (op.param_slot(), op) {
            if !spec.is_frozen(k) {
                let mut p_psi = psi.clone();
                p_psi.apply_matrix_unchecked(&axis.pauli(), *target);
                grad[k] += inner(&lambda, &p_psi).im;
            }
        }
        undo(spec, op, &mut psi, theta, x);
        undo(spec, op, &mut lambda, theta, x);
    }
    Ok((y_hat, grad))
}

fn inner(a: &State, b: &State) -> num_complex::Complex64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(u, v)| u.conj() * v)
        .sum()
}

fn undo(spec: &CircuitSpec, op: &Op, s: &mut State, theta: &[f64], x: &[f64]) {
    match *op {
        Op::Cnot { control, target } => s.apply_cnot_unchecked(control, target),
        Op::Rot { target, .. } | Op::H(target) | Op::S(target) | Op::Sdg(target) => {
            let m = spec.op_matrix(op, theta, x).expect("single-qubit op").dagger();
            s.apply_matrix_unchecked(&m, target);
        }
    }
}

/// Reference shift rule: re-simulates the circuit at `θ_k ± π/2` for every
/// occurrence of every trainable slot. Quadratic in circuit size.
pub fn parameter_shift_reference(spec: &CircuitSpec, theta: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let shift = std::f64::consts::FRAC_PI_2;
    let mut grad = vec![0.0; spec.param_count()];
    for (g, op) in spec.ops().iter().enumerate() {
        let Some(k) = op.param_slot() else { continue };
        if spec.is_frozen(k) {
            continue;
        }
        let eval = |delta: f64| -> Result<f64> {
            // shift only this occurrence by splitting it into its own slot
            let mut ops = spec.ops().to_vec();
            let Op::Rot { axis, target, .. } = ops[g] else { unreachable!() };
            ops[g] = Op::Rot {
                axis,
                target,
                angle: crate::circuits::Angle::Const(theta[k] + delta),
            };
            let alt = CircuitSpec::new(spec.num_qubits(), ops, spec.param_count(), spec.measured_qubit())?;
            alt.forward(theta, x)
        };
        grad[k] += (eval(shift)? - eval(-shift)?) / 2.0;
    }
    Ok(grad)
}

/// QCNN classifier: trainable slots of a circuit, read out through `Z` on
/// the measured qubit. Under CrossEntropy the output is `(1 + ŷ) / 2`.
#[derive(Debug, Clone)]
pub struct QcnnModel {
    pub spec: CircuitSpec,
    pub loss: LossKind,
    pub name: String,
}

impl QcnnModel {
    pub fn new(spec: CircuitSpec, loss: LossKind, name: impl Into<String>) -> Self {
        QcnnModel {
            spec,
            loss,
            name: name.into(),
        }
    }

    fn map_output(&self, y: f64) -> (f64, f64) {
        match self.loss {
            LossKind::CrossEntropy => ((1.0 + y) / 2.0, 0.5),
            _ => (y, 1.0),
        }
    }
}

impl Model for QcnnModel {
    fn num_params(&self) -> usize {
        self.spec.trainable_count()
    }

    fn input_width(&self) -> usize {
        crate::circuits::QCNN_QUBITS
    }

    fn loss_kind(&self) -> LossKind {
        self.loss
    }

    /// Uniform in `[0, 2π)` per trainable slot.
    fn init_params(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..self.num_params())
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect()
    }

    fn predict(&self, params: &[f64], x: &[f64]) -> Result<f64> {
        let full = self.spec.expand(params)?;
        Ok(self.map_output(self.spec.forward(&full, x)?).0)
    }

    fn predict_with_grad(&self, params: &[f64], x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let full = self.spec.expand(params)?;
        let (y, g) = parameter_shift_gradient(&self.spec, &full, x)?;
        let (out, scale) = self.map_output(y);
        let g = self.spec.compress(&g)?.into_iter().map(|v| v * scale).collect();
        Ok((out, g))
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// Mean loss gradient over a batch, in trainable-slot order.
///
/// Per-sample gradients are evaluated in parallel and summed in sample order.
pub fn batch_gradient<M: Model + ?Sized>(model: &M, params: &[f64], batch: &Dataset) -> Result<(f64, Vec<f64>)> {
    let kind = model.loss_kind();
    let evals = (0..batch.len())
        .into_par_iter()
        .map(|i| model.predict_with_grad(params, &batch.features[i]))
        .collect::<Result<Vec<_>>>()?;
    let y: Vec<f64> = batch.labels.iter().map(|&l| kind.target(l)).collect();
    let preds: Vec<f64> = evals.iter().map(|e| e.0).collect();
    let value = loss(kind, &y, &preds)?;
    let dl = loss_gradient(kind, &y, &preds)?;
    let mut grad = vec![0.0; model.num_params()];
    for (w, (_, g)) in dl.iter().zip(&evals) {
        if *w != 0.0 {
            for (acc, gi) in grad.iter_mut().zip(g) {
                *acc += w * gi;
            }
        }
    }
    Ok((value, grad))
}

/// Gradient of the batch loss with respect to the trainable circuit slots.
pub fn qcnn_gradient(spec: &CircuitSpec, theta: &[f64], batch: &Dataset, kind: LossKind) -> Result<Vec<f64>> {
    let model = QcnnModel::new(spec.clone(), kind, "qcnn");
    let trainable = spec.compress(theta)?;
    Ok(batch_gradient(&model, &trainable, batch)?.1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub loss: LossKind,
    pub runs: usize,
    /// Fill the wall-clock column; off by default so logs are reproducible.
    pub record_time: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: DEFAULT_EPOCHS,
            batch_size: DEFAULT_BATCH,
            learning_rate: DEFAULT_LEARNING_RATE,
            seed: 0,
            loss: LossKind::Mse,
            runs: DEFAULT_RUNS,
            record_time: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, train_len: usize) -> Result<()> {
        if self.batch_size == 0 || self.runs == 0 {
            return Err(Error::Config("batch size and runs must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning rate {}", self.learning_rate)));
        }
        if self.batch_size > train_len {
            return Err(Error::Config(format!(
                "batch size {} exceeds training set of {train_len}",
                self.batch_size
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub test_loss: f64,
    pub test_acc: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub model: String,
    pub config: TrainConfig,
    /// Row 0 is the evaluation before any update.
    pub records: Vec<EpochRecord>,
    pub final_params: Vec<f64>,
}

pub const RUNLOG_HEADER: &str = "epoch,train_loss,train_acc,test_loss,test_acc,wall_seconds";

impl RunLog {
    pub fn final_test_accuracy(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.test_acc)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(RUNLOG_HEADER);
        s.push('\n');
        for r in &self.records {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.epoch, r.train_loss, r.train_acc, r.test_loss, r.test_acc, r.wall_seconds
            ));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Vec<EpochRecord>> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == RUNLOG_HEADER => {}
            _ => return Err(Error::Parse { line: 1, msg: format!("expected header '{RUNLOG_HEADER}'") }),
        }
        let mut out = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad("expected 6 fields"));
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("bad number"));
            out.push(EpochRecord {
                epoch: f[0].trim().parse().map_err(|_| bad("bad epoch"))?,
                train_loss: num(f[1])?,
                train_acc: num(f[2])?,
                test_loss: num(f[3])?,
                test_acc: num(f[4])?,
                wall_seconds: num(f[5])?,
            });
        }
        Ok(out)
    }
}

/// Loss and accuracy of `params` on a whole dataset.
pub fn evaluate<M: Model + ?Sized>(model: &M, params: &[f64], data: &Dataset) -> Result<(f64, f64)> {
    let kind = model.loss_kind();
    let preds = (0..data.len())
        .into_par_iter()
        .map(|i| model.predict(params, &data.features[i]))
        .collect::<Result<Vec<_>>>()?;
    let y: Vec<f64> = data.labels.iter().map(|&l| kind.target(l)).collect();
    Ok((loss(kind, &y, &preds)?, accuracy(kind, &y, &preds)?))
}

/// Seeded mini-batch Adam training with per-epoch evaluation on both splits.
pub fn train<M: Model + ?Sized>(model: &M, data: &Split, cfg: &TrainConfig) -> Result<RunLog> {
    if data.train.is_empty() || data.test.is_empty() {
        return Err(Error::Config("training needs non-empty train and test splits".into()));
    }
    for set in [&data.train, &data.test] {
        if let Some(row) = set.features.iter().find(|r| r.len() != model.input_width()) {
            return Err(Error::Config(format!(
                "feature width {} does not match model input {}",
                row.len(),
                model.input_width()
            )));
        }
    }
    if cfg.loss != model.loss_kind() {
        return Err(Error::Config(format!(
            "model built for {} but config asks for {}",
            model.loss_kind(),
            cfg.loss
        )));
    }
    cfg.validate(data.train.len())?;

    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = model.init_params(&mut rng);
    let mut adam = AdamState::new(params.len());
    let mut records = Vec::with_capacity(cfg.epochs + 1);

    let record = |epoch: usize, params: &[f64]| -> Result<EpochRecord> {
        let (train_loss, train_acc) = evaluate(model, params, &data.train)?;
        let (test_loss, test_acc) = evaluate(model, params, &data.test)?;
        Ok(EpochRecord {
            epoch,
            train_loss,
            train_acc,
            test_loss,
            test_acc,
            wall_seconds: if cfg.record_time { start.elapsed().as_secs_f64() } else { 0.0 },
        })
    };
    records.push(record(0, &params)?);

    let mut order: Vec<usize> = (0..data.train.len()).collect();
    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            let batch = data.train.subset(chunk);
            let (_, grad) = batch_gradient(model, &params, &batch)?;
            adam.step(&mut params, &grad, cfg.learning_rate)?;
        }
        records.push(record(epoch, &params)?);
    }
    Ok(RunLog {
        model: model.describe(),
        config: cfg.clone(),
        records,
        final_params: params,
    })
}

/// Mean and standard error (sample standard deviation over `√n`).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

/// One row of an aggregated experiment table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub circuit: String,
    pub loss: LossKind,
    pub encoding: String,
    pub batch: usize,
    pub runs: usize,
    pub mean_acc: f64,
    pub stderr: f64,
}

pub const GRID_HEADER: &str = "circuit,loss,encoding,batch,runs,mean_acc,stderr";

impl GridRow {
    pub fn from_logs(circuit: &str, encoding: &str, cfg: &TrainConfig, logs: &[RunLog]) -> Self {
        let accs: Vec<f64> = logs.iter().map(RunLog::final_test_accuracy).collect();
        let (mean_acc, stderr) = mean_stderr(&accs);
        GridRow {
            circuit: circuit.to_string(),
            loss: cfg.loss,
            encoding: encoding.to_string(),
            batch: cfg.batch_size,
            runs: logs.len(),
            mean_acc,
            stderr,
        }
    }
}

pub fn grid_csv(rows: &[GridRow]) -> String {
    let mut s = String::from(GRID_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.circuit,
            r.loss.code(),
            r.encoding,
            r.batch,
            r.runs,
            r.mean_acc,
            r.stderr
        ));
    }
    s
}

/// A grid cell: how to build the model for a loss, plus its table labels.
pub struct GridCell {
    pub circuit: String,
    pub encoding: String,
    pub config: TrainConfig,
    pub build: Box<dyn Fn(LossKind) -> Box<dyn Model + Send> + Sync>,
}

/// Trains every cell `runs` times with seeds `config.seed + r` and
/// aggregates the final-epoch test accuracy. Runs execute in parallel;
/// results are ordered by cell, then run.
pub fn run_grid(data: &Split, cells: &[GridCell], runs: usize) -> Result<(Vec<GridRow>, Vec<Vec<RunLog>>)> {
    if runs == 0 {
        return Err(Error::Config("runs must be at least 1".into()));
    }
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..runs).map(move |r| (c, r)))
        .collect();
    let logs = jobs
        .par_iter()
        .map(|&(c, r)| {
            let cell = &cells[c];
            let mut cfg = cell.config.clone();
            cfg.seed = cfg.seed.wrapping_add(r as u64);
            cfg.runs = runs;
            let model = (cell.build)(cfg.loss);
            train(model.as_ref(), data, &cfg)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut per_cell: Vec<Vec<RunLog>> = vec![Vec::with_capacity(runs); cells.len()];
    for ((c, _), log) in jobs.into_iter().zip(logs) {
        per_cell[c].push(log);
    }
    let rows = cells
        .iter()
        .zip(&per_cell)
        .map(|(cell, logs)| {
            let mut cfg = cell.config.clone();
            cfg.runs = runs;
            GridRow::from_logs(&cell.circuit, &cell.encoding, &cfg, logs)
        })
        .collect();
    Ok((rows, per_cell))
}
