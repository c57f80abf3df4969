//! Dimensional expressivity analysis.
//!
//! The circuit is viewed as a map `θ ↦ C(θ)` into the state space. A
//! parameter is redundant when its state derivative is a linear combination
//! of the derivatives of the parameters already kept. Independence is tested
//! inductively on the real Jacobian `J = (Re ∂C; Im ∂C)` through the smallest
//! eigenvalue of `S = Jᵀ J`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{CircuitSpec, Op, QCNN_QUBITS};
use crate::error::{check_len, Error, Result};
use crate::statevec::State;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_POINTS: usize = 5;

/// One evaluation point of the state map: parameters and the encoded input.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePoint {
    pub theta: Vec<f64>,
    pub x: Vec<f64>,
}

/// Draws `n` points with `θ ∈ [0, 2π)^k` and `x ∈ [0, π]^4`.
pub fn sample_points(spec: &CircuitSpec, n: usize, seed: u64) -> Vec<SamplePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| SamplePoint {
            theta: (0..spec.param_count())
                .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
                .collect(),
            x: (0..QCNN_QUBITS)
                .map(|_| rng.gen_range(0.0..=std::f64::consts::PI))
                .collect(),
        })
        .collect()
}

/// Exact derivative `∂_k C(θ)` of the final state with respect to slot `k`.
///
/// Each rotation `exp(-iθP/2)` differentiates to `(-i/2) P exp(-iθP/2)`;
/// contributions from every occurrence of a shared slot are summed.
pub fn state_jacobian_column(
    spec: &CircuitSpec,
    theta: &[f64],
    x: &[f64],
    slot: usize,
) -> Result<Vec<Complex64>> {
    check_len(spec.param_count(), theta.len())?;
    if slot >= spec.param_count() {
        return Err(Error::Index(format!("parameter slot {slot}")));
    }
    if spec.is_frozen(slot) {
        return Err(Error::Precondition(format!("slot {slot} is frozen")));
    }
    let prefixes = prefix_states(spec, theta, x)?;
    Ok(column_from_prefixes(spec, theta, x, &prefixes, slot))
}

/// States before each gate; `prefixes[g]` is the state entering gate `g`.
fn prefix_states(spec: &CircuitSpec, theta: &[f64], x: &[f64]) -> Result<Vec<State>> {
    // forward() checks shapes; reuse it before stepping gate by gate
    spec.state(theta, x)?;
    let mut s = State::zero(spec.num_qubits())?;
    let mut out = Vec::with_capacity(spec.ops().len());
    for op in spec.ops() {
        out.push(s.clone());
        spec.apply_op(&mut s, op, theta, x);
    }
    Ok(out)
}

fn column_from_prefixes(
    spec: &CircuitSpec,
    theta: &[f64],
    x: &[f64],
    prefixes: &[State],
    slot: usize,
) -> Vec<Complex64> {
    let dim = 1 << spec.num_qubits();
    let mut col = vec![Complex64::new(0.0, 0.0); dim];
    let half_i = Complex64::new(0.0, -0.5);
    for (g, op) in spec.ops().iter().enumerate() {
        if op.param_slot() != Some(slot) {
            continue;
        }
        let Op::Rot { axis, target, .. } = *op else {
            unreachable!("param_slot is only set on rotations")
        };
        let mut s = prefixes[g].clone();
        let rot = spec.op_matrix(op, theta, x).expect("rotation");
        let deriv = axis.pauli().scale(half_i).mul(&rot);
        s.apply_matrix_unchecked(&deriv, target);
        for later in &spec.ops()[g + 1..] {
            spec.apply_op(&mut s, later, theta, x);
        }
        for (c, a) in col.iter_mut().zip(s.amplitudes()) {
            *c += a;
        }
    }
    col
}

/// Real Jacobian with one column per listed slot: rows are `Re` entries
/// followed by `Im` entries.
pub fn real_jacobian(spec: &CircuitSpec, point: &SamplePoint, slots: &[usize]) -> Result<DMatrix<f64>> {
    for &k in slots {
        if k >= spec.param_count() {
            return Err(Error::Index(format!("parameter slot {k}")));
        }
        if spec.is_frozen(k) {
            return Err(Error::Precondition(format!("slot {k} is frozen")));
        }
    }
    let prefixes = prefix_states(spec, &point.theta, &point.x)?;
    let dim = 1 << spec.num_qubits();
    let mut j = DMatrix::zeros(2 * dim, slots.len());
    for (c, &k) in slots.iter().enumerate() {
        let col = column_from_prefixes(spec, &point.theta, &point.x, &prefixes, k);
        for (r, a) in col.iter().enumerate() {
            j[(r, c)] = a.re;
            j[(dim + r, c)] = a.im;
        }
    }
    Ok(j)
}

/// `S = Jᵀ J`.
pub fn s_matrix(j: &DMatrix<f64>) -> DMatrix<f64> {
    j.transpose() * j
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sorted_eigenvalues(s: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(s.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `2^(Q+1) − 1`: real dimension of the normalized state manifold.
pub fn state_space_dim(num_qubits: usize) -> usize {
    (1 << (num_qubits + 1)) - 1
}

/// Outcome of an inductive redundancy scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedundancyReport {
    pub kept: Vec<usize>,
    pub redundant: Vec<usize>,
    pub achieved_rank: usize,
    pub state_space_dim: usize,
    pub tolerance: f64,
    pub points: usize,
    /// Whether scanning each point on its own gives the same kept set.
    pub stable: bool,
}

impl RedundancyReport {
    /// Redundancy flag per parameter slot.
    pub fn redundant_mask(&self, param_count: usize) -> Vec<bool> {
        let mut mask = vec![false; param_count];
        for &k in &self.redundant {
            if k < param_count {
                mask[k] = true;
            }
        }
        mask
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Does appending a column raise the rank of the already-kept columns?
fn raises_rank(j: &DMatrix<f64>, kept: &[usize], candidate: usize, tol: f64) -> bool {
    let mut cols: Vec<usize> = kept.to_vec();
    cols.push(candidate);
    let sub = j.select_columns(cols.iter());
    let ev = sorted_eigenvalues(&s_matrix(&sub));
    let largest = *ev.last().expect("at least one column");
    largest > 0.0 && ev[0] > tol * largest
}

fn scan_kept(
    spec: &CircuitSpec,
    jacobians: &[DMatrix<f64>],
    slots: &[usize],
    tol: f64,
) -> Vec<usize> {
    let max_rank = state_space_dim(spec.num_qubits());
    let mut kept_cols: Vec<usize> = Vec::new();
    for c in 0..slots.len() {
        if kept_cols.len() == max_rank {
            break;
        }
        if jacobians.iter().all(|j| raises_rank(j, &kept_cols, c, tol)) {
            kept_cols.push(c);
        }
    }
    kept_cols.into_iter().map(|c| slots[c]).collect()
}

/// Inductive scan over trainable slots in circuit order.
///
/// A slot is kept only when its column raises the rank at every sample
/// point. Once the rank reaches `2^(Q+1) − 1` every remaining slot is
/// redundant. Already-frozen slots are skipped and listed as redundant.
pub fn redundancy_scan(spec: &CircuitSpec, points: &[SamplePoint], tol: f64) -> Result<RedundancyReport> {
    if points.is_empty() {
        return Err(Error::Config("redundancy scan needs at least one sample point".into()));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let slots = scan_order(spec);
    let jacobians = points
        .par_iter()
        .map(|p| real_jacobian(spec, p, &slots))
        .collect::<Result<Vec<_>>>()?;

    let kept = scan_kept(spec, &jacobians, &slots, tol);
    let per_point: Vec<Vec<usize>> = jacobians
        .par_iter()
        .map(|j| scan_kept(spec, std::slice::from_ref(j), &slots, tol))
        .collect();
    let stable = per_point.iter().all(|k| *k == kept);
    if !stable {
        log::warn!("redundancy scan differs between sample points");
    }

    let redundant = (0..spec.param_count()).filter(|k| !kept.contains(k)).collect();
    Ok(RedundancyReport {
        achieved_rank: kept.len(),
        kept,
        redundant,
        state_space_dim: state_space_dim(spec.num_qubits()),
        tolerance: tol,
        points: points.len(),
        stable,
    })
}

/// Trainable slots ordered by their first occurrence in the gate list.
fn scan_order(spec: &CircuitSpec) -> Vec<usize> {
    let mut order = Vec::new();
    for op in spec.ops() {
        if let Some(k) = op.param_slot() {
            if !spec.is_frozen(k) && !order.contains(&k) {
                order.push(k);
            }
        }
    }
    // slots that never appear in a gate are trivially redundant; omit them
    order
}

/// Freezes every redundant slot at its value in `theta_freeze`.
pub fn prune(spec: &CircuitSpec, report: &RedundancyReport, theta_freeze: &[f64]) -> Result<CircuitSpec> {
    check_len(spec.param_count(), theta_freeze.len())?;
    if report.achieved_rank != report.kept.len()
        || report.kept.len() + report.redundant.len() != spec.param_count()
        || report.kept.iter().chain(&report.redundant).any(|&k| k >= spec.param_count())
        || report.state_space_dim != state_space_dim(spec.num_qubits())
    {
        return Err(Error::Config("redundancy report does not match circuit".into()));
    }
    let freeze: Vec<(usize, f64)> = report
        .redundant
        .iter()
        .filter(|&&k| !spec.is_frozen(k))
        .map(|&k| (k, theta_freeze[k]))
        .collect();
    spec.with_frozen(&freeze)
}
