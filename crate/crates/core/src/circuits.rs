//! Gate templates for the encodings, convolution and pooling blocks, and the
//! assembled four-qubit QCNN.
//!
//! A [`CircuitSpec`] is an ordered list of [`Op`]s whose rotation angles come
//! from a data slot, a trainable parameter slot, or a constant. Parameter
//! slots are shared: every occurrence of slot `k` reads the same `θ_k`.
//!
//! Layout of the assembled circuit (qubits indexed 0..4, index 0 = MSB):
//!
//! ```text
//! encoding
//! conv layer 1   (0,1) (1,2) (2,3) [(3,0) with ring connectivity]  shared block
//! pool layer 1   0 → 1, 2 → 3                                     shared block
//! conv layer 2   (1,3)
//! pool layer 2   1 → 3
//! measure Z on qubit 3
//! ```

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::statevec::{Axis, SingleQubitGate, State};

pub const QCNN_QUBITS: usize = 4;
pub const POOL_PARAMS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EncodingKind {
    Tpe,
    Hee1,
    Hee2,
    Che,
}

impl EncodingKind {
    pub const ALL: [EncodingKind; 4] = [
        EncodingKind::Tpe,
        EncodingKind::Hee1,
        EncodingKind::Hee2,
        EncodingKind::Che,
    ];

    /// Number of repeated layers: 2 for HEE2, otherwise 1.
    pub fn layers(self) -> usize {
        match self {
            EncodingKind::Hee2 => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncodingKind::Tpe => "TPE",
            EncodingKind::Hee1 => "HEE1",
            EncodingKind::Hee2 => "HEE2",
            EncodingKind::Che => "CHE",
        })
    }
}

impl FromStr for EncodingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "TPE" => Ok(EncodingKind::Tpe),
            "HEE1" => Ok(EncodingKind::Hee1),
            "HEE2" => Ok(EncodingKind::Hee2),
            "CHE" => Ok(EncodingKind::Che),
            _ => Err(Error::Config(format!(
                "unknown encoding '{s}' (allowed: TPE, HEE1, HEE2, CHE)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConvKind {
    So4,
    Su4,
}

impl ConvKind {
    pub fn block_params(self) -> usize {
        match self {
            ConvKind::So4 => 6,
            ConvKind::Su4 => 15,
        }
    }
}

impl fmt::Display for ConvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConvKind::So4 => "SO4",
            ConvKind::Su4 => "SU4",
        })
    }
}

impl FromStr for ConvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace(['(', ')'], "").as_str() {
            "SO4" => Ok(ConvKind::So4),
            "SU4" => Ok(ConvKind::Su4),
            _ => Err(Error::Config(format!(
                "unknown circuit '{s}' (allowed: SO4, SU4)"
            ))),
        }
    }
}

/// Which neighbouring pairs the first convolution layer covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    #[default]
    Line,
    Ring,
}

impl FromStr for Connectivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "line" => Ok(Connectivity::Line),
            "ring" => Ok(Connectivity::Ring),
            _ => Err(Error::Config(format!("unknown connectivity '{s}' (allowed: line, ring)"))),
        }
    }
}

/// Source of a rotation angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    /// Input feature `x_i`.
    Data(usize),
    /// Product `x_i · x_j` of two input features.
    DataProduct(usize, usize),
    /// Shared trainable parameter slot.
    Param(usize),
    Const(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Op {
    Rot { axis: Axis, target: usize, angle: Angle },
    H(usize),
    S(usize),
    Sdg(usize),
    Cnot { control: usize, target: usize },
}

impl Op {
    fn rot(axis: Axis, target: usize, angle: Angle) -> Op {
        Op::Rot {
            axis,
            target,
            angle,
        }
    }

    /// Qubits this gate touches.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Op::Rot { target, .. } | Op::H(target) | Op::S(target) | Op::Sdg(target) => {
                vec![target]
            }
            Op::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn param_slot(&self) -> Option<usize> {
        match *self {
            Op::Rot {
                angle: Angle::Param(k),
                ..
            } => Some(k),
            _ => None,
        }
    }

    fn shift_params(self, offset: usize) -> Op {
        match self {
            Op::Rot {
                axis,
                target,
                angle: Angle::Param(k),
            } => Op::rot(axis, target, Angle::Param(k + offset)),
            other => other,
        }
    }
}

/// Pushes `R(α,β,γ) = R_Z(γ) R_Y(β) R_Z(α)` as three rotations, α applied first.
fn push_r(ops: &mut Vec<Op>, target: usize, first_slot: usize) {
    ops.push(Op::rot(Axis::Z, target, Angle::Param(first_slot)));
    ops.push(Op::rot(Axis::Y, target, Angle::Param(first_slot + 1)));
    ops.push(Op::rot(Axis::Z, target, Angle::Param(first_slot + 2)));
}

/// Encoding layer `U_enc(x)` on four qubits.
pub fn encoding_ops(kind: EncodingKind) -> Vec<Op> {
    let n = QCNN_QUBITS;
    let mut ops = Vec::new();
    match kind {
        EncodingKind::Tpe => {
            for q in 0..n {
                ops.push(Op::rot(Axis::X, q, Angle::Data(q)));
            }
        }
        EncodingKind::Hee1 | EncodingKind::Hee2 => {
            for _ in 0..kind.layers() {
                for q in 0..n {
                    ops.push(Op::rot(Axis::X, q, Angle::Data(q)));
                }
                for q in 0..n {
                    ops.push(Op::Cnot {
                        control: q,
                        target: (q + 1) % n,
                    });
                }
            }
        }
        EncodingKind::Che => {
            for q in 0..n {
                ops.push(Op::H(q));
            }
            for q in 0..n {
                ops.push(Op::rot(Axis::Z, q, Angle::Data(q)));
            }
            for i in 0..n {
                for j in i + 1..n {
                    ops.push(Op::Cnot {
                        control: i,
                        target: j,
                    });
                    ops.push(Op::rot(Axis::Z, j, Angle::DataProduct(i, j)));
                    ops.push(Op::Cnot {
                        control: i,
                        target: j,
                    });
                }
            }
        }
    }
    ops
}

/// Convolution block on `pair`, reading parameter slots
/// `first_slot..first_slot + kind.block_params()`.
///
/// SO(4) is the magic-basis construction: `M† (R ⊗ R) M` with
/// `M = CNOT(b→a) · H_b · (S ⊗ S)`. SU(4) is the three-CNOT universal
/// two-qubit circuit with general rotations on both sides.
pub fn conv_block(kind: ConvKind, first_slot: usize, pair: (usize, usize)) -> Result<Vec<Op>> {
    let (a, b) = pair;
    if a == b {
        return Err(Error::Index(format!("conv block on identical qubits {a}")));
    }
    let p = first_slot;
    let mut ops = Vec::new();
    match kind {
        ConvKind::So4 => {
            ops.push(Op::S(a));
            ops.push(Op::S(b));
            ops.push(Op::H(b));
            ops.push(Op::Cnot {
                control: b,
                target: a,
            });
            push_r(&mut ops, a, p);
            push_r(&mut ops, b, p + 3);
            ops.push(Op::Cnot {
                control: b,
                target: a,
            });
            ops.push(Op::H(b));
            ops.push(Op::Sdg(a));
            ops.push(Op::Sdg(b));
        }
        ConvKind::Su4 => {
            push_r(&mut ops, a, p);
            push_r(&mut ops, b, p + 3);
            ops.push(Op::Cnot {
                control: a,
                target: b,
            });
            ops.push(Op::rot(Axis::Y, a, Angle::Param(p + 6)));
            ops.push(Op::rot(Axis::Z, b, Angle::Param(p + 7)));
            ops.push(Op::Cnot {
                control: b,
                target: a,
            });
            ops.push(Op::rot(Axis::Y, a, Angle::Param(p + 8)));
            ops.push(Op::Cnot {
                control: a,
                target: b,
            });
            push_r(&mut ops, a, p + 9);
            push_r(&mut ops, b, p + 12);
        }
    }
    Ok(ops)
}

/// Pooling block: general rotations on both qubits, a CNOT from `source`
/// to `sink`, then a general rotation on `sink`. Reads nine parameter slots.
pub fn pool_block(first_slot: usize, source: usize, sink: usize) -> Result<Vec<Op>> {
    if source == sink {
        return Err(Error::Index(format!("pool block on identical qubits {source}")));
    }
    let p = first_slot;
    let mut ops = Vec::new();
    push_r(&mut ops, source, p);
    push_r(&mut ops, sink, p + 3);
    ops.push(Op::Cnot {
        control: source,
        target: sink,
    });
    push_r(&mut ops, sink, p + 6);
    Ok(ops)
}

/// Dense 4×4 matrix of a two-qubit template on qubits (0, 1) with parameters `theta`.
pub fn two_qubit_matrix(ops: &[Op], theta: &[f64]) -> Result<[[Complex64; 4]; 4]> {
    let spec = CircuitSpec::new(2, ops.to_vec(), theta.len(), 1)?;
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for col in 0..4 {
        let mut amps = vec![Complex64::new(0.0, 0.0); 4];
        amps[col] = Complex64::new(1.0, 0.0);
        let mut s = State::from_amplitudes(amps)?;
        spec.apply_ops(&mut s, theta, &[])?;
        for (row, a) in s.amplitudes().iter().enumerate() {
            m[row][col] = *a;
        }
    }
    Ok(m)
}

/// Dense matrix of one convolution block on qubits (0, 1).
pub fn conv_block_matrix(kind: ConvKind, theta_block: &[f64]) -> Result<[[Complex64; 4]; 4]> {
    check_len(kind.block_params(), theta_block.len())?;
    two_qubit_matrix(&conv_block(kind, 0, (0, 1))?, theta_block)
}

/// Dense matrix of one pooling block with source 0 and sink 1.
pub fn pool_block_matrix(theta_block: &[f64]) -> Result<[[Complex64; 4]; 4]> {
    check_len(POOL_PARAMS, theta_block.len())?;
    two_qubit_matrix(&pool_block(0, 0, 1)?, theta_block)
}

/// Gate list plus parameter bookkeeping for a parameterized circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    num_qubits: usize,
    ops: Vec<Op>,
    param_count: usize,
    frozen: Vec<Option<f64>>,
    measured_qubit: usize,
}

impl CircuitSpec {
    pub fn new(num_qubits: usize, ops: Vec<Op>, param_count: usize, measured_qubit: usize) -> Result<Self> {
        let spec = CircuitSpec {
            num_qubits,
            ops,
            param_count,
            frozen: vec![None; param_count],
            measured_qubit,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.num_qubits == 0 || self.num_qubits > crate::statevec::MAX_QUBITS {
            return Err(Error::Config(format!("bad qubit count {}", self.num_qubits)));
        }
        if self.measured_qubit >= self.num_qubits {
            return Err(Error::Index(format!("measured qubit {}", self.measured_qubit)));
        }
        if self.frozen.len() != self.param_count {
            return Err(Error::Shape {
                expected: self.param_count,
                got: self.frozen.len(),
            });
        }
        for (i, op) in self.ops.iter().enumerate() {
            let qs = op.qubits();
            if qs.iter().any(|&q| q >= self.num_qubits) {
                return Err(Error::Index(format!("gate {i} addresses qubit outside register")));
            }
            if qs.len() == 2 && qs[0] == qs[1] {
                return Err(Error::Index(format!("gate {i}: CNOT control equals target")));
            }
            if let Op::Rot { angle, .. } = op {
                match *angle {
                    Angle::Param(k) if k >= self.param_count => {
                        return Err(Error::Index(format!("gate {i}: parameter slot {k}")));
                    }
                    Angle::Data(d) if d >= self.num_qubits.max(QCNN_QUBITS) => {
                        return Err(Error::Index(format!("gate {i}: data slot {d}")));
                    }
                    Angle::DataProduct(a, b) if a.max(b) >= self.num_qubits.max(QCNN_QUBITS) => {
                        return Err(Error::Index(format!("gate {i}: data slots {a},{b}")));
                    }
                    Angle::Const(v) if !v.is_finite() => {
                        return Err(Error::NonFinite(format!("gate {i}: constant {v}")));
                    }
                    _ => {}
                }
            }
        }
        for (k, f) in self.frozen.iter().enumerate() {
            if let Some(v) = f {
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("frozen slot {k} = {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// Total parameter slots, frozen ones included.
    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn measured_qubit(&self) -> usize {
        self.measured_qubit
    }

    pub fn frozen(&self) -> &[Option<f64>] {
        &self.frozen
    }

    pub fn is_frozen(&self, slot: usize) -> bool {
        self.frozen.get(slot).is_some_and(|f| f.is_some())
    }

    /// Slots that training may update, in ascending order.
    pub fn trainable_slots(&self) -> Vec<usize> {
        (0..self.param_count).filter(|&k| !self.is_frozen(k)).collect()
    }

    pub fn trainable_count(&self) -> usize {
        self.frozen.iter().filter(|f| f.is_none()).count()
    }

    /// Returns a copy with the given slots frozen at the given values.
    pub fn with_frozen(&self, slots: &[(usize, f64)]) -> Result<Self> {
        let mut out = self.clone();
        for &(k, v) in slots {
            if k >= self.param_count {
                return Err(Error::Index(format!("parameter slot {k}")));
            }
            out.frozen[k] = Some(v);
        }
        out.validate()?;
        Ok(out)
    }

    /// Scatters a trainable-only vector into a full-length parameter vector.
    /// Frozen positions receive their frozen values.
    pub fn expand(&self, trainable: &[f64]) -> Result<Vec<f64>> {
        check_len(self.trainable_count(), trainable.len())?;
        let mut it = trainable.iter();
        Ok(self
            .frozen
            .iter()
            .map(|f| match f {
                Some(v) => *v,
                None => *it.next().expect("length checked"),
            })
            .collect())
    }

    /// Gathers the trainable entries of a full-length parameter vector.
    pub fn compress(&self, full: &[f64]) -> Result<Vec<f64>> {
        check_len(self.param_count, full.len())?;
        Ok(self.trainable_slots().into_iter().map(|k| full[k]).collect())
    }

    /// Resolves the angle of a rotation; frozen slots override `theta`.
    pub(crate) fn angle_value(&self, angle: Angle, theta: &[f64], x: &[f64]) -> f64 {
        match angle {
            Angle::Data(i) => x[i],
            Angle::DataProduct(i, j) => x[i] * x[j],
            Angle::Param(k) => self.frozen[k].unwrap_or(theta[k]),
            Angle::Const(v) => v,
        }
    }

    pub(crate) fn op_matrix(&self, op: &Op, theta: &[f64], x: &[f64]) -> Option<SingleQubitGate> {
        match *op {
            Op::Rot { axis, angle, .. } => Some(SingleQubitGate::rotation_unchecked(
                axis,
                self.angle_value(angle, theta, x),
            )),
            Op::H(_) => Some(SingleQubitGate::hadamard()),
            Op::S(_) => Some(SingleQubitGate::phase_s()),
            Op::Sdg(_) => Some(SingleQubitGate::phase_s_dagger()),
            Op::Cnot { .. } => None,
        }
    }

    pub(crate) fn apply_op(&self, state: &mut State, op: &Op, theta: &[f64], x: &[f64]) {
        match *op {
            Op::Cnot { control, target } => state.apply_cnot_unchecked(control, target),
            Op::Rot { target, .. } | Op::H(target) | Op::S(target) | Op::Sdg(target) => {
                let m = self.op_matrix(op, theta, x).expect("single-qubit op");
                state.apply_matrix_unchecked(&m, target);
            }
        }
    }

    fn check_inputs(&self, theta: &[f64], x: &[f64]) -> Result<()> {
        check_len(self.param_count, theta.len())?;
        let needs_data = self.ops.iter().any(|op| {
            matches!(
                op,
                Op::Rot {
                    angle: Angle::Data(_) | Angle::DataProduct(..),
                    ..
                }
            )
        });
        if needs_data {
            check_len(QCNN_QUBITS, x.len())?;
        }
        Ok(())
    }

    fn apply_ops(&self, state: &mut State, theta: &[f64], x: &[f64]) -> Result<()> {
        self.check_inputs(theta, x)?;
        for op in &self.ops {
            self.apply_op(state, op, theta, x);
        }
        Ok(())
    }

    /// Final state `U(θ) U_enc(x) |0…0⟩`.
    pub fn state(&self, theta: &[f64], x: &[f64]) -> Result<State> {
        let mut s = State::zero(self.num_qubits)?;
        self.apply_ops(&mut s, theta, x)?;
        Ok(s)
    }

    /// `ŷ = ⟨ψ|U† Z_m U|ψ⟩` on the measured qubit.
    pub fn forward(&self, theta: &[f64], x: &[f64]) -> Result<f64> {
        self.state(theta, x)?.expect_z(self.measured_qubit)
    }
}

/// Prepares `U_enc(x)|0000⟩`.
pub fn encode(x: &[f64], kind: EncodingKind) -> Result<State> {
    check_len(QCNN_QUBITS, x.len())?;
    CircuitSpec::new(QCNN_QUBITS, encoding_ops(kind), 0, 0)?.state(&[], x)
}

/// Assembles the four-qubit QCNN with line connectivity in the first conv layer.
pub fn build_qcnn(conv: ConvKind, enc: EncodingKind) -> CircuitSpec {
    build_qcnn_with(conv, enc, Connectivity::Line)
}

pub fn build_qcnn_with(conv: ConvKind, enc: EncodingKind, connectivity: Connectivity) -> CircuitSpec {
    let c = conv.block_params();
    let conv1 = 0;
    let pool1 = c;
    let conv2 = c + POOL_PARAMS;
    let pool2 = 2 * c + POOL_PARAMS;
    let param_count = 2 * c + 2 * POOL_PARAMS;

    let mut ops = encoding_ops(enc);
    let mut pairs = vec![(0, 1), (1, 2), (2, 3)];
    if connectivity == Connectivity::Ring {
        pairs.push((3, 0));
    }
    // block builders only fail on identical qubits, which these layouts never pass
    for pair in pairs {
        ops.extend(conv_block(conv, conv1, pair).expect("distinct pair"));
    }
    ops.extend(pool_block(pool1, 0, 1).expect("distinct pair"));
    ops.extend(pool_block(pool1, 2, 3).expect("distinct pair"));
    ops.extend(conv_block(conv, conv2, (1, 3)).expect("distinct pair"));
    ops.extend(pool_block(pool2, 1, 3).expect("distinct pair"));

    CircuitSpec::new(QCNN_QUBITS, ops, param_count, 3).expect("valid layout")
}

/// Relabels parameter slots of a template list by `offset`.
pub fn offset_params(ops: &[Op], offset: usize) -> Vec<Op> {
    ops.iter().map(|op| op.shift_params(offset)).collect()
}
