//! Dense statevector simulation for small registers.
//!
//! Qubit 0 is the most significant bit of the basis-state index, so on two
//! qubits `|10⟩` is index 2 and means qubit 0 is set.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 12;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Rotation axis of a single-qubit Pauli rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn symbol(self) -> &'static str {
        match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "X" => Some(Axis::X),
            "Y" => Some(Axis::Y),
            "Z" => Some(Axis::Z),
            _ => None,
        }
    }

    /// The Pauli matrix for this axis.
    pub fn pauli(self) -> SingleQubitGate {
        let i = Complex64::i();
        SingleQubitGate(match self {
            Axis::X => [[C0, C1], [C1, C0]],
            Axis::Y => [[C0, -i], [i, C0]],
            Axis::Z => [[C1, C0], [C0, -C1]],
        })
    }
}

/// A 2×2 complex matrix acting on one qubit, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitGate(pub [[Complex64; 2]; 2]);

impl SingleQubitGate {
    pub fn identity() -> Self {
        SingleQubitGate([[C1, C0], [C0, C1]])
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        SingleQubitGate([[h, h], [h, -h]])
    }

    pub fn phase_s() -> Self {
        SingleQubitGate([[C1, C0], [C0, Complex64::i()]])
    }

    pub fn phase_s_dagger() -> Self {
        SingleQubitGate([[C1, C0], [C0, -Complex64::i()]])
    }

    pub fn pauli_x() -> Self {
        Axis::X.pauli()
    }

    /// `exp(-i angle P / 2)` for the Pauli `P` of `axis`.
    pub fn rotation(axis: Axis, angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::NonFinite(format!("rotation angle {angle}")));
        }
        Ok(Self::rotation_unchecked(axis, angle))
    }

    pub(crate) fn rotation_unchecked(axis: Axis, angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        let c = Complex64::new(c, 0.0);
        SingleQubitGate(match axis {
            Axis::X => {
                let m = Complex64::new(0.0, -s);
                [[c, m], [m, c]]
            }
            Axis::Y => {
                let s = Complex64::new(s, 0.0);
                [[c, -s], [s, c]]
            }
            Axis::Z => {
                let e = Complex64::new(0.0, -s);
                [[c + e, C0], [C0, c - e]]
            }
        })
    }

    /// `R(α,β,γ) = R_Z(γ) R_Y(β) R_Z(α)`.
    pub fn composite_r(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        Ok(Self::rotation(Axis::Z, gamma)?
            .mul(&Self::rotation(Axis::Y, beta)?)
            .mul(&Self::rotation(Axis::Z, alpha)?))
    }

    /// `R'(α,β,γ) = R_Z(γ) R_X(β) R_Z(α)`.
    pub fn composite_r_prime(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        Ok(Self::rotation(Axis::Z, gamma)?
            .mul(&Self::rotation(Axis::X, beta)?)
            .mul(&Self::rotation(Axis::Z, alpha)?))
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[C0; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        SingleQubitGate(out)
    }

    pub fn dagger(&self) -> Self {
        let a = &self.0;
        SingleQubitGate([[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]])
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let a = &self.0;
        SingleQubitGate([[a[0][0] * k, a[0][1] * k], [a[1][0] * k, a[1][1] * k]])
    }

    /// Largest elementwise deviation of `U†U` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.dagger().mul(self);
        let id = Self::identity();
        let mut err: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                err = err.max((p.0[r][c] - id.0[r][c]).norm());
            }
        }
        err
    }
}

/// Pure state of a register of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl State {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::Config(format!(
                "qubit count {num_qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        let mut amplitudes = vec![C0; 1 << num_qubits];
        amplitudes[0] = C1;
        Ok(State {
            num_qubits,
            amplitudes,
        })
    }

    /// Builds a state from raw amplitudes. The vector is not renormalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = amplitudes.len();
        if n < 2 || !n.is_power_of_two() || n > 1 << MAX_QUBITS {
            return Err(Error::Config(format!(
                "amplitude count {n} is not 2^Q for 1 <= Q <= {MAX_QUBITS}"
            )));
        }
        Ok(State {
            num_qubits: n.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.num_qubits {
            Ok(())
        } else {
            Err(Error::Index(format!(
                "qubit {q} out of range for {} qubits",
                self.num_qubits
            )))
        }
    }

    fn mask(&self, q: usize) -> usize {
        1 << (self.num_qubits - 1 - q)
    }

    pub fn apply_single(&mut self, gate: &SingleQubitGate, target: usize) -> Result<()> {
        self.check_qubit(target)?;
        self.apply_matrix_unchecked(gate, target);
        Ok(())
    }

    /// Applies any 2×2 matrix (unitary or not) to `target`, which must be in range.
    pub(crate) fn apply_matrix_unchecked(&mut self, gate: &SingleQubitGate, target: usize) {
        let m = &gate.0;
        let bit = self.mask(target);
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let j = i | bit;
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[j];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::Index(format!(
                "CNOT control and target are both qubit {control}"
            )));
        }
        self.apply_cnot_unchecked(control, target);
        Ok(())
    }

    pub(crate) fn apply_cnot_unchecked(&mut self, control: usize, target: usize) {
        let cbit = self.mask(control);
        let tbit = self.mask(target);
        for i in 0..self.amplitudes.len() {
            if i & cbit != 0 && i & tbit == 0 {
                self.amplitudes.swap(i, i | tbit);
            }
        }
    }

    /// `⟨ψ|Z_target|ψ⟩`.
    pub fn expect_z(&self, target: usize) -> Result<f64> {
        self.check_qubit(target)?;
        let bit = self.mask(target);
        let v: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| if i & bit == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum();
        Ok(v.clamp(-1.0, 1.0))
    }

    /// Reduced density matrix of one qubit, obtained by tracing out the rest.
    pub fn single_qubit_density(&self, q: usize) -> Result<[[Complex64; 2]; 2]> {
        self.check_qubit(q)?;
        let bit = self.mask(q);
        let mut rho = [[C0; 2]; 2];
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | bit];
                rho[0][0] += a0 * a0.conj();
                rho[0][1] += a0 * a1.conj();
                rho[1][0] += a1 * a0.conj();
                rho[1][1] += a1 * a1.conj();
            }
        }
        Ok(rho)
    }

    /// `Tr(ρ_q²)` of the single-qubit reduced state; 1 for a pure marginal.
    pub fn single_qubit_purity(&self, q: usize) -> Result<f64> {
        let r = self.single_qubit_density(q)?;
        let p = r[0][0] * r[0][0] + r[1][1] * r[1][1] + 2.0 * r[0][1] * r[1][0];
        Ok(p.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn approx(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn zero_state_shapes() {
        let s = State::zero(1).unwrap();
        assert_eq!(s.amplitudes(), &[C1, C0]);
        let s = State::zero(2).unwrap();
        assert_eq!(s.amplitudes(), &[C1, C0, C0, C0]);
        let s = State::zero(4).unwrap();
        assert_eq!(s.amplitudes().len(), 16);
        assert_eq!(s.amplitudes()[0], C1);
        assert!(matches!(State::zero(0), Err(Error::Config(_))));
        assert!(matches!(State::zero(13), Err(Error::Config(_))));
    }

    #[test]
    fn pauli_x_flips() {
        let mut s = State::zero(1).unwrap();
        s.apply_single(&SingleQubitGate::pauli_x(), 0).unwrap();
        assert_eq!(s.amplitudes(), &[C0, C1]);
    }

    #[test]
    fn rz_is_phase_only() {
        let mut s = State::zero(1).unwrap();
        s.apply_single(&SingleQubitGate::hadamard(), 0).unwrap();
        let before: Vec<f64> = s.amplitudes().iter().map(|a| a.norm_sqr()).collect();
        s.apply_single(&SingleQubitGate::rotation(Axis::Z, 0.77).unwrap(), 0)
            .unwrap();
        for (a, b) in s.amplitudes().iter().zip(before) {
            assert!((a.norm_sqr() - b).abs() < 1e-15);
        }
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = State::zero(1).unwrap();
        s.apply_single(&SingleQubitGate::hadamard(), 0).unwrap();
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        assert!(approx(s.amplitudes()[0], h) && approx(s.amplitudes()[1], h));
    }

    #[test]
    fn out_of_range_target() {
        let mut s = State::zero(2).unwrap();
        assert!(matches!(
            s.apply_single(&SingleQubitGate::hadamard(), 2),
            Err(Error::Index(_))
        ));
        assert!(matches!(s.expect_z(5), Err(Error::Index(_))));
    }

    #[test]
    fn cnot_truth_table() {
        // |10⟩ → |11⟩ with qubit 0 as control (MSB)
        let mut s = State::from_amplitudes(vec![C0, C0, C1, C0]).unwrap();
        s.apply_cnot(0, 1).unwrap();
        assert_eq!(s.amplitudes(), &[C0, C0, C0, C1]);

        let mut s = State::zero(2).unwrap();
        s.apply_cnot(0, 1).unwrap();
        assert_eq!(s.amplitudes(), &[C1, C0, C0, C0]);

        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let mut s = State::from_amplitudes(vec![h, C0, h, C0]).unwrap();
        s.apply_cnot(0, 1).unwrap();
        assert_eq!(s.amplitudes(), &[h, C0, C0, h]);

        assert!(matches!(s.apply_cnot(1, 1), Err(Error::Index(_))));
    }

    #[test]
    fn rotation_identities() {
        let r = SingleQubitGate::composite_r(0.0, 0.0, 0.0).unwrap();
        assert_eq!(r, SingleQubitGate::identity());

        let z = SingleQubitGate::rotation(Axis::Z, 2.0 * PI).unwrap();
        let minus = SingleQubitGate::identity().scale(-C1);
        for r in 0..2 {
            for c in 0..2 {
                assert!(approx(z.0[r][c], minus.0[r][c]));
            }
        }

        let u = SingleQubitGate::composite_r(0.3, -1.1, 2.0).unwrap();
        assert!(u.unitarity_error() < 1e-12);
        let u = SingleQubitGate::composite_r_prime(0.3, -1.1, 2.0).unwrap();
        assert!(u.unitarity_error() < 1e-12);

        assert!(matches!(
            SingleQubitGate::rotation(Axis::X, f64::NAN),
            Err(Error::NonFinite(_))
        ));
        assert!(SingleQubitGate::composite_r(f64::INFINITY, 0.0, 0.0).is_err());
    }

    #[test]
    fn composite_matches_explicit_product() {
        // multiply the three factors by hand, entry by entry
        let (a, b, g) = (0.3, -1.1, 2.0);
        let u = SingleQubitGate::composite_r(a, b, g).unwrap();
        let e = |t: f64| Complex64::from_polar(1.0, t);
        let (cb, sb) = ((b / 2.0).cos(), (b / 2.0).sin());
        let expected = [
            [e(-(a + g) / 2.0) * cb, -e((a - g) / 2.0) * sb],
            [e((g - a) / 2.0) * sb, e((a + g) / 2.0) * cb],
        ];
        for r in 0..2 {
            for c in 0..2 {
                assert!(approx(u.0[r][c], expected[r][c]), "{r}{c}");
            }
        }
    }

    #[test]
    fn expect_z_values() {
        let s = State::zero(1).unwrap();
        assert_eq!(s.expect_z(0).unwrap(), 1.0);
        let mut s1 = State::zero(1).unwrap();
        s1.apply_single(&SingleQubitGate::pauli_x(), 0).unwrap();
        assert_eq!(s1.expect_z(0).unwrap(), -1.0);
        let mut s2 = State::zero(1).unwrap();
        s2.apply_single(&SingleQubitGate::hadamard(), 0).unwrap();
        assert!(s2.expect_z(0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn msb_convention() {
        let mut s = State::zero(3).unwrap();
        s.apply_single(&SingleQubitGate::pauli_x(), 0).unwrap();
        assert_eq!(s.amplitudes()[4], C1);
        assert_eq!(s.expect_z(0).unwrap(), -1.0);
        assert_eq!(s.expect_z(2).unwrap(), 1.0);
    }

    #[test]
    fn purity_of_bell_marginal() {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let s = State::from_amplitudes(vec![h, C0, C0, h]).unwrap();
        assert!((s.single_qubit_purity(0).unwrap() - 0.5).abs() < 1e-12);
        assert!((State::zero(2).unwrap().single_qubit_purity(1).unwrap() - 1.0).abs() < 1e-12);
    }
}
