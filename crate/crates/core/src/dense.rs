//! Dense statevector simulation.
//!
//! Basis index bit `j` holds qubit `j`. Rotations follow the usual
//! `R_P(θ) = exp(-iθP/2)` convention. This module is the independent
//! reference for the tableau and the evaluator for non-Clifford angles.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::pauli::{Hamiltonian, PauliString};
use crate::stabilizer::{CliffordGate, GateKind};
use crate::{Error, Result};

/// Largest qubit count the dense simulator accepts.
pub const MAX_DENSE_QUBITS: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub type Matrix2 = [[Complex64; 2]; 2];

fn i_pow(k: usize) -> Complex64 {
    [ONE, I, -ONE, -I][k % 4]
}

/// Single-qubit rotation matrix about `axis` (one of `'X'`, `'Y'`, `'Z'`).
pub fn rotation_matrix(axis: char, theta: f64) -> Matrix2 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let c = Complex64::new(c, 0.0);
    match axis {
        'X' => [[c, Complex64::new(0.0, -s)], [Complex64::new(0.0, -s), c]],
        'Y' => [[c, Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), c]],
        'Z' => [
            [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
            [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
        ],
        other => panic!("unknown rotation axis {other}"),
    }
}

/// Unitary of a non-CX gate.
pub fn gate_matrix(kind: GateKind, quarter_turns: u8) -> Matrix2 {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let angle = quarter_turns as f64 * std::f64::consts::FRAC_PI_2;
    match kind {
        GateKind::H => [[h, h], [h, -h]],
        GateKind::S => [[ONE, ZERO], [ZERO, I]],
        GateKind::Sdg => [[ONE, ZERO], [ZERO, -I]],
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::Y => [[ZERO, -I], [I, ZERO]],
        GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
        GateKind::RX => rotation_matrix('X', angle),
        GateKind::RY => rotation_matrix('Y', angle),
        GateKind::RZ => rotation_matrix('Z', angle),
        GateKind::CX => panic!("CX is not a single-qubit gate"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n: usize) -> Result<Self> {
        if n > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits {
                n,
                max: MAX_DENSE_QUBITS,
                what: "dense simulation",
            });
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n {
            return Err(Error::SizeMismatch {
                left: amps.len(),
                right: 1 << n,
            });
        }
        Ok(Self { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn apply_1q(&mut self, q: usize, m: &Matrix2) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) {
        let (c, t) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    pub fn apply_gate(&mut self, gate: &CliffordGate) -> Result<()> {
        gate.validate(self.n)?;
        match gate.kind {
            GateKind::CX => self.apply_cx(gate.control.expect("validated"), gate.target),
            kind => self.apply_1q(gate.target, &gate_matrix(kind, gate.quarter_turns)),
        }
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩` as a complex number (real for Hermitian `P`).
    pub fn expectation(&self, p: &PauliString) -> Result<Complex64> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: p.num_qubits(),
                right: self.n,
            });
        }
        let (xm, zm) = (p.x_mask() as usize, p.z_mask() as usize);
        let prefactor = i_pow(p.phase() as usize + p.y_count());
        let mut sum = ZERO;
        for (b, &a) in self.amps.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            let sign = if (b & zm).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            sum += self.amps[b ^ xm].conj() * a * sign;
        }
        Ok(sum * prefactor)
    }
}

/// `out += coeff · P · v` for a dense vector `v`.
pub fn pauli_apply_add(p: &PauliString, coeff: Complex64, v: &[Complex64], out: &mut [Complex64]) {
    let (xm, zm) = (p.x_mask() as usize, p.z_mask() as usize);
    let prefactor = i_pow(p.phase() as usize + p.y_count()) * coeff;
    for (b, &a) in v.iter().enumerate() {
        let sign = if (b & zm).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        out[b ^ xm] += prefactor * a * sign;
    }
}

/// `H · v` over the Hamiltonian's Pauli terms (constraints excluded).
pub fn hamiltonian_apply(h: &Hamiltonian, v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; v.len()];
    for t in h.terms() {
        pauli_apply_add(&t.pauli, Complex64::new(t.coeff, 0.0), v, &mut out);
    }
    out
}

/// Dense `2^n × 2^n` matrix of a Pauli string.
pub fn pauli_matrix(p: &PauliString) -> DMatrix<Complex64> {
    let dim = 1usize << p.num_qubits();
    let (xm, zm) = (p.x_mask() as usize, p.z_mask() as usize);
    let prefactor = i_pow(p.phase() as usize + p.y_count());
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    for b in 0..dim {
        let sign = if (b & zm).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        m[(b ^ xm, b)] = prefactor * sign;
    }
    m
}

/// Dense matrix of the Hamiltonian's Pauli terms (constraints excluded).
pub fn hamiltonian_matrix(h: &Hamiltonian) -> Result<DMatrix<Complex64>> {
    let n = h.num_qubits();
    if n > 14 {
        return Err(Error::TooManyQubits {
            n,
            max: 14,
            what: "dense Hamiltonian matrix",
        });
    }
    let dim = 1usize << n;
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    for t in h.terms() {
        let p = &t.pauli;
        let (xm, zm) = (p.x_mask() as usize, p.z_mask() as usize);
        let prefactor = i_pow(p.y_count()) * t.coeff;
        for b in 0..dim {
            let sign = if (b & zm).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m[(b ^ xm, b)] += prefactor * sign;
        }
    }
    Ok(m)
}
