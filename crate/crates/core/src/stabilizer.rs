//! Stabilizer-state simulation with a destabilizer/stabilizer tableau.
//!
//! Rows are bit-packed [`PauliString`]s whose phase is restricted to
//! `{0, 2}` (a sign). Gates conjugate every row; expectations of Hermitian
//! Paulis are exact and always one of `-1`, `0`, `+1`.

use crate::pauli::PauliString;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    S,
    Sdg,
    X,
    Y,
    Z,
    CX,
    RX,
    RY,
    RZ,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::RX | GateKind::RY | GateKind::RZ)
    }
}

/// A Clifford gate. Rotations carry an angle of `quarter_turns · π/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CliffordGate {
    pub kind: GateKind,
    pub target: usize,
    /// Control qubit, only for `CX`.
    pub control: Option<usize>,
    pub quarter_turns: u8,
}

impl CliffordGate {
    fn single(kind: GateKind, q: usize) -> Self {
        Self {
            kind,
            target: q,
            control: None,
            quarter_turns: 0,
        }
    }

    pub fn h(q: usize) -> Self {
        Self::single(GateKind::H, q)
    }
    pub fn s(q: usize) -> Self {
        Self::single(GateKind::S, q)
    }
    pub fn sdg(q: usize) -> Self {
        Self::single(GateKind::Sdg, q)
    }
    pub fn x(q: usize) -> Self {
        Self::single(GateKind::X, q)
    }
    pub fn y(q: usize) -> Self {
        Self::single(GateKind::Y, q)
    }
    pub fn z(q: usize) -> Self {
        Self::single(GateKind::Z, q)
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::CX,
            target,
            control: Some(control),
            quarter_turns: 0,
        }
    }

    pub fn rotation(kind: GateKind, q: usize, quarter_turns: u8) -> Self {
        debug_assert!(kind.is_rotation());
        Self {
            kind,
            target: q,
            control: None,
            quarter_turns,
        }
    }

    pub fn rx(q: usize, k: u8) -> Self {
        Self::rotation(GateKind::RX, q, k)
    }
    pub fn ry(q: usize, k: u8) -> Self {
        Self::rotation(GateKind::RY, q, k)
    }
    pub fn rz(q: usize, k: u8) -> Self {
        Self::rotation(GateKind::RZ, q, k)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.target >= n {
            return Err(Error::QubitOutOfRange {
                qubit: self.target,
                n,
            });
        }
        match (self.kind, self.control) {
            (GateKind::CX, Some(c)) => {
                if c >= n {
                    return Err(Error::QubitOutOfRange { qubit: c, n });
                }
                if c == self.target {
                    return Err(Error::InvalidGate(format!("CX with control == target == {c}")));
                }
            }
            (GateKind::CX, None) => return Err(Error::InvalidGate("CX without control".into())),
            (_, Some(_)) => {
                return Err(Error::InvalidGate(format!("{:?} takes no control", self.kind)))
            }
            _ => {}
        }
        if self.kind.is_rotation() {
            if self.quarter_turns > 3 {
                return Err(Error::InvalidGate(format!(
                    "quarter_turns {} outside 0..4",
                    self.quarter_turns
                )));
            }
        } else if self.quarter_turns != 0 {
            return Err(Error::InvalidGate(format!(
                "{:?} does not take an angle",
                self.kind
            )));
        }
        Ok(())
    }

    /// Reduces the gate to a primitive conjugation, or `None` for identity.
    fn primitive(&self) -> Option<Primitive> {
        use Primitive as P;
        let q = self.target;
        Some(match (self.kind, self.quarter_turns) {
            (GateKind::H, _) => P::H(q),
            (GateKind::S, _) | (GateKind::RZ, 1) => P::S(q),
            (GateKind::Sdg, _) | (GateKind::RZ, 3) => P::Sdg(q),
            (GateKind::X, _) | (GateKind::RX, 2) => P::X(q),
            (GateKind::Y, _) | (GateKind::RY, 2) => P::Y(q),
            (GateKind::Z, _) | (GateKind::RZ, 2) => P::Z(q),
            (GateKind::RX, 1) => P::SqrtX(q),
            (GateKind::RX, 3) => P::SqrtXdg(q),
            (GateKind::RY, 1) => P::SqrtY(q),
            (GateKind::RY, 3) => P::SqrtYdg(q),
            (GateKind::CX, _) => P::CX(self.control.expect("validated"), q),
            (_, _) => return None,
        })
    }
}

/// Conjugation actions, ignoring global phase.
#[derive(Debug, Clone, Copy)]
enum Primitive {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    /// RX(π/2): X→X, Z→−Y, Y→Z.
    SqrtX(usize),
    SqrtXdg(usize),
    /// RY(π/2): Z→X, X→−Z, Y→Y.
    SqrtY(usize),
    SqrtYdg(usize),
    CX(usize, usize),
}

impl Primitive {
    #[inline]
    fn conjugate(self, row: &mut PauliString) {
        let flip = match self {
            Primitive::H(q) => {
                let (x, z) = (row.x(q), row.z(q));
                row.set(q, z, x);
                x && z
            }
            Primitive::S(q) => {
                let (x, z) = (row.x(q), row.z(q));
                row.set(q, x, z ^ x);
                x && z
            }
            Primitive::Sdg(q) => {
                let (x, z) = (row.x(q), row.z(q));
                row.set(q, x, z ^ x);
                x && !z
            }
            Primitive::X(q) => row.z(q),
            Primitive::Z(q) => row.x(q),
            Primitive::Y(q) => row.x(q) ^ row.z(q),
            Primitive::SqrtX(q) => {
                let (x, z) = (row.x(q), row.z(q));
                row.set(q, x ^ z, z);
                !x && z
            }
            Primitive::SqrtXdg(q) => {
                let (x, z) = (row.x(q), row.z(q));
                row.set(q, x ^ z, z);
                x && z
            }
            Primitive::SqrtY(q) => {
                let (x, z) = (row.x(q), row.z(q));
                row.set(q, z, x);
                x && !z
            }
            Primitive::SqrtYdg(q) => {
                let (x, z) = (row.x(q), row.z(q));
                row.set(q, z, x);
                !x && z
            }
            Primitive::CX(c, t) => {
                let (xc, zc, xt, zt) = (row.x(c), row.z(c), row.x(t), row.z(t));
                row.set(t, xt ^ xc, zt);
                row.set(c, xc, zc ^ zt);
                xc && zt && (xt == zc)
            }
        };
        if flip {
            row.negate();
        }
    }
}

/// Destabilizer and stabilizer generators of an `n`-qubit stabilizer state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    /// `rows[..n]` are destabilizers, `rows[n..]` stabilizers.
    rows: Vec<PauliString>,
}

impl StabilizerTableau {
    /// `|0…0⟩`: stabilizers `+Z_j`, destabilizers `+X_j`.
    pub fn zero_state(n: usize) -> Self {
        assert!(n >= 1, "tableau needs at least one qubit");
        let mut rows = Vec::with_capacity(2 * n);
        for j in 0..n {
            let mut r = PauliString::identity(n);
            r.set(j, true, false);
            rows.push(r);
        }
        for j in 0..n {
            let mut r = PauliString::identity(n);
            r.set(j, false, true);
            rows.push(r);
        }
        Self { n, rows }
    }

    /// Builds a tableau from explicit generators. No validity check is
    /// performed; see [`check_symplectic`](Self::check_symplectic).
    pub fn from_rows(destab: Vec<PauliString>, stab: Vec<PauliString>) -> Result<Self> {
        let n = stab.len();
        if destab.len() != n || n == 0 {
            return Err(Error::SizeMismatch {
                left: destab.len(),
                right: n,
            });
        }
        for r in destab.iter().chain(&stab) {
            if r.num_qubits() != n {
                return Err(Error::SizeMismatch {
                    left: r.num_qubits(),
                    right: n,
                });
            }
        }
        let mut rows = destab;
        rows.extend(stab);
        Ok(Self { n, rows })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.rows[..self.n]
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.rows[self.n..]
    }

    pub fn stabilizers_mut(&mut self) -> &mut [PauliString] {
        &mut self.rows[self.n..]
    }

    /// Conjugates every generator by `gate`.
    pub fn apply(&mut self, gate: &CliffordGate) -> Result<()> {
        gate.validate(self.n)?;
        if let Some(prim) = gate.primitive() {
            for row in &mut self.rows {
                prim.conjugate(row);
            }
        }
        Ok(())
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a CliffordGate>) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Functional form of [`apply`](Self::apply).
    pub fn apply_gate(mut self, gate: &CliffordGate) -> Result<Self> {
        self.apply(gate)?;
        Ok(self)
    }

    /// Exact `⟨ψ|P|ψ⟩` for a Hermitian Pauli `P` (phase 0).
    pub fn expectation(&self, p: &PauliString) -> Result<i8> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: p.num_qubits(),
                right: self.n,
            });
        }
        if p.phase() != 0 {
            return Err(Error::InvalidGate(format!(
                "expectation needs a Hermitian Pauli, got {p}"
            )));
        }
        let (destab, stab) = self.rows.split_at(self.n);
        if stab.iter().any(|s| !s.commutes_unchecked(p)) {
            return Ok(0);
        }
        // P commutes with the whole group, so P = ± ∏ stab_i over the
        // destabilizers it anticommutes with.
        let mut acc = PauliString::identity(self.n);
        for (d, s) in destab.iter().zip(stab) {
            if !d.commutes_unchecked(p) {
                acc.mul_assign(s)?;
            }
        }
        if !acc.same_support(p) {
            return Err(Error::InternalPhaseError(acc.phase()));
        }
        match acc.phase() {
            0 => Ok(1),
            2 => Ok(-1),
            odd => Err(Error::InternalPhaseError(odd)),
        }
    }

    /// True iff stabilizers and destabilizers form a symplectic basis with
    /// Hermitian (±) generators.
    pub fn check_symplectic(&self) -> bool {
        let n = self.n;
        if self.rows.len() != 2 * n {
            return false;
        }
        if self
            .rows
            .iter()
            .any(|r| r.num_qubits() != n || r.phase() % 2 != 0)
        {
            return false;
        }
        let (destab, stab) = self.rows.split_at(n);
        for i in 0..n {
            for j in 0..n {
                if !stab[i].commutes_unchecked(&stab[j]) || !destab[i].commutes_unchecked(&destab[j])
                {
                    return false;
                }
                let anti = !destab[i].commutes_unchecked(&stab[j]);
                if anti != (i == j) {
                    return false;
                }
            }
        }
        true
    }
}

/// Free-function form of [`StabilizerTableau::zero_state`].
pub fn zero_state(n: usize) -> StabilizerTableau {
    StabilizerTableau::zero_state(n)
}
