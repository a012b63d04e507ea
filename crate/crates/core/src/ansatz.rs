//! Hardware-efficient RY/RZ ansatz with linear CX entanglement.
//!
//! Layout for `reps = r`: rotation layer 0, CX ladder, rotation layer 1,
//! …, CX ladder, rotation layer `r`. Every rotation layer holds an RY slot
//! followed by an RZ slot for each qubit, so slot `layer·2n + 2q` is the
//! RY of qubit `q` and `layer·2n + 2q + 1` its RZ.

use serde::{Deserialize, Serialize};

use crate::stabilizer::{CliffordGate, GateKind};
use crate::{Error, Result};

/// Quarter turns per full rotation; the size of the Clifford alphabet.
pub const QUARTER_LEVELS: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    Y,
    Z,
}

impl Axis {
    pub fn gate_kind(self) -> GateKind {
        match self {
            Axis::Y => GateKind::RY,
            Axis::Z => GateKind::RZ,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slot {
    pub axis: Axis,
    pub qubit: usize,
    pub layer: usize,
}

/// One step of the circuit layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutItem {
    /// Tunable rotation; the value is the slot index.
    Rotation(usize),
    Cx { control: usize, target: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnsatzTemplate {
    n: usize,
    reps: usize,
    slots: Vec<Slot>,
}

impl AnsatzTemplate {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn reps(&self) -> usize {
        self.reps
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn num_slots(&self) -> usize {
        self.slots.len()
    }

    /// Index of the slot rotating `qubit` about `axis` in `layer`.
    pub fn slot_index(&self, axis: Axis, qubit: usize, layer: usize) -> usize {
        layer * 2 * self.n + 2 * qubit + usize::from(axis == Axis::Z)
    }

    /// Fixed CX gates of one entangling layer.
    pub fn ladder(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n.saturating_sub(1)).map(|q| (q, q + 1))
    }

    pub fn num_cx(&self) -> usize {
        self.reps * self.n.saturating_sub(1)
    }

    /// Execution-order layout of the circuit.
    pub fn layout(&self) -> Vec<LayoutItem> {
        let per_layer = 2 * self.n;
        let mut items = Vec::with_capacity(self.slots.len() + self.num_cx());
        for layer in 0..=self.reps {
            items.extend((layer * per_layer..(layer + 1) * per_layer).map(LayoutItem::Rotation));
            if layer < self.reps {
                items.extend(self.ladder().map(|(control, target)| LayoutItem::Cx { control, target }));
            }
        }
        items
    }

    /// Number of assignments, `4^slots`, if it fits in a `u128`.
    pub fn space_size(&self) -> Option<u128> {
        u128::from(QUARTER_LEVELS).checked_pow(self.slots.len() as u32)
    }

    /// Binds quarter-turn indices to concrete Clifford gates. Zero slots are
    /// skipped.
    pub fn bind(&self, a: &ParameterAssignment) -> Result<Vec<CliffordGate>> {
        a.validate_for(self)?;
        let mut gates = Vec::with_capacity(self.slots.len() + self.num_cx());
        for item in self.layout() {
            match item {
                LayoutItem::Rotation(i) => {
                    let k = a.indices[i];
                    if k != 0 {
                        let s = self.slots[i];
                        gates.push(CliffordGate::rotation(s.axis.gate_kind(), s.qubit, k));
                    }
                }
                LayoutItem::Cx { control, target } => gates.push(CliffordGate::cx(control, target)),
            }
        }
        Ok(gates)
    }

    /// Assignment preparing the basis state `|bits⟩`: RY(π) in the final
    /// rotation layer wherever `bits[q]` is set, every other slot zero.
    pub fn bitstring_assignment(&self, bits: &[bool]) -> Result<ParameterAssignment> {
        if bits.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: bits.len(),
            });
        }
        let mut indices = vec![0u8; self.slots.len()];
        for (q, &b) in bits.iter().enumerate() {
            if b {
                indices[self.slot_index(Axis::Y, q, self.reps)] = 2;
            }
        }
        Ok(ParameterAssignment { indices })
    }
}

/// SU2-style template with `reps` linear-entanglement layers.
pub fn build_su2(n: usize, reps: usize) -> AnsatzTemplate {
    assert!(n >= 1 && reps >= 1, "build_su2 needs n >= 1 and reps >= 1");
    let mut slots = Vec::with_capacity(2 * n * (reps + 1));
    for layer in 0..=reps {
        for qubit in 0..n {
            slots.push(Slot {
                axis: Axis::Y,
                qubit,
                layer,
            });
            slots.push(Slot {
                axis: Axis::Z,
                qubit,
                layer,
            });
        }
    }
    AnsatzTemplate { n, reps, slots }
}

/// Quarter-turn indices, one per slot; slot angle is `index · π/2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterAssignment {
    indices: Vec<u8>,
}

impl ParameterAssignment {
    pub fn new(indices: Vec<u8>) -> Result<Self> {
        if let Some((slot, &value)) = indices.iter().enumerate().find(|(_, &v)| v >= QUARTER_LEVELS)
        {
            return Err(Error::IndexOutOfAlphabet {
                slot,
                value,
                levels: QUARTER_LEVELS,
            });
        }
        Ok(Self { indices })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            indices: vec![0; len],
        }
    }

    pub fn indices(&self) -> &[u8] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn validate_for(&self, t: &AnsatzTemplate) -> Result<()> {
        if self.indices.len() != t.num_slots() {
            return Err(Error::LengthMismatch {
                expected: t.num_slots(),
                found: self.indices.len(),
            });
        }
        if let Some((slot, &value)) = self.indices.iter().enumerate().find(|(_, &v)| v >= QUARTER_LEVELS)
        {
            return Err(Error::IndexOutOfAlphabet {
                slot,
                value,
                levels: QUARTER_LEVELS,
            });
        }
        Ok(())
    }
}

/// Free-function form of [`AnsatzTemplate::bind`].
pub fn bind(t: &AnsatzTemplate, a: &ParameterAssignment) -> Result<Vec<CliffordGate>> {
    t.bind(a)
}

/// Free-function form of [`AnsatzTemplate::bitstring_assignment`].
pub fn bitstring_assignment(t: &AnsatzTemplate, bits: &[bool]) -> Result<ParameterAssignment> {
    t.bitstring_assignment(bits)
}
