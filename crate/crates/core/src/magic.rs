//! Eighth-turn angles with a bounded number of non-Clifford slots.
//!
//! Slot index `i ∈ 0..8` means angle `i·π/4`; odd indices are T-like
//! (RZ(π/4) is T up to global phase). Assignments with no odd slot are
//! evaluated on the stabilizer path, anything else on a dense statevector,
//! so `k = 0` reproduces the Clifford search exactly.

use std::f64::consts::FRAC_PI_4;

use crate::ansatz::{AnsatzTemplate, LayoutItem, ParameterAssignment};
use crate::dense::{rotation_matrix, StateVector};
use crate::objective::{record_with, EnergyRecord};
use crate::pauli::Hamiltonian;
use crate::search::space::odd_count;
use crate::search::{run_exhaustive, run_guided, Alphabet, EighthTurns, Problem, SearchConfig, SearchTrace};
use crate::{Error, Result};

pub const EIGHTH_LEVELS: u8 = 8;
pub const MAX_MAGIC_QUBITS: usize = 16;
/// Largest tolerated imaginary part of a Hermitian expectation.
const IMAGINARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtendedAssignment {
    indices: Vec<u8>,
    k_budget: usize,
}

impl ExtendedAssignment {
    pub fn new(indices: Vec<u8>, k_budget: usize) -> Result<Self> {
        if let Some((slot, &value)) = indices.iter().enumerate().find(|(_, &v)| v >= EIGHTH_LEVELS) {
            return Err(Error::IndexOutOfAlphabet {
                slot,
                value,
                levels: EIGHTH_LEVELS,
            });
        }
        let found = odd_count(&indices);
        if found > k_budget {
            return Err(Error::OddBudgetExceeded {
                found,
                budget: k_budget,
            });
        }
        Ok(Self { indices, k_budget })
    }

    /// Doubles every quarter-turn index.
    pub fn from_clifford(a: &ParameterAssignment, k_budget: usize) -> Self {
        Self {
            indices: a.indices().iter().map(|x| 2 * x).collect(),
            k_budget,
        }
    }

    /// Halves every index when none is odd.
    pub fn to_clifford(&self) -> Option<ParameterAssignment> {
        if self.odd_slots() > 0 {
            return None;
        }
        ParameterAssignment::new(self.indices.iter().map(|x| x / 2).collect()).ok()
    }

    pub fn indices(&self) -> &[u8] {
        &self.indices
    }

    pub fn k_budget(&self) -> usize {
        self.k_budget
    }

    pub fn odd_slots(&self) -> usize {
        odd_count(&self.indices)
    }
}

fn check_width(n: usize) -> Result<()> {
    if n > MAX_MAGIC_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            max: MAX_MAGIC_QUBITS,
            what: "eighth-turn evaluation",
        });
    }
    Ok(())
}

/// Statevector after binding eighth-turn angles onto `|0…0⟩`.
pub fn dense_state(t: &AnsatzTemplate, a: &ExtendedAssignment) -> Result<StateVector> {
    check_width(t.num_qubits())?;
    if a.indices.len() != t.num_slots() {
        return Err(Error::LengthMismatch {
            expected: t.num_slots(),
            found: a.indices.len(),
        });
    }
    let mut state = StateVector::zero_state(t.num_qubits())?;
    for item in t.layout() {
        match item {
            LayoutItem::Rotation(i) => {
                let k = a.indices[i];
                if k != 0 {
                    let slot = t.slots()[i];
                    let m = rotation_matrix(slot.axis.symbol(), f64::from(k) * FRAC_PI_4);
                    state.apply_1q(slot.qubit, &m);
                }
            }
            LayoutItem::Cx { control, target } => state.apply_cx(control, target),
        }
    }
    Ok(state)
}

/// Energy of an eighth-turn assignment by full statevector simulation.
pub fn dense_eval(t: &AnsatzTemplate, a: &ExtendedAssignment, h: &Hamiltonian) -> Result<EnergyRecord> {
    check_width(h.num_qubits())?;
    if h.num_qubits() != t.num_qubits() {
        return Err(Error::SizeMismatch {
            left: h.num_qubits(),
            right: t.num_qubits(),
        });
    }
    let state = dense_state(t, a)?;
    record_with(h, |term| {
        let e = state.expectation(&term.pauli)?;
        if e.im.abs() > IMAGINARY_TOL {
            return Err(Error::ImaginaryResidue(e.im));
        }
        Ok(e.re)
    })
}

fn eighth_domain(problem: &Problem<'_>, k: usize) -> Result<EighthTurns> {
    check_width(problem.hamiltonian.num_qubits())?;
    Ok(EighthTurns {
        dims: problem.active_dims(),
        max_odd: k,
    })
}

/// Evaluates active-slot eighth-turn values: stabilizer path when all
/// even, dense otherwise.
fn evaluate_extended(problem: &Problem<'_>, values: &[u8]) -> Result<(Vec<u8>, EnergyRecord)> {
    if values.iter().all(|v| v % 2 == 0) {
        let halves: Vec<u8> = values.iter().map(|v| v / 2).collect();
        let (full, record) = problem.evaluate_active(&halves)?;
        return Ok((full.iter().map(|v| 2 * v).collect(), record));
    }
    let full = problem.selection().expand(values);
    let a = ExtendedAssignment::new(full, usize::MAX)?;
    let record = dense_eval(problem.template, &a, problem.hamiltonian)?;
    Ok((a.indices, record))
}

/// Bayesian search over eighth-turn angles with at most `k` odd slots.
pub fn kt_search(problem: &Problem<'_>, k: usize, config: &SearchConfig) -> Result<SearchTrace> {
    let domain = eighth_domain(problem, k)?;
    if config.warmup == 0 {
        return Err(Error::InvalidConfig("kt_search needs warmup >= 1".into()));
    }
    run_guided(&domain, Alphabet::EighthTurn { k }, "bo", config, |v| {
        evaluate_extended(problem, v)
    })
}

/// Distinct random eighth-turn assignments with at most `k` odd slots.
pub fn kt_random_search(problem: &Problem<'_>, k: usize, config: &SearchConfig) -> Result<SearchTrace> {
    let domain = eighth_domain(problem, k)?;
    let config = SearchConfig {
        warmup: config.budget,
        ..config.clone()
    };
    run_guided(&domain, Alphabet::EighthTurn { k }, "random", &config, |v| {
        evaluate_extended(problem, v)
    })
}

/// Every feasible eighth-turn assignment of the active slots. `cap` bounds
/// the raw `8^dims` grid.
pub fn kt_exhaustive(problem: &Problem<'_>, k: usize, cap: u128) -> Result<SearchTrace> {
    let domain = eighth_domain(problem, k)?;
    run_exhaustive(&domain, Alphabet::EighthTurn { k }, cap, |v| {
        evaluate_extended(problem, v)
    })
}
