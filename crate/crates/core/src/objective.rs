//! Energy of an assignment: Pauli-term expectations on the bound stabilizer
//! state plus quadratic constraint penalties.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzTemplate, ParameterAssignment};
use crate::pauli::{Hamiltonian, PauliTerm};
use crate::stabilizer::StabilizerTableau;
use crate::{Error, Result};

/// Below this many terms, expectations are evaluated serially.
const PAR_TERMS: usize = 512;

/// Penalty `weight · (⟨observable⟩ − target)²` added to the objective.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSpec {
    pub name: String,
    pub observable: Vec<PauliTerm>,
    pub target: f64,
    pub weight: f64,
}

impl ConstraintSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.weight >= 0.0) || !self.weight.is_finite() {
            return Err(Error::SchemaError(format!(
                "constraint {} weight must be finite and >= 0",
                self.name
            )));
        }
        if !self.target.is_finite() {
            return Err(Error::NonFiniteCoefficient(format!("constraint {} target", self.name)));
        }
        for t in &self.observable {
            if t.pauli.num_qubits() != n {
                return Err(Error::InconsistentQubitCount(format!(
                    "constraint {} term {} has {} qubits, expected {n}",
                    self.name,
                    t.pauli.label(),
                    t.pauli.num_qubits()
                )));
            }
        }
        Ok(())
    }

    pub fn penalty(&self, value: f64) -> f64 {
        let d = value - self.target;
        self.weight * d * d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub raw_energy: f64,
    pub penalty: f64,
    pub total: f64,
    pub constraint_values: Vec<f64>,
}

/// Sums `coeff · expectation` in term order.
fn weighted_sum(terms: &[PauliTerm], values: &[f64]) -> f64 {
    terms.iter().zip(values).fold(0.0, |acc, (t, v)| acc + t.coeff * v)
}

/// Assembles an [`EnergyRecord`] from any per-Pauli expectation routine.
pub fn record_with<F>(h: &Hamiltonian, expectation: F) -> Result<EnergyRecord>
where
    F: Fn(&PauliTerm) -> Result<f64> + Sync,
{
    let values = term_values(h.terms(), &expectation)?;
    let raw_energy = weighted_sum(h.terms(), &values);
    let mut penalty = 0.0;
    let mut constraint_values = Vec::with_capacity(h.constraints().len());
    for c in h.constraints() {
        let vals = term_values(&c.observable, &expectation)?;
        let v = weighted_sum(&c.observable, &vals);
        penalty += c.penalty(v);
        constraint_values.push(v);
    }
    Ok(EnergyRecord {
        raw_energy,
        penalty,
        total: raw_energy + penalty,
        constraint_values,
    })
}

fn term_values<F>(terms: &[PauliTerm], expectation: &F) -> Result<Vec<f64>>
where
    F: Fn(&PauliTerm) -> Result<f64> + Sync,
{
    if terms.len() >= PAR_TERMS {
        terms.par_iter().map(expectation).collect()
    } else {
        terms.iter().map(expectation).collect()
    }
}

/// Tableau reached by binding `a` onto `|0…0⟩`.
pub fn prepare_state(t: &AnsatzTemplate, a: &ParameterAssignment) -> Result<StabilizerTableau> {
    let gates = t.bind(a)?;
    let mut state = StabilizerTableau::zero_state(t.num_qubits());
    state.apply_all(&gates)?;
    Ok(state)
}

/// Energy record of a prepared stabilizer state.
pub fn evaluate_state(h: &Hamiltonian, state: &StabilizerTableau) -> Result<EnergyRecord> {
    if h.num_qubits() != state.num_qubits() {
        return Err(Error::SizeMismatch {
            left: h.num_qubits(),
            right: state.num_qubits(),
        });
    }
    record_with(h, |t| Ok(f64::from(state.expectation(&t.pauli)?)))
}

pub fn evaluate(h: &Hamiltonian, t: &AnsatzTemplate, a: &ParameterAssignment) -> Result<EnergyRecord> {
    if h.num_qubits() != t.num_qubits() {
        return Err(Error::SizeMismatch {
            left: h.num_qubits(),
            right: t.num_qubits(),
        });
    }
    evaluate_state(h, &prepare_state(t, a)?)
}

/// Per-term expectations, in Hamiltonian term order.
pub fn term_breakdown(
    h: &Hamiltonian,
    t: &AnsatzTemplate,
    a: &ParameterAssignment,
) -> Result<Vec<(PauliTerm, i8)>> {
    if h.num_qubits() != t.num_qubits() {
        return Err(Error::SizeMismatch {
            left: h.num_qubits(),
            right: t.num_qubits(),
        });
    }
    let state = prepare_state(t, a)?;
    h.terms()
        .iter()
        .map(|term| Ok((term.clone(), state.expectation(&term.pauli)?)))
        .collect()
}

/// One row of the per-term comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct TermRow {
    pub label: String,
    pub coeff: f64,
    pub diagonal: bool,
    pub cafqa: i8,
    pub hf: Option<i8>,
    pub exact: Option<f64>,
}

/// Orders rows as: diagonal terms, then non-diagonal terms the Clifford
/// state reaches (nonzero expectation), then the rest by exact expectation
/// when available. Order within the first two groups is preserved.
pub fn order_term_rows(rows: &mut [TermRow]) {
    let group = |r: &TermRow| {
        if r.diagonal {
            0
        } else if r.cafqa != 0 {
            1
        } else {
            2
        }
    };
    rows.sort_by(|a, b| {
        group(a).cmp(&group(b)).then_with(|| {
            if group(a) == 2 {
                let (ea, eb) = (a.exact.unwrap_or(0.0), b.exact.unwrap_or(0.0));
                ea.total_cmp(&eb)
            } else {
                std::cmp::Ordering::Equal
            }
        })
    });
}

/// CSV with columns `term_label,coeff,expectation_cafqa[,expectation_hf][,expectation_exact]`.
pub fn term_rows_csv(rows: &[TermRow], with_hf: bool, with_exact: bool) -> String {
    let mut out = String::from("term_label,coeff,expectation_cafqa");
    if with_hf {
        out.push_str(",expectation_hf");
    }
    if with_exact {
        out.push_str(",expectation_exact");
    }
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{}", r.label, r.coeff, r.cafqa));
        if with_hf {
            out.push_str(&format!(",{}", r.hf.unwrap_or(0)));
        }
        if with_exact {
            out.push_str(&format!(",{}", r.exact.map(|e| format!("{e:.12}")).unwrap_or_default()));
        }
        out.push('\n');
    }
    out
}
