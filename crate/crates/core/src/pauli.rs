//! Pauli strings, weighted Pauli sums and the Hamiltonian file format.
//!
//! Qubit ordering: character `j` of a label acts on qubit `j`, so `"XI"`
//! is `X` on qubit 0. The same convention is used by every file and table
//! this crate reads or writes.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::objective::ConstraintSpec;
use crate::{Error, Result};

/// Terms whose merged coefficient magnitude falls below this are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Default penalty weight for constraints that do not set one.
pub const DEFAULT_CONSTRAINT_WEIGHT: f64 = 10.0;

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD).max(1)
}

/// An `n`-qubit Pauli operator `i^phase · P_0 ⊗ … ⊗ P_{n-1}`.
///
/// Each qubit is encoded by an `(x, z)` bit pair: `(0,0)=I`, `(1,0)=X`,
/// `(0,1)=Z`, `(1,1)=Y`. `Y` is stored as itself, not as `XZ`, so a bare
/// label never carries a phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        Self {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    /// Parses a label such as `"IZZI"`.
    pub fn parse(label: &str, n: usize) -> Result<Self> {
        let found = label.chars().count();
        if found != n {
            return Err(Error::BadLength { expected: n, found });
        }
        let mut p = Self::identity(n);
        for (j, c) in label.chars().enumerate() {
            let (x, z) = match c {
                'I' => (false, false),
                'X' => (true, false),
                'Y' => (true, true),
                'Z' => (false, true),
                other => return Err(Error::BadChar(other)),
            };
            p.set(j, x, z);
        }
        Ok(p)
    }

    /// Builds a Pauli from per-qubit `x`/`z` flags.
    pub fn from_bits(x: &[bool], z: &[bool]) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::SizeMismatch {
                left: x.len(),
                right: z.len(),
            });
        }
        let mut p = Self::identity(x.len());
        for j in 0..x.len() {
            p.set(j, x[j], z[j]);
        }
        Ok(p)
    }

    /// Single-qubit Pauli `kind` (one of `'X'`, `'Y'`, `'Z'`) on `qubit`.
    pub fn single(n: usize, qubit: usize, kind: char) -> Result<Self> {
        if qubit >= n {
            return Err(Error::QubitOutOfRange { qubit, n });
        }
        let mut label: Vec<char> = vec!['I'; n];
        label[qubit] = kind;
        Self::parse(&label.into_iter().collect::<String>(), n)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Power of `i` in front of the tensor product, in `0..4`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    /// Flips the sign (adds `i^2` to the phase).
    pub fn negate(&mut self) {
        self.phase = (self.phase + 2) % 4;
    }

    #[inline]
    pub fn x(&self, j: usize) -> bool {
        (self.x[j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    pub fn z(&self, j: usize) -> bool {
        (self.z[j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, j: usize, x: bool, z: bool) {
        let (w, b) = (j / WORD, j % WORD);
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !mask) | ((z as u64) << b);
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    /// X-bit mask as an integer with bit `j` for qubit `j`; requires `n <= 64`.
    pub fn x_mask(&self) -> u64 {
        debug_assert!(self.n <= 64);
        self.x[0]
    }

    /// Z-bit mask as an integer with bit `j` for qubit `j`; requires `n <= 64`.
    pub fn z_mask(&self) -> u64 {
        debug_assert!(self.n <= 64);
        self.z[0]
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// True when the operator only contains `I` and `Z` factors.
    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Number of `Y` factors.
    pub fn y_count(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x & z).count_ones() as usize)
            .sum()
    }

    /// Same `(x, z)` bits, ignoring phase.
    pub fn same_support(&self, other: &Self) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Operator product `self · other` with exact phase tracking.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.mul_assign(other)?;
        Ok(out)
    }

    /// In-place right multiplication: `self ← self · other`.
    pub fn mul_assign(&mut self, other: &Self) -> Result<()> {
        self.check_size(other)?;
        let mut plus = 0u32;
        let mut minus = 0u32;
        for w in 0..self.x.len() {
            let (xa, za, xb, zb) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (a_x, a_y, a_z) = (xa & !za, xa & za, !xa & za);
            let (b_x, b_y, b_z) = (xb & !zb, xb & zb, !xb & zb);
            // XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i.
            plus += ((a_x & b_y) | (a_y & b_z) | (a_z & b_x)).count_ones();
            minus += ((a_x & b_z) | (a_y & b_x) | (a_z & b_y)).count_ones();
            self.x[w] = xa ^ xb;
            self.z[w] = za ^ zb;
        }
        // -i contributes 3 mod 4.
        let total = self.phase as u32 + other.phase as u32 + plus + 3 * minus;
        self.phase = (total % 4) as u8;
        Ok(())
    }

    /// Symplectic commutation test.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_size(other)?;
        Ok(self.commutes_unchecked(other))
    }

    #[inline]
    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        parity & 1 == 0
    }

    /// The bare label, without phase.
    pub fn label(&self) -> String {
        (0..self.n)
            .map(|j| match (self.x(j), self.z(j)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            })
            .collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{prefix}{}", self.label())
    }
}

/// A Hermitian Pauli term `coeff · P`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub pauli: PauliString,
    pub coeff: f64,
}

impl PauliTerm {
    pub fn new(pauli: PauliString, coeff: f64) -> Result<Self> {
        if !coeff.is_finite() {
            return Err(Error::NonFiniteCoefficient(pauli.label()));
        }
        if pauli.phase() != 0 {
            return Err(Error::SchemaError(format!(
                "term {pauli} must have phase 0"
            )));
        }
        Ok(Self { pauli, coeff })
    }

    pub fn parse(label: &str, coeff: f64) -> Result<Self> {
        Self::new(PauliString::parse(label, label.chars().count())?, coeff)
    }
}

/// Sums duplicate Pauli strings (keeping first-occurrence order) and drops
/// terms whose coefficient ends up below [`PRUNE_THRESHOLD`].
pub fn merge_terms(terms: Vec<PauliTerm>) -> Vec<PauliTerm> {
    let mut index: HashMap<PauliString, usize> = HashMap::new();
    let mut merged: Vec<PauliTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match index.get(&t.pauli) {
            Some(&i) => merged[i].coeff += t.coeff,
            None => {
                index.insert(t.pauli.clone(), merged.len());
                merged.push(t);
            }
        }
    }
    merged.retain(|t| t.coeff.abs() >= PRUNE_THRESHOLD);
    merged
}

/// A weighted Pauli sum plus constraint observables.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    pub name: String,
    n: usize,
    terms: Vec<PauliTerm>,
    constraints: Vec<ConstraintSpec>,
    pub metadata: Map<String, Value>,
}

impl Hamiltonian {
    pub fn new(n: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        for t in &terms {
            if t.pauli.num_qubits() != n {
                return Err(Error::InconsistentQubitCount(format!(
                    "term {} has {} qubits, expected {n}",
                    t.pauli.label(),
                    t.pauli.num_qubits()
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::NonFiniteCoefficient(t.pauli.label()));
            }
        }
        Ok(Self {
            name: String::new(),
            n,
            terms: merge_terms(terms),
            constraints: Vec::new(),
            metadata: Map::new(),
        })
    }

    /// Convenience constructor from `(label, coeff)` pairs.
    pub fn from_labels(n: usize, terms: &[(&str, f64)]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|&(label, coeff)| PauliTerm::new(PauliString::parse(label, n)?, coeff))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, terms)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_constraint(mut self, constraint: ConstraintSpec) -> Result<Self> {
        self.add_constraint(constraint)?;
        Ok(self)
    }

    pub fn add_constraint(&mut self, constraint: ConstraintSpec) -> Result<()> {
        constraint.validate(self.n)?;
        self.constraints.push(constraint);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn constraints(&self) -> &[ConstraintSpec] {
        &self.constraints
    }

    pub fn constraints_mut(&mut self) -> &mut [ConstraintSpec] {
        &mut self.constraints
    }

    /// Drops every constraint, keeping only the energy terms.
    pub fn without_constraints(&self) -> Self {
        Self {
            constraints: Vec::new(),
            ..self.clone()
        }
    }

    /// Bond length from `metadata.bond_length`, when present.
    pub fn bond_length(&self) -> Option<f64> {
        self.metadata.get("bond_length").and_then(Value::as_f64)
    }

    /// Parses a Hamiltonian JSON document.
    pub fn from_json(document: &str) -> Result<Self> {
        let doc: HamiltonianDoc =
            serde_json::from_str(document).map_err(|e| Error::SchemaError(e.to_string()))?;
        doc.into_hamiltonian()
    }

    pub fn to_json(&self) -> String {
        let doc = HamiltonianDoc {
            name: Some(self.name.clone()),
            num_qubits: self.n,
            terms: self.terms.iter().map(TermDoc::from).collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| ConstraintDoc {
                    name: c.name.clone(),
                    terms: c.observable.iter().map(TermDoc::from).collect(),
                    target: c.target,
                    weight: Some(c.weight),
                })
                .collect(),
            metadata: Some(self.metadata.clone()),
        };
        serde_json::to_string_pretty(&doc).expect("hamiltonian serializes")
    }
}

/// Parses and validates a Hamiltonian JSON document.
pub fn load_hamiltonian(document: &str) -> Result<Hamiltonian> {
    Hamiltonian::from_json(document)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    pauli: String,
    coeff: f64,
}

impl From<&PauliTerm> for TermDoc {
    fn from(t: &PauliTerm) -> Self {
        Self {
            pauli: t.pauli.label(),
            coeff: t.coeff,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintDoc {
    name: String,
    terms: Vec<TermDoc>,
    target: f64,
    #[serde(default)]
    weight: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HamiltonianDoc {
    #[serde(default)]
    name: Option<String>,
    num_qubits: usize,
    terms: Vec<TermDoc>,
    #[serde(default)]
    constraints: Vec<ConstraintDoc>,
    #[serde(default)]
    metadata: Option<Map<String, Value>>,
}

fn parse_terms(docs: &[TermDoc], n: usize, context: &str) -> Result<Vec<PauliTerm>> {
    docs.iter()
        .enumerate()
        .map(|(i, t)| {
            let len = t.pauli.chars().count();
            if len != n {
                return Err(Error::InconsistentQubitCount(format!(
                    "{context} term {i} ({:?}) has {len} qubits, num_qubits is {n}",
                    t.pauli
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::NonFiniteCoefficient(format!("{context} term {i}")));
            }
            PauliTerm::new(PauliString::parse(&t.pauli, n)?, t.coeff)
        })
        .collect()
}

impl HamiltonianDoc {
    fn into_hamiltonian(self) -> Result<Hamiltonian> {
        let n = self.num_qubits;
        if n == 0 {
            return Err(Error::SchemaError("num_qubits must be at least 1".into()));
        }
        let mut h = Hamiltonian::new(n, parse_terms(&self.terms, n, "hamiltonian")?)?;
        h.name = self.name.unwrap_or_default();
        h.metadata = self.metadata.unwrap_or_default();
        for c in self.constraints {
            let observable = merge_terms(parse_terms(&c.terms, n, &c.name)?);
            let weight = c.weight.unwrap_or(DEFAULT_CONSTRAINT_WEIGHT);
            if !c.target.is_finite() || !weight.is_finite() {
                return Err(Error::NonFiniteCoefficient(format!("constraint {}", c.name)));
            }
            if weight < 0.0 {
                return Err(Error::SchemaError(format!(
                    "constraint {} has negative weight {weight}",
                    c.name
                )));
            }
            h.add_constraint(ConstraintSpec {
                name: c.name,
                observable,
                target: c.target,
                weight,
            })?;
        }
        Ok(h)
    }
}
