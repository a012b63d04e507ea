#![allow(dead_code)]

use cliffseed::ansatz::{build_su2, AnsatzTemplate, Axis, ParameterAssignment};
use cliffseed::dense::StateVector;
use cliffseed::objective::prepare_state;
use cliffseed::pauli::{Hamiltonian, PauliString, PauliTerm};
use cliffseed::stabilizer::CliffordGate;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_gate(rng: &mut ChaCha8Rng, n: usize) -> CliffordGate {
    let q = rng.gen_range(0..n);
    let pick = if n > 1 { rng.gen_range(0..10) } else { rng.gen_range(0..9) };
    let k = rng.gen_range(0..4u8);
    match pick {
        0 => CliffordGate::h(q),
        1 => CliffordGate::s(q),
        2 => CliffordGate::sdg(q),
        3 => CliffordGate::x(q),
        4 => CliffordGate::y(q),
        5 => CliffordGate::z(q),
        6 => CliffordGate::rx(q, k),
        7 => CliffordGate::ry(q, k),
        8 => CliffordGate::rz(q, k),
        _ => {
            let mut t = rng.gen_range(0..n - 1);
            if t >= q {
                t += 1;
            }
            CliffordGate::cx(q, t)
        }
    }
}

pub fn random_circuit(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> Vec<CliffordGate> {
    (0..depth).map(|_| random_gate(rng, n)).collect()
}

pub fn random_pauli(rng: &mut ChaCha8Rng, n: usize) -> PauliString {
    let label: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)]).collect();
    PauliString::parse(&label, n).unwrap()
}

/// Pauli with label digits taken from `rank` in base 4 (I, X, Y, Z).
pub fn pauli_from_rank(n: usize, mut rank: usize) -> PauliString {
    let mut label = vec!['I'; n];
    for c in label.iter_mut().rev() {
        *c = ['I', 'X', 'Y', 'Z'][rank % 4];
        rank /= 4;
    }
    PauliString::parse(&label.iter().collect::<String>(), n).unwrap()
}

/// Random Hamiltonian with `terms` Pauli strings and normal-ish
/// coefficients in `[-1, 1]`, plus an identity offset.
pub fn random_hamiltonian(rng: &mut ChaCha8Rng, n: usize, terms: usize) -> Hamiltonian {
    let mut list = vec![PauliTerm::new(PauliString::identity(n), rng.gen_range(-1.0..1.0)).unwrap()];
    for _ in 0..terms {
        let p = random_pauli(rng, n);
        list.push(PauliTerm::new(p, rng.gen_range(-1.0..1.0)).unwrap());
    }
    Hamiltonian::new(n, list).unwrap()
}

pub fn dense_run(n: usize, gates: &[CliffordGate]) -> StateVector {
    let mut s = StateVector::zero_state(n).unwrap();
    for g in gates {
        s.apply_gate(g).unwrap();
    }
    s
}

pub fn random_assignment(rng: &mut ChaCha8Rng, len: usize) -> ParameterAssignment {
    ParameterAssignment::new((0..len).map(|_| rng.gen_range(0..4u8)).collect()).unwrap()
}

/// An `n`-qubit, one-rep template searched over the layer-0 RY and RZ
/// slots (`2n` active slots), with a Hamiltonian whose unique ground state is the
/// stabilizer state of a randomly planted assignment.
pub struct Planted {
    pub template: AnsatzTemplate,
    pub hamiltonian: Hamiltonian,
    pub active: Vec<usize>,
    pub ground: f64,
}

pub fn planted(rng: &mut ChaCha8Rng, n: usize) -> Planted {
    let template = build_su2(n, 1);
    let active: Vec<usize> = (0..n)
        .flat_map(|q| [template.slot_index(Axis::Y, q, 0), template.slot_index(Axis::Z, q, 0)])
        .collect();
    // Odd RY turns put each qubit on the X/Y equator before the ladder.
    let mut indices = vec![0u8; template.num_slots()];
    for q in 0..n {
        indices[template.slot_index(Axis::Y, q, 0)] = [1, 3][rng.gen_range(0..2)];
        indices[template.slot_index(Axis::Z, q, 0)] = rng.gen_range(0..4);
    }
    let state = prepare_state(&template, &ParameterAssignment::new(indices).unwrap()).unwrap();
    let gens: Vec<PauliString> = state.stabilizers().to_vec();
    let mut terms = Vec::new();
    let mut ground = 0.0;
    let mut push = |p: &PauliString, w: f64, terms: &mut Vec<PauliTerm>| {
        let sign = if p.phase() == 2 { -1.0 } else { 1.0 };
        terms.push(PauliTerm::new(p.clone().with_phase(0), -w * sign).unwrap());
        ground -= w;
    };
    for g in &gens {
        let w = rng.gen_range(0.5..1.5);
        push(g, w, &mut terms);
    }
    for _ in 0..3 {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        let prod = gens[a].mul(&gens[b]).unwrap();
        let w = rng.gen_range(0.1..0.5);
        push(&prod, w, &mut terms);
    }
    let hamiltonian = Hamiltonian::new(n, terms).unwrap();
    Planted {
        template,
        hamiltonian,
        active,
        ground,
    }
}
