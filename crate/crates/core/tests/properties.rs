mod common;

use std::collections::HashSet;

use cliffseed::ansatz::{build_su2, ParameterAssignment};
use cliffseed::baselines::recovered_correlation;
use cliffseed::dense::pauli_matrix;
use cliffseed::objective::{evaluate, ConstraintSpec};
use cliffseed::pauli::{Hamiltonian, PauliString, PauliTerm};
use cliffseed::search::{bo_search, exhaustive, random_search, Problem, SearchConfig};
use cliffseed::stabilizer::StabilizerTableau;
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn label(n: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop::sample::select(vec!['I', 'X', 'Y', 'Z']), n)
        .prop_map(|v| v.into_iter().collect())
}

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (label(n), 0u8..4).prop_map(move |(l, ph)| PauliString::parse(&l, n).unwrap().with_phase(ph))
}

fn sized_triple() -> impl Strategy<Value = (PauliString, PauliString, PauliString)> {
    (1usize..=6).prop_flat_map(|n| (pauli(n), pauli(n), pauli(n)))
}

fn close(a: &nalgebra::DMatrix<num_complex::Complex64>, b: &nalgebra::DMatrix<num_complex::Complex64>) -> bool {
    (a - b).iter().all(|z| z.norm() < 1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mul_is_associative_and_matches_matrices((a, b, c) in sized_triple()) {
        let ab = a.mul(&b).unwrap();
        let left = ab.mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert!(close(&pauli_matrix(&ab), &(pauli_matrix(&a) * pauli_matrix(&b))));
        let id = PauliString::identity(a.num_qubits());
        prop_assert_eq!(&a.mul(&id).unwrap(), &a);
        prop_assert_eq!(&id.mul(&a).unwrap(), &a);
    }

    #[test]
    fn parse_label_round_trip(l in (1usize..150).prop_flat_map(label)) {
        let p = PauliString::parse(&l, l.len()).unwrap();
        prop_assert_eq!(p.label(), l.clone());
        prop_assert_eq!(p.phase(), 0);
        prop_assert_eq!(PauliString::parse(&p.label(), l.len()).unwrap(), p);
    }

    #[test]
    fn wide_commutation_counts_anticommuting_sites((a, b) in (1usize..200).prop_flat_map(|n| (label(n), label(n)))) {
        let anti = a.chars().zip(b.chars()).filter(|&(x, y)| x != 'I' && y != 'I' && x != y).count();
        let n = a.len();
        let (pa, pb) = (PauliString::parse(&a, n).unwrap(), PauliString::parse(&b, n).unwrap());
        prop_assert_eq!(pa.commutes(&pb).unwrap(), anti % 2 == 0);
    }

    #[test]
    fn expectations_are_one_shot(seed in any::<u64>(), n in 1usize..40, depth in 0usize..120) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = StabilizerTableau::zero_state(n);
        t.apply_all(&random_circuit(&mut rng, n, depth)).unwrap();
        prop_assert!(t.check_symplectic());
        prop_assert_eq!(t.expectation(&PauliString::identity(n)).unwrap(), 1);
        for _ in 0..20 {
            let e = t.expectation(&random_pauli(&mut rng, n)).unwrap();
            prop_assert!(matches!(e, -1 | 0 | 1));
        }
    }

    #[test]
    fn objective_is_linear_and_shift_invariant(seed in any::<u64>(), n in 1usize..6, scale in -3.0f64..3.0, shift in -5.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h1 = random_hamiltonian(&mut rng, n, 6);
        let h2 = random_hamiltonian(&mut rng, n, 6);
        let union = Hamiltonian::new(n, h1.terms().iter().chain(h2.terms()).cloned().collect()).unwrap();
        let scaled = Hamiltonian::new(
            n,
            h1.terms().iter().map(|t| PauliTerm::new(t.pauli.clone(), t.coeff * scale).unwrap()).collect(),
        ).unwrap();
        let mut shifted_terms = h1.terms().to_vec();
        shifted_terms.push(PauliTerm::new(PauliString::identity(n), shift).unwrap());
        let shifted = Hamiltonian::new(n, shifted_terms).unwrap();
        let t = build_su2(n, 1);
        for _ in 0..8 {
            let a = random_assignment(&mut rng, t.num_slots());
            let e1 = evaluate(&h1, &t, &a).unwrap().raw_energy;
            let e2 = evaluate(&h2, &t, &a).unwrap().raw_energy;
            prop_assert!((evaluate(&union, &t, &a).unwrap().raw_energy - (e1 + e2)).abs() < 1e-9);
            prop_assert!((evaluate(&scaled, &t, &a).unwrap().raw_energy - scale * e1).abs() < 1e-9);
            prop_assert!((evaluate(&shifted, &t, &a).unwrap().raw_energy - (e1 + shift)).abs() < 1e-9);
        }
    }

    #[test]
    fn bind_is_pure(seed in any::<u64>(), n in 1usize..8, reps in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = build_su2(n, reps);
        let a = random_assignment(&mut rng, t.num_slots());
        prop_assert_eq!(t.bind(&a).unwrap(), build_su2(n, reps).bind(&a.clone()).unwrap());
    }

    #[test]
    fn hamiltonian_json_round_trip(seed in any::<u64>(), n in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hamiltonian(&mut rng, n, 8).with_name("sample");
        let back = Hamiltonian::from_json(&h.to_json()).unwrap();
        prop_assert_eq!(back.terms(), h.terms());
        prop_assert_eq!(back.name, h.name);
    }

    #[test]
    fn recovered_correlation_endpoints(hf in -10.0f64..0.0, gap in 1e-6f64..5.0) {
        let exact = hf - gap;
        prop_assert_eq!(recovered_correlation(hf, hf, exact).unwrap(), 0.0);
        prop_assert_eq!(recovered_correlation(exact, hf, exact).unwrap(), 100.0);
    }
}

#[test]
fn ansatz_space_enumerates_without_duplicates() {
    for (n, reps) in [(1, 1), (2, 1), (1, 3)] {
        let t = build_su2(n, reps);
        let h = Hamiltonian::from_labels(n, &[(&"Z".repeat(n), 1.0)]).unwrap();
        let p = Problem::new(&t, &h).unwrap();
        let trace = exhaustive(&p, 1 << 20).unwrap();
        assert_eq!(t.space_size(), Some(4u128.pow((2 * n * (reps + 1)) as u32)));
        assert_eq!(trace.entries.len() as u128, t.space_size().unwrap());
        let distinct: HashSet<&Vec<u8>> = trace.entries.iter().map(|e| &e.assignment).collect();
        assert_eq!(distinct.len(), trace.entries.len());
    }
}

#[test]
fn satisfied_constraint_adds_no_penalty() {
    let t = build_su2(2, 1);
    let number = ConstraintSpec {
        name: "parity".into(),
        observable: vec![PauliTerm::parse("ZZ", 1.0).unwrap()],
        target: 1.0,
        weight: 10.0,
    };
    let h = Hamiltonian::from_labels(2, &[("XX", 0.5), ("ZI", -0.3)])
        .unwrap()
        .with_constraint(number)
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let a = random_assignment(&mut rng, t.num_slots());
        let r = evaluate(&h, &t, &a).unwrap();
        if r.constraint_values[0] == 1.0 {
            assert_eq!(r.total, r.raw_energy);
            assert_eq!(r.penalty, 0.0);
        } else {
            assert!(r.penalty > 0.0);
        }
    }
}

/// Traces never repeat a point, best-so-far never rises and guided search
/// never beats the exhaustive floor.
#[test]
fn search_trace_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for round in 0..6 {
        let h = random_hamiltonian(&mut rng, 3, 10);
        let t = build_su2(3, 1);
        let p = Problem::new(&t, &h)
            .unwrap()
            .with_active_slots((0..t.num_slots()).step_by(2).take(6).collect())
            .unwrap();
        let floor = exhaustive(&p, 1 << 20).unwrap();
        let config = SearchConfig {
            warmup: 30,
            budget: 150,
            pool_size: 60,
            trees: 8,
            seed: round,
            stagnation: None,
        };
        for trace in [floor.clone(), bo_search(&p, &config).unwrap(), random_search(&p, &config).unwrap()] {
            let distinct: HashSet<&Vec<u8>> = trace.entries.iter().map(|e| &e.assignment).collect();
            assert_eq!(distinct.len(), trace.entries.len());
            for w in trace.entries.windows(2) {
                assert!(w[1].best_so_far <= w[0].best_so_far);
            }
            assert!(trace.best_total() >= floor.best_total());
            let a = ParameterAssignment::new(trace.best().assignment.clone()).unwrap();
            assert_eq!(evaluate(&h, &t, &a).unwrap(), trace.best().record);
        }
    }
}

/// Median guided iterations to reach a planted ground state grow with
/// the number of active slots.
#[test]
fn iterations_grow_with_slot_count() {
    let mut medians = Vec::new();
    for n in [2, 3, 4] {
        let mut its = Vec::new();
        for seed in 0..9 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let inst = planted(&mut rng, n);
            let p = Problem::new(&inst.template, &inst.hamiltonian)
                .unwrap()
                .with_active_slots(inst.active.clone())
                .unwrap();
            let config = SearchConfig {
                warmup: 10,
                budget: 600.min(1 << (4 * n)),
                pool_size: 200,
                trees: 10,
                seed,
                stagnation: None,
            };
            let trace = bo_search(&p, &config).unwrap();
            its.push(trace.iterations_to_reach(inst.ground, 1e-9).unwrap_or(601));
        }
        its.sort_unstable();
        medians.push(its[its.len() / 2]);
    }
    println!("median iterations for 4, 6, 8 slots: {medians:?}");
    assert!(medians[0] <= medians[1] && medians[1] <= medians[2], "{medians:?}");
    assert!(medians[0] < medians[2], "{medians:?}");
}
