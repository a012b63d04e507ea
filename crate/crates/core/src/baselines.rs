//! Reference energies and comparison metrics.
//!
//! "HF" here means the lowest-energy computational basis state that
//! satisfies the Hamiltonian's constraints. Only diagonal (I/Z) terms
//! contribute on a basis state.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::{hamiltonian_apply, hamiltonian_matrix};
use crate::pauli::{Hamiltonian, PauliTerm};
use crate::{Error, Result};

pub const MAX_HF_QUBITS: usize = 24;
pub const MAX_EXACT_QUBITS: usize = 14;
/// Up to this width the full Hermitian eigendecomposition is used.
pub const MAX_DENSE_EIGEN_QUBITS: usize = 10;
/// Chemical accuracy in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 1.6e-3;
/// Feasibility tolerance for diagonal constraint values.
pub const FEASIBILITY_TOL: f64 = 1e-9;
const DEGENERATE_DENOMINATOR: f64 = 1e-12;
const EIGEN_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaselineKind {
    #[serde(rename = "HF")]
    Hf,
    #[serde(rename = "EXACT")]
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult {
    pub kind: BaselineKind,
    pub energy: f64,
    /// Basis-state witness (HF only), `witness[q]` is qubit `q`.
    pub witness: Option<Vec<bool>>,
    pub qubits: usize,
}

impl BaselineResult {
    /// Witness as a `0`/`1` string, qubit 0 first.
    pub fn witness_label(&self) -> Option<String> {
        self.witness
            .as_ref()
            .map(|w| w.iter().map(|&b| if b { '1' } else { '0' }).collect())
    }
}

struct DiagonalSum {
    terms: Vec<(u64, f64)>,
}

impl DiagonalSum {
    fn new(terms: &[PauliTerm]) -> Self {
        Self {
            terms: terms
                .iter()
                .filter(|t| t.pauli.is_diagonal())
                .map(|t| (t.pauli.z_mask(), t.coeff))
                .collect(),
        }
    }

    fn value(&self, mask: u64) -> f64 {
        self.terms
            .iter()
            .map(|&(z, c)| if (mask & z).count_ones() % 2 == 0 { c } else { -c })
            .fold(0.0, |acc, x| acc + x)
    }
}

/// Diagonal-only energy of a basis state (qubit `q` set when `bits[q]`).
pub fn basis_energy(h: &Hamiltonian, bits: &[bool]) -> f64 {
    DiagonalSum::new(h.terms()).value(bits_to_mask(bits))
}

fn bits_to_mask(bits: &[bool]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |m, (q, &b)| m | (u64::from(b) << q))
}

/// Lexicographic rank `i` (qubit 0 is the most significant character) to
/// a qubit mask.
fn rank_to_mask(i: u64, n: usize) -> u64 {
    i.reverse_bits() >> (64 - n)
}

/// Best constrained computational basis state, by exhaustive scan. Ties go
/// to the lexicographically smallest bitstring.
pub fn hf_search(h: &Hamiltonian) -> Result<BaselineResult> {
    let n = h.num_qubits();
    if n > MAX_HF_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            max: MAX_HF_QUBITS,
            what: "basis-state scan",
        });
    }
    let energy = DiagonalSum::new(h.terms());
    let constraints: Vec<(DiagonalSum, f64)> = h
        .constraints()
        .iter()
        .map(|c| (DiagonalSum::new(&c.observable), c.target))
        .collect();
    let best = (0..1u64 << n)
        .into_par_iter()
        .filter_map(|i| {
            let mask = rank_to_mask(i, n);
            let feasible = constraints
                .iter()
                .all(|(c, target)| (c.value(mask) - target).abs() <= FEASIBILITY_TOL);
            feasible.then(|| (energy.value(mask), i))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let (e, i) = best.ok_or(Error::NoFeasibleBitstring)?;
    let mask = rank_to_mask(i, n);
    Ok(BaselineResult {
        kind: BaselineKind::Hf,
        energy: e,
        witness: Some((0..n).map(|q| (mask >> q) & 1 == 1).collect()),
        qubits: n,
    })
}

fn check_exact_width(n: usize) -> Result<()> {
    if n > MAX_EXACT_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            max: MAX_EXACT_QUBITS,
            what: "exact diagonalization",
        });
    }
    Ok(())
}

/// Smallest eigenvalue of the Hamiltonian's Pauli sum (constraints are not
/// part of the operator).
pub fn exact_ground(h: &Hamiltonian) -> Result<BaselineResult> {
    let n = h.num_qubits();
    check_exact_width(n)?;
    let (energy, _) = exact_ground_state(h)?;
    Ok(BaselineResult {
        kind: BaselineKind::Exact,
        energy,
        witness: None,
        qubits: n,
    })
}

/// Ground energy and a normalized ground-state vector.
pub fn exact_ground_state(h: &Hamiltonian) -> Result<(f64, Vec<Complex64>)> {
    let n = h.num_qubits();
    check_exact_width(n)?;
    if n <= MAX_DENSE_EIGEN_QUBITS {
        let eig = hamiltonian_matrix(h)?.symmetric_eigen();
        let k = eig.eigenvalues.imin();
        let v: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
        Ok((rayleigh(h, &v).unwrap_or(eig.eigenvalues[k]), v))
    } else {
        lanczos_ground(h, 0)
    }
}

/// `⟨v|H|v⟩ / ⟨v|v⟩` through exact Pauli arithmetic. Second order in the
/// eigenvector error, so it removes most eigensolver rounding.
fn rayleigh(h: &Hamiltonian, v: &[Complex64]) -> Option<f64> {
    let q = dot(v, &hamiltonian_apply(h, v)).re / dot(v, v).re;
    q.is_finite().then_some(q)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Restarted Lanczos with full reorthogonalization on the implicit Pauli
/// matvec. Returns the smallest Ritz pair once its residual is below
/// `1e-8 · max(1, |λ|)`.
pub fn lanczos_ground(h: &Hamiltonian, seed: u64) -> Result<(f64, Vec<Complex64>)> {
    let n = h.num_qubits();
    check_exact_width(n)?;
    let dim = 1usize << n;
    let krylov = dim.min(120);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let mut last = f64::NAN;
    for _restart in 0..200 {
        let s = norm(&start);
        start.iter_mut().for_each(|x| *x /= s);
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::with_capacity(krylov);
        let mut beta: Vec<f64> = Vec::with_capacity(krylov);
        loop {
            let v = basis.last().expect("non-empty");
            let mut w = hamiltonian_apply(h, v);
            let a = dot(v, &w).re;
            alpha.push(a);
            // Two passes of Gram-Schmidt against the whole basis.
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
                }
            }
            let bnorm = norm(&w);
            if alpha.len() == krylov || bnorm < 1e-12 {
                beta.push(bnorm);
                break;
            }
            beta.push(bnorm);
            w.iter_mut().for_each(|x| *x /= bnorm);
            basis.push(w);
        }
        let m = alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = t.symmetric_eigen();
        let k = eig.eigenvalues.imin();
        let theta = eig.eigenvalues[k];
        let coeffs: DVector<f64> = eig.eigenvectors.column(k).into_owned();
        let mut ritz = vec![Complex64::new(0.0, 0.0); dim];
        for (c, b) in coeffs.iter().zip(&basis) {
            ritz.iter_mut().zip(b).for_each(|(r, bi)| *r += bi * *c);
        }
        let rn = norm(&ritz);
        ritz.iter_mut().for_each(|x| *x /= rn);
        let hr = hamiltonian_apply(h, &ritz);
        let residual = hr
            .iter()
            .zip(&ritz)
            .map(|(a, b)| (a - b * theta).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual <= EIGEN_REL_TOL * theta.abs().max(1.0) {
            let energy = rayleigh(h, &ritz).unwrap_or(theta);
            return Ok((energy, ritz));
        }
        last = residual;
        start = ritz;
    }
    Err(Error::NoConvergence(format!("Lanczos residual {last:e}")))
}

/// Percentage of the HF-to-exact gap closed by `e_method`.
pub fn recovered_correlation(e_method: f64, e_hf: f64, e_exact: f64) -> Result<f64> {
    let gap = e_hf - e_exact;
    if gap.abs() < DEGENERATE_DENOMINATOR {
        return Err(Error::DegenerateDenominator(gap));
    }
    if gap < 0.0 {
        return Err(Error::UndefinedMetric(format!(
            "HF energy {e_hf} lies below exact energy {e_exact}"
        )));
    }
    Ok(100.0 * ((e_hf - e_method) / gap))
}

/// Strictly below 1.6 mHa from the exact energy.
pub fn chem_accurate(e_method: f64, e_exact: f64) -> bool {
    (e_method - e_exact).abs() < CHEMICAL_ACCURACY
}

/// Error reduction of `e_method` relative to HF: `|E_hf − E_exact| / |E_method − E_exact|`.
/// Infinite when the method is exact and HF is not; 1 when both are exact.
pub fn relative_accuracy(e_method: f64, e_hf: f64, e_exact: f64) -> f64 {
    let (hf_err, err) = ((e_hf - e_exact).abs(), (e_method - e_exact).abs());
    if err < DEGENERATE_DENOMINATOR {
        if hf_err < DEGENERATE_DENOMINATOR {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        hf_err / err
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::ConstraintSpec;

    #[test]
    fn hf_xx_is_zero_with_first_witness() {
        let h = Hamiltonian::from_labels(2, &[("XX", 1.0)]).unwrap();
        let r = hf_search(&h).unwrap();
        assert_eq!(r.energy, 0.0);
        assert_eq!(r.witness_label().unwrap(), "00");
    }

    #[test]
    fn hf_local_fields() {
        let h = Hamiltonian::from_labels(2, &[("ZI", -1.0), ("IZ", -1.0)]).unwrap();
        let r = hf_search(&h).unwrap();
        assert_eq!(r.energy, -2.0);
        assert_eq!(r.witness_label().unwrap(), "00");
        let h = Hamiltonian::from_labels(3, &[("ZII", 1.0), ("IIZ", -0.5)]).unwrap();
        let r = hf_search(&h).unwrap();
        assert_eq!(r.energy, -1.5);
        assert_eq!(r.witness_label().unwrap(), "100");
    }

    #[test]
    fn hf_lexicographic_tie_break() {
        // Any state with qubit 1 set ties; "010" is the first.
        let h = Hamiltonian::from_labels(3, &[("IZI", 1.0)]).unwrap();
        assert_eq!(hf_search(&h).unwrap().witness_label().unwrap(), "010");
    }

    #[test]
    fn hf_respects_constraints() {
        // Number operator (I - Z)/2 summed over 2 qubits, target 1 electron.
        let number = vec![
            PauliTerm::parse("II", 1.0).unwrap(),
            PauliTerm::parse("ZI", -0.5).unwrap(),
            PauliTerm::parse("IZ", -0.5).unwrap(),
        ];
        let c = ConstraintSpec {
            name: "n".into(),
            observable: number,
            target: 1.0,
            weight: 10.0,
        };
        let h = Hamiltonian::from_labels(2, &[("ZI", -1.0), ("IZ", -0.5)])
            .unwrap()
            .with_constraint(c.clone())
            .unwrap();
        let r = hf_search(&h).unwrap();
        assert_eq!(r.witness_label().unwrap(), "01");
        assert_eq!(r.energy, -0.5);

        let mut bad = c;
        bad.target = 3.0;
        let h = Hamiltonian::from_labels(2, &[("ZI", -1.0)])
            .unwrap()
            .with_constraint(bad)
            .unwrap();
        assert_eq!(hf_search(&h), Err(Error::NoFeasibleBitstring));
    }

    #[test]
    fn exact_examples() {
        let h = Hamiltonian::from_labels(2, &[("XX", 1.0)]).unwrap();
        assert!((exact_ground(&h).unwrap().energy + 1.0).abs() < 1e-12);
        let h = Hamiltonian::from_labels(3, &[("III", 0.37)]).unwrap();
        assert!((exact_ground(&h).unwrap().energy - 0.37).abs() < 1e-12);
    }

    #[test]
    fn width_limits() {
        let h = Hamiltonian::from_labels(15, &[("ZZZZZZZZZZZZZZZ", 1.0)]).unwrap();
        assert!(matches!(exact_ground(&h), Err(Error::TooManyQubits { .. })));
        let h = Hamiltonian::new(25, vec![]).unwrap();
        assert!(matches!(hf_search(&h), Err(Error::TooManyQubits { .. })));
    }

    #[test]
    fn metrics() {
        assert_eq!(recovered_correlation(-1.0, 0.0, -1.0).unwrap(), 100.0);
        assert_eq!(recovered_correlation(0.0, 0.0, -1.0).unwrap(), 0.0);
        assert!(matches!(
            recovered_correlation(1.0, 1.0, 1.0),
            Err(Error::DegenerateDenominator(_))
        ));
        assert!(matches!(
            recovered_correlation(0.0, -2.0, -1.0),
            Err(Error::UndefinedMetric(_))
        ));
        assert!(chem_accurate(-1.001, -1.0));
        assert!(!chem_accurate(1.6e-3, 0.0));
        assert!(chem_accurate(0.0, 0.0));
        assert!((relative_accuracy(-0.9, 0.0, -1.0) - 10.0).abs() < 1e-9);
        assert_eq!(relative_accuracy(-1.0, 0.0, -1.0), f64::INFINITY);
    }
}
