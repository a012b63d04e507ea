//! Classical search for Clifford initializations of hardware-efficient
//! variational circuits.
//!
//! A hardware-efficient ansatz whose rotation angles are restricted to
//! multiples of π/2 only ever produces stabilizer states, so its energy
//! against a Pauli-sum Hamiltonian can be evaluated exactly in polynomial
//! time. This crate provides:
//!
//! * [`pauli`]: Pauli strings, Hamiltonians and the JSON file format.
//! * [`stabilizer`]: a destabilizer/stabilizer tableau with exact
//!   `{-1, 0, +1}` Pauli expectations.
//! * [`ansatz`]: the RY/RZ + linear CX ladder template and its binding.
//! * [`objective`]: energies with quadratic constraint penalties.
//! * [`search`]: exhaustive, random and random-forest Bayesian search.
//! * [`baselines`]: best basis state, exact ground energy and metrics.
//! * [`magic`]: eighth-turn angles with a bounded number of T-like slots,
//!   evaluated on a dense statevector.
//! * [`dense`]: the statevector simulator used as an oracle and by [`magic`].

pub mod ansatz;
pub mod baselines;
pub mod dense;
mod error;
pub mod magic;
pub mod objective;
pub mod pauli;
pub mod search;
pub mod stabilizer;

pub use error::{Error, Result};
