//! False-property generation for gate-level circuits by partial quantifier
//! elimination.
//!
//! A circuit `N` is encoded as a CNF formula `F`. Replacing the clauses `G`
//! of one gate by a mutated group `G*` and taking `G*` out of the scope of
//! the quantifiers in `∃Y (G* ∧ F')` yields a property `Q` over inputs and
//! outputs. When `F ⊭ Q` the property is false, and any assignment breaking
//! `F ⇒ Q` is a high-quality test. Doing this for every gate gives a
//! structurally complete set of false properties.

pub mod cnf;
pub mod mutate;
pub mod netlist;
pub mod pqe;
pub mod random;
pub mod selftest;
pub mod seq;
pub mod verify;
pub mod sat;

pub use cnf::{Clause, CnfFormula, Lit, Role, VarMap};
pub use netlist::{Circuit, Gate, GateKind, Var};
