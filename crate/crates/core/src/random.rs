//! Seeded random circuits for testing and self-checks.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::netlist::{Circuit, Gate, GateKind, Latch, LatchInit, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub inputs: usize,
    pub gates: usize,
    pub outputs: usize,
    pub latches: usize,
    /// Allow latches with unconstrained initial value.
    pub free_init: bool,
}

impl Shape {
    pub fn combinational(inputs: usize, gates: usize, outputs: usize) -> Shape {
        Shape {
            inputs,
            gates,
            outputs,
            latches: 0,
            free_init: false,
        }
    }

    pub fn sequential(inputs: usize, gates: usize, outputs: usize, latches: usize) -> Shape {
        Shape {
            inputs,
            gates,
            outputs,
            latches,
            free_init: false,
        }
    }
}

const KINDS: [GateKind; 7] = [
    GateKind::And,
    GateKind::Or,
    GateKind::Nand,
    GateKind::Nor,
    GateKind::Xor,
    GateKind::Xnor,
    GateKind::Not,
];

/// A random circuit of the given shape, reproducible from `seed`.
///
/// Gate fan-in is drawn from earlier signals with a bias towards recent
/// ones, so the circuits are reasonably deep. Outputs are the last gates;
/// latch next-state signals are random gate outputs.
pub fn random_circuit(shape: Shape, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate(shape, &mut rng)
}

pub fn generate(shape: Shape, rng: &mut impl Rng) -> Circuit {
    assert!(shape.inputs + shape.latches > 0 && shape.gates > 0);
    let mut names: Vec<String> = Vec::new();
    let mut push = |n: String| {
        names.push(n);
        Var(names.len() as u32 - 1)
    };
    let inputs: Vec<Var> = (0..shape.inputs).map(|i| push(format!("x{}", i + 1))).collect();
    let states: Vec<Var> = (0..shape.latches).map(|i| push(format!("s{}", i + 1))).collect();
    let mut signals: Vec<Var> = inputs.iter().chain(&states).copied().collect();
    let mut gates = Vec::with_capacity(shape.gates);
    for i in 0..shape.gates {
        let out = push(format!("g{}", i + 1));
        let kind = if signals.len() < 2 {
            GateKind::Not
        } else {
            *KINDS.choose(rng).unwrap()
        };
        let arity = match kind {
            GateKind::Not => 1,
            _ if signals.len() >= 3 && rng.gen_bool(0.15) => 3,
            _ => 2,
        };
        let mut fanin: Vec<Var> = Vec::with_capacity(arity);
        while fanin.len() < arity {
            let window = signals.len().min(6);
            let v = if rng.gen_bool(0.6) {
                signals[signals.len() - 1 - rng.gen_range(0..window)]
            } else {
                *signals.choose(rng).unwrap()
            };
            if !fanin.contains(&v) {
                fanin.push(v);
            }
        }
        gates.push(Gate::new(kind, fanin, out));
        signals.push(out);
    }
    let gate_outs: Vec<Var> = gates.iter().map(|g| g.output).collect();
    let outputs: Vec<Var> = gate_outs.iter().rev().take(shape.outputs.min(gate_outs.len())).rev().copied().collect();
    let latches: Vec<Latch> = states
        .iter()
        .map(|&s| {
            let init = if shape.free_init && rng.gen_bool(0.2) {
                LatchInit::Free
            } else if rng.gen_bool(0.5) {
                LatchInit::One
            } else {
                LatchInit::Zero
            };
            Latch {
                state: s,
                next: *gate_outs.choose(rng).unwrap(),
                init,
            }
        })
        .collect();
    Circuit::from_parts("random", names, inputs, outputs, latches, gates).expect("generated netlist is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_well_formed() {
        let a = random_circuit(Shape::combinational(6, 12, 2), 7);
        let b = random_circuit(Shape::combinational(6, 12, 2), 7);
        assert_eq!(a, b);
        assert_eq!(a.inputs().len(), 6);
        assert_eq!(a.outputs().len(), 2);
        assert!(a.gates().len() >= 12);
        let s = random_circuit(Shape::sequential(2, 6, 1, 3), 1);
        assert_eq!(s.latches().len(), 3);
        assert!(s.simulate(&[true, false], Some(&[false, true, false])).is_ok());
    }
}
