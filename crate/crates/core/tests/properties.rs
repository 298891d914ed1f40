use fprop::cnf::{encode_circuit, export_dimacs, import_dimacs};
use fprop::mutate::{self, MutationKind, Policy};
use fprop::netlist::{emit_netlist, parse_netlist, Circuit, Format};
use fprop::pqe::{pqe_cegar, pqe_oracle, verify_solution, PqeConfig, PqeProblem};
use fprop::random::{random_circuit, Shape};
use proptest::prelude::*;

fn small_circuit() -> impl Strategy<Value = Circuit> {
    (2usize..=6, 2usize..=10, 1usize..=2, any::<u64>())
        .prop_map(|(i, g, o, seed)| random_circuit(Shape::combinational(i, g, o), seed))
}

fn bits(r: usize, n: usize) -> Vec<bool> {
    (0..n).map(|i| r >> i & 1 == 1).collect()
}

fn same_function(a: &Circuit, b: &Circuit) -> bool {
    let n = a.inputs().len();
    n == b.inputs().len() && (0..1usize << n).all(|r| a.outputs_for(&bits(r, n)).unwrap() == b.outputs_for(&bits(r, n)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dimacs_round_trip(c in small_circuit()) {
        let f = encode_circuit(&c);
        let g = import_dimacs(&export_dimacs(&f)).unwrap();
        prop_assert_eq!(f.num_vars(), g.num_vars());
        let a: Vec<_> = f.clauses().iter().map(|c| c.key()).collect();
        let b: Vec<_> = g.clauses().iter().map(|c| c.key()).collect();
        prop_assert_eq!(a, b);
        prop_assert_eq!(f.inputs(), g.inputs());
        prop_assert_eq!(f.outputs(), g.outputs());
    }

    #[test]
    fn netlist_round_trip(c in small_circuit()) {
        for format in [Format::Simple, Format::AigerAscii] {
            let back = parse_netlist(&emit_netlist(&c, format), format).unwrap();
            prop_assert!(same_function(&c, &back));
        }
    }

    #[test]
    fn encoding_is_satisfied_by_simulation(c in small_circuit(), r in any::<usize>()) {
        let f = encode_circuit(&c);
        let x = bits(r, c.inputs().len());
        let a = c.evaluate(&x, None).unwrap();
        prop_assert!(f.eval(&a));
    }

    #[test]
    fn cegar_agrees_with_oracle(c in small_circuit(), pick in any::<usize>()) {
        let f = encode_circuit(&c);
        let ms = mutate::enumerate_mutations(&f, 0, Policy::Mixed);
        let m = &ms[pick % ms.len()];
        let p = PqeProblem::combinational(m.apply(&f).unwrap());
        let sol = pqe_cegar(&p, &PqeConfig::default());
        prop_assert!(sol.is_complete());
        prop_assert!(verify_solution(&p, &sol.clauses, 20).unwrap());
        let oracle = pqe_oracle(&p, 20).unwrap();
        prop_assert!(verify_solution(&p, &oracle.clauses, 20).unwrap());
    }

    #[test]
    fn clause_flip_negates_one_literal(c in small_circuit(), i in any::<usize>(), j in any::<usize>()) {
        let f = encode_circuit(&c);
        let ci = i % f.len();
        let lj = j % f.clause(ci).len();
        let m = mutate::clause_flip(&f, ci, lj).unwrap();
        let is_flip = matches!(m.kind, MutationKind::ClauseFlip { .. });
        prop_assert!(is_flip);
        let before = f.clause(ci).lits();
        if m.identity {
            return Ok(());
        }
        prop_assert_eq!(m.group.as_slice(), &[ci][..]);
        let after = m.g_star[0].lits();
        prop_assert!(after.contains(&!before[lj]));
        prop_assert!(!after.contains(&before[lj]));
        for (k, l) in before.iter().enumerate() {
            if k != lj {
                prop_assert!(after.contains(l));
            }
        }
    }

    #[test]
    fn stuck_at_matches_faulty_circuit(c in small_circuit(), g in any::<usize>(), v in any::<bool>()) {
        let f = encode_circuit(&c);
        let g = g % c.gates().len();
        let m = mutate::stuck_at(&f, g, 0, v).unwrap();
        let faulty = m.faulty_circuit(&c).unwrap().unwrap();
        prop_assert!(same_function(&faulty, &c.with_stuck_at(g, v)));
    }
}
