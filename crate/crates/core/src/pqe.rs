//! Partial quantifier elimination.
//!
//! For `F* = G* ∧ F'` with quantified variables `Y` and free variables `W`,
//! a solution is a formula `Q(W)` with `∃Y (G* ∧ F') ≡ Q ∧ ∃Y F'`.
//!
//! Two engines are provided. [`pqe_oracle`] computes the canonical solution
//! row by row over all assignments to `W` and is limited by an enumeration
//! bound. [`pqe_cegar`] works without that bound: it repeatedly looks for a
//! row admitted by `F' ∧ Q` but refuted by `F*`, and adds a generalized
//! blocking clause for it.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::cnf::{Clause, CnfFormula, Lit, Role, SplitFormula};
use crate::netlist::Var;
use crate::sat::{self, Solver, Status};

pub const DEFAULT_ENUMERATION_BOUND: usize = 20;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PqeError {
    #[error("{vars} variables to enumerate exceed the bound of {bound}")]
    BoundExceeded { vars: usize, bound: usize },
    #[error("free and quantified variable sets overlap on {0}")]
    Overlap(Var),
}

/// Taking `G*` out of the scope of the quantifiers in `∃Y (G* ∧ F')`.
#[derive(Clone, Debug)]
pub struct PqeProblem {
    pub split: SplitFormula,
    /// Variables that stay unquantified, sorted.
    pub free: Vec<Var>,
    /// Every other variable of the formula.
    pub quantified: Vec<Var>,
}

impl PqeProblem {
    /// Problem with the given free variables; all remaining variables are quantified.
    pub fn new(split: SplitFormula, free: impl IntoIterator<Item = Var>) -> PqeProblem {
        let free: BTreeSet<Var> = free.into_iter().collect();
        let quantified = split.formula.var_map().vars().filter(|v| !free.contains(v)).collect();
        PqeProblem {
            split,
            free: free.into_iter().collect(),
            quantified,
        }
    }

    /// Combinational shape: inputs and outputs free, internal signals quantified.
    pub fn combinational(split: SplitFormula) -> PqeProblem {
        let vm = split.formula.var_map();
        let free: Vec<Var> = vm
            .vars()
            .filter(|v| matches!(vm.role(*v), Role::Input | Role::Output))
            .collect();
        PqeProblem::new(split, free)
    }

    /// Problem with explicit quantified variables; the rest are free.
    pub fn with_quantified(split: SplitFormula, quantified: &[Var]) -> Result<PqeProblem, PqeError> {
        let q: BTreeSet<Var> = quantified.iter().copied().collect();
        let free: Vec<Var> = split.formula.var_map().vars().filter(|v| !q.contains(v)).collect();
        if let Some(v) = free.iter().find(|v| q.contains(v)) {
            return Err(PqeError::Overlap(*v));
        }
        Ok(PqeProblem {
            split,
            free,
            quantified: q.into_iter().collect(),
        })
    }

    pub fn f_star(&self) -> &CnfFormula {
        &self.split.formula
    }

    pub fn f_prime(&self) -> CnfFormula {
        self.split.f_prime_formula()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PqeStats {
    pub sat_calls: u64,
    pub iterations: u64,
    pub generalization_steps: u64,
    pub dropped_literals: u64,
    pub noise_clauses: u64,
}

/// How a PQE run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// `Q` is a full solution.
    Complete,
    /// Stopped at the first clause not implied by the original formula.
    EarlyStop,
    /// Clause budget reached; `Q` is a partial solution.
    ClauseBudget,
    /// A SAT call ran out of conflicts; `Q` is a partial solution.
    ConflictBudget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PqeSolution {
    pub clauses: Vec<Clause>,
    pub termination: Termination,
    /// The defining equivalence was verified by enumeration.
    pub certificate_checked: bool,
    pub stats: PqeStats,
}

impl PqeSolution {
    /// Whether `clauses` is a full solution rather than a prefix of one.
    pub fn is_complete(&self) -> bool {
        self.termination == Termination::Complete
    }
}

/// `∃Y f` over a fixed ordering of the free variables.
///
/// Row `r` stands for the assignment giving `vars[i]` the value of bit `i` of `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    vars: Vec<Var>,
    rows: Vec<bool>,
}

impl TruthTable {
    pub fn new(vars: Vec<Var>, rows: Vec<bool>) -> TruthTable {
        assert_eq!(rows.len(), 1usize << vars.len());
        TruthTable { vars, rows }
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn rows(&self) -> &[bool] {
        &self.rows
    }

    pub fn get(&self, row: usize) -> bool {
        self.rows[row]
    }

    pub fn ones(&self) -> usize {
        self.rows.iter().filter(|b| **b).count()
    }

    /// Row index of a total assignment.
    pub fn row_of(&self, assignment: &[bool]) -> usize {
        self.vars
            .iter()
            .enumerate()
            .fold(0, |r, (i, v)| r | (assignment[v.index()] as usize) << i)
    }

    /// Literals describing row `row`.
    pub fn cube(&self, row: usize) -> Vec<Lit> {
        self.vars.iter().enumerate().map(|(i, v)| Lit::new(*v, row >> i & 1 == 1)).collect()
    }

    /// Sparse total assignment with only the free variables of `row` set.
    pub fn assignment(&self, row: usize, num_vars: usize) -> Vec<bool> {
        let mut a = vec![false; num_vars];
        for (i, v) in self.vars.iter().enumerate() {
            a[v.index()] = row >> i & 1 == 1;
        }
        a
    }

    /// `self ⇒ other`, rowwise.
    pub fn implies(&self, other: &TruthTable) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| !a || *b)
    }

    /// First row with `self = 1` and `other = 0`.
    pub fn counterexample(&self, other: &TruthTable) -> Option<usize> {
        (0..self.rows.len()).find(|&r| self.rows[r] && !other.rows[r])
    }
}

fn check_bound(n: usize, bound: usize) -> Result<(), PqeError> {
    if n > bound {
        Err(PqeError::BoundExceeded { vars: n, bound })
    } else {
        Ok(())
    }
}

/// Quantifier elimination by enumeration: row `r` is 1 iff `f` is
/// satisfiable together with the assignment `r` to `free`.
///
/// Rows are discovered by projected model enumeration: every model found is
/// projected onto `free` and blocked, until the solver reports UNSAT.
pub fn qe_enumerate(f: &CnfFormula, free: &[Var], bound: usize) -> Result<TruthTable, PqeError> {
    check_bound(free.len(), bound)?;
    let mut table = TruthTable::new(free.to_vec(), vec![false; 1 << free.len()]);
    let mut s = Solver::from_formula(f);
    s.reserve_vars(f.num_vars());
    while s.solve(&[]) == Status::Sat {
        let row = table.row_of(s.model());
        table.rows[row] = true;
        let block: Vec<Lit> = table.cube(row).into_iter().map(|l| !l).collect();
        if !s.add_clause(&block) {
            break;
        }
    }
    Ok(table)
}

/// Clause falsified exactly by row `row` of a table over `vars`.
fn row_clause(vars: &[Var], row: usize) -> Clause {
    Clause::new(vars.iter().enumerate().map(|(i, v)| Lit::new(*v, row >> i & 1 == 0))).unwrap()
}

/// Drops clauses subsumed by an earlier-kept or shorter clause.
pub fn remove_subsumed(q: Vec<Clause>) -> Vec<Clause> {
    let mut order: Vec<usize> = (0..q.len()).collect();
    order.sort_by_key(|&i| (q[i].len(), i));
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        if !kept.iter().any(|&k| q[k].subsumes(&q[i])) {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    kept.into_iter().map(|i| q[i].clone()).collect()
}

/// Removes every clause implied by `f_prime` alone; what remains is still a
/// solution.
pub fn noise_filter(q: &[Clause], f_prime: &CnfFormula) -> Vec<Clause> {
    if q.is_empty() {
        return Vec::new();
    }
    let mut s = Solver::from_formula(f_prime);
    q.iter().filter(|c| !sat::solver_implies(&mut s, c)).cloned().collect()
}

/// Checks `∃Y F* ≡ Q ∧ ∃Y F'` on every row of the free variables.
pub fn verify_solution(p: &PqeProblem, q: &[Clause], bound: usize) -> Result<bool, PqeError> {
    let star = qe_enumerate(p.f_star(), &p.free, bound)?;
    let prime = qe_enumerate(&p.f_prime(), &p.free, bound)?;
    Ok(equivalent_on_rows(&star, &prime, q, p.f_star().num_vars()))
}

fn equivalent_on_rows(star: &TruthTable, prime: &TruthTable, q: &[Clause], num_vars: usize) -> bool {
    (0..star.rows.len()).all(|r| {
        let a = star.assignment(r, num_vars);
        let q_val = q.iter().all(|c| c.eval(&a));
        star.rows[r] == (q_val && prime.rows[r])
    })
}

/// Canonical enumerated solution `Q ≡ (∃Y F*) ∨ ¬(∃Y F')`: one clause per row
/// admitted by `F'` and refuted by `F*`, noise-filtered and subsumption-free.
pub fn pqe_oracle(p: &PqeProblem, bound: usize) -> Result<PqeSolution, PqeError> {
    let star = qe_enumerate(p.f_star(), &p.free, bound)?;
    let prime = qe_enumerate(&p.f_prime(), &p.free, bound)?;
    let raw: Vec<Clause> = (0..star.rows.len())
        .filter(|&r| prime.rows[r] && !star.rows[r])
        .map(|r| row_clause(&p.free, r))
        .collect();
    let mut stats = PqeStats {
        iterations: raw.len() as u64,
        ..PqeStats::default()
    };
    let filtered = noise_filter(&raw, &p.f_prime());
    stats.noise_clauses = (raw.len() - filtered.len()) as u64;
    let clauses = remove_subsumed(filtered);
    let checked = equivalent_on_rows(&star, &prime, &clauses, p.f_star().num_vars());
    Ok(PqeSolution {
        clauses,
        termination: Termination::Complete,
        certificate_checked: checked,
        stats,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PqeConfig {
    /// Return at the first clause not implied by the original formula.
    pub early_stop: bool,
    /// Stop once this many clauses have been generated.
    pub clause_budget: Option<usize>,
    /// Conflict limit for each SAT call.
    pub conflict_budget: Option<u64>,
    /// Remove clauses implied by `F'` alone from the result.
    pub noise_filter: bool,
    /// Verify complete results by enumeration when within `enumeration_bound`.
    pub oracle_check: bool,
    pub enumeration_bound: usize,
}

impl Default for PqeConfig {
    fn default() -> Self {
        PqeConfig {
            early_stop: false,
            clause_budget: None,
            conflict_budget: None,
            noise_filter: true,
            oracle_check: false,
            enumeration_bound: DEFAULT_ENUMERATION_BOUND,
        }
    }
}

/// Counterexample-guided PQE.
///
/// `Q` starts empty. Each round asks for a model of `F' ∧ Q` outside the rows
/// already confirmed by `F*`. If `F*` is unsatisfiable under the model's free
/// values, the refuting assumptions (an UNSAT core, then greedy literal
/// dropping in ascending variable order) give a clause implied by `F*` that
/// excludes the row; it is added to `Q`. Otherwise the row is confirmed and
/// excluded from the search. When no candidate row is left,
/// `∃Y (G* ∧ F') ≡ Q ∧ ∃Y F'`.
pub fn pqe_cegar(p: &PqeProblem, cfg: &PqeConfig) -> PqeSolution {
    let mut stats = PqeStats::default();
    let f_prime = p.f_prime();
    let mut search = Solver::from_formula(&f_prime);
    let mut star = Solver::from_formula(p.f_star());
    search.set_conflict_budget(cfg.conflict_budget);
    star.set_conflict_budget(cfg.conflict_budget);
    let mut original = cfg.early_stop.then(|| {
        let mut s = Solver::from_formula(&p.split.original());
        s.set_conflict_budget(cfg.conflict_budget);
        s
    });
    let mut q: Vec<Clause> = Vec::new();

    let finish = |q: Vec<Clause>, termination: Termination, mut stats: PqeStats| -> PqeSolution {
        let clauses = if cfg.noise_filter && termination != Termination::EarlyStop {
            let before = q.len();
            let kept = noise_filter(&q, &f_prime);
            stats.noise_clauses = (before - kept.len()) as u64;
            remove_subsumed(kept)
        } else {
            q
        };
        let certificate_checked = termination == Termination::Complete
            && cfg.oracle_check
            && verify_solution(p, &clauses, cfg.enumeration_bound).unwrap_or(false);
        PqeSolution {
            clauses,
            termination,
            certificate_checked,
            stats,
        }
    };

    loop {
        if cfg.clause_budget.is_some_and(|b| q.len() >= b) {
            return finish(q, Termination::ClauseBudget, stats);
        }
        stats.iterations += 1;
        stats.sat_calls += 1;
        match search.solve(&[]) {
            Status::Unsat => return finish(q, Termination::Complete, stats),
            Status::BudgetExceeded => return finish(q, Termination::ConflictBudget, stats),
            Status::Sat => {}
        }
        let m = search.model().to_vec();
        let cube: Vec<Lit> = p.free.iter().map(|v| Lit::new(*v, m[v.index()])).collect();
        stats.sat_calls += 1;
        match star.solve(&cube) {
            Status::BudgetExceeded => return finish(q, Termination::ConflictBudget, stats),
            Status::Sat => {
                // Row consistent with F*: exclude it from the search only.
                let block: Vec<Lit> = cube.iter().map(|l| !*l).collect();
                search.add_clause(&block);
                continue;
            }
            Status::Unsat => {}
        }
        let mut kept: Vec<Lit> = star.core().to_vec();
        kept.sort();
        stats.dropped_literals += (cube.len() - kept.len()) as u64;
        let snapshot = kept.clone();
        for lit in snapshot {
            if !kept.contains(&lit) {
                continue;
            }
            let trial: Vec<Lit> = kept.iter().copied().filter(|l| *l != lit).collect();
            stats.generalization_steps += 1;
            stats.sat_calls += 1;
            if star.solve(&trial) == Status::Unsat {
                let before = kept.len();
                let core: BTreeSet<Lit> = star.core().iter().copied().collect();
                kept = trial.into_iter().filter(|l| core.contains(l)).collect();
                stats.dropped_literals += (before - kept.len()) as u64;
            }
        }
        let clause = Clause::new(kept.iter().map(|l| !*l)).expect("cube has distinct variables");
        search.add_clause(clause.lits());
        q.push(clause);
        if let Some(s) = original.as_mut() {
            stats.sat_calls += 1;
            let c = q.last().unwrap();
            let negated: Vec<Lit> = c.lits().iter().map(|l| !*l).collect();
            match s.solve(&negated) {
                Status::Sat => return finish(q, Termination::EarlyStop, stats),
                Status::BudgetExceeded => return finish(q, Termination::ConflictBudget, stats),
                Status::Unsat => {}
            }
        }
    }
}

/// Whether every assignment to `inputs` extends to a model of `f_star`.
pub fn check_totality(f_star: &CnfFormula, inputs: &[Var], bound: usize) -> Result<bool, PqeError> {
    check_bound(inputs.len(), bound)?;
    let mut s = Solver::from_formula(f_star);
    for row in 0..1usize << inputs.len() {
        let cube: Vec<Lit> = inputs.iter().enumerate().map(|(i, v)| Lit::new(*v, row >> i & 1 == 1)).collect();
        if s.solve(&cube) != Status::Sat {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{encode_circuit, encode_gate, replace_group};
    use crate::netlist::{parse_netlist, Format, Gate, GateKind};

    const TOY1: &str = "input x1 x2 x3; y = AND(x1,x2); z = OR(y,x3); output z;";
    const AND1: &str = "input v1 v2; v3 = AND(v1,v2); output v3;";

    fn toy1_and_to_or() -> (CnfFormula, PqeProblem) {
        let c = parse_netlist(TOY1, Format::Simple).unwrap();
        let f = encode_circuit(&c);
        let rec = f.gate_record(0, 0).unwrap();
        let g_star = encode_gate(&Gate::new(GateKind::Or, rec.inputs.clone(), rec.output));
        let split = replace_group(&f, &f.group(0, 0), g_star).unwrap();
        (f, PqeProblem::combinational(split))
    }

    fn same_function(p: &PqeProblem, a: &[Clause], b: &[Clause]) -> bool {
        let prime = qe_enumerate(&p.f_prime(), &p.free, 20).unwrap();
        (0..prime.rows().len()).all(|r| {
            let asg = prime.assignment(r, p.f_star().num_vars());
            let va = a.iter().all(|c| c.eval(&asg));
            let vb = b.iter().all(|c| c.eval(&asg));
            !prime.get(r) || va == vb
        })
    }

    #[test]
    fn qe_of_and_gate_is_its_truth_table() {
        let f = encode_circuit(&parse_netlist(AND1, Format::Simple).unwrap());
        let vars: Vec<Var> = (0..3).map(Var).collect();
        let t = qe_enumerate(&f, &vars, 20).unwrap();
        assert_eq!(t.ones(), 4);
        for r in 0..8 {
            let (a, b, c) = (r & 1 == 1, r & 2 == 2, r & 4 == 4);
            assert_eq!(t.get(r), c == (a && b));
        }
    }

    #[test]
    fn qe_toy1_matches_simulation() {
        let c = parse_netlist(TOY1, Format::Simple).unwrap();
        let f = encode_circuit(&c);
        let free = vec![c.find("x1").unwrap(), c.find("x2").unwrap(), c.find("x3").unwrap(), c.find("z").unwrap()];
        let t = qe_enumerate(&f, &free, 20).unwrap();
        for r in 0..16 {
            let x = [r & 1 == 1, r & 2 == 2, r & 4 == 4];
            let z = r & 8 == 8;
            assert_eq!(t.get(r), c.outputs_for(&x).unwrap()[0] == z);
        }
    }

    #[test]
    fn qe_unsat_is_all_zero() {
        let mut f = CnfFormula::with_vars(2);
        f.push(Clause::new([Lit::pos(Var(0))]).unwrap()).unwrap();
        f.push(Clause::new([Lit::neg(Var(0))]).unwrap()).unwrap();
        let t = qe_enumerate(&f, &[Var(0), Var(1)], 20).unwrap();
        assert_eq!(t.ones(), 0);
        assert_eq!(
            qe_enumerate(&f, &[Var(0), Var(1)], 1).unwrap_err(),
            PqeError::BoundExceeded { vars: 2, bound: 1 }
        );
    }

    #[test]
    fn oracle_toy1_and_to_or() {
        let (f, p) = toy1_and_to_or();
        let sol = pqe_oracle(&p, 20).unwrap();
        assert!(sol.certificate_checked);
        assert!(!sol.clauses.is_empty());
        // (x1=1, x2=0, x3=0, z=0) falsifies Q
        let c = parse_netlist(TOY1, Format::Simple).unwrap();
        let mut a = vec![false; f.num_vars()];
        a[c.find("x1").unwrap().index()] = true;
        assert!(sol.clauses.iter().any(|cl| !cl.eval(&a)));
        assert!(sat::break_implication(&f, &sol.clauses).is_some());
    }

    #[test]
    fn cegar_agrees_with_oracle_on_toy1() {
        let (_, p) = toy1_and_to_or();
        let oracle = pqe_oracle(&p, 20).unwrap();
        let cfg = PqeConfig {
            oracle_check: true,
            ..PqeConfig::default()
        };
        let sol = pqe_cegar(&p, &cfg);
        assert!(sol.is_complete());
        assert!(sol.certificate_checked);
        assert!(same_function(&p, &sol.clauses, &oracle.clauses));
        // every generated clause is implied by F*
        for c in &sol.clauses {
            assert!(sat::implies(p.f_star(), c));
        }
    }

    #[test]
    fn identity_replacement_yields_true_property() {
        let c = parse_netlist(TOY1, Format::Simple).unwrap();
        let f = encode_circuit(&c);
        for gate in 0..2 {
            let g = f.group(gate, 0);
            let g_star: Vec<Clause> = g.iter().map(|&i| f.clause(i).clone()).collect();
            let p = PqeProblem::combinational(replace_group(&f, &g, g_star).unwrap());
            let sol = pqe_cegar(&p, &PqeConfig::default());
            assert!(verify_solution(&p, &sol.clauses, 20).unwrap());
            assert!(sat::break_implication(&f, &sol.clauses).is_none());
        }
    }

    #[test]
    fn identity_on_unobservable_gate_is_empty() {
        let c = parse_netlist("input a b; d = AND(a,b); z = OR(a,b); output z;", Format::Simple).unwrap();
        let f = encode_circuit(&c);
        let g = f.group(0, 0);
        let g_star: Vec<Clause> = g.iter().map(|&i| f.clause(i).clone()).collect();
        let p = PqeProblem::combinational(replace_group(&f, &g, g_star).unwrap());
        assert!(pqe_cegar(&p, &PqeConfig::default()).clauses.is_empty());
        assert!(pqe_oracle(&p, 20).unwrap().clauses.is_empty());
    }

    #[test]
    fn stuck_at_zero_on_lone_and() {
        let f = encode_circuit(&parse_netlist(AND1, Format::Simple).unwrap());
        let c3 = Clause::new([Lit::neg(Var(0)), Lit::neg(Var(1)), Lit::neg(Var(2))]).unwrap();
        let p = PqeProblem::combinational(replace_group(&f, &[2], vec![c3]).unwrap());
        let sol = pqe_oracle(&p, 20).unwrap();
        assert!(sol.certificate_checked);
        let cegar = pqe_cegar(&p, &PqeConfig::default());
        assert_eq!(cegar.clauses.len(), 1);
        assert_eq!(cegar.clauses[0].lits(), &[Lit::neg(Var(2))]);
        let b = sat::break_implication(&f, &cegar.clauses).unwrap();
        assert!(b.model[0] && b.model[1]);
    }

    #[test]
    fn noise_filter_cases() {
        let (_, p) = toy1_and_to_or();
        let f_prime = p.f_prime();
        assert!(noise_filter(&[], &f_prime).is_empty());
        // clauses implied by F' alone are all removed
        let implied: Vec<Clause> = f_prime.clauses().to_vec();
        assert!(noise_filter(&implied, &f_prime).is_empty());
        // raw row clauses, filtered, are still a solution
        let star = qe_enumerate(p.f_star(), &p.free, 20).unwrap();
        let prime = qe_enumerate(&f_prime, &p.free, 20).unwrap();
        let mut raw: Vec<Clause> = (0..star.rows().len())
            .filter(|&r| !star.get(r))
            .map(|r| row_clause(&p.free, r))
            .collect();
        raw.extend(implied);
        let filtered = noise_filter(&raw, &f_prime);
        assert!(filtered.len() < raw.len());
        assert!(verify_solution(&p, &filtered, 20).unwrap());
        assert_eq!(filtered.len(), (0..star.rows().len()).filter(|&r| prime.get(r) && !star.get(r)).count());
    }

    #[test]
    fn clause_budget_gives_partial_result() {
        let (_, p) = toy1_and_to_or();
        let sol = pqe_cegar(
            &p,
            &PqeConfig {
                clause_budget: Some(0),
                oracle_check: true,
                ..PqeConfig::default()
            },
        );
        assert_eq!(sol.termination, Termination::ClauseBudget);
        assert!(!sol.certificate_checked);
        assert!(!sol.is_complete());
    }

    #[test]
    fn early_stop_returns_non_implied_clause() {
        let (f, p) = toy1_and_to_or();
        let sol = pqe_cegar(
            &p,
            &PqeConfig {
                early_stop: true,
                ..PqeConfig::default()
            },
        );
        assert_eq!(sol.termination, Termination::EarlyStop);
        assert!(!sat::implies(&f, sol.clauses.last().unwrap()));
    }

    #[test]
    fn totality() {
        let c = parse_netlist(TOY1, Format::Simple).unwrap();
        let f = encode_circuit(&c);
        assert!(check_totality(&f, c.inputs(), 20).unwrap());
        let mut g = f.clone();
        g.push(Clause::new([Lit::neg(c.find("x1").unwrap())]).unwrap()).unwrap();
        assert!(!check_totality(&g, c.inputs(), 20).unwrap());
        let and = encode_circuit(&parse_netlist(AND1, Format::Simple).unwrap());
        let c3 = Clause::new([Lit::neg(Var(0)), Lit::neg(Var(1)), Lit::neg(Var(2))]).unwrap();
        let sa0 = replace_group(&and, &[2], vec![c3]).unwrap();
        assert!(check_totality(&sa0.formula, &[Var(0), Var(1)], 20).unwrap());
    }

    #[test]
    fn subsumption_removal() {
        let a = Clause::new([Lit::pos(Var(0))]).unwrap();
        let ab = Clause::new([Lit::pos(Var(0)), Lit::pos(Var(1))]).unwrap();
        let b = Clause::new([Lit::neg(Var(1))]).unwrap();
        assert_eq!(remove_subsumed(vec![ab.clone(), a.clone(), b.clone(), a.clone()]), vec![a, b]);
    }
}
