//! A small CDCL SAT solver with assumptions, plus the implication queries
//! built on top of it.
//!
//! The solver is MiniSat-shaped: two watched literals, first-UIP learning,
//! VSIDS branching, phase saving, Luby restarts and LBD-based learnt clause
//! deletion. Assumptions are decided first, one per decision level; when one
//! of them is refuted the conflict is traced back to the responsible
//! assumptions, which form the returned core.
//!
//! There is no randomness: activity ties go to the lowest variable id and the
//! default phase is `false`, so runs are reproducible.

use serde::Serialize;

use crate::cnf::{Clause, CnfFormula, Lit};
use crate::netlist::Var;

const UNDEF: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Sat,
    Unsat,
    /// The conflict budget ran out before a decision was reached.
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatResult {
    pub status: Status,
    /// Total assignment, present iff `status` is `Sat`.
    pub model: Option<Vec<bool>>,
    /// Assumptions sufficient for unsatisfiability; empty if the formula
    /// itself is unsatisfiable.
    pub core: Vec<Lit>,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        self.status == Status::Sat
    }

    pub fn is_unsat(&self) -> bool {
        self.status == Status::Unsat
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolverStats {
    pub solves: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

#[derive(Clone, Copy, Debug)]
struct Watch {
    cref: u32,
    blocker: Lit,
}

#[derive(Clone, Debug)]
struct StoredClause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
}

/// Max-heap of variables ordered by activity, lowest id first on ties.
#[derive(Clone, Debug, Default)]
struct VarOrder {
    heap: Vec<u32>,
    pos: Vec<Option<usize>>,
}

impl VarOrder {
    fn better(act: &[f64], a: u32, b: u32) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn grow(&mut self, n: usize) {
        self.pos.resize(n, None);
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize].is_some()
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v as usize] = Some(i);
        self.up(i, act);
    }

    fn bumped(&mut self, v: u32, act: &[f64]) {
        if let Some(i) = self.pos[v as usize] {
            self.up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap.swap_remove(0);
        self.pos[top as usize] = None;
        if !self.heap.is_empty() {
            self.pos[self.heap[0] as usize] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i] as usize] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let child = if r < self.heap.len() && Self::better(act, self.heap[r], self.heap[l]) { r } else { l };
            if !Self::better(act, self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i] as usize] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }
}

#[derive(Clone, Debug)]
pub struct Solver {
    clauses: Vec<StoredClause>,
    watches: Vec<Vec<Watch>>,
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<Option<u32>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    order: VarOrder,
    phase: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    model: Vec<bool>,
    core: Vec<Lit>,
    budget: Option<u64>,
    num_learnts: usize,
    max_learnts: usize,
    stats: SolverStats,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

fn luby(y: f64, mut x: u64) -> f64 {
    let (mut size, mut seq) = (1u64, 0u32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq as i32)
}

impl Solver {
    pub fn new() -> Solver {
        Solver {
            clauses: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            order: VarOrder::default(),
            phase: Vec::new(),
            seen: Vec::new(),
            ok: true,
            model: Vec::new(),
            core: Vec::new(),
            budget: None,
            num_learnts: 0,
            max_learnts: 2000,
            stats: SolverStats::default(),
        }
    }

    /// Solver loaded with every clause of `f`.
    pub fn from_formula(f: &CnfFormula) -> Solver {
        let mut s = Solver::new();
        s.reserve_vars(f.num_vars());
        for c in f.clauses() {
            s.add_clause(c.lits());
        }
        s
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    pub fn reserve_vars(&mut self, n: usize) {
        let old = self.assigns.len();
        if n <= old {
            return;
        }
        self.assigns.resize(n, UNDEF);
        self.level.resize(n, 0);
        self.reason.resize(n, None);
        self.activity.resize(n, 0.0);
        self.phase.resize(n, false);
        self.seen.resize(n, false);
        self.watches.resize(2 * n, Vec::new());
        self.order.grow(n);
        for v in old..n {
            self.order.insert(v as u32, &self.activity);
        }
    }

    pub fn new_var(&mut self) -> Var {
        let v = self.num_vars();
        self.reserve_vars(v + 1);
        Var(v as u32)
    }

    /// Per-call conflict limit; `None` means unlimited.
    pub fn set_conflict_budget(&mut self, budget: Option<u64>) {
        self.budget = budget;
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    #[inline]
    fn value(&self, l: Lit) -> Option<bool> {
        lit_value(&self.assigns, l)
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, l: Lit, reason: Option<u32>) {
        let v = l.var().index();
        self.assigns[v] = l.is_positive() as u8;
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Adds a clause. Returns `false` once the formula is known unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        debug_assert_eq!(self.decision_level(), 0);
        if let Some(max) = lits.iter().map(|l| l.var().index()).max() {
            self.reserve_vars(max + 1);
        }
        let mut c: Vec<Lit> = Vec::with_capacity(lits.len());
        for &l in lits {
            match self.value(l) {
                Some(true) => return true,
                Some(false) => continue,
                None => {}
            }
            if c.contains(&!l) {
                return true;
            }
            if !c.contains(&l) {
                c.push(l);
            }
        }
        match c.len() {
            0 => {
                self.ok = false;
            }
            1 => {
                self.enqueue(c[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.attach(c, false, 0);
            }
        }
        self.ok
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[(!lits[0]).code()].push(Watch { cref, blocker: lits[1] });
        self.watches[(!lits[1]).code()].push(Watch { cref, blocker: lits[0] });
        if learnt {
            self.num_learnts += 1;
        }
        self.clauses.push(StoredClause {
            lits,
            learnt,
            deleted: false,
            lbd,
        });
        cref
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if lit_value(&self.assigns, w.blocker) == Some(true) {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let sc = &mut self.clauses[w.cref as usize];
                if sc.deleted {
                    continue;
                }
                let c = &mut sc.lits;
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                let watch = Watch { cref: w.cref, blocker: first };
                if first != w.blocker && lit_value(&self.assigns, first) == Some(true) {
                    ws[j] = watch;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.len() {
                    if lit_value(&self.assigns, c[k]) != Some(false) {
                        c.swap(1, k);
                        self.watches[(!c[1]).code()].push(watch);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = watch;
                j += 1;
                if lit_value(&self.assigns, first) == Some(false) {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    let v = first.var().index();
                    self.assigns[v] = first.is_positive() as u8;
                    self.level[v] = self.trail_lim.len() as u32;
                    self.reason[v] = Some(w.cref);
                    self.trail.push(first);
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.bumped(v as u32, &self.activity);
    }

    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, usize, u32) {
        let mut learnt = vec![Lit::from_code(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let current = self.decision_level() as u32;
        loop {
            let lits = self.clauses[confl as usize].lits.clone();
            for q in lits {
                if Some(q) == p {
                    continue;
                }
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] == current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            self.seen[lit.var().index()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var().index()].expect("implied literal has a reason");
        }
        learnt[0] = !p.unwrap();

        // Drop literals whose reason is already covered by the clause.
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(k, l)| {
                if k == 0 {
                    return true;
                }
                match self.reason[l.var().index()] {
                    None => true,
                    Some(r) => self.clauses[r as usize].lits[1..]
                        .iter()
                        .any(|q| !self.seen[q.var().index()] && self.level[q.var().index()] > 0),
                }
            })
            .collect();
        for l in &learnt[1..] {
            self.seen[l.var().index()] = false;
        }
        let mut learnt: Vec<Lit> = learnt.into_iter().zip(keep).filter(|(_, k)| *k).map(|(l, _)| l).collect();

        let mut bt = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var().index()] > self.level[learnt[max_i].var().index()] {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            bt = self.level[learnt[1].var().index()] as usize;
        }
        let mut levels: Vec<u32> = learnt.iter().map(|l| self.level[l.var().index()]).collect();
        levels.sort_unstable();
        levels.dedup();
        (learnt, bt, levels.len() as u32)
    }

    /// Assumptions responsible for `a` being false.
    fn analyze_final(&mut self, a: Lit) {
        self.core.clear();
        self.core.push(a);
        if self.decision_level() == 0 {
            return;
        }
        self.seen[a.var().index()] = true;
        for i in (self.trail_lim[0]..self.trail.len()).rev() {
            let x = self.trail[i].var().index();
            if !self.seen[x] {
                continue;
            }
            match self.reason[x] {
                None => {
                    debug_assert!(self.level[x] > 0);
                    self.core.push(self.trail[i]);
                }
                Some(r) => {
                    for q in &self.clauses[r as usize].lits[1..] {
                        if self.level[q.var().index()] > 0 {
                            self.seen[q.var().index()] = true;
                        }
                    }
                }
            }
            self.seen[x] = false;
        }
        self.seen[a.var().index()] = false;
    }

    fn cancel_until(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var().index();
            self.assigns[v] = UNDEF;
            self.reason[v] = None;
            self.phase[v] = l.is_positive();
            self.order.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.assigns[v as usize] == UNDEF {
                self.stats.decisions += 1;
                return Some(Lit::new(Var(v), self.phase[v as usize]));
            }
        }
        None
    }

    fn locked(&self, cref: usize) -> bool {
        let l = self.clauses[cref].lits[0];
        self.reason[l.var().index()] == Some(cref as u32) && self.value(l) == Some(true)
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                c.learnt && !c.deleted && c.lits.len() > 2 && c.lbd > 2
            })
            .filter(|&i| !self.locked(i))
            .collect();
        cands.sort_by_key(|&i| std::cmp::Reverse((self.clauses[i].lbd, self.clauses[i].lits.len(), i)));
        for &i in cands.iter().take(cands.len() / 2) {
            self.clauses[i].deleted = true;
            self.clauses[i].lits = Vec::new();
            self.num_learnts -= 1;
        }
        self.max_learnts += self.max_learnts / 10;
    }

    fn search(&mut self, assumptions: &[Lit], restart_after: u64, deadline: Option<u64>) -> Option<bool> {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                conflicts += 1;
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(false);
                }
                let (learnt, bt, lbd) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let first = learnt[0];
                    let cref = self.attach(learnt, true, lbd);
                    self.enqueue(first, Some(cref));
                }
                self.var_inc /= 0.95;
            } else {
                if conflicts >= restart_after || deadline.is_some_and(|d| self.stats.conflicts >= d) {
                    self.cancel_until(0);
                    return None;
                }
                if self.num_learnts >= self.max_learnts + self.trail.len() {
                    self.reduce_db();
                }
                let mut next = None;
                while self.decision_level() < assumptions.len() {
                    let a = assumptions[self.decision_level()];
                    match self.value(a) {
                        Some(true) => self.trail_lim.push(self.trail.len()),
                        Some(false) => {
                            self.analyze_final(a);
                            return Some(false);
                        }
                        None => {
                            next = Some(a);
                            break;
                        }
                    }
                }
                let next = match next.or_else(|| self.pick_branch()) {
                    Some(l) => l,
                    None => return Some(true),
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(next, None);
            }
        }
    }

    /// Decides the clause set under `assumptions`.
    pub fn solve(&mut self, assumptions: &[Lit]) -> Status {
        self.stats.solves += 1;
        self.core.clear();
        self.model.clear();
        if let Some(max) = assumptions.iter().map(|l| l.var().index()).max() {
            self.reserve_vars(max + 1);
        }
        if !self.ok {
            return Status::Unsat;
        }
        let deadline = self.budget.map(|b| self.stats.conflicts + b);
        let mut round = 0u64;
        loop {
            let restart_after = (luby(2.0, round) * 100.0) as u64;
            match self.search(assumptions, restart_after, deadline) {
                Some(true) => {
                    self.model = self.assigns.iter().map(|&a| a == 1).collect();
                    self.cancel_until(0);
                    return Status::Sat;
                }
                Some(false) => {
                    self.cancel_until(0);
                    return Status::Unsat;
                }
                None => {
                    if deadline.is_some_and(|d| self.stats.conflicts >= d) {
                        return Status::BudgetExceeded;
                    }
                    self.stats.restarts += 1;
                    round += 1;
                }
            }
        }
    }

    /// Model of the last successful `solve`.
    pub fn model(&self) -> &[bool] {
        &self.model
    }

    /// Core of the last unsatisfiable `solve`, a subset of its assumptions.
    pub fn core(&self) -> &[Lit] {
        &self.core
    }

    /// Whether the clause set is unsatisfiable without assumptions.
    pub fn is_inconsistent(&self) -> bool {
        !self.ok
    }

    pub fn result(&self, status: Status) -> SatResult {
        SatResult {
            status,
            model: (status == Status::Sat).then(|| self.model.clone()),
            core: if status == Status::Unsat { self.core.clone() } else { Vec::new() },
        }
    }
}

#[inline]
fn lit_value(assigns: &[u8], l: Lit) -> Option<bool> {
    match assigns[l.var().index()] {
        UNDEF => None,
        a => Some((a == 1) == l.is_positive()),
    }
}

/// Decides `f` under `assumptions`. Models are total over the formula's variables.
pub fn solve(f: &CnfFormula, assumptions: &[Lit]) -> SatResult {
    solve_with_budget(f, assumptions, None)
}

pub fn solve_with_budget(f: &CnfFormula, assumptions: &[Lit], budget: Option<u64>) -> SatResult {
    let mut s = Solver::from_formula(f);
    s.set_conflict_budget(budget);
    let status = s.solve(assumptions);
    s.result(status)
}

/// `f ⇒ c`, i.e. `f ∧ ¬c` is unsatisfiable.
pub fn implies(f: &CnfFormula, c: &Clause) -> bool {
    let negated: Vec<Lit> = c.lits().iter().map(|l| !*l).collect();
    solve(f, &negated).is_unsat()
}

/// Like [`implies`], reusing a loaded solver.
pub fn solver_implies(s: &mut Solver, c: &Clause) -> bool {
    let negated: Vec<Lit> = c.lits().iter().map(|l| !*l).collect();
    s.solve(&negated) == Status::Unsat
}

/// An assignment satisfying `F` and falsifying clause `clause` of `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Breaker {
    pub clause: usize,
    pub model: Vec<bool>,
}

/// Finds a model of `f` falsifying `q`, trying the clauses of `q` in order.
/// `None` iff `f ⇒ q`.
pub fn break_implication(f: &CnfFormula, q: &[Clause]) -> Option<Breaker> {
    let mut s = Solver::from_formula(f);
    break_with(&mut s, q)
}

pub fn break_with(s: &mut Solver, q: &[Clause]) -> Option<Breaker> {
    for (i, c) in q.iter().enumerate() {
        let negated: Vec<Lit> = c.lits().iter().map(|l| !*l).collect();
        if s.solve(&negated) == Status::Sat {
            return Some(Breaker {
                clause: i,
                model: s.model().to_vec(),
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::CnfFormula;

    fn v(i: u32) -> Var {
        Var(i - 1)
    }

    fn formula(n: usize, clauses: &[&[i64]]) -> CnfFormula {
        let mut f = CnfFormula::with_vars(n);
        for c in clauses {
            f.push(Clause::new(c.iter().map(|&d| Lit::from_dimacs(d))).unwrap()).unwrap();
        }
        f
    }

    fn example1() -> CnfFormula {
        formula(3, &[&[1, -3], &[2, -3], &[-1, -2, 3]])
    }

    #[test]
    fn contradiction_is_unsat_with_empty_core() {
        let r = solve(&formula(1, &[&[1], &[-1]]), &[]);
        assert_eq!(r.status, Status::Unsat);
        assert!(r.core.is_empty());
        assert!(r.model.is_none());
    }

    #[test]
    fn and_gate_under_assumptions() {
        let r = solve(&example1(), &[Lit::pos(v(1)), Lit::pos(v(2))]);
        assert!(r.is_sat());
        assert!(r.model.unwrap()[2]);
    }

    #[test]
    fn core_is_subset_of_assumptions() {
        let f = example1();
        let assumptions = [Lit::pos(v(1)), Lit::pos(v(2)), Lit::neg(v(3))];
        let r = solve(&f, &assumptions);
        assert!(r.is_unsat());
        assert!(r.core.iter().all(|l| assumptions.contains(l)));
        assert!(solve(&f, &r.core).is_unsat());
        // v3 alone is not enough to refute
        let r = solve(&f, &[Lit::pos(v(3)), Lit::neg(v(1))]);
        assert!(r.is_unsat());
        assert!(solve(&f, &r.core).is_unsat());
    }

    #[test]
    fn implication_queries() {
        let unit = formula(2, &[&[1]]);
        assert!(implies(&unit, &Clause::new([Lit::pos(v(1)), Lit::pos(v(2))]).unwrap()));
        let f = example1();
        assert!(implies(&f, &Clause::new([Lit::neg(v(3)), Lit::pos(v(1))]).unwrap()));
        assert!(!implies(&f, &Clause::new([Lit::neg(v(3))]).unwrap()));
    }

    #[test]
    fn break_implication_picks_non_implied_clause() {
        let f = example1();
        assert!(break_implication(&f, &[]).is_none());
        let implied = Clause::new([Lit::neg(v(3)), Lit::pos(v(1))]).unwrap();
        let not_implied = Clause::new([Lit::neg(v(3))]).unwrap();
        let b = break_implication(&f, &[implied, not_implied.clone()]).unwrap();
        assert_eq!(b.clause, 1);
        assert!(f.eval(&b.model));
        assert!(!not_implied.eval(&b.model));
    }

    #[test]
    fn budget_exceeded_is_reported() {
        // pigeonhole 6 into 5 needs many conflicts
        let holes = 5;
        let pigeons = 6;
        let var = |p: usize, h: usize| (p * holes + h + 1) as i64;
        let mut cs: Vec<Vec<i64>> = Vec::new();
        for p in 0..pigeons {
            cs.push((0..holes).map(|h| var(p, h)).collect());
        }
        for h in 0..holes {
            for p in 0..pigeons {
                for q in p + 1..pigeons {
                    cs.push(vec![-var(p, h), -var(q, h)]);
                }
            }
        }
        let refs: Vec<&[i64]> = cs.iter().map(|c| c.as_slice()).collect();
        let f = formula(pigeons * holes, &refs);
        assert_eq!(solve_with_budget(&f, &[], Some(5)).status, Status::BudgetExceeded);
        assert_eq!(solve(&f, &[]).status, Status::Unsat);
    }

    #[test]
    fn incremental_use_keeps_answers_consistent() {
        let mut s = Solver::from_formula(&example1());
        assert_eq!(s.solve(&[Lit::pos(v(3))]), Status::Sat);
        assert!(s.model()[0] && s.model()[1]);
        assert_eq!(s.solve(&[Lit::pos(v(3)), Lit::neg(v(2))]), Status::Unsat);
        assert_eq!(s.solve(&[]), Status::Sat);
        s.add_clause(&[Lit::neg(v(3))]);
        assert_eq!(s.solve(&[Lit::pos(v(1)), Lit::pos(v(2))]), Status::Unsat);
        let mut core = s.core().to_vec();
        core.sort();
        assert_eq!(core, vec![Lit::pos(v(1)), Lit::pos(v(2))]);
    }

    #[test]
    fn luby_sequence() {
        let seq: Vec<f64> = (0..7).map(|i| luby(2.0, i)).collect();
        assert_eq!(seq, vec![1.0, 1.0, 2.0, 1.0, 1.0, 2.0, 4.0]);
    }
}
