//! Sequential circuits: time-frame unrolling, false safety properties and
//! counterexample traces, plus explicit-state reachability for tiny designs.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use indexmap::IndexMap;
use rayon::prelude::*;
use thiserror::Error;

use crate::cnf::{encode_gate_with, Clause, CnfFormula, GateRecord, Lit, Origin, Role, VarMap};
use crate::mutate::{self, MutateError, Mutation, MutationKind, Policy};
use crate::netlist::{Circuit, LatchInit, Var};
use crate::pqe::{pqe_cegar, PqeConfig, PqeProblem, PqeSolution, Termination};
use crate::sat::{Solver, Status};
use crate::verify::{GateReport, GateStatus, Status3};

pub const DEFAULT_MAX_STATES: usize = 1 << 16;

#[derive(Error, Debug)]
pub enum SeqError {
    #[error("circuit has no latches")]
    Combinational,
    #[error("frame count must be at least 1")]
    NoFrames,
    #[error("{states} states exceed the bound of {bound}")]
    StateSpace { states: u128, bound: usize },
    #[error("{0} inputs are too many to enumerate")]
    TooManyInputs(usize),
    #[error("the mutation touches the initial-state clauses")]
    MutatesInit,
    #[error(transparent)]
    Mutate(#[from] MutateError),
    #[error("property file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown state signal `{0}`")]
    UnknownState(String),
}

/// `I(S_1) ∧ F_1 ∧ … ∧ F_n` with per-frame variable maps.
#[derive(Clone, Debug)]
pub struct UnrolledCnf {
    pub formula: CnfFormula,
    /// `frames[i][v]`: formula variable of circuit signal `v` in frame `i + 1`.
    /// Latch next-state signals map to the present state of the next frame.
    pub frames: Vec<Vec<Var>>,
    /// `states[i]`: the latch variables `S_{i+1}`, for `i` in `0..=n`.
    pub states: Vec<Vec<Var>>,
    /// Indices of the initial-state clauses.
    pub i1: Vec<usize>,
    pub n: usize,
}

impl UnrolledCnf {
    /// `S_{n+1}`.
    pub fn final_states(&self) -> &[Var] {
        &self.states[self.n]
    }

    /// Every variable except `S_{n+1}`.
    pub fn w(&self) -> Vec<Var> {
        let last: BTreeSet<Var> = self.final_states().iter().copied().collect();
        self.formula.var_map().vars().filter(|v| !last.contains(v)).collect()
    }

    /// Renames clauses over `S_{n+1}` to the circuit's state signals.
    pub fn to_circuit_states(&self, m: &Circuit, q: &[Clause]) -> Vec<Clause> {
        let last = self.final_states();
        q.iter()
            .map(|c| {
                c.rename(|v| {
                    let k = last.iter().position(|s| *s == v).expect("clause over final states");
                    m.latches()[k].state
                })
            })
            .collect()
    }

    /// Renames clauses over the circuit's state signals to `S_{n+1}`.
    pub fn to_final_states(&self, m: &Circuit, q: &[Clause]) -> Vec<Clause> {
        let last = self.final_states();
        q.iter()
            .map(|c| {
                c.rename(|v| {
                    let k = m.latches().iter().position(|l| l.state == v).expect("clause over state signals");
                    last[k]
                })
            })
            .collect()
    }
}

/// Unrolls `m` into `n` time frames with fresh variables per frame.
pub fn unroll(m: &Circuit, n: usize) -> Result<UnrolledCnf, SeqError> {
    if !m.is_sequential() {
        return Err(SeqError::Combinational);
    }
    if n == 0 {
        return Err(SeqError::NoFrames);
    }
    let mut vm = VarMap::new();
    let s1: Vec<Var> = m
        .latches()
        .iter()
        .map(|l| vm.push(Role::State, 1, format!("{}@1", m.var_name(l.state))))
        .collect();
    let mut states = vec![s1];
    let mut frames = Vec::with_capacity(n);
    for i in 1..=n {
        let mut map: Vec<Option<Var>> = vec![None; m.num_vars()];
        for (l, s) in m.latches().iter().zip(&states[i - 1]) {
            map[l.state.index()] = Some(*s);
        }
        let mut next = vec![Var(0); m.latches().len()];
        for v in (0..m.num_vars() as u32).map(Var) {
            if map[v.index()].is_some() {
                continue;
            }
            if let Some(k) = m.latches().iter().position(|l| l.next == v) {
                let role = if i == n { Role::NextState } else { Role::State };
                let s = vm.push(role, i as u32 + 1, format!("{}@{}", m.var_name(m.latches()[k].state), i + 1));
                map[v.index()] = Some(s);
                next[k] = s;
            } else {
                let role = match Role::from(m.role(v)) {
                    Role::Input => Role::Input,
                    Role::Output => Role::Output,
                    _ => Role::Internal,
                };
                map[v.index()] = Some(vm.push(role, i as u32, format!("{}@{}", m.var_name(v), i)));
            }
        }
        states.push(next);
        frames.push(map.into_iter().map(|v| v.expect("every signal mapped")).collect::<Vec<Var>>());
    }

    let mut f = CnfFormula::new(vm);
    let ins = frames.iter().flat_map(|fr| m.inputs().iter().map(|v| fr[v.index()])).collect();
    let outs = frames.iter().flat_map(|fr| m.outputs().iter().map(|v| fr[v.index()])).collect();
    f.set_ports(ins, outs);
    let mut i1 = Vec::new();
    for (l, s) in m.latches().iter().zip(&states[0]) {
        if let Some(b) = l.init.value() {
            i1.push(f.push(Clause::with_origin([Lit::new(*s, b)], Origin::Init).unwrap()).unwrap());
        }
    }
    for (i, map) in frames.iter().enumerate() {
        let frame = i as u32 + 1;
        for (g, gate) in m.gates().iter().enumerate() {
            let mut gate = gate.clone();
            gate.inputs.iter_mut().for_each(|v| *v = map[v.index()]);
            gate.output = map[gate.output.index()];
            let origin = Origin::Gate { gate: g as u32, frame };
            for c in encode_gate_with(&gate, origin) {
                f.push(c).unwrap();
            }
            f.add_gate_record(GateRecord {
                gate: g as u32,
                frame,
                kind: gate.kind,
                inputs: gate.inputs,
                output: gate.output,
            });
        }
    }
    Ok(UnrolledCnf {
        formula: f,
        frames,
        states,
        i1,
        n,
    })
}

/// Places a mutation of `gate` in every frame, mirroring the one built for frame 1.
pub fn replicate(u: &UnrolledCnf, first: &Mutation) -> Result<Mutation, MutateError> {
    let mut out = first.clone();
    for frame in 2..=u.n as u32 {
        let m = match first.kind {
            MutationKind::GateSubst { kind } => mutate::gate_subst(&u.formula, first.gate, frame, kind)?,
            MutationKind::StuckAt { value } => mutate::stuck_at(&u.formula, first.gate, frame, value)?,
            MutationKind::ClauseFlip { clause, literal } => {
                let g1 = u.formula.group(first.gate, first.frame);
                let pos = g1.iter().position(|&c| c == clause).expect("flip inside the gate group");
                mutate::clause_flip(&u.formula, u.formula.group(first.gate, frame)[pos], literal)?
            }
        };
        out.group.extend(m.group);
        out.g_star.extend(m.g_star);
    }
    Ok(out)
}

/// A run of the circuit from an initial state into a state violating a property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CexTrace {
    /// `s^1 … s^{n+1}`.
    pub states: Vec<Vec<bool>>,
    /// `x^1 … x^n`.
    pub inputs: Vec<Vec<bool>>,
    /// Outputs per frame, by simulation.
    pub outputs: Vec<Vec<bool>>,
    /// Clause of the property falsified by the last state.
    pub violated: usize,
}

impl CexTrace {
    /// Whether the trace starts in an initial state and follows the
    /// transition function of `m`.
    pub fn replays(&self, m: &Circuit) -> bool {
        let init_ok = m
            .latches()
            .iter()
            .zip(&self.states[0])
            .all(|(l, b)| l.init.value().is_none_or(|v| v == *b));
        init_ok
            && self.inputs.iter().enumerate().all(|(i, x)| {
                m.simulate(x, Some(&self.states[i]))
                    .is_ok_and(|s| s.next_state.as_deref() == Some(&self.states[i + 1][..]) && s.outputs == self.outputs[i])
            })
    }

    /// Whether the last state falsifies `q` (clauses over state signals).
    pub fn ends_outside(&self, m: &Circuit, q: &[Clause]) -> bool {
        let a = state_assignment(m, self.states.last().unwrap());
        q.iter().any(|c| !c.eval(&a))
    }

    pub fn to_json(&self, m: &Circuit) -> serde_json::Value {
        let bits = |vars: &[Var], b: &[bool]| -> IndexMap<String, u8> {
            vars.iter().zip(b).map(|(v, x)| (m.var_name(*v).to_string(), *x as u8)).collect()
        };
        let state_vars: Vec<Var> = m.latches().iter().map(|l| l.state).collect();
        let frames: Vec<serde_json::Value> = (0..self.states.len())
            .map(|i| {
                let mut o = serde_json::json!({ "frame": i + 1, "state": bits(&state_vars, &self.states[i]) });
                if i < self.inputs.len() {
                    o["inputs"] = serde_json::to_value(bits(m.inputs(), &self.inputs[i])).unwrap();
                    o["outputs"] = serde_json::to_value(bits(m.outputs(), &self.outputs[i])).unwrap();
                }
                o
            })
            .collect();
        serde_json::json!({ "frames": frames, "violated_clause": self.violated })
    }

    /// One row per signal, one column per frame.
    pub fn to_table(&self, m: &Circuit) -> String {
        let mut rows: Vec<(String, Vec<Option<bool>>)> = Vec::new();
        for (k, l) in m.latches().iter().enumerate() {
            rows.push((m.var_name(l.state).into(), self.states.iter().map(|s| Some(s[k])).collect()));
        }
        let pad = |v: &[Vec<bool>], k: usize| -> Vec<Option<bool>> {
            v.iter().map(|x| Some(x[k])).chain(std::iter::once(None)).collect()
        };
        for (k, v) in m.inputs().iter().enumerate() {
            rows.push((m.var_name(*v).into(), pad(&self.inputs, k)));
        }
        for (k, v) in m.outputs().iter().enumerate() {
            rows.push((m.var_name(*v).into(), pad(&self.outputs, k)));
        }
        let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(5);
        let mut s = format!("{:width$} |", "frame");
        for i in 1..=self.states.len() {
            s.push_str(&format!(" {i}"));
        }
        s.push('\n');
        for (name, cells) in rows {
            s.push_str(&format!("{name:width$} |"));
            for c in cells {
                s.push_str(match c {
                    Some(true) => " 1",
                    Some(false) => " 0",
                    None => " .",
                });
            }
            s.push('\n');
        }
        s
    }
}

fn state_assignment(m: &Circuit, state: &[bool]) -> Vec<bool> {
    let mut a = vec![false; m.num_vars()];
    for (l, b) in m.latches().iter().zip(state) {
        a[l.state.index()] = *b;
    }
    a
}

/// Finds a run of `n` steps from an initial state to a state falsifying
/// `q` (clauses over the circuit's state signals). `None` iff `q` holds in
/// every state reachable in exactly `n` steps.
pub fn find_counterexample(m: &Circuit, u: &UnrolledCnf, q: &[Clause]) -> Option<CexTrace> {
    let mut s = Solver::from_formula(&u.formula);
    find_with(m, u, &mut s, q).ok().flatten()
}

fn find_with(m: &Circuit, u: &UnrolledCnf, s: &mut Solver, q: &[Clause]) -> Result<Option<CexTrace>, ()> {
    let renamed = u.to_final_states(m, q);
    for (i, c) in renamed.iter().enumerate() {
        let negated: Vec<Lit> = c.lits().iter().map(|l| !*l).collect();
        match s.solve(&negated) {
            Status::Sat => {
                let model = s.model();
                let states: Vec<Vec<bool>> =
                    u.states.iter().map(|st| st.iter().map(|v| model[v.index()]).collect()).collect();
                let inputs: Vec<Vec<bool>> = u
                    .frames
                    .iter()
                    .map(|fr| m.inputs().iter().map(|v| model[fr[v.index()].index()]).collect())
                    .collect();
                let outputs = inputs
                    .iter()
                    .zip(&states)
                    .map(|(x, st)| m.simulate(x, Some(st)).expect("sizes match").outputs)
                    .collect();
                let trace = CexTrace {
                    states,
                    inputs,
                    outputs,
                    violated: i,
                };
                assert!(trace.replays(m), "decoded trace must follow the transition function");
                return Ok(Some(trace));
            }
            Status::Unsat => {}
            Status::BudgetExceeded => return Err(()),
        }
    }
    Ok(None)
}

/// A property over the state signals, from PQE on an unrolled formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafetyProperty {
    /// Clauses over the circuit's state signals.
    pub clauses: Vec<Clause>,
    pub status: Status3,
    pub provenance: Option<String>,
    pub trace: Option<CexTrace>,
    pub partial: bool,
}

impl SafetyProperty {
    pub fn to_json(&self, m: &Circuit) -> serde_json::Value {
        let clauses: Vec<Vec<String>> = self
            .clauses
            .iter()
            .map(|c| {
                c.lits()
                    .iter()
                    .map(|l| {
                        let n = m.var_name(l.var());
                        if l.is_positive() { n.to_string() } else { format!("!{n}") }
                    })
                    .collect()
            })
            .collect();
        serde_json::json!({
            "provenance": self.provenance,
            "status": self.status,
            "partial": self.partial,
            "clauses": clauses,
            "trace": self.trace.as_ref().map(|t| t.to_json(m)),
        })
    }
}

/// The PQE problem taking `G*` of `mu` out of `∃W (I_1 ∧ G* ∧ F'_{1,n})`.
pub fn safety_problem(u: &UnrolledCnf, mu: &Mutation) -> Result<PqeProblem, SeqError> {
    if mu.group.iter().any(|i| u.i1.contains(i)) {
        return Err(SeqError::MutatesInit);
    }
    let split = mu.apply(&u.formula).map_err(MutateError::from)?;
    Ok(PqeProblem::new(split, u.final_states().iter().copied()))
}

/// Result of [`false_safety_prop`]: the PQE solution over `S_{n+1}` and the
/// same clauses over the circuit's state signals.
#[derive(Clone, Debug)]
pub struct SafetyOutcome {
    pub solution: PqeSolution,
    pub clauses: Vec<Clause>,
}

pub fn false_safety_prop(
    m: &Circuit,
    u: &UnrolledCnf,
    mu: &Mutation,
    cfg: &PqeConfig,
) -> Result<SafetyOutcome, SeqError> {
    let p = safety_problem(u, mu)?;
    let solution = pqe_cegar(&p, cfg);
    let clauses = u.to_circuit_states(m, &solution.clauses);
    Ok(SafetyOutcome { solution, clauses })
}

/// Parses safety properties: JSON list of clause lists over state signal
/// names (`!`/`-` negates). Tautological clauses are dropped.
pub fn parse_state_properties(text: &str, m: &Circuit) -> Result<Vec<Vec<Clause>>, SeqError> {
    let raw: Vec<Vec<Vec<String>>> = serde_json::from_str(text)?;
    raw.into_iter()
        .map(|p| {
            let mut out = Vec::new();
            for c in p {
                let mut lits = Vec::new();
                for name in c {
                    let (pos, pin) = match name.strip_prefix(['!', '-', '~']) {
                        Some(r) => (false, r.to_string()),
                        None => (true, name),
                    };
                    let v = m
                        .find(&pin)
                        .filter(|v| m.latches().iter().any(|l| l.state == *v))
                        .ok_or(SeqError::UnknownState(pin))?;
                    lits.push(Lit::new(v, pos));
                }
                out.extend(Clause::new(lits).ok());
            }
            Ok(out)
        })
        .collect()
}

/// Explicit-state reachability: `frames[k]` holds the states reachable in
/// exactly `k` steps, encoded with bit `i` for latch `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachSet {
    pub frames: Vec<BTreeSet<u64>>,
    /// Union of all frames.
    pub reachable: BTreeSet<u64>,
    /// The union stopped growing.
    pub closed: bool,
    /// Last frame index that added new states.
    pub diameter: usize,
}

fn decode(state: u64, k: usize) -> Vec<bool> {
    (0..k).map(|i| state >> i & 1 == 1).collect()
}

fn encode(bits: &[bool]) -> u64 {
    bits.iter().enumerate().fold(0, |a, (i, b)| a | (*b as u64) << i)
}

/// States allowed by the latch initial values.
pub fn initial_states(m: &Circuit) -> BTreeSet<u64> {
    let mut out = BTreeSet::from([0u64]);
    for (i, l) in m.latches().iter().enumerate() {
        out = match l.init {
            LatchInit::Zero => out,
            LatchInit::One => out.into_iter().map(|s| s | 1 << i).collect(),
            LatchInit::Free => out.into_iter().flat_map(|s| [s, s | 1 << i]).collect(),
        };
    }
    out
}

fn check_space(m: &Circuit, max_states: usize) -> Result<(), SeqError> {
    if !m.is_sequential() {
        return Err(SeqError::Combinational);
    }
    let states = 1u128 << m.latches().len().min(127);
    if m.latches().len() > 63 || states > max_states as u128 {
        return Err(SeqError::StateSpace {
            states,
            bound: max_states,
        });
    }
    if m.inputs().len() > 20 {
        return Err(SeqError::TooManyInputs(m.inputs().len()));
    }
    Ok(())
}

/// Successors of `states` under every input vector.
pub fn image(m: &Circuit, states: &BTreeSet<u64>) -> BTreeSet<u64> {
    let k = m.latches().len();
    let mut out = BTreeSet::new();
    for &s in states {
        let st = decode(s, k);
        for x in 0..1u64 << m.inputs().len() {
            let step = m.simulate(&decode(x, m.inputs().len()), Some(&st)).expect("sizes match");
            out.insert(encode(&step.next_state.unwrap()));
        }
    }
    out
}

/// Breadth-first search until no new states appear.
pub fn reach_oracle(m: &Circuit, max_states: usize) -> Result<ReachSet, SeqError> {
    check_space(m, max_states)?;
    let first = initial_states(m);
    let mut r = ReachSet {
        reachable: first.clone(),
        frames: vec![first],
        closed: false,
        diameter: 0,
    };
    loop {
        let next = image(m, r.frames.last().unwrap());
        let before = r.reachable.len();
        r.reachable.extend(next.iter().copied());
        if r.reachable.len() == before {
            r.closed = true;
            return Ok(r);
        }
        r.frames.push(next);
        r.diameter = r.frames.len() - 1;
    }
}

/// The sets of states reachable in exactly `k` steps, for `k` in `0..=n`.
pub fn exact_frames(m: &Circuit, n: usize, max_states: usize) -> Result<Vec<BTreeSet<u64>>, SeqError> {
    check_space(m, max_states)?;
    let mut frames = vec![initial_states(m)];
    for _ in 0..n {
        let next = image(m, frames.last().unwrap());
        frames.push(next);
    }
    Ok(frames)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeqBugReason {
    /// The last state falsifies clause `clause` of property `property`.
    Phrd { property: usize, clause: usize },
    /// The golden model's outputs differ in frame `frame` (1-based).
    Golden { frame: usize, expected: Vec<bool> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqBug {
    pub trace: CexTrace,
    pub gate: usize,
    pub reason: SeqBugReason,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqReport {
    pub frames: usize,
    pub tst: Option<SeqBug>,
    pub traces: Vec<CexTrace>,
    pub pfls: Vec<SafetyProperty>,
    pub gates: Vec<GateReport>,
    pub sat_calls: u64,
}

impl SeqReport {
    pub fn to_json(&self, m: &Circuit) -> serde_json::Value {
        let gates: Vec<serde_json::Value> = self
            .gates
            .iter()
            .map(|g| {
                serde_json::json!({
                    "gate": format!("g{}", g.gate + 1),
                    "signal": m.var_name(m.gates()[g.gate].output),
                    "status": g.status,
                    "mutations": g.mutations,
                    "property": g.property,
                })
            })
            .collect();
        let tst = self.tst.as_ref().map(|b| {
            let reason = match &b.reason {
                SeqBugReason::Phrd { property, clause } => {
                    serde_json::json!({"kind": "phrd", "property": property, "clause": clause})
                }
                SeqBugReason::Golden { frame, expected } => {
                    let z: IndexMap<String, u8> = m
                        .outputs()
                        .iter()
                        .zip(expected)
                        .map(|(v, b)| (m.var_name(*v).to_string(), *b as u8))
                        .collect();
                    serde_json::json!({"kind": "golden", "frame": frame, "expected": z})
                }
            };
            serde_json::json!({"trace": b.trace.to_json(m), "gate": format!("g{}", b.gate + 1), "reason": reason})
        });
        serde_json::json!({
            "circuit": m.name(),
            "frames": self.frames,
            "tst": tst,
            "traces": self.traces.iter().map(|t| t.to_json(m)).collect::<Vec<_>>(),
            "properties": self.pfls.iter().map(|p| p.to_json(m)).collect::<Vec<_>>(),
            "gates": gates,
            "sat_calls": self.sat_calls,
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct SeqSpecification {
    /// Safety properties over state signals.
    pub phrd: Vec<Vec<Clause>>,
    /// Reference design, compared on outputs along each trace.
    pub golden: Option<Circuit>,
}

#[derive(Clone, Debug)]
pub struct SeqConfig {
    pub frames: usize,
    pub policy: Policy,
    pub pqe: PqeConfig,
    /// Mutate the gate in every frame instead of frame 1 only.
    pub replicate: bool,
    pub continue_after_bug: bool,
    pub jobs: usize,
}

impl Default for SeqConfig {
    fn default() -> Self {
        SeqConfig {
            frames: 2,
            policy: Policy::AllGateSubst,
            pqe: PqeConfig::default(),
            replicate: false,
            continue_after_bug: false,
            jobs: 1,
        }
    }
}

fn golden_mismatch(golden: &Circuit, t: &CexTrace) -> Option<SeqBugReason> {
    let mut state: Vec<bool> = golden.latches().iter().map(|l| l.init.value().unwrap_or(false)).collect();
    for (i, x) in t.inputs.iter().enumerate() {
        let step = golden.simulate(x, Some(&state)).ok()?;
        if step.outputs != t.outputs[i] {
            return Some(SeqBugReason::Golden {
                frame: i + 1,
                expected: step.outputs,
            });
        }
        state = step.next_state.unwrap();
    }
    None
}

fn check_trace(spec: &SeqSpecification, m: &Circuit, t: &CexTrace) -> Option<SeqBugReason> {
    let a = state_assignment(m, t.states.last().unwrap());
    for (pi, p) in spec.phrd.iter().enumerate() {
        if let Some(ci) = p.iter().position(|c| !c.eval(&a)) {
            return Some(SeqBugReason::Phrd {
                property: pi,
                clause: ci,
            });
        }
    }
    golden_mismatch(spec.golden.as_ref()?, t)
}

struct SeqGateOutcome {
    status: GateStatus,
    mutations: Vec<String>,
    property: Option<SafetyProperty>,
    bug: Option<SeqBugReason>,
    sat_calls: u64,
}

fn process_gate(spec: &SeqSpecification, m: &Circuit, u: &UnrolledCnf, gate: usize, cfg: &SeqConfig) -> SeqGateOutcome {
    let mut out = SeqGateOutcome {
        status: GateStatus::Skipped,
        mutations: Vec::new(),
        property: None,
        bug: None,
        sat_calls: 0,
    };
    let mut any_true = false;
    for mu in mutate::mutations_of_gate(&u.formula, gate, 1, cfg.policy) {
        let mu = if cfg.replicate {
            match replicate(u, &mu) {
                Ok(r) => r,
                Err(_) => continue,
            }
        } else {
            mu
        };
        out.mutations.push(mu.label());
        let Ok(r) = false_safety_prop(m, u, &mu, &cfg.pqe) else {
            continue;
        };
        out.sat_calls += r.solution.stats.sat_calls;
        if r.solution.termination == Termination::ConflictBudget {
            continue;
        }
        let partial = r.solution.termination != Termination::Complete;
        let mut s = Solver::from_formula(&u.formula);
        s.set_conflict_budget(cfg.pqe.conflict_budget);
        let Ok(trace) = find_with(m, u, &mut s, &r.clauses) else {
            continue;
        };
        match trace {
            Some(t) => {
                out.bug = check_trace(spec, m, &t);
                out.status = GateStatus::FalseProp;
                out.property = Some(SafetyProperty {
                    clauses: r.clauses,
                    status: Status3::False,
                    provenance: Some(mu.label()),
                    trace: Some(t),
                    partial,
                });
                return out;
            }
            None if !partial => any_true = true,
            None => {}
        }
    }
    if any_true {
        out.status = GateStatus::TrueProp;
    }
    out
}

/// The COMPSET loop on an unrolled sequential circuit: per gate, a false
/// safety property over the state signals and a trace breaking it.
pub fn seq_compset(spec: &SeqSpecification, m: &Circuit, cfg: &SeqConfig) -> Result<SeqReport, SeqError> {
    let u = unroll(m, cfg.frames)?;
    let gates: Vec<usize> = (0..m.gates().len()).collect();
    let first_bug = AtomicUsize::new(usize::MAX);
    let run = |&gate: &usize| -> Option<SeqGateOutcome> {
        if !cfg.continue_after_bug && gate > first_bug.load(Ordering::Relaxed) {
            return None;
        }
        let o = process_gate(spec, m, &u, gate, cfg);
        if o.bug.is_some() {
            first_bug.fetch_min(gate, Ordering::Relaxed);
        }
        Some(o)
    };
    let outcomes: Vec<Option<SeqGateOutcome>> = if cfg.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .expect("thread pool");
        pool.install(|| gates.par_iter().map(run).collect())
    } else {
        gates.iter().map(run).collect()
    };
    let mut report = SeqReport {
        frames: cfg.frames,
        tst: None,
        traces: Vec::new(),
        pfls: Vec::new(),
        gates: Vec::new(),
        sat_calls: 0,
    };
    for (gate, o) in gates.into_iter().zip(outcomes) {
        let o = o.expect("gates before the first bug are always processed");
        report.sat_calls += o.sat_calls;
        let mut record = GateReport {
            gate,
            status: o.status,
            mutations: o.mutations,
            property: None,
        };
        if let Some(p) = o.property {
            let t = p.trace.clone().expect("false property has a trace");
            record.property = Some(report.pfls.len());
            report.pfls.push(p);
            match o.bug {
                Some(reason) if report.tst.is_none() => report.tst = Some(SeqBug { trace: t, gate, reason }),
                Some(_) => {}
                None => {
                    if !report.traces.iter().any(|x| x.inputs == t.inputs && x.states[0] == t.states[0]) {
                        report.traces.push(t);
                    }
                }
            }
        }
        report.gates.push(record);
        if report.tst.is_some() && !cfg.continue_after_bug {
            break;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{parse_netlist, Format, GateKind};
    use crate::pqe::{pqe_oracle, verify_solution};

    const TOGGLE: &str = "latch s d init 0; d = NOT(s); output s;";
    const COUNTER3: &str = "latch a na init 0; latch b nb init 0; \
        na = AND(nb0, b); nb0 = NOT(a); nb = NOR(a, b); output a;";

    fn c(src: &str) -> Circuit {
        parse_netlist(src, Format::Simple).unwrap()
    }

    #[test]
    fn toggle_one_frame() {
        let m = c(TOGGLE);
        let u = unroll(&m, 1).unwrap();
        let s: Vec<Var> = vec![u.states[0][0], u.states[1][0]];
        let r = crate::sat::solve(&u.formula, &[]);
        let model = r.model.unwrap();
        assert!(!model[s[0].index()] && model[s[1].index()]);
        // |S| + |X| + |Y| + |S|
        let y = m.num_vars() - m.latches().len() - m.inputs().len() - m.latches().len();
        assert_eq!(u.formula.num_vars(), 1 + m.inputs().len() + y + 1);
    }

    #[test]
    fn toggle_three_frames_has_one_model() {
        let m = c(TOGGLE);
        let u = unroll(&m, 3).unwrap();
        let seq: Vec<Var> = u.states.iter().map(|s| s[0]).collect();
        let t = crate::pqe::qe_enumerate(&u.formula, &seq, 20).unwrap();
        assert_eq!(t.ones(), 1);
        let row = (0..16).find(|&r| t.get(r)).unwrap();
        assert_eq!(row, 0b1010);
    }

    #[test]
    fn toggle_not_to_buf_gives_false_safety_property() {
        let m = c(TOGGLE);
        let u = unroll(&m, 1).unwrap();
        let g = m.driver(m.find("d").unwrap()).unwrap();
        let mu = mutate::gate_subst(&u.formula, g, 1, GateKind::Buf).unwrap();
        let out = false_safety_prop(&m, &u, &mu, &PqeConfig::default()).unwrap();
        assert_eq!(out.clauses.len(), 1);
        assert_eq!(out.clauses[0].lits(), &[Lit::neg(m.find("s").unwrap())]);
        let t = find_counterexample(&m, &u, &out.clauses).unwrap();
        assert_eq!(t.states, vec![vec![false], vec![true]]);
        assert!(t.ends_outside(&m, &out.clauses));
        let p = safety_problem(&u, &mu).unwrap();
        assert!(verify_solution(&p, &out.solution.clauses, 20).unwrap());
    }

    #[test]
    fn identity_and_trivial_properties() {
        let m = c(TOGGLE);
        let u = unroll(&m, 2).unwrap();
        let g = u.formula.group(0, 1);
        let same: Vec<Clause> = g.iter().map(|&i| u.formula.clause(i).clone()).collect();
        let mu = Mutation {
            gate: 0,
            frame: 1,
            kind: MutationKind::GateSubst { kind: GateKind::Not },
            group: g,
            g_star: same,
            identity: true,
        };
        // G* = G only restates what F already implies: here ¬s@3, a true property
        let p = safety_problem(&u, &mu).unwrap();
        let sol = pqe_oracle(&p, 20).unwrap();
        assert!(sol.certificate_checked);
        let q = u.to_circuit_states(&m, &sol.clauses);
        assert!(find_counterexample(&m, &u, &q).is_none());
        assert!(find_counterexample(&m, &u, &[]).is_none());
        let taut = parse_state_properties(r#"[[["s", "!s"]]]"#, &m).unwrap();
        assert!(taut[0].is_empty());
        assert!(find_counterexample(&m, &u, &taut[0]).is_none());
    }

    #[test]
    fn reachability() {
        let t = reach_oracle(&c(TOGGLE), DEFAULT_MAX_STATES).unwrap();
        assert_eq!(t.reachable, BTreeSet::from([0, 1]));
        assert_eq!(t.diameter, 1);
        assert!(t.closed);
        let k = reach_oracle(&c(COUNTER3), DEFAULT_MAX_STATES).unwrap();
        assert_eq!(k.reachable, BTreeSet::from([0b00, 0b01, 0b10]));
        assert_eq!(k.diameter, 2);
        let all = reach_oracle(&c("input i; latch s d init x; d = XOR(s, i); output d;"), 16).unwrap();
        assert_eq!(all.diameter, 0);
        assert_eq!(all.reachable.len(), 2);
        assert!(matches!(reach_oracle(&c(COUNTER3), 2), Err(SeqError::StateSpace { .. })));
    }

    #[test]
    fn unroll_rejects_combinational() {
        assert!(matches!(
            unroll(&c("input a; z = NOT(a); output z;"), 1),
            Err(SeqError::Combinational)
        ));
        assert!(matches!(unroll(&c(TOGGLE), 0), Err(SeqError::NoFrames)));
    }

    #[test]
    fn seq_compset_on_counter() {
        let m = c(COUNTER3);
        let r = seq_compset(&SeqSpecification::default(), &m, &SeqConfig::default()).unwrap();
        assert_eq!(r.gates.len(), m.gates().len());
        assert!(r.tst.is_none());
        for t in &r.traces {
            assert!(t.replays(&m));
        }
        // "a and b are never both 1" holds; a trace reaching 11 would break it
        let phrd = parse_state_properties(r#"[[["!a", "!b"]]]"#, &m).unwrap();
        let spec = SeqSpecification { phrd, golden: None };
        let r = seq_compset(&spec, &m, &SeqConfig::default()).unwrap();
        if let Some(b) = r.tst {
            assert!(b.trace.replays(&m));
        }
    }
}
