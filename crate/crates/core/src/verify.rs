//! False properties, tests breaking them, and the COMPSET loop.

use std::sync::atomic::{AtomicUsize, Ordering};

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{encode_circuit, encode_gate, Clause, CnfFormula, Lit, VarMap};
use crate::mutate::{self, Mutation, Policy};
use crate::netlist::{Circuit, GateKind, NetlistError, Var};
use crate::pqe::{pqe_cegar, PqeConfig, PqeProblem, PqeStats, Termination};
use crate::sat::{self, Solver, Status};

#[derive(Error, Debug)]
pub enum VerifyError {
    #[error("property file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("property {property}: unknown pin `{name}`")]
    UnknownPin { property: usize, name: String },
    #[error("property {property}: pin `{name}` is not a primary input or output")]
    NotExternal { property: usize, name: String },
    #[error("property {property}: clause {clause} is a tautology")]
    Tautology { property: usize, clause: usize },
    #[error("golden model signature differs: {0}")]
    Signature(String),
    #[error("circuit has latches; use the sequential flow")]
    Sequential,
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status3 {
    True,
    False,
    Unknown,
}

/// An input vector with the outputs the circuit produces for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestVector {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
    /// Clause of the property falsified by `(x, z)`.
    pub broken_clause: usize,
}

impl TestVector {
    /// Reads inputs and outputs of `n` off a model of its encoding.
    pub fn from_model(n: &Circuit, model: &[bool], broken_clause: usize) -> TestVector {
        TestVector {
            x: n.inputs().iter().map(|v| model[v.index()]).collect(),
            z: n.outputs().iter().map(|v| model[v.index()]).collect(),
            broken_clause,
        }
    }

    /// Whether `n` really produces `z` on `x`.
    pub fn replays(&self, n: &Circuit) -> bool {
        n.outputs_for(&self.x).is_ok_and(|z| z == self.z)
    }

    /// Sparse assignment over the variables of `n` with inputs and outputs set.
    pub fn assignment(&self, n: &Circuit) -> Vec<bool> {
        let mut a = vec![false; n.num_vars()];
        for (v, b) in n.inputs().iter().zip(&self.x) {
            a[v.index()] = *b;
        }
        for (v, b) in n.outputs().iter().zip(&self.z) {
            a[v.index()] = *b;
        }
        a
    }

    /// Input and output pins as name → bit maps.
    pub fn to_json(&self, n: &Circuit) -> serde_json::Value {
        let pins = |vars: &[Var], bits: &[bool]| -> IndexMap<String, u8> {
            vars.iter().zip(bits).map(|(v, b)| (n.var_name(*v).to_string(), *b as u8)).collect()
        };
        serde_json::json!({
            "x": pins(n.inputs(), &self.x),
            "z": pins(n.outputs(), &self.z),
            "broken_clause": self.broken_clause,
        })
    }

    /// `x1=1 x2=0 ...`
    pub fn input_text(&self, n: &Circuit) -> String {
        n.inputs()
            .iter()
            .zip(&self.x)
            .map(|(v, b)| format!("{}={}", n.var_name(*v), *b as u8))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Property {
    pub clauses: Vec<Clause>,
    pub status: Status3,
    /// Label of the mutation the property came from.
    pub provenance: Option<String>,
    pub witness: Option<TestVector>,
    /// Input-only clauses removed before classification.
    pub spurious: usize,
    /// `clauses` is a prefix of a PQE solution rather than a full one.
    pub partial: bool,
}

impl Property {
    pub fn is_false(&self) -> bool {
        self.status == Status3::False
    }

    pub fn to_json(&self, n: &Circuit, vm: &VarMap) -> serde_json::Value {
        serde_json::json!({
            "provenance": self.provenance,
            "status": self.status,
            "partial": self.partial,
            "spurious_clauses": self.spurious,
            "clauses": clauses_json(&self.clauses, vm),
            "witness": self.witness.as_ref().map(|w| w.to_json(n)),
        })
    }
}

pub fn clauses_json(clauses: &[Clause], vm: &VarMap) -> Vec<Vec<String>> {
    clauses
        .iter()
        .map(|c| c.lits().iter().map(|l| vm.lit_name(*l)).collect())
        .collect()
}

/// Whether every variable of `c` is among `inputs`.
pub fn is_input_only(c: &Clause, inputs: &[Var]) -> bool {
    c.vars().all(|v| inputs.contains(&v))
}

/// Drops input-only clauses, then looks for an assignment breaking `F ⇒ Q`.
///
/// `f` must be the encoding of `n`.
pub fn classify_property(n: &Circuit, f: &CnfFormula, q: &[Clause]) -> Property {
    let mut s = Solver::from_formula(f);
    classify_with(n, &mut s, q, false)
}

fn classify_with(n: &Circuit, s: &mut Solver, q: &[Clause], partial: bool) -> Property {
    let clauses: Vec<Clause> = q.iter().filter(|c| !is_input_only(c, n.inputs())).cloned().collect();
    let spurious = q.len() - clauses.len();
    let (status, witness) = match sat::break_with(s, &clauses) {
        Some(b) => (Status3::False, Some(TestVector::from_model(n, &b.model, b.clause))),
        None if partial => (Status3::Unknown, None),
        None => (Status3::True, None),
    };
    Property {
        clauses,
        status,
        provenance: None,
        witness,
        spurious,
        partial,
    }
}

/// PQE run and classification for one mutation.
#[derive(Clone, Debug)]
pub struct MutationOutcome {
    pub mutation: Mutation,
    /// `None` when a SAT call ran out of conflicts.
    pub property: Option<Property>,
    pub stats: PqeStats,
}

/// Takes `G*` of `m` out of the quantifier scope and classifies the result.
pub fn false_property(n: &Circuit, f: &CnfFormula, m: &Mutation, cfg: &PqeConfig) -> MutationOutcome {
    let split = m.apply(f).expect("mutation was built from this formula");
    let p = PqeProblem::combinational(split);
    let sol = pqe_cegar(&p, cfg);
    let property = match sol.termination {
        Termination::ConflictBudget => None,
        t => {
            let mut s = Solver::from_formula(f);
            s.set_conflict_budget(cfg.conflict_budget);
            let mut prop = classify_with(n, &mut s, &sol.clauses, t != Termination::Complete);
            prop.provenance = Some(m.label());
            Some(prop)
        }
    };
    MutationOutcome {
        mutation: m.clone(),
        property,
        stats: sol.stats,
    }
}

/// Clause sets over primary inputs and outputs.
#[derive(Clone, Debug, Default)]
pub struct Specification {
    /// Unproved properties `P_hrd`.
    pub phrd: Vec<Vec<Clause>>,
    /// Executable stand-in for the informal specification.
    pub golden: Option<Circuit>,
}

impl Specification {
    pub fn with_golden(mut self, n: &Circuit, golden: Circuit) -> Result<Specification, VerifyError> {
        check_signature(n, &golden)?;
        self.golden = Some(golden);
        Ok(self)
    }
}

fn check_signature(n: &Circuit, g: &Circuit) -> Result<(), VerifyError> {
    let names = |c: &Circuit, vs: &[Var]| vs.iter().map(|v| c.var_name(*v).to_string()).collect::<Vec<_>>();
    if g.is_sequential() {
        return Err(VerifyError::Signature("golden model has latches".into()));
    }
    if names(n, n.inputs()) != names(g, g.inputs()) {
        return Err(VerifyError::Signature(format!(
            "inputs {:?} vs {:?}",
            names(n, n.inputs()),
            names(g, g.inputs())
        )));
    }
    if n.outputs().len() != g.outputs().len() {
        return Err(VerifyError::Signature(format!(
            "{} outputs vs {}",
            n.outputs().len(),
            g.outputs().len()
        )));
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PropertyEntry {
    Clauses(Vec<Vec<String>>),
    Named { clauses: Vec<Vec<String>> },
}

/// Parses a property file: a JSON list of properties, each a list of
/// clauses, each a list of pin names with an optional `!` or `-` for negation.
/// A property may also be an object with a `clauses` field.
pub fn parse_properties(text: &str, n: &Circuit) -> Result<Vec<Vec<Clause>>, VerifyError> {
    let entries: Vec<PropertyEntry> = serde_json::from_str(text)?;
    let mut out = Vec::with_capacity(entries.len());
    for (pi, e) in entries.into_iter().enumerate() {
        let clauses = match e {
            PropertyEntry::Clauses(c) | PropertyEntry::Named { clauses: c } => c,
        };
        let mut prop = Vec::with_capacity(clauses.len());
        for (ci, c) in clauses.into_iter().enumerate() {
            let mut lits = Vec::with_capacity(c.len());
            for name in c {
                let (positive, pin) = match name.strip_prefix(['!', '-', '~']) {
                    Some(rest) => (false, rest),
                    None => (true, name.as_str()),
                };
                let v = n.find(pin).ok_or_else(|| VerifyError::UnknownPin {
                    property: pi,
                    name: pin.to_string(),
                })?;
                if !n.inputs().contains(&v) && !n.outputs().contains(&v) {
                    return Err(VerifyError::NotExternal {
                        property: pi,
                        name: pin.to_string(),
                    });
                }
                lits.push(Lit::new(v, positive));
            }
            prop.push(Clause::new(lits).map_err(|_| VerifyError::Tautology {
                property: pi,
                clause: ci,
            })?);
        }
        out.push(prop);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BugReason {
    /// The test falsifies clause `clause` of unproved property `property`.
    Phrd { property: usize, clause: usize },
    /// The golden model produces `expected` instead.
    Golden { expected: Vec<bool> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bug {
    pub test: TestVector,
    pub gate: usize,
    pub reason: BugReason,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateStatus {
    FalseProp,
    TrueProp,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateReport {
    pub gate: usize,
    pub status: GateStatus,
    /// Mutations tried, in order; the last one decided the status.
    pub mutations: Vec<String>,
    /// Index into [`CompsetReport::pfls`] for false properties.
    pub property: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompsetReport {
    pub tst: Option<Bug>,
    pub tests: Vec<TestVector>,
    pub pfls: Vec<Property>,
    /// One record per processed gate, in gate order.
    pub gates: Vec<GateReport>,
    pub sat_calls: u64,
}

impl CompsetReport {
    pub fn gates_processed(&self) -> Vec<usize> {
        self.gates.iter().map(|g| g.gate).collect()
    }

    pub fn skipped(&self) -> usize {
        self.gates.iter().filter(|g| g.status == GateStatus::Skipped).count()
    }

    pub fn to_json(&self, n: &Circuit, vm: &VarMap) -> serde_json::Value {
        let gates: Vec<serde_json::Value> = self
            .gates
            .iter()
            .map(|g| {
                serde_json::json!({
                    "gate": format!("g{}", g.gate + 1),
                    "signal": n.var_name(n.gates()[g.gate].output),
                    "status": g.status,
                    "mutations": g.mutations,
                    "property": g.property,
                })
            })
            .collect();
        let tst = self.tst.as_ref().map(|b| {
            let reason = match &b.reason {
                BugReason::Phrd { property, clause } => {
                    serde_json::json!({"kind": "phrd", "property": property, "clause": clause})
                }
                BugReason::Golden { expected } => {
                    let z: IndexMap<String, u8> = n
                        .outputs()
                        .iter()
                        .zip(expected)
                        .map(|(v, b)| (n.var_name(*v).to_string(), *b as u8))
                        .collect();
                    serde_json::json!({"kind": "golden", "expected": z})
                }
            };
            serde_json::json!({
                "test": b.test.to_json(n),
                "gate": format!("g{}", b.gate + 1),
                "reason": reason,
            })
        });
        serde_json::json!({
            "circuit": n.name(),
            "tst": tst,
            "tests": self.tests.iter().map(|t| t.to_json(n)).collect::<Vec<_>>(),
            "properties": self.pfls.iter().map(|p| p.to_json(n, vm)).collect::<Vec<_>>(),
            "gates": gates,
            "sat_calls": self.sat_calls,
        })
    }
}

#[derive(Clone, Debug)]
pub struct CompsetConfig {
    pub policy: Policy,
    pub pqe: PqeConfig,
    /// Keep going after the first bug-exposing test.
    pub continue_after_bug: bool,
    pub jobs: usize,
}

impl Default for CompsetConfig {
    fn default() -> Self {
        CompsetConfig {
            policy: Policy::AllGateSubst,
            pqe: PqeConfig::default(),
            continue_after_bug: false,
            jobs: 1,
        }
    }
}

/// Checks a test against the specification.
pub fn check_against(spec: &Specification, n: &Circuit, t: &TestVector) -> Option<BugReason> {
    let a = t.assignment(n);
    for (pi, p) in spec.phrd.iter().enumerate() {
        if let Some(ci) = p.iter().position(|c| !c.eval(&a)) {
            return Some(BugReason::Phrd {
                property: pi,
                clause: ci,
            });
        }
    }
    let golden = spec.golden.as_ref()?;
    let expected = golden.outputs_for(&t.x).ok()?;
    (expected != t.z).then_some(BugReason::Golden { expected })
}

struct GateOutcome {
    status: GateStatus,
    mutations: Vec<String>,
    property: Option<Property>,
    bug: Option<BugReason>,
    sat_calls: u64,
}

fn process_gate(
    spec: &Specification,
    n: &Circuit,
    f: &CnfFormula,
    gate: usize,
    cfg: &CompsetConfig,
) -> GateOutcome {
    let mut out = GateOutcome {
        status: GateStatus::Skipped,
        mutations: Vec::new(),
        property: None,
        bug: None,
        sat_calls: 0,
    };
    let mut any_true = false;
    for m in mutate::mutations_of_gate(f, gate, 0, cfg.policy) {
        out.mutations.push(m.label());
        let r = false_property(n, f, &m, &cfg.pqe);
        out.sat_calls += r.stats.sat_calls;
        match r.property {
            Some(p) if p.is_false() => {
                out.bug = p.witness.as_ref().and_then(|w| check_against(spec, n, w));
                out.status = GateStatus::FalseProp;
                out.property = Some(p);
                return out;
            }
            Some(p) if p.status == Status3::True => any_true = true,
            _ => {}
        }
    }
    if any_true {
        out.status = GateStatus::TrueProp;
    }
    out
}

/// Mutates every gate of `n` in turn and collects false properties and
/// the tests breaking them.
///
/// Per gate, the mutations of the policy are tried in catalog order until
/// one yields a false property. Its test is checked against `P_hrd` and the
/// golden model; a violation ends the run unless `continue_after_bug` is
/// set. Gates whose PQE runs all hit the conflict budget are reported as
/// skipped.
pub fn compset(spec: &Specification, n: &Circuit, cfg: &CompsetConfig) -> Result<CompsetReport, VerifyError> {
    if n.is_sequential() {
        return Err(VerifyError::Sequential);
    }
    if let Some(g) = &spec.golden {
        check_signature(n, g)?;
    }
    let f = encode_circuit(n);
    let gates: Vec<usize> = (0..n.gates().len()).collect();
    let first_bug = AtomicUsize::new(usize::MAX);
    let run = |&gate: &usize| -> Option<GateOutcome> {
        if !cfg.continue_after_bug && gate > first_bug.load(Ordering::Relaxed) {
            return None;
        }
        let o = process_gate(spec, n, &f, gate, cfg);
        if o.bug.is_some() {
            first_bug.fetch_min(gate, Ordering::Relaxed);
        }
        Some(o)
    };
    let outcomes: Vec<Option<GateOutcome>> = if cfg.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .expect("thread pool");
        pool.install(|| gates.par_iter().map(run).collect())
    } else {
        gates.iter().map(run).collect()
    };

    let mut report = CompsetReport {
        tst: None,
        tests: Vec::new(),
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
            let w = p.witness.clone().expect("false property has a witness");
            record.property = Some(report.pfls.len());
            report.pfls.push(p);
            match o.bug {
                Some(reason) if report.tst.is_none() => {
                    report.tst = Some(Bug { test: w, gate, reason });
                }
                Some(_) => {}
                None => {
                    if !report.tests.iter().any(|t| t.x == w.x) {
                        report.tests.push(w);
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

/// A test breaking two properties at once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointTest {
    pub test: TestVector,
    /// Falsified clause of the first and of the second property.
    pub clauses: (usize, usize),
}

/// Looks for one input vector whose execution breaks both `q1` and `q2`,
/// trying clause pairs in lexicographic order.
pub fn joint_test(n: &Circuit, f: &CnfFormula, q1: &[Clause], q2: &[Clause]) -> Option<JointTest> {
    let mut s = Solver::from_formula(f);
    for (i, c1) in q1.iter().enumerate() {
        for (j, c2) in q2.iter().enumerate() {
            let mut assumptions: Vec<Lit> = c1.lits().iter().chain(c2.lits()).map(|l| !*l).collect();
            assumptions.sort();
            assumptions.dedup();
            if assumptions.windows(2).any(|w| w[0].var() == w[1].var()) {
                continue;
            }
            if s.solve(&assumptions) == Status::Sat {
                return Some(JointTest {
                    test: TestVector::from_model(n, s.model(), i),
                    clauses: (i, j),
                });
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtpgResult {
    Detected(TestVector),
    /// No input distinguishes the faulty circuit: the fault is redundant.
    Undetectable,
    /// A SAT call ran out of conflicts.
    Aborted,
}

impl AtpgResult {
    pub fn test(&self) -> Option<&TestVector> {
        match self {
            AtpgResult::Detected(t) => Some(t),
            _ => None,
        }
    }
}

/// Test generation for the fault "output of `gate` stuck at `value`".
///
/// PQE on the stuck-at group stops at the first generated clause `B` not
/// implied by `F`; a model of `F ∧ ¬B` is a test. If PQE finishes without
/// such a clause, the property is true and the fault undetectable.
pub fn atpg_stuck_at(n: &Circuit, gate: usize, value: bool, cfg: &PqeConfig) -> AtpgResult {
    let f = encode_circuit(n);
    atpg_in(n, &f, gate, value, cfg)
}

pub fn atpg_in(n: &Circuit, f: &CnfFormula, gate: usize, value: bool, cfg: &PqeConfig) -> AtpgResult {
    let m = mutate::stuck_at(f, gate, 0, value).expect("gate exists");
    if m.identity {
        return AtpgResult::Undetectable;
    }
    let split = m.apply(f).expect("mutation was built from this formula");
    let cfg = PqeConfig {
        early_stop: true,
        noise_filter: false,
        ..cfg.clone()
    };
    let sol = pqe_cegar(&PqeProblem::combinational(split), &cfg);
    match sol.termination {
        Termination::EarlyStop => {
            let b = sol.clauses.last().unwrap();
            let r = sat::solve(f, &b.lits().iter().map(|l| !*l).collect::<Vec<_>>());
            let model = r.model.expect("B is not implied by F");
            AtpgResult::Detected(TestVector::from_model(n, &model, sol.clauses.len() - 1))
        }
        Termination::Complete => AtpgResult::Undetectable,
        Termination::ClauseBudget | Termination::ConflictBudget => AtpgResult::Aborted,
    }
}

/// CNF that is satisfiable iff `a` and `b` differ on some input vector.
///
/// Variables of `a` keep their ids; `b`'s signals follow, with its primary
/// inputs identified with `a`'s, then one difference variable per output.
pub fn miter(a: &Circuit, b: &Circuit) -> Result<CnfFormula, VerifyError> {
    check_signature(a, b)?;
    let fa = encode_circuit(a);
    let fb = encode_circuit(b);
    let na = a.num_vars();
    let mut map: Vec<Var> = (0..b.num_vars()).map(|i| Var((na + i) as u32)).collect();
    for (vb, va) in b.inputs().iter().zip(a.inputs()) {
        map[vb.index()] = *va;
    }
    let total = na + b.num_vars() + a.outputs().len();
    let mut f = fa.with_clauses(fa.clauses().to_vec());
    for i in f.num_vars()..total {
        f.var_map_mut().push(crate::cnf::Role::Internal, 0, format!("m{i}"));
    }
    for c in fb.clauses() {
        f.push(c.rename(|v| map[v.index()])).expect("renamed clause is in range");
    }
    let diffs: Vec<Var> = (0..a.outputs().len()).map(|k| Var((na + b.num_vars() + k) as u32)).collect();
    for ((za, zb), d) in a.outputs().iter().zip(b.outputs()).zip(&diffs) {
        for c in encode_gate(&crate::netlist::Gate::new(GateKind::Xor, vec![*za, map[zb.index()]], *d)) {
            f.push(c).expect("in range");
        }
    }
    f.push(Clause::new(diffs.iter().map(|d| Lit::pos(*d))).expect("distinct")).expect("in range");
    Ok(f)
}

/// An input vector on which `a` and `b` differ, found by SAT on the miter.
pub fn distinguishing_input(a: &Circuit, b: &Circuit) -> Result<Option<Vec<bool>>, VerifyError> {
    let m = miter(a, b)?;
    let r = sat::solve(&m, &[]);
    Ok(r.model.map(|model| a.inputs().iter().map(|v| model[v.index()]).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{parse_netlist, Format};

    const TOY1: &str = "input x1 x2 x3; y = AND(x1,x2); z = OR(y,x3); output z;";
    const TOY1_BUGGY: &str = "input x1 x2 x3; y = OR(x1,x2); z = OR(y,x3); output z;";
    const AND1: &str = "input v1 v2; v3 = AND(v1,v2); output v3;";

    fn c(src: &str) -> Circuit {
        parse_netlist(src, Format::Simple).unwrap()
    }

    fn and_to_or(n: &Circuit) -> Property {
        let f = encode_circuit(n);
        let m = mutate::gate_subst(&f, 0, 0, GateKind::Or).unwrap();
        false_property(n, &f, &m, &PqeConfig::default()).property.unwrap()
    }

    #[test]
    fn empty_property_is_true() {
        let n = c(TOY1);
        let p = classify_property(&n, &encode_circuit(&n), &[]);
        assert_eq!(p.status, Status3::True);
        assert!(p.witness.is_none());
    }

    #[test]
    fn toy1_and_to_or_is_false_with_expected_witness() {
        let n = c(TOY1);
        let p = and_to_or(&n);
        assert!(p.is_false());
        let w = p.witness.unwrap();
        assert!(w.x == [true, false, false] || w.x == [false, true, false]);
        assert_eq!(w.z, [false]);
        assert!(w.replays(&n));
        assert!(!p.clauses[w.broken_clause].eval(&w.assignment(&n)));
    }

    #[test]
    fn input_only_clauses_are_filtered() {
        let n = c(TOY1);
        let f = encode_circuit(&n);
        let q = [Clause::new([Lit::neg(Var(0))]).unwrap()];
        let p = classify_property(&n, &f, &q);
        assert_eq!(p.spurious, 1);
        assert!(p.clauses.is_empty());
        assert_eq!(p.status, Status3::True);
    }

    #[test]
    fn compset_toy1_plain_and_self_golden() {
        let n = c(TOY1);
        let cfg = CompsetConfig::default();
        let r = compset(&Specification::default(), &n, &cfg).unwrap();
        assert_eq!(r.gates_processed(), vec![0, 1]);
        assert!(!r.pfls.is_empty());
        assert!(r.tst.is_none());
        let spec = Specification::default().with_golden(&n, n.clone()).unwrap();
        let r2 = compset(&spec, &n, &cfg).unwrap();
        assert_eq!(r, r2);
    }

    #[test]
    fn compset_finds_seeded_bug() {
        let golden = c(TOY1);
        let n = c(TOY1_BUGGY);
        let spec = Specification::default().with_golden(&n, golden.clone()).unwrap();
        let r = compset(&spec, &n, &CompsetConfig::default()).unwrap();
        let bug = r.tst.expect("bug exposed");
        assert_ne!(golden.outputs_for(&bug.test.x).unwrap(), bug.test.z);
        assert!(bug.test.replays(&n));
    }

    #[test]
    fn phrd_violation_is_reported() {
        let n = c(TOY1);
        // "z is always 1" does not hold
        let phrd = parse_properties(r#"[[["z"]]]"#, &n).unwrap();
        let spec = Specification { phrd, golden: None };
        let r = compset(&spec, &n, &CompsetConfig::default()).unwrap();
        let bug = r.tst.unwrap();
        assert_eq!(bug.reason, BugReason::Phrd { property: 0, clause: 0 });
        assert_eq!(bug.test.z, [false]);
        assert_eq!(r.gates.len(), 1);
    }

    #[test]
    fn property_file_errors() {
        let n = c(TOY1);
        assert!(matches!(parse_properties("[[[\"q\"]]]", &n), Err(VerifyError::UnknownPin { .. })));
        assert!(matches!(parse_properties("[[[\"y\"]]]", &n), Err(VerifyError::NotExternal { .. })));
        assert!(matches!(parse_properties("[[[\"z\", \"!z\"]]]", &n), Err(VerifyError::Tautology { .. })));
        let ok = parse_properties(r#"[{"clauses": [["-x1", "z"]]}]"#, &n).unwrap();
        assert_eq!(ok[0][0].lits(), &[Lit::neg(Var(0)), Lit::pos(n.find("z").unwrap())]);
    }

    #[test]
    fn atpg_lone_and_stuck_at_zero() {
        let n = c(AND1);
        let t = atpg_stuck_at(&n, 0, false, &PqeConfig::default());
        assert_eq!(t.test().unwrap().x, [true, true]);
    }

    #[test]
    fn atpg_masked_fault_is_undetectable() {
        let n = c("input a b; k = CONST0(); y = OR(a,b); z = AND(y,k); output z;");
        let y = n.driver(n.find("y").unwrap()).unwrap();
        for v in [false, true] {
            assert_eq!(atpg_stuck_at(&n, y, v, &PqeConfig::default()), AtpgResult::Undetectable);
            assert!(distinguishing_input(&n, &n.with_stuck_at(y, v)).unwrap().is_none());
        }
    }

    #[test]
    fn joint_test_cases() {
        let n = c(TOY1);
        let f = encode_circuit(&n);
        let p = and_to_or(&n);
        let j = joint_test(&n, &f, &p.clauses, &p.clauses).unwrap();
        assert!(j.test.replays(&n));
        // z=1 is broken only when z=0 and z=0 only when broken; ¬z never together with z
        let z = n.find("z").unwrap();
        let q1 = [Clause::new([Lit::pos(z)]).unwrap()];
        let q2 = [Clause::new([Lit::neg(z)]).unwrap()];
        assert!(joint_test(&n, &f, &q1, &q2).is_none());
    }

    #[test]
    fn miter_detects_difference() {
        let a = c(TOY1);
        let b = c(TOY1_BUGGY);
        let x = distinguishing_input(&a, &b).unwrap().unwrap();
        assert_ne!(a.outputs_for(&x).unwrap(), b.outputs_for(&x).unwrap());
        assert!(distinguishing_input(&a, &a).unwrap().is_none());
    }
}
