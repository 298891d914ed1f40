//! Clause database, per-gate encodings, variable roles and clause-group surgery.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Not;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::{Circuit, Gate, GateKind, SignalRole, Var};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("clause index {index} out of range (formula has {len} clauses)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("clause contains both {0} and its negation")]
    Tautology(Lit),
    #[error("variable {0} is not registered in the formula")]
    UnknownVar(Var),
    #[error("DIMACS line {line}: {message}")]
    Dimacs { line: usize, message: String },
}

/// A literal, packed as `2 * var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit(var.0 << 1 | (!positive) as u32)
    }

    #[inline]
    pub fn pos(var: Var) -> Lit {
        Lit::new(var, true)
    }

    #[inline]
    pub fn neg(var: Var) -> Lit {
        Lit::new(var, false)
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_code(code: usize) -> Lit {
        Lit(code as u32)
    }

    /// Value of the literal under a total assignment indexed by variable.
    #[inline]
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var().index()] == self.is_positive()
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var().0 as i64 + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(d: i64) -> Lit {
        assert!(d != 0);
        Lit::new(Var(d.unsigned_abs() as u32 - 1), d > 0)
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "{}", self.var())
        } else {
            write!(f, "¬{}", self.var())
        }
    }
}

/// Where a clause came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Gate {
        gate: u32,
        frame: u32,
    },
    /// Initial-state constraint of an unrolled formula.
    Init,
    #[default]
    Derived,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
    pub origin: Origin,
}

impl Clause {
    /// Builds a clause, dropping repeated literals. Tautologies are rejected.
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Clause, CnfError> {
        Clause::with_origin(lits, Origin::Derived)
    }

    pub fn with_origin(lits: impl IntoIterator<Item = Lit>, origin: Origin) -> Result<Clause, CnfError> {
        let mut out: Vec<Lit> = Vec::new();
        for l in lits {
            if out.contains(&!l) {
                return Err(CnfError::Tautology(l));
            }
            if !out.contains(&l) {
                out.push(l);
            }
        }
        Ok(Clause { lits: out, origin })
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.lits.iter().map(|l| l.var())
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.lits.iter().any(|l| l.eval(assignment))
    }

    /// Sorted literal set, for set-semantics comparisons.
    pub fn key(&self) -> Vec<Lit> {
        let mut k = self.lits.clone();
        k.sort();
        k
    }

    pub fn same_lits(&self, other: &Clause) -> bool {
        self.key() == other.key()
    }

    /// True if every literal of `self` occurs in `other`.
    pub fn subsumes(&self, other: &Clause) -> bool {
        self.lits.iter().all(|l| other.lits.contains(l))
    }

    /// The clause with variables renamed through `map`.
    pub fn rename(&self, map: impl Fn(Var) -> Var) -> Clause {
        Clause {
            lits: self.lits.iter().map(|l| Lit::new(map(l.var()), l.is_positive())).collect(),
            origin: self.origin,
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return f.write_str("⊥");
        }
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∨ ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "x")]
    Input,
    #[serde(rename = "y")]
    Internal,
    #[serde(rename = "z")]
    Output,
    #[serde(rename = "s")]
    State,
    #[serde(rename = "sn")]
    NextState,
}

impl Role {
    pub const ALL: [Role; 5] = [Role::Input, Role::Internal, Role::Output, Role::State, Role::NextState];

    pub fn tag(self) -> &'static str {
        match self {
            Role::Input => "x",
            Role::Internal => "y",
            Role::Output => "z",
            Role::State => "s",
            Role::NextState => "sn",
        }
    }

    fn from_tag(t: &str) -> Option<Role> {
        Role::ALL.into_iter().find(|r| r.tag() == t)
    }
}

impl From<SignalRole> for Role {
    fn from(r: SignalRole) -> Role {
        match r {
            SignalRole::Input => Role::Input,
            SignalRole::State => Role::State,
            SignalRole::Internal => Role::Internal,
            SignalRole::Output => Role::Output,
            SignalRole::NextState => Role::NextState,
        }
    }
}

/// Role, time frame and display name of every variable.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VarMap {
    roles: Vec<Role>,
    frames: Vec<u32>,
    names: Vec<String>,
}

impl VarMap {
    pub fn new() -> VarMap {
        VarMap::default()
    }

    pub fn push(&mut self, role: Role, frame: u32, name: impl Into<String>) -> Var {
        self.roles.push(role);
        self.frames.push(frame);
        self.names.push(name.into());
        Var(self.roles.len() as u32 - 1)
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    pub fn role(&self, v: Var) -> Role {
        self.roles[v.index()]
    }

    pub fn set_role(&mut self, v: Var, role: Role) {
        self.roles[v.index()] = role;
    }

    pub fn frame(&self, v: Var) -> u32 {
        self.frames[v.index()]
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v.index()]
    }

    pub fn find(&self, name: &str) -> Option<Var> {
        self.names.iter().position(|n| n == name).map(|i| Var(i as u32))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (0..self.roles.len() as u32).map(Var)
    }

    pub fn with_role(&self, role: Role) -> Vec<Var> {
        self.vars().filter(|v| self.role(*v) == role).collect()
    }

    pub fn contains(&self, v: Var) -> bool {
        v.index() < self.roles.len()
    }

    /// Renders a literal with the variable's name, `!` marking negation.
    pub fn lit_name(&self, l: Lit) -> String {
        if l.is_positive() {
            self.name(l.var()).to_string()
        } else {
            format!("!{}", self.name(l.var()))
        }
    }
}

/// A gate as it appears in a formula: kind and pins in formula variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateRecord {
    pub gate: u32,
    pub frame: u32,
    pub kind: GateKind,
    pub inputs: Vec<Var>,
    pub output: Var,
}

impl GateRecord {
    pub fn as_gate(&self) -> Gate {
        Gate::new(self.kind, self.inputs.clone(), self.output)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CnfFormula {
    clauses: Vec<Clause>,
    var_map: VarMap,
    inputs: Vec<Var>,
    outputs: Vec<Var>,
    gates: Vec<GateRecord>,
}

impl CnfFormula {
    pub fn new(var_map: VarMap) -> CnfFormula {
        CnfFormula {
            var_map,
            ..CnfFormula::default()
        }
    }

    /// Formula over `n` anonymous internal variables `v1..vn`.
    pub fn with_vars(n: usize) -> CnfFormula {
        let mut vm = VarMap::new();
        for i in 0..n {
            vm.push(Role::Internal, 0, format!("v{}", i + 1));
        }
        CnfFormula::new(vm)
    }

    pub fn push(&mut self, clause: Clause) -> Result<usize, CnfError> {
        if let Some(v) = clause.vars().find(|v| !self.var_map.contains(*v)) {
            return Err(CnfError::UnknownVar(v));
        }
        self.clauses.push(clause);
        Ok(self.clauses.len() - 1)
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, i: usize) -> &Clause {
        &self.clauses[i]
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.var_map.len()
    }

    pub fn var_map(&self) -> &VarMap {
        &self.var_map
    }

    pub fn var_map_mut(&mut self) -> &mut VarMap {
        &mut self.var_map
    }

    /// Primary inputs in port order.
    pub fn inputs(&self) -> &[Var] {
        &self.inputs
    }

    /// Primary outputs in port order.
    pub fn outputs(&self) -> &[Var] {
        &self.outputs
    }

    pub fn set_ports(&mut self, inputs: Vec<Var>, outputs: Vec<Var>) {
        self.inputs = inputs;
        self.outputs = outputs;
    }

    pub fn gates(&self) -> &[GateRecord] {
        &self.gates
    }

    pub fn add_gate_record(&mut self, r: GateRecord) {
        self.gates.push(r);
    }

    pub fn gate_record(&self, gate: usize, frame: u32) -> Option<&GateRecord> {
        self.gates.iter().find(|r| r.gate as usize == gate && r.frame == frame)
    }

    /// Variables occurring in some clause.
    pub fn vars(&self) -> BTreeSet<Var> {
        self.clauses.iter().flat_map(|c| c.vars()).collect()
    }

    /// Indices of the clauses encoding `gate` in time frame `frame`.
    pub fn group(&self, gate: usize, frame: u32) -> Vec<usize> {
        let want = Origin::Gate {
            gate: gate as u32,
            frame,
        };
        (0..self.clauses.len()).filter(|&i| self.clauses[i].origin == want).collect()
    }

    /// Indices of the initial-state clauses.
    pub fn init_clauses(&self) -> Vec<usize> {
        (0..self.clauses.len()).filter(|&i| self.clauses[i].origin == Origin::Init).collect()
    }

    /// The formula restricted to the given clauses (same variables).
    pub fn subset(&self, indices: &[usize]) -> CnfFormula {
        CnfFormula {
            clauses: indices.iter().map(|&i| self.clauses[i].clone()).collect(),
            var_map: self.var_map.clone(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            gates: self.gates.clone(),
        }
    }

    /// Same variables and metadata, different clauses.
    pub fn with_clauses(&self, clauses: Vec<Clause>) -> CnfFormula {
        CnfFormula {
            clauses,
            var_map: self.var_map.clone(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            gates: self.gates.clone(),
        }
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.eval(assignment))
    }

    pub fn clause_names(&self, c: &Clause) -> Vec<String> {
        c.lits().iter().map(|l| self.var_map.lit_name(*l)).collect()
    }
}

/// Clauses falsified exactly by the rows outside the gate's truth table.
pub fn encode_gate(g: &Gate) -> Vec<Clause> {
    encode_gate_with(g, Origin::Derived)
}

pub fn encode_gate_with(g: &Gate, origin: Origin) -> Vec<Clause> {
    let out = g.output;
    let ins = &g.inputs;
    let mk = |lits: Vec<Lit>| Clause::with_origin(lits, origin).expect("gate fan-in is duplicate free");
    let all = |positive: bool, o: Lit| -> Clause {
        let mut lits: Vec<Lit> = ins.iter().map(|v| Lit::new(*v, positive)).collect();
        lits.push(o);
        mk(lits)
    };
    match g.kind {
        GateKind::And | GateKind::Nand => {
            let o = if g.kind == GateKind::And { Lit::pos(out) } else { Lit::neg(out) };
            let mut cs: Vec<Clause> = ins.iter().map(|v| mk(vec![Lit::pos(*v), !o])).collect();
            cs.push(all(false, o));
            cs
        }
        GateKind::Or | GateKind::Nor => {
            let o = if g.kind == GateKind::Or { Lit::pos(out) } else { Lit::neg(out) };
            let mut cs: Vec<Clause> = ins.iter().map(|v| mk(vec![Lit::neg(*v), o])).collect();
            cs.push(all(true, !o));
            cs
        }
        GateKind::Xor | GateKind::Xnor => {
            // One clause per input row, forbidding the wrong output value.
            let n = ins.len();
            (0..1usize << n)
                .map(|row| {
                    let parity = row.count_ones() % 2 == 1;
                    let value = if g.kind == GateKind::Xor { parity } else { !parity };
                    let mut lits: Vec<Lit> = (0..n).map(|i| Lit::new(ins[i], row >> i & 1 == 0)).collect();
                    lits.push(Lit::new(out, value));
                    mk(lits)
                })
                .collect()
        }
        GateKind::Not => vec![mk(vec![Lit::pos(ins[0]), Lit::pos(out)]), mk(vec![Lit::neg(ins[0]), Lit::neg(out)])],
        GateKind::Buf => vec![mk(vec![Lit::pos(ins[0]), Lit::neg(out)]), mk(vec![Lit::neg(ins[0]), Lit::pos(out)])],
        GateKind::Const0 => vec![mk(vec![Lit::neg(out)])],
        GateKind::Const1 => vec![mk(vec![Lit::pos(out)])],
    }
}

/// Conjunction of the gate encodings of `c`; variables keep the circuit ids.
pub fn encode_circuit(c: &Circuit) -> CnfFormula {
    let mut vm = VarMap::new();
    for (i, name) in c.names().iter().enumerate() {
        vm.push(c.role(Var(i as u32)).into(), 0, name.clone());
    }
    let mut f = CnfFormula::new(vm);
    f.set_ports(c.inputs().to_vec(), c.outputs().to_vec());
    for (i, g) in c.gates().iter().enumerate() {
        let origin = Origin::Gate {
            gate: i as u32,
            frame: 0,
        };
        for cl in encode_gate_with(g, origin) {
            f.clauses.push(cl);
        }
        f.gates.push(GateRecord {
            gate: i as u32,
            frame: 0,
            kind: g.kind,
            inputs: g.inputs.clone(),
            output: g.output,
        });
    }
    f
}

/// `F* = G* ∧ F'` with both parts addressable by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitFormula {
    pub formula: CnfFormula,
    /// Indices of the replacement clauses `G*` in `formula`.
    pub g_star: Vec<usize>,
    /// Indices of the untouched clauses `F'` in `formula`.
    pub f_prime: Vec<usize>,
    /// For each clause of `formula`, its index in the original formula (if kept).
    pub source: Vec<Option<usize>>,
    /// The replaced group `G`, so that `F = F' ∧ G` can be rebuilt.
    pub removed: Vec<Clause>,
}

impl SplitFormula {
    pub fn g_star_formula(&self) -> CnfFormula {
        self.formula.subset(&self.g_star)
    }

    pub fn f_prime_formula(&self) -> CnfFormula {
        self.formula.subset(&self.f_prime)
    }

    /// The formula before replacement, `F' ∧ G`.
    pub fn original(&self) -> CnfFormula {
        let mut clauses: Vec<Clause> = self.f_prime.iter().map(|&i| self.formula.clause(i).clone()).collect();
        clauses.extend(self.removed.iter().cloned());
        self.formula.with_clauses(clauses)
    }
}

/// Replaces clause group `g` of `f` by `g_star`.
///
/// The result lists the clauses of `F' = F \ G` first, in their original
/// order, followed by the clauses of `G*`.
pub fn replace_group(f: &CnfFormula, g: &[usize], g_star: Vec<Clause>) -> Result<SplitFormula, CnfError> {
    let removed: BTreeSet<usize> = g.iter().copied().collect();
    if let Some(&index) = removed.iter().find(|&&i| i >= f.len()) {
        return Err(CnfError::IndexOutOfRange { index, len: f.len() });
    }
    if let Some(v) = g_star.iter().flat_map(|c| c.vars()).find(|v| !f.var_map.contains(*v)) {
        return Err(CnfError::UnknownVar(v));
    }
    let mut clauses = Vec::with_capacity(f.len() - removed.len() + g_star.len());
    let mut source = Vec::with_capacity(clauses.capacity());
    for (i, c) in f.clauses.iter().enumerate() {
        if !removed.contains(&i) {
            clauses.push(c.clone());
            source.push(Some(i));
        }
    }
    let kept = clauses.len();
    let added = g_star.len();
    clauses.extend(g_star);
    source.extend(std::iter::repeat_n(None, added));
    Ok(SplitFormula {
        formula: f.with_clauses(clauses),
        g_star: (kept..kept + added).collect(),
        f_prime: (0..kept).collect(),
        source,
        removed: removed.iter().map(|&i| f.clauses[i].clone()).collect(),
    })
}

// ---------------------------------------------------------------------------
// DIMACS

fn group_key(gate: u32, frame: u32) -> String {
    if frame == 0 {
        gate.to_string()
    } else {
        format!("{gate}@{frame}")
    }
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
}

/// DIMACS text with role, name, port and clause-group comments.
pub fn export_dimacs(f: &CnfFormula) -> String {
    let vm = &f.var_map;
    let mut s = String::new();
    for role in Role::ALL {
        let ids = vm.with_role(role);
        if !ids.is_empty() {
            s.push_str(&format!("c role {} {}\n", role.tag(), join(ids.iter().map(|v| v.0 + 1))));
        }
    }
    let mut by_frame: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for v in vm.vars() {
        if vm.frame(v) != 0 {
            by_frame.entry(vm.frame(v)).or_default().push(v.0 + 1);
        }
    }
    for (frame, ids) in by_frame {
        s.push_str(&format!("c frame {frame} {}\n", join(ids)));
    }
    for v in vm.vars() {
        s.push_str(&format!("c name {} {}\n", v.0 + 1, vm.name(v)));
    }
    if !f.inputs.is_empty() {
        s.push_str(&format!("c port in {}\n", join(f.inputs.iter().map(|v| v.0 + 1))));
    }
    if !f.outputs.is_empty() {
        s.push_str(&format!("c port out {}\n", join(f.outputs.iter().map(|v| v.0 + 1))));
    }
    for r in &f.gates {
        s.push_str(&format!(
            "c gate {} {} {} {}\n",
            group_key(r.gate, r.frame),
            r.kind,
            r.output.0 + 1,
            join(r.inputs.iter().map(|v| v.0 + 1))
        ));
    }
    let mut groups: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
    let mut init = Vec::new();
    for (i, c) in f.clauses.iter().enumerate() {
        match c.origin {
            Origin::Gate { gate, frame } => groups.entry((frame, gate)).or_default().push(i),
            Origin::Init => init.push(i),
            Origin::Derived => {}
        }
    }
    for ((frame, gate), idx) in groups {
        s.push_str(&format!("c group {} {}\n", group_key(gate, frame), join(idx)));
    }
    if !init.is_empty() {
        s.push_str(&format!("c init {}\n", join(init)));
    }
    s.push_str(&format!("p cnf {} {}\n", vm.len(), f.clauses.len()));
    for c in &f.clauses {
        for l in c.lits() {
            s.push_str(&format!("{} ", l.to_dimacs()));
        }
        s.push_str("0\n");
    }
    s
}

pub fn import_dimacs(text: &str) -> Result<CnfFormula, CnfError> {
    let err = |line: usize, message: &str| CnfError::Dimacs {
        line: line + 1,
        message: message.to_string(),
    };
    let mut header: Option<(usize, usize)> = None;
    let mut roles: BTreeMap<u32, Role> = BTreeMap::new();
    let mut frames: BTreeMap<u32, u32> = BTreeMap::new();
    let mut names: BTreeMap<u32, String> = BTreeMap::new();
    let mut groups: Vec<(Origin, Vec<usize>)> = Vec::new();
    let mut gates: Vec<(u32, u32, GateKind, u32, Vec<u32>)> = Vec::new();
    let (mut port_in, mut port_out) = (Vec::new(), Vec::new());
    let mut raw: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();

    let parse_ids = |ws: &[&str], line: usize| -> Result<Vec<u32>, CnfError> {
        ws.iter()
            .map(|w| w.parse::<u32>().ok().filter(|v| *v > 0).ok_or_else(|| err(line, "bad variable id")))
            .collect()
    };
    let parse_key = |w: &str, line: usize| -> Result<(u32, u32), CnfError> {
        let (g, fr) = w.split_once('@').unwrap_or((w, "0"));
        Ok((
            g.parse().map_err(|_| err(line, "bad gate id"))?,
            fr.parse().map_err(|_| err(line, "bad frame"))?,
        ))
    };

    for (ln, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        if let Some(rest) = t.strip_prefix('c') {
            let ws: Vec<&str> = rest.split_whitespace().collect();
            match ws.first().copied() {
                Some("role") if ws.len() >= 2 => {
                    if let Some(role) = Role::from_tag(ws[1]) {
                        for id in parse_ids(&ws[2..], ln)? {
                            roles.insert(id, role);
                        }
                    }
                }
                Some("frame") if ws.len() >= 2 => {
                    let fr: u32 = ws[1].parse().map_err(|_| err(ln, "bad frame"))?;
                    for id in parse_ids(&ws[2..], ln)? {
                        frames.insert(id, fr);
                    }
                }
                Some("name") if ws.len() == 3 => {
                    let id = parse_ids(&ws[1..2], ln)?[0];
                    names.insert(id, ws[2].to_string());
                }
                Some("port") if ws.len() >= 2 => {
                    let ids = parse_ids(&ws[2..], ln)?;
                    match ws[1] {
                        "in" => port_in = ids,
                        "out" => port_out = ids,
                        _ => return Err(err(ln, "unknown port kind")),
                    }
                }
                Some("gate") if ws.len() >= 4 => {
                    let (g, fr) = parse_key(ws[1], ln)?;
                    let kind: GateKind = ws[2].parse().map_err(|m: String| err(ln, &m))?;
                    let ids = parse_ids(&ws[3..], ln)?;
                    gates.push((g, fr, kind, ids[0], ids[1..].to_vec()));
                }
                Some("group") if ws.len() >= 2 => {
                    let (gate, frame) = parse_key(ws[1], ln)?;
                    let idx = ws[2..]
                        .iter()
                        .map(|w| w.parse::<usize>().map_err(|_| err(ln, "bad clause index")))
                        .collect::<Result<Vec<_>, _>>()?;
                    groups.push((Origin::Gate { gate, frame }, idx));
                }
                Some("init") => {
                    let idx = ws[1..]
                        .iter()
                        .map(|w| w.parse::<usize>().map_err(|_| err(ln, "bad clause index")))
                        .collect::<Result<Vec<_>, _>>()?;
                    groups.push((Origin::Init, idx));
                }
                _ => {}
            }
            continue;
        }
        if let Some(rest) = t.strip_prefix('p') {
            if header.is_some() {
                return Err(err(ln, "duplicate problem line"));
            }
            let ws: Vec<&str> = rest.split_whitespace().collect();
            if ws.len() != 3 || ws[0] != "cnf" {
                return Err(err(ln, "expected `p cnf <vars> <clauses>`"));
            }
            let nv = ws[1].parse().map_err(|_| err(ln, "bad variable count"))?;
            let nc = ws[2].parse().map_err(|_| err(ln, "bad clause count"))?;
            header = Some((nv, nc));
            continue;
        }
        let (nv, _) = header.ok_or_else(|| err(ln, "clause before problem line"))?;
        for w in t.split_whitespace() {
            let d: i64 = w.parse().map_err(|_| err(ln, "expected integer literal"))?;
            if d == 0 {
                raw.push(std::mem::take(&mut current));
            } else {
                if d.unsigned_abs() as usize > nv {
                    return Err(err(ln, "literal exceeds declared variable count"));
                }
                current.push(d);
            }
        }
    }
    let (nv, nc) = header.ok_or_else(|| err(0, "missing problem line"))?;
    if !current.is_empty() {
        return Err(err(text.lines().count().saturating_sub(1), "last clause not terminated by 0"));
    }
    if raw.len() != nc {
        return Err(err(0, &format!("header declares {nc} clauses, found {}", raw.len())));
    }

    let mut vm = VarMap::new();
    for id in 1..=nv as u32 {
        vm.push(
            roles.get(&id).copied().unwrap_or(Role::Internal),
            frames.get(&id).copied().unwrap_or(0),
            names.get(&id).cloned().unwrap_or_else(|| format!("v{id}")),
        );
    }
    let mut origins = vec![Origin::Derived; raw.len()];
    for (o, idx) in groups {
        for i in idx {
            if i >= raw.len() {
                return Err(err(0, "group refers to a missing clause"));
            }
            origins[i] = o;
        }
    }
    let mut f = CnfFormula::new(vm);
    // Tautologies are dropped; repeated literals collapse.
    for (lits, origin) in raw.into_iter().zip(origins) {
        if let Ok(c) = Clause::with_origin(lits.into_iter().map(Lit::from_dimacs), origin) {
            f.clauses.push(c);
        }
    }
    let to_var = |id: u32| Var(id - 1);
    let check = |id: u32| -> Result<Var, CnfError> {
        if id as usize > nv {
            Err(err(0, "comment refers to an undeclared variable"))
        } else {
            Ok(to_var(id))
        }
    };
    f.inputs = port_in.into_iter().map(check).collect::<Result<_, _>>()?;
    f.outputs = port_out.into_iter().map(check).collect::<Result<_, _>>()?;
    for (gate, frame, kind, out, ins) in gates {
        f.gates.push(GateRecord {
            gate,
            frame,
            kind,
            inputs: ins.into_iter().map(check).collect::<Result<_, _>>()?,
            output: check(out)?,
        });
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{parse_netlist, Format};

    fn v(i: u32) -> Var {
        Var(i - 1)
    }

    fn models(f: &CnfFormula) -> Vec<Vec<bool>> {
        let n = f.num_vars();
        (0..1usize << n)
            .map(|r| (0..n).map(|i| r >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|a| f.eval(a))
            .collect()
    }

    #[test]
    fn and_gate_matches_worked_example() {
        let g = Gate::new(GateKind::And, vec![v(1), v(2)], v(3));
        let cs = encode_gate(&g);
        let want = [
            vec![Lit::pos(v(1)), Lit::neg(v(3))],
            vec![Lit::pos(v(2)), Lit::neg(v(3))],
            vec![Lit::neg(v(1)), Lit::neg(v(2)), Lit::pos(v(3))],
        ];
        assert_eq!(cs.len(), 3);
        for (c, w) in cs.iter().zip(want) {
            assert_eq!(c.lits(), w.as_slice());
        }
    }

    #[test]
    fn buf_encoding() {
        let cs = encode_gate(&Gate::new(GateKind::Buf, vec![v(1)], v(2)));
        assert_eq!(cs[0].lits(), &[Lit::pos(v(1)), Lit::neg(v(2))]);
        assert_eq!(cs[1].lits(), &[Lit::neg(v(1)), Lit::pos(v(2))]);
    }

    #[test]
    fn every_kind_encodes_its_truth_table() {
        for kind in GateKind::ALL {
            let arities: &[usize] = match kind {
                GateKind::Not | GateKind::Buf => &[1],
                GateKind::Const0 | GateKind::Const1 => &[0],
                _ => &[2, 3],
            };
            for &n in arities {
                let ins: Vec<Var> = (0..n as u32).map(Var).collect();
                let g = Gate::new(kind, ins, Var(n as u32));
                let cs = encode_gate(&g);
                let expected_len = match kind {
                    GateKind::Xor | GateKind::Xnor => 1 << n,
                    GateKind::Not | GateKind::Buf => 2,
                    GateKind::Const0 | GateKind::Const1 => 1,
                    _ => n + 1,
                };
                assert_eq!(cs.len(), expected_len, "{kind} arity {n}");
                for row in 0..1usize << (n + 1) {
                    let a: Vec<bool> = (0..=n).map(|i| row >> i & 1 == 1).collect();
                    let sat = cs.iter().all(|c| c.eval(&a));
                    let consistent = kind.eval(a[..n].iter().copied()) == a[n];
                    assert_eq!(sat, consistent, "{kind} row {row}");
                }
            }
        }
    }

    #[test]
    fn xor_has_four_clauses() {
        let cs = encode_gate(&Gate::new(GateKind::Xor, vec![v(1), v(2)], v(3)));
        assert_eq!(cs.len(), 4);
    }

    #[test]
    fn one_gate_circuit_roles() {
        let c = parse_netlist("input v1 v2; v3 = AND(v1, v2); output v3;", Format::Simple).unwrap();
        let f = encode_circuit(&c);
        assert_eq!(f.len(), 3);
        assert_eq!(f.var_map().with_role(Role::Input), vec![v(1), v(2)]);
        assert_eq!(f.var_map().with_role(Role::Output), vec![v(3)]);
        assert!(f.var_map().with_role(Role::Internal).is_empty());
        assert_eq!(f.group(0, 0), vec![0, 1, 2]);
    }

    #[test]
    fn toy1_models_are_execution_traces() {
        let c = parse_netlist("input x1 x2 x3; y = AND(x1,x2); z = OR(y,x3); output z;", Format::Simple).unwrap();
        let f = encode_circuit(&c);
        assert_eq!(f.len(), 6);
        assert_eq!(f.var_map().with_role(Role::Internal), vec![c.find("y").unwrap()]);
        let ms = models(&f);
        assert_eq!(ms.len(), 8);
        for m in ms {
            let x = [m[0], m[1], m[2]];
            assert_eq!(c.evaluate(&x, None).unwrap(), m);
        }
    }

    #[test]
    fn buffers_only_circuit_has_all_input_rows() {
        let c = parse_netlist("input a b c; p = BUF(a); q = BUF(b); r = BUF(c); output p q r;", Format::Simple).unwrap();
        assert_eq!(models(&encode_circuit(&c)).len(), 8);
    }

    #[test]
    fn replace_group_and_to_or() {
        let c = parse_netlist("input x1 x2 x3; y = AND(x1,x2); z = OR(y,x3); output z;", Format::Simple).unwrap();
        let f = encode_circuit(&c);
        let g = f.group(0, 0);
        let rec = f.gate_record(0, 0).unwrap();
        let g_star = encode_gate(&Gate::new(GateKind::Or, rec.inputs.clone(), rec.output));
        let split = replace_group(&f, &g, g_star).unwrap();
        assert_eq!(split.f_prime, vec![0, 1, 2]);
        assert_eq!(split.g_star, vec![3, 4, 5]);
        for (i, src) in split.source.iter().enumerate() {
            if let Some(s) = src {
                assert_eq!(split.formula.clause(i), f.clause(*s));
            }
        }
        let ms = models(&split.formula);
        assert_eq!(ms.len(), 8);
        for m in ms {
            assert_eq!(m[4], m[0] || m[1] || m[2]);
        }
        assert_eq!(models(&f).len(), 8);
    }

    #[test]
    fn replace_group_identity_and_errors() {
        let c = parse_netlist("input v1 v2; v3 = AND(v1, v2); output v3;", Format::Simple).unwrap();
        let f = encode_circuit(&c);
        let same = replace_group(&f, &[0, 1, 2], f.clauses().to_vec()).unwrap();
        assert_eq!(models(&same.formula), models(&f));
        assert_eq!(
            replace_group(&f, &[3], vec![]).unwrap_err(),
            CnfError::IndexOutOfRange { index: 3, len: 3 }
        );
        let c3 = Clause::new([Lit::neg(v(1)), Lit::neg(v(2)), Lit::neg(v(3))]).unwrap();
        let sa0 = replace_group(&f, &[2], vec![c3]).unwrap();
        assert!(models(&sa0.formula).iter().all(|m| !m[2]));
    }

    #[test]
    fn tautologies_rejected() {
        assert!(matches!(Clause::new([Lit::pos(v(1)), Lit::neg(v(1))]), Err(CnfError::Tautology(_))));
        assert_eq!(Clause::new([Lit::pos(v(1)), Lit::pos(v(1))]).unwrap().len(), 1);
    }

    #[test]
    fn dimacs_worked_example() {
        let c = parse_netlist("input v1 v2; v3 = AND(v1, v2); output v3;", Format::Simple).unwrap();
        let text = export_dimacs(&encode_circuit(&c));
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('c')).collect();
        assert_eq!(body, vec!["p cnf 3 3", "1 -3 0", "2 -3 0", "-1 -2 3 0"]);
    }

    #[test]
    fn dimacs_empty() {
        let text = export_dimacs(&CnfFormula::default());
        assert_eq!(text.trim(), "p cnf 0 0");
        assert_eq!(import_dimacs(&text).unwrap(), CnfFormula::default());
    }

    #[test]
    fn dimacs_round_trip_keeps_roles() {
        let c = parse_netlist("input x1 x2 x3; y = AND(x1,x2); z = OR(y,x3); output z;", Format::Simple).unwrap();
        let f = encode_circuit(&c);
        let back = import_dimacs(&export_dimacs(&f)).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn dimacs_errors() {
        assert!(import_dimacs("1 2 0\n").is_err());
        assert!(import_dimacs("p cnf 2 1\n1 3 0\n").is_err());
        assert!(import_dimacs("p cnf 2 2\n1 2 0\n").is_err());
        assert!(import_dimacs("p cnf 2 1\n1 2\n").is_err());
        assert!(import_dimacs("p dnf 2 1\n").is_err());
        let f = import_dimacs("p cnf 2 2\n1 -1 0\n1\n2 0\n").unwrap();
        assert_eq!(f.len(), 1);
    }
}
