//! Gate-level circuit model, the simple textual netlist format, ASCII AIGER,
//! and concrete simulation.

use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A dense variable id. Circuit signals and CNF variables share this id space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0 + 1)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("signal `{0}` has multiple drivers")]
    MultipleDrivers(String),
    #[error("combinational cycle through `{0}`")]
    CombinationalCycle(String),
    #[error("{line}:{column}: undefined signal `{name}`")]
    Undefined {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("gate `{output}`: {kind} takes {expected} inputs, got {got}")]
    Arity {
        output: String,
        kind: GateKind,
        expected: &'static str,
        got: usize,
    },
    #[error("gate `{0}` lists the same input twice")]
    DuplicateFanin(String),
    #[error("missing assignment: expected {expected} {what} values, got {got}")]
    MissingAssignment {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("unsupported netlist feature: {0}")]
    Unsupported(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    And,
    Or,
    Nand,
    Nor,
    Xor,
    Xnor,
    Not,
    Buf,
    Const0,
    Const1,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::And,
        GateKind::Or,
        GateKind::Nand,
        GateKind::Nor,
        GateKind::Xor,
        GateKind::Xnor,
        GateKind::Not,
        GateKind::Buf,
        GateKind::Const0,
        GateKind::Const1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Nand => "NAND",
            GateKind::Nor => "NOR",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
            GateKind::Not => "NOT",
            GateKind::Buf => "BUF",
            GateKind::Const0 => "CONST0",
            GateKind::Const1 => "CONST1",
        }
    }

    /// Whether the kind accepts `n` fan-in signals.
    pub fn accepts_arity(self, n: usize) -> bool {
        match self {
            GateKind::Not | GateKind::Buf => n == 1,
            GateKind::Const0 | GateKind::Const1 => n == 0,
            _ => n >= 2,
        }
    }

    fn arity_text(self) -> &'static str {
        match self {
            GateKind::Not | GateKind::Buf => "exactly 1",
            GateKind::Const0 | GateKind::Const1 => "no",
            _ => "at least 2",
        }
    }

    /// Kinds that can replace `self` on a gate with `n` inputs, `self` excluded.
    pub fn alternatives(self, n: usize) -> impl Iterator<Item = GateKind> {
        GateKind::ALL
            .into_iter()
            .filter(move |k| *k != self && k.accepts_arity(n))
    }

    pub fn eval<I: IntoIterator<Item = bool>>(self, inputs: I) -> bool {
        let mut it = inputs.into_iter();
        match self {
            GateKind::And => it.all(|b| b),
            GateKind::Or => it.any(|b| b),
            GateKind::Nand => !it.all(|b| b),
            GateKind::Nor => !it.any(|b| b),
            GateKind::Xor => it.fold(false, |a, b| a ^ b),
            GateKind::Xnor => !it.fold(false, |a, b| a ^ b),
            GateKind::Not => !it.next().unwrap_or(false),
            GateKind::Buf => it.next().unwrap_or(false),
            GateKind::Const0 => false,
            GateKind::Const1 => true,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.to_ascii_uppercase();
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == upper)
            .ok_or_else(|| format!("unknown gate kind `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<Var>,
    pub output: Var,
}

impl Gate {
    pub fn new(kind: GateKind, inputs: Vec<Var>, output: Var) -> Self {
        Gate {
            kind,
            inputs,
            output,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatchInit {
    Zero,
    One,
    Free,
}

impl LatchInit {
    pub fn value(self) -> Option<bool> {
        match self {
            LatchInit::Zero => Some(false),
            LatchInit::One => Some(true),
            LatchInit::Free => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Latch {
    /// Present-state signal.
    pub state: Var,
    /// Next-state signal, always the output of a dedicated gate.
    pub next: Var,
    pub init: LatchInit,
}

/// Role of a signal inside a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignalRole {
    Input,
    State,
    Internal,
    Output,
    NextState,
}

/// A validated gate-level netlist.
///
/// Gates are stored in topological order; the position of a gate in
/// [`Circuit::gates`] is its gate id. Every output and every latch next-state
/// signal is driven by its own gate, so signal roles partition the variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    name: String,
    names: Vec<String>,
    inputs: Vec<Var>,
    outputs: Vec<Var>,
    latches: Vec<Latch>,
    gates: Vec<Gate>,
    driver: Vec<Option<usize>>,
}

/// Simulation result of one clock cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub outputs: Vec<bool>,
    pub next_state: Option<Vec<bool>>,
}

impl Circuit {
    /// Validates and normalizes raw netlist parts.
    ///
    /// Outputs that are not driven by a gate of their own (primary inputs,
    /// state signals, repeated outputs) receive a fresh `BUF`. The same holds
    /// for latch next-state signals that are not exclusively theirs.
    pub fn from_parts(
        name: impl Into<String>,
        mut names: Vec<String>,
        inputs: Vec<Var>,
        mut outputs: Vec<Var>,
        mut latches: Vec<Latch>,
        mut gates: Vec<Gate>,
    ) -> Result<Circuit, NetlistError> {
        let n = names.len();
        let in_range = |v: Var| v.index() < n;
        let mut driver: Vec<Option<usize>> = vec![None; n];
        let mut source = vec![false; n];
        for &v in inputs.iter().chain(latches.iter().map(|l| &l.state)) {
            if !in_range(v) {
                return Err(NetlistError::Unsupported(format!("variable {v} out of range")));
            }
            if source[v.index()] {
                return Err(NetlistError::MultipleDrivers(names[v.index()].clone()));
            }
            source[v.index()] = true;
        }
        for (i, g) in gates.iter().enumerate() {
            let oname = || names.get(g.output.index()).cloned().unwrap_or_default();
            if !in_range(g.output) || g.inputs.iter().any(|v| !in_range(*v)) {
                return Err(NetlistError::Unsupported(format!("gate {i} refers to an unknown variable")));
            }
            if !g.kind.accepts_arity(g.inputs.len()) {
                return Err(NetlistError::Arity {
                    output: oname(),
                    kind: g.kind,
                    expected: g.kind.arity_text(),
                    got: g.inputs.len(),
                });
            }
            let distinct: BTreeSet<Var> = g.inputs.iter().copied().collect();
            if distinct.len() != g.inputs.len() {
                return Err(NetlistError::DuplicateFanin(oname()));
            }
            if source[g.output.index()] || driver[g.output.index()].is_some() {
                return Err(NetlistError::MultipleDrivers(oname()));
            }
            driver[g.output.index()] = Some(i);
        }
        let defined = |v: Var, driver: &[Option<usize>]| source[v.index()] || driver[v.index()].is_some();
        for g in &gates {
            for &v in &g.inputs {
                if !defined(v, &driver) {
                    return Err(NetlistError::Undefined {
                        name: names[v.index()].clone(),
                        line: 0,
                        column: 0,
                    });
                }
            }
        }
        for &v in outputs.iter().chain(latches.iter().map(|l| &l.next)) {
            if !in_range(v) || !defined(v, &driver) {
                return Err(NetlistError::Undefined {
                    name: names.get(v.index()).cloned().unwrap_or_default(),
                    line: 0,
                    column: 0,
                });
            }
        }

        let fresh = |base: &str, names: &mut Vec<String>| -> Var {
            let taken: BTreeSet<&str> = names.iter().map(|s| s.as_str()).collect();
            let mut candidate = base.to_string();
            let mut k = 1;
            while taken.contains(candidate.as_str()) {
                candidate = format!("{base}{k}");
                k += 1;
            }
            names.push(candidate);
            Var(names.len() as u32 - 1)
        };

        let mut claimed = vec![false; n];
        for o in outputs.iter_mut() {
            let dedicated = driver[o.index()].is_some() && !claimed[o.index()];
            if dedicated {
                claimed[o.index()] = true;
            } else {
                let base = format!("{}$o", names[o.index()]);
                let v = fresh(&base, &mut names);
                gates.push(Gate::new(GateKind::Buf, vec![*o], v));
                *o = v;
            }
        }
        for l in latches.iter_mut() {
            let dedicated = driver[l.next.index()].is_some() && !claimed[l.next.index()];
            if dedicated {
                claimed[l.next.index()] = true;
            } else {
                let base = format!("{}$next", names[l.state.index()]);
                let v = fresh(&base, &mut names);
                gates.push(Gate::new(GateKind::Buf, vec![l.next], v));
                l.next = v;
            }
        }

        let gates = topological_order(&names, gates)?;
        let mut driver = vec![None; names.len()];
        for (i, g) in gates.iter().enumerate() {
            driver[g.output.index()] = Some(i);
        }
        Ok(Circuit {
            name: name.into(),
            names,
            inputs,
            outputs,
            latches,
            gates,
            driver,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn var_name(&self, v: Var) -> &str {
        &self.names[v.index()]
    }

    pub fn find(&self, name: &str) -> Option<Var> {
        self.names.iter().position(|n| n == name).map(|i| Var(i as u32))
    }

    pub fn inputs(&self) -> &[Var] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Var] {
        &self.outputs
    }

    pub fn latches(&self) -> &[Latch] {
        &self.latches
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_sequential(&self) -> bool {
        !self.latches.is_empty()
    }

    /// Gate driving `v`, if any.
    pub fn driver(&self, v: Var) -> Option<usize> {
        self.driver.get(v.index()).copied().flatten()
    }

    /// Resolves a gate by output signal name, or by `g<k>` (1-based position).
    pub fn find_gate(&self, key: &str) -> Option<usize> {
        if let Some(g) = self.find(key).and_then(|v| self.driver(v)) {
            return Some(g);
        }
        let k: usize = key.strip_prefix('g')?.parse().ok()?;
        (1..=self.gates.len()).contains(&k).then(|| k - 1)
    }

    pub fn role(&self, v: Var) -> SignalRole {
        if self.inputs.contains(&v) {
            SignalRole::Input
        } else if self.latches.iter().any(|l| l.state == v) {
            SignalRole::State
        } else if self.latches.iter().any(|l| l.next == v) {
            SignalRole::NextState
        } else if self.outputs.contains(&v) {
            SignalRole::Output
        } else {
            SignalRole::Internal
        }
    }

    /// Copy of this circuit with gate `gate` replaced by a gate of another
    /// kind (and possibly other fan-in) driving the same signal.
    pub fn with_gate(&self, gate: usize, kind: GateKind, inputs: Vec<Var>) -> Result<Circuit, NetlistError> {
        let mut gates = self.gates.clone();
        let output = gates[gate].output;
        gates[gate] = Gate::new(kind, inputs, output);
        Circuit::from_parts(
            self.name.clone(),
            self.names.clone(),
            self.inputs.clone(),
            self.outputs.clone(),
            self.latches.clone(),
            gates,
        )
    }

    /// Copy with the output of `gate` stuck at `value`.
    pub fn with_stuck_at(&self, gate: usize, value: bool) -> Circuit {
        let kind = if value { GateKind::Const1 } else { GateKind::Const0 };
        self.with_gate(gate, kind, Vec::new())
            .expect("constant gate cannot introduce a cycle")
    }

    /// Values of every signal for one evaluation of the combinational part.
    pub fn evaluate(&self, inputs: &[bool], state: Option<&[bool]>) -> Result<Vec<bool>, NetlistError> {
        if inputs.len() != self.inputs.len() {
            return Err(NetlistError::MissingAssignment {
                what: "input",
                expected: self.inputs.len(),
                got: inputs.len(),
            });
        }
        let state_len = state.map_or(0, |s| s.len());
        if state_len != self.latches.len() || (state.is_none() && self.is_sequential()) {
            return Err(NetlistError::MissingAssignment {
                what: "present-state",
                expected: self.latches.len(),
                got: state_len,
            });
        }
        let mut values = vec![false; self.names.len()];
        for (v, b) in self.inputs.iter().zip(inputs) {
            values[v.index()] = *b;
        }
        if let Some(s) = state {
            for (l, b) in self.latches.iter().zip(s) {
                values[l.state.index()] = *b;
            }
        }
        for g in &self.gates {
            values[g.output.index()] = g.kind.eval(g.inputs.iter().map(|v| values[v.index()]));
        }
        Ok(values)
    }

    pub fn simulate(&self, inputs: &[bool], state: Option<&[bool]>) -> Result<Step, NetlistError> {
        let values = self.evaluate(inputs, state)?;
        Ok(Step {
            outputs: self.outputs.iter().map(|v| values[v.index()]).collect(),
            next_state: state.map(|_| self.latches.iter().map(|l| values[l.next.index()]).collect()),
        })
    }

    /// Output values of a combinational circuit.
    pub fn outputs_for(&self, inputs: &[bool]) -> Result<Vec<bool>, NetlistError> {
        Ok(self.simulate(inputs, None)?.outputs)
    }
}

fn topological_order(names: &[String], gates: Vec<Gate>) -> Result<Vec<Gate>, NetlistError> {
    let mut driver: HashMap<Var, usize> = HashMap::new();
    for (i, g) in gates.iter().enumerate() {
        driver.insert(g.output, i);
    }
    let mut pending = vec![0usize; gates.len()];
    let mut fanout: Vec<Vec<usize>> = vec![Vec::new(); gates.len()];
    for (i, g) in gates.iter().enumerate() {
        for v in &g.inputs {
            if let Some(&d) = driver.get(v) {
                pending[i] += 1;
                fanout[d].push(i);
            }
        }
    }
    // Smallest original position first, so already-sorted input is kept as is.
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..gates.len()).filter(|&i| pending[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(gates.len());
    while let Some(Reverse(i)) = ready.pop() {
        order.push(i);
        for &j in &fanout[i] {
            pending[j] -= 1;
            if pending[j] == 0 {
                ready.push(Reverse(j));
            }
        }
    }
    if order.len() != gates.len() {
        let stuck = (0..gates.len()).find(|&i| pending[i] > 0).unwrap();
        return Err(NetlistError::CombinationalCycle(
            names[gates[stuck].output.index()].clone(),
        ));
    }
    let mut slots: Vec<Option<Gate>> = gates.into_iter().map(Some).collect();
    Ok(order.into_iter().map(|i| slots[i].take().unwrap()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Simple,
    AigerAscii,
}

impl Format {
    /// Guesses the format from a file name: `.aag` is AIGER, anything else simple.
    pub fn from_path(path: &std::path::Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("aag") => Format::AigerAscii,
            _ => Format::Simple,
        }
    }
}

pub fn parse_netlist(text: &str, format: Format) -> Result<Circuit, NetlistError> {
    match format {
        Format::Simple => parse_simple(text),
        Format::AigerAscii => parse_aiger(text),
    }
}

pub fn emit_netlist(c: &Circuit, format: Format) -> String {
    match format {
        Format::Simple => emit_simple(c),
        Format::AigerAscii => emit_aiger(c),
    }
}

// ---------------------------------------------------------------------------
// simple format

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Punct(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, ';' | ',' | '=' | '(' | ')' | '#')
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let column = i + 1;
            if is_ident_char(c) {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: ln + 1,
                    column,
                });
            } else {
                out.push(Token {
                    tok: Tok::Punct(c),
                    line: ln + 1,
                    column,
                });
                i += 1;
            }
        }
    }
    out
}

struct Named {
    name: String,
    line: usize,
    column: usize,
}

enum Stmt {
    Input(Vec<Named>),
    Output(Vec<Named>),
    Latch(Named, Named, LatchInit),
    Gate(Named, GateKind, Vec<Named>),
}

fn syntax(t: &Token, message: impl Into<String>) -> NetlistError {
    NetlistError::Syntax {
        line: t.line,
        column: t.column,
        message: message.into(),
    }
}

fn parse_statements(tokens: &[Token]) -> Result<Vec<Stmt>, NetlistError> {
    let mut stmts = Vec::new();
    let mut pos = 0;
    let named = |t: &Token| -> Option<Named> {
        match &t.tok {
            Tok::Ident(s) => Some(Named {
                name: s.clone(),
                line: t.line,
                column: t.column,
            }),
            _ => None,
        }
    };
    while pos < tokens.len() {
        let end = tokens[pos..]
            .iter()
            .position(|t| t.tok == Tok::Punct(';'))
            .map(|k| pos + k)
            .ok_or_else(|| syntax(tokens.last().unwrap(), "missing `;` at end of statement"))?;
        let st = &tokens[pos..end];
        if st.is_empty() {
            pos = end + 1;
            continue;
        }
        let head = &st[0];
        let stmt = match &head.tok {
            Tok::Ident(kw) if kw == "input" || kw == "output" => {
                let mut ids = Vec::new();
                for t in &st[1..] {
                    match &t.tok {
                        Tok::Ident(_) => ids.push(named(t).unwrap()),
                        Tok::Punct(',') => {}
                        _ => return Err(syntax(t, "expected signal name")),
                    }
                }
                if kw == "input" {
                    Stmt::Input(ids)
                } else {
                    Stmt::Output(ids)
                }
            }
            Tok::Ident(kw) if kw == "latch" && !matches!(st.get(1).map(|t| &t.tok), Some(Tok::Punct('='))) => {
                let q = st.get(1).and_then(named).ok_or_else(|| syntax(head, "latch needs a state name"))?;
                let d = st.get(2).and_then(named).ok_or_else(|| syntax(head, "latch needs a next-state signal"))?;
                let init = match st.len() {
                    3 => LatchInit::Zero,
                    5 => {
                        if st[3].tok != Tok::Ident("init".into()) {
                            return Err(syntax(&st[3], "expected `init`"));
                        }
                        match &st[4].tok {
                            Tok::Ident(v) if v == "0" => LatchInit::Zero,
                            Tok::Ident(v) if v == "1" => LatchInit::One,
                            Tok::Ident(v) if v == "x" || v == "X" => LatchInit::Free,
                            _ => return Err(syntax(&st[4], "init value must be 0, 1 or x")),
                        }
                    }
                    _ => return Err(syntax(head, "expected `latch <q> <d> [init 0|1|x]`")),
                };
                Stmt::Latch(q, d, init)
            }
            Tok::Ident(_) => {
                let out = named(head).unwrap();
                let eq = st.get(1).ok_or_else(|| syntax(head, "expected `=`"))?;
                if eq.tok != Tok::Punct('=') {
                    return Err(syntax(eq, format!("unknown statement `{}`", out.name)));
                }
                let kt = st.get(2).ok_or_else(|| syntax(eq, "expected gate kind"))?;
                let kind = match &kt.tok {
                    Tok::Ident(k) => k.parse::<GateKind>().map_err(|m| syntax(kt, m))?,
                    _ => return Err(syntax(kt, "expected gate kind")),
                };
                let open = st.get(3).ok_or_else(|| syntax(kt, "expected `(`"))?;
                if open.tok != Tok::Punct('(') {
                    return Err(syntax(open, "expected `(`"));
                }
                let close = st.last().unwrap();
                if close.tok != Tok::Punct(')') {
                    return Err(syntax(close, "expected `)` before `;`"));
                }
                let mut args = Vec::new();
                let mut expect_name = true;
                for t in &st[4..st.len() - 1] {
                    match (&t.tok, expect_name) {
                        (Tok::Ident(_), true) => {
                            args.push(named(t).unwrap());
                            expect_name = false;
                        }
                        (Tok::Punct(','), false) => expect_name = true,
                        _ => return Err(syntax(t, "malformed argument list")),
                    }
                }
                if expect_name && !args.is_empty() {
                    return Err(syntax(close, "trailing `,` in argument list"));
                }
                Stmt::Gate(out, kind, args)
            }
            Tok::Punct(c) => return Err(syntax(head, format!("unexpected `{c}`"))),
        };
        stmts.push(stmt);
        pos = end + 1;
    }
    Ok(stmts)
}

fn parse_simple(text: &str) -> Result<Circuit, NetlistError> {
    let tokens = tokenize(text);
    let stmts = parse_statements(&tokens)?;

    // Ids follow declaration order: inputs, latch states and gate outputs in
    // the order their statements appear.
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, Var> = HashMap::new();
    let mut declare = |n: &Named, names: &mut Vec<String>| -> Result<Var, NetlistError> {
        if index.contains_key(&n.name) {
            return Err(NetlistError::MultipleDrivers(n.name.clone()));
        }
        let v = Var(names.len() as u32);
        names.push(n.name.clone());
        index.insert(n.name.clone(), v);
        Ok(v)
    };
    for s in &stmts {
        match s {
            Stmt::Input(ids) => {
                for n in ids {
                    declare(n, &mut names)?;
                }
            }
            Stmt::Latch(q, _, _) => {
                declare(q, &mut names)?;
            }
            Stmt::Gate(out, _, _) => {
                declare(out, &mut names)?;
            }
            Stmt::Output(_) => {}
        }
    }
    let index: HashMap<String, Var> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), Var(i as u32)))
        .collect();
    let resolve = |n: &Named| -> Result<Var, NetlistError> {
        index.get(&n.name).copied().ok_or_else(|| NetlistError::Undefined {
            name: n.name.clone(),
            line: n.line,
            column: n.column,
        })
    };

    let (mut inputs, mut outputs, mut latches, mut gates) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for s in &stmts {
        match s {
            Stmt::Input(ids) => {
                for n in ids {
                    inputs.push(resolve(n)?);
                }
            }
            Stmt::Output(ids) => {
                for n in ids {
                    outputs.push(resolve(n)?);
                }
            }
            Stmt::Latch(q, d, init) => latches.push(Latch {
                state: resolve(q)?,
                next: resolve(d)?,
                init: *init,
            }),
            Stmt::Gate(out, kind, args) => {
                let ins = args.iter().map(&resolve).collect::<Result<Vec<_>, _>>()?;
                if !kind.accepts_arity(ins.len()) {
                    return Err(NetlistError::Arity {
                        output: out.name.clone(),
                        kind: *kind,
                        expected: kind.arity_text(),
                        got: ins.len(),
                    });
                }
                gates.push(Gate::new(*kind, ins, resolve(out)?));
            }
        }
    }
    Circuit::from_parts("top", names, inputs, outputs, latches, gates)
}

fn emit_simple(c: &Circuit) -> String {
    let mut s = String::new();
    let name = |v: &Var| c.var_name(*v).to_string();
    if !c.inputs.is_empty() {
        s.push_str(&format!("input {};\n", c.inputs.iter().map(name).collect::<Vec<_>>().join(" ")));
    }
    for l in &c.latches {
        let init = match l.init {
            LatchInit::Zero => "0",
            LatchInit::One => "1",
            LatchInit::Free => "x",
        };
        s.push_str(&format!("latch {} {} init {};\n", name(&l.state), name(&l.next), init));
    }
    for g in &c.gates {
        let args: Vec<String> = g.inputs.iter().map(name).collect();
        s.push_str(&format!("{} = {}({});\n", name(&g.output), g.kind, args.join(", ")));
    }
    if !c.outputs.is_empty() {
        s.push_str(&format!("output {};\n", c.outputs.iter().map(name).collect::<Vec<_>>().join(" ")));
    }
    s
}

// ---------------------------------------------------------------------------
// ASCII AIGER

fn parse_aiger(text: &str) -> Result<Circuit, NetlistError> {
    let lines: Vec<&str> = text.lines().collect();
    let err = |line: usize, message: &str| NetlistError::Syntax {
        line: line + 1,
        column: 1,
        message: message.to_string(),
    };
    let nums = |line: usize| -> Result<Vec<u32>, NetlistError> {
        let l = lines.get(line).ok_or_else(|| err(line, "unexpected end of file"))?;
        l.split_whitespace()
            .map(|w| w.parse::<u32>().map_err(|_| err(line, "expected unsigned integer")))
            .collect()
    };
    let header: Vec<&str> = lines.first().map(|l| l.split_whitespace().collect()).unwrap_or_default();
    if header.first() != Some(&"aag") {
        return Err(err(0, "expected `aag` header"));
    }
    if header.len() < 6 {
        return Err(err(0, "header must be `aag M I L O A`"));
    }
    let h: Vec<u32> = header[1..6]
        .iter()
        .map(|w| w.parse::<u32>().map_err(|_| err(0, "malformed header")))
        .collect::<Result<_, _>>()?;
    if header.len() > 6 && header[6..].iter().any(|w| *w != "0") {
        return Err(NetlistError::Unsupported("AIGER 1.9 sections (B C J F)".into()));
    }
    let (max_var, ni, nl, no, na) = (h[0], h[1] as usize, h[2] as usize, h[3] as usize, h[4] as usize);

    let mut line = 1;
    let mut in_lits = Vec::new();
    for _ in 0..ni {
        let v = nums(line)?;
        if v.len() != 1 || v[0] < 2 || v[0] % 2 == 1 {
            return Err(err(line, "input must be one even literal"));
        }
        in_lits.push(v[0]);
        line += 1;
    }
    let mut latch_lits = Vec::new();
    for _ in 0..nl {
        let v = nums(line)?;
        if v.len() < 2 || v.len() > 3 || v[0] < 2 || v[0] % 2 == 1 {
            return Err(err(line, "latch must be `cur next [init]`"));
        }
        let init = match v.get(2) {
            None | Some(0) => LatchInit::Zero,
            Some(1) => LatchInit::One,
            Some(x) if *x == v[0] => LatchInit::Free,
            _ => return Err(err(line, "bad latch init")),
        };
        latch_lits.push((v[0], v[1], init));
        line += 1;
    }
    let mut out_lits = Vec::new();
    for _ in 0..no {
        let v = nums(line)?;
        if v.len() != 1 {
            return Err(err(line, "output must be one literal"));
        }
        out_lits.push(v[0]);
        line += 1;
    }
    let mut and_lits = Vec::new();
    for _ in 0..na {
        let v = nums(line)?;
        if v.len() != 3 || v[0] < 2 || v[0] % 2 == 1 {
            return Err(err(line, "and must be `lhs rhs0 rhs1`"));
        }
        and_lits.push((v[0], v[1], v[2], line));
        line += 1;
    }
    let mut sym_in: HashMap<usize, String> = HashMap::new();
    let mut sym_latch: HashMap<usize, String> = HashMap::new();
    let mut sym_out: HashMap<usize, String> = HashMap::new();
    while line < lines.len() {
        let l = lines[line].trim();
        if l == "c" || l.starts_with("c ") {
            break;
        }
        if !l.is_empty() {
            let (key, name) = l.split_once(' ').ok_or_else(|| err(line, "malformed symbol"))?;
            let (kind, pos) = key.split_at(1);
            let pos: usize = pos.parse().map_err(|_| err(line, "malformed symbol index"))?;
            match kind {
                "i" => sym_in.insert(pos, name.to_string()),
                "l" => sym_latch.insert(pos, name.to_string()),
                "o" => sym_out.insert(pos, name.to_string()),
                _ => return Err(err(line, "unknown symbol kind")),
            };
        }
        line += 1;
    }

    let mut names = Vec::new();
    let mut by_aig: HashMap<u32, Var> = HashMap::new();
    let mut define = |aig_var: u32, name: String, names: &mut Vec<String>, at: usize| -> Result<Var, NetlistError> {
        if aig_var > max_var {
            return Err(err(at, "variable exceeds header maximum"));
        }
        if by_aig.contains_key(&aig_var) {
            return Err(NetlistError::MultipleDrivers(name));
        }
        let v = Var(names.len() as u32);
        names.push(name);
        by_aig.insert(aig_var, v);
        Ok(v)
    };
    let mut inputs = Vec::new();
    for (k, lit) in in_lits.iter().enumerate() {
        let name = sym_in.get(&k).cloned().unwrap_or_else(|| format!("i{k}"));
        inputs.push(define(lit / 2, name, &mut names, 1 + k)?);
    }
    let mut states = Vec::new();
    for (k, (lit, _, _)) in latch_lits.iter().enumerate() {
        let name = sym_latch.get(&k).cloned().unwrap_or_else(|| format!("l{k}"));
        states.push(define(lit / 2, name, &mut names, 1 + ni + k)?);
    }
    // A positive output literal naming an AND gives that gate the output's name.
    let mut and_name: HashMap<u32, String> = HashMap::new();
    for (k, lit) in out_lits.iter().enumerate() {
        if lit % 2 == 0 && and_lits.iter().any(|a| a.0 == *lit) && !and_name.contains_key(&(lit / 2)) {
            and_name.insert(lit / 2, sym_out.get(&k).cloned().unwrap_or_else(|| format!("o{k}")));
        }
    }
    for (lhs, _, _, at) in &and_lits {
        let name = and_name.get(&(lhs / 2)).cloned().unwrap_or_else(|| format!("n{}", lhs / 2));
        define(lhs / 2, name, &mut names, *at)?;
    }

    let mut gates = Vec::new();
    let mut negated: HashMap<u32, Var> = HashMap::new();
    let mut consts: HashMap<bool, Var> = HashMap::new();
    let mut signal = |lit: u32, names: &mut Vec<String>, gates: &mut Vec<Gate>, at: usize| -> Result<Var, NetlistError> {
        if lit < 2 {
            let value = lit == 1;
            if let Some(v) = consts.get(&value) {
                return Ok(*v);
            }
            let v = Var(names.len() as u32);
            names.push(if value { "const1".into() } else { "const0".into() });
            let kind = if value { GateKind::Const1 } else { GateKind::Const0 };
            gates.push(Gate::new(kind, vec![], v));
            consts.insert(value, v);
            return Ok(v);
        }
        let base = *by_aig.get(&(lit / 2)).ok_or_else(|| NetlistError::Undefined {
            name: format!("aiger literal {lit}"),
            line: at + 1,
            column: 1,
        })?;
        if lit % 2 == 0 {
            return Ok(base);
        }
        if let Some(v) = negated.get(&(lit / 2)) {
            return Ok(*v);
        }
        let v = Var(names.len() as u32);
        names.push(format!("{}_n", names[base.index()]));
        gates.push(Gate::new(GateKind::Not, vec![base], v));
        negated.insert(lit / 2, v);
        Ok(v)
    };
    let mut and_gates = Vec::new();
    for (lhs, r0, r1, at) in &and_lits {
        let a = signal(*r0, &mut names, &mut gates, *at)?;
        let b = signal(*r1, &mut names, &mut gates, *at)?;
        let out = by_aig[&(lhs / 2)];
        if a == b {
            and_gates.push(Gate::new(GateKind::Buf, vec![a], out));
        } else {
            and_gates.push(Gate::new(GateKind::And, vec![a, b], out));
        }
    }
    gates.extend(and_gates);
    let mut latches = Vec::new();
    for (k, (_, next, init)) in latch_lits.iter().enumerate() {
        let d = signal(*next, &mut names, &mut gates, 1 + ni + k)?;
        latches.push(Latch {
            state: states[k],
            next: d,
            init: *init,
        });
    }
    let mut outputs = Vec::new();
    for (k, lit) in out_lits.iter().enumerate() {
        let at = 1 + ni + nl + k;
        if lit % 2 == 0 && and_name.contains_key(&(lit / 2)) {
            outputs.push(signal(*lit, &mut names, &mut gates, at)?);
            continue;
        }
        let src = signal(*lit, &mut names, &mut gates, at)?;
        let name = sym_out.get(&k).cloned().unwrap_or_else(|| format!("o{k}"));
        let v = Var(names.len() as u32);
        names.push(name);
        gates.push(Gate::new(GateKind::Buf, vec![src], v));
        outputs.push(v);
    }
    Circuit::from_parts("top", names, inputs, outputs, latches, gates)
}

/// AIGER emission decomposes every gate into two-input ANDs and inverters.
fn emit_aiger(c: &Circuit) -> String {
    struct Aig {
        next_var: u32,
        ands: Vec<(u32, u32, u32)>,
    }
    impl Aig {
        fn and(&mut self, a: u32, b: u32) -> u32 {
            let lhs = self.next_var * 2;
            self.next_var += 1;
            self.ands.push((lhs, a, b));
            lhs
        }
        fn and_all(&mut self, lits: &[u32]) -> u32 {
            lits.iter().skip(1).fold(lits[0], |acc, &l| self.and(acc, l))
        }
        fn xor(&mut self, a: u32, b: u32) -> u32 {
            let both = self.and(a, b);
            let neither = self.and(a ^ 1, b ^ 1);
            self.and(both ^ 1, neither ^ 1)
        }
    }
    let mut lit = vec![0u32; c.num_vars()];
    let mut aig = Aig {
        next_var: 1,
        ands: Vec::new(),
    };
    for v in c.inputs.iter().chain(c.latches.iter().map(|l| &l.state)) {
        lit[v.index()] = aig.next_var * 2;
        aig.next_var += 1;
    }
    for g in &c.gates {
        let ins: Vec<u32> = g.inputs.iter().map(|v| lit[v.index()]).collect();
        let l = match g.kind {
            GateKind::Const0 => 0,
            GateKind::Const1 => 1,
            GateKind::Buf => ins[0],
            GateKind::Not => ins[0] ^ 1,
            GateKind::And => aig.and_all(&ins),
            GateKind::Nand => aig.and_all(&ins) ^ 1,
            GateKind::Or => aig.and_all(&ins.iter().map(|l| l ^ 1).collect::<Vec<_>>()) ^ 1,
            GateKind::Nor => aig.and_all(&ins.iter().map(|l| l ^ 1).collect::<Vec<_>>()),
            GateKind::Xor | GateKind::Xnor => {
                let x = ins.iter().skip(1).fold(ins[0], |acc, &l| aig.xor(acc, l));
                if g.kind == GateKind::Xnor {
                    x ^ 1
                } else {
                    x
                }
            }
        };
        lit[g.output.index()] = l;
    }
    let mut s = format!(
        "aag {} {} {} {} {}\n",
        aig.next_var - 1,
        c.inputs.len(),
        c.latches.len(),
        c.outputs.len(),
        aig.ands.len()
    );
    for v in &c.inputs {
        s.push_str(&format!("{}\n", lit[v.index()]));
    }
    for l in &c.latches {
        let cur = lit[l.state.index()];
        match l.init {
            LatchInit::Zero => s.push_str(&format!("{} {}\n", cur, lit[l.next.index()])),
            LatchInit::One => s.push_str(&format!("{} {} 1\n", cur, lit[l.next.index()])),
            LatchInit::Free => s.push_str(&format!("{} {} {}\n", cur, lit[l.next.index()], cur)),
        }
    }
    for v in &c.outputs {
        s.push_str(&format!("{}\n", lit[v.index()]));
    }
    for (lhs, a, b) in &aig.ands {
        s.push_str(&format!("{lhs} {a} {b}\n"));
    }
    for (k, v) in c.inputs.iter().enumerate() {
        s.push_str(&format!("i{k} {}\n", c.var_name(*v)));
    }
    for (k, l) in c.latches.iter().enumerate() {
        s.push_str(&format!("l{k} {}\n", c.var_name(l.state)));
    }
    for (k, v) in c.outputs.iter().enumerate() {
        s.push_str(&format!("o{k} {}\n", c.var_name(*v)));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY1: &str = "input x1 x2 x3;\ny = AND(x1, x2);\nz = OR(y, x3);\noutput z;\n";

    fn bits(n: usize, row: usize) -> Vec<bool> {
        (0..n).map(|i| row >> i & 1 == 1).collect()
    }

    #[test]
    fn smallest_circuit() {
        let c = parse_netlist("input x1 x2; y1 = AND(x1,x2); output y1;", Format::Simple).unwrap();
        assert_eq!(c.inputs().len(), 2);
        assert_eq!(c.gates().len(), 1);
        assert_eq!(c.outputs().len(), 1);
        assert!(!c.is_sequential());
    }

    #[test]
    fn and_gate_simulation() {
        let c = parse_netlist("input v1 v2; v3 = AND(v1, v2); output v3;", Format::Simple).unwrap();
        assert_eq!(c.outputs_for(&[true, true]).unwrap(), vec![true]);
        assert_eq!(c.outputs_for(&[false, true]).unwrap(), vec![false]);
    }

    #[test]
    fn toy1_truth_table() {
        let c = parse_netlist(TOY1, Format::Simple).unwrap();
        assert_eq!(c.outputs_for(&[true, false, false]).unwrap(), vec![false]);
        for row in 0..8 {
            let x = bits(3, row);
            let want = (x[0] && x[1]) || x[2];
            assert_eq!(c.outputs_for(&x).unwrap(), vec![want]);
        }
    }

    #[test]
    fn emits_gates_in_topological_order() {
        let text = "input x1 x2 x3;\nz = OR(y, x3);\ny = AND(x1, x2);\noutput z;\n";
        let c = parse_netlist(text, Format::Simple).unwrap();
        let out = emit_netlist(&c, Format::Simple);
        let gate_lines: Vec<&str> = out.lines().filter(|l| l.contains('=')).collect();
        assert_eq!(gate_lines, vec!["y = AND(x1, x2);", "z = OR(y, x3);"]);
    }

    #[test]
    fn one_gate_round_trip_is_unchanged() {
        let c = parse_netlist("input v1 v2;\nv3 = AND(v1, v2);\noutput v3;\n", Format::Simple).unwrap();
        let text = emit_netlist(&c, Format::Simple);
        assert_eq!(text.lines().filter(|l| l.contains('=')).count(), 1);
        let back = parse_netlist(&text, Format::Simple).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn aiger_and_matches_simple_and() {
        let aag = "aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n";
        let a = parse_netlist(aag, Format::AigerAscii).unwrap();
        let s = parse_netlist("input x1 x2; y1 = AND(x1,x2); output y1;", Format::Simple).unwrap();
        for row in 0..4 {
            let x = bits(2, row);
            assert_eq!(a.outputs_for(&x).unwrap(), s.outputs_for(&x).unwrap());
        }
    }

    #[test]
    fn aiger_with_inverters_and_latch() {
        // toggle: l' = !l, output = l
        let aag = "aag 1 0 1 1 0\n2 3\n2\nl0 s\no0 out\n";
        let c = parse_netlist(aag, Format::AigerAscii).unwrap();
        assert!(c.is_sequential());
        let step = c.simulate(&[], Some(&[false])).unwrap();
        assert_eq!(step.next_state, Some(vec![true]));
        assert_eq!(step.outputs, vec![false]);
        let back = parse_netlist(&emit_netlist(&c, Format::AigerAscii), Format::AigerAscii).unwrap();
        for s in [false, true] {
            assert_eq!(back.simulate(&[], Some(&[s])).unwrap(), c.simulate(&[], Some(&[s])).unwrap());
        }
    }

    #[test]
    fn aiger_emission_preserves_function() {
        let text = "input a b c;\nx = XOR(a, b, c);\ny = NOR(a, b);\nw = XNOR(x, y);\nk = NAND(a, c);\noutput w k x;\n";
        let c = parse_netlist(text, Format::Simple).unwrap();
        let back = parse_netlist(&emit_netlist(&c, Format::AigerAscii), Format::AigerAscii).unwrap();
        for row in 0..8 {
            let x = bits(3, row);
            assert_eq!(back.outputs_for(&x).unwrap(), c.outputs_for(&x).unwrap());
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_netlist("input a;\ny = AND(a b);\n", Format::Simple).unwrap_err();
        match err {
            NetlistError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 11)),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(
            parse_netlist("input a\n", Format::Simple),
            Err(NetlistError::Syntax { .. })
        ));
    }

    #[test]
    fn multiple_drivers_rejected() {
        let err = parse_netlist("input a b; y = AND(a,b); y = OR(a,b); output y;", Format::Simple).unwrap_err();
        assert_eq!(err, NetlistError::MultipleDrivers("y".into()));
        let err = parse_netlist("input a b; a = AND(a,b);", Format::Simple).unwrap_err();
        assert_eq!(err, NetlistError::MultipleDrivers("a".into()));
    }

    #[test]
    fn cycle_rejected() {
        let err = parse_netlist("input a; y = AND(a, z); z = OR(a, y); output z;", Format::Simple).unwrap_err();
        assert!(matches!(err, NetlistError::CombinationalCycle(_)));
    }

    #[test]
    fn undefined_reference_rejected() {
        let err = parse_netlist("input a;\ny = AND(a, q);\noutput y;", Format::Simple).unwrap_err();
        assert_eq!(
            err,
            NetlistError::Undefined {
                name: "q".into(),
                line: 2,
                column: 12
            }
        );
    }

    #[test]
    fn arity_checked() {
        assert!(matches!(
            parse_netlist("input a b; y = NOT(a, b);", Format::Simple),
            Err(NetlistError::Arity { .. })
        ));
        assert!(matches!(
            parse_netlist("input a; y = AND(a);", Format::Simple),
            Err(NetlistError::Arity { .. })
        ));
        assert!(matches!(
            parse_netlist("input a; y = AND(a, a);", Format::Simple),
            Err(NetlistError::DuplicateFanin(_))
        ));
    }

    #[test]
    fn latch_defaults_and_next_state_buffering() {
        let c = parse_netlist("input a; latch q a; latch r q init x; output q;", Format::Simple).unwrap();
        assert_eq!(c.latches()[0].init, LatchInit::Zero);
        assert_eq!(c.latches()[1].init, LatchInit::Free);
        // every output and next-state signal gets its own driver
        for l in c.latches() {
            assert_eq!(c.role(l.next), SignalRole::NextState);
        }
        assert_eq!(c.role(c.outputs()[0]), SignalRole::Output);
        let step = c.simulate(&[true], Some(&[false, true])).unwrap();
        assert_eq!(step.next_state, Some(vec![true, false]));
        assert_eq!(step.outputs, vec![false]);
    }

    #[test]
    fn missing_assignments_reported() {
        let c = parse_netlist(TOY1, Format::Simple).unwrap();
        assert!(matches!(
            c.simulate(&[true], None),
            Err(NetlistError::MissingAssignment { what: "input", .. })
        ));
        let s = parse_netlist("latch q n; n = NOT(q);", Format::Simple).unwrap();
        assert!(matches!(
            s.simulate(&[], None),
            Err(NetlistError::MissingAssignment { what: "present-state", .. })
        ));
    }

    #[test]
    fn gate_lookup() {
        let c = parse_netlist(TOY1, Format::Simple).unwrap();
        assert_eq!(c.find_gate("y"), Some(0));
        assert_eq!(c.find_gate("g2"), Some(1));
        assert_eq!(c.find_gate("g3"), None);
        assert_eq!(c.find_gate("x1"), None);
    }
}
