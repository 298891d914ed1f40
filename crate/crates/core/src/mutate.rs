//! Mutations: replacements `G*` for a clause group `G` of a formula.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{encode_gate_with, Clause, CnfError, CnfFormula, Lit, Origin, SplitFormula};
use crate::netlist::{Circuit, GateKind, NetlistError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MutateError {
    #[error("no gate {gate} in frame {frame}")]
    UnknownGate { gate: usize, frame: u32 },
    #[error("{kind} cannot replace a gate with {arity} inputs")]
    Arity { kind: GateKind, arity: usize },
    #[error("literal {literal} out of range for clause {clause} of length {len}")]
    LiteralOutOfRange { clause: usize, literal: usize, len: usize },
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MutationKind {
    GateSubst { kind: GateKind },
    ClauseFlip { clause: usize, literal: usize },
    StuckAt { value: bool },
}

impl MutationKind {
    /// Whether the mutated relation is again a circuit (one output row per input row).
    pub fn is_functional(self) -> bool {
        !matches!(self, MutationKind::ClauseFlip { .. })
    }
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MutationKind::GateSubst { kind } => write!(f, "subst:{kind}"),
            MutationKind::ClauseFlip { clause, literal } => write!(f, "flip:{clause}.{literal}"),
            MutationKind::StuckAt { value } => write!(f, "sa{}", *value as u8),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    AllGateSubst,
    AllStuckAt,
    AllClauseFlips,
    Mixed,
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all-gate-subst" => Ok(Policy::AllGateSubst),
            "all-stuck-at" => Ok(Policy::AllStuckAt),
            "all-clause-flips" => Ok(Policy::AllClauseFlips),
            "mixed" => Ok(Policy::Mixed),
            _ => Err(format!(
                "unknown policy `{s}` (expected all-gate-subst, all-stuck-at, all-clause-flips or mixed)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mutation {
    /// Gate id of the mutated group.
    pub gate: usize,
    pub frame: u32,
    pub kind: MutationKind,
    /// Indices of the replaced clauses `G`.
    pub group: Vec<usize>,
    /// The replacement clauses `G*`, over variables of `G`.
    #[serde(skip)]
    pub g_star: Vec<Clause>,
    /// `G* = G` as clause sets.
    pub identity: bool,
}

impl Mutation {
    pub fn apply(&self, f: &CnfFormula) -> Result<SplitFormula, CnfError> {
        crate::cnf::replace_group(f, &self.group, self.g_star.clone())
    }

    /// Short label such as `g2:sa0`.
    pub fn label(&self) -> String {
        if self.frame == 0 {
            format!("g{}:{}", self.gate + 1, self.kind)
        } else {
            format!("g{}@{}:{}", self.gate + 1, self.frame, self.kind)
        }
    }

    /// The mutated circuit `N*`, for functional mutations of a combinational
    /// circuit whose encoding is `f`.
    pub fn faulty_circuit(&self, n: &Circuit) -> Option<Result<Circuit, NetlistError>> {
        match self.kind {
            MutationKind::StuckAt { value } => Some(Ok(n.with_stuck_at(self.gate, value))),
            MutationKind::GateSubst { kind } => {
                let inputs = n.gates()[self.gate].inputs.clone();
                Some(n.with_gate(self.gate, kind, inputs))
            }
            MutationKind::ClauseFlip { .. } => None,
        }
    }
}

fn same_clause_set(a: &[Clause], b: &[Clause]) -> bool {
    let ka: BTreeSet<Vec<Lit>> = a.iter().map(|c| c.key()).collect();
    let kb: BTreeSet<Vec<Lit>> = b.iter().map(|c| c.key()).collect();
    ka == kb
}

fn group_of(f: &CnfFormula, gate: usize, frame: u32) -> Result<(Vec<usize>, Origin), MutateError> {
    if f.gate_record(gate, frame).is_none() {
        return Err(MutateError::UnknownGate { gate, frame });
    }
    let origin = Origin::Gate {
        gate: gate as u32,
        frame,
    };
    Ok((f.group(gate, frame), origin))
}

/// Replaces the whole clause group of a gate by the encoding of a gate of
/// kind `kind` with the same pins.
pub fn gate_subst(f: &CnfFormula, gate: usize, frame: u32, kind: GateKind) -> Result<Mutation, MutateError> {
    let (group, origin) = group_of(f, gate, frame)?;
    let rec = f.gate_record(gate, frame).unwrap();
    if !kind.accepts_arity(rec.inputs.len()) {
        return Err(MutateError::Arity {
            kind,
            arity: rec.inputs.len(),
        });
    }
    let mut g = rec.as_gate();
    g.kind = kind;
    let g_star = encode_gate_with(&g, origin);
    let old: Vec<Clause> = group.iter().map(|&i| f.clause(i).clone()).collect();
    Ok(Mutation {
        gate,
        frame,
        kind: MutationKind::GateSubst { kind },
        identity: same_clause_set(&old, &g_star),
        group,
        g_star,
    })
}

/// Output of `gate` stuck at `value`.
///
/// Every clause of the group containing the output literal of the wrong
/// polarity gets it flipped; the other clauses stay. The group is then
/// equivalent to the unit `out = value` without any fresh variable, and only
/// the changed clauses form `G`.
pub fn stuck_at(f: &CnfFormula, gate: usize, frame: u32, value: bool) -> Result<Mutation, MutateError> {
    let (all, _) = group_of(f, gate, frame)?;
    let out = f.gate_record(gate, frame).unwrap().output;
    let wrong = Lit::new(out, !value);
    let mut group = Vec::new();
    let mut g_star = Vec::new();
    for i in all {
        let c = f.clause(i);
        if c.lits().contains(&wrong) {
            let lits = c.lits().iter().map(|&l| if l == wrong { !l } else { l });
            group.push(i);
            g_star.push(Clause::with_origin(lits, c.origin)?);
        }
    }
    Ok(Mutation {
        gate,
        frame,
        kind: MutationKind::StuckAt { value },
        identity: group.is_empty(),
        group,
        g_star,
    })
}

/// Negates literal `literal` of clause `clause`.
pub fn clause_flip(f: &CnfFormula, clause: usize, literal: usize) -> Result<Mutation, MutateError> {
    if clause >= f.len() {
        return Err(CnfError::IndexOutOfRange { index: clause, len: f.len() }.into());
    }
    let c = f.clause(clause);
    if literal >= c.len() {
        return Err(MutateError::LiteralOutOfRange {
            clause,
            literal,
            len: c.len(),
        });
    }
    let lits = c.lits().iter().enumerate().map(|(k, &l)| if k == literal { !l } else { l });
    let flipped = Clause::with_origin(lits, c.origin)?;
    let (gate, frame) = match c.origin {
        Origin::Gate { gate, frame } => (gate as usize, frame),
        _ => (usize::MAX, 0),
    };
    Ok(Mutation {
        gate,
        frame,
        kind: MutationKind::ClauseFlip { clause, literal },
        group: vec![clause],
        g_star: vec![flipped],
        identity: false,
    })
}

/// Mutations of every gate of `f` in frame `frame` under `policy`.
///
/// Order: gate id ascending; per gate, substitutions in [`GateKind::ALL`]
/// order, then stuck-at 0 and 1, then clause flips by clause and literal.
/// Identity mutations and syntactic duplicates are left out.
pub fn enumerate_mutations(f: &CnfFormula, frame: u32, policy: Policy) -> Vec<Mutation> {
    let mut gates: Vec<usize> = f
        .gates()
        .iter()
        .filter(|r| r.frame == frame)
        .map(|r| r.gate as usize)
        .collect();
    gates.sort_unstable();
    gates.into_iter().flat_map(|g| mutations_of_gate(f, g, frame, policy)).collect()
}

/// The mutations [`enumerate_mutations`] would produce for one gate.
pub fn mutations_of_gate(f: &CnfFormula, gate: usize, frame: u32, policy: Policy) -> Vec<Mutation> {
    let Some(rec) = f.gate_record(gate, frame) else {
        return Vec::new();
    };
    let subst = matches!(policy, Policy::AllGateSubst | Policy::Mixed);
    let sa = matches!(policy, Policy::AllStuckAt | Policy::Mixed);
    let flips = matches!(policy, Policy::AllClauseFlips | Policy::Mixed);
    let mut out: Vec<Mutation> = Vec::new();
    if subst {
        for kind in rec.kind.alternatives(rec.inputs.len()) {
            out.extend(gate_subst(f, gate, frame, kind).ok());
        }
    }
    if sa {
        for value in [false, true] {
            out.extend(stuck_at(f, gate, frame, value).ok());
        }
    }
    if flips {
        for i in f.group(gate, frame) {
            for k in 0..f.clause(i).len() {
                out.extend(clause_flip(f, i, k).ok());
            }
        }
    }
    let mut seen: BTreeSet<(Vec<usize>, Vec<Vec<Lit>>)> = BTreeSet::new();
    out.retain(|m| {
        let mut keys: Vec<Vec<Lit>> = m.g_star.iter().map(|c| c.key()).collect();
        keys.sort();
        !m.identity && seen.insert((m.group.clone(), keys))
    });
    out
}
