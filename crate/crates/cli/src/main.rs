use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use fprop::cnf::{encode_circuit, export_dimacs};
use fprop::mutate::{self, Mutation, Policy};
use fprop::netlist::{parse_netlist, Circuit, Format, GateKind};
use fprop::pqe::{pqe_cegar, pqe_oracle, PqeConfig, PqeProblem, Termination, DEFAULT_ENUMERATION_BOUND};
use fprop::seq::{self, SeqConfig, SeqSpecification};
use fprop::verify::{self, clauses_json, AtpgResult, CompsetConfig, Specification};
use fprop::selftest;

const EXIT_OK: u8 = 0;
const EXIT_BUG: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "fprop", version, about = "False properties and tests for gate-level circuits")]
struct Cli {
    /// Seed for randomized work (selftest instances).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for per-gate work.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Encode a netlist as DIMACS CNF.
    Encode {
        netlist: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List mutations of a netlist's gates.
    Mutate {
        netlist: PathBuf,
        #[arg(long, default_value = "mixed")]
        policy: Policy,
        /// Only this gate (signal name or g<k>).
        #[arg(long)]
        gate: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Take one mutated gate out of the quantifier scope and classify the property.
    Pqe(PqeArgs),
    /// Mutate every gate, collecting false properties and tests.
    Compset {
        netlist: PathBuf,
        /// JSON file with unproved properties over inputs and outputs.
        #[arg(long)]
        phrd: Option<PathBuf>,
        /// Reference netlist standing in for the informal specification.
        #[arg(long)]
        golden: Option<PathBuf>,
        #[arg(long, default_value = "all-gate-subst")]
        policy: Policy,
        #[arg(long)]
        continue_after_bug: bool,
        #[command(flatten)]
        budget: Budget,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Stuck-at test generation.
    Atpg {
        netlist: PathBuf,
        #[arg(long, required_unless_present = "all_faults")]
        gate: Option<String>,
        /// Stuck-at value (0 or 1).
        #[arg(long, value_parser = bit, required_unless_present = "all_faults")]
        sa: Option<bool>,
        /// Every stuck-at fault of every gate.
        #[arg(long, conflicts_with_all = ["gate", "sa"])]
        all_faults: bool,
        #[command(flatten)]
        budget: Budget,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Unroll a sequential netlist into DIMACS CNF.
    Unroll {
        netlist: PathBuf,
        #[arg(long)]
        frames: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// COMPSET over an unrolled sequential netlist.
    SeqCompset {
        netlist: PathBuf,
        #[arg(long)]
        frames: usize,
        /// JSON file with safety properties over state signals.
        #[arg(long)]
        phrd: Option<PathBuf>,
        #[arg(long)]
        golden: Option<PathBuf>,
        #[arg(long, default_value = "all-gate-subst")]
        policy: Policy,
        /// Mutate the gate in every frame, not just the first.
        #[arg(long)]
        replicate: bool,
        #[arg(long)]
        continue_after_bug: bool,
        #[command(flatten)]
        budget: Budget,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Explicit-state reachability of a tiny sequential netlist.
    Reach {
        netlist: PathBuf,
        #[arg(long, default_value_t = seq::DEFAULT_MAX_STATES)]
        max_states: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cross-check the engines against enumeration on random circuits.
    Selftest {
        #[arg(long, default_value_t = 40)]
        rounds: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Budget {
    /// Conflict limit per SAT call.
    #[arg(long)]
    conflict_budget: Option<u64>,
}

#[derive(Args)]
struct PqeArgs {
    netlist: PathBuf,
    /// Gate to mutate (signal name or g<k>).
    #[arg(long)]
    gate: String,
    /// Replace the gate by this kind.
    #[arg(long, group = "mutation")]
    kind: Option<GateKind>,
    /// Output stuck at 0 or 1.
    #[arg(long, value_parser = bit, group = "mutation")]
    sa: Option<bool>,
    /// Negate literal LIT of the gate's clause CLAUSE, as CLAUSE:LIT (0-based, within the gate).
    #[arg(long, group = "mutation")]
    flip: Option<String>,
    /// Stop at the first clause not implied by the circuit.
    #[arg(long)]
    early_stop: bool,
    #[arg(long)]
    clause_budget: Option<usize>,
    /// Verify the solution by enumeration.
    #[arg(long)]
    oracle_check: bool,
    /// Compute the enumerated solution instead.
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    budget: Budget,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn bit(s: &str) -> Result<bool, String> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(format!("expected 0 or 1, got `{s}`")),
    }
}

fn load(path: &Path) -> Result<Circuit> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut c = parse_netlist(&text, Format::from_path(path)).with_context(|| format!("{}", path.display()))?;
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        c.set_name(stem);
    }
    Ok(c)
}

fn gate_of(c: &Circuit, key: &str) -> Result<usize> {
    c.find_gate(key).ok_or_else(|| anyhow!("no gate `{key}`"))
}

/// Writes `text` to `output`, or to stdout when absent.
fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(output: &Option<PathBuf>, v: &serde_json::Value, summary: impl FnOnce() -> String) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    emit(output, &text)?;
    if output.is_some() {
        println!("{}", summary());
    }
    Ok(())
}

fn mutation_json(m: &Mutation, c: &Circuit, f: &fprop::CnfFormula) -> serde_json::Value {
    json!({
        "label": m.label(),
        "gate": format!("g{}", m.gate + 1),
        "signal": c.var_name(c.gates()[m.gate].output),
        "kind": m.kind,
        "group": m.group,
        "g_star": clauses_json(&m.g_star, f.var_map()),
    })
}

fn pqe_config(budget: &Budget) -> PqeConfig {
    PqeConfig {
        conflict_budget: budget.conflict_budget,
        ..PqeConfig::default()
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Encode { netlist, output } => {
            let c = load(&netlist)?;
            emit(&output, &export_dimacs(&encode_circuit(&c)))?;
            Ok(EXIT_OK)
        }
        Cmd::Mutate {
            netlist,
            policy,
            gate,
            output,
        } => {
            let c = load(&netlist)?;
            let f = encode_circuit(&c);
            let ms = match gate {
                Some(g) => mutate::mutations_of_gate(&f, gate_of(&c, &g)?, 0, policy),
                None => mutate::enumerate_mutations(&f, 0, policy),
            };
            let v: Vec<_> = ms.iter().map(|m| mutation_json(m, &c, &f)).collect();
            emit_json(&output, &json!(v), || format!("{} mutations", ms.len()))?;
            Ok(EXIT_OK)
        }
        Cmd::Pqe(a) => run_pqe(a),
        Cmd::Compset {
            netlist,
            phrd,
            golden,
            policy,
            continue_after_bug,
            budget,
            output,
        } => {
            let c = load(&netlist)?;
            if c.is_sequential() {
                bail!("{} has latches; use seq-compset", netlist.display());
            }
            let mut spec = Specification::default();
            if let Some(p) = phrd {
                let text = fs::read_to_string(&p).with_context(|| format!("cannot read {}", p.display()))?;
                spec.phrd = verify::parse_properties(&text, &c).with_context(|| format!("{}", p.display()))?;
            }
            if let Some(g) = golden {
                spec = spec.with_golden(&c, load(&g)?)?;
            }
            let cfg = CompsetConfig {
                policy,
                pqe: pqe_config(&budget),
                continue_after_bug,
                jobs: cli.jobs,
            };
            let r = verify::compset(&spec, &c, &cfg)?;
            let f = encode_circuit(&c);
            emit_json(&output, &r.to_json(&c, f.var_map()), || {
                let mut s = format!(
                    "{} gates processed, {} false properties, {} tests, {} skipped",
                    r.gates.len(),
                    r.pfls.len(),
                    r.tests.len(),
                    r.skipped()
                );
                if let Some(b) = &r.tst {
                    s.push_str(&format!("\nbug exposed by g{}: {}", b.gate + 1, b.test.input_text(&c)));
                }
                s
            })?;
            Ok(if r.tst.is_some() {
                EXIT_BUG
            } else if r.skipped() > 0 {
                EXIT_BUDGET
            } else {
                EXIT_OK
            })
        }
        Cmd::Atpg {
            netlist,
            gate,
            sa,
            all_faults,
            budget,
            output,
        } => {
            let c = load(&netlist)?;
            if c.is_sequential() {
                bail!("{} has latches; stuck-at test generation needs a combinational netlist", netlist.display());
            }
            let f = encode_circuit(&c);
            let faults: Vec<(usize, bool)> = if all_faults {
                (0..c.gates().len()).flat_map(|g| [(g, false), (g, true)]).collect()
            } else {
                vec![(gate_of(&c, gate.as_deref().unwrap())?, sa.unwrap())]
            };
            let cfg = pqe_config(&budget);
            let results: Vec<(usize, bool, AtpgResult)> = faults
                .into_iter()
                .map(|(g, v)| (g, v, verify::atpg_in(&c, &f, g, v, &cfg)))
                .collect();
            let mut lines = Vec::new();
            let v: Vec<_> = results
                .iter()
                .map(|(g, v, r)| {
                    let name = c.var_name(c.gates()[*g].output);
                    let (status, test) = match r {
                        AtpgResult::Detected(t) => {
                            lines.push(format!("{name} sa{}: {}", *v as u8, t.input_text(&c)));
                            ("detected", Some(t.to_json(&c)))
                        }
                        AtpgResult::Undetectable => {
                            lines.push(format!("{name} sa{}: undetectable", *v as u8));
                            ("undetectable", None)
                        }
                        AtpgResult::Aborted => {
                            lines.push(format!("{name} sa{}: aborted", *v as u8));
                            ("aborted", None)
                        }
                    };
                    json!({"gate": format!("g{}", g + 1), "signal": name, "stuck_at": *v as u8, "status": status, "test": test})
                })
                .collect();
            emit_json(&output, &json!(v), || lines.join("\n"))?;
            let aborted = results.iter().any(|r| r.2 == AtpgResult::Aborted);
            Ok(if aborted { EXIT_BUDGET } else { EXIT_OK })
        }
        Cmd::Unroll { netlist, frames, output } => {
            let c = load(&netlist)?;
            let u = seq::unroll(&c, frames)?;
            emit(&output, &export_dimacs(&u.formula))?;
            Ok(EXIT_OK)
        }
        Cmd::SeqCompset {
            netlist,
            frames,
            phrd,
            golden,
            policy,
            replicate,
            continue_after_bug,
            budget,
            output,
        } => {
            let c = load(&netlist)?;
            let mut spec = SeqSpecification::default();
            if let Some(p) = phrd {
                let text = fs::read_to_string(&p).with_context(|| format!("cannot read {}", p.display()))?;
                spec.phrd = seq::parse_state_properties(&text, &c).with_context(|| format!("{}", p.display()))?;
            }
            if let Some(g) = golden {
                let g = load(&g)?;
                if g.inputs().len() != c.inputs().len() || g.outputs().len() != c.outputs().len() {
                    bail!("golden model signature differs");
                }
                spec.golden = Some(g);
            }
            let cfg = SeqConfig {
                frames,
                policy,
                pqe: pqe_config(&budget),
                replicate,
                continue_after_bug,
                jobs: cli.jobs,
            };
            let r = seq::seq_compset(&spec, &c, &cfg)?;
            let skipped = r.gates.iter().filter(|g| g.status == verify::GateStatus::Skipped).count();
            emit_json(&output, &r.to_json(&c), || {
                let mut s = format!(
                    "{} gates processed, {} false safety properties, {} traces",
                    r.gates.len(),
                    r.pfls.len(),
                    r.traces.len()
                );
                if let Some(b) = &r.tst {
                    s.push_str(&format!("\nbug exposed by g{}:\n{}", b.gate + 1, b.trace.to_table(&c)));
                }
                s
            })?;
            Ok(if r.tst.is_some() {
                EXIT_BUG
            } else if skipped > 0 {
                EXIT_BUDGET
            } else {
                EXIT_OK
            })
        }
        Cmd::Reach {
            netlist,
            max_states,
            output,
        } => {
            let c = load(&netlist)?;
            let r = seq::reach_oracle(&c, max_states)?;
            let k = c.latches().len();
            let show = |s: &u64| -> String { (0..k).map(|i| if s >> i & 1 == 1 { '1' } else { '0' }).collect() };
            let v = json!({
                "latches": c.latches().iter().map(|l| c.var_name(l.state)).collect::<Vec<_>>(),
                "frames": r.frames.iter().map(|f| f.iter().map(show).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "reachable": r.reachable.iter().map(show).collect::<Vec<_>>(),
                "closed": r.closed,
                "diameter": r.diameter,
            });
            emit_json(&output, &v, || {
                format!("{} reachable states, diameter {}", r.reachable.len(), r.diameter)
            })?;
            Ok(EXIT_OK)
        }
        Cmd::Selftest { rounds, output } => {
            let r = selftest::run(cli.seed, rounds);
            emit_json(&output, &serde_json::to_value(&r)?, || {
                r.checks
                    .iter()
                    .map(|c| format!("{}: {} instances, {} failures", c.name, c.instances, c.failures))
                    .collect::<Vec<_>>()
                    .join("\n")
            })?;
            Ok(if r.passed() { EXIT_OK } else { EXIT_BUG })
        }
    }
}

fn run_pqe(a: PqeArgs) -> Result<u8> {
    let c = load(&a.netlist)?;
    if c.is_sequential() {
        bail!("{} has latches; use seq-compset", a.netlist.display());
    }
    let f = encode_circuit(&c);
    let gate = gate_of(&c, &a.gate)?;
    let m = if let Some(kind) = a.kind {
        mutate::gate_subst(&f, gate, 0, kind)?
    } else if let Some(v) = a.sa {
        mutate::stuck_at(&f, gate, 0, v)?
    } else if let Some(spec) = &a.flip {
        let (ci, li) = spec
            .split_once(':')
            .and_then(|(x, y)| Some((x.parse::<usize>().ok()?, y.parse::<usize>().ok()?)))
            .ok_or_else(|| anyhow!("--flip expects CLAUSE:LIT, got `{spec}`"))?;
        let group = f.group(gate, 0);
        let clause = *group
            .get(ci)
            .ok_or_else(|| anyhow!("gate has {} clauses, no clause {ci}", group.len()))?;
        mutate::clause_flip(&f, clause, li)?
    } else {
        bail!("one of --kind, --sa or --flip is required");
    };
    let p = PqeProblem::combinational(m.apply(&f)?);
    let sol = if a.oracle {
        pqe_oracle(&p, DEFAULT_ENUMERATION_BOUND)?
    } else {
        pqe_cegar(
            &p,
            &PqeConfig {
                early_stop: a.early_stop,
                clause_budget: a.clause_budget,
                conflict_budget: a.budget.conflict_budget,
                oracle_check: a.oracle_check,
                ..PqeConfig::default()
            },
        )
    };
    let prop = match sol.termination {
        Termination::ConflictBudget => None,
        t => {
            let mut prop = verify::classify_property(&c, &f, &sol.clauses);
            prop.partial = t != Termination::Complete;
            if prop.partial && prop.status == verify::Status3::True {
                prop.status = verify::Status3::Unknown;
            }
            prop.provenance = Some(m.label());
            Some(prop)
        }
    };
    // G* clauses the circuit already implies make weak mutations
    let g_star_implied: Vec<bool> = m.g_star.iter().map(|cl| fprop::sat::implies(&f, cl)).collect();
    let v = json!({
        "mutation": mutation_json(&m, &c, &f),
        "g_star_implied_by_circuit": g_star_implied,
        "solution": {
            "clauses": clauses_json(&sol.clauses, f.var_map()),
            "termination": sol.termination,
            "certificate_checked": sol.certificate_checked,
            "stats": sol.stats,
        },
        "property": prop.as_ref().map(|p| p.to_json(&c, f.var_map())),
    });
    emit_json(&a.output, &v, || match &prop {
        Some(p) => match &p.witness {
            Some(w) => format!("false property; test {}", w.input_text(&c)),
            None => format!("{:?} property with {} clauses", p.status, p.clauses.len()).to_lowercase(),
        },
        None => "conflict budget exceeded".into(),
    })?;
    Ok(match sol.termination {
        Termination::ClauseBudget | Termination::ConflictBudget => EXIT_BUDGET,
        _ => EXIT_OK,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
