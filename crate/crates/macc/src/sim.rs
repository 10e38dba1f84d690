//! Discrete-step simulator.
//!
//! The flattened architecture executes in lockstep rounds over a shared
//! clock. Every atomic instance carries one step of delay: inputs delivered
//! at step t are the values its predecessors produced at step t-1, and at
//! step 0 all inputs are absent. Boundary wiring of composed instances adds
//! no delay because flattening removed it. Within one step every atom reads
//! only the previous round's outputs, so the result does not depend on the
//! order atoms are stepped in.
//!
//! Fully modeled atoms run their automaton: at step 0 they emit exactly
//! their initial actions; afterwards the first transition out of the
//! current state (in declaration order) whose guard holds fires, writing
//! its actions. A guard over an absent port does not hold. When no
//! transition fires the automaton stutters: state and outputs stay silent.
//!
//! Abstract atoms must be bound to implementations from a library with
//! rte `sim`, whose stub kind gives them behavior:
//!
//! ```text
//! script    replays per-port values from the scenario; the value at index
//!           t is emitted at step t, null and missing tail entries are
//!           absent
//! record    consumes inputs and emits nothing
//! table     stateless lookup: the first row whose `when` values equal the
//!           present inputs emits its `emit` values; loaded from
//!           <ImplName>.table.json next to the defining manifest
//! timer(n)  consuming the START literal on its in-port emits the ALERT
//!           literal on its out-port exactly n steps later; a new START
//!           before expiry restarts the countdown
//! ```
//!
//! The trace records, for every step and every atom, all ports: in-ports
//! show the value delivered at that step, out-ports the value produced at
//! that step. One JSON object per line, atom and port keys sorted, absent
//! as null, enum values as "Enum.LITERAL".
//!
//! Automaton guards compare strictly and raise a type fault on a runtime
//! type mismatch, which can only mean a checker bug was bypassed. Stub
//! equality (timer and table) is plain value equality instead.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value as JsonValue;

use crate::model::*;

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

/// Simulation input: the step count and per-instance scripted port values.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub steps: u64,
    #[serde(default)]
    pub scripts: BTreeMap<String, BTreeMap<String, Vec<JsonValue>>>,
}

pub fn load_scenario(text: &str) -> Result<Scenario, serde_json::Error> {
    serde_json::from_str(text)
}

// ---------------------------------------------------------------------------
// Runtime values
// ---------------------------------------------------------------------------

/// A message payload. Ports either carry one value per step or are absent.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Double(f64),
    Bool(bool),
    Str(String),
    Enum { enum_name: String, literal: String },
}

impl Value {
    fn to_json(&self) -> JsonValue {
        match self {
            Value::Int(v) => JsonValue::from(*v),
            Value::Double(v) => serde_json::Number::from_f64(*v)
                .map(JsonValue::Number)
                .unwrap_or(JsonValue::Null),
            Value::Bool(v) => JsonValue::from(*v),
            Value::Str(v) => JsonValue::from(v.clone()),
            Value::Enum { enum_name, literal } => {
                JsonValue::from(format!("{}.{}", enum_name, literal))
            }
        }
    }

    fn type_label(&self) -> String {
        match self {
            Value::Int(_) => "Integer".to_owned(),
            Value::Double(_) => "Double".to_owned(),
            Value::Bool(_) => "Boolean".to_owned(),
            Value::Str(_) => "String".to_owned(),
            Value::Enum { enum_name, .. } => enum_name.clone(),
        }
    }
}

fn compare(op: CompareOp, left: &Value, right: &Value) -> Result<bool, String> {
    let fault = || {
        Err(format!(
            "cannot compare {} against {}",
            left.type_label(),
            right.type_label()
        ))
    };
    let eq = match (left, right) {
        (Value::Int(a), Value::Int(b)) => match op {
            CompareOp::Lt => return Ok(a < b),
            CompareOp::Gt => return Ok(a > b),
            CompareOp::Le => return Ok(a <= b),
            CompareOp::Ge => return Ok(a >= b),
            _ => a == b,
        },
        (Value::Double(a), Value::Double(b)) => match op {
            CompareOp::Lt => return Ok(a < b),
            CompareOp::Gt => return Ok(a > b),
            CompareOp::Le => return Ok(a <= b),
            CompareOp::Ge => return Ok(a >= b),
            _ => a == b,
        },
        (Value::Bool(a), Value::Bool(b)) => {
            if op.is_ordering() {
                return fault();
            }
            a == b
        }
        (Value::Str(a), Value::Str(b)) => {
            if op.is_ordering() {
                return fault();
            }
            a == b
        }
        (
            Value::Enum {
                enum_name: ea,
                literal: la,
            },
            Value::Enum {
                enum_name: eb,
                literal: lb,
            },
        ) => {
            if op.is_ordering() || ea != eb {
                return fault();
            }
            la == lb
        }
        _ => return fault(),
    };
    match op {
        CompareOp::Eq => Ok(eq),
        CompareOp::Ne => Ok(!eq),
        _ => unreachable!("ordering handled above"),
    }
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Flatten(#[from] FlattenError),
    #[error("instance '{0}' has no bound implementation")]
    UnboundInstance(String),
    #[error("instance '{instance}' is bound to '{implementation}' on rte '{rte}'; simulation requires rte 'sim'")]
    RteMismatch {
        instance: String,
        implementation: String,
        rte: String,
    },
    #[error("implementation '{implementation}' bound to '{instance}' declares no stub kind")]
    MissingStubKind {
        instance: String,
        implementation: String,
    },
    #[error("no script for instance '{0}'")]
    MissingScript(String),
    #[error("script for '{instance}': {message}")]
    Script { instance: String, message: String },
    #[error("table payload for '{implementation}': {message}")]
    Table {
        implementation: String,
        message: String,
    },
    #[error("stub shape for '{instance}': {message}")]
    StubShape { instance: String, message: String },
    #[error("script target '{0}' is not a script-stub instance")]
    UnknownScriptTarget(String),
    #[error("type fault in '{instance}': {message}")]
    TypeFault { instance: String, message: String },
}

// ---------------------------------------------------------------------------
// Runtime structures
// ---------------------------------------------------------------------------

/// Port type reduced to what the runtime needs.
#[derive(Debug, Clone, PartialEq)]
enum RtType {
    Int,
    Double,
    Bool,
    Str,
    Enum { name: String, literals: Vec<String> },
    Record,
}

fn resolve_rt_type(model: &ArchitectureModel, type_name: &str) -> Option<RtType> {
    match model.data_type(type_name)? {
        DataTypeKind::Builtin("Integer") => Some(RtType::Int),
        DataTypeKind::Builtin("Double") => Some(RtType::Double),
        DataTypeKind::Builtin("Boolean") => Some(RtType::Bool),
        DataTypeKind::Builtin(_) => Some(RtType::Str),
        DataTypeKind::Enum(e) => Some(RtType::Enum {
            name: e.name.clone(),
            literals: e.literals.iter().map(|l| l.name.clone()).collect(),
        }),
        DataTypeKind::Record(_) => Some(RtType::Record),
    }
}

fn literal_to_value(lit: &Literal, ty: &RtType) -> Result<Value, String> {
    match (lit, ty) {
        (Literal::Int(v), RtType::Int) => Ok(Value::Int(*v)),
        (Literal::Float(v), RtType::Double) => Ok(Value::Double(*v)),
        (Literal::Bool(v), RtType::Bool) => Ok(Value::Bool(*v)),
        (Literal::Str(v), RtType::Str) => Ok(Value::Str(v.clone())),
        (Literal::Enum { enum_name, literal }, RtType::Enum { name, literals }) => {
            if let Some(e) = enum_name {
                if e != name {
                    return Err(format!("enum '{}' does not match port type '{}'", e, name));
                }
            }
            if !literals.iter().any(|l| l == literal) {
                return Err(format!("enum '{}' has no literal '{}'", name, literal));
            }
            Ok(Value::Enum {
                enum_name: name.clone(),
                literal: literal.clone(),
            })
        }
        _ => Err(format!(
            "literal {} does not fit the port type",
            lit.render()
        )),
    }
}

/// Converts one scripted or table JSON value against a port type.
fn json_to_value(json: &JsonValue, ty: &RtType) -> Result<Option<Value>, String> {
    match json {
        JsonValue::Null => Ok(None),
        JsonValue::Number(n) => match ty {
            RtType::Int => n
                .as_i64()
                .map(|v| Some(Value::Int(v)))
                .ok_or_else(|| format!("{} is not a valid Integer value", n)),
            RtType::Double => n
                .as_f64()
                .map(|v| Some(Value::Double(v)))
                .ok_or_else(|| format!("{} is not a valid Double value", n)),
            _ => Err(format!("number {} does not fit the port type", n)),
        },
        JsonValue::Bool(b) => match ty {
            RtType::Bool => Ok(Some(Value::Bool(*b))),
            _ => Err(format!("boolean {} does not fit the port type", b)),
        },
        JsonValue::String(s) => match ty {
            RtType::Str => Ok(Some(Value::Str(s.clone()))),
            RtType::Enum { name, literals } => {
                let Some((prefix, literal)) = s.split_once('.') else {
                    return Err(format!("'{}' is not of the form '{}.LITERAL'", s, name));
                };
                if prefix != name {
                    return Err(format!("'{}' does not belong to enum '{}'", s, name));
                }
                if !literals.iter().any(|l| l == literal) {
                    return Err(format!("enum '{}' has no literal '{}'", name, literal));
                }
                Ok(Some(Value::Enum {
                    enum_name: name.clone(),
                    literal: literal.to_owned(),
                }))
            }
            _ => Err(format!("string '{}' does not fit the port type", s)),
        },
        other => Err(format!("unsupported scripted value {}", other)),
    }
}

#[derive(Debug, Clone)]
struct PortRt {
    name: String,
    direction: PortDirection,
}

#[derive(Debug, Clone)]
struct TransitionRt {
    source: usize,
    target: usize,
    guard: Vec<(usize, CompareOp, Value)>,
    actions: Vec<(usize, Value)>,
}

#[derive(Debug, Clone)]
struct AutomatonRt {
    state: usize,
    initial_actions: Vec<(usize, Value)>,
    transitions: Vec<TransitionRt>,
}

/// One lookup row: port-indexed `when` conditions and `emit` outputs.
type TableRow = (Vec<(usize, Value)>, Vec<(usize, Value)>);

#[derive(Debug, Clone)]
enum AtomBehavior {
    Automaton(AutomatonRt),
    Script {
        values: Vec<(usize, Vec<Option<Value>>)>,
    },
    Record,
    Table {
        rows: Vec<TableRow>,
    },
    Timer {
        delay: u32,
        start_port: usize,
        alert_port: usize,
        start_value: Value,
        alert_value: Value,
        remaining: Option<u32>,
    },
}

#[derive(Debug, Clone)]
struct AtomRt {
    qualified_name: String,
    ports: Vec<PortRt>,
    behavior: AtomBehavior,
}

#[derive(Debug, Clone, Copy)]
struct WireRt {
    from_atom: usize,
    from_port: usize,
    to_atom: usize,
    to_port: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub step: u64,
    pub outputs: BTreeMap<String, BTreeMap<String, JsonValue>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimulationTrace {
    pub steps: Vec<TraceStep>,
}

impl SimulationTrace {
    /// One compact JSON object per line, newline-terminated.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            out.push_str(&serde_json::to_string(step).expect("trace steps serialize"));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug)]
pub struct RuntimeState {
    atoms: Vec<AtomRt>,
    wires: Vec<WireRt>,
    prev_out: Vec<Vec<Option<Value>>>,
    time: u64,
}

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

const SIM_RTE: &str = "sim";

/// Builds the runtime for a bound instance tree: flattens the architecture,
/// compiles automata, and materializes the simulation stubs.
pub fn init_runtime(
    tree: &InstanceTree,
    model: &ArchitectureModel,
    scenario: &Scenario,
    libraries: &[CodeLibraryManifest],
) -> Result<RuntimeState, SimError> {
    let flat = flatten(tree, model)?;

    let mut atoms = Vec::new();
    for flat_atom in &flat.atoms {
        let node = tree
            .find(&flat_atom.qualified_name)
            .expect("flattened atoms come from the tree");
        let ct = model
            .component(&flat_atom.type_name)
            .expect("instantiation resolved every type");
        let ports: Vec<PortRt> = ct
            .ports
            .iter()
            .map(|p| PortRt {
                name: p.name.clone(),
                direction: p.direction,
            })
            .collect();
        let port_types: Vec<Option<RtType>> = ct
            .ports
            .iter()
            .map(|p| resolve_rt_type(model, &p.type_name))
            .collect();

        let behavior = match node.classification {
            Classification::Composed => unreachable!("flatten returns only atoms"),
            Classification::FullyModeled => {
                let auto = ct.automaton.as_ref().expect("fully modeled");
                AtomBehavior::Automaton(compile_automaton(
                    auto,
                    &flat_atom.qualified_name,
                    &ports,
                    &port_types,
                )?)
            }
            Classification::Abstract => {
                let Some(binding) = &node.resolved_binding else {
                    return Err(SimError::UnboundInstance(flat_atom.qualified_name.clone()));
                };
                if binding.rte != SIM_RTE {
                    return Err(SimError::RteMismatch {
                        instance: flat_atom.qualified_name.clone(),
                        implementation: binding.implementation.clone(),
                        rte: binding.rte.clone(),
                    });
                }
                let Some(kind) = &binding.kind else {
                    return Err(SimError::MissingStubKind {
                        instance: flat_atom.qualified_name.clone(),
                        implementation: binding.implementation.clone(),
                    });
                };
                match kind {
                    StubKind::Record => AtomBehavior::Record,
                    StubKind::Script => {
                        init_script(&flat_atom.qualified_name, scenario, &ports, &port_types)?
                    }
                    StubKind::Table => init_table(binding, libraries, &ports, &port_types)?,
                    StubKind::Timer(delay) => {
                        let ins: Vec<usize> = (0..ports.len())
                            .filter(|i| ports[*i].direction == PortDirection::In)
                            .collect();
                        let outs: Vec<usize> = (0..ports.len())
                            .filter(|i| ports[*i].direction == PortDirection::Out)
                            .collect();
                        let shape_err = |message: String| SimError::StubShape {
                            instance: flat_atom.qualified_name.clone(),
                            message,
                        };
                        let (&[start_port], &[alert_port]) = (ins.as_slice(), outs.as_slice())
                        else {
                            return Err(shape_err(
                                "a timer stub requires exactly one in-port and one out-port"
                                    .to_owned(),
                            ));
                        };
                        let enum_value = |idx: usize, literal: &str| -> Result<Value, SimError> {
                            match &port_types[idx] {
                                Some(RtType::Enum { name, literals })
                                    if literals.iter().any(|l| l == literal) =>
                                {
                                    Ok(Value::Enum {
                                        enum_name: name.clone(),
                                        literal: literal.to_owned(),
                                    })
                                }
                                _ => Err(shape_err(format!(
                                    "port '{}' must have an enum type with a {} literal",
                                    ports[idx].name, literal
                                ))),
                            }
                        };
                        AtomBehavior::Timer {
                            delay: *delay,
                            start_port,
                            alert_port,
                            start_value: enum_value(start_port, "START")?,
                            alert_value: enum_value(alert_port, "ALERT")?,
                            remaining: None,
                        }
                    }
                }
            }
        };
        atoms.push(AtomRt {
            qualified_name: flat_atom.qualified_name.clone(),
            ports,
            behavior,
        });
    }

    // Every scripts entry must feed a script stub.
    for qname in scenario.scripts.keys() {
        let is_script_atom = atoms.iter().any(|a| {
            a.qualified_name == *qname && matches!(a.behavior, AtomBehavior::Script { .. })
        });
        if !is_script_atom {
            return Err(SimError::UnknownScriptTarget(qname.clone()));
        }
    }

    let atom_index: BTreeMap<&str, usize> = atoms
        .iter()
        .enumerate()
        .map(|(i, a)| (a.qualified_name.as_str(), i))
        .collect();
    let mut wires = Vec::new();
    for wire in &flat.wires {
        let from_atom = atom_index[wire.from_instance.as_str()];
        let to_atom = atom_index[wire.to_instance.as_str()];
        let from_port = atoms[from_atom]
            .ports
            .iter()
            .position(|p| p.name == wire.from_port)
            .expect("checked connector endpoint");
        let to_port = atoms[to_atom]
            .ports
            .iter()
            .position(|p| p.name == wire.to_port)
            .expect("checked connector endpoint");
        wires.push(WireRt {
            from_atom,
            from_port,
            to_atom,
            to_port,
        });
    }

    let prev_out = atoms.iter().map(|a| vec![None; a.ports.len()]).collect();
    Ok(RuntimeState {
        atoms,
        wires,
        prev_out,
        time: 0,
    })
}

fn compile_automaton(
    auto: &Automaton,
    instance: &str,
    ports: &[PortRt],
    port_types: &[Option<RtType>],
) -> Result<AutomatonRt, SimError> {
    let fault = |message: String| SimError::TypeFault {
        instance: instance.to_owned(),
        message,
    };
    let state_index = |name: &str| -> Result<usize, SimError> {
        auto.states
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| fault(format!("state '{}' is not declared", name)))
    };
    let port_value = |port: &str, lit: &Literal| -> Result<(usize, Value), SimError> {
        let idx = ports
            .iter()
            .position(|p| p.name == port)
            .ok_or_else(|| fault(format!("port '{}' is not declared", port)))?;
        let ty = port_types[idx]
            .as_ref()
            .ok_or_else(|| fault(format!("port '{}' has an unresolved type", port)))?;
        let value = literal_to_value(lit, ty).map_err(&fault)?;
        Ok((idx, value))
    };
    let compile_actions = |actions: &[Action]| -> Result<Vec<(usize, Value)>, SimError> {
        actions
            .iter()
            .map(|a| port_value(&a.port, &a.value))
            .collect()
    };

    let mut transitions = Vec::new();
    for t in &auto.transitions {
        let guard = t
            .guard
            .iter()
            .map(|g| {
                let (idx, value) = port_value(&g.port, &g.literal)?;
                Ok((idx, g.op, value))
            })
            .collect::<Result<Vec<_>, SimError>>()?;
        transitions.push(TransitionRt {
            source: state_index(&t.source)?,
            target: state_index(&t.target)?,
            guard,
            actions: compile_actions(&t.actions)?,
        });
    }
    Ok(AutomatonRt {
        state: state_index(&auto.initial_state)?,
        initial_actions: compile_actions(&auto.initial_actions)?,
        transitions,
    })
}

fn init_script(
    instance: &str,
    scenario: &Scenario,
    ports: &[PortRt],
    port_types: &[Option<RtType>],
) -> Result<AtomBehavior, SimError> {
    let Some(script) = scenario.scripts.get(instance) else {
        return Err(SimError::MissingScript(instance.to_owned()));
    };
    let err = |message: String| SimError::Script {
        instance: instance.to_owned(),
        message,
    };
    let mut values = Vec::new();
    for (port_name, raw_values) in script {
        let Some(idx) = ports.iter().position(|p| p.name == *port_name) else {
            return Err(err(format!(
                "'{}' is not a port of this instance",
                port_name
            )));
        };
        if ports[idx].direction != PortDirection::Out {
            return Err(err(format!(
                "'{}' is an in-port; scripts drive out-ports",
                port_name
            )));
        }
        let ty = port_types[idx]
            .as_ref()
            .ok_or_else(|| err(format!("port '{}' has an unresolved type", port_name)))?;
        if *ty == RtType::Record {
            return Err(err(format!(
                "port '{}' has a record type; record values cannot be scripted",
                port_name
            )));
        }
        let converted = raw_values
            .iter()
            .map(|v| json_to_value(v, ty).map_err(|m| err(format!("port '{}': {}", port_name, m))))
            .collect::<Result<Vec<_>, SimError>>()?;
        values.push((idx, converted));
    }
    Ok(AtomBehavior::Script { values })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TablePayload {
    rows: Vec<TableRowPayload>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableRowPayload {
    #[serde(default)]
    when: BTreeMap<String, JsonValue>,
    #[serde(default)]
    emit: BTreeMap<String, JsonValue>,
}

fn init_table(
    binding: &ImplementationRef,
    libraries: &[CodeLibraryManifest],
    ports: &[PortRt],
    port_types: &[Option<RtType>],
) -> Result<AtomBehavior, SimError> {
    let err = |message: String| SimError::Table {
        implementation: binding.implementation.clone(),
        message,
    };
    let manifest = libraries
        .iter()
        .find(|m| m.name == binding.library)
        .ok_or_else(|| err("defining library is not loaded".to_owned()))?;
    let dir = manifest
        .source_dir
        .as_ref()
        .ok_or_else(|| err("defining library has no source directory".to_owned()))?;
    let path = dir.join(format!("{}.table.json", binding.implementation));
    let text = std::fs::read_to_string(&path)
        .map_err(|e| err(format!("cannot read '{}': {}", path.display(), e)))?;
    let payload: TablePayload =
        serde_json::from_str(&text).map_err(|e| err(format!("invalid payload: {}", e)))?;

    let resolve_cells = |cells: &BTreeMap<String, JsonValue>,
                         direction: PortDirection,
                         what: &str|
     -> Result<Vec<(usize, Value)>, SimError> {
        let mut out = Vec::new();
        for (port_name, raw) in cells {
            let Some(idx) = ports.iter().position(|p| p.name == *port_name) else {
                return Err(err(format!(
                    "{} references unknown port '{}'",
                    what, port_name
                )));
            };
            if ports[idx].direction != direction {
                let expected = match direction {
                    PortDirection::In => "in",
                    PortDirection::Out => "out",
                };
                return Err(err(format!(
                    "{} port '{}' must be an {}-port",
                    what, port_name, expected
                )));
            }
            let ty = port_types[idx]
                .as_ref()
                .ok_or_else(|| err(format!("port '{}' has an unresolved type", port_name)))?;
            let value = json_to_value(raw, ty)
                .map_err(|m| err(format!("port '{}': {}", port_name, m)))?
                .ok_or_else(|| {
                    err(format!(
                        "{} values must be present; omit port '{}' instead of null",
                        what, port_name
                    ))
                })?;
            out.push((idx, value));
        }
        Ok(out)
    };

    let mut rows = Vec::new();
    for row in &payload.rows {
        rows.push((
            resolve_cells(&row.when, PortDirection::In, "when")?,
            resolve_cells(&row.emit, PortDirection::Out, "emit")?,
        ));
    }
    Ok(AtomBehavior::Table { rows })
}

// ---------------------------------------------------------------------------
// Stepping
// ---------------------------------------------------------------------------

impl RuntimeState {
    pub fn time(&self) -> u64 {
        self.time
    }

    /// Runs one lockstep round and returns its trace row.
    pub fn step(&mut self) -> Result<TraceStep, SimError> {
        let order: Vec<usize> = (0..self.atoms.len()).collect();
        self.step_in_order(&order)
    }

    /// Same round with an explicit atom evaluation order; the result must
    /// not depend on it because atoms only read the previous round.
    pub fn step_in_order(&mut self, order: &[usize]) -> Result<TraceStep, SimError> {
        let t = self.time;
        let mut ins: Vec<Vec<Option<Value>>> = self
            .atoms
            .iter()
            .map(|a| vec![None; a.ports.len()])
            .collect();
        for wire in &self.wires {
            ins[wire.to_atom][wire.to_port] = self.prev_out[wire.from_atom][wire.from_port].clone();
        }
        let mut outs: Vec<Vec<Option<Value>>> = self
            .atoms
            .iter()
            .map(|a| vec![None; a.ports.len()])
            .collect();
        for &idx in order {
            let atom = &mut self.atoms[idx];
            step_atom(atom, t, &ins[idx], &mut outs[idx])?;
        }

        let mut row_outputs = BTreeMap::new();
        for (idx, atom) in self.atoms.iter().enumerate() {
            let mut port_map = BTreeMap::new();
            for (p, port) in atom.ports.iter().enumerate() {
                let value = match port.direction {
                    PortDirection::In => &ins[idx][p],
                    PortDirection::Out => &outs[idx][p],
                };
                port_map.insert(
                    port.name.clone(),
                    value
                        .as_ref()
                        .map(Value::to_json)
                        .unwrap_or(JsonValue::Null),
                );
            }
            row_outputs.insert(atom.qualified_name.clone(), port_map);
        }

        self.prev_out = outs;
        self.time += 1;
        Ok(TraceStep {
            step: t,
            outputs: row_outputs,
        })
    }
}

fn step_atom(
    atom: &mut AtomRt,
    t: u64,
    ins: &[Option<Value>],
    outs: &mut [Option<Value>],
) -> Result<(), SimError> {
    match &mut atom.behavior {
        AtomBehavior::Automaton(a) => {
            if t == 0 {
                for (port, value) in &a.initial_actions {
                    outs[*port] = Some(value.clone());
                }
                return Ok(());
            }
            let mut fired = None;
            for (i, tr) in a.transitions.iter().enumerate() {
                if tr.source != a.state {
                    continue;
                }
                let mut holds = true;
                for (port, op, value) in &tr.guard {
                    match &ins[*port] {
                        None => {
                            holds = false;
                            break;
                        }
                        Some(present) => {
                            let ok = compare(*op, present, value).map_err(|message| {
                                SimError::TypeFault {
                                    instance: atom.qualified_name.clone(),
                                    message,
                                }
                            })?;
                            if !ok {
                                holds = false;
                                break;
                            }
                        }
                    }
                }
                if holds {
                    fired = Some(i);
                    break;
                }
            }
            if let Some(i) = fired {
                a.state = a.transitions[i].target;
                for (port, value) in a.transitions[i].actions.clone() {
                    outs[port] = Some(value);
                }
            }
        }
        AtomBehavior::Script { values } => {
            for (port, series) in values.iter() {
                outs[*port] = series.get(t as usize).cloned().flatten();
            }
        }
        AtomBehavior::Record => {}
        AtomBehavior::Table { rows } => {
            for (when, emit) in rows.iter() {
                if when.iter().all(|(p, v)| ins[*p].as_ref() == Some(v)) {
                    for (port, value) in emit {
                        outs[*port] = Some(value.clone());
                    }
                    break;
                }
            }
        }
        AtomBehavior::Timer {
            delay,
            start_port,
            alert_port,
            start_value,
            alert_value,
            remaining,
        } => {
            if let Some(r) = remaining {
                *r -= 1;
                if *r == 0 {
                    outs[*alert_port] = Some(alert_value.clone());
                    *remaining = None;
                }
            }
            if ins[*start_port].as_ref() == Some(start_value) {
                *remaining = Some(*delay);
            }
        }
    }
    Ok(())
}

/// Initializes a runtime and executes `scenario.steps` rounds.
pub fn run(
    tree: &InstanceTree,
    model: &ArchitectureModel,
    scenario: &Scenario,
    libraries: &[CodeLibraryManifest],
) -> Result<SimulationTrace, SimError> {
    let mut rt = init_runtime(tree, model, scenario, libraries)?;
    let mut trace = SimulationTrace::default();
    for _ in 0..scenario.steps {
        trace.steps.push(rt.step()?);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binding::apply_binding;
    use crate::parse::grammar::{
        parse_application, parse_architecture, parse_class_diagram, parse_library,
    };
    use crate::parse::workspace::{load_application, load_libraries, load_workspace};
    use crate::parse::{SourceKind, SourceUnit};
    use std::path::{Path, PathBuf};

    fn arc(name: &str, text: &str) -> SourcedComponent {
        let unit = SourceUnit {
            path: format!("{}.arc", name),
            kind: SourceKind::Architecture,
            text: text.to_owned(),
        };
        SourcedComponent {
            file: unit.path.clone(),
            component: parse_architecture(&unit).unwrap(),
        }
    }

    fn cd(name: &str, text: &str) -> SourcedDiagram {
        let unit = SourceUnit {
            path: format!("{}.cd", name),
            kind: SourceKind::ClassDiagram,
            text: text.to_owned(),
        };
        SourcedDiagram {
            file: unit.path.clone(),
            diagram: parse_class_diagram(&unit).unwrap(),
        }
    }

    fn lib(text: &str) -> CodeLibraryManifest {
        let unit = SourceUnit {
            path: "Test.lib".to_owned(),
            kind: SourceKind::LibraryManifest,
            text: text.to_owned(),
        };
        parse_library(&unit).unwrap()
    }

    fn app(text: &str) -> ApplicationConfiguration {
        let unit = SourceUnit {
            path: "Test.app".to_owned(),
            kind: SourceKind::AppConfig,
            text: text.to_owned(),
        };
        parse_application(&unit).unwrap()
    }

    fn scenario(text: &str) -> Scenario {
        load_scenario(text).unwrap()
    }

    /// Script feeding a timer; the timer is restarted by a second START
    /// while counting, pushing the alert back by one step.
    fn timer_rig() -> (ArchitectureModel, InstanceTree, Vec<CodeLibraryManifest>) {
        let model = ArchitectureModel {
            components: vec![
                arc("Gen", "component Gen {\n  port out Sig tick;\n}\n"),
                arc(
                    "Clock",
                    "component Clock {\n  port\n    in Sig arm,\n    out Sig ring;\n}\n",
                ),
                arc(
                    "Rig",
                    "component Rig {\n  component Gen g;\n  component Clock c;\n  connect g.tick -> c.arm;\n}\n",
                ),
            ],
            diagrams: vec![cd(
                "Signals",
                "classdiagram Signals {\n  enum Sig { START, ALERT; }\n}\n",
            )],
        };
        let tree = instantiate(&model, "Rig").unwrap();
        let libs = vec![lib(
            "library TestStubs {\n  rte sim;\n  implementation G implements Gen kind script;\n  implementation C implements Clock kind timer(2);\n}\n",
        )];
        let config = app(
            "import TestStubs.*;\n\napplication TimerRig {\n  generators structure-a;\n  bindings\n    map Rig.g to G,\n    map Rig.c to C;\n}\n",
        );
        let bound = apply_binding(&tree, &config, &libs).unwrap();
        (model, bound, libs)
    }

    #[test]
    fn the_closed_loop_trace_matches_the_golden_file() {
        let ws = load_workspace(&[PathBuf::from("tests/fixtures/bumperbot")]).unwrap();
        assert!(ws.diagnostics.is_empty());
        let libs = load_libraries(&[PathBuf::from("tests/fixtures/libs")]).unwrap();
        assert!(libs.diagnostics.is_empty());
        let config = load_application(Path::new("tests/fixtures/apps/sim.app"))
            .unwrap()
            .unwrap();
        let tree = instantiate(&ws.model, "BumperBot").unwrap();
        let bound = apply_binding(&tree, &config, &libs.manifests).unwrap();
        let scenario = scenario(include_str!("../tests/fixtures/scenario/bumperbot.json"));
        let trace = run(&bound, &ws.model, &scenario, &libs.manifests).unwrap();
        assert_eq!(
            trace.to_jsonl(),
            include_str!("../tests/fixtures/golden/bumperbot-trace.jsonl")
        );
    }

    #[test]
    fn the_step_order_does_not_change_the_trace() {
        let ws = load_workspace(&[PathBuf::from("tests/fixtures/bumperbot")]).unwrap();
        let libs = load_libraries(&[PathBuf::from("tests/fixtures/libs")]).unwrap();
        let config = load_application(Path::new("tests/fixtures/apps/sim.app"))
            .unwrap()
            .unwrap();
        let tree = instantiate(&ws.model, "BumperBot").unwrap();
        let bound = apply_binding(&tree, &config, &libs.manifests).unwrap();
        let scenario = scenario(include_str!("../tests/fixtures/scenario/bumperbot.json"));

        let mut forward = init_runtime(&bound, &ws.model, &scenario, &libs.manifests).unwrap();
        let mut backward = init_runtime(&bound, &ws.model, &scenario, &libs.manifests).unwrap();
        let reversed: Vec<usize> = (0..backward.atoms.len()).rev().collect();
        for _ in 0..scenario.steps {
            let a = forward.step().unwrap();
            let b = backward.step_in_order(&reversed).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn a_second_start_restarts_the_countdown() {
        let (model, bound, libs) = timer_rig();
        let scenario =
            scenario(r#"{"steps": 6, "scripts": {"Rig.g": {"tick": ["Sig.START", "Sig.START"]}}}"#);
        let trace = run(&bound, &model, &scenario, &libs).unwrap();
        let ring: Vec<JsonValue> = trace
            .steps
            .iter()
            .map(|s| s.outputs["Rig.c"]["ring"].clone())
            .collect();
        // Armed at step 1, restarted at step 2, so the two-step delay ends
        // at step 4 rather than step 3.
        let expected: Vec<JsonValue> = vec![
            JsonValue::Null,
            JsonValue::Null,
            JsonValue::Null,
            JsonValue::Null,
            JsonValue::from("Sig.ALERT"),
            JsonValue::Null,
        ];
        assert_eq!(ring, expected);
    }

    #[test]
    fn a_script_may_be_longer_than_the_run() {
        let (model, bound, libs) = timer_rig();
        let scenario = scenario(
            r#"{"steps": 1, "scripts": {"Rig.g": {"tick": ["Sig.START", "Sig.START", "Sig.START"]}}}"#,
        );
        let trace = run(&bound, &model, &scenario, &libs).unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].outputs["Rig.g"]["tick"], "Sig.START");
    }

    #[test]
    fn a_zero_step_scenario_yields_an_empty_trace() {
        let (model, bound, libs) = timer_rig();
        let scenario = scenario(r#"{"steps": 0, "scripts": {"Rig.g": {"tick": []}}}"#);
        let trace = run(&bound, &model, &scenario, &libs).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.to_jsonl(), "");
    }

    #[test]
    fn a_script_stub_without_a_script_is_rejected() {
        let (model, bound, libs) = timer_rig();
        let scenario = scenario(r#"{"steps": 3}"#);
        let err = run(&bound, &model, &scenario, &libs).unwrap_err();
        assert!(matches!(err, SimError::MissingScript(q) if q == "Rig.g"));
    }

    #[test]
    fn a_script_for_a_non_script_instance_is_rejected() {
        let (model, bound, libs) = timer_rig();
        let scenario =
            scenario(r#"{"steps": 3, "scripts": {"Rig.g": {"tick": []}, "Rig.c": {"ring": []}}}"#);
        let err = run(&bound, &model, &scenario, &libs).unwrap_err();
        assert!(matches!(err, SimError::UnknownScriptTarget(q) if q == "Rig.c"));
    }

    #[test]
    fn a_binding_outside_the_sim_rte_is_rejected() {
        let model = ArchitectureModel {
            components: vec![arc("Gen", "component Gen {\n  port out Sig tick;\n}\n")],
            diagrams: vec![cd(
                "Signals",
                "classdiagram Signals {\n  enum Sig { START, ALERT; }\n}\n",
            )],
        };
        let tree = instantiate(&model, "Gen").unwrap();
        let libs = vec![lib(
            "library Native {\n  rte rte-a;\n  implementation G implements Gen;\n}\n",
        )];
        let config = app(
            "import Native.*;\n\napplication Bad {\n  generators structure-a;\n  bindings map Gen to G;\n}\n",
        );
        let bound = apply_binding(&tree, &config, &libs).unwrap();
        let err = init_runtime(&bound, &model, &Scenario::default(), &libs).unwrap_err();
        assert!(matches!(
            err,
            SimError::RteMismatch { instance, rte, .. } if instance == "Gen" && rte == "rte-a"
        ));
    }

    #[test]
    fn a_sim_binding_without_a_stub_kind_is_rejected() {
        let model = ArchitectureModel {
            components: vec![arc("Gen", "component Gen {\n  port out Sig tick;\n}\n")],
            diagrams: vec![cd(
                "Signals",
                "classdiagram Signals {\n  enum Sig { START, ALERT; }\n}\n",
            )],
        };
        let tree = instantiate(&model, "Gen").unwrap();
        let libs = vec![lib(
            "library Stubs {\n  rte sim;\n  implementation G implements Gen;\n}\n",
        )];
        let config = app(
            "import Stubs.*;\n\napplication Bad {\n  generators structure-a;\n  bindings map Gen to G;\n}\n",
        );
        let bound = apply_binding(&tree, &config, &libs).unwrap();
        let err = init_runtime(&bound, &model, &Scenario::default(), &libs).unwrap_err();
        assert!(matches!(err, SimError::MissingStubKind { .. }));
    }

    #[test]
    fn an_unbound_abstract_atom_is_rejected() {
        let (model, _, libs) = timer_rig();
        let unbound = instantiate(&model, "Rig").unwrap();
        let err = init_runtime(&unbound, &model, &Scenario::default(), &libs).unwrap_err();
        assert!(matches!(err, SimError::UnboundInstance(q) if q == "Rig.g"));
    }

    #[test]
    fn a_timer_needs_one_in_port_and_one_out_port() {
        let model = ArchitectureModel {
            components: vec![arc(
                "Clock2",
                "component Clock2 {\n  port\n    in Sig a,\n    in Sig b,\n    out Sig ring;\n}\n",
            )],
            diagrams: vec![cd(
                "Signals",
                "classdiagram Signals {\n  enum Sig { START, ALERT; }\n}\n",
            )],
        };
        let tree = instantiate(&model, "Clock2").unwrap();
        let libs = vec![lib(
            "library Stubs {\n  rte sim;\n  implementation C implements Clock2 kind timer(1);\n}\n",
        )];
        let config = app(
            "import Stubs.*;\n\napplication Bad {\n  generators structure-a;\n  bindings map Clock2 to C;\n}\n",
        );
        let bound = apply_binding(&tree, &config, &libs).unwrap();
        let err = init_runtime(&bound, &model, &Scenario::default(), &libs).unwrap_err();
        assert!(matches!(err, SimError::StubShape { .. }));
    }

    /// Two transitions out of the same state are both enabled; the first
    /// declared one fires. A guard over an absent port holds nothing.
    #[test]
    fn transitions_fire_in_declaration_order_and_need_present_inputs() {
        let model = ArchitectureModel {
            components: vec![
                arc("Feeder", "component Feeder {\n  port out Integer v;\n}\n"),
                arc(
                    "Pick",
                    "component Pick {\n  port\n    in Integer x,\n    out Integer y;\n  automaton {\n    state S;\n    initial S;\n    S -> S [x > 0] / {y = 1};\n    S -> S [x > 0] / {y = 2};\n  }\n}\n",
                ),
                arc(
                    "Root",
                    "component Root {\n  component Feeder f;\n  component Pick p;\n  connect f.v -> p.x;\n}\n",
                ),
            ],
            diagrams: vec![],
        };
        let tree = instantiate(&model, "Root").unwrap();
        let libs = vec![lib(
            "library Stubs {\n  rte sim;\n  implementation F implements Feeder kind script;\n}\n",
        )];
        let config = app(
            "import Stubs.*;\n\napplication Picky {\n  generators structure-a;\n  bindings map Root.f to F;\n}\n",
        );
        let bound = apply_binding(&tree, &config, &libs).unwrap();
        let scenario = scenario(r#"{"steps": 3, "scripts": {"Root.f": {"v": [null, 7]}}}"#);
        let trace = run(&bound, &model, &scenario, &libs).unwrap();
        let y: Vec<JsonValue> = trace
            .steps
            .iter()
            .map(|s| s.outputs["Root.p"]["y"].clone())
            .collect();
        // Step 0 has no initial actions, step 1 sees an absent input, step 2
        // sees 7 and the first matching transition wins.
        assert_eq!(
            y,
            vec![JsonValue::Null, JsonValue::Null, JsonValue::from(1)]
        );
    }

    /// A wire delivering an enum into an Integer guard is a model error the
    /// checker would reject; the runtime refuses to compare across types.
    #[test]
    fn comparing_across_value_types_is_a_fault() {
        let model = ArchitectureModel {
            components: vec![
                arc("Feeder", "component Feeder {\n  port out Sig v;\n}\n"),
                arc(
                    "Pick",
                    "component Pick {\n  port\n    in Integer x,\n    out Integer y;\n  automaton {\n    state S;\n    initial S;\n    S -> S [x > 0] / {y = 1};\n  }\n}\n",
                ),
                arc(
                    "Root",
                    "component Root {\n  component Feeder f;\n  component Pick p;\n  connect f.v -> p.x;\n}\n",
                ),
            ],
            diagrams: vec![cd(
                "Signals",
                "classdiagram Signals {\n  enum Sig { START, ALERT; }\n}\n",
            )],
        };
        let tree = instantiate(&model, "Root").unwrap();
        let libs = vec![lib(
            "library Stubs {\n  rte sim;\n  implementation F implements Feeder kind script;\n}\n",
        )];
        let config = app(
            "import Stubs.*;\n\napplication Faulty {\n  generators structure-a;\n  bindings map Root.f to F;\n}\n",
        );
        let bound = apply_binding(&tree, &config, &libs).unwrap();
        let scenario = scenario(r#"{"steps": 2, "scripts": {"Root.f": {"v": ["Sig.START"]}}}"#);
        let err = run(&bound, &model, &scenario, &libs).unwrap_err();
        assert!(
            matches!(&err, SimError::TypeFault { instance, .. } if instance == "Root.p"),
            "unexpected error: {}",
            err
        );
    }

    #[test]
    fn a_table_stub_emits_its_matching_row() {
        let ws = load_workspace(&[PathBuf::from("tests/fixtures/bumperbot")]).unwrap();
        let libs = load_libraries(&[PathBuf::from("tests/fixtures/libs")]).unwrap();
        let tree = instantiate(&ws.model, "TouchSensor").unwrap();
        let config = app(
            "import SimStubs.*;\n\napplication TouchBench {\n  generators structure-a;\n  bindings map TouchSensor to ConstantTouch;\n}\n",
        );
        let bound = apply_binding(&tree, &config, &libs.manifests).unwrap();
        let scenario = scenario(r#"{"steps": 2}"#);
        let trace = run(&bound, &ws.model, &scenario, &libs.manifests).unwrap();
        for step in &trace.steps {
            assert_eq!(step.outputs["TouchSensor"]["state"], "TouchState.RELEASED");
        }
    }

    #[test]
    fn scenarios_reject_unknown_fields() {
        assert!(load_scenario(r#"{"steps": 1, "speed": 3}"#).is_err());
        assert!(load_scenario(r#"{"steps": 1}"#).is_ok());
    }
}
