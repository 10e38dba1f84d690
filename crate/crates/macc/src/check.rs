//! Design-time context conditions.
//!
//! Architecture checks (CC1..CC7, CC12) run over the whole workspace:
//!
//! ```text
//! CC1   type names are unique across the workspace and distinct from the
//!       built-in data types
//! CC2   port names and subcomponent instance names of one component share
//!       a namespace and are unique
//! CC3   connector endpoints exist and respect direction: sources are own
//!       in-ports or subcomponent out-ports, targets the reverse
//! CC4   connected ports carry the same data type
//! CC5   every subcomponent in-port and every own out-port of a composed
//!       component has exactly one driver (unconnected subcomponent
//!       out-ports only warn)
//! CC6   automata are closed: states declared, guards read in-ports,
//!       actions write out-ports, literals match port types, one action
//!       set assigns a port at most once
//! CC7   composed components do not declare automata
//! CC12  type names inside one class diagram are unique
//! ```
//!
//! Binding checks (CC8..CC11 plus `IMPORT` and `SCOPE`) run against an
//! instance tree and an application configuration. The simulation variant
//! skips the generator conditions (CC10) because the simulator ignores the
//! generators clause.
//!
//! Every diagnostic carries a stable code and a source location; reports
//! are sorted by (file, line, column, code). Checks are per-declaration, so
//! adding declarations never removes diagnostics from existing ones.

use std::collections::{HashMap, HashSet};

use crate::codegen::{self, GeneratorDescriptor};
use crate::diag::{CheckReport, Diagnostic, Loc};
use crate::model::*;

// ---------------------------------------------------------------------------
// Architecture checks
// ---------------------------------------------------------------------------

pub fn check_architecture(model: &ArchitectureModel) -> CheckReport {
    let mut diags = Vec::new();
    check_type_names(model, &mut diags);
    for sourced in &model.components {
        check_component(&sourced.component, &sourced.file, model, &mut diags);
    }
    let mut report = CheckReport { diagnostics: diags };
    report.sort();
    report
}

/// CC1 and CC12. Declarations are pooled in file order; the first
/// occurrence of a name wins and every later one is flagged, against CC12
/// when the clash is inside one class diagram and CC1 otherwise.
fn check_type_names(model: &ArchitectureModel, diags: &mut Vec<Diagnostic>) {
    // (file, loc, container key, name); container key identifies the class
    // diagram a declaration lives in, components have none.
    let mut decls: Vec<(&str, Loc, Option<&str>, &str)> = Vec::new();
    for c in &model.components {
        decls.push((&c.file, c.component.name_loc, None, &c.component.name));
    }
    for d in &model.diagrams {
        for decl in &d.diagram.declarations {
            decls.push((&d.file, decl.name_loc(), Some(&d.file), decl.name()));
        }
    }
    decls.sort_by(|a, b| (a.0, a.1.line, a.1.col).cmp(&(b.0, b.1.line, b.1.col)));

    let mut pool: HashMap<&str, (&str, Option<&str>)> = HashMap::new();
    for (file, loc, container, name) in decls {
        if BUILTIN_TYPES.contains(&name) {
            diags.push(Diagnostic::error(
                "CC1",
                file,
                loc,
                format!("type name '{}' collides with a built-in type", name),
            ));
            continue;
        }
        match pool.get(name) {
            Some((first_file, first_container)) => {
                if container.is_some() && container == *first_container {
                    diags.push(Diagnostic::error(
                        "CC12",
                        file,
                        loc,
                        format!(
                            "type name '{}' already declared in this class diagram",
                            name
                        ),
                    ));
                } else {
                    diags.push(Diagnostic::error(
                        "CC1",
                        file,
                        loc,
                        format!("type name '{}' already declared in {}", name, first_file),
                    ));
                }
            }
            None => {
                pool.insert(name, (file, container));
            }
        }
    }
}

fn check_component(
    ct: &ComponentType,
    file: &str,
    model: &ArchitectureModel,
    diags: &mut Vec<Diagnostic>,
) {
    // CC2: one namespace for port and instance names. Ports pool first.
    let mut names: HashSet<&str> = HashSet::new();
    for port in &ct.ports {
        if !names.insert(&port.name) {
            diags.push(Diagnostic::error(
                "CC2",
                file,
                port.name_loc,
                format!(
                    "port name '{}' already declared in component '{}'",
                    port.name, ct.name
                ),
            ));
        }
    }
    for sub in &ct.subcomponents {
        if !names.insert(&sub.instance_name) {
            diags.push(Diagnostic::error(
                "CC2",
                file,
                sub.instance_loc,
                format!(
                    "instance name '{}' already declared in component '{}'",
                    sub.instance_name, ct.name
                ),
            ));
        }
    }

    // Referenced types must resolve before structural checks mean anything.
    for port in &ct.ports {
        if model.data_type(&port.type_name).is_none() {
            diags.push(Diagnostic::error(
                "REF",
                file,
                port.type_loc,
                format!("unknown data type '{}'", port.type_name),
            ));
        }
    }
    let mut flagged_sub_types: HashSet<&str> = HashSet::new();
    for sub in &ct.subcomponents {
        if model.component(&sub.type_name).is_none() && flagged_sub_types.insert(&sub.type_name) {
            diags.push(Diagnostic::error(
                "REF",
                file,
                sub.type_loc,
                format!("unknown component type '{}'", sub.type_name),
            ));
        }
    }

    if classify(ct) == Classification::Composed {
        if let Some(auto) = &ct.automaton {
            diags.push(Diagnostic::error(
                "CC7",
                file,
                auto.keyword_loc,
                format!(
                    "composed component '{}' must not declare an automaton",
                    ct.name
                ),
            ));
        }
        check_connectors(ct, file, model, diags);
    }

    if let Some(auto) = &ct.automaton {
        check_automaton(ct, auto, file, model, diags);
    }
}

/// Endpoint of a resolved connector reference, keyed for driver counting.
#[derive(PartialEq, Eq, Hash, Clone)]
struct EndpointKey {
    instance: Option<String>,
    port: String,
}

struct ResolvedRef<'a> {
    key: EndpointKey,
    port: &'a Port,
    rendered: String,
}

/// Resolves one connector endpoint; pushes CC3 and returns None when it
/// does not name a legal port. Unresolvable subcomponent types stay silent
/// here, the REF diagnostic already covers them.
fn resolve_endpoint<'m>(
    ct: &'m ComponentType,
    model: &'m ArchitectureModel,
    file: &str,
    r: &PortRef,
    is_source: bool,
    diags: &mut Vec<Diagnostic>,
) -> Option<ResolvedRef<'m>> {
    match &r.instance {
        None => {
            let Some(port) = ct.port(&r.port) else {
                diags.push(Diagnostic::error(
                    "CC3",
                    file,
                    r.loc,
                    format!("component '{}' has no port '{}'", ct.name, r.port),
                ));
                return None;
            };
            let ok = matches!(
                (is_source, port.direction),
                (true, PortDirection::In) | (false, PortDirection::Out)
            );
            if !ok {
                let (have, need) = if is_source {
                    ("out", "sources forward own in-ports")
                } else {
                    ("in", "targets fill own out-ports")
                };
                diags.push(Diagnostic::error(
                    "CC3",
                    file,
                    r.loc,
                    format!(
                        "own {}-port '{}' is illegal here: connector {}",
                        have, r.port, need
                    ),
                ));
                return None;
            }
            Some(ResolvedRef {
                key: EndpointKey {
                    instance: None,
                    port: r.port.clone(),
                },
                port,
                rendered: r.render(),
            })
        }
        Some(inst) => {
            let Some(sub) = ct.subcomponent(inst) else {
                diags.push(Diagnostic::error(
                    "CC3",
                    file,
                    r.loc,
                    format!("component '{}' has no subcomponent '{}'", ct.name, inst),
                ));
                return None;
            };
            let sub_ct = model.component(&sub.type_name)?;
            let Some(port) = sub_ct.port(&r.port) else {
                diags.push(Diagnostic::error(
                    "CC3",
                    file,
                    r.loc,
                    format!(
                        "port '{}' not found on subcomponent '{}' of type '{}'",
                        r.port, inst, sub.type_name
                    ),
                ));
                return None;
            };
            let ok = matches!(
                (is_source, port.direction),
                (true, PortDirection::Out) | (false, PortDirection::In)
            );
            if !ok {
                let role = if is_source { "source" } else { "target" };
                let dir = match port.direction {
                    PortDirection::In => "in",
                    PortDirection::Out => "out",
                };
                diags.push(Diagnostic::error(
                    "CC3",
                    file,
                    r.loc,
                    format!(
                        "{}-port '{}' of subcomponent '{}' cannot be a connector {}",
                        dir, r.port, inst, role
                    ),
                ));
                return None;
            }
            Some(ResolvedRef {
                key: EndpointKey {
                    instance: Some(inst.clone()),
                    port: r.port.clone(),
                },
                port,
                rendered: r.render(),
            })
        }
    }
}

/// CC3, CC4 and CC5 over the connectors of one composed component.
fn check_connectors(
    ct: &ComponentType,
    file: &str,
    model: &ArchitectureModel,
    diags: &mut Vec<Diagnostic>,
) {
    // Driver bookkeeping: target endpoints with their reference locations,
    // and source endpoints that were used at all.
    let mut drivers: HashMap<EndpointKey, Vec<(Loc, String)>> = HashMap::new();
    let mut used_sources: HashSet<EndpointKey> = HashSet::new();

    for conn in &ct.connectors {
        let source = resolve_endpoint(ct, model, file, &conn.source, true, diags);
        if let Some(s) = &source {
            used_sources.insert(s.key.clone());
        }
        for target in &conn.targets {
            let Some(t) = resolve_endpoint(ct, model, file, target, false, diags) else {
                continue;
            };
            if let Some(s) = &source {
                if s.port.type_name != t.port.type_name {
                    diags.push(Diagnostic::error(
                        "CC4",
                        file,
                        conn.source.loc,
                        format!(
                            "connector type mismatch: '{}' has type {} but '{}' has type {}",
                            s.rendered, s.port.type_name, t.rendered, t.port.type_name
                        ),
                    ));
                }
            }
            drivers
                .entry(t.key)
                .or_default()
                .push((target.loc, t.rendered));
        }
    }

    // More than one driver: flagged at the second driving reference.
    for refs in drivers.values() {
        if refs.len() > 1 {
            let (loc, rendered) = &refs[1];
            let noun = if rendered.contains('.') {
                "in-port"
            } else {
                "out-port"
            };
            diags.push(Diagnostic::error(
                "CC5",
                file,
                *loc,
                format!(
                    "{} '{}' has {} drivers; exactly one required",
                    noun,
                    rendered,
                    refs.len()
                ),
            ));
        }
    }

    // Missing drivers, and subcomponent out-ports that feed nothing.
    for sub in &ct.subcomponents {
        let Some(sub_ct) = model.component(&sub.type_name) else {
            continue;
        };
        for port in &sub_ct.ports {
            let key = EndpointKey {
                instance: Some(sub.instance_name.clone()),
                port: port.name.clone(),
            };
            match port.direction {
                PortDirection::In => {
                    if !drivers.contains_key(&key) {
                        diags.push(Diagnostic::error(
                            "CC5",
                            file,
                            sub.instance_loc,
                            format!(
                                "in-port '{}' of subcomponent '{}' has no driver",
                                port.name, sub.instance_name
                            ),
                        ));
                    }
                }
                PortDirection::Out => {
                    if !used_sources.contains(&key) {
                        diags.push(Diagnostic::warning(
                            "CC5",
                            file,
                            sub.instance_loc,
                            format!(
                                "out-port '{}' of subcomponent '{}' is never connected",
                                port.name, sub.instance_name
                            ),
                        ));
                    }
                }
            }
        }
    }
    for port in &ct.ports {
        if port.direction == PortDirection::Out {
            let key = EndpointKey {
                instance: None,
                port: port.name.clone(),
            };
            if !drivers.contains_key(&key) {
                diags.push(Diagnostic::error(
                    "CC5",
                    file,
                    port.name_loc,
                    format!("out-port '{}' has no driver", port.name),
                ));
            }
        }
    }
}

/// CC6 over one automaton.
fn check_automaton(
    ct: &ComponentType,
    auto: &Automaton,
    file: &str,
    model: &ArchitectureModel,
    diags: &mut Vec<Diagnostic>,
) {
    let mut states: HashSet<&str> = HashSet::new();
    for s in &auto.states {
        if !states.insert(&s.name) {
            diags.push(Diagnostic::error(
                "CC6",
                file,
                s.loc,
                format!("state '{}' already declared", s.name),
            ));
        }
    }
    if !states.contains(auto.initial_state.as_str()) {
        diags.push(Diagnostic::error(
            "CC6",
            file,
            auto.initial_loc,
            format!("initial state '{}' is not declared", auto.initial_state),
        ));
    }
    check_actions(ct, &auto.initial_actions, file, model, diags);
    for t in &auto.transitions {
        if !states.contains(t.source.as_str()) {
            diags.push(Diagnostic::error(
                "CC6",
                file,
                t.source_loc,
                format!("transition source state '{}' is not declared", t.source),
            ));
        }
        if !states.contains(t.target.as_str()) {
            diags.push(Diagnostic::error(
                "CC6",
                file,
                t.target_loc,
                format!("transition target state '{}' is not declared", t.target),
            ));
        }
        for atom in &t.guard {
            check_guard_atom(ct, atom, file, model, diags);
        }
        check_actions(ct, &t.actions, file, model, diags);
    }
}

fn check_guard_atom(
    ct: &ComponentType,
    atom: &GuardAtom,
    file: &str,
    model: &ArchitectureModel,
    diags: &mut Vec<Diagnostic>,
) {
    let Some(port) = ct.port(&atom.port) else {
        diags.push(Diagnostic::error(
            "CC6",
            file,
            atom.port_loc,
            format!("guard references unknown port '{}'", atom.port),
        ));
        return;
    };
    if port.direction != PortDirection::In {
        diags.push(Diagnostic::error(
            "CC6",
            file,
            atom.port_loc,
            format!(
                "guard references out-port '{}'; guards read in-ports",
                atom.port
            ),
        ));
        return;
    }
    let Some(kind) = model.data_type(&port.type_name) else {
        return;
    };
    if atom.op.is_ordering()
        && !matches!(
            kind,
            DataTypeKind::Builtin("Integer") | DataTypeKind::Builtin("Double")
        )
    {
        diags.push(Diagnostic::error(
            "CC6",
            file,
            atom.port_loc,
            format!(
                "ordering comparison requires Integer or Double, port '{}' has type {}",
                atom.port, port.type_name
            ),
        ));
        return;
    }
    check_literal_against_port(
        port,
        kind,
        &atom.literal,
        atom.port_loc,
        "guard",
        file,
        diags,
    );
}

fn check_actions(
    ct: &ComponentType,
    actions: &[Action],
    file: &str,
    model: &ArchitectureModel,
    diags: &mut Vec<Diagnostic>,
) {
    let mut assigned: HashSet<&str> = HashSet::new();
    for action in actions {
        if !assigned.insert(&action.port) {
            diags.push(Diagnostic::error(
                "CC6",
                file,
                action.port_loc,
                format!("port '{}' assigned twice in one action set", action.port),
            ));
            continue;
        }
        let Some(port) = ct.port(&action.port) else {
            diags.push(Diagnostic::error(
                "CC6",
                file,
                action.port_loc,
                format!("action targets unknown port '{}'", action.port),
            ));
            continue;
        };
        if port.direction != PortDirection::Out {
            diags.push(Diagnostic::error(
                "CC6",
                file,
                action.port_loc,
                format!(
                    "action targets in-port '{}'; actions write out-ports",
                    action.port
                ),
            ));
            continue;
        }
        if let Some(kind) = model.data_type(&port.type_name) {
            check_literal_against_port(
                port,
                kind,
                &action.value,
                action.port_loc,
                "action",
                file,
                diags,
            );
        }
    }
}

fn check_literal_against_port(
    port: &Port,
    kind: DataTypeKind<'_>,
    literal: &Literal,
    loc: Loc,
    role: &str,
    file: &str,
    diags: &mut Vec<Diagnostic>,
) {
    let mismatch = |diags: &mut Vec<Diagnostic>| {
        diags.push(Diagnostic::error(
            "CC6",
            file,
            loc,
            format!(
                "{} literal does not match type '{}' of port '{}'",
                role, port.type_name, port.name
            ),
        ));
    };
    match kind {
        DataTypeKind::Builtin("Integer") => {
            if !matches!(literal, Literal::Int(_)) {
                mismatch(diags);
            }
        }
        DataTypeKind::Builtin("Double") => {
            if !matches!(literal, Literal::Float(_)) {
                mismatch(diags);
            }
        }
        DataTypeKind::Builtin("Boolean") => {
            if !matches!(literal, Literal::Bool(_)) {
                mismatch(diags);
            }
        }
        DataTypeKind::Builtin(_) => {
            if !matches!(literal, Literal::Str(_)) {
                mismatch(diags);
            }
        }
        DataTypeKind::Enum(decl) => match literal {
            Literal::Enum { enum_name, literal } => {
                if let Some(e) = enum_name {
                    if e != &decl.name {
                        mismatch(diags);
                        return;
                    }
                }
                if !decl.has_literal(literal) {
                    diags.push(Diagnostic::error(
                        "CC6",
                        file,
                        loc,
                        format!("enum '{}' has no literal '{}'", decl.name, literal),
                    ));
                }
            }
            _ => mismatch(diags),
        },
        DataTypeKind::Record(_) => {
            diags.push(Diagnostic::error(
                "CC6",
                file,
                loc,
                format!(
                    "record-typed port '{}' cannot be used in a {}: record values are not constructible",
                    port.name, role
                ),
            ));
        }
    }
}

// ---------------------------------------------------------------------------
// Binding checks
// ---------------------------------------------------------------------------

pub fn check_binding(
    tree: &InstanceTree,
    config: &ApplicationConfiguration,
    config_file: &str,
    libraries: &[CodeLibraryManifest],
    generators: &[GeneratorDescriptor],
) -> CheckReport {
    check_binding_impl(tree, config, config_file, libraries, Some(generators))
}

/// Binding checks with the generator conditions switched off; the simulator
/// resolves bindings but never consults the generators clause.
pub fn check_binding_for_simulation(
    tree: &InstanceTree,
    config: &ApplicationConfiguration,
    config_file: &str,
    libraries: &[CodeLibraryManifest],
) -> CheckReport {
    check_binding_impl(tree, config, config_file, libraries, None)
}

fn check_binding_impl(
    tree: &InstanceTree,
    config: &ApplicationConfiguration,
    config_file: &str,
    libraries: &[CodeLibraryManifest],
    generators: Option<&[GeneratorDescriptor]>,
) -> CheckReport {
    let mut diags = Vec::new();

    let mut imported: Vec<&CodeLibraryManifest> = Vec::new();
    for import in &config.imports {
        match libraries.iter().find(|m| m.name == import.name) {
            Some(m) => imported.push(m),
            None => diags.push(Diagnostic::error(
                "IMPORT",
                config_file,
                import.loc,
                format!("library '{}' is not on the library path", import.name),
            )),
        }
    }

    // Simple instance names live in the binding scope next to library
    // names, so a collision would make dotted paths ambiguous.
    let instance_simple_names: HashSet<&str> = tree
        .nodes()
        .iter()
        .map(|n| {
            n.qualified_name
                .rsplit('.')
                .next()
                .unwrap_or(&n.qualified_name)
        })
        .collect();
    for import in &config.imports {
        if instance_simple_names.contains(import.name.as_str()) {
            diags.push(Diagnostic::error(
                "SCOPE",
                config_file,
                import.loc,
                format!(
                    "library name '{}' collides with an instance name in the architecture",
                    import.name
                ),
            ));
        }
    }

    let mut bound_rtes: Vec<&str> = Vec::new();
    for entry in &config.bindings {
        let Some(node) = tree.find(&entry.instance) else {
            diags.push(Diagnostic::error(
                "CC11",
                config_file,
                entry.instance_loc,
                format!(
                    "binding target '{}' does not exist in the instance tree",
                    entry.instance
                ),
            ));
            continue;
        };
        if node.classification != Classification::Abstract {
            diags.push(Diagnostic::error(
                "CC11",
                config_file,
                entry.instance_loc,
                format!(
                    "binding target '{}' is not abstract ({})",
                    entry.instance,
                    node.classification.label()
                ),
            ));
            continue;
        }
        let matches: Vec<&CodeLibraryManifest> = imported
            .iter()
            .copied()
            .filter(|m| m.implementation(&entry.implementation).is_some())
            .collect();
        match matches.as_slice() {
            [] => diags.push(Diagnostic::error(
                "CC9",
                config_file,
                entry.implementation_loc,
                format!(
                    "implementation '{}' not found in imported libraries",
                    entry.implementation
                ),
            )),
            [lib] => {
                let imp = lib.implementation(&entry.implementation).unwrap();
                if imp.implements != node.component_type {
                    diags.push(Diagnostic::error(
                        "CC9",
                        config_file,
                        entry.implementation_loc,
                        format!(
                            "implementation '{}' implements '{}', not '{}'",
                            entry.implementation, imp.implements, node.component_type
                        ),
                    ));
                } else {
                    bound_rtes.push(&lib.rte);
                }
            }
            many => {
                let names: Vec<&str> = many.iter().map(|m| m.name.as_str()).collect();
                diags.push(Diagnostic::error(
                    "CC9",
                    config_file,
                    entry.implementation_loc,
                    format!(
                        "implementation '{}' is ambiguous: found in libraries {}",
                        entry.implementation,
                        names.join(", ")
                    ),
                ));
            }
        }
    }

    // CC8: every abstract atom needs a binding entry, resolved or not.
    let bound_instances: HashSet<&str> = config
        .bindings
        .iter()
        .map(|b| b.instance.as_str())
        .collect();
    for node in tree.atoms() {
        if node.classification == Classification::Abstract
            && !bound_instances.contains(node.qualified_name.as_str())
        {
            diags.push(Diagnostic::error(
                "CC8",
                config_file,
                config.bindings_keyword_loc,
                format!("abstract instance '{}' is not bound", node.qualified_name),
            ));
        }
    }

    if let Some(registry) = generators {
        check_generators(config, config_file, registry, &bound_rtes, &mut diags);
    }

    let mut report = CheckReport { diagnostics: diags };
    report.sort();
    report
}

/// CC10: generators resolve against the registry and agree with the bound
/// libraries on one RTE. An RTE disagreement yields a single diagnostic at
/// the first generator reference.
fn check_generators(
    config: &ApplicationConfiguration,
    config_file: &str,
    registry: &[GeneratorDescriptor],
    bound_rtes: &[&str],
    diags: &mut Vec<Diagnostic>,
) {
    let mut gen_rtes: Vec<&str> = Vec::new();
    for gen in &config.generators {
        match codegen::lookup(registry, &gen.name) {
            Some(desc) => {
                if !gen_rtes.contains(&desc.rte) {
                    gen_rtes.push(desc.rte);
                }
            }
            None => diags.push(Diagnostic::error(
                "CC10",
                config_file,
                gen.loc,
                format!("unknown generator '{}'", gen.name),
            )),
        }
    }
    let first_loc = config
        .generators
        .first()
        .map(|g| g.loc)
        .unwrap_or(config.generators_keyword_loc);
    if gen_rtes.len() > 1 {
        let quoted: Vec<String> = gen_rtes.iter().map(|r| format!("'{}'", r)).collect();
        diags.push(Diagnostic::error(
            "CC10",
            config_file,
            first_loc,
            format!(
                "selected generators target multiple RTEs: {}",
                quoted.join(", ")
            ),
        ));
        return;
    }
    let mut lib_rtes: Vec<&str> = Vec::new();
    for rte in bound_rtes {
        if !lib_rtes.contains(rte) {
            lib_rtes.push(rte);
        }
    }
    if lib_rtes.len() > 1 {
        let quoted: Vec<String> = lib_rtes.iter().map(|r| format!("'{}'", r)).collect();
        diags.push(Diagnostic::error(
            "CC10",
            config_file,
            config.bindings_keyword_loc,
            format!(
                "bound libraries provide multiple RTEs: {}",
                quoted.join(", ")
            ),
        ));
        return;
    }
    if let (Some(gen_rte), Some(lib_rte)) = (gen_rtes.first(), lib_rtes.first()) {
        if gen_rte != lib_rte {
            diags.push(Diagnostic::error(
                "CC10",
                config_file,
                first_loc,
                format!(
                    "generators target RTE '{}' but bound libraries provide RTE '{}'",
                    gen_rte, lib_rte
                ),
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::workspace::load_workspace;
    use std::path::PathBuf;

    fn check_dir(dir: &str) -> CheckReport {
        let ws = load_workspace(&[PathBuf::from(dir)]).unwrap();
        assert!(ws.diagnostics.is_empty(), "unexpected parse diagnostics");
        check_architecture(&ws.model)
    }

    #[test]
    fn the_closed_loop_workspace_is_clean() {
        let report = check_dir("tests/fixtures/bumperbot");
        assert!(report.diagnostics.is_empty(), "{}", report.render());
    }

    #[test]
    fn the_wrapped_workspace_is_clean() {
        let report = check_dir("tests/fixtures/bumperbot-wrapped");
        assert!(report.diagnostics.is_empty(), "{}", report.render());
    }

    #[test]
    fn undriven_subcomponent_out_port_warns_but_passes() {
        let report = check_dir("tests/fixtures/warn/models");
        assert!(report.ok());
        assert_eq!(report.diagnostics.len(), 1);
        assert_eq!(
            report.diagnostics[0].render(),
            "warning CC5 tests/fixtures/warn/models/Root.arc:2:19 out-port 'extra' of subcomponent 'a' is never connected"
        );
    }

    #[test]
    fn adding_declarations_never_removes_diagnostics() {
        // The duplicate port stays flagged when an unrelated component is
        // added to the workspace.
        let base = "component Dup { port in Integer x, out Boolean x; }";
        let mut model = ArchitectureModel::default();
        model.components.push(SourcedComponent {
            file: "Dup.arc".to_owned(),
            component: crate::parse::grammar::parse_architecture(&crate::parse::SourceUnit {
                path: "Dup.arc".to_owned(),
                kind: crate::parse::SourceKind::Architecture,
                text: base.to_owned(),
            })
            .unwrap(),
        });
        let before = check_architecture(&model);
        model.components.push(SourcedComponent {
            file: "Other.arc".to_owned(),
            component: crate::parse::grammar::parse_architecture(&crate::parse::SourceUnit {
                path: "Other.arc".to_owned(),
                kind: crate::parse::SourceKind::Architecture,
                text: "component Other { }".to_owned(),
            })
            .unwrap(),
        });
        let after = check_architecture(&model);
        for d in &before.diagnostics {
            assert!(after.diagnostics.contains(d));
        }
    }
}
