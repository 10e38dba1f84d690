//! Core model types: component types, class diagrams, application
//! configurations, code library manifests, and the instance tree derived
//! from them.
//!
//! A component type is *composed* when it declares subcomponents or
//! connectors, *fully modeled* when it is atomic and carries an automaton,
//! and *abstract* when it is atomic without behavior. Classification is a
//! pure function of the declaration; it never depends on bindings.
//!
//! Instantiation expands the subcomponent relation into a tree of named
//! instances with dot-separated qualified names. The relation must be
//! acyclic; a type reachable from itself is rejected. Flattening then
//! shorts the boundary ports of composed instances out of connector chains,
//! leaving only wires between ports of atomic instances.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::diag::Loc;

pub const BUILTIN_TYPES: [&str; 4] = ["Integer", "Boolean", "String", "Double"];

// ---------------------------------------------------------------------------
// Architecture declarations
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct Import {
    pub name: String,
    pub loc: Loc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortDirection {
    In,
    Out,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Port {
    pub direction: PortDirection,
    pub type_name: String,
    pub type_loc: Loc,
    pub name: String,
    pub name_loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subcomponent {
    pub type_name: String,
    pub type_loc: Loc,
    pub instance_name: String,
    pub instance_loc: Loc,
}

/// One endpoint of a connector: `port` on the declaring component itself or
/// `instance.port` on a direct subcomponent.
#[derive(Debug, Clone, PartialEq)]
pub struct PortRef {
    pub instance: Option<String>,
    pub port: String,
    pub loc: Loc,
}

impl PortRef {
    pub fn render(&self) -> String {
        match &self.instance {
            Some(inst) => format!("{}.{}", inst, self.port),
            None => self.port.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Connector {
    pub source: PortRef,
    pub targets: Vec<PortRef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl CompareOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            CompareOp::Eq => "==",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Gt => ">",
            CompareOp::Le => "<=",
            CompareOp::Ge => ">=",
        }
    }

    pub fn is_ordering(&self) -> bool {
        matches!(
            self,
            CompareOp::Lt | CompareOp::Gt | CompareOp::Le | CompareOp::Ge
        )
    }
}

/// Literal value as written in a model. Enum literals keep their optional
/// qualifier so the pretty-printer can reproduce the source form.
#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
    Enum {
        enum_name: Option<String>,
        literal: String,
    },
}

impl Literal {
    pub fn render(&self) -> String {
        match self {
            Literal::Int(v) => v.to_string(),
            Literal::Float(v) => format!("{:?}", v),
            Literal::Bool(v) => v.to_string(),
            Literal::Str(v) => {
                let mut out = String::from("\"");
                for c in v.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        _ => out.push(c),
                    }
                }
                out.push('"');
                out
            }
            Literal::Enum { enum_name, literal } => match enum_name {
                Some(e) => format!("{}.{}", e, literal),
                None => literal.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuardAtom {
    pub port: String,
    pub port_loc: Loc,
    pub op: CompareOp,
    pub literal: Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub port: String,
    pub port_loc: Loc,
    pub value: Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateDecl {
    pub name: String,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub source: String,
    pub source_loc: Loc,
    pub target: String,
    pub target_loc: Loc,
    pub guard: Vec<GuardAtom>,
    pub actions: Vec<Action>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Automaton {
    pub keyword_loc: Loc,
    pub states: Vec<StateDecl>,
    pub initial_state: String,
    pub initial_loc: Loc,
    pub initial_actions: Vec<Action>,
    pub transitions: Vec<Transition>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentType {
    pub name: String,
    pub name_loc: Loc,
    pub imports: Vec<Import>,
    pub ports: Vec<Port>,
    pub subcomponents: Vec<Subcomponent>,
    pub connectors: Vec<Connector>,
    pub automaton: Option<Automaton>,
}

impl ComponentType {
    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn subcomponent(&self, instance_name: &str) -> Option<&Subcomponent> {
        self.subcomponents
            .iter()
            .find(|s| s.instance_name == instance_name)
    }
}

// ---------------------------------------------------------------------------
// Class diagrams
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct EnumLiteral {
    pub name: String,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumDecl {
    pub name: String,
    pub name_loc: Loc,
    pub literals: Vec<EnumLiteral>,
}

impl EnumDecl {
    pub fn has_literal(&self, name: &str) -> bool {
        self.literals.iter().any(|l| l.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordField {
    pub type_name: String,
    pub type_loc: Loc,
    pub name: String,
    pub name_loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordDecl {
    pub name: String,
    pub name_loc: Loc,
    pub fields: Vec<RecordField>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CdDeclaration {
    Enum(EnumDecl),
    Record(RecordDecl),
}

impl CdDeclaration {
    pub fn name(&self) -> &str {
        match self {
            CdDeclaration::Enum(e) => &e.name,
            CdDeclaration::Record(r) => &r.name,
        }
    }

    pub fn name_loc(&self) -> Loc {
        match self {
            CdDeclaration::Enum(e) => e.name_loc,
            CdDeclaration::Record(r) => r.name_loc,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDiagram {
    pub name: String,
    pub name_loc: Loc,
    pub declarations: Vec<CdDeclaration>,
}

// ---------------------------------------------------------------------------
// Application configurations
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorRef {
    pub name: String,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BindingEntry {
    pub instance: String,
    pub instance_loc: Loc,
    pub implementation: String,
    pub implementation_loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApplicationConfiguration {
    pub name: String,
    pub name_loc: Loc,
    pub imports: Vec<Import>,
    pub generators_keyword_loc: Loc,
    pub generators: Vec<GeneratorRef>,
    pub bindings_keyword_loc: Loc,
    pub bindings: Vec<BindingEntry>,
}

// ---------------------------------------------------------------------------
// Code library manifests
// ---------------------------------------------------------------------------

/// Simulation stub kinds. Only implementations hosted by the `sim` RTE carry
/// executable semantics; kinds on other RTEs are inert metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StubKind {
    Script,
    Record,
    Table,
    Timer(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImplementationEntry {
    pub name: String,
    pub name_loc: Loc,
    pub implements: String,
    pub implements_loc: Loc,
    pub kind: Option<StubKind>,
    pub kind_loc: Option<Loc>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeLibraryManifest {
    pub name: String,
    pub name_loc: Loc,
    pub rte: String,
    pub rte_loc: Loc,
    pub implementations: Vec<ImplementationEntry>,
    /// Directory the manifest was loaded from; side files such as table
    /// payloads are resolved against it. `None` for in-memory manifests.
    pub source_dir: Option<std::path::PathBuf>,
}

impl CodeLibraryManifest {
    pub fn implementation(&self, name: &str) -> Option<&ImplementationEntry> {
        self.implementations.iter().find(|i| i.name == name)
    }
}

// ---------------------------------------------------------------------------
// Workspace-level model
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SourcedComponent {
    pub file: String,
    pub component: ComponentType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourcedDiagram {
    pub file: String,
    pub diagram: ClassDiagram,
}

/// All architecture and data type declarations of one workspace, in load
/// order (lexicographic file path). Type names share a single namespace.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ArchitectureModel {
    pub components: Vec<SourcedComponent>,
    pub diagrams: Vec<SourcedDiagram>,
}

/// Resolution of a type name against a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataTypeKind<'a> {
    Builtin(&'a str),
    Enum(&'a EnumDecl),
    Record(&'a RecordDecl),
}

impl ArchitectureModel {
    pub fn component(&self, name: &str) -> Option<&ComponentType> {
        self.components
            .iter()
            .map(|s| &s.component)
            .find(|c| c.name == name)
    }

    /// Resolves a data type name usable on ports and record fields.
    /// Component types are not data types.
    pub fn data_type(&self, name: &str) -> Option<DataTypeKind<'_>> {
        if let Some(b) = BUILTIN_TYPES.iter().find(|b| **b == name) {
            return Some(DataTypeKind::Builtin(b));
        }
        for sourced in &self.diagrams {
            for decl in &sourced.diagram.declarations {
                match decl {
                    CdDeclaration::Enum(e) if e.name == name => return Some(DataTypeKind::Enum(e)),
                    CdDeclaration::Record(r) if r.name == name => {
                        return Some(DataTypeKind::Record(r))
                    }
                    _ => {}
                }
            }
        }
        None
    }

    pub fn enum_decl(&self, name: &str) -> Option<&EnumDecl> {
        match self.data_type(name) {
            Some(DataTypeKind::Enum(e)) => Some(e),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Composed,
    FullyModeled,
    Abstract,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::Composed => "composed",
            Classification::FullyModeled => "fullyModeled",
            Classification::Abstract => "abstract",
        }
    }
}

/// A component type is composed as soon as it declares structure, whether
/// subcomponents or only connectors between its own ports.
pub fn classify(component: &ComponentType) -> Classification {
    if !component.subcomponents.is_empty() || !component.connectors.is_empty() {
        Classification::Composed
    } else if component.automaton.is_some() {
        Classification::FullyModeled
    } else {
        Classification::Abstract
    }
}

// ---------------------------------------------------------------------------
// Instance tree
// ---------------------------------------------------------------------------

/// Library-qualified implementation assigned to an abstract instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplementationRef {
    pub library: String,
    pub implementation: String,
    pub rte: String,
    pub kind: Option<StubKind>,
}

impl ImplementationRef {
    pub fn qualified_name(&self) -> String {
        format!("{}.{}", self.library, self.implementation)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceNode {
    /// Dot-separated path from the root, starting with the root type name.
    pub qualified_name: String,
    pub component_type: String,
    pub classification: Classification,
    pub children: Vec<InstanceNode>,
    pub resolved_binding: Option<ImplementationRef>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceTree {
    pub root: InstanceNode,
}

impl InstanceTree {
    pub fn find(&self, qualified_name: &str) -> Option<&InstanceNode> {
        fn walk<'a>(node: &'a InstanceNode, qname: &str) -> Option<&'a InstanceNode> {
            if node.qualified_name == qname {
                return Some(node);
            }
            node.children.iter().find_map(|c| walk(c, qname))
        }
        walk(&self.root, qualified_name)
    }

    pub fn find_mut(&mut self, qualified_name: &str) -> Option<&mut InstanceNode> {
        fn walk<'a>(node: &'a mut InstanceNode, qname: &str) -> Option<&'a mut InstanceNode> {
            if node.qualified_name == qname {
                return Some(node);
            }
            node.children.iter_mut().find_map(|c| walk(c, qname))
        }
        walk(&mut self.root, qualified_name)
    }

    /// All nodes in depth-first declaration order, root first.
    pub fn nodes(&self) -> Vec<&InstanceNode> {
        let mut out = Vec::new();
        fn walk<'a>(node: &'a InstanceNode, out: &mut Vec<&'a InstanceNode>) {
            out.push(node);
            for c in &node.children {
                walk(c, out);
            }
        }
        walk(&self.root, &mut out);
        out
    }

    /// Atomic instances (fully modeled or abstract) in depth-first order.
    pub fn atoms(&self) -> Vec<&InstanceNode> {
        self.nodes()
            .into_iter()
            .filter(|n| n.classification != Classification::Composed)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstantiateError {
    #[error("root component type '{0}' is not declared")]
    UnknownRootType(String),
    #[error("component type '{type_name}' referenced by '{referenced_from}' is not declared")]
    UnknownComponentType {
        type_name: String,
        referenced_from: String,
    },
    #[error("recursive composition: type '{type_name}' is reachable from itself via {cycle}")]
    RecursiveComposition { type_name: String, cycle: String },
}

/// Expands the subcomponent relation of `root_type` into an instance tree.
pub fn instantiate(
    model: &ArchitectureModel,
    root_type: &str,
) -> Result<InstanceTree, InstantiateError> {
    let root_ct = model
        .component(root_type)
        .ok_or_else(|| InstantiateError::UnknownRootType(root_type.to_owned()))?;

    fn build(
        model: &ArchitectureModel,
        ct: &ComponentType,
        qualified_name: String,
        path: &mut Vec<String>,
    ) -> Result<InstanceNode, InstantiateError> {
        if path.iter().any(|t| t == &ct.name) {
            let mut cycle = path.join(" -> ");
            cycle.push_str(" -> ");
            cycle.push_str(&ct.name);
            return Err(InstantiateError::RecursiveComposition {
                type_name: ct.name.clone(),
                cycle,
            });
        }
        path.push(ct.name.clone());
        let mut children = Vec::new();
        for sub in &ct.subcomponents {
            let child_ct = model.component(&sub.type_name).ok_or_else(|| {
                InstantiateError::UnknownComponentType {
                    type_name: sub.type_name.clone(),
                    referenced_from: ct.name.clone(),
                }
            })?;
            let child_qname = format!("{}.{}", qualified_name, sub.instance_name);
            children.push(build(model, child_ct, child_qname, path)?);
        }
        path.pop();
        Ok(InstanceNode {
            qualified_name,
            component_type: ct.name.clone(),
            classification: classify(ct),
            children,
            resolved_binding: None,
        })
    }

    let mut path = Vec::new();
    let root = build(model, root_ct, root_type.to_owned(), &mut path)?;
    Ok(InstanceTree { root })
}

// ---------------------------------------------------------------------------
// Flattening
// ---------------------------------------------------------------------------

/// Directed wire between ports of two atomic instances.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Wire {
    pub from_instance: String,
    pub from_port: String,
    pub to_instance: String,
    pub to_port: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatAtom {
    pub qualified_name: String,
    pub type_name: String,
}

/// Connector structure with every composed boundary shorted out: only
/// atomic instances and direct wires between their ports remain.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatArchitecture {
    pub atoms: Vec<FlatAtom>,
    pub wires: Vec<Wire>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlattenError {
    #[error("boundary port '{0}' belongs to a connector chain with no atomic endpoint")]
    DanglingBoundary(String),
}

/// Shorts boundary ports of composed instances out of the connector graph.
///
/// Connector chains that start and end at the root's own boundary ports are
/// dropped; a chain that touches no atomic port at all is an error because
/// messages on it could neither be produced nor observed.
pub fn flatten(
    tree: &InstanceTree,
    model: &ArchitectureModel,
) -> Result<FlatArchitecture, FlattenError> {
    // Endpoint = (instance qualified name, port name). Atomicity of the
    // owning instance decides whether an endpoint survives flattening.
    type Endpoint = (String, String);

    let mut atomic_instances: HashSet<String> = HashSet::new();
    let mut atoms = Vec::new();
    for node in tree.nodes() {
        if node.classification != Classification::Composed {
            atomic_instances.insert(node.qualified_name.clone());
            atoms.push(FlatAtom {
                qualified_name: node.qualified_name.clone(),
                type_name: node.component_type.clone(),
            });
        }
    }

    // Directed edges of every connector, instantiated per composed node.
    let mut edges: Vec<(Endpoint, Endpoint)> = Vec::new();
    fn collect_edges(
        node: &InstanceNode,
        model: &ArchitectureModel,
        edges: &mut Vec<(Endpoint, Endpoint)>,
    ) {
        if let Some(ct) = model.component(&node.component_type) {
            for conn in &ct.connectors {
                let resolve = |r: &PortRef| -> Endpoint {
                    match &r.instance {
                        Some(inst) => (format!("{}.{}", node.qualified_name, inst), r.port.clone()),
                        None => (node.qualified_name.clone(), r.port.clone()),
                    }
                };
                let src = resolve(&conn.source);
                for t in &conn.targets {
                    edges.push((src.clone(), resolve(t)));
                }
            }
        }
        for c in &node.children {
            collect_edges(c, model, edges);
        }
    }
    collect_edges(&tree.root, model, &mut edges);

    let mut successors: HashMap<Endpoint, Vec<Endpoint>> = HashMap::new();
    for (src, tgt) in &edges {
        successors.entry(src.clone()).or_default().push(tgt.clone());
    }

    // Walk forward from every atomic out-endpoint, skipping over boundary
    // endpoints of composed instances, until atomic in-endpoints are hit.
    let mut wires: BTreeSet<Wire> = BTreeSet::new();
    for (src, _) in &edges {
        if !atomic_instances.contains(&src.0) {
            continue;
        }
        let mut stack = vec![src.clone()];
        let mut seen: HashSet<Endpoint> = HashSet::new();
        while let Some(ep) = stack.pop() {
            if !seen.insert(ep.clone()) {
                continue;
            }
            if let Some(nexts) = successors.get(&ep) {
                for next in nexts {
                    if atomic_instances.contains(&next.0) {
                        wires.insert(Wire {
                            from_instance: src.0.clone(),
                            from_port: src.1.clone(),
                            to_instance: next.0.clone(),
                            to_port: next.1.clone(),
                        });
                    } else {
                        stack.push(next.clone());
                    }
                }
            }
        }
    }

    // Undirected connectivity scan for chains without any atomic endpoint.
    // Root boundary chains that reach an atom are fine (they are dropped),
    // purely boundary-to-boundary chains are not.
    let mut neighbors: BTreeMap<Endpoint, Vec<Endpoint>> = BTreeMap::new();
    for (src, tgt) in &edges {
        neighbors.entry(src.clone()).or_default().push(tgt.clone());
        neighbors.entry(tgt.clone()).or_default().push(src.clone());
    }
    let mut visited: HashSet<Endpoint> = HashSet::new();
    for start in neighbors.keys() {
        if visited.contains(start) {
            continue;
        }
        let mut stack = vec![start.clone()];
        let mut chain = Vec::new();
        let mut has_atomic = false;
        while let Some(ep) = stack.pop() {
            if !visited.insert(ep.clone()) {
                continue;
            }
            if atomic_instances.contains(&ep.0) {
                has_atomic = true;
            }
            chain.push(ep.clone());
            if let Some(nexts) = neighbors.get(&ep) {
                stack.extend(nexts.iter().cloned());
            }
        }
        if !has_atomic {
            chain.sort();
            let (inst, port) = &chain[0];
            return Err(FlattenError::DanglingBoundary(format!("{}.{}", inst, port)));
        }
    }

    Ok(FlatArchitecture {
        atoms,
        wires: wires.into_iter().collect(),
    })
}
