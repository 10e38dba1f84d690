//! Target code generation.
//!
//! A fixed registry offers six generators, one per role and runtime
//! environment:
//!
//! ```text
//! structure-a   behavior-a   datatypes-a    (rte-a)
//! structure-b   behavior-b   datatypes-b    (rte-b)
//! ```
//!
//! Structure generators emit an interface section for every component type
//! in the model and a factory section for the composed ones; behavior
//! generators emit the automaton of every fully modeled type; data type
//! generators emit the builtin mapping of their runtime followed by every
//! class diagram's declarations. Generators of different roles run in a
//! fixed order (data types, structure, behavior) and write to disjoint
//! locations under the output root:
//!
//! ```text
//! <out>/<rte>/<Type>.gen
//! <out>/<rte>/behavior/<Type>.gen
//! <out>/<rte>/types/<Diagram>.gen
//! ```
//!
//! Rendering is pure and deterministic: the same model, tree, and
//! configuration produce byte-identical file sets.

use std::path::Path;

use crate::model::*;
use crate::parse::printer::{render_actions_suffix, render_guard_suffix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorRole {
    Datatype,
    Structure,
    Behavior,
}

impl GeneratorRole {
    fn rank(&self) -> u8 {
        match self {
            GeneratorRole::Datatype => 0,
            GeneratorRole::Structure => 1,
            GeneratorRole::Behavior => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorDescriptor {
    pub name: &'static str,
    pub rte: &'static str,
    pub role: GeneratorRole,
}

const REGISTRY: [GeneratorDescriptor; 6] = [
    GeneratorDescriptor {
        name: "structure-a",
        rte: "rte-a",
        role: GeneratorRole::Structure,
    },
    GeneratorDescriptor {
        name: "behavior-a",
        rte: "rte-a",
        role: GeneratorRole::Behavior,
    },
    GeneratorDescriptor {
        name: "datatypes-a",
        rte: "rte-a",
        role: GeneratorRole::Datatype,
    },
    GeneratorDescriptor {
        name: "structure-b",
        rte: "rte-b",
        role: GeneratorRole::Structure,
    },
    GeneratorDescriptor {
        name: "behavior-b",
        rte: "rte-b",
        role: GeneratorRole::Behavior,
    },
    GeneratorDescriptor {
        name: "datatypes-b",
        rte: "rte-b",
        role: GeneratorRole::Datatype,
    },
];

pub fn registry() -> &'static [GeneratorDescriptor] {
    &REGISTRY
}

pub fn lookup<'r>(
    registry: &'r [GeneratorDescriptor],
    name: &str,
) -> Option<&'r GeneratorDescriptor> {
    registry.iter().find(|d| d.name == name)
}

/// Builtin data type mapping of each runtime.
fn builtin_map(rte: &str) -> [(&'static str, &'static str); 4] {
    match rte {
        "rte-a" => [
            ("Integer", "int"),
            ("Boolean", "boolean"),
            ("String", "String"),
            ("Double", "double"),
        ],
        "rte-b" => [
            ("Integer", "int64"),
            ("Boolean", "bool"),
            ("String", "str"),
            ("Double", "float64"),
        ],
        other => panic!("no builtin mapping for rte '{}'", other),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedFile {
    /// Path relative to the output root, forward slashes.
    pub path: String,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeneratedFileSet {
    pub files: Vec<GeneratedFile>,
}

#[derive(Debug, thiserror::Error)]
pub enum CodegenError {
    #[error("unknown generator '{0}'")]
    UnknownGenerator(String),
    #[error("component type '{0}' referenced by a factory is not declared")]
    UnknownType(String),
    #[error("instance '{0}' has no bound implementation")]
    UnboundInstance(String),
    #[error("component '{0}' is not fully modeled; there is no behavior to generate")]
    NotFullyModeled(String),
    #[error("cannot write '{path}': {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn header(rte: &str, generator: &str) -> String {
    format!("// rte: {}\n// generator: {}\n", rte, generator)
}

/// Interface section for every component type, plus a factory section for
/// composed ones. Factory lines instantiate each subcomponent: abstract
/// children by their bound implementation (resolved on the first instance
/// of this type in the tree), fully modeled children by the generated
/// `<Type>Impl` class, composed children by their own structure class.
pub fn emit_structure(
    ct: &ComponentType,
    model: &ArchitectureModel,
    tree: &InstanceTree,
    rte: &str,
    generator: &str,
) -> Result<String, CodegenError> {
    let mut out = header(rte, generator);
    out.push_str(&format!("INTERFACE {}\n", ct.name));
    for port in &ct.ports {
        let dir = match port.direction {
            PortDirection::In => "in",
            PortDirection::Out => "out",
        };
        out.push_str(&format!("  {} {} : {}\n", dir, port.name, port.type_name));
    }
    if classify(ct) == Classification::Composed {
        out.push_str("FACTORY\n");
        let site = tree
            .nodes()
            .into_iter()
            .find(|n| n.component_type == ct.name);
        for sub in &ct.subcomponents {
            let child_ct = model
                .component(&sub.type_name)
                .ok_or_else(|| CodegenError::UnknownType(sub.type_name.clone()))?;
            let class = match classify(child_ct) {
                Classification::Composed => sub.type_name.clone(),
                Classification::FullyModeled => format!("{}Impl", sub.type_name),
                Classification::Abstract => {
                    let child = site.and_then(|n| {
                        n.children.iter().find(|c| {
                            c.qualified_name
                                == format!("{}.{}", n.qualified_name, sub.instance_name)
                        })
                    });
                    let binding = child.and_then(|c| c.resolved_binding.as_ref());
                    match binding {
                        Some(r) => r.implementation.clone(),
                        None => {
                            let instance = match child {
                                Some(c) => c.qualified_name.clone(),
                                None => format!("{}.{}", ct.name, sub.instance_name),
                            };
                            return Err(CodegenError::UnboundInstance(instance));
                        }
                    }
                }
            };
            out.push_str(&format!("  {} = new {}\n", sub.instance_name, class));
        }
    }
    Ok(out)
}

/// Automaton listing of one fully modeled type.
pub fn emit_behavior(
    ct: &ComponentType,
    rte: &str,
    generator: &str,
) -> Result<String, CodegenError> {
    if classify(ct) != Classification::FullyModeled {
        return Err(CodegenError::NotFullyModeled(ct.name.clone()));
    }
    let auto = ct
        .automaton
        .as_ref()
        .expect("fully modeled implies automaton");
    let mut out = header(rte, generator);
    out.push_str(&format!("BEHAVIOR {}\n", ct.name));
    for state in &auto.states {
        out.push_str(&format!("  state {}\n", state.name));
    }
    out.push_str(&format!(
        "  initial {}{}\n",
        auto.initial_state,
        render_actions_suffix(&auto.initial_actions)
    ));
    for t in &auto.transitions {
        out.push_str(&format!(
            "  {} -> {}{}{}\n",
            t.source,
            t.target,
            render_guard_suffix(&t.guard),
            render_actions_suffix(&t.actions)
        ));
    }
    Ok(out)
}

/// Builtin mapping of the runtime followed by the diagram's declarations.
pub fn emit_datatypes(cd: &ClassDiagram, rte: &str, generator: &str) -> String {
    let mut out = header(rte, generator);
    out.push_str(&format!("DATATYPES {}\n", cd.name));
    for (from, to) in builtin_map(rte) {
        out.push_str(&format!("  map {} -> {}\n", from, to));
    }
    for decl in &cd.declarations {
        match decl {
            CdDeclaration::Enum(e) => {
                let lits: Vec<&str> = e.literals.iter().map(|l| l.name.as_str()).collect();
                out.push_str(&format!("  enum {} {{ {} }}\n", e.name, lits.join(", ")));
            }
            CdDeclaration::Record(r) => {
                let fields: Vec<String> = r
                    .fields
                    .iter()
                    .map(|f| format!("{} : {}", f.name, f.type_name))
                    .collect();
                if fields.is_empty() {
                    out.push_str(&format!("  record {} {{ }}\n", r.name));
                } else {
                    out.push_str(&format!(
                        "  record {} {{ {} }}\n",
                        r.name,
                        fields.join(", ")
                    ));
                }
            }
        }
    }
    out
}

/// Renders every file the configured generators produce, without touching
/// the file system. Selected generators are deduplicated and run in role
/// order: data types, structure, behavior.
pub fn render(
    model: &ArchitectureModel,
    tree: &InstanceTree,
    config: &ApplicationConfiguration,
) -> Result<GeneratedFileSet, CodegenError> {
    let mut selected: Vec<&GeneratorDescriptor> = Vec::new();
    for gen in &config.generators {
        let desc = lookup(registry(), &gen.name)
            .ok_or_else(|| CodegenError::UnknownGenerator(gen.name.clone()))?;
        if !selected.iter().any(|d| d.name == desc.name) {
            selected.push(desc);
        }
    }
    selected.sort_by_key(|d| d.role.rank());

    let mut files = Vec::new();
    for desc in selected {
        match desc.role {
            GeneratorRole::Datatype => {
                for sourced in &model.diagrams {
                    files.push(GeneratedFile {
                        path: format!("{}/types/{}.gen", desc.rte, sourced.diagram.name),
                        text: emit_datatypes(&sourced.diagram, desc.rte, desc.name),
                    });
                }
            }
            GeneratorRole::Structure => {
                for sourced in &model.components {
                    files.push(GeneratedFile {
                        path: format!("{}/{}.gen", desc.rte, sourced.component.name),
                        text: emit_structure(&sourced.component, model, tree, desc.rte, desc.name)?,
                    });
                }
            }
            GeneratorRole::Behavior => {
                for sourced in &model.components {
                    if classify(&sourced.component) == Classification::FullyModeled {
                        files.push(GeneratedFile {
                            path: format!("{}/behavior/{}.gen", desc.rte, sourced.component.name),
                            text: emit_behavior(&sourced.component, desc.rte, desc.name)?,
                        });
                    }
                }
            }
        }
    }
    files.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(GeneratedFileSet { files })
}

/// Renders and writes the file set under `out_dir`.
pub fn orchestrate(
    model: &ArchitectureModel,
    tree: &InstanceTree,
    config: &ApplicationConfiguration,
    out_dir: &Path,
) -> Result<GeneratedFileSet, CodegenError> {
    let set = render(model, tree, config)?;
    for file in &set.files {
        let path = out_dir.join(&file.path);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CodegenError::Write {
                path: parent.display().to_string(),
                source: e,
            })?;
        }
        std::fs::write(&path, &file.text).map_err(|e| CodegenError::Write {
            path: path.display().to_string(),
            source: e,
        })?;
    }
    Ok(set)
}
