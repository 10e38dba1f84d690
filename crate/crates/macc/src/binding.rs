//! Binding application and the binding table.
//!
//! `apply_binding` is functional: it returns a new instance tree with the
//! configured implementations resolved onto the abstract instances and
//! leaves the input untouched. Applying the same configuration twice yields
//! the same tree, and binding never changes the tree's structure.
//!
//! The binding table lists every atomic instance in depth-first declaration
//! order with its implementation column: the library-qualified
//! implementation for bound instances, `generated` for fully modeled ones,
//! and `(unbound)` for abstract instances without a binding.

use crate::diag::Loc;
use crate::model::{
    ApplicationConfiguration, Classification, CodeLibraryManifest, ImplementationRef, InstanceTree,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BindError {
    #[error("binding target '{instance}' does not exist in the instance tree")]
    UnresolvedInstance { instance: String, loc: Loc },
    #[error("implementation '{implementation}' is not provided by the imported libraries")]
    UnresolvedImplementation { implementation: String, loc: Loc },
}

/// Resolves every binding entry onto a copy of the tree. Implementations
/// are looked up in the imported libraries in import order; the binding
/// checks reject ambiguous names before this runs.
pub fn apply_binding(
    tree: &InstanceTree,
    config: &ApplicationConfiguration,
    libraries: &[CodeLibraryManifest],
) -> Result<InstanceTree, BindError> {
    let imported: Vec<&CodeLibraryManifest> = config
        .imports
        .iter()
        .filter_map(|i| libraries.iter().find(|m| m.name == i.name))
        .collect();

    let mut bound = tree.clone();
    for entry in &config.bindings {
        let resolved = imported
            .iter()
            .find_map(|lib| {
                lib.implementation(&entry.implementation)
                    .map(|imp| ImplementationRef {
                        library: lib.name.clone(),
                        implementation: imp.name.clone(),
                        rte: lib.rte.clone(),
                        kind: imp.kind.clone(),
                    })
            })
            .ok_or_else(|| BindError::UnresolvedImplementation {
                implementation: entry.implementation.clone(),
                loc: entry.implementation_loc,
            })?;
        let node =
            bound
                .find_mut(&entry.instance)
                .ok_or_else(|| BindError::UnresolvedInstance {
                    instance: entry.instance.clone(),
                    loc: entry.instance_loc,
                })?;
        node.resolved_binding = Some(resolved);
    }
    Ok(bound)
}

#[derive(Debug, Clone, PartialEq)]
pub enum BindingCell {
    Generated,
    Bound(ImplementationRef),
    Unbound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BindingRow {
    pub qualified_name: String,
    pub cell: BindingCell,
}

pub fn binding_table(tree: &InstanceTree) -> Vec<BindingRow> {
    tree.atoms()
        .into_iter()
        .map(|node| BindingRow {
            qualified_name: node.qualified_name.clone(),
            cell: match node.classification {
                Classification::FullyModeled => BindingCell::Generated,
                _ => match &node.resolved_binding {
                    Some(r) => BindingCell::Bound(r.clone()),
                    None => BindingCell::Unbound,
                },
            },
        })
        .collect()
}

/// Two-column table; the implementation column starts two spaces after the
/// widest qualified name (or the header, whichever is wider).
pub fn render_binding_table(rows: &[BindingRow]) -> String {
    const NAME_HEADER: &str = "QUALIFIED-NAME";
    const IMPL_HEADER: &str = "IMPLEMENTATION";
    let width = rows
        .iter()
        .map(|r| r.qualified_name.len())
        .chain(std::iter::once(NAME_HEADER.len()))
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    out.push_str(&format!(
        "{:<w$}  {}\n",
        NAME_HEADER,
        IMPL_HEADER,
        w = width
    ));
    for row in rows {
        let cell = match &row.cell {
            BindingCell::Generated => "generated".to_owned(),
            BindingCell::Unbound => "(unbound)".to_owned(),
            BindingCell::Bound(r) => r.qualified_name(),
        };
        out.push_str(&format!(
            "{:<w$}  {}\n",
            row.qualified_name,
            cell,
            w = width
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{instantiate, ArchitectureModel};
    use crate::parse::workspace::{load_application, load_libraries, load_workspace};
    use std::path::PathBuf;

    fn bumperbot() -> (ArchitectureModel, InstanceTree) {
        let ws = load_workspace(&[PathBuf::from("tests/fixtures/bumperbot")]).unwrap();
        let tree = instantiate(&ws.model, "BumperBot").unwrap();
        (ws.model, tree)
    }

    fn nxt_config() -> (
        ApplicationConfiguration,
        Vec<crate::model::CodeLibraryManifest>,
    ) {
        let app = load_application(&PathBuf::from("tests/fixtures/apps/nxt-a.app"))
            .unwrap()
            .unwrap();
        let libs = load_libraries(&[PathBuf::from("tests/fixtures/libs")]).unwrap();
        (app, libs.manifests)
    }

    #[test]
    fn binding_is_functional_and_idempotent() {
        let (_, tree) = bumperbot();
        let (app, libs) = nxt_config();
        let before = tree.clone();
        let once = apply_binding(&tree, &app, &libs).unwrap();
        assert_eq!(tree, before);
        let twice = apply_binding(&once, &app, &libs).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn binding_keeps_the_tree_structure() {
        let (_, tree) = bumperbot();
        let (app, libs) = nxt_config();
        let bound = apply_binding(&tree, &app, &libs).unwrap();
        let strip = |t: &InstanceTree| -> Vec<(String, String)> {
            t.nodes()
                .iter()
                .map(|n| (n.qualified_name.clone(), n.component_type.clone()))
                .collect()
        };
        assert_eq!(strip(&tree), strip(&bound));
    }

    #[test]
    fn unknown_instance_is_reported() {
        let (_, tree) = bumperbot();
        let (mut app, libs) = nxt_config();
        app.bindings[0].instance = "BumperBot.wheel".to_owned();
        match apply_binding(&tree, &app, &libs) {
            Err(BindError::UnresolvedInstance { instance, .. }) => {
                assert_eq!(instance, "BumperBot.wheel");
            }
            other => panic!("expected unresolved instance, got {:?}", other),
        }
    }

    #[test]
    fn table_matches_the_frozen_rendering() {
        let (_, tree) = bumperbot();
        let (app, libs) = nxt_config();
        let bound = apply_binding(&tree, &app, &libs).unwrap();
        let rendered = render_binding_table(&binding_table(&bound));
        assert_eq!(
            rendered,
            include_str!("../tests/fixtures/golden/bind-table.txt")
        );
    }

    #[test]
    fn unbound_abstract_instances_render_as_unbound() {
        let (_, tree) = bumperbot();
        let rows = binding_table(&tree);
        let sensor = rows
            .iter()
            .find(|r| r.qualified_name == "BumperBot.sensor")
            .unwrap();
        assert_eq!(sensor.cell, BindingCell::Unbound);
        let controller = rows
            .iter()
            .find(|r| r.qualified_name == "BumperBot.controller")
            .unwrap();
        assert_eq!(controller.cell, BindingCell::Generated);
    }
}
