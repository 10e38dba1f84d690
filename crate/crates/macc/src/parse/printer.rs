//! Pretty-printers emitting the canonical form of each source unit kind.
//!
//! The canonical form is a fixpoint of parse-then-print: printing a parsed
//! unit and parsing the result yields the same text again. Canonicalization
//! drops comments, prints one port or subcomponent per statement, keeps
//! multi-target connectors on one line, and orders component elements as
//! imports, ports, subcomponents, connectors, automaton. Enum literals keep
//! the qualification they were written with.

use crate::model::*;

pub fn print_component(ct: &ComponentType) -> String {
    let mut out = String::new();
    out.push_str(&format!("component {} {{\n", ct.name));
    for import in &ct.imports {
        out.push_str(&format!("  import {}.*;\n", import.name));
    }
    for port in &ct.ports {
        let dir = match port.direction {
            PortDirection::In => "in",
            PortDirection::Out => "out",
        };
        out.push_str(&format!(
            "  port {} {} {};\n",
            dir, port.type_name, port.name
        ));
    }
    for sub in &ct.subcomponents {
        out.push_str(&format!(
            "  component {} {};\n",
            sub.type_name, sub.instance_name
        ));
    }
    for conn in &ct.connectors {
        let targets: Vec<String> = conn.targets.iter().map(|t| t.render()).collect();
        out.push_str(&format!(
            "  connect {} -> {};\n",
            conn.source.render(),
            targets.join(", ")
        ));
    }
    if let Some(auto) = &ct.automaton {
        out.push_str("  automaton {\n");
        for state in &auto.states {
            out.push_str(&format!("    state {};\n", state.name));
        }
        out.push_str(&format!(
            "    initial {}{};\n",
            auto.initial_state,
            render_actions_suffix(&auto.initial_actions)
        ));
        for t in &auto.transitions {
            out.push_str(&format!(
                "    {} -> {}{}{};\n",
                t.source,
                t.target,
                render_guard_suffix(&t.guard),
                render_actions_suffix(&t.actions)
            ));
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

/// ` / {port = literal, ...}` or empty. Shared with the behavior generator.
pub(crate) fn render_actions_suffix(actions: &[Action]) -> String {
    if actions.is_empty() {
        return String::new();
    }
    let parts: Vec<String> = actions
        .iter()
        .map(|a| format!("{} = {}", a.port, a.value.render()))
        .collect();
    format!(" / {{{}}}", parts.join(", "))
}

/// ` [atom && atom]` or empty. Shared with the behavior generator.
pub(crate) fn render_guard_suffix(guard: &[GuardAtom]) -> String {
    if guard.is_empty() {
        return String::new();
    }
    let atoms: Vec<String> = guard
        .iter()
        .map(|g| format!("{} {} {}", g.port, g.op.symbol(), g.literal.render()))
        .collect();
    format!(" [{}]", atoms.join(" && "))
}

pub fn print_class_diagram(cd: &ClassDiagram) -> String {
    let mut out = String::new();
    out.push_str(&format!("classdiagram {} {{\n", cd.name));
    for decl in &cd.declarations {
        match decl {
            CdDeclaration::Enum(e) => {
                let lits: Vec<&str> = e.literals.iter().map(|l| l.name.as_str()).collect();
                out.push_str(&format!("  enum {} {{ {}; }}\n", e.name, lits.join(", ")));
            }
            CdDeclaration::Record(r) => {
                out.push_str(&format!("  class {} {{\n", r.name));
                for f in &r.fields {
                    out.push_str(&format!("    {} {};\n", f.type_name, f.name));
                }
                out.push_str("  }\n");
            }
        }
    }
    out.push_str("}\n");
    out
}

pub fn print_application(app: &ApplicationConfiguration) -> String {
    let mut out = String::new();
    for import in &app.imports {
        out.push_str(&format!("import {}.*;\n", import.name));
    }
    if !app.imports.is_empty() {
        out.push('\n');
    }
    out.push_str(&format!("application {} {{\n", app.name));
    let gens: Vec<&str> = app.generators.iter().map(|g| g.name.as_str()).collect();
    out.push_str(&format!("  generators {};\n", gens.join(", ")));
    out.push_str("  bindings\n");
    for (i, b) in app.bindings.iter().enumerate() {
        let sep = if i + 1 == app.bindings.len() {
            ";"
        } else {
            ","
        };
        out.push_str(&format!(
            "    map {} to {}{}\n",
            b.instance, b.implementation, sep
        ));
    }
    out.push_str("}\n");
    out
}

pub fn print_library(lib: &CodeLibraryManifest) -> String {
    let mut out = String::new();
    out.push_str(&format!("library {} {{\n", lib.name));
    out.push_str(&format!("  rte {};\n", lib.rte));
    for imp in &lib.implementations {
        let kind = match &imp.kind {
            None => String::new(),
            Some(StubKind::Script) => " kind script".to_owned(),
            Some(StubKind::Record) => " kind record".to_owned(),
            Some(StubKind::Table) => " kind table".to_owned(),
            Some(StubKind::Timer(n)) => format!(" kind timer({})", n),
        };
        out.push_str(&format!(
            "  implementation {} implements {}{};\n",
            imp.name, imp.implements, kind
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::grammar::*;
    use crate::parse::{SourceKind, SourceUnit};

    fn arc(path: &str, text: &str) -> SourceUnit {
        SourceUnit {
            path: path.to_owned(),
            kind: SourceKind::Architecture,
            text: text.to_owned(),
        }
    }

    #[test]
    fn splits_port_lists_into_one_item_per_statement() {
        let ct = parse_architecture(&arc(
            "P.arc",
            "component P { port in Integer a, out Boolean b; }",
        ))
        .unwrap();
        let printed = print_component(&ct);
        assert_eq!(
            printed,
            "component P {\n  port in Integer a;\n  port out Boolean b;\n}\n"
        );
    }

    #[test]
    fn keeps_multi_target_connectors_on_one_line() {
        let ct = parse_architecture(&arc(
            "R.arc",
            "component R { component S a; component T b, c; connect a.data -> b.x, c.x; }",
        ))
        .unwrap();
        let printed = print_component(&ct);
        assert!(printed.contains("  connect a.data -> b.x, c.x;\n"));
    }

    #[test]
    fn preserves_bare_and_qualified_enum_literals() {
        let text = "component A {\n  port in Sig x;\n  port out Sig y;\n  automaton {\n    state S;\n    initial S / {y = Sig.GO};\n    S -> S [x == GO] / {y = STOP};\n  }\n}\n";
        let ct = parse_architecture(&arc("A.arc", text)).unwrap();
        let printed = print_component(&ct);
        assert!(printed.contains("initial S / {y = Sig.GO};"));
        assert!(printed.contains("S -> S [x == GO] / {y = STOP};"));
    }

    #[test]
    fn printed_component_reparses_to_the_same_text() {
        let text = r#"// leading comment
component R {
  import Lib.*;
  port in Integer size, out Double ratio;
  component S a, b;
  connect a.data -> b.x;
  automaton {
    state P, Q;
    initial P;
    P -> Q [size >= 3 && ratio != 0.5];
    Q -> P / {ratio = -1.25};
  }
}"#;
        let first = print_component(&parse_architecture(&arc("R.arc", text)).unwrap());
        let second = print_component(&parse_architecture(&arc("R.arc", &first)).unwrap());
        assert_eq!(first, second);
    }

    #[test]
    fn printed_application_reparses_to_the_same_text() {
        let unit = SourceUnit {
            path: "x.app".to_owned(),
            kind: SourceKind::AppConfig,
            text: "import L.*; application X { generators g-a, g-b; bindings map R.a to I; }"
                .to_owned(),
        };
        let first = print_application(&parse_application(&unit).unwrap());
        let reparsed = parse_application(&SourceUnit {
            path: "x.app".to_owned(),
            kind: SourceKind::AppConfig,
            text: first.clone(),
        })
        .unwrap();
        assert_eq!(first, print_application(&reparsed));
    }
}
