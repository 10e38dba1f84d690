//! Recursive descent parsers for the four source unit kinds.
//!
//! ```text
//! .arc   unit      ::= "component" ID "{" element* "}"
//!        element   ::= "import" ID "." "*" ";"
//!                    | "port" portitem ("," portitem)* ";"
//!                    | "component" ID NAME ("," NAME)* ";"
//!                    | "connect" portref "->" portref ("," portref)* ";"
//!                    | automaton
//!        portitem  ::= ("in" | "out") ID NAME
//!        portref   ::= ID ("." ID)?
//!        automaton ::= "automaton" "{" states+ initial transition* "}"
//!        states    ::= "state" ID ("," ID)* ";"
//!        initial   ::= "initial" ID ("/" actions)? ";"
//!        transition::= ID "->" ID ("[" guard "]")? ("/" actions)? ";"
//!        guard     ::= ID OP literal ("&&" ID OP literal)*
//!        actions   ::= "{" ID "=" literal ("," ID "=" literal)* "}"
//!
//! .cd    unit      ::= "classdiagram" ID "{" cddecl* "}"
//!        cddecl    ::= "enum" ID "{" ID ("," ID)* ";" "}"
//!                    | "class" ID "{" (ID NAME ";")* "}"
//!
//! .app   unit      ::= ("import" ID "." "*" ";")* "application" ID "{"
//!                        "generators" ID ("," ID)* ";"
//!                        "bindings" binding ("," binding)* ";"
//!                      "}"
//!        binding   ::= "map" ID ("." ID)* "to" ID
//!
//! .lib   unit      ::= "library" ID "{" "rte" ID ";" impl* "}"
//!        impl      ::= "implementation" ID "implements" ID
//!                        ("kind" ID ("(" INT ")")?)? ";"
//! ```
//!
//! Literals are integers, floats, booleans, strings, or enum references
//! `LITERAL` / `Enum.LITERAL`. Keywords are contextual: inside an automaton
//! body, state declarations end once the `initial` statement is parsed, so
//! transition sources may use any identifier.

use crate::diag::Loc;
use crate::model::*;
use crate::parse::lexer::{lex, Token, TokenKind};
use crate::parse::{ParseError, SourceUnit};

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_word(&self) -> Option<&str> {
        match &self.peek().kind {
            TokenKind::Ident(s) => Some(s.as_str()),
            _ => None,
        }
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Loc, ParseError> {
        if self.at(&kind) {
            Ok(self.advance().loc)
        } else {
            let found = self.peek();
            Err(ParseError::syntax(
                found.loc,
                format!(
                    "expected {}, found {}",
                    kind.describe(),
                    found.kind.describe()
                ),
            ))
        }
    }

    /// Matches a contextual keyword.
    fn expect_word(&mut self, word: &str) -> Result<Loc, ParseError> {
        match self.peek_word() {
            Some(w) if w == word => Ok(self.advance().loc),
            _ => {
                let found = self.peek();
                Err(ParseError::syntax(
                    found.loc,
                    format!("expected '{}', found {}", word, found.kind.describe()),
                ))
            }
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Loc), ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(_) => {
                let t = self.advance();
                match t.kind {
                    TokenKind::Ident(s) => Ok((s, t.loc)),
                    _ => unreachable!(),
                }
            }
            other => Err(ParseError::syntax(
                self.peek().loc,
                format!("expected {}, found {}", what, other.describe()),
            )),
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if self.at(&TokenKind::Eof) {
            Ok(())
        } else {
            let found = self.peek();
            Err(ParseError::syntax(
                found.loc,
                format!("expected end of file, found {}", found.kind.describe()),
            ))
        }
    }

    fn parse_import(&mut self) -> Result<Import, ParseError> {
        self.expect_word("import")?;
        let (name, loc) = self.expect_ident("library name")?;
        self.expect(TokenKind::Dot)?;
        self.expect(TokenKind::Star)?;
        self.expect(TokenKind::Semi)?;
        Ok(Import { name, loc })
    }

    fn parse_literal(&mut self) -> Result<Literal, ParseError> {
        let t = self.advance();
        match t.kind {
            TokenKind::Int(v) => Ok(Literal::Int(v)),
            TokenKind::Float(v) => Ok(Literal::Float(v)),
            TokenKind::Bool(v) => Ok(Literal::Bool(v)),
            TokenKind::Str(v) => Ok(Literal::Str(v)),
            TokenKind::Ident(first) => {
                if self.eat(&TokenKind::Dot) {
                    let (literal, _) = self.expect_ident("enum literal")?;
                    Ok(Literal::Enum {
                        enum_name: Some(first),
                        literal,
                    })
                } else {
                    Ok(Literal::Enum {
                        enum_name: None,
                        literal: first,
                    })
                }
            }
            other => Err(ParseError::syntax(
                t.loc,
                format!("expected literal, found {}", other.describe()),
            )),
        }
    }

    fn parse_port_ref(&mut self) -> Result<PortRef, ParseError> {
        let (first, loc) = self.expect_ident("port reference")?;
        if self.eat(&TokenKind::Dot) {
            let (port, _) = self.expect_ident("port name")?;
            Ok(PortRef {
                instance: Some(first),
                port,
                loc,
            })
        } else {
            Ok(PortRef {
                instance: None,
                port: first,
                loc,
            })
        }
    }

    fn parse_actions(&mut self) -> Result<Vec<Action>, ParseError> {
        self.expect(TokenKind::LBrace)?;
        let mut actions = Vec::new();
        loop {
            let (port, port_loc) = self.expect_ident("port name")?;
            self.expect(TokenKind::Assign)?;
            let value = self.parse_literal()?;
            actions.push(Action {
                port,
                port_loc,
                value,
            });
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect(TokenKind::RBrace)?;
        Ok(actions)
    }

    fn parse_guard(&mut self) -> Result<Vec<GuardAtom>, ParseError> {
        self.expect(TokenKind::LBracket)?;
        let mut atoms = Vec::new();
        loop {
            let (port, port_loc) = self.expect_ident("port name")?;
            let op_token = self.advance();
            let op = match op_token.kind {
                TokenKind::EqEq => CompareOp::Eq,
                TokenKind::Ne => CompareOp::Ne,
                TokenKind::Lt => CompareOp::Lt,
                TokenKind::Gt => CompareOp::Gt,
                TokenKind::Le => CompareOp::Le,
                TokenKind::Ge => CompareOp::Ge,
                other => {
                    return Err(ParseError::syntax(
                        op_token.loc,
                        format!("expected comparison operator, found {}", other.describe()),
                    ))
                }
            };
            let literal = self.parse_literal()?;
            atoms.push(GuardAtom {
                port,
                port_loc,
                op,
                literal,
            });
            if !self.eat(&TokenKind::AndAnd) {
                break;
            }
        }
        self.expect(TokenKind::RBracket)?;
        Ok(atoms)
    }

    fn parse_automaton(&mut self) -> Result<Automaton, ParseError> {
        let keyword_loc = self.expect_word("automaton")?;
        self.expect(TokenKind::LBrace)?;
        let mut states = Vec::new();
        while self.peek_word() == Some("state") {
            self.advance();
            loop {
                let (name, loc) = self.expect_ident("state name")?;
                states.push(StateDecl { name, loc });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.expect(TokenKind::Semi)?;
        }
        if states.is_empty() {
            let found = self.peek();
            return Err(ParseError::syntax(
                found.loc,
                format!("expected 'state', found {}", found.kind.describe()),
            ));
        }
        self.expect_word("initial")?;
        let (initial_state, initial_loc) = self.expect_ident("state name")?;
        let initial_actions = if self.eat(&TokenKind::Slash) {
            self.parse_actions()?
        } else {
            Vec::new()
        };
        self.expect(TokenKind::Semi)?;

        let mut transitions = Vec::new();
        while !self.at(&TokenKind::RBrace) {
            let (source, source_loc) = self.expect_ident("state name")?;
            self.expect(TokenKind::Arrow)?;
            let (target, target_loc) = self.expect_ident("state name")?;
            let guard = if self.at(&TokenKind::LBracket) {
                self.parse_guard()?
            } else {
                Vec::new()
            };
            let actions = if self.eat(&TokenKind::Slash) {
                self.parse_actions()?
            } else {
                Vec::new()
            };
            self.expect(TokenKind::Semi)?;
            transitions.push(Transition {
                source,
                source_loc,
                target,
                target_loc,
                guard,
                actions,
            });
        }
        self.expect(TokenKind::RBrace)?;
        Ok(Automaton {
            keyword_loc,
            states,
            initial_state,
            initial_loc,
            initial_actions,
            transitions,
        })
    }

    /// Parameter lists after a type name are recognized so they can be
    /// rejected with a stable code instead of a generic syntax error.
    fn reject_parameters(&mut self, type_name: &str) -> Result<(), ParseError> {
        if self.at(&TokenKind::LParen) {
            return Err(ParseError::new(
                "UNSUPPORTED",
                self.peek().loc,
                format!(
                    "configuration parameters on '{}' are not supported",
                    type_name
                ),
            ));
        }
        if self.at(&TokenKind::Lt) {
            return Err(ParseError::new(
                "UNSUPPORTED",
                self.peek().loc,
                format!("generic parameters on '{}' are not supported", type_name),
            ));
        }
        Ok(())
    }
}

/// Parses a component type and verifies its name matches the file stem.
pub fn parse_architecture(unit: &SourceUnit) -> Result<ComponentType, ParseError> {
    let mut p = Parser::new(&unit.text)?;
    p.expect_word("component")?;
    let (name, name_loc) = p.expect_ident("component name")?;
    p.reject_parameters(&name)?;
    if let Some(stem) = std::path::Path::new(&unit.path)
        .file_stem()
        .and_then(|s| s.to_str())
    {
        if stem != name {
            return Err(ParseError::new(
                "NAMEMISMATCH",
                name_loc,
                format!("component '{}' must be declared in '{}.arc'", name, name),
            ));
        }
    }
    p.expect(TokenKind::LBrace)?;

    let mut component = ComponentType {
        name,
        name_loc,
        imports: Vec::new(),
        ports: Vec::new(),
        subcomponents: Vec::new(),
        connectors: Vec::new(),
        automaton: None,
    };

    while !p.at(&TokenKind::RBrace) {
        match p.peek_word() {
            Some("import") => {
                let import = p.parse_import()?;
                component.imports.push(import);
            }
            Some("port") => {
                p.advance();
                loop {
                    let direction = match p.peek_word() {
                        Some("in") => PortDirection::In,
                        Some("out") => PortDirection::Out,
                        _ => {
                            let found = p.peek();
                            return Err(ParseError::syntax(
                                found.loc,
                                format!("expected 'in' or 'out', found {}", found.kind.describe()),
                            ));
                        }
                    };
                    p.advance();
                    let (type_name, type_loc) = p.expect_ident("type name")?;
                    let (port_name, port_loc) = p.expect_ident("port name")?;
                    component.ports.push(Port {
                        direction,
                        type_name,
                        type_loc,
                        name: port_name,
                        name_loc: port_loc,
                    });
                    if !p.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                p.expect(TokenKind::Semi)?;
            }
            Some("component") => {
                p.advance();
                let (type_name, type_loc) = p.expect_ident("component type name")?;
                p.reject_parameters(&type_name)?;
                loop {
                    let (instance_name, instance_loc) = p.expect_ident("instance name")?;
                    component.subcomponents.push(Subcomponent {
                        type_name: type_name.clone(),
                        type_loc,
                        instance_name,
                        instance_loc,
                    });
                    if !p.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                p.expect(TokenKind::Semi)?;
            }
            Some("connect") => {
                p.advance();
                let source = p.parse_port_ref()?;
                p.expect(TokenKind::Arrow)?;
                let mut targets = Vec::new();
                loop {
                    targets.push(p.parse_port_ref()?);
                    if !p.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                p.expect(TokenKind::Semi)?;
                component.connectors.push(Connector { source, targets });
            }
            Some("automaton") => {
                let automaton = p.parse_automaton()?;
                if component.automaton.is_some() {
                    return Err(ParseError::syntax(
                        automaton.keyword_loc,
                        "component already declares an automaton",
                    ));
                }
                component.automaton = Some(automaton);
            }
            _ => {
                let found = p.peek();
                return Err(ParseError::syntax(
                    found.loc,
                    format!(
                        "expected 'import', 'port', 'component', 'connect' or 'automaton', found {}",
                        found.kind.describe()
                    ),
                ));
            }
        }
    }
    p.expect(TokenKind::RBrace)?;
    p.expect_eof()?;
    Ok(component)
}

pub fn parse_class_diagram(unit: &SourceUnit) -> Result<ClassDiagram, ParseError> {
    let mut p = Parser::new(&unit.text)?;
    p.expect_word("classdiagram")?;
    let (name, name_loc) = p.expect_ident("class diagram name")?;
    p.expect(TokenKind::LBrace)?;
    let mut declarations = Vec::new();
    while !p.at(&TokenKind::RBrace) {
        match p.peek_word() {
            Some("enum") => {
                p.advance();
                let (enum_name, enum_loc) = p.expect_ident("enum name")?;
                p.expect(TokenKind::LBrace)?;
                let mut literals: Vec<EnumLiteral> = Vec::new();
                loop {
                    let (lit, lit_loc) = p.expect_ident("enum literal")?;
                    if literals.iter().any(|l| l.name == lit) {
                        return Err(ParseError::new(
                            "DUPLITERAL",
                            lit_loc,
                            format!("literal '{}' already declared in enum '{}'", lit, enum_name),
                        ));
                    }
                    literals.push(EnumLiteral {
                        name: lit,
                        loc: lit_loc,
                    });
                    if !p.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                p.expect(TokenKind::Semi)?;
                p.expect(TokenKind::RBrace)?;
                declarations.push(CdDeclaration::Enum(EnumDecl {
                    name: enum_name,
                    name_loc: enum_loc,
                    literals,
                }));
            }
            Some("class") => {
                p.advance();
                let (class_name, class_loc) = p.expect_ident("class name")?;
                p.expect(TokenKind::LBrace)?;
                let mut fields: Vec<RecordField> = Vec::new();
                while !p.at(&TokenKind::RBrace) {
                    let (type_name, type_loc) = p.expect_ident("field type")?;
                    let (field_name, field_loc) = p.expect_ident("field name")?;
                    if fields.iter().any(|f| f.name == field_name) {
                        return Err(ParseError::new(
                            "DUPLITERAL",
                            field_loc,
                            format!(
                                "field '{}' already declared in class '{}'",
                                field_name, class_name
                            ),
                        ));
                    }
                    fields.push(RecordField {
                        type_name,
                        type_loc,
                        name: field_name,
                        name_loc: field_loc,
                    });
                    p.expect(TokenKind::Semi)?;
                }
                p.expect(TokenKind::RBrace)?;
                declarations.push(CdDeclaration::Record(RecordDecl {
                    name: class_name,
                    name_loc: class_loc,
                    fields,
                }));
            }
            _ => {
                let found = p.peek();
                return Err(ParseError::syntax(
                    found.loc,
                    format!(
                        "expected 'enum' or 'class', found {}",
                        found.kind.describe()
                    ),
                ));
            }
        }
    }
    p.expect(TokenKind::RBrace)?;
    p.expect_eof()?;
    Ok(ClassDiagram {
        name,
        name_loc,
        declarations,
    })
}

pub fn parse_application(unit: &SourceUnit) -> Result<ApplicationConfiguration, ParseError> {
    let mut p = Parser::new(&unit.text)?;
    let mut imports = Vec::new();
    while p.peek_word() == Some("import") {
        imports.push(p.parse_import()?);
    }
    p.expect_word("application")?;
    let (name, name_loc) = p.expect_ident("application name")?;
    p.expect(TokenKind::LBrace)?;

    let generators_keyword_loc = p.expect_word("generators")?;
    let mut generators = Vec::new();
    loop {
        let (gen, loc) = p.expect_ident("generator name")?;
        generators.push(GeneratorRef { name: gen, loc });
        if !p.eat(&TokenKind::Comma) {
            break;
        }
    }
    p.expect(TokenKind::Semi)?;

    let bindings_keyword_loc = p.expect_word("bindings")?;
    let mut bindings: Vec<BindingEntry> = Vec::new();
    loop {
        p.expect_word("map")?;
        let (first, instance_loc) = p.expect_ident("instance name")?;
        let mut instance = first;
        while p.eat(&TokenKind::Dot) {
            let (part, _) = p.expect_ident("instance name")?;
            instance.push('.');
            instance.push_str(&part);
        }
        p.expect_word("to")?;
        let (implementation, implementation_loc) = p.expect_ident("implementation name")?;
        if bindings.iter().any(|b| b.instance == instance) {
            return Err(ParseError::new(
                "DUPBINDING",
                instance_loc,
                format!("instance '{}' is already bound", instance),
            ));
        }
        bindings.push(BindingEntry {
            instance,
            instance_loc,
            implementation,
            implementation_loc,
        });
        if !p.eat(&TokenKind::Comma) {
            break;
        }
    }
    p.expect(TokenKind::Semi)?;
    p.expect(TokenKind::RBrace)?;
    p.expect_eof()?;
    Ok(ApplicationConfiguration {
        name,
        name_loc,
        imports,
        generators_keyword_loc,
        generators,
        bindings_keyword_loc,
        bindings,
    })
}

pub fn parse_library(unit: &SourceUnit) -> Result<CodeLibraryManifest, ParseError> {
    let mut p = Parser::new(&unit.text)?;
    p.expect_word("library")?;
    let (name, name_loc) = p.expect_ident("library name")?;
    p.expect(TokenKind::LBrace)?;
    p.expect_word("rte")?;
    let (rte, rte_loc) = p.expect_ident("rte name")?;
    p.expect(TokenKind::Semi)?;

    let mut implementations: Vec<ImplementationEntry> = Vec::new();
    while !p.at(&TokenKind::RBrace) {
        p.expect_word("implementation")?;
        let (impl_name, impl_loc) = p.expect_ident("implementation name")?;
        if implementations.iter().any(|i| i.name == impl_name) {
            return Err(ParseError::new(
                "DUPIMPL",
                impl_loc,
                format!(
                    "implementation '{}' already declared in library '{}'",
                    impl_name, name
                ),
            ));
        }
        p.expect_word("implements")?;
        let (implements, implements_loc) = p.expect_ident("component type name")?;
        let mut kind = None;
        let mut kind_loc = None;
        if p.peek_word() == Some("kind") {
            p.advance();
            let (kind_name, loc) = p.expect_ident("stub kind")?;
            kind_loc = Some(loc);
            let parsed = match kind_name.as_str() {
                "script" => StubKind::Script,
                "record" => StubKind::Record,
                "table" => StubKind::Table,
                "timer" => {
                    p.expect(TokenKind::LParen)?;
                    let t = p.advance();
                    let delay = match t.kind {
                        TokenKind::Int(v) if v >= 1 => v as u32,
                        TokenKind::Int(_) => {
                            return Err(ParseError::syntax(t.loc, "timer delay must be at least 1"))
                        }
                        other => {
                            return Err(ParseError::syntax(
                                t.loc,
                                format!("expected timer delay, found {}", other.describe()),
                            ))
                        }
                    };
                    p.expect(TokenKind::RParen)?;
                    StubKind::Timer(delay)
                }
                other => {
                    return Err(ParseError::new(
                        "KIND",
                        loc,
                        format!("unknown stub kind '{}'", other),
                    ))
                }
            };
            if !matches!(parsed, StubKind::Timer(_)) && p.at(&TokenKind::LParen) {
                return Err(ParseError::syntax(
                    p.peek().loc,
                    format!("stub kind '{}' takes no parameter", kind_name),
                ));
            }
            kind = Some(parsed);
        }
        p.expect(TokenKind::Semi)?;
        implementations.push(ImplementationEntry {
            name: impl_name,
            name_loc: impl_loc,
            implements,
            implements_loc,
            kind,
            kind_loc,
        });
    }
    p.expect(TokenKind::RBrace)?;
    p.expect_eof()?;
    Ok(CodeLibraryManifest {
        name,
        name_loc,
        rte,
        rte_loc,
        implementations,
        source_dir: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc_unit(path: &str, text: &str) -> SourceUnit {
        SourceUnit {
            path: path.to_owned(),
            kind: crate::parse::SourceKind::Architecture,
            text: text.to_owned(),
        }
    }

    #[test]
    fn parses_an_empty_component_body() {
        let ct = parse_architecture(&arc_unit("Empty.arc", "component Empty { }")).unwrap();
        assert_eq!(ct.name, "Empty");
        assert!(ct.ports.is_empty());
        assert!(ct.automaton.is_none());
        assert_eq!(crate::model::classify(&ct), Classification::Abstract);
    }

    #[test]
    fn rejects_component_name_that_contradicts_the_file_name() {
        let err = parse_architecture(&arc_unit("Other.arc", "component Empty { }")).unwrap_err();
        assert_eq!(err.code, "NAMEMISMATCH");
    }

    #[test]
    fn rejects_a_dangling_connector_arrow() {
        let err = parse_architecture(&arc_unit(
            "R.arc",
            "component R { component S a, b; connect a.data -> ; }",
        ))
        .unwrap_err();
        assert_eq!(err.code, "SYNTAX");
        assert_eq!(err.loc, Loc::new(1, 51));
    }

    #[test]
    fn rejects_configuration_parameters_on_types() {
        let err = parse_architecture(&arc_unit("F.arc", "component F(5) { }")).unwrap_err();
        assert_eq!(err.code, "UNSUPPORTED");
        let err = parse_architecture(&arc_unit(
            "R.arc",
            "component R { component Buf<Integer> b; }",
        ))
        .unwrap_err();
        assert_eq!(err.code, "UNSUPPORTED");
    }

    #[test]
    fn keeps_multi_instance_declarations_in_order() {
        let ct = parse_architecture(&arc_unit(
            "R.arc",
            "component R { component M left, right; }",
        ))
        .unwrap();
        let names: Vec<_> = ct
            .subcomponents
            .iter()
            .map(|s| s.instance_name.as_str())
            .collect();
        assert_eq!(names, vec!["left", "right"]);
        assert!(ct.subcomponents.iter().all(|s| s.type_name == "M"));
    }

    #[test]
    fn parses_guards_actions_and_enum_literal_forms() {
        let ct = parse_architecture(&arc_unit(
            "A.arc",
            r#"component A {
  port in Integer x, out Sig y;
  automaton {
    state S, T;
    initial S / {y = Sig.GO};
    S -> T [x < 10 && y == GO] / {y = STOP};
    T -> S;
  }
}"#,
        ))
        .unwrap();
        let auto = ct.automaton.unwrap();
        assert_eq!(auto.states.len(), 2);
        assert_eq!(auto.initial_actions.len(), 1);
        let t0 = &auto.transitions[0];
        assert_eq!(t0.guard.len(), 2);
        assert_eq!(t0.guard[0].op, CompareOp::Lt);
        assert_eq!(t0.guard[0].literal, Literal::Int(10));
        assert_eq!(
            t0.guard[1].literal,
            Literal::Enum {
                enum_name: None,
                literal: "GO".to_owned()
            }
        );
        assert_eq!(
            t0.actions[0].value,
            Literal::Enum {
                enum_name: None,
                literal: "STOP".to_owned()
            }
        );
        assert!(auto.transitions[1].guard.is_empty());
        assert!(auto.transitions[1].actions.is_empty());
    }

    #[test]
    fn rejects_duplicate_enum_literals() {
        let unit = SourceUnit {
            path: "T.cd".to_owned(),
            kind: crate::parse::SourceKind::ClassDiagram,
            text: "classdiagram T { enum E { A, A; } }".to_owned(),
        };
        let err = parse_class_diagram(&unit).unwrap_err();
        assert_eq!(err.code, "DUPLITERAL");
        assert_eq!(err.loc, Loc::new(1, 30));
    }

    #[test]
    fn parses_records_with_typed_fields() {
        let unit = SourceUnit {
            path: "T.cd".to_owned(),
            kind: crate::parse::SourceKind::ClassDiagram,
            text: "classdiagram T { class Pos { Integer x; Integer y; } }".to_owned(),
        };
        let cd = parse_class_diagram(&unit).unwrap();
        match &cd.declarations[0] {
            CdDeclaration::Record(r) => {
                assert_eq!(r.name, "Pos");
                assert_eq!(r.fields.len(), 2);
            }
            other => panic!("expected record, got {:?}", other),
        }
    }

    #[test]
    fn rejects_an_empty_bindings_clause() {
        let unit = SourceUnit {
            path: "a.app".to_owned(),
            kind: crate::parse::SourceKind::AppConfig,
            text: "application A { generators structure-a; bindings ; }".to_owned(),
        };
        let err = parse_application(&unit).unwrap_err();
        assert_eq!(err.code, "SYNTAX");
    }

    #[test]
    fn rejects_duplicate_bindings_for_one_instance() {
        let unit = SourceUnit {
            path: "a.app".to_owned(),
            kind: crate::parse::SourceKind::AppConfig,
            text: "application A { generators g; bindings map R.x to I, map R.x to J; }".to_owned(),
        };
        let err = parse_application(&unit).unwrap_err();
        assert_eq!(err.code, "DUPBINDING");
    }

    #[test]
    fn parses_a_library_without_implementations() {
        let unit = SourceUnit {
            path: "L.lib".to_owned(),
            kind: crate::parse::SourceKind::LibraryManifest,
            text: "library L { rte rte-a; }".to_owned(),
        };
        let lib = parse_library(&unit).unwrap();
        assert_eq!(lib.rte, "rte-a");
        assert!(lib.implementations.is_empty());
    }

    #[test]
    fn rejects_duplicate_implementation_names() {
        let unit = SourceUnit {
            path: "L.lib".to_owned(),
            kind: crate::parse::SourceKind::LibraryManifest,
            text: "library L { rte sim; implementation I implements A; implementation I implements B; }".to_owned(),
        };
        let err = parse_library(&unit).unwrap_err();
        assert_eq!(err.code, "DUPIMPL");
    }

    #[test]
    fn parses_stub_kinds_and_validates_timer_delay() {
        let unit = SourceUnit {
            path: "L.lib".to_owned(),
            kind: crate::parse::SourceKind::LibraryManifest,
            text: "library L { rte sim; implementation T implements Timer kind timer(3); }"
                .to_owned(),
        };
        let lib = parse_library(&unit).unwrap();
        assert_eq!(lib.implementations[0].kind, Some(StubKind::Timer(3)));

        let bad = SourceUnit {
            path: "L.lib".to_owned(),
            kind: crate::parse::SourceKind::LibraryManifest,
            text: "library L { rte sim; implementation T implements Timer kind timer(0); }"
                .to_owned(),
        };
        assert!(parse_library(&bad).is_err());

        let unknown = SourceUnit {
            path: "L.lib".to_owned(),
            kind: crate::parse::SourceKind::LibraryManifest,
            text: "library L { rte sim; implementation T implements Timer kind replay; }"
                .to_owned(),
        };
        assert_eq!(parse_library(&unknown).unwrap_err().code, "KIND");
    }
}
