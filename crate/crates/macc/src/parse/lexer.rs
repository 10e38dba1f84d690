//! Shared lexer for the modeling DSLs.
//!
//! Identifiers may contain `-` so registry names such as `structure-a` and
//! `rte-b` lex as single tokens; a `-` only continues an identifier when a
//! letter, digit or underscore follows, so `a->b` still splits into an
//! identifier, an arrow and an identifier. A `-` at token start begins a
//! numeric literal. `true` and `false` are the only globally reserved
//! words; everything else is matched contextually by the parsers.

use crate::diag::Loc;
use crate::parse::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Star,
    Arrow,
    Assign,
    Slash,
    EqEq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    AndAnd,
    Eof,
}

impl TokenKind {
    /// Short rendering for error messages.
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("'{}'", s),
            TokenKind::Int(v) => format!("'{}'", v),
            TokenKind::Float(v) => format!("'{:?}'", v),
            TokenKind::Str(_) => "string literal".to_owned(),
            TokenKind::Bool(v) => format!("'{}'", v),
            TokenKind::LBrace => "'{'".to_owned(),
            TokenKind::RBrace => "'}'".to_owned(),
            TokenKind::LParen => "'('".to_owned(),
            TokenKind::RParen => "')'".to_owned(),
            TokenKind::LBracket => "'['".to_owned(),
            TokenKind::RBracket => "']'".to_owned(),
            TokenKind::Semi => "';'".to_owned(),
            TokenKind::Comma => "','".to_owned(),
            TokenKind::Dot => "'.'".to_owned(),
            TokenKind::Star => "'*'".to_owned(),
            TokenKind::Arrow => "'->'".to_owned(),
            TokenKind::Assign => "'='".to_owned(),
            TokenKind::Slash => "'/'".to_owned(),
            TokenKind::EqEq => "'=='".to_owned(),
            TokenKind::Ne => "'!='".to_owned(),
            TokenKind::Lt => "'<'".to_owned(),
            TokenKind::Gt => "'>'".to_owned(),
            TokenKind::Le => "'<='".to_owned(),
            TokenKind::Ge => "'>='".to_owned(),
            TokenKind::AndAnd => "'&&'".to_owned(),
            TokenKind::Eof => "end of file".to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub loc: Loc,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
}

impl Lexer {
    fn new(text: &str) -> Self {
        Lexer {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn loc(&self) -> Loc {
        Loc::new(self.line, self.col)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.peek_at(1) == Some('/') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn lex_word(&mut self) -> Token {
        let loc = self.loc();
        let mut word = String::new();
        while let Some(c) = self.peek() {
            let continues = c.is_alphanumeric()
                || c == '_'
                || (c == '-'
                    && self
                        .peek_at(1)
                        .is_some_and(|n| n.is_alphanumeric() || n == '_'));
            if !continues {
                break;
            }
            word.push(self.bump().unwrap());
        }
        let kind = match word.as_str() {
            "true" => TokenKind::Bool(true),
            "false" => TokenKind::Bool(false),
            _ => TokenKind::Ident(word),
        };
        Token { kind, loc }
    }

    fn lex_number(&mut self, negative: bool) -> Result<Token, ParseError> {
        let loc = self.loc();
        let mut text = String::new();
        if negative {
            text.push(self.bump().unwrap());
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            text.push(self.bump().unwrap());
        }
        let mut is_float = false;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            is_float = true;
            text.push(self.bump().unwrap());
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                text.push(self.bump().unwrap());
            }
        }
        let kind = if is_float {
            let value: f64 = text.parse().map_err(|_| {
                ParseError::syntax(loc, format!("invalid float literal '{}'", text))
            })?;
            TokenKind::Float(value)
        } else {
            let value: i64 = text.parse().map_err(|_| {
                ParseError::syntax(loc, format!("integer literal '{}' out of range", text))
            })?;
            TokenKind::Int(value)
        };
        Ok(Token { kind, loc })
    }

    fn lex_string(&mut self) -> Result<Token, ParseError> {
        let loc = self.loc();
        self.bump();
        let mut value = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => {
                    return Err(ParseError::syntax(loc, "unterminated string literal"))
                }
                Some('"') => break,
                Some('\\') => match self.bump() {
                    Some('"') => value.push('"'),
                    Some('\\') => value.push('\\'),
                    Some(c) => {
                        return Err(ParseError::syntax(
                            loc,
                            format!("unsupported escape '\\{}' in string literal", c),
                        ))
                    }
                    None => return Err(ParseError::syntax(loc, "unterminated string literal")),
                },
                Some(c) => value.push(c),
            }
        }
        Ok(Token {
            kind: TokenKind::Str(value),
            loc,
        })
    }
}

pub fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer::new(text);
    let mut tokens = Vec::new();
    loop {
        lx.skip_trivia();
        let loc = lx.loc();
        let Some(c) = lx.peek() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                loc,
            });
            return Ok(tokens);
        };
        let token = if c.is_alphabetic() {
            lx.lex_word()
        } else if c.is_ascii_digit() {
            lx.lex_number(false)?
        } else if c == '"' {
            lx.lex_string()?
        } else if c == '-' {
            match lx.peek_at(1) {
                Some('>') => {
                    lx.bump();
                    lx.bump();
                    Token {
                        kind: TokenKind::Arrow,
                        loc,
                    }
                }
                Some(n) if n.is_ascii_digit() => lx.lex_number(true)?,
                _ => return Err(ParseError::syntax(loc, "unexpected character '-'")),
            }
        } else {
            let single = |lx: &mut Lexer, kind: TokenKind| {
                lx.bump();
                Token { kind, loc }
            };
            match c {
                '{' => single(&mut lx, TokenKind::LBrace),
                '}' => single(&mut lx, TokenKind::RBrace),
                '(' => single(&mut lx, TokenKind::LParen),
                ')' => single(&mut lx, TokenKind::RParen),
                '[' => single(&mut lx, TokenKind::LBracket),
                ']' => single(&mut lx, TokenKind::RBracket),
                ';' => single(&mut lx, TokenKind::Semi),
                ',' => single(&mut lx, TokenKind::Comma),
                '.' => single(&mut lx, TokenKind::Dot),
                '*' => single(&mut lx, TokenKind::Star),
                '/' => single(&mut lx, TokenKind::Slash),
                '=' => {
                    lx.bump();
                    if lx.peek() == Some('=') {
                        lx.bump();
                        Token {
                            kind: TokenKind::EqEq,
                            loc,
                        }
                    } else {
                        Token {
                            kind: TokenKind::Assign,
                            loc,
                        }
                    }
                }
                '!' => {
                    lx.bump();
                    if lx.peek() == Some('=') {
                        lx.bump();
                        Token {
                            kind: TokenKind::Ne,
                            loc,
                        }
                    } else {
                        return Err(ParseError::syntax(loc, "unexpected character '!'"));
                    }
                }
                '<' => {
                    lx.bump();
                    if lx.peek() == Some('=') {
                        lx.bump();
                        Token {
                            kind: TokenKind::Le,
                            loc,
                        }
                    } else {
                        Token {
                            kind: TokenKind::Lt,
                            loc,
                        }
                    }
                }
                '>' => {
                    lx.bump();
                    if lx.peek() == Some('=') {
                        lx.bump();
                        Token {
                            kind: TokenKind::Ge,
                            loc,
                        }
                    } else {
                        Token {
                            kind: TokenKind::Gt,
                            loc,
                        }
                    }
                }
                '&' => {
                    lx.bump();
                    if lx.peek() == Some('&') {
                        lx.bump();
                        Token {
                            kind: TokenKind::AndAnd,
                            loc,
                        }
                    } else {
                        return Err(ParseError::syntax(loc, "unexpected character '&'"));
                    }
                }
                other => {
                    return Err(ParseError::syntax(
                        loc,
                        format!("unexpected character '{}'", other),
                    ))
                }
            }
        };
        tokens.push(token);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        lex(text).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn hyphen_stays_inside_registry_style_names() {
        assert_eq!(
            kinds("structure-a rte-b"),
            vec![
                TokenKind::Ident("structure-a".to_owned()),
                TokenKind::Ident("rte-b".to_owned()),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn arrow_splits_identifiers_without_spaces() {
        assert_eq!(
            kinds("a->b"),
            vec![
                TokenKind::Ident("a".to_owned()),
                TokenKind::Arrow,
                TokenKind::Ident("b".to_owned()),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn leading_minus_starts_a_number() {
        assert_eq!(
            kinds("-42 -3.5 7"),
            vec![
                TokenKind::Int(-42),
                TokenKind::Float(-3.5),
                TokenKind::Int(7),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn dotted_reference_is_not_a_float() {
        assert_eq!(
            kinds("a.data"),
            vec![
                TokenKind::Ident("a".to_owned()),
                TokenKind::Dot,
                TokenKind::Ident("data".to_owned()),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn comments_run_to_end_of_line() {
        assert_eq!(
            kinds("x // ignored -> tokens\ny"),
            vec![
                TokenKind::Ident("x".to_owned()),
                TokenKind::Ident("y".to_owned()),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn strings_support_quote_and_backslash_escapes() {
        assert_eq!(
            kinds(r#""he said \"hi\" \\ done""#),
            vec![
                TokenKind::Str(r#"he said "hi" \ done"#.to_owned()),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn tracks_line_and_column() {
        let tokens = lex("ab\n  cd").unwrap();
        assert_eq!(tokens[0].loc, Loc::new(1, 1));
        assert_eq!(tokens[1].loc, Loc::new(2, 3));
    }

    #[test]
    fn rejects_stray_operator_halves() {
        assert!(lex("a ! b").is_err());
        assert!(lex("a & b").is_err());
        assert!(lex("\"open").is_err());
    }
}
