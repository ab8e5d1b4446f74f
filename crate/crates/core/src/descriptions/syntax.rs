//! Lexer and statement parser for grammar files.
//!
//! A grammar file is a sequence of `.`-terminated statements:
//!
//! ```text
//! type list sub [e_list, ne_list].          % type declaration
//! type ne_list intro [hd:top, tl:list].
//! append_c => (arg1:e_list, arg2:L, arg3:L). % constraint
//! order_types [word, phrase].               % expansion order directive
//! order_feats phrase [goals, dtr1].         % feature expansion directive
//! ```
//!
//! Parsing here is purely syntactic: names are kept as strings and resolved
//! against the signature afterwards.

use std::fmt;

use thiserror::Error;

/// A 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("syntax error at {pos}: {message}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Lowercase-initial identifier: a type name, feature name or keyword.
    Ident(String),
    /// Uppercase-initial identifier, `_name`, or a `#n` tag.
    Var(String),
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Eq,
    Pipe,
    Dot,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) => write!(f, "`{s}`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Arrow => f.write_str("`=>`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1u32, 1u32);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '%' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' || c == '#' {
            let mut word = String::new();
            word.push(c);
            bump(&mut chars);
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    bump(&mut chars);
                } else {
                    break;
                }
            }
            let tok = if c == '#' {
                if word.len() == 1 || !word[1..].chars().all(|c| c.is_ascii_digit()) {
                    return Err(SyntaxError { pos, message: format!("malformed tag `{word}`") });
                }
                Tok::Var(word)
            } else if c.is_ascii_lowercase() {
                Tok::Ident(word)
            } else {
                Tok::Var(word)
            };
            out.push((tok, pos));
            continue;
        }
        bump(&mut chars);
        let tok = match c {
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            '|' => Tok::Pipe,
            '.' => Tok::Dot,
            '=' => {
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    Tok::Arrow
                } else {
                    Tok::Eq
                }
            }
            other => return Err(SyntaxError { pos, message: format!("unexpected character `{other}`") }),
        };
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// Description syntax tree with unresolved names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawDesc {
    Type(String, Pos),
    Feat(String, Box<RawDesc>, Pos),
    Conj(Vec<RawDesc>),
    Disj(Vec<RawDesc>),
    Var(String, Pos),
    List(Vec<RawDesc>, Option<Box<RawDesc>>, Pos),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    TypeDecl { name: String, subs: Vec<(String, Pos)>, intro: Vec<(String, String, Pos)>, pos: Pos },
    Constraint { antecedent: String, consequent: RawDesc, pos: Pos },
    OrderTypes { types: Vec<(String, Pos)>, pos: Pos },
    OrderFeats { ty: String, feats: Vec<(String, Pos)>, pos: Pos },
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError { pos: self.pos(), message: message.into() })
    }

    fn expect(&mut self, want: Tok) -> Result<Pos, SyntaxError> {
        if *self.peek() == want {
            Ok(self.next().1)
        } else {
            self.error(format!("expected {want}, found {}", self.peek()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), SyntaxError> {
        match self.next() {
            (Tok::Ident(s), p) => Ok((s, p)),
            (t, p) => Err(SyntaxError { pos: p, message: format!("expected {what}, found {t}") }),
        }
    }

    /// Feature names may be written in either case.
    fn feature_name(&mut self) -> Result<(String, Pos), SyntaxError> {
        match self.next() {
            (Tok::Ident(s), p) | (Tok::Var(s), p) if !s.starts_with('#') => Ok((s, p)),
            (t, p) => Err(SyntaxError { pos: p, message: format!("expected a feature name, found {t}") }),
        }
    }

    fn comma_list<T>(
        &mut self,
        mut item: impl FnMut(&mut Self) -> Result<T, SyntaxError>,
    ) -> Result<Vec<T>, SyntaxError> {
        self.expect(Tok::LBracket)?;
        let mut out = Vec::new();
        if *self.peek() == Tok::RBracket {
            self.next();
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            match self.next() {
                (Tok::Comma, _) => continue,
                (Tok::RBracket, _) => return Ok(out),
                (t, p) => return Err(SyntaxError { pos: p, message: format!("expected `,` or `]`, found {t}") }),
            }
        }
    }

    fn statement(&mut self) -> Result<Statement, SyntaxError> {
        let pos = self.pos();
        let head = match self.peek().clone() {
            Tok::Ident(s) => s,
            t => return self.error(format!("expected a declaration, found {t}")),
        };
        let is_kw = |t: &Tok, kw: &str| matches!(t, Tok::Ident(s) if s == kw);
        let stmt = if head == "type" && matches!(self.peek2(), Tok::Ident(_)) {
            self.next();
            let (name, _) = self.ident("a type name")?;
            self.type_decl_tail(name, pos)?
        } else if head == "order_types" && *self.peek2() == Tok::LBracket {
            self.next();
            let types = self.comma_list(|p| p.ident("a type name"))?;
            Statement::OrderTypes { types, pos }
        } else if head == "order_feats" && matches!(self.peek2(), Tok::Ident(_)) {
            self.next();
            let (ty, _) = self.ident("a type name")?;
            let feats = self.comma_list(|p| p.feature_name())?;
            Statement::OrderFeats { ty, feats, pos }
        } else if is_kw(self.peek2(), "sub") || is_kw(self.peek2(), "intro") {
            self.next();
            self.type_decl_tail(head, pos)?
        } else if *self.peek2() == Tok::Arrow {
            self.next();
            self.next();
            let consequent = self.disj()?;
            Statement::Constraint { antecedent: head, consequent, pos }
        } else if *self.peek2() == Tok::Dot {
            // `type_name.` alone declares a type with no subtypes or features.
            self.next();
            Statement::TypeDecl { name: head, subs: vec![], intro: vec![], pos }
        } else {
            self.next();
            return self.error(format!("expected `sub`, `intro` or `=>`, found {}", self.peek()));
        };
        self.expect(Tok::Dot)?;
        Ok(stmt)
    }

    fn type_decl_tail(&mut self, name: String, pos: Pos) -> Result<Statement, SyntaxError> {
        let mut subs = Vec::new();
        let mut intro = Vec::new();
        loop {
            match self.peek() {
                Tok::Ident(kw) if kw == "sub" => {
                    self.next();
                    subs.extend(self.comma_list(|p| p.ident("a type name"))?);
                }
                Tok::Ident(kw) if kw == "intro" => {
                    self.next();
                    intro.extend(self.comma_list(|p| {
                        let (f, fpos) = p.feature_name()?;
                        p.expect(Tok::Colon)?;
                        let (t, _) = p.ident("a type name")?;
                        Ok((f, t, fpos))
                    })?);
                }
                _ => break,
            }
        }
        Ok(Statement::TypeDecl { name, subs, intro, pos })
    }

    fn disj(&mut self) -> Result<RawDesc, SyntaxError> {
        let mut parts = vec![self.conj()?];
        while *self.peek() == Tok::Semi {
            self.next();
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { RawDesc::Disj(parts) })
    }

    fn conj(&mut self) -> Result<RawDesc, SyntaxError> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::Comma {
            self.next();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { RawDesc::Conj(parts) })
    }

    fn unary(&mut self) -> Result<RawDesc, SyntaxError> {
        let pos = self.pos();
        match (self.peek().clone(), self.peek2().clone()) {
            (Tok::Ident(f), Tok::Colon) | (Tok::Var(f), Tok::Colon) if !f.starts_with('#') => {
                self.next();
                self.next();
                let value = self.unary()?;
                Ok(RawDesc::Feat(f, Box::new(value), pos))
            }
            (Tok::Var(v), Tok::Eq) => {
                self.next();
                self.next();
                let value = self.unary()?;
                Ok(RawDesc::Conj(vec![RawDesc::Var(v, pos), value]))
            }
            (Tok::Var(v), _) => {
                self.next();
                Ok(RawDesc::Var(v, pos))
            }
            (Tok::Ident(t), _) => {
                self.next();
                Ok(RawDesc::Type(t, pos))
            }
            (Tok::LParen, _) => {
                self.next();
                let inner = self.disj()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            (Tok::LBracket, _) => self.list(),
            (t, _) => self.error(format!("expected a description, found {t}")),
        }
    }

    fn list(&mut self) -> Result<RawDesc, SyntaxError> {
        let pos = self.expect(Tok::LBracket)?;
        let mut items = Vec::new();
        if *self.peek() == Tok::RBracket {
            self.next();
            return Ok(RawDesc::List(items, None, pos));
        }
        loop {
            items.push(self.unary()?);
            match self.next() {
                (Tok::Comma, _) => continue,
                (Tok::RBracket, _) => return Ok(RawDesc::List(items, None, pos)),
                (Tok::Pipe, _) => {
                    let tail = self.unary()?;
                    self.expect(Tok::RBracket)?;
                    return Ok(RawDesc::List(items, Some(Box::new(tail)), pos));
                }
                (t, p) => return Err(SyntaxError { pos: p, message: format!("expected `,`, `|` or `]`, found {t}") }),
            }
        }
    }
}

/// Split a grammar source into statements.
pub fn parse_statements(src: &str) -> Result<Vec<Statement>, SyntaxError> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let mut out = Vec::new();
    while *p.peek() != Tok::Eof {
        out.push(p.statement()?);
    }
    Ok(out)
}

/// Parse a single description, optionally terminated by `.`.
pub fn parse_raw_description(src: &str) -> Result<RawDesc, SyntaxError> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let d = p.disj()?;
    if *p.peek() == Tok::Dot {
        p.next();
    }
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after description", p.peek()));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicolon_binds_looser_than_comma() {
        let d = parse_raw_description("a, f:b ; c").unwrap();
        match d {
            RawDesc::Disj(parts) => {
                assert_eq!(parts.len(), 2);
                assert!(matches!(&parts[0], RawDesc::Conj(c) if c.len() == 2));
                assert!(matches!(&parts[1], RawDesc::Type(t, _) if t == "c"));
            }
            other => panic!("unexpected parse {other:?}"),
        }
    }

    #[test]
    fn uppercase_before_colon_is_a_feature() {
        let d = parse_raw_description("HD:a").unwrap();
        assert!(matches!(d, RawDesc::Feat(f, _, _) if f == "HD"));
    }

    #[test]
    fn binding_and_tags() {
        let d = parse_raw_description("#1=(ne_list, hd:a, tl:#1)").unwrap();
        let RawDesc::Conj(parts) = d else { panic!() };
        assert!(matches!(&parts[0], RawDesc::Var(v, _) if v == "#1"));
    }

    #[test]
    fn list_with_tail() {
        let d = parse_raw_description("[a, b | T]").unwrap();
        assert!(matches!(d, RawDesc::List(items, Some(_), _) if items.len() == 2));
        let d = parse_raw_description("[]").unwrap();
        assert!(matches!(d, RawDesc::List(items, None, _) if items.is_empty()));
    }

    #[test]
    fn statements_and_comments() {
        let src = "% signature\ntype top sub [a].\na sub [b, c] intro [f:top, G:top].\n\
                   a => (f:X, g:X).\norder_types [c, b].\norder_feats a [g, f].\nb.\n";
        let stmts = parse_statements(src).unwrap();
        assert_eq!(stmts.len(), 6);
        assert!(matches!(&stmts[1], Statement::TypeDecl { name, subs, intro, .. }
            if name == "a" && subs.len() == 2 && intro.len() == 2));
        assert!(matches!(&stmts[2], Statement::Constraint { antecedent, .. } if antecedent == "a"));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_statements("type top sub [a].\na => (f:X.\n").unwrap_err();
        assert_eq!(err.pos.line, 2);
        let err = parse_statements("type top sub [a] $").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 18 });
    }
}
