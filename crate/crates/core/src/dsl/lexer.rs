//! Tokenizer for `.ciot` model files.

use crate::diag::{codes, Diagnostic};
use crate::model::Loc;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    /// Unsigned integer literal, kept as text so callers choose the width.
    Int(String),
    /// Unsigned decimal literal (`digits.digits`).
    Float(String),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Semi,
    Comma,
    Dot,
    Arrow,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl Tok {
    /// How the token is named in "expected X, found Y" messages.
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(s) | Tok::Float(s) => format!("number `{s}`"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::Eof => "end of file".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Arrow => "->",
            Tok::Assign => "=",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            _ => "?",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub loc: Loc,
}

/// Splits `text` into tokens. Lexical errors are reported and the offending
/// character skipped, so the token stream is always complete and ends in
/// [`Tok::Eof`].
pub fn tokenize(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut lexer = Lexer { chars: text.chars().collect(), pos: 0, line: 1, column: 1 };
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    loop {
        lexer.skip_trivia(&mut diags);
        let loc = lexer.loc();
        let Some(c) = lexer.peek() else {
            tokens.push(Token { tok: Tok::Eof, loc });
            break;
        };
        match lexer.token(c) {
            Ok(tok) => tokens.push(Token { tok, loc }),
            Err(msg) => diags.push(Diagnostic::error(codes::E_LEX, loc, msg)),
        }
    }
    (tokens, diags)
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    column: u32,
}

impl Lexer {
    fn loc(&self) -> Loc {
        Loc::new(self.line, self.column)
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
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self, diags: &mut Vec<Diagnostic>) {
        loop {
            match (self.peek(), self.peek_at(1)) {
                (Some(c), _) if c.is_whitespace() => {
                    self.bump();
                }
                (Some('/'), Some('/')) => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                (Some('/'), Some('*')) => {
                    let loc = self.loc();
                    self.bump();
                    self.bump();
                    loop {
                        match (self.peek(), self.peek_at(1)) {
                            (Some('*'), Some('/')) => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            (Some(_), _) => {
                                self.bump();
                            }
                            (None, _) => {
                                diags.push(Diagnostic::error(codes::E_LEX, loc, "unterminated block comment"));
                                break;
                            }
                        }
                    }
                }
                _ => break,
            }
        }
    }

    fn token(&mut self, c: char) -> Result<Tok, String> {
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
                s.push(c);
                self.bump();
            }
            return Ok(Tok::Ident(s));
        }
        if c.is_ascii_digit() {
            return self.number();
        }
        if c == '"' {
            return self.string();
        }
        self.bump();
        let two = |lexer: &mut Lexer, next: char, yes: Tok, no: Tok| {
            if lexer.peek() == Some(next) {
                lexer.bump();
                yes
            } else {
                no
            }
        };
        Ok(match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ':' => Tok::Colon,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '-' => two(self, '>', Tok::Arrow, Tok::Minus),
            '=' => two(self, '=', Tok::EqEq, Tok::Assign),
            '<' => two(self, '=', Tok::Le, Tok::Lt),
            '>' => two(self, '=', Tok::Ge, Tok::Gt),
            '!' => {
                if self.peek() == Some('=') {
                    self.bump();
                    Tok::NotEq
                } else {
                    return Err("unexpected character `!` (use `not` for negation)".into());
                }
            }
            other => return Err(format!("unexpected character `{}`", other.escape_debug())),
        })
    }

    fn number(&mut self) -> Result<Tok, String> {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
        let is_float = self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit());
        if is_float {
            s.push('.');
            self.bump();
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                s.push(c);
                self.bump();
            }
        }
        if self.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
            // `1e5`, `12abc`: scientific notation and glued identifiers are not literals.
            let mut bad = s.clone();
            while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
                bad.push(c);
                self.bump();
            }
            return Err(format!("malformed number `{bad}`"));
        }
        Ok(if is_float { Tok::Float(s) } else { Tok::Int(s) })
    }

    fn string(&mut self) -> Result<Tok, String> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err("unterminated string literal".into()),
                Some('"') => return Ok(Tok::Str(s)),
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('"') => s.push('"'),
                    Some('\\') => s.push('\\'),
                    Some(c) => return Err(format!("unknown escape `\\{c}`")),
                    None => return Err("unterminated string literal".into()),
                },
                Some(c) => s.push(c),
            }
        }
    }
}
