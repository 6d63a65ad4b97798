//! Conformance checker for the ThingML subset the generator emits.
//!
//! The accepted language is the one in `docs/thingml-subset.ebnf`. On
//! success the checker returns an outline of the declarations it saw, which
//! lets tests compare emitted structure with the source model.

use std::fmt;

use thiserror::Error;

use super::names::RESERVED;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct CheckError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outline {
    pub imports: Vec<String>,
    pub datatypes: Vec<String>,
    pub objects: Vec<String>,
    pub fragments: Vec<FragmentOutline>,
    pub things: Vec<ThingOutline>,
    pub configurations: Vec<ConfigOutline>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FragmentOutline {
    pub name: String,
    pub messages: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ThingOutline {
    pub name: String,
    pub includes: Vec<String>,
    pub properties: Vec<String>,
    pub ports: Vec<PortOutline>,
    pub functions: Vec<String>,
    pub statechart: Option<StatechartOutline>,
}

impl ThingOutline {
    pub fn port(&self, name: &str) -> Option<&PortOutline> {
        self.ports.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PortOutline {
    pub name: String,
    pub provided: bool,
    pub sends: Vec<String>,
    pub receives: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StatechartOutline {
    pub name: String,
    pub initial: String,
    pub states: Vec<StateOutline>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StateOutline {
    pub name: String,
    pub has_entry: bool,
    pub has_exit: bool,
    pub internals: usize,
    /// Target state of each transition, in order.
    pub transitions: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigOutline {
    pub name: String,
    /// `(instance, thing)`
    pub instances: Vec<(String, String)>,
    pub connectors: Vec<Connector>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Connector {
    pub client: (String, String),
    pub server: (String, String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int,
    Float,
    Str(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int => f.write_str("integer"),
            Tok::Float => f.write_str("number"),
            Tok::Str(_) => f.write_str("string"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const SYMBOLS: &[&str] = &[
    "->", "=>", "==", "!=", "<=", ">=", "{", "}", "(", ")", "<", ">", "=", ",", ":", ";", ".", "!", "?", "@", "+", "-",
    "*", "/", "%",
];

fn err(line: u32, column: u32, message: impl Into<String>) -> CheckError {
    CheckError { line, column, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<(Tok, u32, u32)>, CheckError> {
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let mut toks = Vec::new();
    let advance = |i: &mut usize, line: &mut u32, col: &mut u32, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let (l, cl) = (line, col);
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            advance(&mut i, &mut line, &mut col, 2);
            loop {
                if i >= chars.len() {
                    return Err(err(l, cl, "unterminated comment"));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    advance(&mut i, &mut line, &mut col, 2);
                    break;
                }
                advance(&mut i, &mut line, &mut col, 1);
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut line, &mut col, 1);
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), l, cl));
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let mut tok = Tok::Int;
            if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(char::is_ascii_digit) {
                advance(&mut i, &mut line, &mut col, 1);
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance(&mut i, &mut line, &mut col, 1);
                }
                tok = Tok::Float;
            }
            if i < chars.len() && (chars[i].is_ascii_alphabetic() || chars[i] == '_') {
                return Err(err(line, col, "malformed number"));
            }
            toks.push((tok, l, cl));
        } else if c == '"' {
            advance(&mut i, &mut line, &mut col, 1);
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(err(l, cl, "unterminated string")),
                    Some('"') => {
                        advance(&mut i, &mut line, &mut col, 1);
                        break;
                    }
                    Some('\\') => {
                        let esc = match chars.get(i + 1) {
                            Some('"') => '"',
                            Some('\\') => '\\',
                            Some('n') => '\n',
                            Some('t') => '\t',
                            _ => return Err(err(line, col, "invalid escape")),
                        };
                        s.push(esc);
                        advance(&mut i, &mut line, &mut col, 2);
                    }
                    Some(&ch) => {
                        s.push(ch);
                        advance(&mut i, &mut line, &mut col, 1);
                    }
                }
            }
            toks.push((Tok::Str(s), l, cl));
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) else {
                return Err(err(l, cl, format!("unexpected character `{c}`")));
            };
            advance(&mut i, &mut line, &mut col, sym.len());
            toks.push((Tok::Sym(sym), l, cl));
        }
    }
    toks.push((Tok::Eof, line, col));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, u32, u32)>,
    pos: usize,
}

type R<T> = Result<T, CheckError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn fail<T>(&self, expected: &str) -> R<T> {
        let (tok, line, col) = &self.toks[self.pos];
        Err(err(*line, *col, format!("expected {expected}, found {tok}")))
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn at_sym(&self, sym: &str) -> bool {
        matches!(self.peek(), Tok::Sym(s) if *s == sym)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        let hit = self.at_kw(kw);
        if hit {
            self.bump();
        }
        hit
    }

    fn eat_sym(&mut self, sym: &str) -> bool {
        let hit = self.at_sym(sym);
        if hit {
            self.bump();
        }
        hit
    }

    fn kw(&mut self, kw: &str) -> R<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.fail(&format!("`{kw}`"))
        }
    }

    fn sym(&mut self, sym: &str) -> R<()> {
        if self.eat_sym(sym) {
            Ok(())
        } else {
            self.fail(&format!("`{sym}`"))
        }
    }

    fn ident(&mut self) -> R<String> {
        match self.peek() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.fail("identifier"),
        }
    }

    fn string(&mut self) -> R<String> {
        match self.bump() {
            Tok::Str(s) => Ok(s),
            _ => {
                self.pos -= 1;
                self.fail("string")
            }
        }
    }

    fn ident_list(&mut self) -> R<Vec<String>> {
        let mut out = vec![self.ident()?];
        while self.eat_sym(",") {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn unit(&mut self) -> R<Outline> {
        let mut o = Outline::default();
        while self.eat_kw("import") {
            o.imports.push(self.string()?);
        }
        loop {
            if self.eat_kw("datatype") {
                o.datatypes.push(self.ident()?);
                self.sym("<")?;
                if self.bump() != Tok::Int {
                    self.pos -= 1;
                    return self.fail("integer");
                }
                self.sym(">")?;
                self.annotations()?;
                self.sym(";")?;
            } else if self.eat_kw("object") {
                o.objects.push(self.ident()?);
                self.annotations()?;
                self.sym(";")?;
            } else if self.eat_kw("thing") {
                if self.eat_kw("fragment") {
                    o.fragments.push(self.fragment()?);
                } else {
                    o.things.push(self.thing()?);
                }
            } else if self.eat_kw("configuration") {
                o.configurations.push(self.configuration()?);
            } else if *self.peek() == Tok::Eof {
                return Ok(o);
            } else {
                return self.fail("declaration");
            }
        }
    }

    fn annotations(&mut self) -> R<()> {
        while self.eat_sym("@") {
            self.ident()?;
            self.string()?;
        }
        Ok(())
    }

    fn params(&mut self) -> R<()> {
        self.sym("(")?;
        if !self.at_sym(")") {
            loop {
                self.ident()?;
                self.sym(":")?;
                self.ident()?;
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.sym(")")
    }

    fn fragment(&mut self) -> R<FragmentOutline> {
        let mut f = FragmentOutline { name: self.ident()?, ..Default::default() };
        self.sym("{")?;
        while self.eat_kw("message") {
            f.messages.push(self.ident()?);
            self.params()?;
            self.sym(";")?;
        }
        self.sym("}")?;
        Ok(f)
    }

    fn thing(&mut self) -> R<ThingOutline> {
        let mut t = ThingOutline { name: self.ident()?, ..Default::default() };
        if self.eat_kw("includes") {
            t.includes = self.ident_list()?;
        }
        self.sym("{")?;
        loop {
            if self.eat_kw("property") {
                t.properties.push(self.ident()?);
                self.sym(":")?;
                self.ident()?;
                if self.eat_sym("=") {
                    self.expr()?;
                }
            } else if self.at_kw("provided") || self.at_kw("required") {
                let provided = self.at_kw("provided");
                self.bump();
                self.kw("port")?;
                let mut p = PortOutline { name: self.ident()?, provided, ..Default::default() };
                self.sym("{")?;
                if self.eat_kw("sends") {
                    p.sends = self.ident_list()?;
                }
                if self.eat_kw("receives") {
                    p.receives = self.ident_list()?;
                }
                self.sym("}")?;
                t.ports.push(p);
            } else if self.eat_kw("function") {
                t.functions.push(self.ident()?);
                self.params()?;
                if self.eat_sym(":") {
                    self.ident()?;
                }
                self.block()?;
            } else if self.at_kw("statechart") {
                if t.statechart.is_some() {
                    return self.fail("at most one statechart");
                }
                self.bump();
                t.statechart = Some(self.statechart()?);
            } else {
                break;
            }
        }
        self.sym("}")?;
        Ok(t)
    }

    fn block(&mut self) -> R<()> {
        self.kw("do")?;
        while !self.eat_kw("end") {
            self.ident()?;
            if self.eat_sym("!") {
                self.ident()?;
                self.sym("(")?;
                if !self.at_sym(")") {
                    self.expr()?;
                    while self.eat_sym(",") {
                        self.expr()?;
                    }
                }
                self.sym(")")?;
            } else if self.eat_sym("=") {
                self.expr()?;
            } else {
                return self.fail("`!` or `=`");
            }
        }
        Ok(())
    }

    fn statechart(&mut self) -> R<StatechartOutline> {
        let mut sc = StatechartOutline { name: self.ident()?, ..Default::default() };
        self.kw("init")?;
        let (_, line, col) = self.toks[self.pos].clone();
        sc.initial = self.ident()?;
        self.sym("{")?;
        let mut targets = Vec::new();
        while self.eat_kw("state") {
            let mut st = StateOutline { name: self.ident()?, ..Default::default() };
            self.sym("{")?;
            if self.at_kw("on") && matches!(&self.toks[self.pos + 1].0, Tok::Ident(s) if s == "entry") {
                self.pos += 2;
                self.block()?;
                st.has_entry = true;
            }
            if self.eat_kw("on") {
                self.kw("exit")?;
                self.block()?;
                st.has_exit = true;
            }
            while self.eat_kw("internal") {
                self.kw("action")?;
                self.block()?;
                st.internals += 1;
            }
            while self.eat_kw("transition") {
                self.sym("->")?;
                let at = self.toks[self.pos].clone();
                let target = self.ident()?;
                targets.push((target.clone(), at.1, at.2));
                st.transitions.push(target);
                if self.eat_kw("event") {
                    self.ident()?;
                    self.sym(":")?;
                    self.ident()?;
                    self.sym("?")?;
                    self.ident()?;
                }
                if self.eat_kw("guard") {
                    self.sym("(")?;
                    self.expr()?;
                    self.sym(")")?;
                }
                if self.eat_kw("action") {
                    self.block()?;
                }
            }
            self.sym("}")?;
            sc.states.push(st);
        }
        self.sym("}")?;
        let declared = |n: &str| sc.states.iter().any(|s| s.name == n);
        if !declared(&sc.initial) {
            return Err(err(line, col, format!("initial state {} is not declared", sc.initial)));
        }
        if let Some((t, l, c)) = targets.iter().find(|(t, _, _)| !declared(t)) {
            return Err(err(*l, *c, format!("transition target {t} is not declared")));
        }
        Ok(sc)
    }

    fn configuration(&mut self) -> R<ConfigOutline> {
        let mut c = ConfigOutline { name: self.ident()?, ..Default::default() };
        self.sym("{")?;
        while self.eat_kw("instance") {
            let name = self.ident()?;
            self.sym(":")?;
            c.instances.push((name, self.ident()?));
        }
        while self.eat_kw("connector") {
            let client = (self.ident()?, {
                self.sym(".")?;
                self.ident()?
            });
            self.sym("=>")?;
            let server = (self.ident()?, {
                self.sym(".")?;
                self.ident()?
            });
            c.connectors.push(Connector { client, server });
        }
        self.sym("}")?;
        Ok(c)
    }

    fn expr(&mut self) -> R<()> {
        self.binary(0)
    }

    fn binary(&mut self, level: usize) -> R<()> {
        const LEVELS: &[&[&str]] =
            &[&["or"], &["and"], &["==", "!="], &["<", "<=", ">", ">="], &["+", "-"], &["*", "/", "%"]];
        if level == LEVELS.len() {
            return self.unary();
        }
        self.binary(level + 1)?;
        while LEVELS[level].iter().any(|op| self.at_sym(op) || self.at_kw(op)) {
            self.bump();
            self.binary(level + 1)?;
        }
        Ok(())
    }

    fn unary(&mut self) -> R<()> {
        if self.eat_kw("not") || self.eat_sym("-") {
            return self.unary();
        }
        match self.peek() {
            Tok::Int | Tok::Float | Tok::Str(_) => {
                self.bump();
                Ok(())
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(())
            }
            Tok::Sym("(") => {
                self.bump();
                self.expr()?;
                self.sym(")")
            }
            _ => {
                self.ident()?;
                if self.eat_sym(".") {
                    self.ident()?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `text` as one ThingML unit of the supported subset.
pub fn check(text: &str) -> Result<Outline, CheckError> {
    let toks = lex(text)?;
    Parser { toks, pos: 0 }.unit()
}
