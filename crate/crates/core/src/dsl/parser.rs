//! Recursive-descent parser for `.ciot` model files.
//!
//! The grammar is keyword driven and newline insensitive; `docs/grammar.ebnf`
//! is the normative description. Errors inside a top-level declaration skip
//! that declaration and parsing resumes with the next one, so one pass
//! reports independent mistakes together.

use crate::diag::{codes, Diagnostic};
use crate::dsl::lexer::{tokenize, Tok, Token};
use crate::model::*;

/// A model source: where it came from and what it says.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub path: String,
    pub text: String,
}

impl SourceFile {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> Self {
        SourceFile { path: path.into(), text: text.into() }
    }
}

/// Parses a model. On failure every error found is returned and no model is
/// produced.
pub fn parse_model(source: &SourceFile) -> Result<Model, Vec<Diagnostic>> {
    parse_str(&source.text)
}

pub fn parse_str(text: &str) -> Result<Model, Vec<Diagnostic>> {
    let (tokens, mut diags) = tokenize(text);
    let mut parser = Parser { tokens, pos: 0, diags: Vec::new() };
    let model = parser.file();
    diags.append(&mut parser.diags);
    match model {
        Some(model) if diags.is_empty() => Ok(model),
        _ => {
            if diags.is_empty() {
                diags.push(Diagnostic::error(codes::E_SYNTAX, Loc::default(), "malformed model"));
            }
            diags.sort_by_key(|d| (d.line, d.column));
            Err(diags)
        }
    }
}

type PResult<T> = Result<T, Diagnostic>;

const TOP_LEVEL: &[&str] =
    &["payload", "interface", "power", "element", "board", "entity", "processor", "allocate", "rt"];

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn loc(&self) -> Loc {
        self.tokens[self.pos].loc
    }

    fn bump(&mut self) -> &Token {
        let tok = &self.tokens[self.pos];
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        Diagnostic::error(codes::E_SYNTAX, self.loc(), format!("expected {expected}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Loc)> {
        let loc = self.loc();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, loc))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn name(&mut self, what: &str) -> PResult<String> {
        self.ident(what).map(|(s, _)| s)
    }

    fn skip_semi(&mut self) {
        while self.eat(&Tok::Semi) {}
    }

    fn file(&mut self) -> Option<Model> {
        if self.at_kw("dsl") && self.peek_at(1) == &Tok::Minus {
            let loc = self.loc();
            self.bump();
            self.bump();
            let header = self.expect_kw("version").and_then(|_| self.int("version number"));
            match header {
                Ok(1) => {}
                Ok(v) => self.diags.push(Diagnostic::error(
                    codes::E_VERSION,
                    loc,
                    format!("unsupported dsl-version {v} (supported: 1)"),
                )),
                Err(d) => {
                    self.diags.push(d);
                    return None;
                }
            }
        }
        let header = (|| {
            let loc = self.loc();
            self.expect_kw("system")?;
            let name = self.name("system name")?;
            self.expect(Tok::LBrace, "`{`")?;
            Ok::<_, Diagnostic>((name, loc))
        })();
        let (name, loc) = match header {
            Ok(h) => h,
            Err(d) => {
                self.diags.push(d);
                return None;
            }
        };
        let mut model = Model::new(name);
        model.loc = loc;
        loop {
            match self.peek() {
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                Tok::Eof => {
                    self.diags.push(self.unexpected("`}` closing the system"));
                    return None;
                }
                _ => {}
            }
            let start = self.pos;
            if let Err(d) = self.declaration(&mut model) {
                self.diags.push(d);
                self.recover(start);
            }
        }
        if self.peek() != &Tok::Eof {
            self.diags.push(self.unexpected("end of file after the system block"));
        }
        Some(model)
    }

    /// Skips the declaration that began at token `start`: through its
    /// balanced brace block, or up to the next top-level keyword for
    /// brace-less declarations.
    fn recover(&mut self, start: usize) {
        let mut idx = start;
        let mut depth = 0usize;
        loop {
            let tok = &self.tokens[idx].tok;
            match tok {
                Tok::Eof => break,
                Tok::LBrace => depth += 1,
                Tok::RBrace => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                    if depth == 0 {
                        idx += 1;
                        break;
                    }
                }
                Tok::Ident(kw) if depth == 0 && idx > start && TOP_LEVEL.contains(&kw.as_str()) => {
                    let after_power = matches!(&self.tokens[idx - 1].tok, Tok::Ident(p) if p == "power");
                    if !after_power {
                        break;
                    }
                }
                _ => {}
            }
            idx += 1;
        }
        // Always make progress.
        self.pos = idx.max(start + 1).min(self.tokens.len() - 1);
    }

    fn declaration(&mut self, model: &mut Model) -> PResult<()> {
        let loc = self.loc();
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.unexpected("a declaration")),
        };
        match kw.as_str() {
            "payload" => {
                let p = self.payload(loc)?;
                model.payloads.push(p);
            }
            "interface" => {
                let i = self.interface(loc)?;
                model.interfaces.push(i);
            }
            "power" | "element" | "board" | "entity" => {
                let c = self.component(loc)?;
                model.push_component(c);
            }
            "processor" => {
                let p = self.processor(loc)?;
                model.hardware.processors.push(p);
            }
            "allocate" => {
                let a = self.allocation(loc)?;
                model.allocations.push(a);
            }
            "rt" => {
                let r = self.rt(loc)?;
                model.rt_annotations.push(r);
            }
            _ => return Err(self.unexpected("a declaration")),
        }
        Ok(())
    }

    fn sem_type(&mut self) -> PResult<SemType> {
        let name = self.name("a type")?;
        Ok(match name.as_str() {
            "int" => SemType::Int,
            "float" => SemType::Float,
            "bool" => SemType::Bool,
            "string" => SemType::String,
            _ => SemType::Payload(name),
        })
    }

    fn field(&mut self) -> PResult<Field> {
        let (name, loc) = self.ident("a field name")?;
        self.expect(Tok::Colon, "`:`")?;
        let ty = self.sem_type()?;
        Ok(Field { name, ty, loc })
    }

    fn payload(&mut self, loc: Loc) -> PResult<Payload> {
        self.expect_kw("payload")?;
        let name = self.name("payload name")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut attributes = Vec::new();
        while !self.eat(&Tok::RBrace) {
            attributes.push(self.field()?);
            if !(self.eat(&Tok::Comma) || self.eat(&Tok::Semi)) {
                self.expect(Tok::RBrace, "`,` or `}`")?;
                break;
            }
        }
        Ok(Payload { name, attributes, loc })
    }

    fn interface(&mut self, loc: Loc) -> PResult<Interface> {
        self.expect_kw("interface")?;
        let name = self.name("interface name")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut operations = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let op_loc = self.loc();
            self.expect_kw("op")?;
            let op_name = self.name("operation name")?;
            self.expect(Tok::LParen, "`(`")?;
            let mut params = Vec::new();
            if !self.eat(&Tok::RParen) {
                loop {
                    params.push(self.field()?);
                    if self.eat(&Tok::Comma) {
                        continue;
                    }
                    self.expect(Tok::RParen, "`,` or `)`")?;
                    break;
                }
            }
            let return_type = if self.eat(&Tok::Arrow) { Some(self.sem_type()?) } else { None };
            self.skip_semi();
            operations.push(Operation { name: op_name, params, return_type, loc: op_loc });
        }
        Ok(Interface { name, operations, loc })
    }

    fn component(&mut self, loc: Loc) -> PResult<Component> {
        let power_source = self.eat_kw("power");
        let kind = match self.peek() {
            Tok::Ident(s) if s == "element" => ComponentKind::Element,
            Tok::Ident(s) if s == "board" && !power_source => ComponentKind::Board,
            Tok::Ident(s) if s == "entity" && !power_source => ComponentKind::Entity,
            _ if power_source => return Err(self.unexpected("`element` after `power`")),
            _ => return Err(self.unexpected("`element`, `board` or `entity`")),
        };
        self.bump();
        let name = self.name("component name")?;
        let mut component = Component::new(name, kind);
        component.power_source = power_source;
        component.loc = loc;
        self.expect(Tok::LBrace, "`{`")?;
        while !self.eat(&Tok::RBrace) {
            self.member(&mut component)?;
            self.skip_semi();
        }
        Ok(component)
    }

    fn member(&mut self, component: &mut Component) -> PResult<()> {
        let loc = self.loc();
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.unexpected("a component member")),
        };
        match kw.as_str() {
            "property" => {
                self.bump();
                let name = self.name("property name")?;
                self.expect(Tok::Colon, "`:`")?;
                let ty = self.sem_type()?;
                let init = if self.eat(&Tok::Assign) { Some(self.literal()?) } else { None };
                component.properties.push(Property { name, ty, init, loc });
            }
            "provides" | "requires" | "bidir" => {
                self.bump();
                let direction = match kw.as_str() {
                    "provides" => PortDirection::Provided,
                    "requires" => PortDirection::Required,
                    _ => PortDirection::Bidirectional,
                };
                self.expect_kw("port")?;
                let name = self.name("port name")?;
                self.expect(Tok::Colon, "`:`")?;
                let interface = self.name("interface name")?;
                component.ports.push(Port { name, direction, interface, loc });
            }
            "part" => {
                self.bump();
                let name = self.name("part name")?;
                self.expect(Tok::Colon, "`:`")?;
                let ty = self.name("component type")?;
                component.parts.push(Part { name, component: ty, loc });
            }
            "connect" => {
                self.bump();
                let from = self.port_ref()?;
                self.expect(Tok::Arrow, "`->`")?;
                let to = self.port_ref()?;
                component.connections.push(Connection { from, to, loc });
            }
            "statemachine" => {
                if component.statemachine.is_some() {
                    return Err(Diagnostic::error(
                        codes::E_SYNTAX,
                        loc,
                        format!("component {} declares a second statemachine", component.name),
                    ));
                }
                self.bump();
                component.statemachine = Some(self.statemachine(loc)?);
            }
            _ => return Err(self.unexpected("a component member")),
        }
        Ok(())
    }

    fn port_ref(&mut self) -> PResult<PortRef> {
        let first = self.name("port or part name")?;
        if self.eat(&Tok::Dot) {
            let port = self.name("port name")?;
            Ok(PortRef::of_part(first, port))
        } else {
            Ok(PortRef::own(first))
        }
    }

    fn statemachine(&mut self, loc: Loc) -> PResult<StateMachine> {
        let mut sm =
            StateMachine { states: Vec::new(), transitions: Vec::new(), events: Vec::new(), actions: Vec::new(), loc };
        self.expect(Tok::LBrace, "`{`")?;
        while !self.eat(&Tok::RBrace) {
            let loc = self.loc();
            let kw = match self.peek() {
                Tok::Ident(s) => s.clone(),
                _ => return Err(self.unexpected("a statemachine item")),
            };
            match kw.as_str() {
                "initial" | "state" => sm.states.push(self.state(loc)?),
                "transition" => {
                    self.bump();
                    let source = self.name("source state")?;
                    self.expect(Tok::Arrow, "`->`")?;
                    let target = self.name("target state")?;
                    let trigger = if self.eat_kw("on") { Some(self.name("event name")?) } else { None };
                    let guard = if self.eat(&Tok::LBracket) {
                        let e = self.expr()?;
                        self.expect(Tok::RBracket, "`]`")?;
                        Some(e)
                    } else {
                        None
                    };
                    sm.transitions.push(Transition { source, target, trigger, guard, loc });
                }
                "event" => {
                    self.bump();
                    let name = self.name("event name")?;
                    let kind = match self.name("`incoming`, `outgoing` or `generic`")?.as_str() {
                        "incoming" => EventKind::Incoming,
                        "outgoing" => EventKind::Outgoing,
                        "generic" => EventKind::Generic,
                        other => {
                            return Err(Diagnostic::error(
                                codes::E_SYNTAX,
                                loc,
                                format!("unknown event kind `{other}`"),
                            ))
                        }
                    };
                    let port = if self.eat_kw("via") { Some(self.name("port name")?) } else { None };
                    self.expect_kw("does")?;
                    let action = self.name("action name")?;
                    sm.events.push(Event { name, kind, port, action, loc });
                }
                "action" => {
                    self.bump();
                    let name = self.name("action name")?;
                    let kind = if self.eat_kw("send") {
                        ActionKind::Send { payload: self.name("payload name")? }
                    } else if self.eat_kw("receive") {
                        ActionKind::Receive { payload: self.name("payload name")? }
                    } else if self.eat_kw("set") {
                        let property = self.name("property name")?;
                        self.expect(Tok::Assign, "`=`")?;
                        ActionKind::Assign { property, value: self.expr()? }
                    } else {
                        return Err(self.unexpected("`send`, `receive` or `set`"));
                    };
                    sm.actions.push(Action { name, kind, loc });
                }
                _ => return Err(self.unexpected("`state`, `transition`, `event` or `action`")),
            }
            self.skip_semi();
        }
        Ok(sm)
    }

    fn state(&mut self, loc: Loc) -> PResult<State> {
        let initial = self.eat_kw("initial");
        self.expect_kw("state")?;
        let name = self.name("state name")?;
        let mut state = State { name, initial, on_entry: None, on_exit: None, internal_events: Vec::new(), loc };
        self.expect(Tok::LBrace, "`{`")?;
        while !self.eat(&Tok::RBrace) {
            let kw_loc = self.loc();
            if self.eat_kw("entry") {
                let ev = self.name("event name")?;
                if state.on_entry.replace(ev).is_some() {
                    return Err(Diagnostic::error(codes::E_SYNTAX, kw_loc, "duplicate `entry` clause"));
                }
            } else if self.eat_kw("exit") {
                let ev = self.name("event name")?;
                if state.on_exit.replace(ev).is_some() {
                    return Err(Diagnostic::error(codes::E_SYNTAX, kw_loc, "duplicate `exit` clause"));
                }
            } else if self.eat_kw("internal") {
                loop {
                    match self.peek() {
                        Tok::Ident(s) if !matches!(s.as_str(), "entry" | "exit" | "internal") => {
                            let ev = self.name("event name")?;
                            state.internal_events.push(ev);
                            self.eat(&Tok::Comma);
                        }
                        _ => break,
                    }
                }
            } else {
                return Err(self.unexpected("`entry`, `exit`, `internal` or `}`"));
            }
            self.skip_semi();
        }
        Ok(state)
    }

    fn processor(&mut self, loc: Loc) -> PResult<Processor> {
        self.expect_kw("processor")?;
        let name = self.name("processor name")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut cores = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let core_loc = self.loc();
            self.expect_kw("core")?;
            let core = self.name("core name")?;
            cores.push(Core { name: core, loc: core_loc });
            self.skip_semi();
        }
        Ok(Processor { name, cores, loc })
    }

    fn path(&mut self, what: &str) -> PResult<String> {
        let mut path = self.name(what)?;
        while self.eat(&Tok::Dot) {
            path.push('.');
            path.push_str(&self.name("path segment")?);
        }
        Ok(path)
    }

    fn allocation(&mut self, loc: Loc) -> PResult<Allocation> {
        self.expect_kw("allocate")?;
        let instance = self.path("instance path")?;
        self.expect(Tok::Arrow, "`->`")?;
        let processor = self.name("processor name")?;
        self.expect(Tok::Dot, "`.` between processor and core")?;
        let core = self.name("core name")?;
        self.skip_semi();
        Ok(Allocation { instance, core: CoreRef { processor, core }, loc })
    }

    fn rt(&mut self, loc: Loc) -> PResult<RtAnnotation> {
        self.expect_kw("rt")?;
        let target = self.path("operation path")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut pattern = None;
        let mut wcet = None;
        let mut deadline = None;
        let mut priority = None;
        while !self.eat(&Tok::RBrace) {
            let item_loc = self.loc();
            let (kw, _) = self.ident("`periodic`, `sporadic`, `wcet`, `deadline` or `priority`")?;
            let dup =
                |what: &str| Diagnostic::error(codes::E_SYNTAX, item_loc, format!("duplicate `{what}` in rt block"));
            match kw.as_str() {
                "periodic" | "sporadic" => {
                    let t = self.duration()?;
                    let p = if kw == "periodic" { ArrivalPattern::Periodic(t) } else { ArrivalPattern::Sporadic(t) };
                    if pattern.replace(p).is_some() {
                        return Err(dup("periodic/sporadic"));
                    }
                }
                "wcet" => {
                    if wcet.replace(self.duration()?).is_some() {
                        return Err(dup("wcet"));
                    }
                }
                "deadline" => {
                    if deadline.replace(self.duration()?).is_some() {
                        return Err(dup("deadline"));
                    }
                }
                "priority" => {
                    let p = self.int("priority")?;
                    let p = u32::try_from(p)
                        .map_err(|_| Diagnostic::error(codes::E_SYNTAX, item_loc, "priority out of range"))?;
                    if priority.replace(p).is_some() {
                        return Err(dup("priority"));
                    }
                }
                other => {
                    return Err(Diagnostic::error(codes::E_SYNTAX, item_loc, format!("unknown rt property `{other}`")))
                }
            }
            self.skip_semi();
        }
        let missing =
            |what: &str| Diagnostic::error(codes::E_SYNTAX, loc, format!("rt block for {target} lacks `{what}`"));
        Ok(RtAnnotation {
            pattern: pattern.ok_or_else(|| missing("periodic` or `sporadic"))?,
            wcet: wcet.ok_or_else(|| missing("wcet"))?,
            deadline: deadline.ok_or_else(|| missing("deadline"))?,
            priority: priority.ok_or_else(|| missing("priority"))?,
            target,
            loc,
        })
    }

    fn int(&mut self, what: &str) -> PResult<i64> {
        let loc = self.loc();
        match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                s.parse().map_err(|_| Diagnostic::error(codes::E_SYNTAX, loc, format!("integer `{s}` out of range")))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// `<number> ms`, stored in microseconds.
    fn duration(&mut self) -> PResult<Micros> {
        let loc = self.loc();
        let text = match self.peek().clone() {
            Tok::Int(s) | Tok::Float(s) => {
                self.bump();
                s
            }
            _ => return Err(self.unexpected("a duration such as `200 ms`")),
        };
        if !self.eat_kw("ms") {
            return Err(self.unexpected("the unit `ms`"));
        }
        let (whole, frac) = text.split_once('.').unwrap_or((&text, ""));
        let bad = |msg: &str| Diagnostic::error(codes::E_SYNTAX, loc, format!("duration `{text} ms`: {msg}"));
        if frac.len() > 3 {
            return Err(bad("finer than one microsecond"));
        }
        let whole: u64 = whole.parse().map_err(|_| bad("out of range"))?;
        let frac_us: u64 = format!("{frac:0<3}").parse().map_err(|_| bad("malformed"))?;
        whole.checked_mul(1000).and_then(|w| w.checked_add(frac_us)).map(Micros).ok_or_else(|| bad("out of range"))
    }

    fn literal(&mut self) -> PResult<Literal> {
        let loc = self.loc();
        let negative = self.eat(&Tok::Minus);
        let lit =
            match self.peek().clone() {
                Tok::Int(s) => {
                    self.bump();
                    let text = if negative { format!("-{s}") } else { s };
                    Literal::Int(text.parse().map_err(|_| {
                        Diagnostic::error(codes::E_SYNTAX, loc, format!("integer `{text}` out of range"))
                    })?)
                }
                Tok::Float(s) => {
                    self.bump();
                    let v: f64 = s
                        .parse()
                        .map_err(|_| Diagnostic::error(codes::E_SYNTAX, loc, format!("malformed number `{s}`")))?;
                    Literal::Float(if negative { -v } else { v })
                }
                Tok::Str(s) if !negative => {
                    self.bump();
                    Literal::Str(s)
                }
                Tok::Ident(s) if !negative && (s == "true" || s == "false") => {
                    self.bump();
                    Literal::Bool(s == "true")
                }
                _ => return Err(self.unexpected("a literal")),
            };
        Ok(lit)
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Ident(s) if s == "or" => BinOp::Or,
            Tok::Ident(s) if s == "and" => BinOp::And,
            Tok::EqEq | Tok::Assign => BinOp::Eq,
            Tok::NotEq => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            _ => return None,
        })
    }

    // Precedence climbing; every binary operator is left-associative.
    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op().filter(|op| op.precedence() >= min_prec) {
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat_kw("not") {
            return Ok(Expr::Unary(UnaryOp::Not, Box::new(self.unary()?)));
        }
        if self.eat(&Tok::Minus) {
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Expr::Lit(Literal::Bool(s == "true")))
            }
            Tok::Ident(s) if !matches!(s.as_str(), "and" | "or" | "not") => {
                self.bump();
                Ok(Expr::Prop(s, loc))
            }
            Tok::Int(_) | Tok::Float(_) | Tok::Str(_) => Ok(Expr::Lit(self.literal()?)),
            _ => Err(self.unexpected("an expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_ok(src: &str) -> Model {
        parse_str(src).unwrap_or_else(|d| panic!("{d:#?}"))
    }

    #[test]
    fn empty_system() {
        let m = parse_ok("system S { }");
        assert_eq!(m, Model::new("S"));
    }

    #[test]
    fn version_header() {
        parse_ok("dsl-version 1 system S { }");
        let d = parse_str("dsl-version 2 system S { }").unwrap_err();
        assert_eq!(d[0].code, codes::E_VERSION);
    }

    #[test]
    fn typo_in_statemachine_is_one_syntax_error_on_its_line() {
        let src = "system S {\n  element E {\n    statemachine {\n      stat Idle { }\n    }\n  }\n}\n";
        let d = parse_str(src).unwrap_err();
        assert_eq!(d.len(), 1, "{d:#?}");
        assert_eq!(d[0].code, codes::E_SYNTAX);
        assert_eq!(d[0].line, 4);
    }

    #[test]
    fn recovers_across_top_level_blocks() {
        let src = "system S {\n payload P { a: }\n interface I { op f( }\n element E { }\n allocate x -> P1 \n rt a.b { periodic 1 ms }\n}";
        let d = parse_str(src).unwrap_err();
        assert_eq!(d.len(), 4, "{d:#?}");
        let lines: Vec<u32> = d.iter().map(|d| d.line).collect();
        assert_eq!(lines, vec![2, 3, 6, 6]);
    }

    #[test]
    fn durations_are_microseconds() {
        let m = parse_ok("system S { rt a.b { periodic 200 ms wcet 1.5 ms deadline 0.001 ms priority 3 } }");
        let rt = &m.rt_annotations[0];
        assert_eq!(rt.pattern, ArrivalPattern::Periodic(Micros(200_000)));
        assert_eq!(rt.wcet, Micros(1500));
        assert_eq!(rt.deadline, Micros(1));
        assert_eq!(rt.priority, 3);
        let d = parse_str("system S { rt a.b { periodic 1.0001 ms wcet 1 ms deadline 1 ms priority 1 } }").unwrap_err();
        assert_eq!(d[0].code, codes::E_SYNTAX);
    }

    #[test]
    fn rt_block_requires_every_field() {
        let d = parse_str("system S { rt a.b { periodic 1 ms wcet 1 ms priority 1 } }").unwrap_err();
        assert!(d[0].message.contains("deadline"), "{}", d[0].message);
    }

    #[test]
    fn guard_precedence() {
        let m = parse_ok(
            "system S { element E { property t: float = 0.0; statemachine {
               initial state A { entry e exit e }
               transition A -> A [t > 40.0 and not t == 1 or t < 2]
            } } }",
        );
        let sm = m.elements[0].statemachine.as_ref().unwrap();
        let g = sm.transitions[0].guard.as_ref().unwrap();
        // `not` binds tighter than comparisons.
        assert_eq!(g.to_string(), "t > 40.0 and not t == 1 or t < 2");
        assert!(matches!(g, Expr::Binary(BinOp::Or, _, _)));
    }

    #[test]
    fn arithmetic_parses_so_the_validator_can_reject_it() {
        let m = parse_ok(
            "system S { element E { property temp: int = 0; statemachine {
               initial state A { entry e exit e }
               transition A -> A [temp + 1]
            } } }",
        );
        let g = m.elements[0].statemachine.as_ref().unwrap().transitions[0].guard.clone();
        assert!(matches!(g, Some(Expr::Binary(BinOp::Add, _, _))));
    }

    #[test]
    fn power_modifier_only_on_elements() {
        assert!(parse_ok("system S { power element B { } }").elements[0].power_source);
        assert!(parse_str("system S { power board B { } }").is_err());
    }

    #[test]
    fn duplicate_names_are_left_to_the_validator() {
        let m = parse_ok("system S { element A { } element A { } }");
        assert_eq!(m.elements.len(), 2);
    }
}
