//! In-memory representation of a component model.
//!
//! A [`Model`] is the root of a parsed design. Software components come in
//! three flavours (IoT elements, virtual boards and virtual entities) and
//! share the [`Component`] shape; the behavioural layer hangs off a
//! component as an optional [`StateMachine`]. Hardware, allocations and
//! real-time annotations live next to the software declarations.
//!
//! Every declaration carries a [`Loc`] so that diagnostics can point back at
//! the source. Locations never participate in equality: two models are equal
//! when their structure is equal, wherever the declarations were written.

use std::fmt;

/// A 1-based line/column position in a source file.
#[derive(Debug, Clone, Copy, Eq)]
pub struct Loc {
    pub line: u32,
    pub column: u32,
}

impl Loc {
    pub const fn new(line: u32, column: u32) -> Self {
        Loc { line, column }
    }
}

impl Default for Loc {
    fn default() -> Self {
        Loc::new(1, 1)
    }
}

// Structural equality ignores positions.
impl PartialEq for Loc {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl std::hash::Hash for Loc {
    fn hash<H: std::hash::Hasher>(&self, _state: &mut H) {}
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A time quantity in integer microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Micros(pub u64);

impl Micros {
    pub const ZERO: Micros = Micros(0);

    pub const fn from_ms(ms: u64) -> Micros {
        Micros(ms * 1000)
    }

    pub const fn as_u64(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Micros {
    /// Milliseconds with up to three decimals, e.g. `200 ms` or `1.5 ms`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.0 / 1000;
        let frac = self.0 % 1000;
        if frac == 0 {
            write!(f, "{whole} ms")
        } else {
            let digits = format!("{frac:03}");
            write!(f, "{whole}.{} ms", digits.trim_end_matches('0'))
        }
    }
}

/// Semantic types usable for payload attributes, parameters and properties.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SemType {
    Int,
    Float,
    Bool,
    String,
    Payload(String),
}

impl SemType {
    pub fn is_numeric(&self) -> bool {
        matches!(self, SemType::Int | SemType::Float)
    }

    /// Whether a value of type `other` may be stored in a slot of this type.
    pub fn accepts(&self, other: &SemType) -> bool {
        self == other || (*self == SemType::Float && *other == SemType::Int)
    }
}

impl fmt::Display for SemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemType::Int => f.write_str("int"),
            SemType::Float => f.write_str("float"),
            SemType::Bool => f.write_str("bool"),
            SemType::String => f.write_str("string"),
            SemType::Payload(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
}

impl Literal {
    pub fn sem_type(&self) -> SemType {
        match self {
            Literal::Int(_) => SemType::Int,
            Literal::Float(_) => SemType::Float,
            Literal::Bool(_) => SemType::Bool,
            Literal::Str(_) => SemType::String,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(v) => write!(f, "{v}"),
            Literal::Float(v) => f.write_str(&format_float(*v)),
            Literal::Bool(v) => write!(f, "{v}"),
            Literal::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

/// Plain decimal rendering of a float that always carries a fractional part
/// and never uses exponent notation.
pub fn format_float(v: f64) -> String {
    let s = format!("{v}");
    if s.contains('.') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div => 6,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div)
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
    }
}

/// Expression tree used by guards and property assignments.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(Literal),
    Prop(String, Loc),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Every property referenced by the expression, left to right.
    pub fn properties(&self) -> Vec<(&str, Loc)> {
        let mut out = Vec::new();
        self.walk_props(&mut out);
        out
    }

    fn walk_props<'a>(&'a self, out: &mut Vec<(&'a str, Loc)>) {
        match self {
            Expr::Lit(_) => {}
            Expr::Prop(name, loc) => out.push((name, *loc)),
            Expr::Unary(_, e) => e.walk_props(out),
            Expr::Binary(_, l, r) => {
                l.walk_props(out);
                r.walk_props(out);
            }
        }
    }

    /// Renders the expression with the minimal parentheses needed to keep
    /// its tree shape. `rename` maps property names to their emitted form.
    pub fn render(&self, rename: &dyn Fn(&str) -> String) -> String {
        let mut out = String::new();
        self.render_into(&mut out, rename, 0);
        out
    }

    fn render_into(&self, out: &mut String, rename: &dyn Fn(&str) -> String, min_prec: u8) {
        match self {
            Expr::Lit(lit) => out.push_str(&lit.to_string()),
            Expr::Prop(name, _) => out.push_str(&rename(name)),
            Expr::Unary(op, inner) => {
                out.push_str(match op {
                    UnaryOp::Not => "not ",
                    UnaryOp::Neg => "-",
                });
                // Unary binds tighter than any binary operator.
                inner.render_into(out, rename, 7);
            }
            Expr::Binary(op, lhs, rhs) => {
                let prec = op.precedence();
                let paren = prec < min_prec;
                if paren {
                    out.push('(');
                }
                lhs.render_into(out, rename, prec);
                out.push(' ');
                out.push_str(op.symbol());
                out.push(' ');
                // Left-associative: the right operand needs strictly tighter binding.
                rhs.render_into(out, rename, prec + 1);
                if paren {
                    out.push(')');
                }
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&|n| n.to_string()))
    }
}

/// A named, typed slot: payload attribute or operation parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub name: String,
    pub ty: SemType,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Payload {
    pub name: String,
    pub attributes: Vec<Field>,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operation {
    pub name: String,
    pub params: Vec<Field>,
    pub return_type: Option<SemType>,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interface {
    pub name: String,
    pub operations: Vec<Operation>,
    pub loc: Loc,
}

impl Interface {
    pub fn operation(&self, name: &str) -> Option<&Operation> {
        self.operations.iter().find(|op| op.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    Element,
    Board,
    Entity,
}

impl ComponentKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ComponentKind::Element => "element",
            ComponentKind::Board => "board",
            ComponentKind::Entity => "entity",
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Property {
    pub name: String,
    pub ty: SemType,
    pub init: Option<Literal>,
    pub loc: Loc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PortDirection {
    Provided,
    Required,
    Bidirectional,
}

impl PortDirection {
    pub fn keyword(self) -> &'static str {
        match self {
            PortDirection::Provided => "provides",
            PortDirection::Required => "requires",
            PortDirection::Bidirectional => "bidir",
        }
    }

    pub fn provides(self) -> bool {
        matches!(self, PortDirection::Provided | PortDirection::Bidirectional)
    }

    pub fn requires(self) -> bool {
        matches!(self, PortDirection::Required | PortDirection::Bidirectional)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Port {
    pub name: String,
    pub direction: PortDirection,
    pub interface: String,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Part {
    pub name: String,
    pub component: String,
    pub loc: Loc,
}

/// One end of a connection: a port of a part (`part.port`) or one of the
/// owning component's own ports (`port`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PortRef {
    pub part: Option<String>,
    pub port: String,
}

impl PortRef {
    pub fn own(port: impl Into<String>) -> Self {
        PortRef { part: None, port: port.into() }
    }

    pub fn of_part(part: impl Into<String>, port: impl Into<String>) -> Self {
        PortRef { part: Some(part.into()), port: port.into() }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.part {
            Some(part) => write!(f, "{part}.{}", self.port),
            None => f.write_str(&self.port),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    pub from: PortRef,
    pub to: PortRef,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub name: String,
    pub initial: bool,
    pub on_entry: Option<String>,
    pub on_exit: Option<String>,
    pub internal_events: Vec<String>,
    pub loc: Loc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Incoming,
    Outgoing,
    Generic,
}

impl EventKind {
    pub fn keyword(self) -> &'static str {
        match self {
            EventKind::Incoming => "incoming",
            EventKind::Outgoing => "outgoing",
            EventKind::Generic => "generic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub name: String,
    pub kind: EventKind,
    pub port: Option<String>,
    pub action: String,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ActionKind {
    Send { payload: String },
    Receive { payload: String },
    Assign { property: String, value: Expr },
}

impl ActionKind {
    pub fn payload(&self) -> Option<&str> {
        match self {
            ActionKind::Send { payload } | ActionKind::Receive { payload } => Some(payload),
            ActionKind::Assign { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub name: String,
    pub kind: ActionKind,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub source: String,
    pub target: String,
    pub trigger: Option<String>,
    pub guard: Option<Expr>,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateMachine {
    pub states: Vec<State>,
    pub transitions: Vec<Transition>,
    pub events: Vec<Event>,
    pub actions: Vec<Action>,
    pub loc: Loc,
}

impl StateMachine {
    pub fn state(&self, name: &str) -> Option<&State> {
        self.states.iter().find(|s| s.name == name)
    }

    pub fn event(&self, name: &str) -> Option<&Event> {
        self.events.iter().find(|e| e.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&Action> {
        self.actions.iter().find(|a| a.name == name)
    }

    /// The initial state, when exactly one state is marked initial.
    pub fn initial(&self) -> Option<&State> {
        let mut initials = self.states.iter().filter(|s| s.initial);
        match (initials.next(), initials.next()) {
            (Some(s), None) => Some(s),
            _ => None,
        }
    }

    /// The action bound to an event, if both resolve.
    pub fn event_action(&self, event: &str) -> Option<&Action> {
        self.event(event).and_then(|e| self.action(&e.action))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub name: String,
    pub kind: ComponentKind,
    /// Power-source elements are the only elements an entity may contain.
    pub power_source: bool,
    pub properties: Vec<Property>,
    pub ports: Vec<Port>,
    pub parts: Vec<Part>,
    pub connections: Vec<Connection>,
    pub statemachine: Option<StateMachine>,
    pub loc: Loc,
}

impl Component {
    pub fn new(name: impl Into<String>, kind: ComponentKind) -> Self {
        Component {
            name: name.into(),
            kind,
            power_source: false,
            properties: Vec::new(),
            ports: Vec::new(),
            parts: Vec::new(),
            connections: Vec::new(),
            statemachine: None,
            loc: Loc::default(),
        }
    }

    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn property(&self, name: &str) -> Option<&Property> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn part(&self, name: &str) -> Option<&Part> {
        self.parts.iter().find(|p| p.name == name)
    }

    /// Operations the component implements: those of every interface it
    /// provides (provided or bidirectional ports), each interface once, in
    /// port declaration order.
    pub fn provided_operations<'m>(&self, model: &'m Model) -> Vec<&'m Operation> {
        let mut seen: Vec<&str> = Vec::new();
        let mut ops = Vec::new();
        for port in self.ports.iter().filter(|p| p.direction.provides()) {
            if seen.contains(&port.interface.as_str()) {
                continue;
            }
            seen.push(&port.interface);
            if let Some(iface) = model.interface(&port.interface) {
                ops.extend(iface.operations.iter());
            }
        }
        ops
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Core {
    pub name: String,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Processor {
    pub name: String,
    pub cores: Vec<Core>,
    pub loc: Loc,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct HardwarePlatform {
    pub processors: Vec<Processor>,
}

impl HardwarePlatform {
    pub fn processor(&self, name: &str) -> Option<&Processor> {
        self.processors.iter().find(|p| p.name == name)
    }

    pub fn has_core(&self, core: &CoreRef) -> bool {
        self.processor(&core.processor).is_some_and(|p| p.cores.iter().any(|c| c.name == core.core))
    }

    /// Position of a core in declaration order, used to order reports.
    pub fn core_index(&self, core: &CoreRef) -> Option<usize> {
        self.processors
            .iter()
            .flat_map(|p| p.cores.iter().map(move |c| (p, c)))
            .position(|(p, c)| p.name == core.processor && c.name == core.core)
    }
}

/// `processor.core`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoreRef {
    pub processor: String,
    pub core: String,
}

impl CoreRef {
    pub fn new(processor: impl Into<String>, core: impl Into<String>) -> Self {
        CoreRef { processor: processor.into(), core: core.into() }
    }
}

impl fmt::Display for CoreRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.processor, self.core)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    /// Dotted instance path, rooted at an entity.
    pub instance: String,
    pub core: CoreRef,
    pub loc: Loc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrivalPattern {
    Periodic(Micros),
    /// Minimum inter-arrival time.
    Sporadic(Micros),
}

impl ArrivalPattern {
    /// Period used by the analysis; sporadic arrivals are taken at their
    /// minimum inter-arrival time.
    pub fn period(self) -> Micros {
        match self {
            ArrivalPattern::Periodic(t) | ArrivalPattern::Sporadic(t) => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RtAnnotation {
    /// Instance path followed by an operation, event or action name.
    pub target: String,
    pub pattern: ArrivalPattern,
    pub wcet: Micros,
    pub deadline: Micros,
    /// Larger is higher.
    pub priority: u32,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub name: String,
    pub payloads: Vec<Payload>,
    pub interfaces: Vec<Interface>,
    pub elements: Vec<Component>,
    pub boards: Vec<Component>,
    pub entities: Vec<Component>,
    pub hardware: HardwarePlatform,
    pub allocations: Vec<Allocation>,
    pub rt_annotations: Vec<RtAnnotation>,
    pub loc: Loc,
}

impl Model {
    pub fn new(name: impl Into<String>) -> Self {
        Model {
            name: name.into(),
            payloads: Vec::new(),
            interfaces: Vec::new(),
            elements: Vec::new(),
            boards: Vec::new(),
            entities: Vec::new(),
            hardware: HardwarePlatform::default(),
            allocations: Vec::new(),
            rt_annotations: Vec::new(),
            loc: Loc::default(),
        }
    }

    /// Elements, then boards, then entities.
    pub fn components(&self) -> impl Iterator<Item = &Component> {
        self.elements.iter().chain(&self.boards).chain(&self.entities)
    }

    pub fn component(&self, name: &str) -> Option<&Component> {
        self.components().find(|c| c.name == name)
    }

    pub fn payload(&self, name: &str) -> Option<&Payload> {
        self.payloads.iter().find(|p| p.name == name)
    }

    pub fn interface(&self, name: &str) -> Option<&Interface> {
        self.interfaces.iter().find(|i| i.name == name)
    }

    /// Adds a component to the list matching its kind.
    pub fn push_component(&mut self, component: Component) {
        match component.kind {
            ComponentKind::Element => self.elements.push(component),
            ComponentKind::Board => self.boards.push(component),
            ComponentKind::Entity => self.entities.push(component),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn micros_display() {
        assert_eq!(Micros::from_ms(200).to_string(), "200 ms");
        assert_eq!(Micros(1500).to_string(), "1.5 ms");
        assert_eq!(Micros(1).to_string(), "0.001 ms");
    }

    #[test]
    fn float_literals_keep_a_fraction() {
        assert_eq!(format_float(40.0), "40.0");
        assert_eq!(format_float(0.25), "0.25");
        assert_eq!(format_float(1e20), "100000000000000000000.0");
    }

    #[test]
    fn expr_render_minimal_parens() {
        let a = || Expr::Prop("a".into(), Loc::default());
        let b = || Expr::Prop("b".into(), Loc::default());
        let e = Expr::binary(
            BinOp::And,
            Expr::binary(BinOp::Or, a(), b()),
            Expr::binary(BinOp::Gt, a(), Expr::Lit(Literal::Float(40.0))),
        );
        assert_eq!(e.to_string(), "(a or b) and a > 40.0");
        let e = Expr::binary(BinOp::Sub, a(), Expr::binary(BinOp::Sub, b(), a()));
        assert_eq!(e.to_string(), "a - (b - a)");
        let e = Expr::Unary(UnaryOp::Not, Box::new(Expr::binary(BinOp::Eq, a(), b())));
        assert_eq!(e.to_string(), "not (a == b)");
    }

    #[test]
    fn loc_is_ignored_by_equality() {
        let p1 = Part { name: "x".into(), component: "T".into(), loc: Loc::new(3, 4) };
        let p2 = Part { name: "x".into(), component: "T".into(), loc: Loc::new(9, 1) };
        assert_eq!(p1, p2);
    }
}
