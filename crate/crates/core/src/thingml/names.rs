use std::collections::HashSet;

/// Words of the ThingML language that generated identifiers must avoid.
pub const RESERVED: &[&str] = &[
    "abstract",
    "action",
    "and",
    "as",
    "composite",
    "configuration",
    "connector",
    "datatype",
    "do",
    "else",
    "end",
    "entry",
    "enumeration",
    "error",
    "event",
    "exit",
    "false",
    "final",
    "fork",
    "fragment",
    "function",
    "guard",
    "history",
    "if",
    "import",
    "includes",
    "init",
    "instance",
    "internal",
    "is",
    "keeps",
    "message",
    "not",
    "object",
    "on",
    "operator",
    "or",
    "port",
    "print",
    "property",
    "protocol",
    "provided",
    "readonly",
    "receives",
    "region",
    "required",
    "return",
    "select",
    "sends",
    "session",
    "set",
    "state",
    "statechart",
    "stream",
    "thing",
    "transition",
    "true",
    "var",
    "while",
];

/// A set of identifiers handed out so far. Claiming a taken name appends
/// `_2`, `_3`, ... until it is free.
#[derive(Debug, Clone)]
pub struct Namespace {
    taken: HashSet<String>,
}

impl Default for Namespace {
    fn default() -> Self {
        Namespace { taken: RESERVED.iter().map(|s| s.to_string()).collect() }
    }
}

impl Namespace {
    pub fn reserve(&mut self, name: &str) {
        self.taken.insert(name.to_string());
    }

    pub fn claim(&mut self, base: &str) -> String {
        if self.taken.insert(base.to_string()) {
            return base.to_string();
        }
        (2u32..)
            .map(|n| format!("{base}_{n}"))
            .find(|candidate| self.taken.insert(candidate.clone()))
            .expect("unbounded suffixes")
    }
}

/// `TempHumReading` -> `tempHumReading`, `GPSFix` -> `gpsFix`.
pub fn lower_camel(name: &str) -> String {
    let chars: Vec<char> = name.chars().collect();
    let upper_run = chars.iter().take_while(|c| c.is_ascii_uppercase()).count();
    let lower = match upper_run {
        0 => 0,
        n if n == chars.len() => n,
        1 => 1,
        // Keep the last capital of an acronym when a word follows it.
        n if chars[n].is_ascii_lowercase() => n - 1,
        n => n,
    };
    chars.iter().enumerate().map(|(i, c)| if i < lower { c.to_ascii_lowercase() } else { *c }).collect()
}
