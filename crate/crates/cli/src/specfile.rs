//! The `difgeo-spec v1` dialect: a header line, then blocks
//!
//! ```text
//! difgeo-spec v1
//! surface torus:
//!     builtin = torus
//!     major = 2
//! task first:
//!     op = surface report
//!     object = torus
//!     at = 0.3, 1.1
//! ```
//!
//! Values are typed when read: constant expressions become numbers, comma
//! lists of constants become lists, `true`/`false` become booleans, and
//! anything else (or anything in double quotes) stays text.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use difgeo::exprparse::{tokenize, Token};
use difgeo::Expr;

pub const HEADER: &str = "difgeo-spec v1";

/// A parse or validation error pinned to a source line.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub file: String,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.file, self.line, self.message)
    }
}

impl std::error::Error for SpecError {}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Bool(bool),
    List(Vec<f64>),
    Text(String),
}

impl Value {
    pub fn parse(raw: &str) -> Value {
        let raw = raw.trim();
        if raw.len() >= 2 && raw.starts_with('"') && raw.ends_with('"') {
            return Value::Text(raw[1..raw.len() - 1].to_string());
        }
        match raw {
            "true" => return Value::Bool(true),
            "false" => return Value::Bool(false),
            _ => {}
        }
        let parts = split_top_level(raw);
        let nums: Option<Vec<f64>> = parts.iter().map(|p| constant(p)).collect();
        match nums {
            Some(v) if v.len() == 1 => Value::Num(v[0]),
            Some(v) if !v.is_empty() => Value::List(v),
            _ => Value::Text(raw.to_string()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Value::Num(_) => "number",
            Value::Bool(_) => "boolean",
            Value::List(_) => "list",
            Value::Text(_) => "text",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Num(x) => serde_json::json!(x),
            Value::Bool(b) => serde_json::json!(b),
            Value::List(v) => serde_json::json!(v),
            Value::Text(s) => serde_json::json!(s),
        }
    }
}

fn constant(text: &str) -> Option<f64> {
    let e = Expr::parse(text, &[]).ok()?;
    e.eval(&[]).ok().filter(|x| x.is_finite())
}

/// Splits at commas outside parentheses, using the expression lexer so that
/// malformed input simply yields one part.
fn split_top_level(raw: &str) -> Vec<String> {
    let Ok(tokens) = tokenize(raw) else { return vec![raw.to_string()] };
    let mut depth = 0i32;
    let mut cuts = Vec::new();
    for (at, tok) in &tokens {
        match tok {
            Token::LParen => depth += 1,
            Token::RParen => depth -= 1,
            Token::Comma if depth == 0 => cuts.push(*at),
            _ => {}
        }
    }
    let mut out = Vec::new();
    let mut start = 0;
    for c in cuts {
        out.push(raw[start..c].trim().to_string());
        start = c + 1;
    }
    out.push(raw[start..].trim().to_string());
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: Value,
    pub line: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlockKind {
    Curve,
    Surface,
    Intrinsic,
    Task,
}

impl BlockKind {
    fn from_word(w: &str) -> Option<BlockKind> {
        Some(match w {
            "curve" => BlockKind::Curve,
            "surface" => BlockKind::Surface,
            "intrinsic" => BlockKind::Intrinsic,
            "task" => BlockKind::Task,
            _ => return None,
        })
    }

    pub fn word(self) -> &'static str {
        match self {
            BlockKind::Curve => "curve",
            BlockKind::Surface => "surface",
            BlockKind::Intrinsic => "intrinsic",
            BlockKind::Task => "task",
        }
    }
}

/// One named block with its entries; keeps the file name for error messages.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub kind: BlockKind,
    pub name: String,
    pub file: String,
    pub line: usize,
    pub entries: BTreeMap<String, Entry>,
}

impl Block {
    pub fn new(kind: BlockKind, name: &str, file: &str) -> Block {
        Block { kind, name: name.to_string(), file: file.to_string(), line: 0, entries: BTreeMap::new() }
    }

    /// Adds an entry unless the key is already present.
    pub fn set(&mut self, key: &str, value: Value, line: usize) -> Result<(), SpecError> {
        if self.entries.contains_key(key) {
            return Err(self.error(line, format!("duplicate key `{key}`")));
        }
        self.entries.insert(key.to_string(), Entry { value, line });
        Ok(())
    }

    pub fn error(&self, line: usize, message: impl Into<String>) -> SpecError {
        SpecError { file: self.file.clone(), line, message: message.into() }
    }

    fn entry_error(&self, key: &str, message: impl fmt::Display) -> SpecError {
        let line = self.entries.get(key).map_or(self.line, |e| e.line);
        self.error(line, format!("{} `{}`, key `{key}`: {message}", self.kind.word(), self.name))
    }

    pub fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// Rejects keys outside `allowed`.
    pub fn only(&self, allowed: &[&str]) -> Result<(), SpecError> {
        for (k, e) in &self.entries {
            if !allowed.contains(&k.as_str()) {
                return Err(self.error(
                    e.line,
                    format!("unknown key `{k}` in {} `{}` (allowed: {})", self.kind.word(), self.name, allowed.join(", ")),
                ));
            }
        }
        Ok(())
    }

    pub fn num(&self, key: &str) -> Result<Option<f64>, SpecError> {
        match self.entries.get(key).map(|e| &e.value) {
            None => Ok(None),
            Some(Value::Num(x)) => Ok(Some(*x)),
            Some(v) => Err(self.entry_error(key, format!("expected a number, found {}", v.kind()))),
        }
    }

    pub fn count(&self, key: &str) -> Result<Option<usize>, SpecError> {
        match self.num(key)? {
            None => Ok(None),
            Some(x) if x >= 1.0 && x.fract() == 0.0 && x < 1e9 => Ok(Some(x as usize)),
            Some(x) => Err(self.entry_error(key, format!("expected a positive integer, found {x}"))),
        }
    }

    pub fn boolean(&self, key: &str) -> Result<Option<bool>, SpecError> {
        match self.entries.get(key).map(|e| &e.value) {
            None => Ok(None),
            Some(Value::Bool(b)) => Ok(Some(*b)),
            Some(v) => Err(self.entry_error(key, format!("expected true or false, found {}", v.kind()))),
        }
    }

    /// Numbers as a list; a single number counts as a list of one.
    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>, SpecError> {
        match self.entries.get(key).map(|e| &e.value) {
            None => Ok(None),
            Some(Value::List(v)) => Ok(Some(v.clone())),
            Some(Value::Num(x)) => Ok(Some(vec![*x])),
            Some(v) => Err(self.entry_error(key, format!("expected numbers, found {}", v.kind()))),
        }
    }

    pub fn fixed<const N: usize>(&self, key: &str) -> Result<Option<[f64; N]>, SpecError> {
        match self.list(key)? {
            None => Ok(None),
            Some(v) => <[f64; N]>::try_from(v.as_slice())
                .map(Some)
                .map_err(|_| self.entry_error(key, format!("expected {N} numbers, found {}", v.len()))),
        }
    }

    pub fn pair(&self, key: &str) -> Result<Option<(f64, f64)>, SpecError> {
        Ok(self.fixed::<2>(key)?.map(|[a, b]| (a, b)))
    }

    /// Text or a number written as an expression; numbers are turned back into text.
    pub fn expr_text(&self, key: &str) -> Result<Option<String>, SpecError> {
        match self.entries.get(key).map(|e| &e.value) {
            None => Ok(None),
            Some(Value::Text(s)) => Ok(Some(s.clone())),
            Some(Value::Num(x)) => Ok(Some(format!("{x:?}"))),
            Some(v) => Err(self.entry_error(key, format!("expected an expression, found {}", v.kind()))),
        }
    }

    pub fn text(&self, key: &str) -> Result<Option<String>, SpecError> {
        match self.entries.get(key).map(|e| &e.value) {
            None => Ok(None),
            Some(Value::Text(s)) => Ok(Some(s.clone())),
            Some(v) => Err(self.entry_error(key, format!("expected text, found {}", v.kind()))),
        }
    }

    pub fn require<T>(&self, key: &str, got: Option<T>) -> Result<T, SpecError> {
        got.ok_or_else(|| self.error(self.line, format!("{} `{}` needs key `{key}`", self.kind.word(), self.name)))
    }

    /// Maps a library error while building from this block onto the given key's line.
    pub fn lib_error(&self, key: &str, err: impl fmt::Display) -> SpecError {
        self.entry_error(key, err)
    }

    pub fn echo(&self) -> serde_json::Map<String, serde_json::Value> {
        self.entries.iter().map(|(k, e)| (k.clone(), e.value.to_json())).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecFile {
    pub version: u32,
    /// Curve, surface and intrinsic blocks by name.
    pub objects: BTreeMap<String, Block>,
    pub tasks: Vec<Block>,
}

impl SpecFile {
    pub fn load(path: &Path) -> Result<SpecFile, SpecError> {
        let file = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| SpecError { file: file.clone(), line: 0, message: format!("cannot read: {e}") })?;
        SpecFile::parse(&text, &file)
    }

    pub fn parse(text: &str, file: &str) -> Result<SpecFile, SpecError> {
        let err = |line: usize, message: String| SpecError { file: file.to_string(), line, message };
        let mut version = None;
        let mut blocks: Vec<Block> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = strip_comment(raw);
            if content.trim().is_empty() {
                continue;
            }
            if version.is_none() {
                let header = content.trim();
                match header.strip_prefix("difgeo-spec v").and_then(|v| v.parse::<u32>().ok()) {
                    Some(1) => version = Some(1),
                    Some(v) => return Err(err(line, format!("unsupported spec version {v}; expected `{HEADER}`"))),
                    None => return Err(err(line, format!("missing header line `{HEADER}`"))),
                }
                continue;
            }
            let indented = content.starts_with(' ') || content.starts_with('\t');
            let content = content.trim();
            if !indented {
                let head = content
                    .strip_suffix(':')
                    .ok_or_else(|| err(line, format!("expected a block header `KIND NAME:`, found `{content}`")))?;
                let mut words = head.split_whitespace();
                let (Some(kind), Some(name), None) = (words.next(), words.next(), words.next()) else {
                    return Err(err(line, format!("expected a block header `KIND NAME:`, found `{content}`")));
                };
                let kind = BlockKind::from_word(kind).ok_or_else(|| {
                    err(line, format!("unknown block kind `{kind}` (expected curve, surface, intrinsic or task)"))
                })?;
                if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                    return Err(err(line, format!("invalid block name `{name}`")));
                }
                if blocks.iter().any(|b| b.name == name) {
                    return Err(err(line, format!("duplicate block name `{name}`")));
                }
                let mut b = Block::new(kind, name, file);
                b.line = line;
                blocks.push(b);
                continue;
            }
            let block = blocks.last_mut().ok_or_else(|| err(line, "entry outside of any block".to_string()))?;
            let (key, value) =
                content.split_once('=').ok_or_else(|| err(line, format!("expected `key = value`, found `{content}`")))?;
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(err(line, format!("invalid key `{key}`")));
            }
            if value.trim().is_empty() {
                return Err(err(line, format!("key `{key}` has no value")));
            }
            block.set(key, Value::parse(value), line)?;
        }
        let version = version.ok_or_else(|| err(1, format!("missing header line `{HEADER}`")))?;
        let mut objects = BTreeMap::new();
        let mut tasks = Vec::new();
        for b in blocks {
            if b.kind == BlockKind::Task {
                tasks.push(b);
            } else {
                objects.insert(b.name.clone(), b);
            }
        }
        let spec = SpecFile { version, objects, tasks };
        for t in &spec.tasks {
            spec.resolve(t)?;
        }
        Ok(spec)
    }

    /// The object a task refers to.
    pub fn resolve(&self, task: &Block) -> Result<&Block, SpecError> {
        let name = task.require("object", task.text("object")?)?;
        self.objects.get(&name).ok_or_else(|| {
            let line = task.entries.get("object").map_or(task.line, |e| e.line);
            task.error(line, format!("task `{}` refers to undefined object `{name}`", task.name))
        })
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..i],
            _ => {}
        }
    }
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn typed_values() {
        assert_eq!(Value::parse("2"), Value::Num(2.0));
        assert_eq!(Value::parse("2*pi"), Value::Num(2.0 * std::f64::consts::PI));
        assert_eq!(Value::parse("0.3, -1.1"), Value::List(vec![0.3, -1.1]));
        assert_eq!(Value::parse("true"), Value::Bool(true));
        assert_eq!(Value::parse("cos(t)"), Value::Text("cos(t)".into()));
        assert_eq!(Value::parse("\"1\""), Value::Text("1".into()));
        assert_eq!(Value::parse("atan(1)"), Value::Num(std::f64::consts::FRAC_PI_4));
        assert_eq!(Value::parse("surface report"), Value::Text("surface report".into()));
    }

    #[test]
    fn blocks_and_lines() {
        let text = "# demo\ndifgeo-spec v1\n\nsurface t:\n    builtin = torus\ntask a:\n  op = surface report\n  object = t\n  at = 1, 2 # here\n";
        let s = SpecFile::parse(text, "demo.spec").unwrap();
        assert_eq!(s.version, 1);
        assert_eq!(s.tasks.len(), 1);
        assert_eq!(s.tasks[0].entries["at"], Entry { value: Value::List(vec![1.0, 2.0]), line: 9 });
        assert_eq!(s.objects["t"].line, 4);
    }

    #[test]
    fn header_required() {
        let e = SpecFile::parse("surface t:\n  builtin = torus\n", "x.spec").unwrap_err();
        assert_eq!((e.line, e.file.as_str()), (1, "x.spec"));
    }

    #[test]
    fn dangling_reference() {
        let e = SpecFile::parse("difgeo-spec v1\ntask a:\n  op = surface report\n  object = nope\n", "x.spec").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.to_string().starts_with("x.spec:4:"));
    }

    #[test]
    fn duplicate_key() {
        let e = SpecFile::parse("difgeo-spec v1\ncurve c:\n  x = t\n  x = t\n", "x.spec").unwrap_err();
        assert_eq!(e.line, 4);
    }
}
