use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::{DiagramSource, LegName, Span, Statement};
use crate::linalg::{c, C64};
use crate::tensor::Polarity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    Syntax,
    UnknownSpace,
    /// Leg index out of range for the object.
    ArityMismatch,
    DuplicateName,
    DataLength,
    UnknownObject,
    /// Edge endpoints that cannot be joined: same polarity, different
    /// spaces, or a leg used twice.
    BadEdge,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Syntax => "syntax",
            ErrorKind::UnknownSpace => "unknown-space",
            ErrorKind::ArityMismatch => "arity-mismatch",
            ErrorKind::DuplicateName => "duplicate-name",
            ErrorKind::DataLength => "data-length",
            ErrorKind::UnknownObject => "unknown-object",
            ErrorKind::BadEdge => "bad-edge",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.kind.as_str(), self.message)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = std::result::Result<T, ParseError>;

/// Cursor over one line with comments already stripped.
struct Line {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Line {
    fn new(src: &str, line: usize) -> Self {
        Self { chars: src.chars().collect(), pos: 0, line }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn err(&self, column: usize, kind: ErrorKind, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column, kind, message: message.into() }
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        self.err(self.column(), ErrorKind::Syntax, message)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn expect(&mut self, ch: char) -> PResult<()> {
        match self.peek() {
            Some(x) if x == ch => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(self.syntax(format!("expected '{ch}', found '{x}'"))),
            None => Err(self.syntax(format!("expected '{ch}' before end of line"))),
        }
    }

    fn ident(&mut self) -> PResult<(String, usize)> {
        let start = match self.peek() {
            Some(x) if x.is_ascii_alphabetic() || x == '_' => self.pos,
            Some(x) => return Err(self.syntax(format!("expected a name, found '{x}'"))),
            None => return Err(self.syntax("expected a name before end of line")),
        };
        while self.pos < self.chars.len() && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_') {
            self.pos += 1;
        }
        Ok((self.chars[start..self.pos].iter().collect(), start + 1))
    }

    fn int(&mut self) -> PResult<(usize, usize)> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected an integer"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        let n = text.parse().map_err(|_| self.err(start + 1, ErrorKind::Syntax, format!("integer '{text}' out of range")))?;
        Ok((n, start + 1))
    }

    /// `[+-]? digits [. digits] [(e|E) [+-]? digits]` with at least one
    /// mantissa digit.
    fn float(&mut self) -> PResult<f64> {
        self.skip_ws();
        let start = self.pos;
        let digits = |s: &mut Self| {
            let from = s.pos;
            while s.pos < s.chars.len() && s.chars[s.pos].is_ascii_digit() {
                s.pos += 1;
            }
            s.pos - from
        };
        if matches!(self.chars.get(self.pos), Some('+' | '-')) {
            self.pos += 1;
        }
        let mut mantissa = digits(self);
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            mantissa += digits(self);
        }
        if mantissa == 0 {
            self.pos = start;
            return Err(self.syntax("expected a number"));
        }
        if matches!(self.chars.get(self.pos), Some('e' | 'E')) {
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('+' | '-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                return Err(self.syntax("expected exponent digits"));
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(self.err(start + 1, ErrorKind::Syntax, format!("number '{text}' is not finite"))),
        }
    }

    fn value(&mut self) -> PResult<C64> {
        if self.peek() == Some('(') {
            self.pos += 1;
            let re = self.float()?;
            self.expect(',')?;
            let im = self.float()?;
            self.expect(')')?;
            Ok(c(re, im))
        } else {
            Ok(c(self.float()?, 0.0))
        }
    }

    fn leg_name(&mut self) -> PResult<(LegName, usize)> {
        let (object, column) = self.ident()?;
        self.expect('.')?;
        let (leg, _) = self.int()?;
        Ok((LegName { object, leg }, column))
    }

    fn finish(&mut self) -> PResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(x) => Err(self.syntax(format!("unexpected '{x}'"))),
        }
    }
}

struct ObjectInfo {
    legs: Vec<(String, Polarity)>,
    used: Vec<bool>,
}

#[derive(Default)]
struct Checker {
    spaces: HashMap<String, usize>,
    objects: HashMap<String, ObjectInfo>,
}

impl Checker {
    fn statement(&mut self, l: &mut Line) -> PResult<Option<Statement>> {
        if l.at_end() {
            return Ok(None);
        }
        let (keyword, kw_col) = l.ident()?;
        let stmt = match keyword.as_str() {
            "space" => {
                let (label, col) = l.ident()?;
                let (dim, dim_col) = l.int()?;
                l.finish()?;
                if dim == 0 {
                    return Err(l.err(dim_col, ErrorKind::Syntax, "dimension must be positive"));
                }
                if self.spaces.contains_key(&label) {
                    return Err(l.err(col, ErrorKind::DuplicateName, format!("space '{label}' already declared")));
                }
                self.spaces.insert(label.clone(), dim);
                Statement::Space { label, dim }
            }
            "obj" => {
                let (name, col) = l.ident()?;
                let mut legs = Vec::new();
                let mut size: usize = 1;
                while l.peek() != Some('=') {
                    let (label, leg_col) = l.ident()?;
                    let polarity = match l.peek() {
                        Some('+') => Polarity::Open,
                        Some('-') => Polarity::Closed,
                        _ => return Err(l.syntax(format!("leg '{label}' needs '+' or '-'"))),
                    };
                    l.pos += 1;
                    let dim = *self
                        .spaces
                        .get(&label)
                        .ok_or_else(|| l.err(leg_col, ErrorKind::UnknownSpace, format!("space '{label}' is not declared")))?;
                    size = size
                        .checked_mul(dim)
                        .filter(|&s| s <= 1 << 28)
                        .ok_or_else(|| l.err(leg_col, ErrorKind::DataLength, "object is too large"))?;
                    legs.push((label, polarity));
                }
                if legs.is_empty() {
                    return Err(l.syntax("an object needs at least one leg"));
                }
                let eq_col = l.column();
                l.expect('=')?;
                let mut values = Vec::new();
                while !l.at_end() {
                    values.push(l.value()?);
                }
                if values.len() != size {
                    return Err(l.err(eq_col, ErrorKind::DataLength, format!("expected {size} values, got {}", values.len())));
                }
                if self.objects.contains_key(&name) {
                    return Err(l.err(col, ErrorKind::DuplicateName, format!("object '{name}' already declared")));
                }
                let used = vec![false; legs.len()];
                self.objects.insert(name.clone(), ObjectInfo { legs: legs.clone(), used });
                Statement::Object { name, legs, values }
            }
            "edge" => {
                let (first, c1) = l.leg_name()?;
                let (second, c2) = l.leg_name()?;
                l.finish()?;
                let mut ends = Vec::new();
                for (n, col) in [(&first, c1), (&second, c2)] {
                    let obj = self
                        .objects
                        .get(&n.object)
                        .ok_or_else(|| l.err(col, ErrorKind::UnknownObject, format!("object '{}' is not declared", n.object)))?;
                    if n.leg == 0 || n.leg > obj.legs.len() {
                        return Err(l.err(
                            col,
                            ErrorKind::ArityMismatch,
                            format!("'{}' has {} legs, no leg {}", n.object, obj.legs.len(), n.leg),
                        ));
                    }
                    if obj.used[n.leg - 1] {
                        return Err(l.err(col, ErrorKind::BadEdge, format!("leg {}.{} is already joined", n.object, n.leg)));
                    }
                    ends.push(obj.legs[n.leg - 1].clone());
                }
                if first == second {
                    return Err(l.err(c2, ErrorKind::BadEdge, "a leg cannot be joined to itself"));
                }
                if ends[0].0 != ends[1].0 {
                    return Err(l.err(c2, ErrorKind::BadEdge, format!("cannot join space '{}' to '{}'", ends[0].0, ends[1].0)));
                }
                if ends[0].1 == ends[1].1 {
                    return Err(l.err(c2, ErrorKind::BadEdge, "an edge joins one open leg to one closed leg"));
                }
                for n in [&first, &second] {
                    self.objects.get_mut(&n.object).expect("checked above").used[n.leg - 1] = true;
                }
                Statement::Edge { first, second }
            }
            other => return Err(l.err(kw_col, ErrorKind::Syntax, format!("unknown statement '{other}'"))),
        };
        Ok(Some(stmt))
    }
}

/// Parses and checks a whole file. Errors carry the 1-based line and column
/// of the offending token.
pub fn parse(text: &str) -> Result<DiagramSource, ParseError> {
    let mut checker = Checker::default();
    let mut statements = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let code = raw.split('#').next().unwrap_or("");
        let mut line = Line::new(code, k + 1);
        if line.at_end() {
            continue;
        }
        let column = line.column();
        if let Some(stmt) = checker.statement(&mut line)? {
            statements.push((stmt, Span { line: k + 1, column }));
        }
    }
    Ok(DiagramSource { statements })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind(text: &str) -> (ErrorKind, usize, usize) {
        let e = parse(text).unwrap_err();
        (e.kind, e.line, e.column)
    }

    #[test]
    fn categories() {
        assert_eq!(kind("obj x q+ = 1"), (ErrorKind::UnknownSpace, 1, 7));
        assert_eq!(kind("space a 2\nspace a 3").0, ErrorKind::DuplicateName);
        assert_eq!(kind("space a 2\nobj x a+ = 1"), (ErrorKind::DataLength, 2, 10));
        assert_eq!(kind("space a 2\nobj x a+ = 1 0\nedge x.2 x.1"), (ErrorKind::ArityMismatch, 3, 6));
        assert_eq!(kind("space a 2\nobj x a+ = 1 0\nedge y.1 x.1").0, ErrorKind::UnknownObject);
        assert_eq!(kind("space a 2\nobj x a+ a+ = 1 0 0 1\nedge x.1 x.2").0, ErrorKind::BadEdge);
        assert_eq!(kind("space a 2\nobj x a+ = 1 0\nobj x a+ = 1 0").0, ErrorKind::DuplicateName);
        assert_eq!(kind("spcae a 2").0, ErrorKind::Syntax);
        assert_eq!(kind("space a 0").0, ErrorKind::Syntax);
        assert_eq!(kind("space a 2\nobj x a = 1 0").0, ErrorKind::Syntax);
        assert_eq!(kind("space a 2\nobj x a+ = 1 inf").0, ErrorKind::Syntax);
        assert_eq!(kind("space a 2\nobj x a+ = 1 1e999").0, ErrorKind::Syntax);
        assert_eq!(kind("space a 2\nobj x a+ = (1,2 0").0, ErrorKind::Syntax);
    }

    #[test]
    fn accepts_comments_and_spacing() {
        let src = parse("# header\n  space  a 2   # trailing\n\nobj  k a+ =  ( 1 , -2 )  .5\n").unwrap();
        assert_eq!(src.spans().collect::<Vec<_>>(), vec![Span { line: 2, column: 3 }, Span { line: 4, column: 1 }]);
        let t = src.object("k").unwrap().unwrap();
        assert_eq!(t.data(), &[c(1.0, -2.0), c(0.5, 0.0)]);
    }

    #[test]
    fn edge_endpoints_in_either_order() {
        let a = parse("space a 2\nobj m a+ a- = 1 0 0 1\nedge m.1 m.2").unwrap();
        let b = parse("space a 2\nobj m a+ a- = 1 0 0 1\nedge m.2 m.1").unwrap();
        let ta = a.to_diagram().unwrap().evaluate().unwrap();
        let tb = b.to_diagram().unwrap().evaluate().unwrap();
        assert_eq!(ta, tb);
    }
}
