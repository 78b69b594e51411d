//! A line-oriented text format for diagrams.
//!
//! ```text
//! # comments run to the end of the line
//! space a 2
//! obj m a+ a- = 1 0 0 (0,1)
//! edge m.1 m.2
//! ```
//!
//! `space NAME DIM` declares a Hilbert space. `obj NAME LEG... = VALUE...`
//! declares a tensor; each leg is a space name followed by `+` (ket node) or
//! `-` (bra node), and the values are listed row-major over the legs. A value
//! is a real number or `(re,im)`. `edge OBJ.LEG OBJ.LEG` joins two legs
//! (1-based); one of them must be open and the other closed. Spaces must be
//! declared before use.

mod parse;
mod plan;

pub use parse::{parse, ErrorKind, ParseError};
pub use plan::{declaration_plan, greedy_plan, plan, ContractionPlan};

use std::fmt::Write as _;

use crate::diagram::{Diagram, Edge, LegRef};
use crate::error::Result;
use crate::linalg::C64;
use crate::tensor::{Leg, Polarity, Space, SpaceRegistry, Tensor};

/// 1-based source position of a statement's first token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

/// `(object name, 1-based leg index)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegName {
    pub object: String,
    pub leg: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Space { label: String, dim: usize },
    Object { name: String, legs: Vec<(String, Polarity)>, values: Vec<C64> },
    Edge { first: LegName, second: LegName },
}

/// A parsed file: statements in source order with their spans. Every
/// reference has been resolved, so conversion to a [`Diagram`] can only fail
/// on numerical grounds.
#[derive(Debug, Clone, Default)]
pub struct DiagramSource {
    statements: Vec<(Statement, Span)>,
}

impl DiagramSource {
    pub fn statements(&self) -> impl Iterator<Item = &Statement> {
        self.statements.iter().map(|(s, _)| s)
    }

    pub fn spans(&self) -> impl Iterator<Item = Span> + '_ {
        self.statements.iter().map(|(_, s)| *s)
    }

    /// Equality of the statements, ignoring where they came from.
    pub fn same_structure(&self, other: &DiagramSource) -> bool {
        self.statements().eq(other.statements())
    }

    pub fn spaces(&self) -> SpaceRegistry {
        let mut reg = SpaceRegistry::new();
        for s in self.statements() {
            if let Statement::Space { label, dim } = s {
                reg.insert(Space::new(label.clone(), *dim).expect("checked by the parser"));
            }
        }
        reg
    }

    pub fn object_names(&self) -> Vec<&str> {
        self.statements()
            .filter_map(|s| match s {
                Statement::Object { name, .. } => Some(name.as_str()),
                _ => None,
            })
            .collect()
    }

    /// All objects as tensors, in declaration order.
    pub fn objects(&self) -> Result<Vec<Tensor>> {
        let reg = self.spaces();
        self.statements()
            .filter_map(|s| match s {
                Statement::Object { name, legs, values } => Some((name, legs, values)),
                _ => None,
            })
            .map(|(name, legs, values)| {
                let legs = legs
                    .iter()
                    .map(|(label, pol)| Leg { space: reg.get(label).expect("checked by the parser").clone(), polarity: *pol })
                    .collect();
                Tensor::new(name.clone(), legs, values.clone())
            })
            .collect()
    }

    pub fn object(&self, name: &str) -> Result<Option<Tensor>> {
        Ok(self.objects()?.into_iter().find(|t| t.name() == name))
    }

    pub fn to_diagram(&self) -> Result<Diagram> {
        let objects = self.objects()?;
        let index = |n: &LegName| {
            let obj = objects.iter().position(|t| t.name() == n.object).expect("checked by the parser");
            LegRef::new(obj, n.leg - 1)
        };
        let mut edges = Vec::new();
        for s in self.statements() {
            if let Statement::Edge { first, second } = s {
                let (x, y) = (index(first), index(second));
                let open_first = objects[x.object].legs()[x.leg].polarity == Polarity::Open;
                edges.push(if open_first { Edge::new(x, y) } else { Edge::new(y, x) });
            }
        }
        Diagram::new(objects, edges)
    }
}

/// Shortest text that reads back as the same `f64`; exponent form for very
/// small or very large magnitudes.
fn number(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn value(z: C64) -> String {
    if z.im == 0.0 {
        number(z.re)
    } else {
        format!("({},{})", number(z.re), number(z.im))
    }
}

/// One statement per line, comments dropped. `parse(serialize(x))` has the
/// same structure as `x`.
pub fn serialize(source: &DiagramSource) -> String {
    let mut out = String::new();
    for s in source.statements() {
        match s {
            Statement::Space { label, dim } => writeln!(out, "space {label} {dim}"),
            Statement::Object { name, legs, values } => {
                let legs: Vec<String> = legs
                    .iter()
                    .map(|(l, p)| format!("{l}{}", if *p == Polarity::Open { '+' } else { '-' }))
                    .collect();
                let values: Vec<String> = values.iter().map(|z| value(*z)).collect();
                writeln!(out, "obj {name} {} = {}", legs.join(" "), values.join(" "))
            }
            Statement::Edge { first, second } => {
                writeln!(out, "edge {}.{} {}.{}", first.object, first.leg, second.object, second.leg)
            }
        }
        .expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn number_format() {
        assert_eq!(value(c(0.5, -0.5)), "(0.5,-0.5)");
        assert_eq!(value(c(1.0, 0.0)), "1");
        assert_eq!(value(c(1e-300, 0.0)), "1e-300");
        assert_eq!(value(c(0.1 + 0.2, 0.0)), "0.30000000000000004");
        assert_eq!(serialize(&DiagramSource::default()), "");
    }

    #[test]
    fn round_trip() {
        let text = "space a 2 # qubit\nspace b 3\n\nobj psi a+ b- = 1 (0.5,-0.5) 0 0 1e-300 -2.5\nobj m a+ a- = 1 0 0 1\nedge m.2 m.1\nobj n a- = 1 (0,1)\nedge psi.1 n.1\n";
        let src = parse(text).unwrap();
        let again = parse(&serialize(&src)).unwrap();
        assert!(src.same_structure(&again));
        assert_eq!(serialize(&again), serialize(&src));
    }

    #[test]
    fn self_loop_trace() {
        let src = parse("space a 2\nobj m a+ a- = 1 0 0 1\nedge m.2 m.1").unwrap();
        let t = src.to_diagram().unwrap().evaluate().unwrap();
        assert_eq!(t.scalar_value(), Some(c(2.0, 0.0)));
    }

    #[test]
    fn single_ket() {
        let src = parse("space a 2\nobj psi a+ = 1 0").unwrap();
        let objs = src.objects().unwrap();
        assert_eq!(objs.len(), 1);
        assert_eq!(objs[0].legs(), [Leg::open(&Space::new("a", 2).unwrap())]);
    }
}
