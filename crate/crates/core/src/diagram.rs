//! Diagrams: objects joined by contraction lines.
//!
//! Edges keep the id they were given at construction (their position in the
//! declared edge list), so a contraction order can be written down before any
//! contraction happens and stays meaningful while objects merge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{Polarity, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LegRef {
    pub object: usize,
    pub leg: usize,
}

impl LegRef {
    pub fn new(object: usize, leg: usize) -> Self {
        Self { object, leg }
    }
}

/// A contraction line; `open` is the ket-side endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub open: LegRef,
    pub closed: LegRef,
}

impl Edge {
    pub fn new(open: LegRef, closed: LegRef) -> Self {
        Self { open, closed }
    }

    pub fn is_self_loop(&self) -> bool {
        self.open.object == self.closed.object
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct LegInfo {
    pub dim: usize,
    /// (object, leg) in the diagram as originally built.
    pub origin: (usize, usize),
}

/// What a single contraction does to the shape of a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Step {
    /// Scalar multiply-adds performed.
    pub cost: u128,
    /// Entries in the object produced by the step.
    pub result_size: u128,
}

/// Shape-only view of a diagram: leg dimensions per object plus active edges.
/// Shared by evaluation and the contraction planner.
#[derive(Debug, Clone)]
pub(crate) struct Skeleton {
    pub legs: Vec<Vec<LegInfo>>,
    pub edges: Vec<(usize, Edge)>,
}

fn size(legs: &[LegInfo]) -> u128 {
    legs.iter().map(|l| l.dim as u128).product()
}

impl Skeleton {
    pub fn edge(&self, id: usize) -> Result<Edge> {
        self.edges.iter().find(|(k, _)| *k == id).map(|(_, e)| *e).ok_or(Error::UnknownEdge(id))
    }

    pub fn edge_ids(&self) -> Vec<usize> {
        self.edges.iter().map(|(k, _)| *k).collect()
    }

    /// Shape effect of contracting `id` without performing it.
    pub fn preview(&self, id: usize) -> Result<Step> {
        let e = self.edge(id)?;
        let d = self.legs[e.open.object][e.open.leg].dim as u128;
        if e.is_self_loop() {
            let s = size(&self.legs[e.open.object]);
            Ok(Step { cost: s / d, result_size: s / (d * d) })
        } else {
            let s = size(&self.legs[e.open.object]) * size(&self.legs[e.closed.object]);
            Ok(Step { cost: s / d, result_size: s / (d * d) })
        }
    }

    /// Applies the bookkeeping of contracting `id`: the merged object takes
    /// the lower index, its legs are the lower object's survivors followed by
    /// the higher object's survivors.
    pub fn apply(&mut self, id: usize) -> Result<Step> {
        let step = self.preview(id)?;
        let e = self.edge(id)?;
        self.edges.retain(|(k, _)| *k != id);
        if e.is_self_loop() {
            let obj = e.open.object;
            let (lo, hi) = if e.open.leg < e.closed.leg { (e.open.leg, e.closed.leg) } else { (e.closed.leg, e.open.leg) };
            self.legs[obj].remove(hi);
            self.legs[obj].remove(lo);
            let shift = |leg: usize| leg - (leg > lo) as usize - (leg > hi) as usize;
            for (_, edge) in &mut self.edges {
                for r in [&mut edge.open, &mut edge.closed] {
                    if r.object == obj {
                        r.leg = shift(r.leg);
                    }
                }
            }
        } else {
            let (first, first_leg, second, second_leg) = if e.open.object < e.closed.object {
                (e.open.object, e.open.leg, e.closed.object, e.closed.leg)
            } else {
                (e.closed.object, e.closed.leg, e.open.object, e.open.leg)
            };
            let first_len = self.legs[first].len() - 1;
            let mut merged: Vec<LegInfo> = self.legs[first].clone();
            merged.remove(first_leg);
            let mut tail = self.legs[second].clone();
            tail.remove(second_leg);
            merged.extend(tail);
            self.legs[first] = merged;
            self.legs.remove(second);
            for (_, edge) in &mut self.edges {
                for r in [&mut edge.open, &mut edge.closed] {
                    if r.object == first {
                        r.leg -= (r.leg > first_leg) as usize;
                    } else if r.object == second {
                        r.object = first;
                        r.leg = first_len + r.leg - (r.leg > second_leg) as usize;
                    } else if r.object > second {
                        r.object -= 1;
                    }
                }
            }
        }
        Ok(step)
    }
}

/// A set of objects plus contraction lines between their legs.
#[derive(Debug, Clone)]
pub struct Diagram {
    objects: Vec<Tensor>,
    skeleton: Skeleton,
}

impl Diagram {
    /// Validates that every edge joins an open leg to a closed leg of the same
    /// space and that no leg takes part in two edges. Edge ids are positions
    /// in `edges`.
    pub fn new(objects: Vec<Tensor>, edges: Vec<Edge>) -> Result<Self> {
        let mut used: Vec<Vec<bool>> = objects.iter().map(|o| vec![false; o.legs().len()]).collect();
        for e in &edges {
            for r in [e.open, e.closed] {
                let obj = objects.get(r.object).ok_or(Error::UnknownObject(r.object))?;
                if r.leg >= obj.legs().len() {
                    return Err(Error::DanglingLeg { object: obj.name().to_string(), leg: r.leg, legs: obj.legs().len() });
                }
                if std::mem::replace(&mut used[r.object][r.leg], true) {
                    return Err(Error::LegReused { object: r.object, leg: r.leg });
                }
            }
            let open = &objects[e.open.object].legs()[e.open.leg];
            let closed = &objects[e.closed.object].legs()[e.closed.leg];
            open.check_joinable(closed)?;
            if open.polarity != Polarity::Open {
                return Err(Error::PolarityMismatch { left: open.polarity, right: closed.polarity });
            }
        }
        let legs = objects
            .iter()
            .enumerate()
            .map(|(k, o)| o.legs().iter().enumerate().map(|(l, leg)| LegInfo { dim: leg.dim(), origin: (k, l) }).collect())
            .collect();
        let skeleton = Skeleton { legs, edges: edges.into_iter().enumerate().collect() };
        Ok(Self { objects, skeleton })
    }

    pub fn objects(&self) -> &[Tensor] {
        &self.objects
    }

    /// Active edges with their ids.
    pub fn edges(&self) -> &[(usize, Edge)] {
        &self.skeleton.edges
    }

    pub fn edge_ids(&self) -> Vec<usize> {
        self.skeleton.edge_ids()
    }

    pub(crate) fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    /// Contracts one edge. Two distinct objects are replaced by their product
    /// (placed at the lower index); a self-loop becomes a partial trace.
    pub fn contract_pair(&self, edge: usize) -> Result<Diagram> {
        let e = self.skeleton.edge(edge)?;
        let mut objects = self.objects.clone();
        if e.is_self_loop() {
            objects[e.open.object] = objects[e.open.object].trace(e.open.leg, e.closed.leg)?;
        } else {
            let (first, first_leg, second, second_leg) = if e.open.object < e.closed.object {
                (e.open.object, e.open.leg, e.closed.object, e.closed.leg)
            } else {
                (e.closed.object, e.closed.leg, e.open.object, e.open.leg)
            };
            let merged = objects[first].contract(&objects[second], &[(first_leg, second_leg)])?;
            objects[first] = merged;
            objects.remove(second);
        }
        let mut skeleton = self.skeleton.clone();
        skeleton.apply(edge)?;
        Ok(Diagram { objects, skeleton })
    }

    /// Contracts every edge in `order` (a permutation of the active edge
    /// ids). Remaining disconnected objects are joined by tensor product.
    /// Surviving legs come out in the order they had in the original
    /// diagram, so the result does not depend on `order`.
    pub fn contract_all(&self, order: &[usize]) -> Result<Tensor> {
        let mut ids = self.edge_ids();
        let mut given = order.to_vec();
        ids.sort_unstable();
        given.sort_unstable();
        if ids != given {
            return Err(Error::NotAPermutation);
        }
        let mut current = self.clone();
        for &id in order {
            current = current.contract_pair(id)?;
        }
        current.into_tensor()
    }

    /// Contracts edges in declaration order.
    pub fn evaluate(&self) -> Result<Tensor> {
        self.contract_all(&self.edge_ids())
    }

    fn into_tensor(self) -> Result<Tensor> {
        let Diagram { objects, skeleton } = self;
        let mut iter = objects.into_iter();
        let mut result = match iter.next() {
            Some(t) => t,
            None => return Ok(Tensor::scalar(crate::linalg::ONE)),
        };
        for t in iter {
            result = result.outer(&t);
        }
        let origins: Vec<(usize, usize)> = skeleton.legs.iter().flatten().map(|l| l.origin).collect();
        let mut order: Vec<usize> = (0..origins.len()).collect();
        order.sort_by_key(|&k| origins[k]);
        Ok(result.permute(&order)?.with_name("result"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ONE, ZERO};
    use crate::tensor::{Leg, Space};

    fn sp(label: &str, d: usize) -> Space {
        Space::new(label, d).unwrap()
    }

    #[test]
    fn inner_product_diagram() {
        let a = sp("a", 2);
        let psi = Tensor::ket("psi", &a, vec![ONE, ZERO]).unwrap();
        let d = Diagram::new(vec![psi.clone(), psi.adjoint()], vec![Edge::new(LegRef::new(0, 0), LegRef::new(1, 0))]).unwrap();
        assert_eq!(d.evaluate().unwrap().scalar_value(), Some(ONE));
    }

    #[test]
    fn self_loop_traces() {
        let a = sp("a", 3);
        let d = Diagram::new(vec![Tensor::identity(&a)], vec![Edge::new(LegRef::new(0, 0), LegRef::new(0, 1))]).unwrap();
        assert_eq!(d.evaluate().unwrap().scalar_value(), Some(c(3.0, 0.0)));
    }

    #[test]
    fn empty_edge_set_is_noop() {
        let a = sp("a", 2);
        let psi = Tensor::ket("psi", &a, vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let d = Diagram::new(vec![psi.clone()], vec![]).unwrap();
        let out = d.contract_all(&[]).unwrap();
        assert_eq!(out.data(), psi.data());
        assert_eq!(out.legs(), psi.legs());
    }

    #[test]
    fn rejects_invalid_edges() {
        let (a, b) = (sp("a", 2), sp("b", 2));
        let x = Tensor::ket("x", &a, vec![ONE, ZERO]).unwrap();
        let y = Tensor::ket("y", &b, vec![ONE, ZERO]).unwrap();
        let e = Edge::new(LegRef::new(0, 0), LegRef::new(1, 0));
        assert!(matches!(Diagram::new(vec![x.clone(), y.adjoint()], vec![e]), Err(Error::SpaceMismatch { .. })));
        assert!(matches!(Diagram::new(vec![x.clone(), x.clone()], vec![e]), Err(Error::PolarityMismatch { .. })));
        let bad = Edge::new(LegRef::new(0, 4), LegRef::new(1, 0));
        assert!(matches!(Diagram::new(vec![x.clone(), x.adjoint()], vec![bad]), Err(Error::DanglingLeg { .. })));
        let op = Tensor::identity(&a);
        let twice = vec![Edge::new(LegRef::new(0, 0), LegRef::new(1, 1)), Edge::new(LegRef::new(0, 0), LegRef::new(1, 1))];
        assert!(matches!(Diagram::new(vec![op.clone(), op], twice), Err(Error::LegReused { .. })));
    }

    #[test]
    fn order_must_be_permutation() {
        let a = sp("a", 2);
        let d = Diagram::new(vec![Tensor::identity(&a)], vec![Edge::new(LegRef::new(0, 0), LegRef::new(0, 1))]).unwrap();
        assert!(matches!(d.contract_all(&[]), Err(Error::NotAPermutation)));
        assert!(matches!(d.contract_all(&[0, 0]), Err(Error::NotAPermutation)));
        assert!(matches!(d.contract_pair(7), Err(Error::UnknownEdge(7))));
    }

    #[test]
    fn pair_keeps_first_object_legs_first() {
        let (a, b) = (sp("a", 2), sp("b", 3));
        let m = Tensor::zeros("M", vec![Leg::open(&b), Leg::closed(&a)]);
        let psi = Tensor::ket("psi", &a, vec![ONE, ZERO]).unwrap();
        // psi is object 0, so its (empty) surviving legs come before M's b+
        let d = Diagram::new(vec![psi, m], vec![Edge::new(LegRef::new(0, 0), LegRef::new(1, 1))]).unwrap();
        let after = d.contract_pair(0).unwrap();
        assert_eq!(after.objects().len(), 1);
        assert_eq!(after.objects()[0].legs(), &[Leg::open(&b)]);
    }

    #[test]
    fn three_edge_orders_agree() {
        // triangle A(a+, b-) B(b+, c-) C(c+, a-) closed into a scalar
        let (a, b, cc) = (sp("a", 2), sp("b", 3), sp("c", 2));
        let fill = |n: usize, s: f64| (0..n).map(|k| c((k as f64 * s).sin(), (k as f64 * s).cos())).collect::<Vec<_>>();
        let ta = Tensor::new("A", vec![Leg::open(&a), Leg::closed(&b)], fill(6, 0.7)).unwrap();
        let tb = Tensor::new("B", vec![Leg::open(&b), Leg::closed(&cc)], fill(6, 1.3)).unwrap();
        let tc = Tensor::new("C", vec![Leg::open(&cc), Leg::closed(&a)], fill(4, 2.1)).unwrap();
        let edges = vec![
            Edge::new(LegRef::new(1, 0), LegRef::new(0, 1)),
            Edge::new(LegRef::new(2, 0), LegRef::new(1, 1)),
            Edge::new(LegRef::new(0, 0), LegRef::new(2, 1)),
        ];
        let d = Diagram::new(vec![ta.clone(), tb.clone(), tc.clone()], edges).unwrap();
        let x = d.contract_all(&[0, 1, 2]).unwrap().scalar_value().unwrap();
        let y = d.contract_all(&[2, 0, 1]).unwrap().scalar_value().unwrap();
        let z = d.contract_all(&[1, 2, 0]).unwrap().scalar_value().unwrap();
        let trace = (ta.as_operator().unwrap() * tb.as_operator().unwrap() * tc.as_operator().unwrap()).trace();
        for v in [x, y, z] {
            assert!((v - trace).norm() < 1e-12);
        }
    }
}
