use serde::Serialize;

use crate::diagram::Diagram;
use crate::error::Result;
use crate::tensor::Tensor;

/// An order of edge ids and its cost in scalar multiply-adds. Each step costs
/// the product of every dimension it touches: `size_i size_j / d` for two
/// objects joined along a leg of dimension `d`, `size / d` for a trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractionPlan {
    pub order: Vec<usize>,
    pub cost: u128,
}

impl ContractionPlan {
    pub fn execute(&self, diagram: &Diagram) -> Result<Tensor> {
        diagram.contract_all(&self.order)
    }
}

fn cost_of(diagram: &Diagram, order: &[usize]) -> Result<u128> {
    let mut sk = diagram.skeleton().clone();
    let mut total = 0u128;
    for &id in order {
        total = total.saturating_add(sk.apply(id)?.cost);
    }
    Ok(total)
}

pub fn declaration_plan(diagram: &Diagram) -> ContractionPlan {
    let order = diagram.edge_ids();
    let cost = cost_of(diagram, &order).expect("edge ids come from the diagram");
    ContractionPlan { order, cost }
}

/// The greedy order, unless declaration order is strictly cheaper. Greedy
/// alone loses to declaration order on a small fraction of diagrams.
pub fn plan(diagram: &Diagram) -> ContractionPlan {
    let greedy = greedy_plan(diagram);
    let decl = declaration_plan(diagram);
    if decl.cost < greedy.cost {
        decl
    } else {
        greedy
    }
}

/// At each step contract the edge whose result is smallest, ties going to
/// the earlier declared edge.
pub fn greedy_plan(diagram: &Diagram) -> ContractionPlan {
    let mut sk = diagram.skeleton().clone();
    let mut order = Vec::new();
    let mut cost = 0u128;
    while !sk.edges.is_empty() {
        let best = sk
            .edge_ids()
            .into_iter()
            .map(|id| (sk.preview(id).expect("active edge").result_size, id))
            .min()
            .expect("nonempty")
            .1;
        cost = cost.saturating_add(sk.apply(best).expect("active edge").cost);
        order.push(best);
    }
    ContractionPlan { order, cost }
}
