//! Reading the text format: parse a file, contract it with the planned order,
//! print it back, and show what errors look like.

use atemporal::dsl::{declaration_plan, parse, plan, serialize};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/diagrams/chain.diag");
    let text = std::fs::read_to_string(path)?;
    let src = parse(&text)?;
    let diagram = src.to_diagram()?;

    let p = plan(&diagram);
    println!("planned order {:?} costs {}, declaration order {}", p.order, p.cost, declaration_plan(&diagram).cost);
    let result = p.execute(&diagram)?;
    println!("result [{}] = {:?}", result.leg_summary(), result.data());

    print!("{}", serialize(&src));

    for bad in ["obj x q+ = 1", "space a 2\nobj v a+ = 1", "space a 2\nobj v a+ = 1 0\nedge v.1 w.1"] {
        let e = parse(bad).unwrap_err();
        println!("{e}");
    }
    Ok(())
}
