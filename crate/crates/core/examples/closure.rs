//! Deriving new independence statements with the semigraphoid rules and
//! printing a checkable proof.

use relcausal::gaxioms::{closure, derivable, parse_statements, CiSet, CiStatement, ClosureBounds, Mode};
use relcausal::relcore::AttrSet;

fn main() -> relcausal::Result<()> {
    let mut given = CiSet::new(AttrSet::parse_list("A,B,C,D"));
    for s in parse_statements("A _|_ B | C @ R\nA _|_ D | B,C @ R")? {
        given.insert(s)?;
    }
    let bounds = ClosureBounds::default();

    let all = closure(&given, Mode::Semigraphoid, &bounds)?;
    println!("{} statements follow from {}:", all.len(), given.len());
    for s in all.iter() {
        println!("  {s}");
    }

    let goal = CiStatement::of("A", "D", "C", "R");
    let d = derivable(&given, &goal, Mode::Semigraphoid, &bounds)?;
    println!("\n{goal} derivable: {}", d.derivable);
    if let Some(trace) = d.trace {
        for (i, step) in trace.steps.iter().enumerate() {
            let premises: Vec<String> = step.premises.iter().map(ToString::to_string).collect();
            println!("  {}. {} from [{}] gives {}", i + 1, step.axiom, premises.join("; "), step.conclusion);
        }
        trace.replay(given.universe())?;
        println!("  proof replays cleanly");
    }
    Ok(())
}
