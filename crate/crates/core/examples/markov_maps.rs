//! Undirected graphs as maps of independence: separation, checking a P-map
//! against data, and combining two P-maps that share a join vertex.

use relcausal::synth;
use relcausal::ugm::{union_imap, verify_map_on, MapKind, UndirectedGraph};

fn main() -> relcausal::Result<()> {
    let left = UndirectedGraph::path(&["A", "B", "D"]);
    let right = UndirectedGraph::from_edges(&["D", "E", "F"], &[("D", "E"), ("D", "F")])?;

    let mut rng = synth::rng(7);
    let r = synth::pmap_relation(&mut rng, "R", &left, 2, 200)?.expect("a faithful instance");
    let s = synth::pmap_relation(&mut rng, "S", &right, 2, 200)?.expect("a faithful instance");
    for (g, rel) in [(&left, &r), (&right, &s)] {
        let v = verify_map_on(g, rel, MapKind::PMap)?;
        println!("{}: P-map on {} triples: {}", rel.name(), v.checked, v.holds);
    }

    let union = union_imap(&left, &right, &"D".into())?;
    let j = relcausal::relcore::natural_join(&r, &s);
    let v = verify_map_on(&union, &j, MapKind::IMap)?;
    println!("union is an I-map of R ⋈ S: {} ({} triples)", v.holds, v.checked);
    println!("\n{}", union.to_dot());
    Ok(())
}

