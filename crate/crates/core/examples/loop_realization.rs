//! A balanced flow on Z^2 turned back into a closed walk.

use cayleyflows::flows::{flow_from_word, realize_loop};
use cayleyflows::{CayleyGraph, FreeWord, Lattice};

fn main() -> cayleyflows::Result<()> {
    let z2 = Lattice::new(2);
    // a closed walk that crosses itself and reuses edges
    let word = FreeWord::parse("abABabABAbaB", 2)?;
    let (flow, end) = flow_from_word(&z2, &word);
    assert_eq!(end, vec![0, 0]);
    println!("weight {} on {} edges", flow.weight(), flow.len());
    for (e, v) in flow.entries() {
        println!("  {} -{}-> {:+}", z2.vertex_form(&e.source), cayleyflows::Letter::positive(e.generator), v);
    }
    let walk = realize_loop(&z2, &flow, &vec![0, 0])?;
    let letters: String = walk.letters.iter().map(|l| l.to_char()).collect();
    println!("realized: {letters} ({} steps)", walk.len());
    println!("same flow: {}", walk.flow(&z2) == flow);
    Ok(())
}
