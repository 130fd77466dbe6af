//! Shortest relations in Sol(2,1) and Sol(2,2), and the tripling check.
//!
//! cargo run --release --example shortest_relation

use std::time::Instant;

use cayleyflows::relations::{check_recursion, recursion_lower_bound, shortest_relation};
use cayleyflows::{GroupSpec, Parallelism};

fn main() -> cayleyflows::Result<()> {
    let par = Parallelism::with_threads(0);
    let mut found = Vec::new();
    for (d, max_len) in [(1, 6), (2, 14)] {
        let start = Instant::now();
        let r = shortest_relation(GroupSpec::new(2, d)?, max_len, u64::MAX, &par)?;
        println!(
            "Sol(2,{d}): rho = {:?} in {:.1?}, {} witness classes",
            r.rho,
            start.elapsed(),
            r.witnesses.len()
        );
        for w in r.witnesses.iter().take(4) {
            println!("  {w}");
        }
        found.push(r.rho.expect("relation within the search length"));
    }
    println!("rho_2 >= 3 rho_1: {}", check_recursion(found[0], found[1]));
    println!("Sol(2,3): every relation has length at least {}", recursion_lower_bound(3));
    Ok(())
}
