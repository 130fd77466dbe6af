//! Exact lengths in Sol(2,2) against breadth-first search.
//!
//! cargo run --release --example geodesic_length -- abAABBab

use cayleyflows::geodesic::{bfs_length_oracle, length_exact_metabelian, OracleOutcome};
use cayleyflows::{FreeWord, GroupSpec, Limits, SolubleElement};

fn main() -> cayleyflows::Result<()> {
    let spec = GroupSpec::new(2, 2)?;
    let words: Vec<String> = match std::env::args().nth(1) {
        Some(w) => vec![w],
        None => ["abAB", "aabAAB", "bbbabABBBB", "abABbbbbbabABBBBBB", "abAABBab", "abABbaBA"]
            .map(String::from)
            .to_vec(),
    };
    for w in words {
        let x = SolubleElement::from_word(&FreeWord::parse(&w, 2)?, spec)?;
        let r = length_exact_metabelian(&x)?;
        let oracle = match bfs_length_oracle(&x, 16, &Limits::default())? {
            OracleOutcome::Exact(n) => n.to_string(),
            OracleOutcome::ExceedsRadius => ">16".into(),
        };
        println!(
            "{w:>12}  |g| = {:>2}  (N {} + 2*{})  bfs {oracle:>3}  geodesic {}",
            r.length,
            r.weight_n,
            r.connection_cost,
            r.witness
        );
    }
    Ok(())
}
