//! The depth-two strict dead end of Sol(2,2): length 20, every generator
//! drops to 19, every reduced pair to 18, and some third step does not drop.

use cayleyflows::deadend::{depth_two_example, depth_two_example_word, strict_depth};
use cayleyflows::geodesic::exact_length;
use cayleyflows::words::enumerate_irreducible;
use cayleyflows::{FreeWord, Parallelism};

fn main() -> cayleyflows::Result<()> {
    let g = depth_two_example();
    println!("g = {}", depth_two_example_word());
    println!("|g| = {}", exact_length(&g)?);
    for k in 1..=2 {
        let lengths: Vec<u64> = enumerate_irreducible(2, k)
            .map(|w| exact_length(&g.mul_word(&w)))
            .collect::<Result<_, _>>()?;
        println!("k = {k}: {} words, lengths {:?}", lengths.len(), lengths);
    }
    let probe = FreeWord::parse("a b a^-1", 2)?;
    println!("|g {probe}| = {}", exact_length(&g.mul_word(&probe))?);

    let r = strict_depth(&g, 4, &exact_length, &Parallelism::sequential())?;
    println!("strict depth {}", r.strict_depth);
    if let Some(w) = r.limiting_witness {
        println!("first word that stops decreasing: {w}, chain {:?}", r.witness_chain);
    }
    Ok(())
}
